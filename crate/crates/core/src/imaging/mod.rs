//! The ghost-imaging functions.
//!
//! Every implemented imaging function is a quadratic form in the mode
//! shapes, `I(x) = sum_{j,l} A_{jl} phi_j(x) phi_l(x)`, with a coefficient
//! matrix assembled once from the coupling matrices, the transport
//! statistics and the reflectivity moments. [`ImageEvaluator`] holds that
//! matrix and evaluates points or whole profiles.

mod homogeneous;
mod random;

pub use homogeneous::{
    homogeneous_general_evaluator, homogeneous_ideal_evaluator, homogeneous_long_time_evaluator,
    image_homogeneous_general, image_homogeneous_ideal, image_homogeneous_long_time,
    HomogeneousImageSpec,
};
pub use random::{
    image_random_equipartition, image_random_general, image_random_reference, image_random_strong,
    image_random_weak, incident_flux_contribution, incident_flux_evaluator,
    random_equipartition_evaluator, random_general_evaluator, random_reference_evaluator,
    random_strong_evaluator, random_weak_evaluator, RandomImageSpec, Regime,
};

use crate::waveguide::ModeBasis;
use ndarray::Array2;

/// A precomputed imaging function `I(x) = phi(x)^T A phi(x)`.
#[derive(Debug, Clone)]
pub struct ImageEvaluator {
    coeff: Array2<f64>,
    basis: ModeBasis,
}

impl ImageEvaluator {
    pub(crate) fn new(coeff: Array2<f64>, basis: ModeBasis) -> Self {
        Self { coeff, basis }
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let shapes = self.basis.shapes_at(x);
        let n = shapes.len();
        let mut acc = 0.0;
        for j in 0..n {
            let sj = shapes[j];
            if sj == 0.0 {
                continue;
            }
            let row = self.coeff.row(j);
            let mut inner = 0.0;
            for l in 0..n {
                inner += row[l] * shapes[l];
            }
            acc += sj * inner;
        }
        acc
    }

    /// Evaluates the image over a cross-range grid.
    pub fn profile(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&x| self.evaluate(x)).collect()
    }
}

/// Uniform grid of `n` points spanning `[0, X]`.
pub fn cross_range_grid(width: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    (0..n)
        .map(|i| width * i as f64 / (n - 1) as f64)
        .collect()
}

/// `H(t)` with the closed-interval convention `H(0) = 1`: a window equal to
/// an arrival time includes that mode's full contribution.
pub(crate) fn heaviside(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `W_{ab} = sum_m V_{am} V_{bm} / beta_m` from reflectivity moments.
pub(crate) fn weighted_overlap(v: &Array2<f64>, beta: &[f64]) -> Array2<f64> {
    let n = beta.len();
    let mut w = Array2::<f64>::zeros((n, n));
    for a in 0..n {
        for b in a..n {
            let mut acc = 0.0;
            for (m, &bm) in beta.iter().enumerate() {
                acc += v[[a, m]] * v[[b, m]] / bm;
            }
            w[[a, b]] = acc;
            w[[b, a]] = acc;
        }
    }
    w
}
