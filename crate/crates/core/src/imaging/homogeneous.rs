//! Imaging function in the unperturbed waveguide.
//!
//! The finite-window form gates each detector-mode term by the Heaviside
//! factor `H(T - beta'_n L_det)` (and, for the off-diagonal source terms,
//! `H(T - beta'_n L_det + (beta'_j - beta'_j') L_src)`): a mode contributes
//! only once the window covers its arrival. Past the slowest arrival every
//! gate is open and the image becomes window-independent and, notably,
//! independent of the target range.

use super::{heaviside, weighted_overlap, ImageEvaluator};
use crate::coupling::CouplingMatrices;
use crate::error::{Error, Result};
use crate::reflectivity::Reflectivity;
use crate::waveguide::{ModeBasis, ScaledRanges};
use ndarray::Array2;

/// Inputs of the unperturbed-waveguide imaging function.
#[derive(Debug, Clone)]
pub struct HomogeneousImageSpec {
    pub basis: ModeBasis,
    pub ranges: ScaledRanges,
    pub coupling: CouplingMatrices,
    pub reflectivity: Reflectivity,
}

impl HomogeneousImageSpec {
    fn check(&self) -> Result<()> {
        if self.coupling.mode_count() != self.basis.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.mode_count(),
                got: self.coupling.mode_count(),
            });
        }
        Ok(())
    }

    /// `k0^2 ||F||^2 / (32 rho0^2 c0^2)`.
    fn prefactor(&self) -> f64 {
        let g = self.basis.geometry();
        let k0 = g.wavenumber();
        k0 * k0 * self.ranges.spectrum_norm
            / (32.0 * g.density * g.density * g.sound_speed * g.sound_speed)
    }
}

/// General finite-window image with arrival gating.
pub fn homogeneous_general_evaluator(spec: &HomogeneousImageSpec) -> Result<ImageEvaluator> {
    spec.check()?;
    let window = spec.ranges.window;
    if !(window >= 0.0) {
        return Err(Error::Domain {
            quantity: "window",
            value: window,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let n = spec.basis.mode_count();
    let beta = spec.basis.betas();
    let beta_prime = spec.basis.beta_primes();
    let l_src = spec.ranges.source_target;
    let l_det = spec.ranges.target_detector;
    let v = spec.reflectivity.mode_moments(&spec.basis)?;
    let w = weighted_overlap(&v, beta);
    let s = &spec.coupling.s;
    let d_diag = spec.coupling.d_diag();
    let s_diag = spec.coupling.s_diag();

    // first-arrival gates, one per detector mode
    let gate1: Vec<f64> = (0..n)
        .map(|m| heaviside(window - beta_prime[m] * l_det))
        .collect();

    // diagonal-source block: (beta_j + beta_l) s_j s_l phi_j phi_l G1_{lj}
    // with G1_{lj} = sum_n gate1_n d_n V_{ln} V_{jn} / beta_n
    //               - 2 gate1_l d_l W_{jl}
    let mut coeff = Array2::<f64>::zeros((n, n));
    for l in 0..n {
        for j in 0..n {
            let mut g1 = 0.0;
            for m in 0..n {
                g1 += gate1[m] * d_diag[m] * v[[l, m]] * v[[j, m]] / beta[m];
            }
            g1 -= 2.0 * gate1[l] * d_diag[l] * w[[j, l]];
            coeff[[j, l]] += (beta[j] + beta[l]) * s_diag[j] * s_diag[l] * g1;
        }
    }

    // off-diagonal source block: the gate also carries the inter-mode
    // delay (beta'_j - beta'_j') L_src picked up before the target
    for j in 0..n {
        let mut acc = 0.0;
        for jp in 0..n {
            if jp == j {
                continue;
            }
            let shift = (beta_prime[j] - beta_prime[jp]) * l_src;
            let mut t = 0.0;
            for m in 0..n {
                let gate2 = heaviside(window - beta_prime[m] * l_det + shift);
                t += gate2 * d_diag[m] * v[[jp, m]] * v[[jp, m]] / beta[m];
            }
            let gate2_jp = heaviside(window - beta_prime[jp] * l_det + shift);
            t -= 2.0 * gate2_jp * d_diag[jp] * w[[jp, jp]];
            acc += s[[j, jp]] * s[[j, jp]] * t;
        }
        coeff[[j, j]] += 2.0 * beta[j] * acc;
    }

    coeff *= spec.prefactor();
    Ok(ImageEvaluator::new(coeff, spec.basis.clone()))
}

/// Long-window image: every arrival gate open, window-independent.
pub fn homogeneous_long_time_evaluator(spec: &HomogeneousImageSpec) -> Result<ImageEvaluator> {
    spec.check()?;
    let n = spec.basis.mode_count();
    let beta = spec.basis.betas();
    let v = spec.reflectivity.mode_moments(&spec.basis)?;
    let w = weighted_overlap(&v, beta);
    let s = &spec.coupling.s;
    let d_diag = spec.coupling.d_diag();
    let s_diag = spec.coupling.s_diag();

    // G_{lj} = sum_n (d_n / beta_n) V_{ln} V_{jn} - 2 d_j W_{lj}
    let mut g = Array2::<f64>::zeros((n, n));
    for l in 0..n {
        for j in 0..n {
            let mut u = 0.0;
            for m in 0..n {
                u += d_diag[m] * v[[l, m]] * v[[j, m]] / beta[m];
            }
            g[[l, j]] = u - 2.0 * d_diag[j] * w[[l, j]];
        }
    }

    let mut coeff = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        for l in 0..n {
            coeff[[j, l]] = (beta[j] + beta[l]) * s_diag[j] * s_diag[l] * g[[l, j]];
        }
    }
    for j in 0..n {
        let mut acc = 0.0;
        for jp in 0..n {
            if jp != j {
                acc += s[[j, jp]] * s[[j, jp]] * g[[jp, jp]];
            }
        }
        coeff[[j, j]] += 2.0 * beta[j] * acc;
    }

    coeff *= spec.prefactor();
    Ok(ImageEvaluator::new(coeff, spec.basis.clone()))
}

/// Ideal image for an incoherent full-aperture source and full detector:
/// `-(k0^2 ||F||^2 / (16 rho0^2 c0^2))
///   iint r(y) r(y') Phi_0(x,y) Phi_1(x,y') Phi_{-1}(y,y')`.
///
/// Assembled directly from the triple-kernel form, independent of the
/// gated code paths, so the two routes can check each other.
pub fn homogeneous_ideal_evaluator(
    basis: &ModeBasis,
    ranges: &ScaledRanges,
    reflectivity: &Reflectivity,
) -> Result<ImageEvaluator> {
    let n = basis.mode_count();
    let beta = basis.betas();
    let v = reflectivity.mode_moments(basis)?;
    let w = weighted_overlap(&v, beta);
    let g = basis.geometry();
    let k0 = g.wavenumber();
    let pref = -k0 * k0 * ranges.spectrum_norm
        / (16.0 * g.density * g.density * g.sound_speed * g.sound_speed);
    let mut coeff = Array2::<f64>::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            coeff[[a, b]] = pref * beta[b] * w[[a, b]];
        }
    }
    Ok(ImageEvaluator::new(coeff, basis.clone()))
}

/// Finite-window image at one cross-range point.
pub fn image_homogeneous_general(spec: &HomogeneousImageSpec, x: f64) -> Result<f64> {
    Ok(homogeneous_general_evaluator(spec)?.evaluate(x))
}

/// Long-window image at one cross-range point.
pub fn image_homogeneous_long_time(spec: &HomogeneousImageSpec, x: f64) -> Result<f64> {
    Ok(homogeneous_long_time_evaluator(spec)?.evaluate(x))
}

/// Ideal full-aperture image at one cross-range point.
pub fn image_homogeneous_ideal(
    basis: &ModeBasis,
    ranges: &ScaledRanges,
    reflectivity: &Reflectivity,
    x: f64,
) -> Result<f64> {
    Ok(homogeneous_ideal_evaluator(basis, ranges, reflectivity)?.evaluate(x))
}
