//! The kernel sums `Phi_n` and their large-N Bessel approximations.
//!
//! `Phi_n(x, y) = sum_j w_j beta_j^n phi_j(x) phi_j(y)` with unit weights by
//! default, or the diagonals of S or D. Away from the walls the unweighted
//! sums are close to Bessel shapes in the separation `d = x - y`:
//!
//! - `Phi_-1 ~ J0(k0 d) / 2`
//! - `Phi_0  ~ (k0/pi) sinc(k0 |d|)`
//! - `Phi_1  ~ (k0^2/2) J1(k0 |d|) / (k0 |d|)`
//!
//! All three peak at `d = 0` and decay over `lambda0 / 2`, which sets the
//! cross-range resolution of the imaging kernels.

use crate::bessel::{bessel_j0, bessel_j1_over_t, sinc};
use crate::error::{Error, Result};
use crate::waveguide::{ModeBasis, WaveguideGeometry};

/// Orders with a defined kernel sum.
pub const PHI_ORDERS: [i32; 4] = [-1, 0, 1, 2];

/// `sum_{j=1}^N w_j beta_j^n phi_j(x) phi_j(y)`; `weights = None` means unit
/// weights, otherwise one weight per mode (e.g. `diag(S)` or `diag(D)`).
pub fn phi_sum(
    n: i32,
    x: f64,
    y: f64,
    basis: &ModeBasis,
    weights: Option<&[f64]>,
) -> Result<f64> {
    if !PHI_ORDERS.contains(&n) {
        return Err(Error::Domain {
            quantity: "phi order",
            value: n as f64,
            lo: -1.0,
            hi: 2.0,
        });
    }
    if let Some(w) = weights {
        if w.len() != basis.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: basis.mode_count(),
                got: w.len(),
            });
        }
    }
    let mut acc = 0.0;
    for j in 1..=basis.mode_count() {
        let w = weights.map_or(1.0, |w| w[j - 1]);
        acc += w * power(basis.beta(j), n) * basis.shape(j, x) * basis.shape(j, y);
    }
    Ok(acc)
}

fn power(beta: f64, n: i32) -> f64 {
    match n {
        -1 => 1.0 / beta,
        0 => 1.0,
        1 => beta,
        2 => beta * beta,
        _ => beta.powi(n),
    }
}

/// A kernel sum bound to a basis and optional diagonal weights.
#[derive(Debug, Clone)]
pub struct PhiKernel {
    order: i32,
    weights: Option<Vec<f64>>,
    basis: ModeBasis,
}

impl PhiKernel {
    pub fn new(order: i32, basis: ModeBasis, weights: Option<Vec<f64>>) -> Result<Self> {
        if !PHI_ORDERS.contains(&order) {
            return Err(Error::Domain {
                quantity: "phi order",
                value: order as f64,
                lo: -1.0,
                hi: 2.0,
            });
        }
        if let Some(w) = &weights {
            if w.len() != basis.mode_count() {
                return Err(Error::DimensionMismatch {
                    expected: basis.mode_count(),
                    got: w.len(),
                });
            }
        }
        Ok(Self {
            order,
            weights,
            basis,
        })
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        phi_sum(self.order, x, y, &self.basis, self.weights.as_deref())
            .expect("orders and weights validated at construction")
    }
}

/// Interior Bessel approximation of the unweighted `Phi_n`, `n in {-1,0,1}`,
/// as a function of the separation `d = x - y`.
///
/// The `n = 1` amplitude is `k0^2/2` (limit `k0^2/4` at `d = 0`): that is
/// the value the mode sum actually approaches, as fixed by the same
/// sum-to-integral reduction that produces the `n = -1` and `n = 0` forms.
pub fn phi_bessel_approx(n: i32, separation: f64, geometry: &WaveguideGeometry) -> Result<f64> {
    let k0 = geometry.wavenumber();
    let t = k0 * separation;
    match n {
        -1 => Ok(0.5 * bessel_j0(t)),
        0 => Ok(k0 / std::f64::consts::PI * sinc(t.abs())),
        1 => Ok(k0 * k0 / 2.0 * bessel_j1_over_t(t.abs())),
        _ => Err(Error::Domain {
            quantity: "phi approximation order",
            value: n as f64,
            lo: -1.0,
            hi: 1.0,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::WaveguideGeometry;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn basis(ratio: f64) -> ModeBasis {
        let g = WaveguideGeometry::from_mode_ratio(ratio, 1.0).unwrap();
        ModeBasis::new(&g).unwrap()
    }

    #[test]
    fn single_mode_sum_is_a_product() {
        let b = basis(1.2);
        assert_eq!(b.mode_count(), 1);
        let (x, y) = (0.3 * b.geometry().width, 0.61 * b.geometry().width);
        let v = phi_sum(0, x, y, &b, None).unwrap();
        assert_relative_eq!(v, b.shape(1, x) * b.shape(1, y), max_relative = 1e-15);
    }

    #[test]
    fn identity_weights_reproduce_unweighted_sum() {
        let b = basis(40.5);
        let w = vec![1.0; 40];
        let (x, y) = (0.41 * b.geometry().width, 0.52 * b.geometry().width);
        for n in PHI_ORDERS {
            let unweighted = phi_sum(n, x, y, &b, None).unwrap();
            let weighted = phi_sum(n, x, y, &b, Some(&w)).unwrap();
            assert_eq!(unweighted, weighted);
        }
    }

    #[test]
    fn reversed_order_resummation_agrees() {
        // independent oracle: same sum accumulated from mode N down to 1
        let b = basis(40.5);
        let x = b.geometry().width / 2.0;
        let direct = phi_sum(-1, x, x, &b, None).unwrap();
        let mut reversed = 0.0;
        for j in (1..=b.mode_count()).rev() {
            reversed += b.shape(j, x) * b.shape(j, x) / b.beta(j);
        }
        assert_relative_eq!(direct, reversed, max_relative = 1e-14);
    }

    #[test]
    fn wrong_weight_length_is_rejected() {
        let b = basis(40.5);
        let w = vec![1.0; 7];
        assert!(matches!(
            phi_sum(0, 0.1, 0.1, &b, Some(&w)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn approximation_values_at_zero_separation() {
        let g = WaveguideGeometry::from_mode_ratio(40.5, 1.0).unwrap();
        let k0 = g.wavenumber();
        assert_abs_diff_eq!(phi_bessel_approx(-1, 0.0, &g).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(
            phi_bessel_approx(0, 0.0, &g).unwrap(),
            k0 / PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            phi_bessel_approx(1, 0.0, &g).unwrap(),
            k0 * k0 / 4.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn kernels_peak_on_the_diagonal() {
        let b = basis(40.5);
        let width = b.geometry().width;
        let grid: Vec<f64> = (0..81)
            .map(|i| 0.1 * width + 0.8 * width * i as f64 / 80.0)
            .collect();
        for n in [-1, 0, 1] {
            for &x in grid.iter().step_by(8) {
                let peak = phi_sum(n, x, x, &b, None).unwrap().abs();
                for &y in &grid {
                    let v = phi_sum(n, x, y, &b, None).unwrap().abs();
                    assert!(v <= peak + 1e-12 * peak.max(1.0));
                }
            }
        }
    }

    #[test]
    fn first_zero_of_phi0_sits_near_half_wavelength() {
        let b = basis(40.5);
        let width = b.geometry().width;
        let lam0 = b.geometry().wavelength();
        let x = width / 2.0;
        let mut previous = phi_sum(0, x, x, &b, None).unwrap();
        let mut crossing = None;
        for i in 1..2000 {
            let d = i as f64 * lam0 / 1000.0;
            let v = phi_sum(0, x, x + d, &b, None).unwrap();
            if previous.signum() != v.signum() {
                crossing = Some(d);
                break;
            }
            previous = v;
        }
        let d = crossing.expect("Phi_0 cut must change sign");
        assert!((d - lam0 / 2.0).abs() <= 0.25 * (lam0 / 2.0), "d = {d}");
    }

    #[test]
    fn interior_approximation_accuracy_centered_pairs() {
        // Fig. 2-style comparison: pairs centered at X/2 with varying
        // separation stay within a few percent of the Bessel shapes.
        let b = basis(40.5);
        let g = b.geometry().clone();
        let width = g.width;
        for (n, peak) in [
            (-1, 0.5),
            (0, g.wavenumber() / PI),
            (1, g.wavenumber() * g.wavenumber() / 4.0),
        ] {
            let mut max_dev: f64 = 0.0;
            for i in 0..=400 {
                let d = -0.8 * width + 1.6 * width * i as f64 / 400.0;
                let (x, y) = (width / 2.0 + d / 2.0, width / 2.0 - d / 2.0);
                let exact = phi_sum(n, x, y, &b, None).unwrap();
                let approx = phi_bessel_approx(n, x - y, &g).unwrap();
                max_dev = max_dev.max((exact - approx).abs() / peak);
            }
            assert!(max_dev <= 0.1, "n = {n}: centered max deviation {max_dev}");
        }
    }
}
