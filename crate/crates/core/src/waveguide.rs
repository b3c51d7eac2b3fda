//! Geometry, mode basis and dispersion of the unperturbed waveguide.
//!
//! The waveguide occupies `0 <= x <= X` with sound-soft walls, so the
//! transverse eigenfunctions are `phi_j(x) = sqrt(2/X) sin(pi j x / X)`
//! and the axial wavenumber of mode `j` at the carrier is
//! `beta_j = sqrt(k0^2 - (pi j / X)^2)`. Mode `j` travels with slowness
//! `beta_j' = k0 / (c0 beta_j)`, so mode 1 is the fastest and the mode
//! closest to cutoff is the slowest.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Default grazing-mode cutoff: modes with `beta_j < cutoff * k0` are dropped.
pub const DEFAULT_CUTOFF_FRACTION: f64 = 1e-6;

/// Cross-section width, background medium and carrier frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideGeometry {
    /// Mean width X of the cross-section.
    pub width: f64,
    /// Background sound speed c0.
    pub sound_speed: f64,
    /// Carrier angular frequency omega0.
    pub carrier_omega: f64,
    /// Background density rho0 (enters the imaging prefactors only).
    pub density: f64,
}

impl WaveguideGeometry {
    /// Builds a geometry with unit density; fails unless at least one mode propagates.
    pub fn new(width: f64, sound_speed: f64, carrier_omega: f64) -> Result<Self> {
        Self::with_density(width, sound_speed, carrier_omega, 1.0)
    }

    pub fn with_density(
        width: f64,
        sound_speed: f64,
        carrier_omega: f64,
        density: f64,
    ) -> Result<Self> {
        for (quantity, value) in [
            ("width", width),
            ("sound_speed", sound_speed),
            ("carrier_omega", carrier_omega),
            ("density", density),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain {
                    quantity,
                    value,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        let geometry = Self {
            width,
            sound_speed,
            carrier_omega,
            density,
        };
        if geometry.mode_ratio() <= 1.0 {
            return Err(Error::NoPropagatingModes {
                ratio: geometry.mode_ratio(),
            });
        }
        Ok(geometry)
    }

    /// Convenience constructor for the figure configurations: fixes the
    /// carrier wavelength to 1 (so k0 = 2 pi) and sets the width so that
    /// `k0 X / pi` equals `mode_ratio`.
    pub fn from_mode_ratio(mode_ratio: f64, sound_speed: f64) -> Result<Self> {
        let carrier_omega = 2.0 * PI * sound_speed; // lambda0 = 1
        let width = mode_ratio / 2.0; // k0 X / pi = 2 X
        Self::new(width, sound_speed, carrier_omega)
    }

    /// Carrier wavenumber k0 = omega0 / c0.
    pub fn wavenumber(&self) -> f64 {
        self.carrier_omega / self.sound_speed
    }

    /// Carrier wavelength lambda0 = 2 pi / k0.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.wavenumber()
    }

    /// k0 X / pi, whose integer part counts the propagating modes.
    pub fn mode_ratio(&self) -> f64 {
        self.wavenumber() * self.width / PI
    }
}

/// Number of propagating modes `N = floor(k0 X / pi)`.
///
/// When `k0 X / pi` is an exact integer the last mode sits exactly at cutoff
/// (`beta_N = 0`); it is excluded because `beta_N` appears in denominators.
pub fn propagating_mode_count(geometry: &WaveguideGeometry) -> Result<usize> {
    let ratio = geometry.mode_ratio();
    if ratio < 1.0 {
        return Err(Error::NoPropagatingModes { ratio });
    }
    let mut n = ratio.floor() as usize;
    if ratio.fract() == 0.0 {
        n -= 1;
    }
    if n == 0 {
        return Err(Error::NoPropagatingModes { ratio });
    }
    Ok(n)
}

/// Transverse eigenfunction `phi_j(x) = sqrt(2/X) sin(pi j x / X)`, `j >= 1`.
pub fn mode_shape(geometry: &WaveguideGeometry, j: usize, x: f64) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain {
            quantity: "mode index",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    if !(0.0..=geometry.width).contains(&x) {
        return Err(Error::Domain {
            quantity: "cross-range",
            value: x,
            lo: 0.0,
            hi: geometry.width,
        });
    }
    let width = geometry.width;
    Ok((2.0 / width).sqrt() * (PI * j as f64 * x / width).sin())
}

/// Propagating-mode wavenumbers and slownesses, evaluated at the carrier.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    geometry: WaveguideGeometry,
    beta: Vec<f64>,
    beta_prime: Vec<f64>,
}

impl ModeBasis {
    pub fn new(geometry: &WaveguideGeometry) -> Result<Self> {
        Self::with_cutoff_fraction(geometry, DEFAULT_CUTOFF_FRACTION)
    }

    /// Builds the basis, additionally dropping trailing modes with
    /// `beta_j < cutoff_fraction * k0` to keep `1/beta_j` sums bounded.
    pub fn with_cutoff_fraction(
        geometry: &WaveguideGeometry,
        cutoff_fraction: f64,
    ) -> Result<Self> {
        let n_raw = propagating_mode_count(geometry)?;
        let k0 = geometry.wavenumber();
        let width = geometry.width;
        let mut beta = Vec::with_capacity(n_raw);
        for j in 1..=n_raw {
            let transverse = PI * j as f64 / width;
            let b = (k0 * k0 - transverse * transverse).sqrt();
            if b < cutoff_fraction * k0 {
                break; // beta decreases with j; everything past here is grazing
            }
            beta.push(b);
        }
        if beta.is_empty() {
            return Err(Error::NoPropagatingModes {
                ratio: geometry.mode_ratio(),
            });
        }
        let beta_prime = beta
            .iter()
            .map(|b| k0 / (geometry.sound_speed * b))
            .collect();
        Ok(Self {
            geometry: geometry.clone(),
            beta,
            beta_prime,
        })
    }

    pub fn geometry(&self) -> &WaveguideGeometry {
        &self.geometry
    }

    pub fn mode_count(&self) -> usize {
        self.beta.len()
    }

    /// Mode wavenumbers `beta_1 > beta_2 > ... > beta_N > 0`.
    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    /// Mode slownesses `beta'_j = k0 / (c0 beta_j)`, increasing with `j`.
    pub fn beta_primes(&self) -> &[f64] {
        &self.beta_prime
    }

    /// Wavenumber of mode `j` (1-based).
    pub fn beta(&self, j: usize) -> f64 {
        self.beta[j - 1]
    }

    /// Slowness of mode `j` (1-based); `beta'_j * range` is an arrival time.
    pub fn beta_prime(&self, j: usize) -> f64 {
        self.beta_prime[j - 1]
    }

    /// `phi_j(x)` for `j = 1..=N`, without bounds checks on j beyond N.
    pub fn shape(&self, j: usize, x: f64) -> f64 {
        let width = self.geometry.width;
        (2.0 / width).sqrt() * (PI * j as f64 * x / width).sin()
    }

    /// All mode shapes at `x` as a vector, `out[j-1] = phi_j(x)`.
    pub fn shapes_at(&self, x: f64) -> Vec<f64> {
        let width = self.geometry.width;
        let amp = (2.0 / width).sqrt();
        let step = PI * x / width;
        (1..=self.mode_count())
            .map(|j| amp * (step * j as f64).sin())
            .collect()
    }
}

/// Scaled ranges and measurement window of an imaging scenario.
///
/// `source_target` is the scaled source-target range L, `target_detector`
/// the target-detector range (the paper's script-L), `window` the scaled
/// integration window, and `spectrum_norm` the scalar ||F||^2 prefactor.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledRanges {
    pub source_target: f64,
    pub target_detector: f64,
    pub window: f64,
    pub spectrum_norm: f64,
}

impl ScaledRanges {
    pub fn new(
        source_target: f64,
        target_detector: f64,
        window: f64,
        spectrum_norm: f64,
    ) -> Result<Self> {
        for (quantity, value) in [
            ("source_target range", source_target),
            ("target_detector range", target_detector),
            ("spectrum_norm", spectrum_norm),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain {
                    quantity,
                    value,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        if !(window >= 0.0) {
            return Err(Error::Domain {
                quantity: "window",
                value: window,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if target_detector / source_target < 10.0 {
            log::warn!(
                "target_detector/source_target = {:.3}; the transport formulas assume \
                 a much larger detector offset",
                target_detector / source_target
            );
        }
        Ok(Self {
            source_target,
            target_detector,
            window,
            spectrum_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn figure_geometry() -> WaveguideGeometry {
        // 40 propagating modes: k0 X / pi = 40.5
        WaveguideGeometry::from_mode_ratio(40.5, 1.0).unwrap()
    }

    #[test]
    fn mode_count_floor() {
        let g = figure_geometry();
        assert_eq!(propagating_mode_count(&g).unwrap(), 40);
        let g = WaveguideGeometry::from_mode_ratio(1.2, 1.0).unwrap();
        assert_eq!(propagating_mode_count(&g).unwrap(), 1);
    }

    #[test]
    fn mode_count_drops_exact_cutoff() {
        // k0 X / pi integer: the cutoff mode has beta = 0 and is excluded.
        let g = WaveguideGeometry::from_mode_ratio(40.0, 1.0).unwrap();
        assert_eq!(propagating_mode_count(&g).unwrap(), 39);
        let basis = ModeBasis::new(&g).unwrap();
        assert!(basis.betas().last().unwrap() > &0.0);
    }

    #[test]
    fn no_propagating_modes_is_an_error() {
        let r = WaveguideGeometry::from_mode_ratio(0.8, 1.0);
        assert!(matches!(r, Err(Error::NoPropagatingModes { .. })));
    }

    #[test]
    fn shape_boundary_and_center() {
        let g = figure_geometry();
        for j in [1, 3, 17] {
            assert_eq!(mode_shape(&g, j, 0.0).unwrap(), 0.0);
        }
        let v = mode_shape(&g, 1, g.width / 2.0).unwrap();
        assert_relative_eq!(v, (2.0 / g.width).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn shape_rejects_outside_domain() {
        let g = figure_geometry();
        assert!(mode_shape(&g, 1, -0.1).is_err());
        assert!(mode_shape(&g, 1, g.width * 1.01).is_err());
        assert!(mode_shape(&g, 0, 0.5).is_err());
    }

    #[test]
    fn wavenumbers_match_dispersion() {
        let g = figure_geometry();
        let basis = ModeBasis::new(&g).unwrap();
        let k0 = g.wavenumber();
        // frozen from direct evaluation of beta_j = k0 sqrt(1 - (j/40.5)^2)
        assert_relative_eq!(basis.beta(40) / k0, 0.1566491054376486, max_relative = 1e-12);
        assert_relative_eq!(basis.beta(1) / k0, 0.9996951219441338, max_relative = 1e-12);
        for j in 1..=basis.mode_count() {
            let transverse = PI * j as f64 / g.width;
            let lhs = basis.beta(j).powi(2) + transverse.powi(2);
            assert_relative_eq!(lhs, k0 * k0, max_relative = 1e-14);
        }
    }

    #[test]
    fn monotone_wavenumbers_and_slownesses() {
        let g = figure_geometry();
        let basis = ModeBasis::new(&g).unwrap();
        for j in 1..basis.mode_count() {
            assert!(basis.beta(j) > basis.beta(j + 1));
            assert!(basis.beta_prime(j) < basis.beta_prime(j + 1));
        }
        // every mode is slower than the medium speed
        for j in 1..=basis.mode_count() {
            assert!(g.sound_speed * basis.beta_prime(j) > 1.0);
        }
    }

    #[test]
    fn slowness_definition() {
        let g = figure_geometry();
        let basis = ModeBasis::new(&g).unwrap();
        let k0 = g.wavenumber();
        for j in 1..=basis.mode_count() {
            assert_relative_eq!(
                basis.beta_prime(j),
                k0 / (g.sound_speed * basis.beta(j)),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn shapes_at_matches_shape() {
        let g = figure_geometry();
        let basis = ModeBasis::new(&g).unwrap();
        let x = 0.3217 * g.width;
        let all = basis.shapes_at(x);
        for j in 1..=basis.mode_count() {
            assert_abs_diff_eq!(all[j - 1], basis.shape(j, x), epsilon = 1e-14);
        }
    }

    #[test]
    fn ranges_validate() {
        assert!(ScaledRanges::new(1.0, 100.0, 0.0, 1.0).is_ok());
        assert!(ScaledRanges::new(-1.0, 100.0, 0.0, 1.0).is_err());
        assert!(ScaledRanges::new(1.0, 100.0, -0.5, 1.0).is_err());
        assert!(ScaledRanges::new(1.0, 100.0, 1.0, 0.0).is_err());
    }
}
