//! Target reflectivity models and the bilinear pairing shared by every
//! imaging formula.
//!
//! Each imaging function is a double cross-range integral of a front kernel
//! `K(x; y, y')` against the Born-squared shadow bracket
//!
//! ```text
//! B(y, y') = -2 r(y) int r(y'') Phi_{D0}(y', y'') Phi_{-1}(y, y'') dy''
//!            + Phi_{D-1}(y, y') r(y) r(y')
//! ```
//!
//! (unit detector weights in the random-waveguide regimes). All front
//! kernels are finite mode sums, so the pairing reduces exactly to
//! contractions of the reflectivity moments `V_{mn} = int r phi_m phi_n`:
//! point masses sift to shape evaluations and smooth profiles are
//! integrated by quadrature, after which no further integrals remain.

use crate::error::{Error, Result};
use crate::quadrature::{oscillatory_node_count, smooth_quadrature, GaussLegendre};
use crate::waveguide::ModeBasis;
use ndarray::Array2;

/// A point scatterer `r0 delta(y - y_t)` at interior cross-range `y_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub position: f64,
    pub strength: f64,
}

/// Reflectivity samples on a uniform grid over `[lo, hi]`, linearly
/// interpolated between samples and zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothProfile {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl SmoothProfile {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain {
                quantity: "profile support",
                value: hi,
                lo,
                hi: f64::INFINITY,
            });
        }
        if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::EmptyTarget);
        }
        Ok(Self { lo, hi, values })
    }

    /// Samples a closure at `n` uniform points over `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n)
            .map(|i| f(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect();
        Self::new(lo, hi, values)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn value_at(&self, y: f64) -> f64 {
        if y < self.lo || y > self.hi {
            return 0.0;
        }
        let m = self.values.len() - 1;
        let t = (y - self.lo) / (self.hi - self.lo) * m as f64;
        let i = (t.floor() as usize).min(m - 1);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// Point masses plus an optional smooth profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflectivity {
    pub points: Vec<PointMass>,
    pub profile: Option<SmoothProfile>,
}

impl Reflectivity {
    pub fn new(points: Vec<PointMass>, profile: Option<SmoothProfile>) -> Result<Self> {
        if points.is_empty() && profile.is_none() {
            return Err(Error::EmptyTarget);
        }
        Ok(Self { points, profile })
    }

    pub fn point(position: f64, strength: f64) -> Self {
        Self {
            points: vec![PointMass { position, strength }],
            profile: None,
        }
    }

    pub fn first_point_position(&self) -> Option<f64> {
        self.points.first().map(|p| p.position)
    }

    fn check_interior(&self, width: f64) -> Result<()> {
        for p in &self.points {
            if !(p.position > 0.0 && p.position < width) {
                return Err(Error::Domain {
                    quantity: "point target position",
                    value: p.position,
                    lo: 0.0,
                    hi: width,
                });
            }
        }
        if let Some(profile) = &self.profile {
            let (lo, hi) = profile.support();
            if !(lo > 0.0 && hi < width) {
                return Err(Error::Domain {
                    quantity: "profile support",
                    value: if lo <= 0.0 { lo } else { hi },
                    lo: 0.0,
                    hi: width,
                });
            }
        }
        Ok(())
    }

    /// Reflectivity moments `V_{mn} = int r(y) phi_m(y) phi_n(y) dy`.
    ///
    /// Point masses contribute `r_t phi_m(y_t) phi_n(y_t)` exactly; the
    /// smooth part is integrated sample interval by sample interval so the
    /// interpolation kinks never sit inside a quadrature panel.
    pub fn mode_moments(&self, basis: &ModeBasis) -> Result<Array2<f64>> {
        let width = basis.geometry().width;
        self.check_interior(width)?;
        let n = basis.mode_count();
        let mut v = Array2::<f64>::zeros((n, n));
        for p in &self.points {
            let shapes = basis.shapes_at(p.position);
            for m in 0..n {
                for l in m..n {
                    let add = p.strength * shapes[m] * shapes[l];
                    v[[m, l]] += add;
                    if l != m {
                        v[[l, m]] += add;
                    }
                }
            }
        }
        if let Some(profile) = &self.profile {
            let (lo, hi) = profile.support();
            let intervals = profile.values.len() - 1;
            let h = (hi - lo) / intervals as f64;
            // the fastest mode product oscillates with period X/N
            let per_interval =
                oscillatory_node_count(h, width / n as f64, 8.0, 6);
            let rule = GaussLegendre::new(per_interval);
            let mut nodes: Vec<(f64, f64, f64)> = Vec::new(); // (y, w, r(y))
            for i in 0..intervals {
                let a = lo + i as f64 * h;
                for (y, w) in rule.mapped(a, a + h) {
                    nodes.push((y, w, profile.value_at(y)));
                }
            }
            for (y, w, r) in nodes {
                let shapes = basis.shapes_at(y);
                for m in 0..n {
                    for l in m..n {
                        let add = w * r * shapes[m] * shapes[l];
                        v[[m, l]] += add;
                        if l != m {
                            v[[l, m]] += add;
                        }
                    }
                }
            }
        }
        Ok(v)
    }
}

/// The shadow bracket reduced to reflectivity moments.
///
/// `detector_diag = Some(diag(D))` gives the unperturbed-waveguide bracket
/// with `Phi_{D0}` / `Phi_{D-1}`; `None` gives the unit-weight bracket of
/// the random-waveguide formulas.
#[derive(Debug, Clone)]
pub struct ShadowKernel {
    basis: ModeBasis,
    reflectivity: Reflectivity,
    moments: Array2<f64>,
    detector_diag: Option<Vec<f64>>,
}

impl ShadowKernel {
    pub fn new(
        basis: &ModeBasis,
        reflectivity: &Reflectivity,
        detector_diag: Option<Vec<f64>>,
    ) -> Result<Self> {
        if let Some(d) = &detector_diag {
            if d.len() != basis.mode_count() {
                return Err(Error::DimensionMismatch {
                    expected: basis.mode_count(),
                    got: d.len(),
                });
            }
        }
        let moments = reflectivity.mode_moments(basis)?;
        Ok(Self {
            basis: basis.clone(),
            reflectivity: reflectivity.clone(),
            moments,
            detector_diag,
        })
    }

    pub fn moments(&self) -> &Array2<f64> {
        &self.moments
    }

    /// Pairing matrix `G_{ab}` such that
    /// `iint phi_a(y) phi_b(y') B(y, y') dy dy' = G_{ab}`:
    ///
    /// `G_{ab} = sum_n (d_n / beta_n) V_{an} V_{bn}
    ///           - 2 d_b sum_m (1 / beta_m) V_{am} V_{bm}`.
    pub fn pairing_matrix(&self) -> Array2<f64> {
        let n = self.basis.mode_count();
        let v = &self.moments;
        let beta = self.basis.betas();
        let unit = vec![1.0; n];
        let d = self.detector_diag.as_deref().unwrap_or(&unit);
        // w_{ab} = sum_m V_{am} V_{bm} / beta_m ; u_{ab} adds d_m weights
        let mut g = Array2::<f64>::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                let mut u = 0.0;
                let mut w = 0.0;
                for m in 0..n {
                    let prod = v[[a, m]] * v[[b, m]] / beta[m];
                    u += d[m] * prod;
                    w += prod;
                }
                g[[a, b]] = u - 2.0 * d[b] * w;
            }
        }
        g
    }

    /// Pointwise `B(y, y')` for smooth-profile reflectivities (the pointwise
    /// value is undefined for point masses). Used by the quadrature oracles.
    pub fn evaluate(&self, y: f64, yp: f64) -> Result<f64> {
        if !self.reflectivity.points.is_empty() {
            return Err(Error::InvalidKernel(
                "pointwise shadow evaluation needs a smooth-profile reflectivity".into(),
            ));
        }
        let profile = self.reflectivity.profile.as_ref().ok_or(Error::EmptyTarget)?;
        let n = self.basis.mode_count();
        let unit = vec![1.0; n];
        let d = self.detector_diag.as_deref().unwrap_or(&unit);
        let beta = self.basis.betas();
        let (lo, hi) = profile.support();
        let lam0 = self.basis.geometry().wavelength();
        let nodes = oscillatory_node_count(hi - lo, lam0, 12.0, 48);
        let s_y = self.basis.shapes_at(y);
        let s_yp = self.basis.shapes_at(yp);
        let inner = smooth_quadrature(
            |ypp| {
                let s_ypp = self.basis.shapes_at(ypp);
                let phi_d0: f64 = (0..n).map(|k| d[k] * s_yp[k] * s_ypp[k]).sum();
                let phi_m1: f64 = (0..n).map(|k| s_y[k] * s_ypp[k] / beta[k]).sum();
                profile.value_at(ypp) * phi_d0 * phi_m1
            },
            lo,
            hi,
            nodes,
            1e-9,
            4,
        );
        let phi_dm1: f64 = (0..n).map(|k| d[k] * s_y[k] * s_yp[k] / beta[k]).sum();
        let r_y = profile.value_at(y);
        let r_yp = profile.value_at(yp);
        Ok(-2.0 * r_y * inner.value + phi_dm1 * r_y * r_yp)
    }
}

/// `iint K(x; y, y') B(y, y') dy dy'` for a front kernel given by its mode
/// coefficients `K = sum_{ab} front[[a, b]] phi_a(y) phi_b(y')`.
pub fn bilinear_image_integral(front: &Array2<f64>, shadow: &ShadowKernel) -> Result<f64> {
    let g = shadow.pairing_matrix();
    if front.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.nrows(),
            got: front.nrows(),
        });
    }
    Ok(front.iter().zip(g.iter()).map(|(c, g)| c * g).sum())
}
