//! Second-moment statistics of the random propagator: coherent damping
//! matrix kappa, coupled-power transport generator Gamma, time-integrated
//! Wigner transfer matrix and the equipartition distance.
//!
//! The mean mode powers follow the master equation `dP/dz = Gamma P` with a
//! symmetric conservative generator (off-diagonal transfer rates >= 0,
//! column sums zero), so the transfer matrix over range L is `exp(Gamma L)`:
//! identity at L = 0 and `1/N` in every entry once L clears the
//! equipartition distance. Coherent amplitudes decay entrywise as
//! `exp(kappa_{jj'} L)` with `Re kappa_jj = -1/2 sum_{n != j} Gamma_{nj}`,
//! which makes the power lost by the coherent wave exactly the power fed
//! into the incoherent transfer.

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use ndarray::Array2;
use num_complex::Complex64;

/// How the transport generator is specified.
#[derive(Debug, Clone)]
pub enum ScatteringSpec {
    /// Equal transfer rate `g` between every mode pair.
    Uniform { rate: f64 },
    /// Symmetric nonnegative off-diagonal rates; the diagonal is ignored
    /// and rebuilt from conservation.
    PerPair { rates: Array2<f64> },
    /// A full generator, validated for symmetry, sign and conservation.
    Explicit { gamma: Array2<f64> },
}

/// Time-integrated Wigner transfer matrix at one range.
///
/// `w[[j, q]]` is the mean fraction of mode-q power found in mode j after
/// the range stored in `range`.
#[derive(Debug, Clone)]
pub struct WignerIntegrals {
    w: Array2<f64>,
    range: f64,
}

impl WignerIntegrals {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn range(&self) -> f64 {
        self.range
    }
}

/// Validated second-moment model over `n` propagating modes.
#[derive(Debug, Clone)]
pub struct ScatteringModel {
    kappa: Array2<Complex64>,
    gamma: Array2<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Array2<f64>,
}

/// Builds the model; `im_profile`, when given, supplies the off-diagonal
/// imaginary part of kappa (must be antisymmetric with zero diagonal, so
/// that `kappa_{jj'} = conj(kappa_{j'j})` holds).
pub fn build_scattering_model(
    spec: &ScatteringSpec,
    n_modes: usize,
    im_profile: Option<&Array2<f64>>,
) -> Result<ScatteringModel> {
    if n_modes == 0 {
        return Err(Error::InvalidModel("model needs at least one mode".into()));
    }
    let n = n_modes;
    let gamma = match spec {
        ScatteringSpec::Uniform { rate } => {
            if !(rate.is_finite() && *rate >= 0.0) {
                return Err(Error::InvalidModel(format!("negative rate {rate}")));
            }
            let mut g = Array2::<f64>::from_elem((n, n), *rate);
            for j in 0..n {
                g[[j, j]] = -((n - 1) as f64) * rate;
            }
            g
        }
        ScatteringSpec::PerPair { rates } => {
            if rates.nrows() != n || rates.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: rates.nrows(),
                });
            }
            let scale = rates.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
            let mut g = Array2::<f64>::zeros((n, n));
            for j in 0..n {
                for l in (j + 1)..n {
                    let r = rates[[j, l]];
                    if (r - rates[[l, j]]).abs() > 1e-12 * scale {
                        return Err(Error::InvalidModel(format!(
                            "rates not symmetric at ({j}, {l})"
                        )));
                    }
                    if !(r.is_finite() && r >= 0.0) {
                        return Err(Error::InvalidModel(format!(
                            "negative rate {r} at ({j}, {l})"
                        )));
                    }
                    g[[j, l]] = r;
                    g[[l, j]] = r;
                }
            }
            for j in 0..n {
                let col: f64 = (0..n).filter(|&k| k != j).map(|k| g[[k, j]]).sum();
                g[[j, j]] = -col;
            }
            g
        }
        ScatteringSpec::Explicit { gamma } => {
            if gamma.nrows() != n || gamma.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: gamma.nrows(),
                });
            }
            let scale = gamma.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
            for j in 0..n {
                for l in 0..n {
                    if j != l && gamma[[j, l]] < -1e-12 * scale {
                        return Err(Error::InvalidModel(format!(
                            "negative off-diagonal at ({j}, {l}): {}",
                            gamma[[j, l]]
                        )));
                    }
                    if (gamma[[j, l]] - gamma[[l, j]]).abs() > 1e-12 * scale {
                        return Err(Error::InvalidModel(format!(
                            "generator not symmetric at ({j}, {l})"
                        )));
                    }
                }
            }
            for j in 0..n {
                let col: f64 = (0..n).map(|k| gamma[[k, j]]).sum();
                if col.abs() > 1e-10 * scale {
                    return Err(Error::InvalidModel(format!(
                        "column {j} sums to {col:.3e}; generator must conserve power"
                    )));
                }
            }
            gamma.clone()
        }
    };

    if let Some(im) = im_profile {
        if im.nrows() != n || im.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: im.nrows(),
            });
        }
        let scale = im.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        for j in 0..n {
            if im[[j, j]].abs() > 1e-12 * scale {
                return Err(Error::InvalidModel(
                    "Im[kappa] must vanish on the diagonal".into(),
                ));
            }
            for l in 0..n {
                if (im[[j, l]] + im[[l, j]]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidModel(
                        "Im[kappa] profile must be antisymmetric".into(),
                    ));
                }
            }
        }
    }

    // Re[kappa_jj] = -1/2 sum_{n != j} Gamma_{nj}; off-diagonal real parts
    // split the difference so Hermitian symmetry costs no extra parameter.
    let mut re_diag = vec![0.0; n];
    for j in 0..n {
        re_diag[j] = -0.5 * (0..n).filter(|&k| k != j).map(|k| gamma[[k, j]]).sum::<f64>();
    }
    let mut kappa = Array2::<Complex64>::zeros((n, n));
    for j in 0..n {
        for l in 0..n {
            let re = if j == l {
                re_diag[j]
            } else {
                0.5 * (re_diag[j] + re_diag[l])
            };
            let im = im_profile.map_or(0.0, |p| p[[j, l]]);
            kappa[[j, l]] = Complex64::new(re, im);
        }
    }

    let (eigenvalues, eigenvectors) = symmetric_eigen(&gamma);
    Ok(ScatteringModel {
        kappa,
        gamma,
        eigenvalues,
        eigenvectors,
    })
}

impl ScatteringModel {
    pub fn mode_count(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn gamma(&self) -> &Array2<f64> {
        &self.gamma
    }

    pub fn kappa(&self) -> &Array2<Complex64> {
        &self.kappa
    }

    /// `w(L) = exp(Gamma L)` through the eigen-decomposition of Gamma.
    pub fn wigner_integrals(&self, range: f64) -> Result<WignerIntegrals> {
        if !(range >= 0.0) {
            return Err(Error::Domain {
                quantity: "range",
                value: range,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let n = self.mode_count();
        let q = &self.eigenvectors;
        let mut w = Array2::<f64>::zeros((n, n));
        let exps: Vec<f64> = self.eigenvalues.iter().map(|l| (l * range).exp()).collect();
        for a in 0..n {
            for b in 0..n {
                let mut acc = 0.0;
                for (k, e) in exps.iter().enumerate() {
                    acc += q[[a, k]] * e * q[[b, k]];
                }
                w[[a, b]] = acc;
            }
        }
        Ok(WignerIntegrals { w, range })
    }

    /// Entrywise coherent damping `exp(kappa_{jj'} L)`.
    pub fn coherent_damping(&self, range: f64) -> Result<Array2<Complex64>> {
        if !(range >= 0.0) {
            return Err(Error::Domain {
                quantity: "range",
                value: range,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(self.kappa.mapv(|k| (k * range).exp()))
    }

    /// Incoherent part of the mean power transfer:
    /// `exp(Gamma L) - diag(exp(2 Re[kappa_jj] L))`.
    ///
    /// This is the `int W dt` weight of the imaging formulas; it vanishes
    /// at L = 0 and tends to `1/N` per entry at large L.
    pub fn incoherent_integrals(&self, range: f64) -> Result<Array2<f64>> {
        let mut w = self.wigner_integrals(range)?.w;
        for j in 0..self.mode_count() {
            w[[j, j]] -= (2.0 * self.kappa[[j, j]].re * range).exp();
        }
        Ok(w)
    }

    /// `L_eq = 1 / gap`, gap being the smallest nonzero eigenvalue of
    /// `-Gamma`. Fails only when Gamma has no coupling at all.
    pub fn equipartition_distance(&self) -> Result<f64> {
        let max_mag = self
            .eigenvalues
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        if max_mag == 0.0 {
            return Err(Error::NoEquipartition);
        }
        let gap = self
            .eigenvalues
            .iter()
            .map(|v| -v)
            .filter(|v| *v > 1e-12 * max_mag)
            .fold(f64::INFINITY, f64::min);
        if !gap.is_finite() {
            return Err(Error::NoEquipartition);
        }
        Ok(1.0 / gap)
    }

    /// True when every mode can reach every other through nonzero rates.
    /// A reducible generator still mixes, but only inside its blocks, so
    /// `w(inf)` is block-uniform instead of `1/N`.
    pub fn is_irreducible(&self) -> bool {
        let n = self.mode_count();
        let scale = self
            .gamma
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut seen = vec![false; n];
        let mut stack = vec![0_usize];
        seen[0] = true;
        while let Some(j) = stack.pop() {
            for l in 0..n {
                if l != j && !seen[l] && self.gamma[[l, j]] > 1e-14 * scale {
                    seen[l] = true;
                    stack.push(l);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
