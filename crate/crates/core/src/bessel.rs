//! Bessel functions J0 and J1 for the kernel approximations.
//!
//! Backed by `libm` (the SunPro/msun series-plus-asymptotic evaluation,
//! split at |t| = 8), which is far inside the 1e-10 absolute accuracy the
//! approximation tests need. Only used to validate the Phi kernels; the
//! imaging formulas themselves use exact mode sums.

/// Bessel function of the first kind, order 0.
pub fn bessel_j0(t: f64) -> f64 {
    libm::j0(t)
}

/// Bessel function of the first kind, order 1.
pub fn bessel_j1(t: f64) -> f64 {
    libm::j1(t)
}

/// `J1(t)/t`, continuous through the origin where it equals 1/2.
pub fn bessel_j1_over_t(t: f64) -> f64 {
    let a = t.abs();
    if a < 1e-4 {
        // J1(t)/t = 1/2 - t^2/16 + t^4/384 - ...
        let t2 = t * t;
        0.5 - t2 / 16.0 + t2 * t2 / 384.0
    } else {
        libm::j1(a) / a
    }
}

/// `sin(t)/t`, continuous through the origin.
pub fn sinc(t: f64) -> f64 {
    let a = t.abs();
    if a < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}
