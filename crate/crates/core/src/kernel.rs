//! Scalar special functions shared by every other module.
//!
//! All functions here are pure. The exponent `p` is the larger member of a
//! dual pair and is assumed to satisfy `p >= 2` unless stated otherwise.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A dual pair of summability exponents `1/theta + 1/dual = 1`.
///
/// `p` is always the larger member (`p >= 2`) and `q` the smaller one.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Exponent {
    pub theta: f64,
    pub dual: f64,
    pub p: f64,
    pub q: f64,
}

impl Exponent {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 1.0) {
            return Err(Error::InvalidExponent(format!("exponent must be finite and > 1, got {theta}")));
        }
        let dual = conjugate(theta);
        let (p, q) = if theta >= dual { (theta, dual) } else { (dual, theta) };
        Ok(Self { theta, dual, p, q })
    }

    /// Canonical pair built from its larger member.
    pub fn from_p(p: f64) -> Result<Self> {
        if !(p >= 2.0) {
            return Err(Error::InvalidExponent(format!("p must be >= 2, got {p}")));
        }
        Self::new(p)
    }

    /// Whether `theta` is the larger exponent of the pair.
    pub fn theta_is_p(&self) -> bool {
        self.theta >= self.dual
    }
}

/// `r / (r - 1)`.
pub fn conjugate(r: f64) -> f64 {
    r / (r - 1.0)
}

/// `φ(R) = R|R|^{p-2}`; odd and strictly increasing.
#[inline]
pub fn phi(r: f64, p: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    r * r.abs().powf(p - 2.0)
}

/// The pointwise duality map `h ↦ |h|^{r-2} h`, sending zero to zero.
#[inline]
pub fn n_r(h: Complex64, r: f64) -> Complex64 {
    let m = h.norm();
    if m == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    h * m.powf(r - 2.0)
}

/// Real restriction of [`n_r`].
#[inline]
pub fn n_r_real(h: f64, r: f64) -> f64 {
    phi(h, r)
}

/// `λ(R) = 1/(1+R) - (p-1)/(1+φ(R))`, continued by `-(p-2)/2` at `R = -1`.
pub fn lambda_fn(r: f64, p: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("λ is defined on [-1, 1], got R = {r}")));
    }
    Ok(lambda_raw(r, p))
}

#[inline]
pub(crate) fn lambda_raw(r: f64, p: f64) -> f64 {
    if r == -1.0 {
        return -(p - 2.0) / 2.0;
    }
    1.0 / (1.0 + r) - (p - 1.0) / one_plus_phi(r, p)
}

/// `1 + φ(R)`, without cancellation for `R` near `-1`.
#[inline]
pub(crate) fn one_plus_phi(r: f64, p: f64) -> f64 {
    if r < 0.0 {
        -((p - 1.0) * (-(1.0 + r)).ln_1p()).exp_m1()
    } else {
        1.0 + phi(r, p)
    }
}

/// `κ(R) = (p-1)|R|^{p/2-1}(1+R) - 1 - R|R|^{p-2}`.
///
/// `sign κ = sign λ'` on `(-1, 1)`; the unique zero in `(0, 1)` is `R₀`.
#[inline]
pub fn kappa(r: f64, p: f64) -> f64 {
    let a = r.abs();
    let half = if a == 0.0 { 0.0 } else { a.powf(p / 2.0 - 1.0) };
    (p - 1.0) * half * (1.0 + r) - 1.0 - phi(r, p)
}

/// Derivative of [`kappa`] on `(0, 1]`, used for Newton refinement of `R₀`.
#[inline]
pub(crate) fn kappa_prime_pos(r: f64, p: f64) -> f64 {
    let h = p / 2.0;
    (p - 1.0) * r.powf(h - 2.0) * ((h - 1.0) + h * r - r.powf(h))
}

/// `ψ(R) = |1+φ(R)| / |1+R|^{p-1}`, strictly decreasing on `(-1, 1)`.
///
/// Diverges at `R = -1`, which is reported as a domain error.
pub fn psi(r: f64, p: f64) -> Result<f64> {
    if !(r > -1.0 && r <= 1.0) {
        return Err(Error::Domain(format!("ψ is finite on (-1, 1] only, got R = {r}")));
    }
    Ok((1.0 + phi(r, p)).abs() / (1.0 + r).powf(p - 1.0))
}

/// Principal branch of the Lambert-W function on `z >= 0`.
///
/// Halley iteration from `log(1+z)`; the residual `|w e^w - z|` is below
/// `1e-14 max(1, z)`.
pub fn lambert_w(z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("principal Lambert-W is implemented for finite z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let mut w = z.ln_1p();
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const PS: [f64; 5] = [2.5, 3.0, 4.0, 6.0, 9.5];

    #[test]
    fn exponent_canonical_form() {
        let e = Exponent::new(1.5).unwrap();
        assert_eq!(e.p, 3.0);
        assert_eq!(e.q, 1.5);
        assert!(!e.theta_is_p());
        assert_abs_diff_eq!(1.0 / e.theta + 1.0 / e.dual, 1.0, epsilon = 1e-15);
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::from_p(1.9).is_err());
    }

    #[test]
    fn phi_values() {
        for p in PS {
            assert_eq!(phi(1.0, p), 1.0);
            assert_eq!(phi(-1.0, p), -1.0);
            assert_eq!(phi(0.0, p), 0.0);
        }
        assert_abs_diff_eq!(phi(0.5, 3.0), 0.25, epsilon = 1e-16);
        assert_eq!(phi(0.3, 2.0), 0.3);
    }

    #[test]
    fn n_r_values() {
        assert_eq!(n_r(Complex64::new(0.0, 0.0), 3.0), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(n_r(Complex64::new(2.0, 0.0), 3.0).re, 4.0, epsilon = 1e-15);
        let z = Complex64::new(0.3, -1.7);
        let back = n_r(n_r(z, 3.0), 1.5);
        assert!((back - z).norm() < 1e-14);
    }

    #[test]
    fn lambda_branch_values() {
        for p in PS {
            assert_eq!(lambda_fn(-1.0, p).unwrap(), -(p - 2.0) / 2.0);
            assert_abs_diff_eq!(lambda_fn(0.0, p).unwrap(), 2.0 - p, epsilon = 1e-15);
            assert_abs_diff_eq!(lambda_fn(1.0, p).unwrap(), -(p - 2.0) / 2.0, epsilon = 1e-15);
        }
        assert!(lambda_fn(1.0 + 1e-9, 3.0).is_err());
        assert!(lambda_fn(-1.5, 3.0).is_err());
    }

    #[test]
    fn lambda_is_continuous_at_minus_one() {
        for p in PS {
            let at = lambda_fn(-1.0, p).unwrap();
            let mut last = f64::INFINITY;
            for k in 4..=30 {
                let h = 2f64.powi(-k);
                let gap = (lambda_fn(-1.0 + h, p).unwrap() - at).abs();
                // The gap shrinks linearly until rounding of the two large
                // terms takes over (about eps / h).
                assert!(gap < 4.0 * h * p * p + 16.0 * p * f64::EPSILON / h, "p={p} k={k} gap={gap}");
                if k <= 20 {
                    assert!(gap < last);
                }
                last = gap;
            }
        }
    }

    #[test]
    fn kappa_endpoint_values() {
        for p in PS {
            assert_eq!(kappa(0.0, p), -1.0);
            assert_abs_diff_eq!(kappa(-1.0, p), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(kappa(1.0 - 1e-12, p), 2.0 * (p - 2.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn lambda_slope_sign_follows_kappa() {
        for p in PS {
            for i in 1..400 {
                let r = -1.0 + 2.0 * i as f64 / 400.0;
                let k = kappa(r, p);
                if k.abs() < 1e-6 {
                    continue;
                }
                let h = 1e-6;
                let d = (lambda_raw(r + h, p) - lambda_raw(r - h, p)) / (2.0 * h);
                assert_eq!(d.signum(), k.signum(), "p={p} R={r} d={d} k={k}");
            }
        }
    }

    #[test]
    fn kappa_derivative_matches_finite_difference() {
        for p in PS {
            for r in [0.1, 0.3, 0.5, 0.9] {
                let h = 1e-6;
                let fd = (kappa(r + h, p) - kappa(r - h, p)) / (2.0 * h);
                assert_abs_diff_eq!(kappa_prime_pos(r, p), fd, epsilon = 1e-6 * fd.abs().max(1.0));
            }
        }
    }

    #[test]
    fn psi_values_and_monotonicity() {
        assert_abs_diff_eq!(psi(0.0, 3.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psi(0.5, 3.0).unwrap(), 1.25 / 2.25, epsilon = 1e-15);
        for p in PS {
            assert_abs_diff_eq!(psi(1.0, p).unwrap(), 2f64.powf(2.0 - p), epsilon = 1e-15);
            let mut prev = f64::INFINITY;
            for i in 1..=1000 {
                let r = -1.0 + 1e-3 + (2.0 - 1e-3) * i as f64 / 1000.0;
                let v = psi(r, p).unwrap();
                assert!(v < prev, "p={p} R={r}");
                prev = v;
            }
        }
        assert!(psi(-1.0, 3.0).is_err());
    }

    #[test]
    fn lambert_w_values() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(lambert_w(std::f64::consts::E).unwrap(), 1.0, epsilon = 1e-15);
        // Independent oracle: plain Newton on w e^w = 1/e from w = 0.
        let z = (-1f64).exp();
        let mut w = 0.0f64;
        for _ in 0..100 {
            w -= (w * w.exp() - z) / ((1.0 + w) * w.exp());
        }
        assert_abs_diff_eq!(w, 0.278_464_542_7, epsilon = 1e-10);
        assert_abs_diff_eq!(lambert_w(z).unwrap(), w, epsilon = 1e-15);
        for z in [1e-300, 1e-8, 0.1, 1.0, 10.0, 1e3, 1e10] {
            let w = lambert_w(z).unwrap();
            assert!((w * w.exp() - z).abs() <= 1e-14 * z.max(1.0), "z={z}");
        }
        assert!(lambert_w(-0.1).is_err());
    }
}
