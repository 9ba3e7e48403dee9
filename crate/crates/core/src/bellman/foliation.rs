//! The parametrization `η(τ, R)` of the lower triangle `-1 < y2 < y1 < 1`
//! and its inverse.
//!
//! For fixed `R`, `τ ↦ η(τ, R)` traces the `T`-image of the chord with
//! `a1 = a2 = -1`; the chords with `a1 = a2 = 1` give the mirror image.

use crate::error::{Error, Result};
use crate::kernel::phi;

use super::Foliation;

const BISECT_MAX: usize = 200;

/// Bisection on a decreasing function of `τ ∈ [0, 1]`.
fn bisect_decreasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECT_MAX {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl Foliation {
    pub(crate) fn eta1(&self, tau: f64, rho: f64) -> f64 {
        let p = self.p();
        if tau == 0.0 {
            return 1.0;
        }
        (-tau + (1.0 - tau) * rho) / (tau + (1.0 - tau) * rho.powf(p)).powf(1.0 / p)
    }

    pub(crate) fn eta2(&self, tau: f64, r: f64) -> f64 {
        let p = self.p();
        let den = tau + (1.0 - tau) * r.abs().powf(p);
        if den == 0.0 {
            return 0.0;
        }
        (-tau + (1.0 - tau) * phi(r, p)) / den.powf(1.0 / self.q())
    }

    /// Chord value over `x3^{1/p} x4^{1/q}` at the point `η(τ, R)`.
    pub(crate) fn normalized_value(&self, tau: f64, r: f64, rho: f64) -> f64 {
        let p = self.p();
        let d1 = (tau + (1.0 - tau) * rho.powf(p)).powf(1.0 / p);
        let d2 = tau + (1.0 - tau) * r.abs().powf(p);
        if d2 == 0.0 {
            return 0.0;
        }
        (tau + (1.0 - tau) * rho * phi(r, p)) / (d1 * d2.powf(1.0 / self.q()))
    }

    pub fn eta(&self, tau: f64, r: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("τ must lie in [0, 1], got {tau}")));
        }
        let rho = self.roots.rho(r)?;
        Ok((self.eta1(tau, rho), self.eta2(tau, r)))
    }

    /// `τ₁(R, y1)`: the unique `τ` with `η1(τ, R) = y1`.
    pub(crate) fn tau1(&self, rho: f64, y1: f64) -> f64 {
        bisect_decreasing(|t| self.eta1(t, rho), y1)
    }

    /// `(τ, R)` with `η(τ, R) = (y1, y2)` for `-1 < y2 <= y1 < 1`.
    pub fn invert_eta(&self, y1: f64, y2: f64) -> Result<(f64, f64)> {
        if !(y1 > -1.0 && y1 < 1.0 && y2 > -1.0 && y2 <= y1) {
            return Err(Error::Domain(format!("η inverts onto -1 < y2 <= y1 < 1 only, got ({y1}, {y2})")));
        }
        if y2 == y1 {
            return Ok((0.5 * (1.0 - y1), 1.0));
        }
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        let mut iterations = 0;
        while iterations < BISECT_MAX {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let tau = self.tau1(self.roots.rho(mid)?, y1);
            if self.eta2(tau, mid) < y2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = 0.5 * (lo + hi);
        let tau = self.tau1(self.roots.rho(r)?, y1);
        let (e1, e2) = self.eta(tau, r)?;
        let residual = (e1 - y1).abs().max((e2 - y2).abs());
        if residual > self.tol {
            return Err(Error::NonConvergence { what: "η inversion", residual, iterations });
        }
        Ok((tau, r))
    }

    /// Whether `(y1, y2)` lies between `η₋ = η(·, R₀)` and its mirror image.
    pub fn in_closed_form_region(&self, y1: f64, y2: f64) -> Result<bool> {
        if !((-1.0..=1.0).contains(&y1) && (-1.0..=1.0).contains(&y2)) {
            return Err(Error::Domain(format!("({y1}, {y2}) is outside [-1, 1]²")));
        }
        let (y1, y2) = if y2 > y1 { (-y1, -y2) } else { (y1, y2) };
        if y1 == y2 {
            return Ok(true);
        }
        if y1 >= 1.0 || y2 <= -1.0 {
            return Ok(false);
        }
        // Y₂ increases in R, so R >= R₀ exactly when y2 is above η₋.
        let r0 = self.r0();
        let tau = self.tau1(r0, y1);
        Ok(y2 >= self.eta2(tau, r0))
    }
}

/// `η(τ, R)` for one exponent `p > 2`.
pub fn eta(tau: f64, r: f64, p: f64) -> Result<(f64, f64)> {
    Foliation::new(p)?.eta(tau, r)
}

/// Inverse of [`eta`] on the lower triangle, to forward residual `tol`.
pub fn invert_eta(y1: f64, y2: f64, p: f64, tol: f64) -> Result<(f64, f64)> {
    Foliation::with_tol(p, tol)?.invert_eta(y1, y2)
}

pub fn in_closed_form_region(y1: f64, y2: f64, p: f64) -> Result<bool> {
    Foliation::new(p)?.in_closed_form_region(y1, y2)
}
