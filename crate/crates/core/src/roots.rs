//! Bracketed solvers for the structural constants `R₀`, `s₀` and the branch
//! inversion `ρ`.
//!
//! Every solver is a bisection safeguard around Newton steps: the bracket
//! always shrinks, Newton is accepted only when it lands strictly inside it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{kappa, kappa_prime_pos, lambda_raw, one_plus_phi};

/// Default absolute residual tolerance of the structural solvers.
pub const DEFAULT_TOL: f64 = 1e-13;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootResult {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a zero of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
///
/// `f` returns the value and, optionally, the derivative. Iteration runs until
/// the bracket collapses to a few ulps, then the residual is checked against
/// `tol`.
fn safeguarded<F>(what: &'static str, f: F, lo: f64, hi: f64, tol: f64) -> Result<RootResult>
where
    F: Fn(f64) -> (f64, Option<f64>),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(RootResult { value: lo, residual: 0.0, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(RootResult { value: hi, residual: 0.0, iterations: 0 });
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NonConvergence { what, residual: flo.abs().min(fhi.abs()), iterations: 0 });
    }
    // Orient so that f(neg) < 0 < f(pos).
    let (mut neg, mut pos) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, x);
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let (fx, dfx) = f(x);
        if fx.abs() < best.0 {
            best = (fx.abs(), x);
        }
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        let (a, b) = if neg < pos { (neg, pos) } else { (pos, neg) };
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (a + b);
        x = match dfx {
            Some(d) if d.is_finite() && d != 0.0 => {
                let cand = x - fx / d;
                if cand > a && cand < b {
                    cand
                } else {
                    mid
                }
            }
            _ => mid,
        };
    }
    let (residual, value) = best;
    if residual > tol {
        return Err(Error::NonConvergence { what, residual, iterations });
    }
    Ok(RootResult { value, residual, iterations })
}

fn require_p(p: f64) -> Result<()> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!(
            "structural roots need finite p > 2 (λ vanishes identically at p = 2), got {p}"
        )));
    }
    Ok(())
}

/// `R₀ ∈ (0, 1)`, the unique zero of `κ` there; `λ` has its minimum at `R₀`.
pub fn solve_r0(p: f64, tol: f64) -> Result<RootResult> {
    require_p(p)?;
    safeguarded(
        "R0 solver",
        |r| {
            let d = if r > 0.0 { Some(kappa_prime_pos(r, p)) } else { None };
            (kappa(r, p), d)
        },
        0.0,
        1.0,
        tol,
    )
}

/// The positive solution of `(p-1)s^{p-2} + (p-2)s^{p-1} = 1`.
pub fn solve_s0(p: f64, tol: f64) -> Result<RootResult> {
    require_p(p)?;
    safeguarded(
        "s0 solver",
        |s| (s0_equation(s, p), Some((p - 1.0) * (p - 2.0) * s.powf(p - 3.0) * (1.0 + s))),
        0.0,
        1.0,
        tol,
    )
}

/// `(p-1)s^{p-2} + (p-2)s^{p-1} - 1`, arranged so that every term is small
/// when `p` is close to 2.
pub(crate) fn s0_equation(s: f64, p: f64) -> f64 {
    let e = p - 2.0;
    (p - 1.0) * (e * s.ln()).exp_m1() + e * (1.0 + s.powf(p - 1.0))
}

/// Cached `R₀` and `s₀` for one exponent, with the `ρ` inversion on top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralRoots {
    pub p: f64,
    pub tol: f64,
    pub r0: RootResult,
    pub s0: RootResult,
}

impl StructuralRoots {
    pub fn new(p: f64, tol: f64) -> Result<Self> {
        Ok(Self { p, tol, r0: solve_r0(p, tol)?, s0: solve_s0(p, tol)? })
    }

    pub fn r0(&self) -> f64 {
        self.r0.value
    }

    pub fn s0(&self) -> f64 {
        self.s0.value
    }

    /// `ρ(R)`: the identity on `[R₀, 1]`, and on `[-1, R₀)` the point of the
    /// increasing branch `[R₀, 1]` with the same `λ` value.
    pub fn rho(&self, r: f64) -> Result<f64> {
        self.rho_with_residual(r).map(|res| res.value)
    }

    pub fn rho_with_residual(&self, r: f64) -> Result<RootResult> {
        if !(-1.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!("ρ is defined on [-1, 1], got R = {r}")));
        }
        let p = self.p;
        let r0 = self.r0();
        if r >= r0 {
            return Ok(RootResult { value: r, residual: 0.0, iterations: 0 });
        }
        if r == -1.0 {
            return Ok(RootResult { value: 1.0, residual: 0.0, iterations: 0 });
        }
        let target = lambda_raw(r, p);
        let g = |x: f64| lambda_raw(x, p) - target;
        // Rounding can push the target a hair outside λ([R₀, 1]).
        if g(1.0) <= 0.0 {
            return Ok(RootResult { value: 1.0, residual: g(1.0).abs(), iterations: 0 });
        }
        if g(r0) >= 0.0 {
            return Ok(RootResult { value: r0, residual: g(r0).abs(), iterations: 0 });
        }
        let res = safeguarded(
            "rho inversion",
            |x| {
                let d =
                    (p - 1.0).powi(2) * x.abs().powf(p - 2.0) / one_plus_phi(x, p).powi(2) - 1.0 / (1.0 + x).powi(2);
                (g(x), Some(d))
            },
            r0,
            1.0,
            self.tol,
        )?;
        Ok(RootResult { value: res.value.clamp(r0, 1.0), ..res })
    }
}

/// `ρ(R)` for a single evaluation; prefer [`StructuralRoots::rho`] in loops.
pub fn rho(r: f64, p: f64, tol: f64) -> Result<f64> {
    StructuralRoots::new(p, tol)?.rho(r)
}
