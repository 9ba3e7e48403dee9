use serde::Serialize;

use crate::error::{Error, Result};

use super::{Foliation, OmegaDPoint};

const FACE_EPS: f64 = 1e-14;
const BISECT_MAX: usize = 200;
const SEED_GRID: usize = 64;

/// `𝔅_{d,+}` at a point with the chord `ℓ_d(a1, a2, R)` that carries it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DEvaluation {
    pub value: f64,
    pub r: Option<f64>,
    pub tau: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    /// Largest of the residuals of the `x1` and `x5` equations.
    pub residual: f64,
}

impl DEvaluation {
    fn bare(value: f64) -> Self {
        Self { value, r: None, tau: None, a1: None, a2: None, residual: 0.0 }
    }
}

impl Foliation {
    /// Residuals of the normalized system `η1(τ, R) = z1`, `V(τ, R) = w`.
    fn d_residual(&self, tau: f64, r: f64, z1: f64, w: f64) -> Result<f64> {
        let rho = self.roots.rho(r)?;
        Ok((self.eta1(tau, rho) - z1).abs().max((self.normalized_value(tau, r, rho) - w).abs()))
    }

    /// Solves for `(τ, R)` with `R ∈ [-1, R₀]`, first by nested bisection and,
    /// if the bracket is lost, by grid seeding plus pattern search.
    fn solve_d(&self, z1: f64, w: f64) -> Result<(f64, f64, f64)> {
        let g = |r: f64| -> Result<(f64, f64)> {
            let rho = self.roots.rho(r)?;
            let tau = self.tau1(rho, z1);
            Ok((self.normalized_value(tau, r, rho) - w, tau))
        };
        let r0 = self.r0();
        let (glo, _) = g(-1.0)?;
        let (ghi, _) = g(r0)?;
        if glo <= 0.0 && ghi >= 0.0 {
            let (mut lo, mut hi) = (-1.0f64, r0);
            for _ in 0..BISECT_MAX {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid)?.0 < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            let tau = g(r)?.1;
            let residual = self.d_residual(tau, r, z1, w)?;
            if residual <= self.tol {
                return Ok((tau, r, residual));
            }
        }
        self.solve_d_seeded(z1, w)
    }

    fn solve_d_seeded(&self, z1: f64, w: f64) -> Result<(f64, f64, f64)> {
        let r0 = self.r0();
        let mut best = (f64::INFINITY, 0.5, r0);
        for i in 0..=SEED_GRID {
            let tau = i as f64 / SEED_GRID as f64;
            for j in 0..=SEED_GRID {
                let r = -1.0 + (r0 + 1.0) * j as f64 / SEED_GRID as f64;
                let res = self.d_residual(tau, r, z1, w)?;
                if res < best.0 {
                    best = (res, tau, r);
                }
            }
        }
        let (mut res, mut tau, mut r) = best;
        let mut step = 1.0 / SEED_GRID as f64;
        let mut iterations = 0;
        while step > 1e-16 && res > self.tol && iterations < 20_000 {
            iterations += 1;
            let mut moved = false;
            for (dt, dr) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let (t2, r2) = ((tau + dt).clamp(0.0, 1.0), (r + dr).clamp(-1.0, r0));
                let cand = self.d_residual(t2, r2, z1, w)?;
                if cand < res {
                    (res, tau, r, moved) = (cand, t2, r2, true);
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        if res > self.tol {
            return Err(Error::NonConvergence { what: "d-foliation inversion", residual: res, iterations });
        }
        Ok((tau, r, res))
    }

    pub fn d_plus(&self, x: &OmegaDPoint) -> Result<DEvaluation> {
        let p = self.p();
        let q = self.q();
        x.validate(p)?;
        let n4 = x.x4.powf(1.0 / q);
        if x.x4 == 0.0 {
            return Ok(DEvaluation::bare(0.0));
        }
        if x.x3 == 0.0 {
            return Ok(DEvaluation::bare(n4));
        }
        let n3 = x.x3.powf(1.0 / p);
        let y1 = (x.x1 / n3).clamp(-1.0, 1.0);
        if y1.abs() >= 1.0 - FACE_EPS {
            // f is constant, so g is pinned down only through ⟨g⟩ = x5 / x1.
            return Ok(DEvaluation::bare(x.x5 / x.x1));
        }
        let w = (x.x5 / (n3 * n4)).clamp(-1.0, 1.0);
        if w == y1 {
            return Ok(DEvaluation::bare(n4));
        }
        let s = if w > y1 { 1.0 } else { -1.0 };
        let (tau, r, residual) = self.solve_d(-s * y1, s * w)?;
        let rho = self.roots.rho(r)?;
        let d1 = (tau + (1.0 - tau) * rho.powf(p)).powf(1.0 / p);
        let d2 = (tau + (1.0 - tau) * r.abs().powf(p)).powf(1.0 / q);
        Ok(DEvaluation {
            value: -n4 * self.eta2(tau, r),
            r: Some(r),
            tau: Some(tau),
            a1: Some(s * n3 / d1),
            a2: Some(n4 / d2),
            residual,
        })
    }

    pub fn d_minus(&self, x: &OmegaDPoint) -> Result<f64> {
        let mirrored = OmegaDPoint { x5: -x.x5, ..*x };
        Ok(-self.d_plus(&mirrored)?.value)
    }
}

/// `𝔅_{d,+}(x)`, the supremum of `⟨g⟩` over the `Ω_d` constraints at `x`.
pub fn bellman_d_plus(x: &OmegaDPoint, p: f64, tol: f64) -> Result<f64> {
    Ok(Foliation::with_tol(p, tol)?.d_plus(x)?.value)
}

/// `𝔅_{d,-}(x) = -𝔅_{d,+}(x1, x3, x4, -x5)`.
pub fn bellman_d_minus(x: &OmegaDPoint, p: f64, tol: f64) -> Result<f64> {
    Foliation::with_tol(p, tol)?.d_minus(x)
}

/// `(t4, t5)` of a plane touching `ℓ_d(a1, a2, R)` at both endpoints.
///
/// `q t4` has the sign of `a2`, which rules out chords with `a2 < 0` on the
/// graph of `𝔅_{d,+}`.
pub fn d_plane_slopes(a1: f64, a2: f64, r: f64, p: f64) -> Result<(f64, f64)> {
    let fol = Foliation::new(p)?;
    if a1 == 0.0 || a2 == 0.0 || !(a1 * a2).is_finite() {
        return Err(Error::Domain(format!("d-planes need a1, a2 ≠ 0, got ({a1}, {a2})")));
    }
    if !(r >= -1.0 && r < fol.r0()) {
        return Err(Error::Domain(format!("d-planes need R in [-1, R0), got {r}")));
    }
    let q = fol.q();
    let rho = fol.roots.rho(r)?;
    let t5 = -(1.0 + r) / ((rho - r) * a1);
    let t4 = (1.0 + rho) / ((rho - r) * a2 * a2.abs().powf(q - 2.0)) / q;
    Ok((t4, t5))
}

/// `(G⁻(x), G⁺(x))`, the extremes of `⟨g⟩` over complex pairs with the
/// given second moments.
pub fn g_bounds_d(x: &OmegaDPoint, p: f64) -> Result<(f64, f64)> {
    x.validate(p)?;
    if x.x3 == 0.0 {
        return Err(Error::Domain("G± are undefined at x3 = 0".into()));
    }
    let q = p / (p - 1.0);
    let m3 = x.x3.powf(2.0 / p);
    let rad = ((m3 - x.x1 * x.x1).max(0.0) * (x.x4.powf(2.0 / q) * m3 - x.x5 * x.x5).max(0.0)).sqrt();
    Ok(((x.x1 * x.x5 - rad) / m3, (x.x1 * x.x5 + rad) / m3))
}
