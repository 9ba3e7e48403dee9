use num_complex::Complex64;
use serde::Serialize;

use crate::bellman::ChordC;
use crate::error::{Error, Result};
use crate::kernel::{n_r, Exponent};
use crate::roots::{StructuralRoots, DEFAULT_TOL};

use super::step::StepFunction;

/// Stopping tolerance of the complex search, relative to the bracket.
pub const ALPHA_TOL: f64 = 1e-12;

/// Round cap of the complex coordinate search.
const COMPLEX_ROUNDS: usize = 100;

/// `α*` minimizing `‖f - αe‖_θ` and the minimum itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaMin {
    pub alpha: Complex64,
    pub min_norm: f64,
}

/// The three terms of a sharpened Hölder inequality and their balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderSlack {
    pub slack: f64,
    pub norm_term: f64,
    pub pairing_term: f64,
    /// `inf_α ‖f - αe‖_θ^r`.
    pub deficit: f64,
    pub alpha: Complex64,
}

/// Minimizes the convex `t ↦ Σ w |a - (base + t·dir) b|^θ` on `[lo, hi]` by
/// bisection on the sign of its derivative.
fn line_min(
    pieces: &[(Complex64, Complex64, f64)],
    theta: f64,
    base: Complex64,
    dir: Complex64,
    lo: f64,
    hi: f64,
) -> f64 {
    let slope = |t: f64| -> f64 {
        let alpha = base + dir * t;
        -pieces.iter().map(|&(a, b, w)| w * (n_r(a - alpha * b, theta).conj() * dir * b).re).sum::<f64>()
    };
    let (mut lo, mut hi) = (lo, hi);
    if slope(lo) >= 0.0 {
        return lo;
    }
    if slope(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes `α ↦ ‖f - αe‖_θ` over scalars, real when both inputs are real.
///
/// The minimizer lies in `|α| <= 2‖f‖/‖e‖`. The objective is convex, so each
/// line search bisects on the sign of its derivative. Real inputs need one
/// search along the real axis; complex inputs alternate searches along the
/// two axes and the last displacement.
pub fn alpha_min(f: &StepFunction, e: &StepFunction, theta: f64) -> Result<AlphaMin> {
    let ne = e.norm(theta);
    if !(ne > 0.0) {
        return Err(Error::Domain("e must not vanish identically".into()));
    }
    let pieces = f.refine(e);
    let obj =
        |alpha: Complex64| -> f64 { pieces.iter().map(|&(a, b, w)| w * (a - alpha * b).norm().powf(theta)).sum() };
    let bound = 2.0 * f.norm(theta) / ne;
    if bound == 0.0 {
        return Ok(AlphaMin { alpha: Complex64::new(0.0, 0.0), min_norm: 0.0 });
    }
    let tol = ALPHA_TOL * bound.max(1.0);
    let line = |base: Complex64, dir: Complex64| -> Complex64 {
        base + dir * line_min(&pieces, theta, base, dir, -2.0 * bound, 2.0 * bound)
    };
    let zero = Complex64::new(0.0, 0.0);
    let alpha = if f.is_real() && e.is_real() {
        Complex64::new(line_min(&pieces, theta, zero, Complex64::new(1.0, 0.0), -bound, bound), 0.0)
    } else {
        let mut alpha = zero;
        for _ in 0..COMPLEX_ROUNDS {
            let start = alpha;
            alpha = line(alpha, Complex64::new(1.0, 0.0));
            alpha = line(alpha, Complex64::new(0.0, 1.0));
            let shift = alpha - start;
            if shift.norm() <= tol {
                break;
            }
            let cand = line(alpha, shift / shift.norm());
            if obj(cand) <= obj(alpha) {
                alpha = cand;
            }
        }
        alpha
    };
    Ok(AlphaMin { alpha, min_norm: obj(alpha).powf(1.0 / theta) })
}

fn unit(e: &StepFunction, theta: f64) -> Result<StepFunction> {
    let ne = e.norm(theta);
    if !(ne > 0.0) || !ne.is_finite() {
        return Err(Error::Domain("e must be a nonzero function of finite norm".into()));
    }
    Ok(e.scale(Complex64::new(1.0 / ne, 0.0)))
}

fn check_exponents(r: f64, constant: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) || !constant.is_finite() {
        return Err(Error::InvalidRegime(format!("need finite r > 0 and a finite constant, got r = {r}, {constant}")));
    }
    Ok(())
}

/// `‖f‖^r - |⟨f, N_θ(e)⟩|^r - c inf_α ‖f - αe‖^r` with `e` rescaled to unit norm.
pub fn check_hold3(f: &StepFunction, e: &StepFunction, exp: Exponent, r: f64, c: f64) -> Result<HolderSlack> {
    check_exponents(r, c)?;
    let theta = exp.theta;
    let e = unit(e, theta)?;
    let dual = e.map(|v| n_r(v, theta));
    let norm_term = f.norm(theta).powf(r);
    let pairing_term = f.inner(&dual).norm().powf(r);
    let am = alpha_min(f, &e, theta)?;
    let deficit = am.min_norm.powf(r);
    Ok(HolderSlack { slack: norm_term - pairing_term - c * deficit, norm_term, pairing_term, deficit, alpha: am.alpha })
}

/// `‖f‖^r - |⟨N_θ(f), e⟩|^{r/(θ-1)} - d inf_α ‖f - αe‖^r` with `e` of unit norm.
pub fn check_hold4(f: &StepFunction, e: &StepFunction, exp: Exponent, r: f64, d: f64) -> Result<HolderSlack> {
    check_exponents(r, d)?;
    let theta = exp.theta;
    let e = unit(e, theta)?;
    let nf = f.map(|v| n_r(v, theta));
    let norm_term = f.norm(theta).powf(r);
    let pairing_term = nf.inner(&e).norm().powf(r / (theta - 1.0));
    let am = alpha_min(f, &e, theta)?;
    let deficit = am.min_norm.powf(r);
    Ok(HolderSlack { slack: norm_term - pairing_term - d * deficit, norm_term, pairing_term, deficit, alpha: am.alpha })
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `e ≡ 1` and `f` equal to `2, 0, 1` on intervals of length `ε, ε, 1 - 2ε`.
pub fn witness_pair_rlessthanp(eps: f64) -> Result<(StepFunction, StepFunction)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("ε must lie in (0, 1/2), got {eps}")));
    }
    let f = StepFunction::real(&[(2.0, eps), (0.0, eps), (1.0, 1.0 - 2.0 * eps)])?;
    Ok((f, StepFunction::constant(real(1.0))))
}

/// Largest `c` for which the three-step witness satisfies the `Hold3` form.
///
/// `⟨f, e⟩ = 1` and `inf_α ‖f - αe‖_θ = ‖f - e‖_θ = (2ε)^{1/θ}`, so the
/// value is `((ε 2^θ + 1 - 2ε)^{r/θ} - 1) / (2ε)^{r/θ}`; it tends to zero as
/// `ε → 0` exactly when `r < θ`.
pub fn witness_rlessthanp(theta: f64, r: f64, eps: f64) -> Result<f64> {
    Exponent::new(theta)?;
    witness_pair_rlessthanp(eps)?;
    let growth = (r / theta * (eps * (2f64.powf(theta) - 2.0)).ln_1p()).exp_m1();
    Ok(growth / (2.0 * eps).powf(r / theta))
}

/// `e ≡ 1` and `f = 1 + t h` with `h` the Rademacher function.
pub fn witness_pair_rlessthan2(t: f64) -> Result<(StepFunction, StepFunction)> {
    if !(t != 0.0 && t.abs() < 1.0) {
        return Err(Error::Domain(format!("t must satisfy 0 < |t| < 1, got {t}")));
    }
    let f = StepFunction::real(&[(1.0 + t, 0.5), (1.0 - t, 0.5)])?;
    Ok((f, StepFunction::constant(real(1.0))))
}

/// Largest `d` for which `f = 1 + th`, `e ≡ 1` satisfy the `Hold4` form.
///
/// By symmetry `α* = 1` and the deficit is `|t|^r`; the numerator is
/// `O(t²)`, so the value vanishes as `t → 0` exactly when `r < 2`.
pub fn witness_rlessthan2(theta: f64, r: f64, t: f64) -> Result<f64> {
    Exponent::new(theta)?;
    witness_pair_rlessthan2(t)?;
    let sym = |s: f64| 0.5 * ((s * t.ln_1p()).exp_m1() + (s * (-t).ln_1p()).exp_m1());
    let a = r / theta * sym(theta).ln_1p();
    let b = r / (theta - 1.0) * sym(theta - 1.0).ln_1p();
    Ok(b.exp() * (a - b).exp_m1() / t.abs().powf(r))
}

/// The two-atom pair carried by a chord: `f` takes `a1, -ρa1` and `g`
/// takes `a2, -φa2` on intervals of length `τ, 1 - τ`.
///
/// Its moments are the chord point; `⟨fg⟩` is the `𝔅_{c,+}` value there and
/// `⟨g⟩` the `𝔅_{d,+}` value at the corresponding `Ω_d` point.
pub fn extremal_pair_c(chord: &ChordC) -> Result<(StepFunction, StepFunction)> {
    let (t, a1, a2) = (chord.tau, chord.a1, chord.a2);
    let mut f = Vec::new();
    let mut g = Vec::new();
    if t > 0.0 {
        f.push((real(a1), t));
        g.push((real(a2), t));
    }
    if t < 1.0 {
        f.push((real(-chord.rho * a1), 1.0 - t));
        g.push((real(-chord.phi * a2), 1.0 - t));
    }
    Ok((StepFunction::new(f)?, StepFunction::new(g)?))
}

/// A `Hold3` pair close to equality at `θ = r = p`: `e ≡ 1` and `f` the
/// `f`-part of the chord `ℓ_c(-1, -1, R)` at its point with `⟨g⟩ = 0`.
///
/// The ratio of the two sides tends to `c*_{p,p}` as `R → 0+`.
pub fn near_extremal_hold3(p: f64, r: f64) -> Result<(StepFunction, StepFunction)> {
    let roots = StructuralRoots::new(p, DEFAULT_TOL)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("need R in (0, 1), got {r}")));
    }
    let phi = crate::kernel::phi(r, p);
    let chord = ChordC::new(-1.0, -1.0, r, phi / (1.0 + phi), &roots)?;
    let (f, _) = extremal_pair_c(&chord)?;
    Ok((f, StepFunction::constant(real(1.0))))
}

/// A `Hold4` pair close to equality at `θ = r = p`: `f ≡ 1` and `e` the
/// `f`-part of `ℓ_d(1, 1, R)` at its point with `x5 = 0`, for `R ∈ (-1, 0)`.
///
/// The ratio of the two sides tends to `d*_{p,p}` as `R → 0-`.
pub fn near_extremal_hold4(p: f64, r: f64) -> Result<(StepFunction, StepFunction)> {
    let roots = StructuralRoots::new(p, DEFAULT_TOL)?;
    if !(r > -1.0 && r < 0.0) {
        return Err(Error::Domain(format!("need R in (-1, 0), got {r}")));
    }
    let rho = roots.rho(r)?;
    let rf = rho * crate::kernel::phi(r, p);
    let chord = ChordC::new(1.0, 1.0, r, -rf / (1.0 - rf), &roots)?;
    let (e, _) = extremal_pair_c(&chord)?;
    Ok((StepFunction::constant(real(1.0)), e))
}
