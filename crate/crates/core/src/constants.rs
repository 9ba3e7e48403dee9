//! Sharp constants `c*(θ, r)` and `d*(θ, r)`.
//!
//! Dispatch goes region table first, then closed forms, then numeric
//! suprema. Pairs that none of these cover are reported as interior rather
//! than guessed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{lambert_w, phi, Exponent};
use crate::roots::{solve_s0, RootResult, StructuralRoots, DEFAULT_TOL};

/// Default number of uniform grid points for the numeric suprema.
pub const DEFAULT_GRID: usize = 2048;

const REFINE_LEVELS: usize = 3;
const REFINE_POINTS: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ClosedForm,
    NumericSup,
    BoundaryZero,
    BoundaryOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpConstant {
    pub value: f64,
    pub regime: Regime,
    pub exponent: Exponent,
    pub r: f64,
    /// Argmax of the objective whose reciprocal supremum is `value`.
    pub maximizer: Option<f64>,
    /// The `s₀` solve this value depends on, if any.
    pub s0: Option<RootResult>,
}

impl SharpConstant {
    fn boundary(value: f64, exponent: Exponent, r: f64) -> Self {
        let regime = if value == 0.0 { Regime::BoundaryZero } else { Regime::BoundaryOne };
        Self { value, regime, exponent, r, maximizer: None, s0: None }
    }
}

/// The answer of the region table; `None` means the pair is interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub c_star: Option<SharpConstant>,
    pub d_star: Option<SharpConstant>,
}

/// Constants resolvable without optimization, from the region table alone.
pub fn region_lookup(theta: f64, r: f64) -> Result<Region> {
    let exponent = Exponent::new(theta)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidRegime(format!("r must be finite and positive, got {r}")));
    }
    let c_star = if r < theta.max(2.0) {
        Some(SharpConstant::boundary(0.0, exponent, r))
    } else if theta == 2.0 {
        Some(SharpConstant::boundary(1.0, exponent, r))
    } else {
        None
    };
    let d_star = if r < 2.0 || r < theta {
        Some(SharpConstant::boundary(0.0, exponent, r))
    } else if theta <= 2.0 || r >= 2.0 * (theta - 1.0) {
        Some(SharpConstant::boundary(1.0, exponent, r))
    } else {
        None
    };
    Ok(Region { c_star, d_star })
}

/// `(s₀/(1+s₀))^{p-2}`, evaluated in logs.
fn s0_factor(p: f64, s0: f64) -> f64 {
    ((p - 2.0) * (s0.ln() - s0.ln_1p())).exp()
}

fn diagonal(p: f64, d_variant: bool) -> Result<SharpConstant> {
    if p == 2.0 {
        let exponent = Exponent::new(2.0)?;
        return Ok(SharpConstant::boundary(1.0, exponent, 2.0));
    }
    if !(p > 2.0) {
        return Err(Error::InvalidExponent(format!("closed forms need p >= 2, got {p}")));
    }
    let exponent = Exponent::from_p(p)?;
    let s0 = solve_s0(p, DEFAULT_TOL)?;
    let factor = s0_factor(p, s0.value);
    let value = if d_variant { factor } else { (p - 1.0) * factor };
    Ok(SharpConstant { value, regime: Regime::ClosedForm, exponent, r: p, maximizer: Some(0.0), s0: Some(s0) })
}

/// `c*(p, p) = (p-1)(s₀/(1+s₀))^{p-2}`; equals 1 at `p = 2`.
pub fn c_star_pp(p: f64) -> Result<SharpConstant> {
    diagonal(p, false)
}

/// `d*(p, p) = (s₀/(1+s₀))^{p-2}`; equals 1 at `p = 2`.
pub fn d_star_pp(p: f64) -> Result<SharpConstant> {
    diagonal(p, true)
}

/// First-order expansion of `c*(p, p)` at `p = 2`.
pub fn c_asymptotic(p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::InvalidExponent(format!("expansion is about p = 2 from above, got {p}")));
    }
    Ok(1.0 - (p - 2.0) * asymptotic_slope())
}

/// `-1 + log((1+w)/w)` with `w = W(1/e)`.
pub fn asymptotic_slope() -> f64 {
    let w = lambert_w((-1f64).exp()).expect("1/e is in the domain");
    -1.0 + ((1.0 + w) / w).ln()
}

/// `Q(t, s)`, continued to `t = 0`.
pub fn q_fn(t: f64, s: f64, p: f64) -> f64 {
    if t == 0.0 {
        return ((p - 1.0) * s.powf(p) + 1.0 + p * s.powf(p - 1.0)) / (1.0 + s).powf(p);
    }
    ((s.powf(p) + t) * (1.0 + t).powf(p - 1.0) - (s - t).powf(p)) / (t * (1.0 + s).powf(p))
}

/// `S(u, t)` on `[0,1]²`, in a form without cancellation as `u → 0`.
pub fn s_fn(u: f64, t: f64, p: f64) -> f64 {
    let q = p / (p - 1.0);
    if u == 0.0 {
        return (t.powf(p) + q * t.powf(p - 1.0) + q - 1.0) / (1.0 + t).powf(p);
    }
    let v = t.powf(p - 1.0);
    let e = q * (-u).ln_1p() + (1.0 - q) * (u / v).ln_1p();
    (u + v) * (u * t - e.exp_m1()) / (u * (1.0 + t).powf(p))
}

/// The `M_r` objective on `[0, 1]`, returned as `ln M_r(R)`.
struct MObjective {
    roots: StructuralRoots,
    r: f64,
}

impl MObjective {
    fn ln_m(&self, big_r: f64) -> Result<f64> {
        let p = self.roots.p;
        let r = self.r;
        let q = p / (p - 1.0);
        let rho = self.roots.rho(big_r)?;
        let f = phi(big_r, p);
        if f == 0.0 {
            return Ok(if r == p { -q_fn(0.0, rho, p).ln() } else { f64::NEG_INFINITY });
        }
        let ln_b = rho.ln_1p() + f.ln() - f.ln_1p();
        let ln_x4 = f.ln() + big_r.ln_1p() - f.ln_1p();
        let ln_den = if rho <= f {
            let x3 = (rho.powf(p) + f) / (1.0 + f);
            (r / p) * x3.ln()
        } else {
            let x1 = (rho - f) / (1.0 + f);
            let l = (f / rho.powf(p)).ln_1p() + (p - 1.0) * f.ln_1p() - p * (-f / rho).ln_1p();
            r * x1.ln() + ((r / p) * l).exp_m1().ln()
        };
        Ok(r * ln_b - (r / q) * ln_x4 - ln_den)
    }
}

/// `M_r(R)`; the supremum of this over `[0,1]` is `1/c*(p, r)`.
pub fn m_r(big_r: f64, p: f64, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&big_r) {
        return Err(Error::Domain(format!("M_r is maximized over [0, 1], got R = {big_r}")));
    }
    let obj = MObjective { roots: StructuralRoots::new(p, DEFAULT_TOL)?, r };
    Ok(obj.ln_m(big_r)?.exp())
}

/// `1/S̃(R)` on `[-1, 0]` through the regular form `S(u, ρ)`.
fn s_tilde_inv(roots: &StructuralRoots, big_r: f64) -> Result<f64> {
    let p = roots.p;
    if big_r == -1.0 {
        return Ok(1.0);
    }
    let rho = roots.rho(big_r)?;
    let a = big_r.abs();
    let u = a.powf(p - 1.0);
    Ok(s_fn(u, rho, p) * (rho + a).powf(p - 1.0) / (rho.powf(p - 1.0) + u))
}

/// `S̃(R)` for `R ∈ [-1, 0]`; its supremum is `1/d*(p, p)`.
pub fn s_tilde(big_r: f64, p: f64) -> Result<f64> {
    if !(-1.0..=0.0).contains(&big_r) {
        return Err(Error::Domain(format!("S̃ is defined on [-1, 0], got R = {big_r}")));
    }
    let roots = StructuralRoots::new(p, DEFAULT_TOL)?;
    Ok(1.0 / s_tilde_inv(&roots, big_r)?)
}

/// Maximizes `f` on `[a, b]`: uniform grid, dyadic refinement around the
/// best cell, then golden-section polish.
///
/// Endpoints listed in `no_polish` carry limiting values; if the best point
/// is one of them it is returned as is.
fn maximize<F>(f: F, a: f64, b: f64, grid: usize, no_polish: &[f64]) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if grid < 3 {
        return Err(Error::Domain(format!("grid needs at least 3 points, got {grid}")));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_nan() {
            return Err(Error::NonConvergence { what: "supremum search", residual: f64::NAN, iterations: 0 });
        }
        Ok(v)
    };
    let argmax = |lo: f64, hi: f64, n: usize| -> Result<(usize, f64, f64)> {
        let mut best = (0, lo, f64::NEG_INFINITY);
        for i in 0..n {
            let x = if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            let v = eval(x)?;
            if v > best.2 {
                best = (i, x, v);
            }
        }
        Ok(best)
    };

    let (mut idx, mut x, mut v) = argmax(a, b, grid)?;
    let mut step = (b - a) / (grid - 1) as f64;
    if no_polish.contains(&x) {
        return Ok((x, v));
    }
    let mut n = grid;
    for _ in 0..REFINE_LEVELS {
        let lo = if idx == 0 { x } else { (x - step).max(a) };
        let hi = if idx == n - 1 { x } else { (x + step).min(b) };
        n = REFINE_POINTS;
        let (i, xi, vi) = argmax(lo, hi, n)?;
        if vi >= v {
            idx = i;
            x = xi;
            v = vi;
        } else {
            idx = n / 2;
        }
        step = (hi - lo) / (n - 1) as f64;
    }
    let (lo, hi) = ((x - step).max(a), (x + step).min(b));
    let (xg, vg) = golden_max(&eval, lo, hi)?;
    Ok(if vg > v { (xg, vg) } else { (x, v) })
}

fn golden_max<F>(f: &F, mut lo: f64, mut hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// `c*(p, r)` for `r >= p > 2`, as `1/sup M_r` over `[0, 1]`.
pub fn c_star_numeric(p: f64, r: f64, grid: usize) -> Result<SharpConstant> {
    let exponent = Exponent::from_p(p)?;
    if !(r >= p) || !r.is_finite() {
        return Err(Error::InvalidRegime(format!(
            "numeric c* covers r >= p; got p = {p}, r = {r} (see region_lookup)"
        )));
    }
    let obj = MObjective { roots: StructuralRoots::new(p, DEFAULT_TOL)?, r };
    let (x, ln_sup) = maximize(|x| obj.ln_m(x), 0.0, 1.0, grid, &[])?;
    Ok(SharpConstant {
        value: (-ln_sup).exp(),
        regime: Regime::NumericSup,
        exponent,
        r,
        maximizer: Some(x),
        s0: Some(obj.roots.s0),
    })
}

/// `d*(p, p)` as `1/sup S̃` over `[-1, 0]`.
pub fn d_star_numeric(p: f64) -> Result<SharpConstant> {
    d_star_numeric_grid(p, DEFAULT_GRID)
}

pub fn d_star_numeric_grid(p: f64, grid: usize) -> Result<SharpConstant> {
    let exponent = Exponent::from_p(p)?;
    let roots = StructuralRoots::new(p, DEFAULT_TOL)?;
    let (x, neg_inf) = maximize(|x| Ok(-s_tilde_inv(&roots, x)?), -1.0, 0.0, grid, &[])?;
    Ok(SharpConstant {
        value: -neg_inf,
        regime: Regime::NumericSup,
        exponent,
        r: p,
        maximizer: Some(x),
        s0: Some(roots.s0),
    })
}

/// The objective whose supremum over `(-1, 1)` is `1/c*(q, r)` for `q < 2`.
struct EndpointObjective {
    roots: StructuralRoots,
    r: f64,
}

impl EndpointObjective {
    /// Evaluated at `R = -1 + h` for `R < 0` so that `1 + φ` and `|R|^p - 1`
    /// keep full relative accuracy.
    fn ln_f(&self, big_r: f64) -> Result<f64> {
        let p = self.roots.p;
        let q = p / (p - 1.0);
        let r = self.r;
        let rho = self.roots.rho(big_r)?;
        let (one_plus_phi, abs_p_minus_1) = if big_r < 0.0 {
            let lh = (-(1.0 + big_r)).ln_1p();
            (-((p - 1.0) * lh).exp_m1(), (p * lh).exp_m1())
        } else {
            (1.0 + phi(big_r, p), big_r.powf(p) - 1.0)
        };
        let ln_a = (abs_p_minus_1 / (1.0 + rho)).ln_1p();
        // |ρ - φ|/(1+ρ) = 1 - (1+φ)/(1+ρ) since ρ >= φ.
        let ln_b = (-one_plus_phi / (1.0 + rho)).ln_1p();
        let bracket_ln = if ln_b == f64::NEG_INFINITY {
            (r / q) * ln_a
        } else {
            r * ln_b + ((r / q) * ln_a - r * ln_b).exp_m1().ln()
        };
        Ok(r * (rho.ln() + one_plus_phi.ln()) - (r / q) * rho.ln_1p() - (r / p) * (rho + rho.powf(p)).ln() - bracket_ln)
    }

    /// Value at `R = -1 + 2^{-k}`.
    fn ln_f_offset(&self, k: i32) -> Result<f64> {
        self.ln_f(-1.0 + 2f64.powi(-k))
    }

    /// Limit of `F` at `R = -1` by Richardson extrapolation in `h = 2^{-k}`.
    fn limit_at_minus_one(&self) -> Result<f64> {
        const K0: i32 = 8;
        const LEVELS: usize = 6;
        let mut table: Vec<f64> =
            (0..LEVELS).map(|i| self.ln_f_offset(K0 + i as i32).map(f64::exp)).collect::<Result<_>>()?;
        for level in 1..LEVELS {
            let factor = 2f64.powi(level as i32);
            for i in (level..LEVELS).rev() {
                table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
            }
        }
        Ok(table[LEVELS - 1])
    }

    /// Extrapolated log-log slope of `F(-1 + h)` against `h`; negative means
    /// the objective blows up at `R = -1`.
    fn blowup_slope(&self) -> Result<f64> {
        let slope =
            |k: i32| -> Result<f64> { Ok((self.ln_f_offset(k + 1)? - self.ln_f_offset(k)?) / -std::f64::consts::LN_2) };
        let (s1, s2) = (slope(20)?, slope(22)?);
        Ok(s2 + (s2 - s1) / 3.0)
    }
}

const BLOWUP_SLOPE: f64 = -1e-4;

/// `c*(q, r)` for `1 < q < 2` by the numeric supremum over `R ∈ (-1, 1)`.
///
/// The objective is `0/0` at `R = -1`; its value there is the Richardson
/// limit. A blow-up at `R = -1` (which happens for `r < 2`) returns zero.
pub fn c_star_q_numeric(q: f64, r: f64, grid: usize) -> Result<SharpConstant> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidExponent(format!("expected 1 < q < 2, got {q}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidRegime(format!("r must be finite and positive, got {r}")));
    }
    let exponent = Exponent::new(q)?;
    let obj = EndpointObjective { roots: StructuralRoots::new(exponent.p, DEFAULT_TOL)?, r };
    if obj.blowup_slope()? < BLOWUP_SLOPE {
        return Ok(SharpConstant {
            value: 0.0,
            regime: Regime::BoundaryZero,
            exponent,
            r,
            maximizer: Some(-1.0),
            s0: Some(obj.roots.s0),
        });
    }
    // For r > 2 the limit is 0 and extrapolation can land a hair below it.
    let at_minus_one = obj.limit_at_minus_one()?.max(0.0).ln();
    let f = |x: f64| if x == -1.0 { Ok(at_minus_one) } else { obj.ln_f(x) };
    let (x, ln_sup) = maximize(f, -1.0, 1.0, grid, &[-1.0])?;
    Ok(SharpConstant {
        value: (-ln_sup).exp(),
        regime: Regime::NumericSup,
        exponent,
        r,
        maximizer: Some(x),
        s0: Some(obj.roots.s0),
    })
}

/// `c*(q, 2) = q - 1` and `c*(q, p) = (1 + ρ(0)^{p-1})/(1 + ρ(0))` for
/// `1 < q < 2`.
pub fn c_star_q_endpoints(q: f64, r: f64) -> Result<SharpConstant> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidExponent(format!("expected 1 < q < 2, got {q}")));
    }
    let exponent = Exponent::new(q)?;
    let p = exponent.p;
    if r == 2.0 {
        return Ok(SharpConstant {
            value: q - 1.0,
            regime: Regime::ClosedForm,
            exponent,
            r,
            maximizer: Some(-1.0),
            s0: None,
        });
    }
    if (r - p).abs() <= 1e-12 * p {
        let s0 = solve_s0(p, DEFAULT_TOL)?;
        let s = s0.value;
        return Ok(SharpConstant {
            value: (1.0 + s.powf(p - 1.0)) / (1.0 + s),
            regime: Regime::ClosedForm,
            exponent,
            r,
            maximizer: Some(0.0),
            s0: Some(s0),
        });
    }
    Err(Error::InvalidRegime(format!("closed-form endpoints exist for r = 2 and r = {p} only, got r = {r}")))
}

/// Both constants for a pair `(θ, r)`, `None` where the pair is interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantPair {
    pub c_star: Option<SharpConstant>,
    pub d_star: Option<SharpConstant>,
}

/// Region table, then closed forms, then numeric suprema.
pub fn resolve(theta: f64, r: f64, grid: usize) -> Result<ConstantPair> {
    let region = region_lookup(theta, r)?;
    let exponent = Exponent::new(theta)?;
    let diag = (r - theta).abs() <= 1e-12 * theta;
    let c_star = match region.c_star {
        Some(c) => Some(c),
        None if exponent.theta_is_p() && diag => Some(c_star_pp(theta)?),
        None if exponent.theta_is_p() => Some(c_star_numeric(theta, r, grid)?),
        None => match c_star_q_endpoints(theta, r) {
            Ok(c) => Some(c),
            Err(_) => Some(c_star_q_numeric(theta, r, grid)?),
        },
    };
    let d_star = match region.d_star {
        Some(d) => Some(d),
        None if exponent.theta_is_p() && diag => Some(d_star_pp(theta)?),
        None => None,
    };
    Ok(ConstantPair { c_star, d_star })
}
