//! The Bellman functions `𝔅_{c,±}` and `𝔅_{d,±}`.
//!
//! `𝔅_{c,+}(x)` is the supremum of `⟨fg⟩` over real `f, g` with
//! `(⟨f⟩, ⟨g⟩, ⟨|f|^p⟩, ⟨|g|^q⟩) = x`; `𝔅_{d,+}` maximizes `⟨g⟩` given
//! `(⟨f⟩, ⟨|f|^p⟩, ⟨|g|^q⟩, ⟨fg⟩)`. Both are evaluated through their
//! foliations by chords, located with the [`Foliation`] helper.

mod c;
mod d;
mod foliation;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::phi;
use crate::roots::{StructuralRoots, DEFAULT_TOL};

pub use c::{
    bellman_c_minus, bellman_c_plus, complex_lower_bound_c, s1s2_check, supporting_plane_c, CEvaluation,
    PlaneCertificate,
};
pub use d::{bellman_d_minus, bellman_d_plus, d_plane_slopes, g_bounds_d, DEvaluation};
pub use foliation::{eta, in_closed_form_region, invert_eta};

/// Default forward-residual tolerance of the foliation inversions.
pub const DEFAULT_INVERSION_TOL: f64 = 1e-11;

/// Relative slack admitted by the domain membership tests.
pub const MEMBERSHIP_RTOL: f64 = 1e-12;

/// A point `(x1, x2, x3, x4)` of `Ω_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaCPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl OmegaCPoint {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self { x1, x2, x3, x4 }
    }

    /// Checks `x3 >= |x1|^p` and `x4 >= |x2|^q` up to [`MEMBERSHIP_RTOL`].
    pub fn validate(&self, p: f64) -> Result<()> {
        let q = p / (p - 1.0);
        let OmegaCPoint { x1, x2, x3, x4 } = *self;
        if ![x1, x2, x3, x4].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate in {self:?}")));
        }
        let need3 = x1.abs().powf(p);
        let need4 = x2.abs().powf(q);
        if x3 < need3 * (1.0 - MEMBERSHIP_RTOL) || x4 < need4 * (1.0 - MEMBERSHIP_RTOL) || x3 < 0.0 || x4 < 0.0 {
            return Err(Error::Domain(format!(
                "{self:?} is outside Ω_c: need x3 >= |x1|^p = {need3:e} and x4 >= |x2|^q = {need4:e}"
            )));
        }
        Ok(())
    }
}

/// A point `(x1, x3, x4, x5)` of `Ω_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaDPoint {
    pub x1: f64,
    pub x3: f64,
    pub x4: f64,
    pub x5: f64,
}

impl OmegaDPoint {
    pub fn new(x1: f64, x3: f64, x4: f64, x5: f64) -> Self {
        Self { x1, x3, x4, x5 }
    }

    pub fn validate(&self, p: f64) -> Result<()> {
        let q = p / (p - 1.0);
        let OmegaDPoint { x1, x3, x4, x5 } = *self;
        if ![x1, x3, x4, x5].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate in {self:?}")));
        }
        let n3 = x3.max(0.0).powf(1.0 / p);
        let n4 = x4.max(0.0).powf(1.0 / q);
        let slack = 1.0 + MEMBERSHIP_RTOL;
        if x3 < 0.0 || x4 < 0.0 || x1.abs() > n3 * slack || x5.abs() > n3 * n4 * slack {
            return Err(Error::Domain(format!(
                "{self:?} is outside Ω_d: need x4 >= 0, |x1| <= x3^(1/p), |x5| <= x3^(1/p) x4^(1/q)"
            )));
        }
        Ok(())
    }
}

/// `T(x) = (x1 x3^{-1/p}, x2 x4^{-1/q})`, clamped into `[-1, 1]²`.
pub fn t_map(x: &OmegaCPoint, p: f64) -> Result<(f64, f64)> {
    x.validate(p)?;
    let q = p / (p - 1.0);
    if x.x3 == 0.0 || x.x4 == 0.0 {
        return Err(Error::Domain(format!("T is undefined on the rays x1 = x3 = 0 and x2 = x4 = 0: {x:?}")));
    }
    let y1 = (x.x1 / x.x3.powf(1.0 / p)).clamp(-1.0, 1.0);
    let y2 = (x.x2 / x.x4.powf(1.0 / q)).clamp(-1.0, 1.0);
    Ok((y1, y2))
}

/// The chord `ℓ_c(a1, a2, R)` and a position `τ` on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordC {
    pub a1: f64,
    pub a2: f64,
    pub r: f64,
    pub tau: f64,
    pub rho: f64,
    pub phi: f64,
    pub p: f64,
}

impl ChordC {
    pub fn new(a1: f64, a2: f64, r: f64, tau: f64, roots: &StructuralRoots) -> Result<Self> {
        if a1 * a2 == 0.0 || !(a1 * a2).is_finite() {
            return Err(Error::Domain(format!("chord needs a1·a2 ≠ 0, got ({a1}, {a2})")));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("τ must lie in [0, 1], got {tau}")));
        }
        let p = roots.p;
        Ok(Self { a1, a2, r, tau, rho: roots.rho(r)?, phi: phi(r, p), p })
    }

    fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// The skeleton endpoint `(a1, a2, |a1|^p, |a2|^q)`.
    pub fn a(&self) -> OmegaCPoint {
        OmegaCPoint::new(self.a1, self.a2, self.a1.abs().powf(self.p), self.a2.abs().powf(self.q()))
    }

    /// The skeleton endpoint `(-ρa1, -φa2, |ρa1|^p, |R|^p |a2|^q)`.
    pub fn b(&self) -> OmegaCPoint {
        let b1 = -self.rho * self.a1;
        let b2 = -self.phi * self.a2;
        OmegaCPoint::new(b1, b2, b1.abs().powf(self.p), self.r.abs().powf(self.p) * self.a2.abs().powf(self.q()))
    }

    pub fn point(&self) -> OmegaCPoint {
        let (a, b, t) = (self.a(), self.b(), self.tau);
        let mix = |u: f64, v: f64| t * u + (1.0 - t) * v;
        OmegaCPoint::new(mix(a.x1, b.x1), mix(a.x2, b.x2), mix(a.x3, b.x3), mix(a.x4, b.x4))
    }

    /// `a1 a2 (τ + (1-τ)ρφ)`, the Bellman value along the chord.
    pub fn value(&self) -> f64 {
        self.a1 * self.a2 * (self.tau + (1.0 - self.tau) * self.rho * self.phi)
    }
}

/// Affine certificate `t0 + t1x1 + t2x2 + t3x3 + t4x4 (+ t5x5)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportingPlane {
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: Option<f64>,
}

impl SupportingPlane {
    /// `Φ(x1, x2) = Ψ(x1, x2, |x1|^p, |x2|^q) - x1x2`.
    pub fn phi_gap(&self, x1: f64, x2: f64, p: f64) -> f64 {
        let q = p / (p - 1.0);
        self.t0 + self.t1 * x1 + self.t2 * x2 + self.t3 * x1.abs().powf(p) + self.t4 * x2.abs().powf(q) - x1 * x2
    }

    /// `min over x2` of `Φ(x1, ·)`, which is `H(x1)`.
    pub fn h(&self, x1: f64, p: f64) -> f64 {
        let q = p / (p - 1.0);
        self.t0 - (x1 - self.t2).abs().powf(p) / (p * (q * self.t4).powf(p - 1.0))
            + self.t3 * x1.abs().powf(p)
            + self.t1 * x1
    }

    pub fn eval(&self, x: &OmegaCPoint) -> f64 {
        self.t0 + self.t1 * x.x1 + self.t2 * x.x2 + self.t3 * x.x3 + self.t4 * x.x4
    }
}

/// Cached structural roots plus the evaluation routines that need them.
#[derive(Debug, Clone, Copy)]
pub struct Foliation {
    pub roots: StructuralRoots,
    pub tol: f64,
}

impl Foliation {
    pub fn new(p: f64) -> Result<Self> {
        Self::with_tol(p, DEFAULT_INVERSION_TOL)
    }

    pub fn with_tol(p: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { roots: StructuralRoots::new(p, DEFAULT_TOL)?, tol })
    }

    pub fn p(&self) -> f64 {
        self.roots.p
    }

    pub fn q(&self) -> f64 {
        self.roots.p / (self.roots.p - 1.0)
    }

    pub fn r0(&self) -> f64 {
        self.roots.r0()
    }
}
