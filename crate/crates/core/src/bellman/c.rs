use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{lambda_raw, one_plus_phi, phi};

use super::{Foliation, OmegaCPoint, SupportingPlane};

/// Values within this distance of `±1` after normalization count as faces.
const FACE_EPS: f64 = 1e-14;

/// `𝔅_{c,+}` at a point together with the chord that carries it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CEvaluation {
    pub value: f64,
    /// Whether the point lies in the region where `𝔅_{c,+} = x3^{1/p} x4^{1/q}`.
    pub closed_form: bool,
    pub r: Option<f64>,
    pub tau: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
}

impl CEvaluation {
    fn bare(value: f64, closed_form: bool) -> Self {
        Self { value, closed_form, r: None, tau: None, a1: None, a2: None }
    }
}

/// Diagnostics of a supporting-plane certificate for one chord.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneCertificate {
    pub plane: SupportingPlane,
    pub rho: f64,
    pub lambda_residual: f64,
    pub phi_at_a: f64,
    pub phi_at_b: f64,
    pub min_phi_grid: f64,
    pub min_h_grid: f64,
    /// Magnitude of the terms entering `Φ`; tolerances are relative to it.
    pub scale: f64,
    pub valid: bool,
    pub failure: Option<&'static str>,
}

const PHI_GRID: usize = 121;
const H_GRID: usize = 2001;

impl Foliation {
    pub fn c_plus(&self, x: &OmegaCPoint) -> Result<CEvaluation> {
        let p = self.p();
        let q = self.q();
        x.validate(p)?;
        if x.x3 == 0.0 || x.x4 == 0.0 {
            return Ok(CEvaluation::bare(0.0, true));
        }
        let n1 = x.x3.powf(1.0 / p);
        let n2 = x.x4.powf(1.0 / q);
        let s = n1 * n2;
        let y1 = (x.x1 / n1).clamp(-1.0, 1.0);
        let y2 = (x.x2 / n2).clamp(-1.0, 1.0);
        // One of f, g is constant on a face, so ⟨fg⟩ = x1 x2 there.
        if y1.abs() >= 1.0 - FACE_EPS || y2.abs() >= 1.0 - FACE_EPS {
            return Ok(CEvaluation::bare(x.x1 * x.x2, false));
        }
        if y1 == y2 {
            return Ok(CEvaluation {
                value: s,
                closed_form: true,
                r: Some(1.0),
                tau: Some(0.5 * (1.0 - y1)),
                a1: Some(-n1),
                a2: Some(-n2),
            });
        }
        let (sign, z1, z2) = if y2 > y1 { (1.0, -y1, -y2) } else { (-1.0, y1, y2) };
        let closed_form = self.in_closed_form_region(z1, z2)?;
        let (tau, r) = self.invert_eta(z1, z2)?;
        let rho = self.roots.rho(r)?;
        let value = if closed_form { s } else { s * self.normalized_value(tau, r, rho) };
        let l1 = n1 / (tau + (1.0 - tau) * rho.powf(p)).powf(1.0 / p);
        let l2 = n2 / (tau + (1.0 - tau) * r.abs().powf(p)).powf(1.0 / q);
        Ok(CEvaluation { value, closed_form, r: Some(r), tau: Some(tau), a1: Some(sign * l1), a2: Some(sign * l2) })
    }

    pub fn c_minus(&self, x: &OmegaCPoint) -> Result<f64> {
        let mirrored = OmegaCPoint { x1: -x.x1, ..*x };
        Ok(-self.c_plus(&mirrored)?.value)
    }

    /// The plane `t0..t4` through the chord `ℓ_c(a1, a2, R)` and its checks.
    pub fn certify_plane_c(&self, a1: f64, a2: f64, r: f64) -> Result<PlaneCertificate> {
        let p = self.p();
        let q = self.q();
        if !(a1 * a2 > 0.0) || !(a1 * a2).is_finite() {
            return Err(Error::Domain(format!("supporting planes need a1·a2 > 0, got ({a1}, {a2})")));
        }
        if !(r > -1.0 && r <= self.r0()) {
            return Err(Error::Domain(format!("supporting planes need R in (-1, R0 = {}], got {r}", self.r0())));
        }
        let r1 = self.roots.rho(r)?;
        let r2 = r;
        let (f1, f2) = (phi(r1, p), phi(r2, p));
        let t1 = a2 * (f1 - f2) / (1.0 + f1);
        let t2 = a1 * (r2 - r1) / (1.0 + r2);
        let t3 = a2 / phi(a1, p) * one_plus_phi(r2, p) / (1.0 + f1) / p;
        let t4 = a1 / phi(a2, q) * (1.0 + r1) / (1.0 + r2) / q;
        let (pa1, pa2) = (a1.abs().powf(p), a2.abs().powf(q));
        let t0 = a1 * a2 - t1 * a1 - t2 * a2 - t3 * pa1 - t4 * pa2;
        let plane = SupportingPlane { t0, t1, t2, t3, t4, t5: None };
        let scale = [t0, t1 * a1, t2 * a2, t3 * pa1, t4 * pa2, a1 * a2].iter().map(|v| v.abs()).fold(1.0, f64::max);

        let (b1, b2) = (-r1 * a1, -f2 * a2);
        let phi_at_a = plane.phi_gap(a1, a2, p);
        let phi_at_b = plane.phi_gap(b1, b2, p);
        let lambda_residual = (lambda_raw(r1, p) - lambda_raw(r2, p)).abs();

        let l1 = 2.0 * a1.abs().max(b1.abs());
        let l2 = 2.0 * a2.abs().max(b2.abs());
        let mut min_phi_grid = f64::INFINITY;
        for i in 0..PHI_GRID {
            let x1 = -l1 + 2.0 * l1 * i as f64 / (PHI_GRID - 1) as f64;
            for j in 0..PHI_GRID {
                let x2 = -l2 + 2.0 * l2 * j as f64 / (PHI_GRID - 1) as f64;
                min_phi_grid = min_phi_grid.min(plane.phi_gap(x1, x2, p));
            }
        }
        let mut min_h_grid = f64::INFINITY;
        if t4 > 0.0 {
            let lh = 3.0 * l1;
            for i in 0..H_GRID {
                let x1 = -lh + 2.0 * lh * i as f64 / (H_GRID - 1) as f64;
                min_h_grid = min_h_grid.min(plane.h(x1, p));
            }
        }

        let failure = if !(t3 > 0.0 && t4 > 0.0) {
            Some("t3 > 0 and t4 > 0")
        } else if lambda_residual > 1e-11 {
            Some("λ(R1) = λ(R2)")
        } else if phi_at_a.abs() > 1e-12 * scale || phi_at_b.abs() > 1e-12 * scale {
            Some("Φ vanishes at both chord endpoints")
        } else if min_phi_grid < -1e-10 * scale {
            Some("Φ >= 0 on the grid")
        } else if min_h_grid < -1e-10 * scale {
            Some("H >= 0 on the grid")
        } else {
            None
        };
        Ok(PlaneCertificate {
            plane,
            rho: r1,
            lambda_residual,
            phi_at_a,
            phi_at_b,
            min_phi_grid,
            min_h_grid,
            scale,
            valid: failure.is_none(),
            failure,
        })
    }

    /// `τ²(1-τ)² - S₁(R,τ) S₂(R,τ)`.
    pub fn s1s2_check(&self, r: f64, tau: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("need R in [-1, 1] and τ in [0, 1], got ({r}, {tau})")));
        }
        if r == -1.0 {
            return Ok(0.0);
        }
        let p = self.p();
        let q = self.q();
        let rho = self.roots.rho(r)?;
        let s1 = {
            let x = tau + (1.0 - tau) * rho.powf(p);
            let b = (1.0 - tau) * rho - tau;
            (x.powf(2.0 / p) - b * b) / (1.0 + rho).powi(2)
        };
        let s2 = {
            let opf = one_plus_phi(r, p);
            // x = τ + (1-τ)|R|^p and |b| = |(1-τ)φ - τ|, both kept in log
            // form near R = -1 where the difference is second order.
            let (ln_x, b_abs) = if r < 0.0 {
                let one_minus_rp = -(p * (-(1.0 + r)).ln_1p()).exp_m1();
                ((-(1.0 - tau) * one_minus_rp).ln_1p(), 1.0 - (1.0 - tau) * opf)
            } else {
                ((tau + (1.0 - tau) * r.powf(p)).ln(), ((1.0 - tau) * phi(r, p) - tau).abs())
            };
            let root = (ln_x / q).exp();
            let diff = if b_abs > 0.0 { b_abs * (ln_x / q - b_abs.ln()).exp_m1() } else { root };
            diff * (root + b_abs) / (opf * opf)
        };
        let t = tau * (1.0 - tau);
        Ok(t * t - s1 * s2)
    }
}

/// `𝔅_{c,+}(x)` for `x ∈ Ω_c`.
pub fn bellman_c_plus(x: &OmegaCPoint, p: f64) -> Result<f64> {
    Ok(Foliation::new(p)?.c_plus(x)?.value)
}

/// `𝔅_{c,-}(x) = -𝔅_{c,+}(-x1, x2, x3, x4)`.
pub fn bellman_c_minus(x: &OmegaCPoint, p: f64) -> Result<f64> {
    Foliation::new(p)?.c_minus(x)
}

/// The certified supporting plane of the chord `ℓ_c(a1, a2, R)`.
pub fn supporting_plane_c(a1: f64, a2: f64, r: f64, p: f64) -> Result<SupportingPlane> {
    let cert = Foliation::new(p)?.certify_plane_c(a1, a2, r)?;
    match cert.failure {
        None => Ok(cert.plane),
        Some(cond) => Err(Error::InvalidCertificate(format!("plane for a = ({a1}, {a2}), R = {r} fails: {cond}"))),
    }
}

/// `x1x2 + sqrt((x3^{2/p} - x1²)(x4^{2/q} - x2²))`, the largest `Re⟨f ḡ⟩`
/// of complex skeleton points with these real parts.
pub fn complex_lower_bound_c(x: &OmegaCPoint, p: f64) -> Result<f64> {
    x.validate(p)?;
    let q = p / (p - 1.0);
    let u = (x.x3.powf(2.0 / p) - x.x1 * x.x1).max(0.0);
    let v = (x.x4.powf(2.0 / q) - x.x2 * x.x2).max(0.0);
    Ok(x.x1 * x.x2 + (u * v).sqrt())
}

pub fn s1s2_check(r: f64, tau: f64, p: f64) -> Result<f64> {
    Foliation::new(p)?.s1s2_check(r, tau)
}
