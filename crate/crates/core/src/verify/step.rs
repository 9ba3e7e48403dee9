use num_complex::Complex64;
use serde::Serialize;

use crate::bellman::{OmegaCPoint, OmegaDPoint};
use crate::error::{Error, Result};
use crate::kernel::Exponent;

/// Allowed deviation of the total weight from one.
pub const WEIGHT_TOL: f64 = 1e-14;

/// A step function on `[0, 1]`: atom `k` takes `value` on an interval of
/// length `weight`, the intervals laid out left to right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    atoms: Vec<(Complex64, f64)>,
}

impl StepFunction {
    pub fn new(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::StepFunction("at least one atom is required".into()));
        }
        if let Some(bad) =
            atoms.iter().find(|(v, w)| !(*w > 0.0) || !w.is_finite() || !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::StepFunction(format!("atom {bad:?} needs a finite value and a positive weight")));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::StepFunction(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    /// Builds a step function after dividing the weights by their sum.
    pub fn normalized(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if !(total > 0.0) {
            return Err(Error::StepFunction("weights must have a positive sum".into()));
        }
        Self::new(atoms.into_iter().map(|(v, w)| (v, w / total)).collect())
    }

    pub fn real(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(atoms.iter().map(|&(v, w)| (Complex64::new(v, 0.0), w)).collect())
    }

    pub fn constant(value: Complex64) -> Self {
        Self { atoms: vec![(value, 1.0)] }
    }

    /// Two atoms `±1` of weight `1/2`.
    pub fn rademacher() -> Self {
        Self { atoms: vec![(Complex64::new(1.0, 0.0), 0.5), (Complex64::new(-1.0, 0.0), 0.5)] }
    }

    pub fn atoms(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }

    pub fn is_real(&self) -> bool {
        self.atoms.iter().all(|(v, _)| v.im == 0.0)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { atoms: self.atoms.iter().map(|&(v, w)| (f(v), w)).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn mean(&self) -> Complex64 {
        self.atoms.iter().map(|&(v, w)| v * w).sum()
    }

    /// `⟨|f|^θ⟩`.
    pub fn power_mean(&self, theta: f64) -> f64 {
        self.atoms.iter().map(|&(v, w)| w * v.norm().powf(theta)).sum()
    }

    /// `‖f‖_θ`.
    pub fn norm(&self, theta: f64) -> f64 {
        self.power_mean(theta).powf(1.0 / theta)
    }

    /// Pairs of values on the common refinement of both partitions.
    pub fn refine(&self, other: &StepFunction) -> Vec<(Complex64, Complex64, f64)> {
        let mut out = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut i, mut j) = (0, 0);
        let (mut ri, mut rj) = (self.atoms[0].1, other.atoms[0].1);
        while i < self.atoms.len() && j < other.atoms.len() {
            let m = ri.min(rj);
            if m > 0.0 {
                out.push((self.atoms[i].0, other.atoms[j].0, m));
            }
            if ri <= rj {
                rj -= ri;
                i += 1;
                ri = self.atoms.get(i).map_or(0.0, |a| a.1);
            } else {
                ri -= rj;
                j += 1;
                rj = other.atoms.get(j).map_or(0.0, |a| a.1);
            }
        }
        out
    }

    /// `⟨f, g⟩ = ∫ f ḡ`.
    pub fn inner(&self, other: &StepFunction) -> Complex64 {
        self.refine(other).into_iter().map(|(a, b, w)| a * b.conj() * w).sum()
    }

    /// `f - αe` on the common refinement.
    pub fn sub_scaled(&self, alpha: Complex64, e: &StepFunction) -> StepFunction {
        StepFunction { atoms: self.refine(e).into_iter().map(|(a, b, w)| (a - alpha * b, w)).collect() }
    }
}

/// The five averages `⟨f⟩, ⟨g⟩, ⟨|f|^θ⟩, ⟨|g|^θ'⟩, ⟨f ḡ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentVector {
    pub x1: Complex64,
    pub x2: Complex64,
    pub x3: f64,
    pub x4: f64,
    pub x5: Complex64,
}

impl MomentVector {
    fn require_real(&self) -> Result<()> {
        if self.x1.im != 0.0 || self.x2.im != 0.0 || self.x5.im != 0.0 {
            return Err(Error::Domain("Bellman points need real moments".into()));
        }
        Ok(())
    }

    pub fn omega_c(&self) -> Result<OmegaCPoint> {
        self.require_real()?;
        Ok(OmegaCPoint::new(self.x1.re, self.x2.re, self.x3, self.x4))
    }

    pub fn omega_d(&self) -> Result<OmegaDPoint> {
        self.require_real()?;
        Ok(OmegaDPoint::new(self.x1.re, self.x3, self.x4, self.x5.re))
    }
}

/// Exact moments of the pair `(f, g)`; `f` is measured in `L^θ`, `g` in `L^θ'`.
pub fn moments(f: &StepFunction, g: &StepFunction, exp: Exponent) -> MomentVector {
    let mut m = MomentVector {
        x1: Complex64::new(0.0, 0.0),
        x2: Complex64::new(0.0, 0.0),
        x3: 0.0,
        x4: 0.0,
        x5: Complex64::new(0.0, 0.0),
    };
    for (a, b, w) in f.refine(g) {
        m.x1 += a * w;
        m.x2 += b * w;
        m.x3 += w * a.norm().powf(exp.theta);
        m.x4 += w * b.norm().powf(exp.dual);
        m.x5 += a * b.conj() * w;
    }
    m
}
