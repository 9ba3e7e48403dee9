//! Brute-force lower bounds for `𝔅_{c,+}` and `𝔅_{d,+}`: maximize the
//! defining average directly over `n`-atom step pairs with matched moments.

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bellman::{ChordC, Foliation, OmegaCPoint, OmegaDPoint};
use crate::error::{Error, Result};
use crate::kernel::phi;

/// Moment residual (sup norm, normalized point) accepted as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Largest atom count the oracles accept.
pub const MAX_ATOMS: usize = 5;

const PROJECT_ITERS: usize = 80;
const ASCENT_STEPS: usize = 300;
const MIN_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    /// Best average found, a lower bound for the Bellman value.
    pub value: f64,
    /// Moment residual of the best pair, in normalized coordinates.
    pub residual: f64,
    pub restarts: usize,
    pub feasible_restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// Constraints `⟨f⟩, ⟨g⟩, ⟨|f|^p⟩, ⟨|g|^q⟩`, objective `⟨fg⟩`.
    C,
    /// Constraints `⟨f⟩, ⟨|f|^p⟩, ⟨|g|^q⟩, ⟨fg⟩`, objective `⟨g⟩`.
    D,
}

/// Variables are `u` (values of `f`), `v` (values of `g`) and `z`
/// (weight logits), stacked as `[u; v; z]`.
struct Problem {
    kind: Kind,
    p: f64,
    q: f64,
    n: usize,
    target: Vector4<f64>,
}

struct Eval {
    residual: Vector4<f64>,
    objective: f64,
    /// Columns of the constraint Jacobian, one per variable.
    jac: Vec<Vector4<f64>>,
    grad: Vec<f64>,
}

impl Problem {
    fn weights(&self, x: &[f64]) -> Vec<f64> {
        let z = &x[2 * self.n..];
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect()
    }

    /// Integrands, their `u` and `v` derivatives, and the objective parts.
    fn atom(&self, u: f64, v: f64) -> ([f64; 4], [f64; 4], [f64; 4], [f64; 3]) {
        let (p, q) = (self.p, self.q);
        let (up, vq) = (u.abs().powf(p), v.abs().powf(q));
        let (dup, dvq) = (p * phi(u, p), q * phi(v, q));
        match self.kind {
            Kind::C => ([u, v, up, vq], [1.0, 0.0, dup, 0.0], [0.0, 1.0, 0.0, dvq], [u * v, v, u]),
            Kind::D => ([u, up, vq, u * v], [1.0, dup, 0.0, v], [0.0, 0.0, dvq, u], [v, 0.0, 1.0]),
        }
    }

    fn residual(&self, x: &[f64]) -> Vector4<f64> {
        let w = self.weights(x);
        let mut m = -self.target;
        for i in 0..self.n {
            let (h, _, _, _) = self.atom(x[i], x[self.n + i]);
            m += Vector4::from(h) * w[i];
        }
        m
    }

    fn eval(&self, x: &[f64]) -> Eval {
        let n = self.n;
        let w = self.weights(x);
        let mut mean = Vector4::zeros();
        let mut objective = 0.0;
        let atoms: Vec<_> = (0..n).map(|i| self.atom(x[i], x[n + i])).collect();
        for (i, (h, _, _, o)) in atoms.iter().enumerate() {
            mean += Vector4::from(*h) * w[i];
            objective += w[i] * o[0];
        }
        let mut jac = vec![Vector4::zeros(); 3 * n];
        let mut grad = vec![0.0; 3 * n];
        for (i, (h, hu, hv, o)) in atoms.iter().enumerate() {
            jac[i] = Vector4::from(*hu) * w[i];
            jac[n + i] = Vector4::from(*hv) * w[i];
            jac[2 * n + i] = (Vector4::from(*h) - mean) * w[i];
            grad[i] = w[i] * o[1];
            grad[n + i] = w[i] * o[2];
            grad[2 * n + i] = w[i] * (o[0] - objective);
        }
        Eval { residual: mean - self.target, objective, jac, grad }
    }

    fn gram(jac: &[Vector4<f64>]) -> Matrix4<f64> {
        let mut g = Matrix4::zeros();
        for c in jac {
            g += c * c.transpose();
        }
        let scale = g.diagonal().max().max(1e-300);
        g + Matrix4::identity() * (1e-13 * scale)
    }

    /// Gauss-Newton minimum-norm steps onto the moment constraints.
    fn project(&self, x: &mut Vec<f64>) -> f64 {
        let mut res = self.residual(x).amax();
        for _ in 0..PROJECT_ITERS {
            if res <= FEASIBILITY_TOL {
                break;
            }
            let ev = self.eval(x);
            let Some(y) = Self::gram(&ev.jac).lu().solve(&ev.residual) else { break };
            let step: Vec<f64> = ev.jac.iter().map(|c| -c.dot(&y)).collect();
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
                let r = self.residual(&cand).amax();
                if r < res {
                    *x = cand;
                    res = r;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        res
    }

    /// Projected-gradient ascent from a start point; returns the best
    /// feasible objective and its residual.
    fn climb(&self, mut x: Vec<f64>) -> Option<(f64, f64)> {
        let mut res = self.project(&mut x);
        if res > FEASIBILITY_TOL {
            return None;
        }
        let mut best = self.eval(&x).objective;
        let mut eta = 0.1;
        for _ in 0..ASCENT_STEPS {
            let ev = self.eval(&x);
            let gram = Self::gram(&ev.jac);
            let jg: Vector4<f64> = ev.jac.iter().zip(&ev.grad).map(|(c, g)| c * *g).sum();
            let Some(y) = gram.lu().solve(&jg) else { break };
            let dir: Vec<f64> = ev.jac.iter().zip(&ev.grad).map(|(c, g)| g - c.dot(&y)).collect();
            let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm < 1e-14 || eta < 1e-14 {
                break;
            }
            let mut cand: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + eta * d / norm).collect();
            let r = self.project(&mut cand);
            let val = if r <= FEASIBILITY_TOL { self.eval(&cand).objective } else { f64::NEG_INFINITY };
            if val > best {
                x = cand;
                best = val;
                res = r;
                eta *= 1.5;
            } else {
                eta *= 0.5;
            }
        }
        Some((best, res))
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.n;
        let mut x = Vec::with_capacity(3 * n);
        x.extend((0..2 * n).map(|_| rng.random_range(-3.0..3.0)));
        x.extend((0..n).map(|_| rng.random_range(-1.0..1.0)));
        x
    }

    /// `n` atoms built from two values by splitting each into copies.
    fn two_atom_start(&self, first: (f64, f64), second: (f64, f64), tau: f64) -> Vec<f64> {
        let n = self.n;
        let k = n / 2;
        let tau = tau.clamp(MIN_WEIGHT, 1.0 - MIN_WEIGHT);
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let (pair, w) = if i < k { (first, tau / k as f64) } else { (second, (1.0 - tau) / (n - k) as f64) };
            u.push(pair.0);
            v.push(pair.1);
            z.push(w.ln());
        }
        [u, v, z].concat()
    }

    fn run(&self, seeds: &[Vec<f64>], budget: usize, seed: u64) -> Result<OracleResult> {
        let runs: Vec<Option<(f64, f64)>> = (0..budget)
            .into_par_iter()
            .map(|k| {
                let start = match seeds.get(k) {
                    Some(s) => s.clone(),
                    None => {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(k as u64);
                        self.random_start(&mut rng)
                    }
                };
                self.climb(start)
            })
            .collect();
        let feasible: Vec<(f64, f64)> = runs.into_iter().flatten().collect();
        let Some(&(value, residual)) = feasible.iter().max_by(|a, b| a.0.total_cmp(&b.0)) else {
            return Err(Error::Infeasible(format!(
                "no {}-atom pair matched the moments within {FEASIBILITY_TOL:e} after {budget} restarts",
                self.n
            )));
        };
        Ok(OracleResult { value, residual, restarts: budget, feasible_restarts: feasible.len() })
    }
}

fn check_config(n_atoms: usize, budget: usize) -> Result<()> {
    if !(2..=MAX_ATOMS).contains(&n_atoms) || budget == 0 {
        return Err(Error::Domain(format!(
            "oracles need 2..={MAX_ATOMS} atoms and a positive budget, got {n_atoms} and {budget}"
        )));
    }
    Ok(())
}

/// Best `⟨fg⟩` found over `n_atoms`-step pairs with moments `x`.
///
/// The point is first scaled to `x3 = x4 = 1`. Restart 0 starts from the
/// foliation's extremal pair when the point has one, restart 1 from the
/// constant pair, the rest from seeded random pairs.
pub fn oracle_bellman_c(x: &OmegaCPoint, p: f64, n_atoms: usize, budget: usize, seed: u64) -> Result<OracleResult> {
    check_config(n_atoms, budget)?;
    let fol = Foliation::new(p)?;
    let q = fol.q();
    x.validate(p)?;
    if x.x3 == 0.0 || x.x4 == 0.0 {
        return Err(Error::Domain("oracles exclude f ≡ 0 and g ≡ 0".into()));
    }
    let (n1, n2) = (x.x3.powf(1.0 / p), x.x4.powf(1.0 / q));
    let (y1, y2) = ((x.x1 / n1).clamp(-1.0, 1.0), (x.x2 / n2).clamp(-1.0, 1.0));
    let problem = Problem { kind: Kind::C, p, q, n: n_atoms, target: Vector4::new(y1, y2, 1.0, 1.0) };
    let mut seeds = Vec::new();
    let ev = fol.c_plus(&OmegaCPoint::new(y1, y2, 1.0, 1.0))?;
    if let (Some(r), Some(tau), Some(a1), Some(a2)) = (ev.r, ev.tau, ev.a1, ev.a2) {
        let ch = ChordC::new(a1, a2, r, tau, &fol.roots)?;
        seeds.push(problem.two_atom_start((a1, a2), (-ch.rho * a1, -ch.phi * a2), tau));
    }
    seeds.push(problem.two_atom_start((y1, y2), (y1, y2), 0.5));
    let res = problem.run(&seeds, budget, seed)?;
    Ok(OracleResult { value: res.value * n1 * n2, ..res })
}

/// Best `⟨g⟩` found over `n_atoms`-step pairs with moments `x`.
pub fn oracle_bellman_d(x: &OmegaDPoint, p: f64, n_atoms: usize, budget: usize, seed: u64) -> Result<OracleResult> {
    check_config(n_atoms, budget)?;
    let fol = Foliation::new(p)?;
    let q = fol.q();
    x.validate(p)?;
    if x.x3 == 0.0 || x.x4 == 0.0 {
        return Err(Error::Domain("oracles exclude f ≡ 0 and g ≡ 0".into()));
    }
    let (n3, n4) = (x.x3.powf(1.0 / p), x.x4.powf(1.0 / q));
    let y1 = (x.x1 / n3).clamp(-1.0, 1.0);
    let w = (x.x5 / (n3 * n4)).clamp(-1.0, 1.0);
    let problem = Problem { kind: Kind::D, p, q, n: n_atoms, target: Vector4::new(y1, 1.0, 1.0, w) };
    let mut seeds = Vec::new();
    let ev = fol.d_plus(&OmegaDPoint::new(y1, 1.0, 1.0, w))?;
    if let (Some(r), Some(tau), Some(a1), Some(a2)) = (ev.r, ev.tau, ev.a1, ev.a2) {
        let ch = ChordC::new(a1, a2, r, tau, &fol.roots)?;
        seeds.push(problem.two_atom_start((a1, a2), (-ch.rho * a1, -ch.phi * a2), tau));
    }
    if y1.abs() == 1.0 {
        seeds.push(problem.two_atom_start((y1, w / y1), (y1, w / y1), 0.5));
    }
    let res = problem.run(&seeds, budget, seed)?;
    Ok(OracleResult { value: res.value * n4, ..res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellman::{bellman_c_plus, bellman_d_plus};
    use crate::roots::{StructuralRoots, DEFAULT_TOL};

    #[test]
    fn skeleton_and_rademacher() {
        let p = 3.0;
        let q = 1.5;
        let sk = OmegaCPoint::new(0.7, -1.2, 0.7f64.powf(p), 1.2f64.powf(q));
        let o = oracle_bellman_c(&sk, p, 3, 4, 1).unwrap();
        assert!((o.value - 0.7 * -1.2).abs() < 1e-9, "{o:?}");
        let o = oracle_bellman_c(&OmegaCPoint::new(0.0, 0.0, 1.0, 1.0), p, 3, 4, 1).unwrap();
        assert!(o.value >= 1.0 - 1e-9 && o.value <= 1.0 + 1e-9, "{o:?}");
        let o = oracle_bellman_d(&OmegaDPoint::new(0.0, 1.0, 1.0, 0.0), p, 3, 4, 1).unwrap();
        assert!(o.value >= 1.0 - 1e-6 && o.value <= 1.0 + 1e-9, "{o:?}");
        let skd = OmegaDPoint::new(0.5, 0.5f64.powf(p), 2f64.powf(q), 1.0);
        let o = oracle_bellman_d(&skd, p, 3, 4, 1).unwrap();
        assert!((o.value - 2.0).abs() < 1e-9, "{o:?}");
    }

    #[test]
    fn chord_points_are_reached() {
        let p = 4.0;
        let roots = StructuralRoots::new(p, DEFAULT_TOL).unwrap();
        let ch = ChordC::new(0.9, 1.1, -0.4, 0.3, &roots).unwrap();
        let x = ch.point();
        let o = oracle_bellman_c(&x, p, 4, 6, 2).unwrap();
        assert!(o.value >= ch.value() - 1e-6 && o.value <= bellman_c_plus(&x, p).unwrap() + 1e-9);
        let d = OmegaDPoint::new(x.x1, x.x3, x.x4, ch.value());
        let o = oracle_bellman_d(&d, p, 4, 6, 2).unwrap();
        let b = bellman_d_plus(&d, p, 1e-11).unwrap();
        assert!((o.value - x.x2).abs() < 1e-6 && o.value <= b + 1e-9, "{o:?} vs {b}");
    }

    #[test]
    fn random_points_stay_below() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = 3.0;
        for _ in 0..8 {
            let x = OmegaCPoint::new(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9), 1.0, 1.0);
            let o = oracle_bellman_c(&x, p, 4, 8, 3).unwrap();
            let b = bellman_c_plus(&x, p).unwrap();
            assert!(o.value <= b + 1e-9 && o.value >= b - 1e-3, "{x:?}: {o:?} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let x = OmegaCPoint::new(0.0, 0.0, 1.0, 1.0);
        assert!(oracle_bellman_c(&x, 3.0, 1, 4, 0).is_err());
        assert!(oracle_bellman_c(&x, 3.0, 6, 4, 0).is_err());
        assert!(oracle_bellman_c(&x, 3.0, 3, 0, 0).is_err());
        assert!(oracle_bellman_c(&OmegaCPoint::new(2.0, 0.0, 1.0, 1.0), 3.0, 3, 4, 0).is_err());
    }
}
