//! One PASS/FAIL line per acceptance criterion.

use std::process::{Command, ExitCode};
use std::time::Instant;

use holder_sharp::bellman::{
    bellman_c_plus, bellman_d_plus, complex_lower_bound_c, g_bounds_d, ChordC, Foliation, OmegaCPoint, OmegaDPoint,
    DEFAULT_INVERSION_TOL,
};
use holder_sharp::constants::{
    c_asymptotic, c_star_numeric, c_star_pp, c_star_q_endpoints, c_star_q_numeric, d_star_numeric, d_star_pp,
    DEFAULT_GRID,
};
use holder_sharp::kernel::{kappa, lambert_w};
use holder_sharp::roots::{solve_r0, solve_s0, StructuralRoots, DEFAULT_TOL};
use holder_sharp::verify::{
    extremal_pair_c, moments, oracle_bellman_c, oracle_bellman_d, run_campaign, witness_rlessthan2, witness_rlessthanp,
    CampaignConfig, Inequality,
};
use holder_sharp::Exponent;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got:.17e}, want {want:.17e} (tol {tol:e})"))
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn closed_form_constants() -> Outcome {
    let s2 = 2f64.sqrt();
    close("c*(4,4)", c_star_pp(4.0).map_err(err)?.value, 1.0 / 3.0, 1e-12)?;
    close("d*(4,4)", d_star_pp(4.0).map_err(err)?.value, 1.0 / 9.0, 1e-12)?;
    close("c*(3,3)", c_star_pp(3.0).map_err(err)?.value, 2.0 - s2, 1e-12)?;
    close("d*(3,3)", d_star_pp(3.0).map_err(err)?.value, 1.0 - 1.0 / s2, 1e-12)?;
    Ok("c*, d* at p = 3, 4".into())
}

fn structural_roots() -> Outcome {
    close("R0(4)", solve_r0(4.0, DEFAULT_TOL).map_err(err)?.value, 2.0 - 3f64.sqrt(), 1e-12)?;
    let mut worst = 0.0f64;
    for p in [2.5, 3.0, 4.0, 6.0] {
        let roots = StructuralRoots::new(p, DEFAULT_TOL).map_err(err)?;
        let k = kappa(roots.r0(), p).abs();
        worst = worst.max(k);
        if k > 1e-12 {
            return Err(format!("κ(R0({p})) = {k:e}"));
        }
        close(
            &format!("s0({p}) vs ρ(0)"),
            solve_s0(p, DEFAULT_TOL).map_err(err)?.value,
            roots.rho(0.0).map_err(err)?,
            1e-11,
        )?;
    }
    Ok(format!("max |κ(R0)| = {worst:.1e}"))
}

fn numeric_cross_checks() -> Outcome {
    for p in [2.5, 3.0, 4.0] {
        let c = c_star_numeric(p, p, DEFAULT_GRID).map_err(err)?;
        close(&format!("c numeric p={p}"), c.value, c_star_pp(p).map_err(err)?.value, 1e-8)?;
        close(&format!("c maximizer p={p}"), c.maximizer.unwrap_or(f64::NAN), 0.0, 1e-4)?;
        let d = d_star_numeric(p).map_err(err)?;
        close(&format!("d numeric p={p}"), d.value, d_star_pp(p).map_err(err)?.value, 1e-8)?;
        close(&format!("d maximizer p={p}"), d.maximizer.unwrap_or(f64::NAN), 0.0, 1e-4)?;
    }
    Ok("p = 2.5, 3, 4".into())
}

fn asymptotics() -> Outcome {
    let mut worst = 0.0f64;
    for k in 4..=12 {
        let p = 2.0 + 2f64.powi(-k);
        let ratio = (c_star_pp(p).map_err(err)?.value - c_asymptotic(p).map_err(err)?).abs() / (p - 2.0).powi(2);
        if !ratio.is_finite() || ratio > 10.0 {
            return Err(format!("k = {k}: remainder ratio {ratio}"));
        }
        worst = worst.max(ratio);
    }
    let z = (-1f64).exp();
    let w = lambert_w(z).map_err(err)?;
    let residual = (w * w.exp() - z).abs();
    if residual > 1e-14 {
        return Err(format!("W(1/e) residual {residual:e}"));
    }
    Ok(format!("max remainder/(p-2)² = {worst:.3}, W residual = {residual:.1e}"))
}

fn random_c_point(rng: &mut ChaCha8Rng, p: f64) -> OmegaCPoint {
    let q = p / (p - 1.0);
    let x1: f64 = rng.random_range(-0.9..0.9);
    let x2: f64 = rng.random_range(-0.9..0.9);
    let x3 = x1.abs().powf(p) + rng.random_range(0.0..1.0);
    let x4 = x2.abs().powf(q) + rng.random_range(0.0..1.0);
    OmegaCPoint::new(x1, x2, x3, x4)
}

fn random_d_point(rng: &mut ChaCha8Rng, p: f64) -> OmegaDPoint {
    let q = p / (p - 1.0);
    let x3: f64 = rng.random_range(0.05..2.0);
    let x4: f64 = rng.random_range(0.05..2.0);
    let n3 = x3.powf(1.0 / p);
    let x1 = n3 * rng.random_range(-0.95..0.95);
    let x5 = n3 * x4.powf(1.0 / q) * rng.random_range(-0.95..0.95);
    OmegaDPoint::new(x1, x3, x4, x5)
}

fn random_chord(rng: &mut ChaCha8Rng, roots: &StructuralRoots) -> Result<ChordC, String> {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let a1 = sign * rng.random_range(0.2..2.0);
    let a2 = sign * rng.random_range(0.2..2.0);
    ChordC::new(a1, a2, rng.random_range(-0.98..0.98), rng.random_range(0.02..0.98), roots).map_err(err)
}

fn majorization_and_oracle() -> Outcome {
    let p = 3.0;
    let exp = Exponent::from_p(p).map_err(err)?;
    let roots = StructuralRoots::new(p, DEFAULT_TOL).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut gap_c = f64::INFINITY;
    for i in 0..100 {
        let x = random_c_point(&mut rng, p);
        let o = oracle_bellman_c(&x, p, 4, 4, i).map_err(err)?;
        let b = bellman_c_plus(&x, p).map_err(err)?;
        if o.value > b + 1e-9 {
            return Err(format!("oracle {} above 𝔅_c+ = {b} at {x:?}", o.value));
        }
        gap_c = gap_c.min(b - o.value);
    }
    let mut worst_chord = 0.0f64;
    for _ in 0..100 {
        let ch = random_chord(&mut rng, &roots)?;
        let (f, g) = extremal_pair_c(&ch).map_err(err)?;
        let m = moments(&f, &g, exp);
        let x = m.omega_c().map_err(err)?;
        let attained = f.inner(&g.map(|v| v.conj())).re;
        let b = bellman_c_plus(&x, p).map_err(err)?;
        let scale = (ch.a1 * ch.a2).abs().max(1.0);
        worst_chord = worst_chord.max((attained - b).abs() / scale);
        close("extremal pair on chord", attained, b, 1e-9 * scale)?;
    }
    let mut worst_d = 0.0f64;
    for i in 0..50 {
        let x = random_d_point(&mut rng, p);
        let o = oracle_bellman_d(&x, p, 4, 4, i).map_err(err)?;
        let b = bellman_d_plus(&x, p, DEFAULT_INVERSION_TOL).map_err(err)?;
        if o.value > b + 1e-9 {
            return Err(format!("oracle {} above 𝔅_d+ = {b} at {x:?}", o.value));
        }
    }
    for _ in 0..50 {
        // The d-chords carry 𝔅_{d,+} for a2 > 0 and R < R0.
        let ch = random_chord(&mut rng, &roots)?;
        let r = -0.98 + rng.random_range(0.0..1.0) * (roots.r0() + 0.98);
        let ch = ChordC::new(ch.a1.abs(), ch.a2.abs(), r, ch.tau, &roots).map_err(err)?;
        let (f, g) = extremal_pair_c(&ch).map_err(err)?;
        let m = moments(&f, &g, exp);
        let x = m.omega_d().map_err(err)?;
        let attained = g.mean().re;
        let b = bellman_d_plus(&x, p, DEFAULT_INVERSION_TOL).map_err(err)?;
        let scale = ch.a2.abs().max(1.0);
        worst_d = worst_d.max((attained - b).abs() / scale);
        close("extremal pair on d-chord", attained, b, 1e-9 * scale)?;
    }
    Ok(format!("min c-gap {gap_c:.1e}, chord error {worst_chord:.1e} (c), {worst_d:.1e} (d)"))
}

fn inequality_validity() -> Outcome {
    let samples = 10_000;
    let mut summary = Vec::new();
    for p in [2.5, 3.0, 4.0] {
        let c = c_star_pp(p).map_err(err)?.value;
        let cfg = CampaignConfig { inequality: Inequality::Hold3, theta: p, r: p, constant: c, samples, seed: 1 };
        let rep = run_campaign(&cfg).map_err(err)?;
        if rep.violations > 0 || rep.min_slack < -1e-10 {
            return Err(format!("hold3 p={p}: {} violations, min slack {:e}", rep.violations, rep.min_slack));
        }
        summary.push(format!("hold3 p={p} min {:.1e}", rep.min_slack));
    }
    for (theta, r) in [(1.5, 2.0), (3.0, 4.0)] {
        let cfg = CampaignConfig { inequality: Inequality::Hold4, theta, r, constant: 1.0, samples, seed: 1 };
        let rep = run_campaign(&cfg).map_err(err)?;
        if rep.violations > 0 || rep.min_slack < -1e-10 {
            return Err(format!("hold4 ({theta},{r}): {} violations, min slack {:e}", rep.violations, rep.min_slack));
        }
        summary.push(format!("hold4 ({theta},{r}) min {:.1e}", rep.min_slack));
    }
    for p in [2.5, 3.0, 4.0] {
        let c = 1.05 * c_star_pp(p).map_err(err)?.value;
        let cfg = CampaignConfig { inequality: Inequality::Hold3, theta: p, r: p, constant: c, samples: 100, seed: 1 };
        let rep = run_campaign(&cfg).map_err(err)?;
        if rep.seeded_violations == 0 {
            return Err(format!("1.05·c* at p={p} was not violated by the seeded configurations"));
        }
    }
    summary.push("1.05·c* violated".into());
    Ok(summary.join(", "))
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn witness_degeneration() -> Outcome {
    let a: Vec<f64> =
        (2..=12).map(|k| witness_rlessthanp(3.0, 2.0, 2f64.powi(-k))).collect::<Result<_, _>>().map_err(err)?;
    let b: Vec<f64> =
        (2..=12).map(|k| witness_rlessthan2(3.0, 1.5, 2f64.powi(-k))).collect::<Result<_, _>>().map_err(err)?;
    if !strictly_decreasing(&a) || a[a.len() - 1] > 0.2 * a[0] {
        return Err(format!("r < p witness does not degenerate: {a:?}"));
    }
    if !strictly_decreasing(&b) || b[b.len() - 1] > 0.2 * b[0] {
        return Err(format!("r < 2 witness does not degenerate: {b:?}"));
    }
    Ok(format!("{:.2e} -> {:.2e}, {:.2e} -> {:.2e}", a[0], a[a.len() - 1], b[0], b[b.len() - 1]))
}

fn endpoint_constants() -> Outcome {
    for q in [4.0 / 3.0, 1.5] {
        let c = c_star_q_numeric(q, 2.0, DEFAULT_GRID).map_err(err)?;
        close(&format!("c(q={q}, 2)"), c.value, q - 1.0, 1e-6)?;
    }
    close("c(4/3, 4)", c_star_q_endpoints(4.0 / 3.0, 4.0).map_err(err)?.value, 0.75, 1e-12)?;
    Ok("q - 1 and 3/4".into())
}

fn geometric_inequalities() -> Outcome {
    let mut worst = f64::INFINITY;
    for p in [2.5, 3.0, 4.0] {
        let fol = Foliation::new(p).map_err(err)?;
        for i in 0..100 {
            let r = -1.0 + 2.0 * i as f64 / 99.0;
            for j in 0..100 {
                let tau = j as f64 / 99.0;
                let v = fol.s1s2_check(r, tau).map_err(err)?;
                worst = worst.min(v);
                if v < -1e-12 {
                    return Err(format!("s1s2 = {v:e} at p={p}, R={r}, τ={tau}"));
                }
            }
        }
    }
    let p = 3.0;
    let q = 1.5;
    let fol = Foliation::new(p).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let x = random_c_point(&mut rng, p);
        let lower = complex_lower_bound_c(&x, p).map_err(err)?;
        let plus = fol.c_plus(&x).map_err(err)?.value;
        let scale = x.x3.powf(1.0 / p) * x.x4.powf(1.0 / q);
        if lower > plus + 1e-10 * scale.max(1.0) {
            return Err(format!("complex bound {lower} above {plus} at {x:?}"));
        }
    }
    for _ in 0..500 {
        let x = random_d_point(&mut rng, p);
        let (lo, hi) = g_bounds_d(&x, p).map_err(err)?;
        let plus = fol.d_plus(&x).map_err(err)?.value;
        let minus = fol.d_minus(&x).map_err(err)?;
        let scale = x.x4.powf(1.0 / q).max(1.0);
        if !(minus <= lo + 1e-9 * scale && lo <= hi && hi <= plus + 1e-9 * scale) {
            return Err(format!("ordering {minus} <= {lo} <= {hi} <= {plus} fails at {x:?}"));
        }
    }
    Ok(format!("min s1s2 = {worst:.1e}"))
}

fn certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let ps = [2.5, 3.0, 4.0];
    let fols: Vec<Foliation> = ps.iter().map(|&p| Foliation::new(p)).collect::<Result<_, _>>().map_err(err)?;
    let mut worst_lambda = 0.0f64;
    for i in 0..200 {
        let fol = &fols[i % fols.len()];
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let a1 = sign * rng.random_range(0.2..3.0);
        let a2 = sign * rng.random_range(0.2..3.0);
        let r = -1.0 + rng.random_range(0.01..1.0) * (fol.r0() + 1.0);
        let cert = fol.certify_plane_c(a1, a2, r).map_err(err)?;
        let t = cert.plane;
        let ok = cert.valid
            && t.t3 > 0.0
            && t.t4 > 0.0
            && cert.min_phi_grid >= -1e-10 * cert.scale
            && cert.phi_at_a.abs() <= 1e-12 * cert.scale
            && cert.phi_at_b.abs() <= 1e-12 * cert.scale
            && cert.lambda_residual <= 1e-11;
        if !ok {
            return Err(format!("plane ({a1}, {a2}, {r}) at p={}: {cert:?}", fol.p()));
        }
        worst_lambda = worst_lambda.max(cert.lambda_residual);
    }
    Ok(format!("200 planes, max λ residual {worst_lambda:.1e}"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_holder-sharp");
    let run = |format: &str| {
        Command::new(bin)
            .args(["verify", "hold3", "--p", "3", "--r", "3", "--samples", "300", "--seed", "42", "--format", format])
            .output()
            .map_err(err)
    };
    for format in ["json", "csv"] {
        let a = run(format)?;
        let b = run(format)?;
        if !a.status.success() {
            return Err(format!("verify exited with {:?}: {}", a.status, String::from_utf8_lossy(&a.stderr)));
        }
        if a.stdout != b.stdout || a.stdout.is_empty() {
            return Err(format!("{format} reports differ"));
        }
    }
    Ok("json and csv byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed-form constants", closed_form_constants),
        ("structural roots", structural_roots),
        ("numeric vs closed-form constants", numeric_cross_checks),
        ("asymptotics", asymptotics),
        ("Bellman majorization and oracle", majorization_and_oracle),
        ("inequality validity and sharpness", inequality_validity),
        ("witness degeneration", witness_degeneration),
        ("endpoint constants", endpoint_constants),
        ("geometric inequalities", geometric_inequalities),
        ("supporting-plane certificates", certificates),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
