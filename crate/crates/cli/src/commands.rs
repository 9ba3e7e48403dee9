use holder_sharp::bellman::{Foliation, OmegaCPoint, OmegaDPoint};
use holder_sharp::constants::{
    c_star_numeric, c_star_pp, d_star_numeric_grid, d_star_pp, resolve, SharpConstant, DEFAULT_GRID,
};
use holder_sharp::roots::{RootResult, StructuralRoots, DEFAULT_TOL};
use holder_sharp::verify::{
    oracle_bellman_c, oracle_bellman_d, run_campaign, CampaignConfig, CampaignReport, Inequality, OracleResult,
};
use holder_sharp::{Error, Exponent, Result};
use serde::Serialize;

use crate::output::{fmt_f64, fmt_opt, to_csv, to_json, SCHEMA};
use crate::{BellmanArgs, BellmanKind, ConstantsArgs, FoliationArgs, Format, VerifyArgs, Which};

const ORACLE_ATOMS: usize = 4;

/// A rendered-on-demand command result.
pub struct Report {
    json: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Report {
    fn new<T: Serialize>(value: &T, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Result<Self> {
        let json = to_json(value).map_err(|e| Error::Domain(format!("cannot serialize report: {e}")))?;
        Ok(Self { json, header, rows })
    }

    pub fn render(&self, format: Format) -> std::result::Result<String, csv::Error> {
        match format {
            Format::Json => Ok(self.json.clone()),
            Format::Csv => to_csv(&self.header, &self.rows),
        }
    }
}

#[derive(Serialize)]
struct Roots {
    p: f64,
    r0: RootResult,
    s0: RootResult,
}

/// Structural roots for the larger exponent of `θ`, when it exceeds 2.
fn roots_for(theta: f64) -> Result<Option<Roots>> {
    let p = Exponent::new(theta)?.p;
    if p <= 2.0 {
        return Ok(None);
    }
    let roots = StructuralRoots::new(p, DEFAULT_TOL)?;
    Ok(Some(Roots { p, r0: roots.r0, s0: roots.s0 }))
}

#[derive(Serialize)]
struct ConstantsReport {
    schema: &'static str,
    command: &'static str,
    theta: f64,
    r: f64,
    c_star: Option<SharpConstant>,
    d_star: Option<SharpConstant>,
    c_star_numeric: Option<SharpConstant>,
    d_star_numeric: Option<SharpConstant>,
    roots: Option<Roots>,
}

pub fn constants(a: &ConstantsArgs) -> Result<(Report, u8)> {
    let grid = a.grid.unwrap_or(DEFAULT_GRID);
    let pair = resolve(a.theta, a.r, grid)?;
    let exp = Exponent::new(a.theta)?;
    let diagonal = exp.theta_is_p() && a.theta > 2.0 && (a.r - a.theta).abs() <= 1e-12 * a.theta;
    let (c_num, d_num) = if diagonal {
        (Some(c_star_numeric(a.theta, a.r, grid)?), Some(d_star_numeric_grid(a.theta, grid)?))
    } else {
        (None, None)
    };
    let rep = ConstantsReport {
        schema: SCHEMA,
        command: "constants",
        theta: a.theta,
        r: a.r,
        c_star: pair.c_star,
        d_star: pair.d_star,
        c_star_numeric: c_num,
        d_star_numeric: d_num,
        roots: roots_for(a.theta)?,
    };
    let regime = |c: &Option<SharpConstant>| {
        c.map(|c| serde_json::to_value(c.regime).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
            .unwrap_or_default()
    };
    let row = vec![
        fmt_f64(a.theta),
        fmt_f64(a.r),
        fmt_opt(rep.c_star.map(|c| c.value)),
        regime(&rep.c_star),
        fmt_opt(rep.d_star.map(|c| c.value)),
        regime(&rep.d_star),
        fmt_opt(rep.c_star_numeric.map(|c| c.value)),
        fmt_opt(rep.d_star_numeric.map(|c| c.value)),
        fmt_opt(rep.roots.as_ref().map(|r| r.r0.value)),
        fmt_opt(rep.roots.as_ref().map(|r| r.r0.residual)),
        fmt_opt(rep.roots.as_ref().map(|r| r.s0.value)),
        fmt_opt(rep.roots.as_ref().map(|r| r.s0.residual)),
    ];
    let header = vec![
        "theta",
        "r",
        "c_star",
        "c_regime",
        "d_star",
        "d_regime",
        "c_star_numeric",
        "d_star_numeric",
        "r0",
        "r0_residual",
        "s0",
        "s0_residual",
    ];
    Ok((Report::new(&rep, header, vec![row])?, 0))
}

#[derive(Serialize)]
struct BellmanReport {
    schema: &'static str,
    command: &'static str,
    kind: &'static str,
    p: f64,
    x: Vec<f64>,
    value: f64,
    /// Whether the point lies in the closed-form region (c± only).
    closed_form: Option<bool>,
    /// Chord through the point (through its mirror image for c- and d-).
    r: Option<f64>,
    tau: Option<f64>,
    a1: Option<f64>,
    a2: Option<f64>,
    inversion_residual: Option<f64>,
    oracle: Option<OracleResult>,
    roots: Option<Roots>,
}

fn check_config(tol: f64, samples: usize) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidRegime(format!("tolerance must be positive, got {tol}")));
    }
    if samples == 0 {
        return Err(Error::InvalidRegime("samples must be at least 1".into()));
    }
    Ok(())
}

pub fn bellman(a: &BellmanArgs) -> Result<(Report, u8)> {
    check_config(a.tol, a.samples)?;
    let fol = Foliation::with_tol(a.p, a.tol)?;
    let x = &a.x;
    let minus = matches!(a.kind, BellmanKind::CMinus | BellmanKind::DMinus);
    let sign = if minus { -1.0 } else { 1.0 };
    let (kind, value, closed_form, chord, residual, oracle) = match a.kind {
        BellmanKind::CPlus | BellmanKind::CMinus => {
            let pt = OmegaCPoint::new(sign * x[0], x[1], x[2], x[3]);
            let ev = fol.c_plus(&pt)?;
            let oracle = if a.oracle {
                let o = oracle_bellman_c(&pt, a.p, ORACLE_ATOMS, a.samples, a.seed)?;
                Some(OracleResult { value: sign * o.value, ..o })
            } else {
                None
            };
            let kind = if minus { "c-" } else { "c+" };
            (kind, sign * ev.value, Some(ev.closed_form), (ev.r, ev.tau, ev.a1, ev.a2), None, oracle)
        }
        BellmanKind::DPlus | BellmanKind::DMinus => {
            let pt = OmegaDPoint::new(x[0], x[1], x[2], sign * x[3]);
            let ev = fol.d_plus(&pt)?;
            let oracle = if a.oracle {
                let o = oracle_bellman_d(&pt, a.p, ORACLE_ATOMS, a.samples, a.seed)?;
                Some(OracleResult { value: sign * o.value, ..o })
            } else {
                None
            };
            let kind = if minus { "d-" } else { "d+" };
            (kind, sign * ev.value, None, (ev.r, ev.tau, ev.a1, ev.a2), Some(ev.residual), oracle)
        }
    };
    let rep = BellmanReport {
        schema: SCHEMA,
        command: "bellman",
        kind,
        p: a.p,
        x: x.clone(),
        value,
        closed_form,
        r: chord.0,
        tau: chord.1,
        a1: chord.2,
        a2: chord.3,
        inversion_residual: residual,
        oracle,
        roots: Some(Roots { p: a.p, r0: fol.roots.r0, s0: fol.roots.s0 }),
    };
    let coords = if rep.closed_form.is_some() { ["x1", "x2", "x3", "x4"] } else { ["x1", "x3", "x4", "x5"] };
    let mut header = vec!["kind", "p"];
    header.extend(coords);
    header.extend(["value", "closed_form", "R", "tau", "a1", "a2", "oracle"]);
    let mut row = vec![kind.to_string(), fmt_f64(a.p)];
    row.extend(x.iter().map(|v| fmt_f64(*v)));
    row.extend([
        fmt_f64(value),
        closed_form.map(|b| b.to_string()).unwrap_or_default(),
        fmt_opt(rep.r),
        fmt_opt(rep.tau),
        fmt_opt(rep.a1),
        fmt_opt(rep.a2),
        fmt_opt(oracle.map(|o| o.value)),
    ]);
    Ok((Report::new(&rep, header, vec![row])?, 0))
}

#[derive(Serialize)]
struct FoliationRow {
    kind: &'static str,
    #[serde(rename = "R")]
    r: f64,
    tau: f64,
    y1: f64,
    y2: f64,
}

#[derive(Serialize)]
struct FoliationReport {
    schema: &'static str,
    command: &'static str,
    p: f64,
    r0: RootResult,
    s0: RootResult,
    rows: Vec<FoliationRow>,
}

pub fn foliation(a: &FoliationArgs) -> Result<(Report, u8)> {
    if a.grid < 1 {
        return Err(Error::Domain("grid must be at least 1".into()));
    }
    let fol = Foliation::new(a.p)?;
    let r0 = fol.r0();
    let n = a.grid;
    let taus: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let mut rows = Vec::new();
    for &tau in &taus {
        let (y1, y2) = fol.eta(tau, r0)?;
        rows.push(FoliationRow { kind: "eta_minus", r: r0, tau, y1, y2 });
    }
    for &tau in &taus {
        let (y1, y2) = fol.eta(tau, r0)?;
        rows.push(FoliationRow { kind: "eta_plus", r: r0, tau, y1: -y1, y2: -y2 });
    }
    for j in 0..=n {
        let r = -1.0 + 2.0 * j as f64 / n as f64;
        for &tau in &taus {
            let (y1, y2) = fol.eta(tau, r)?;
            rows.push(FoliationRow { kind: "chord", r, tau, y1, y2 });
        }
    }
    let csv_rows = rows
        .iter()
        .map(|r| vec![r.kind.to_string(), fmt_f64(r.r), fmt_f64(r.tau), fmt_f64(r.y1), fmt_f64(r.y2)])
        .collect();
    let rep =
        FoliationReport { schema: SCHEMA, command: "foliation", p: a.p, r0: fol.roots.r0, s0: fol.roots.s0, rows };
    Ok((Report::new(&rep, vec!["kind", "R", "tau", "y1", "y2"], csv_rows)?, 0))
}

#[derive(Serialize)]
struct VerifyReport {
    schema: &'static str,
    command: &'static str,
    /// `user`, or the regime of the sharp constant used.
    constant_source: String,
    #[serde(flatten)]
    campaign: CampaignReport,
    roots: Option<Roots>,
}

fn regime_name(c: &SharpConstant) -> String {
    serde_json::to_value(c.regime).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

pub fn verify(a: &VerifyArgs) -> Result<(Report, u8)> {
    check_config(1.0, a.samples)?;
    let (inequality, user) = match a.which {
        Which::Hold3 => (Inequality::Hold3, a.c),
        Which::Hold4 => (Inequality::Hold4, a.d),
    };
    if (a.which == Which::Hold3 && a.d.is_some()) || (a.which == Which::Hold4 && a.c.is_some()) {
        return Err(Error::InvalidRegime("use --c with hold3 and --d with hold4".into()));
    }
    let (constant, source) = match user {
        Some(v) => (v, "user".to_string()),
        None => {
            let exp = Exponent::new(a.theta)?;
            let sharp = if exp.theta_is_p() && exp.theta > 2.0 && a.r == a.theta {
                match inequality {
                    Inequality::Hold3 => Some(c_star_pp(a.theta)?),
                    Inequality::Hold4 => Some(d_star_pp(a.theta)?),
                }
            } else {
                let pair = resolve(a.theta, a.r, a.grid.unwrap_or(DEFAULT_GRID))?;
                match inequality {
                    Inequality::Hold3 => pair.c_star,
                    Inequality::Hold4 => pair.d_star,
                }
            };
            let sharp = sharp.ok_or_else(|| {
                Error::InvalidRegime(format!(
                    "no sharp constant is known for θ = {}, r = {}; pass --c or --d",
                    a.theta, a.r
                ))
            })?;
            (sharp.value, regime_name(&sharp))
        }
    };
    let config = CampaignConfig { inequality, theta: a.theta, r: a.r, constant, samples: a.samples, seed: a.seed };
    let campaign = run_campaign(&config)?;
    let code = if campaign.violations > 0 { 1 } else { 0 };
    let row = vec![
        match inequality {
            Inequality::Hold3 => "hold3".to_string(),
            Inequality::Hold4 => "hold4".to_string(),
        },
        fmt_f64(a.theta),
        fmt_f64(a.r),
        fmt_f64(constant),
        source.clone(),
        a.samples.to_string(),
        a.seed.to_string(),
        campaign.violations.to_string(),
        fmt_f64(campaign.min_slack),
        fmt_f64(campaign.median_slack),
        fmt_f64(campaign.near_extremal_slack),
    ];
    let header = vec![
        "inequality",
        "theta",
        "r",
        "constant",
        "constant_source",
        "samples",
        "seed",
        "violations",
        "min_slack",
        "median_slack",
        "near_extremal_slack",
    ];
    let rep = VerifyReport {
        schema: SCHEMA,
        command: "verify",
        constant_source: source,
        campaign,
        roots: roots_for(a.theta)?,
    };
    Ok((Report::new(&rep, header, vec![row])?, code))
}
