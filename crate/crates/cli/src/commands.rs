//! One function per subcommand, each returning the table to emit.

use racap_core::channel::{ChannelModel, Prob, Snr};
use racap_core::numerics::binom_pmf_vec;
use racap_core::simulator::{simulate as run_sim, SlotSimConfig};
use racap_core::thresholds::{awgn_thresholds, bd_thresholds, poisson_thresholds};
use racap_core::throughput::{baseline_aloha_poisson, curve, uniform_grid, CurveKind};
use racap_core::two_user::{
    awgn_inner_contains, awgn_outer_contains, awgn_outer_vertices, bd_region_contains, bd_region_vertices,
    gap_report, AwgnPair, BdParams, RatePoint4,
};
use serde_json::json;

use crate::error::CliError;
use crate::table::{Cell, Table};
use crate::{GapArgs, ModelArg, RegionArgs, SimModelArg, SimulateArgs, ThresholdsArgs, ThroughputArgs};

/// Two-user gap bound `√3/2` plus slack.
pub const GAP_BOUND: f64 = 0.866_025_403_784_438_6 + 1e-9;

/// SNRs (dB) of the gap sweep: a log grid of powers from 0.1 to 10^4.
pub const GAP_SWEEP_DB: [f64; 11] = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];

const DECODE_SLACK: f64 = 1e-12;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require<T>(v: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("--{flag} is required for --model {model}")))
}

fn snr_from_db(db: f64) -> Result<Snr, CliError> {
    Ok(Snr::from_db(db)?)
}

fn model_name(m: ModelArg) -> &'static str {
    match m {
        ModelArg::Bd => "bd",
        ModelArg::Awgn => "awgn",
        ModelArg::Poisson => "poisson",
    }
}

fn reject<T>(v: &Option<T>, flag: &str, model: &str) -> Result<(), CliError> {
    match v {
        Some(_) => Err(usage(format!("--{flag} does not apply to --model {model}"))),
        None => Ok(()),
    }
}

pub fn thresholds(a: &ThresholdsArgs) -> Result<Table, CliError> {
    let name = model_name(a.model);
    let (table, axis) = match a.model {
        ModelArg::Bd => {
            reject(&a.snr_db, "snr-db", name)?;
            reject(&a.k_max, "k-max", name)?;
            (bd_thresholds(require(a.m, "m", name)?)?, "p")
        }
        ModelArg::Awgn => {
            reject(&a.k_max, "k-max", name)?;
            let m = require(a.m, "m", name)?;
            let snr = snr_from_db(require(a.snr_db, "snr-db", name)?)?;
            (awgn_thresholds(m, snr)?, "p")
        }
        ModelArg::Poisson => {
            reject(&a.m, "m", name)?;
            reject(&a.snr_db, "snr-db", name)?;
            (poisson_thresholds(require(a.k_max, "k-max", name)?)?, "lambda")
        }
    };
    let mut out = Table::new("thresholds", &["k", axis, "rate"]);
    out.param("model", name);
    if let Some(m) = a.m {
        out.param("m", m);
    }
    if let Some(db) = a.snr_db {
        out.param("snr_db", db);
    }
    if let Some(k) = a.k_max {
        out.param("k_max", k);
    }
    // Row k holds the right end of interval k and the rate used on it.
    for (i, &rate) in table.rates.iter().enumerate() {
        out.push(vec![(i as u32 + 1).into(), table.boundaries[i + 1].into(), rate.into()]);
    }
    Ok(out)
}

fn default_curves(model: ModelArg) -> Vec<&'static str> {
    match model {
        ModelArg::Bd => vec!["T", "ALOHA"],
        ModelArg::Awgn => vec!["T_lower", "T_upper", "CSI", "AD", "ML"],
        ModelArg::Poisson => vec!["T_poisson", "ALOHA"],
    }
}

fn allowed_curves(model: ModelArg) -> &'static [&'static str] {
    match model {
        ModelArg::Bd => &["T", "ALOHA"],
        ModelArg::Awgn => &["T_lower", "T_upper", "CSI", "AD", "ML", "ALOHA"],
        ModelArg::Poisson => &["T_poisson", "ALOHA"],
    }
}

fn kind_of(column: &str) -> CurveKind {
    CurveKind::ALL.into_iter().find(|k| k.column() == column).expect("allowed curve names are curve columns")
}

fn parse_curves(model: ModelArg, requested: &Option<Vec<String>>) -> Result<Vec<String>, CliError> {
    let Some(list) = requested else {
        return Ok(default_curves(model).into_iter().map(String::from).collect());
    };
    let names: Vec<String> = list.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(usage("--curves is empty"));
    }
    let allowed = allowed_curves(model);
    for (i, n) in names.iter().enumerate() {
        if !allowed.contains(&n.as_str()) {
            return Err(usage(format!(
                "curve {n:?} not available for --model {}; choose from {}",
                model_name(model),
                allowed.join(",")
            )));
        }
        if names[..i].contains(n) {
            return Err(usage(format!("curve {n:?} listed twice")));
        }
    }
    Ok(names)
}

pub fn throughput(a: &ThroughputArgs) -> Result<Table, CliError> {
    let name = model_name(a.model);
    if a.grid == 0 {
        return Err(usage("--grid must be at least 1"));
    }
    let curves = parse_curves(a.model, &a.curves)?;
    let (channel, m, axis, grid) = match a.model {
        ModelArg::Bd => {
            reject(&a.snr_db, "snr-db", name)?;
            (ChannelModel::Bd, require(a.m, "m", name)?, "p", uniform_grid(a.grid))
        }
        ModelArg::Awgn => {
            let m = require(a.m, "m", name)?;
            let snr = snr_from_db(require(a.snr_db, "snr-db", name)?)?;
            (ChannelModel::Awgn { snr }, m, "p", uniform_grid(a.grid))
        }
        ModelArg::Poisson => {
            reject(&a.m, "m", name)?;
            reject(&a.snr_db, "snr-db", name)?;
            if !(a.lambda_max > 0.0 && a.lambda_max.is_finite()) {
                return Err(usage("--lambda-max must be finite and > 0"));
            }
            let grid = uniform_grid(a.grid).into_iter().map(|x| x * a.lambda_max).collect();
            (ChannelModel::Bd, 0, "lambda", grid)
        }
    };

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(curves.len());
    let mut warning = false;
    for c in &curves {
        let values = if a.model == ModelArg::Poisson && c == "ALOHA" {
            grid.iter().map(|&l| baseline_aloha_poisson(l)).collect()
        } else {
            let cv = curve(kind_of(c), channel, m, &grid)?;
            warning |= cv.warning;
            cv.samples.into_iter().map(|s| s.1).collect()
        };
        columns.push(values);
    }

    let mut header = vec![axis];
    header.extend(curves.iter().map(String::as_str));
    let mut out = Table::new("throughput", &header);
    out.param("model", name);
    if a.model != ModelArg::Poisson {
        out.param("m", m);
    } else {
        out.param("lambda_max", a.lambda_max);
    }
    if let Some(db) = a.snr_db {
        out.param("snr_db", db);
    }
    out.param("grid", a.grid);
    if warning {
        out.param("warning", "upper bound uses the analytic vertex family beyond the LP size limit");
    }
    for (i, &x) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![x.into()];
        row.extend(columns.iter().map(|c| Cell::Num(c[i])));
        out.push(row);
    }
    Ok(out)
}

const POINT_COLUMNS: [&str; 4] = ["r1", "r2", "r12", "r22"];

fn point_cells(pt: RatePoint4) -> Vec<Cell> {
    pt.to_array().into_iter().map(Cell::Num).collect()
}

fn inside(v: bool) -> Cell {
    Cell::from(if v { "inside" } else { "outside" })
}

enum Region {
    Bd(BdParams),
    Awgn(AwgnPair),
}

pub fn region(a: &RegionArgs) -> Result<Table, CliError> {
    let region = match (a.n1, a.n2, a.snr1_db, a.snr2_db) {
        (Some(n1), Some(n2), None, None) => Region::Bd(BdParams::new(n1, n2)?),
        (None, None, Some(d1), Some(d2)) => {
            Region::Awgn(AwgnPair::new(snr_from_db(d1)?.get(), snr_from_db(d2)?.get())?)
        }
        _ => return Err(usage("give either --n1 and --n2, or --snr1-db and --snr2-db")),
    };
    if !a.vertices && a.check.is_none() {
        return Err(usage("give --vertices or --check r1,r2,r12,r22"));
    }
    let mut out;
    if a.vertices {
        let mut header = vec!["vertex"];
        header.extend(POINT_COLUMNS);
        out = Table::new("region", &header);
        let mut verts = match &region {
            Region::Bd(b) => bd_region_vertices(*b),
            Region::Awgn(p) => awgn_outer_vertices(*p),
        };
        // Degenerate parameters (n1 = n2, say) repeat vertices.
        let mut seen = Vec::with_capacity(verts.len());
        verts.retain(|v| {
            let fresh = !seen.contains(v);
            if fresh {
                seen.push(*v);
            }
            fresh
        });
        for (i, v) in verts.into_iter().enumerate() {
            let mut row = vec![Cell::from(i as u32 + 1)];
            row.extend(point_cells(v));
            out.push(row);
        }
    } else {
        let c = a.check.as_ref().expect("checked above");
        if c.len() != 4 || c.iter().any(|x| !x.is_finite()) {
            return Err(usage("--check takes four finite rates r1,r2,r12,r22"));
        }
        let pt = RatePoint4::new(c[0], c[1], c[2], c[3]);
        match &region {
            Region::Bd(b) => {
                let mut header = POINT_COLUMNS.to_vec();
                header.push("region");
                out = Table::new("region", &header);
                let mut row = point_cells(pt);
                row.push(inside(bd_region_contains(*b, pt)));
                out.push(row);
            }
            Region::Awgn(p) => {
                if a.beta_grid < 2 {
                    return Err(usage("--beta-grid must be at least 2"));
                }
                let mut header = POINT_COLUMNS.to_vec();
                header.extend(["outer", "inner"]);
                out = Table::new("region", &header);
                let mut row = point_cells(pt);
                row.push(inside(awgn_outer_contains(*p, pt)));
                row.push(inside(awgn_inner_contains(*p, pt, a.beta_grid)?));
                out.push(row);
            }
        }
    }
    match region {
        Region::Bd(b) => {
            out.param("model", "bd").param("n1", b.n1).param("n2", b.n2);
        }
        Region::Awgn(_) => {
            out.param("model", "awgn");
            out.param("snr1_db", a.snr1_db.expect("awgn region"));
            out.param("snr2_db", a.snr2_db.expect("awgn region"));
            if a.check.is_some() {
                out.param("beta_grid", a.beta_grid);
            }
        }
    }
    Ok(out)
}

pub fn gap(a: &GapArgs) -> Result<Table, CliError> {
    let pairs: Vec<(f64, f64)> = if a.sweep {
        GAP_SWEEP_DB
            .iter()
            .flat_map(|&d1| GAP_SWEEP_DB.iter().filter(move |&&d2| d2 <= d1).map(move |&d2| (d1, d2)))
            .collect()
    } else {
        vec![(a.snr1_db.expect("required by clap"), a.snr2_db.expect("required by clap"))]
    };
    let mut out = Table::new("gap", &["snr1_db", "snr2_db", "max_distance", "bound", "pass"]);
    out.param("sweep", a.sweep);
    for (d1, d2) in pairs {
        let pair = AwgnPair::new(snr_from_db(d1)?.get(), snr_from_db(d2)?.get())?;
        let d = gap_report(pair)?.max_distance;
        out.push(vec![d1.into(), d2.into(), d.into(), GAP_BOUND.into(), (d <= GAP_BOUND).into()]);
    }
    Ok(out)
}

/// Expected delivered bits per slot when every active user sends at `rate`.
fn fixed_rate_throughput(channel: &ChannelModel, m: u32, p: f64, rate: f64) -> f64 {
    binom_pmf_vec(u64::from(m), p)
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(k, _)| *k as f64 * rate <= channel.sum_capacity(*k as u32) * (1.0 + DECODE_SLACK))
        .map(|(k, w)| w * k as f64 * rate)
        .sum()
}

pub fn simulate(a: &SimulateArgs) -> Result<Table, CliError> {
    let channel = match a.model {
        SimModelArg::Bd => {
            reject(&a.snr_db, "snr-db", "bd")?;
            ChannelModel::Bd
        }
        SimModelArg::Awgn => ChannelModel::Awgn { snr: snr_from_db(require(a.snr_db, "snr-db", "awgn")?)? },
    };
    let p = Prob::new(a.p)?;
    let mut cfg = if a.rate == "auto" {
        SlotSimConfig::with_policy(channel, a.m, p, a.slots, a.seed)?
    } else {
        let r: f64 = a.rate.parse().map_err(|_| usage(format!("--rate must be `auto` or a number, got {:?}", a.rate)))?;
        SlotSimConfig::with_rate(channel, a.m, p, r, a.slots, a.seed)
    };
    cfg.batch_size = a.batch_size;
    let report = run_sim(&cfg)?;
    let analytic = match &cfg.rate {
        racap_core::RateChoice::Policy(policy) => policy.piecewise_throughput(p),
        racap_core::RateChoice::Fixed(r) => fixed_rate_throughput(&channel, a.m, a.p, *r),
    };

    let mut out = Table::new(
        "simulate",
        &["empirical_sum_rate", "std_error", "analytic", "collision_fraction", "rate", "n_slots", "seed"],
    );
    out.param("model", channel.name()).param("m", a.m).param("p", a.p).param("rate", &a.rate);
    if let Some(db) = a.snr_db {
        out.param("snr_db", db);
    }
    out.param("batch_size", a.batch_size);
    out.push(vec![
        report.empirical_sum_rate.into(),
        report.std_error.into(),
        analytic.into(),
        report.collision_fraction.into(),
        report.rate.into(),
        report.n_slots.into(),
        report.seed.into(),
    ]);
    out.extra.insert("histogram".into(), json!(report.histogram));
    Ok(out)
}

/// Turns a failed `pass` column into exit code 1.
pub fn verdict(table: &Table) -> Result<(), CliError> {
    let Some(i) = table.column("pass") else {
        return Ok(());
    };
    let failed = table.rows.iter().filter(|r| r[i] == Cell::from(false)).count();
    if failed > 0 {
        return Err(CliError::Internal(format!("{failed} gap check(s) exceeded the bound")));
    }
    Ok(())
}
