use std::fs::File;
use std::io::BufWriter;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use notrade::empirics::{implied_row, parse_rows, ImpliedRow};
use notrade::policy::{expansions, finite_horizon_bounds, policy_report, universal_relation};
use notrade::sim::{combined_digest, write_trades};
use notrade::{
    estimate_horizon_esr, estimate_turnover, local_time_rates, simulate, solve_gap, validate, Error,
    InitialPosition, MarketSpec, SimConfig, ValidatedSpec,
};

use crate::args::{BoundsArgs, Clock, ImpliedArgs, MarketArgs, Position, Range, Scale, SimulateArgs, SweepArgs};
use crate::output::{Cell, Output, RunManifest, Table};

#[derive(Debug)]
pub enum CliError {
    Domain(Error),
    EmptyGrid,
    Io(String),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.name(),
            CliError::EmptyGrid => "EmptyGrid",
            CliError::Io(_) => "Io",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::EmptyGrid => f.write_str("the requested grid has no points"),
            CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn payload(entries: Vec<(&str, Value)>) -> Map<String, Value> {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn market(m: &MarketArgs) -> Result<ValidatedSpec> {
    Ok(validate(MarketSpec::new(m.r, m.mu, m.sigma, m.gamma, m.eps))?)
}

fn ratio_row(name: &str, v: f64) -> Vec<Cell> {
    vec![name.into(), v.into()]
}

pub fn solve(args: &MarketArgs) -> Result<Output> {
    let spec = market(args)?;
    let gap = solve_gap(&spec)?;
    let rep = policy_report(&gap);
    let uni = universal_relation(&gap);
    let mut t = Table::new(&["quantity", "value"]);
    t.push(vec!["case".into(), gap.case.as_str().into()]);
    for (name, v) in [
        ("lambda", gap.lambda),
        ("pi_minus", gap.pi_minus),
        ("pi_plus", gap.pi_plus),
        ("merton_fraction", spec.merton_fraction()),
        ("l", gap.l),
        ("u", gap.u),
        ("log_u_over_l", gap.log_ratio),
        ("esr", rep.esr),
        ("frictionless_esr", spec.frictionless_esr()),
        ("lip", rep.lip),
        ("ltime_buy", rep.ltime_buy),
        ("ltime_sell", rep.ltime_sell),
        ("share_turnover", rep.share_turnover),
        ("wealth_turnover", rep.wealth_turnover),
        ("lip_over_share_side", uni.share_ratio),
        ("esr_loss_over_wealth_side", uni.wealth_ratio),
        ("residual", gap.residual),
    ] {
        t.push(ratio_row(name, v));
    }
    Ok(Output {
        manifest: RunManifest::new("solve", args, None),
        table: t,
        payload: payload(vec![
            ("solution", to_value(&gap)),
            ("policy", to_value(&rep)),
            ("universal", to_value(&uni)),
        ]),
    })
}

pub fn grid(range: &Range, scale: Scale) -> Result<Vec<f64>> {
    let n = range.count;
    if n == 0 {
        return Err(CliError::EmptyGrid);
    }
    if n == 1 {
        return Ok(vec![range.from]);
    }
    let (a, b) = (range.from, range.to);
    let at = |i: usize| i as f64 / (n - 1) as f64;
    let mut pts: Vec<f64> = match scale {
        Scale::Linear => (0..n).map(|i| a + (b - a) * at(i)).collect(),
        Scale::Log => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidConfig(format!("log grid needs positive ends, got {range}")).into());
            }
            let (la, lb) = (a.ln(), b.ln());
            (0..n).map(|i| (la + (lb - la) * at(i)).exp()).collect()
        }
        Scale::Cubic => {
            let (ca, cb) = (a.cbrt(), b.cbrt());
            (0..n).map(|i| (ca + (cb - ca) * at(i)).powi(3)).collect()
        }
    };
    // keep the requested endpoints exact
    pts[0] = a;
    pts[n - 1] = b;
    Ok(pts)
}

/// One grid point of a sweep. Failed points keep their parameters and
/// status and carry NaN elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub gamma: f64,
    pub status: String,
    pub case: String,
    #[serde(with = "notrade::serde_float")]
    pub lambda: f64,
    #[serde(with = "notrade::serde_float")]
    pub pi_minus: f64,
    #[serde(with = "notrade::serde_float")]
    pub pi_plus: f64,
    #[serde(with = "notrade::serde_float")]
    pub esr: f64,
    #[serde(with = "notrade::serde_float")]
    pub lip: f64,
    #[serde(with = "notrade::serde_float")]
    pub ltime_buy: f64,
    #[serde(with = "notrade::serde_float")]
    pub ltime_sell: f64,
    #[serde(with = "notrade::serde_float")]
    pub share_turnover: f64,
    #[serde(with = "notrade::serde_float")]
    pub wealth_turnover: f64,
    #[serde(with = "notrade::serde_float")]
    pub share_ratio: f64,
    #[serde(with = "notrade::serde_float")]
    pub wealth_ratio: f64,
    #[serde(with = "notrade::serde_float")]
    pub exp_gap: f64,
    #[serde(with = "notrade::serde_float")]
    pub exp_esr: f64,
    #[serde(with = "notrade::serde_float")]
    pub exp_lip: f64,
    #[serde(with = "notrade::serde_float")]
    pub exp_pi_minus: f64,
    #[serde(with = "notrade::serde_float")]
    pub exp_pi_plus: f64,
    #[serde(with = "notrade::serde_float")]
    pub exp_share_turnover: f64,
    #[serde(with = "notrade::serde_float")]
    pub exp_wealth_turnover: f64,
}

const SWEEP_COLUMNS: [&str; 22] = [
    "epsilon",
    "gamma",
    "status",
    "case",
    "lambda",
    "pi_minus",
    "pi_plus",
    "esr",
    "lip",
    "ltime_buy",
    "ltime_sell",
    "share_turnover",
    "wealth_turnover",
    "share_ratio",
    "wealth_ratio",
    "exp_gap",
    "exp_esr",
    "exp_lip",
    "exp_pi_minus",
    "exp_pi_plus",
    "exp_share_turnover",
    "exp_wealth_turnover",
];

impl SweepRow {
    fn failed(epsilon: f64, gamma: f64, status: &str) -> Self {
        let nan = f64::NAN;
        SweepRow {
            epsilon,
            gamma,
            status: status.to_string(),
            case: String::new(),
            lambda: nan,
            pi_minus: nan,
            pi_plus: nan,
            esr: nan,
            lip: nan,
            ltime_buy: nan,
            ltime_sell: nan,
            share_turnover: nan,
            wealth_turnover: nan,
            share_ratio: nan,
            wealth_ratio: nan,
            exp_gap: nan,
            exp_esr: nan,
            exp_lip: nan,
            exp_pi_minus: nan,
            exp_pi_plus: nan,
            exp_share_turnover: nan,
            exp_wealth_turnover: nan,
        }
    }

    fn cells(&self) -> Vec<Cell> {
        let mut v: Vec<Cell> = vec![
            self.epsilon.into(),
            self.gamma.into(),
            self.status.as_str().into(),
            self.case.as_str().into(),
        ];
        v.extend(
            [
                self.lambda,
                self.pi_minus,
                self.pi_plus,
                self.esr,
                self.lip,
                self.ltime_buy,
                self.ltime_sell,
                self.share_turnover,
                self.wealth_turnover,
                self.share_ratio,
                self.wealth_ratio,
                self.exp_gap,
                self.exp_esr,
                self.exp_lip,
                self.exp_pi_minus,
                self.exp_pi_plus,
                self.exp_share_turnover,
                self.exp_wealth_turnover,
            ]
            .map(Cell::Num),
        );
        v
    }
}

fn sweep_point(r: f64, mu: f64, sigma: f64, gamma: f64, eps: f64) -> SweepRow {
    let spec = match validate(MarketSpec::new(r, mu, sigma, gamma, eps)) {
        Ok(s) => s,
        Err(e) => return SweepRow::failed(eps, gamma, e.name()),
    };
    let exp = expansions(&spec, eps);
    let mut row = match solve_gap(&spec) {
        Ok(gap) => {
            let rep = policy_report(&gap);
            let uni = universal_relation(&gap);
            SweepRow {
                status: "ok".into(),
                case: gap.case.as_str().into(),
                lambda: gap.lambda,
                pi_minus: rep.pi_minus,
                pi_plus: rep.pi_plus,
                esr: rep.esr,
                lip: rep.lip,
                ltime_buy: rep.ltime_buy,
                ltime_sell: rep.ltime_sell,
                share_turnover: rep.share_turnover,
                wealth_turnover: rep.wealth_turnover,
                share_ratio: uni.share_ratio,
                wealth_ratio: uni.wealth_ratio,
                ..SweepRow::failed(eps, gamma, "ok")
            }
        }
        Err(e) => SweepRow::failed(eps, gamma, e.name()),
    };
    row.exp_gap = exp.gap;
    row.exp_esr = exp.esr;
    row.exp_lip = exp.lip;
    row.exp_pi_minus = exp.pi_minus;
    row.exp_pi_plus = exp.pi_plus;
    row.exp_share_turnover = exp.share_turnover;
    row.exp_wealth_turnover = exp.wealth_turnover;
    row
}

pub fn sweep(args: &SweepArgs) -> Result<Output> {
    let rows: Vec<SweepRow> = match (&args.eps_range, &args.gamma_range) {
        (Some(range), _) => {
            let gamma = args.gamma.expect("clap requires --gamma with --eps-range");
            grid(range, args.scale)?
                .into_iter()
                .map(|eps| sweep_point(args.r, args.mu, args.sigma, gamma, eps))
                .collect()
        }
        (None, Some(range)) => {
            let eps = args.eps.expect("clap requires --eps with --gamma-range");
            grid(range, args.scale)?
                .into_iter()
                .map(|gamma| sweep_point(args.r, args.mu, args.sigma, gamma, eps))
                .collect()
        }
        (None, None) => unreachable!("clap requires one range"),
    };
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in &rows {
        t.push(r.cells());
    }
    Ok(Output {
        manifest: RunManifest::new("sweep", args, None),
        table: t,
        payload: payload(vec![("rows", to_value(&rows))]),
    })
}

pub fn expand(args: &MarketArgs) -> Result<Output> {
    let spec = market(args)?;
    let gap = solve_gap(&spec)?;
    let rep = policy_report(&gap);
    let exp = expansions(&spec, spec.epsilon());
    let mut t = Table::new(&["quantity", "exact", "expansion", "difference"]);
    for (name, exact, approx) in [
        ("lambda", rep.gap, exp.gap),
        ("esr", rep.esr, exp.esr),
        ("lip", rep.lip, exp.lip),
        ("pi_minus", rep.pi_minus, exp.pi_minus),
        ("pi_plus", rep.pi_plus, exp.pi_plus),
        ("share_turnover", rep.share_turnover, exp.share_turnover),
        ("wealth_turnover", rep.wealth_turnover, exp.wealth_turnover),
    ] {
        t.push(vec![name.into(), exact.into(), approx.into(), (exact - approx).into()]);
    }
    Ok(Output {
        manifest: RunManifest::new("expand", args, None),
        table: t,
        payload: payload(vec![("expansion", to_value(&exp)), ("policy", to_value(&rep))]),
    })
}

/// Explicit position, or one unit of wealth split at the Merton weight
/// (all stock if that split would be levered).
fn start(p: &Position, spec: &ValidatedSpec) -> InitialPosition {
    match (p.xi0, p.xi) {
        (None, None) => {
            let w = spec.merton_fraction().min(1.0);
            InitialPosition::new(1.0 - w, w / p.s0, p.s0)
        }
        (a, b) => InitialPosition::new(a.unwrap_or(0.0), b.unwrap_or(0.0), p.s0),
    }
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<Output> {
    let spec = market(&args.market)?;
    let gap = solve_gap(&spec)?;
    let initial = start(&args.position, &spec);
    let cfg = match args.clock {
        Clock::Business => SimConfig::business_time(&spec, args.horizon, args.step, args.paths, args.seed),
        Clock::Calendar => SimConfig::new(args.horizon, args.step, args.paths, args.seed),
    }
    .with_trades(args.trades.is_some());
    let paths = simulate(&gap, &cfg, &initial)?;
    if let Some(path) = &args.trades {
        write_trades(&paths, BufWriter::new(File::create(path)?), b',')?;
    }
    let est = estimate_turnover(&paths);
    let rep = policy_report(&gap);
    let (lb, ls) = local_time_rates(&gap).unwrap_or((rep.ltime_buy, rep.ltime_sell));
    let esr = if spec.is_log_utility() {
        None
    } else {
        Some(estimate_horizon_esr(&paths, spec.gamma())?)
    };
    let bounds = finite_horizon_bounds(&gap, paths[0].horizon, &initial)?;
    let digest = format!("{:016x}", combined_digest(&paths));

    let mut t = Table::new(&["quantity", "estimate", "std_error", "closed_form", "rel_diff"]);
    let mut row = |name: &str, mean: f64, se: f64, exact: f64| {
        t.push(vec![name.into(), mean.into(), se.into(), exact.into(), (mean / exact - 1.0).into()]);
    };
    row("ltime_buy", est.ltime_buy.mean, est.ltime_buy.se, lb);
    row("ltime_sell", est.ltime_sell.mean, est.ltime_sell.se, ls);
    row("share_turnover", est.share.mean, est.share.se, rep.share_turnover);
    row("wealth_turnover", est.wealth.mean, est.wealth.se, rep.wealth_turnover);
    if let Some(e) = &esr {
        row("horizon_esr", e.value, e.se, bounds.long_run);
    }
    t.push(vec!["esr_lower_bound".into(), Cell::Empty, Cell::Empty, bounds.lower.into(), Cell::Empty]);
    t.push(vec!["esr_upper_bound".into(), Cell::Empty, Cell::Empty, bounds.upper.into(), Cell::Empty]);
    t.push(vec!["horizon_years".into(), paths[0].horizon.into(), Cell::Empty, Cell::Empty, Cell::Empty]);
    t.push(vec!["steps_per_path".into(), Cell::Int(cfg.steps() as u64), Cell::Empty, Cell::Empty, Cell::Empty]);
    t.push(vec!["digest".into(), digest.clone().into(), Cell::Empty, Cell::Empty, Cell::Empty]);

    Ok(Output {
        manifest: RunManifest::new("simulate", args, Some(args.seed)),
        table: t,
        payload: payload(vec![
            ("config", to_value(&cfg)),
            ("initial", to_value(&initial)),
            ("turnover", to_value(&est)),
            ("esr", to_value(&esr)),
            ("policy", to_value(&rep)),
            ("bounds", to_value(&bounds)),
            ("digest", json!(digest)),
        ]),
    })
}

pub fn bounds(args: &BoundsArgs) -> Result<Output> {
    let spec = market(&args.market)?;
    let gap = solve_gap(&spec)?;
    let initial = start(&args.position, &spec);
    let eps = spec.epsilon();
    let all = grid(&args.horizon_grid, Scale::Linear)?
        .into_iter()
        .map(|h| finite_horizon_bounds(&gap, h, &initial))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[
        "horizon",
        "lower",
        "upper",
        "long_run",
        "width",
        "shortfall",
        "shortfall_over_eps",
        "q_integral",
    ]);
    for b in &all {
        t.push(
            [
                b.horizon,
                b.lower,
                b.upper,
                b.long_run,
                b.width(),
                b.shortfall(),
                b.shortfall() / eps,
                b.q_integral,
            ]
            .map(Cell::Num)
            .to_vec(),
        );
    }
    Ok(Output {
        manifest: RunManifest::new("bounds", args, None),
        table: t,
        payload: payload(vec![("initial", to_value(&initial)), ("bounds", to_value(&all))]),
    })
}

pub fn implied(args: &ImpliedArgs) -> Result<Output> {
    let file = File::open(&args.file).map_err(|e| CliError::Io(format!("{}: {e}", args.file.display())))?;
    let rows: Vec<ImpliedRow> = parse_rows(file, args.periods_per_year)?.iter().map(implied_row).collect();
    let mut t = Table::new(&["period", "spread", "turnover", "implied_premium", "implied_premium_annual"]);
    for r in &rows {
        t.push(vec![
            r.period.as_str().into(),
            r.spread.into(),
            r.turnover.into(),
            r.implied_premium.into(),
            r.implied_premium_annual.into(),
        ]);
    }
    Ok(Output {
        manifest: RunManifest::new("implied", args, None),
        table: t,
        payload: payload(vec![("rows", to_value(&rows))]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let r = |from, to, count| Range { from, to, count };
        let g = grid(&r(1e-4, 1e-1, 4), Scale::Log).unwrap();
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[3], 1e-1);
        assert!((g[1] - 1e-3).abs() < 1e-15);
        let g = grid(&r(0.0, 8.0, 3), Scale::Cubic).unwrap();
        assert_eq!(g, vec![0.0, 1.0, 8.0]);
        assert_eq!(grid(&r(2.0, 3.0, 1), Scale::Linear).unwrap(), vec![2.0]);
        assert!(matches!(grid(&r(1.0, 2.0, 0), Scale::Linear), Err(CliError::EmptyGrid)));
        assert!(grid(&r(0.0, 1.0, 5), Scale::Log).is_err());
    }
}
