use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "notrade", version, about = "Optimal trading with a bid-ask spread: gap, policy, bounds and simulation")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the gap and report the policy, welfare and volume.
    Solve(MarketArgs),
    /// Solve over a grid of spreads or risk aversions.
    Sweep(SweepArgs),
    /// Leading-order small-spread expansions next to the exact values.
    Expand(MarketArgs),
    /// Monte Carlo of the optimal policy.
    Simulate(SimulateArgs),
    /// Exact finite-horizon bounds over a grid of horizons.
    Bounds(BoundsArgs),
    /// Implied liquidity premium from a spread/turnover file.
    Implied(ImpliedArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MarketArgs {
    /// Expected excess return of the risky asset (per year).
    #[arg(long)]
    pub mu: f64,
    /// Volatility (per square-root year).
    #[arg(long)]
    pub sigma: f64,
    /// Relative risk aversion.
    #[arg(long)]
    pub gamma: f64,
    /// Relative bid-ask spread.
    #[arg(long)]
    pub eps: f64,
    /// Safe rate (per year).
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    /// Expected excess return of the risky asset (per year).
    #[arg(long)]
    pub mu: f64,
    /// Volatility (per square-root year).
    #[arg(long)]
    pub sigma: f64,
    /// Safe rate (per year).
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Fixed risk aversion (with --eps-range).
    #[arg(long, required_unless_present = "gamma_range")]
    pub gamma: Option<f64>,
    /// Fixed spread (with --gamma-range).
    #[arg(long, required_unless_present = "eps_range")]
    pub eps: Option<f64>,
    /// Spread grid `from:to:count`.
    #[arg(long, conflicts_with = "gamma_range", required_unless_present = "gamma_range")]
    pub eps_range: Option<Range>,
    /// Risk-aversion grid `from:to:count`.
    #[arg(long)]
    pub gamma_range: Option<Range>,
    /// Grid spacing; `cubic` is uniform in the cube root.
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub scale: Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Log,
    Linear,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clock {
    /// Horizon and step in variance units `sigma^2 t`.
    Business,
    /// Horizon and step in years.
    Calendar,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Position {
    /// Initial safe units (price 1). Defaults to the Merton split of one
    /// unit of wealth, or all stock if that split is levered.
    #[arg(long)]
    pub xi0: Option<f64>,
    /// Initial risky units.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Initial ask price.
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub market: MarketArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub position: Position,
    /// Number of independent paths.
    #[arg(long, default_value_t = 64)]
    pub paths: usize,
    /// Simulation horizon.
    #[arg(long)]
    pub horizon: f64,
    /// Time step.
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    /// Units of --horizon and --step.
    #[arg(long, value_enum, default_value_t = Clock::Business)]
    pub clock: Clock,
    /// Seed; path i uses stream i of this seed.
    #[arg(long)]
    pub seed: u64,
    /// Write the trade ledger to this file.
    #[arg(long)]
    pub trades: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub market: MarketArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub position: Position,
    /// Horizons in years, `from:to[:count]`, linear spacing.
    #[arg(long)]
    pub horizon_grid: Range,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ImpliedArgs {
    /// Comma- or tab-delimited file with period, spread and turnover columns.
    pub file: PathBuf,
    /// Periods per year used to annualize the premium.
    #[arg(long, default_value_t = 12.0)]
    pub periods_per_year: f64,
}

/// `from:to[:count]`; the count defaults to 20.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(format!("expected from:to[:count], got {s:?}"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        let count = match parts.get(2) {
            Some(c) => c.trim().parse::<usize>().map_err(|e| format!("{c:?}: {e}"))?,
            None => 20,
        };
        Ok(Range {
            from: num(parts[0])?,
            to: num(parts[1])?,
            count,
        })
    }
}

impl Serialize for Range {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::fmt::Display for Range {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.from, self.to, self.count)
    }
}
