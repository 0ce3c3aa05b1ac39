//! Monte Carlo of the optimal policy: the reflected state process, its local
//! times at the two boundaries, the implied trades in both assets, and
//! path-wise liquidation values.
//!
//! Each path draws from its own ChaCha8 stream (`seed`, stream = path index),
//! so results do not depend on the number of worker threads or on how many
//! other paths are run.

mod engine;
mod estimate;
mod ledger;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gap::GapSolution;
use crate::model::ValidatedSpec;
use crate::{Error, Result};

pub use crate::shadow::InitialPosition;
pub use estimate::{estimate_horizon_esr, estimate_turnover, Estimate, EsrEstimate, TurnoverEstimate};
pub use ledger::{write_trades, Side, TradeRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Calendar years.
    pub horizon: f64,
    /// Calendar years.
    pub step: f64,
    pub paths: usize,
    pub seed: u64,
    /// Keep a per-trade ledger on every path. Turnover totals are always
    /// accumulated; this only controls whether individual trades are kept.
    pub record_trades: bool,
    /// Keep every `n`-th state as a [`SamplePoint`]; 0 keeps none.
    pub record_every: usize,
}

impl SimConfig {
    pub fn new(horizon: f64, step: f64, paths: usize, seed: u64) -> Self {
        Self {
            horizon,
            step,
            paths,
            seed,
            record_trades: false,
            record_every: 0,
        }
    }

    /// Horizon and step given in business time `sigma^2 t`.
    pub fn business_time(spec: &ValidatedSpec, horizon: f64, step: f64, paths: usize, seed: u64) -> Self {
        let s2 = spec.sigma2();
        Self::new(horizon / s2, step / s2, paths, seed)
    }

    pub fn with_trades(self, record_trades: bool) -> Self {
        Self { record_trades, ..self }
    }

    pub fn with_series(self, record_every: usize) -> Self {
        Self { record_every, ..self }
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.step).round() as usize
    }

    fn check(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.step.is_finite()
            && self.horizon.is_finite()
            && self.horizon >= self.step
            && self.paths >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "need step > 0, horizon >= step and paths >= 1, got {self:?}"
            )))
        }
    }
}

/// Snapshot of one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub t: f64,
    pub y: f64,
    pub local_buy: f64,
    pub local_sell: f64,
    pub shares: f64,
    pub safe_units: f64,
    /// Ask price.
    pub price: f64,
    /// Liquidation value: safe account plus shares at the bid.
    pub liquidation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPath {
    pub index: usize,
    pub horizon: f64,
    pub steps: usize,
    /// State right after the initial trade.
    pub y0: f64,
    pub y_final: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Local time accumulated at the buy boundary.
    pub local_buy: f64,
    /// Local time accumulated at the sell boundary.
    pub local_sell: f64,
    /// Sum of shares traded over shares held, excluding the initial trade.
    pub share_traded: f64,
    /// Sum of wealth traded over wealth held, excluding the initial trade.
    pub wealth_traded: f64,
    pub buys: u64,
    pub sells: u64,
    /// Log of the terminal liquidation value.
    pub log_liquidation: f64,
    pub initial_trade: Option<TradeRecord>,
    pub trades: Vec<TradeRecord>,
    pub series: Vec<SamplePoint>,
    /// FNV-1a digest of the path summary, for reproducibility checks.
    pub digest: u64,
}

/// Simulates `cfg.paths` independent paths of the optimal policy starting
/// from `initial`, in parallel.
pub fn simulate(gap: &GapSolution, cfg: &SimConfig, initial: &InitialPosition) -> Result<Vec<SimPath>> {
    cfg.check()?;
    let setup = engine::Setup::new(gap, cfg, initial)?;
    Ok((0..cfg.paths)
        .into_par_iter()
        .map(|i| setup.run(i))
        .collect())
}

/// Digest over a set of paths, in path order.
pub fn combined_digest(paths: &[SimPath]) -> u64 {
    let mut h = engine::Fnv::new();
    for p in paths {
        h.write_u64(p.digest);
    }
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::solve_gap;
    use crate::model::{validate, MarketSpec};
    use crate::policy::local_time_rates;

    fn gap(mu: f64, sigma: f64, gamma: f64, eps: f64) -> GapSolution {
        solve_gap(&validate(MarketSpec::new(0.0, mu, sigma, gamma, eps)).unwrap()).unwrap()
    }

    fn reference() -> GapSolution {
        gap(0.08, 0.16, 5.0, 0.01)
    }

    #[test]
    fn state_stays_in_interval() {
        for g in [reference(), gap(0.08, 0.16, 2.0, 0.01)] {
            let cfg = SimConfig::new(50.0, 1e-3, 4, 1);
            let (lo, hi) = g.interval();
            for p in simulate(&g, &cfg, &InitialPosition::cash()).unwrap() {
                assert!(p.y_min >= lo - 1e-12 && p.y_max <= hi + 1e-12, "{p:?}");
                assert!(p.local_buy > 0.0 && p.local_sell > 0.0);
                assert!(p.buys > 0 && p.sells > 0);
            }
        }
    }

    #[test]
    fn deterministic_and_independent_of_path_count() {
        let g = reference();
        let cfg = SimConfig::new(20.0, 1e-3, 4, 42);
        let a = simulate(&g, &cfg, &InitialPosition::cash()).unwrap();
        let b = simulate(&g, &cfg, &InitialPosition::cash()).unwrap();
        assert_eq!(combined_digest(&a), combined_digest(&b));
        let more = simulate(&g, &SimConfig { paths: 9, ..cfg }, &InitialPosition::cash()).unwrap();
        assert_eq!(a[3].digest, more[3].digest);
        let other = simulate(&g, &SimConfig { seed: 43, ..cfg }, &InitialPosition::cash()).unwrap();
        assert_ne!(a[0].digest, other[0].digest);
    }

    #[test]
    fn unit_merton_never_trades() {
        let g = gap(0.08, 0.16, 3.125, 0.01);
        let cfg = SimConfig::new(10.0, 1e-3, 3, 5).with_trades(true).with_series(100);
        for p in simulate(&g, &cfg, &InitialPosition::cash()).unwrap() {
            assert_eq!((p.buys, p.sells), (0, 0));
            assert!(p.trades.is_empty());
            assert_eq!(p.share_traded, 0.0);
            assert_eq!(p.initial_trade.unwrap().side, Side::Buy);
            assert!(p.series.iter().all(|s| s.shares == 1.0 && s.safe_units == 0.0));
        }
    }

    #[test]
    fn deterministic_drift_pushes_into_sell_boundary() {
        // sigma tiny against mu - sigma^2/2, unlevered target, all-stock start
        let g = gap(0.01, 0.002, 5000.0, 0.01);
        assert!(g.orientation() > 0.0);
        let cfg = SimConfig::new(100.0, 1e-3, 2, 3);
        let drift = 0.01 - 0.5 * 0.002 * 0.002;
        for p in simulate(&g, &cfg, &InitialPosition::new(0.0, 1.0, 1.0)).unwrap() {
            assert_eq!(p.y0, g.log_ratio);
            let rate = p.local_sell / p.horizon;
            assert!((rate - drift).abs() < 0.05 * drift, "{rate} vs {drift}");
            assert_eq!(p.local_buy, 0.0);
        }
        let (_, closed) = local_time_rates(&g).unwrap();
        assert!((closed - drift).abs() < 1e-6 * drift);
    }

    #[test]
    fn coarse_step_is_rejected() {
        let g = reference();
        let limit = (g.log_ratio / 0.16f64).powi(2) / 16.0;
        let cfg = SimConfig::new(100.0, 1.1 * limit, 1, 0);
        assert!(matches!(
            simulate(&g, &cfg, &InitialPosition::cash()),
            Err(Error::StepTooCoarse { .. })
        ));
        assert!(simulate(&g, &SimConfig::new(1.0, 0.0, 1, 0), &InitialPosition::cash()).is_err());
        assert!(simulate(&g, &SimConfig::new(1.0, 0.1, 0, 0), &InitialPosition::cash()).is_err());
    }

    #[test]
    fn trades_are_self_financing() {
        for g in [reference(), gap(0.08, 0.16, 2.0, 0.01)] {
            let cfg = SimConfig::new(5.0, 1e-3, 2, 9).with_trades(true);
            for p in simulate(&g, &cfg, &InitialPosition::new(1.0, 0.5, 1.0)).unwrap() {
                let mut safe = p.initial_trade.map(|t| t.safe_after).unwrap_or(1.0);
                let mut shares = p.initial_trade.map(|t| t.shares_after).unwrap_or(0.5);
                assert!(!p.trades.is_empty());
                for tr in &p.trades {
                    // nothing moves between trades
                    assert!((tr.safe_before - safe).abs() <= 1e-9 * safe.abs().max(1.0), "{tr:?} vs {safe}");
                    let signed = match tr.side {
                        Side::Buy => tr.shares,
                        Side::Sell => -tr.shares,
                    };
                    assert!((tr.shares_after - (shares + signed)).abs() <= 1e-12 * shares);
                    // cash pays for purchases at the ask and receives the bid on sales
                    let change = tr.safe_after - tr.safe_before;
                    assert!((change + signed * tr.price).abs() <= 1e-9 * safe.abs().max(1.0), "{tr:?}");
                    safe = tr.safe_after;
                    shares = tr.shares_after;
                }
            }
        }
    }

    #[test]
    fn liquidation_series_is_positive() {
        let g = gap(0.08, 0.16, 2.0, 0.01);
        let cfg = SimConfig::new(20.0, 1e-3, 2, 11).with_series(50);
        for p in simulate(&g, &cfg, &InitialPosition::cash()).unwrap() {
            assert_eq!(p.series.len(), p.steps / 50);
            assert!(p.series.iter().all(|s| s.liquidation > 0.0 && s.safe_units < 0.0));
            let last = p.series.last().unwrap();
            assert!((last.liquidation.ln() - p.log_liquidation).abs() < 1e-9);
        }
    }

    #[test]
    fn ledger_dump() {
        let g = reference();
        let cfg = SimConfig::new(1.0, 1e-3, 1, 2).with_trades(true);
        let paths = simulate(&g, &cfg, &InitialPosition::cash()).unwrap();
        let mut out = Vec::new();
        write_trades(&paths, &mut out, b',').unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "path,time,side,shares,price,state");
        assert_eq!(lines.count(), paths[0].trades.len() + 1);
    }

    #[test]
    fn frictionless_esr_is_merton() {
        let g = gap(0.08, 0.16, 5.0, 0.0);
        let cfg = SimConfig::new(2.0, 1e-3, 2000, 17);
        let paths = simulate(&g, &cfg, &InitialPosition::cash()).unwrap();
        let est = estimate_horizon_esr(&paths, 5.0).unwrap();
        assert!((est.value - 0.025).abs() < 2.0 * est.se, "{est:?}");
        assert!(estimate_horizon_esr(&paths, 1.0).is_err());
    }
}
