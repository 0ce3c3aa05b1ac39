use serde::{Deserialize, Serialize};

use super::SimPath;
use crate::numerics::mean_and_se;
use crate::{Error, Result};

/// Cross-path mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    fn of(xs: &[f64]) -> Self {
        let (mean, se) = mean_and_se(xs);
        Estimate { mean, se }
    }
}

/// Long-run rates per calendar year, averaged over paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnoverEstimate {
    pub ltime_buy: Estimate,
    pub ltime_sell: Estimate,
    pub share: Estimate,
    pub wealth: Estimate,
    pub paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsrEstimate {
    pub horizon: f64,
    pub value: f64,
    /// Delta-method standard error.
    pub se: f64,
    pub paths: usize,
}

/// Per-path totals divided by the horizon, then averaged. The initial trade
/// is not counted.
pub fn estimate_turnover(paths: &[SimPath]) -> TurnoverEstimate {
    let per = |f: fn(&SimPath) -> f64| -> Estimate {
        let xs: Vec<f64> = paths.iter().map(|p| f(p) / p.horizon).collect();
        Estimate::of(&xs)
    };
    TurnoverEstimate {
        ltime_buy: per(|p| p.local_buy),
        ltime_sell: per(|p| p.local_sell),
        share: per(|p| p.share_traded),
        wealth: per(|p| p.wealth_traded),
        paths: paths.len(),
    }
}

/// `(1 / (T (1 - gamma))) log mean(Xi_T^(1 - gamma))` over terminal
/// liquidation values, evaluated in log space.
pub fn estimate_horizon_esr(paths: &[SimPath], gamma: f64) -> Result<EsrEstimate> {
    if (gamma - 1.0).abs() < 1e-12 {
        return Err(Error::DegenerateUtility("gamma = 1 has no power certainty equivalent".into()));
    }
    if paths.is_empty() {
        return Err(Error::DegenerateUtility("no paths".into()));
    }
    if let Some(p) = paths.iter().find(|p| !p.log_liquidation.is_finite()) {
        return Err(Error::DegenerateUtility(format!(
            "path {} ends with nonpositive liquidation value",
            p.index
        )));
    }
    let horizon = paths[0].horizon;
    let a = 1.0 - gamma;
    let logs: Vec<f64> = paths.iter().map(|p| a * p.log_liquidation).collect();
    let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = logs.iter().map(|v| (v - shift).exp()).collect();
    let (mean, se) = mean_and_se(&scaled);
    Ok(EsrEstimate {
        horizon,
        value: (shift + mean.ln()) / (a * horizon),
        se: se / mean / (a.abs() * horizon),
        paths: paths.len(),
    })
}
