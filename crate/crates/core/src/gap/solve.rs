use serde::{Deserialize, Serialize};

use super::riccati::{no_trade_width, WFunction};
use super::series::{gap_series, SeriesOrder};
use crate::model::{classify, CaseTag, ValidatedSpec};
use crate::numerics::brent;
use crate::{Error, Result};

/// Required accuracy of the terminal condition `w(log(u/l)) = pi_+`.
pub const GAP_TOL: f64 = 1e-12;

const BRENT_XTOL: f64 = 1e-15;
const BRENT_MAX_ITER: usize = 200;
const LOCAL_SCAN: usize = 32;
const WIDE_SCAN: usize = 1000;

/// Solved gap and the trading boundaries it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSolution {
    pub spec: ValidatedSpec,
    pub lambda: f64,
    /// Buy boundary for the stock/cash ratio (ask prices).
    #[serde(with = "crate::serde_float")]
    pub l: f64,
    /// Sell boundary for the stock/cash ratio (ask prices).
    #[serde(with = "crate::serde_float")]
    pub u: f64,
    pub pi_minus: f64,
    pub pi_plus: f64,
    /// `log(u/l)`, the upper end of the no-trade region in the state variable.
    pub log_ratio: f64,
    pub case: CaseTag,
    pub residual: f64,
    pub iterations: usize,
}

impl GapSolution {
    pub fn w_function(&self) -> Result<WFunction> {
        WFunction::new(&self.spec, self.lambda)
    }

    /// `+1` when the no-trade region is `[0, log(u/l)]`, `-1` when it is
    /// `[log(u/l), 0]` (levered positions).
    pub fn orientation(&self) -> f64 {
        if self.log_ratio != 0.0 {
            self.log_ratio.signum()
        } else if self.spec.merton_fraction() > 1.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// No-trade region in the state variable, ordered.
    pub fn interval(&self) -> (f64, f64) {
        (self.log_ratio.min(0.0), self.log_ratio.max(0.0))
    }
}

/// `w(lambda, log(u/l)) - pi_+`; the gap is the root of this function.
pub fn boundary_residual(spec: &ValidatedSpec, lambda: f64) -> Result<f64> {
    let width = no_trade_width(spec, lambda)?;
    let w = WFunction::new(spec, lambda)?;
    Ok(w.eval_w(width)? - spec.pi_plus(lambda))
}

fn frictionless(spec: &ValidatedSpec) -> GapSolution {
    let p = spec.merton_fraction();
    let ratio = if spec.is_unit_merton() { f64::INFINITY } else { p / (1.0 - p) };
    GapSolution {
        spec: *spec,
        lambda: 0.0,
        l: ratio,
        u: ratio,
        pi_minus: p,
        pi_plus: p,
        log_ratio: 0.0,
        case: classify(spec, 0.0).unwrap_or_else(|_| CaseTag::from_parameters(spec)),
        residual: 0.0,
        iterations: 0,
    }
}

/// Largest gap the search considers: below `mu`, and short of the point
/// where one of the boundaries hits the all-stock weight.
fn lambda_max(spec: &ValidatedSpec) -> f64 {
    (0.95 * spec.mu()).min((1.0 - 1e-9) * (spec.gamma_sigma2() - spec.mu()).abs())
}

/// Solves for the gap. The search scans a bracket around the leading series
/// term for the first sign change of [`boundary_residual`], falls back to a
/// geometric scan of `(0, lambda_max]`, and polishes with Brent's method.
/// Sign changes produced by a pole rather than a root are skipped.
pub fn solve_gap(spec: &ValidatedSpec) -> Result<GapSolution> {
    if spec.epsilon() == 0.0 || spec.is_unit_merton() {
        return Ok(frictionless(spec));
    }
    let hi_cap = lambda_max(spec);
    let seed = gap_series(spec, SeriesOrder::First);
    let f = |x: f64| boundary_residual(spec, x).ok().filter(|v| v.is_finite());

    let lo = (0.5 * seed).min(0.5 * hi_cap);
    let hi = (4.0 * seed).min(hi_cap);
    let local: Vec<f64> = (0..=LOCAL_SCAN)
        .map(|i| lo + (hi - lo) * i as f64 / LOCAL_SCAN as f64)
        .collect();
    if let Some(sol) = first_root(spec, &local, &f) {
        return Ok(sol);
    }
    let start = 1e-9 * spec.mu();
    let ratio = (hi_cap / start).powf(1.0 / WIDE_SCAN as f64);
    let wide: Vec<f64> = (0..=WIDE_SCAN).map(|i| start * ratio.powi(i as i32)).collect();
    first_root(spec, &wide, &f).ok_or(Error::NoBracket { from: start, to: hi_cap })
}

fn first_root<F>(spec: &ValidatedSpec, grid: &[f64], f: &F) -> Option<GapSolution>
where
    F: Fn(f64) -> Option<f64>,
{
    let values: Vec<Option<f64>> = grid.iter().map(|&x| f(x)).collect();
    for i in 0..grid.len() - 1 {
        let (Some(fa), Some(fb)) = (values[i], values[i + 1]) else {
            continue;
        };
        if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
            continue;
        }
        let root = brent(
            |x| f(x).unwrap_or(f64::NAN),
            grid[i],
            grid[i + 1],
            BRENT_XTOL,
            BRENT_MAX_ITER,
        );
        if let Some(root) = root {
            if root.fx.abs() < GAP_TOL {
                return Some(assemble(spec, root.x, root.fx.abs(), root.iterations));
            }
        }
    }
    None
}

fn assemble(spec: &ValidatedSpec, lambda: f64, residual: f64, iterations: usize) -> GapSolution {
    let pi_minus = spec.pi_minus(lambda);
    let pi_plus = spec.pi_plus(lambda);
    let l = pi_minus / (1.0 - pi_minus);
    let u = pi_plus / ((1.0 - pi_plus) * (1.0 - spec.epsilon()));
    GapSolution {
        spec: *spec,
        lambda,
        l,
        u,
        pi_minus,
        pi_plus,
        log_ratio: no_trade_width(spec, lambda).unwrap_or((u / l).ln()),
        case: classify(spec, lambda).unwrap_or_else(|_| CaseTag::from_parameters(spec)),
        residual,
        iterations,
    }
}
