//! Shadow market: a frictionless price `S~ = g(y) S` inside the bid-ask
//! spread at which the optimal policy of the friction model is also optimal.

use serde::{Deserialize, Serialize};

use crate::gap::{GapSolution, WFunction};
use crate::numerics::adaptive_simpson;
use crate::{Error, Result};

const QUAD_TOL: f64 = 1e-11;

/// Initial holdings: `xi0` units of the safe asset (price 1 at time 0) and
/// `xi` units of the risky asset at ask price `s0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialPosition {
    pub xi0: f64,
    pub xi: f64,
    pub s0: f64,
}

impl InitialPosition {
    pub fn new(xi0: f64, xi: f64, s0: f64) -> Self {
        Self { xi0, xi, s0 }
    }

    /// One unit of wealth, all in the safe asset.
    pub fn cash() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    fn check(&self) -> Result<()> {
        let finite = self.xi0.is_finite() && self.xi.is_finite() && self.s0.is_finite();
        if !finite || self.xi0 < 0.0 || self.xi < 0.0 || self.s0 <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "initial position must be nonnegative with a positive price, got {self:?}"
            )));
        }
        if self.xi0 == 0.0 && self.xi == 0.0 {
            return Err(Error::NonpositiveWealth(0.0));
        }
        Ok(())
    }

    /// Wealth at the ask price.
    pub fn ask_value(&self) -> f64 {
        self.xi0 + self.xi * self.s0
    }
}

/// Drift, volatility and spread multiplier of the shadow price as functions
/// of the state `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowCoefficients {
    w: Option<WFunction>,
    mu: f64,
    sigma: f64,
    gamma: f64,
    l: f64,
}

impl ShadowCoefficients {
    /// `g(y) = w / (l e^y (1 - w))`, the ratio of shadow to ask price.
    pub fn g(&self, y: f64) -> Result<f64> {
        let Some(wf) = &self.w else { return Ok(1.0) };
        let w = wf.eval_w(y)?;
        Ok(w / (self.l * y.exp() * (1.0 - w)))
    }

    /// `sigma w' / (w (1 - w))`.
    pub fn sigma_tilde(&self, y: f64) -> Result<f64> {
        let Some(wf) = &self.w else { return Ok(self.sigma) };
        let w = wf.eval_w(y)?;
        Ok(self.sigma * wf.slope(w) / (w * (1.0 - w)))
    }

    /// `sigma^2 w' / (w (1 - w)) (w' / (1 - w) - (1 - gamma) w)`.
    pub fn mu_tilde(&self, y: f64) -> Result<f64> {
        let Some(wf) = &self.w else { return Ok(self.mu) };
        let w = wf.eval_w(y)?;
        let dw = wf.slope(w);
        Ok(self.sigma * self.sigma * dw / (w * (1.0 - w)) * (dw / (1.0 - w) - (1.0 - self.gamma) * w))
    }
}

pub fn shadow_coefficients(gap: &GapSolution) -> Result<ShadowCoefficients> {
    let s = &gap.spec;
    let w = if s.is_unit_merton() || gap.lambda == 0.0 {
        None
    } else {
        Some(gap.w_function()?)
    };
    Ok(ShadowCoefficients {
        w,
        mu: s.mu(),
        sigma: s.sigma(),
        gamma: s.gamma(),
        l: gap.l,
    })
}

/// `w(y) - w'(y) / (1 - w(y))`; vanishes at both boundaries.
pub fn w_tilde(gap: &GapSolution, y: f64) -> Result<f64> {
    if gap.lambda == 0.0 {
        return Ok(0.0);
    }
    let wf = gap.w_function()?;
    let w = wf.eval_w(y)?;
    if (1.0 - w).abs() < 1e-14 {
        return Err(Error::Degenerate { y });
    }
    Ok(w - wf.slope(w) / (1.0 - w))
}

/// `int_0^y w~(z) dz`, computed as `int_0^y w dz + log((1 - w(y)) / (1 - w(0)))`.
pub fn q_tilde(gap: &GapSolution, y: f64) -> Result<f64> {
    if gap.lambda == 0.0 || y == 0.0 {
        return Ok(0.0);
    }
    let wf = gap.w_function()?;
    let w0 = wf.initial();
    let wy = wf.eval_w(y)?;
    if (1.0 - wy).abs() < 1e-14 || (1.0 - w0).abs() < 1e-14 {
        return Err(Error::Degenerate { y });
    }
    let integral = adaptive_simpson(|z| wf.eval_w(z).unwrap_or(f64::NAN), 0.0, y, QUAD_TOL);
    if !integral.is_finite() {
        return Err(Error::PoleEncountered { y });
    }
    Ok(integral + ((1.0 - wy) / (1.0 - w0)).ln())
}

/// State right after the initial trade. Buys up to the buy boundary if the
/// risky weight at the ask is at most `pi_-`, sells down to the sell boundary
/// if the weight at the bid is at least `pi_+`, and otherwise stays put.
///
/// Phrased with weights rather than the stock/cash ratio so that the rule
/// also covers levered targets, where the ratio is negative.
pub fn initial_state(gap: &GapSolution, pos: &InitialPosition) -> Result<f64> {
    pos.check()?;
    if gap.log_ratio == 0.0 {
        return Ok(0.0);
    }
    let cash = pos.xi0;
    let stock = pos.xi * pos.s0;
    let bid_stock = (1.0 - gap.spec.epsilon()) * stock;
    if stock / (cash + stock) <= gap.pi_minus {
        Ok(0.0)
    } else if bid_stock / (cash + bid_stock) >= gap.pi_plus {
        Ok(gap.log_ratio)
    } else {
        Ok((stock / cash / gap.l).ln())
    }
}
