//! Closed-form consequences of the gap: welfare, liquidity premium, trading
//! boundaries, local times and turnover, small-spread expansions, and
//! finite-horizon bounds.

use serde::{Deserialize, Serialize};

use crate::gap::GapSolution;
use crate::model::ValidatedSpec;
use crate::numerics::adaptive_simpson;
use crate::shadow::{initial_state, shadow_coefficients, InitialPosition};
use crate::{Error, Result};

/// Long-run policy and its welfare and volume statistics. Rates are per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    /// Equivalent safe rate.
    pub esr: f64,
    /// Liquidity premium.
    pub lip: f64,
    pub pi_minus: f64,
    pub pi_plus: f64,
    pub gap: f64,
    /// Long-run local time at the buy boundary per unit time.
    #[serde(with = "crate::serde_float")]
    pub ltime_buy: f64,
    /// Long-run local time at the sell boundary per unit time.
    #[serde(with = "crate::serde_float")]
    pub ltime_sell: f64,
    #[serde(with = "crate::serde_float")]
    pub share_turnover: f64,
    #[serde(with = "crate::serde_float")]
    pub wealth_turnover: f64,
}

/// Share and wealth turnover, each computed twice: from the local-time rates
/// and from the direct closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnoverPair {
    pub share: f64,
    pub wealth: f64,
    pub share_direct: f64,
    pub wealth_direct: f64,
}

/// Leading-order small-spread values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub epsilon: f64,
    pub gap: f64,
    pub esr: f64,
    pub lip: f64,
    pub pi_minus: f64,
    pub pi_plus: f64,
    #[serde(with = "crate::serde_float")]
    pub share_turnover: f64,
    #[serde(with = "crate::serde_float")]
    pub wealth_turnover: f64,
}

/// Both forms of the volume-spread relation:
/// `lip ~ 3/4 eps ShT` and `esr_loss ~ 3/4 eps WeT`.
/// Ratios are NaN when the right-hand side vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalRelation {
    pub lip: f64,
    #[serde(with = "crate::serde_float")]
    pub share_side: f64,
    #[serde(with = "crate::serde_float")]
    pub share_ratio: f64,
    pub esr_loss: f64,
    #[serde(with = "crate::serde_float")]
    pub wealth_side: f64,
    #[serde(with = "crate::serde_float")]
    pub wealth_ratio: f64,
}

/// Bounds on the equivalent safe rate of the optimal policy over a finite
/// horizon, starting from a given position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonBounds {
    pub horizon: f64,
    pub upper: f64,
    pub lower: f64,
    /// `int w~` over the no-trade interval.
    pub q_integral: f64,
    /// `int w` over the no-trade interval.
    pub w_integral: f64,
    /// Long-run equivalent safe rate, the common limit of both bounds.
    pub long_run: f64,
}

impl HorizonBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// How far the lower bound sits below the long-run rate.
    pub fn shortfall(&self) -> f64 {
        self.long_run - self.lower
    }
}

fn esr(spec: &ValidatedSpec, lambda: f64) -> f64 {
    spec.r() + (spec.mu() * spec.mu() - lambda * lambda) / (2.0 * spec.gamma_sigma2())
}

fn lip(spec: &ValidatedSpec, lambda: f64) -> f64 {
    let mu = spec.mu();
    // mu - sqrt(mu^2 - lambda^2) without cancellation
    lambda * lambda / (mu + (mu * mu - lambda * lambda).sqrt())
}

/// Long-run local times per unit time at the buy and sell boundaries,
/// reported as magnitudes. For `mu = sigma^2/2` the state is a driftless
/// reflected Brownian motion and both rates equal `sigma^2 / (2 |log(u/l)|)`.
pub fn local_time_rates(gap: &GapSolution) -> Result<(f64, f64)> {
    let y = gap.log_ratio;
    if y == 0.0 {
        return Err(Error::DegenerateInterval);
    }
    let s2 = gap.spec.sigma2();
    let k = 2.0 * gap.spec.mean_variance() - 1.0;
    if k.abs() < 1e-12 {
        let rate = s2 / (2.0 * y.abs());
        return Ok((rate, rate));
    }
    let buy = 0.5 * s2 * k / (k * y).exp_m1();
    let sell = 0.5 * s2 * -k / (-k * y).exp_m1();
    Ok((buy.abs(), sell.abs()))
}

/// Long-run share and wealth turnover.
pub fn turnover(gap: &GapSolution) -> Result<TurnoverPair> {
    let (pm, pp) = (gap.pi_minus, gap.pi_plus);
    let (lb, ls) = local_time_rates(gap)?;
    let share = (1.0 - pm).abs() * lb + (1.0 - pp).abs() * ls;
    let wealth = (pm * (1.0 - pm)).abs() * lb + (pp * (1.0 - pp)).abs() * ls;

    let y = gap.log_ratio;
    let s2 = gap.spec.sigma2();
    let k = 2.0 * gap.spec.mean_variance() - 1.0;
    let (down, up) = if k.abs() < 1e-12 {
        (1.0 / y, 1.0 / y)
    } else {
        (k / (k * y).exp_m1(), -k / (-k * y).exp_m1())
    };
    let share_direct = 0.5 * s2 * ((1.0 - pm) * down + (1.0 - pp) * up);
    let wealth_direct = 0.5 * s2 * (pm * (1.0 - pm) * down + pp * (1.0 - pp) * up);
    debug_assert!((share - share_direct).abs() <= 1e-12 * share.max(1.0));
    debug_assert!((wealth - wealth_direct).abs() <= 1e-12 * wealth.max(1.0));
    Ok(TurnoverPair {
        share,
        wealth,
        share_direct,
        wealth_direct,
    })
}

/// Welfare and volume statistics of the solved policy. Without friction the
/// policy trades continuously and both turnovers are infinite; at a unit
/// Merton weight nothing is ever traded.
pub fn policy_report(gap: &GapSolution) -> PolicyReport {
    let s = &gap.spec;
    if s.is_unit_merton() {
        return PolicyReport {
            esr: s.frictionless_esr(),
            lip: 0.0,
            pi_minus: 1.0,
            pi_plus: 1.0,
            gap: 0.0,
            ltime_buy: 0.0,
            ltime_sell: 0.0,
            share_turnover: 0.0,
            wealth_turnover: 0.0,
        };
    }
    let (ltime_buy, ltime_sell, share, wealth) = match turnover(gap) {
        Ok(t) => {
            let (b, u) = local_time_rates(gap).expect("turnover succeeded");
            (b, u, t.share, t.wealth)
        }
        Err(_) => (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY),
    };
    PolicyReport {
        esr: esr(s, gap.lambda),
        lip: lip(s, gap.lambda),
        pi_minus: gap.pi_minus,
        pi_plus: gap.pi_plus,
        gap: gap.lambda,
        ltime_buy,
        ltime_sell,
        share_turnover: share,
        wealth_turnover: wealth,
    }
}

/// Leading terms of the small-spread expansions at spread `eps`.
pub fn expansions(spec: &ValidatedSpec, eps: f64) -> ExpansionReport {
    let p = spec.merton_fraction();
    let g = spec.gamma();
    let s2 = spec.sigma2();
    let k = 3.0 * p * p * (1.0 - p) * (1.0 - p) / (4.0 * g);
    let k13 = k.cbrt();
    let e13 = eps.cbrt();
    let sht = if k == 0.0 {
        0.0
    } else {
        0.5 * s2 * (1.0 - p) * (1.0 - p) * p / k13 / e13
    };
    ExpansionReport {
        epsilon: eps,
        gap: spec.gamma_sigma2() * k13 * e13,
        esr: spec.frictionless_esr() - 0.5 * spec.gamma_sigma2() * k13 * k13 * e13 * e13,
        lip: spec.mu() / (2.0 * p * p) * k13 * k13 * e13 * e13,
        pi_minus: p - k13 * e13,
        pi_plus: p + k13 * e13,
        share_turnover: sht,
        wealth_turnover: 2.0 * spec.gamma_sigma2() / 3.0 * k13 * k13 / e13,
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 || !b.is_finite() || !a.is_finite() {
        f64::NAN
    } else {
        a / b
    }
}

/// Compares the welfare cost of the spread with three quarters of the spread
/// times turnover, on the share side and on the wealth side.
pub fn universal_relation(gap: &GapSolution) -> UniversalRelation {
    let rep = policy_report(gap);
    let eps = gap.spec.epsilon();
    let share_side = if rep.share_turnover == 0.0 { 0.0 } else { 0.75 * eps * rep.share_turnover };
    let wealth_side = if rep.wealth_turnover == 0.0 { 0.0 } else { 0.75 * eps * rep.wealth_turnover };
    let esr_loss = gap.spec.frictionless_esr() - rep.esr;
    UniversalRelation {
        lip: rep.lip,
        share_side,
        share_ratio: ratio(rep.lip, share_side),
        esr_loss,
        wealth_side,
        wealth_ratio: ratio(esr_loss, wealth_side),
    }
}

/// `int_0^{log(u/l)} w(y) dy` by elementary integration of the closed form;
/// numerical quadrature for log utility.
pub fn w_integral(gap: &GapSolution) -> Result<f64> {
    let s = &gap.spec;
    if gap.lambda == 0.0 || s.is_unit_merton() {
        return Ok(0.0);
    }
    if s.is_log_utility() {
        let wf = gap.w_function()?;
        let v = adaptive_simpson(|y| wf.eval_w(y).unwrap_or(f64::NAN), 0.0, gap.log_ratio, 1e-12);
        return if v.is_finite() { Ok(v) } else { Err(Error::BoundarySingular { lambda: gap.lambda }) };
    }
    let (mu, lam, gs2, g) = (s.mu(), gap.lambda, s.gamma_sigma2(), s.gamma());
    let arg1 = (mu + lam) * (mu - lam - gs2) / ((mu - lam) * (mu + lam - gs2)) / (1.0 - s.epsilon());
    let arg2 = (mu + lam) * (mu + lam - gs2) / ((mu - lam) * (mu - lam - gs2));
    if !(arg1 > 0.0 && arg2 > 0.0) {
        return Err(Error::BoundarySingular { lambda: lam });
    }
    Ok((s.mean_variance() - 0.5) / (g - 1.0) * arg1.ln() + arg2.ln() / (2.0 * (g - 1.0)))
}

/// Upper and lower bounds on the horizon-`T` equivalent safe rate of the
/// long-run optimal policy started from `pos`. Both converge to the long-run
/// rate at rate `1/T`. The correction term enters with its absolute value,
/// so the bounds stay ordered when the no-trade interval is reversed.
pub fn finite_horizon_bounds(
    gap: &GapSolution,
    horizon: f64,
    pos: &InitialPosition,
) -> Result<HorizonBounds> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidConfig(format!("horizon must be positive, got {horizon}")));
    }
    let s = &gap.spec;
    let eps = s.epsilon();
    let y0 = initial_state(gap, pos)?;
    let liquidation = pos.xi0 + (1.0 - eps) * pos.xi * pos.s0;
    if liquidation <= 0.0 {
        return Err(Error::NonpositiveWealth(liquidation));
    }
    let shadow_s0 = shadow_coefficients(gap)?.g(y0)? * pos.s0;
    let wi = w_integral(gap)?;
    let q = if gap.lambda == 0.0 || s.is_unit_merton() {
        0.0
    } else {
        let (mu, lam, gs2) = (s.mu(), gap.lambda, s.gamma_sigma2());
        wi - ((mu - lam - gs2) / (mu + lam - gs2)).ln()
    };
    let factor = 1.0 - eps / (1.0 - eps) * gap.pi_plus;
    if factor <= 0.0 {
        return Err(Error::NonpositiveWealth(factor));
    }
    let long_run = esr(s, gap.lambda);
    let t = horizon;
    Ok(HorizonBounds {
        horizon,
        upper: long_run + pos.ask_value().ln() / t + q.abs() / t,
        lower: long_run + (pos.xi0 + pos.xi * shadow_s0).ln() / t - q.abs() / t + factor.ln() / t,
        q_integral: q,
        w_integral: wi,
        long_run,
    })
}
