use serde::{Deserialize, Serialize};

use crate::model::{classify, CaseTag, ValidatedSpec};
use crate::numerics::rk4_autonomous;
use crate::{Error, Result};

/// RK4 steps used when `w` is integrated instead of evaluated in closed form.
pub const FALLBACK_STEPS: usize = 4096;

/// Closed-form solution `w(lambda, .)` of the reduced Riccati equation
///
/// ```text
/// w' + (1 - gamma) w^2 + (2 mu / sigma^2 - 1) w - (mu^2 - lambda^2) / (gamma sigma^4) = 0,
/// w(0) = (mu - lambda) / (gamma sigma^2).
/// ```
///
/// Writing `z = (gamma - 1) w - (mu/sigma^2 - 1/2)` turns the equation into
/// `z' = z^2 + D` with `z(0) = b`, where `D` is the discriminant and
/// `a = sqrt|D|`. The three branches are
///
/// * tan:  `z = a tan(atan(b/a) + a y)`
/// * tanh: `z = a tanh(atanh(b/a) - a y)`
/// * coth: `z = a coth(acoth(b/a) - a y)`
///
/// and are evaluated through their addition formulas, which avoid the
/// inverse functions near `|b/a| = 1` and make the pole test a sign test on
/// the denominator `a -/+ b t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WFunction {
    spec: ValidatedSpec,
    lambda: f64,
    case: CaseTag,
    a: f64,
    b: f64,
}

impl WFunction {
    /// `w` for a nonnegative gap below `mu`.
    pub fn new(spec: &ValidatedSpec, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda < spec.mu()) {
            return Err(Error::BoundarySingular { lambda });
        }
        Self::at(spec, lambda)
    }

    /// Same as [`WFunction::new`] without the sign restriction on `lambda`;
    /// finite differences around `lambda = 0` need both sides.
    pub(crate) fn at(spec: &ValidatedSpec, lambda: f64) -> Result<Self> {
        let case = classify(spec, lambda)?;
        Ok(Self {
            spec: *spec,
            lambda,
            case,
            a: spec.coeff_a(lambda),
            b: spec.coeff_b(lambda),
        })
    }

    pub fn spec(&self) -> &ValidatedSpec {
        &self.spec
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn case(&self) -> CaseTag {
        self.case
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Initial value `w(0) = (mu - lambda) / (gamma sigma^2)`.
    pub fn initial(&self) -> f64 {
        self.spec.pi_minus(self.lambda)
    }

    /// Right-hand side of the ODE: `w'` as a function of `w`.
    #[inline]
    pub fn slope(&self, w: f64) -> f64 {
        let s = &self.spec;
        let c = (s.mu() * s.mu() - self.lambda * self.lambda) / (s.gamma() * s.sigma2() * s.sigma2());
        -(1.0 - s.gamma()) * w * w - (2.0 * s.mean_variance() - 1.0) * w + c
    }

    pub fn eval_w(&self, y: f64) -> Result<f64> {
        match self.case {
            CaseTag::UnitMerton | CaseTag::LogUtilityFallback => {
                Ok(rk4_autonomous(|w| self.slope(w), self.initial(), y, FALLBACK_STEPS))
            }
            CaseTag::TanCase => {
                let angle = self.a * y;
                if angle.abs() >= std::f64::consts::FRAC_PI_2 {
                    return Err(Error::PoleEncountered { y });
                }
                let t = angle.tan();
                self.unshift(y, self.b + self.a * t, self.a - self.b * t)
            }
            CaseTag::TanhCase | CaseTag::CothCase => {
                let t = (self.a * y).tanh();
                self.unshift(y, self.b - self.a * t, self.a - self.b * t)
            }
        }
    }

    fn unshift(&self, y: f64, num: f64, den: f64) -> Result<f64> {
        // den equals a > 0 at y = 0 and is monotone in y.
        if den <= 1e-14 * self.a {
            return Err(Error::PoleEncountered { y });
        }
        let z = self.a * num / den;
        let s = &self.spec;
        Ok((z + s.mean_variance() - 0.5) / (s.gamma() - 1.0))
    }

    /// `w'(y)` from the ODE evaluated at `w(y)`.
    pub fn eval_w_prime(&self, y: f64) -> Result<f64> {
        Ok(self.slope(self.eval_w(y)?))
    }
}

/// Width `log(u/l)` of the no-trade interval in the state variable, with
///
/// ```text
/// l = pi_- / (1 - pi_-),   u = pi_+ / ((1 - pi_+)(1 - epsilon)).
/// ```
///
/// Negative when the position is levered.
pub fn no_trade_width(spec: &ValidatedSpec, lambda: f64) -> Result<f64> {
    let pm = spec.pi_minus(lambda);
    let pp = spec.pi_plus(lambda);
    let cash_m = 1.0 - pm;
    let cash_p = 1.0 - pp;
    if pm <= 0.0 || cash_m.abs() < 1e-14 || cash_p.abs() < 1e-14 || cash_m.signum() != cash_p.signum() {
        return Err(Error::BoundarySingular { lambda });
    }
    Ok((pp / pm).ln() + (cash_m / cash_p).ln() - (-spec.epsilon()).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, MarketSpec};

    fn spec(gamma: f64, eps: f64) -> ValidatedSpec {
        validate(MarketSpec::new(0.0, 0.08, 0.16, gamma, eps)).unwrap()
    }

    #[test]
    fn initial_condition_holds_in_every_case() {
        for g in [0.5, 1.0, 2.0, 5.0, 100.0] {
            let s = spec(g, 0.01);
            for lambda in [0.0, 0.003, 0.01] {
                let w = WFunction::new(&s, lambda).unwrap();
                assert!((w.eval_w(0.0).unwrap() - (0.08 - lambda) / (g * 0.0256)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ode_residual_is_tiny() {
        // central differences of w against the ODE right-hand side
        for g in [0.5, 2.0, 5.0, 100.0] {
            let s = spec(g, 0.01);
            let w = WFunction::new(&s, 0.004).unwrap();
            let width = no_trade_width(&s, 0.004).unwrap();
            let h = 1e-5;
            for i in 1..50 {
                let y = width * i as f64 / 50.0;
                let fd = (w.eval_w(y + h).unwrap() - w.eval_w(y - h).unwrap()) / (2.0 * h);
                let slope = w.eval_w_prime(y).unwrap();
                let res = (fd - slope) / slope.abs().max(1.0);
                assert!(res.abs() < 1e-8, "gamma {g} y {y} residual {res}");
            }
        }
    }

    #[test]
    fn tan_branch_reports_pole() {
        let s = spec(5.0, 0.01);
        let w = WFunction::new(&s, 0.0).unwrap();
        assert_eq!(w.case(), CaseTag::TanCase);
        // pi/(2a) is past any pole of the tan branch
        let y = std::f64::consts::FRAC_PI_2 / w.a();
        assert!(matches!(w.eval_w(y), Err(Error::PoleEncountered { .. })));
    }

    #[test]
    fn coth_branch_reports_pole() {
        let s = spec(0.5, 0.01);
        let w = WFunction::new(&s, 0.0).unwrap();
        assert_eq!(w.case(), CaseTag::CothCase);
        // den = a - b tanh(a y) vanishes where tanh(a y) = a / b
        let y_pole = (w.a() / w.b()).atanh() / w.a();
        let y = y_pole + 0.1 * y_pole.signum();
        assert!(matches!(w.eval_w(y), Err(Error::PoleEncountered { .. })));
    }

    #[test]
    fn width_is_negative_under_leverage() {
        let s = spec(2.0, 0.001);
        assert!(no_trade_width(&s, 0.003).unwrap() < 0.0);
        let s = spec(5.0, 0.001);
        assert!(no_trade_width(&s, 0.003).unwrap() > 0.0);
    }

    #[test]
    fn singular_boundaries_are_rejected() {
        // gamma sigma^2 - (mu + lambda) = 0 at gamma = 5, lambda = 0.048
        let s = spec(5.0, 0.01);
        assert!(matches!(
            no_trade_width(&s, 0.128 - 0.08),
            Err(Error::BoundarySingular { .. })
        ));
        assert!(matches!(WFunction::new(&s, 0.09), Err(Error::BoundarySingular { .. })));
    }
}
