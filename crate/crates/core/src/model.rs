//! Market and preference parameters, and the case split of the Riccati
//! equation that every closed form downstream depends on.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `|pi* - 1|` below this is the full-investment case: buy and hold, no gap.
pub const UNIT_MERTON_TOL: f64 = 1e-10;
/// `|gamma - 1|` below this switches `w` to numerical integration.
pub const LOG_UTILITY_TOL: f64 = 1e-6;
/// Smallest admissible Riccati coefficient `a(lambda)`.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

/// Market and preference parameters. All rates are annualized decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketSpec {
    /// Safe rate.
    pub r: f64,
    /// Expected excess return of the risky asset.
    pub mu: f64,
    /// Volatility.
    pub sigma: f64,
    /// Relative risk aversion.
    pub gamma: f64,
    /// Relative bid-ask spread: the bid is `(1 - epsilon)` times the ask.
    pub epsilon: f64,
}

impl MarketSpec {
    pub fn new(r: f64, mu: f64, sigma: f64, gamma: f64, epsilon: f64) -> Self {
        Self {
            r,
            mu,
            sigma,
            gamma,
            epsilon,
        }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }
}

/// A [`MarketSpec`] whose invariants have been checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarketSpec", into = "MarketSpec")]
pub struct ValidatedSpec {
    spec: MarketSpec,
    merton: f64,
    discriminant0: f64,
}

impl TryFrom<MarketSpec> for ValidatedSpec {
    type Error = Error;

    fn try_from(spec: MarketSpec) -> Result<Self> {
        validate(spec)
    }
}

impl From<ValidatedSpec> for MarketSpec {
    fn from(v: ValidatedSpec) -> Self {
        v.spec
    }
}

/// Checks the model invariants and precomputes the Merton fraction.
pub fn validate(spec: MarketSpec) -> Result<ValidatedSpec> {
    for (name, v) in [
        ("r", spec.r),
        ("mu", spec.mu),
        ("sigma", spec.sigma),
        ("gamma", spec.gamma),
        ("epsilon", spec.epsilon),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFiniteParameter { name });
        }
    }
    if spec.mu <= 0.0 {
        return Err(Error::NegativeExcessReturn(spec.mu));
    }
    if spec.sigma <= 0.0 {
        return Err(Error::NonpositiveVolatility(spec.sigma));
    }
    if spec.gamma <= 0.0 {
        return Err(Error::NonpositiveRiskAversion(spec.gamma));
    }
    if !(0.0..1.0).contains(&spec.epsilon) {
        return Err(Error::SpreadOutOfRange(spec.epsilon));
    }
    let merton = spec.mu / (spec.gamma * spec.sigma * spec.sigma);
    if !merton.is_finite() || merton <= 0.0 {
        return Err(Error::NonFiniteParameter {
            name: "merton_fraction",
        });
    }
    let mut v = ValidatedSpec {
        spec,
        merton,
        discriminant0: 0.0,
    };
    v.discriminant0 = v.discriminant(0.0);
    Ok(v)
}

impl ValidatedSpec {
    pub fn spec(&self) -> &MarketSpec {
        &self.spec
    }
    pub fn r(&self) -> f64 {
        self.spec.r
    }
    pub fn mu(&self) -> f64 {
        self.spec.mu
    }
    pub fn sigma(&self) -> f64 {
        self.spec.sigma
    }
    pub fn gamma(&self) -> f64 {
        self.spec.gamma
    }
    pub fn epsilon(&self) -> f64 {
        self.spec.epsilon
    }
    pub fn sigma2(&self) -> f64 {
        self.spec.sigma * self.spec.sigma
    }
    /// `gamma * sigma^2`, the denominator of every risky weight.
    pub fn gamma_sigma2(&self) -> f64 {
        self.spec.gamma * self.sigma2()
    }
    /// Frictionless optimal risky weight `mu / (gamma sigma^2)`.
    pub fn merton_fraction(&self) -> f64 {
        self.merton
    }
    /// Mean-variance ratio `mu / sigma^2`.
    pub fn mean_variance(&self) -> f64 {
        self.spec.mu / self.sigma2()
    }
    /// Sign of the discriminant at `lambda = 0`.
    pub fn discriminant_sign(&self) -> f64 {
        self.discriminant0.signum()
    }
    pub fn is_unit_merton(&self) -> bool {
        (self.merton - 1.0).abs() < UNIT_MERTON_TOL
    }
    pub fn is_log_utility(&self) -> bool {
        (self.spec.gamma - 1.0).abs() < LOG_UTILITY_TOL
    }
    /// Merton weight above one: the investor borrows to hold the risky asset.
    pub fn is_levered(&self) -> bool {
        self.merton > 1.0
    }
    /// Frictionless equivalent safe rate `r + mu^2 / (2 gamma sigma^2)`.
    pub fn frictionless_esr(&self) -> f64 {
        self.spec.r + self.spec.mu * self.spec.mu / (2.0 * self.gamma_sigma2())
    }
    pub fn pi_minus(&self, lambda: f64) -> f64 {
        (self.spec.mu - lambda) / self.gamma_sigma2()
    }
    pub fn pi_plus(&self, lambda: f64) -> f64 {
        (self.spec.mu + lambda) / self.gamma_sigma2()
    }

    /// `(gamma-1)(mu^2-lambda^2)/(gamma sigma^4) - (1/2 - mu/sigma^2)^2`.
    pub fn discriminant(&self, lambda: f64) -> f64 {
        let s4 = self.sigma2() * self.sigma2();
        let half = 0.5 - self.mean_variance();
        (self.spec.gamma - 1.0) * (self.spec.mu * self.spec.mu - lambda * lambda)
            / (self.spec.gamma * s4)
            - half * half
    }

    /// Riccati coefficient `a(lambda) = sqrt(|discriminant|)`.
    pub fn coeff_a(&self, lambda: f64) -> f64 {
        self.discriminant(lambda).abs().sqrt()
    }

    /// Riccati coefficient `b(lambda)`, the initial value of the shifted solution.
    pub fn coeff_b(&self, lambda: f64) -> f64 {
        0.5 - self.mean_variance()
            + (self.spec.gamma - 1.0) * (self.spec.mu - lambda) / self.gamma_sigma2()
    }
}

/// Which closed form solves the Riccati equation for `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// Negative discriminant with `|b/a| < 1`.
    TanhCase,
    /// Positive discriminant.
    TanCase,
    /// Negative discriminant with `|b/a| > 1`.
    CothCase,
    /// Merton weight exactly one: no gap, buy and hold.
    UnitMerton,
    /// `gamma = 1`: the closed forms divide by zero, integrate numerically.
    LogUtilityFallback,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::TanhCase => "tanh",
            CaseTag::TanCase => "tan",
            CaseTag::CothCase => "coth",
            CaseTag::UnitMerton => "unit-merton",
            CaseTag::LogUtilityFallback => "log-utility",
        }
    }

    /// Case predicted from the parameters alone, valid for small `lambda`.
    pub fn from_parameters(spec: &ValidatedSpec) -> CaseTag {
        if spec.is_unit_merton() {
            return CaseTag::UnitMerton;
        }
        if spec.is_log_utility() {
            return CaseTag::LogUtilityFallback;
        }
        let g = spec.gamma();
        let p = spec.merton_fraction();
        if (g < 1.0 && p < 1.0) || (g > 1.0 && p > 1.0) {
            return CaseTag::TanhCase;
        }
        let half_width = 0.5 * (1.0 - 1.0 / g).max(0.0).sqrt();
        if g > 1.0 && (0.5 - half_width..=0.5 + half_width).contains(&p) && half_width > 0.0 {
            return CaseTag::TanCase;
        }
        CaseTag::CothCase
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Case tag at a given `lambda`, decided by the sign of the discriminant and
/// the size of `b/a`.
pub fn classify(spec: &ValidatedSpec, lambda: f64) -> Result<CaseTag> {
    if spec.is_unit_merton() {
        return Ok(CaseTag::UnitMerton);
    }
    if spec.is_log_utility() {
        return Ok(CaseTag::LogUtilityFallback);
    }
    let d = spec.discriminant(lambda);
    let a = d.abs().sqrt();
    if a < DISCRIMINANT_TOL {
        return Err(Error::DiscriminantDegenerate { lambda, a });
    }
    if d > 0.0 {
        Ok(CaseTag::TanCase)
    } else if spec.coeff_b(lambda).abs() < a {
        Ok(CaseTag::TanhCase)
    } else {
        Ok(CaseTag::CothCase)
    }
}
