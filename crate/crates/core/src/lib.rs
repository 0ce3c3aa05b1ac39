//! Long-run portfolio choice with proportional transaction costs.
//!
//! An investor with constant relative risk aversion trades one safe and one
//! risky asset whose bid price sits a fixed fraction `epsilon` below the ask.
//! The optimal policy keeps the risky weight inside a no-trade interval
//! `[pi_minus, pi_plus]` that is symmetric around the frictionless Merton
//! weight once each boundary is valued at its own trading price. Everything
//! (welfare, liquidity premium, trading volume, finite-horizon bounds) is an
//! explicit function of one scalar, the *gap* `lambda`, which solves a
//! boundary condition on the closed-form solution of a Riccati equation.
//!
//! Crate layout:
//!
//! * [`model`]: market parameters, validation and the Riccati case split.
//! * [`gap`]: the closed-form Riccati solution, the gap equation and its
//!   fractional power series in `epsilon^(1/3)`.
//! * [`policy`]: equivalent safe rate, liquidity premium, turnover,
//!   expansions and finite-horizon bounds.
//! * [`shadow`]: the frictionless shadow price living inside the spread.
//! * [`sim`]: Monte Carlo of the reflected state process and the trades it
//!   implies.
//! * [`empirics`]: implied liquidity premium from spread and turnover data.

pub mod empirics;
mod error;
pub mod gap;
pub mod model;
pub mod numerics;
pub mod policy;
pub mod serde_float;
pub mod shadow;
pub mod sim;

pub use error::{Error, Result};
pub use gap::{
    boundary_residual, derivative_table_check, gap_series, solve_gap, DerivativeReport,
    GapSolution, SeriesOrder, WFunction,
};
pub use model::{classify, validate, CaseTag, MarketSpec, ValidatedSpec};
pub use policy::{
    expansions, finite_horizon_bounds, local_time_rates, policy_report, turnover,
    universal_relation, w_integral, ExpansionReport, HorizonBounds, PolicyReport, TurnoverPair,
    UniversalRelation,
};
pub use shadow::{initial_state, q_tilde, shadow_coefficients, w_tilde, ShadowCoefficients};
pub use sim::{
    estimate_horizon_esr, estimate_turnover, simulate, EsrEstimate, InitialPosition, SimConfig,
    SimPath, TurnoverEstimate,
};
