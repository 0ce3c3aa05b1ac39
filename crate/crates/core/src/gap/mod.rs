//! The gap `lambda`: closed-form Riccati solution, the terminal boundary
//! condition it must satisfy, the bracketed solve, and the fractional power
//! series in `epsilon^(1/3)` used both as a seed and as an oracle.

mod derivatives;
mod riccati;
mod series;
mod solve;

pub use derivatives::{derivative_table_check, DerivativeEntry, DerivativeReport};
pub use riccati::{no_trade_width, WFunction, FALLBACK_STEPS};
pub use series::{gap_series, SeriesOrder};
pub use solve::{boundary_residual, solve_gap, GapSolution, GAP_TOL};
