use serde::{Deserialize, Serialize};

use super::riccati::WFunction;
use crate::model::ValidatedSpec;
use crate::Result;

const STEPS: [f64; 2] = [1e-3, 5e-4];

/// One partial derivative of `w(lambda, y)` at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEntry {
    /// Derivative name, e.g. `w_xxl` for `d^3 w / dy^2 dlambda`.
    pub name: String,
    /// Richardson-extrapolated central difference.
    pub numeric: f64,
    /// Closed-form value.
    pub exact: f64,
    /// `|numeric - exact| / max(|exact|, 1)`.
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub entries: Vec<DerivativeEntry>,
    pub max_rel_error: f64,
}

/// Closed-form partial derivatives of `w` at `(lambda, y) = (0, 0)`, ordered
/// as `(y-order, lambda-order, value)`.
fn exact_derivatives(spec: &ValidatedSpec) -> Vec<(usize, usize, f64)> {
    let (mu, g) = (spec.mu(), spec.gamma());
    let s2 = spec.sigma2();
    let (s4, s6, s8) = (s2 * s2, s2 * s2 * s2, s2 * s2 * s2 * s2);
    let (mu2, mu3, mu4) = (mu * mu, mu * mu * mu, mu * mu * mu * mu);
    let (g2, g3, g4) = (g * g, g * g * g, g * g * g * g);
    vec![
        (1, 0, -mu2 / (g2 * s4) + mu / (g * s2)),
        (0, 1, -1.0 / (g * s2)),
        (2, 0, 2.0 * mu3 / (g3 * s6) - 3.0 * mu2 / (g2 * s4) + mu / (g * s2)),
        (1, 1, 2.0 * mu / (g2 * s4) - 1.0 / (g * s2)),
        (0, 2, 0.0),
        (
            3,
            0,
            -6.0 * mu4 / (g4 * s8) + 2.0 * mu4 / (g3 * s8) + 12.0 * mu3 / (g3 * s6)
                - 4.0 * mu3 / (g2 * s6)
                - 7.0 * mu2 / (g2 * s4)
                + 2.0 * mu2 / (g * s4)
                + mu / (g * s2),
        ),
        (
            2,
            1,
            -6.0 * mu2 / (g3 * s6) + 2.0 * mu2 / (g2 * s6) + 6.0 * mu / (g2 * s4)
                - 2.0 * mu / (g * s4)
                - 1.0 / (g * s2),
        ),
        (1, 2, -2.0 / (g2 * s4)),
        (0, 3, 0.0),
    ]
}

/// Second-order central difference stencil for the `order`-th derivative.
fn stencil(order: usize, h: f64) -> Vec<(f64, f64)> {
    match order {
        0 => vec![(0.0, 1.0)],
        1 => vec![(-h, -0.5 / h), (h, 0.5 / h)],
        2 => vec![(-h, 1.0 / (h * h)), (0.0, -2.0 / (h * h)), (h, 1.0 / (h * h))],
        3 => {
            let c = 1.0 / (h * h * h);
            vec![(-2.0 * h, -0.5 * c), (-h, c), (h, -c), (2.0 * h, 0.5 * c)]
        }
        _ => unreachable!("derivatives up to third order"),
    }
}

fn central(spec: &ValidatedSpec, ny: usize, nl: usize, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (dl, cl) in stencil(nl, h) {
        let w = WFunction::at(spec, dl)?;
        for (dy, cy) in stencil(ny, h) {
            acc += cl * cy * w.eval_w(dy)?;
        }
    }
    Ok(acc)
}

fn name(ny: usize, nl: usize) -> String {
    format!("w_{}{}", "x".repeat(ny), "l".repeat(nl))
}

/// Compares Richardson-extrapolated finite differences of the closed-form
/// `w` with the closed-form partial derivatives up to third order.
pub fn derivative_table_check(spec: &ValidatedSpec) -> Result<DerivativeReport> {
    let mut entries = Vec::new();
    for (ny, nl, exact) in exact_derivatives(spec) {
        let coarse = central(spec, ny, nl, STEPS[0])?;
        let fine = central(spec, ny, nl, STEPS[1])?;
        let numeric = (4.0 * fine - coarse) / 3.0;
        entries.push(DerivativeEntry {
            name: name(ny, nl),
            numeric,
            exact,
            rel_error: (numeric - exact).abs() / exact.abs().max(1.0),
        });
    }
    let max_rel_error = entries.iter().map(|e| e.rel_error).fold(0.0, f64::max);
    Ok(DerivativeReport { entries, max_rel_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, MarketSpec};

    #[test]
    fn first_derivatives_follow_from_the_ode() {
        // w_x(0,0) is the ODE right-hand side at w = pi*
        let s = validate(MarketSpec::new(0.0, 0.08, 0.16, 5.0, 0.0)).unwrap();
        let w = WFunction::at(&s, 0.0).unwrap();
        let table = exact_derivatives(&s);
        assert!((table[0].2 - w.slope(w.initial())).abs() < 1e-14);
    }

    #[test]
    fn report_covers_nine_entries() {
        let s = validate(MarketSpec::new(0.0, 0.08, 0.16, 2.0, 0.0)).unwrap();
        let rep = derivative_table_check(&s).unwrap();
        assert_eq!(rep.entries.len(), 9);
        assert!(rep.max_rel_error < 1e-4, "{rep:?}");
    }
}
