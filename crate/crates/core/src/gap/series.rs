use serde::{Deserialize, Serialize};

use crate::model::ValidatedSpec;
use crate::Error;

/// Truncation order of the gap expansion in powers of `epsilon^(1/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesOrder {
    /// Leading `epsilon^(1/3)` term.
    First,
    /// Leading term plus the `epsilon` correction.
    Second,
}

impl TryFrom<u8> for SeriesOrder {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self, Error> {
        match n {
            1 => Ok(SeriesOrder::First),
            2 => Ok(SeriesOrder::Second),
            _ => Err(Error::InvalidConfig(format!("series order must be 1 or 2, got {n}"))),
        }
    }
}

/// Small-spread expansion of the gap:
///
/// ```text
/// lambda = gamma sigma^2 (3 pi*^2 (1 - pi*)^2 / (4 gamma))^(1/3) epsilon^(1/3)
///        + sigma^2 ((5 - 2 gamma)/10 pi* (1 - pi*) - 3/20) epsilon + O(epsilon^(4/3))
/// ```
pub fn gap_series(spec: &ValidatedSpec, order: SeriesOrder) -> f64 {
    let p = spec.merton_fraction();
    let g = spec.gamma();
    let eps = spec.epsilon();
    let k = 3.0 * p * p * (1.0 - p) * (1.0 - p) / (4.0 * g);
    let first = spec.gamma_sigma2() * k.cbrt() * eps.cbrt();
    match order {
        SeriesOrder::First => first,
        SeriesOrder::Second => {
            first + spec.sigma2() * ((5.0 - 2.0 * g) / 10.0 * p * (1.0 - p) - 3.0 / 20.0) * eps
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, MarketSpec};

    #[test]
    fn leading_term_reference() {
        let s = validate(MarketSpec::new(0.0, 0.08, 0.16, 5.0, 0.01)).unwrap();
        assert!((gap_series(&s, SeriesOrder::First) - 0.0055699066).abs() < 1e-9);
    }

    #[test]
    fn order_parsing() {
        assert_eq!(SeriesOrder::try_from(2).unwrap(), SeriesOrder::Second);
        assert!(SeriesOrder::try_from(3).is_err());
    }

    #[test]
    fn vanishes_without_friction() {
        let s = validate(MarketSpec::new(0.0, 0.08, 0.16, 5.0, 0.0)).unwrap();
        assert_eq!(gap_series(&s, SeriesOrder::First), 0.0);
    }
}
