use crate::error::{Error, Result};

/// Name of the environment variable that overrides the default work budget.
pub const BUDGET_ENV: &str = "RINGFOURIER_BUDGET";

/// Default cap on character evaluations (or equivalent inner-loop steps).
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Guardrail on the amount of inner-loop work a single computation may do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_work: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_work: DEFAULT_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_work: u64) -> Self {
        Budget { max_work }
    }

    pub fn unlimited() -> Self {
        Budget { max_work: u64::MAX }
    }

    /// Default budget, overridden by `RINGFOURIER_BUDGET` when it parses.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| parse_amount(&v))
            .map(Budget::new)
            .unwrap_or_default()
    }

    pub fn check(&self, what: &'static str, required: u128) -> Result<()> {
        if required > self.max_work as u128 {
            Err(Error::BudgetExceeded {
                what,
                required,
                budget: self.max_work,
            })
        } else {
            Ok(())
        }
    }

    pub fn allows(&self, required: u128) -> bool {
        required <= self.max_work as u128
    }
}

/// Accepts plain integers as well as `1e8` style amounts.
pub fn parse_amount(text: &str) -> Option<u64> {
    let text = text.trim().replace('_', "");
    if let Ok(v) = text.parse::<u64>() {
        return Some(v);
    }
    let v: f64 = text.parse().ok()?;
    if v.is_finite() && v >= 0.0 && v <= u64::MAX as f64 {
        Some(v as u64)
    } else {
        None
    }
}

/// `base^exp` as u128, saturating.
pub(crate) fn pow_sat(base: u64, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amounts() {
        assert_eq!(parse_amount("1000"), Some(1000));
        assert_eq!(parse_amount("1e8"), Some(100_000_000));
        assert_eq!(parse_amount("10_000"), Some(10_000));
        assert_eq!(parse_amount("lots"), None);
    }

    #[test]
    fn check_reports_requirement() {
        let b = Budget::new(10);
        assert!(b.check("x", 10).is_ok());
        match b.check("x", 11) {
            Err(Error::BudgetExceeded { required, .. }) => assert_eq!(required, 11),
            other => panic!("unexpected {other:?}"),
        }
    }
}
