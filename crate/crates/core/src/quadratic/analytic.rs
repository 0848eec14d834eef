use super::{fundamental_unit, SquarefreeRadicand};
use crate::arithmetic::kronecker_i64;
use crate::budget::StepBudget;
use crate::error::{Error, Result};

/// Floating-point class number estimate from the analytic class number
/// formula `h = sqrt(D) L(1, chi_D) / (2 log eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticEstimate {
    pub value: f64,
    pub rounded: u64,
    /// Set when `value` lies within 0.2 of a half-integer, where rounding
    /// is not trustworthy.
    pub near_boundary: bool,
}

/// Estimates `h` with `L(1, chi)` replaced by the partial Dirichlet series
/// `sum chi(n)/n` truncated at the first multiple of `D` that is at least
/// `cutoff`. Since `chi` is even, the partial character sums have mean
/// zero over a period and the tail is `O(D^{3/2} / N^2)`.
pub fn analytic_h_estimate(rad: SquarefreeRadicand, cutoff: u64) -> Result<AnalyticEstimate> {
    if cutoff < 1000 {
        return Err(Error::InvalidInput(format!("cutoff {cutoff} is below 1000")));
    }
    let disc = rad.discriminant();
    let chi: Vec<f64> = (0..disc)
        .map(|n| if n == 0 { Ok(0.0) } else { kronecker_i64(disc as i64, n as i64).map(f64::from) })
        .collect::<Result<_>>()?;
    let terms = cutoff.div_ceil(disc) * disc;
    // pairwise-ish accumulation per period keeps rounding error small
    let mut l = 0.0f64;
    let mut n = 1u64;
    while n <= terms {
        let mut block = 0.0f64;
        let end = (n + disc).min(terms + 1);
        for m in n..end {
            let c = chi[(m % disc) as usize];
            if c != 0.0 {
                block += c / m as f64;
            }
        }
        l += block;
        n = end;
    }
    let eps = fundamental_unit(rad, &StepBudget::default())?;
    let value = (disc as f64).sqrt() * l / (2.0 * eps.ln());
    let rounded = value.round().max(1.0) as u64;
    let frac = value - value.floor();
    Ok(AnalyticEstimate { value, rounded, near_boundary: (frac - 0.5).abs() < 0.2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let e = analytic_h_estimate(SquarefreeRadicand::new(5).unwrap(), 10_000).unwrap();
        assert_eq!(e.rounded, 1);
        assert!(!e.near_boundary);
        let e = analytic_h_estimate(SquarefreeRadicand::new(2).unwrap(), 10_000).unwrap();
        assert_eq!(e.rounded, 1);
        assert!(analytic_h_estimate(SquarefreeRadicand::new(2).unwrap(), 10).is_err());
    }

    #[test]
    fn pqs_estimate_has_two_part_four() {
        let e = analytic_h_estimate(SquarefreeRadicand::new(1677).unwrap(), 100_000).unwrap();
        assert!(!e.near_boundary);
        assert_eq!(super::super::two_part(e.rounded), 4);
    }
}
