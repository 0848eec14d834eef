//! Real quadratic fields `Q(sqrt d)`: fundamental units from continued
//! fractions, narrow and wide class numbers from cycles of reduced
//! indefinite forms, and the genus 2-rank.

mod analytic;
mod forms;
mod unit;

use std::fmt;

use crate::arithmetic::{factor, is_squarefree};
use crate::budget::StepBudget;
use crate::error::{Error, Result};

pub use analytic::{analytic_h_estimate, AnalyticEstimate};
pub use forms::{cycles, narrow_class_number, narrow_two_rank_by_cycles, reduced_forms, IndefForm};
pub use unit::{fundamental_unit, QuadUnit};

/// A squarefree `d >= 2`, labelling `Q(sqrt d)`, together with the field
/// discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquarefreeRadicand {
    d: u64,
    disc: u64,
}

impl SquarefreeRadicand {
    pub fn new(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("radicand {d} must be at least 2")));
        }
        if !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        let disc = if d % 4 == 1 { d } else { 4 * d };
        Ok(Self { d, disc })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn discriminant(&self) -> u64 {
        self.disc
    }

    /// Number of prime discriminants in the factorisation of the field
    /// discriminant, i.e. the number of ramified primes.
    pub fn ramified_primes(&self) -> Vec<u64> {
        factor(self.disc).into_iter().map(|(p, _)| p).collect()
    }
}

impl fmt::Display for SquarefreeRadicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

/// Exact invariants of one real quadratic field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadInvariants {
    pub radicand: SquarefreeRadicand,
    pub eps: QuadUnit,
    pub unit_norm: i8,
    /// Wide class number.
    pub h: u64,
    /// Narrow class number.
    pub h_plus: u64,
    /// 2-part of `h`.
    pub h2: u64,
    pub two_rank_narrow: u32,
}

pub fn two_part(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    1 << n.trailing_zeros()
}

/// Wide class number from the narrow one and the norm of the fundamental
/// unit.
pub fn wide_from_narrow(h_plus: u64, unit_norm: i8) -> Result<u64> {
    match unit_norm {
        -1 => Ok(h_plus),
        1 if h_plus.is_multiple_of(2) => Ok(h_plus / 2),
        1 => Err(Error::Inconsistent(format!(
            "narrow class number {h_plus} is odd but the fundamental unit has norm +1"
        ))),
        n => Err(Error::Inconsistent(format!("unit norm {n}"))),
    }
}

impl QuadInvariants {
    /// Assembles invariants from an already known unit and narrow class
    /// number; used by caches that store both.
    pub fn from_parts(radicand: SquarefreeRadicand, eps: QuadUnit, h_plus: u64) -> Result<Self> {
        let unit_norm = eps.norm();
        let h = wide_from_narrow(h_plus, unit_norm)?;
        Ok(Self {
            radicand,
            unit_norm,
            h,
            h_plus,
            h2: two_part(h),
            two_rank_narrow: radicand.ramified_primes().len() as u32 - 1,
            eps,
        })
    }
}

pub fn invariants(rad: SquarefreeRadicand, budget: &StepBudget) -> Result<QuadInvariants> {
    let eps = fundamental_unit(rad, budget)?;
    let h_plus = narrow_class_number(rad)?;
    QuadInvariants::from_parts(rad, eps, h_plus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(d: u64) -> QuadInvariants {
        invariants(SquarefreeRadicand::new(d).unwrap(), &StepBudget::default()).unwrap()
    }

    #[test]
    fn radicand_validation() {
        assert!(SquarefreeRadicand::new(12).is_err());
        assert!(SquarefreeRadicand::new(1).is_err());
        assert!(SquarefreeRadicand::new(9).is_err());
        assert_eq!(SquarefreeRadicand::new(5).unwrap().discriminant(), 5);
        assert_eq!(SquarefreeRadicand::new(3).unwrap().discriminant(), 12);
    }

    #[test]
    fn remark_values_for_first_table_triple() {
        // p = 13, q = 43, s = 3
        assert_eq!(inv(3 * 43).h2, 1);
        assert_eq!(inv(13 * 43).h2, 2);
        assert_eq!(inv(2 * 13 * 43).h2, 2);
        assert_eq!(inv(43).h2, 1);
        assert_eq!(inv(2 * 43).h2, 1);
        assert_eq!(inv(13).h2, 1);
        assert_eq!(inv(2).h2, 1);
    }

    #[test]
    fn table_values_for_pqs() {
        assert_eq!(inv(1677).h2, 4);
        assert_eq!(inv(11977).h2, 8);
        let t = inv(1677);
        assert_eq!(t.two_rank_narrow, 2);
    }

    #[test]
    fn narrow_wide_rule() {
        for d in 2..400u64 {
            if !is_squarefree(d) {
                continue;
            }
            let t = inv(d);
            let factor = if t.unit_norm == -1 { 1 } else { 2 };
            assert_eq!(t.h_plus, t.h * factor, "d = {d}");
            assert_eq!(t.h2, two_part(t.h));
        }
    }
}
