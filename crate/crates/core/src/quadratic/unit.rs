use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SquarefreeRadicand;
use crate::budget::StepBudget;
use crate::error::{Error, Result};

/// A unit `x + y sqrt d`, or `(x + y sqrt d)/2` when `half` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadUnit {
    pub d: u64,
    pub x: BigInt,
    pub y: BigInt,
    pub half: bool,
}

impl QuadUnit {
    /// Builds `(x + y sqrt d)/2`, dropping the halving when both
    /// coordinates are even.
    pub fn from_halves(d: u64, x: BigInt, y: BigInt) -> Self {
        if x.is_even() && y.is_even() {
            Self { d, x: x / 2, y: y / 2, half: false }
        } else {
            Self { d, x, y, half: true }
        }
    }

    /// Exact `(x^2 - d y^2) / (4 if half else 1)`.
    pub fn norm_value(&self) -> BigInt {
        let n = &self.x * &self.x - BigInt::from(self.d) * &self.y * &self.y;
        if self.half {
            n / 4
        } else {
            n
        }
    }

    /// Norm sign; only meaningful for genuine units.
    pub fn norm(&self) -> i8 {
        if self.norm_value().is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn is_unit(&self) -> bool {
        let n = self.norm_value();
        n.is_one() || (-n).is_one()
    }

    /// Natural logarithm of the unit as a real number. For large units the
    /// conjugate is negligible and `log eps = log(2x / denom)`.
    pub fn ln(&self) -> f64 {
        let denom = if self.half { 2.0 } else { 1.0 };
        if self.x.bits() < 500 {
            let x = self.x.to_f64().unwrap_or(f64::INFINITY);
            let y = self.y.to_f64().unwrap_or(f64::INFINITY);
            ((x + y * (self.d as f64).sqrt()) / denom).ln()
        } else {
            let shift = self.x.bits() - 60;
            let top = (&self.x >> shift).to_f64().unwrap_or(f64::INFINITY);
            top.ln() + shift as f64 * std::f64::consts::LN_2 + (2.0f64 / denom).ln()
        }
    }

    /// Decimal digit count of the larger coordinate.
    pub fn digits(&self) -> usize {
        self.x.abs().max(self.y.abs()).to_string().len()
    }
}

impl fmt::Display for QuadUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.half {
            write!(f, "({} + {}*sqrt({}))/2", self.x, self.y, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.x, self.y, self.d)
        }
    }
}

/// Fundamental unit of the maximal order of `Q(sqrt d)`.
///
/// Expands `w = sqrt d` (or `(1 + sqrt d)/2` when `d = 1 mod 4`) with the
/// `(P + sqrt d)/Q` recurrence. The first complete quotient that is again
/// `w` plus an integer marks the end of the period, and the preceding
/// convergent `p/q` yields the unit `p - q w'`.
pub fn fundamental_unit(rad: SquarefreeRadicand, budget: &StepBudget) -> Result<QuadUnit> {
    let d = rad.d();
    let dd = BigInt::from(d);
    let root = BigInt::from(d.sqrt());
    let (p0, q0) = if d % 4 == 1 { (BigInt::one(), BigInt::from(2u8)) } else { (BigInt::zero(), BigInt::one()) };

    let (mut big_p, mut big_q) = (p0.clone(), q0.clone());
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    loop {
        budget.charge(1)?;
        let a = (&big_p + &root).div_floor(&big_q);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);

        let p_next = &a * &big_q - &big_p;
        let q_next = (&dd - &p_next * &p_next) / &big_q;
        big_p = p_next;
        big_q = q_next;

        if big_q == q0 {
            let unit = if q0.is_one() {
                QuadUnit { d, x: h.clone(), y: k.clone(), half: false }
            } else {
                // p - q (1 - sqrt d)/2 = (2p - q + q sqrt d)/2
                QuadUnit::from_halves(d, BigInt::from(2u8) * &h - &k, k.clone())
            };
            if !unit.is_unit() {
                return Err(Error::Inconsistent(format!(
                    "continued fraction of sqrt({d}) produced a non-unit {unit}"
                )));
            }
            return Ok(unit);
        }
    }
}
