use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::Signed;

use super::SquarefreeRadicand;
use crate::error::{Error, Result};

/// Indefinite binary quadratic form `a x^2 + b xy + c y^2` with positive
/// non-square discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndefForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl IndefForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4u8) * &self.a * &self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == BigInt::from(1u8)
    }

    /// `0 < b < sqrt D` and `sqrt D - b < 2|a| < sqrt D + b`, using
    /// `floor(sqrt D)` since `sqrt D` is irrational.
    pub fn is_reduced(&self) -> bool {
        let disc = self.discriminant();
        if !disc.is_positive() {
            return false;
        }
        let s = disc.sqrt();
        let two_a = BigInt::from(2u8) * self.a.abs();
        self.b.is_positive() && self.b <= s && two_a > &s - &self.b && two_a <= &s + &self.b
    }

    /// One reduction step: the properly equivalent neighbour
    /// `(c, b', (b'^2 - D)/4c)` with `b' = -b mod 2c` and
    /// `sqrt D - 2|c| < b' < sqrt D`.
    pub fn rho(&self, disc: &BigInt, root: &BigInt) -> IndefForm {
        let m = BigInt::from(2u8) * self.c.abs();
        let b = root - (root + &self.b).mod_floor(&m);
        let c = (&b * &b - disc) / (BigInt::from(4u8) * &self.c);
        IndefForm { a: self.c.clone(), b, c }
    }

    /// The form in the inverse class, `(c, b, a)`.
    pub fn inverse_reduced(&self) -> IndefForm {
        IndefForm { a: self.c.clone(), b: self.b.clone(), c: self.a.clone() }
    }
}

impl fmt::Display for IndefForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Every reduced primitive form of discriminant `disc`, both signs of `a`.
pub fn reduced_forms(disc: u64) -> Result<Vec<IndefForm>> {
    let s = disc.sqrt();
    if s * s == disc || disc % 4 > 1 {
        return Err(Error::InvalidInput(format!("{disc} is not a non-square discriminant")));
    }
    let mut out = Vec::new();
    let mut b = disc % 2;
    if b == 0 {
        b = 2;
    }
    while b <= s {
        let m = (disc - b * b) / 4;
        let lo = (s - b + 2) / 2; // 2|a| >= s - b + 1
        let hi = (s + b) / 2; // 2|a| <= s + b
        for a in lo.max(1)..=hi {
            if !m.is_multiple_of(a) {
                continue;
            }
            let c = m / a;
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            let (ai, bi, ci) = (a as i64, b as i64, c as i64);
            out.push(IndefForm::new(ai, bi, -ci));
            out.push(IndefForm::new(-ai, bi, ci));
        }
        b += 2;
    }
    Ok(out)
}

/// Reduced forms grouped into rho-cycles. Cycles are listed in order of
/// their smallest member, each starting from that member.
pub fn cycles(disc: u64) -> Result<Vec<Vec<IndefForm>>> {
    let forms = reduced_forms(disc)?;
    let d = BigInt::from(disc);
    let root = BigInt::from(disc.sqrt());
    let index: HashMap<IndefForm, usize> = forms.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    let mut seen = vec![false; forms.len()];
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..forms.len()).collect();
    order.sort_by(|&i, &j| forms[i].cmp(&forms[j]));
    for start in order {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut f = forms[start].clone();
        loop {
            let i = *index
                .get(&f)
                .ok_or_else(|| Error::Inconsistent(format!("rho left the reduced set at {f}")))?;
            if seen[i] {
                break;
            }
            seen[i] = true;
            let next = f.rho(&d, &root);
            cycle.push(f);
            f = next;
        }
        if f != cycle[0] {
            return Err(Error::Inconsistent(format!("rho orbit of {} is not a cycle", cycle[0])));
        }
        out.push(cycle);
    }
    Ok(out)
}

/// Narrow class number `h+(D)` as the number of cycles of reduced forms.
pub fn narrow_class_number(rad: SquarefreeRadicand) -> Result<u64> {
    Ok(cycles(rad.discriminant())?.len() as u64)
}

/// 2-rank of the narrow class group counted directly: the classes of
/// order dividing 2 are the cycles that contain the inverse of their own
/// members.
pub fn narrow_two_rank_by_cycles(rad: SquarefreeRadicand) -> Result<u32> {
    let cs = cycles(rad.discriminant())?;
    let ambiguous = cs
        .iter()
        .filter(|cycle| {
            let inv = cycle[0].inverse_reduced();
            cycle.contains(&inv)
        })
        .count() as u64;
    if !ambiguous.is_power_of_two() {
        return Err(Error::Inconsistent(format!("{ambiguous} ambiguous classes")));
    }
    Ok(ambiguous.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::is_squarefree;

    fn rad(d: u64) -> SquarefreeRadicand {
        SquarefreeRadicand::new(d).unwrap()
    }

    /// Independent enumeration straight from the definition of a reduced
    /// form, scanning every (a, b) in a box.
    fn brute_reduced(disc: i64) -> Vec<IndefForm> {
        let mut v = Vec::new();
        let bound = (disc as f64).sqrt() as i64 + 2;
        for a in -bound..=bound {
            if a == 0 {
                continue;
            }
            for b in 1..=bound {
                let num = b * b - disc;
                if num % (4 * a) != 0 {
                    continue;
                }
                let f = IndefForm::new(a, b, num / (4 * a));
                if f.is_reduced() && f.is_primitive() {
                    v.push(f);
                }
            }
        }
        v.sort();
        v
    }

    #[test]
    fn enumeration_matches_definition() {
        for d in [2u64, 3, 5, 6, 7, 10, 13, 15, 21, 34, 79, 129, 221, 559] {
            let disc = rad(d).discriminant();
            let mut got = reduced_forms(disc).unwrap();
            got.sort();
            assert_eq!(got, brute_reduced(disc as i64), "d = {d}");
        }
    }

    #[test]
    fn rho_preserves_reducedness_and_discriminant() {
        let disc = rad(1677).discriminant();
        let d = BigInt::from(disc);
        let root = BigInt::from(disc.sqrt());
        for f in reduced_forms(disc).unwrap() {
            let g = f.rho(&d, &root);
            assert!(g.is_reduced(), "{f} -> {g}");
            assert_eq!(g.discriminant(), d);
        }
    }

    #[test]
    fn d5_has_one_cycle() {
        assert_eq!(narrow_class_number(rad(5)).unwrap(), 1);
        let cs = cycles(5).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 2);
    }

    #[test]
    fn known_narrow_class_numbers() {
        // h+ for Q(sqrt 3) is 2 (unit norm +1, h = 1); Q(sqrt 34): h = 2, h+ = 4
        assert_eq!(narrow_class_number(rad(3)).unwrap(), 2);
        assert_eq!(narrow_class_number(rad(2)).unwrap(), 1);
        assert_eq!(narrow_class_number(rad(34)).unwrap(), 4);
        assert_eq!(narrow_class_number(rad(79)).unwrap(), 6);
        assert_eq!(narrow_class_number(rad(10)).unwrap(), 2);
    }

    #[test]
    fn genus_two_rank() {
        for d in 2..1500u64 {
            if !is_squarefree(d) {
                continue;
            }
            let r = rad(d);
            let t = r.ramified_primes().len() as u32;
            assert_eq!(narrow_two_rank_by_cycles(r).unwrap(), t - 1, "d = {d}");
        }
        assert_eq!(narrow_two_rank_by_cycles(rad(1677)).unwrap(), 2);
    }

    #[test]
    fn rejects_square_discriminant() {
        assert!(reduced_forms(16).is_err());
        assert!(reduced_forms(7).is_err());
    }
}
