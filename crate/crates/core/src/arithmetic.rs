//! Integer primitives: certified primality, congruence sieving, the
//! Kronecker symbol and the quadratic Hilbert symbol over the rationals.
//!
//! Everything here is a pure function of its arguments.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Miller-Rabin bases that decide primality for every n < 3.3 * 10^24,
/// which covers all of u64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for `n >= 2`.
pub fn is_prime(n: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("primality of {n} is undefined")));
    }
    for &p in &MR_BASES {
        if n == p {
            return Ok(true);
        }
        if n.is_multiple_of(p) {
            return Ok(false);
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// [`is_prime`] for arbitrary-precision input. Values above `u64::MAX` are
/// rejected rather than answered probabilistically.
pub fn is_prime_big(n: &BigUint) -> Result<bool> {
    match n.to_u64() {
        Some(v) => is_prime(v),
        None => Err(Error::OutOfPrimalityRange(n.to_string())),
    }
}

/// Prime factorisation by trial division. Adequate for the radicands this
/// crate handles (well below 10^12).
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factor(n).iter().all(|&(_, e)| e == 1)
}

/// The squarefree kernel of `n` modulo squares, i.e. `n / m^2` with `m^2`
/// the largest square dividing `n`.
pub fn squarefree_part(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product()
}

/// Squarefree part of a product of two squarefree numbers, without factoring.
pub fn squarefree_product(a: u64, b: u64) -> u64 {
    let g = a.gcd(&b);
    (a / g) * (b / g)
}

/// A residue class `residue mod modulus` with `residue < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CongruenceClass {
    residue: u64,
    modulus: u64,
}

impl CongruenceClass {
    pub fn new(residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 || residue >= modulus {
            return Err(Error::InvalidInput(format!(
                "{residue} mod {modulus} is not a reduced residue class"
            )));
        }
        Ok(Self { residue, modulus })
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }
}

impl fmt::Display for CongruenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// All primes `<= bound` lying in `class`, ascending.
pub fn sieve_primes(bound: u64, class: CongruenceClass) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n)
        .filter(|&k| !composite[k] && class.contains(k as u64))
        .map(|k| k as u64)
        .collect()
}

/// Kronecker symbol `(a|n)` for `n != 0`.
pub fn kronecker(a: &BigInt, n: &BigInt) -> Result<i8> {
    if n.is_zero() {
        return Err(Error::InvalidInput("Kronecker symbol (a|0) is not defined here".into()));
    }
    let mut result: i8 = 1;
    let mut n = n.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    if a.is_even() && n.is_even() {
        return Ok(0);
    }
    let v = n.trailing_zeros().unwrap_or(0);
    n >>= v;
    if v % 2 == 1 {
        // (a|2) for odd a
        let r = a.mod_floor(&BigInt::from(8u8)).to_u8().unwrap_or(0);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // n is now odd and positive: Jacobi symbol.
    let mut a = a.mod_floor(&n);
    while !a.is_zero() {
        let t = a.trailing_zeros().unwrap_or(0);
        a >>= t;
        let n8 = (&n % 8u8).to_u8().unwrap_or(0);
        if t % 2 == 1 && (n8 == 3 || n8 == 5) {
            result = -result;
        }
        if (&a % 4u8) == BigInt::from(3u8) && (&n % 4u8) == BigInt::from(3u8) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { result } else { 0 })
}

pub fn kronecker_i64(a: i64, n: i64) -> Result<i8> {
    kronecker(&BigInt::from(a), &BigInt::from(n))
}

/// A place of the rationals: a finite prime or the real place.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(BigUint),
    Real,
}

impl Place {
    /// Finite place at `p`; `p` must be a certified prime.
    pub fn finite(p: u64) -> Result<Self> {
        if p < 2 || !is_prime(p)? {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(Place::Finite(BigUint::from(p)))
    }

    pub fn finite_big(p: BigUint) -> Result<Self> {
        if !is_prime_big(&p)? {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(Place::Finite(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Real => write!(f, "inf"),
        }
    }
}

/// Writes `n = p^v * u` with `p` not dividing `u`.
fn split_valuation(n: &BigInt, p: &BigInt) -> (u64, BigInt) {
    let mut v = 0;
    let mut u = n.clone();
    loop {
        let (q, r) = u.div_rem(p);
        if !r.is_zero() {
            break;
        }
        u = q;
        v += 1;
    }
    (v, u)
}

/// Integer in the same square class as `x`.
fn square_class_integer(x: &BigRational) -> BigInt {
    x.numer() * x.denom()
}

/// Quadratic Hilbert symbol `(a, b)_v` over Q.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: &Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidInput("Hilbert symbol of zero".into()));
    }
    let a = square_class_integer(a);
    let b = square_class_integer(b);
    match v {
        Place::Real => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Finite(p) => {
            let p = BigInt::from_biguint(Sign::Plus, p.clone());
            let (alpha, u) = split_valuation(&a, &p);
            let (beta, w) = split_valuation(&b, &p);
            if p == BigInt::from(2u8) {
                let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8u8)).to_u8().unwrap_or(0);
                let eps = |x: u8| u64::from(x % 4 == 3);
                let omega = |x: u8| u64::from(x == 3 || x == 5);
                let (u8_, w8) = (m8(&u), m8(&w));
                let e = eps(u8_) * eps(w8) + alpha * omega(w8) + beta * omega(u8_);
                Ok(if e % 2 == 0 { 1 } else { -1 })
            } else {
                let mut s: i8 = 1;
                let half = ((&p - 1u8) / 2u8).is_odd();
                if (alpha * beta) % 2 == 1 && half {
                    s = -s;
                }
                if beta % 2 == 1 {
                    s *= kronecker(&u, &p)?;
                }
                if alpha % 2 == 1 {
                    s *= kronecker(&w, &p)?;
                }
                Ok(s)
            }
        }
    }
}

/// Places at which `(a, b)_v` can be nontrivial: the real place and every
/// prime dividing `2ab` (numerators and denominators).
pub fn hilbert_support(a: &BigRational, b: &BigRational) -> Result<Vec<Place>> {
    let mut primes = vec![2u64];
    for x in [a, b] {
        for part in [x.numer(), x.denom()] {
            let m = part
                .abs()
                .to_u64()
                .ok_or_else(|| Error::InvalidInput(format!("{part} too large to factor")))?;
            primes.extend(factor(m).into_iter().map(|(p, _)| p));
        }
    }
    primes.sort_unstable();
    primes.dedup();
    let mut places: Vec<Place> = primes.into_iter().map(|p| Place::Finite(BigUint::from(p))).collect();
    places.push(Place::Real);
    Ok(places)
}

/// Non-negative rational square root of `x`, if `x` is a rational square.
pub fn rational_is_square(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    if &(&rn * &rn) != n {
        return None;
    }
    let rd = d.sqrt();
    if &(&rd * &rd) != d {
        return None;
    }
    Some(BigRational::new(rn, rd))
}

/// Non-negative integer square root of `n` when `n` is a perfect square.
pub fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn trial(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2).unwrap());
        assert!(!is_prime(1677).unwrap());
        assert!(!is_prime(161_329).unwrap());
        assert!(!is_prime(29 * 83 * 67).unwrap());
        assert!(is_prime(1_000_000_007).unwrap());
        assert!(is_prime(18_446_744_073_709_551_557).unwrap());
        // strong pseudoprime to bases 2..=23
        assert!(!is_prime(3_825_123_056_546_413_051).unwrap());
        assert!(is_prime(1).is_err());
        assert!(is_prime(0).is_err());
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 2..20_000 {
            assert_eq!(is_prime(n).unwrap(), trial(n), "n = {n}");
        }
    }

    #[test]
    fn big_primality_rejects_above_u64() {
        let big = BigUint::from(u64::MAX) + 2u8;
        assert!(matches!(is_prime_big(&big), Err(Error::OutOfPrimalityRange(_))));
        assert!(is_prime_big(&BigUint::from(97u8)).unwrap());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_i64(13, 43).unwrap(), 1);
        assert_eq!(kronecker_i64(2, 5).unwrap(), -1);
        for n in [-7i64, -2, -1, 1, 2, 3, 8, 100] {
            assert_eq!(kronecker_i64(1, n).unwrap(), 1);
        }
        assert!(kronecker_i64(3, 0).is_err());
        assert_eq!(kronecker_i64(5, -1).unwrap(), 1);
        assert_eq!(kronecker_i64(-5, -1).unwrap(), -1);
        assert_eq!(kronecker_i64(4, 6).unwrap(), 0);
        assert_eq!(kronecker_i64(5, 8).unwrap(), -1);
    }

    #[test]
    fn kronecker_is_legendre_for_odd_primes() {
        for n in (3..1000u64).filter(|&n| trial(n)) {
            let mut is_qr = vec![false; n as usize];
            for x in 1..n {
                is_qr[(x * x % n) as usize] = true;
            }
            for a in 1..n {
                let expect = if is_qr[a as usize] { 1 } else { -1 };
                assert_eq!(kronecker_i64(a as i64, n as i64).unwrap(), expect, "({a}|{n})");
            }
        }
    }

    #[test]
    fn sieve_examples() {
        let c = |r, m| CongruenceClass::new(r, m).unwrap();
        assert_eq!(sieve_primes(50, c(5, 8)), vec![5, 13, 29, 37]);
        assert_eq!(sieve_primes(10, c(3, 8)), vec![3]);
        assert_eq!(sieve_primes(2, c(1, 2)), Vec::<u64>::new());
        assert!(CongruenceClass::new(8, 8).is_err());
        assert!(CongruenceClass::new(0, 0).is_err());
    }

    #[test]
    fn sieve_is_filtered_primality() {
        for (r, m) in [(5, 8), (3, 8), (3, 4), (1, 4), (0, 3)] {
            let class = CongruenceClass::new(r, m).unwrap();
            let expect: Vec<u64> = (2..=3000).filter(|&n| class.contains(n) && trial(n)).collect();
            assert_eq!(sieve_primes(3000, class), expect);
        }
    }

    #[test]
    fn hilbert_examples() {
        let p5 = Place::finite(5).unwrap();
        assert_eq!(hilbert_symbol(&q(2, 1), &q(5, 1), &p5).unwrap(), -1);
        let p13 = Place::finite(13).unwrap();
        assert_eq!(hilbert_symbol(&q(-1, 1), &q(13, 1), &p13).unwrap(), 1);
        for b in [q(3, 1), q(-7, 2), q(5, 9)] {
            for v in [Place::Real, Place::finite(2).unwrap(), Place::finite(3).unwrap()] {
                assert_eq!(hilbert_symbol(&q(1, 1), &b, &v).unwrap(), 1);
            }
        }
        let two = Place::finite(2).unwrap();
        assert_eq!(hilbert_symbol(&q(-1, 1), &q(-1, 1), &two).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1, 1), &q(-1, 1), &Place::Real).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(2, 1), &q(3, 1), &two).unwrap(), -1);
        assert!(hilbert_symbol(&q(0, 1), &q(3, 1), &two).is_err());
        assert!(Place::finite(15).is_err());
    }

    /// Brute-force oracle for odd p and valuations <= 1: a primitive
    /// solution of z^2 = a x^2 + b y^2 modulo p^3 lifts to Z_p by Hensel,
    /// and any primitive solution has x or y a unit.
    #[test]
    fn hilbert_matches_local_solvability_at_odd_primes() {
        for p in [3i64, 5, 7] {
            let m = p * p * p;
            let mut square = vec![false; m as usize];
            for z in 0..m {
                square[(z * z % m) as usize] = true;
            }
            let place = Place::finite(p as u64).unwrap();
            for a in [1, 2, 3, 5, 6, 7, 10, 14, 15, -1, -2, -3, -5, -7] {
                for b in [1, 2, 3, 5, 7, 13, -1, -3, -5, -7] {
                    let solvable = (0..m).any(|x| {
                        (0..m).any(|y| {
                            (x % p != 0 || y % p != 0)
                                && square[(a * x * x + b * y * y).rem_euclid(m) as usize]
                        })
                    });
                    let got = hilbert_symbol(&q(a, 1), &q(b, 1), &place).unwrap();
                    assert_eq!(got, if solvable { 1 } else { -1 }, "({a},{b})_{p}");
                }
            }
        }
    }

    #[test]
    fn rational_squares() {
        assert_eq!(rational_is_square(&q(0, 1)), Some(q(0, 1)));
        assert_eq!(rational_is_square(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(rational_is_square(&q(2, 1)), None);
        assert_eq!(rational_is_square(&q(-4, 1)), None);
        assert_eq!(rational_is_square(&q(4, 3)), None);
    }

    #[test]
    fn squarefree_helpers() {
        assert_eq!(squarefree_part(8), 2);
        assert_eq!(squarefree_part(72), 2);
        assert_eq!(squarefree_part(1), 1);
        assert!(is_squarefree(1677));
        assert!(!is_squarefree(12));
        assert_eq!(squarefree_product(26, 6), 39);
        assert_eq!(factor(161_329), vec![(7, 1), (19, 1), (1213, 1)]);
    }
}
