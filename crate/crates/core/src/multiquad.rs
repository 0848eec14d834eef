//! Exact arithmetic in real multiquadratic fields `Q(sqrt d1, ..., sqrt dn)`.
//!
//! Elements are finite sums `sum c_m sqrt(m)` over the squarefree radicands
//! `m` of the field (with `m = 1` the rational part), stored with a single
//! common denominator. Products of basis radicals are reduced by pulling
//! the square part `gcd(m1, m2)` into the coefficient.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arithmetic::{rational_is_square, squarefree_part, squarefree_product};
use crate::error::{Error, Result};
use crate::quadratic::{QuadUnit, SquarefreeRadicand};

/// Largest number of independent square classes accepted.
pub const MAX_RANK: usize = 10;

/// A real multiquadratic field, stored by the lexicographically least
/// basis of its group of square classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiquadField {
    gens: Vec<u64>,
    /// `span[mask]` is the squarefree part of the product of the
    /// generators selected by `mask`; `span[0] = 1`.
    span: Vec<u64>,
}

fn span_of(gens: &[u64]) -> Vec<u64> {
    let mut span = vec![1u64; 1 << gens.len()];
    for mask in 1..span.len() {
        let low = mask.trailing_zeros() as usize;
        span[mask] = squarefree_product(span[mask & (mask - 1)], gens[low]);
    }
    span
}

impl MultiquadField {
    /// The field generated by the square roots of `gens` (positive
    /// integers, reduced to their squarefree parts). Rejects dependent
    /// generating sets.
    pub fn new(gens: &[u64]) -> Result<Self> {
        if gens.len() > MAX_RANK {
            return Err(Error::UnsupportedDegree(1 << gens.len()));
        }
        if gens.contains(&0) {
            return Err(Error::InvalidInput("radicand 0".into()));
        }
        let reduced: Vec<u64> = gens.iter().map(|&g| squarefree_part(g)).collect();
        let mut span = span_of(&reduced);
        span.sort_unstable();
        let distinct = span.windows(2).all(|w| w[0] != w[1]);
        if !distinct || reduced.contains(&1) {
            return Err(Error::DependentGenerators(gens.to_vec()));
        }
        // greedy ascending choice gives the lexicographically least basis
        let mut basis: Vec<u64> = Vec::new();
        let mut covered = vec![1u64];
        for &m in &span[1..] {
            if covered.contains(&m) {
                continue;
            }
            basis.push(m);
            covered = span_of(&basis);
        }
        Ok(Self::from_canonical(basis))
    }

    fn from_canonical(gens: Vec<u64>) -> Self {
        let span = span_of(&gens);
        Self { gens, span }
    }

    pub fn rationals() -> Self {
        Self::from_canonical(Vec::new())
    }

    pub fn quadratic(d: SquarefreeRadicand) -> Self {
        Self::from_canonical(vec![d.d()])
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    /// Number of independent square classes `n`; the degree is `2^n`.
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn degree(&self) -> u64 {
        1 << self.gens.len()
    }

    /// All `2^n` basis radicands indexed by generator mask.
    pub fn radicands(&self) -> &[u64] {
        &self.span
    }

    pub fn mask_of(&self, m: u64) -> Option<u32> {
        self.span.iter().position(|&x| x == m).map(|i| i as u32)
    }

    pub fn contains_radicand(&self, m: u64) -> bool {
        self.span.contains(&m)
    }

    pub fn contains(&self, a: &MqElement) -> bool {
        a.coeffs.keys().all(|&m| self.contains_radicand(m))
    }

    pub fn is_subfield_of(&self, other: &MultiquadField) -> bool {
        self.gens.iter().all(|&g| other.contains_radicand(g))
    }

    /// Radicands of the `2^n - 1` quadratic subfields, ascending.
    pub fn quadratic_subfields(&self) -> Vec<SquarefreeRadicand> {
        let mut v: Vec<u64> = self.span[1..].to_vec();
        v.sort_unstable();
        v.into_iter()
            .map(|m| SquarefreeRadicand::new(m).expect("span elements are squarefree and > 1"))
            .collect()
    }

    /// Writes the field as `k'(sqrt d)` with `d` the largest canonical
    /// generator.
    pub fn split_top(&self) -> Option<(MultiquadField, u64)> {
        let (&d, rest) = self.gens.split_last()?;
        Some((Self::from_canonical(rest.to_vec()), d))
    }

    /// The subfield generated by the given radicands (which must lie in
    /// this field).
    pub fn subfield(&self, gens: &[u64]) -> Result<MultiquadField> {
        let sub = MultiquadField::new(gens)?;
        if !sub.is_subfield_of(self) {
            return Err(Error::NotSubfield { field: self.to_string(), sub: sub.to_string() });
        }
        Ok(sub)
    }

    /// Ramification index of the rational prime `l` in this field.
    pub fn ramification_index(&self, l: u64) -> u64 {
        let unramified = if l == 2 {
            self.span.iter().filter(|&&m| m % 4 == 1).count() as u64
        } else {
            self.span.iter().filter(|&&m| m % l != 0).count() as u64
        };
        self.degree() / unramified
    }

    /// Stable textual descriptor, e.g. `Q(sqrt2,sqrt3)`.
    pub fn descriptor(&self) -> String {
        let parts: Vec<String> = self.gens.iter().map(|g| format!("sqrt{g}")).collect();
        format!("Q({})", parts.join(","))
    }
}

impl fmt::Display for MultiquadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "Q");
        }
        let parts: Vec<String> = self.gens.iter().map(|g| format!("sqrt({g})")).collect();
        write!(f, "Q({})", parts.join(", "))
    }
}

/// `sum coeffs[m] sqrt(m) / den` with `den > 0` and the content of the
/// coefficients coprime to `den`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MqElement {
    coeffs: BTreeMap<u64, BigInt>,
    den: BigInt,
}

impl MqElement {
    pub fn zero() -> Self {
        Self { coeffs: BTreeMap::new(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::integer(BigInt::one())
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::from_parts(BTreeMap::from([(1, n.into())]), BigInt::one())
    }

    pub fn rational(r: &BigRational) -> Self {
        Self::from_parts(BTreeMap::from([(1, r.numer().clone())]), r.denom().clone())
    }

    /// `sqrt(m)` for squarefree `m`.
    pub fn sqrt_of(m: u64) -> Self {
        Self::from_parts(BTreeMap::from([(m, BigInt::one())]), BigInt::one())
    }

    /// `sum c_m sqrt(m)` from (radicand, coefficient) pairs; radicands need
    /// not be squarefree.
    pub fn from_terms<I: IntoIterator<Item = (u64, BigRational)>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, (m, c)| {
            let core = squarefree_part(m);
            let root = num_integer::Roots::sqrt(&(m / core));
            let c = c * BigRational::from_integer(BigInt::from(root));
            &acc + &Self::from_parts(BTreeMap::from([(core, c.numer().clone())]), c.denom().clone())
        })
    }

    pub fn from_quad_unit(u: &QuadUnit) -> Self {
        let den = if u.half { BigInt::from(2u8) } else { BigInt::one() };
        Self::from_parts(BTreeMap::from([(1, u.x.clone()), (u.d, u.y.clone())]), den)
    }

    fn from_parts(mut coeffs: BTreeMap<u64, BigInt>, mut den: BigInt) -> Self {
        coeffs.retain(|_, c| !c.is_zero());
        if coeffs.is_empty() {
            return Self::zero();
        }
        if den.is_negative() {
            den = -den;
            for c in coeffs.values_mut() {
                *c = -&*c;
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in coeffs.values() {
                if g.is_one() {
                    break;
                }
                g = g.gcd(c);
            }
            if !g.is_one() {
                den /= &g;
                for c in coeffs.values_mut() {
                    *c /= &g;
                }
            }
        }
        Self { coeffs, den }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.keys().all(|&m| m == 1)
    }

    /// Coefficient of `sqrt(m)`.
    pub fn coeff(&self, m: u64) -> BigRational {
        match self.coeffs.get(&m) {
            Some(c) => BigRational::new(c.clone(), self.den.clone()),
            None => BigRational::zero(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, BigRational)> + '_ {
        self.coeffs.iter().map(|(&m, c)| (m, BigRational::new(c.clone(), self.den.clone())))
    }

    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let coeffs = self.coeffs.iter().map(|(&m, c)| (m, c * r.numer())).collect();
        Self::from_parts(coeffs, &self.den * r.denom())
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(n.clone()))
    }

    /// `self * sqrt(d)` for squarefree `d`.
    pub fn mul_sqrt(&self, d: u64) -> Self {
        self * &Self::sqrt_of(d)
    }

    /// Largest coefficient size in decimal digits.
    pub fn digits(&self) -> usize {
        self.coeffs
            .values()
            .chain(std::iter::once(&self.den))
            .map(|c| c.magnitude().to_string().len())
            .max()
            .unwrap_or(1)
    }

    /// Multiplies by -1 if needed so that the coefficient of the smallest
    /// radicand is positive.
    pub fn normalize_sign(self) -> Self {
        match self.coeffs.values().next() {
            Some(c) if c.is_negative() => -self,
            _ => self,
        }
    }
}

impl fmt::Display for MqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .terms()
            .map(|(m, c)| if m == 1 { c.to_string() } else { format!("{c} * sqrt({m})") })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Neg for MqElement {
    type Output = MqElement;
    fn neg(mut self) -> MqElement {
        for c in self.coeffs.values_mut() {
            *c = -&*c;
        }
        self
    }
}

impl Neg for &MqElement {
    type Output = MqElement;
    fn neg(self) -> MqElement {
        -self.clone()
    }
}

impl Add for &MqElement {
    type Output = MqElement;
    fn add(self, rhs: &MqElement) -> MqElement {
        if self.den == rhs.den {
            let mut coeffs = self.coeffs.clone();
            for (&m, c) in &rhs.coeffs {
                *coeffs.entry(m).or_insert_with(BigInt::zero) += c;
            }
            return MqElement::from_parts(coeffs, self.den.clone());
        }
        let mut coeffs: BTreeMap<u64, BigInt> = self.coeffs.iter().map(|(&m, c)| (m, c * &rhs.den)).collect();
        for (&m, c) in &rhs.coeffs {
            *coeffs.entry(m).or_insert_with(BigInt::zero) += c * &self.den;
        }
        MqElement::from_parts(coeffs, &self.den * &rhs.den)
    }
}

impl Sub for &MqElement {
    type Output = MqElement;
    fn sub(self, rhs: &MqElement) -> MqElement {
        self + &(-rhs)
    }
}

impl Mul for &MqElement {
    type Output = MqElement;
    fn mul(self, rhs: &MqElement) -> MqElement {
        let mut coeffs: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (&m1, c1) in &self.coeffs {
            for (&m2, c2) in &rhs.coeffs {
                let g = m1.gcd(&m2);
                let m = (m1 / g) * (m2 / g);
                let term = if g == 1 { c1 * c2 } else { c1 * c2 * BigInt::from(g) };
                *coeffs.entry(m).or_insert_with(BigInt::zero) += term;
            }
        }
        MqElement::from_parts(coeffs, &self.den * &rhs.den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MqElement {
            type Output = MqElement;
            fn $m(self, rhs: MqElement) -> MqElement {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Product in `k`; both factors must lie in `k`.
pub fn mq_mul(a: &MqElement, b: &MqElement, k: &MultiquadField) -> Result<MqElement> {
    for x in [a, b] {
        if !k.contains(x) {
            return Err(Error::InvalidInput(format!("{x} does not lie in {k}")));
        }
    }
    Ok(a * b)
}

/// A character of the elementary abelian group `Gal(k/Q)`, recorded as the
/// sign it puts on every basis radical of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaloisChar {
    signs: BTreeMap<u64, i8>,
}

impl GaloisChar {
    /// The automorphism negating `sqrt(g_i)` for the canonical generators
    /// selected by `flips`.
    pub fn from_mask(k: &MultiquadField, flips: u32) -> Self {
        let signs = k
            .span
            .iter()
            .enumerate()
            .map(|(mask, &m)| (m, if (mask as u32 & flips).count_ones() % 2 == 1 { -1 } else { 1 }))
            .collect();
        Self { signs }
    }

    /// The automorphism with the given signs on a generating set of `k`
    /// (generators not listed are fixed).
    pub fn from_signs(k: &MultiquadField, signs: &[(u64, i8)]) -> Result<Self> {
        // solve for the flip mask on canonical generators by brute force
        let n = k.rank();
        'masks: for flips in 0..(1u32 << n) {
            let chi = Self::from_mask(k, flips);
            for &(g, s) in signs {
                match chi.signs.get(&squarefree_part(g)) {
                    Some(&t) if t == s => {}
                    Some(_) => continue 'masks,
                    None => return Err(Error::InvalidInput(format!("sqrt({g}) is not in {k}"))),
                }
            }
            return Ok(chi);
        }
        Err(Error::InvalidInput("sign assignment is not a field automorphism".into()))
    }

    pub fn identity(k: &MultiquadField) -> Self {
        Self::from_mask(k, 0)
    }

    /// Every element of `Gal(k/Q)`, identity first.
    pub fn all(k: &MultiquadField) -> Vec<Self> {
        (0..(1u32 << k.rank())).map(|f| Self::from_mask(k, f)).collect()
    }

    pub fn sign(&self, m: u64) -> Option<i8> {
        self.signs.get(&m).copied()
    }

    pub fn is_identity(&self) -> bool {
        self.signs.values().all(|&s| s == 1)
    }

    pub fn compose(&self, other: &GaloisChar) -> GaloisChar {
        let signs = self.signs.iter().map(|(&m, &s)| (m, s * other.signs.get(&m).copied().unwrap_or(1))).collect();
        GaloisChar { signs }
    }

    /// True when the character fixes every element of `sub`.
    pub fn fixes(&self, sub: &MultiquadField) -> bool {
        sub.radicands().iter().all(|m| self.signs.get(m) == Some(&1))
    }
}

/// Galois conjugate of `a` under `chi`.
pub fn apply_char(a: &MqElement, chi: &GaloisChar) -> MqElement {
    let coeffs = a
        .coeffs
        .iter()
        .map(|(&m, c)| {
            let s = chi.signs.get(&m).copied().expect("element lies in the character's field");
            (m, if s < 0 { -c } else { c.clone() })
        })
        .collect();
    MqElement { coeffs, den: a.den.clone() }
}

/// `N_{k/sub}(a)`: product of the conjugates of `a` by the automorphisms
/// of `k` fixing `sub`.
pub fn relative_norm(a: &MqElement, k: &MultiquadField, sub: &MultiquadField) -> Result<MqElement> {
    if !sub.is_subfield_of(k) {
        return Err(Error::NotSubfield { field: k.to_string(), sub: sub.to_string() });
    }
    if !k.contains(a) {
        return Err(Error::InvalidInput(format!("{a} does not lie in {k}")));
    }
    let mut acc = MqElement::one();
    for chi in GaloisChar::all(k).iter().filter(|c| c.fixes(sub)) {
        acc = &acc * &apply_char(a, chi);
    }
    Ok(acc)
}

/// `N_{k/Q}(a)` as a rational number.
pub fn absolute_norm(a: &MqElement, k: &MultiquadField) -> Result<BigRational> {
    Ok(relative_norm(a, k, &MultiquadField::rationals())?.coeff(1))
}

/// Writes `a = a0 + a1 sqrt(d)` with `a0, a1` in `sub`, where
/// `k = sub(sqrt d)`.
fn split(a: &MqElement, sub: &MultiquadField, d: u64) -> (MqElement, MqElement) {
    let mut lo = BTreeMap::new();
    let mut hi = BTreeMap::new();
    for (&m, c) in &a.coeffs {
        if sub.contains_radicand(m) {
            lo.insert(m, c.clone());
        } else {
            // sqrt(m) = (g/d) sqrt(m') sqrt(d) with m' = sqf(m d), g = gcd(m, d)
            let g = m.gcd(&d);
            hi.insert(squarefree_product(m, d), c * BigInt::from(g));
        }
    }
    (
        MqElement::from_parts(lo, a.den.clone()),
        MqElement::from_parts(hi, &a.den * BigInt::from(d)),
    )
}

fn inverse_in(a: &MqElement, k: &MultiquadField) -> Option<MqElement> {
    if a.is_zero() {
        return None;
    }
    match k.split_top() {
        None => {
            let r = a.coeff(1);
            Some(MqElement::rational(&r.recip()))
        }
        Some((sub, d)) => {
            let (a0, a1) = split(a, &sub, d);
            if a1.is_zero() {
                return inverse_in(&a0, &sub);
            }
            let norm = &(&a0 * &a0) - &(&a1 * &a1).scale_int(&BigInt::from(d));
            let conj = &a0 - &a1.mul_sqrt(d);
            Some(&conj * &inverse_in(&norm, &sub)?)
        }
    }
}

/// Multiplicative inverse of a nonzero element of `k`.
pub fn inverse(a: &MqElement, k: &MultiquadField) -> Result<MqElement> {
    if !k.contains(a) {
        return Err(Error::InvalidInput(format!("{a} does not lie in {k}")));
    }
    inverse_in(a, k).ok_or_else(|| Error::InvalidInput("inverse of zero".into()))
}

fn sqrt_in(a: &MqElement, k: &MultiquadField) -> Option<MqElement> {
    if a.is_zero() {
        return Some(MqElement::zero());
    }
    let Some((sub, d)) = k.split_top() else {
        return rational_is_square(&a.coeff(1)).map(|r| MqElement::rational(&r));
    };
    let (a0, a1) = split(a, &sub, d);
    if a1.is_zero() {
        if let Some(u) = sqrt_in(&a0, &sub) {
            return Some(u);
        }
        let over_d = a0.scale(&BigRational::new(BigInt::one(), BigInt::from(d)));
        return sqrt_in(&over_d, &sub).map(|v| v.mul_sqrt(d));
    }
    // beta = u + v sqrt d: u^2 + d v^2 = a0, 2uv = a1, so
    // N(a) = (u^2 - d v^2)^2 and u^2 = (a0 +- gamma)/2.
    let norm = &(&a0 * &a0) - &(&a1 * &a1).scale_int(&BigInt::from(d));
    let gamma = sqrt_in(&norm, &sub)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    for cand in [&a0 + &gamma, &a0 - &gamma] {
        let t = cand.scale(&half);
        if t.is_zero() {
            continue;
        }
        if let Some(u) = sqrt_in(&t, &sub) {
            // v = a1 / (2u) = a1 u / (2t)
            let inv = inverse_in(&t.scale_int(&BigInt::from(2u8)), &sub)?;
            let v = &(&a1 * &u) * &inv;
            return Some(&u + &v.mul_sqrt(d));
        }
    }
    None
}

/// Square root of `a` in `k`, decided exactly by descending through
/// `k = k'(sqrt d)` with relative norms and half-traces. The returned root
/// has a positive leading coefficient and re-squares to `a`.
pub fn mq_sqrt(a: &MqElement, k: &MultiquadField) -> Result<Option<MqElement>> {
    if !k.contains(a) {
        return Err(Error::InvalidInput(format!("{a} does not lie in {k}")));
    }
    let Some(root) = sqrt_in(a, k) else {
        return Ok(None);
    };
    let root = root.normalize_sign();
    if &(&root * &root) != a {
        return Err(Error::Inconsistent(format!("square root of {a} failed to re-square")));
    }
    Ok(Some(root))
}
