//! Unit groups of real multiquadratic fields.
//!
//! Every unit of `k` has a power of 2 lying in the group generated by
//! `-1` and the fundamental units of the quadratic subfields (Wada). So
//! the full unit group is reached from that subgroup by repeatedly
//! adjoining square roots of `+-` products of generators until none of
//! them is a square in `k`. Each adjunction doubles the unit index.
//!
//! Squareness is first screened with quadratic residue characters at
//! primes splitting completely in `k`: a square of `k` is a square modulo
//! every degree one prime, so only products in the kernel of the
//! character matrix ever reach the exact square root test.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arithmetic::is_prime;
use crate::error::{Error, Result};
use crate::multiquad::{absolute_norm, mq_sqrt, MqElement, MultiquadField};
use crate::quadratic::SquarefreeRadicand;
use crate::store::InvariantStore;

/// Largest supported degree.
pub const MAX_DEGREE: u64 = 8;

/// Number of split primes used to screen products.
const SCREEN_PRIMES: usize = 24;

/// A unit together with its exponent vector over the fundamental units of
/// the quadratic subfields (ascending radicand order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub value: MqElement,
    pub exponents: Vec<Ratio<i64>>,
}

/// A fundamental system of units of `field` modulo `+-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSystem {
    pub field: MultiquadField,
    /// Radicands labelling the coordinates of the exponent vectors.
    pub base: Vec<SquarefreeRadicand>,
    pub gens: Vec<Unit>,
    /// `[E_k : prod E_{k_i}]`, a power of 2.
    pub q_index: u64,
}

impl UnitSystem {
    /// Solves `w = sum c_i gens[i].exponents` over the rationals; `None`
    /// if the generators are dependent.
    pub fn coordinates(&self, w: &[Ratio<i64>]) -> Option<Vec<Ratio<i64>>> {
        let rows: Vec<&[Ratio<i64>]> = self.gens.iter().map(|g| g.exponents.as_slice()).collect();
        solve_left(&rows, w)
    }

    /// True when the lattice spanned by `vectors` equals the exponent
    /// lattice of this system.
    pub fn same_lattice(&self, vectors: &[Vec<Ratio<i64>>]) -> bool {
        if vectors.len() != self.gens.len() {
            return false;
        }
        let integral = |c: &Vec<Ratio<i64>>| c.iter().all(|x| x.is_integer());
        let others: Vec<&[Ratio<i64>]> = vectors.iter().map(|v| v.as_slice()).collect();
        let ours_in_theirs = self
            .gens
            .iter()
            .all(|g| solve_left(&others, &g.exponents).is_some_and(|c| integral(&c)));
        let theirs_in_ours = vectors.iter().all(|v| self.coordinates(v).is_some_and(|c| integral(&c)));
        ours_in_theirs && theirs_in_ours
    }
}

/// Solves `c * rows = w` by Gaussian elimination on the transpose.
fn solve_left(rows: &[&[Ratio<i64>]], w: &[Ratio<i64>]) -> Option<Vec<Ratio<i64>>> {
    let m = rows.len();
    let n = w.len();
    // augmented matrix: n equations in m unknowns
    let mut a: Vec<Vec<Ratio<i64>>> = (0..n)
        .map(|j| {
            let mut row: Vec<Ratio<i64>> = rows.iter().map(|r| r[j]).collect();
            row.push(w[j]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m {
        let p = (r..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..n {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col];
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[m].is_zero()) {
        return None;
    }
    Some((0..m).map(|i| a[i][m]).collect())
}

/// Quadratic residue characters at split primes `l = 3 mod 4`, one per
/// (prime, embedding).
struct Screen {
    /// `(l, sqrt(m) mod l for every radicand m of the field by mask)`.
    primes: Vec<(u64, Vec<u64>)>,
    field: MultiquadField,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

impl Screen {
    fn new(k: &MultiquadField) -> Result<Self> {
        let gens = k.generators();
        let span = k.radicands();
        let floor = span.iter().copied().max().unwrap_or(1).max(1000);
        let mut primes = Vec::new();
        let mut l = floor + 1;
        while primes.len() < SCREEN_PRIMES {
            l += 1;
            if l % 4 != 3 || !is_prime(l)? {
                continue;
            }
            if gens.iter().any(|&g| pow_mod(g, (l - 1) / 2, l) != 1) {
                continue;
            }
            let roots: Vec<u64> = gens.iter().map(|&g| pow_mod(g, (l + 1) / 4, l)).collect();
            let mut r = vec![1u64; span.len()];
            for mask in 1..span.len() {
                let low = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                // sqrt(a) sqrt(g) = gcd(a, g) sqrt(sqf(a g))
                let g = num_integer::gcd(span[rest], gens[low]);
                let prod = r[rest] as u128 * roots[low] as u128 % l as u128;
                r[mask] = (prod * pow_mod(g, l - 2, l) as u128 % l as u128) as u64;
            }
            primes.push((l, r));
        }
        Ok(Self { primes, field: k.clone() })
    }

    fn width(&self) -> usize {
        self.primes.len() << self.field.rank()
    }

    /// Bit set for every character under which `a` is a non-residue.
    fn bits(&self, a: &MqElement) -> Result<Vec<bool>> {
        let n = self.field.rank();
        let terms: Vec<(usize, BigInt, BigInt)> = a
            .terms()
            .map(|(m, c)| {
                let mask = self.field.mask_of(m).expect("element lies in the field") as usize;
                (mask, c.numer().clone(), c.denom().clone())
            })
            .collect();
        let mut out = Vec::with_capacity(self.width());
        for (l, roots) in &self.primes {
            let lb = BigInt::from(*l);
            let reduce = |x: &BigInt| -> u64 {
                let r = x % &lb;
                let r = if r.is_negative() { r + &lb } else { r };
                r.to_u64().expect("residue fits")
            };
            let reduced: Vec<(usize, u64)> = terms
                .iter()
                .map(|(mask, num, den)| {
                    let d = reduce(den);
                    (*mask, (reduce(num) as u128 * pow_mod(d, l - 2, *l) as u128 % *l as u128) as u64)
                })
                .collect();
            for flips in 0..(1usize << n) {
                let mut v = 0u128;
                for &(mask, c) in &reduced {
                    let t = c as u128 * roots[mask] as u128 % *l as u128;
                    if (mask & flips).count_ones() % 2 == 1 {
                        v += *l as u128 - t;
                    } else {
                        v += t;
                    }
                }
                let v = (v % *l as u128) as u64;
                if v == 0 {
                    return Err(Error::Inconsistent(format!("unit vanishes modulo {l}")));
                }
                out.push(pow_mod(v, (l - 1) / 2, *l) != 1);
            }
        }
        Ok(out)
    }
}

fn xor_into(acc: &mut [bool], other: &[bool]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

/// Product of the generators selected by `mask`.
fn product(gens: &[Unit], mask: usize) -> MqElement {
    (0..gens.len())
        .filter(|i| mask >> i & 1 == 1)
        .fold(MqElement::one(), |acc, i| &acc * &gens[i].value)
}

/// Looks for a `+-` product of generators that is a square in `k` and
/// returns the selecting mask, the sign and the root.
fn find_square(k: &MultiquadField, screen: &Screen, gens: &[Unit], bits: &[Vec<bool>]) -> Result<Option<(usize, i8, MqElement)>> {
    let width = screen.width();
    let m = gens.len();
    // -1 is a non-residue at every screening prime
    let minus_one = vec![true; width];
    let mut xor = vec![vec![false; width]; 1 << m];
    for mask in 1..(1usize << m) {
        let low = mask.trailing_zeros() as usize;
        let mut v = xor[mask & (mask - 1)].clone();
        xor_into(&mut v, &bits[low]);
        xor[mask] = v;
        for sign in [1i8, -1] {
            let mut w = xor[mask].clone();
            if sign < 0 {
                xor_into(&mut w, &minus_one);
            }
            if w.iter().any(|&b| b) {
                continue;
            }
            let mut pi = product(gens, mask);
            if sign < 0 {
                pi = -pi;
            }
            if let Some(root) = mq_sqrt(&pi, k)? {
                return Ok(Some((mask, sign, root)));
            }
        }
    }
    Ok(None)
}

/// Fundamental system of units of a real multiquadratic field of degree
/// at most 8, and its unit index.
pub fn unit_group<S: InvariantStore + ?Sized>(k: &MultiquadField, store: &S) -> Result<UnitSystem> {
    if k.degree() > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(k.degree() as usize));
    }
    let base = k.quadratic_subfields();
    let m = base.len();
    let mut gens: Vec<Unit> = Vec::with_capacity(m);
    for (i, &rad) in base.iter().enumerate() {
        let eps = store.fundamental_unit(rad)?;
        let mut exponents = vec![Ratio::zero(); m];
        exponents[i] = Ratio::one();
        gens.push(Unit { value: MqElement::from_quad_unit(&eps), exponents });
    }
    let mut q_index = 1u64;
    if m >= 2 {
        let screen = Screen::new(k)?;
        let mut bits: Vec<Vec<bool>> = gens.iter().map(|g| screen.bits(&g.value)).collect::<Result<_>>()?;
        while let Some((mask, _sign, root)) = find_square(k, &screen, &gens, &bits)? {
            store.budget().charge(1)?;
            let half = Ratio::new(1, 2);
            let mut exponents = vec![Ratio::zero(); m];
            for (i, g) in gens.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (e, x) in exponents.iter_mut().zip(&g.exponents) {
                        *e += *x * half;
                    }
                }
            }
            let slot = mask.trailing_zeros() as usize;
            bits[slot] = screen.bits(&root)?;
            gens[slot] = Unit { value: root, exponents };
            q_index *= 2;
            if q_index > 1 << (m * m) {
                return Err(Error::Inconsistent(format!("unit index of {k} grew past any bound")));
            }
        }
    }
    for g in &gens {
        let n = absolute_norm(&g.value, k)?;
        if n.abs() != One::one() {
            return Err(Error::Inconsistent(format!("generator of {k} has norm {n}")));
        }
    }
    Ok(UnitSystem { field: k.clone(), base, gens, q_index })
}

/// `q(k) = [E_k : prod E_{k_i}]`.
pub fn q_index<S: InvariantStore + ?Sized>(k: &MultiquadField, store: &S) -> Result<u64> {
    Ok(unit_group(k, store)?.q_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::DirectStore;

    fn field(g: &[u64]) -> MultiquadField {
        MultiquadField::new(g).unwrap()
    }

    fn unit_vec(sys: &UnitSystem, terms: &[(u64, i64, i64)]) -> Vec<Ratio<i64>> {
        let mut v = vec![Ratio::zero(); sys.base.len()];
        for &(d, n, den) in terms {
            let i = sys.base.iter().position(|r| r.d() == d).unwrap();
            v[i] = Ratio::new(n, den);
        }
        v
    }

    #[test]
    fn solver() {
        let r = |n| Ratio::from_integer(n);
        let a = [r(2), r(0)];
        let b = [r(1), r(1)];
        let c = solve_left(&[&a, &b], &[r(3), r(1)]).unwrap();
        assert_eq!(c, vec![Ratio::new(1, 1), r(1)]);
        assert!(solve_left(&[&a, &a], &[r(3), r(1)]).is_none());
    }

    #[test]
    fn quadratic_field_has_its_fundamental_unit() {
        let sys = unit_group(&field(&[5]), &DirectStore::default()).unwrap();
        assert_eq!(sys.q_index, 1);
        assert_eq!(sys.gens.len(), 1);
        assert_eq!(sys.gens[0].value.coeff(5), Ratio::new(1.into(), 2.into()));
    }

    #[test]
    fn q_sqrt2_sqrt3() {
        // 2 + sqrt 3 = ((sqrt 2 + sqrt 6)/2)^2 and 5 + 2 sqrt 6 = (sqrt 2 + sqrt 3)^2
        let sys = unit_group(&field(&[2, 3]), &DirectStore::default()).unwrap();
        assert_eq!(sys.q_index, 4);
        let expected = vec![
            unit_vec(&sys, &[(2, 1, 1)]),
            unit_vec(&sys, &[(3, 1, 2)]),
            unit_vec(&sys, &[(6, 1, 2)]),
        ];
        assert!(sys.same_lattice(&expected));
    }

    /// Exhaustive oracle: no +-product of generators is a square.
    fn assert_saturated(sys: &UnitSystem) {
        let m = sys.gens.len();
        for mask in 1..(1usize << m) {
            let pi = product(&sys.gens, mask);
            assert!(mq_sqrt(&pi, &sys.field).unwrap().is_none(), "mask {mask}");
            assert!(mq_sqrt(&-pi, &sys.field).unwrap().is_none(), "mask {mask}");
        }
    }

    #[test]
    fn saturation_small_fields() {
        for gens in [&[2u64, 3][..], &[2, 5], &[3, 7], &[5, 13], &[2, 3, 5], &[3, 7, 11]] {
            let sys = unit_group(&field(gens), &DirectStore::default()).unwrap();
            assert_saturated(&sys);
            if gens.len() == 2 {
                assert!([1, 2, 4, 8].contains(&sys.q_index));
            }
        }
    }

    #[test]
    fn f_for_first_triple() {
        let (p, q, s) = (13u64, 43, 3);
        let sys = unit_group(&field(&[p * q, p * s]), &DirectStore::default()).unwrap();
        assert_eq!(sys.q_index, 4);
        let expected = vec![
            unit_vec(&sys, &[(p * q, 1, 1)]),
            unit_vec(&sys, &[(p * q, 1, 2), (q * s, 1, 2)]),
            unit_vec(&sys, &[(p * q, 1, 2), (p * s, 1, 2)]),
        ];
        assert!(sys.same_lattice(&expected));
        assert_saturated(&sys);
    }

    #[test]
    fn k_for_both_residues_of_s() {
        // s = 3 mod 8: sqrt(2 eps_2sq) = y1 + y2 sqrt(2sq), so the product of
        // all three units is the square; s = 7 mod 8: sqrt(2 eps_2sq) =
        // y1 sqrt(2s) + y2 sqrt q, and eps_2sq eps_ps is the square.
        for (p, q, s) in [(13u64, 43, 3), (29, 59, 7)] {
            let sys = unit_group(&field(&[2 * p * q, p * s]), &DirectStore::default()).unwrap();
            assert_eq!(sys.q_index, 2);
            let root = if s % 8 == 3 {
                unit_vec(&sys, &[(2 * p * q, 1, 2), (2 * q * s, 1, 2), (p * s, 1, 2)])
            } else {
                unit_vec(&sys, &[(2 * q * s, 1, 2), (p * s, 1, 2)])
            };
            let expected = vec![unit_vec(&sys, &[(2 * p * q, 1, 1)]), unit_vec(&sys, &[(2 * q * s, 1, 1)]), root];
            assert!(sys.same_lattice(&expected), "{p} {q} {s}");
        }
    }

    #[test]
    fn l_prime_index() {
        // q and s are swapped when needed so that (s/q) = -1
        for (p, q, s) in [(13u64, 43, 3), (29, 59, 7), (37, 67, 11)] {
            let (q, s) = if crate::arithmetic::kronecker_i64(s as i64, q as i64).unwrap() == -1 { (q, s) } else { (s, q) };
            assert_eq!(q_index(&field(&[p * q, s]), &DirectStore::default()).unwrap(), 2);
        }
    }

    #[test]
    fn rejects_degree_sixteen() {
        let k = field(&[2, 3, 5, 7]);
        assert_eq!(unit_group(&k, &DirectStore::default()).unwrap_err(), Error::UnsupportedDegree(16));
    }
}
