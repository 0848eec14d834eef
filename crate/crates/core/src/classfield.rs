//! 2-class numbers of multiquadratic fields from Kuroda's class number
//! formula, and 2-ranks of quadratic extensions of fields with odd class
//! number from the ambiguous class number formula.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arithmetic::{factor, hilbert_symbol, is_squarefree, kronecker_i64, Place};
use crate::error::{Error, Result};
use crate::multiquad::MultiquadField;
use crate::quadratic::{QuadUnit, SquarefreeRadicand};
use crate::store::InvariantStore;

/// The pieces of Kuroda's formula
/// `h(k) = q(k) prod h(k_i) / 2^v`, `v = n(2^(n-1) - 1)`, restricted to
/// 2-parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KurodaBreakdown {
    pub field: MultiquadField,
    pub v_exponent: u32,
    pub q_index: u64,
    pub subfield_h2: BTreeMap<u64, u64>,
    pub h2: u64,
}

/// `v = n(2^(n-1) - 1)` for a real field of degree `2^n`.
pub fn kuroda_v(n: usize) -> u32 {
    (n as u32) * ((1u32 << (n - 1)) - 1)
}

pub fn kuroda_h2<S: InvariantStore + ?Sized>(k: &MultiquadField, store: &S) -> Result<KurodaBreakdown> {
    let n = k.rank();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDegree(k.degree() as usize));
    }
    let mut subfield_h2 = BTreeMap::new();
    let mut product: u128 = 1;
    for rad in k.quadratic_subfields() {
        let h2 = store.quadratic(rad)?.h2;
        subfield_h2.insert(rad.d(), h2);
        product *= h2 as u128;
    }
    let q_index = store.q_index(k)?;
    let v_exponent = kuroda_v(n);
    let num = product * q_index as u128;
    let den = 1u128 << v_exponent;
    if !num.is_multiple_of(den) {
        return Err(Error::Inconsistent(format!(
            "Kuroda's formula for {k} is not integral: {q_index} * {product} / 2^{v_exponent}"
        )));
    }
    Ok(KurodaBreakdown { field: k.clone(), v_exponent, q_index, subfield_h2, h2: (num / den) as u64 })
}

fn render_rows(f: &mut fmt::Formatter<'_>, rows: &[(String, String)]) -> fmt::Result {
    let w = rows.iter().map(|(a, _)| a.len()).max().unwrap_or(0);
    for (a, b) in rows {
        writeln!(f, "{a:<w$}  {b}")?;
    }
    Ok(())
}

impl fmt::Display for KurodaBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rows = vec![("field".to_string(), self.field.to_string()), ("v".into(), self.v_exponent.to_string())];
        rows.push(("q".into(), self.q_index.to_string()));
        for (d, h) in &self.subfield_h2 {
            rows.push((format!("h2({d})"), h.to_string()));
        }
        rows.push(("h2".into(), self.h2.to_string()));
        render_rows(f, &rows)
    }
}

/// A place of the base field ramified in the quadratic extension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasePlace {
    /// The unique prime above `l` (inert or ramified in the base).
    Prime(u64),
    /// One of the two primes above a split `l`, labelled by the residue of
    /// `sqrt d` it corresponds to (`r` and `l - r`, or modulo 32 at 2).
    SplitPrime { l: u64, root: u64 },
    /// Real place `index` (0: identity, 1: conjugate embedding).
    Real(u8),
}

impl fmt::Display for BasePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePlace::Prime(l) => write!(f, "P{l}"),
            BasePlace::SplitPrime { l, root } => write!(f, "P{l}[{root}]"),
            BasePlace::Real(i) => write!(f, "inf{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolEntry {
    pub unit: String,
    pub place: BasePlace,
    pub value: i8,
}

/// Certificate for `r_2(Cl(k)) = t - 1 - e` with `k = base(sqrt m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub base: MultiquadField,
    pub relative_gen: i64,
    pub places: Vec<BasePlace>,
    pub t: u32,
    pub e: u32,
    pub r2: u32,
    pub symbol_table: Vec<SymbolEntry>,
}

impl fmt::Display for RankCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base       {}", self.base)?;
        writeln!(f, "extension  sqrt({})", self.relative_gen)?;
        let units: Vec<&str> = {
            let mut u: Vec<&str> = Vec::new();
            for s in &self.symbol_table {
                if !u.contains(&s.unit.as_str()) {
                    u.push(&s.unit);
                }
            }
            u
        };
        let pw = self.places.iter().map(|p| p.to_string().len()).max().unwrap_or(0).max(5);
        let uw: Vec<usize> = units.iter().map(|u| u.len().max(2)).collect();
        write!(f, "{:<pw$}", "place")?;
        for (u, w) in units.iter().zip(&uw) {
            write!(f, "  {u:>w$}")?;
        }
        writeln!(f)?;
        for place in &self.places {
            write!(f, "{:<pw$}", place.to_string())?;
            for (u, w) in units.iter().zip(&uw) {
                let v = self
                    .symbol_table
                    .iter()
                    .find(|s| &s.place == place && s.unit == *u)
                    .map(|s| s.value)
                    .unwrap_or(0);
                write!(f, "  {v:>w$}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "t = {}, e = {}, r2 = {}", self.t, self.e, self.r2)
    }
}

fn sqrt_mod_prime(a: u64, l: u64) -> Option<u64> {
    let a = a % l;
    if a == 0 {
        return Some(0);
    }
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = (r as u128 * b as u128 % l as u128) as u64;
            }
            b = (b as u128 * b as u128 % l as u128) as u64;
            e >>= 1;
        }
        r
    };
    if pow(a, (l - 1) / 2) != 1 {
        return None;
    }
    // Tonelli-Shanks
    let (mut q, mut s) = (l - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..l).find(|&z| pow(z, (l - 1) / 2) == l - 1)?;
    let (mut m, mut c, mut t, mut r) = (s, pow(z, q), pow(a, q), pow(a, q.div_ceil(2)));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = (tt as u128 * tt as u128 % l as u128) as u64;
            i += 1;
        }
        let b = pow(c, 1 << (m - i - 1));
        m = i;
        c = (b as u128 * b as u128 % l as u128) as u64;
        t = (t as u128 * c as u128 % l as u128) as u64;
        r = (r as u128 * b as u128 % l as u128) as u64;
    }
    Some(r)
}

/// Image of `u` under the embedding `sqrt d -> root`, reduced modulo an
/// odd prime or modulo 32 (where `root` is odd and the halving is exact).
fn embed(u: &QuadUnit, root: u64, modulus: u64) -> BigInt {
    let modulus = BigInt::from(modulus);
    let mut n = &u.x + &u.y * BigInt::from(root);
    if u.half {
        if modulus.is_odd() {
            n *= (&modulus + 1u8) / 2u8;
        } else {
            n /= 2;
        }
    }
    n.mod_floor(&modulus)
}

fn symbol(a: &BigInt, m: i64, l: u64) -> Result<i8> {
    hilbert_symbol(
        &BigRational::from_integer(a.clone()),
        &BigRational::from_integer(m.into()),
        &Place::finite(l)?,
    )
}

/// True when 2 ramifies in `base(sqrt m)/base`.
fn two_ramifies(d: Option<u64>, m: i64) -> bool {
    let one_mod_4 = |x: i64| x.rem_euclid(4) == 1;
    match d {
        None => !one_mod_4(m),
        Some(d) => {
            let d = d as i64;
            let g = d.gcd(&m);
            let dm = (d / g) * (m / g);
            let unramified = [1, d, m, dm].into_iter().filter(|&x| one_mod_4(x)).count();
            let e_top = 4 / unramified;
            let e_base = if one_mod_4(d) { 1 } else { 2 };
            e_top > e_base
        }
    }
}

/// `r_2` of the class group of `base(sqrt m)` for a base `Q` or real
/// quadratic field with odd class number.
pub fn ambiguous_rank<S: InvariantStore + ?Sized>(base: &MultiquadField, m: i64, store: &S) -> Result<RankCertificate> {
    if m == 0 || m == 1 || !is_squarefree(m.unsigned_abs()) {
        return Err(Error::InvalidInput(format!("relative generator {m} must be squarefree and not 1")));
    }
    let d = match base.generators() {
        [] => None,
        [d] => Some(*d),
        _ => return Err(Error::UnsupportedDegree(base.degree() as usize)),
    };
    if Some(m) == d.map(|d| d as i64) {
        return Err(Error::InvalidInput(format!("sqrt({m}) already lies in {base}")));
    }

    // units of the base: -1 and the fundamental unit
    let eps = match d {
        Some(d) => {
            let rad = SquarefreeRadicand::new(d)?;
            let inv = store.quadratic(rad)?;
            if inv.h % 2 == 0 {
                return Err(Error::EvenClassNumber(d));
            }
            Some(inv.eps)
        }
        None => None,
    };
    let disc = d.map(|d| SquarefreeRadicand::new(d).map(|r| r.discriminant() as i64)).transpose()?;

    let mut places = Vec::new();
    let mut primes: Vec<u64> = factor(m.unsigned_abs()).into_iter().map(|(l, _)| l).filter(|&l| l != 2).collect();
    if two_ramifies(d, m) {
        primes.insert(0, 2);
    }
    for l in primes {
        if l != 2 && d.is_some_and(|d| d % l == 0) {
            // ramified in the base, so v_P(m) is even
            continue;
        }
        let split = match disc {
            Some(disc) => kronecker_i64(disc, l as i64)? == 1,
            None => false,
        };
        if split {
            let d = d.expect("split needs a quadratic base");
            let root = if l == 2 {
                (1..64u64).step_by(2).find(|r| (r * r) % 64 == d % 64).expect("d = 1 mod 8 has a 2-adic root") % 32
            } else {
                sqrt_mod_prime(d, l).expect("split prime")
            };
            let other = if l == 2 { (32 - root) % 32 } else { l - root };
            places.push(BasePlace::SplitPrime { l, root: root.min(other) });
            places.push(BasePlace::SplitPrime { l, root: root.max(other) });
        } else {
            places.push(BasePlace::Prime(l));
        }
    }
    if m < 0 {
        places.push(BasePlace::Real(0));
        if d.is_some() {
            places.push(BasePlace::Real(1));
        }
    }
    let t = places.len() as u32;

    // symbol rows
    let mut symbol_table = Vec::new();
    let mut rows: Vec<Vec<i8>> = Vec::new();
    let minus_one = QuadUnit { d: d.unwrap_or(1), x: BigInt::from(-1), y: BigInt::from(0), half: false };
    let mut units = vec![("-1".to_string(), minus_one, -1i8, 1i8)];
    if let Some(e) = &eps {
        // (sign at identity, sign at conjugate)
        units.push((format!("eps_{}", e.d), e.clone(), 1, e.norm()));
    }
    for (name, u, sign0, sign1) in &units {
        let norm = if name == "-1" { 1 } else { u.norm() as i64 };
        let mut row = Vec::new();
        for place in &places {
            let value = match *place {
                BasePlace::SplitPrime { l, root } => {
                    let modulus = if l == 2 { 32 } else { l };
                    let mut a = embed(u, root, modulus);
                    if a.is_zero() {
                        return Err(Error::Inconsistent(format!("{name} vanishes at {place}")));
                    }
                    if l == 2 && a.is_even() {
                        a += 32;
                    }
                    symbol(&a, m, l)?
                }
                BasePlace::Prime(l) => {
                    // (u, m)_P = (N u, m)_l for m rational
                    if name == "-1" {
                        if d.is_some() {
                            1
                        } else {
                            symbol(&BigInt::from(-1), m, l)?
                        }
                    } else {
                        symbol(&BigInt::from(norm), m, l)?
                    }
                }
                BasePlace::Real(i) => {
                    let s = if i == 0 { *sign0 } else { *sign1 };
                    if s < 0 && m < 0 {
                        -1
                    } else {
                        1
                    }
                }
            };
            symbol_table.push(SymbolEntry { unit: name.clone(), place: place.clone(), value });
            row.push(value);
        }
        rows.push(row);
    }
    let e = f2_rank(&rows);
    if t < 1 + e {
        return Err(Error::Inconsistent(format!("t = {t} is smaller than 1 + e = {}", 1 + e)));
    }
    Ok(RankCertificate { base: base.clone(), relative_gen: m, places, t, e, r2: t - 1 - e, symbol_table })
}

/// Rank over F_2 of a matrix of signs.
fn f2_rank(rows: &[Vec<i8>]) -> u32 {
    let mut bits: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&v| v < 0).collect()).collect();
    let cols = bits.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..bits.len()).find(|&i| bits[i][c]) else { continue };
        bits.swap(rank, p);
        let pivot = bits[rank].clone();
        for (i, row) in bits.iter_mut().enumerate() {
            if i != rank && row[c] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank as u32
}
