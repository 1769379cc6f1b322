//! Exact elements of the divisible group `μ∞ × 𝒫`: a root of unity times a
//! finite product of rational powers of primes.
//!
//! A [`KummerNumber`] is stored in canonical form, so structural equality is
//! equality of the numbers they denote. All group operations are exponent
//! arithmetic over `ℚ` and never leave the group.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numtheory::factorize;
use crate::{Error, Result};

/// `e^{2πi·torsion} · ∏ p^{e_p}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KummerNumber {
    torsion: BigRational,
    primes: BTreeMap<u64, BigRational>,
}

fn reduce_mod_one(t: &BigRational) -> BigRational {
    t - t.floor()
}

impl KummerNumber {
    pub fn one() -> Self {
        Self { torsion: BigRational::zero(), primes: BTreeMap::new() }
    }

    /// Builds a number from raw parts, renormalizing: torsion reduced into
    /// `[0,1)`, zero exponents dropped. Keys must be primes.
    pub fn from_parts(torsion: BigRational, primes: impl IntoIterator<Item = (u64, BigRational)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, e) in primes {
            debug_assert!(crate::numtheory::is_prime(p), "{p} is not prime");
            let entry = map.entry(p).or_insert_with(BigRational::zero);
            *entry += e;
        }
        map.retain(|_, e: &mut BigRational| !e.is_zero());
        Self { torsion: reduce_mod_one(&torsion), primes: map }
    }

    /// `e^{2πi k/m}`.
    pub fn root_of_unity(k: i64, m: u64) -> Self {
        assert!(m > 0, "root of unity order must be positive");
        Self::from_parts(BigRational::new(k.into(), m.into()), [])
    }

    /// A nonzero rational `n/d` (sign becomes the torsion part).
    pub fn from_rational(n: i64, d: i64) -> Self {
        assert!(n != 0 && d != 0, "zero is not in the multiplicative group");
        let torsion = if (n < 0) ^ (d < 0) { BigRational::new(1.into(), 2.into()) } else { BigRational::zero() };
        let mut primes: Vec<(u64, BigRational)> = Vec::new();
        for (p, e) in factorize(n.unsigned_abs()) {
            primes.push((p, BigRational::from_integer(e.into())));
        }
        for (p, e) in factorize(d.unsigned_abs()) {
            primes.push((p, -BigRational::from_integer(e.into())));
        }
        Self::from_parts(torsion, primes)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(n, 1)
    }

    /// `p^e` for a prime `p`.
    pub fn prime_power(p: u64, e: BigRational) -> Self {
        Self::from_parts(BigRational::zero(), [(p, e)])
    }

    pub fn torsion_exponent(&self) -> &BigRational {
        &self.torsion
    }

    pub fn prime_exponents(&self) -> &BTreeMap<u64, BigRational> {
        &self.primes
    }

    pub fn prime_exponent(&self, p: u64) -> BigRational {
        self.primes.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut primes = self.primes.clone();
        for (p, e) in &other.primes {
            let entry = primes.entry(*p).or_insert_with(BigRational::zero);
            *entry += e;
        }
        primes.retain(|_, e| !e.is_zero());
        Self { torsion: reduce_mod_one(&(&self.torsion + &other.torsion)), primes }
    }

    pub fn inv(&self) -> Self {
        Self { torsion: reduce_mod_one(&-&self.torsion), primes: self.primes.iter().map(|(p, e)| (*p, -e)).collect() }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::one();
        }
        let k = BigRational::from_integer(k.clone());
        Self {
            torsion: reduce_mod_one(&(&self.torsion * &k)),
            primes: self.primes.iter().map(|(p, e)| (*p, e * &k)).collect(),
        }
    }

    pub fn pow_i64(&self, k: i64) -> Self {
        self.pow(&BigInt::from(k))
    }

    /// Raises to a rational power by scaling every exponent. This picks one
    /// branch; callers use it only where any branch is acceptable.
    pub fn pow_rational(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::one();
        }
        Self {
            torsion: reduce_mod_one(&(&self.torsion * r)),
            primes: self.primes.iter().map(|(p, e)| (*p, e * r)).collect(),
        }
    }

    /// Principal `n`-th root: torsion exponent and prime exponents divided by `n`.
    pub fn nth_root(&self, n: u64) -> Self {
        assert!(n >= 1, "root index must be positive");
        let n = BigRational::from_integer(n.into());
        Self { torsion: &self.torsion / &n, primes: self.primes.iter().map(|(p, e)| (*p, e / &n)).collect() }
    }

    pub fn is_one(&self) -> bool {
        self.torsion.is_zero() && self.primes.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn torsion_order(&self) -> Option<BigInt> {
        self.is_torsion().then(|| self.torsion.denom().clone())
    }

    /// The torsion component alone, `e^{2πi·t}`.
    pub fn torsion_part(&self) -> Self {
        Self { torsion: self.torsion.clone(), primes: BTreeMap::new() }
    }

    /// The positive real component alone, `∏ p^{e_p}`.
    pub fn positive_part(&self) -> Self {
        Self { torsion: BigRational::zero(), primes: self.primes.clone() }
    }

    /// Least common denominator of all prime exponents (1 when there are none).
    pub fn radical_index(&self) -> BigInt {
        self.primes.values().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }

    /// Complex value, for numeric diagnostics only.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let modulus: f64 = self.primes.iter().map(|(p, e)| (*p as f64).powf(e.to_f64().unwrap_or(f64::NAN))).product();
        let angle = 2.0 * std::f64::consts::PI * self.torsion.to_f64().unwrap_or(f64::NAN);
        num_complex::Complex64::from_polar(modulus, angle)
    }
}

impl Default for KummerNumber {
    fn default() -> Self {
        Self::one()
    }
}

/// `∏ᵢ xᵢ^{bᵢ}`: the character `χ_b` evaluated at `x`.
pub fn char_eval(x: &[KummerNumber], b: &[BigInt]) -> Result<KummerNumber> {
    if x.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: b.len() });
    }
    Ok(x.iter().zip(b).fold(KummerNumber::one(), |acc, (xi, bi)| acc.mul(&xi.pow(bi))))
}

/// Coordinatewise product of two points.
pub fn point_mul(x: &[KummerNumber], y: &[KummerNumber]) -> Vec<KummerNumber> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.mul(b)).collect()
}

pub fn point_inv(x: &[KummerNumber]) -> Vec<KummerNumber> {
    x.iter().map(KummerNumber::inv).collect()
}

pub fn point_is_one(x: &[KummerNumber]) -> bool {
    x.iter().all(KummerNumber::is_one)
}

pub fn identity_point(n: usize) -> Vec<KummerNumber> {
    vec![KummerNumber::one(); n]
}

/// Exponent-space view of a point: the primes occurring anywhere, and for each
/// coordinate the row `[torsion, e_{p_1}, e_{p_2}, …]`.
pub fn log_coords(x: &[KummerNumber]) -> (Vec<u64>, Vec<Vec<BigRational>>) {
    let primes: Vec<u64> = x
        .iter()
        .flat_map(|c| c.primes.keys().copied())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let rows = x
        .iter()
        .map(|c| std::iter::once(c.torsion.clone()).chain(primes.iter().map(|p| c.prime_exponent(*p))).collect())
        .collect();
    (primes, rows)
}

/// Inverse of [`log_coords`] for a single row.
pub fn from_log_row(primes: &[u64], row: &[BigRational]) -> KummerNumber {
    KummerNumber::from_parts(row[0].clone(), primes.iter().copied().zip(row[1..].iter().cloned()))
}

/// Random number with small torsion order and small radical exponents over
/// the primes 2, 3, 5, 7.
pub fn sample_kummer<R: rand::Rng + ?Sized>(rng: &mut R) -> KummerNumber {
    let m: u64 = rng.gen_range(1..=12);
    let k: u64 = rng.gen_range(0..m);
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7] {
        if rng.gen_bool(0.4) {
            let num: i64 = rng.gen_range(-3..=3);
            let den: i64 = rng.gen_range(1..=3);
            primes.push((p, BigRational::new(num.into(), den.into())));
        }
    }
    KummerNumber::from_parts(BigRational::new(k.into(), m.into()), primes)
}

fn fmt_rational_exponent(e: &BigRational) -> String {
    if e.is_integer() {
        e.numer().to_string()
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for KummerNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.torsion.is_zero() {
            let (k, m) = (self.torsion.numer(), self.torsion.denom());
            if k.is_one() {
                parts.push(format!("zeta({m})"));
            } else {
                parts.push(format!("zeta({m})^{k}"));
            }
        }
        let mut numer = BigInt::one();
        let mut denom = BigInt::one();
        let mut radicals: Vec<String> = Vec::new();
        for (p, e) in &self.primes {
            if e.is_integer() {
                let k = e.numer().abs().to_u32().expect("integer exponent too large to print");
                let pk = num_traits::pow(BigInt::from(*p), k as usize);
                if e.is_positive() {
                    numer *= pk;
                } else {
                    denom *= pk;
                }
            } else {
                radicals.push(format!("{p}^{}", fmt_rational_exponent(e)));
            }
        }
        if !denom.is_one() {
            parts.push(format!("{numer}/{denom}"));
        } else if !numer.is_one() {
            parts.push(numer.to_string());
        }
        parts.extend(radicals);
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

impl fmt::Debug for KummerNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K[{self}]")
    }
}

/// Recursive-descent parser for `zeta(m)^k * n/d * p^(a/b) * ...`.
struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn unsigned(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        self.src[start..self.pos].parse().map_err(|_| self.err("bad integer"))
    }

    fn signed(&mut self) -> Result<BigInt> {
        let neg = self.eat('-');
        let v = self.unsigned()?;
        Ok(if neg { -v } else { v })
    }

    fn exponent(&mut self) -> Result<BigRational> {
        if self.eat('(') {
            let n = self.signed()?;
            let d = if self.eat('/') { self.unsigned()? } else { BigInt::one() };
            self.expect(')')?;
            if d.is_zero() {
                return Err(self.err("zero denominator in exponent"));
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(self.signed()?))
        }
    }

    fn atom(&mut self) -> Result<KummerNumber> {
        if self.src[self.pos..].trim_start().starts_with("zeta") {
            self.skip_ws();
            self.pos += 4;
            self.expect('(')?;
            let m = self.unsigned()?;
            self.expect(')')?;
            if m.is_zero() {
                return Err(self.err("zeta order must be positive"));
            }
            let k = if self.eat('^') { self.exponent()? } else { BigRational::one() };
            if !k.is_integer() {
                return Err(self.err("zeta exponent must be an integer"));
            }
            return Ok(KummerNumber::from_parts(BigRational::new(k.to_integer(), m), []));
        }
        let n = self.unsigned()?;
        if n.is_zero() {
            return Err(self.err("zero is not a torus coordinate"));
        }
        let n = n.to_u64().ok_or_else(|| self.err("integer exceeds 64 bits"))?;
        let e = if self.eat('^') { self.exponent()? } else { BigRational::one() };
        Ok(KummerNumber::from_parts(
            BigRational::zero(),
            factorize(n).into_iter().map(|(p, k)| (p, &e * BigRational::from_integer(k.into()))),
        ))
    }

    fn factor(&mut self) -> Result<KummerNumber> {
        let neg = self.eat('-');
        let a = self.atom()?;
        Ok(if neg { a.mul(&KummerNumber::root_of_unity(1, 2)) } else { a })
    }

    fn expr(&mut self) -> Result<KummerNumber> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                acc = acc.div(&self.factor()?);
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(acc)
    }
}

impl FromStr for KummerNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser { src: s, pos: 0 }.expr()
    }
}
