//! Monic integer polynomials: cyclotomic polynomials, Kronecker-style
//! detection of roots of unity, and rigorous enclosures of the largest root
//! modulus.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::intlinalg::IntMatrix;
use crate::numtheory::{euler_phi, lcm};
use crate::{Error, Result};

/// Monic polynomial with integer coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

fn trim(v: &mut Vec<BigInt>) {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        trim(&mut coeffs);
        match coeffs.last() {
            Some(c) if c.is_one() => Ok(Self { coeffs }),
            _ => Err(Error::NotMonic),
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self { coeffs: vec![BigInt::one()] }
    }

    /// `x - c`
    pub fn linear(c: i64) -> Self {
        Self { coeffs: vec![BigInt::from(-c), BigInt::one()] }
    }

    /// `xⁿ - 1`
    pub fn x_pow_minus_one(n: u64) -> Self {
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        coeffs[0] = -BigInt::one();
        coeffs[n as usize] = BigInt::one();
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { coeffs: mul_coeffs(&self.coeffs, &other.coeffs) }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Division with remainder by a monic divisor; both parts integral.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Vec<BigInt>) {
        let dd = divisor.degree();
        if self.degree() < dd {
            return (Self::one_like_zero_quotient(), self.coeffs.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd.max(1));
        trim(&mut rem);
        (Self { coeffs: quot }, rem)
    }

    // Quotient placeholder when deg(self) < deg(divisor); callers check the remainder.
    fn one_like_zero_quotient() -> Self {
        Self { coeffs: vec![BigInt::zero()] }
    }

    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        if self.degree() < divisor.degree() {
            return None;
        }
        let (q, r) = self.div_rem(divisor);
        r.iter().all(Zero::is_zero).then_some(q)
    }

    pub fn is_divisible_by(&self, divisor: &Self) -> bool {
        self.exact_div(divisor).is_some()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `P(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &IntMatrix) -> IntMatrix {
        assert!(m.is_square());
        let n = m.rows();
        let mut acc = IntMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m).add(&IntMatrix::identity(n).scale(c));
        }
        acc
    }

    /// Multiplicity of the root `0`.
    pub fn zero_multiplicity(&self) -> u32 {
        self.coeffs.iter().take_while(|c| c.is_zero()).count() as u32
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect()
    }
}

fn mul_coeffs(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            let mon = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            match (a.is_one(), k) {
                (true, 0) => write!(f, "1")?,
                (true, _) => write!(f, "{mon}")?,
                (false, 0) => write!(f, "{a}")?,
                (false, _) => write!(f, "{a}*{mon}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// Rational polynomial used for gcd/lcm work; lowest degree first, trimmed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn from_int(p: &IntPoly) -> Self {
        Self(p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    fn trim(&mut self) {
        while self.0.len() > 1 && self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn monic(&self) -> Self {
        let lead = self.0.last().unwrap().clone();
        Self(self.0.iter().map(|c| c / &lead).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut q = Self(out);
        q.trim();
        q
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let mut rem = self.0.clone();
        let dd = d.degree();
        if self.degree() < dd || self.is_zero() {
            return (Self(vec![BigRational::zero()]), self.clone());
        }
        let lead = d.0.last().unwrap();
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if c.is_zero() {
                continue;
            }
            for (i, x) in d.0.iter().enumerate() {
                rem[k + i] -= &c * x;
            }
            quot[k] = c;
        }
        rem.truncate(dd.max(1));
        let mut r = Self(rem);
        r.trim();
        let mut q = Self(quot);
        q.trim();
        (q, r)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let g = self.gcd(other);
        let (q, _) = self.mul(other).div_rem(&g);
        q.monic()
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Self(vec![BigRational::zero()]);
        }
        let mut q =
            Self(self.0.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(k.into())).collect());
        q.trim();
        q
    }

    /// Back to a monic integer polynomial, if the coefficients are integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        let m = self.monic();
        if m.0.iter().all(|c| c.is_integer()) {
            IntPoly::new(m.0.iter().map(|c| c.to_integer()).collect()).ok()
        } else {
            None
        }
    }
}

/// Squarefree part `p / gcd(p, p')`, monic over ℤ.
pub fn squarefree_part(p: &IntPoly) -> IntPoly {
    let q = QPoly::from_int(p);
    let g = q.gcd(&q.derivative());
    let (s, _) = q.div_rem(&g);
    s.to_int().expect("squarefree part of a monic integer polynomial is integral")
}

/// The `d`-th cyclotomic polynomial, by dividing `xᵈ - 1` by `Φₑ` for every
/// proper divisor `e | d`.
pub fn cyclotomic(d: u64) -> IntPoly {
    assert!(d >= 1, "cyclotomic index must be positive");
    let mut table: BTreeMap<u64, IntPoly> = BTreeMap::new();
    for e in crate::numtheory::divisors(d) {
        let mut p = IntPoly::x_pow_minus_one(e);
        for (f, phi) in &table {
            if e % f == 0 {
                p = p.exact_div(phi).expect("cyclotomic division is exact");
            }
        }
        table.insert(e, p);
    }
    table.remove(&d).unwrap()
}

/// Cyclotomic factors peeled off a monic polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicPart {
    /// `(d, multiplicity)` for each `Φ_d` dividing the input, increasing in `d`.
    pub factors: Vec<(u64, u32)>,
    /// Multiplicity of the root `0`; those factors stay inside `remainder`.
    pub zero_multiplicity: u32,
    /// Cofactor with no root of unity among its roots.
    pub remainder: IntPoly,
}

impl CyclotomicPart {
    pub fn multiplicity(&self, d: u64) -> u32 {
        self.factors.iter().find(|(e, _)| *e == d).map_or(0, |(_, m)| *m)
    }

    /// `lcm` of the orders present (1 when there are none).
    pub fn order_lcm(&self) -> u64 {
        self.factors.iter().fold(1, |acc, (d, _)| lcm(acc, *d))
    }
}

/// Orders `d` with `φ(d) ≤ degree`, searched over `d ≤ 2·degree²`.
pub fn cyclotomic_candidates(degree: usize) -> Vec<u64> {
    let bound = 2 * (degree as u64).pow(2);
    (1..=bound).filter(|&d| euler_phi(d) as usize <= degree).collect()
}

pub fn cyclotomic_part(p: &IntPoly) -> CyclotomicPart {
    let mut remainder = p.clone();
    let mut factors = Vec::new();
    for d in cyclotomic_candidates(p.degree()) {
        let phi = cyclotomic(d);
        if phi.degree() > remainder.degree() {
            continue;
        }
        let mut mult = 0;
        while let Some(q) = remainder.exact_div(&phi) {
            remainder = q;
            mult += 1;
        }
        if mult > 0 {
            factors.push((d, mult));
        }
    }
    CyclotomicPart { factors, zero_multiplicity: p.zero_multiplicity(), remainder }
}

/// Certificate `(ℓ, m)` with `p | (x^ℓ - 1)^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuasiUnipotence {
    pub ell: u64,
    pub m: u32,
}

pub fn quasi_unipotence(p: &IntPoly) -> Option<QuasiUnipotence> {
    let part = cyclotomic_part(p);
    if !part.remainder.is_one() {
        return None;
    }
    let m = part.factors.iter().map(|(_, k)| *k).max().unwrap_or(1);
    Some(QuasiUnipotence { ell: part.order_lcm(), m })
}

/// Rational enclosure `[lo, hi]` of the largest root modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RadiusInterval {
    pub fn exact_one() -> Self {
        Self { lo: BigRational::one(), hi: BigRational::one() }
    }

    pub fn is_exact_one(&self) -> bool {
        self.lo.is_one() && self.hi.is_one()
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn midpoint_f64(&self) -> f64 {
        (self.lo_f64() + self.hi_f64()) / 2.0
    }
}

/// One Graeffe root-squaring step: the monic polynomial whose roots are the
/// squares of the roots of `p`.
pub fn graeffe_step(p: &[BigInt]) -> Vec<BigInt> {
    let n = p.len() - 1;
    let even: Vec<BigInt> = p.iter().step_by(2).cloned().collect();
    let odd: Vec<BigInt> = p.iter().skip(1).step_by(2).cloned().collect();
    let e2 = mul_coeffs(&even, &even);
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, c) in e2.into_iter().enumerate() {
        out[i] += c;
    }
    if !odd.is_empty() {
        for (i, c) in mul_coeffs(&odd, &odd).into_iter().enumerate() {
            out[i + 1] -= c;
        }
    }
    if n % 2 == 1 {
        for c in out.iter_mut() {
            *c = -&*c;
        }
    }
    out
}

fn log2_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap().log2() + shift as f64
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient-ratio bounds (in log2) on the largest root modulus of a monic
/// polynomial: a lower bound from `|e_j| ≤ C(n,j) R^j` and Fujiwara's upper
/// bound. `None` when all non-leading coefficients vanish.
fn log2_radius_bounds(p: &[BigInt]) -> Option<(f64, f64)> {
    let n = p.len() - 1;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for j in 1..=n {
        let c = &p[n - j];
        if c.is_zero() {
            continue;
        }
        let l = log2_abs(c);
        lower = lower.max((l - binomial(n, j).log2()) / j as f64);
        let u = if j == n { (l - 1.0) / j as f64 } else { l / j as f64 };
        upper = upper.max(u);
    }
    (lower > f64::NEG_INFINITY).then_some((lower, upper + 1.0))
}

/// Whether every root of `p` lies strictly inside the circle of radius `rho`,
/// decided exactly by the Schur–Cohn recursion on `p(rho·z)`.
pub fn roots_strictly_inside(p: &[BigInt], rho: &BigRational) -> bool {
    let n = p.len() - 1;
    let (u, v) = (rho.numer(), rho.denom());
    let mut upow = BigInt::one();
    let mut a: Vec<BigInt> = Vec::with_capacity(n + 1);
    for (k, c) in p.iter().enumerate() {
        a.push(c * &upow * num_traits::pow(v.clone(), n - k));
        upow *= u;
    }
    schur_cohn_inside_unit_disk(a)
}

fn schur_cohn_inside_unit_disk(mut a: Vec<BigInt>) -> bool {
    loop {
        while a.len() > 1 && a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        let n = a.len() - 1;
        if n == 0 {
            return true;
        }
        let (a0, an) = (a[0].clone(), a[n].clone());
        if a0.abs() >= an.abs() {
            return false;
        }
        let mut next: Vec<BigInt> = (0..n).map(|k| &an * &a[k + 1] - &a0 * &a[n - k - 1]).collect();
        let content = next.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !content.is_zero() && !content.is_one() {
            for c in next.iter_mut() {
                *c = &*c / &content;
            }
        }
        a = next;
    }
}

/// Number of Graeffe squarings: smallest `k` with
/// `2^k ≥ ⌈log2(1/rel_tol)⌉ + deg`.
pub fn graeffe_iterations(rel_tol: &BigRational, degree: usize) -> u32 {
    let inv = rel_tol.recip();
    let bits = (inv.ceil().to_integer().bits() as usize).max(1) + degree;
    let mut k = 0;
    while (1usize << k) < bits {
        k += 1;
    }
    k
}

/// Enclosure of `max |root|` with relative width at most `rel_tol`. Returns
/// the exact point `[1, 1]` when every root is a root of unity.
pub fn spectral_radius(p: &IntPoly, rel_tol: &BigRational) -> RadiusInterval {
    assert!(rel_tol.is_positive(), "tolerance must be positive");
    if quasi_unipotence(p).is_some() && p.degree() >= 1 {
        return RadiusInterval::exact_one();
    }
    let zero = BigRational::zero();
    if p.degree() == 0 {
        return RadiusInterval { lo: zero.clone(), hi: zero };
    }
    let k = graeffe_iterations(rel_tol, p.degree());
    let mut g = p.coeffs.clone();
    for _ in 0..k {
        g = graeffe_step(&g);
    }
    let Some((l2_lo, l2_hi)) = log2_radius_bounds(&g) else {
        // p = x^n
        return RadiusInterval { lo: zero.clone(), hi: zero };
    };
    let scale = (1u64 << k) as f64;
    let guess = |e: f64, f: f64| BigRational::from_float(2f64.powf(e / scale) * f).unwrap_or_else(BigRational::one);
    let mut lo = guess(l2_lo, 1.0 - 1e-9);
    let mut hi = guess(l2_hi, 1.0 + 1e-9);
    let two = BigRational::from_integer(2.into());
    let coeffs = &p.coeffs;
    while !roots_strictly_inside(coeffs, &hi) {
        hi = &hi * &two;
    }
    while roots_strictly_inside(coeffs, &lo) {
        lo = &lo / &two;
    }
    // A non-quasi-unipotent integer polynomial with nonzero roots has a root
    // of modulus > 1; keep bisecting until the enclosure separates it from 1.
    let must_exceed_one = p.zero_multiplicity() == 0 || has_root_outside_unit_disk(coeffs);
    loop {
        let width = &hi - &lo;
        let narrow = width <= rel_tol * &hi;
        if narrow && (!must_exceed_one || lo > BigRational::one()) {
            break;
        }
        let mid = round_dyadic(&((&lo + &hi) / &two), 2 + (width.recip().to_integer().bits() as usize));
        if roots_strictly_inside(coeffs, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RadiusInterval { lo, hi }
}

fn has_root_outside_unit_disk(p: &[BigInt]) -> bool {
    // Some root has modulus > 1 iff not all roots lie in the closed unit disk;
    // closed-disk containment is strict containment for every radius > 1.
    !roots_strictly_inside(p, &BigRational::new(1_000_001.into(), 1_000_000.into()))
}

fn round_dyadic(x: &BigRational, bits: usize) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = (x * BigRational::from_integer(scale.clone())).round().to_integer();
    BigRational::new(scaled, scale)
}
