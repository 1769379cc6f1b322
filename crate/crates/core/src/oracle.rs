//! Independent checks: finite torsion models, numeric roots of integer
//! polynomials, and a one-sided modular test that a point set avoids every
//! hypersurface of bounded degree.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Schur};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{point_inv, point_mul, KummerNumber};
use crate::numtheory::{checked_lcm, element_of_order, gcd, is_prime, mul_mod, nth_root_mod, pow_mod};
use crate::par::Exec;
use crate::polyalg::{squarefree_part, IntPoly};
use crate::torus::AffineMonomialMap;
use crate::{Error, Result};

const MAX_STATES: u64 = 10_000_000;

/// Orbit decomposition of `u ↦ A·u + g` on `(ℤ/d)ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModelRun {
    pub modulus: u64,
    pub dim: usize,
    /// Period of every state, indexed by [`FiniteModelRun::index`].
    pub periods: Vec<u64>,
    /// Each orbit as a list of state indices, starting from its least state.
    pub orbits: Vec<Vec<u64>>,
}

impl FiniteModelRun {
    pub fn index(&self, u: &[u64]) -> u64 {
        u.iter().fold(0, |acc, &x| acc * self.modulus + x % self.modulus)
    }

    pub fn state(&self, mut idx: u64) -> Vec<u64> {
        let mut u = vec![0; self.dim];
        for slot in u.iter_mut().rev() {
            *slot = idx % self.modulus;
            idx /= self.modulus;
        }
        u
    }

    pub fn period(&self, u: &[u64]) -> u64 {
        self.periods[self.index(u) as usize]
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

pub fn finite_model_run(phi: &AffineMonomialMap, d: u64) -> Result<FiniteModelRun> {
    if d == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let n = phi.dim();
    let dd = BigInt::from(d);
    let mut g = Vec::with_capacity(n);
    for c in phi.gamma() {
        let t = c.torsion_exponent();
        if !c.is_torsion() || !(&dd % t.denom()).is_zero() {
            return Err(Error::Precondition(format!(
                "translation coordinate {c} is not torsion of order dividing {d}"
            )));
        }
        g.push((t.numer() * (&dd / t.denom())).mod_floor(&dd).to_u64().unwrap());
    }
    let det = phi.det().abs();
    if d > 1 && gcd(d, (&det % &dd).to_u64().unwrap()) != 1 {
        return Err(Error::Precondition(format!("gcd({d}, |det A| = {det}) must be 1")));
    }
    let states = d
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_STATES)
        .ok_or_else(|| Error::Precondition(format!("state space {d}^{n} exceeds {MAX_STATES}")))?;
    let a: Vec<Vec<u64>> =
        (0..n).map(|i| phi.matrix().row(i).iter().map(|x| x.mod_floor(&dd).to_u64().unwrap()).collect()).collect();
    let mut run = FiniteModelRun { modulus: d, dim: n, periods: vec![0; states as usize], orbits: Vec::new() };
    let step = |u: &[u64]| -> Vec<u64> {
        (0..n)
            .map(|i| (a[i].iter().zip(u).map(|(x, y)| mul_mod(*x, *y, d)).fold(g[i], |s, v| (s + v) % d)) % d)
            .collect()
    };
    for start in 0..states {
        if run.periods[start as usize] != 0 {
            continue;
        }
        let mut orbit = vec![start];
        let mut u = step(&run.state(start));
        loop {
            let idx = run.index(&u);
            if idx == start {
                break;
            }
            if run.periods[idx as usize] != 0 || orbit.len() as u64 > states {
                return Err(Error::Precondition("affine map is not a bijection modulo d".into()));
            }
            orbit.push(idx);
            u = step(&u);
        }
        let p = orbit.len() as u64;
        for &s in &orbit {
            run.periods[s as usize] = p;
        }
        run.orbits.push(orbit);
    }
    Ok(run)
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Coefficients of `p(x + s)`, lowest degree first.
fn taylor_shift(c: &[f64], s: f64) -> Vec<f64> {
    let mut out = c.to_vec();
    let n = out.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            let hi = out[k + 1];
            out[k] += s * hi;
        }
    }
    out
}

fn companion_eigenvalues(c: &[f64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -c[i] / c[n];
    }
    let schur = Schur::try_new(companion, f64::EPSILON, 5_000)?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}

/// Approximations of the distinct roots of `p`: eigenvalues of the companion
/// matrix of its squarefree part, polished by Newton's method.
pub fn numeric_roots(p: &IntPoly, tol: f64) -> Result<Vec<Complex64>> {
    if p.degree() == 0 {
        return Err(Error::Precondition("polynomial must have degree at least 1".into()));
    }
    let s = squarefree_part(p);
    let c = s.to_f64_coeffs();
    let eigenvalues = [0.0, 0.375, -0.625]
        .iter()
        .find_map(|&shift| {
            companion_eigenvalues(&taylor_shift(&c, shift))
                .map(|ev| ev.into_iter().map(|z| z + shift).collect::<Vec<_>>())
        })
        .ok_or(Error::NonConvergence)?;
    let deriv: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
    let mut roots = Vec::with_capacity(eigenvalues.len());
    for mut z in eigenvalues {
        for _ in 0..50 {
            let dz = horner(&deriv, z);
            if dz.norm() == 0.0 {
                break;
            }
            let step = horner(&c, z) / dz;
            z -= step;
            if step.norm() <= 1e-17 * z.norm().max(1.0) {
                break;
            }
        }
        let scale: f64 = c.iter().enumerate().map(|(k, a)| a.abs() * z.norm().powi(k as i32)).sum();
        if horner(&c, z).norm() > tol * scale.max(1.0) {
            return Err(Error::NonConvergence);
        }
        roots.push(z);
    }
    Ok(roots)
}

/// Reduction of the coordinates of a finite point set into `𝔽_q`, chosen to
/// be the restriction of a ring homomorphism from the number field they
/// generate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularEmbedding {
    pub q: u64,
    /// `q ≡ 1 (mod root_order)`.
    pub root_order: u64,
    zeta: u64,
    /// `p ↦ (N_p, r_p)` with `r_p^{N_p} = p` in `𝔽_q`.
    radicals: BTreeMap<u64, (u64, u64)>,
}

const MAX_ROOT_ORDER: u64 = 1 << 24;
const MAX_GAUSS_PRIME: u64 = 1 << 20;

fn legendre(a: u64, p: u64) -> i64 {
    match pow_mod(a % p, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

impl ModularEmbedding {
    /// Torsion orders and radical indices the points need.
    fn requirements(points: &[Vec<KummerNumber>]) -> Result<(u64, BTreeMap<u64, u64>)> {
        let overflow = || Error::EmbeddingFailure;
        let mut torsion = 1u64;
        let mut radicals: BTreeMap<u64, u64> = BTreeMap::new();
        for x in points.iter().flatten() {
            let den = x.torsion_exponent().denom().to_u64().ok_or_else(overflow)?;
            torsion = checked_lcm(torsion, den).ok_or_else(overflow)?;
            for (p, e) in x.prime_exponents() {
                let den = e.denom().to_u64().ok_or_else(overflow)?;
                let slot = radicals.entry(*p).or_insert(1);
                *slot = checked_lcm(*slot, den).ok_or_else(overflow)?;
            }
        }
        let mut order = torsion;
        for (&p, &n) in &radicals {
            order = checked_lcm(order, n).ok_or_else(overflow)?;
            if n % 2 == 0 {
                let extra = if p == 2 { 8 } else { 4 * p };
                order = checked_lcm(order, extra).ok_or_else(overflow)?;
            }
        }
        if order > MAX_ROOT_ORDER {
            return Err(Error::EmbeddingFailure);
        }
        Ok((order, radicals))
    }

    /// Draws primes `q ≡ 1 (mod L)` below `2^62` until every required radical
    /// exists modulo `q`.
    pub fn new<R: Rng>(points: &[Vec<KummerNumber>], rng: &mut R) -> Result<Self> {
        let (order, needs) = Self::requirements(points)?;
        if needs.keys().any(|&p| p > MAX_GAUSS_PRIME && needs[&p] % 2 == 0) {
            return Err(Error::EmbeddingFailure);
        }
        let max_k = ((1u64 << 62) - 1) / order;
        let min_k = (max_k / 2).max(1);
        for _ in 0..64 {
            let q = loop {
                let k = rng.gen_range(min_k..=max_k);
                let q = 1 + k * order;
                if is_prime(q) && !needs.contains_key(&q) {
                    break q;
                }
            };
            if let Some(e) = Self::with_prime(q, order, &needs, rng) {
                return Ok(e);
            }
        }
        Err(Error::EmbeddingFailure)
    }

    fn with_prime<R: Rng>(q: u64, order: u64, needs: &BTreeMap<u64, u64>, rng: &mut R) -> Option<Self> {
        let zeta = element_of_order(order, q, rng)?;
        let root = |m: u64| pow_mod(zeta, order / m, q);
        let mut radicals = BTreeMap::new();
        for (&p, &n) in needs {
            let r = if n % 2 == 0 {
                let sqrt = if p == 2 {
                    let z8 = root(8);
                    (z8 + pow_mod(z8, 7, q)) % q
                } else {
                    let zp = root(p);
                    let mut g = 0u64;
                    for a in 1..p {
                        let term = pow_mod(zp, a, q);
                        g = if legendre(a, p) == 1 { (g + term) % q } else { (g + q - term) % q };
                    }
                    if p % 4 == 1 {
                        g
                    } else {
                        mul_mod(q - root(4), g, q)
                    }
                };
                if mul_mod(sqrt, sqrt, q) != p % q {
                    return None;
                }
                nth_root_mod(sqrt, n / 2, q, rng)?
            } else {
                nth_root_mod(p % q, n, q, rng)?
            };
            debug_assert_eq!(pow_mod(r, n, q), p % q);
            radicals.insert(p, (n, r));
        }
        Some(Self { q, root_order: order, zeta, radicals })
    }

    pub fn image(&self, x: &KummerNumber) -> u64 {
        let q = self.q;
        let t = x.torsion_exponent();
        let k = (t * BigInt::from(self.root_order)).to_integer().to_u64().expect("torsion order divides L");
        let mut acc = pow_mod(self.zeta, k, q);
        for (p, e) in x.prime_exponents() {
            let (n, r) = self.radicals[p];
            let k = (e * BigInt::from(n)).to_integer();
            let base = if k.is_negative() { pow_mod(r, q - 2, q) } else { r };
            let k = k.abs().to_u64().expect("exponent fits in u64");
            acc = mul_mod(acc, pow_mod(base, k % (q - 1), q), q);
        }
        acc
    }
}

/// Outcome of the hypersurface test. Containment is never asserted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    NotContained { q: u64, monomials: usize, points: usize, attempts: u32 },
    Undecided { attempts: u32, monomials: usize, points: usize },
}

impl Containment {
    pub fn is_not_contained(&self) -> bool {
        matches!(self, Containment::NotContained { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContainmentConfig {
    pub seed: u64,
    pub retries: u32,
    pub exec: Exec,
}

impl Default for ContainmentConfig {
    fn default() -> Self {
        Self { seed: 0, retries: 32, exec: Exec::default() }
    }
}

/// Exponent vectors of all monomials of total degree `≤ deg` in `n` variables.
pub fn monomials(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, deg, &mut Vec::new(), &mut out);
    out.sort_by_key(|m| m.iter().sum::<u32>());
    out
}

fn rank_mod(mut rows: Vec<Vec<u64>>, cols: usize, q: u64) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(rank, p);
        let inv = pow_mod(rows[rank][c], q - 2, q);
        for i in rank + 1..rows.len() {
            if rows[i][c] == 0 {
                continue;
            }
            let f = mul_mod(rows[i][c], inv, q);
            for j in c..cols {
                let sub = mul_mod(f, rows[rank][j], q);
                rows[i][j] = (rows[i][j] + q - sub) % q;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Refutes that `points` lie on a common hypersurface of degree `≤ deg` by
/// showing the monomial evaluation matrix has full column rank modulo `q`.
pub fn hypersurface_containment(
    points: &[Vec<KummerNumber>],
    deg: u32,
    config: &ContainmentConfig,
) -> Result<Containment> {
    if points.is_empty() || deg == 0 {
        return Err(Error::Precondition("need at least one point and degree bound ≥ 1".into()));
    }
    let n = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    // Rescaling coordinates preserves hypersurface degree; dividing by the
    // first point removes radicals shared by all points.
    let shift = point_inv(&points[0]);
    let scaled: Vec<Vec<KummerNumber>> = points.iter().map(|p| point_mul(p, &shift)).collect();
    let mons = monomials(n, deg);
    let (m, npts) = (mons.len(), points.len());
    if npts < m {
        return Ok(Containment::Undecided { attempts: 0, monomials: m, points: npts });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for attempt in 1..=config.retries {
        let emb = ModularEmbedding::new(&scaled, &mut rng)?;
        let q = emb.q;
        let rows = config.exec.map(&scaled, |p| {
            let img: Vec<u64> = p.iter().map(|x| emb.image(x)).collect();
            mons.iter()
                .map(|e| e.iter().zip(&img).fold(1u64, |acc, (k, v)| mul_mod(acc, pow_mod(*v, *k as u64, q), q)))
                .collect::<Vec<u64>>()
        });
        if rank_mod(rows, m, q) == m {
            return Ok(Containment::NotContained { q, monomials: m, points: npts, attempts: attempt });
        }
    }
    Ok(Containment::Undecided { attempts: config.retries, monomials: m, points: npts })
}

/// Exact orbit prefix of length `n ≥ 1`.
pub fn orbit_sample(phi: &AffineMonomialMap, x: &[KummerNumber], n: usize) -> Result<Vec<Vec<KummerNumber>>> {
    if n == 0 {
        return Err(Error::Precondition("orbit length must be at least 1".into()));
    }
    crate::dynamics::orbit(phi, x, n)
}

/// Least `p ≥ 1` with `φᵖ(x) = x`, found by exact iteration up to `cap`.
pub fn exact_period(phi: &AffineMonomialMap, x: &[KummerNumber], cap: u64) -> Option<u64> {
    let mut y = phi.apply(x).ok()?;
    for p in 1..=cap {
        if y == x {
            return Some(p);
        }
        y = phi.apply(&y).ok()?;
    }
    None
}

/// `lcm` of the torsion orders of all coordinates, if it fits in `u64`.
pub fn torsion_lcm(points: &[Vec<KummerNumber>]) -> Option<u64> {
    points.iter().flatten().try_fold(1u64, |acc, x| checked_lcm(acc, x.torsion_exponent().denom().to_u64()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::mat;

    fn pt(v: &[&str]) -> Vec<KummerNumber> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn finite_models() {
        let phi = AffineMonomialMap::new(mat(&[&[2]]), pt(&["1"])).unwrap();
        let run = finite_model_run(&phi, 7).unwrap();
        assert_eq!(run.orbits, vec![vec![0], vec![1, 2, 4], vec![3, 6, 5]]);
        assert_eq!(run.period(&[5]), 3);
        let run = finite_model_run(&phi, 1).unwrap();
        assert_eq!(run.orbits.len(), 1);
        let phi = AffineMonomialMap::new(mat(&[&[1, 1], &[0, 1]]), pt(&["1", "zeta(5)"])).unwrap();
        let run = finite_model_run(&phi, 5).unwrap();
        assert_eq!(run.orbit_sizes().iter().sum::<usize>(), 25);
        assert!(finite_model_run(&AffineMonomialMap::new(mat(&[&[2]]), pt(&["1"])).unwrap(), 4).is_err());
        assert!(finite_model_run(&AffineMonomialMap::new(mat(&[&[1]]), pt(&["2"])).unwrap(), 4).is_err());
    }

    #[test]
    fn numeric_root_examples() {
        let r = numeric_roots(&IntPoly::from_i64(&[1, -3, 1]).unwrap(), 1e-12).unwrap();
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-9);
        assert!((re[1] - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
        let r = numeric_roots(&IntPoly::linear(1), 1e-12).unwrap();
        assert!((r[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let r = numeric_roots(&IntPoly::from_i64(&[1, 0, 1]).unwrap(), 1e-12).unwrap();
        assert!(r.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12));
        let r = numeric_roots(&IntPoly::from_i64(&[1, -2, 1]).unwrap(), 1e-12).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn embedding_is_multiplicative() {
        let pts = vec![pt(&["zeta(12) * 2^(1/2)", "3^(1/2) * 5^(1/3)", "-7^(1/4)"])];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = ModularEmbedding::new(&pts, &mut rng).unwrap();
        let q = e.q;
        let x: KummerNumber = "zeta(12) * 2^(1/2)".parse().unwrap();
        let y: KummerNumber = "3^(1/2) * 5^(1/3)".parse().unwrap();
        assert_eq!(e.image(&x.mul(&y)), mul_mod(e.image(&x), e.image(&y), q));
        assert_eq!(pow_mod(e.image(&x), 24, q), e.image(&x.pow_i64(24)));
        // √2 · √3 = √6 and ζ₈ + ζ₈⁻¹ = √2 hold in the image.
        let s2: KummerNumber = "2^(1/2)".parse().unwrap();
        let z8: KummerNumber = "zeta(8)".parse().unwrap();
        let pts = vec![vec![s2.clone(), z8.clone()]];
        let e = ModularEmbedding::new(&pts, &mut rng).unwrap();
        assert_eq!(e.image(&s2), (e.image(&z8) + e.image(&z8.inv())) % e.q);
        let s3: KummerNumber = "3^(1/2)".parse().unwrap();
        let e = ModularEmbedding::new(&[vec![s3.clone(), KummerNumber::root_of_unity(1, 12)]], &mut rng).unwrap();
        let z = e.image(&KummerNumber::root_of_unity(1, 12));
        // √3 = ζ₁₂ + ζ₁₂⁻¹
        assert_eq!(e.image(&s3), (z + pow_mod(z, 11, e.q)) % e.q);
    }

    #[test]
    fn containment_examples() {
        let cfg = ContainmentConfig::default();
        let pts: Vec<Vec<KummerNumber>> = (0..=20)
            .map(|k| vec![KummerNumber::from_integer(2).pow_i64(k), KummerNumber::from_integer(3).pow_i64(k)])
            .collect();
        assert!(hypersurface_containment(&pts, 3, &cfg).unwrap().is_not_contained());
        let same = vec![pt(&["2", "3"]); 30];
        assert!(!hypersurface_containment(&same, 1, &cfg).unwrap().is_not_contained());
        let mut grid = Vec::new();
        for k in 0..5 {
            for t in [2, 3, 5, 7, 11] {
                grid.push(vec![KummerNumber::root_of_unity(k, 5), KummerNumber::from_integer(t)]);
            }
        }
        assert!(hypersurface_containment(&grid, 2, &cfg).unwrap().is_not_contained());
        // five points on a line are contained in a conic
        let line: Vec<Vec<KummerNumber>> =
            (1..=25).map(|k| vec![KummerNumber::from_integer(k), KummerNumber::from_integer(k)]).collect();
        assert!(!hypersurface_containment(&line, 2, &cfg).unwrap().is_not_contained());
        assert!(hypersurface_containment(&[], 2, &cfg).is_err());
    }

    #[test]
    fn orbit_samples() {
        let phi = AffineMonomialMap::new(mat(&[&[1, 1], &[0, 1]]), pt(&["1", "3"])).unwrap();
        let o = orbit_sample(&phi, &pt(&["1", "1"]), 3).unwrap();
        assert_eq!(o, vec![pt(&["1", "1"]), pt(&["1", "3"]), pt(&["3", "9"])]);
        assert!(orbit_sample(&phi, &pt(&["1", "1"]), 0).is_err());
    }
}
