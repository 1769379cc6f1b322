//! Classification of affine monomial maps: dynamical degree, invariant
//! fibrations, wildness, the unipotent/non-unipotent splitting, dense
//! families of periodic cosets, and the recursive fibration analysis.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{char_eval, from_log_row, log_coords, point_inv, point_mul, KummerNumber};
use crate::intlinalg::{
    charpoly, left_kernel_saturated, minpoly, rational_kernel, rref, solve_mod, solve_rational, IntMatrix, Lattice,
};
use crate::numtheory::{divisors, gcd, lcm};
use crate::oracle::{hypersurface_containment, Containment, ContainmentConfig};
use crate::par::Exec;
use crate::polyalg::{cyclotomic_part, quasi_unipotence, spectral_radius, IntPoly, QuasiUnipotence, RadiusInterval};
use crate::torus::{
    coset_cycle, cycle_invariant, image_subtorus, monomial, quotient_map, restrict_endomorphism, restrict_map,
    AffineMonomialMap, Coset, CosetKey, Subtorus,
};
use crate::{Error, Result};

pub const DEFAULT_ITERATE_CAP: u64 = 360;
pub const DEFAULT_TORSION_CAP: u64 = 50;
pub const DEFAULT_FAMILY_BUDGET: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynamicalDegree {
    One(QuasiUnipotence),
    Greater(RadiusInterval),
}

impl DynamicalDegree {
    pub fn is_one(&self) -> bool {
        matches!(self, DynamicalDegree::One(_))
    }
}

pub fn dynamical_degree(phi: &AffineMonomialMap) -> DynamicalDegree {
    dynamical_degree_with_tol(phi, &BigRational::new(1.into(), 1_000_000_000_000u64.into()))
}

pub fn dynamical_degree_with_tol(phi: &AffineMonomialMap, rel_tol: &BigRational) -> DynamicalDegree {
    if phi.dim() == 0 {
        return DynamicalDegree::One(QuasiUnipotence { ell: 1, m: 0 });
    }
    match quasi_unipotence(&minpoly(phi.matrix())) {
        Some(q) => DynamicalDegree::One(q),
        None => DynamicalDegree::Greater(spectral_radius(&charpoly(phi.matrix()), rel_tol)),
    }
}

/// `{c ∈ ℤʳ : ∏ wᵢ^{cᵢ} = 1}`.
pub fn relation_lattice(w: &[KummerNumber]) -> Lattice {
    let r = w.len();
    if r == 0 {
        return Lattice::zero(0);
    }
    let (primes, rows) = log_coords(w);
    let mut lattice = Lattice::full(r);
    if !primes.is_empty() {
        let mut m = IntMatrix::zeros(r, primes.len());
        for j in 0..primes.len() {
            let den = rows.iter().fold(BigInt::one(), |acc, row| acc.lcm(row[j + 1].denom()));
            for i in 0..r {
                m[(i, j)] = (&rows[i][j + 1] * BigRational::from_integer(den.clone())).to_integer();
            }
        }
        lattice = left_kernel_saturated(&m);
    }
    let modulus = rows.iter().fold(BigInt::one(), |acc, row| acc.lcm(row[0].denom()));
    if modulus > BigInt::one() {
        let coeffs: Vec<BigInt> =
            rows.iter().map(|row| (&row[0] * BigRational::from_integer(modulus.clone())).to_integer()).collect();
        let sol = solve_mod(&IntMatrix::from_rows(&[coeffs]).unwrap(), &[BigInt::zero()], &modulus)
            .expect("the zero vector solves a homogeneous congruence");
        let mut gens = sol.kernel;
        for i in 0..r {
            let mut e = vec![BigInt::zero(); r];
            e[i] = modulus.clone();
            gens.push(e);
        }
        let torsion = Lattice::from_rows(r, &gens);
        lattice = lattice.intersection(&torsion).expect("same ambient dimension");
    }
    lattice
}

/// Sublattice of the row span of `generators` on which `χ_b(x) = 1`.
pub fn character_kernel(generators: &IntMatrix, x: &[KummerNumber]) -> Lattice {
    let n = generators.cols();
    if generators.rows() == 0 {
        return Lattice::zero(n);
    }
    let w: Vec<KummerNumber> =
        (0..generators.rows()).map(|i| char_eval(x, generators.row(i)).expect("lengths agree")).collect();
    let coeffs = relation_lattice(&w);
    if coeffs.is_zero() {
        return Lattice::zero(n);
    }
    Lattice::from_generators(n, &coeffs.basis().mul(generators))
}

/// A monomial first integral `χ_B ∘ φ^ℓ = χ_B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationWitness {
    pub ell: u64,
    pub b: Vec<BigInt>,
    /// All characters fixed by `φ^ℓ`, in HNF; `b` is its first row.
    pub kernel: Lattice,
}

impl FibrationWitness {
    pub fn verify(&self, phi: &AffineMonomialMap) -> bool {
        let psi = phi.iterate(self.ell);
        let shifted = psi.matrix().sub(&IntMatrix::identity(phi.dim()));
        !self.b.iter().all(Zero::is_zero)
            && shifted.vec_mul(&self.b).iter().all(Zero::is_zero)
            && char_eval(psi.gamma(), &self.b).is_ok_and(|v| v.is_one())
    }
}

/// Iterates that can carry new fixed characters, capped.
pub fn fibration_scan_set(phi: &AffineMonomialMap, iterate_cap: u64) -> Vec<u64> {
    let base = match dynamical_degree(phi) {
        DynamicalDegree::One(q) => q.ell,
        DynamicalDegree::Greater(_) => cyclotomic_part(&charpoly(phi.matrix())).order_lcm(),
    };
    divisors(base).into_iter().filter(|&d| d <= iterate_cap).collect()
}

pub fn find_invariant_fibration(phi: &AffineMonomialMap, iterate_cap: u64) -> Option<FibrationWitness> {
    let n = phi.dim();
    if n == 0 {
        return None;
    }
    for ell in fibration_scan_set(phi, iterate_cap) {
        let psi = phi.iterate(ell);
        let fixed = left_kernel_saturated(&psi.matrix().sub(&IntMatrix::identity(n)));
        if fixed.is_zero() {
            continue;
        }
        let kernel = character_kernel(fixed.basis(), psi.gamma());
        if !kernel.is_zero() {
            let b = kernel.basis().row_vec(0);
            return Some(FibrationWitness { ell, b, kernel });
        }
    }
    None
}

/// `c` with `γ̄^c = 1`, and the fixed character `b = c·π` it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub c: Vec<BigInt>,
    pub b: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WildnessCertificate {
    pub ell: u64,
    pub m: u32,
    pub phi0: IntMatrix,
    pub projection: IntMatrix,
    pub gamma_bar: Vec<KummerNumber>,
    pub primes: Vec<u64>,
    /// Rows indexed by `primes`, columns by coordinates of `γ̄`.
    pub exponent_matrix: Vec<Vec<BigRational>>,
    pub rank: usize,
    pub refutation: Option<Refutation>,
}

impl WildnessCertificate {
    pub fn is_dense(&self) -> bool {
        self.refutation.is_none()
    }
}

pub fn wildness_certificate(phi: &AffineMonomialMap) -> Result<WildnessCertificate> {
    let DynamicalDegree::One(q) = dynamical_degree(phi) else {
        return Err(Error::Precondition("wildness needs dynamical degree exactly 1".into()));
    };
    if !phi.is_automorphism() {
        return Err(Error::Precondition("wildness needs an automorphism (|det A| = 1)".into()));
    }
    let n = phi.dim();
    let psi = phi.iterate(q.ell);
    let phi0 = psi.matrix().sub(&IntMatrix::identity(n));
    let projection = quotient_map(&image_subtorus(&phi0));
    let gamma_bar = monomial(psi.gamma(), &projection);
    let (primes, logs) = log_coords(&gamma_bar);
    let r = gamma_bar.len();
    let exponent_matrix: Vec<Vec<BigRational>> =
        (0..primes.len()).map(|j| (0..r).map(|i| logs[i][j + 1].clone()).collect()).collect();
    let mut work = exponent_matrix.clone();
    let rank = rref(&mut work).len();
    let refutation = if rank < r {
        let kernel = rational_kernel(&exponent_matrix, r);
        let v = &kernel[0];
        let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let c: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
        let g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let c: Vec<BigInt> = c.iter().map(|x| x / &g).collect();
        let order = char_eval(&gamma_bar, &c)
            .expect("lengths agree")
            .torsion_order()
            .expect("positive parts cancel on the kernel");
        let c: Vec<BigInt> = c.iter().map(|x| x * &order).collect();
        let b = projection.vec_mul(&c);
        Some(Refutation { c, b })
    } else {
        None
    };
    Ok(WildnessCertificate {
        ell: q.ell,
        m: q.m,
        phi0,
        projection,
        gamma_bar,
        primes,
        exponent_matrix,
        rank,
        refutation,
    })
}

/// `φ^ℓ = ι ∘ (φ₁ × φ₂) ∘ ι⁻¹` on `X₁ × X₂`, with `φ₁` unipotent and `φ₂`
/// conjugate to a pure endomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub ell: u64,
    /// `φ^ℓ`.
    pub psi: AffineMonomialMap,
    pub minpoly: IntPoly,
    pub r: u32,
    pub q: IntPoly,
    pub x1: Subtorus,
    pub x2: Subtorus,
    pub gamma1: Vec<KummerNumber>,
    pub gamma2: Vec<KummerNumber>,
    pub gamma1_intrinsic: Vec<KummerNumber>,
    pub gamma2_intrinsic: Vec<KummerNumber>,
    pub a1: IntMatrix,
    pub a2: IntMatrix,
    pub beta2_intrinsic: Vec<KummerNumber>,
    pub beta2: Vec<KummerNumber>,
}

impl Decomposition {
    /// `ι(s, t) = s^{V₁}·t^{V₂}`.
    pub fn iota(&self, s: &[KummerNumber], t: &[KummerNumber]) -> Vec<KummerNumber> {
        point_mul(&self.x1.from_intrinsic(s), &self.x2.from_intrinsic(t))
    }

    pub fn phi1(&self) -> AffineMonomialMap {
        AffineMonomialMap::new(self.a1.clone(), self.gamma1_intrinsic.clone()).expect("restriction of an isogeny")
    }

    pub fn phi2(&self) -> AffineMonomialMap {
        AffineMonomialMap::new(self.a2.clone(), self.gamma2_intrinsic.clone()).expect("restriction of an isogeny")
    }

    /// `T_{β₂} ∘ φ₂ ∘ T_{β₂}⁻¹`, whose translation part is the identity.
    pub fn conjugated_phi2(&self) -> AffineMonomialMap {
        self.phi2().conjugate_by_translation(&self.beta2_intrinsic)
    }

    /// Annihilators meet in zero and span a full-rank lattice.
    pub fn lattices_disjoint(&self) -> bool {
        let (a1, a2) = (self.x1.annihilator(), self.x2.annihilator());
        a1.intersection(a2).is_ok_and(|l| l.is_zero()) && a1.sum(a2).is_ok_and(|l| l.rank() == self.psi.dim())
    }
}

fn log_matrix_solve(m: &IntMatrix, primes: &[u64], rows: &[Vec<BigRational>]) -> Option<Vec<KummerNumber>> {
    let width = primes.len() + 1;
    let mut out = vec![vec![BigRational::zero(); width]; m.cols()];
    for j in 0..width {
        let rhs: Vec<BigRational> = rows.iter().map(|r| r[j].clone()).collect();
        let x = solve_rational(m, &rhs)?;
        for (i, v) in x.into_iter().enumerate() {
            out[i][j] = v;
        }
    }
    Some(out.iter().map(|row| from_log_row(primes, row)).collect())
}

pub fn decompose(phi: &AffineMonomialMap) -> Result<Decomposition> {
    if dynamical_degree(phi).is_one() {
        return Err(Error::Precondition("decomposition needs dynamical degree > 1".into()));
    }
    let n = phi.dim();
    let ell = cyclotomic_part(&minpoly(phi.matrix())).order_lcm();
    let psi = phi.iterate(ell);
    let b = psi.matrix().clone();
    let p = minpoly(&b);
    let r = cyclotomic_part(&p).multiplicity(1);
    let q = p.exact_div(&IntPoly::linear(1).pow(r)).expect("(x-1)^r divides the minimal polynomial");
    let shifted = b.sub(&IntMatrix::identity(n));
    let x2 = image_subtorus(&shifted.pow(r as u64));
    let x1 = image_subtorus(&q.eval_matrix(&b));
    let (k1, k2) = (x1.dim(), x2.dim());
    let v = x1.cochar_basis().hstack(x2.cochar_basis());

    let (primes, logs) = log_coords(psi.gamma());
    let w = log_matrix_solve(&v, &primes, &logs)
        .ok_or_else(|| Error::Precondition("X1 + X2 does not have finite index".into()))?;
    let gamma1_intrinsic = w[..k1].to_vec();
    let gamma2_intrinsic = w[k1..k1 + k2].to_vec();
    let gamma1 = x1.from_intrinsic(&gamma1_intrinsic);
    let gamma2 = x2.from_intrinsic(&gamma2_intrinsic);

    let a1 = restrict_endomorphism(&b, &x1).expect("X1 is invariant");
    let a2 = restrict_endomorphism(&b, &x2).expect("X2 is invariant");
    let (p2, logs2) = log_coords(&gamma2_intrinsic);
    let beta2_intrinsic = log_matrix_solve(&a2.sub(&IntMatrix::identity(k2)), &p2, &logs2)
        .ok_or_else(|| Error::Precondition("A2 - I is singular".into()))?;
    let beta2 = x2.from_intrinsic(&beta2_intrinsic);
    Ok(Decomposition {
        ell,
        psi,
        minpoly: p,
        r,
        q,
        x1,
        x2,
        gamma1,
        gamma2,
        gamma1_intrinsic,
        gamma2_intrinsic,
        a1,
        a2,
        beta2_intrinsic,
        beta2,
    })
}

fn mat_mod(m: &IntMatrix, d: u64) -> Vec<Vec<u64>> {
    let d = BigInt::from(d);
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.mod_floor(&d).to_u64().unwrap()).collect()).collect()
}

fn mat_mul_mod(a: &[Vec<u64>], b: &[Vec<u64>], d: u64) -> Vec<Vec<u64>> {
    let k = a.len();
    (0..k).map(|i| (0..k).map(|j| (0..k).map(|t| a[i][t] * b[t][j] % d).sum::<u64>() % d).collect()).collect()
}

fn mat_vec_mod(a: &[Vec<u64>], u: &[u64], d: u64) -> Vec<u64> {
    a.iter().map(|row| row.iter().zip(u).map(|(x, y)| x * y % d).sum::<u64>() % d).collect()
}

fn mat_pow_mod(a: &[Vec<u64>], mut e: u64, d: u64) -> Vec<Vec<u64>> {
    let k = a.len();
    let mut result: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j) % d).collect()).collect();
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul_mod(&result, &base, d);
        }
        base = mat_mul_mod(&base, &base, d);
        e >>= 1;
    }
    result
}

/// Multiplicative order of `A` acting on `(ℤ/d)ᵏ`; requires `gcd(d, det A) = 1`.
pub fn matrix_order_mod(a: &IntMatrix, d: u64) -> u64 {
    let k = a.rows();
    if d == 1 || k == 0 {
        return 1;
    }
    let m = mat_mod(a, d);
    let id: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
    let mut cur = m.clone();
    let mut order = 1;
    while cur != id {
        cur = mat_mul_mod(&cur, &m, d);
        order += 1;
    }
    order
}

/// A torsion point `ζ_d^u` of the torus together with its exact period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub exponents: Vec<u64>,
    pub point: Vec<KummerNumber>,
    pub period: u64,
}

fn torsion_point(u: &[u64], d: u64) -> Vec<KummerNumber> {
    u.iter().map(|&x| KummerNumber::root_of_unity(x as i64, d)).collect()
}

/// `u`-th element of `(ℤ/d)ᵏ` in lexicographic order.
fn nth_vector(mut idx: u64, k: usize, d: u64) -> Vec<u64> {
    let mut u = vec![0; k];
    for slot in u.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
    u
}

pub fn periodic_torsion_points(a2: &IntMatrix, d: u64, budget: usize) -> Result<Vec<PeriodicPoint>> {
    periodic_torsion_points_with(a2, d, budget, Exec::default())
}

pub fn periodic_torsion_points_with(a2: &IntMatrix, d: u64, budget: usize, exec: Exec) -> Result<Vec<PeriodicPoint>> {
    if d == 0 {
        return Err(Error::Precondition("torsion order must be positive".into()));
    }
    let det = a2.det().abs();
    if a2.rows() > 0 && d != 1 && gcd(d, (&det % BigInt::from(d)).to_u64().unwrap()) != 1 {
        return Err(Error::Precondition(format!("gcd({d}, |det A2| = {det}) must be 1")));
    }
    let k = a2.rows();
    let total = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let count = (budget as u128).min(total) as usize;
    let order = matrix_order_mod(a2, d);
    let m = mat_mod(a2, d);
    let powers: Vec<(u64, Vec<Vec<u64>>)> = divisors(order).into_iter().map(|p| (p, mat_pow_mod(&m, p, d))).collect();
    let points = exec.map_range(count, |idx| {
        let u = nth_vector(idx as u64, k, d);
        let (period, mp) =
            powers.iter().find(|(_, mp)| mat_vec_mod(mp, &u, d) == u).expect("the full order fixes every vector");
        let point = torsion_point(&u, d);
        let lifted: Vec<Vec<BigInt>> = mp.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let image = monomial(&point, &IntMatrix::from_rows_with_cols(&lifted, k).expect("square"));
        let ok = image == point;
        (PeriodicPoint { exponents: u, point, period: *period }, ok)
    });
    if let Some((p, _)) = points.iter().find(|(_, ok)| !ok) {
        return Err(Error::Precondition(format!("periodic point {:?} failed exact verification", p.exponents)));
    }
    Ok(points.into_iter().map(|(p, _)| p).collect())
}

/// A cycle `C, φ(C), …` of cosets permuted by `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetCycle {
    pub cosets: Vec<Coset>,
    pub torsion_order: u64,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFamily {
    pub decomposition: Decomposition,
    pub cycles: Vec<CosetCycle>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyConfig {
    pub budget: usize,
    pub torsion_cap: u64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_FAMILY_BUDGET, torsion_cap: DEFAULT_TORSION_CAP }
    }
}

fn canonical_base(base: &[KummerNumber], beta2: &[KummerNumber]) -> Vec<KummerNumber> {
    let shifted = point_mul(base, beta2);
    point_mul(&point_inv(beta2), &shifted.iter().map(KummerNumber::torsion_part).collect::<Vec<_>>())
}

fn has_exact_order(u: &[u64], d: u64) -> bool {
    u.iter().fold(d, |g, &x| gcd(g, x)) == 1
}

pub fn invariant_family(phi: &AffineMonomialMap, config: &FamilyConfig) -> Result<InvariantFamily> {
    let dec = decompose(phi)?;
    let mut cycles = Vec::new();
    if config.budget == 0 {
        return Ok(InvariantFamily { decomposition: dec, cycles });
    }
    let det2 = dec.a2.det().abs().to_u64().unwrap_or(0);
    let k2 = dec.x2.dim();
    let beta_inv = point_inv(&dec.beta2);
    let mut seen: HashSet<CosetKey> = HashSet::new();
    'orders: for d in 1..=config.torsion_cap {
        if det2 != 0 && gcd(d, det2) != 1 {
            continue;
        }
        let cap = dec.ell.saturating_mul(matrix_order_mod(&dec.a2, d)) as usize + 1;
        let total = d.checked_pow(k2 as u32).unwrap_or(u64::MAX);
        for idx in 0..total {
            let u = nth_vector(idx, k2, d);
            if !has_exact_order(&u, d) {
                continue;
            }
            let t = dec.x2.from_intrinsic(&torsion_point(&u, d));
            let base = point_mul(&beta_inv, &t);
            let start = Coset::new(base, dec.x1.clone())?;
            if seen.contains(&start.key()) {
                continue;
            }
            let Some(cycle) = coset_cycle(phi, &start, cap) else { continue };
            let cosets: Vec<Coset> = cycle
                .into_iter()
                .map(|c| Coset { base: canonical_base(&c.base, &dec.beta2), torus: c.torus })
                .collect();
            for c in &cosets {
                seen.insert(c.key());
            }
            let verified = cycle_invariant(phi, &cosets);
            cycles.push(CosetCycle { cosets, torsion_order: d, verified });
            if cycles.len() >= config.budget {
                break 'orders;
            }
        }
    }
    Ok(InvariantFamily { decomposition: dec, cycles })
}

/// Sample points on the cosets of a family, moving along each coset with
/// small positive integer coordinates so that no new roots of unity appear.
/// Cycles are taken greedily while the lcm of all torsion orders stays at
/// most `torsion_lcm_cap`.
pub fn family_sample_points(
    family: &InvariantFamily,
    per_coset: usize,
    max_points: usize,
    torsion_lcm_cap: u64,
    seed: u64,
) -> Vec<Vec<KummerNumber>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut order_lcm: u64 = 1;
    for cycle in &family.cycles {
        let cyc_lcm = cycle
            .cosets
            .iter()
            .flat_map(|c| c.base.iter())
            .map(|x| x.torsion_exponent().denom().to_u64().unwrap_or(u64::MAX))
            .try_fold(order_lcm, crate::numtheory::checked_lcm);
        match cyc_lcm {
            Some(l) if l <= torsion_lcm_cap => order_lcm = l,
            _ => continue,
        }
        for coset in &cycle.cosets {
            for _ in 0..per_coset {
                if points.len() >= max_points {
                    return points;
                }
                let y: Vec<KummerNumber> = (0..coset.torus.dim())
                    .map(|_| {
                        let p = [2i64, 3, 5, 7, 11, 13][rng.gen_range(0..6)];
                        KummerNumber::from_integer(p).pow_i64(rng.gen_range(-3..=3))
                    })
                    .collect();
                points.push(point_mul(&coset.base, &coset.torus.from_intrinsic(&y)));
            }
        }
    }
    points
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Fibration,
    DegreeOneWild,
    DegreeGtOneDenseInvariants,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Fibration => "FIBRATION",
            Verdict::DegreeOneWild => "DEGREE_ONE_WILD",
            Verdict::DegreeGtOneDenseInvariants => "DEGREE_GT_ONE_DENSE_INVARIANTS",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyConfig {
    pub iterate_cap: u64,
    pub degree_bound: u32,
    pub torsion_cap: u64,
    pub family_budget: usize,
    pub samples_per_coset: usize,
    pub point_budget: usize,
    pub seed: u64,
    pub retries: u32,
    pub exec: Exec,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            iterate_cap: DEFAULT_ITERATE_CAP,
            degree_bound: 3,
            torsion_cap: DEFAULT_TORSION_CAP,
            family_budget: DEFAULT_FAMILY_BUDGET,
            samples_per_coset: 2,
            point_budget: 200,
            seed: 0,
            retries: 32,
            exec: Exec::default(),
        }
    }
}

impl ClassifyConfig {
    pub fn containment(&self) -> ContainmentConfig {
        ContainmentConfig { seed: self.seed, retries: self.retries, exec: self.exec }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub dynamical_degree: DynamicalDegree,
    pub fibration: Option<FibrationWitness>,
    pub wildness: Option<WildnessCertificate>,
    pub invariant_family: Option<InvariantFamily>,
    pub density: Option<Containment>,
    pub verdict: Verdict,
    pub flags: Vec<String>,
}

pub fn classify(phi: &AffineMonomialMap, config: &ClassifyConfig) -> Result<ClassificationReport> {
    let degree = dynamical_degree(phi);
    let mut fibration = find_invariant_fibration(phi, config.iterate_cap);
    let mut flags = Vec::new();
    let mut wildness = None;
    let mut family = None;
    let mut density = None;
    if degree.is_one() {
        if phi.is_automorphism() {
            if fibration.is_none() {
                let cert = wildness_certificate(phi)?;
                if let Some(refutation) = &cert.refutation {
                    flags.push(format!("fibration found at iterate {} above the cap {}", cert.ell, config.iterate_cap));
                    let kernel = Lattice::from_rows(phi.dim(), std::slice::from_ref(&refutation.b));
                    fibration = Some(FibrationWitness { ell: cert.ell, b: kernel.basis().row_vec(0), kernel });
                }
                wildness = Some(cert);
            }
        } else {
            flags.push("degree one without being an automorphism: wildness not assessed".into());
        }
    } else {
        let fam =
            invariant_family(phi, &FamilyConfig { budget: config.family_budget, torsion_cap: config.torsion_cap })?;
        let points = family_sample_points(&fam, config.samples_per_coset, config.point_budget, 1 << 20, config.seed);
        if !points.is_empty() {
            density = Some(hypersurface_containment(&points, config.degree_bound, &config.containment())?);
        }
        family = Some(fam);
    }
    let verdict = if fibration.is_some() {
        Verdict::Fibration
    } else if degree.is_one() {
        Verdict::DegreeOneWild
    } else {
        Verdict::DegreeGtOneDenseInvariants
    };
    Ok(ClassificationReport {
        dynamical_degree: degree,
        fibration,
        wildness,
        invariant_family: family,
        density,
        verdict,
        flags,
    })
}

/// Classifies many maps, in parallel when enabled.
pub fn classify_batch(maps: &[AffineMonomialMap], config: &ClassifyConfig) -> Vec<Result<ClassificationReport>> {
    config.exec.map(maps, |m| classify(m, config))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternative {
    /// Invariant proper subvarieties are dense.
    DenseInvariants,
    /// No proper invariant subvariety.
    NoProperInvariants,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DmNode {
    pub dim: usize,
    pub depth: usize,
    pub degree_one: bool,
    pub alternative: Alternative,
    pub fibration: Option<FibrationWitness>,
    /// Iterate used to restrict to the fibre through the identity.
    pub iterate: Option<u64>,
    pub fibre: Option<Subtorus>,
    pub verdict: Option<Verdict>,
    pub child: Option<Box<DmNode>>,
    pub depth_exhausted: bool,
}

impl DmNode {
    pub fn depth_reached(&self) -> usize {
        self.child.as_ref().map_or(self.depth, |c| c.depth_reached())
    }
}

pub fn dm_analysis(phi: &AffineMonomialMap, depth_cap: usize, iterate_cap: u64) -> Result<DmNode> {
    if depth_cap == 0 {
        return Err(Error::Precondition("depth cap must be at least 1".into()));
    }
    dm_node(phi, 0, depth_cap, iterate_cap)
}

fn dm_node(phi: &AffineMonomialMap, depth: usize, depth_cap: usize, iterate_cap: u64) -> Result<DmNode> {
    let n = phi.dim();
    let mut node = DmNode {
        dim: n,
        depth,
        degree_one: true,
        alternative: Alternative::NoProperInvariants,
        fibration: None,
        iterate: None,
        fibre: None,
        verdict: None,
        child: None,
        depth_exhausted: false,
    };
    if n == 0 {
        return Ok(node);
    }
    node.degree_one = dynamical_degree(phi).is_one();
    if !node.degree_one {
        node.alternative = Alternative::DenseInvariants;
    }
    let Some(fib) = find_invariant_fibration(phi, iterate_cap) else {
        node.verdict = Some(if node.degree_one { Verdict::DegreeOneWild } else { Verdict::DegreeGtOneDenseInvariants });
        return Ok(node);
    };
    node.verdict = Some(Verdict::Fibration);
    if depth + 1 >= depth_cap {
        node.fibration = Some(fib);
        node.depth_exhausted = true;
        return Ok(node);
    }
    let fibre = Subtorus::from_annihilator(&fib.kernel);
    let gamma_ell = phi.iterate(fib.ell).gamma().to_vec();
    let ann = fibre.annihilator();
    let mut j: u64 = 1;
    for i in 0..ann.rank() {
        let v = char_eval(&gamma_ell, ann.basis().row(i))?;
        let o = v.torsion_order().ok_or_else(|| Error::Precondition("fibre character is not torsion".into()))?;
        j = lcm(j, o.to_u64().ok_or_else(|| Error::Precondition("torsion order overflow".into()))?);
    }
    let iterate = fib.ell * j;
    let psi = phi.iterate(iterate);
    let restricted =
        restrict_map(&psi, &fibre).ok_or_else(|| Error::Precondition("iterate does not preserve the fibre".into()))?;
    node.child = Some(Box::new(dm_node(&restricted, depth + 1, depth_cap, iterate_cap)?));
    node.fibration = Some(fib);
    node.iterate = Some(iterate);
    node.fibre = Some(fibre);
    Ok(node)
}

/// Exact orbit prefix `x, φ(x), …` of length `n`.
pub fn orbit(phi: &AffineMonomialMap, x: &[KummerNumber], n: usize) -> Result<Vec<Vec<KummerNumber>>> {
    let mut out = Vec::with_capacity(n);
    let mut cur = x.to_vec();
    for i in 0..n {
        if i > 0 {
            cur = phi.apply(&cur)?;
        }
        out.push(cur.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::{ivec, mat};

    fn pt(v: &[&str]) -> Vec<KummerNumber> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn map(a: &[&[i64]], g: &[&str]) -> AffineMonomialMap {
        AffineMonomialMap::new(mat(a), pt(g)).unwrap()
    }

    #[test]
    fn degree_examples() {
        assert_eq!(
            dynamical_degree(&map(&[&[1, 0], &[0, 1]], &["2", "3"])),
            DynamicalDegree::One(QuasiUnipotence { ell: 1, m: 1 })
        );
        assert_eq!(
            dynamical_degree(&map(&[&[1, 1], &[0, 1]], &["1", "1"])),
            DynamicalDegree::One(QuasiUnipotence { ell: 1, m: 2 })
        );
        let DynamicalDegree::Greater(r) = dynamical_degree(&map(&[&[2, 1], &[1, 1]], &["1", "1"])) else { panic!() };
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        assert!(r.lo_f64() <= golden_sq && golden_sq <= r.hi_f64());
    }

    #[test]
    fn relation_lattice_examples() {
        assert!(relation_lattice(&pt(&["2", "3"])).is_zero());
        assert_eq!(relation_lattice(&pt(&["2", "4"])).basis_rows(), vec![ivec(&[2, -1])]);
        assert_eq!(relation_lattice(&pt(&["zeta(4)", "1"])).basis_rows(), vec![ivec(&[4, 0]), ivec(&[0, 1])]);
        let l = relation_lattice(&pt(&["zeta(6) * 2", "-2"]));
        for row in l.basis_rows() {
            assert!(char_eval(&pt(&["zeta(6) * 2", "-2"]), &row).unwrap().is_one());
        }
        assert_eq!(l.rank(), 1);
    }

    #[test]
    fn fibration_examples() {
        assert!(find_invariant_fibration(&map(&[&[1, 0], &[0, 1]], &["2", "3"]), 360).is_none());
        let w = find_invariant_fibration(&map(&[&[1, 0], &[0, 1]], &["2", "4"]), 360).unwrap();
        assert_eq!((w.ell, w.b.clone()), (1, ivec(&[2, -1])));
        let phi = map(&[&[1, 1], &[0, 1]], &["1", "1"]);
        let w = find_invariant_fibration(&phi, 360).unwrap();
        assert_eq!(w.b, ivec(&[0, 1]));
        assert!(w.verify(&phi));
        let rot = map(&[&[0, -1], &[1, 0]], &["1", "1"]);
        let w = find_invariant_fibration(&rot, 360).unwrap();
        assert!(w.verify(&rot));
    }

    #[test]
    fn wildness_examples() {
        let c = wildness_certificate(&map(&[&[1, 0], &[0, 1]], &["2", "3"])).unwrap();
        assert!(c.is_dense());
        assert_eq!(c.rank, 2);
        let c = wildness_certificate(&map(&[&[1, 1], &[0, 1]], &["1", "3"])).unwrap();
        assert!(c.is_dense());
        assert_eq!(c.projection, mat(&[&[0, 1]]));
        assert_eq!(c.gamma_bar, pt(&["3"]));
        let phi = map(&[&[1, 1], &[0, 1]], &["1", "1"]);
        let c = wildness_certificate(&phi).unwrap();
        let refutation = c.refutation.unwrap();
        assert_eq!(refutation.b, ivec(&[0, 1]));
        assert!(matches!(wildness_certificate(&map(&[&[2, 1], &[1, 1]], &["1", "1"])), Err(Error::Precondition(_))));
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose(&map(&[&[2, 0], &[0, 1]], &["1", "5"])).unwrap();
        assert_eq!((d.r, d.q.clone()), (1, IntPoly::linear(2)));
        assert_eq!(d.x2.cochar_basis(), &mat(&[&[1], &[0]]));
        assert_eq!(d.x1.cochar_basis(), &mat(&[&[0], &[1]]));
        assert_eq!(d.gamma1, pt(&["1", "5"]));
        assert_eq!(d.gamma2, pt(&["1", "1"]));
        assert_eq!(d.a2, mat(&[&[2]]));
        assert!(d.beta2.iter().all(KummerNumber::is_one));
        assert!(d.lattices_disjoint());

        let d = decompose(&map(&[&[2, 1], &[1, 1]], &["1", "1"])).unwrap();
        assert_eq!(d.r, 0);
        assert_eq!(d.x1.dim(), 0);
        assert!(d.x2.is_full());

        let d = decompose(&map(&[&[3, 0], &[0, 1]], &["7", "1"])).unwrap();
        assert_eq!(d.a2, mat(&[&[3]]));
        assert_eq!(d.gamma2, pt(&["7", "1"]));
        assert_eq!(d.beta2, pt(&["7^(1/2)", "1"]));
        assert!(d.conjugated_phi2().gamma().iter().all(KummerNumber::is_one));
    }

    #[test]
    fn periodic_examples() {
        let p = periodic_torsion_points(&mat(&[&[2]]), 3, 10).unwrap();
        assert_eq!(p.iter().map(|x| x.period).collect::<Vec<_>>(), vec![1, 2, 2]);
        assert_eq!(p[1].point, pt(&["zeta(3)"]));
        let p = periodic_torsion_points(&mat(&[&[2]]), 7, 10).unwrap();
        assert_eq!(p[1].period, 3);
        assert!(periodic_torsion_points(&mat(&[&[2]]), 4, 10).is_err());
    }

    #[test]
    fn family_examples() {
        let phi = map(&[&[2, 0], &[0, 1]], &["1", "5"]);
        let fam = invariant_family(&phi, &FamilyConfig { budget: 5, torsion_cap: 20 }).unwrap();
        assert_eq!(fam.cycles.len(), 5);
        assert!(fam.cycles.iter().all(|c| c.verified));
        let phi = map(&[&[2, 1], &[1, 1]], &["1", "1"]);
        let fam = invariant_family(&phi, &FamilyConfig::default()).unwrap();
        assert_eq!(fam.cycles.len(), DEFAULT_FAMILY_BUDGET);
        assert!(fam.cycles.iter().all(|c| c.verified && c.cosets[0].torus.dim() == 0));
        assert!(invariant_family(&phi, &FamilyConfig { budget: 0, torsion_cap: 50 }).unwrap().cycles.is_empty());
    }

    #[test]
    fn classify_examples() {
        let cfg = ClassifyConfig::default();
        let r = classify(&map(&[&[1, 0], &[0, 1]], &["2", "3"]), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::DegreeOneWild);
        assert!(r.invariant_family.is_none());
        let r = classify(&map(&[&[2, 0], &[0, 1]], &["1", "1"]), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Fibration);
        assert!(r.invariant_family.is_some());
        let r = classify(&map(&[&[2, 1], &[1, 1]], &["1", "1"]), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::DegreeGtOneDenseInvariants);
        assert!(matches!(r.density, Some(Containment::NotContained { .. })));
    }

    #[test]
    fn dm_examples() {
        let t = dm_analysis(&map(&[&[2, 0], &[0, 1]], &["1", "1"]), 5, 360).unwrap();
        assert_eq!(t.verdict, Some(Verdict::Fibration));
        let child = t.child.as_ref().unwrap();
        assert_eq!(child.dim, 1);
        assert_eq!(child.alternative, Alternative::DenseInvariants);
        assert!(child.child.is_none());
        let t = dm_analysis(&map(&[&[1, 0], &[0, 1]], &["2", "3"]), 5, 360).unwrap();
        assert_eq!(t.verdict, Some(Verdict::DegreeOneWild));
        assert_eq!(t.alternative, Alternative::NoProperInvariants);
        let t = dm_analysis(&map(&[&[1, 0], &[0, 1]], &["1", "1"]), 5, 360).unwrap();
        assert_eq!(t.child.as_ref().unwrap().dim, 0);
        let t = dm_analysis(&map(&[&[1, 0], &[0, 1]], &["1", "1"]), 1, 360).unwrap();
        assert!(t.depth_exhausted);
    }

    #[test]
    fn orbit_example() {
        let o = orbit(&map(&[&[1, 0], &[0, 1]], &["2", "3"]), &pt(&["1", "1"]), 4).unwrap();
        assert_eq!(o, vec![pt(&["1", "1"]), pt(&["2", "3"]), pt(&["4", "9"]), pt(&["8", "27"])]);
    }
}
