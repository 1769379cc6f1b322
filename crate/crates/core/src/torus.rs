//! Affine monomial maps on `𝔾ₘⁿ`, subtori, cosets and restriction.
//!
//! Convention: `x^M` has coordinates `(x^M)ᵢ = ∏ⱼ xⱼ^{Mᵢⱼ}`, so `M` acts on
//! exponent column vectors and `(x^B)^A = x^{AB}`. For `A = [[1,1],[0,1]]`,
//! `(x, y)^A = (x·y, y)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::exactnum::{char_eval, identity_point, point_inv, point_mul, sample_kummer, KummerNumber};
use crate::intlinalg::{left_kernel_saturated, right_kernel, smith_normal_form, IntMatrix, Lattice};
use crate::{Error, Result};

/// `x^M` for an `r × c` matrix `M` and a point with `c` coordinates.
pub fn monomial(x: &[KummerNumber], m: &IntMatrix) -> Vec<KummerNumber> {
    assert_eq!(x.len(), m.cols(), "point length must match matrix columns");
    (0..m.rows()).map(|i| char_eval(x, m.row(i)).expect("lengths checked")).collect()
}

/// `φ(x) = γ·x^A` with `det A ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMonomialMap {
    a: IntMatrix,
    gamma: Vec<KummerNumber>,
}

impl AffineMonomialMap {
    pub fn new(a: IntMatrix, gamma: Vec<KummerNumber>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        if gamma.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: gamma.len() });
        }
        if a.rows() > 0 && a.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self { a, gamma })
    }

    /// Pure endomorphism `x ↦ x^A`.
    pub fn endomorphism(a: IntMatrix) -> Result<Self> {
        let n = a.rows();
        Self::new(a, identity_point(n))
    }

    pub fn identity(n: usize) -> Self {
        Self { a: IntMatrix::identity(n), gamma: identity_point(n) }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn gamma(&self) -> &[KummerNumber] {
        &self.gamma
    }

    pub fn det(&self) -> BigInt {
        self.a.det()
    }

    pub fn is_automorphism(&self) -> bool {
        self.dim() == 0 || self.det().magnitude().is_one()
    }

    pub fn apply(&self, x: &[KummerNumber]) -> Result<Vec<KummerNumber>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(point_mul(&self.gamma, &monomial(x, &self.a)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "maps must live on the same torus");
        Self { a: self.a.mul(&other.a), gamma: self.apply(&other.gamma).expect("dimensions agree") }
    }

    /// `φᵏ` by binary powering; `k = 0` gives the identity.
    pub fn iterate(&self, mut k: u64) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base);
            }
        }
        result
    }

    /// `T_β ∘ φ ∘ T_β⁻¹`.
    pub fn conjugate_by_translation(&self, beta: &[KummerNumber]) -> Self {
        let shifted = monomial(&point_inv(beta), &self.a);
        Self { a: self.a.clone(), gamma: point_mul(&point_mul(beta, &self.gamma), &shifted) }
    }
}

/// A subtorus, described by its saturated annihilator in the character lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subtorus {
    annihilator: Lattice,
    cochar: IntMatrix,
}

impl Subtorus {
    /// Subtorus cut out by the characters in `generators`; the lattice is
    /// saturated first.
    pub fn from_annihilator(generators: &Lattice) -> Self {
        let annihilator = generators.saturation();
        let cochar = right_kernel(annihilator.basis());
        Self { annihilator, cochar }
    }

    /// Subtorus whose cocharacter lattice is the saturation of the column span of `cochar`.
    pub fn from_cocharacters(cochar: &IntMatrix) -> Self {
        Self::from_annihilator(&left_kernel_saturated(cochar))
    }

    pub fn full(n: usize) -> Self {
        Self::from_annihilator(&Lattice::zero(n))
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_annihilator(&Lattice::full(n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.annihilator.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim() - self.annihilator.rank()
    }

    pub fn annihilator(&self) -> &Lattice {
        &self.annihilator
    }

    /// `n × k` matrix whose columns span the cocharacters of the subtorus.
    pub fn cochar_basis(&self) -> &IntMatrix {
        &self.cochar
    }

    pub fn is_full(&self) -> bool {
        self.annihilator.is_zero()
    }

    pub fn contains(&self, x: &[KummerNumber]) -> bool {
        (0..self.annihilator.rank())
            .all(|i| char_eval(x, self.annihilator.basis().row(i)).map(|v| v.is_one()).unwrap_or(false))
    }

    /// `k × n` integer matrix `L` with `L·C = I` for the cochar basis `C`.
    /// Intrinsic coordinates of a point `x` of the subtorus are `x^L`.
    pub fn left_inverse(&self) -> IntMatrix {
        let c = &self.cochar;
        let k = c.cols();
        if k == 0 {
            return IntMatrix::zeros(0, c.rows());
        }
        let snf = smith_normal_form(c);
        debug_assert!(snf.invariant_factors().iter().all(One::is_one), "cochar basis is saturated");
        snf.v.mul(&snf.u.select_rows(0..k))
    }

    /// Intrinsic coordinates of a point lying on the subtorus.
    pub fn to_intrinsic(&self, x: &[KummerNumber]) -> Vec<KummerNumber> {
        monomial(x, &self.left_inverse())
    }

    /// The point `y^C` of the subtorus with intrinsic coordinates `y`.
    pub fn from_intrinsic(&self, y: &[KummerNumber]) -> Vec<KummerNumber> {
        monomial(y, &self.cochar)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<KummerNumber> {
        let y: Vec<KummerNumber> = (0..self.dim()).map(|_| sample_kummer(rng)).collect();
        self.from_intrinsic(&y)
    }
}

/// Subtorus `M(𝔾ₘⁿ)`: characters killed by `x ↦ x^M`.
pub fn image_subtorus(m: &IntMatrix) -> Subtorus {
    Subtorus::from_annihilator(&left_kernel_saturated(m))
}

/// Projection `π(x) = x^P` whose rows are the HNF annihilator basis.
pub fn quotient_map(s: &Subtorus) -> IntMatrix {
    s.annihilator().basis().clone()
}

/// Matrix of `A` restricted to `S` in the cochar basis, if `S` is `A`-invariant.
pub fn restrict_endomorphism(a: &IntMatrix, s: &Subtorus) -> Option<IntMatrix> {
    let c = s.cochar_basis();
    let ac = a.mul(c);
    let r = s.left_inverse().mul(&ac);
    (c.mul(&r) == ac).then_some(r)
}

/// `φ|_S` in intrinsic coordinates, if `S` is `A`-invariant and `γ ∈ S`.
pub fn restrict_map(phi: &AffineMonomialMap, s: &Subtorus) -> Option<AffineMonomialMap> {
    let r = restrict_endomorphism(phi.matrix(), s)?;
    if !s.contains(phi.gamma()) {
        return None;
    }
    AffineMonomialMap::new(r, s.to_intrinsic(phi.gamma())).ok()
}

/// A translate `base · S` of a subtorus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub base: Vec<KummerNumber>,
    pub torus: Subtorus,
}

/// Canonical description of a coset: the annihilator basis and the value of
/// each basis character on the coset.
pub type CosetKey = (Vec<Vec<BigInt>>, Vec<KummerNumber>);

impl Coset {
    pub fn new(base: Vec<KummerNumber>, torus: Subtorus) -> Result<Self> {
        if base.len() != torus.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: torus.ambient_dim(), found: base.len() });
        }
        Ok(Self { base, torus })
    }

    pub fn whole(n: usize) -> Self {
        Self { base: identity_point(n), torus: Subtorus::full(n) }
    }

    pub fn contains(&self, x: &[KummerNumber]) -> bool {
        x.len() == self.base.len() && self.torus.contains(&point_mul(x, &point_inv(&self.base)))
    }

    pub fn key(&self) -> CosetKey {
        let ann = self.torus.annihilator();
        let values =
            (0..ann.rank()).map(|i| char_eval(&self.base, ann.basis().row(i)).expect("lengths agree")).collect();
        (ann.basis_rows(), values)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.torus == other.torus && self.contains(&other.base)
    }

    /// `φ(C)`, again a coset since `φ` is an isogeny composed with a translation.
    pub fn image(&self, phi: &AffineMonomialMap) -> Coset {
        let torus = Subtorus::from_cocharacters(&phi.matrix().mul(self.torus.cochar_basis()));
        Coset { base: phi.apply(&self.base).expect("dimensions agree"), torus }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<KummerNumber> {
        point_mul(&self.base, &self.torus.sample(rng))
    }
}

pub fn membership(x: &[KummerNumber], c: &Coset) -> bool {
    c.contains(x)
}

/// `φ(C) = C` as sets.
pub fn coset_invariant(phi: &AffineMonomialMap, c: &Coset) -> bool {
    restrict_endomorphism(phi.matrix(), &c.torus).is_some()
        && c.contains(&phi.apply(&c.base).expect("dimensions agree"))
}

/// The `φ`-orbit `C, φ(C), …` of a coset when it closes up within `cap` steps.
pub fn coset_cycle(phi: &AffineMonomialMap, c: &Coset, cap: usize) -> Option<Vec<Coset>> {
    let mut cycle = vec![c.clone()];
    for _ in 0..cap {
        let next = cycle.last().unwrap().image(phi);
        if next.same_as(c) {
            return Some(cycle);
        }
        if cycle.iter().any(|d| d.same_as(&next)) {
            return None;
        }
        cycle.push(next);
    }
    None
}

/// Whether `φ` permutes the given cosets.
pub fn cycle_invariant(phi: &AffineMonomialMap, cycle: &[Coset]) -> bool {
    cycle.iter().all(|c| {
        let img = c.image(phi);
        cycle.iter().any(|d| d.same_as(&img))
    })
}
