use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{hermite_normal_form, IntMatrix};
use crate::{Error, Result};

/// A sublattice of `ℤⁿ`, stored by its canonical HNF basis, so two lattices
/// are equal exactly when their representations are.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lattice {
    ambient_dim: usize,
    basis: IntMatrix,
}

impl Lattice {
    /// Lattice spanned by the rows of `generators`.
    pub fn from_generators(ambient_dim: usize, generators: &IntMatrix) -> Self {
        assert_eq!(generators.cols(), ambient_dim, "generator width must match ambient dimension");
        let hnf = hermite_normal_form(generators);
        Self { ambient_dim, basis: hnf.h.select_rows(0..hnf.rank) }
    }

    pub fn from_rows(ambient_dim: usize, rows: &[Vec<BigInt>]) -> Self {
        let m = IntMatrix::from_rows_with_cols(rows, ambient_dim).expect("row width must match ambient dimension");
        Self::from_generators(ambient_dim, &m)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: IntMatrix::zeros(0, ambient_dim) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: IntMatrix::identity(ambient_dim) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// HNF basis, one lattice vector per row.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        self.basis.to_rows()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: other.ambient_dim });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let extended = self.basis.vstack(&IntMatrix::from_rows_with_cols(&[v.to_vec()], self.ambient_dim).unwrap());
        Lattice::from_generators(self.ambient_dim, &extended) == *self
    }

    /// `ℚ-span(L) ∩ ℤⁿ`.
    pub fn saturation(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let kernel = right_kernel(&self.basis);
        left_kernel_saturated(&kernel)
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation() == *self
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_generators(self.ambient_dim, &self.basis.vstack(&other.basis)))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient_dim));
        }
        // x·B1 = y·B2  ⇔  (x, -y) in the left kernel of [B1; B2].
        let stacked = self.basis.vstack(&other.basis);
        let kernel = left_kernel_saturated(&stacked);
        let r1 = self.rank();
        let coeffs = kernel.basis().select_cols(0..r1);
        Ok(Self::from_generators(self.ambient_dim, &coeffs.mul(&self.basis)))
    }

    /// `[ℤⁿ : L]` when `L` has full rank.
    pub fn index_if_finite(&self) -> Option<BigInt> {
        if self.rank() != self.ambient_dim {
            return None;
        }
        Some((0..self.ambient_dim).fold(BigInt::one(), |acc, i| acc * self.basis[(i, i)].abs()))
    }
}

/// `{b ∈ ℤⁿ : b·M = 0}` for an `n × m` matrix `M`. Left kernels over `ℤ` are
/// always saturated.
pub fn left_kernel_saturated(m: &IntMatrix) -> Lattice {
    let n = m.rows();
    let hnf = hermite_normal_form(m);
    let kernel = hnf.u.select_rows(hnf.rank..n);
    Lattice::from_generators(n, &kernel)
}

/// Integer basis (as columns) of `{u ∈ ℤᵐ : M·u = 0}`; the lattice it spans is saturated.
pub fn right_kernel(m: &IntMatrix) -> IntMatrix {
    left_kernel_saturated(&m.transpose()).basis().transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::{ivec, mat};

    #[test]
    fn kernel_examples() {
        let k = left_kernel_saturated(&mat(&[&[0, 1], &[0, 0]]));
        assert_eq!(k.basis_rows(), vec![ivec(&[0, 1])]);
        assert!(left_kernel_saturated(&mat(&[&[2, 1], &[1, 1]])).is_zero());
        assert_eq!(left_kernel_saturated(&IntMatrix::zeros(3, 3)), Lattice::full(3));
        let m = mat(&[&[2, 4], &[1, 2], &[3, 6]]);
        let k = left_kernel_saturated(&m);
        assert_eq!(k.rank(), 2);
        assert!(k.basis().mul(&m).is_zero());
        assert!(k.is_saturated());
    }

    #[test]
    fn sum_intersection_index() {
        let e1 = Lattice::from_rows(2, &[ivec(&[1, 0])]);
        let e2 = Lattice::from_rows(2, &[ivec(&[0, 1])]);
        let s = e1.sum(&e2).unwrap();
        assert_eq!(s, Lattice::full(2));
        assert_eq!(s.index_if_finite(), Some(1.into()));
        let a = Lattice::from_rows(2, &[ivec(&[2, 0])]);
        let b = Lattice::from_rows(2, &[ivec(&[3, 0])]);
        assert_eq!(a.intersection(&b).unwrap(), Lattice::from_rows(2, &[ivec(&[6, 0])]));
        let l = Lattice::from_rows(2, &[ivec(&[2, 0]), ivec(&[0, 3])]);
        assert_eq!(l.index_if_finite(), Some(6.into()));
        assert_eq!(e1.index_if_finite(), None);
        assert!(a.sum(&Lattice::zero(3)).is_err());
    }

    #[test]
    fn saturation_examples() {
        let l = Lattice::from_rows(3, &[ivec(&[2, 4, 6])]);
        assert_eq!(l.saturation(), Lattice::from_rows(3, &[ivec(&[1, 2, 3])]));
        assert!(!l.is_saturated());
        let l = Lattice::from_rows(2, &[ivec(&[2, 0]), ivec(&[0, 3])]);
        assert_eq!(l.saturation(), Lattice::full(2));
        assert!(Lattice::zero(2).is_saturated());
        assert!(l.contains(&ivec(&[4, -3])));
        assert!(!l.contains(&ivec(&[1, 0])));
    }
}
