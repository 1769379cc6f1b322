//! Exact linear algebra over ℤ: normal forms, lattices, kernels, modular
//! solving, characteristic and minimal polynomials.

mod lattice;
mod matrix;
mod normal;
mod solve;

pub use lattice::{left_kernel_saturated, right_kernel, Lattice};
pub use matrix::{ivec, mat, IntMatrix};
pub(crate) use normal::egcd;
pub use normal::{hermite_normal_form, smith_normal_form, Hnf, Snf};
pub use solve::{rational_kernel, rref, solve_mod, solve_rational, solve_rational_int, to_rational_rows, ModSolution};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::polyalg::{IntPoly, QPoly};

/// Characteristic polynomial `det(xI - M)` by the Faddeev–LeVerrier recursion.
pub fn charpoly(m: &IntMatrix) -> IntPoly {
    assert!(m.is_square(), "charpoly needs a square matrix");
    let n = m.rows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = IntMatrix::zeros(n, n);
    for k in 1..=n {
        mk = m.mul(&mk).add(&IntMatrix::identity(n).scale(&coeffs[n + 1 - k]));
        let t = m.mul(&mk).trace();
        coeffs[n - k] = -(t / BigInt::from(k));
    }
    IntPoly::new(coeffs).expect("characteristic polynomial is monic")
}

/// Minimal polynomial: lcm over `ℚ[x]` of the Krylov annihilators of the
/// standard basis vectors.
pub fn minpoly(m: &IntMatrix) -> IntPoly {
    assert!(m.is_square(), "minpoly needs a square matrix");
    let n = m.rows();
    let mut acc = QPoly(vec![BigRational::one()]);
    for i in 0..n {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        let mut krylov: Vec<Vec<BigInt>> = vec![v.clone()];
        loop {
            let next = m.mul_vec(krylov.last().unwrap());
            // Columns = krylov vectors; solve K c = next.
            let k = IntMatrix::from_columns(n, &krylov);
            if let Some(c) = solve_rational_int(&k, &next) {
                let mut coeffs: Vec<BigRational> = c.into_iter().map(|x| -x).collect();
                coeffs.push(BigRational::one());
                acc = acc.lcm(&QPoly(coeffs));
                break;
            }
            krylov.push(next);
        }
    }
    acc.to_int().expect("minimal polynomial of an integer matrix is integral")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_examples() {
        assert_eq!(charpoly(&mat(&[&[2, 1], &[1, 1]])), IntPoly::from_i64(&[1, -3, 1]).unwrap());
        assert_eq!(charpoly(&IntMatrix::identity(3)), IntPoly::from_i64(&[-1, 3, -3, 1]).unwrap());
        let a = mat(&[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        let p = charpoly(&a);
        assert!(p.eval_matrix(&a).is_zero());
        assert_eq!(p.coeffs()[0], -a.det());
    }

    #[test]
    fn minpoly_examples() {
        assert_eq!(minpoly(&IntMatrix::identity(3)), IntPoly::linear(1));
        assert_eq!(minpoly(&mat(&[&[1, 1], &[0, 1]])), IntPoly::from_i64(&[1, -2, 1]).unwrap());
        assert_eq!(minpoly(&mat(&[&[0, -1], &[1, 0]])), IntPoly::from_i64(&[1, 0, 1]).unwrap());
        let d = IntMatrix::diagonal(&ivec(&[2, 2, 3]));
        assert_eq!(minpoly(&d), IntPoly::from_i64(&[6, -5, 1]).unwrap());
    }
}
