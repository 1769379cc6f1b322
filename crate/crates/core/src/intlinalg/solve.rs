use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{egcd, smith_normal_form, IntMatrix};

/// Reduced row echelon form over `ℚ`; returns pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][j].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][j].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][j].is_zero() {
                let f = m[i][j].clone();
                for k in 0..cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        pivots.push(j);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn to_rational_rows(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|a| BigRational::from_integer(a.clone())).collect()).collect()
}

/// One solution of `M x = b` over `ℚ` (free variables set to zero), or
/// `None` when the system is inconsistent.
pub fn solve_rational(m: &IntMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(m.rows(), b.len(), "right-hand side length must match row count");
    let cols = m.cols();
    let mut aug: Vec<Vec<BigRational>> = to_rational_rows(m)
        .into_iter()
        .zip(b)
        .map(|(mut row, bi)| {
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn solve_rational_int(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let b: Vec<BigRational> = b.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    solve_rational(m, &b)
}

/// Basis of the right kernel `{x ∈ ℚᵐ : M x = 0}`.
pub fn rational_kernel(m: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -work[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solution set of `M x ≡ b (mod d)`: `particular + span(kernel)`, all entries
/// reduced into `[0, d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModSolution {
    pub modulus: BigInt,
    pub particular: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

impl ModSolution {
    pub fn contains(&self, m: &IntMatrix, b: &[BigInt], x: &[BigInt]) -> bool {
        m.mul_vec(x).iter().zip(b).all(|(l, r)| (l - r).is_multiple_of(&self.modulus))
    }
}

/// Solves `M x ≡ b (mod d)` through the Smith form `U M V = D`.
pub fn solve_mod(m: &IntMatrix, b: &[BigInt], d: &BigInt) -> Option<ModSolution> {
    assert_eq!(m.rows(), b.len(), "right-hand side length must match row count");
    assert!(*d >= BigInt::from(2), "modulus must be at least 2");
    let (rows, cols) = (m.rows(), m.cols());
    let snf = smith_normal_form(m);
    let c = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); cols];
    let mut kernel_y: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..rows {
        let di = if i < cols { snf.d[(i, i)].clone() } else { BigInt::zero() };
        let ci = c[i].mod_floor(d);
        if di.is_zero() {
            if !ci.is_zero() {
                return None;
            }
            continue;
        }
        let (g, _, _) = egcd(&di, d);
        if !ci.is_multiple_of(&g) {
            return None;
        }
        let step = d / &g;
        if step.is_one() {
            continue;
        }
        let (_, inv, _) = egcd(&(&di / &g), &step);
        y[i] = (&ci / &g * inv).mod_floor(&step);
        let mut gen = vec![BigInt::zero(); cols];
        gen[i] = step;
        kernel_y.push(gen);
    }
    // Columns with a zero (or absent) invariant factor are free.
    for j in 0..cols {
        if j >= rows || snf.d[(j, j)].is_zero() {
            let mut gen = vec![BigInt::zero(); cols];
            gen[j] = BigInt::one();
            kernel_y.push(gen);
        }
    }
    let reduce = |v: Vec<BigInt>| v.into_iter().map(|x| x.mod_floor(d)).collect::<Vec<_>>();
    let particular = reduce(snf.v.mul_vec(&y));
    let kernel =
        kernel_y.into_iter().map(|g| reduce(snf.v.mul_vec(&g))).filter(|g| g.iter().any(|x| !x.is_zero())).collect();
    Some(ModSolution { modulus: d.clone(), particular, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::{ivec, mat};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rational_solves() {
        assert_eq!(solve_rational(&mat(&[&[1]]), &[q(3)]), Some(vec![q(3)]));
        let a_minus_i = mat(&[&[2, 0], &[0, 2]]).sub(&IntMatrix::identity(2));
        assert_eq!(solve_rational(&a_minus_i, &[q(1), q(1)]), Some(vec![q(1), q(1)]));
        assert_eq!(solve_rational(&mat(&[&[1, 1], &[2, 2]]), &[q(1), q(3)]), None);
        let x = solve_rational(&mat(&[&[2]]), &[q(1)]).unwrap();
        assert_eq!(x[0], BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn modular_solves() {
        let s = solve_mod(&mat(&[&[2]]), &ivec(&[1]), &5.into()).unwrap();
        assert_eq!(s.particular, ivec(&[3]));
        assert!(s.kernel.is_empty());
        assert!(solve_mod(&mat(&[&[2]]), &ivec(&[1]), &4.into()).is_none());
        let s = solve_mod(&mat(&[&[2]]), &ivec(&[2]), &4.into()).unwrap();
        assert!(s.contains(&mat(&[&[2]]), &ivec(&[2]), &s.particular));
        assert_eq!(s.kernel, vec![ivec(&[2])]);
        let m = mat(&[&[1, 2, 3]]);
        let s = solve_mod(&m, &ivec(&[0]), &6.into()).unwrap();
        assert_eq!(s.kernel.len(), 2);
        for k in &s.kernel {
            assert!(s.contains(&m, &ivec(&[0]), k));
        }
    }

    #[test]
    fn kernel_over_q() {
        let m = to_rational_rows(&mat(&[&[1, 2, 3], &[2, 4, 6]]));
        let k = rational_kernel(&m, 3);
        assert_eq!(k.len(), 2);
    }
}
