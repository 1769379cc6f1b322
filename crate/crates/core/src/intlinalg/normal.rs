use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Row-style Hermite normal form with its unimodular transform: `u · m = h`.
///
/// The first `rank` rows of `h` are nonzero, with strictly increasing pivot
/// columns, positive pivots, and entries above each pivot reduced into
/// `[0, pivot)`. The remaining rows are zero.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Smith normal form `u · m · v = d` with `d` diagonal and `dᵢ | dᵢ₊₁`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal entries, `min(rows, cols)` of them.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }
}

pub(crate) fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn hermite_normal_form(m: &IntMatrix) -> Hnf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut r = 0;
    let mut pivots = Vec::new();
    for j in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[(i, j)].is_zero() {
                continue;
            }
            if h[(r, j)].is_zero() {
                h.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let (g, x, y) = egcd(&h[(r, j)], &h[(i, j)]);
            let a = &h[(r, j)] / &g;
            let b = &h[(i, j)] / &g;
            let nb = -b;
            h.combine_rows(r, i, &x, &y, &nb, &a);
            u.combine_rows(r, i, &x, &y, &nb, &a);
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h[(i, j)].div_floor(&h[(r, j)]);
            if !q.is_zero() {
                let nq = -q;
                h.add_row_multiple(i, r, &nq);
                u.add_row_multiple(i, r, &nq);
            }
        }
        pivots.push(j);
        r += 1;
    }
    Hnf { h, u, rank: r, pivots }
}

fn min_abs_in(d: &IntMatrix, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let v = d[(i, j)].abs();
        if v.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some(((i, j), v));
        }
    }
    best.map(|(c, _)| c)
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let size = rows.min(cols);
    for t in 0..size {
        let cells = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j)));
        let Some((pi, pj)) = min_abs_in(&d, cells) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                let line = (t..rows).map(|i| (i, t)).chain((t + 1..cols).map(|j| (t, j)));
                let (pi, pj) = min_abs_in(&d, line).expect("pivot line cannot vanish");
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let pivot = d[(t, t)].clone();
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { d, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::mat;

    fn check_hnf(m: &IntMatrix) -> Hnf {
        let r = hermite_normal_form(m);
        assert_eq!(r.u.mul(m), r.h);
        assert_eq!(r.u.det().abs(), BigInt::one());
        r
    }

    fn check_snf(m: &IntMatrix) -> Snf {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert_eq!(s.u.det().abs(), BigInt::one());
        assert_eq!(s.v.det().abs(), BigInt::one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn hnf_examples() {
        let r = check_hnf(&IntMatrix::identity(3));
        assert_eq!(r.h, IntMatrix::identity(3));
        assert_eq!(r.u, IntMatrix::identity(3));
        assert_eq!(check_hnf(&mat(&[&[2, 0], &[0, 3]])).h, mat(&[&[2, 0], &[0, 3]]));
        let r = check_hnf(&mat(&[&[0, 1], &[0, 0]]));
        assert_eq!(r.h, mat(&[&[0, 1], &[0, 0]]));
        assert_eq!(r.rank, 1);
        let r = check_hnf(&mat(&[&[4, 6, 2], &[6, 9, 5], &[2, 3, 1]]));
        assert_eq!(r.rank, 2);
        check_hnf(&mat(&[&[-3, 5], &[7, -2], &[1, 1]]));
    }

    #[test]
    fn snf_examples() {
        let s = check_snf(&mat(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.d, mat(&[&[1, 0], &[0, 6]]));
        assert_eq!(check_snf(&IntMatrix::zeros(2, 3)).d, IntMatrix::zeros(2, 3));
        assert_eq!(check_snf(&mat(&[&[1, 1], &[0, 1]])).d, IntMatrix::identity(2));
        let s = check_snf(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(s.invariant_factors(), vec![2.into(), 6.into(), 12.into()]);
        check_snf(&mat(&[&[0, 0, 5], &[0, 3, 0]]));
        check_snf(&IntMatrix::zeros(0, 2));
    }
}
