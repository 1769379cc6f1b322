#![allow(dead_code)]

use monodyn::exactnum::sample_kummer;
use monodyn::intlinalg::IntMatrix;
use monodyn::torus::AffineMonomialMap;
use monodyn::KummerNumber;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point<R: Rng>(rng: &mut R, n: usize) -> Vec<KummerNumber> {
    (0..n).map(|_| sample_kummer(rng)).collect()
}

pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let r: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
    IntMatrix::from_rows_with_cols(&r, cols).unwrap()
}

pub fn nonsingular<R: Rng>(rng: &mut R, n: usize, bound: i64) -> IntMatrix {
    loop {
        let m = matrix(rng, n, n, bound);
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// A random unimodular matrix and its inverse, built from elementary row operations.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    if n < 2 {
        return (u, inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c: i64 = rng.gen_range(-2..=2);
        let mut e = IntMatrix::identity(n);
        e[(i, j)] = BigInt::from(c);
        let mut e_inv = IntMatrix::identity(n);
        e_inv[(i, j)] = BigInt::from(-c);
        u = e.mul(&u);
        inv = inv.mul(&e_inv);
    }
    (u, inv)
}

/// `U·T·U⁻¹` with `T` upper unitriangular.
pub fn unipotent<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut t = IntMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            t[(i, j)] = BigInt::from(rng.gen_range(-2i64..=2));
        }
    }
    let (u, inv) = unimodular(rng, n, 3 * n);
    u.mul(&t).mul(&inv)
}

/// Translation coordinates mixing roots of unity and rationals.
pub fn mixed_gamma<R: Rng>(rng: &mut R, n: usize) -> Vec<KummerNumber> {
    (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 => KummerNumber::root_of_unity(rng.gen_range(0..6), rng.gen_range(1..=6)),
            1 => KummerNumber::from_rational(rng.gen_range(1..=12), rng.gen_range(1..=12)),
            2 => KummerNumber::one(),
            _ => KummerNumber::root_of_unity(rng.gen_range(0..4), 4)
                .mul(&KummerNumber::from_integer([2, 3, 4, 6, 9][rng.gen_range(0..5)])),
        })
        .collect()
}

pub fn affine<R: Rng>(rng: &mut R, a: IntMatrix) -> AffineMonomialMap {
    let n = a.rows();
    AffineMonomialMap::new(a, mixed_gamma(rng, n)).unwrap()
}

/// `A^e mod d` with entries in `[0, d)`.
pub fn pow_mod(a: &IntMatrix, mut e: u64, d: u64) -> IntMatrix {
    let m = BigInt::from(d);
    let mut base = a.reduce_mod(&m);
    let mut acc = IntMatrix::identity(a.rows()).reduce_mod(&m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base).reduce_mod(&m);
        }
        base = base.mul(&base).reduce_mod(&m);
        e >>= 1;
    }
    acc
}
