//! Machine-word number theory: modular arithmetic, primality, factoring,
//! and root extraction in prime fields.

use rand::Rng;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Checked lcm; `None` on overflow.
pub fn checked_lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64, c: u64) -> u64 {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
    let mut steps = 0u32;
    while d == 1 {
        x = f(x);
        y = f(f(y));
        d = gcd(x.abs_diff(y), n);
        steps += 1;
        if steps > 1 << 22 {
            return n;
        }
    }
    d
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(p) {
            out.push(p);
            factor_into(n / p, out);
            return;
        }
    }
    let mut c = 1;
    loop {
        let d = pollard_brent(n, c);
        if d != n && d != 1 {
            factor_into(d, out);
            factor_into(n / d, out);
            return;
        }
        c += 1;
    }
}

/// Prime factorization as sorted `(prime, multiplicity)` pairs.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    factor_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Multiplicative order of `a` modulo prime `q`, given the factorization of `q - 1`.
fn has_exact_order(z: u64, order: u64, q: u64) -> bool {
    if pow_mod(z, order, q) != 1 {
        return false;
    }
    factorize(order).iter().all(|&(l, _)| pow_mod(z, order / l, q) != 1)
}

/// An element of exact order `order` in `F_q^*` (requires `order | q - 1`).
pub fn element_of_order<R: Rng>(order: u64, q: u64, rng: &mut R) -> Option<u64> {
    if !(q - 1).is_multiple_of(order) {
        return None;
    }
    if order == 1 {
        return Some(1);
    }
    for _ in 0..256 {
        let a = rng.gen_range(2..q);
        let z = pow_mod(a, (q - 1) / order, q);
        if has_exact_order(z, order, q) {
            return Some(z);
        }
    }
    None
}

/// Some `n`-th root of `c` in `F_q`, `q` prime, or `None` when `c` is not an
/// `n`-th power residue.
pub fn nth_root_mod<R: Rng>(c: u64, n: u64, q: u64, rng: &mut R) -> Option<u64> {
    let c = c % q;
    if c == 0 {
        return Some(0);
    }
    if n == 1 {
        return Some(c);
    }
    let group = q - 1;
    let g = gcd(n, group);
    if pow_mod(c, group / g, q) != 1 {
        return None;
    }
    // Split F_q^* into the part of order coprime to n and the Sylow parts for primes of n.
    let n_primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let mut smooth = 1u64;
    let mut rest = group;
    for &l in &n_primes {
        while rest.is_multiple_of(l) {
            rest /= l;
            smooth *= l;
        }
    }
    // c = c_smooth * c_rest with c_rest of order | rest, c_smooth of order | smooth.
    let (c_smooth, c_rest) = if rest == 1 {
        (c, 1)
    } else {
        let e_s = rest as i128 * inv_mod(rest as i128, smooth as i128).unwrap_or(0);
        let e_r = smooth as i128 * inv_mod(smooth as i128, rest as i128).unwrap();
        (pow_mod(c, (e_s.rem_euclid(group as i128)) as u64, q), pow_mod(c, (e_r.rem_euclid(group as i128)) as u64, q))
    };
    let mut root = if rest == 1 {
        1
    } else {
        let k = inv_mod((n % rest) as i128, rest as i128)? as u64;
        pow_mod(c_rest, k, q)
    };
    for &l in &n_primes {
        let mut sylow = 1u64;
        let mut v = 0u32;
        while group.is_multiple_of(sylow * l) {
            sylow *= l;
            v += 1;
        }
        let h = element_of_order(sylow, q, rng)?;
        let part = pow_mod(c_smooth, smooth / sylow * inv_sylow_cofactor(smooth, sylow), q);
        let x = sylow_log(part, h, l, v, q)?;
        let g_l = gcd(n, sylow);
        if x % g_l != 0 {
            return None;
        }
        let modulus = sylow / g_l;
        let y = if modulus == 1 {
            0
        } else {
            let inv = inv_mod(((n / g_l) % modulus) as i128, modulus as i128)? as u64;
            ((x / g_l) as u128 * inv as u128 % modulus as u128) as u64
        };
        root = mul_mod(root, pow_mod(h, y, q), q);
    }
    (pow_mod(root, n, q) == c).then_some(root)
}

// Exponent e with (smooth/sylow)*e ≡ 1 mod sylow, so that the projection of
// an element of order | smooth onto its l-part is x^{(smooth/sylow) e}.
fn inv_sylow_cofactor(smooth: u64, sylow: u64) -> u64 {
    if sylow == 1 {
        return 0;
    }
    inv_mod(((smooth / sylow) % sylow) as i128, sylow as i128).unwrap() as u64
}

// Discrete log of `a` to base `h` (order l^v) by Pohlig-Hellman digits.
fn sylow_log(a: u64, h: u64, l: u64, v: u32, q: u64) -> Option<u64> {
    let order = l.pow(v);
    let gamma = pow_mod(h, order / l, q);
    let h_inv = pow_mod(h, order - 1, q);
    let mut x = 0u64;
    let mut lk = 1u64;
    for k in 0..v {
        let shifted = mul_mod(a, pow_mod(h_inv, x, q), q);
        let d_elem = pow_mod(shifted, order / lk / l, q);
        let mut digit = None;
        let mut acc = 1u64;
        for d in 0..l {
            if acc == d_elem {
                digit = Some(d);
                break;
            }
            acc = mul_mod(acc, gamma, q);
        }
        x += digit? * lk;
        if k + 1 < v {
            lk *= l;
        }
    }
    (pow_mod(h, x, q) == a).then_some(x)
}
