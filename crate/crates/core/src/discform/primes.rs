//! Small number-theory helpers: factorization, Legendre symbols, modular inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    ((BigInt::from(a) * BigInt::from(b)) % BigInt::from(m)).to_u128().unwrap()
}

fn powmod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

fn is_probable_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `n > 0` as sorted `(prime, exponent)` pairs.
pub fn factor_u128(n: u128) -> Vec<(u128, u32)> {
    let mut out: Vec<(u128, u32)> = Vec::new();
    let mut n = n;
    let mut p = 2u128;
    while p * p <= n && p < 1 << 16 {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    let mut big = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_probable_prime(m) {
            big.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    big.sort_unstable();
    for q in big {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out.sort_unstable();
    out
}

/// Primes dividing a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let m = n.magnitude().to_u128().expect("determinant beyond 128 bits");
    factor_u128(m)
        .into_iter()
        .map(|(p, _)| u64::try_from(p).expect("prime beyond 64 bits"))
        .collect()
}

/// Legendre symbol `(a/p)` for an odd prime `p`, as -1, 0 or 1.
pub fn legendre(a: i128, p: u64) -> i8 {
    let p = p as u128;
    let a = a.rem_euclid(p as i128) as u128;
    if a == 0 {
        return 0;
    }
    if powmod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest quadratic non-residue modulo an odd prime.
pub fn non_residue(p: u64) -> u64 {
    (2..p).find(|&a| legendre(a as i128, p) == -1).expect("odd prime has a non-residue")
}

/// Inverse of `a` modulo `m`, for `gcd(a, m) = 1`.
pub fn inv_mod(a: i128, m: i128) -> i128 {
    let e = a.rem_euclid(m).extended_gcd(&m);
    assert!(e.gcd == 1, "not a unit");
    e.x.rem_euclid(m)
}

/// `v_p(n)` for nonzero `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    v
}

/// `p^e` as `u64`.
pub fn pow(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power overflow")
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    is_probable_prime(n as u128)
}

pub(crate) fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}
