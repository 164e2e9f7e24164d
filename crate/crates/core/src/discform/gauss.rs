//! Milgram signature of a finite quadratic form from its Gauss sum, evaluated
//! exactly in a cyclotomic field.
//!
//! For a `p`-primary form with `q`-values in `(1/p^K)Z/2Z` the Gauss sum
//! `Σ exp(πi q(x))` lies in `Q(ζ_L)` with `L = lcm(2p^K, 8)`, and equals
//! `sqrt|A|·ζ_8^σ`. When `|A|` is not a square we multiply by a reference
//! form of known signature so that the modulus becomes an integer, then find
//! the unique `τ ∈ 0..8` with `S·S_ref = N·ζ_8^τ` by testing divisibility of
//! `S·S_ref − N·x^{τL/8}` by the cyclotomic polynomial `Φ_L`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;

use super::form::FiniteQuadraticForm;
use super::primes::pow;
use super::DiscError;

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    // both monic-ish integer polynomials, low degree first; den is monic
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i128; r.len() - dd];
    for i in (0..q.len()).rev() {
        let c = r[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                r[i + j] -= c * d;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
fn cyclotomic(n: usize) -> Vec<i128> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<i128>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return c.clone();
    }
    let mut p = vec![0i128; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = poly_div_exact(&p, &cyclotomic(d));
    }
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// Remainder of `a` modulo a monic polynomial `m`.
fn poly_rem(a: &[i128], m: &[i128]) -> Result<Vec<i128>, DiscError> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    for i in (dm..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        for (j, &d) in m.iter().enumerate() {
            r[i - dm + j] = r[i - dm + j]
                .checked_sub(c.checked_mul(d).ok_or(DiscError::TooLarge)?)
                .ok_or(DiscError::TooLarge)?;
        }
    }
    r.truncate(dm);
    Ok(r)
}

/// Gauss sum of a form as a class in `Z[x]/(x^L - 1)`, where `x = ζ_L` and
/// `L` is a multiple of `2·den`.
fn gauss_poly(f: &FiniteQuadraticForm, l: usize) -> Vec<i128> {
    let mut s = vec![0i128; l];
    let step = l / (2 * f.den() as usize);
    for x in f.elements() {
        s[(f.q_num(&x) as usize * step) % l] += 1;
    }
    s
}

fn cyclic_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let l = a.len();
    let mut out = vec![0i128; l];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % l] += x * y;
            }
        }
    }
    out
}

/// Signature mod 8 of a form whose group is a `p`-group.
fn primary_signature(f: &FiniteQuadraticForm, p: u64) -> Result<u8, DiscError> {
    let l = (2 * f.den() as usize).lcm(&8);
    let mut s = gauss_poly(f, l);
    let m: u32 = f.orders().iter().map(|&d| ilog(d, p)).sum();
    let mut sigma_ref = 0u8;
    let mut m_total = m;
    if m % 2 == 1 {
        // reference: Z/2 with q = 1/2 (signature 1), or Z/p with q = (p-1)/p (signature p-1)
        let (q, sig) = if p == 2 { (1i64, 1u8) } else { (p as i64 - 1, ((p - 1) % 8) as u8) };
        let r = FiniteQuadraticForm::from_numerators(vec![p], p, vec![q], vec![vec![q % p as i64]]);
        s = cyclic_mul(&s, &gauss_poly(&r, l));
        sigma_ref = sig;
        m_total += 1;
    }
    let n = (pow(p, m_total / 2)) as i128;
    let phi = cyclotomic(l);
    for tau in 0..8u8 {
        let mut d = s.clone();
        d[(tau as usize * l / 8) % l] -= n;
        if poly_rem(&d, &phi)?.iter().all(|&c| c == 0) {
            return Ok((tau + 8 - sigma_ref) % 8);
        }
    }
    Err(DiscError::Degenerate)
}

fn ilog(d: u64, p: u64) -> u32 {
    let (mut d, mut k) = (d, 0);
    while d % p == 0 {
        d /= p;
        k += 1;
    }
    k
}

/// Milgram signature: `σ` with `Σ_x exp(πi q(x)) = sqrt|A|·exp(2πi σ/8)`.
pub fn signature_mod8(f: &FiniteQuadraticForm) -> Result<u8, DiscError> {
    let mut total = 0u8;
    for p in f.primes() {
        total = (total + primary_signature(&f.p_part(p), p)?) % 8;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discform::discriminant_form;
    use crate::lattice::Lattice;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
    }

    #[test]
    fn signatures_of_small_lattices() {
        assert_eq!(signature_mod8(&FiniteQuadraticForm::trivial()).unwrap(), 0);
        for (g, sig) in [
            (Lattice::diagonal(&[-2]), 7),
            (Lattice::diagonal(&[2]), 1),
            (Lattice::diagonal(&[-6]), 7),
            (Lattice::diagonal(&[-2, -2, 4]), 7),
            (Lattice::from_i64(&[vec![-2, 1], vec![1, -2]]), 6),
            (Lattice::from_i64(&[vec![0, 2], vec![2, 0]]), 0),
        ] {
            assert_eq!(signature_mod8(&discriminant_form(&g).unwrap()).unwrap(), sig, "{g:?}");
        }
    }
}
