//! Fincke–Pohst enumeration with integer-only bounds.
//!
//! With the exact decomposition `Q(x) = Σ_j D_j (x_j + Σ_{i>j} L_ij x_i)²` of a
//! positive definite form, write `L_ij = m_ij / c_j` with a common
//! denominator per column and `D_j / c_j² = W_j / M` with one global `M`.
//! Then `M·Q(x) = Σ_j W_j w_j²` where `w_j = c_j x_j + Σ_{i>j} m_ij x_i` is an
//! integer, so every pruning bound and the final acceptance test are exact
//! integer comparisons.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::reduce::lll;
use super::RootError;
use crate::intlinalg::{Fast, IntMatrix, Scalar};

/// Which vectors to collect.
#[derive(Clone, Copy, Debug)]
pub enum Target {
    /// `Q(x) = n`
    Exactly(i64),
    /// `0 < Q(x) ≤ n`
    AtMost(i64),
}

struct Prepared<S> {
    n: usize,
    c: Vec<S>,
    m: Vec<Vec<S>>,
    w: Vec<S>,
    scale: S,
}

fn prepare<S: Scalar>(a: &[Vec<i128>]) -> Option<Prepared<S>> {
    let n = a.len();
    let mut l = vec![vec![BigRational::zero(); n]; n];
    let mut d = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut s = BigRational::from_integer(BigInt::from(a[j][j]));
        for k in 0..j {
            s -= &l[j][k] * &l[j][k] * &d[k];
        }
        d[j] = s;
        for i in j + 1..n {
            let mut s = BigRational::from_integer(BigInt::from(a[i][j]));
            for k in 0..j {
                s -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = s / &d[j];
        }
    }
    let mut c = Vec::with_capacity(n);
    let mut m = vec![Vec::new(); n];
    let mut r = Vec::with_capacity(n);
    for j in 0..n {
        let cj = (j + 1..n).fold(BigInt::one(), |acc, i| acc.lcm(l[i][j].denom()));
        m[j] = (0..n)
            .map(|i| if i > j { (&l[i][j] * BigRational::from_integer(cj.clone())).to_integer() } else { BigInt::zero() })
            .collect();
        r.push(&d[j] / BigRational::from_integer(&cj * &cj));
        c.push(cj);
    }
    let scale = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let w: Vec<BigInt> = r.iter().map(|x| (x * BigRational::from_integer(scale.clone())).to_integer()).collect();
    Some(Prepared {
        n,
        c: c.iter().map(S::from_big).collect::<Option<_>>()?,
        m: m.iter().map(|row| row.iter().map(S::from_big).collect::<Option<Vec<_>>>()).collect::<Option<_>>()?,
        w: w.iter().map(S::from_big).collect::<Option<_>>()?,
        scale: S::from_big(&scale)?,
    })
}

/// Enumerate one representative of each `±x` pair in reduced coordinates.
fn search<S: Scalar>(p: &Prepared<S>, target: Target, cap: usize) -> Option<Result<Vec<Vec<i64>>, RootError>> {
    let n = p.n;
    let (bound, exact) = match target {
        Target::Exactly(v) => (v, true),
        Target::AtMost(v) => (v, false),
    };
    let full = p.scale.c_mul(&S::from_i64(bound)?)?;
    let goal = full.clone();
    let mut out = Vec::new();
    if n == 0 {
        return Some(Ok(out));
    }
    let mut x = vec![0i64; n];
    let mut hi = vec![0i64; n];
    let mut rem = vec![S::nil(); n + 1];
    rem[n] = full;
    // level j: choose x[j] in [lo, hi]
    let mut j = n - 1;
    let bounds = |j: usize, x: &[i64], rem: &[S]| -> Option<(i64, i64, S)> {
        let mut s = S::nil();
        for i in j + 1..n {
            if x[i] != 0 {
                s = s.c_add(&p.m[j][i].c_mul(&S::from_i64(x[i])?)?)?;
            }
        }
        let r = &rem[j + 1];
        let t = r.c_div_floor(&p.w[j])?.c_isqrt();
        // c x + s ∈ [-t, t]
        let lo_num = t.c_neg()?.c_sub(&s)?;
        let hi_num = t.c_sub(&s)?;
        let lo = lo_num.c_neg()?.c_div_floor(&p.c[j])?.c_neg()?;
        let hi = hi_num.c_div_floor(&p.c[j])?;
        let lo = lo.to_big().to_i64()?;
        let hi = hi.to_big().to_i64()?;
        Some((lo, hi, s))
    };
    let mut svals: Vec<S> = vec![S::nil(); n];
    let start = |j: usize, x: &mut Vec<i64>, hi: &mut Vec<i64>, rem: &[S], svals: &mut Vec<S>| -> Option<bool> {
        let (mut lo, h, s) = bounds(j, x, rem)?;
        if x[j + 1..].iter().all(|&v| v == 0) {
            lo = lo.max(0);
        }
        svals[j] = s;
        x[j] = lo;
        hi[j] = h;
        Some(lo <= h)
    };
    let mut live = start(j, &mut x, &mut hi, &rem, &mut svals)?;
    loop {
        if live {
            let wj = p.c[j].c_mul(&S::from_i64(x[j])?)?.c_add(&svals[j])?;
            let used = p.w[j].c_mul(&wj.c_mul(&wj)?)?;
            let r = rem[j + 1].c_sub(&used)?;
            if r.is_neg() {
                // cannot happen with exact bounds, but keep the invariant explicit
                live = false;
                continue;
            }
            if j == 0 {
                let total = goal.c_sub(&r)?;
                let nonzero = x.iter().any(|&v| v != 0);
                if nonzero && (!exact || total == goal) {
                    out.push(x.clone());
                    if out.len() > cap {
                        return Some(Err(RootError::TooMany(cap)));
                    }
                }
                x[0] += 1;
                live = x[0] <= hi[0];
            } else {
                rem[j] = r;
                j -= 1;
                live = start(j, &mut x, &mut hi, &rem, &mut svals)?;
            }
        } else {
            if j + 1 == n {
                break;
            }
            j += 1;
            x[j] += 1;
            live = x[j] <= hi[j];
        }
    }
    Some(Ok(out))
}

/// All `x ≠ 0` (one per `±` pair) with `x·A·xᵀ` matching `target`, for a
/// positive definite integer Gram `A`. Results are in the coordinates of `A`,
/// normalized so the first nonzero coordinate is positive, and sorted.
pub fn short_vectors(a: &IntMatrix, target: Target, cap: usize) -> Result<Vec<Vec<i64>>, RootError> {
    let n = a.rows();
    let rows: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or(RootError::Overflow)?;
    let (t, red) = lll(&rows).unwrap_or_else(|| {
        ((0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect(), rows.clone())
    });
    let found = match prepare::<Fast>(&red).and_then(|p| search(&p, target, cap)) {
        Some(r) => r?,
        None => {
            let p = prepare::<BigInt>(&red).ok_or(RootError::Overflow)?;
            search(&p, target, cap).ok_or(RootError::Overflow)??
        }
    };
    let mut out = Vec::with_capacity(found.len());
    for y in found {
        let mut v = vec![0i128; n];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0 {
                continue;
            }
            for (vj, tij) in v.iter_mut().zip(&t[i]) {
                *vj = vj
                    .checked_add((yi as i128).checked_mul(*tij).ok_or(RootError::Overflow)?)
                    .ok_or(RootError::Overflow)?;
            }
        }
        let mut v: Vec<i64> = v.into_iter().map(i64::try_from).collect::<Result<_, _>>().map_err(|_| RootError::Overflow)?;
        if v.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        out.push(v);
    }
    out.sort();
    Ok(out)
}
