//! Exact integer linear algebra: Hermite and Smith normal forms, integer
//! kernels and saturation.
//!
//! Every routine first runs on checked `i128` arithmetic and silently reruns
//! on arbitrary-precision integers when an intermediate value overflows.
//! Results are identical on both paths, so callers never see the switch.

mod matrix;
mod scalar;

use num_bigint::BigInt;
use thiserror::Error;

pub use matrix::{content, is_lex_positive, IntMatrix};
pub use scalar::{
    configure_from_env, fast_path_bits, max_bits, set_fast_path_bits, set_max_bits, Fast, Scalar,
};
pub(crate) use scalar::Mat;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("integer overflow beyond the configured precision ceiling")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix text, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Run `$body` with `$m` bound to a `Mat<Fast>` view of `$mat`; if that is
/// impossible or the body overflows, rerun with `Mat<BigInt>`. The body must
/// evaluate to an `Option` whose payload does not depend on the scalar type.
macro_rules! fast_or_big {
    ($mat:expr, $m:ident => $body:expr) => {{
        let src: &$crate::intlinalg::IntMatrix = $mat;
        let fast = src.to_mat::<$crate::intlinalg::Fast>().and_then(|$m| $body);
        match fast {
            Some(r) => Ok(r),
            None => {
                let $m = src
                    .to_mat::<::num_bigint::BigInt>()
                    .expect("conversion to BigInt cannot fail");
                ($body).ok_or($crate::intlinalg::LinalgError::Overflow)
            }
        }
    }};
}

pub(crate) use fast_or_big;

/// Row-style Hermite normal form `H = U·M`.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Number of nonzero rows of `h`.
    pub rank: usize,
}

/// Smith normal form `D = U·M·V`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal entries `d_1 | d_2 | …` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }
}

pub fn hnf(m: &IntMatrix) -> Result<Hnf, LinalgError> {
    fast_or_big!(m, x => hnf_impl(&x).map(|(h, u, rank)| Hnf {
        h: IntMatrix::from_mat(&h),
        u: IntMatrix::from_mat(&u),
        rank,
    }))
}

pub fn snf(m: &IntMatrix) -> Result<Snf, LinalgError> {
    fast_or_big!(m, x => snf_impl(&x).map(|(d, u, v)| Snf {
        d: IntMatrix::from_mat(&d),
        u: IntMatrix::from_mat(&u),
        v: IntMatrix::from_mat(&v),
    }))
}

/// Basis of the left kernel `{x : x·M = 0}`, returned in Hermite normal form.
pub fn kernel_basis(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let f = hnf(m)?;
    let idx: Vec<usize> = (f.rank..m.rows()).collect();
    let k = f.u.select_rows(&idx);
    if k.rows() == 0 {
        return Ok(IntMatrix::zeros(0, m.rows()));
    }
    Ok(hnf(&k)?.h)
}

/// Basis (in Hermite normal form) of the saturation of the row span of `b`
/// inside `Z^cols`.
pub fn saturate(b: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let orth = kernel_basis(&b.transpose())?;
    kernel_basis(&orth.transpose())
}

/// Basis of the integer row span of `b` (nonzero rows of its HNF).
pub fn row_span_basis(b: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let f = hnf(b)?;
    let idx: Vec<usize> = (0..f.rank).collect();
    Ok(f.h.select_rows(&idx))
}

fn min_nonzero_in_col<S: Scalar>(a: &Mat<S>, c: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for i in from..a.rows {
        let v = a.at(i, c);
        if v.is_nil() {
            continue;
        }
        let av = v.c_abs()?;
        if best.as_ref().is_none_or(|(_, b)| av < *b) {
            best = Some((i, av));
        }
    }
    best.map(|(i, _)| i)
}

pub(crate) fn hnf_impl<S: Scalar>(m: &Mat<S>) -> Option<(Mat<S>, Mat<S>, usize)> {
    let mut a = m.clone();
    let mut u = Mat::<S>::identity(m.rows);
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        loop {
            let Some(p) = min_nonzero_in_col(&a, c, r) else { break };
            a.swap_rows(p, r);
            u.swap_rows(p, r);
            let mut clean = true;
            for i in r + 1..a.rows {
                if a.at(i, c).is_nil() {
                    continue;
                }
                let q = a.at(i, c).c_div_floor(a.at(r, c))?;
                a.row_axpy(i, &q, r)?;
                u.row_axpy(i, &q, r)?;
                if !a.at(i, c).is_nil() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a.at(r, c).is_nil() {
            continue;
        }
        if a.at(r, c).is_neg() {
            a.negate_row(r)?;
            u.negate_row(r)?;
        }
        for i in 0..r {
            let q = a.at(i, c).c_div_floor(a.at(r, c))?;
            a.row_axpy(i, &q, r)?;
            u.row_axpy(i, &q, r)?;
        }
        r += 1;
    }
    Some((a, u, r))
}

pub(crate) fn snf_impl<S: Scalar>(m: &Mat<S>) -> Option<(Mat<S>, Mat<S>, Mat<S>)> {
    let mut a = m.clone();
    let mut u = Mat::<S>::identity(m.rows);
    let mut v = Mat::<S>::identity(m.cols);
    let n = a.rows.min(a.cols);
    for t in 0..n {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize, S)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                let x = a.at(i, j);
                if !x.is_nil() {
                    let ax = x.c_abs()?;
                    if best.as_ref().is_none_or(|b| ax < b.2) {
                        best = Some((i, j, ax));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..a.rows {
                if a.at(i, t).is_nil() {
                    continue;
                }
                let q = a.at(i, t).c_div_floor(a.at(t, t))?;
                a.row_axpy(i, &q, t)?;
                u.row_axpy(i, &q, t)?;
                dirty |= !a.at(i, t).is_nil();
            }
            for j in t + 1..a.cols {
                if a.at(t, j).is_nil() {
                    continue;
                }
                let q = a.at(t, j).c_div_floor(a.at(t, t))?;
                a.col_axpy(j, &q, t)?;
                v.col_axpy(j, &q, t)?;
                dirty |= !a.at(t, j).is_nil();
            }
            if dirty {
                let mut best: Option<(bool, usize, S)> = None;
                for i in t + 1..a.rows {
                    let x = a.at(i, t);
                    if !x.is_nil() {
                        let ax = x.c_abs()?;
                        if best.as_ref().is_none_or(|b| ax < b.2) {
                            best = Some((true, i, ax));
                        }
                    }
                }
                for j in t + 1..a.cols {
                    let x = a.at(t, j);
                    if !x.is_nil() {
                        let ax = x.c_abs()?;
                        if best.as_ref().is_none_or(|b| ax < b.2) {
                            best = Some((false, j, ax));
                        }
                    }
                }
                let (is_row, k, _) = best.expect("dirty implies a nonzero entry");
                if is_row {
                    a.swap_rows(t, k);
                    u.swap_rows(t, k);
                } else {
                    a.swap_cols(t, k);
                    v.swap_cols(t, k);
                }
                continue;
            }
            let p = a.at(t, t).clone();
            let mut offender = None;
            'search: for i in t + 1..a.rows {
                for j in t + 1..a.cols {
                    if !a.at(i, j).c_mod_floor(&p)?.is_nil() {
                        offender = Some(i);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let minus_one = S::unit().c_neg()?;
                    a.row_axpy(t, &minus_one, i)?;
                    u.row_axpy(t, &minus_one, i)?;
                }
                None => break,
            }
        }
        if a.at(t, t).is_neg() {
            a.negate_row(t)?;
            u.negate_row(t)?;
        }
    }
    Some((a, u, v))
}
