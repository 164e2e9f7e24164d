//! Integer scalars used by the normal-form engines.
//!
//! Every algorithm in this crate that does heavy integer work is written once,
//! generic over [`Scalar`], and instantiated twice: on [`Fast`] (checked `i128`
//! with a configurable bit ceiling) and on [`BigInt`]. Operations on `Fast`
//! return `None` instead of wrapping, which the callers turn into a rerun on
//! the big-integer path.

use std::fmt::Debug;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest magnitude bit width admitted on the fixed-width path (127 = full `i128`).
static FAST_BITS: AtomicU32 = AtomicU32::new(127);
/// Optional ceiling on the arbitrary-precision path; 0 means unlimited.
static MAX_BITS: AtomicU64 = AtomicU64::new(0);

/// Set the bit ceiling of the fixed-width fast path. `0` disables the fast path,
/// values above 127 are clamped.
pub fn set_fast_path_bits(bits: u32) {
    FAST_BITS.store(bits.min(127), Ordering::Relaxed);
}

/// Current fast-path ceiling in bits.
pub fn fast_path_bits() -> u32 {
    FAST_BITS.load(Ordering::Relaxed)
}

/// Limit the size of integers produced on the arbitrary-precision path.
/// `None` removes the limit.
pub fn set_max_bits(bits: Option<u64>) {
    MAX_BITS.store(bits.unwrap_or(0), Ordering::Relaxed);
}

/// Current arbitrary-precision ceiling, if any.
pub fn max_bits() -> Option<u64> {
    match MAX_BITS.load(Ordering::Relaxed) {
        0 => None,
        b => Some(b),
    }
}

/// Read `LATK_PRECISION_BITS` from the environment and apply it.
/// Returns the value applied, or an error message for an unparsable value.
pub fn configure_from_env() -> Result<Option<u32>, String> {
    match std::env::var("LATK_PRECISION_BITS") {
        Ok(v) => {
            let bits: u32 = v
                .trim()
                .parse()
                .map_err(|_| format!("LATK_PRECISION_BITS: not a bit count: {v:?}"))?;
            set_fast_path_bits(bits);
            Ok(Some(bits))
        }
        Err(_) => Ok(None),
    }
}

/// Arithmetic needed by the exact algorithms. Every fallible operation returns
/// `None` on overflow.
pub trait Scalar: Clone + Debug + PartialEq + Eq + Ord {
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_i64(v: i64) -> Option<Self>;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_nil(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn c_add(&self, o: &Self) -> Option<Self>;
    fn c_sub(&self, o: &Self) -> Option<Self>;
    fn c_mul(&self, o: &Self) -> Option<Self>;
    fn c_neg(&self) -> Option<Self>;
    /// Floor division; `o` is nonzero.
    fn c_div_floor(&self, o: &Self) -> Option<Self>;
    /// Exact division; `o` divides `self`.
    fn c_div_exact(&self, o: &Self) -> Option<Self>;
    /// Remainder of floor division (sign of `o`).
    fn c_mod_floor(&self, o: &Self) -> Option<Self>;
    fn c_abs(&self) -> Option<Self> {
        if self.is_neg() {
            self.c_neg()
        } else {
            Some(self.clone())
        }
    }
    /// `self - q*o`
    fn c_sub_mul(&self, q: &Self, o: &Self) -> Option<Self> {
        self.c_sub(&q.c_mul(o)?)
    }
    /// `floor(sqrt(self))` for nonnegative `self`.
    fn c_isqrt(&self) -> Self;
}

/// Checked `i128` scalar honoring the global fast-path ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fast(pub i128);

impl Fast {
    #[inline]
    fn fit(v: i128) -> Option<Fast> {
        let bits = FAST_BITS.load(Ordering::Relaxed);
        if bits >= 127 {
            return Some(Fast(v));
        }
        if bits == 0 {
            return None;
        }
        if v.unsigned_abs() >> bits == 0 {
            Some(Fast(v))
        } else {
            None
        }
    }
}

impl Scalar for Fast {
    fn nil() -> Self {
        Fast(0)
    }
    fn unit() -> Self {
        Fast(1)
    }
    fn from_i64(v: i64) -> Option<Self> {
        Fast::fit(v as i128)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Fast::fit(v.to_i128()?)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(self.0)
    }
    fn is_nil(&self) -> bool {
        self.0 == 0
    }
    fn is_neg(&self) -> bool {
        self.0 < 0
    }
    #[inline]
    fn c_add(&self, o: &Self) -> Option<Self> {
        Fast::fit(self.0.checked_add(o.0)?)
    }
    #[inline]
    fn c_sub(&self, o: &Self) -> Option<Self> {
        Fast::fit(self.0.checked_sub(o.0)?)
    }
    #[inline]
    fn c_mul(&self, o: &Self) -> Option<Self> {
        Fast::fit(self.0.checked_mul(o.0)?)
    }
    fn c_neg(&self) -> Option<Self> {
        Fast::fit(self.0.checked_neg()?)
    }
    fn c_div_floor(&self, o: &Self) -> Option<Self> {
        if o.0 == -1 {
            return self.c_neg();
        }
        Fast::fit(Integer::div_floor(&self.0, &o.0))
    }
    fn c_div_exact(&self, o: &Self) -> Option<Self> {
        Fast::fit(self.0.checked_div(o.0)?)
    }
    fn c_mod_floor(&self, o: &Self) -> Option<Self> {
        if o.0 == -1 {
            return Some(Fast(0));
        }
        Some(Fast(Integer::mod_floor(&self.0, &o.0)))
    }
    fn c_isqrt(&self) -> Self {
        Fast(self.0.max(0).isqrt())
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        <BigInt as Zero>::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Option<Self> {
        Some(BigInt::from(v))
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        big_guard(self + o)
    }
    fn c_sub(&self, o: &Self) -> Option<Self> {
        big_guard(self - o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        big_guard(self * o)
    }
    fn c_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn c_div_floor(&self, o: &Self) -> Option<Self> {
        Some(Integer::div_floor(self, o))
    }
    fn c_div_exact(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn c_mod_floor(&self, o: &Self) -> Option<Self> {
        Some(Integer::mod_floor(self, o))
    }
    fn c_isqrt(&self) -> Self {
        if Signed::is_negative(self) {
            <BigInt as Zero>::zero()
        } else {
            self.sqrt()
        }
    }
}

#[inline]
fn big_guard(v: BigInt) -> Option<BigInt> {
    match MAX_BITS.load(Ordering::Relaxed) {
        0 => Some(v),
        b if v.bits() <= b => Some(v),
        _ => None,
    }
}

/// Dense row-major matrix over a [`Scalar`], the working representation of the
/// normal-form engines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::nil(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::unit();
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    pub fn row_axpy(&mut self, dst: usize, q: &S, src: usize) -> Option<()> {
        if q.is_nil() {
            return Some(());
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_nil() {
                continue;
            }
            let v = self.data[dst * self.cols + j].c_sub_mul(q, s)?;
            self.data[dst * self.cols + j] = v;
        }
        Some(())
    }

    /// col[dst] -= q * col[src]
    pub fn col_axpy(&mut self, dst: usize, q: &S, src: usize) -> Option<()> {
        if q.is_nil() {
            return Some(());
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if s.is_nil() {
                continue;
            }
            let v = self.data[i * self.cols + dst].c_sub_mul(q, s)?;
            self.data[i * self.cols + dst] = v;
        }
        Some(())
    }

    pub fn negate_row(&mut self, r: usize) -> Option<()> {
        for j in 0..self.cols {
            let v = self.data[r * self.cols + j].c_neg()?;
            self.data[r * self.cols + j] = v;
        }
        Some(())
    }

    pub fn mul(&self, o: &Self) -> Option<Self> {
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_nil() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if b.is_nil() {
                        continue;
                    }
                    let v = out.at(i, j).c_add(&a.c_mul(b)?)?;
                    out.set(i, j, v);
                }
            }
        }
        Some(out)
    }
}
