use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::scalar::{Mat, Scalar};
use super::LinalgError;

/// Exact integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal<T: Into<BigInt> + Clone>(d: &[T]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in d.iter().enumerate() {
            m.data[i * n + i] = v.clone().into();
        }
        m
    }

    /// Build from row vectors; all rows must have length `cols`.
    pub fn from_rows<T: Into<BigInt> + Clone, R: AsRef<[T]>>(
        rows: &[R],
        cols: usize,
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Dimension(format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    /// Build from nested `i64` rows, inferring the column count from the first row.
    ///
    /// Panics on ragged input; intended for literals in code and tests.
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows, cols).expect("ragged matrix literal")
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: impl Into<BigInt>) {
        self.data[i * self.cols + j] = v.into();
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    /// All entries as `i64`, or `None` if some entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<Self, LinalgError> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(LinalgError::Dimension("vstack with different column counts".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(IntMatrix { rows: self.rows + other.rows, cols, data })
    }

    /// Place `self` and `other` side by side.
    pub fn hstack(&self, other: &IntMatrix) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Dimension("hstack with different row counts".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &IntMatrix) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        IntMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn scale(&self, m: &BigInt) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * m).collect() }
    }

    pub fn checked_mul(&self, o: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(mul_dense(self, o))
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let e = self.get(i, j);
                if !e.is_zero() {
                    *o += vi * e;
                }
            }
        }
        out
    }

    /// `x · self · yᵀ` for a square matrix.
    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.vec_mul(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// `B · self · Bᵀ`.
    pub fn congruence(&self, b: &IntMatrix) -> IntMatrix {
        mul_dense(&mul_dense(b, self), &b.transpose())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Dimension("determinant of a non-square matrix".into()));
        }
        super::fast_or_big!(self, m => bareiss_det(&m))
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> Result<usize, LinalgError> {
        Ok(super::hnf(self)?.rank)
    }

    pub(crate) fn to_mat<S: Scalar>(&self) -> Option<Mat<S>> {
        let data = self.data.iter().map(S::from_big).collect::<Option<Vec<_>>>()?;
        Some(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub(crate) fn from_mat<S: Scalar>(m: &Mat<S>) -> IntMatrix {
        IntMatrix { rows: m.rows, cols: m.cols, data: m.data.iter().map(Scalar::to_big).collect() }
    }

    /// Render in the plain-text matrix format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parse the plain-text matrix format: first non-comment line `R C`, then
    /// `R` lines of `C` integers. Lines starting with `#` and blank lines are
    /// ignored.
    pub fn parse_text(text: &str) -> Result<IntMatrix, LinalgError> {
        let (m, rest) = parse_block(text.lines().enumerate())?;
        if let Some((ln, line)) = rest.into_iter().next() {
            return Err(LinalgError::Parse { line: ln + 1, msg: format!("trailing content {line:?}") });
        }
        Ok(m)
    }

    /// Parse consecutive matrix blocks from one text.
    pub fn parse_blocks(text: &str) -> Result<Vec<IntMatrix>, LinalgError> {
        let mut out = Vec::new();
        let mut lines: Vec<(usize, &str)> = text.lines().enumerate().collect();
        loop {
            let meaningful = lines.iter().any(|(_, l)| is_content(l));
            if !meaningful {
                break;
            }
            let (m, rest) = parse_block(lines.into_iter())?;
            out.push(m);
            lines = rest;
        }
        Ok(out)
    }
}

fn is_content(l: &str) -> bool {
    let t = l.trim();
    !t.is_empty() && !t.starts_with('#')
}

fn parse_block<'a>(
    mut lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<(IntMatrix, Vec<(usize, &'a str)>), LinalgError> {
    let mut content = lines.by_ref().filter(|(_, l)| is_content(l));
    let (ln, header) = content
        .next()
        .ok_or(LinalgError::Parse { line: 0, msg: "missing \"R C\" header".into() })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let bad = || LinalgError::Parse { line: ln + 1, msg: format!("expected \"R C\", found {header:?}") };
    if dims.len() != 2 {
        return Err(bad());
    }
    let r: usize = dims[0].parse().map_err(|_| bad())?;
    let c: usize = dims[1].parse().map_err(|_| bad())?;
    let mut data = Vec::with_capacity(r * c);
    for _ in 0..r {
        let (ln, line) = content
            .next()
            .ok_or(LinalgError::Parse { line: ln + 1, msg: format!("expected {r} rows") })?;
        let vals = line
            .split_whitespace()
            .map(|t| {
                BigInt::from_str(t)
                    .map_err(|_| LinalgError::Parse { line: ln + 1, msg: format!("not an integer: {t:?}") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if vals.len() != c {
            return Err(LinalgError::Parse {
                line: ln + 1,
                msg: format!("expected {c} entries, found {}", vals.len()),
            });
        }
        data.extend(vals);
    }
    let rest: Vec<(usize, &str)> = lines.collect();
    Ok((IntMatrix { rows: r, cols: c, data }, rest))
}

fn mul_dense(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    assert_eq!(a.cols, b.rows, "matrix product dimension mismatch");
    if let (Some(fa), Some(fb)) = (a.to_mat::<super::Fast>(), b.to_mat::<super::Fast>()) {
        if let Some(p) = fa.mul(&fb) {
            return IntMatrix::from_mat(&p);
        }
    }
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if !y.is_zero() {
                    out.data[i * b.cols + j] += x * y;
                }
            }
        }
    }
    out
}

fn bareiss_det<S: Scalar>(m: &Mat<S>) -> Option<BigInt> {
    let n = m.rows;
    if n == 0 {
        return Some(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = S::unit();
    for k in 0..n - 1 {
        if a.at(k, k).is_nil() {
            let Some(p) = (k + 1..n).find(|&i| !a.at(i, k).is_nil()) else {
                return Some(BigInt::zero());
            };
            a.swap_rows(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a.at(i, j).c_mul(a.at(k, k))?.c_sub(&a.at(i, k).c_mul(a.at(k, j))?)?;
                a.set(i, j, v.c_div_exact(&prev)?);
            }
        }
        prev = a.at(k, k).clone();
    }
    let d = a.at(n - 1, n - 1).to_big();
    Some(if sign { -d } else { d })
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", r.join(","))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for IntMatrix {
    type Err = LinalgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntMatrix::parse_text(s)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, o: &IntMatrix) -> IntMatrix {
        mul_dense(self, o)
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, o: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum dimension mismatch");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, o: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference dimension mismatch");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v).collect() }
    }
}

/// Greatest common divisor of a slice (nonnegative, 0 for an all-zero slice).
pub fn content(v: &[BigInt]) -> BigInt {
    use num_integer::Integer;
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).abs()
}

/// True when the first nonzero entry is positive (or the vector is zero).
pub fn is_lex_positive(v: &[BigInt]) -> bool {
    v.iter().find(|x| !x.is_zero()).is_none_or(|x| x.is_positive())
}
