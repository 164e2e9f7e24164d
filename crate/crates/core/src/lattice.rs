//! Integral lattices given by Gram matrices, and sublattices embedded in them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intlinalg::{self, hnf, kernel_basis, saturate, IntMatrix, LinalgError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("lattice is degenerate")]
    Degenerate,
    #[error("lattice is not even")]
    NotEven,
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("rescaling factor must be nonzero")]
    ZeroScale,
    #[error("sublattice basis rows are linearly dependent")]
    DependentBasis,
    #[error("basis has {got} columns but the ambient lattice has rank {rank}")]
    AmbientMismatch { got: usize, rank: usize },
    #[error("glue vector {index}: {reason}")]
    BadGlue { index: usize, reason: String },
}

/// Inertia of a real symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

impl Signature {
    /// `n_plus - n_minus`
    pub fn difference(&self) -> i64 {
        self.plus as i64 - self.minus as i64
    }
}

/// An integral lattice: a symmetric integer Gram matrix on a fixed basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    gram: IntMatrix,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({:?})", self.gram)
    }
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        Ok(Lattice { gram })
    }

    /// Convenience constructor from `i64` rows; panics on non-symmetric input.
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Lattice::new(IntMatrix::from_i64(rows)).expect("symmetric Gram literal")
    }

    /// Diagonal lattice `⟨d_1⟩ ⊕ … ⊕ ⟨d_n⟩`.
    pub fn diagonal(d: &[i64]) -> Self {
        Lattice { gram: IntMatrix::diagonal(d) }
    }

    /// The zero lattice.
    pub fn zero() -> Self {
        Lattice { gram: IntMatrix::zeros(0, 0) }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn det(&self) -> BigInt {
        self.gram.det().expect("square by construction")
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn signature(&self) -> Signature {
        signature(&self.gram)
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature().minus == self.rank()
    }

    /// `x·G·yᵀ`
    pub fn inner(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, y)
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.inner(x, x)
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice { gram: self.gram.block_diag(&other.gram) }
    }

    /// Multiply the form by `m`.
    pub fn rescale(&self, m: i64) -> Result<Lattice, LatticeError> {
        if m == 0 {
            return Err(LatticeError::ZeroScale);
        }
        Ok(Lattice { gram: self.gram.scale(&BigInt::from(m)) })
    }

    /// Orthogonal sum of `n` copies.
    pub fn power(&self, n: usize) -> Lattice {
        (0..n).fold(Lattice::zero(), |acc, _| acc.direct_sum(self))
    }

    /// The same lattice on a new basis `B` (rows in old coordinates);
    /// `B` must be unimodular for the result to describe the same lattice.
    pub fn change_basis(&self, b: &IntMatrix) -> Lattice {
        Lattice { gram: self.gram.congruence(b) }
    }

    /// Inverse of the Gram matrix as `(numerators, common denominator)`, with a
    /// positive denominator.
    pub fn gram_inverse(&self) -> Result<(IntMatrix, BigInt), LatticeError> {
        rational_inverse(&self.gram).ok_or(LatticeError::Degenerate)
    }
}

/// Exact inertia by symmetric Gaussian elimination over the rationals.
pub fn signature(g: &IntMatrix) -> Signature {
    let n = g.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(g.get(i, j).clone())).collect())
        .collect();
    let mut sig = Signature { plus: 0, minus: 0, zero: 0 };
    let mut live: Vec<usize> = (0..n).collect();
    while !live.is_empty() {
        let diag = live.iter().position(|&i| !a[i][i].is_zero());
        let p = match diag {
            Some(k) => live[k],
            None => {
                // all diagonal entries vanish: fold a nonzero off-diagonal partner into row i
                let mut pair = None;
                'find: for (x, &i) in live.iter().enumerate() {
                    for &j in &live[x + 1..] {
                        if !a[i][j].is_zero() {
                            pair = Some((i, j));
                            break 'find;
                        }
                    }
                }
                let Some((i, j)) = pair else {
                    sig.zero += live.len();
                    break;
                };
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let piv = a[p][p].clone();
        if piv.is_positive() {
            sig.plus += 1;
        } else {
            sig.minus += 1;
        }
        live.retain(|&i| i != p);
        for &i in &live {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &piv;
            for &j in &live {
                let d = &f * &a[p][j];
                a[i][j] -= d;
            }
        }
    }
    sig
}

/// Rational inverse of a square integer matrix as `(N, d)` with `M⁻¹ = N/d`, `d > 0`.
pub fn rational_inverse(m: &IntMatrix) -> Option<(IntMatrix, BigInt)> {
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from_integer(m.get(i, j).clone())
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let d = &f * &a[c][j];
                    a[i][j] -= d;
                }
            }
        }
    }
    let den = a
        .iter()
        .flat_map(|r| r[n..].iter())
        .fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = &a[i][n + j];
            out.set(i, j, v.numer() * (&den / v.denom()));
        }
    }
    Some((out, den))
}

/// A sublattice spanned by independent rows of `basis`, in the coordinates of
/// an ambient lattice.
#[derive(Clone, PartialEq, Eq)]
pub struct Sublattice {
    ambient: Arc<Lattice>,
    basis: IntMatrix,
}

impl fmt::Debug for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sublattice(basis {:?})", self.basis)
    }
}

impl Sublattice {
    pub fn new(ambient: Arc<Lattice>, basis: IntMatrix) -> Result<Self, LatticeError> {
        if basis.rows() > 0 && basis.cols() != ambient.rank() {
            return Err(LatticeError::AmbientMismatch { got: basis.cols(), rank: ambient.rank() });
        }
        let basis = if basis.rows() == 0 { IntMatrix::zeros(0, ambient.rank()) } else { basis };
        if hnf(&basis)?.rank != basis.rows() {
            return Err(LatticeError::DependentBasis);
        }
        Ok(Sublattice { ambient, basis })
    }

    /// Sublattice spanned by arbitrary (possibly dependent) generators.
    pub fn spanned_by(ambient: Arc<Lattice>, gens: &IntMatrix) -> Result<Self, LatticeError> {
        let gens = if gens.rows() == 0 { IntMatrix::zeros(0, ambient.rank()) } else { gens.clone() };
        if gens.cols() != ambient.rank() {
            return Err(LatticeError::AmbientMismatch { got: gens.cols(), rank: ambient.rank() });
        }
        let basis = intlinalg::row_span_basis(&gens)?;
        Ok(Sublattice { ambient, basis })
    }

    /// The whole ambient lattice as a sublattice of itself.
    pub fn full(ambient: Arc<Lattice>) -> Self {
        let n = ambient.rank();
        Sublattice { ambient, basis: IntMatrix::identity(n) }
    }

    pub fn ambient(&self) -> &Arc<Lattice> {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Induced Gram matrix `B·G·Bᵀ`.
    pub fn gram(&self) -> IntMatrix {
        self.ambient.gram().congruence(&self.basis)
    }

    /// The sublattice as an abstract lattice with its induced form.
    pub fn lattice(&self) -> Lattice {
        Lattice { gram: self.gram() }
    }

    pub fn is_primitive(&self) -> bool {
        // both sides are Hermite forms, so equal spans means equal matrices
        let sat = saturate(&self.basis).expect("saturation");
        intlinalg::row_span_basis(&self.basis).ok() == Some(sat)
    }

    /// Express an ambient vector lying in the rational span of the basis in basis
    /// coordinates; `None` if it is not in the integer span.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_in_span(&self.basis, v)
    }

    /// Text form: the ambient Gram block followed by the basis block.
    pub fn to_text(&self) -> String {
        format!("# ambient\n{}# basis\n{}", self.ambient.gram().to_text(), self.basis.to_text())
    }
}

/// Solve `c·B = v` for integral `c`, if possible.
pub fn solve_in_span(b: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let k = b.rows();
    if k == 0 {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    // stack v under B and find a kernel vector with last coordinate ±1
    let row = IntMatrix::from_rows(&[v.to_vec()], b.cols()).ok()?;
    let m = b.vstack(&row).ok()?;
    let ker = kernel_basis(&m).ok()?;
    for i in 0..ker.rows() {
        let r = ker.row(i);
        let last = &r[k];
        if last.abs().is_one() {
            let s = -last;
            return Some(r[..k].iter().map(|x| x * &s).collect());
        }
    }
    // a solution exists iff the last entries of the kernel basis are coprime
    let g = (0..ker.rows()).fold(BigInt::zero(), |g, i| g.gcd(ker.get(i, k)));
    if !g.is_one() {
        return None;
    }
    // combine kernel rows to reach last entry 1 via the HNF of the last column
    let col = IntMatrix::from_rows(
        &(0..ker.rows()).map(|i| vec![ker.get(i, k).clone()]).collect::<Vec<_>>(),
        1,
    )
    .ok()?;
    let f = hnf(&col).ok()?;
    let comb = f.u.row(0).to_vec();
    let mut sol = vec![BigInt::zero(); k + 1];
    for (i, c) in comb.iter().enumerate() {
        for (j, s) in sol.iter_mut().enumerate() {
            *s += c * ker.get(i, j);
        }
    }
    debug_assert!(sol[k].is_one());
    Some(sol[..k].iter().map(|x| -x).collect())
}

/// `{x ∈ amb : x·s = 0 for all s ∈ S}`; always primitive.
pub fn orthogonal_complement(amb: &Arc<Lattice>, s: &Sublattice) -> Result<Sublattice, LatticeError> {
    if !amb.is_nondegenerate() {
        return Err(LatticeError::Degenerate);
    }
    let n = amb.rank();
    if s.rank() == 0 {
        return Ok(Sublattice::full(amb.clone()));
    }
    let m = amb.gram() * &s.basis().transpose();
    let k = kernel_basis(&m)?;
    let k = if k.rows() == 0 { IntMatrix::zeros(0, n) } else { k };
    Ok(Sublattice { ambient: amb.clone(), basis: k })
}

/// Saturation of `S` inside the ambient lattice.
pub fn primitive_closure(amb: &Arc<Lattice>, s: &Sublattice) -> Result<Sublattice, LatticeError> {
    let n = amb.rank();
    if s.rank() == 0 {
        return Ok(Sublattice { ambient: amb.clone(), basis: IntMatrix::zeros(0, n) });
    }
    Ok(Sublattice { ambient: amb.clone(), basis: saturate(s.basis())? })
}

/// A vector of `L ⊗ Q` written as integer numerators over one positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector {
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

impl RationalVector {
    pub fn new(num: Vec<BigInt>, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RationalVector { num, den };
        r.normalize();
        r
    }

    pub fn integral(num: Vec<BigInt>) -> Self {
        RationalVector { num, den: BigInt::one() }
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for x in &mut self.num {
                *x = -&*x;
            }
        }
        let g = self.num.iter().fold(self.den.clone(), |g, x| g.gcd(x));
        if !g.is_one() && !g.is_zero() {
            self.den = &self.den / &g;
            for x in &mut self.num {
                *x = &*x / &g;
            }
        }
    }

    pub fn add(&self, o: &RationalVector) -> RationalVector {
        let den = self.den.lcm(&o.den);
        let a = &den / &self.den;
        let b = &den / &o.den;
        let num = self.num.iter().zip(&o.num).map(|(x, y)| x * &a + y * &b).collect();
        RationalVector::new(num, den)
    }
}

/// An overlattice together with its basis in the coordinates of the original lattice.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    /// Rows are the new basis vectors, each equal to `basis_num[i] / basis_den`.
    pub basis_num: IntMatrix,
    pub basis_den: BigInt,
}

/// Gram matrix of the even overlattice generated by `L` and the glue vectors.
pub fn overlattice(l: &Lattice, glue: &[RationalVector]) -> Result<Lattice, LatticeError> {
    Ok(overlattice_with_basis(l, glue)?.lattice)
}

pub fn overlattice_with_basis(l: &Lattice, glue: &[RationalVector]) -> Result<Overlattice, LatticeError> {
    let n = l.rank();
    let g = l.gram();
    for (i, v) in glue.iter().enumerate() {
        if v.num.len() != n {
            return Err(LatticeError::BadGlue { index: i, reason: "wrong length".into() });
        }
        let vg = g.vec_mul(&v.num);
        if vg.iter().any(|x| !x.is_multiple_of(&v.den)) {
            return Err(LatticeError::BadGlue { index: i, reason: "pairing with the lattice is not integral".into() });
        }
        let q: BigInt = vg.iter().zip(&v.num).map(|(a, b)| a * b).sum();
        let d2 = &v.den * &v.den;
        if !q.is_multiple_of(&(&d2 * 2)) {
            return Err(LatticeError::BadGlue {
                index: i,
                reason: format!("norm {}/{} is not an even integer", q, d2),
            });
        }
        for (j, w) in glue.iter().enumerate().take(i) {
            let b: BigInt = vg.iter().zip(&w.num).map(|(a, b)| a * b).sum();
            if !b.is_multiple_of(&(&v.den * &w.den)) {
                return Err(LatticeError::BadGlue { index: i, reason: format!("pairing with glue vector {j} is not integral") });
            }
        }
    }
    let den = glue.iter().fold(BigInt::one(), |d, v| d.lcm(&v.den));
    let mut gens = IntMatrix::identity(n).scale(&den);
    for v in glue {
        let f = &den / &v.den;
        let row: Vec<BigInt> = v.num.iter().map(|x| x * &f).collect();
        gens = gens.vstack(&IntMatrix::from_rows(&[row], n)?)?;
    }
    let h = hnf(&gens)?;
    let basis_num = h.h.select_rows(&(0..n).collect::<Vec<_>>());
    let raw = g.congruence(&basis_num);
    let d2 = &den * &den;
    let mut gram = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (q, r) = raw.get(i, j).div_rem(&d2);
            if !r.is_zero() {
                return Err(LatticeError::BadGlue { index: 0, reason: "glue group is not integral".into() });
            }
            gram.set(i, j, q);
        }
    }
    Ok(Overlattice { lattice: Lattice { gram }, basis_num, basis_den: den })
}
