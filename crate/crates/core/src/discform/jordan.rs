//! Jordan decompositions: exact splitting inside a finite quadratic form, and
//! `p`-adic splitting of a Gram matrix over `Z_(p)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::form::FiniteQuadraticForm;
use super::primes::{inv_mod, legendre, pow, prime_divisors};
use super::symbol::{GenusSymbol, Oddity, Sign, SymbolComponent};
use super::DiscError;
use crate::lattice::Lattice;

/// One orthogonal Jordan block: a 1-dimensional piece, or for `p = 2` an even
/// 2-dimensional piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Piece {
    pub k: u32,
    pub dim: u32,
    /// Oddity contribution (unit mod 8) for 1-dimensional 2-adic pieces.
    pub oddity: u8,
    pub sign: Sign,
}

fn two_adic_sign(unit_mod8: i128) -> Sign {
    if matches!(unit_mod8.rem_euclid(8), 1 | 7) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Assemble symbol components for prime `p` from Jordan pieces, dropping scale 1.
pub(crate) fn components_from_pieces(p: u64, pieces: &[Piece]) -> Vec<SymbolComponent> {
    let mut ks: Vec<u32> = pieces.iter().map(|x| x.k).filter(|&k| k > 0).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let here: Vec<&Piece> = pieces.iter().filter(|x| x.k == k).collect();
            let rank = here.iter().map(|x| x.dim).sum();
            let sign = here.iter().fold(Sign::Plus, |s, x| s.times(x.sign));
            let oddity = (p == 2).then(|| {
                if here.iter().any(|x| x.dim == 1) {
                    Oddity::TypeI((here.iter().map(|x| x.oddity as u32).sum::<u32>() % 8) as u8)
                } else {
                    Oddity::TypeII
                }
            });
            SymbolComponent { prime: p, exponent: k, rank, sign, oddity }
        })
        .collect()
}

/// Working state for the splitting of a `p`-primary form: basis elements as
/// coordinate vectors over the form's generators, with their orders `p^a`.
struct Splitter<'a> {
    f: &'a FiniteQuadraticForm,
    p: u64,
    den: i128,
    elems: Vec<Vec<i64>>,
    exps: Vec<u32>,
}

impl Splitter<'_> {
    fn reduce(&self, x: &mut [i64]) {
        for (v, &d) in x.iter_mut().zip(self.f.orders()) {
            *v = v.rem_euclid(d as i64);
        }
    }

    /// Exponent `e` such that `b(x, y)` has exact denominator `p^e`.
    fn val(&self, x: &[i64], y: &[i64]) -> u32 {
        let b = self.f.b_num(x, y) as i128;
        if b == 0 {
            return 0;
        }
        let mut red = self.den / b.gcd(&self.den);
        let mut e = 0;
        while red % self.p as i128 == 0 {
            red /= self.p as i128;
            e += 1;
        }
        e
    }

    /// `p^k · b(x, y) mod p^k` as an integer.
    fn b_hat(&self, x: &[i64], y: &[i64], k: u32) -> i128 {
        let pk = pow(self.p, k) as i128;
        let v = self.f.b_num(x, y) as i128 * pk;
        debug_assert!(v % self.den == 0);
        (v / self.den).rem_euclid(pk)
    }

    /// `p^k · q(x) mod 2p^k` as an integer.
    fn q_hat(&self, x: &[i64], k: u32) -> i128 {
        let pk = pow(self.p, k) as i128;
        let v = self.f.q_num(x) as i128 * pk;
        debug_assert!(v % self.den == 0);
        (v / self.den).rem_euclid(2 * pk)
    }

    /// `x ← x - c·y`
    fn axpy(&self, x: &mut [i64], c: i128, y: &[i64]) {
        for (i, (a, b)) in x.iter_mut().zip(y).enumerate() {
            let d = self.f.orders()[i] as i128;
            *a = ((*a as i128 - (c.rem_euclid(d) * *b as i128) % d).rem_euclid(d)) as i64;
        }
    }
}

/// Exact Jordan splitting of a `p`-primary form into 1- and 2-dimensional
/// orthogonal pieces.
pub(crate) fn form_pieces(f: &FiniteQuadraticForm, p: u64) -> Result<Vec<Piece>, DiscError> {
    let n = f.len();
    let mut s = Splitter { f, p, den: f.den() as i128, elems: Vec::new(), exps: Vec::new() };
    for i in 0..n {
        let mut x = vec![0i64; n];
        x[i] = 1;
        let mut d = f.orders()[i];
        let mut a = 0;
        while d.is_multiple_of(p) {
            d /= p;
            a += 1;
        }
        if d != 1 {
            return Err(DiscError::InvalidForm(format!("generator order {} is not a power of {p}", f.orders()[i])));
        }
        s.elems.push(x);
        s.exps.push(a);
    }
    let mut pieces = Vec::new();
    while !s.elems.is_empty() {
        let k = *s.exps.iter().max().unwrap();
        let top: Vec<usize> = (0..s.elems.len()).filter(|&i| s.exps[i] == k).collect();
        let diag = top.iter().copied().find(|&i| s.val(&s.elems[i], &s.elems[i]) == k);
        if let Some(i) = diag {
            let pk = pow(p, k) as i128;
            let e = s.elems[i].clone();
            let bee = s.b_hat(&e, &e, k);
            let inv = inv_mod(bee, pk);
            for j in 0..s.elems.len() {
                if j == i {
                    continue;
                }
                let c = (s.b_hat(&s.elems[j], &e, k) * inv).rem_euclid(pk);
                let mut x = s.elems[j].clone();
                s.axpy(&mut x, c, &e);
                s.reduce(&mut x);
                s.elems[j] = x;
            }
            let piece = if p == 2 {
                let u = s.q_hat(&e, k);
                Piece { k, dim: 1, oddity: u.rem_euclid(8) as u8, sign: two_adic_sign(u) }
            } else {
                Piece { k, dim: 1, oddity: 0, sign: Sign::from_i8(legendre(bee, p)) }
            };
            pieces.push(piece);
            s.elems.remove(i);
            s.exps.remove(i);
            continue;
        }
        let pair = top
            .iter()
            .flat_map(|&i| top.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && s.val(&s.elems[i], &s.elems[j]) == k);
        let Some((i, j)) = pair else {
            return Err(DiscError::Degenerate);
        };
        if p != 2 {
            // e_i + e_j has a unit self-pairing since 2 is invertible
            let ej = s.elems[j].clone();
            let mut x = s.elems[i].clone();
            s.axpy(&mut x, -1, &ej);
            s.reduce(&mut x);
            s.elems[i] = x;
            continue;
        }
        let pk = pow(2, k) as i128;
        let (ei, ej) = (s.elems[i].clone(), s.elems[j].clone());
        let (a, b, c) = (s.b_hat(&ei, &ei, k), s.b_hat(&ei, &ej, k), s.b_hat(&ej, &ej, k));
        let det_inv = inv_mod(a * c - b * b, pk);
        for l in 0..s.elems.len() {
            if l == i || l == j {
                continue;
            }
            let (u, v) = (s.b_hat(&s.elems[l], &ei, k), s.b_hat(&s.elems[l], &ej, k));
            // solve (x, y)·[[a, b], [b, c]] = (u, v)
            let x = ((u * c - v * b) * det_inv).rem_euclid(pk);
            let y = ((v * a - u * b) * det_inv).rem_euclid(pk);
            let mut w = s.elems[l].clone();
            s.axpy(&mut w, x, &ei);
            s.axpy(&mut w, y, &ej);
            s.reduce(&mut w);
            s.elems[l] = w;
        }
        let (qa, qc) = (s.q_hat(&ei, k), s.q_hat(&ej, k));
        let det = qa * qc - b * b;
        pieces.push(Piece { k, dim: 2, oddity: 0, sign: two_adic_sign(det) });
        let (hi, lo) = (i.max(j), i.min(j));
        s.elems.remove(hi);
        s.exps.remove(hi);
        s.elems.remove(lo);
        s.exps.remove(lo);
    }
    Ok(pieces)
}

/// Genus symbol of a finite quadratic form, read off an exact Jordan splitting
/// of each primary part. The result is one representative; use
/// [`super::canonicalize`] before comparing.
pub fn symbol_of_form(f: &FiniteQuadraticForm) -> Result<GenusSymbol, DiscError> {
    let mut comps = Vec::new();
    for p in f.primes() {
        let pieces = form_pieces(&f.p_part(p), p)?;
        comps.extend(components_from_pieces(p, &pieces));
    }
    GenusSymbol::new(comps)
}

fn val_q(x: &BigRational, p: &BigInt) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let mut v = 0i64;
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    while d.is_multiple_of(p) {
        d /= p;
        v -= 1;
    }
    Some(v)
}

/// Residue of a `p`-adic unit in `Z_(p)` modulo `m` (coprime to the denominator).
fn residue(x: &BigRational, m: i128) -> i128 {
    let mb = BigInt::from(m);
    let n = x.numer().mod_floor(&mb).to_i128().unwrap();
    let d = x.denom().mod_floor(&mb).to_i128().unwrap();
    (n * inv_mod(d, m)).rem_euclid(m)
}

/// `p`-adic Jordan splitting of an integral Gram matrix over `Z_(p)`; all
/// arithmetic is exact on rationals whose denominators are prime to `p`.
pub(crate) fn lattice_pieces(g: &[Vec<BigInt>], p: u64) -> Result<Vec<Piece>, DiscError> {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<BigRational>> =
        g.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut pieces = Vec::new();
    while !a.is_empty() {
        let n = a.len();
        let mut vmin: Option<i64> = None;
        for r in &a {
            for x in r {
                if let Some(v) = val_q(x, &pb) {
                    vmin = Some(vmin.map_or(v, |m: i64| m.min(v)));
                }
            }
        }
        let Some(v) = vmin else {
            return Err(DiscError::Degenerate);
        };
        let scale = BigRational::from_integer(pb.pow(v as u32));
        if let Some(i) = (0..n).find(|&i| val_q(&a[i][i], &pb) == Some(v)) {
            let u = &a[i][i] / &scale;
            let piece = if p == 2 {
                let r = residue(&u, 8);
                Piece { k: v as u32, dim: 1, oddity: r as u8, sign: two_adic_sign(r) }
            } else {
                Piece { k: v as u32, dim: 1, oddity: 0, sign: Sign::from_i8(legendre(residue(&u, p as i128), p)) }
            };
            pieces.push(piece);
            let piv = a[i][i].clone();
            let col: Vec<BigRational> = (0..n).map(|j| a[j][i].clone()).collect();
            let mut next = Vec::with_capacity(n - 1);
            for j in (0..n).filter(|&j| j != i) {
                let f = &col[j] / &piv;
                next.push(
                    (0..n).filter(|&l| l != i).map(|l| &a[j][l] - &f * &col[l]).collect::<Vec<_>>(),
                );
            }
            a = next;
            continue;
        }
        let (i, j) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| val_q(&a[i][j], &pb) == Some(v))
            .expect("minimal valuation is attained");
        if p != 2 {
            for l in 0..n {
                let t = a[j][l].clone();
                a[i][l] += t;
            }
            for l in 0..n {
                let t = a[l][j].clone();
                a[l][i] += t;
            }
            continue;
        }
        let (m00, m01, m11) = (a[i][i].clone(), a[i][j].clone(), a[j][j].clone());
        let det = &m00 * &m11 - &m01 * &m01;
        let unit_det = &det / (&scale * &scale);
        pieces.push(Piece { k: v as u32, dim: 2, oddity: 0, sign: two_adic_sign(residue(&unit_det, 8)) });
        let rest: Vec<usize> = (0..n).filter(|&l| l != i && l != j).collect();
        let mut next = Vec::with_capacity(rest.len());
        for &r in &rest {
            // row r minus (a_ri, a_rj)·M⁻¹·(col i, col j)
            let (u, w) = (&a[r][i], &a[r][j]);
            let x = (u * &m11 - w * &m01) / &det;
            let y = (w * &m00 - u * &m01) / &det;
            next.push(rest.iter().map(|&c| &a[r][c] - &x * &a[i][c] - &y * &a[j][c]).collect::<Vec<_>>());
        }
        a = next;
    }
    Ok(pieces)
}

/// Genus symbol (without the unimodular constituent) of an even nondegenerate
/// lattice, from the `p`-adic Jordan decomposition of its Gram matrix.
pub fn genus_symbol(l: &Lattice) -> Result<GenusSymbol, DiscError> {
    if !l.is_even() {
        return Err(DiscError::NotEven);
    }
    let det = l.det();
    if det.is_zero() {
        return Err(DiscError::Degenerate);
    }
    let rows = l.gram().row_vecs();
    let mut comps = Vec::new();
    if !det.abs().is_one() {
        for p in prime_divisors(&det) {
            comps.extend(components_from_pieces(p, &lattice_pieces(&rows, p)?));
        }
    }
    GenusSymbol::new(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discform::{canonicalize, discriminant_form};

    #[test]
    fn lattice_symbols() {
        assert_eq!(genus_symbol(&Lattice::diagonal(&[-2])).unwrap().to_string(), "2_7^+1");
        assert_eq!(genus_symbol(&Lattice::diagonal(&[-6])).unwrap().to_string(), "2_5^-1,3^+1");
        let e8m2 = crate::data::load_ade("E8").unwrap().rescale(2).unwrap();
        assert_eq!(genus_symbol(&e8m2).unwrap().to_string(), "2_II^+8");
        assert!(genus_symbol(&crate::data::load_ade("E8").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn form_route_agrees_after_canonicalization() {
        for g in [
            Lattice::diagonal(&[-2]),
            Lattice::diagonal(&[-6]),
            Lattice::diagonal(&[-2, -2]),
            Lattice::from_i64(&[vec![-4, 2], vec![2, -4]]),
            Lattice::from_i64(&[vec![0, 3], vec![3, 0]]),
            Lattice::from_i64(&[vec![-8, 4, 0], vec![4, -8, 4], vec![0, 4, -12]]),
        ] {
            let a = canonicalize(&genus_symbol(&g).unwrap()).unwrap();
            let b = canonicalize(&symbol_of_form(&discriminant_form(&g).unwrap()).unwrap()).unwrap();
            assert_eq!(a, b, "{g:?}");
        }
    }
}
