use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use super::primes::{factor_u128, lcm_u64};
use super::DiscError;
use crate::intlinalg::snf;
use crate::lattice::Lattice;

/// A finite quadratic form `q: A → Q/2Z` on `A = ⊕ Z/d_i`, stored through its
/// values on the cyclic generators.
///
/// Values are kept as integer numerators over the common denominator
/// `den = lcm(d_i)`: `q(g_i) = q_i/den mod 2` and `b(g_i, g_j) = b_ij/den mod 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteQuadraticForm {
    orders: Vec<u64>,
    den: u64,
    q: Vec<i64>,
    b: Vec<Vec<i64>>,
}

impl fmt::Debug for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FQF{{orders {:?}, q [", self.orders)?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.q_value(i))?;
        }
        write!(f, "]}}")
    }
}

impl FiniteQuadraticForm {
    /// The form on the trivial group.
    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: Vec::new(), den: 1, q: Vec::new(), b: Vec::new() }
    }

    /// Build a form from generator orders, `q`-values and the full symmetric
    /// matrix of `b`-values (its diagonal must agree with `q` modulo 1).
    pub fn new(
        orders: Vec<u64>,
        q: Vec<Ratio<i64>>,
        b: Vec<Vec<Ratio<i64>>>,
    ) -> Result<Self, DiscError> {
        let n = orders.len();
        if q.len() != n || b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(DiscError::InvalidForm("dimension mismatch".into()));
        }
        if orders.iter().any(|&d| d < 2) {
            return Err(DiscError::InvalidForm("generator orders must exceed 1".into()));
        }
        let den = orders.iter().fold(1, |l, &d| lcm_u64(l, d));
        let scale = |r: &Ratio<i64>, what: &str| -> Result<i64, DiscError> {
            let v = r * Ratio::from_integer(den as i64);
            if !v.is_integer() {
                return Err(DiscError::InvalidForm(format!("{what} value {r} has a denominator not dividing {den}")));
            }
            Ok(v.to_integer())
        };
        let mut qn = Vec::with_capacity(n);
        for (i, r) in q.iter().enumerate() {
            let d = orders[i] as i64;
            if !(r * Ratio::from_integer(d)).is_integer() {
                return Err(DiscError::InvalidForm(format!("q(g_{i}) = {r} not in (1/{d})Z")));
            }
            if !(r * Ratio::from_integer(d * d) / Ratio::from_integer(2)).is_integer() {
                return Err(DiscError::InvalidForm(format!("q vanishes on {d}·g_{i} only mod 2: {r}")));
            }
            qn.push(scale(r, "q")?.rem_euclid(2 * den as i64));
        }
        let mut bn = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if b[i][j] != b[j][i] {
                    return Err(DiscError::InvalidForm("b is not symmetric".into()));
                }
                let v = &b[i][j];
                let (di, dj) = (orders[i] as i64, orders[j] as i64);
                if !(v * Ratio::from_integer(di)).is_integer() || !(v * Ratio::from_integer(dj)).is_integer() {
                    return Err(DiscError::InvalidForm(format!("b(g_{i}, g_{j}) = {v} incompatible with orders")));
                }
                bn[i][j] = scale(v, "b")?.rem_euclid(den as i64);
            }
            if bn[i][i] != qn[i].rem_euclid(den as i64) {
                return Err(DiscError::InvalidForm(format!("b(g_{i}, g_{i}) differs from q(g_{i}) mod 1")));
            }
        }
        Ok(FiniteQuadraticForm { orders, den, q: qn, b: bn })
    }

    /// Internal constructor from numerators over `den`; normalizes residues.
    pub(crate) fn from_numerators(orders: Vec<u64>, den: u64, q: Vec<i64>, b: Vec<Vec<i64>>) -> Self {
        let d = den as i64;
        let q = q.into_iter().map(|x| x.rem_euclid(2 * d)).collect();
        let b = b.into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(d)).collect()).collect();
        FiniteQuadraticForm { orders, den, q, b }
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub(crate) fn den(&self) -> u64 {
        self.den
    }

    /// Group order `|A|`.
    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&d| d as u128).product()
    }

    /// Exponent of the group.
    pub fn exponent(&self) -> u64 {
        self.den
    }

    /// `q(g_i)` in `[0, 2)`.
    pub fn q_value(&self, i: usize) -> Ratio<i64> {
        Ratio::new(self.q[i], self.den as i64)
    }

    /// `b(g_i, g_j)` in `[0, 1)`.
    pub fn b_value(&self, i: usize, j: usize) -> Ratio<i64> {
        Ratio::new(self.b[i][j], self.den as i64)
    }

    /// Numerator of `q(x)` over `den`, reduced into `[0, 2·den)`.
    pub(crate) fn q_num(&self, x: &[i64]) -> i64 {
        let m = 2 * self.den as i128;
        let n = self.len();
        let mut acc: i128 = 0;
        for i in 0..n {
            let xi = x[i] as i128;
            if xi == 0 {
                continue;
            }
            acc = (acc + (xi * xi % m) * self.q[i] as i128) % m;
            for j in i + 1..n {
                let xj = x[j] as i128;
                if xj != 0 {
                    acc = (acc + 2 * ((xi * xj % m) * self.b[i][j] as i128 % m)) % m;
                }
            }
        }
        acc.rem_euclid(m) as i64
    }

    /// Numerator of `b(x, y)` over `den`, reduced into `[0, den)`.
    pub(crate) fn b_num(&self, x: &[i64], y: &[i64]) -> i64 {
        let m = self.den as i128;
        let mut acc: i128 = 0;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    acc = (acc + (xi as i128 * yj as i128 % m) * self.b[i][j] as i128) % m;
                }
            }
        }
        acc.rem_euclid(m) as i64
    }

    /// `q(Σ x_i g_i)` in `[0, 2)`.
    pub fn q_of(&self, x: &[i64]) -> Ratio<i64> {
        Ratio::new(self.q_num(x), self.den as i64)
    }

    /// `b(Σ x_i g_i, Σ y_i g_i)` in `[0, 1)`.
    pub fn b_of(&self, x: &[i64], y: &[i64]) -> Ratio<i64> {
        Ratio::new(self.b_num(x, y), self.den as i64)
    }

    /// Additive order of the element with coordinates `x`.
    pub fn element_order(&self, x: &[i64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .fold(1, |l, (&xi, &d)| lcm_u64(l, d / (xi.rem_euclid(d as i64) as u64).gcd(&d)))
    }

    /// All elements in mixed-radix order.
    pub fn elements(&self) -> Elements<'_> {
        Elements { orders: &self.orders, cur: Some(vec![0; self.len()]) }
    }

    /// The form `-q`.
    pub fn negate(&self) -> Self {
        Self::from_numerators(
            self.orders.clone(),
            self.den,
            self.q.iter().map(|x| -x).collect(),
            self.b.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
        )
    }

    /// Orthogonal direct sum.
    pub fn sum(&self, other: &Self) -> Self {
        let den = lcm_u64(self.den, other.den);
        let (f1, f2) = ((den / self.den) as i64, (den / other.den) as i64);
        let n1 = self.len();
        let n = n1 + other.len();
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let mut q: Vec<i64> = self.q.iter().map(|x| x * f1).collect();
        q.extend(other.q.iter().map(|x| x * f2));
        let mut b = vec![vec![0i64; n]; n];
        for i in 0..n1 {
            for j in 0..n1 {
                b[i][j] = self.b[i][j] * f1;
            }
        }
        for i in 0..other.len() {
            for j in 0..other.len() {
                b[n1 + i][n1 + j] = other.b[i][j] * f2;
            }
        }
        Self::from_numerators(orders, den, q, b)
    }

    /// Primes dividing `|A|`.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .orders
            .iter()
            .flat_map(|&d| factor_u128(d as u128).into_iter().map(|(p, _)| p as u64))
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// The `p`-primary part, on the generators `(d_i / p^{a_i})·g_i`.
    pub fn p_part(&self, p: u64) -> Self {
        let mut gens: Vec<(Vec<i64>, u64)> = Vec::new();
        for (i, &d) in self.orders.iter().enumerate() {
            let mut pa = 1;
            while (d / pa) % p == 0 {
                pa *= p;
            }
            if pa > 1 {
                let mut x = vec![0; self.len()];
                x[i] = (d / pa) as i64;
                gens.push((x, pa));
            }
        }
        self.restrict(&gens)
    }

    /// The form restricted to the subgroup generated by independent elements
    /// `(x_i, order_i)` whose cyclic subgroups form a direct sum.
    pub(crate) fn restrict(&self, gens: &[(Vec<i64>, u64)]) -> Self {
        let orders: Vec<u64> = gens.iter().map(|g| g.1).collect();
        let den = orders.iter().fold(1, |l, &d| lcm_u64(l, d));
        // values have denominators dividing `den`; rescale from self.den
        let rescale_q = |num: i64| -> i64 {
            let v = num as i128 * den as i128;
            assert!(v % self.den as i128 == 0, "restricted value outside (1/den)Z");
            (v / self.den as i128) as i64
        };
        let q = gens.iter().map(|(x, _)| rescale_q(self.q_num(x))).collect();
        let b = gens
            .iter()
            .map(|(x, _)| gens.iter().map(|(y, _)| rescale_q(self.b_num(x, y))).collect())
            .collect();
        Self::from_numerators(orders, den, q, b)
    }

    /// True when `b` has trivial radical.
    pub fn is_nondegenerate(&self) -> bool {
        self.primes().into_iter().all(|p| super::jordan::form_pieces(&self.p_part(p), p).is_ok())
    }
}

/// Iterator over all group elements of a form.
pub struct Elements<'a> {
    orders: &'a [u64],
    cur: Option<Vec<i64>>,
}

impl Iterator for Elements<'_> {
    type Item = Vec<i64>;
    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.cur.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == next.len() {
                self.cur = None;
                break;
            }
            next[i] += 1;
            if next[i] < self.orders[i] as i64 {
                self.cur = Some(next);
                break;
            }
            next[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// The discriminant form `L*/L` of an even nondegenerate lattice, on the
/// generators `U_i/d_i` read off the Smith form `U·G·V = D`.
pub fn discriminant_form(l: &Lattice) -> Result<FiniteQuadraticForm, DiscError> {
    discriminant_form_with_generators(l).map(|(f, _)| f)
}

/// The discriminant form together with its generators as rows `U_i` (the
/// generator is `U_i / d_i` in lattice coordinates).
pub fn discriminant_form_with_generators(
    l: &Lattice,
) -> Result<(FiniteQuadraticForm, Vec<(Vec<BigInt>, u64)>), DiscError> {
    if !l.is_even() {
        return Err(DiscError::NotEven);
    }
    if !l.is_nondegenerate() {
        return Err(DiscError::Degenerate);
    }
    let g = l.gram();
    let s = snf(g)?;
    let mut gens = Vec::new();
    for (i, d) in s.diagonal().iter().enumerate() {
        if d > &BigInt::from(1) {
            let d = d.to_u64().ok_or(DiscError::TooLarge)?;
            gens.push((s.u.row(i).to_vec(), d));
        }
    }
    let orders: Vec<u64> = gens.iter().map(|x| x.1).collect();
    let den = orders.iter().fold(1, |l, &d| lcm_u64(l, d));
    let den_b = BigInt::from(den);
    let value = |x: &[BigInt], dx: u64, y: &[BigInt], dy: u64, modulus: &BigInt| -> Result<i64, DiscError> {
        let raw = g.bilinear(x, y) * &den_b;
        let dd = BigInt::from(dx) * BigInt::from(dy);
        let (qt, r) = raw.div_rem(&dd);
        if !r.is_zero() {
            return Err(DiscError::NotEven);
        }
        Ok(qt.mod_floor(modulus).to_i64().expect("reduced residue fits"))
    };
    let two_den = &den_b * 2;
    let mut q = Vec::new();
    let mut b = vec![vec![0i64; gens.len()]; gens.len()];
    for (i, (x, dx)) in gens.iter().enumerate() {
        q.push(value(x, *dx, x, *dx, &two_den)?);
        for (j, (y, dy)) in gens.iter().enumerate() {
            b[i][j] = value(x, *dx, y, *dy, &den_b)?;
        }
    }
    Ok((FiniteQuadraticForm::from_numerators(orders, den, q, b), gens))
}

/// Brute-force isometry test between two nondegenerate forms of order at most `bound`.
pub fn fqf_isomorphic_bounded(
    f1: &FiniteQuadraticForm,
    f2: &FiniteQuadraticForm,
    bound: u128,
) -> Result<bool, DiscError> {
    let (n1, n2) = (f1.order(), f2.order());
    if n1 > bound || n2 > bound {
        return Err(DiscError::OrderBound { order: n1.max(n2), bound });
    }
    if n1 != n2 {
        return Ok(false);
    }
    let elems: Vec<Vec<i64>> = f2.elements().collect();
    let orders2: Vec<u64> = elems.iter().map(|x| f2.element_order(x)).collect();
    let q2: Vec<Ratio<i64>> = elems.iter().map(|x| f2.q_of(x)).collect();
    // candidate images per generator of f1
    let mut cands: Vec<Vec<usize>> = Vec::new();
    for i in 0..f1.len() {
        let d = f1.orders[i];
        let qi = f1.q_value(i);
        cands.push((0..elems.len()).filter(|&k| orders2[k] == d && q2[k] == qi).collect());
    }
    let mut chosen: Vec<usize> = Vec::new();
    Ok(extend(f1, f2, &elems, &cands, &mut chosen))
}

/// Brute-force isometry test with the default bound of 64 elements.
pub fn fqf_isomorphic(f1: &FiniteQuadraticForm, f2: &FiniteQuadraticForm) -> Result<bool, DiscError> {
    fqf_isomorphic_bounded(f1, f2, 64)
}

fn extend(
    f1: &FiniteQuadraticForm,
    f2: &FiniteQuadraticForm,
    elems: &[Vec<i64>],
    cands: &[Vec<usize>],
    chosen: &mut Vec<usize>,
) -> bool {
    let i = chosen.len();
    if i == f1.len() {
        return true;
    }
    let mut unit_i = vec![0i64; f1.len()];
    unit_i[i] = 1;
    for &c in &cands[i] {
        let ok = chosen.iter().enumerate().all(|(j, &cj)| {
            let mut unit_j = vec![0i64; f1.len()];
            unit_j[j] = 1;
            f1.b_of(&unit_i, &unit_j) == f2.b_of(&elems[c], &elems[cj])
        });
        if ok {
            chosen.push(c);
            if extend(f1, f2, elems, cands, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_examples() {
        let e8 = crate::data::load_ade("E8").unwrap();
        assert!(discriminant_form(&e8).unwrap().is_empty());
        let f = discriminant_form(&Lattice::diagonal(&[-2])).unwrap();
        assert_eq!(f.orders(), &[2]);
        assert_eq!(f.q_value(0), Ratio::new(3, 2));
        let a2 = Lattice::from_i64(&[vec![-2, 1], vec![1, -2]]);
        let f = discriminant_form(&a2).unwrap();
        assert_eq!(f.orders(), &[3]);
        assert_eq!(f.q_value(0), Ratio::new(4, 3));
    }

    #[test]
    fn isomorphism_oracle_examples() {
        let m2 = discriminant_form(&Lattice::diagonal(&[-2])).unwrap();
        let p2 = discriminant_form(&Lattice::diagonal(&[2])).unwrap();
        assert!(fqf_isomorphic(&m2, &m2).unwrap());
        assert!(!fqf_isomorphic(&m2, &p2).unwrap());
        assert_eq!(m2.negate(), p2);
        assert!(!fqf_isomorphic(&m2.sum(&m2), &m2.sum(&p2)).unwrap());
        assert_eq!(FiniteQuadraticForm::trivial().sum(&m2), m2);
    }

    #[test]
    fn polarization_identity() {
        let l = Lattice::from_i64(&[vec![-4, 1, 0], vec![1, -6, 2], vec![0, 2, -8]]);
        let f = discriminant_form(&l).unwrap();
        let two = Ratio::from_integer(2);
        let elems: Vec<_> = f.elements().collect();
        for x in &elems {
            for y in &elems {
                let s: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                let lhs = (f.q_of(&s) - f.q_of(x) - f.q_of(y)) / two;
                let d = lhs - f.b_of(x, y);
                assert!(d.is_integer(), "2b(x,y) != q(x+y)-q(x)-q(y) at {x:?}, {y:?}");
            }
        }
    }
}
