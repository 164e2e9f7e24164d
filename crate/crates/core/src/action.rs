//! Finite groups acting on lattices through integral isometries. A
//! generator `g` sends the row vector `v` to `v·g` in ambient coordinates.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::intlinalg::{kernel_basis, snf, IntMatrix, LinalgError};
use crate::lattice::{orthogonal_complement, rational_inverse, solve_in_span, Lattice, LatticeError, Sublattice};
use crate::roots::{enumerate_roots, lll, short_vectors, RootError, Target, ENUMERATION_CAP};

/// Default bound on orbit and group sizes.
pub const CLOSURE_BOUND: usize = 1_000_000;
/// Default rank bound for [`is_closure_saturated`].
pub const CLOSURE_RANK_BOUND: usize = 8;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("generator {index} is not a {n}x{n} matrix")]
    Shape { index: usize, n: usize },
    #[error("generator {index} does not preserve the Gram matrix")]
    NotIsometry { index: usize },
    #[error("generator {index} is not invertible over the integers")]
    NotUnimodular { index: usize },
    #[error("vector has length {got}, expected {n}")]
    VectorLength { got: usize, n: usize },
    #[error("sublattice is not invariant under generator {index}")]
    NotInvariant { index: usize },
    #[error("closure exceeded {0} elements; the group is infinite or too large")]
    ClosureBound(usize),
    #[error("undecided at this scale: {0}")]
    Undecided(String),
}

/// A group given by generators acting on an ambient lattice.
#[derive(Debug, Clone)]
pub struct GroupAction {
    ambient: Arc<Lattice>,
    generators: Vec<IntMatrix>,
}

impl GroupAction {
    pub fn new(ambient: Arc<Lattice>, generators: Vec<IntMatrix>) -> Result<Self, ActionError> {
        let n = ambient.rank();
        for (index, g) in generators.iter().enumerate() {
            if g.rows() != n || g.cols() != n {
                return Err(ActionError::Shape { index, n });
            }
            if !g.det()?.abs().is_one() {
                return Err(ActionError::NotUnimodular { index });
            }
            if &ambient.gram().congruence(g) != ambient.gram() {
                return Err(ActionError::NotIsometry { index });
            }
        }
        Ok(GroupAction { ambient, generators })
    }

    /// The trivial group.
    pub fn trivial(ambient: Arc<Lattice>) -> Self {
        GroupAction { ambient, generators: Vec::new() }
    }

    pub fn ambient(&self) -> &Arc<Lattice> {
        &self.ambient
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    pub fn apply(&self, g: usize, v: &[BigInt]) -> Vec<BigInt> {
        self.generators[g].vec_mul(v)
    }

    /// All group elements, by closure under right multiplication with the
    /// generators; fails beyond `bound` elements.
    pub fn elements(&self, bound: usize) -> Result<Vec<IntMatrix>, ActionError> {
        let id = IntMatrix::identity(self.ambient.rank());
        let mut seen: HashSet<IntMatrix> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        let mut out = Vec::new();
        while let Some(m) = queue.pop_front() {
            for g in &self.generators {
                let p = &m * g;
                if !seen.contains(&p) {
                    if seen.len() >= bound {
                        return Err(ActionError::ClosureBound(bound));
                    }
                    seen.insert(p.clone());
                    queue.push_back(p);
                }
            }
            out.push(m);
        }
        out.sort();
        Ok(out)
    }

    pub fn order(&self, bound: usize) -> Result<usize, ActionError> {
        Ok(self.elements(bound)?.len())
    }

    /// Matrices of the generators on an invariant sublattice, in its basis.
    pub fn restrict(&self, s: &Sublattice) -> Result<Vec<IntMatrix>, ActionError> {
        let b = s.basis();
        let k = s.rank();
        let mut out = Vec::with_capacity(self.generators.len());
        for (index, g) in self.generators.iter().enumerate() {
            let mut m = IntMatrix::zeros(k, k);
            for i in 0..k {
                let img = g.vec_mul(b.row(i));
                let c = solve_in_span(b, &img).ok_or(ActionError::NotInvariant { index })?;
                for (j, x) in c.into_iter().enumerate() {
                    m.set(i, j, x);
                }
            }
            out.push(m);
        }
        Ok(out)
    }

    /// The same group acting on an invariant sublattice.
    pub fn restricted_action(&self, s: &Sublattice) -> Result<GroupAction, ActionError> {
        let gens = self.restrict(s)?;
        Ok(GroupAction { ambient: Arc::new(s.lattice()), generators: gens })
    }
}

/// `M^G`: vectors fixed by every generator.
pub fn invariant_lattice(act: &GroupAction) -> Result<Sublattice, ActionError> {
    let n = act.ambient.rank();
    if act.generators.is_empty() {
        return Ok(Sublattice::full(act.ambient.clone()));
    }
    let id = IntMatrix::identity(n);
    let mut stacked = IntMatrix::zeros(n, 0);
    for g in &act.generators {
        stacked = stacked.hstack(&(g - &id))?;
    }
    let k = kernel_basis(&stacked)?;
    Ok(Sublattice::new(act.ambient.clone(), k)?)
}

/// `M_G = (M^G)^⊥`.
pub fn coinvariant_lattice(act: &GroupAction) -> Result<Sublattice, ActionError> {
    let inv = invariant_lattice(act)?;
    Ok(orthogonal_complement(&act.ambient, &inv)?)
}

/// Orbit of `v` under the group, sorted.
pub fn orbit(act: &GroupAction, v: &[BigInt]) -> Result<Vec<Vec<BigInt>>, ActionError> {
    orbit_bounded(act, v, CLOSURE_BOUND)
}

pub fn orbit_bounded(act: &GroupAction, v: &[BigInt], bound: usize) -> Result<Vec<Vec<BigInt>>, ActionError> {
    let n = act.ambient.rank();
    if v.len() != n {
        return Err(ActionError::VectorLength { got: v.len(), n });
    }
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::from([v.to_vec()]);
    let mut queue = VecDeque::from([v.to_vec()]);
    while let Some(x) = queue.pop_front() {
        for g in &act.generators {
            let y = g.vec_mul(&x);
            if !seen.contains(&y) {
                if seen.len() >= bound {
                    return Err(ActionError::ClosureBound(bound));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn discriminant_trivial(gram: &IntMatrix, mats: &[IntMatrix]) -> Result<bool, ActionError> {
    if gram.rows() == 0 {
        return Ok(true);
    }
    let (inv, den) = rational_inverse(gram).ok_or(LatticeError::Degenerate)?;
    let id = IntMatrix::identity(gram.rows());
    for m in mats {
        let p = &inv * &(m - &id);
        if p.entries().iter().any(|x| !x.is_multiple_of(&den)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every generator induces the identity on `S*/S` for an invariant
/// nondegenerate sublattice `S`.
pub fn acts_trivially_on_discriminant(act: &GroupAction, s: &Sublattice) -> Result<bool, ActionError> {
    let mats = act.restrict(s)?;
    discriminant_trivial(&s.gram(), &mats)
}

/// The four conditions on the coinvariant lattice `S_G`: negative definite,
/// root free, trivial action on `A_{S_G}`, and `(S_G)^G = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeechTypeReport {
    pub negative_definite: bool,
    pub root_free: bool,
    pub trivial_on_discriminant: bool,
    pub no_fixed_vectors: bool,
}

impl LeechTypeReport {
    pub fn holds(&self) -> bool {
        self.negative_definite && self.root_free && self.trivial_on_discriminant && self.no_fixed_vectors
    }
}

pub fn leech_type_report(act: &GroupAction) -> Result<LeechTypeReport, ActionError> {
    let s = coinvariant_lattice(act)?;
    let l = s.lattice();
    let negative_definite = l.rank() == 0 || l.is_negative_definite();
    let root_free = negative_definite && (l.rank() == 0 || enumerate_roots(&l)?.is_empty());
    let trivial_on_discriminant = l.is_nondegenerate() && acts_trivially_on_discriminant(act, &s)?;
    let restricted = act.restricted_action(&s)?;
    let no_fixed_vectors = invariant_lattice(&restricted)?.rank() == 0;
    Ok(LeechTypeReport { negative_definite, root_free, trivial_on_discriminant, no_fixed_vectors })
}

pub fn is_leech_type(act: &GroupAction) -> Result<bool, ActionError> {
    Ok(leech_type_report(act)?.holds())
}

/// Whether the group restricted to `S_G` is the whole group of isometries of
/// `S_G` acting trivially on its discriminant group.
pub fn is_closure_saturated(act: &GroupAction) -> Result<bool, ActionError> {
    is_closure_saturated_bounded(act, CLOSURE_RANK_BOUND, 5_000_000)
}

pub fn is_closure_saturated_bounded(act: &GroupAction, rank_bound: usize, node_budget: usize) -> Result<bool, ActionError> {
    let s = coinvariant_lattice(act)?;
    let k = s.rank();
    if k == 0 {
        return Ok(true);
    }
    if k > rank_bound {
        return Err(ActionError::Undecided(format!("coinvariant rank {k} exceeds the bound {rank_bound}")));
    }
    let gram = s.gram();
    let l = Lattice::new(gram.clone())?;
    if !l.is_negative_definite() {
        return Err(ActionError::Undecided("coinvariant lattice is not definite".into()));
    }
    let mats = act.restrict(&s)?;
    if !discriminant_trivial(&gram, &mats)? {
        return Ok(false);
    }
    let restricted = GroupAction { ambient: Arc::new(l), generators: mats };
    let group_order = restricted.order(CLOSURE_BOUND)?;
    match count_trivial_isometries(&(-&gram), group_order, node_budget)? {
        Some(count) => Ok(count == group_order),
        None => Ok(false),
    }
}

/// Count isometries of the positive definite `a` acting trivially on the
/// discriminant group. Returns `None` as soon as more than `stop_above` are
/// found.
fn count_trivial_isometries(a: &IntMatrix, stop_above: usize, node_budget: usize) -> Result<Option<usize>, ActionError> {
    let n = a.rows();
    let too_big = || ActionError::Undecided("entries too large".into());
    let rows: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or_else(too_big)?;
    let (_, r) = lll(&rows).ok_or_else(too_big)?;
    let rm = IntMatrix::from_rows(&r, n)?;
    // candidate images of each reduced basis vector, both signs
    let mut cands: Vec<Vec<Vec<i128>>> = Vec::with_capacity(n);
    for i in 0..n {
        let norm = r[i][i].to_i64().ok_or_else(too_big)?;
        let half = short_vectors(&rm, Target::Exactly(norm), ENUMERATION_CAP)?;
        let mut c: Vec<Vec<i128>> = Vec::with_capacity(2 * half.len());
        for v in half {
            let v: Vec<i128> = v.into_iter().map(i128::from).collect();
            c.push(v.iter().map(|x| -x).collect());
            c.push(v);
        }
        cands.push(c);
    }
    // Row i of U·(M − I) must vanish mod d_i, where U·R·V = D is a Smith form.
    let f = snf(&rm)?;
    let d = f.diagonal();
    let mut checks: Vec<(usize, i128, Vec<i128>)> = Vec::new();
    for i in 0..n {
        let di = d[i].to_i128().ok_or_else(too_big)?;
        if di > 1 {
            let u: Vec<i128> = f.u.row(i).iter().map(|x| x.to_i128().ok_or_else(too_big)).collect::<Result<_, _>>()?;
            let last = u.iter().rposition(|x| *x != 0).unwrap_or(0);
            checks.push((last, di, u));
        }
    }
    let mut images: Vec<Vec<i128>> = Vec::with_capacity(n);
    let mut count = 0usize;
    let mut nodes = 0usize;
    let pair = |x: &[i128], y: &[i128]| -> i128 {
        let mut s = 0;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += x[i] * r[i][j] * y[j];
            }
        }
        s
    };
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        level: usize,
        n: usize,
        r: &[Vec<i128>],
        cands: &[Vec<Vec<i128>>],
        checks: &[(usize, i128, Vec<i128>)],
        images: &mut Vec<Vec<i128>>,
        count: &mut usize,
        nodes: &mut usize,
        budget: usize,
        stop_above: usize,
        pair: &dyn Fn(&[i128], &[i128]) -> i128,
    ) -> Result<bool, ActionError> {
        if level == n {
            *count += 1;
            return Ok(*count <= stop_above);
        }
        for y in &cands[level] {
            *nodes += 1;
            if *nodes > budget {
                return Err(ActionError::Undecided(format!("isometry search exceeded {budget} nodes")));
            }
            if (0..level).any(|j| pair(&images[j], y) != r[j][level]) {
                continue;
            }
            images.push(y.clone());
            let ok = checks.iter().filter(|c| c.0 == level).all(|(_, di, u)| {
                (0..n).all(|col| {
                    let mut s = 0i128;
                    for k in 0..=level {
                        s += u[k] * (images[k][col] - i128::from(k == col));
                    }
                    s.rem_euclid(*di) == 0
                })
            });
            if ok && !recurse(level + 1, n, r, cands, checks, images, count, nodes, budget, stop_above, pair)? {
                images.pop();
                return Ok(false);
            }
            images.pop();
        }
        Ok(true)
    }
    let within = recurse(0, n, &r, &cands, &checks, &mut images, &mut count, &mut nodes, node_budget, stop_above, &pair)?;
    Ok(within.then_some(count))
}

/// Convert generators given on simple-root coordinates of a Niemeier lattice
/// (acting on root-lattice coordinate rows) to its constructed basis.
pub fn generators_from_root_coordinates(
    n: &crate::niemeier::Niemeier,
    gens: &[IntMatrix],
) -> Result<Vec<IntMatrix>, ActionError> {
    let k = n.basis_num.rows();
    let mut out = Vec::with_capacity(gens.len());
    for (index, g) in gens.iter().enumerate() {
        if g.rows() != k || g.cols() != k {
            return Err(ActionError::Shape { index, n: k });
        }
        let mut m = IntMatrix::zeros(k, k);
        for i in 0..k {
            let img = g.vec_mul(n.basis_num.row(i));
            let c = solve_in_span(&n.basis_num, &img).ok_or(ActionError::NotInvariant { index })?;
            for (j, x) in c.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// Block matrix on root coordinates sending component `i` to component
/// `perm[i]` through the given square block.
pub fn component_permutation_matrix(
    ranks: &[usize],
    perm: &[usize],
    blocks: &[IntMatrix],
) -> Result<IntMatrix, ActionError> {
    let total: usize = ranks.iter().sum();
    let offsets: Vec<usize> = ranks.iter().scan(0, |acc, &r| {
        let o = *acc;
        *acc += r;
        Some(o)
    })
    .collect();
    let mut m = IntMatrix::zeros(total, total);
    if perm.len() != ranks.len() || blocks.len() != ranks.len() {
        return Err(ActionError::Shape { index: 0, n: total });
    }
    for (i, (&p, b)) in perm.iter().zip(blocks).enumerate() {
        if p >= ranks.len() || ranks[p] != ranks[i] || b.rows() != ranks[i] || b.cols() != ranks[i] {
            return Err(ActionError::Shape { index: i, n: ranks[i] });
        }
        for x in 0..ranks[i] {
            for y in 0..ranks[i] {
                m.set(offsets[i] + x, offsets[p] + y, b.get(x, y).clone());
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn swap_action() -> GroupAction {
        let amb = Arc::new(Lattice::diagonal(&[-2, -2]));
        GroupAction::new(amb, vec![IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]])]).unwrap()
    }

    #[test]
    fn invariant_and_coinvariant() {
        let act = swap_action();
        let inv = invariant_lattice(&act).unwrap();
        let co = coinvariant_lattice(&act).unwrap();
        assert_eq!(inv.gram(), IntMatrix::from_i64(&[vec![-4]]));
        assert_eq!(co.gram(), IntMatrix::from_i64(&[vec![-4]]));
        assert_eq!(co.basis().row(0)[0].abs(), BigInt::one());

        let amb = Arc::new(Lattice::diagonal(&[-2, -2]));
        let t = GroupAction::trivial(amb.clone());
        assert_eq!(invariant_lattice(&t).unwrap().rank(), 2);
        assert_eq!(coinvariant_lattice(&t).unwrap().rank(), 0);

        let flip = GroupAction::new(amb, vec![IntMatrix::from_i64(&[vec![-1, 0], vec![0, 1]])]).unwrap();
        assert_eq!(invariant_lattice(&flip).unwrap().basis(), &IntMatrix::from_i64(&[vec![0, 1]]));
        assert_eq!(coinvariant_lattice(&flip).unwrap().basis(), &IntMatrix::from_i64(&[vec![1, 0]]));
    }

    #[test]
    fn orbits() {
        let act = swap_action();
        assert_eq!(orbit(&act, &bi(&[1, 0])).unwrap(), vec![bi(&[0, 1]), bi(&[1, 0])]);
        let amb = Arc::new(Lattice::diagonal(&[-2, -2, -2]));
        let cyc = IntMatrix::from_i64(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        let act = GroupAction::new(amb.clone(), vec![cyc]).unwrap();
        assert_eq!(orbit(&act, &bi(&[1, 0, 0])).unwrap().len(), 3);
        assert_eq!(act.order(100).unwrap(), 3);
        let t = GroupAction::trivial(amb);
        assert_eq!(orbit(&t, &bi(&[1, 2, 3])).unwrap(), vec![bi(&[1, 2, 3])]);
    }

    #[test]
    fn rejects_non_isometries() {
        let amb = Arc::new(Lattice::diagonal(&[-2, -4]));
        let err = GroupAction::new(amb, vec![IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]])]).unwrap_err();
        assert_eq!(err, ActionError::NotIsometry { index: 0 });
    }

    #[test]
    fn leech_type_and_closure() {
        let act = swap_action();
        let co = coinvariant_lattice(&act).unwrap();
        assert!(!acts_trivially_on_discriminant(&act, &co).unwrap());
        assert!(!is_leech_type(&act).unwrap());
        assert!(!is_closure_saturated(&act).unwrap());

        let amb = Arc::new(Lattice::diagonal(&[-2, -2]));
        let t = GroupAction::trivial(amb);
        assert!(is_leech_type(&t).unwrap());
        assert!(is_closure_saturated(&t).unwrap());

        let amb = Arc::new(Lattice::diagonal(&[-4]));
        let neg = GroupAction::new(amb, vec![IntMatrix::from_i64(&[vec![-1]])]).unwrap();
        assert!(!is_closure_saturated(&neg).unwrap());
        // −1 on ⟨−2⟩ is trivial on Z/2, but ⟨−2⟩ has a root
        let amb = Arc::new(Lattice::diagonal(&[-2]));
        let neg = GroupAction::new(amb, vec![IntMatrix::from_i64(&[vec![-1]])]).unwrap();
        let rep = leech_type_report(&neg).unwrap();
        assert!(rep.trivial_on_discriminant && !rep.root_free && !rep.holds());
        assert!(is_closure_saturated(&neg).unwrap());
    }

    #[test]
    fn closure_on_e8_twice() {
        // −1 on E8(2): O(E8(2)) trivial on the discriminant is {±1}
        let e8 = crate::data::load_ade("E_8").unwrap().rescale(2).unwrap();
        let n = e8.rank();
        let minus = IntMatrix::identity(n).scale(&BigInt::from(-1));
        let act = GroupAction::new(Arc::new(e8), vec![minus]).unwrap();
        assert!(is_closure_saturated(&act).unwrap());
        assert!(is_leech_type(&act).unwrap());
    }
}
