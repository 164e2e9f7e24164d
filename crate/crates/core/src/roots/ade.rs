//! Splitting a root system into irreducible components and choosing simple
//! roots in Bourbaki order.

use std::collections::{HashMap, HashSet};

use super::{AdeKind, RootError};
use crate::data::cartan;
use crate::intlinalg::IntMatrix;

/// One irreducible component with its simple roots (rows, Bourbaki order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootComponent {
    pub kind: AdeKind,
    pub simple_roots: Vec<Vec<i64>>,
    /// Indices into the root list of the pairs belonging to this component.
    pub members: Vec<usize>,
}

impl RootComponent {
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }
}

pub(crate) fn row_times(v: &[i64], g: &[Vec<i64>]) -> Option<Vec<i64>> {
    let n = g.len();
    let mut out = vec![0i64; n];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..n {
            out[j] = out[j].checked_add(vi.checked_mul(g[i][j])?)?;
        }
    }
    Some(out)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn find(p: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while p[r] != r {
        r = p[r];
    }
    let mut i = i;
    while p[i] != r {
        let n = p[i];
        p[i] = r;
        i = n;
    }
    r
}

/// Decompose a list of root pairs (as returned by the enumerator) of the
/// lattice with Gram `gram` into irreducible components. Components are
/// ordered by kind, rank, then first simple root.
pub fn ade_decompose(gram: &IntMatrix, roots: &[Vec<i64>]) -> Result<Vec<RootComponent>, RootError> {
    let g = gram.to_i64_rows().ok_or(RootError::Overflow)?;
    let n = g.len();
    let mut rg = Vec::with_capacity(roots.len());
    for r in roots {
        if r.len() != n {
            return Err(RootError::NotARoot);
        }
        let v = row_times(r, &g).ok_or(RootError::Overflow)?;
        if dot(&v, r) != -2 {
            return Err(RootError::NotARoot);
        }
        rg.push(v);
    }
    let m = roots.len();
    let mut parent: Vec<usize> = (0..m).collect();
    for i in 0..m {
        for j in i + 1..m {
            if dot(&rg[i], &roots[j]) != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut comps = Vec::new();
    for (_, members) in groups {
        comps.push(component(roots, &rg, members)?);
    }
    comps.sort_by(|a, b| (a.kind, a.rank(), &a.simple_roots).cmp(&(b.kind, b.rank(), &b.simple_roots)));
    Ok(comps)
}

fn component(roots: &[Vec<i64>], rg: &[Vec<i64>], members: Vec<usize>) -> Result<RootComponent, RootError> {
    // Representatives are lexicographically positive, which is exactly
    // positivity for the functional (1, ε, ε², …).
    let positive: HashSet<&[i64]> = members.iter().map(|&i| roots[i].as_slice()).collect();
    let mut simple: Vec<usize> = Vec::new();
    'outer: for &a in &members {
        for &b in &members {
            if a == b {
                continue;
            }
            let diff: Vec<i64> = roots[a].iter().zip(&roots[b]).map(|(x, y)| x - y).collect();
            if positive.contains(diff.as_slice()) {
                continue 'outer;
            }
        }
        simple.push(a);
    }
    let rank = simple.len();
    let pairs = members.len();
    let kind = [AdeKind::A, AdeKind::D, AdeKind::E]
        .into_iter()
        .find(|k| k.is_valid(rank) && k.pair_count(rank) == pairs)
        .ok_or(RootError::Inconsistent { rank, pairs })?;
    simple.sort_by(|&a, &b| roots[a].cmp(&roots[b]));
    let adj: Vec<Vec<usize>> = (0..rank)
        .map(|i| (0..rank).filter(|&j| j != i && dot(&rg[simple[i]], &roots[simple[j]]) != 0).collect())
        .collect();
    let order = bourbaki_order(kind, &adj).ok_or(RootError::Inconsistent { rank, pairs })?;
    let simple_roots: Vec<Vec<i64>> = order.iter().map(|&i| roots[simple[i]].clone()).collect();
    let expected = cartan(kind, rank);
    for i in 0..rank {
        for j in 0..rank {
            let pair = dot(&rg[simple[order[i]]], &roots[simple[order[j]]]);
            if -pair != expected.get(i, j).try_into().unwrap_or(i64::MAX) {
                return Err(RootError::Inconsistent { rank, pairs });
            }
        }
    }
    Ok(RootComponent { kind, simple_roots, members })
}

/// Walk from `start` away from `prev` along degree ≤ 2 nodes.
fn arm(adj: &[Vec<usize>], prev: usize, start: usize) -> Vec<usize> {
    let mut out = vec![start];
    let (mut p, mut c) = (prev, start);
    loop {
        let next: Vec<usize> = adj[c].iter().copied().filter(|&x| x != p).collect();
        if next.len() != 1 {
            return out;
        }
        p = c;
        c = next[0];
        out.push(c);
    }
}

/// Node order (indices into `adj`, already sorted by root) realizing the
/// Bourbaki labelling; ties go to the lexicographically smaller root, which
/// is the smaller index.
fn bourbaki_order(kind: AdeKind, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    if n == 1 {
        return Some(vec![0]);
    }
    match kind {
        AdeKind::A => {
            let start = (0..n).find(|&i| adj[i].len() == 1)?;
            let mut path = vec![start];
            path.extend(arm(adj, start, adj[start][0]));
            (path.len() == n).then_some(path)
        }
        AdeKind::D | AdeKind::E => {
            let b = (0..n).find(|&i| adj[i].len() == 3)?;
            let mut arms: Vec<Vec<usize>> = adj[b].iter().map(|&s| arm(adj, b, s)).collect();
            // shortest arms first; equal lengths ordered by their far end
            arms.sort_by_key(|a| (a.len(), *a.last().unwrap()));
            let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
            let mut order = Vec::with_capacity(n);
            if kind == AdeKind::D {
                if lens[0] != 1 || lens[1] != 1 {
                    return None;
                }
                // long arm ends at node 1; for D_4 all arms have length one
                let (long, s1, s2) = (&arms[2], arms[0][0], arms[1][0]);
                let (long, s1, s2) = if n == 4 {
                    let mut leaves = [arms[0][0], arms[1][0], arms[2][0]];
                    leaves.sort();
                    (&vec![leaves[0]], leaves[1], leaves[2])
                } else {
                    (long, s1, s2)
                };
                order.extend(long.iter().rev());
                order.push(b);
                order.push(s1);
                order.push(s2);
            } else {
                // E_n: arms of lengths 1, 2, n − 4
                if lens[0] != 1 || lens[1] != 2 || lens[2] != n - 4 {
                    return None;
                }
                let (short, mid, long) = (&arms[0], &arms[1], &arms[2]);
                if n == 6 {
                    // two arms of length two: the one with the smaller far end gives nodes 1, 3
                    let (m1, m2) = if mid.last() < long.last() { (mid, long) } else { (long, mid) };
                    order.extend([m1[1], short[0], m1[0], b, m2[0], m2[1]]);
                } else {
                    order.extend([mid[1], short[0], mid[0], b]);
                    order.extend(long.iter());
                }
            }
            (order.len() == n).then_some(order)
        }
    }
}
