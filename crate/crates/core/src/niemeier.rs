//! The 23 Niemeier lattices with roots, built as overlattices of their root
//! lattices from shipped glue codes and checked after construction.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::data::{cartan, load_glue, DataError, NiemeierSpec};
use crate::intlinalg::IntMatrix;
use crate::lattice::{overlattice_with_basis, rational_inverse, Lattice, LatticeError, RationalVector};
use crate::roots::{root_system, AdeKind, RootError, RootType};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NiemeierError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A constructed Niemeier lattice together with its root sublattice.
#[derive(Debug, Clone)]
pub struct Niemeier {
    pub spec: NiemeierSpec,
    /// Gram matrix in the constructed basis.
    pub lattice: Lattice,
    /// Root lattice in the basis of simple roots, components in file order.
    pub root_lattice: Lattice,
    /// Rows: the lattice basis in root coordinates, as `basis_num / basis_den`.
    pub basis_num: IntMatrix,
    pub basis_den: BigInt,
}

impl Niemeier {
    /// Express a vector given in simple-root coordinates in the lattice basis.
    pub fn from_root_coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let scaled: Vec<BigInt> = v.iter().map(|x| x * &self.basis_den).collect();
        crate::lattice::solve_in_span(&self.basis_num, &scaled)
    }
}

/// Representative of a discriminant class in simple-root coordinates.
pub fn class_vector(kind: AdeKind, rank: usize, label: &str) -> RationalVector {
    let node = match (kind, label) {
        (_, "0") => None,
        (AdeKind::A, i) => Some(i.parse::<usize>().expect("validated label") - 1),
        (AdeKind::D, "s") => Some(rank - 1),
        (AdeKind::D, "v") => Some(0),
        (AdeKind::D, "c") => Some(rank - 2),
        (AdeKind::E, "1") if rank == 6 => Some(0),
        (AdeKind::E, "2") if rank == 6 => Some(5),
        (AdeKind::E, "1") if rank == 7 => Some(6),
        _ => panic!("unvalidated class label {label:?}"),
    };
    match node {
        None => RationalVector::integral(vec![BigInt::zero(); rank]),
        Some(i) => {
            let (adj, det) = rational_inverse(&cartan(kind, rank)).expect("Cartan matrices are invertible");
            RationalVector::new(adj.row(i).to_vec(), det)
        }
    }
}

/// Build `N_j` from its glue data.
pub fn build(j: usize) -> Result<Niemeier, NiemeierError> {
    let spec = load_glue(j)?;
    let mut gram = IntMatrix::zeros(0, 0);
    for &(k, r) in &spec.components {
        gram = gram.block_diag(&-&cartan(k, r));
    }
    let root_lattice = Lattice::new(gram)?;
    let glue: Vec<RationalVector> = spec
        .glue
        .iter()
        .map(|row| {
            row.iter().zip(&spec.components).fold(RationalVector::integral(Vec::new()), |acc, (label, &(k, r))| {
                let v = class_vector(k, r, label);
                let den = num_integer::Integer::lcm(&acc.den, &v.den);
                let (fa, fv) = (&den / &acc.den, &den / &v.den);
                let mut num: Vec<BigInt> = acc.num.iter().map(|x| x * &fa).collect();
                num.extend(v.num.iter().map(|x| x * &fv));
                RationalVector::new(num, den)
            })
        })
        .collect();
    let over = overlattice_with_basis(&root_lattice, &glue)?;
    Ok(Niemeier { spec, lattice: over.lattice, root_lattice, basis_num: over.basis_num, basis_den: over.basis_den })
}

/// Gram matrix of `N_j`, `1 ≤ j ≤ 23`.
pub fn build_niemeier(j: usize) -> Result<Lattice, NiemeierError> {
    Ok(build(j)?.lattice)
}

/// Outcome of the checks performed by [`verify_niemeier`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiemeierReport {
    pub index: usize,
    pub even: bool,
    pub det: BigInt,
    pub rank: usize,
    pub negative_definite: bool,
    pub expected: RootType,
    /// `Err` carries the reason the root system could not be computed.
    pub root_type: Result<RootType, String>,
    pub root_count: usize,
    /// Root count equals 24 times the common Coxeter number.
    pub coxeter_ok: bool,
}

impl NiemeierReport {
    pub fn unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    pub fn root_type_ok(&self) -> bool {
        self.root_type.as_ref().is_ok_and(|t| *t == self.expected)
    }

    pub fn passed(&self) -> bool {
        self.even && self.unimodular() && self.rank == 24 && self.negative_definite && self.root_type_ok() && self.coxeter_ok
    }

    /// Failed check names, empty when everything passes.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut f = Vec::new();
        for (ok, name) in [
            (self.even, "even"),
            (self.unimodular(), "det"),
            (self.rank == 24, "rank"),
            (self.negative_definite, "negative definite"),
            (self.root_type_ok(), "root type"),
            (self.coxeter_ok, "root count"),
        ] {
            if !ok {
                f.push(name);
            }
        }
        f
    }
}

impl fmt::Display for NiemeierReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = |b: bool| if b { "ok" } else { "FAIL" };
        write!(f, "even: {}, det: {}, ", ok(self.even), self.det)?;
        match &self.root_type {
            Ok(t) => write!(f, "roots: {} ({})", t, self.root_count)?,
            Err(e) => write!(f, "roots: error ({e})")?,
        }
        let extra: Vec<&str> = self.failures().into_iter().filter(|n| !matches!(*n, "even" | "det")).collect();
        if !extra.is_empty() {
            write!(f, "; failed: {} (expected {})", extra.join(", "), self.expected)?;
        }
        Ok(())
    }
}

/// Check that `l` is an even unimodular negative definite rank-24 lattice
/// whose root system is that of `N_j`.
pub fn verify_niemeier(l: &Lattice, j: usize) -> Result<NiemeierReport, NiemeierError> {
    let expected = load_glue(j)?.root_type();
    let negative_definite = l.is_negative_definite();
    let (root_type, root_count) = if negative_definite {
        match root_system(l) {
            Ok(rec) => (Ok(rec.root_type), 2 * rec.roots.len()),
            Err(e) => (Err(e.to_string()), 0),
        }
    } else {
        (Err(RootError::NotNegativeDefinite.to_string()), 0)
    };
    let coxeter_ok = match &root_type {
        Ok(t) => t.coxeter_number().is_some_and(|h| 24 * h == root_count),
        Err(_) => false,
    };
    Ok(NiemeierReport {
        index: j,
        even: l.is_even(),
        det: l.det(),
        rank: l.rank(),
        negative_definite,
        expected,
        root_type,
        root_count,
        coxeter_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_e8_needs_no_glue() {
        let e8 = crate::data::load_ade("E_8").unwrap();
        let l = e8.direct_sum(&e8).direct_sum(&e8);
        let r = verify_niemeier(&l, 3).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.root_count, 720);
    }

    #[test]
    fn wrong_index_is_reported() {
        let l = build_niemeier(23).unwrap();
        let r = verify_niemeier(&l, 1).unwrap();
        assert!(!r.passed());
        assert_eq!(r.failures(), vec!["root type"]);
        assert_eq!(build_niemeier(24).unwrap_err(), NiemeierError::Data(DataError::NiemeierIndex(24)));
    }

    #[test]
    fn n23_report_line() {
        let r = verify_niemeier(&build_niemeier(23).unwrap(), 23).unwrap();
        assert_eq!(r.to_string(), "even: ok, det: 1, roots: 24A_1 (48)");
    }
}
