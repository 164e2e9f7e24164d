//! Roots of negative definite lattices and their ADE decomposition.

mod ade;
mod enumerate;
mod reduce;
pub(crate) use reduce::lll;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::intlinalg::IntMatrix;
use crate::lattice::Lattice;

pub use ade::{ade_decompose, RootComponent};
pub use enumerate::{short_vectors, Target};

/// Upper bound on the number of vector pairs any single enumeration may return.
pub const ENUMERATION_CAP: usize = 5_000_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RootError {
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("integer overflow during enumeration")]
    Overflow,
    #[error("more than {0} vectors; enumeration aborted")]
    TooMany(usize),
    #[error("inconsistent root component: rank {rank}, {pairs} root pairs")]
    Inconsistent { rank: usize, pairs: usize },
    #[error("invalid root type label {0:?}")]
    BadLabel(String),
    #[error("vector has wrong length or is not a root")]
    NotARoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdeKind {
    A,
    D,
    E,
}

impl AdeKind {
    fn letter(self, lower: bool) -> char {
        let c = match self {
            AdeKind::A => 'A',
            AdeKind::D => 'D',
            AdeKind::E => 'E',
        };
        if lower {
            c.to_ascii_lowercase()
        } else {
            c
        }
    }

    /// Number of root pairs of the irreducible system of this kind and rank.
    pub fn pair_count(self, rank: usize) -> usize {
        match self {
            AdeKind::A => rank * (rank + 1) / 2,
            AdeKind::D => rank * (rank - 1),
            AdeKind::E => match rank {
                6 => 36,
                7 => 63,
                _ => 120,
            },
        }
    }

    pub fn coxeter_number(self, rank: usize) -> usize {
        match self {
            AdeKind::A => rank + 1,
            AdeKind::D => 2 * rank - 2,
            AdeKind::E => match rank {
                6 => 12,
                7 => 18,
                _ => 30,
            },
        }
    }

    pub fn is_valid(self, rank: usize) -> bool {
        match self {
            AdeKind::A => rank >= 1,
            AdeKind::D => rank >= 4,
            AdeKind::E => (6..=8).contains(&rank),
        }
    }
}

/// Isomorphism type of a (possibly empty) ADE root system, kept sorted by
/// kind then rank.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootType {
    parts: Vec<(AdeKind, usize)>,
}

impl RootType {
    pub fn new(mut parts: Vec<(AdeKind, usize)>) -> Result<Self, RootError> {
        if let Some(&(k, r)) = parts.iter().find(|&&(k, r)| !k.is_valid(r)) {
            return Err(RootError::BadLabel(format!("{}_{r}", k.letter(false))));
        }
        parts.sort();
        Ok(RootType { parts })
    }

    pub fn empty() -> Self {
        RootType::default()
    }

    pub fn parts(&self) -> &[(AdeKind, usize)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.parts.iter().map(|p| p.1).sum()
    }

    pub fn pair_count(&self) -> usize {
        self.parts.iter().map(|&(k, r)| k.pair_count(r)).sum()
    }

    pub fn root_count(&self) -> usize {
        2 * self.pair_count()
    }

    /// Common Coxeter number when all components share one.
    pub fn coxeter_number(&self) -> Option<usize> {
        let mut hs = self.parts.iter().map(|&(k, r)| k.coxeter_number(r));
        let h = hs.next()?;
        hs.all(|x| x == h).then_some(h)
    }

    /// Negative definite root lattice with Gram = −Cartan, components in order.
    pub fn lattice(&self) -> Lattice {
        let mut g = IntMatrix::zeros(0, 0);
        for &(k, r) in &self.parts {
            g = g.block_diag(&-&crate::data::cartan(k, r));
        }
        Lattice::new(g).expect("Cartan matrices are symmetric")
    }

    /// Label with lowercase letters (`3a_1+a_2`), used for degeneration diagrams.
    pub fn lower(&self) -> String {
        self.render(true)
    }

    fn render(&self, lower: bool) -> String {
        if self.parts.is_empty() {
            return "{0}".into();
        }
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.parts.len() {
            let mut j = i;
            while j < self.parts.len() && self.parts[j] == self.parts[i] {
                j += 1;
            }
            let (k, r) = self.parts[i];
            let mult = if j - i > 1 { (j - i).to_string() } else { String::new() };
            out.push(format!("{mult}{}_{r}", k.letter(lower)));
            i = j;
        }
        out.join("+")
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl FromStr for RootType {
    type Err = RootError;

    /// Accepts `3A_1+A_2`, `3a_1\oplus a_2`, `A_1⊕A_{3}`, `E8`, `{0}` and `0`.
    fn from_str(s: &str) -> Result<Self, RootError> {
        let bad = || RootError::BadLabel(s.to_string());
        let mut t = s.trim().to_string();
        for sep in ["\\oplus", "\\amalg", "⊕", "∐"] {
            t = t.replace(sep, "+");
        }
        let t: String = t.chars().filter(|c| !c.is_whitespace() && *c != '{' && *c != '}').collect();
        if t.is_empty() || t == "0" {
            return Ok(RootType::empty());
        }
        let mut parts = Vec::new();
        for term in t.split('+') {
            let digits = term.chars().take_while(char::is_ascii_digit).count();
            let mult: usize = if digits == 0 { 1 } else { term[..digits].parse().map_err(|_| bad())? };
            let rest = &term[digits..];
            let mut chars = rest.chars();
            let kind = match chars.next().ok_or_else(bad)? {
                'A' | 'a' => AdeKind::A,
                'D' | 'd' => AdeKind::D,
                'E' | 'e' => AdeKind::E,
                _ => return Err(bad()),
            };
            let rank_str = chars.as_str().strip_prefix('_').unwrap_or(chars.as_str());
            let rank: usize = rank_str.parse().map_err(|_| bad())?;
            if mult == 0 || !kind.is_valid(rank) {
                return Err(bad());
            }
            parts.extend(std::iter::repeat_n((kind, rank), mult));
        }
        RootType::new(parts)
    }
}

/// Roots of a lattice together with their decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystemRecord {
    /// One representative per `±` pair, first nonzero coordinate positive, sorted.
    pub roots: Vec<Vec<i64>>,
    pub components: Vec<RootComponent>,
    pub root_type: RootType,
}

impl RootSystemRecord {
    pub fn label(&self) -> String {
        self.root_type.to_string()
    }
}

fn positive_gram(l: &Lattice) -> Result<IntMatrix, RootError> {
    if !l.is_negative_definite() {
        return Err(RootError::NotNegativeDefinite);
    }
    Ok(-l.gram())
}

/// All roots (norm −2 vectors) of a negative definite lattice, one per pair.
pub fn enumerate_roots(l: &Lattice) -> Result<Vec<Vec<i64>>, RootError> {
    let a = positive_gram(l)?;
    short_vectors(&a, Target::Exactly(2), ENUMERATION_CAP)
}

/// Enumerate and decompose the root system of `l`.
pub fn root_system(l: &Lattice) -> Result<RootSystemRecord, RootError> {
    let roots = enumerate_roots(l)?;
    let components = ade_decompose(l.gram(), &roots)?;
    let root_type = RootType::new(components.iter().map(|c| (c.kind, c.rank())).collect())?;
    Ok(RootSystemRecord { roots, components, root_type })
}

pub fn root_type(l: &Lattice) -> Result<RootType, RootError> {
    Ok(root_system(l)?.root_type)
}

/// Number of vectors `v` (both signs counted) with `v·v = −4` orthogonal to
/// every root of `l`.
pub fn count_norm4_orthogonal(l: &Lattice) -> Result<usize, RootError> {
    let a = positive_gram(l)?;
    let roots = short_vectors(&a, Target::Exactly(2), ENUMERATION_CAP)?;
    let fours = short_vectors(&a, Target::Exactly(4), ENUMERATION_CAP)?;
    let g = l.gram().to_i64_rows().ok_or(RootError::Overflow)?;
    let rg: Vec<Vec<i64>> = roots.iter().map(|r| ade::row_times(r, &g)).collect::<Option<_>>().ok_or(RootError::Overflow)?;
    let count = fours
        .iter()
        .filter(|v| rg.iter().all(|r| r.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<i64>() == 0))
        .count();
    Ok(2 * count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_parse_and_print() {
        let t: RootType = "A_2+3a_1".parse().unwrap();
        assert_eq!(t.to_string(), "3A_1+A_2");
        assert_eq!(t.lower(), "3a_1+a_2");
        assert_eq!("A_1\\oplus A_{3}".parse::<RootType>().unwrap().to_string(), "A_1+A_3");
        assert_eq!("{0}".parse::<RootType>().unwrap().to_string(), "{0}");
        assert_eq!("E8".parse::<RootType>().unwrap().to_string(), "E_8");
        assert!("D_3".parse::<RootType>().is_err());
        assert!("E_9".parse::<RootType>().is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_roots(&Lattice::diagonal(&[-2])).unwrap().len(), 1);
        let a2 = crate::data::load_ade("A_2").unwrap();
        assert_eq!(enumerate_roots(&a2).unwrap().len(), 3);
        let e8 = crate::data::load_ade("E_8").unwrap();
        assert_eq!(enumerate_roots(&e8).unwrap().len(), 120);
        assert_eq!(count_norm4_orthogonal(&Lattice::diagonal(&[-4])).unwrap(), 2);
        assert_eq!(count_norm4_orthogonal(&Lattice::diagonal(&[-2, -2])).unwrap(), 0);
        assert_eq!(root_type(&Lattice::diagonal(&[-4, -6])).unwrap().to_string(), "{0}");
    }

    #[test]
    fn not_definite_rejected() {
        assert_eq!(enumerate_roots(&Lattice::diagonal(&[-2, 2])), Err(RootError::NotNegativeDefinite));
    }
}
