//! The degeneration pipeline: from a lattice with a group action and root
//! orbit representatives to the record of the lattice `S` they generate.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{coinvariant_lattice, component_permutation_matrix, generators_from_root_coordinates, orbit, ActionError, GroupAction};
use crate::discform::{canonicalize, genus_symbol, parse_symbol, symbol_signature_mod8, DiscError, GenusSymbol};
use crate::intlinalg::IntMatrix;
use crate::lattice::{orthogonal_complement, primitive_closure, Lattice, LatticeError, Sublattice};
use crate::niemeier::{build, NiemeierError};
use crate::roots::{count_norm4_orthogonal, root_type, RootError, RootType};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DegenError {
    #[error("case file: {0}")]
    Format(String),
    #[error(transparent)]
    Niemeier(#[from] NiemeierError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Symbol(#[from] DiscError),
    #[error("orbit representative {0} is not a root")]
    NotARoot(usize),
    #[error("no orbit representatives given")]
    NoOrbits,
    #[error("the lattice S (rank {rank}) is not negative definite")]
    NotNegativeDefinite { rank: usize },
    #[error("rank law violated: rk S = {rk_s}, rk S_G = {rk_sg}, t = {t}")]
    RankLaw { rk_s: usize, rk_sg: usize, t: usize },
    #[error("invalid expectation: {0}")]
    Expected(String),
}

/// Ambient lattice of a case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ambient {
    Niemeier { niemeier: usize },
    Gram { gram: Vec<Vec<i64>> },
}

/// A generator, either a full matrix or a permutation of root components
/// with one block per component (root coordinates only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Generator {
    Matrix(Vec<Vec<i64>>),
    Components { permutation: Vec<usize>, blocks: Vec<Vec<Vec<i64>>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    /// The basis of the ambient Gram matrix (or of the constructed Niemeier lattice).
    #[default]
    Lattice,
    /// Simple-root coordinates of a Niemeier lattice.
    Roots,
}

/// Expected values, mirroring the table columns.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rk: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm4: Option<usize>,
    /// Dynkin label of the union of all orbits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub union: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegenerationCase {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ambient: Ambient,
    #[serde(default)]
    pub coordinates: Coordinates,
    #[serde(default)]
    pub generators: Vec<Generator>,
    pub orbit_reps: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

impl DegenerationCase {
    pub fn from_json(text: &str) -> Result<Self, DegenError> {
        serde_json::from_str(text).map_err(|e| DegenError::Format(e.to_string()))
    }
}

/// Result of [`classify_case`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationRecord {
    pub rk_sg: usize,
    pub t: usize,
    pub rk_s: usize,
    pub q_s: GenusSymbol,
    pub orbit_sizes: Vec<usize>,
    pub orbit_types: Vec<RootType>,
    /// Upper triangle: `pair_matrix[i][j - i]` is the type of orbits `i ∪ j`.
    pub pair_matrix: Vec<Vec<RootType>>,
    pub union_type: RootType,
    pub complement_root_type: RootType,
    pub norm4_count: usize,
    pub negative_definite: bool,
    pub within_k3_bound: bool,
    /// The lattice `S`, as a primitive sublattice of the ambient.
    pub s: Sublattice,
    pub s_g: Sublattice,
}

#[derive(Serialize)]
struct RecordJson {
    rk_sg: usize,
    t: usize,
    rk_s: usize,
    q_s: String,
    orbit_sizes: Vec<usize>,
    orbit_types: Vec<String>,
    pair_matrix: Vec<Vec<String>>,
    union_type: String,
    complement_root_type: String,
    norm4_count: usize,
    negative_definite: bool,
    within_k3_bound: bool,
}

impl DegenerationRecord {
    pub fn to_json(&self) -> serde_json::Value {
        let r = RecordJson {
            rk_sg: self.rk_sg,
            t: self.t,
            rk_s: self.rk_s,
            q_s: self.q_s.to_string(),
            orbit_sizes: self.orbit_sizes.clone(),
            orbit_types: self.orbit_types.iter().map(RootType::lower).collect(),
            pair_matrix: self.pair_matrix.iter().map(|row| row.iter().map(RootType::lower).collect()).collect(),
            union_type: self.union_type.lower(),
            complement_root_type: self.complement_root_type.to_string(),
            norm4_count: self.norm4_count,
            negative_definite: self.negative_definite,
            within_k3_bound: self.within_k3_bound,
        };
        serde_json::to_value(r).expect("plain data serializes")
    }

    pub const TSV_HEADER: &'static str = "rk_SG\tt\trk_S\tq_S\torbits\tunion\tcomplement\tnorm4\tk3";

    pub fn tsv_row(&self) -> String {
        let orbits: Vec<String> = self.orbit_types.iter().map(RootType::lower).collect();
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.rk_sg,
            self.t,
            self.rk_s,
            self.q_s,
            orbits.join(","),
            self.union_type.lower(),
            self.complement_root_type,
            self.norm4_count,
            if self.within_k3_bound { "ok" } else { "warn" }
        )
    }
}

impl fmt::Display for DegenerationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rk S_G: {}", self.rk_sg)?;
        writeln!(f, "t: {}", self.t)?;
        writeln!(f, "rk S: {}{}", self.rk_s, if self.within_k3_bound { "" } else { " (exceeds 19)" })?;
        writeln!(f, "q_S: {}", self.q_s)?;
        for (i, row) in self.pair_matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(RootType::lower).collect();
            writeln!(f, "orbit {} ({} roots): {}", i + 1, self.orbit_sizes[i], cells.join(" "))?;
        }
        writeln!(f, "union: {}", self.union_type.lower())?;
        writeln!(f, "complement roots: {}", self.complement_root_type)?;
        write!(f, "norm -4 vectors orthogonal to complement roots: {}", self.norm4_count)
    }
}

fn matrix(rows: &[Vec<i64>], what: &str) -> Result<IntMatrix, DegenError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(DegenError::Format(format!("{what} is not a square matrix")));
    }
    Ok(IntMatrix::from_i64(rows))
}

/// Resolve the ambient lattice, generators and orbit representatives of a
/// case to lattice coordinates.
pub fn prepare_case(case: &DegenerationCase) -> Result<(GroupAction, Vec<Vec<BigInt>>), DegenError> {
    let to_big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    match (&case.ambient, case.coordinates) {
        (Ambient::Gram { gram }, Coordinates::Lattice) => {
            let l = Lattice::new(matrix(gram, "ambient gram")?)?;
            let mut gens = Vec::new();
            for g in &case.generators {
                match g {
                    Generator::Matrix(m) => gens.push(matrix(m, "generator")?),
                    Generator::Components { .. } => {
                        return Err(DegenError::Format("component permutations need a Niemeier ambient with root coordinates".into()))
                    }
                }
            }
            let act = GroupAction::new(Arc::new(l), gens)?;
            Ok((act, case.orbit_reps.iter().map(|v| to_big(v)).collect()))
        }
        (Ambient::Gram { .. }, Coordinates::Roots) => Err(DegenError::Format("root coordinates need a Niemeier ambient".into())),
        (Ambient::Niemeier { niemeier }, coords) => {
            let n = build(*niemeier)?;
            let amb = Arc::new(n.lattice.clone());
            let ranks: Vec<usize> = n.spec.components.iter().map(|c| c.1).collect();
            let mut raw = Vec::new();
            for g in &case.generators {
                raw.push(match g {
                    Generator::Matrix(m) => matrix(m, "generator")?,
                    Generator::Components { permutation, blocks } => {
                        if coords != Coordinates::Roots {
                            return Err(DegenError::Format("component permutations need root coordinates".into()));
                        }
                        let blocks: Vec<IntMatrix> = blocks.iter().map(|b| matrix(b, "block")).collect::<Result<_, _>>()?;
                        component_permutation_matrix(&ranks, permutation, &blocks)?
                    }
                });
            }
            match coords {
                Coordinates::Lattice => {
                    let act = GroupAction::new(amb, raw)?;
                    Ok((act, case.orbit_reps.iter().map(|v| to_big(v)).collect()))
                }
                Coordinates::Roots => {
                    let gens = generators_from_root_coordinates(&n, &raw)?;
                    let act = GroupAction::new(amb, gens)?;
                    let reps = case
                        .orbit_reps
                        .iter()
                        .map(|v| {
                            if v.len() != 24 {
                                return Err(DegenError::Format("orbit representative must have 24 root coordinates".into()));
                            }
                            n.from_root_coordinates(&to_big(v))
                                .ok_or_else(|| DegenError::Format("orbit representative is not in the lattice".into()))
                        })
                        .collect::<Result<_, _>>()?;
                    Ok((act, reps))
                }
            }
        }
    }
}

fn span_type(amb: &Arc<Lattice>, vecs: &[Vec<BigInt>]) -> Result<RootType, DegenError> {
    let n = amb.rank();
    let gens = IntMatrix::from_rows(vecs, n).map_err(LatticeError::from)?;
    let s = Sublattice::spanned_by(amb.clone(), &gens)?;
    Ok(root_type(&s.lattice())?)
}

pub fn classify_case(case: &DegenerationCase) -> Result<DegenerationRecord, DegenError> {
    let (act, reps) = prepare_case(case)?;
    classify(&act, &reps)
}

/// Run the pipeline for an action and orbit representatives in ambient coordinates.
pub fn classify(act: &GroupAction, reps: &[Vec<BigInt>]) -> Result<DegenerationRecord, DegenError> {
    if reps.is_empty() {
        return Err(DegenError::NoOrbits);
    }
    let amb = act.ambient().clone();
    let n = amb.rank();
    for (i, r) in reps.iter().enumerate() {
        if r.len() != n || amb.norm(r) != BigInt::from(-2) {
            return Err(DegenError::NotARoot(i));
        }
    }
    let s_g = coinvariant_lattice(act)?;
    let orbits: Vec<Vec<Vec<BigInt>>> = reps.iter().map(|r| orbit(act, r)).collect::<Result<_, _>>()?;
    let mut gens: Vec<Vec<BigInt>> = s_g.basis().row_vecs();
    for o in &orbits {
        gens.extend(o.iter().cloned());
    }
    let span = Sublattice::spanned_by(amb.clone(), &IntMatrix::from_rows(&gens, n).map_err(LatticeError::from)?)?;
    let s = primitive_closure(&amb, &span)?;
    let (rk_sg, t, rk_s) = (s_g.rank(), reps.len(), s.rank());
    let s_lat = s.lattice();
    if !s_lat.is_negative_definite() {
        return Err(DegenError::NotNegativeDefinite { rank: rk_s });
    }
    if rk_s != rk_sg + t {
        return Err(DegenError::RankLaw { rk_s, rk_sg, t });
    }
    let q_s = canonicalize(&genus_symbol(&s_lat)?)?;
    let orbit_types: Vec<RootType> = orbits.iter().map(|o| span_type(&amb, o)).collect::<Result<_, _>>()?;
    let mut pair_matrix = Vec::with_capacity(t);
    for i in 0..t {
        let mut row = vec![orbit_types[i].clone()];
        for j in i + 1..t {
            let both: Vec<Vec<BigInt>> = orbits[i].iter().chain(&orbits[j]).cloned().collect();
            row.push(span_type(&amb, &both)?);
        }
        pair_matrix.push(row);
    }
    let all: Vec<Vec<BigInt>> = orbits.iter().flatten().cloned().collect();
    let union_type = span_type(&amb, &all)?;
    let comp = orthogonal_complement(&amb, &s)?;
    let comp_lat = comp.lattice();
    let (complement_root_type, norm4_count) = if comp.rank() == 0 {
        (RootType::empty(), 0)
    } else if comp_lat.is_negative_definite() {
        (root_type(&comp_lat)?, count_norm4_orthogonal(&comp_lat)?)
    } else {
        return Err(DegenError::Roots(RootError::NotNegativeDefinite));
    };
    Ok(DegenerationRecord {
        rk_sg,
        t,
        rk_s,
        q_s,
        orbit_sizes: orbits.iter().map(Vec::len).collect(),
        orbit_types,
        pair_matrix,
        union_type,
        complement_root_type,
        norm4_count,
        negative_definite: true,
        within_k3_bound: rk_s <= 19,
        s,
        s_g,
    })
}

/// One compared field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldCheck {
    pub field: &'static str,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedReport {
    pub checks: Vec<FieldCheck>,
}

impl ExpectedReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

impl fmt::Display for ExpectedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let status = if c.ok { "ok" } else { "MISMATCH" };
            write!(f, "{}: {} (expected {}, got {})", c.field, status, c.expected, c.actual)?;
        }
        Ok(())
    }
}

/// Compare a record with expected values field by field. A `q`/`rk` pair
/// that violates the Milgram relation is reported before the comparison.
pub fn check_expected(rec: &DegenerationRecord, exp: &Expected) -> Result<ExpectedReport, DegenError> {
    let mut checks = Vec::new();
    let parsed_q = match &exp.q {
        Some(q) => Some(parse_symbol(q).map_err(|e| DegenError::Expected(format!("q {q:?}: {e}")))?),
        None => None,
    };
    if let (Some(q), Some(rk)) = (&parsed_q, exp.rk) {
        let sig = symbol_signature_mod8(q).map_err(|e| DegenError::Expected(format!("q: {e}")))?;
        let want = ((8 - rk % 8) % 8) as u8;
        checks.push(FieldCheck {
            field: "milgram",
            expected: format!("{want} mod 8"),
            actual: format!("{sig} mod 8"),
            ok: sig == want,
        });
    }
    if let Some(rk) = exp.rk {
        checks.push(FieldCheck { field: "rk", expected: rk.to_string(), actual: rec.rk_s.to_string(), ok: rk == rec.rk_s });
    }
    if let (Some(q), Some(sym)) = (&exp.q, &parsed_q) {
        let canon = canonicalize(sym).map_err(|e| DegenError::Expected(format!("q {q:?}: {e}")))?;
        checks.push(FieldCheck { field: "q", expected: q.clone(), actual: rec.q_s.to_string(), ok: canon == rec.q_s });
    }
    let label = |s: &str| s.parse::<RootType>().map_err(|e| DegenError::Expected(e.to_string()));
    if let Some(c) = &exp.complement {
        let t = label(c)?;
        checks.push(FieldCheck {
            field: "complement",
            expected: c.clone(),
            actual: rec.complement_root_type.to_string(),
            ok: t == rec.complement_root_type,
        });
    }
    if let Some(u) = &exp.union {
        let t = label(u)?;
        checks.push(FieldCheck { field: "union", expected: u.clone(), actual: rec.union_type.lower(), ok: t == rec.union_type });
    }
    if let Some(n4) = exp.norm4 {
        checks.push(FieldCheck {
            field: "norm4",
            expected: n4.to_string(),
            actual: rec.norm4_count.to_string(),
            ok: n4 == rec.norm4_count,
        });
    }
    Ok(ExpectedReport { checks })
}

/// Expectation reproducing every checkable field of a record.
pub fn expected_from_record(rec: &DegenerationRecord) -> Expected {
    Expected {
        rk: Some(rec.rk_s),
        q: Some(rec.q_s.to_string()),
        complement: Some(rec.complement_root_type.to_string()),
        norm4: Some(rec.norm4_count),
        union: Some(rec.union_type.lower()),
    }
}
