//! Embedded datasets: ADE root lattices, Niemeier glue codes, and the
//! classification tables.

use crate::intlinalg::IntMatrix;
use crate::lattice::Lattice;
use crate::roots::{AdeKind, RootType};

/// Cartan matrix of an irreducible ADE type in Bourbaki numbering.
pub fn cartan(kind: AdeKind, rank: usize) -> IntMatrix {
    let mut c = IntMatrix::zeros(rank, rank);
    for i in 0..rank {
        c.set(i, i, 2);
    }
    let mut edge = |i: usize, j: usize| {
        c.set(i, j, -1);
        c.set(j, i, -1);
    };
    match kind {
        AdeKind::A => {
            for i in 1..rank {
                edge(i - 1, i);
            }
        }
        AdeKind::D => {
            for i in 1..rank - 1 {
                edge(i - 1, i);
            }
            edge(rank - 3, rank - 1);
        }
        AdeKind::E => {
            // nodes 1-3-4-5-...-n with 2 attached to 4 (0-based: 0-2-3-4..., 1-3)
            edge(0, 2);
            edge(1, 3);
            for i in 3..rank {
                edge(i - 1, i);
            }
        }
    }
    c
}

/// Negative definite root lattice (Gram = −Cartan) for a label such as `"E8"`,
/// `"D_4"` or `"2A_1+E_6"`.
pub fn load_ade(label: &str) -> Result<Lattice, crate::roots::RootError> {
    let t: RootType = label.parse()?;
    Ok(t.lattice())
}

/// Glue data of one Niemeier lattice: root components in order and glue
/// generators as one class label per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiemeierSpec {
    pub index: usize,
    pub components: Vec<(AdeKind, usize)>,
    pub glue: Vec<Vec<String>>,
}

impl NiemeierSpec {
    pub fn root_type(&self) -> RootType {
        RootType::new(self.components.clone()).expect("validated on load")
    }
}

const GLUE_FILES: [&str; 23] = [
    include_str!("../data/niemeier/01.glue"),
    include_str!("../data/niemeier/02.glue"),
    include_str!("../data/niemeier/03.glue"),
    include_str!("../data/niemeier/04.glue"),
    include_str!("../data/niemeier/05.glue"),
    include_str!("../data/niemeier/06.glue"),
    include_str!("../data/niemeier/07.glue"),
    include_str!("../data/niemeier/08.glue"),
    include_str!("../data/niemeier/09.glue"),
    include_str!("../data/niemeier/10.glue"),
    include_str!("../data/niemeier/11.glue"),
    include_str!("../data/niemeier/12.glue"),
    include_str!("../data/niemeier/13.glue"),
    include_str!("../data/niemeier/14.glue"),
    include_str!("../data/niemeier/15.glue"),
    include_str!("../data/niemeier/16.glue"),
    include_str!("../data/niemeier/17.glue"),
    include_str!("../data/niemeier/18.glue"),
    include_str!("../data/niemeier/19.glue"),
    include_str!("../data/niemeier/20.glue"),
    include_str!("../data/niemeier/21.glue"),
    include_str!("../data/niemeier/22.glue"),
    include_str!("../data/niemeier/23.glue"),
];

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum DataError {
    #[error("Niemeier index {0} out of range (1..=23; the Leech lattice is not supported)")]
    NiemeierIndex(usize),
    #[error("{file}:{line}: {msg}")]
    Corrupt { file: String, line: usize, msg: String },
}

fn class_ok(kind: AdeKind, rank: usize, label: &str) -> bool {
    match kind {
        AdeKind::A => label.parse::<usize>().is_ok_and(|i| i <= rank),
        AdeKind::D => matches!(label, "0" | "s" | "v" | "c"),
        AdeKind::E => match rank {
            6 => matches!(label, "0" | "1" | "2"),
            7 => matches!(label, "0" | "1"),
            _ => label == "0",
        },
    }
}

/// Parse a glue file (see `data/niemeier/README.txt`).
pub fn parse_glue(index: usize, text: &str) -> Result<NiemeierSpec, DataError> {
    let file = format!("{index:02}.glue");
    let err = |line: usize, msg: String| DataError::Corrupt { file: file.clone(), line, msg };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (ln, head) = lines.next().ok_or_else(|| err(1, "missing component line".into()))?;
    let mut components = Vec::new();
    for tok in head.split_whitespace() {
        let t: RootType = tok.parse().map_err(|_| err(ln + 1, format!("bad component {tok:?}")))?;
        match t.parts() {
            [p] => components.push(*p),
            _ => return Err(err(ln + 1, format!("component {tok:?} is not irreducible"))),
        }
    }
    let mut glue = Vec::new();
    for (ln, line) in lines {
        let row: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if row.len() != components.len() {
            return Err(err(ln + 1, format!("expected {} classes, found {}", components.len(), row.len())));
        }
        for (c, &(k, r)) in row.iter().zip(&components) {
            if !class_ok(k, r, c) {
                return Err(err(ln + 1, format!("invalid class {c:?} for {}", RootType::new(vec![(k, r)]).unwrap())));
            }
        }
        glue.push(row);
    }
    Ok(NiemeierSpec { index, components, glue })
}

/// Embedded glue data for `N_j`, `1 ≤ j ≤ 23`.
pub fn load_glue(j: usize) -> Result<NiemeierSpec, DataError> {
    if !(1..=23).contains(&j) {
        return Err(DataError::NiemeierIndex(j));
    }
    parse_glue(j, GLUE_FILES[j - 1])
}

const TABLES_TSV: &str = include_str!("../data/tables.tsv");
const MARKINGS_TSV: &str = include_str!("../data/markings.tsv");

/// One marking of a table row: a Niemeier index and the root type of the
/// orthogonal complement of `S` in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub j: usize,
    pub complement: RootType,
}

/// A row of the classification tables. Symbols are kept as written; labels
/// with sub-case markers keep them verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub table: u8,
    pub n: u32,
    pub order: u64,
    pub group: String,
    pub rk_sg: usize,
    pub q_sg: String,
    pub degeneration: String,
    pub rk_s: usize,
    pub q_s: String,
    pub unique: bool,
    pub markings: Vec<Marking>,
}

impl TableRow {
    /// Number of orbits `t` encoded in the degeneration label.
    pub fn orbit_count(&self) -> usize {
        if self.table == 1 {
            1
        } else {
            orbit_count(&self.degeneration)
        }
    }
}

/// Orbits in a degeneration label: the rows of a matrix label, otherwise the
/// leaves of the tuple left of the top-level `<`, with nested targets removed.
pub fn orbit_count(label: &str) -> usize {
    if let Some(body) = label.strip_prefix('[') {
        let inner = body.split(']').next().unwrap_or("");
        return inner.matches(';').count() + 1;
    }
    let mut depth = 0i32;
    let mut end = label.len();
    for (i, c) in label.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '<' if depth == 0 => {
                end = i;
                break;
            }
            _ => {}
        }
    }
    let left = &label[..end];
    let mut count = 0;
    let mut skipping = false;
    let bytes = left.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if skipping {
            if matches!(c, ',' | '(' | ')' | '[' | ']' | ';') {
                skipping = false;
            } else {
                i += 1;
                continue;
            }
        }
        if c == '<' {
            skipping = true;
        } else if matches!(c, 'a' | 'd' | 'e') && bytes.get(i + 1) == Some(&b'_') {
            count += 1;
        }
        i += 1;
    }
    count
}

fn tsv_lines(text: &'static str) -> impl Iterator<Item = (usize, Vec<&'static str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split('\t').collect()))
}

/// Embedded rows of the four classification tables, with their markings.
pub fn load_tables() -> Result<Vec<TableRow>, DataError> {
    let corrupt = |file: &str, line: usize, msg: String| DataError::Corrupt { file: file.into(), line, msg };
    let mut rows = Vec::new();
    for (ln, f) in tsv_lines(TABLES_TSV) {
        if f.len() != 10 {
            return Err(corrupt("tables.tsv", ln, format!("{} fields", f.len())));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| corrupt("tables.tsv", ln, format!("not a number: {s:?}")));
        rows.push(TableRow {
            table: num(f[0])? as u8,
            n: num(f[1])? as u32,
            order: num(f[2])?,
            group: f[3].to_string(),
            rk_sg: num(f[4])? as usize,
            q_sg: f[5].to_string(),
            degeneration: f[6].to_string(),
            rk_s: num(f[7])? as usize,
            q_s: f[8].to_string(),
            unique: f[9] == "*",
            markings: Vec::new(),
        });
    }
    for (ln, f) in tsv_lines(MARKINGS_TSV) {
        if f.len() != 5 {
            return Err(corrupt("markings.tsv", ln, format!("{} fields", f.len())));
        }
        let table: u8 = f[0].parse().map_err(|_| corrupt("markings.tsv", ln, "table".into()))?;
        let n: u32 = f[1].parse().map_err(|_| corrupt("markings.tsv", ln, "n".into()))?;
        let j: usize = f[3].parse().map_err(|_| corrupt("markings.tsv", ln, "j".into()))?;
        let complement: RootType = f[4].parse().map_err(|_| corrupt("markings.tsv", ln, format!("label {:?}", f[4])))?;
        let mut found = false;
        for r in rows.iter_mut().filter(|r| r.table == table && r.n == n && r.degeneration == f[2]) {
            r.markings.push(Marking { j, complement: complement.clone() });
            found = true;
        }
        if !found {
            return Err(corrupt("markings.tsv", ln, format!("no table row for {:?}", f[2])));
        }
    }
    Ok(rows)
}

/// Per-table outcome of the consistency suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCheck {
    pub table: u8,
    pub rows: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

/// For every row: both symbols parse, round-trip through formatting, satisfy
/// `signature ≡ −rank (mod 8)`; the orbit count obeys the rank law; every
/// marking's complement fits in `24 − rk S`.
pub fn check_tables(rows: &[TableRow]) -> Vec<TableCheck> {
    use crate::discform::{format_symbol, parse_symbol, symbol_signature_mod8};
    let mut out: Vec<TableCheck> = Vec::new();
    for row in rows {
        let idx = match out.iter().position(|c| c.table == row.table) {
            Some(i) => i,
            None => {
                out.push(TableCheck { table: row.table, rows: 0, passed: 0, failures: Vec::new() });
                out.len() - 1
            }
        };
        let mut errs = Vec::new();
        for (name, q, rk) in [("q_S", &row.q_s, row.rk_s), ("q_SG", &row.q_sg, row.rk_sg)] {
            match parse_symbol(q) {
                Err(e) => errs.push(format!("{name} {q:?}: {e}")),
                Ok(sym) => {
                    if parse_symbol(&format_symbol(&sym)).ok().as_ref() != Some(&sym) {
                        errs.push(format!("{name} {q:?} does not round-trip"));
                    }
                    match symbol_signature_mod8(&sym) {
                        Ok(s) if s as usize == (8 - rk % 8) % 8 => {}
                        Ok(s) => errs.push(format!("{name} {q:?}: signature {s} mod 8, rank {rk}")),
                        Err(e) => errs.push(format!("{name} {q:?}: {e}")),
                    }
                }
            }
        }
        if row.rk_sg + row.orbit_count() != row.rk_s {
            errs.push(format!("rank law: {} + {} != {}", row.rk_sg, row.orbit_count(), row.rk_s));
        }
        for m in &row.markings {
            if m.complement.rank() + row.rk_s > 24 {
                errs.push(format!("marking j={} complement {} too large", m.j, m.complement));
            }
        }
        let c = &mut out[idx];
        c.rows += 1;
        if errs.is_empty() {
            c.passed += 1;
        } else {
            c.failures.push(format!("n={} {}: {}", row.n, row.degeneration, errs.join("; ")));
        }
    }
    out.sort_by_key(|c| c.table);
    out
}
