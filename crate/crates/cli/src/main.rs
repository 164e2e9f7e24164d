use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latk::data::{check_tables, load_tables};
use latk::degen::{check_expected, classify_case, DegenerationCase, DegenerationRecord, ExpectedReport};
use latk::discform::genus_symbol;
use latk::intlinalg::{self, IntMatrix};
use latk::lattice::{orthogonal_complement, primitive_closure, Lattice, Sublattice};
use latk::niemeier::{build_niemeier, verify_niemeier};
use latk::roots::{root_system, RootComponent, RootType};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "latk", version, about = "Exact lattice computations: genus symbols, root systems, Niemeier lattices, degenerations")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Print diagnostics to stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Bit ceiling for the fixed-width fast path; overrides LATK_PRECISION_BITS.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(8..=126))]
    precision_bits: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical genus symbol of the discriminant form of an even Gram matrix.
    Symbol { file: PathBuf },
    /// Roots of a negative definite Gram matrix: count, ADE label, simple roots.
    Roots { file: PathBuf },
    /// Build the Niemeier lattice N_J (1..=23).
    Niemeier(NiemeierArgs),
    /// Orthogonal complement of the span of the rows of SUBFILE.
    Complement(SubArgs),
    /// Primitive closure of the span of the rows of SUBFILE.
    Closure(SubArgs),
    /// Classify a degeneration case file, or every *.json file in a directory.
    Classify { path: PathBuf },
    /// Embedded classification tables.
    Tables {
        #[command(subcommand)]
        action: TablesAction,
    },
}

#[derive(Args, Debug)]
struct NiemeierArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=23))]
    j: u8,
    /// Check evenness, determinant and root system.
    #[arg(long, conflicts_with = "roots")]
    verify: bool,
    /// Print the root system instead of the Gram matrix.
    #[arg(long)]
    roots: bool,
}

#[derive(Args, Debug)]
struct SubArgs {
    /// Ambient Gram matrix.
    file: PathBuf,
    /// Generators of the sublattice, one row per vector in ambient coordinates.
    #[arg(long)]
    sub: PathBuf,
}

#[derive(Subcommand, Debug)]
enum TablesAction {
    /// Run the consistency suite over every embedded row.
    Check,
}

/// Failure categories mapped to exit statuses.
enum Failure {
    Usage(String),
    Domain(String),
}

type Outcome = Result<String, Failure>;

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<IntMatrix, Failure> {
    IntMatrix::parse_text(&read(path)?).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn read_lattice(path: &Path) -> Result<Lattice, Failure> {
    Lattice::new(read_matrix(path)?).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| json!(r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).collect())
}

fn i64_rows_json(rows: &[Vec<i64>]) -> Value {
    json!(rows)
}

fn tsv_vec(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_symbol(file: &Path, fmt: Format) -> Outcome {
    let l = read_lattice(file)?;
    let sym = genus_symbol(&l).map_err(domain)?;
    let sig = l.signature();
    Ok(match fmt {
        Format::Text => format!("{sym}\n"),
        Format::Tsv => format!("rank\tdet\tsymbol\n{}\t{}\t{}\n", l.rank(), l.det(), sym),
        Format::Json => render(&json!({
            "rank": l.rank(),
            "det": l.det().to_string(),
            "signature": [sig.plus, sig.minus],
            "symbol": sym.to_string(),
        })),
    })
}

fn component_label(c: &RootComponent) -> String {
    RootType::new(vec![(c.kind, c.rank())]).map(|t| t.to_string()).unwrap_or_default()
}

fn cmd_roots(file: &Path, fmt: Format) -> Outcome {
    let l = read_lattice(file)?;
    let rec = root_system(&l).map_err(domain)?;
    let count = 2 * rec.roots.len();
    Ok(match fmt {
        Format::Text => {
            let mut s = format!("roots: {count}\ntype: {}\n", rec.label());
            for c in &rec.components {
                let _ = writeln!(s, "component {}:", component_label(c));
                for r in &c.simple_roots {
                    let _ = writeln!(s, "  {}", tsv_vec(r));
                }
            }
            s
        }
        Format::Tsv => {
            let mut s = String::from("component\tindex\tsimple_root\n");
            for c in &rec.components {
                for (i, r) in c.simple_roots.iter().enumerate() {
                    let _ = writeln!(s, "{}\t{}\t{}", component_label(c), i + 1, tsv_vec(r));
                }
            }
            s
        }
        Format::Json => render(&json!({
            "count": count,
            "type": rec.label(),
            "components": rec.components.iter().map(|c| json!({
                "type": component_label(c),
                "simple_roots": i64_rows_json(&c.simple_roots),
            })).collect::<Vec<_>>(),
        })),
    })
}

fn cmd_niemeier(a: &NiemeierArgs, fmt: Format) -> Outcome {
    let j = usize::from(a.j);
    let l = build_niemeier(j).map_err(domain)?;
    if a.verify {
        let r = verify_niemeier(&l, j).map_err(domain)?;
        let label = r.root_type.as_ref().map(ToString::to_string).unwrap_or_else(|e| format!("error: {e}"));
        let out = match fmt {
            Format::Text => format!("{r}\n"),
            Format::Tsv => format!(
                "j\teven\tdet\trank\troots\tcount\tpassed\n{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                j, r.even, r.det, r.rank, label, r.root_count, r.passed()
            ),
            Format::Json => render(&json!({
                "j": j,
                "even": r.even,
                "det": r.det.to_string(),
                "rank": r.rank,
                "root_type": label,
                "expected": r.expected.to_string(),
                "root_count": r.root_count,
                "passed": r.passed(),
                "failures": r.failures(),
            })),
        };
        return if r.passed() { Ok(out) } else { Err(Failure::Domain(out.trim_end().to_string())) };
    }
    if a.roots {
        let rec = root_system(&l).map_err(domain)?;
        let count = 2 * rec.roots.len();
        return Ok(match fmt {
            Format::Text => format!("{} ({count})\n", rec.label()),
            Format::Tsv => format!("j\troots\tcount\n{j}\t{}\t{count}\n", rec.label()),
            Format::Json => render(&json!({
                "j": j,
                "root_type": rec.label(),
                "count": count,
                "roots": i64_rows_json(&rec.roots),
            })),
        });
    }
    Ok(match fmt {
        Format::Json => render(&json!({ "j": j, "gram": matrix_json(l.gram()) })),
        _ => l.gram().to_text(),
    })
}

fn read_sub(a: &SubArgs) -> Result<(Arc<Lattice>, Sublattice), Failure> {
    let amb = Arc::new(read_lattice(&a.file)?);
    let gens = read_matrix(&a.sub)?;
    if gens.cols() != amb.rank() {
        return Err(Failure::Domain(format!(
            "{}: vectors have {} coordinates, ambient rank is {}",
            a.sub.display(),
            gens.cols(),
            amb.rank()
        )));
    }
    let s = Sublattice::spanned_by(amb.clone(), &gens).map_err(domain)?;
    Ok((amb, s))
}

/// Basis, Gram matrix and (when defined) genus symbol of a sublattice.
fn describe(s: &Sublattice, extra: Vec<(&str, String)>, fmt: Format) -> String {
    let lat = s.lattice();
    let symbol = if lat.is_even() && lat.is_nondegenerate() {
        genus_symbol(&lat).map(|g| g.to_string()).ok()
    } else {
        None
    };
    match fmt {
        Format::Text => {
            let mut out = format!("rank: {}\n", s.rank());
            for (k, v) in &extra {
                let _ = writeln!(out, "{k}: {v}");
            }
            if let Some(sym) = &symbol {
                let _ = writeln!(out, "symbol: {sym}");
            }
            let _ = write!(out, "basis:\n{}gram:\n{}", s.basis().to_text(), lat.gram().to_text());
            out
        }
        Format::Tsv => {
            let mut out = String::from("row\tvector\n");
            for (i, r) in s.basis().row_vecs().iter().enumerate() {
                let v: Vec<String> = r.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{}\t{}", i + 1, v.join(" "));
            }
            out
        }
        Format::Json => {
            let mut m = serde_json::Map::new();
            m.insert("rank".into(), json!(s.rank()));
            for (k, v) in extra {
                m.insert(k.into(), json!(v));
            }
            m.insert("symbol".into(), json!(symbol));
            m.insert("basis".into(), matrix_json(s.basis()));
            m.insert("gram".into(), matrix_json(lat.gram()));
            render(&Value::Object(m))
        }
    }
}

fn cmd_complement(a: &SubArgs, fmt: Format) -> Outcome {
    let (amb, s) = read_sub(a)?;
    let c = orthogonal_complement(&amb, &s).map_err(domain)?;
    Ok(describe(&c, Vec::new(), fmt))
}

fn cmd_closure(a: &SubArgs, fmt: Format) -> Outcome {
    let (amb, s) = read_sub(a)?;
    let c = primitive_closure(&amb, &s).map_err(domain)?;
    // index of the span in its closure: |det| of the span basis in closure coordinates
    let coords: Vec<Vec<_>> = s
        .basis()
        .row_vecs()
        .iter()
        .map(|r| c.coordinates(r).ok_or_else(|| Failure::Domain("span not contained in its closure".into())))
        .collect::<Result<_, _>>()?;
    let index = if coords.is_empty() {
        1.into()
    } else {
        IntMatrix::from_rows(&coords, coords.len()).map_err(domain)?.det().map_err(domain)?
    };
    let index = if index < 0.into() { -index } else { index };
    Ok(describe(&c, vec![("index", index.to_string())], fmt))
}

struct CaseResult {
    name: String,
    record: Result<DegenerationRecord, String>,
    report: Option<Result<ExpectedReport, String>>,
}

impl CaseResult {
    fn ok(&self) -> bool {
        self.record.is_ok() && self.report.as_ref().is_none_or(|r| r.as_ref().is_ok_and(ExpectedReport::passed))
    }
}

fn run_case(path: &Path) -> CaseResult {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let fail = |name: String, msg: String| CaseResult { name, record: Err(msg), report: None };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(stem, format!("{}: {e}", path.display())),
    };
    let case = match DegenerationCase::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(stem, format!("{}: {e}", path.display())),
    };
    let name = case.name.clone().unwrap_or(stem);
    let record = classify_case(&case).map_err(|e| e.to_string());
    let report = match (&record, &case.expected) {
        (Ok(rec), Some(exp)) => Some(check_expected(rec, exp).map_err(|e| e.to_string())),
        _ => None,
    };
    CaseResult { name, record, report }
}

fn case_paths(path: &Path) -> Result<Vec<PathBuf>, Failure> {
    if !path.is_dir() {
        if !path.exists() {
            return Err(Failure::Usage(format!("{}: no such file or directory", path.display())));
        }
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = std::fs::read_dir(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    if out.is_empty() {
        return Err(Failure::Usage(format!("{}: no .json case files", path.display())));
    }
    Ok(out)
}

fn cmd_classify(path: &Path, fmt: Format) -> Outcome {
    let paths = case_paths(path)?;
    let results: Vec<CaseResult> = paths.par_iter().map(|p| run_case(p)).collect();
    let out = match fmt {
        Format::Text => {
            let mut s = String::new();
            for (i, r) in results.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                let _ = writeln!(s, "== {} ==", r.name);
                match &r.record {
                    Ok(rec) => {
                        let _ = writeln!(s, "{rec}");
                    }
                    Err(e) => {
                        let _ = writeln!(s, "error: {e}");
                    }
                }
                match &r.report {
                    Some(Ok(rep)) => {
                        let _ = writeln!(s, "{rep}");
                        let _ = writeln!(s, "expected: {}", if rep.passed() { "all fields match" } else { "MISMATCH" });
                    }
                    Some(Err(e)) => {
                        let _ = writeln!(s, "expected block error: {e}");
                    }
                    None => {}
                }
            }
            s
        }
        Format::Tsv => {
            let mut s = format!("case\t{}\texpected\n", DegenerationRecord::TSV_HEADER);
            let blanks = DegenerationRecord::TSV_HEADER.matches('\t').count();
            for r in &results {
                let status = match &r.report {
                    None => "-".to_string(),
                    Some(Ok(rep)) if rep.passed() => "ok".to_string(),
                    Some(_) => "mismatch".to_string(),
                };
                match &r.record {
                    Ok(rec) => {
                        let _ = writeln!(s, "{}\t{}\t{}", r.name, rec.tsv_row(), status);
                    }
                    Err(e) => {
                        let _ = writeln!(s, "{}\terror: {}{}\terror", r.name, e, "\t".repeat(blanks));
                    }
                }
            }
            s
        }
        Format::Json => {
            let cases: Vec<Value> = results
                .iter()
                .map(|r| {
                    let mut m = serde_json::Map::new();
                    m.insert("name".into(), json!(r.name));
                    match &r.record {
                        Ok(rec) => m.insert("record".into(), rec.to_json()),
                        Err(e) => m.insert("error".into(), json!(e)),
                    };
                    match &r.report {
                        Some(Ok(rep)) => {
                            m.insert("checks".into(), serde_json::to_value(&rep.checks).expect("checks serialize"));
                            m.insert("expected_ok".into(), json!(rep.passed()));
                        }
                        Some(Err(e)) => {
                            m.insert("expected_error".into(), json!(e));
                            m.insert("expected_ok".into(), json!(false));
                        }
                        None => {}
                    }
                    Value::Object(m)
                })
                .collect();
            render(&Value::Array(cases))
        }
    };
    if results.iter().all(CaseResult::ok) {
        Ok(out)
    } else {
        // the report is still wanted on stdout when something failed
        emit(&out);
        let bad: Vec<&str> = results.iter().filter(|r| !r.ok()).map(|r| r.name.as_str()).collect();
        Err(Failure::Domain(format!("classify: failing cases: {}", bad.join(", "))))
    }
}

fn cmd_tables_check(fmt: Format) -> Outcome {
    let rows = load_tables().map_err(domain)?;
    let checks = check_tables(&rows);
    let all = checks.iter().all(|c| c.failures.is_empty());
    let total_fail: usize = checks.iter().map(|c| c.rows - c.passed).sum();
    let summary = if all {
        "tables: all rows pass Milgram consistency".to_string()
    } else {
        format!("tables: {total_fail} rows fail Milgram consistency")
    };
    let out = match fmt {
        Format::Text => {
            let mut s = String::new();
            for c in &checks {
                let _ = writeln!(s, "table {}: {}/{} rows pass", c.table, c.passed, c.rows);
                for f in &c.failures {
                    let _ = writeln!(s, "  {f}");
                }
            }
            let _ = writeln!(s, "{summary}");
            s
        }
        Format::Tsv => {
            let mut s = String::from("table\trows\tpassed\n");
            for c in &checks {
                let _ = writeln!(s, "{}\t{}\t{}", c.table, c.rows, c.passed);
            }
            s
        }
        Format::Json => render(&json!({
            "tables": checks.iter().map(|c| json!({
                "table": c.table,
                "rows": c.rows,
                "passed": c.passed,
                "failures": c.failures,
            })).collect::<Vec<_>>(),
            "all_pass": all,
        })),
    };
    if all {
        Ok(out)
    } else {
        emit(&out);
        Err(Failure::Domain(summary))
    }
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(out: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("latk: writing output: {e}");
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Symbol { file } => cmd_symbol(file, cli.format),
        Command::Roots { file } => cmd_roots(file, cli.format),
        Command::Niemeier(a) => cmd_niemeier(a, cli.format),
        Command::Complement(a) => cmd_complement(a, cli.format),
        Command::Closure(a) => cmd_closure(a, cli.format),
        Command::Classify { path } => cmd_classify(path, cli.format),
        Command::Tables { action: TablesAction::Check } => cmd_tables_check(cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_bits = match intlinalg::configure_from_env() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("latk: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(bits) = cli.precision_bits {
        intlinalg::set_fast_path_bits(bits);
    }
    if cli.verbose > 0 {
        let source = if cli.precision_bits.is_some() {
            "flag"
        } else if env_bits.is_some() {
            "LATK_PRECISION_BITS"
        } else {
            "default"
        };
        eprintln!("latk: fast path ceiling {} bits ({source})", intlinalg::fast_path_bits());
    }
    match run(&cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("latk: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("latk: {msg}");
            ExitCode::from(2)
        }
    }
}
