//! Acceptance suite. Runs without the libtest harness so that the one-line
//! verdict per criterion is always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use latk::action::{coinvariant_lattice, GroupAction};
use latk::data::{load_ade, load_tables};
use latk::degen::{check_expected, classify, classify_case, expected_from_record, DegenerationCase, Expected};
use latk::discform::{
    canonicalize, discriminant_form, fqf_isomorphic, genus_symbol, negate_symbol, symbol_signature_mod8, GenusSymbol,
};
use latk::intlinalg::IntMatrix;
use latk::lattice::{orthogonal_complement, primitive_closure, Lattice, Sublattice};
use latk::niemeier::{build_niemeier, verify_niemeier};
use latk::roots::{ade_decompose, enumerate_roots, RootType};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

// ---------------------------------------------------------------------------
// 1. Niemeier lattices

const NIEMEIER: [&str; 23] = [
    "D_24", "D_16+E_8", "3E_8", "A_24", "2D_12", "A_17+E_7", "D_10+2E_7", "A_15+D_9", "3D_8", "2A_12",
    "A_11+D_7+E_6", "4E_6", "2A_9+D_6", "4D_6", "3A_8", "2A_7+2D_5", "4A_6", "4A_5+D_4", "6D_4", "6A_4",
    "8A_3", "12A_2", "24A_1",
];

/// Coxeter number of the first component of a label, from the classical formulas.
fn coxeter(label: &str) -> usize {
    let first = label.split('+').next().unwrap();
    let body = first.trim_start_matches(|c: char| c.is_ascii_digit());
    let (kind, n) = body.split_once('_').unwrap();
    let n: usize = n.parse().unwrap();
    match kind {
        "A" => n + 1,
        "D" => 2 * n - 2,
        "E" => [12, 18, 30][n - 6],
        _ => unreachable!(),
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    for (i, label) in NIEMEIER.iter().enumerate() {
        let j = i + 1;
        let l = build_niemeier(j).map_err(|e| format!("N_{j}: {e}"))?;
        ensure(l.is_even(), || format!("N_{j} not even"))?;
        ensure(l.det() == BigInt::from(1) || l.det() == BigInt::from(-1), || format!("N_{j}: det {}", l.det()))?;
        ensure(l.rank() == 24, || format!("N_{j}: rank {}", l.rank()))?;
        let rep = verify_niemeier(&l, j).map_err(|e| e.to_string())?;
        let got = rep.root_type.clone().map_err(|e| format!("N_{j}: {e}"))?;
        let want: RootType = label.parse().unwrap();
        ensure(got == want, || format!("N_{j}: root type {got}, list says {label}"))?;
        ensure(rep.root_count == 24 * coxeter(label), || format!("N_{j}: {} roots", rep.root_count))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || format!("took {}", secs(t)))?;
    Ok(format!("23/23 lattices, {}", secs(t)))
}

// ---------------------------------------------------------------------------
// 2. Milgram consistency of the embedded tables

/// `oddity − Σ p-excess (mod 8)` of a symbol string, computed directly from
/// the Conway–Sloane formulas without the library parser.
fn milgram_oracle(sym: &str) -> u32 {
    if sym == "1" || sym.is_empty() {
        return 0;
    }
    let mut total: i64 = 0;
    for tok in sym.split(',') {
        let (head, tail) = tok.split_once('^').unwrap();
        let (scale, oddity) = match head.split_once('_') {
            Some((s, o)) => (s, Some(o)),
            None => (head, None),
        };
        let q: u64 = scale.parse().unwrap();
        let minus = tail.starts_with('-');
        let n: i64 = tail[1..].parse().unwrap();
        let mut p = 2;
        while !q.is_multiple_of(p) {
            p += 1;
        }
        let mut k = 0;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            k += 1;
        }
        let odd_power_minus = i64::from(minus && k % 2 == 1);
        if p == 2 {
            let t = match oddity {
                Some("II") | None => 0,
                Some(o) => o.parse::<i64>().unwrap(),
            };
            total += t + 4 * odd_power_minus;
        } else {
            total -= n * (q as i64 - 1) + 4 * odd_power_minus;
        }
    }
    total.rem_euclid(8) as u32
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let rows = load_tables().map_err(|e| e.to_string())?;
    let mut tables: Vec<u8> = rows.iter().map(|r| r.table).collect();
    tables.dedup();
    ensure(tables == [1, 2, 4, 6], || format!("tables present: {tables:?}"))?;
    let mut pairs = 0;
    for r in &rows {
        for (q, rk) in [(&r.q_s, r.rk_s), (&r.q_sg, r.rk_sg)] {
            let want = ((8 - rk % 8) % 8) as u32;
            let oracle = milgram_oracle(q);
            let parsed = q.parse::<GenusSymbol>().map_err(|e| format!("table {} n={}: {q}: {e}", r.table, r.n))?;
            let lib = u32::from(symbol_signature_mod8(&parsed).map_err(|e| e.to_string())?);
            ensure(oracle == want && lib == want, || {
                format!("table {} n={}: {q} rank {rk}: oracle {oracle}, library {lib}, want {want}", r.table, r.n)
            })?;
            pairs += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {}", secs(t)))?;
    Ok(format!("{pairs} symbol/rank pairs over {} rows, {}", rows.len(), secs(t)))
}

// ---------------------------------------------------------------------------
// 3. E_8(-2)

fn criterion_3() -> Verdict {
    let e8 = load_ade("E_8").map_err(|e| e.to_string())?;
    let scaled = e8.rescale(2).map_err(|e| e.to_string())?;
    let sym = canonicalize(&genus_symbol(&scaled).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(sym.to_string() == "2_II^+8", || format!("got {sym}"))?;
    Ok(format!("genus_symbol(E_8(-2)) = {sym}"))
}

// ---------------------------------------------------------------------------
// 4. Canonical symbols versus brute-force isomorphism

fn random_block(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    match rng.gen_range(0..5) {
        0 | 1 => vec![vec![2 * [-1, 1][rng.gen_range(0..2)] * rng.gen_range(1..=8)]],
        2 | 3 => loop {
            let (a, b, c) = (rng.gen_range(-4..=4), rng.gen_range(-3..=3), rng.gen_range(-4..=4));
            if 4 * a * c != b * b {
                break vec![vec![2 * a, b], vec![b, 2 * c]];
            }
        },
        _ => vec![vec![0, 1], vec![1, 0]],
    }
}

fn scramble(g: &IntMatrix, rng: &mut ChaCha8Rng) -> IntMatrix {
    let n = g.rows();
    let mut u = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let c: i64 = rng.gen_range(-1..=1);
            for k in 0..n {
                let v = u.get(i, k) + u.get(j, k) * c;
                u.set(i, k, v);
            }
        }
    }
    g.congruence(&u)
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let mut pool: Vec<(Lattice, GenusSymbol)> = Vec::new();
    while pool.len() < 220 {
        let rank = rng.gen_range(1..=6);
        let mut g = IntMatrix::zeros(0, 0);
        while g.rows() < rank {
            let b = IntMatrix::from_i64(&random_block(&mut rng));
            if g.rows() + b.rows() > 6 {
                break;
            }
            g = g.block_diag(&b);
        }
        let Ok(l) = Lattice::new(scramble(&g, &mut rng)) else { continue };
        let d = l.det();
        if d == BigInt::from(0) || d > BigInt::from(64) || d < BigInt::from(-64) {
            continue;
        }
        let s = canonicalize(&genus_symbol(&l).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        pool.push((l, s));
    }
    let forms: Vec<_> = pool.iter().map(|(l, _)| discriminant_form(l).unwrap()).collect();
    let (mut compared, mut iso_pairs) = (0, 0);
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if forms[i].order() != forms[j].order() {
                continue;
            }
            let iso = fqf_isomorphic(&forms[i], &forms[j]).map_err(|e| e.to_string())?;
            ensure(iso == (pool[i].1 == pool[j].1), || {
                format!("{} vs {}: isomorphic = {iso}", pool[i].1, pool[j].1)
            })?;
            compared += 1;
            iso_pairs += usize::from(iso);
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {}", secs(t)))?;
    Ok(format!(
        "{} lattices, {compared} same-order pairs ({iso_pairs} isomorphic), 100% agreement, {}",
        pool.len(),
        secs(t)
    ))
}

// ---------------------------------------------------------------------------
// 5. Complement duality

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut n = 0;
    for round in 0..60 {
        let j = round % 23 + 1;
        let amb = Arc::new(build_niemeier(j).map_err(|e| e.to_string())?);
        let roots = enumerate_roots(&amb).map_err(|e| e.to_string())?;
        let k = rng.gen_range(1..=10);
        let picked: Vec<Vec<i64>> = roots.choose_multiple(&mut rng, k).cloned().collect();
        let span = Sublattice::spanned_by(amb.clone(), &IntMatrix::from_i64(&picked)).map_err(|e| e.to_string())?;
        let s = primitive_closure(&amb, &span).map_err(|e| e.to_string())?;
        let c = orthogonal_complement(&amb, &s).map_err(|e| e.to_string())?;
        let qs = genus_symbol(&s.lattice()).map_err(|e| e.to_string())?;
        let qc = genus_symbol(&c.lattice()).map_err(|e| e.to_string())?;
        let lhs = negate_symbol(&qs).map_err(|e| e.to_string())?;
        let rhs = canonicalize(&qc).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("N_{j}: -({qs}) = {lhs} but complement has {rhs}"))?;
        n += 1;
    }
    Ok(format!("{n}/{n} primitive sublattices"))
}

// ---------------------------------------------------------------------------
// 6. ADE classifier

fn criterion_6() -> Verdict {
    let mut labels = Vec::new();
    labels.extend((1..=8).map(|n| (format!("A_{n}"), n * (n + 1))));
    labels.extend((4..=8).map(|n| (format!("D_{n}"), 2 * n * (n - 1))));
    labels.extend([("E_6".to_string(), 72), ("E_7".to_string(), 126), ("E_8".to_string(), 240)]);
    for (label, count) in &labels {
        let l = load_ade(label).map_err(|e| e.to_string())?;
        let roots = enumerate_roots(&l).map_err(|e| e.to_string())?;
        ensure(2 * roots.len() == *count, || format!("{label}: {} roots, expected {count}", 2 * roots.len()))?;
        let comps = ade_decompose(l.gram(), &roots).map_err(|e| e.to_string())?;
        let t = RootType::new(comps.iter().map(|c| (c.kind, c.rank())).collect()).map_err(|e| e.to_string())?;
        ensure(t.to_string() == *label, || format!("{label} decomposed as {t}"))?;
        let simple = IntMatrix::from_i64(&comps[0].simple_roots);
        let cartan = l.gram().congruence(&simple).scale(&BigInt::from(-1));
        ensure(cartan == latk::data::cartan(comps[0].kind, comps[0].rank()), || format!("{label}: simple roots"))?;
    }
    Ok(format!("{} lattices, counts and types exact", labels.len()))
}

// ---------------------------------------------------------------------------
// 7. Pipeline properties

fn permutation(p: &[usize]) -> IntMatrix {
    let mut m = IntMatrix::zeros(p.len(), p.len());
    for (i, &j) in p.iter().enumerate() {
        m.set(i, j, 1);
    }
    m
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    (0..n).map(|k| BigInt::from(i64::from(k == i))).collect()
}

fn pipeline_ok(act: &GroupAction, reps: &[Vec<BigInt>]) -> Result<(), String> {
    let rec = classify(act, reps).map_err(|e| e.to_string())?;
    ensure(rec.rk_s == rec.rk_sg + rec.t, || format!("rank law: {} != {} + {}", rec.rk_s, rec.rk_sg, rec.t))?;
    ensure(rec.s.is_primitive(), || "S not primitive".into())?;
    let sig = u32::from(symbol_signature_mod8(&rec.q_s).map_err(|e| e.to_string())?);
    ensure(sig == ((8 - rec.rk_s % 8) % 8) as u32, || format!("{} fails Milgram at rank {}", rec.q_s, rec.rk_s))?;
    ensure(milgram_oracle(&rec.q_s.to_string()) == sig, || format!("oracle disagrees on {}", rec.q_s))?;
    Ok(())
}

fn criterion_7() -> Verdict {
    let toy = DegenerationCase::from_json(&std::fs::read_to_string(root().join("cases/toy_swap.json")).unwrap())
        .map_err(|e| e.to_string())?;
    let rec = classify_case(&toy).map_err(|e| e.to_string())?;
    ensure(rec.rk_s == 2 && rec.q_s.to_string() == "2_6^+2", || format!("toy: rk {} q {}", rec.rk_s, rec.q_s))?;
    ensure(rec.orbit_types == vec!["2A_1".parse::<RootType>().unwrap()], || "toy orbit type".into())?;
    ensure(rec.s.is_primitive() && rec.rk_s == rec.rk_sg + rec.t, || "toy properties".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut randomized = 0;
    for _ in 0..24 {
        let n = rng.gen_range(2..=8);
        let amb = Arc::new(Lattice::diagonal(&vec![-2; n]));
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        let act = GroupAction::new(amb, vec![permutation(&p)]).map_err(|e| e.to_string())?;
        let mut seen = vec![false; n];
        let mut reps = Vec::new();
        for i in 0..n {
            if !seen[i] {
                let mut k = i;
                while !seen[k] {
                    seen[k] = true;
                    k = p[k];
                }
                reps.push(unit(n, i));
            }
        }
        reps.shuffle(&mut rng);
        reps.truncate(rng.gen_range(1..=reps.len()));
        pipeline_ok(&act, &reps)?;
        randomized += 1;
    }
    // a genuine Niemeier automorphism: cycling the three E_8 components of N_3
    let n3 = DegenerationCase::from_json(&std::fs::read_to_string(root().join("cases/n3_cycle.json")).unwrap())
        .map_err(|e| e.to_string())?;
    let (act, _) = latk::degen::prepare_case(&n3).map_err(|e| e.to_string())?;
    ensure(coinvariant_lattice(&act).map_err(|e| e.to_string())?.rank() == 16, || "N_3 coinvariant rank".into())?;
    let e8_roots = enumerate_roots(&load_ade("E_8").unwrap()).unwrap();
    for _ in 0..4 {
        let r = e8_roots.choose(&mut rng).unwrap();
        let mut v = vec![BigInt::from(0); 24];
        for (k, x) in r.iter().enumerate() {
            v[k] = BigInt::from(*x);
        }
        pipeline_ok(&act, &[v])?;
        randomized += 1;
    }
    Ok(format!("toy case exact, {randomized} randomized actions hold the rank law, primitivity and Milgram"))
}

// ---------------------------------------------------------------------------
// 8. Orbit-marking columns

fn criterion_8() -> Verdict {
    println!(
        "  note: the orbit-marking columns of the marking tables depend on group actions that are \
         not part of the shipped data and are NOT reproducible from it; user-supplied action data \
         is accepted and checked field by field instead."
    );
    let mut checked = 0;
    for entry in std::fs::read_dir(root().join("cases")).unwrap() {
        let path = entry.unwrap().path();
        let case = DegenerationCase::from_json(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
        let rec = classify_case(&case).map_err(|e| e.to_string())?;
        if let Some(exp) = &case.expected {
            let rep = check_expected(&rec, exp).map_err(|e| e.to_string())?;
            ensure(rep.passed(), || format!("{}: {rep}", path.display()))?;
            checked += 1;
        }
        ensure(check_expected(&rec, &expected_from_record(&rec)).unwrap().passed(), || "self check".into())?;
        let wrong = Expected { rk: Some(rec.rk_s + 1), ..Expected::default() };
        ensure(!check_expected(&rec, &wrong).unwrap().passed(), || "wrong rank accepted".into())?;
    }
    let bin = env!("CARGO_BIN_EXE_latk");
    let good = Command::new(bin).arg("classify").arg(root().join("cases/toy_swap.json")).output().unwrap();
    let bad = Command::new(bin).arg("classify").arg(fixture("mismatch.json")).output().unwrap();
    ensure(good.status.code() == Some(0), || format!("matching case exits {:?}", good.status.code()))?;
    ensure(bad.status.code() == Some(1), || format!("mismatching case exits {:?}", bad.status.code()))?;
    Ok(format!("{checked} shipped expected blocks agree; mismatches detected and exit nonzero"))
}

// ---------------------------------------------------------------------------
// 9. CLI determinism

fn criterion_9() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_latk");
    let f = |s: &str| fixture(s).to_string_lossy().into_owned();
    let cases = root().join("cases").to_string_lossy().into_owned();
    let mut invocations: Vec<Vec<String>> = vec![
        vec!["symbol".into(), f("e8neg2.gram")],
        vec!["roots".into(), f("e8.gram")],
        vec!["roots".into(), f("a2a1.gram")],
        vec!["niemeier".into(), "23".into(), "--verify".into()],
        vec!["niemeier".into(), "19".into(), "--roots".into()],
        vec!["niemeier".into(), "7".into()],
        vec!["complement".into(), f("e8.gram"), "--sub".into(), f("e8_first_root.sub")],
        vec!["closure".into(), f("e8.gram"), "--sub".into(), f("e8_doubled.sub")],
        vec!["classify".into(), cases],
        vec!["tables".into(), "check".into()],
    ];
    let base = invocations.clone();
    for fmt in ["json", "tsv"] {
        for inv in &base {
            let mut v = inv.clone();
            v.extend(["--format".to_string(), fmt.to_string()]);
            invocations.push(v);
        }
    }
    for inv in &invocations {
        let a = Command::new(bin).args(inv).output().unwrap();
        let b = Command::new(bin).args(inv).output().unwrap();
        ensure(a.status.code() == Some(0), || {
            format!("`latk {}` exited {:?}: {}", inv.join(" "), a.status.code(), String::from_utf8_lossy(&a.stderr))
        })?;
        ensure(a.stdout == b.stdout && a.stderr == b.stderr && a.status == b.status, || {
            format!("`latk {}` differs between runs", inv.join(" "))
        })?;
        ensure(!a.stdout.is_empty(), || format!("`latk {}` printed nothing", inv.join(" ")))?;
    }
    let symbol = Command::new(bin).args(["symbol", &f("e8neg2.gram")]).output().unwrap();
    ensure(symbol.stdout == b"2_II^+8\n", || format!("symbol printed {:?}", String::from_utf8_lossy(&symbol.stdout)))?;
    let n23 = Command::new(bin).args(["niemeier", "23", "--verify"]).output().unwrap();
    ensure(n23.stdout == b"even: ok, det: 1, roots: 24A_1 (48)\n", || "niemeier 23 --verify output".into())?;
    let tables = Command::new(bin).args(["tables", "check"]).output().unwrap();
    ensure(
        String::from_utf8_lossy(&tables.stdout).ends_with("tables: all rows pass Milgram consistency\n"),
        || "tables check summary".into(),
    )?;
    let usage = Command::new(bin).args(["symbol", "--no-such-flag"]).output().unwrap();
    ensure(usage.status.code() == Some(2) && usage.stdout.is_empty(), || "usage error status".into())?;
    Ok(format!("{} invocations byte-identical across two runs", invocations.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("niemeier suite", criterion_1),
        ("table Milgram consistency", criterion_2),
        ("E_8(-2) symbol", criterion_3),
        ("oracle equivalence", criterion_4),
        ("complement duality", criterion_5),
        ("ADE classifier", criterion_6),
        ("pipeline properties", criterion_7),
        ("expected-block agreement", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match verdict {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
