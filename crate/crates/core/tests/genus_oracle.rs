//! Canonical genus symbols versus brute-force isomorphism of discriminant forms.

use latk::discform::{canonicalize, discriminant_form, fqf_isomorphic, genus_symbol, GenusSymbol};
use latk::intlinalg::IntMatrix;
use latk::lattice::Lattice;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_block(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    match rng.gen_range(0..6) {
        0 | 1 => {
            let a = loop {
                let a: i64 = rng.gen_range(-8..=8);
                if a != 0 {
                    break a;
                }
            };
            vec![vec![2 * a]]
        }
        2 | 3 => loop {
            let a: i64 = rng.gen_range(-4..=4);
            let c: i64 = rng.gen_range(-4..=4);
            let b: i64 = rng.gen_range(-3..=3);
            if 4 * a * c - b * b != 0 {
                break vec![vec![2 * a, b], vec![b, 2 * c]];
            }
        },
        4 => vec![vec![0, 1], vec![1, 0]],
        _ => {
            let n = rng.gen_range(2..=4);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match (i as i64 - j as i64).abs() {
                            0 => 2 * sign,
                            1 => -sign,
                            _ => 0,
                        })
                        .collect()
                })
                .collect()
        }
    }
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        return u;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let q: i64 = rng.gen_range(-1..=1);
        for k in 0..n {
            let v = u.get(i, k) + u.get(j, k) * q;
            u.set(i, k, v);
        }
    }
    u
}

fn random_even_lattice(rng: &mut ChaCha8Rng) -> Option<Lattice> {
    let target = rng.gen_range(1..=6);
    let mut g = IntMatrix::zeros(0, 0);
    while g.rows() < target {
        let b = IntMatrix::from_i64(&small_block(rng));
        if g.rows() + b.rows() > 6 {
            break;
        }
        g = g.block_diag(&b);
    }
    let l = Lattice::new(g).ok()?;
    let d = l.det();
    if d == 0.into() || d.abs() > 64.into() {
        return None;
    }
    let u = random_unimodular(l.rank(), rng);
    Some(l.change_basis(&u))
}

fn run_oracle(seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(Lattice, GenusSymbol)> = Vec::new();
    while pool.len() < 240 {
        if let Some(l) = random_even_lattice(&mut rng) {
            let s = canonicalize(&genus_symbol(&l).unwrap()).unwrap();
            pool.push((l, s));
        }
    }
    let forms: Vec<_> = pool.iter().map(|(l, _)| discriminant_form(l).unwrap()).collect();
    let (mut compared, mut equal) = (0, 0);
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if forms[i].order() != forms[j].order() {
                continue;
            }
            compared += 1;
            let iso = fqf_isomorphic(&forms[i], &forms[j]).unwrap();
            let same = pool[i].1 == pool[j].1;
            equal += usize::from(iso);
            assert_eq!(
                iso, same,
                "disagreement: {:?} ({}) vs {:?} ({})",
                pool[i].0, pool[i].1, pool[j].0, pool[j].1
            );
        }
    }
    (compared, equal)
}

#[test]
fn canonical_symbols_agree_with_isomorphism_oracle() {
    let (compared, equal) = run_oracle(0x5eed);
    assert!(compared >= 200, "only {compared} comparisons");
    assert!(equal >= 20, "only {equal} isomorphic pairs");
}

#[test]
#[ignore]
fn oracle_many_seeds() {
    for seed in 0..200 {
        let (c, e) = run_oracle(seed);
        eprintln!("seed {seed}: {c} comparisons, {e} isomorphic");
    }
}
