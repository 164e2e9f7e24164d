use std::sync::Arc;

use latk::action::{coinvariant_lattice, invariant_lattice, GroupAction};
use latk::degen::{check_expected, classify, expected_from_record, DegenerationRecord};
use latk::discform::{canonicalize, genus_symbol, negate_symbol, symbol_signature_mod8};
use latk::intlinalg::IntMatrix;
use latk::lattice::{orthogonal_complement, Lattice};
use latk::niemeier::build_niemeier;
use latk::roots::enumerate_roots;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permutation_matrix(p: &[usize]) -> IntMatrix {
    let n = p.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, &j) in p.iter().enumerate() {
        m.set(i, j, 1);
    }
    m
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    (0..n).map(|k| BigInt::from(i64::from(k == i))).collect()
}

fn assert_properties(rec: &DegenerationRecord, act: &GroupAction) {
    assert_eq!(rec.rk_s, rec.rk_sg + rec.t);
    assert!(rec.s.is_primitive());
    let want = ((8 - rec.rk_s % 8) % 8) as u8;
    assert_eq!(symbol_signature_mod8(&rec.q_s).unwrap(), want, "Milgram for {}", rec.q_s);
    assert!(check_expected(rec, &expected_from_record(rec)).unwrap().passed());
    for row in invariant_lattice(act).unwrap().basis().row_vecs() {
        for g in act.generators() {
            assert_eq!(g.vec_mul(&row), row);
        }
    }
    let inv = invariant_lattice(act).unwrap();
    let co = coinvariant_lattice(act).unwrap();
    assert!(inv.is_primitive() && co.is_primitive());
    assert_eq!(inv.rank() + co.rank(), act.ambient().rank());
    assert_eq!(rec.pair_matrix.len(), rec.t);
    for (i, row) in rec.pair_matrix.iter().enumerate() {
        assert_eq!(row[0], rec.orbit_types[i]);
    }
    assert!(rec.complement_root_type.rank() + rec.rk_s <= act.ambient().rank());
}

#[test]
fn random_permutation_actions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let amb = Arc::new(Lattice::diagonal(&vec![-2; n]));
        let gens: Vec<IntMatrix> = (0..rng.gen_range(1..=2))
            .map(|_| {
                let mut p: Vec<usize> = (0..n).collect();
                p.shuffle(&mut rng);
                permutation_matrix(&p)
            })
            .collect();
        let act = GroupAction::new(amb, gens).unwrap();
        // one representative from each of t distinct orbits
        let mut orbit_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for i in 0..n {
            if orbit_of[i] == usize::MAX {
                let o = latk::action::orbit(&act, &unit(n, i)).unwrap();
                for v in &o {
                    let k = v.iter().position(|x| *x == BigInt::from(1)).unwrap();
                    orbit_of[k] = reps.len();
                }
                reps.push(unit(n, i));
            }
        }
        reps.shuffle(&mut rng);
        let t = rng.gen_range(1..=reps.len());
        reps.truncate(t);
        let rec = classify(&act, &reps).unwrap();
        assert_properties(&rec, &act);
    }
}

#[test]
fn cycling_the_components_of_three_e8() {
    let amb = Arc::new(build_niemeier(3).unwrap());
    // the three E_8 blocks are glued trivially, so permuting blocks is an isometry
    let mut p: Vec<usize> = (0..24).collect();
    p.rotate_left(8);
    let cyc = permutation_matrix(&p);
    let e8 = latk::data::load_ade("E_8").unwrap();
    assert_eq!(amb.gram(), &e8.direct_sum(&e8).direct_sum(&e8).gram().clone());
    let act = GroupAction::new(amb.clone(), vec![cyc]).unwrap();
    assert!(latk::action::is_leech_type(&act).unwrap() || coinvariant_lattice(&act).unwrap().rank() == 16);
    let roots = enumerate_roots(&e8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let r = roots.choose(&mut rng).unwrap();
        let mut v = vec![BigInt::from(0); 24];
        for (k, x) in r.iter().enumerate() {
            v[k] = BigInt::from(*x);
        }
        let rec = classify(&act, &[v]).unwrap();
        assert_eq!((rec.rk_sg, rec.rk_s), (16, 17));
        assert_eq!(rec.orbit_types[0].to_string(), "3A_1");
        let comp = orthogonal_complement(&amb, &rec.s).unwrap();
        assert_eq!(comp.rank(), 7);
        // the complement is the diagonal copy of r^perp = E_7 inside E_8^3, scaled by 3
        let e7_3 = latk::data::load_ade("E_7").unwrap().rescale(3).unwrap();
        let want = canonicalize(&genus_symbol(&e7_3).unwrap()).unwrap();
        assert_eq!(canonicalize(&genus_symbol(&comp.lattice()).unwrap()).unwrap(), want);
        assert_eq!(rec.q_s, negate_symbol(&want).unwrap());
        assert_properties(&rec, &act);
    }
}
