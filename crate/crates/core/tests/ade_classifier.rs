use latk::data::{cartan, load_ade};
use latk::intlinalg::IntMatrix;
use latk::lattice::Lattice;
use latk::roots::{ade_decompose, enumerate_roots, root_system, AdeKind, RootType};
use num_bigint::BigInt;
use proptest::prelude::*;

fn shipped() -> Vec<(AdeKind, usize, usize)> {
    let mut v = Vec::new();
    for n in 1..=8 {
        v.push((AdeKind::A, n, n * (n + 1)));
    }
    for n in 4..=8 {
        v.push((AdeKind::D, n, 2 * n * (n - 1)));
    }
    v.extend([(AdeKind::E, 6, 72), (AdeKind::E, 7, 126), (AdeKind::E, 8, 240)]);
    v
}

#[test]
fn classical_counts_and_round_trip() {
    for (kind, rank, count) in shipped() {
        let t = RootType::new(vec![(kind, rank)]).unwrap();
        let l = load_ade(&t.to_string()).unwrap();
        let rec = root_system(&l).unwrap();
        assert_eq!(2 * rec.roots.len(), count, "{t}");
        assert_eq!(rec.root_type, t);
        assert_eq!(rec.components.len(), 1);
        let simple = IntMatrix::from_i64(&rec.components[0].simple_roots);
        assert_eq!(l.gram().congruence(&simple), -&cartan(kind, rank), "{t}: simple roots");
    }
}

#[test]
fn sums_decompose_into_their_parts() {
    let l = load_ade("A_2+D_4+E_6+2A_1").unwrap();
    let rec = root_system(&l).unwrap();
    assert_eq!(rec.label(), "2A_1+A_2+D_4+E_6");
    assert_eq!(2 * rec.roots.len(), 2 + 2 + 6 + 24 + 72);
    let d4 = load_ade("D_4").unwrap();
    assert_eq!(enumerate_roots(&d4).unwrap().len(), 12);
    assert_eq!(root_system(&Lattice::diagonal(&[-2; 24])).unwrap().label(), "24A_1");
}

#[test]
fn inconsistent_root_sets_are_rejected() {
    // two roots of A_2 only: not closed, so the count does not match the rank
    let a2 = load_ade("A_2").unwrap();
    assert!(ade_decompose(a2.gram(), &[vec![1, 0], vec![0, 1]]).is_err());
}

fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    for &(i, j, q) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for k in 0..n {
            let v = u.get(i, k) + u.get(j, k) * BigInt::from(q);
            u.set(i, k, v);
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn root_type_is_basis_independent(
        which in 0usize..16,
        ops in proptest::collection::vec((0usize..8, 0usize..8, -2i64..=2), 0..24),
    ) {
        let (kind, rank, count) = shipped()[which];
        let t = RootType::new(vec![(kind, rank)]).unwrap();
        let l = load_ade(&t.to_string()).unwrap();
        let moved = l.change_basis(&unimodular(rank, &ops));
        let rec = root_system(&moved).unwrap();
        prop_assert_eq!(2 * rec.roots.len(), count);
        prop_assert_eq!(rec.root_type, t);
    }

    #[test]
    fn root_counts_add_over_sums(a in 0usize..16, b in 0usize..16) {
        let (ka, ra, ca) = shipped()[a];
        let (kb, rb, cb) = shipped()[b];
        let t = RootType::new(vec![(ka, ra), (kb, rb)]).unwrap();
        let rec = root_system(&t.lattice()).unwrap();
        prop_assert_eq!(2 * rec.roots.len(), ca + cb);
        prop_assert_eq!(rec.root_type, t);
    }
}
