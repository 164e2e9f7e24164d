use std::sync::Arc;

use latk::discform::{
    canonicalize, discriminant_form, fqf_isomorphic_bounded, genus_symbol, negate_symbol, signature_mod8, symbol_of_form,
    symbol_signature_mod8, symbol_to_form, FiniteQuadraticForm,
};
use latk::intlinalg::{hnf, kernel_basis, saturate, snf, IntMatrix};
use latk::lattice::{orthogonal_complement, primitive_closure, Lattice, Sublattice};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, range: i64) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec(-range..=range, rows * cols)
        .prop_map(move |v| IntMatrix::from_i64(&v.chunks(cols).map(<[i64]>::to_vec).collect::<Vec<_>>()))
}

fn shaped(range: i64) -> impl Strategy<Value = IntMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(move |(r, c)| matrix(r, c, range))
}

fn even_gram(max_n: usize) -> impl Strategy<Value = IntMatrix> {
    (1usize..=max_n).prop_flat_map(|n| {
        (proptest::collection::vec(-4i64..=4, n), proptest::collection::vec(-3i64..=3, n * n)).prop_map(move |(d, o)| {
            let mut g = IntMatrix::zeros(n, n);
            for i in 0..n {
                g.set(i, i, 2 * d[i]);
                for j in i + 1..n {
                    g.set(i, j, o[i * n + j]);
                    g.set(j, i, o[i * n + j]);
                }
            }
            g
        })
    })
}

fn nondegenerate(g: &IntMatrix) -> bool {
    let d = g.det().unwrap();
    !d.is_zero() && d.abs() <= BigInt::from(400)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn hnf_is_a_unimodular_echelon_form(m in shaped(9)) {
        let f = hnf(&m).unwrap();
        prop_assert_eq!(&f.u * &m, f.h.clone());
        prop_assert!(f.u.det().unwrap().abs().is_one());
        let mut last_pivot: Option<usize> = None;
        for i in 0..f.rank {
            let p = (0..m.cols()).find(|&j| !f.h.get(i, j).is_zero()).unwrap();
            prop_assert!(last_pivot.is_none_or(|q| p > q));
            prop_assert!(f.h.get(i, p).is_positive());
            for k in 0..i {
                let x = f.h.get(k, p);
                prop_assert!(!x.is_negative() && x < f.h.get(i, p));
            }
            last_pivot = Some(p);
        }
        for i in f.rank..m.rows() {
            prop_assert!(f.h.row(i).iter().all(Zero::is_zero));
        }
        prop_assert_eq!(hnf(&f.h).unwrap().h, f.h);
    }

    #[test]
    fn snf_is_a_divisibility_chain(m in shaped(9)) {
        let f = snf(&m).unwrap();
        prop_assert_eq!(&(&f.u * &m) * &f.v, f.d.clone());
        prop_assert!(f.u.det().unwrap().abs().is_one());
        prop_assert!(f.v.det().unwrap().abs().is_one());
        let d = f.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    prop_assert!(f.d.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn kernels_are_annihilating_and_saturated(m in shaped(6)) {
        let k = kernel_basis(&m).unwrap();
        prop_assert_eq!(k.rows() + m.rank().unwrap(), m.rows());
        if k.rows() > 0 {
            prop_assert!((&k * &m).is_zero());
            prop_assert_eq!(saturate(&k).unwrap(), k.clone());
        }
    }

    #[test]
    fn saturation_contains_and_is_idempotent(m in shaped(6)) {
        let s = saturate(&m).unwrap();
        prop_assert_eq!(saturate(&s).unwrap(), s.clone());
        let sub = Sublattice::spanned_by(Arc::new(Lattice::new(IntMatrix::identity(m.cols())).unwrap()), &m).unwrap();
        for row in m.row_vecs() {
            prop_assert!(latk::lattice::solve_in_span(&s, &row).is_some());
        }
        prop_assert_eq!(sub.rank(), s.rows());
    }

    #[test]
    fn milgram_and_symbol_round_trips(g in even_gram(4).prop_filter("det", nondegenerate)) {
        let l = Lattice::new(g).unwrap();
        let sig = l.signature();
        let want = ((sig.plus as i64 - sig.minus as i64).rem_euclid(8)) as u8;
        let q = discriminant_form(&l).unwrap();
        prop_assert_eq!(signature_mod8(&q).unwrap(), want);
        let sym = canonicalize(&genus_symbol(&l).unwrap()).unwrap();
        prop_assert_eq!(symbol_signature_mod8(&sym).unwrap(), want);
        prop_assert_eq!(canonicalize(&sym).unwrap(), sym.clone());
        prop_assert_eq!(canonicalize(&symbol_of_form(&q).unwrap()).unwrap(), sym.clone());
        let realized = symbol_to_form(&sym).unwrap();
        prop_assert!(fqf_isomorphic_bounded(&realized, &q, 400).unwrap());
        let neg = negate_symbol(&sym).unwrap();
        prop_assert_eq!(canonicalize(&symbol_of_form(&q.negate()).unwrap()).unwrap(), neg.clone());
        prop_assert_eq!(negate_symbol(&neg).unwrap(), sym);
    }

    #[test]
    fn forms_add_like_symbols(a in even_gram(3).prop_filter("det", nondegenerate), b in even_gram(3).prop_filter("det", nondegenerate)) {
        let (la, lb) = (Lattice::new(a).unwrap(), Lattice::new(b).unwrap());
        let qa: FiniteQuadraticForm = discriminant_form(&la).unwrap();
        let qb = discriminant_form(&lb).unwrap();
        let sum = canonicalize(&symbol_of_form(&qa.sum(&qb)).unwrap()).unwrap();
        let direct = canonicalize(&genus_symbol(&la.direct_sum(&lb)).unwrap()).unwrap();
        prop_assert_eq!(sum, direct);
    }

    #[test]
    fn complements_are_primitive_and_orthogonal(
        g in even_gram(4).prop_filter("det", nondegenerate),
        rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 1..3),
    ) {
        let amb = Arc::new(Lattice::new(g).unwrap());
        let n = amb.rank();
        let gens: Vec<Vec<i64>> = rows.into_iter().map(|r| r[..n].to_vec()).collect();
        let span = Sublattice::spanned_by(amb.clone(), &IntMatrix::from_i64(&gens)).unwrap();
        let s = primitive_closure(&amb, &span).unwrap();
        prop_assert!(s.is_primitive());
        let c = orthogonal_complement(&amb, &s).unwrap();
        prop_assert!(c.is_primitive());
        let cross = &(&c.basis().clone() * amb.gram()) * &s.basis().transpose();
        prop_assert!(c.rank() == 0 || s.rank() == 0 || cross.is_zero());
        prop_assert!(c.rank() + s.rank() >= n.min(s.rank() + c.rank()));
        if !s.gram().det().unwrap().is_zero() {
            prop_assert_eq!(c.rank() + s.rank(), n);
        }
    }
}
