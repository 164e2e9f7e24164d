use std::sync::Arc;

use latk::discform::{canonicalize, genus_symbol, negate_symbol};
use latk::intlinalg::IntMatrix;
use latk::lattice::{orthogonal_complement, primitive_closure, Sublattice};
use latk::niemeier::build_niemeier;
use latk::roots::enumerate_roots;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn negated_symbol_of_s_matches_its_complement() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut checked = 0;
    for round in 0..69 {
        let j = round % 23 + 1;
        let amb = Arc::new(build_niemeier(j).unwrap());
        let roots = enumerate_roots(&amb).unwrap();
        let k = rng.gen_range(1..=12);
        let picked: Vec<Vec<i64>> = roots.choose_multiple(&mut rng, k).cloned().collect();
        let gens = IntMatrix::from_i64(&picked);
        let span = Sublattice::spanned_by(amb.clone(), &gens).unwrap();
        let s = primitive_closure(&amb, &span).unwrap();
        let c = orthogonal_complement(&amb, &s).unwrap();
        let qs = genus_symbol(&s.lattice()).unwrap();
        let qc = genus_symbol(&c.lattice()).unwrap();
        assert_eq!(
            negate_symbol(&qs).unwrap(),
            canonicalize(&qc).unwrap(),
            "N_{j}, {k} roots: q_S = {qs}, q_perp = {qc}"
        );
        checked += 1;
    }
    assert!(checked >= 50);
}
