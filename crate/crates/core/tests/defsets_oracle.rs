mod common;

use common::checks::{decomposition_pairs, maximal_oracle};
use common::random_set;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use von_core::defsets::{arrangement, canonical_decomposition, verify_decomposition};
use von_core::field::FieldModel;
use von_core::syntax::Sort;

#[test]
fn maximal_boxes_match_brute_force() {
    assert!(maximal_oracle(150, 21) > 200);
}

#[test]
fn decompositions_verify_and_are_presentation_invariant() {
    decomposition_pairs(120, 5);
}

#[test]
fn field_backend_decompositions_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut m = FieldModel::new(2, 0).unwrap();
    for _ in 0..30 {
        let inst = random_set(&mut m, Sort::BASE, 2, &mut rng);
        let set = arrangement(&mut m, &inst.phi, &inst.params).unwrap();
        let dec = canonical_decomposition(&m, &set);
        verify_decomposition(&mut m, &set, &dec).unwrap();
    }
}
