mod common;

use common::checks::{sentence_suite, suite_agreement};
use von_core::generic::GenericModel;
use von_core::model::{eval, Assignment};

#[test]
fn suite_has_enough_tagged_sentences() {
    let suite = sentence_suite();
    assert!(suite.len() >= 25);
    for tag in ["PAPER", "TRIVIAL", "DERIVED"] {
        assert!(suite.iter().any(|e| e.tag == tag), "no {tag} entries");
    }
}

#[test]
fn decide_matches_the_field_model() {
    suite_agreement();
}

#[test]
fn generic_model_agrees_too() {
    let mut m = GenericModel::new(2, 0);
    for e in sentence_suite() {
        assert_eq!(eval(&mut m, &e.sentence, &Assignment::new()).unwrap(), e.expected, "{}", e.sentence);
    }
}
