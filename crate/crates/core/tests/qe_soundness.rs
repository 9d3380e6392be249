mod common;

use common::checks::qe_soundness;
use von_core::field::FieldModel;
use von_core::generic::GenericModel;

#[test]
fn generic_backend_n1() {
    qe_soundness(&mut GenericModel::new(1, 0), 200, 20, 1);
}

#[test]
fn generic_backend_n2() {
    qe_soundness(&mut GenericModel::new(2, 0), 200, 20, 2);
}

#[test]
fn generic_backend_n3() {
    qe_soundness(&mut GenericModel::new(3, 0), 200, 20, 3);
}

#[test]
fn field_backend() {
    qe_soundness(&mut FieldModel::new(2, 0).unwrap(), 150, 10, 4);
}
