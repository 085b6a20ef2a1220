use lck_core::catalog::builtin_catalog;
use lck_core::expr::parse_form;
use lck_core::lck::morse_novikov_betti;
use lck_core::solver::{degeneracy_certificate, lck_space, twisted_closed_space, SolverError};
use lck_core::{Assignment, ComplexStructure, KForm, LieAlgebra};

fn entry(id: &str) -> (LieAlgebra, ComplexStructure) {
    let cat = builtin_catalog();
    let e = cat.iter().find(|e| e.id == id).unwrap();
    let j = e.structures[0].1.structure.clone();
    (e.algebra.clone(), j)
}

fn form(g: &LieAlgebra, src: &str, params: &[&str]) -> KForm {
    let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
    parse_form(src, g.dim(), 1, &params).unwrap()
}

#[test]
fn r41_lee_minus_two_e4_is_obstructed() {
    let (g, j) = entry("r41");
    let space = lck_space(&g, &form(&g, "-2*e4", &[]), &j).unwrap();
    assert!(!space.is_empty());
    assert!(degeneracy_certificate(&space, &j, 1).unwrap());
}

#[test]
fn h4_both_families_are_obstructed() {
    let (g, j) = entry("h4");
    for theta in ["-3/2*e4", "theta4*e4"] {
        let space = lck_space(&g, &form(&g, theta, &["theta4"]), &j).unwrap();
        assert!(degeneracy_certificate(&space, &j, 1).unwrap(), "{theta}");
    }
}

#[test]
fn rh3_generic_is_not_obstructed_by_e3() {
    let (g, j) = entry("rh3");
    let theta = form(&g, "theta1*e1 + theta2*e2 + theta4*e4", &["theta1", "theta2", "theta4"]);
    assert_eq!(twisted_closed_space(&g, &theta).unwrap().len(), 3);
    let space = lck_space(&g, &theta, &j).unwrap();
    assert_eq!(space.len(), 1);
    assert!(!degeneracy_certificate(&space, &j, 3).unwrap());
}

#[test]
fn certificate_index_is_checked() {
    let (g, j) = entry("rh3");
    let space = lck_space(&g, &form(&g, "-e4", &[]), &j).unwrap();
    assert!(matches!(degeneracy_certificate(&space, &j, 5), Err(SolverError::IndexOutOfRange(5, 4))));
    assert!(matches!(degeneracy_certificate(&space, &j, 0), Err(SolverError::IndexOutOfRange(0, 4))));
}

#[test]
fn rr31_replay() {
    let (g, j) = entry("rr31");
    let theta = form(&g, "-2*e1", &[]);
    assert_eq!(twisted_closed_space(&g, &theta).unwrap().len(), 4);
    assert_eq!(lck_space(&g, &theta, &j).unwrap().len(), 2);
}

#[test]
fn morse_novikov_rh3() {
    let (g, _) = entry("rh3");
    let at = Assignment::new();
    assert_eq!(morse_novikov_betti(&g, &form(&g, "-e4", &[]), &at).unwrap(), vec![0; 5]);
    assert_eq!(morse_novikov_betti(&g, &KForm::zero(4, 1), &at).unwrap(), vec![1, 3, 4, 3, 1]);
}
