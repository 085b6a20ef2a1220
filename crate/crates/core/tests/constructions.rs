use lck_core::catalog::builtin_catalog;
use lck_core::constructions::*;
use lck_core::lck::{vaisman_test, verify_lck, LcKStructure};
use lck_core::scalars::rat;
use lck_core::{Assignment, Matrix, Rational, Scalar};

fn family(entry: &str, id: &str) -> LcKStructure {
    let cat = builtin_catalog();
    let e = cat.iter().find(|e| e.id == entry).expect("entry");
    e.family(id).expect("family").structure.clone()
}

fn assert_not_vaisman(s: &LcKStructure) {
    for w in &s.witnesses {
        let out = vaisman_test(s, w).unwrap();
        assert!(!out.vaisman, "{} is Vaisman at {w:?}", s.id);
    }
}

fn cs(n: usize) -> Vec<Rational> {
    [rat(1, 1), rat(-2, 1), rat(1, 3)][..n].to_vec()
}

#[test]
fn trivial_rho_extension_of_rh3() {
    let base = family("rh3", "rh3");
    let spec = LcKExtensionSpec { rho: vec![Matrix::zeros(2, 2); 4], base };
    let s = lck_extension(&spec).unwrap();
    assert_eq!(s.algebra.dim(), 6);
    for w in &s.witnesses {
        assert!(verify_lck(&s).unwrap().passed(), "{w:?}");
    }
    // rh3 is nilpotent, so tr ad = 0 != 1 * theta
    assert!(!unimodularity_check(&spec, &Assignment::new()).unwrap());
    assert!(!s.algebra.is_unimodular());
}

#[test]
fn ot_algebras_are_unimodular_lck() {
    for n in 1..=3 {
        let s = ot_algebra(&cs(n)).unwrap();
        assert!(verify_lck(&s).unwrap().passed());
        assert!(s.algebra.is_unimodular(), "ot{n}");
        assert!(s.algebra.jacobi_holds());
    }
}

#[test]
fn aff_extension_matches_ot() {
    for n in 1..=3 {
        let spec = aff_ot_spec(&cs(n)).unwrap();
        assert!(unimodularity_check(&spec, &Assignment::new()).unwrap());
        let ext = lck_extension(&spec).unwrap();
        assert!(ext.algebra.is_unimodular());
        let ot = ot_algebra(&cs(n)).unwrap();
        let iso = check_isomorphism(&ext, &ot, &ot_identification(n)).unwrap();
        assert!(iso.all(), "n = {n}: {iso:?}");
        assert_not_vaisman(&ext);
    }
}

#[test]
fn wrong_identification_is_detected() {
    let ext = lck_extension(&aff_ot_spec(&cs(2)).unwrap()).unwrap();
    let ot = ot_algebra(&cs(2)).unwrap();
    let mut m = ot_identification(2);
    // swap the images of x_1 and y_1
    m.set(0, 0, Scalar::zero());
    m.set(1, 2, Scalar::zero());
    m.set(1, 0, Scalar::one());
    m.set(0, 2, Scalar::one());
    assert!(!check_isomorphism(&ext, &ot, &m).unwrap().all());
}

#[test]
fn rho_must_be_hermitian() {
    let mut spec = aff_ot_spec(&cs(1)).unwrap();
    spec.rho[0] = Matrix::from_ints(&[&[1, 0], &[0, 1]]);
    assert_eq!(lck_extension(&spec).unwrap_err(), ConstructionError::RhoNotSkew(1));
    spec.rho[0] = Matrix::zeros(2, 2);
    spec.rho[1] = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
    assert_eq!(lck_extension(&spec).unwrap_err(), ConstructionError::RhoOnCommutator);
}

#[test]
fn rho_must_commute_with_fiber_structure() {
    let mut spec = aff_ot_spec(&cs(2)).unwrap();
    let mut r = Matrix::zeros(4, 4);
    r.set(0, 2, Scalar::from_int(-1));
    r.set(2, 0, Scalar::one());
    r.set(1, 2, Scalar::one());
    r.set(2, 1, Scalar::from_int(-1));
    spec.rho = vec![Matrix::zeros(4, 4); 4];
    spec.rho[0] = r;
    assert!(matches!(lck_extension(&spec), Err(ConstructionError::RhoNotCommuting(1))));
}

#[test]
fn dprime_extension() {
    let (delta, sigma) = (rat(1, 1), rat(2, 1));
    for n in 1..=3usize {
        let a: Vec<Rational> = (1..=n as i64).map(|i| rat(i, 2)).collect();
        // 2 delta = n mu
        let mu = rat(2, n as i64);
        let spec = dprime_extension_spec(&delta, &mu, &sigma, &a).unwrap();
        let s = lck_extension(&spec).unwrap();
        assert_eq!(s.algebra.dim(), 4 + 2 * n);
        assert!(unimodularity_check(&spec, &Assignment::new()).unwrap());
        assert!(s.algebra.is_unimodular());
        assert_not_vaisman(&s);

        let off = dprime_extension_spec(&delta, &rat(3, 1), &sigma, &a).unwrap();
        let s = lck_extension(&off).unwrap();
        assert!(!unimodularity_check(&off, &Assignment::new()).unwrap());
        assert!(!s.algebra.is_unimodular());
    }
}

#[test]
fn cokahler_example_is_lck() {
    let data = example_cokahler().unwrap();
    let s = cokahler_mapping_torus(&data).unwrap();
    assert!(verify_lck(&s).unwrap().passed());
    assert_not_vaisman(&s);
}

#[test]
fn cokahler_torus_is_rp2() {
    let s = cokahler_mapping_torus(&example_cokahler().unwrap()).unwrap();
    let cat = builtin_catalog();
    let rp2 = cat.iter().find(|e| e.id == "rp2").unwrap();
    let m = torus_identification();
    assert!(!m.det().is_zero());
    assert!(s.algebra.dual_map_is_homomorphism(&rp2.algebra, &m).unwrap());
    // J corresponds to J2 with (a, b) = (0, -2)
    let at: Assignment = [("a".to_string(), rat(0, 1)), ("b".to_string(), rat(-2, 1))].into();
    let j2 = rp2.structure("J2").unwrap().structure.substitute(&at).unwrap();
    assert_eq!(m.mul(j2.dual()), s.j.dual().mul(&m));
}

#[test]
fn cokahler_scaled_derivation() {
    let mut data = example_cokahler().unwrap();
    data.d = Matrix::from_ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
    data.alpha = Scalar::from_int(2);
    let s = cokahler_mapping_torus(&data).unwrap();
    assert_eq!(s.theta.coeff(&[4]), Scalar::from_int(-2));
}

#[test]
fn cokahler_rejects_bad_derivations() {
    let mut data = example_cokahler().unwrap();
    data.alpha = Scalar::from_int(2);
    let err = cokahler_mapping_torus(&data).unwrap_err();
    assert!(matches!(err, ConstructionError::DNotCompatible(_)), "{err:?}");

    // a pure rotation preserves omega, so alpha would be zero
    let rot = rotation_cokahler([[0, -1], [1, 0]], Scalar::zero()).unwrap();
    assert_eq!(cokahler_mapping_torus(&rot).unwrap_err(), ConstructionError::AlphaZero);
    let rot = rotation_cokahler([[0, -1], [1, 0]], Scalar::one()).unwrap();
    let err = cokahler_mapping_torus(&rot).unwrap_err();
    assert!(matches!(err, ConstructionError::DNotCompatible(_)), "{err:?}");
}

#[test]
fn cokahler_data_is_checked() {
    let mut data = example_cokahler().unwrap();
    data.xi[2] = Scalar::from_int(2);
    assert_eq!(
        cokahler_mapping_torus(&data).unwrap_err(),
        ConstructionError::NotCoKaehler(CoKaehlerCondition::ReebNormalized)
    );
    let mut data = example_cokahler().unwrap();
    data.metric.set(0, 0, Scalar::from_int(2));
    assert_eq!(
        cokahler_mapping_torus(&data).unwrap_err(),
        ConstructionError::NotCoKaehler(CoKaehlerCondition::MetricCompatible)
    );
}

#[test]
fn semidirect_checks_derivation() {
    let rh3 = family("rh3", "rh3").algebra;
    let bad = Matrix::from_ints(&[&[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
    assert!(matches!(
        semidirect_extension(&rh3, &Action::Derivation(bad)),
        Err(ConstructionError::NotADerivation { .. })
    ));
    let good = Matrix::from_ints(&[&[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 0]]);
    let g = semidirect_extension(&rh3, &Action::Derivation(good)).unwrap();
    assert!(g.jacobi_holds());
    assert_eq!(g.dim(), 5);
}
