use proptest::prelude::*;

use lck_core::catalog::builtin_catalog;
use lck_core::exterior::basis_tuples;
use lck_core::hermitian::gram_metric;
use lck_core::scalars::{assignment, rat};
use lck_core::{ComplexStructure, KForm, LieAlgebra, Matrix, Rational, Scalar};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// Polynomials of low degree in `x`, `y`, occasionally divided by another one.
fn poly() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((small_rational(), 0u32..3, 0u32..3), 1..4).prop_map(|terms| {
        let (x, y) = (Scalar::var("x"), Scalar::var("y"));
        terms.into_iter().fold(Scalar::zero(), |acc, (c, i, j)| {
            let m = &x.pow(i as i32).unwrap() * &y.pow(j as i32).unwrap();
            &acc + &(&Scalar::from_rational(c) * &m)
        })
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (poly(), poly(), any::<bool>()).prop_map(|(a, b, div)| {
        if div && !b.is_zero() {
            &a / &b
        } else {
            a
        }
    })
}

fn form(dim: usize, degree: usize) -> impl Strategy<Value = KForm> {
    let tuples = basis_tuples(dim, degree);
    prop::collection::vec(small_rational(), tuples.len()).prop_map(move |cs| {
        tuples.iter().zip(cs).fold(KForm::zero(dim, degree), |acc, (t, c)| {
            acc.add(&KForm::monomial(dim, t, Scalar::from_rational(c)).unwrap())
        })
    })
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(small_rational().prop_map(Scalar::from_rational), dim)
}

fn matrix(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), dim).prop_map(|rows| {
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        Matrix::from_ints(&refs)
    })
}

/// Numeric instances of every catalog algebra, parameters set to 1/3.
fn catalog_algebras() -> Vec<LieAlgebra> {
    builtin_catalog()
        .into_iter()
        .map(|e| {
            let at = e.params.iter().map(|p| (p.clone(), rat(1, 3))).collect();
            e.algebra.instantiate(&at).unwrap()
        })
        .collect()
}

fn sign(p: usize) -> Scalar {
    Scalar::from_int(if p.is_multiple_of(2) { 1 } else { -1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn eval_is_a_homomorphism(a in scalar(), b in scalar(), x in small_rational(), y in small_rational()) {
        let at = assignment([("x", x), ("y", y)]);
        if let (Ok(va), Ok(vb)) = (a.eval(&at), b.eval(&at)) {
            prop_assert_eq!((&a + &b).eval(&at).unwrap(), &va + &vb);
            prop_assert_eq!((&a * &b).eval(&at).unwrap(), &va * &vb);
        }
    }

    #[test]
    fn wedge_graded_commutative(a in form(5, 1), b in form(5, 2), c in form(5, 1)) {
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
        prop_assert_eq!(a.wedge(&c).unwrap(), c.wedge(&a).unwrap().neg());
        prop_assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn wedge_associative(a in form(5, 1), b in form(5, 2), c in form(5, 1)) {
        let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn interior_leibniz(a in form(5, 2), b in form(5, 1), x in vector(5)) {
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        let rhs = a.interior(&x).unwrap().wedge(&b).unwrap()
            .add(&a.wedge(&b.interior(&x).unwrap()).unwrap().scale(&sign(a.degree())));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_functorial(a in form(4, 1), b in form(4, 2), m in matrix(4), n in matrix(4)) {
        let step = a.apply_dual(&m).unwrap().apply_dual(&n).unwrap();
        prop_assert_eq!(step, a.apply_dual(&n.mul(&m)).unwrap());
        let w = a.wedge(&b).unwrap().apply_dual(&m).unwrap();
        prop_assert_eq!(w, a.apply_dual(&m).unwrap().wedge(&b.apply_dual(&m).unwrap()).unwrap());
    }

    #[test]
    fn dual_primal_round_trip(m in matrix(4)) {
        let j = ComplexStructure::from_dual("M", m.clone()).unwrap();
        let back = ComplexStructure::from_primal("M", j.primal().clone()).unwrap();
        prop_assert_eq!(back.dual(), &m);
    }

    #[test]
    fn gram_of_invariant_form_is_symmetric(w in form(4, 2), entry in 0usize..64) {
        let cat = builtin_catalog();
        let js: Vec<ComplexStructure> = cat
            .iter()
            .flat_map(|e| e.structures.iter().filter(|(_, s)| s.params.is_empty()).map(|(_, s)| s.structure.clone()))
            .collect();
        let j = &js[entry % js.len()];
        // average over J to land in the invariant part
        let inv = w.add(&w.apply_dual(j.dual()).unwrap());
        let g = gram_metric(&inv, j).unwrap();
        prop_assert_eq!(g.transpose(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn d_squared_vanishes(a1 in form(4, 1), a2 in form(4, 2)) {
        for g in catalog_algebras() {
            prop_assert!(g.d(&g.d(&a1).unwrap()).unwrap().is_zero(), "{}", g.name());
            prop_assert!(g.d(&g.d(&a2).unwrap()).unwrap().is_zero(), "{}", g.name());
        }
    }

    #[test]
    fn ad_is_a_homomorphism(x in vector(4), y in vector(4)) {
        for g in catalog_algebras() {
            let xy = g.bracket(&x, &y).unwrap();
            let lhs = g.ad_matrix(&xy).unwrap();
            let rhs = g.ad_matrix(&x).unwrap().commutator(&g.ad_matrix(&y).unwrap());
            prop_assert_eq!(lhs, rhs, "{}", g.name());
        }
    }
}
