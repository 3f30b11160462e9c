use jetcalc::expr::{partial, Generator};
use jetcalc::jet::{euler, frechet, total_t, total_x};
use jetcalc::kawahara::{gke, GKESpec};
use jetcalc::{FunctionSpec, JetExpr, PsdSeries};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = JetExpr> {
    prop_oneof![
        Just(JetExpr::x()),
        Just(JetExpr::t()),
        Just(JetExpr::u()),
        Just(JetExpr::jet(1)),
        Just(JetExpr::jet(2)),
        Just(JetExpr::param("b")),
        Just(JetExpr::fn_sym("f", 0)),
        Just(JetExpr::fn_sym("f", 1)),
        (-4i64..=4).prop_map(JetExpr::int),
    ]
}

fn expr() -> impl Strategy<Value = JetExpr> {
    atom().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), inner).prop_map(|(a, b)| &a - &b),
        ]
    })
}

/// Expressions with a denominator, never zero.
fn fraction() -> impl Strategy<Value = JetExpr> {
    (expr(), atom(), 1i64..=3).prop_map(|(a, d, k)| {
        let den = &(&d * &d) + &JetExpr::int(k);
        a.checked_div(&den).unwrap()
    })
}

fn linear_spec() -> FunctionSpec {
    FunctionSpec::linear(JetExpr::param("alpha"), JetExpr::param("beta"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in fraction(), b in expr(), c in fraction()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).checked_div(&b).unwrap(), a);
        }
    }

    #[test]
    fn display_is_canonical(a in expr(), b in expr()) {
        prop_assert_eq!((&a + &b).to_string(), (&b + &a).to_string());
    }

    #[test]
    fn total_x_is_a_derivation(a in fraction(), b in expr()) {
        prop_assert_eq!(total_x(&(&a * &b)), &(&total_x(&a) * &b) + &(&a * &total_x(&b)));
    }

    #[test]
    fn partials_commute(a in fraction()) {
        let (g, h) = (Generator::Jet(0), Generator::Jet(1));
        prop_assert_eq!(partial(&partial(&a, &g), &h), partial(&partial(&a, &h), &g));
    }

    #[test]
    fn specialization_is_a_differential_homomorphism(a in expr(), b in expr()) {
        let s = linear_spec();
        prop_assert_eq!(s.specialize(&(&a * &b)), &s.specialize(&a) * &s.specialize(&b));
        prop_assert_eq!(s.specialize(&total_x(&a)), total_x(&s.specialize(&a)));
    }

    #[test]
    fn null_lagrangians(a in fraction()) {
        prop_assert!(euler(&total_x(&a)).is_zero());
    }

    #[test]
    fn frechet_is_linear(a in expr(), p in expr(), q in expr()) {
        let lhs = frechet(&a, &(&p + &(&JetExpr::int(3) * &q)));
        prop_assert_eq!(lhs, &frechet(&a, &p) + &(&JetExpr::int(3) * &frechet(&a, &q)));
    }

    #[test]
    fn total_derivatives_commute(a in expr()) {
        let eq = gke(&GKESpec::new(FunctionSpec::Abstract)).unwrap();
        prop_assert_eq!(total_x(&total_t(&a, &eq)), total_t(&total_x(&a), &eq));
    }

    #[test]
    fn adjoint_is_an_involution(a in expr(), b in expr(), d in 0i64..=3) {
        let s = PsdSeries::from_terms([(d, JetExpr::one()), (d - 1, a), (d - 2, b)]);
        let back = s.adjoint_prec(8).adjoint_prec(8);
        let floor = back.floor().unwrap_or(i64::MIN);
        prop_assert_eq!(back.clone(), if floor == i64::MIN { s } else { s.truncated(floor) });
    }
}
