use num_complex::Complex64;
use proptest::prelude::*;
use wpfeq::elliptic::{EllipticContext, JetValues};
use wpfeq::jet::*;

type P = DiffPolynomial;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exp_jets(x: Complex64, order: usize) -> JetValues {
    JetValues::new(x, vec![x.exp(); order + 1])
}

#[test]
fn addet_vanishes_on_exponential_jets() {
    let p = build_addet(1, 2).unwrap();
    for (x, y) in [(c(0.3, 0.1), c(-0.7, 0.4)), (c(1.1, -0.2), c(0.5, 0.9))] {
        let (v, scale) = p.evaluate_scaled(&exp_jets(x, 5), &exp_jets(y, 5)).unwrap();
        assert!(v.norm() <= 1e-10 * scale.max(1.0), "{v} vs {scale}");
    }
}

#[test]
fn addet_vanishes_on_wp_jets() {
    let ctx = EllipticContext::from_periods(c(2.0, 0.0), c(0.4, 1.7)).unwrap();
    let p = build_addet(1, 2).unwrap();
    for (x, y) in [(c(0.37, 0.21), c(-0.52, 0.44)), (c(0.81, -0.3), c(0.23, 0.61))] {
        let fx = ctx.jets(x, 5).unwrap();
        let gy = ctx.jets(y, 5).unwrap();
        let (v, scale) = p.evaluate_scaled(&fx, &gy).unwrap();
        assert!(v.norm() <= 1e-10 * scale, "{v} vs {scale}");
    }
}

#[test]
fn addet_is_deterministic_and_antisymmetric_in_the_first_columns() {
    let a = build_addet(1, 2).unwrap();
    assert_eq!(a, build_addet(1, 2).unwrap());
    // swapping k and l negates columns 1, 2 and the third column
    assert_eq!(build_addet(2, 1).unwrap(), a);
}

#[test]
fn abc_bar_consistency() {
    for k in 1..5 {
        let (ak, bk, ck) = build_abc(k).unwrap();
        let (an, bn, cn) = build_abc(k + 1).unwrap();
        assert_eq!(an, ak.derive(Direction::Bar).unwrap());
        assert_eq!(bn, bk.derive(Direction::Bar).unwrap());
        assert_eq!(cn, ck.derive(Direction::Bar).unwrap());
    }
}

#[test]
fn factorization_holds_and_rechecks() {
    let r = factorization_check();
    assert!(r.holds, "{}", r.note);
    assert!(r.cofactor.as_single_term().is_some());
    assert!(r.recheck());
}

#[test]
fn factorization_control_with_corrupted_factor() {
    let bad = t2_poly() + P::f(0) * P::g(2);
    let r = factorization_check_against(&t1_poly(), &bad);
    assert!(!r.holds);
    assert!(!r.recheck());
}

#[test]
fn factor_rewrites_hold_with_unit_cofactor() {
    let (r1, r2) = factor_rewrite_check();
    for r in [&r1, &r2] {
        assert!(r.holds, "{}", r.note);
        assert_eq!(r.cofactor, P::one());
        assert!(r.recheck());
    }
}

#[test]
fn factor_rewrite_control_with_x_derivative() {
    let (r1, _) = factor_rewrite_check_with(Direction::X).unwrap();
    assert!(!r1.holds);
}

#[test]
fn eqf_holds() {
    let r = eqf_check().unwrap();
    assert!(r.holds, "{}", r.note);
    assert!(r.recheck());
    let (m, _) = r.cofactor.as_single_term().unwrap();
    assert_eq!(m.degree(), 0);
}

#[test]
fn eqf_control_with_corrupted_product() {
    let bad = eqf_product() + P::f(5);
    assert!(!eqf_check_against(&bad).unwrap().holds);
}

#[test]
fn eqf_factors_on_known_solutions() {
    let prod = eqf_product();
    let f = P::f;
    let first = f(3) * f(1) - f(2).pow(2);
    let second = f(5) * f(1).pow(2) - f(3).pow(2) * f(1) - P::int(3) * f(2) * f(4) * f(1)
        + P::int(3) * f(2).pow(2) * f(3);
    assert_eq!(&first * &second, prod);

    let e = exp_jets(c(0.4, 0.0), 5);
    assert_eq!(first.evaluate(&e, &e).unwrap(), c(0.0, 0.0));

    // 1/x² at x = 1
    let inv_sq = JetValues::new(
        c(1.0, 0.0),
        [1.0, -2.0, 6.0, -24.0, 120.0, -720.0].iter().map(|&v| c(v, 0.0)).collect(),
    );
    assert_eq!(second.evaluate(&inv_sq, &inv_sq).unwrap(), c(0.0, 0.0));
}

#[test]
fn ode_elimination_holds() {
    let r = ode_elimination_check();
    assert!(r.holds, "{}", r.note);
    assert!(r.recheck());
    assert_eq!(r.identities.len(), 6);
}

#[test]
fn ode_elimination_control_with_corrupted_f4() {
    let r = ode_elimination_check_with(&P::f(1));
    assert!(!r.holds);
    assert!(r.note.contains("p3"), "{}", r.note);
}

#[test]
fn p3_formula_reduces_directly() {
    // f₁f₄ − f₂f₃ = 3p₃f₁³ once f₃, f₄ come from the cubic ODE
    let r = ode_elimination_check();
    let p3 = r.identities.iter().find(|i| i.label.starts_with("p3")).unwrap();
    assert!(p3.holds());
}

#[test]
fn eta_relations_match_listed_coefficients() {
    let r = eta_expansion_check(5).unwrap();
    assert!(r.holds, "{}", r.note);
    assert!(r.recheck());
    let c1 = r.identities.iter().find(|i| i.label == "c1 at eta^1").unwrap();
    assert_eq!(c1.rhs, P::f(0) * P::f(2) - P::f(1).pow(2));
    let c2 = r.identities.iter().find(|i| i.label == "c2 at eta^3").unwrap();
    assert_eq!(
        c2.rhs,
        P::int(-4) * P::f(1) * P::f(3) + P::f(0) * P::f(4) + P::int(3) * P::f(2).pow(2)
    );
}

#[test]
fn eta_control_with_wrong_coefficient() {
    let f = P::f;
    let bad = vec![
        (f(1), f(2), f(0) * f(2) - f(1).pow(2)),
        (f(3), f(4), P::int(-3) * f(1) * f(3) + f(0) * f(4) + P::int(3) * f(2).pow(2)),
    ];
    assert!(!eta_expansion_check_against(5, &bad).unwrap().holds);
    assert!(matches!(eta_expansion_check(3), Err(JetError::TruncationTooLow(3))));
}

#[test]
fn run_all_reports_every_check() {
    let all = run_all();
    assert_eq!(all.len(), 6);
    assert!(all.iter().all(|r| r.holds && r.recheck()));
}

fn arb_var() -> impl Strategy<Value = Var> {
    prop_oneof![(0u8..4).prop_map(Var::F), (0u8..4).prop_map(Var::G)]
}

fn arb_poly() -> impl Strategy<Value = P> {
    prop::collection::vec((-6i64..=6, prop::collection::vec((arb_var(), 1u32..3), 0..3)), 0..5).prop_map(|terms| {
        terms.into_iter().fold(P::zero(), |acc, (k, vars)| {
            let mono = vars.into_iter().fold(P::int(k), |m, (v, e)| m * P::var(v).pow(e));
            acc + mono
        })
    })
}

fn arb_jets() -> impl Strategy<Value = JetValues> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 7)
        .prop_map(|v| JetValues::new(c(0.0, 0.0), v.into_iter().map(|(a, b)| c(a, b)).collect()))
}

proptest! {
    #[test]
    fn ring_laws(a in arb_poly(), b in arb_poly(), d in arb_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &d, &a + (&b + &d));
        prop_assert_eq!((&a * &b) * &d, &a * (&b * &d));
        prop_assert_eq!(&a * (&b + &d), &a * &b + &a * &d);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn derive_is_a_derivation(a in arb_poly(), b in arb_poly()) {
        for dir in [Direction::X, Direction::Y, Direction::Bar] {
            let lhs = (&a * &b).derive(dir).unwrap();
            let rhs = a.derive(dir).unwrap() * &b + &a * b.derive(dir).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
        let xy = a.derive(Direction::X).unwrap().derive(Direction::Y).unwrap();
        let yx = a.derive(Direction::Y).unwrap().derive(Direction::X).unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn exact_division_inverts_multiplication(a in arb_poly(), b in arb_poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn evaluate_is_a_homomorphism(a in arb_poly(), b in arb_poly(), fj in arb_jets(), gj in arb_jets()) {
        let (pa, sa) = a.evaluate_scaled(&fj, &gj).unwrap();
        let (pb, sb) = b.evaluate_scaled(&fj, &gj).unwrap();
        let prod = (&a * &b).evaluate(&fj, &gj).unwrap();
        let sum = (&a + &b).evaluate(&fj, &gj).unwrap();
        prop_assert!((prod - pa * pb).norm() <= 1e-12 * (sa * sb).max(1.0));
        prop_assert!((sum - pa - pb).norm() <= 1e-12 * (sa + sb).max(1.0));
    }
}
