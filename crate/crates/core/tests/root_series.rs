mod common;

use common::*;
use euler_series::euler::newton_step;
use euler_series::expr::parse_expression;
use euler_series::oracle::{default_tolerance, newton_root};
use euler_series::{
    coefficient_sequence_reversion, coefficient_sequence_symbolic, convergence_diagnostic, root_series, Anchor,
    Error, Scalar, Verdict,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn symbolic_and_reversion_routes_agree(coeffs in polynomial(5), p in rational(), k in 1..=8usize) {
        let e = polynomial_expr(&coeffs);
        let v = exact(&p);
        match coefficient_sequence_symbolic(&e, &v, k) {
            Err(Error::NotReversible { .. }) => {
                prop_assert!(coefficient_sequence_reversion(&e, &v, k).is_err());
            }
            Ok(symbolic) => {
                let reverted = coefficient_sequence_reversion(&e, &v, k).unwrap();
                prop_assert_eq!(symbolic.derivs(), reverted.derivs());
                prop_assert!(symbolic.derivs().iter().all(Scalar::is_exact));
            }
            Err(other) => prop_assert!(false, "{}", other),
        }
    }

    #[test]
    fn first_partial_sum_is_the_newton_step(coeffs in polynomial(5), p in rational()) {
        let e = polynomial_expr(&coeffs);
        let v = exact(&p);
        let Ok(series) = root_series(&e, &v, 3) else { return Ok(()) };
        let a = series.anchor();
        let newton = &v - &a.value().checked_div(a.derivative()).unwrap();
        prop_assert_eq!(&series.partial_sums()[1], &newton);
        prop_assert_eq!(series.partial_sums()[1].clone(), newton_step(&e, &v).unwrap());
    }

    #[test]
    fn p_inverts_the_slope(coeffs in polynomial(5), p in rational()) {
        let e = polynomial_expr(&coeffs);
        let Ok(c) = coefficient_sequence_symbolic(&e, &exact(&p), 1) else { return Ok(()) };
        prop_assert!((c.p().unwrap() * c.anchor().derivative()).is_one());
    }

    #[test]
    fn anchoring_at_a_root_gives_no_corrections(root in rational(), rest in polynomial(3), k in 1..=8usize) {
        // (z - root) * (1 + rest(z)^2) has a simple root at `root`
        let z = euler_series::Expression::variable();
        let factor = euler_series::Expression::sub(z, euler_series::Expression::constant(exact(&root)));
        let rest = polynomial_expr(&rest);
        let cofactor = euler_series::Expression::add(
            euler_series::Expression::constant(Scalar::one()),
            euler_series::Expression::mul(rest.clone(), rest),
        );
        let e = euler_series::Expression::mul(factor, cofactor);
        let v = exact(&root);
        let series = root_series(&e, &v, k).unwrap();
        prop_assert!(series.terms()[1..].iter().all(Scalar::is_zero));
        prop_assert!(series.partial_sums().iter().all(|s| *s == v));
        prop_assert_eq!(convergence_diagnostic(&series).verdict, Verdict::Converging);
    }
}

#[test]
fn p_matches_the_inverse_function_slope() {
    // v(V) solves z^2 - 10 = V; its slope at V(3) = -1 is p
    let e = parse_expression("z^2 - 10").unwrap();
    let v = int(3).promote(128);
    let c = coefficient_sequence_symbolic(&e, &v, 1).unwrap();
    let inverse = |target: &Scalar| {
        let shifted = parse_expression(&format!("z^2 - 10 - ({target})")).unwrap();
        newton_root(&shifted, &v, &default_tolerance(), 100).unwrap().value
    };
    let mut errors = Vec::new();
    for dv in [q(1, 1000), q(1, 10_000)] {
        let up = inverse(&(int(-1) + &dv));
        let down = inverse(&(int(-1) - &dv));
        let slope = (up - down).checked_div(&(int(2) * &dv)).unwrap();
        let err = (&slope - c.p().unwrap()).abs().to_f64();
        assert!(err < 10.0 * dv.to_f64().powi(2), "{err}");
        errors.push(err);
    }
    // the error is quadratic in the step
    assert!(errors[1] < errors[0] / 50.0);
}

#[test]
fn nearby_anchors_reach_the_same_limit() {
    let e = parse_expression("z^2 - 10").unwrap();
    let a = root_series(&e, &int(3).promote(128), 16).unwrap();
    let b = root_series(&e, &Scalar::parse("3.2", 128).unwrap(), 16).unwrap();
    assert_eq!(convergence_diagnostic(&a).verdict, Verdict::Converging);
    assert_eq!(convergence_diagnostic(&b).verdict, Verdict::Converging);
    assert!(close(a.value(), b.value(), 1e-12));
}

#[test]
fn anchor_records_value_and_slope() {
    let e = parse_expression("z^3 - 3*z - 2").unwrap();
    let a = Anchor::new(&e, int(3)).unwrap();
    assert_eq!((a.value(), a.derivative()), (&int(16), &int(24)));
    assert_eq!(Anchor::new(&e, int(1)).unwrap_err(), Error::NotReversible { round: None });
}
