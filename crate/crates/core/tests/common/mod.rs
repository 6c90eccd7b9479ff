#![allow(dead_code)]

use dashu::rational::RBig;
use euler_series::{Expression, Scalar};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

pub fn rat(n: i64, d: u32) -> RBig {
    RBig::from_parts_signed(n.into(), d.into())
}

pub fn rational() -> impl Strategy<Value = RBig> {
    (-12i64..=12, 1u32..=6).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = RBig> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

pub fn positive_rational() -> impl Strategy<Value = RBig> {
    (1i64..=24, 1u32..=6).prop_map(|(n, d)| rat(n, d))
}

/// Coefficients `[c0, c1, ..., cd]` of a polynomial of degree 1 to `max_degree`.
pub fn polynomial(max_degree: usize) -> impl Strategy<Value = Vec<RBig>> {
    (1..=max_degree)
        .prop_flat_map(|d| (prop::collection::vec(rational(), d), nonzero_rational()))
        .prop_map(|(mut low, lead)| {
            low.push(lead);
            low
        })
}

/// `c0 + c1 z + ... + cd z^d` built directly from nodes.
pub fn polynomial_expr(coeffs: &[RBig]) -> Expression {
    let z = Expression::variable();
    coeffs.iter().enumerate().fold(Expression::constant(Scalar::zero()), |acc, (k, c)| {
        let power = Expression::pow(z.clone(), RBig::from(k));
        Expression::add(acc, Expression::mul(Expression::constant(Scalar::Exact(c.clone())), power))
    })
}

pub fn exact(r: &RBig) -> Scalar {
    Scalar::Exact(r.clone())
}

pub fn close(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    (a - b).abs().to_f64() < tol
}
