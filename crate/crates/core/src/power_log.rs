//! Series for powers `z^n` of the root and for its natural logarithm.
//!
//! The power series uses the same construction as the root series with
//! `v^n` in place of `v`: `P = d(v^n)/dV`, `Q = dP/dV`, ... and
//!
//! ```text
//! z^n = v^n - V P + V^2 Q/2 - V^3 R/6 + ...
//! ```
//!
//! Every correction term carries a factor `n`. Dividing it out and letting
//! `n -> 0` gives `Omega = ln z - ln v`, so `ln z = ln v + Omega` and
//! `z^n = v^n exp(n Omega)`.
//!
//! The module also carries the closed-form coefficient tables of the
//! classic worked families, used to check the generic engines.

use dashu::rational::RBig;

use crate::error::{DomainErrorKind, Error, Result};
use crate::euler::{with_chain, Anchor, CoefficientSequence, SeriesApproximation};
use crate::expr::{operative_precision, Expression};
use crate::jet::{expansion_mode, taylor_expand, Jet};
use crate::scalar::{Scalar, DEFAULT_PRECISION};

/// Coefficients `P, Q, R, S, T, ...` of the series for `z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCoefficientSequence {
    anchor: Anchor,
    exponent: RBig,
    leading: Scalar,
    derivs: Vec<Scalar>,
}

impl PowerCoefficientSequence {
    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    pub fn exponent(&self) -> &RBig {
        &self.exponent
    }

    /// `v^n`, the first term of the series.
    pub fn leading(&self) -> &Scalar {
        &self.leading
    }

    pub fn order(&self) -> usize {
        self.derivs.len()
    }

    /// `[P, Q, R, ...]`.
    pub fn derivs(&self) -> &[Scalar] {
        &self.derivs
    }
}

/// `D_1 = n v^(n-1) / Z'(v)`, `D_(k+1) = D_k' / Z'`, evaluated at `v`.
///
/// Non-integer `n` needs `v > 0` and produces floats.
pub fn power_coefficient_sequence(
    equation: &Expression,
    v: &Scalar,
    n: &RBig,
    order: usize,
) -> Result<PowerCoefficientSequence> {
    if !n.is_int() && v.signum() <= 0 {
        return Err(match v.signum() {
            0 => DomainErrorKind::DivisionByZero,
            _ => DomainErrorKind::FractionalPowerOfNegative,
        }
        .into());
    }
    let z = Expression::variable();
    let numerator = Expression::mul(
        Expression::constant(Scalar::Exact(n.clone())),
        Expression::pow(z, n - RBig::ONE),
    );
    let (anchor, derivs) = with_chain(equation, numerator, order, |chain| -> Result<_> {
        let anchor = chain.anchor(v.clone())?;
        let derivs = chain.evaluate(&anchor, order)?;
        Ok((anchor, derivs))
    })?;
    let precision = operative_precision(equation, v);
    let mut leading = anchor.v().pow_rational(n, precision)?;
    let mut derivs = derivs;
    if !n.is_int() || equation.requires_float() || !v.is_exact() {
        promote_all(&mut leading, &mut derivs, precision);
    }
    Ok(PowerCoefficientSequence { anchor, exponent: n.clone(), leading, derivs })
}

/// Puts a whole sequence in float mode, so that values which happen to be
/// exact (such as `8^(1/2 + 1/2)`) don't mix modes.
fn promote_all(leading: &mut Scalar, derivs: &mut [Scalar], precision: usize) {
    *leading = leading.promote(precision);
    for d in derivs.iter_mut() {
        *d = d.promote(precision);
    }
}

/// `z^n = v^n - V P + V^2 Q / 2 - ...`
pub fn assemble_power_series(coeffs: &PowerCoefficientSequence) -> SeriesApproximation {
    SeriesApproximation::from_derivatives(coeffs.anchor.clone(), coeffs.leading.clone(), &coeffs.derivs)
}

/// Terms of `Omega = ln z - ln v`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSeries {
    anchor: Anchor,
    terms: Vec<Scalar>,
    omega: Scalar,
}

impl OmegaSeries {
    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// `terms[0]` is zero; `terms[k]` is the order-`k` contribution.
    pub fn terms(&self) -> &[Scalar] {
        &self.terms
    }

    /// Sum of all terms.
    pub fn omega(&self) -> &Scalar {
        &self.omega
    }

    /// Running sums of the terms.
    pub fn partial_sums(&self) -> Vec<Scalar> {
        let mut acc = Scalar::zero();
        self.terms
            .iter()
            .map(|t| {
                acc = &acc + t;
                acc.clone()
            })
            .collect()
    }
}

/// `Omega` through order `order`: the jet of `ln(v + t) - ln v` composed
/// with the reverted jet of `Z` about `v`, evaluated at the step `t = -V`.
///
/// Exact when `Z` is rational and `v` is exact.
pub fn omega_series(equation: &Expression, v: &Scalar, order: usize) -> Result<OmegaSeries> {
    if v.signum() <= 0 {
        return Err(DomainErrorKind::LogNonPositive.into());
    }
    let anchor = Anchor::new(equation, v.clone())?;
    let mode = expansion_mode(equation, v);
    let zero = mode.coerce(&Scalar::zero())?;
    if order == 0 {
        return Ok(OmegaSeries { anchor, terms: vec![zero.clone()], omega: zero });
    }
    let inverse = taylor_expand(equation, v, order)?
        .with_constant(Scalar::zero())?
        .revert()?;
    let log_ratio = Jet::variable(mode.coerce(v)?, order).ln_ratio()?;
    let composed = log_ratio.compose(&inverse)?;

    let step = -anchor.value();
    let mut power = mode.coerce(&Scalar::one())?;
    let mut terms = Vec::with_capacity(order + 1);
    for c in composed.coeffs() {
        terms.push(c * &power);
        power = power * &step;
    }
    let omega = terms.iter().fold(zero, |acc, t| acc + t);
    Ok(OmegaSeries { anchor, terms, omega })
}

/// `ln z = ln v + Omega`, in floating point.
pub fn log_series(equation: &Expression, v: &Scalar, order: usize) -> Result<Scalar> {
    let omega = omega_series(equation, v, order)?;
    let precision = operative_precision(equation, v);
    Ok(v.ln(precision)? + omega.omega())
}

/// `|S - v^n exp(n Omega)|` where `S` is the order-`order` partial sum of the
/// `z^n` series and `Omega` that of the logarithm series.
pub fn exp_identity_residual(equation: &Expression, v: &Scalar, n: &RBig, order: usize) -> Result<Scalar> {
    let power = assemble_power_series(&power_coefficient_sequence(equation, v, n, order)?);
    let omega = omega_series(equation, v, order)?;
    let precision = operative_precision(equation, v);
    let n_omega = Scalar::Exact(n.clone()) * omega.omega();
    let rhs = v.pow_rational(n, precision)? * n_omega.exp(precision)?;
    Ok((power.value() - &rhs).abs())
}

/// Equations whose series coefficients are known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedFormFamily {
    /// `z^2 = b^2 + c`, anchored at `v = b`.
    SqrtShift { b: RBig, c: RBig },
    /// `z^n = b^n + c`, anchored at `v = b`.
    NthRootShift { b: RBig, c: RBig, n: u32 },
    /// `z^3 = z - 1`.
    CubicExample,
    /// `z^lambda = a`, with the series for `z^n`.
    GeneralPower { lambda: RBig, a: RBig, n: RBig },
}

/// Closed-form coefficients: a root sequence or a power sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyCoefficients {
    Root(CoefficientSequence),
    Power(PowerCoefficientSequence),
}

impl FamilyCoefficients {
    pub fn derivs(&self) -> &[Scalar] {
        match self {
            FamilyCoefficients::Root(c) => c.derivs(),
            FamilyCoefficients::Power(c) => c.derivs(),
        }
    }

    pub fn anchor(&self) -> &Anchor {
        match self {
            FamilyCoefficients::Root(c) => c.anchor(),
            FamilyCoefficients::Power(c) => c.anchor(),
        }
    }
}

/// Orders through which the cubic example's coefficients are tabulated.
pub const CUBIC_TABLE_ORDER: usize = 4;

impl ClosedFormFamily {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidFamily(m.to_string()));
        match self {
            ClosedFormFamily::SqrtShift { b, .. } if b.is_zero() => fail("b must be nonzero"),
            ClosedFormFamily::NthRootShift { b, .. } if b.is_zero() => fail("b must be nonzero"),
            ClosedFormFamily::NthRootShift { n, .. } if *n == 0 => fail("n must be at least 1"),
            ClosedFormFamily::GeneralPower { lambda, .. } if lambda.is_zero() => fail("lambda must be nonzero"),
            _ => Ok(()),
        }
    }

    /// The family's equation `Z(z)`.
    pub fn equation(&self) -> Expression {
        let z = Expression::variable();
        match self {
            ClosedFormFamily::SqrtShift { b, c } => {
                Expression::power_minus(RBig::from(2), Scalar::Exact(b.sqr() + c))
            }
            ClosedFormFamily::NthRootShift { b, c, n } => {
                Expression::power_minus(RBig::from(*n), Scalar::Exact(b.pow(*n as usize) + c))
            }
            ClosedFormFamily::CubicExample => Expression::add(
                Expression::sub(Expression::pow(z.clone(), RBig::from(3)), z),
                Expression::constant(Scalar::one()),
            ),
            ClosedFormFamily::GeneralPower { lambda, a, .. } => {
                Expression::power_minus(lambda.clone(), Scalar::Exact(a.clone()))
            }
        }
    }

    /// Natural anchor `v = b` of the shifted families.
    pub fn anchor(&self) -> Option<Scalar> {
        match self {
            ClosedFormFamily::SqrtShift { b, .. } | ClosedFormFamily::NthRootShift { b, .. } => {
                Some(Scalar::Exact(b.clone()))
            }
            _ => None,
        }
    }

    /// Exponent of the power series, for the power family.
    pub fn power_exponent(&self) -> Option<&RBig> {
        match self {
            ClosedFormFamily::GeneralPower { n, .. } => Some(n),
            _ => None,
        }
    }
}

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

/// `(-1)^(k+1)`.
fn alternating(k: usize) -> Scalar {
    if k % 2 == 1 {
        int(1)
    } else {
        int(-1)
    }
}

/// Coefficients of `family` at anchor `v` from the family's closed
/// formulas, bypassing the generic engines.
pub fn closed_form_coefficients(family: &ClosedFormFamily, v: &Scalar, order: usize) -> Result<FamilyCoefficients> {
    family.validate()?;
    match family {
        ClosedFormFamily::SqrtShift { b, c } => {
            // p = 1/2v, q = -1/4v^3, r = 3/8v^5, s = -3.5/16v^7, t = 3.5.7/32v^9
            let value = v * v - Scalar::Exact(b.sqr() + c);
            let anchor = Anchor::from_parts(v.clone(), value, int(2) * v)?;
            let mut odd_product = int(1);
            let mut derivs = Vec::with_capacity(order);
            for k in 1..=order {
                if k >= 3 {
                    odd_product = odd_product * int(2 * k as i64 - 3);
                }
                let den = int(2).powi(k as i64)? * v.powi(2 * k as i64 - 1)?;
                derivs.push((alternating(k) * &odd_product).checked_div(&den)?);
            }
            Ok(FamilyCoefficients::Root(CoefficientSequence::new(anchor, derivs)))
        }
        ClosedFormFamily::NthRootShift { b, c, n } => {
            // d_k = (-1)^(k+1) (n-1)(2n-1)...((k-1)n-1) / (n^k v^(kn-1))
            let n = *n as i64;
            let value = v.powi(n)? - Scalar::Exact(b.pow(n as usize) + c);
            let anchor = Anchor::from_parts(v.clone(), value, int(n) * v.powi(n - 1)?)?;
            let mut product = int(1);
            let mut derivs = Vec::with_capacity(order);
            for k in 1..=order as i64 {
                if k >= 2 {
                    product = product * int((k - 1) * n - 1);
                }
                let den = int(n).powi(k)? * v.powi(k * n - 1)?;
                derivs.push((alternating(k as usize) * &product).checked_div(&den)?);
            }
            Ok(FamilyCoefficients::Root(CoefficientSequence::new(anchor, derivs)))
        }
        ClosedFormFamily::CubicExample => {
            if order > CUBIC_TABLE_ORDER {
                return Err(Error::InvalidFamily(format!(
                    "cubic example coefficients are tabulated through order {CUBIC_TABLE_ORDER}"
                )));
            }
            let vv = v * v;
            let w = int(3) * &vv - int(1);
            if w.is_zero() {
                return Err(DomainErrorKind::DivisionByZero.into());
            }
            let value = &vv * v - v + int(1);
            let anchor = Anchor::from_parts(v.clone(), value, w.clone())?;
            // p = 1/W, q = -6v/W^3, r = 6(15v^2+1)/W^5, s = -360v(6v^2+1)/W^7 with W = 3v^2 - 1
            let table = [
                int(1),
                int(-6) * v,
                int(6) * (int(15) * &vv + int(1)),
                int(-360) * v * (int(6) * &vv + int(1)),
            ];
            let derivs = table
                .iter()
                .take(order)
                .enumerate()
                .map(|(i, num)| num.checked_div(&w.powi(2 * i as i64 + 1)?))
                .collect::<Result<Vec<_>>>()?;
            Ok(FamilyCoefficients::Root(CoefficientSequence::new(anchor, derivs)))
        }
        ClosedFormFamily::GeneralPower { lambda, a, n } => {
            // D_k = (n/l)((n-l)/l)...((n-(k-1)l)/l) v^(n-kl)
            if v.is_zero() {
                return Err(DomainErrorKind::DivisionByZero.into());
            }
            let precision = v.precision().unwrap_or(DEFAULT_PRECISION);
            let lam = Scalar::Exact(lambda.clone());
            let value = v.pow_rational(lambda, precision)? - Scalar::Exact(a.clone());
            let slope = &lam * &v.pow_rational(&(lambda - RBig::ONE), precision)?;
            let anchor = Anchor::from_parts(v.clone(), value, slope)?;
            let leading = v.pow_rational(n, precision)?;
            let mut product = int(1);
            let mut derivs = Vec::with_capacity(order);
            for k in 1..=order {
                let shift = RBig::from(k as i64 - 1) * lambda;
                let factor = Scalar::Exact((n - &shift) / lambda);
                product = product * factor;
                let exponent = n - RBig::from(k as i64) * lambda;
                derivs.push(&product * &v.pow_rational(&exponent, precision)?);
            }
            let mut leading = leading;
            if !lambda.is_int() || !n.is_int() || !v.is_exact() {
                promote_all(&mut leading, &mut derivs, precision);
            }
            Ok(FamilyCoefficients::Power(PowerCoefficientSequence {
                anchor,
                exponent: n.clone(),
                leading,
                derivs,
            }))
        }
    }
}

/// Series of a shifted family anchored at `v = b` (so `V = -c`), from the
/// closed-form coefficients.
pub fn family_series_value(family: &ClosedFormFamily, order: usize) -> Result<SeriesApproximation> {
    let b = family.anchor().ok_or_else(|| {
        Error::InvalidFamily("only the shifted root families have a built-in anchor".into())
    })?;
    match closed_form_coefficients(family, &b, order)? {
        FamilyCoefficients::Root(c) => Ok(SeriesApproximation::from_derivatives(c.anchor().clone(), b, c.derivs())),
        FamilyCoefficients::Power(_) => unreachable!("shifted families are root families"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{assemble_root_series, coefficient_sequence_symbolic};
    use crate::expr::parse_expression;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn r(n: i64) -> RBig {
        RBig::from(n)
    }

    fn expr(t: &str) -> Expression {
        parse_expression(t).unwrap()
    }

    #[test]
    fn general_power_first_coefficient() {
        let c = power_coefficient_sequence(&expr("z^2 - 10"), &int(2), &r(3), 3).unwrap();
        assert_eq!(c.derivs()[0], int(3));
    }

    #[test]
    fn power_equal_to_lambda_has_single_correction() {
        for v in [int(3), q(-7, 2), q(1, 5)] {
            let c = power_coefficient_sequence(&expr("z^2 - 10"), &v, &r(2), 3).unwrap();
            assert_eq!(c.derivs(), &[int(1), int(0), int(0)]);
            let s = assemble_power_series(&c);
            assert_eq!(s.partial_sums()[1], int(10));
        }
    }

    #[test]
    fn zero_exponent_vanishes() {
        let c = power_coefficient_sequence(&expr("z^3 - z + 1"), &q(3, 2), &r(0), 5).unwrap();
        assert!(c.derivs().iter().all(Scalar::is_zero));
        let s = assemble_power_series(&c);
        assert!(s.partial_sums().iter().all(|p| *p == int(1)));
    }

    #[test]
    fn unit_exponent_matches_root_series() {
        let e = expr("z^2 - 10");
        let power = assemble_power_series(&power_coefficient_sequence(&e, &int(3), &r(1), 6).unwrap());
        let root = assemble_root_series(&coefficient_sequence_symbolic(&e, &int(3), 6).unwrap());
        assert_eq!(power.terms(), root.terms());
    }

    #[test]
    fn fractional_exponent_needs_positive_anchor() {
        let half = RBig::from_parts_signed(1.into(), 2.into());
        let e = expr("z^2 - 10");
        assert_eq!(
            power_coefficient_sequence(&e, &int(-3), &half, 3).unwrap_err(),
            Error::Domain(DomainErrorKind::FractionalPowerOfNegative)
        );
        let c = power_coefficient_sequence(&e, &int(3), &half, 3).unwrap();
        assert!(!c.leading().is_exact());
        // z^(1/2) of the root sqrt(10) is 10^(1/4)
        let s = assemble_power_series(&power_coefficient_sequence(&e, &int(3), &half, 12).unwrap());
        assert!((s.value().to_f64() - 10f64.powf(0.25)).abs() < 1e-10);
    }

    #[test]
    fn omega_two_terms() {
        let o = omega_series(&expr("z^2 - 10"), &int(3), 2).unwrap();
        assert_eq!(o.terms(), &[int(0), q(1, 18), q(-1, 324)]);
        assert_eq!(o.omega(), &(q(1, 18) - q(1, 324)));
    }

    #[test]
    fn omega_at_a_root_is_zero() {
        let o = omega_series(&expr("z - 5"), &int(5), 6).unwrap();
        assert!(o.terms().iter().all(Scalar::is_zero));
        let l = log_series(&expr("z - 5"), &int(5), 6).unwrap();
        assert_eq!(l, int(5).ln(128).unwrap());
    }

    #[test]
    fn omega_needs_positive_anchor() {
        assert_eq!(
            omega_series(&expr("z^2 - 10"), &int(-3), 4).unwrap_err(),
            Error::Domain(DomainErrorKind::LogNonPositive)
        );
    }

    #[test]
    fn log_of_linear_equation() {
        let l = log_series(&expr("z^1 - 5"), &int(4), 30).unwrap();
        assert!((l.to_f64() - 5f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn closed_form_tables() {
        let c = closed_form_coefficients(&ClosedFormFamily::NthRootShift { b: r(2), c: r(1), n: 3 }, &int(2), 3).unwrap();
        assert_eq!(c.derivs(), &[q(1, 12), q(-1, 144), q(10, 27 * 256)]);
        let c = closed_form_coefficients(&ClosedFormFamily::CubicExample, &int(1), 4).unwrap();
        assert_eq!(c.derivs(), &[q(1, 2), q(-3, 4), int(3), q(-315, 16)]);
        let family = ClosedFormFamily::GeneralPower { lambda: r(2), a: r(10), n: r(4) };
        let c = closed_form_coefficients(&family, &int(1), 3).unwrap();
        assert_eq!(c.derivs(), &[int(2), int(2), int(0)]);
    }

    #[test]
    fn closed_form_errors() {
        assert!(matches!(
            closed_form_coefficients(&ClosedFormFamily::CubicExample, &int(1), 5),
            Err(Error::InvalidFamily(_))
        ));
        let root_third = Scalar::ratio(1, 3);
        // 3v^2 - 1 vanishes only at irrational v; v = 0 is fine, and this v isn't a zero either
        assert!(closed_form_coefficients(&ClosedFormFamily::CubicExample, &root_third, 2).is_ok());
        assert!(matches!(
            closed_form_coefficients(&ClosedFormFamily::SqrtShift { b: r(0), c: r(1) }, &int(1), 2),
            Err(Error::InvalidFamily(_))
        ));
        assert!(matches!(
            closed_form_coefficients(&ClosedFormFamily::NthRootShift { b: r(1), c: r(1), n: 0 }, &int(1), 2),
            Err(Error::InvalidFamily(_))
        ));
        assert!(matches!(
            family_series_value(&ClosedFormFamily::CubicExample, 2),
            Err(Error::InvalidFamily(_))
        ));
    }

    #[test]
    fn shifted_family_series() {
        let s = family_series_value(&ClosedFormFamily::SqrtShift { b: r(3), c: r(1) }, 3).unwrap();
        assert_eq!(s.terms(), &[int(3), q(1, 6), q(-1, 216), q(1, 3888)]);
        let b = RBig::from_parts_signed(19.into(), 6.into());
        let c = RBig::from_parts_signed((-1).into(), 36.into());
        let s = family_series_value(&ClosedFormFamily::SqrtShift { b, c }, 1).unwrap();
        assert_eq!(s.value(), &q(721, 228));
        let s = family_series_value(&ClosedFormFamily::NthRootShift { b: r(1), c: r(0), n: 5 }, 6).unwrap();
        assert!(s.terms()[1..].iter().all(Scalar::is_zero));
        assert_eq!(s.value(), &int(1));
    }
}
