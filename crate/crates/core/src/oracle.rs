//! Reference values computed without any series machinery: Newton's method,
//! bisection and the binomial theorem.

use dashu::rational::RBig;

use crate::error::{Error, Result};
use crate::expr::{operative_precision, Evaluator, Expression};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Newton,
    Bisection,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::Bisection => "bisection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootResult {
    pub value: Scalar,
    /// `|Z(value)|`.
    pub residual: Scalar,
    pub iterations: usize,
    pub method: Method,
}

/// `10^-30`.
pub fn default_tolerance() -> Scalar {
    Scalar::Exact(RBig::from_parts(1.into(), dashu::integer::UBig::from(10u8).pow(30)))
}

pub const DEFAULT_MAX_ITER: usize = 100;

fn check_tolerance(tol: &Scalar) -> Result<()> {
    if tol.signum() <= 0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    Ok(())
}

fn evaluator(equation: &Expression, at: &Scalar) -> Evaluator {
    Evaluator::new(at.clone(), operative_precision(equation, at))
}

/// Newton iterates `x_(i+1) = x_i - Z(x_i)/Z'(x_i)` starting from `guess`,
/// `iterations + 1` values including the guess. Exact input stays exact.
pub fn newton_iterates(equation: &Expression, guess: &Scalar, iterations: usize) -> Result<Vec<Scalar>> {
    let derivative = equation.differentiate();
    let mut xs = vec![guess.clone()];
    for _ in 0..iterations {
        let x = xs.last().expect("non-empty").clone();
        xs.push(newton_update(equation, &derivative, &x)?.0);
    }
    Ok(xs)
}

/// One Newton update, also returning `Z(x)`.
fn newton_update(equation: &Expression, derivative: &Expression, x: &Scalar) -> Result<(Scalar, Scalar)> {
    let mut ev = evaluator(equation, x);
    let value = ev.eval(equation)?;
    let slope = ev.eval(derivative)?;
    if slope.is_zero() {
        return Err(Error::DerivativeVanished { at: x.clone() });
    }
    Ok((x - &value.checked_div(&slope)?, value))
}

/// Newton's method until `|Z(x)| < tol`, at most `max_iter` updates.
/// Exact input stays exact.
pub fn newton_root(equation: &Expression, guess: &Scalar, tol: &Scalar, max_iter: usize) -> Result<RootResult> {
    check_tolerance(tol)?;
    let derivative = equation.differentiate();
    let mut x = guess.clone();
    for iterations in 0..=max_iter {
        let mut ev = evaluator(equation, &x);
        let residual = ev.eval(equation)?.abs();
        if residual.cmp_value(tol).is_lt() {
            return Ok(RootResult { value: x, residual, iterations, method: Method::Newton });
        }
        if iterations == max_iter {
            break;
        }
        x = newton_update(equation, &derivative, &x)?.0;
    }
    Err(Error::NoConvergence { last: x, iterations: max_iter })
}

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol`;
/// the result is the final midpoint.
pub fn bisection_root(equation: &Expression, lo: &Scalar, hi: &Scalar, tol: &Scalar) -> Result<RootResult> {
    check_tolerance(tol)?;
    let (mut lo, mut hi) = if lo.cmp_value(hi).is_le() {
        (lo.clone(), hi.clone())
    } else {
        (hi.clone(), lo.clone())
    };
    let eval = |x: &Scalar| evaluator(equation, x).eval(equation);
    let f_lo = eval(&lo)?;
    let f_hi = eval(&hi)?;
    for (x, f) in [(&lo, &f_lo), (&hi, &f_hi)] {
        if f.is_zero() {
            return Ok(RootResult { value: x.clone(), residual: f.abs(), iterations: 0, method: Method::Bisection });
        }
    }
    let sign_lo = f_lo.signum();
    if sign_lo == f_hi.signum() {
        return Err(Error::NoSignChange);
    }
    let half = Scalar::ratio(1, 2);
    let mut iterations = 0;
    while (&hi - &lo).cmp_value(tol).is_ge() {
        iterations += 1;
        let mid = (&lo + &hi) * &half;
        let f_mid = eval(&mid)?;
        if f_mid.is_zero() {
            return Ok(RootResult { value: mid, residual: f_mid, iterations, method: Method::Bisection });
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        // a float bracket can stop shrinking before reaching tol
        if iterations > 10_000 {
            break;
        }
    }
    let value = (&lo + &hi) * &half;
    let residual = eval(&value)?.abs();
    Ok(RootResult { value, residual, iterations, method: Method::Bisection })
}

/// Binomial coefficients `C(alpha, k)` for `k = 0..=order`.
pub fn binomial_series_coefficients(alpha: &RBig, order: usize) -> Vec<RBig> {
    let mut out = Vec::with_capacity(order + 1);
    let mut c = RBig::ONE;
    for k in 0..=order {
        out.push(c.clone());
        c = c * (alpha - RBig::from(k)) / RBig::from(k + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DomainErrorKind;
    use crate::expr::parse_expression;

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn newton_on_square_root() {
        let e = parse_expression("z^2 - 10").unwrap();
        let xs = newton_iterates(&e, &int(3), 2).unwrap();
        assert_eq!(xs, vec![int(3), Scalar::ratio(19, 6), Scalar::ratio(721, 228)]);
        let r = newton_root(&e, &int(3).promote(128), &default_tolerance(), 50).unwrap();
        assert!((r.value.to_f64() - 10f64.sqrt()).abs() < 1e-15);
        assert!(r.residual.cmp_value(&default_tolerance()).is_lt());
    }

    #[test]
    fn newton_failures() {
        let e = parse_expression("z^2 - 10").unwrap();
        assert_eq!(
            newton_root(&e, &int(0), &default_tolerance(), 10).unwrap_err(),
            Error::DerivativeVanished { at: int(0) }
        );
        let no_root = parse_expression("z^2 + 1").unwrap();
        assert!(matches!(
            newton_root(&no_root, &int(3).promote(128), &default_tolerance(), 5),
            Err(Error::NoConvergence { iterations: 5, .. })
        ));
        assert!(matches!(newton_root(&e, &int(3), &int(0), 5), Err(Error::InvalidArgument(_))));
        let pole = parse_expression("1/z").unwrap();
        assert_eq!(
            newton_root(&pole, &int(0), &default_tolerance(), 3).unwrap_err(),
            Error::Domain(DomainErrorKind::DivisionByZero)
        );
    }

    #[test]
    fn newton_stopping() {
        let e = parse_expression("z - 7").unwrap();
        let r = newton_root(&e, &int(7), &default_tolerance(), 10).unwrap();
        assert_eq!((r.value, r.iterations), (int(7), 0));
        let r = newton_root(&e, &int(0).promote(128), &default_tolerance(), 10).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.value.to_f64(), 7.0);
        let r = newton_root(&parse_expression("z^3 - 3*z - 2").unwrap(), &int(3).promote(128), &default_tolerance(), 50)
            .unwrap();
        assert!((r.value.to_f64() - 2.0).abs() < 1e-15);
        let r = newton_root(&parse_expression("z^3 - z + 1").unwrap(), &int(-1).promote(128), &default_tolerance(), 50)
            .unwrap();
        assert!((r.value.to_f64() + 1.324_717_957_244_746).abs() < 1e-15);
        assert!(r.residual.to_f64() < 1e-20);
    }

    #[test]
    fn bisection_brackets() {
        let e = parse_expression("z^2 - 10").unwrap();
        let r = bisection_root(&e, &int(3).promote(128), &int(4).promote(128), &default_tolerance()).unwrap();
        assert!((r.value.to_f64() - 10f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.method, Method::Bisection);
        assert_eq!(bisection_root(&e, &int(4), &int(5), &default_tolerance()).unwrap_err(), Error::NoSignChange);
        let r = bisection_root(&parse_expression("z - 2").unwrap(), &int(0), &int(4), &default_tolerance()).unwrap();
        assert_eq!((r.value, r.iterations), (int(2), 1));
        let r = bisection_root(&parse_expression("z - 4").unwrap(), &int(0), &int(4), &default_tolerance()).unwrap();
        assert_eq!((r.value, r.iterations), (int(4), 0));
        let r = bisection_root(&parse_expression("z").unwrap(), &int(-1), &int(1), &default_tolerance()).unwrap();
        assert_eq!(r.value, int(0));
        let cubic = parse_expression("z^3 - z + 1").unwrap();
        let r = bisection_root(&cubic, &int(-2).promote(128), &int(-1).promote(128), &default_tolerance()).unwrap();
        assert!((r.value.to_f64() + 1.324_717_957_244_746).abs() < 1e-15);
    }

    #[test]
    fn binomial_half() {
        let half = RBig::from_parts(1.into(), 2u8.into());
        let c = binomial_series_coefficients(&half, 4);
        let expect: Vec<RBig> = [(1, 1), (1, 2), (-1, 8), (1, 16), (-5, 128)]
            .iter()
            .map(|&(n, d)| RBig::from_parts_signed(n.into(), (d as u32).into()))
            .collect();
        assert_eq!(c, expect);
        let one: Vec<RBig> = [1, 1, 0, 0].into_iter().map(RBig::from).collect();
        assert_eq!(binomial_series_coefficients(&RBig::ONE, 3), one);
        let third = RBig::from_parts(1.into(), 3u8.into());
        assert_eq!(binomial_series_coefficients(&third, 2)[2], RBig::from_parts_signed((-1).into(), 9u8.into()));
    }
}
