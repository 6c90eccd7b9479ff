//! Truncated Taylor series ("jets") of fixed order.
//!
//! A jet of order `K` is `c0 + c1 t + ... + cK t^K + O(t^(K+1))`. Jets
//! support ring arithmetic, the elementary functions used by expressions,
//! composition and reversion. All coefficients of a jet share one numeric
//! mode; binary operations on jets of different modes fail with
//! [`Error::MixedMode`] instead of converting.

use std::collections::HashMap;

use dashu::rational::RBig;

use crate::error::{DomainErrorKind, Error, Result};
use crate::expr::{Expression, Node};
use crate::scalar::{NumericMode, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum JetFunction {
    Exp,
    Ln,
    Pow(RBig),
}

pub fn jet_arithmetic(a: &Jet, b: &Jet, op: JetOp) -> Result<Jet> {
    match op {
        JetOp::Add => a.add(b),
        JetOp::Sub => a.sub(b),
        JetOp::Mul => a.mul(b),
        JetOp::Div => a.div(b),
    }
}

/// Compositional inverse of `w`; see [`Jet::revert`].
pub fn revert_series(w: &Jet) -> Result<Jet> {
    w.revert()
}

pub fn jet_function(a: &Jet, f: &JetFunction) -> Result<Jet> {
    match f {
        JetFunction::Exp => a.exp(),
        JetFunction::Ln => a.ln(),
        JetFunction::Pow(e) => a.powr(e),
    }
}

impl Jet {
    /// Build a jet from its coefficients; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Scalar>) -> Result<Jet> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("a jet needs at least one coefficient".into()))?;
        let mode = first.mode();
        if coeffs.iter().any(|c| c.mode() != mode) {
            return Err(Error::MixedMode);
        }
        Ok(Jet { coeffs })
    }

    /// Exact jet from integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Jet {
        Jet { coeffs: coeffs.iter().map(|&c| Scalar::from_int(c)).collect() }
    }

    pub fn constant(value: Scalar, order: usize) -> Jet {
        let zero = zero_like(&value);
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The jet of `z` about `anchor`: `anchor + t`.
    pub fn variable(anchor: Scalar, order: usize) -> Jet {
        let mut jet = Jet::constant(anchor, order);
        if order >= 1 {
            jet.coeffs[1] = one_like(&jet.coeffs[0]);
        }
        jet
    }

    /// `t`, the identity under composition.
    pub fn identity(order: usize, mode: NumericMode) -> Jet {
        let zero = mode.coerce(&Scalar::zero()).expect("zero in any mode");
        let mut jet = Jet::variable(zero, order);
        if order == 0 {
            jet.coeffs[0] = zero_like(&jet.coeffs[0]);
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    pub fn mode(&self) -> NumericMode {
        self.coeffs[0].mode()
    }

    pub fn is_exact(&self) -> bool {
        self.mode().is_exact()
    }

    /// All coefficients converted to floats of `precision` bits.
    pub fn to_float(&self, precision: usize) -> Jet {
        Jet { coeffs: self.coeffs.iter().map(|c| c.promote(precision)).collect() }
    }

    /// Copy with the constant term replaced.
    pub fn with_constant(&self, value: Scalar) -> Result<Jet> {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = self.mode().coerce(&value)?;
        Ok(Jet { coeffs })
    }

    /// Evaluate the truncated polynomial at `t`.
    pub fn evaluate_at(&self, t: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(zero_like(&self.coeffs[0]), |acc, c| acc * t + c)
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        if self.mode() != other.mode() {
            return Err(Error::MixedMode);
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Jet {
        Jet { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn neg(&self) -> Jet {
        Jet { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Multiply every coefficient by `factor`, which is coerced into this
    /// jet's mode.
    pub fn scale(&self, factor: &Scalar) -> Result<Jet> {
        let factor = self.mode().coerce(factor)?;
        Ok(Jet { coeffs: self.coeffs.iter().map(|c| c * &factor).collect() })
    }

    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|k| {
                (0..=k).fold(zero_like(&self.coeffs[0]), |acc, i| {
                    acc + &self.coeffs[i] * &other.coeffs[k - i]
                })
            })
            .collect();
        Jet { coeffs }
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let b0 = &other.coeffs[0];
        if b0.is_zero() {
            return Err(Error::DivisionByZeroLeadingCoefficient);
        }
        let mut q: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        for k in 0..self.coeffs.len() {
            let mut acc = self.coeffs[k].clone();
            for i in 1..=k {
                acc = acc - &other.coeffs[i] * &q[k - i];
            }
            q.push(acc.checked_div(b0)?);
        }
        Ok(Jet { coeffs: q })
    }

    pub fn exp(&self) -> Result<Jet> {
        let a0 = &self.coeffs[0];
        let e0 = match self.mode() {
            NumericMode::Exact if a0.is_zero() => Scalar::one(),
            NumericMode::Exact => return Err(Error::NotExact("exp of a jet with nonzero constant term")),
            NumericMode::Float(p) => a0.exp(p)?,
        };
        // k e_k = sum_{j=1..k} j a_j e_{k-j}
        let mut e = vec![e0];
        for k in 1..self.coeffs.len() {
            let sum = (1..=k).fold(zero_like(a0), |acc, j| {
                acc + Scalar::from_int(j as i64) * &self.coeffs[j] * &e[k - j]
            });
            e.push(sum.checked_div(&Scalar::from_int(k as i64))?);
        }
        Ok(Jet { coeffs: e })
    }

    pub fn ln(&self) -> Result<Jet> {
        let a0 = &self.coeffs[0];
        if a0.signum() <= 0 {
            return Err(Error::LogNonPositiveLeadingCoefficient);
        }
        let l0 = match self.mode() {
            NumericMode::Exact if a0.is_one() => Scalar::zero(),
            NumericMode::Exact => return Err(Error::NotExact("log of a jet with constant term other than 1")),
            NumericMode::Float(p) => a0.ln(p)?,
        };
        self.ln_series(l0)
    }

    /// `ln(a(t) / a(0))`: the logarithm with the constant term removed.
    /// Exact whenever the jet is exact.
    pub fn ln_ratio(&self) -> Result<Jet> {
        if self.coeffs[0].signum() <= 0 {
            return Err(Error::LogNonPositiveLeadingCoefficient);
        }
        self.ln_series(zero_like(&self.coeffs[0]))
    }

    fn ln_series(&self, l0: Scalar) -> Result<Jet> {
        // a_0 l_k = a_k - (1/k) sum_{j=1..k-1} j l_j a_{k-j}
        let a0 = &self.coeffs[0];
        let mut l = vec![l0];
        for k in 1..self.coeffs.len() {
            let inner = (1..k).fold(zero_like(a0), |acc, j| {
                acc + Scalar::from_int(j as i64) * &l[j] * &self.coeffs[k - j]
            });
            let inner = inner.checked_div(&Scalar::from_int(k as i64))?;
            l.push((&self.coeffs[k] - &inner).checked_div(a0)?);
        }
        Ok(Jet { coeffs: l })
    }

    /// Raise to a rational power.
    pub fn powr(&self, exponent: &RBig) -> Result<Jet> {
        if exponent.is_int() {
            let e = i64::try_from(exponent.numerator())
                .map_err(|_| Error::InvalidArgument("exponent out of range".into()))?;
            return self.powi(e);
        }
        let a0 = &self.coeffs[0];
        match a0.signum() {
            -1 => return Err(DomainErrorKind::FractionalPowerOfNegative.into()),
            0 => return Err(DomainErrorKind::DivisionByZero.into()),
            _ => {}
        }
        let (b0, alpha) = match self.mode() {
            NumericMode::Exact if a0.is_one() => (Scalar::one(), Scalar::Exact(exponent.clone())),
            NumericMode::Exact => return Err(Error::NotExact("fractional power of a jet")),
            NumericMode::Float(p) => (a0.pow_rational(exponent, p)?, Scalar::Exact(exponent.clone()).promote(p)),
        };
        // k a_0 b_k = sum_{j=1..k} (alpha j - (k - j)) a_j b_{k-j}
        let mut b = vec![b0];
        for k in 1..self.coeffs.len() {
            let sum = (1..=k).fold(zero_like(a0), |acc, j| {
                let weight = &alpha * &Scalar::from_int(j as i64) - Scalar::from_int((k - j) as i64);
                acc + weight * &self.coeffs[j] * &b[k - j]
            });
            b.push(sum.checked_div(&(Scalar::from_int(k as i64) * a0))?);
        }
        Ok(Jet { coeffs: b })
    }

    fn powi(&self, exponent: i64) -> Result<Jet> {
        let one = Jet::constant(one_like(&self.coeffs[0]), self.order());
        let base = if exponent < 0 {
            one.div(self).map_err(|_| Error::from(DomainErrorKind::DivisionByZero))?
        } else {
            self.clone()
        };
        let mut n = exponent.unsigned_abs();
        let mut result = one;
        let mut square = base;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_unchecked(&square);
            }
            n >>= 1;
            if n > 0 {
                square = square.mul_unchecked(&square);
            }
        }
        Ok(result)
    }

    /// `self(inner(t))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Jet) -> Result<Jet> {
        self.check_compatible(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionConstantTerm);
        }
        let order = self.order();
        let mut acc = Jet::constant(self.coeffs[order].clone(), order);
        for c in self.coeffs[..order].iter().rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] = &acc.coeffs[0] + c;
        }
        Ok(acc)
    }

    /// Compositional inverse: the jet `d` with `d(0) = 0` and
    /// `self(d(t)) = t` through the jet's order.
    ///
    /// Requires `self(0) = 0` and a nonzero linear coefficient, otherwise
    /// [`Error::NotReversible`].
    pub fn revert(&self) -> Result<Jet> {
        let order = self.order();
        let w = &self.coeffs;
        if !w[0].is_zero() || order == 0 || w[1].is_zero() {
            return Err(Error::NotReversible { round: None });
        }
        let zero = zero_like(&w[0]);
        let mut d = vec![zero.clone(); order + 1];
        d[1] = w[1].recip()?;
        // powers[j][m] = [t^m] d(t)^j for the coefficients found so far
        let mut powers = vec![vec![zero.clone(); order + 1]; order + 1];
        powers[1][1] = d[1].clone();
        for n in 2..=order {
            for j in 2..=n {
                let mut acc = zero.clone();
                for i in 1..=(n - j + 1) {
                    acc = acc + &d[i] * &powers[j - 1][n - i];
                }
                powers[j][n] = acc;
            }
            let rest = (2..=n).fold(zero.clone(), |acc, j| acc + &w[j] * &powers[j][n]);
            d[n] = -(rest * &d[1]);
            powers[1][n] = d[n].clone();
        }
        Ok(Jet { coeffs: d })
    }
}

fn zero_like(x: &Scalar) -> Scalar {
    match x.precision() {
        Some(p) => Scalar::zero().promote(p),
        None => Scalar::zero(),
    }
}

fn one_like(x: &Scalar) -> Scalar {
    match x.precision() {
        Some(p) => Scalar::one().promote(p),
        None => Scalar::one(),
    }
}

/// Numeric mode used to expand `expr` about `anchor`: exact when both are
/// exact and the tree stays rational, otherwise float at the operative
/// precision.
pub fn expansion_mode(expr: &Expression, anchor: &Scalar) -> NumericMode {
    if anchor.is_exact() && !expr.requires_float() {
        NumericMode::Exact
    } else {
        NumericMode::Float(crate::expr::operative_precision(expr, anchor))
    }
}

/// Taylor jet of `expr` about `anchor`: coefficient `k` is the `k`-th
/// derivative at the anchor divided by `k!`.
///
/// Computed by evaluating the tree over jets rather than by repeated
/// symbolic differentiation.
pub fn taylor_expand(expr: &Expression, anchor: &Scalar, order: usize) -> Result<Jet> {
    let mode = expansion_mode(expr, anchor);
    let seed = Jet::variable(mode.coerce(anchor)?, order);
    let mut memo = HashMap::new();
    lift(expr, &seed, mode, &mut memo).map_err(|e| match e {
        Error::DivisionByZeroLeadingCoefficient => DomainErrorKind::DivisionByZero.into(),
        Error::LogNonPositiveLeadingCoefficient => DomainErrorKind::LogNonPositive.into(),
        other => other,
    })
}

fn lift(expr: &Expression, seed: &Jet, mode: NumericMode, memo: &mut HashMap<usize, Jet>) -> Result<Jet> {
    if let Some(j) = memo.get(&expr.id()) {
        return Ok(j.clone());
    }
    let jet = match expr.node() {
        Node::Constant(c) => Jet::constant(mode.coerce(c)?, seed.order()),
        Node::Variable => seed.clone(),
        Node::Add(a, b) => lift(a, seed, mode, memo)?.add(&lift(b, seed, mode, memo)?)?,
        Node::Sub(a, b) => lift(a, seed, mode, memo)?.sub(&lift(b, seed, mode, memo)?)?,
        Node::Mul(a, b) => lift(a, seed, mode, memo)?.mul(&lift(b, seed, mode, memo)?)?,
        Node::Div(a, b) => lift(a, seed, mode, memo)?.div(&lift(b, seed, mode, memo)?)?,
        Node::Pow(a, e) => lift(a, seed, mode, memo)?.powr(e)?,
        Node::Exp(a) => lift(a, seed, mode, memo)?.exp()?,
        Node::Ln(a) => lift(a, seed, mode, memo)?.ln()?,
    };
    memo.insert(expr.id(), jet.clone());
    Ok(jet)
}
