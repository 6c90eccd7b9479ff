use std::collections::HashMap;

use super::{Expression, Node};
use crate::error::{DomainErrorKind, Result};
use crate::scalar::{Scalar, DEFAULT_PRECISION};

/// Evaluate `expr` at `at`.
///
/// The result is exact when `at` and every constant are exact and the tree
/// uses only integer powers. Otherwise it is a float at the precision of
/// `at`, of the widest float constant, or [`DEFAULT_PRECISION`].
pub fn evaluate(expr: &Expression, at: &Scalar) -> Result<Scalar> {
    Evaluator::new(at.clone(), operative_precision(expr, at)).eval(expr)
}

pub fn evaluate_with_precision(expr: &Expression, at: &Scalar, precision: usize) -> Result<Scalar> {
    Evaluator::new(at.clone(), precision).eval(expr)
}

pub(crate) fn operative_precision(expr: &Expression, at: &Scalar) -> usize {
    at.precision()
        .into_iter()
        .chain(expr.float_precision())
        .max()
        .unwrap_or(DEFAULT_PRECISION)
}

/// Evaluates several expressions at one point, reusing results for shared
/// subtrees.
pub struct Evaluator {
    at: Scalar,
    precision: usize,
    memo: HashMap<usize, Scalar>,
}

impl Evaluator {
    pub fn new(at: Scalar, precision: usize) -> Self {
        Evaluator { at, precision, memo: HashMap::new() }
    }

    pub fn point(&self) -> &Scalar {
        &self.at
    }

    pub fn eval(&mut self, expr: &Expression) -> Result<Scalar> {
        if let Some(v) = self.memo.get(&expr.id()) {
            return Ok(v.clone());
        }
        let value = match expr.node() {
            Node::Constant(c) => c.clone(),
            Node::Variable => self.at.clone(),
            Node::Add(a, b) => self.eval(a)? + self.eval(b)?,
            Node::Sub(a, b) => self.eval(a)? - self.eval(b)?,
            Node::Mul(a, b) => self.eval(a)? * self.eval(b)?,
            Node::Div(a, b) => {
                let num = self.eval(a)?;
                let den = self.eval(b)?;
                num.checked_div(&den)?
            }
            Node::Pow(base, e) => {
                let base = self.eval(base)?;
                if !e.is_int() && base.signum() < 0 {
                    return Err(DomainErrorKind::FractionalPowerOfNegative.into());
                }
                base.pow_rational(e, self.precision)?
            }
            Node::Exp(a) => self.eval(a)?.exp(self.precision)?,
            Node::Ln(a) => self.eval(a)?.ln(self.precision)?,
        };
        self.memo.insert(expr.id(), value.clone());
        Ok(value)
    }
}
