//! Root series about a trial value.
//!
//! Writing `V = Z(v)` for a trial value `v`, the root is the inverse
//! function `v(V)` evaluated at `V = 0`. Expanding that inverse about the
//! anchor gives
//!
//! ```text
//! z = v - p V + q V^2/2 - r V^3/6 + s V^4/24 - ...
//! ```
//!
//! with `p = dv/dV`, `q = dp/dV`, `r = dq/dV`, ... The coefficients are
//! computed two independent ways: by repeated symbolic differentiation
//! ([`coefficient_sequence_symbolic`]) and by reverting the Taylor jet of
//! `Z` at the anchor ([`coefficient_sequence_reversion`]).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{evaluate, operative_precision, Differentiator, Evaluator, Expression};
use crate::jet::taylor_expand;
use crate::scalar::Scalar;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 8;

/// Trial value `v` with `V = Z(v)` and `V' = Z'(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    v: Scalar,
    value: Scalar,
    derivative: Scalar,
}

impl Anchor {
    /// Evaluate `equation` and its derivative at `v`.
    ///
    /// Fails with [`Error::NotReversible`] when `Z'(v) = 0`.
    pub fn new(equation: &Expression, v: Scalar) -> Result<Anchor> {
        Anchor::with_derivative(equation, &equation.differentiate(), v)
    }

    /// Anchor from values computed elsewhere.
    pub(crate) fn from_parts(v: Scalar, value: Scalar, derivative: Scalar) -> Result<Anchor> {
        if derivative.is_zero() {
            return Err(Error::NotReversible { round: None });
        }
        Ok(Anchor { v, value, derivative })
    }

    pub(crate) fn with_derivative(equation: &Expression, derivative: &Expression, v: Scalar) -> Result<Anchor> {
        let precision = operative_precision(equation, &v);
        let mut eval = Evaluator::new(v.clone(), precision);
        let value = eval.eval(equation)?;
        let derivative = eval.eval(derivative)?;
        if derivative.is_zero() {
            return Err(Error::NotReversible { round: None });
        }
        // keep v in the same numeric mode as the values computed from it
        let v = match value.precision().or(derivative.precision()) {
            Some(p) if v.is_exact() => v.promote(p),
            _ => v,
        };
        Ok(Anchor { v, value, derivative })
    }

    /// The trial value `v`.
    pub fn v(&self) -> &Scalar {
        &self.v
    }

    /// `V = Z(v)`.
    pub fn value(&self) -> &Scalar {
        &self.value
    }

    /// `V' = Z'(v)`.
    pub fn derivative(&self) -> &Scalar {
        &self.derivative
    }

    pub fn is_root(&self) -> bool {
        self.value.is_zero()
    }
}

/// Derivatives `d_k = d^k v / dV^k` of the inverse function at the anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    anchor: Anchor,
    derivs: Vec<Scalar>,
}

impl CoefficientSequence {
    pub fn new(anchor: Anchor, derivs: Vec<Scalar>) -> Self {
        CoefficientSequence { anchor, derivs }
    }

    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    pub fn order(&self) -> usize {
        self.derivs.len()
    }

    /// `[p, q, r, s, t, ...]`.
    pub fn derivs(&self) -> &[Scalar] {
        &self.derivs
    }

    /// `d_k` for `1 <= k <= order`.
    pub fn get(&self, k: usize) -> Option<&Scalar> {
        k.checked_sub(1).and_then(|i| self.derivs.get(i))
    }

    pub fn p(&self) -> Option<&Scalar> {
        self.get(1)
    }
}

/// The chain `P_1 = f / Z'`, `P_{k+1} = P_k' / Z'` of expressions in `z`.
///
/// With `f = 1` evaluating `P_k` at the anchor gives the root coefficients;
/// with `f = n z^(n-1)` the coefficients of the series for `z^n`. The chain
/// is built once and can be evaluated at any number of anchors.
#[derive(Debug, Clone)]
pub struct DerivativeChain {
    equation: Expression,
    derivative: Expression,
    chain: Vec<Expression>,
    differentiator: Differentiator,
}

impl DerivativeChain {
    pub fn new(equation: &Expression, numerator: Expression, order: usize) -> Self {
        let mut differentiator = Differentiator::new();
        let derivative = differentiator.differentiate(equation);
        let first = differentiator.intern(Expression::div(numerator, derivative.clone()));
        let mut this = DerivativeChain { equation: equation.clone(), derivative, chain: vec![first], differentiator };
        this.extend_to(order);
        this
    }

    /// Chain for the root coefficients `p, q, r, ...`.
    pub fn root(equation: &Expression, order: usize) -> Self {
        DerivativeChain::new(equation, Expression::constant(Scalar::one()), order)
    }

    /// Number of links built so far (at least one).
    pub fn order(&self) -> usize {
        self.chain.len()
    }

    pub fn equation(&self) -> &Expression {
        &self.equation
    }

    pub fn expressions(&self) -> &[Expression] {
        &self.chain
    }

    /// Append more links; a no-op when the chain is already long enough.
    pub fn extend_to(&mut self, order: usize) {
        while self.chain.len() < order {
            let last = self.chain.last().expect("chain holds its first link").clone();
            let next = Expression::div(self.differentiator.differentiate(&last), self.derivative.clone());
            let next = self.differentiator.intern(next);
            self.chain.push(next);
        }
    }

    pub fn anchor(&self, v: Scalar) -> Result<Anchor> {
        Anchor::with_derivative(&self.equation, &self.derivative, v)
    }

    /// Values of the first `order` links at the anchor; `order` must not
    /// exceed [`DerivativeChain::order`].
    pub fn evaluate(&self, anchor: &Anchor, order: usize) -> Result<Vec<Scalar>> {
        let precision = operative_precision(&self.equation, anchor.v());
        let mut eval = Evaluator::new(anchor.v().clone(), precision);
        self.chain[..order].iter().map(|e| eval.eval(e)).collect()
    }
}

type ChainKey = (String, String, Option<usize>);

const CHAIN_CACHE_LIMIT: usize = 64;

fn chain_cache() -> &'static Mutex<HashMap<ChainKey, Arc<Mutex<DerivativeChain>>>> {
    static CACHE: OnceLock<Mutex<HashMap<ChainKey, Arc<Mutex<DerivativeChain>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Runs `f` on the chain for `(equation, numerator)` extended to `order`,
/// reusing chains built by earlier calls.
pub(crate) fn with_chain<T>(
    equation: &Expression,
    numerator: Expression,
    order: usize,
    f: impl FnOnce(&DerivativeChain) -> T,
) -> T {
    let key = (equation.to_string(), numerator.to_string(), equation.float_precision());
    let entry = {
        let mut cache = chain_cache().lock().unwrap_or_else(|e| e.into_inner());
        if cache.len() >= CHAIN_CACHE_LIMIT && !cache.contains_key(&key) {
            cache.clear();
        }
        cache
            .entry(key)
            .or_insert_with(|| Arc::new(Mutex::new(DerivativeChain::new(equation, numerator, order.max(1)))))
            .clone()
    };
    let mut chain = entry.lock().unwrap_or_else(|e| e.into_inner());
    chain.extend_to(order);
    f(&chain)
}

/// Coefficients by the recurrence `P_1 = 1/Z'`, `P_{k+1} = P_k'/Z'`,
/// evaluated at `v`.
pub fn coefficient_sequence_symbolic(equation: &Expression, v: &Scalar, order: usize) -> Result<CoefficientSequence> {
    with_chain(equation, Expression::constant(Scalar::one()), order, |chain| {
        let anchor = chain.anchor(v.clone())?;
        let derivs = chain.evaluate(&anchor, order)?;
        Ok(CoefficientSequence::new(anchor, derivs))
    })
}

/// Coefficients from the reverted Taylor jet of `Z(v + t) - Z(v)`:
/// `d_k = k! [t^k] revert(w)`.
pub fn coefficient_sequence_reversion(equation: &Expression, v: &Scalar, order: usize) -> Result<CoefficientSequence> {
    let anchor = Anchor::new(equation, v.clone())?;
    if order == 0 {
        return Ok(CoefficientSequence::new(anchor, Vec::new()));
    }
    let w = taylor_expand(equation, v, order)?;
    let w = w.with_constant(Scalar::zero())?;
    let inverse = w.revert()?;
    let derivs = (1..=order)
        .map(|k| Scalar::factorial(k) * inverse.coeff(k))
        .collect();
    Ok(CoefficientSequence::new(anchor, derivs))
}

/// A truncated alternating series `t_0 + t_1 + ... + t_K` with its partial
/// sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesApproximation {
    anchor: Anchor,
    terms: Vec<Scalar>,
    partial_sums: Vec<Scalar>,
}

impl SeriesApproximation {
    /// `t_0 = leading`, `t_k = (-1)^k d_k V^k / k!`.
    pub fn from_derivatives(anchor: Anchor, leading: Scalar, derivs: &[Scalar]) -> Self {
        let minus_v = -anchor.value();
        let mut terms = Vec::with_capacity(derivs.len() + 1);
        terms.push(leading);
        let mut power = Scalar::one();
        for (i, d) in derivs.iter().enumerate() {
            let k = i + 1;
            power = power * &minus_v;
            let term = (d * &power)
                .checked_div(&Scalar::factorial(k))
                .expect("factorial is nonzero");
            terms.push(term);
        }
        SeriesApproximation::from_terms(anchor, terms)
    }

    pub fn from_terms(anchor: Anchor, terms: Vec<Scalar>) -> Self {
        let mut partial_sums: Vec<Scalar> = Vec::with_capacity(terms.len());
        for t in &terms {
            let next = match partial_sums.last() {
                Some(s) => s + t,
                None => t.clone(),
            };
            partial_sums.push(next);
        }
        SeriesApproximation { anchor, terms, partial_sums }
    }

    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[Scalar] {
        &self.terms
    }

    pub fn partial_sums(&self) -> &[Scalar] {
        &self.partial_sums
    }

    /// Partial sum through order `k`.
    pub fn truncated(&self, k: usize) -> Option<&Scalar> {
        self.partial_sums.get(k)
    }

    /// Partial sum through the full order.
    pub fn value(&self) -> &Scalar {
        self.partial_sums.last().expect("series has a leading term")
    }
}

/// Root series `z = v - pV + qV^2/2 - ...`.
pub fn assemble_root_series(coeffs: &CoefficientSequence) -> SeriesApproximation {
    SeriesApproximation::from_derivatives(coeffs.anchor().clone(), coeffs.anchor().v().clone(), coeffs.derivs())
}

/// Root series of order `order` at `v`, via the symbolic route.
pub fn root_series(equation: &Expression, v: &Scalar, order: usize) -> Result<SeriesApproximation> {
    Ok(assemble_root_series(&coefficient_sequence_symbolic(equation, v, order)?))
}

pub fn evaluate_truncated(series: &SeriesApproximation, k: usize) -> Result<Scalar> {
    series.truncated(k).cloned().ok_or_else(|| {
        Error::InvalidArgument(format!("truncation order {k} exceeds series order {}", series.order()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Converging,
    Stalled,
    Diverging,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converging => "Converging",
            Verdict::Stalled => "Stalled",
            Verdict::Diverging => "Diverging",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `|t_next / t|` for consecutive nonzero correction terms.
    pub ratios: Vec<Scalar>,
    pub verdict: Verdict,
    /// `|t_K|`.
    pub last_term_magnitude: Scalar,
}

/// Classify the correction terms `t_1..t_K` of a series.
///
/// With `rho` the largest of the last three ratios between consecutive
/// nonzero terms: diverging if `rho >= 1`; converging if `rho <= 3/4` and
/// `|t_K| < |t_1|`; stalled otherwise. Fewer than two nonzero terms means
/// the series terminated, which counts as converging.
pub fn convergence_diagnostic(series: &SeriesApproximation) -> ConvergenceReport {
    let corrections = &series.terms()[1..];
    let nonzero: Vec<Scalar> = corrections.iter().filter(|t| !t.is_zero()).map(Scalar::abs).collect();
    let ratios: Vec<Scalar> = nonzero
        .windows(2)
        .map(|w| w[1].checked_div(&w[0]).expect("nonzero terms"))
        .collect();
    let last_term_magnitude = series.terms().last().map(Scalar::abs).unwrap_or_else(Scalar::zero);

    let verdict = if nonzero.len() < 2 {
        Verdict::Converging
    } else {
        let rho = ratios[ratios.len().saturating_sub(3)..]
            .iter()
            .max_by(|a, b| a.cmp_value(b))
            .expect("at least one ratio");
        let first = corrections[0].abs();
        if rho.cmp_value(&Scalar::one()).is_ge() {
            Verdict::Diverging
        } else if rho.cmp_value(&Scalar::ratio(3, 4)).is_le() && last_term_magnitude.cmp_value(&first).is_lt() {
            Verdict::Converging
        } else {
            Verdict::Stalled
        }
    };
    ConvergenceReport { ratios, verdict, last_term_magnitude }
}

/// Repeatedly replace the anchor by the order-`k` partial sum of the series
/// built there. Returns the anchors after each round, starting with `v0`.
///
/// With `k = 1` every round is one Newton step.
pub fn refine_anchor_trace(equation: &Expression, v0: &Scalar, rounds: usize, k: usize) -> Result<Vec<Scalar>> {
    let chain = DerivativeChain::root(equation, k);
    let mut anchors = vec![v0.clone()];
    for round in 1..=rounds {
        let current = anchors.last().expect("non-empty").clone();
        let anchor = chain.anchor(current).map_err(|e| match e {
            Error::NotReversible { .. } => Error::NotReversible { round: Some(round) },
            other => other,
        })?;
        let derivs = chain.evaluate(&anchor, k)?;
        let series = SeriesApproximation::from_derivatives(anchor.clone(), anchor.v().clone(), &derivs);
        anchors.push(series.value().clone());
    }
    Ok(anchors)
}

pub fn refine_anchor(equation: &Expression, v0: &Scalar, rounds: usize, k: usize) -> Result<Scalar> {
    Ok(refine_anchor_trace(equation, v0, rounds, k)?.pop().expect("non-empty"))
}

/// Newton step `v - Z(v)/Z'(v)`, computed directly.
pub fn newton_step(equation: &Expression, v: &Scalar) -> Result<Scalar> {
    let value = evaluate(equation, v)?;
    let slope = evaluate(&equation.differentiate(), v)?;
    if slope.is_zero() {
        return Err(Error::NotReversible { round: None });
    }
    Ok(v - &value.checked_div(&slope)?)
}
