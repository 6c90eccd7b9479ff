//! Expression trees for the equation's left-hand side `Z(z)`.
//!
//! Trees are immutable and reference counted, so derived expressions (such
//! as the coefficient chain built by differentiating repeatedly) share
//! structure instead of copying it.

mod eval;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use dashu::rational::RBig;

use crate::scalar::Scalar;

pub use eval::{evaluate, evaluate_with_precision, Evaluator};
pub(crate) use eval::operative_precision;
pub use parse::{parse_expression, parse_expression_with_precision};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Constant(Scalar),
    Variable,
    Add(Expression, Expression),
    Sub(Expression, Expression),
    Mul(Expression, Expression),
    Div(Expression, Expression),
    /// Base raised to an exact rational exponent.
    Pow(Expression, RBig),
    Exp(Expression),
    Ln(Expression),
}

/// A function of the single variable `z`.
#[derive(Debug, Clone)]
pub struct Expression(Arc<Node>);

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Expression {
    /// Wrap a node without any folding.
    pub fn from_node(node: Node) -> Self {
        Expression(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn variable() -> Self {
        Expression::from_node(Node::Variable)
    }

    pub fn constant(value: impl Into<Scalar>) -> Self {
        Expression::from_node(Node::Constant(value.into()))
    }

    pub fn as_constant(&self) -> Option<&Scalar> {
        match self.node() {
            Node::Constant(c) => Some(c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_constant().is_some_and(Scalar::is_zero)
    }

    fn is_one(&self) -> bool {
        self.as_constant().is_some_and(Scalar::is_one)
    }

    // Folding constructors. Only literal subtrees are combined, plus the
    // additive and multiplicative identities.

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expression, b: Expression) -> Self {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expression::constant(x + y),
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            _ => Expression::from_node(Node::Add(a, b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expression, b: Expression) -> Self {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expression::constant(x - y),
            _ if b.is_zero() => a,
            _ => Expression::from_node(Node::Sub(a, b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expression, b: Expression) -> Self {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expression::constant(x * y),
            _ if a.is_zero() || b.is_zero() => Expression::constant(Scalar::zero()),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            _ => Expression::from_node(Node::Mul(a, b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expression, b: Expression) -> Self {
        if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
            if let Ok(q) = x.checked_div(y) {
                return Expression::constant(q);
            }
        }
        if a.is_zero() && !b.is_zero() {
            return a;
        }
        if b.is_one() {
            return a;
        }
        Expression::from_node(Node::Div(a, b))
    }

    pub fn pow(base: Expression, exponent: RBig) -> Self {
        if exponent.is_zero() {
            return Expression::constant(Scalar::one());
        }
        if exponent.is_one() {
            return base;
        }
        if let Some(c) = base.as_constant() {
            if c.is_exact() && exponent.is_int() {
                if let Ok(v) = c.pow_rational(&exponent, crate::scalar::DEFAULT_PRECISION) {
                    return Expression::constant(v);
                }
            }
        }
        Expression::from_node(Node::Pow(base, exponent))
    }

    pub fn exp(arg: Expression) -> Self {
        Expression::from_node(Node::Exp(arg))
    }

    pub fn ln(arg: Expression) -> Self {
        Expression::from_node(Node::Ln(arg))
    }

    /// `z^n - a`, the family of pure-power equations.
    pub fn power_minus(n: RBig, a: Scalar) -> Self {
        Expression::sub(Expression::pow(Expression::variable(), n), Expression::constant(a))
    }

    /// Symbolic derivative with respect to `z`.
    ///
    /// Shared subtrees are differentiated once, so the result keeps the
    /// sharing of the input.
    pub fn differentiate(&self) -> Expression {
        Differentiator::new().differentiate(self)
    }

    /// `k`-th derivative.
    pub fn nth_derivative(&self, k: usize) -> Expression {
        (0..k).fold(self.clone(), |e, _| e.differentiate())
    }

    /// Whether evaluation is guaranteed to leave exact arithmetic even at an
    /// exact point: float constants, transcendental functions or
    /// non-integer powers.
    pub fn requires_float(&self) -> bool {
        self.any_node(&mut |n| match n {
            Node::Constant(c) => !c.is_exact(),
            Node::Pow(_, e) => !e.is_int(),
            Node::Exp(_) | Node::Ln(_) => true,
            _ => false,
        })
    }

    /// Largest precision among float constants.
    pub fn float_precision(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        self.any_node(&mut |n| {
            if let Node::Constant(c) = n {
                if let Some(p) = c.precision() {
                    best = Some(best.map_or(p, |b| b.max(p)));
                }
            }
            false
        });
        best
    }

    /// Number of distinct nodes (shared subtrees counted once).
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.any_node(&mut |_| {
            n += 1;
            false
        });
        n
    }

    fn any_node(&self, pred: &mut dyn FnMut(&Node) -> bool) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            if pred(e.node()) {
                return true;
            }
            match e.node() {
                Node::Constant(_) | Node::Variable => {}
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Pow(a, _) | Node::Exp(a) | Node::Ln(a) => stack.push(a),
            }
        }
        false
    }
}

/// Structural identity of a node whose children are already interned.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum NodeKey {
    Constant(String, Option<usize>),
    Variable,
    Binary(u8, usize, usize),
    Pow(usize, RBig),
    Unary(u8, usize),
}

/// Differentiates repeatedly while remembering every derivative taken and
/// merging structurally identical nodes.
///
/// Taking `d/dz` of a chain `P, P'/Z', (P'/Z')'/Z', ...` one step at a time
/// reuses the earlier derivatives instead of rebuilding them, which keeps
/// the trees far smaller than independent calls to
/// [`Expression::differentiate`] would.
#[derive(Debug, Clone, Default)]
pub struct Differentiator {
    // each entry keeps its key alive so the address cannot be reused
    memo: HashMap<usize, (Expression, Expression)>,
    interned: HashMap<NodeKey, Expression>,
    canonical: HashMap<usize, (Expression, Expression)>,
}

impl Differentiator {
    pub fn new() -> Self {
        Differentiator::default()
    }

    /// Canonical copy of `e`, merged with any equal node seen before.
    pub fn intern(&mut self, e: Expression) -> Expression {
        if let Some((_, c)) = self.canonical.get(&e.id()) {
            return c.clone();
        }
        let c = self.intern_node(e.clone());
        self.canonical.insert(e.id(), (e, c.clone()));
        c
    }

    fn intern_node(&mut self, e: Expression) -> Expression {
        let key = match e.node() {
            Node::Constant(c) => NodeKey::Constant(format!("{c:?}"), c.precision()),
            Node::Variable => NodeKey::Variable,
            Node::Add(a0, b0) | Node::Sub(a0, b0) | Node::Mul(a0, b0) | Node::Div(a0, b0) => {
                let (a, b) = (self.intern(a0.clone()), self.intern(b0.clone()));
                let unchanged = a.id() == a0.id() && b.id() == b0.id();
                let tag = match e.node() {
                    Node::Add(..) => 0,
                    Node::Sub(..) => 1,
                    Node::Mul(..) => 2,
                    _ => 3,
                };
                let key = NodeKey::Binary(tag, a.id(), b.id());
                if let Some(found) = self.interned.get(&key) {
                    return found.clone();
                }
                let rebuilt = match tag {
                    0 => Node::Add(a, b),
                    1 => Node::Sub(a, b),
                    2 => Node::Mul(a, b),
                    _ => Node::Div(a, b),
                };
                let node = if unchanged { e } else { Expression::from_node(rebuilt) };
                self.interned.insert(key, node.clone());
                return node;
            }
            Node::Pow(a, n) => {
                let a = self.intern(a.clone());
                let key = NodeKey::Pow(a.id(), n.clone());
                if let Some(found) = self.interned.get(&key) {
                    return found.clone();
                }
                let node = Expression::from_node(Node::Pow(a, n.clone()));
                self.interned.insert(key, node.clone());
                return node;
            }
            Node::Exp(a) | Node::Ln(a) => {
                let is_exp = matches!(e.node(), Node::Exp(_));
                let a = self.intern(a.clone());
                let key = NodeKey::Unary(is_exp as u8, a.id());
                if let Some(found) = self.interned.get(&key) {
                    return found.clone();
                }
                let node = Expression::from_node(if is_exp { Node::Exp(a) } else { Node::Ln(a) });
                self.interned.insert(key, node.clone());
                return node;
            }
        };
        self.interned.entry(key).or_insert(e).clone()
    }

    pub fn differentiate(&mut self, e: &Expression) -> Expression {
        let e = self.intern(e.clone());
        self.diff(&e)
    }

    fn diff(&mut self, e: &Expression) -> Expression {
        if let Some((_, d)) = self.memo.get(&e.id()) {
            return d.clone();
        }
        let d = match e.node() {
            Node::Constant(_) => Expression::constant(Scalar::zero()),
            Node::Variable => Expression::constant(Scalar::one()),
            Node::Add(a, b) => Expression::add(self.diff(a), self.diff(b)),
            Node::Sub(a, b) => Expression::sub(self.diff(a), self.diff(b)),
            Node::Mul(a, b) => {
                let (da, db) = (self.diff(a), self.diff(b));
                Expression::add(Expression::mul(da, b.clone()), Expression::mul(a.clone(), db))
            }
            Node::Div(a, b) => {
                // (a/b)' = a'/b - a b' / b^2
                let (da, db) = (self.diff(a), self.diff(b));
                let first = Expression::div(da, b.clone());
                let second = Expression::div(
                    Expression::mul(a.clone(), db),
                    Expression::pow(b.clone(), RBig::from(2)),
                );
                Expression::sub(first, second)
            }
            Node::Pow(base, n) => {
                let db = self.diff(base);
                let lowered = Expression::pow(base.clone(), n - RBig::ONE);
                Expression::mul(Expression::mul(Expression::constant(n.clone()), lowered), db)
            }
            Node::Exp(a) => Expression::mul(e.clone(), self.diff(a)),
            Node::Ln(a) => Expression::div(self.diff(a), a.clone()),
        };
        let d = self.intern(d);
        self.memo.insert(e.id(), (e.clone(), d.clone()));
        d
    }
}

/// Prints in the input grammar, parenthesized so that parsing the output
/// gives back the same tree shape.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Constant(c) => {
                let text = c.to_string();
                if text.starts_with('-') || text.contains('/') || !c.is_exact() {
                    write!(f, "({text})")
                } else {
                    f.write_str(&text)
                }
            }
            Node::Variable => f.write_str("z"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Pow(base, e) => {
                // ^ is right associative, so a power base needs parentheses
                if matches!(base.node(), Node::Pow(..)) {
                    write!(f, "({base})")?;
                } else {
                    write!(f, "{base}")?;
                }
                let e = Scalar::Exact(e.clone()).to_string();
                if e.starts_with('-') || e.contains('/') {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Ln(a) => write!(f, "ln({a})"),
        }
    }
}
