//! Recursive-descent parser for the expression grammar.
//!
//! Precedence from tightest: `^` (right associative, literal exponents
//! only), unary minus, `*` `/`, `+` `-`. The only identifiers are the
//! variable `z` and the functions `exp` and `ln`.

use dashu::rational::RBig;

use super::{Expression, Node};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_PRECISION};

pub fn parse_expression(text: &str) -> Result<Expression> {
    parse_expression_with_precision(text, DEFAULT_PRECISION)
}

/// Parse, giving decimal literals `precision` bits.
pub fn parse_expression_with_precision(text: &str, precision: usize) -> Result<Expression> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, precision };
    let (expr, _) = parser.expr()?;
    match parser.peek() {
        Token { kind: Kind::End, .. } => Ok(expr),
        t => Err(syntax(t.at, format!("unexpected {}", t.kind.describe()))),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Number { text: String, integer: bool },
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number { text, .. } => format!("number `{text}`"),
            Kind::Ident(name) => format!("identifier `{name}`"),
            Kind::Op(c) => format!("`{c}`"),
            Kind::LParen => "`(`".into(),
            Kind::RParen => "`)`".into(),
            Kind::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    at: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax { position, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                tokens.push(Token { kind: Kind::Op(b as char), at: start });
                i += 1;
            }
            b'(' => {
                tokens.push(Token { kind: Kind::LParen, at: start });
                i += 1;
            }
            b')' => {
                tokens.push(Token { kind: Kind::RParen, at: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let mut integer = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integer = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        integer = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let literal = &text[start..i];
                if literal == "." || literal.starts_with(".e") {
                    return Err(syntax(start, "malformed number"));
                }
                tokens.push(Token { kind: Kind::Number { text: literal.to_string(), integer }, at: start });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token { kind: Kind::Ident(text[start..i].to_string()), at: start });
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        }
    }
    tokens.push(Token { kind: Kind::End, at: text.len() });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    precision: usize,
}

/// A parsed operand and whether it is a bare integer literal (possibly
/// negated); two such literals joined by `/` fold into a rational constant.
type Operand = (Expression, bool);

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek().kind == Kind::Op(op) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Operand> {
        let (mut left, mut literal) = self.term()?;
        loop {
            let node = if self.eat_op('+') {
                Node::Add
            } else if self.eat_op('-') {
                Node::Sub
            } else {
                return Ok((left, literal));
            };
            let (right, _) = self.term()?;
            left = Expression::from_node(node(left, right));
            literal = false;
        }
    }

    fn term(&mut self) -> Result<Operand> {
        let (mut left, mut literal) = self.unary()?;
        loop {
            if self.eat_op('*') {
                let (right, _) = self.unary()?;
                left = Expression::from_node(Node::Mul(left, right));
                literal = false;
            } else if self.eat_op('/') {
                let (right, right_literal) = self.unary()?;
                let folded = match (literal && right_literal, left.as_constant(), right.as_constant()) {
                    (true, Some(n), Some(d)) if !d.is_zero() => Some(n.checked_div(d)?),
                    _ => None,
                };
                left = match folded {
                    Some(q) => Expression::constant(q),
                    None => Expression::from_node(Node::Div(left, right)),
                };
                literal = false;
            } else {
                return Ok((left, literal));
            }
        }
    }

    fn unary(&mut self) -> Result<Operand> {
        if self.eat_op('-') {
            let (operand, literal) = self.unary()?;
            if literal {
                let c = operand.as_constant().expect("literal operand is a constant");
                return Ok((Expression::constant(-c), true));
            }
            let minus_one = Expression::constant(Scalar::from_int(-1));
            return Ok((Expression::from_node(Node::Mul(minus_one, operand)), false));
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Operand> {
        let (base, literal) = self.primary()?;
        let caret = self.peek().at;
        if !self.eat_op('^') {
            return Ok((base, literal));
        }
        let negate = self.eat_op('-');
        let (exponent, _) = self.power()?;
        let value = literal_exponent(&exponent).ok_or_else(|| {
            syntax(caret, "exponent must be an integer or rational literal")
        })?;
        let value = if negate { -value } else { value };
        Ok((Expression::from_node(Node::Pow(base, value)), false))
    }

    fn primary(&mut self) -> Result<Operand> {
        let token = self.next();
        match token.kind {
            Kind::Number { text, integer } => {
                let value = Scalar::parse(&text, self.precision)
                    .ok_or_else(|| syntax(token.at, format!("malformed number `{text}`")))?;
                Ok((Expression::constant(value), integer))
            }
            Kind::Ident(name) => match name.as_str() {
                "z" => Ok((Expression::variable(), false)),
                "exp" | "ln" => {
                    if self.peek().kind != Kind::LParen {
                        return Err(syntax(self.peek().at, format!("expected `(` after `{name}`")));
                    }
                    self.next();
                    let (arg, _) = self.expr()?;
                    self.close_paren()?;
                    let node = if name == "exp" { Node::Exp(arg) } else { Node::Ln(arg) };
                    Ok((Expression::from_node(node), false))
                }
                _ => Err(Error::UnknownSymbol { name, position: token.at }),
            },
            Kind::LParen => {
                let (inner, _) = self.expr()?;
                self.close_paren()?;
                Ok((inner, false))
            }
            other => Err(syntax(token.at, format!("unexpected {}", other.describe()))),
        }
    }

    fn close_paren(&mut self) -> Result<()> {
        let t = self.next();
        match t.kind {
            Kind::RParen => Ok(()),
            other => Err(syntax(t.at, format!("expected `)`, found {}", other.describe()))),
        }
    }
}

/// Value of an exponent subtree built only from exact literals.
fn literal_exponent(expr: &Expression) -> Option<RBig> {
    if expr.any_node(&mut |n| matches!(n, Node::Variable | Node::Exp(_) | Node::Ln(_))) {
        return None;
    }
    match super::evaluate(expr, &Scalar::zero()).ok()? {
        Scalar::Exact(r) => Some(r),
        Scalar::Float(_) => None,
    }
}
