//! Closed-form expressions in the surface parameters `s` and `t`.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' base)?
//! base   := number | 's' | 't' | 'pi' | func '(' expr ')' | '(' expr ')' | '-' base
//! func   := sin | cos | tan | exp | log | sqrt
//! ```
//!
//! Exponents must be constant. Derivatives are exact (symbolic), so repeated
//! differentiation carries no truncation error.

mod diff;
mod eval;
mod parse;

use std::fmt;

use thiserror::Error;

pub use diff::{differentiate, simplify};
pub use eval::evaluate;
pub use parse::parse;

/// Surface parameter an expression may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    S,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::S => "s",
            Var::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "tan" => UnaryOp::Tan,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
            BinaryOp::Pow => 3,
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Pi,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Self {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Self {
        Self::unary(UnaryOp::Neg, a)
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        Self::binary(BinaryOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Self::binary(BinaryOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        Self::binary(BinaryOp::Mul, a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Self {
        Self::binary(BinaryOp::Div, a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Self {
        Self::binary(BinaryOp::Pow, a, b)
    }

    /// True when no variable occurs in the tree.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi => true,
            Expr::Var(_) => false,
            Expr::Unary(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi => false,
            Expr::Var(w) => *w == v,
            Expr::Unary(_, a) => a.depends_on(v),
            Expr::Binary(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Var(_) => 1,
            Expr::Unary(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Whether the printed form of `self` is a `base` in the grammar.
    fn prints_as_base(&self) -> bool {
        match self {
            Expr::Const(c) => *c >= 0.0 || c.is_nan(),
            Expr::Var(_) | Expr::Pi | Expr::Unary(..) => true,
            Expr::Binary(..) => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Pi => f.write_str("pi"),
            Expr::Unary(UnaryOp::Neg, a) => {
                if a.prints_as_base() {
                    write!(f, "-{a}")
                } else {
                    write!(f, "-({a})")
                }
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                let wrap_left = match op {
                    BinaryOp::Pow => !a.prints_as_base(),
                    _ => matches!(**a, Expr::Binary(inner, ..) if inner.precedence() < p),
                };
                // Left-associative operators need parentheses around an
                // equal-precedence right operand; the exponent must be a base.
                let wrap_right = match op {
                    BinaryOp::Pow => !b.prints_as_base(),
                    _ => matches!(**b, Expr::Binary(inner, ..) if inner.precedence() <= p),
                };
                let sep = if p == 1 { " " } else { "" };
                if wrap_left {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, "{sep}{}{sep}", op.symbol())?;
                if wrap_right {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parse error at byte {offset}: expected one of [{}], found {found}", .expected.join(", "))]
    Parse {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("exponent at byte {offset} must be a constant expression")]
    NonConstantExponent { offset: usize },

    #[error("domain error: {op} undefined at (s, t) = ({s}, {t})")]
    Domain { op: &'static str, s: f64, t: f64 },
}
