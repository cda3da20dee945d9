use super::{BinaryOp, Expr, ExprError, UnaryOp, Var};
use crate::scalar::Scalar;

/// Evaluates `e` at `(s, t)`.
///
/// Fails with [`ExprError::Domain`] on `log` of a non-positive argument,
/// `sqrt` of a negative argument, division by zero, or any other operation
/// producing a non-finite value.
pub fn evaluate<T: Scalar>(e: &Expr, s: T, t: T) -> Result<T, ExprError> {
    let domain = |op: &'static str| ExprError::Domain {
        op,
        s: s.as_f64(),
        t: t.as_f64(),
    };
    let v = match e {
        Expr::Const(c) => T::lit(*c),
        Expr::Pi => T::PI(),
        Expr::Var(Var::S) => s,
        Expr::Var(Var::T) => t,
        Expr::Unary(op, a) => {
            let x = evaluate(a, s, t)?;
            match op {
                UnaryOp::Neg => -x,
                UnaryOp::Sin => x.sin(),
                UnaryOp::Cos => x.cos(),
                UnaryOp::Tan => x.tan(),
                UnaryOp::Exp => x.exp(),
                UnaryOp::Log => {
                    if x <= T::zero() {
                        return Err(domain("log"));
                    }
                    x.ln()
                }
                UnaryOp::Sqrt => {
                    if x < T::zero() {
                        return Err(domain("sqrt"));
                    }
                    x.sqrt()
                }
            }
        }
        Expr::Binary(op, a, b) => {
            let x = evaluate(a, s, t)?;
            let y = evaluate(b, s, t)?;
            match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x * y,
                BinaryOp::Div => {
                    if y == T::zero() {
                        return Err(domain("division"));
                    }
                    x / y
                }
                BinaryOp::Pow => {
                    let yi = y.round();
                    if y == yi && yi.abs() <= T::lit(64.0) {
                        if x == T::zero() && yi < T::zero() {
                            return Err(domain("pow"));
                        }
                        x.powi(yi.to_i32().unwrap_or(0))
                    } else {
                        x.powf(y)
                    }
                }
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(op_name(e)))
    }
}

fn op_name(e: &Expr) -> &'static str {
    match e {
        Expr::Unary(op, _) => op.name(),
        Expr::Binary(BinaryOp::Pow, ..) => "pow",
        Expr::Binary(BinaryOp::Div, ..) => "division",
        Expr::Binary(..) => "arithmetic",
        _ => "constant",
    }
}
