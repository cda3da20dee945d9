use super::{evaluate, BinaryOp, Expr, UnaryOp, Var};

fn is_const(e: &Expr, c: f64) -> bool {
    matches!(e, Expr::Const(x) if *x == c)
}

fn fold(e: Expr) -> Expr {
    // Folding is only kept when the value is finite and in-domain.
    match evaluate::<f64>(&e, 0.0, 0.0) {
        Ok(v) => Expr::Const(v),
        Err(_) => e,
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(if c == 0.0 { 0.0 } else { -c }),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        other => Expr::neg(other),
    }
}

/// Constant folding plus 0/1 identity elimination and double-negation
/// cancellation. Never changes the value of the expression where it is
/// defined.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Pi => e.clone(),
        Expr::Unary(UnaryOp::Neg, a) => negate(simplify(a)),
        Expr::Unary(op, a) => {
            let a = simplify(a);
            let folded = matches!(a, Expr::Const(_));
            let out = Expr::unary(*op, a);
            if folded {
                fold(out)
            } else {
                out
            }
        }
        Expr::Binary(op, a, b) => simplify_binary(*op, simplify(a), simplify(b)),
    }
}

fn simplify_binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    if matches!((&a, &b), (Expr::Const(_), Expr::Const(_))) {
        return fold(Expr::binary(op, a, b));
    }
    match op {
        BinaryOp::Add if is_const(&a, 0.0) => b,
        BinaryOp::Add if is_const(&b, 0.0) => a,
        BinaryOp::Sub if is_const(&b, 0.0) => a,
        BinaryOp::Sub if is_const(&a, 0.0) => negate(b),
        BinaryOp::Mul if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(0.0),
        BinaryOp::Mul if is_const(&a, 1.0) => b,
        BinaryOp::Mul if is_const(&b, 1.0) => a,
        BinaryOp::Mul if is_const(&a, -1.0) => negate(b),
        BinaryOp::Mul if is_const(&b, -1.0) => negate(a),
        BinaryOp::Div if is_const(&a, 0.0) => Expr::Const(0.0),
        BinaryOp::Div if is_const(&b, 1.0) => a,
        BinaryOp::Div if is_const(&b, -1.0) => negate(a),
        BinaryOp::Pow if is_const(&b, 1.0) => a,
        BinaryOp::Pow if is_const(&b, 0.0) => Expr::Const(1.0),
        // c1 * (c2 * x) -> (c1 c2) * x keeps repeated derivatives compact
        BinaryOp::Mul => match (a, b) {
            (Expr::Const(c1), Expr::Binary(BinaryOp::Mul, inner_a, inner_b)) if matches!(*inner_a, Expr::Const(_)) => {
                let Expr::Const(c2) = *inner_a else { unreachable!() };
                simplify_binary(BinaryOp::Mul, Expr::Const(c1 * c2), *inner_b)
            }
            (a, b) => Expr::mul(a, b),
        },
        _ => Expr::binary(op, a, b),
    }
}

fn raw_derivative(e: &Expr, v: Var) -> Expr {
    if !e.depends_on(v) {
        return Expr::Const(0.0);
    }
    match e {
        Expr::Const(_) | Expr::Pi => Expr::Const(0.0),
        Expr::Var(w) => Expr::Const(if *w == v { 1.0 } else { 0.0 }),
        Expr::Unary(op, a) => {
            let da = raw_derivative(a, v);
            let a = (**a).clone();
            match op {
                UnaryOp::Neg => Expr::neg(da),
                UnaryOp::Sin => Expr::mul(Expr::unary(UnaryOp::Cos, a), da),
                UnaryOp::Cos => Expr::mul(Expr::neg(Expr::unary(UnaryOp::Sin, a)), da),
                UnaryOp::Tan => Expr::div(da, Expr::pow(Expr::unary(UnaryOp::Cos, a), Expr::Const(2.0))),
                UnaryOp::Exp => Expr::mul(Expr::unary(UnaryOp::Exp, a), da),
                UnaryOp::Log => Expr::div(da, a),
                UnaryOp::Sqrt => Expr::div(da, Expr::mul(Expr::Const(2.0), Expr::unary(UnaryOp::Sqrt, a))),
            }
        }
        Expr::Binary(op, a, b) => {
            let (da, db) = (raw_derivative(a, v), raw_derivative(b, v));
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinaryOp::Add => Expr::add(da, db),
                BinaryOp::Sub => Expr::sub(da, db),
                BinaryOp::Mul if !a.depends_on(v) => Expr::mul(a, db),
                BinaryOp::Mul if !b.depends_on(v) => Expr::mul(da, b),
                BinaryOp::Mul => Expr::add(Expr::mul(da, b), Expr::mul(a, db)),
                BinaryOp::Div if !b.depends_on(v) => Expr::div(da, b),
                BinaryOp::Div => Expr::div(
                    Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a, db)),
                    Expr::pow(b, Expr::Const(2.0)),
                ),
                // exponent is constant by construction
                BinaryOp::Pow => Expr::mul(Expr::mul(b.clone(), Expr::pow(a, Expr::sub(b, Expr::Const(1.0)))), da),
            }
        }
    }
}

/// Exact partial derivative of `e` with respect to `v`, simplified.
pub fn differentiate(e: &Expr, v: Var) -> Expr {
    simplify(&raw_derivative(e, v))
}
