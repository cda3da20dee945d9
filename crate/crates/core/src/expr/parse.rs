use super::{BinaryOp, Expr, ExprError, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const BASE_START: &[&str] = &["number", "s", "t", "pi", "function", "(", "-"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, start));
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // optional exponent, only if digits follow
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme = &text[start..i];
            let value: f64 = lexeme.parse().map_err(|_| ExprError::Parse {
                offset: start,
                expected: vec!["number"],
                found: format!("`{lexeme}`"),
            })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ExprError::Parse {
                offset: start,
                expected: BASE_START.to_vec(),
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ExprError {
        ExprError::Parse {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let offset = self.offset();
        let exponent = self.base()?;
        if !exponent.is_constant() {
            return Err(ExprError::NonConstantExponent { offset });
        }
        Ok(Expr::pow(base, exponent))
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Const(x))
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::neg(self.base()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "s" => Ok(Expr::Var(Var::S)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "pi" => Ok(Expr::Pi),
                    _ => {
                        let op = UnaryOp::from_name(&name).ok_or(ExprError::UnknownIdentifier { name, offset })?;
                        self.expect(Tok::LParen, "(")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, ")")?;
                        Ok(Expr::unary(op, arg))
                    }
                }
            }
            _ => Err(self.error(BASE_START)),
        }
    }
}

/// Parses an expression in `s` and `t`.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let mut expected = vec!["+", "-", "*", "/"];
        if !matches!(e, Expr::Binary(BinaryOp::Pow, ..)) {
            expected.push("^");
        }
        expected.push("end of input");
        return Err(p.error(&expected));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Expr {
        Expr::Const(x)
    }
    fn s() -> Expr {
        Expr::Var(Var::S)
    }
    fn t() -> Expr {
        Expr::Var(Var::T)
    }

    #[test]
    fn parses_quotient_of_sum() {
        let e = parse("(sin(s)+s)/2").unwrap();
        let want = Expr::div(Expr::add(Expr::unary(UnaryOp::Sin, s()), s()), c(2.0));
        assert_eq!(e, want);
    }

    #[test]
    fn parses_negated_quotient() {
        let e = parse("-t/(2*sqrt(2))").unwrap();
        let want = Expr::div(Expr::neg(t()), Expr::mul(c(2.0), Expr::unary(UnaryOp::Sqrt, c(2.0))));
        assert_eq!(e, want);
    }

    #[test]
    fn function_requires_parentheses() {
        match parse("sin s") {
            Err(ExprError::Parse { offset, expected, .. }) => {
                assert_eq!(offset, 4);
                assert_eq!(expected, vec!["("]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse("2*foo(s)"),
            Err(ExprError::UnknownIdentifier {
                name: "foo".into(),
                offset: 2
            })
        );
        assert!(matches!(parse("x"), Err(ExprError::UnknownIdentifier { .. })));
    }

    #[test]
    fn malformed_inputs_report_offsets() {
        assert!(matches!(parse(""), Err(ExprError::Parse { offset: 0, .. })));
        assert!(matches!(parse("1 +"), Err(ExprError::Parse { offset: 3, .. })));
        assert!(matches!(parse("(s"), Err(ExprError::Parse { offset: 2, .. })));
        assert!(matches!(parse("s)"), Err(ExprError::Parse { offset: 1, .. })));
        assert!(matches!(parse("s $ t"), Err(ExprError::Parse { offset: 2, .. })));
        assert!(matches!(parse("s^2^3"), Err(ExprError::Parse { offset: 3, .. })));
    }

    #[test]
    fn exponent_must_be_constant() {
        assert_eq!(parse("2^s"), Err(ExprError::NonConstantExponent { offset: 2 }));
        assert!(parse("s^(1/2)").is_ok());
        assert!(parse("s^-1").is_ok());
        assert!(parse("s^pi").is_ok());
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(parse("1.5e-3").unwrap(), c(1.5e-3));
        assert_eq!(parse(".25").unwrap(), c(0.25));
        // `2e` is the number 2 followed by an identifier
        assert!(matches!(parse("2e"), Err(ExprError::Parse { .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("1-s-t").unwrap(), Expr::sub(Expr::sub(c(1.0), s()), t()));
        assert_eq!(parse("s*t^2").unwrap(), Expr::mul(s(), Expr::pow(t(), c(2.0))));
        // unary minus binds to the base, before ^
        assert_eq!(parse("-s^2").unwrap(), Expr::pow(Expr::neg(s()), c(2.0)));
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(
            parse(" cos ( s ) / sqrt( 2 ) ").unwrap(),
            parse("cos(s)/sqrt(2)").unwrap()
        );
    }
}
