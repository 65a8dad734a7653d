//! Coefficient expressions in the single variable `t`.
//!
//! The grammar is a small calculator grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-t^2`
//! is `-(t^2)`. Multiplication must be explicit. Numeric literals use a
//! decimal point (`2.36502`), never a decimal comma.
//!
//! Expressions are immutable and cheap to clone; subtrees are shared.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    fn apply(self, x: f64) -> Result<f64> {
        let v = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {x}")));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative value {x}")));
                }
                x.sqrt()
            }
            Func::Abs => x.abs(),
        };
        finite(v, || format!("{}({x})", self.name()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Pi,
    Neg(Expr),
    Binary(BinOp, Expr, Expr),
    Call(Func, Expr),
}

/// A parsed coefficient expression `p(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Arc<Node>);

fn finite(v: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("non-finite result of {}", what())))
    }
}

fn apply_binary(op: BinOp, l: f64, r: f64) -> Result<f64> {
    let v = match op {
        BinOp::Add => l + r,
        BinOp::Sub => l - r,
        BinOp::Mul => l * r,
        BinOp::Div => {
            if r == 0.0 {
                return Err(Error::Domain("division by zero".into()));
            }
            l / r
        }
        BinOp::Pow => {
            if l == 0.0 && r < 0.0 {
                return Err(Error::Domain("zero raised to a negative power".into()));
            }
            if l < 0.0 && r.fract() != 0.0 {
                return Err(Error::Domain(format!("{l} raised to non-integer power {r}")));
            }
            l.powf(r)
        }
    };
    finite(v, || format!("{l} {} {r}", op.symbol()))
}

impl Expr {
    fn node(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn constant(c: f64) -> Expr {
        Expr::node(Node::Const(c))
    }

    pub fn var() -> Expr {
        Expr::node(Node::Var)
    }

    pub fn pi() -> Expr {
        Expr::node(Node::Pi)
    }

    pub fn kind(&self) -> &Node {
        &self.0
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    /// True when the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match &*self.0 {
            Node::Const(_) | Node::Pi => true,
            Node::Var => false,
            Node::Neg(e) | Node::Call(_, e) => e.is_constant(),
            Node::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    pub fn neg(e: Expr) -> Expr {
        if let Some(c) = e.as_const() {
            return Expr::constant(-c);
        }
        if let Node::Neg(inner) = &*e.0 {
            return inner.clone();
        }
        Expr::node(Node::Neg(e))
    }

    /// Builds a binary node, folding constants and the trivial identities
    /// `0 + x`, `x * 1`, `0 * x`, `x ^ 1`, `x ^ 0`.
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        if let (Some(a), Some(b)) = (l.as_const(), r.as_const()) {
            if let Ok(v) = apply_binary(op, a, b) {
                return Expr::constant(v);
            }
        }
        match op {
            BinOp::Add if l.is_zero() => r,
            BinOp::Add | BinOp::Sub if r.is_zero() => l,
            BinOp::Sub if l.is_zero() => Expr::neg(r),
            BinOp::Mul if l.is_zero() || r.is_zero() => Expr::constant(0.0),
            BinOp::Mul if l.is_one() => r,
            BinOp::Mul | BinOp::Div if r.is_one() => l,
            BinOp::Div if l.is_zero() => Expr::constant(0.0),
            BinOp::Pow if r.is_one() => l,
            BinOp::Pow if r.is_zero() => Expr::constant(1.0),
            _ => Expr::node(Node::Binary(op, l, r)),
        }
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            if let Ok(v) = f.apply(c) {
                return Expr::constant(v);
            }
        }
        Expr::node(Node::Call(f, arg))
    }

    pub fn add(self, r: Expr) -> Expr {
        Expr::binary(BinOp::Add, self, r)
    }

    pub fn sub(self, r: Expr) -> Expr {
        Expr::binary(BinOp::Sub, self, r)
    }

    pub fn mul(self, r: Expr) -> Expr {
        Expr::binary(BinOp::Mul, self, r)
    }

    pub fn div(self, r: Expr) -> Expr {
        Expr::binary(BinOp::Div, self, r)
    }

    pub fn pow(self, r: Expr) -> Expr {
        Expr::binary(BinOp::Pow, self, r)
    }

    pub fn scale(self, c: f64) -> Expr {
        Expr::constant(c).mul(self)
    }

    /// Evaluates the expression at `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match &*self.0 {
            Node::Const(c) => Ok(*c),
            Node::Var => Ok(t),
            Node::Pi => Ok(std::f64::consts::PI),
            Node::Neg(e) => Ok(-e.eval(t)?),
            Node::Binary(op, l, r) => apply_binary(*op, l.eval(t)?, r.eval(t)?),
            Node::Call(f, e) => f.apply(e.eval(t)?),
        }
    }

    /// Symbolic derivative with respect to `t`.
    pub fn differentiate(&self) -> Expr {
        match &*self.0 {
            Node::Const(_) | Node::Pi => Expr::constant(0.0),
            Node::Var => Expr::constant(1.0),
            Node::Neg(e) => Expr::neg(e.differentiate()),
            Node::Binary(op, l, r) => {
                let (dl, dr) = (l.differentiate(), r.differentiate());
                match op {
                    BinOp::Add => dl.add(dr),
                    BinOp::Sub => dl.sub(dr),
                    BinOp::Mul => dl.mul(r.clone()).add(l.clone().mul(dr)),
                    BinOp::Div => dl
                        .mul(r.clone())
                        .sub(l.clone().mul(dr))
                        .div(r.clone().pow(Expr::constant(2.0))),
                    BinOp::Pow => {
                        if r.is_constant() {
                            // d(f^c) = c f^(c-1) f'
                            r.clone()
                                .mul(l.clone().pow(r.clone().sub(Expr::constant(1.0))))
                                .mul(dl)
                        } else if l.is_constant() {
                            // d(c^g) = c^g ln(c) g'
                            self.clone().mul(Expr::call(Func::Log, l.clone())).mul(dr)
                        } else {
                            // f^g (g' ln f + g f'/f)
                            let inner = dr
                                .mul(Expr::call(Func::Log, l.clone()))
                                .add(r.clone().mul(dl).div(l.clone()));
                            self.clone().mul(inner)
                        }
                    }
                }
            }
            Node::Call(f, e) => {
                let de = e.differentiate();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, e.clone()),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, e.clone())),
                    Func::Tan => Expr::constant(1.0)
                        .div(Expr::call(Func::Cos, e.clone()).pow(Expr::constant(2.0))),
                    Func::Sinh => Expr::call(Func::Cosh, e.clone()),
                    Func::Cosh => Expr::call(Func::Sinh, e.clone()),
                    Func::Tanh => Expr::constant(1.0)
                        .div(Expr::call(Func::Cosh, e.clone()).pow(Expr::constant(2.0))),
                    Func::Exp => self.clone(),
                    Func::Log => Expr::constant(1.0).div(e.clone()),
                    Func::Sqrt => Expr::constant(1.0).div(self.clone().scale(2.0)),
                    // sign(e) = e / |e|, undefined at 0
                    Func::Abs => e.clone().div(self.clone()),
                };
                outer.mul(de)
            }
        }
    }

    /// `order`-th derivative.
    pub fn nth_derivative(&self, order: usize) -> Expr {
        (0..order).fold(self.clone(), |e, _| e.differentiate())
    }

    fn precedence(&self) -> u8 {
        match &*self.0 {
            Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match &*self.0 {
            Node::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Node::Var => write!(f, "t"),
            Node::Pi => write!(f, "pi"),
            Node::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 3)
            }
            Node::Binary(op, l, r) => {
                let (lp, rp) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 3),
                };
                l.write_at(f, lp)?;
                write!(f, "{}", op.symbol())?;
                r.write_at(f, rp)
            }
            Node::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.write_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr> {
        parse_expr(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| Error::Syntax {
                pos: start,
                msg: format!("malformed number `{lit}`"),
            })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(text[start..i].to_string())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                _ => {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push((i, tok));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::node(Node::Binary(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::node(Node::Binary(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::node(Node::Neg(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::node(Node::Binary(BinOp::Pow, base, exp)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.peek() {
            Some(Token::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.error("expected `)`"),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::constant(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "t" => Ok(Expr::var()),
                    "pi" => Ok(Expr::pi()),
                    _ => {
                        let Some(func) = Func::from_name(&name) else {
                            return Err(Error::UnknownIdentifier { name, pos: at });
                        };
                        if self.peek() != Some(&Token::LParen) {
                            return self.error(format!("expected `(` after `{name}`"));
                        }
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        Ok(Expr::node(Node::Call(func, arg)))
                    }
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(_) => self.error("expected a number, `t`, `pi`, a function or `(`"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a coefficient expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    if !text.is_ascii() {
        let pos = text.char_indices().find(|(_, c)| !c.is_ascii()).map_or(0, |(i, _)| i);
        return Err(Error::Syntax {
            pos,
            msg: "non-ASCII input".into(),
        });
    }
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(s: &str, t: f64) -> f64 {
        parse_expr(s).unwrap().eval(t).unwrap()
    }

    #[test]
    fn zero_literal() {
        assert_eq!(parse_expr("0").unwrap().as_const(), Some(0.0));
    }

    #[test]
    fn product_of_applications() {
        let e = parse_expr("exp(2*t)*sin(2*t)").unwrap();
        match e.kind() {
            Node::Binary(BinOp::Mul, l, r) => {
                assert!(matches!(l.kind(), Node::Call(Func::Exp, _)));
                assert!(matches!(r.kind(), Node::Call(Func::Sin, _)));
            }
            other => panic!("unexpected tree {other:?}"),
        }
        assert_eq!(e.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn polynomial_value() {
        assert_eq!(ev("t^3-3*t^2+3*t", 1.0), 1.0);
    }

    #[test]
    fn constants() {
        assert_eq!(ev("5", 3.0), 5.0);
        // pi^4 from a 30-digit reference value
        assert!((ev("pi^4", 0.7) - 97.409_091_034_002_437_236_440_332_688_7).abs() < 1e-12);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("8/4/2", 0.0), 1.0);
        assert_eq!(ev("1-2-3", 0.0), -4.0);
        assert_eq!(ev("1+2*3^2", 0.0), 19.0);
        assert_eq!(ev("(1+2)*3", 0.0), 9.0);
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert_eq!(
            parse_expr("2*t +").unwrap_err(),
            Error::Syntax {
                pos: 5,
                msg: "unexpected end of input".into()
            }
        );
        assert!(matches!(parse_expr("2 t"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("sin t"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("2,5"), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse_expr(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("(t"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("1..2"), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse_expr("3*foo(t)").unwrap_err(),
            Error::UnknownIdentifier {
                name: "foo".into(),
                pos: 2
            }
        );
        assert!(matches!(parse_expr("x"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn domain_errors() {
        for (s, t) in [("log(t)", 0.0), ("log(t)", -1.0), ("1/t", 0.0), ("t^(-1)", 0.0), ("sqrt(t)", -1.0), ("t^0.5", -2.0)] {
            assert!(
                matches!(parse_expr(s).unwrap().eval(t), Err(Error::Domain(_))),
                "{s} at {t}"
            );
        }
    }

    #[test]
    fn simple_derivatives() {
        let d = parse_expr("t^2").unwrap().differentiate();
        assert_eq!(d.to_string(), "2*t");
        assert!(parse_expr("7.5").unwrap().differentiate().is_zero());
        assert!(parse_expr("pi^2").unwrap().differentiate().is_zero());

        let d = parse_expr("exp(2*t)*sin(2*t)").unwrap().differentiate();
        assert!((d.eval(0.0).unwrap() - 2.0).abs() < 1e-15);
        let f = parse_expr("exp(2*t)*sin(2*t)").unwrap();
        let h = 1e-6;
        let fd = (f.eval(h).unwrap() - f.eval(-h).unwrap()) / (2.0 * h);
        assert!((fd - 2.0).abs() < 1e-8);
    }

    #[test]
    fn abs_derivative_is_sign() {
        let d = parse_expr("abs(t)").unwrap().differentiate();
        assert_eq!(d.eval(0.3).unwrap(), 1.0);
        assert_eq!(d.eval(-0.3).unwrap(), -1.0);
        assert!(matches!(d.eval(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn higher_derivatives() {
        let e = parse_expr("t^3/6").unwrap();
        assert_eq!(e.nth_derivative(3).eval(0.4).unwrap(), 1.0);
        assert!(e.nth_derivative(4).is_zero());
    }

    #[test]
    fn unparse_negative_constants() {
        let e = Expr::constant(-3.0).mul(Expr::var());
        let back = parse_expr(&e.to_string()).unwrap();
        assert_eq!(back.eval(2.0).unwrap(), -6.0);
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("t".to_string()),
            Just("pi".to_string()),
            (0.1f64..3.0).prop_map(|c| format!("{c:.3}")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})+({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})-({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(2+sin({b}))")),
                (inner.clone(), 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
                inner.clone().prop_map(|a| format!("-({a})")),
                (
                    inner.clone(),
                    prop_oneof![Just("sin"), Just("cos"), Just("tanh"), Just("hypot")]
                )
                    .prop_map(|(a, f)| if f == "hypot" {
                        format!("sqrt(1+({a})^2)")
                    } else {
                        format!("{f}({a})")
                    }),
                inner.clone().prop_map(|a| format!("exp(sin({a}))")),
                inner.clone().prop_map(|a| format!("log(2+cos({a}))")),
                inner.prop_map(|a| format!("cosh(tanh({a}))*sinh(cos({a}))")),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn derivative_matches_central_difference(src in arb_expr(), ts in prop::collection::vec(0.0f64..1.0, 10)) {
            let e = parse_expr(&src).unwrap();
            let d = e.differentiate();
            let h = 1e-6;
            for t in ts {
                let exact = d.eval(t).unwrap();
                let fd = (e.eval(t + h).unwrap() - e.eval(t - h).unwrap()) / (2.0 * h);
                prop_assert!((exact - fd).abs() <= 1e-5 * (1.0 + exact.abs()), "{src} at {t}: {exact} vs {fd}");
            }
        }

        #[test]
        fn unparse_round_trip(src in arb_expr()) {
            let e = parse_expr(&src).unwrap();
            let printed = e.to_string();
            let back = parse_expr(&printed).unwrap();
            prop_assert_eq!(back.to_string(), printed.clone());
            for i in 0..20 {
                let t = i as f64 / 19.0;
                let (x, y) = (e.eval(t).unwrap(), back.eval(t).unwrap());
                prop_assert!((x - y).abs() <= 1e-14 * x.abs().max(1e-300), "{printed}: {x} vs {y}");
            }
            // derivatives print to re-parseable text too
            prop_assert!(parse_expr(&e.differentiate().to_string()).is_ok());
        }
    }
}
