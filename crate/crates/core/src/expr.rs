//! Arithmetic expressions for supplying f(x,u,v,z), k(x,t) and exact solutions
//! as command-line strings.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term  { ("+" | "-") term }
//! term   := unary { ("*" | "/") unary }
//! unary  := "-" unary | power
//! power  := atom [ "^" unary ]                (right-associative)
//! atom   := NUMBER | "pi" | "e" | VAR | FUNC "(" expr ")" | "(" expr ")"
//! NUMBER := digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ]
//! VAR    := "x" | "t" | "u" | "v" | "z"       (subject to the allowed set)
//! FUNC   := "sin" | "cos" | "exp" | "abs" | "sqrt" | "ln"
//! ```
//!
//! Unary minus binds looser than "^", so `-x^2` is `-(x^2)`.

use crate::error::{Error, Result};
use std::fmt;

/// The five permitted variable names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    T,
    U,
    V,
    Z,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
            Var::U => "u",
            Var::V => "v",
            Var::Z => "z",
        }
    }

    fn from_name(s: &str) -> Option<Var> {
        match s {
            "x" => Some(Var::X),
            "t" => Some(Var::T),
            "u" => Some(Var::U),
            "v" => Some(Var::V),
            "z" => Some(Var::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
    Ln,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        match s {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "abs" => Some(Func::Abs),
            "sqrt" => Some(Func::Sqrt),
            "ln" => Some(Func::Ln),
            _ => None,
        }
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

/// Parsed expression tree. Immutable; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Const(Constant),
    Variable(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Values bound to variables for one evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings {
    pub x: Option<f64>,
    pub t: Option<f64>,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub z: Option<f64>,
}

impl Bindings {
    fn get(&self, var: Var) -> Option<f64> {
        match var {
            Var::X => self.x,
            Var::T => self.t,
            Var::U => self.u,
            Var::V => self.v,
            Var::Z => self.z,
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    allowed: &'a [Var],
}

impl<'a> Parser<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(self.pos, format!("expected '{}'", b as char)))
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.parse_term()?;
                lhs = Expr::Binary(BinOp::Add, Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.parse_term()?;
                lhs = Expr::Binary(BinOp::Sub, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.parse_unary()?;
                lhs = Expr::Binary(BinOp::Mul, Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.parse_unary()?;
                lhs = Expr::Binary(BinOp::Div, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.parse_unary()?)))
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.eat(b'^') {
            let exponent = self.parse_unary()?;
            Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.parse_number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.parse_ident(),
            Some(c) => Err(self.err(self.pos, format!("unexpected character '{}'", c as char))),
            None => Err(self.err(self.pos, "unexpected end of input")),
        }
    }

    fn parse_number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            let frac = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == frac {
                return Err(self.err(self.pos, "expected digits after decimal point"));
            }
        }
        if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'e' | b'E') {
            // only an exponent if followed by digits (optionally signed);
            // otherwise leave the 'e' for the identifier/constant that follows
            let mut probe = self.pos + 1;
            if probe < self.bytes.len() && matches!(self.bytes[probe], b'+' | b'-') {
                probe += 1;
            }
            if probe < self.bytes.len() && self.bytes[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii slice");
        let value: f64 = text
            .parse()
            .map_err(|_| self.err(start, format!("invalid number literal '{text}'")))?;
        if !value.is_finite() {
            return Err(self.err(start, format!("number literal '{text}' is out of range")));
        }
        Ok(Expr::Number(value))
    }

    fn parse_ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii slice");

        if let Some(func) = Func::from_name(word) {
            self.expect(b'(')?;
            let arg = self.parse_expr()?;
            self.expect(b')')?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        match word {
            "pi" => return Ok(Expr::Const(Constant::Pi)),
            "e" => return Ok(Expr::Const(Constant::E)),
            _ => {}
        }
        if let Some(var) = Var::from_name(word) {
            if self.allowed.contains(&var) {
                return Ok(Expr::Variable(var));
            }
            let names: Vec<&str> = self.allowed.iter().map(|v| v.name()).collect();
            return Err(self.err(
                start,
                format!(
                    "variable '{word}' is not allowed here (allowed: {})",
                    names.join(", ")
                ),
            ));
        }
        Err(self.err(start, format!("unknown identifier '{word}'")))
    }
}

/// Parse `text` over the given variable set.
pub fn parse(text: &str, allowed: &[Var]) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    if let Some(bad) = text.bytes().position(|b| !b.is_ascii()) {
        return Err(Error::Parse {
            offset: bad,
            message: "non-ascii byte in expression".into(),
        });
    }
    let mut parser = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        allowed,
    };
    let expr = parser.parse_expr()?;
    if parser.peek().is_some() {
        return Err(Error::Parse {
            offset: parser.pos,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(expr)
}

/// Evaluate with the given bindings. Non-finite intermediate results and
/// domain violations (sqrt of a negative, ln of a non-positive) are errors.
pub fn eval(expr: &Expr, bindings: &Bindings) -> Result<f64> {
    let value = match expr {
        Expr::Number(v) => *v,
        Expr::Const(Constant::Pi) => std::f64::consts::PI,
        Expr::Const(Constant::E) => std::f64::consts::E,
        Expr::Variable(var) => bindings.get(*var).ok_or_else(|| {
            Error::Eval(format!("variable '{}' has no bound value", var.name()))
        })?,
        Expr::Neg(inner) => -eval(inner, bindings)?,
        Expr::Binary(op, lhs, rhs) => {
            let a = eval(lhs, bindings)?;
            let b = eval(rhs, bindings)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
        Expr::Call(func, arg) => {
            let a = eval(arg, bindings)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Abs => a.abs(),
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(Error::Eval(format!("sqrt of negative value {a}")));
                    }
                    a.sqrt()
                }
                Func::Ln => {
                    if a <= 0.0 {
                        return Err(Error::Eval(format!("ln of non-positive value {a}")));
                    }
                    a.ln()
                }
            }
        }
    };
    if !value.is_finite() {
        return Err(Error::Eval(format!(
            "expression produced a non-finite value ({value})"
        )));
    }
    Ok(value)
}

// Printing precedence levels; parenthesize a child when it binds looser than
// the position requires. Mirrors the grammar above so that printing re-parses
// to a structurally identical tree.
fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Binary(BinOp::Pow, ..) => 4,
        Expr::Number(_) | Expr::Const(_) | Expr::Variable(_) | Expr::Call(..) => 5,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Expr, min: u8) -> fmt::Result {
    if precedence(child) < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Const(Constant::Pi) => write!(f, "pi"),
            Expr::Const(Constant::E) => write!(f, "e"),
            Expr::Variable(var) => write!(f, "{}", var.name()),
            Expr::Neg(inner) => {
                write!(f, "-")?;
                fmt_child(f, inner, 3)
            }
            Expr::Binary(op, lhs, rhs) => {
                let (left_min, right_min) = match op {
                    BinOp::Add => (1, 2),
                    BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 3),
                };
                fmt_child(f, lhs, left_min)?;
                write!(f, "{}", op.symbol())?;
                fmt_child(f, rhs, right_min)
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FVARS: &[Var] = &[Var::X, Var::U, Var::V, Var::Z];
    const KVARS: &[Var] = &[Var::X, Var::T];

    fn eval_str(text: &str, b: &Bindings) -> f64 {
        eval(&parse(text, &[Var::X, Var::T, Var::U, Var::V, Var::Z]).unwrap(), b).unwrap()
    }

    #[test]
    fn basic_arithmetic() {
        let b = Bindings::default();
        assert_eq!(eval_str("2+3*4", &b), 14.0);
        assert_eq!(eval_str("(2+3)*4", &b), 20.0);
        assert_eq!(eval_str("2^3^2", &b), 512.0);
        assert_eq!(eval_str("7/2", &b), 3.5);
    }

    #[test]
    fn trig_and_constants() {
        let b = Bindings {
            x: Some(0.5),
            ..Default::default()
        };
        assert!((eval_str("sin(pi*x)", &b) - 1.0).abs() <= 1e-15);
        let b = Bindings {
            x: Some(0.0),
            t: Some(0.5),
            ..Default::default()
        };
        assert!((eval_str("exp(x)*sin(pi*t)", &b) - 1.0).abs() <= 1e-15);
        assert!((eval_str("pi^4", &Bindings::default()) - 97.40909103400243).abs() <= 1e-8);
    }

    #[test]
    fn multi_variable() {
        let b = Bindings {
            u: Some(2.0),
            v: Some(3.0),
            z: Some(4.0),
            ..Default::default()
        };
        assert_eq!(eval_str("u^2*z + u*v", &b), 22.0);
    }

    #[test]
    fn unary_minus_binds_looser_than_pow() {
        let parsed = parse("-x^2", &[Var::X]).unwrap();
        let by_hand = Expr::Neg(Box::new(Expr::Binary(
            BinOp::Pow,
            Box::new(Expr::Variable(Var::X)),
            Box::new(Expr::Number(2.0)),
        )));
        assert_eq!(parsed, by_hand);
        let b = Bindings {
            x: Some(2.0),
            ..Default::default()
        };
        assert_eq!(eval(&parsed, &b).unwrap(), -4.0);
    }

    #[test]
    fn scientific_literals() {
        let b = Bindings::default();
        assert_eq!(eval_str("1.5e-3", &b), 1.5e-3);
        assert_eq!(eval_str("2E2", &b), 200.0);
        // 'e' not followed by an exponent is the Euler constant
        assert!((eval_str("2*e", &b) - 2.0 * std::f64::consts::E).abs() <= 1e-15);
        // no implicit multiplication
        assert!(parse("2e", FVARS).is_err());
    }

    #[test]
    fn variable_scope() {
        let err = parse("sin(pi*t)", FVARS).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("'t'"), "{msg}");
        assert!(parse("exp(x)*sin(pi*t)", KVARS).is_ok());
        let err = parse("y+1", KVARS).unwrap_err();
        assert!(err.to_string().contains("unknown identifier 'y'"));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("2+*3", FVARS).unwrap_err() {
            Error::Parse { offset, .. } => assert_eq!(offset, 2),
            other => panic!("unexpected error {other:?}"),
        }
        match parse("sin(x", FVARS).unwrap_err() {
            Error::Parse { offset, .. } => assert_eq!(offset, 5),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse("", FVARS).is_err());
        assert!(parse("1 2", FVARS).is_err());
        assert!(parse("1e999", FVARS).is_err());
    }

    #[test]
    fn eval_errors() {
        let e = parse("u+1", FVARS).unwrap();
        assert!(eval(&e, &Bindings::default()).is_err());
        let b = Bindings {
            x: Some(-1.0),
            ..Default::default()
        };
        assert!(eval(&parse("sqrt(x)", FVARS).unwrap(), &b).is_err());
        assert!(eval(&parse("ln(x)", FVARS).unwrap(), &b).is_err());
        // division by zero is reported, not silently propagated
        let b = Bindings {
            x: Some(0.0),
            ..Default::default()
        };
        assert!(eval(&parse("1/x", FVARS).unwrap(), &b).is_err());
    }

    const CORPUS: &[&str] = &[
        "1",
        "0.25",
        "1.5e-3",
        "2E2",
        "pi",
        "e",
        "x",
        "-x",
        "--x",
        "x+t",
        "x-t",
        "x*t",
        "x/t",
        "x^t",
        "x+t+u",
        "x-t-u",
        "x-(t-u)",
        "x*(t+u)",
        "x/(t*u)",
        "x/t/u",
        "x/(t/u)",
        "x^t^u",
        "(x^t)^u",
        "x^-t",
        "-x^2",
        "(-x)^2",
        "2*-x",
        "sin(x)",
        "cos(pi*x)",
        "exp(-x^2)",
        "abs(x-t)",
        "sqrt(abs(x))",
        "ln(1+abs(x))",
        "sin(pi*x)*t",
        "exp(x)*sin(pi*t)",
        "u^2*z+u*v",
        "(2-u^2)*z+sin(pi*x)",
        "u^2*z+u*v-1/2*exp(x)*sin(pi*x)^2+pi^4*sin(pi*x)-pi/2*sin(2*pi*x)",
        "pi*cos(pi*x)",
        "1+2*3-4/5",
        "1-2-3-4",
        "2^3^2",
        "-(x+t)",
        "-sin(x)",
        "abs(-x)",
        "x*t*u*v*z",
        "x+0.5",
        "3.25*x^2-1.5*x+0.125",
        "sin(cos(exp(x)))",
        "1/(1+x^2)",
    ];

    #[test]
    fn round_trip_corpus() {
        assert!(CORPUS.len() >= 50);
        let all = [Var::X, Var::T, Var::U, Var::V, Var::Z];
        for text in CORPUS {
            let first = parse(text, &all).unwrap();
            let printed = first.to_string();
            let second = parse(&printed, &all)
                .unwrap_or_else(|e| panic!("reparse of '{printed}' (from '{text}'): {e}"));
            assert_eq!(first, second, "round trip failed for '{text}' -> '{printed}'");
        }
    }
}
