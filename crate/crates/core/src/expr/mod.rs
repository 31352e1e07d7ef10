//! A small closed-form expression language over one real variable.
//!
//! Every engine in this crate receives user functions (`y(x)`, `f(s)`,
//! `m(k)`, ...) as an [`Expression`]: parsed once, evaluated many times,
//! and differentiated symbolically where a derivative is needed.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ['-'] power
//! power  := atom ['^' factor]
//! atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'
//! FUNC   := sqrt | exp | ln | sin | cos | asin | acos | atan | abs
//! ```
//!
//! `pi` and `e` are numeric constants. `^` is right-associative and a
//! leading minus applies to the whole power (`-x^2` is `-(x^2)`).

mod diff;
mod parser;

use std::fmt;

use thiserror::Error;

pub use parser::ParseError;

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Built-in single-argument functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Asin,
    Acos,
    Atan,
    Abs,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sqrt,
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Asin,
        Func::Acos,
        Func::Atan,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Asin => "asin",
            Func::Acos => "acos",
            Func::Atan => "atan",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> Result<f64, DomainError> {
        match self {
            Func::Sqrt if v < 0.0 => Err(DomainError::SqrtOfNegative(v)),
            Func::Ln if v <= 0.0 => Err(DomainError::LogOfNonPositive(v)),
            Func::Asin | Func::Acos if !(-1.0..=1.0).contains(&v) => {
                Err(DomainError::InverseTrigOutOfRange(v))
            }
            Func::Sqrt => Ok(v.sqrt()),
            Func::Exp => Ok(v.exp()),
            Func::Ln => Ok(v.ln()),
            Func::Sin => Ok(v.sin()),
            Func::Cos => Ok(v.cos()),
            Func::Asin => Ok(v.asin()),
            Func::Acos => Ok(v.acos()),
            Func::Atan => Ok(v.atan()),
            Func::Abs => Ok(v.abs()),
        }
    }
}

/// Expression tree. The variable carries no name; the owning
/// [`Expression`] knows what it is called.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Why an evaluation has no real value.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("ln of non-positive argument {0}")]
    LogOfNonPositive(f64),
    #[error("sqrt of negative argument {0}")]
    SqrtOfNegative(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative base {base} raised to non-integer exponent {exponent}")]
    NegativeBasePower { base: f64, exponent: f64 },
    #[error("inverse trigonometric argument {0} outside [-1, 1]")]
    InverseTrigOutOfRange(f64),
    #[error("result is not finite")]
    NonFinite,
}

fn finite(v: f64) -> Result<f64, DomainError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::NonFinite)
    }
}

pub(crate) fn binary_apply(op: BinOp, l: f64, r: f64) -> Result<f64, DomainError> {
    let v = match op {
        BinOp::Add => l + r,
        BinOp::Sub => l - r,
        BinOp::Mul => l * r,
        BinOp::Div => {
            if r == 0.0 {
                return Err(DomainError::DivisionByZero);
            }
            l / r
        }
        BinOp::Pow => {
            if l < 0.0 && r.fract() != 0.0 {
                return Err(DomainError::NegativeBasePower {
                    base: l,
                    exponent: r,
                });
            }
            if l == 0.0 && r < 0.0 {
                return Err(DomainError::DivisionByZero);
            }
            l.powf(r)
        }
    };
    finite(v)
}

impl Node {
    pub fn eval(&self, x: f64) -> Result<f64, DomainError> {
        match self {
            Node::Const(c) => Ok(*c),
            Node::Var => Ok(x),
            Node::Neg(a) => Ok(-a.eval(x)?),
            Node::Binary(op, l, r) => binary_apply(*op, l.eval(x)?, r.eval(x)?),
            Node::Call(f, a) => finite(f.apply(a.eval(x)?)?),
        }
    }

    pub fn has_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Call(_, a) => a.has_var(),
            Node::Binary(_, l, r) => l.has_var() || r.has_var(),
        }
    }

    /// Replace every occurrence of the variable by `inner`.
    pub fn substitute(&self, inner: &Node) -> Node {
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Var => inner.clone(),
            Node::Neg(a) => Node::Neg(Box::new(a.substitute(inner))),
            Node::Binary(op, l, r) => Node::Binary(
                *op,
                Box::new(l.substitute(inner)),
                Box::new(r.substitute(inner)),
            ),
            Node::Call(f, a) => Node::Call(*f, Box::new(a.substitute(inner))),
        }
    }

    pub fn binary(op: BinOp, l: Node, r: Node) -> Node {
        Node::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Func, a: Node) -> Node {
        Node::Call(f, Box::new(a))
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Const(c) if c.is_sign_negative() => 3,
            Node::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write(&self, var: &str, out: &mut String) {
        match self {
            Node::Const(c) => out.push_str(&format!("{c}")),
            Node::Var => out.push_str(var),
            Node::Neg(a) => {
                out.push('-');
                // A bare literal after '-' would re-parse as a negative constant.
                let wrap = a.precedence() < 4 || matches!(**a, Node::Const(_));
                a.write_wrapped(var, out, wrap);
            }
            Node::Binary(op, l, r) => {
                let (sym, prec) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                if *op == BinOp::Pow {
                    l.write_wrapped(var, out, l.precedence() < 5);
                    out.push('^');
                    r.write_wrapped(var, out, r.precedence() < 3);
                } else {
                    l.write_wrapped(var, out, l.precedence() < prec);
                    out.push_str(&format!(" {sym} "));
                    r.write_wrapped(var, out, r.precedence() <= prec);
                }
            }
            Node::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(var, out);
                out.push(')');
            }
        }
    }

    fn write_wrapped(&self, var: &str, out: &mut String, wrap: bool) {
        if wrap {
            out.push('(');
            self.write(var, out);
            out.push(')');
        } else {
            self.write(var, out);
        }
    }
}

/// A parsed function of one named variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    var: String,
}

impl Expression {
    /// Parse `text` as a function of the variable `var`.
    pub fn parse(text: &str, var: &str) -> Result<Expression, ParseError> {
        let root = parser::parse(text, var)?;
        Ok(Expression {
            root,
            var: var.to_string(),
        })
    }

    pub fn from_node(root: Node, var: &str) -> Expression {
        Expression {
            root,
            var: var.to_string(),
        }
    }

    pub fn constant(c: f64, var: &str) -> Expression {
        Expression::from_node(Node::Const(c), var)
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn eval(&self, x: f64) -> Result<f64, DomainError> {
        self.root.eval(x)
    }

    /// Symbolic derivative with respect to the expression's variable.
    pub fn derivative(&self) -> Expression {
        Expression {
            root: diff::differentiate(&self.root),
            var: self.var.clone(),
        }
    }

    /// `self(inner(t))`, a function of `inner`'s variable.
    pub fn compose(&self, inner: &Expression) -> Expression {
        Expression {
            root: self.root.substitute(&inner.root),
            var: inner.var.clone(),
        }
    }

    /// Same tree, variable renamed.
    pub fn rename(&self, var: &str) -> Expression {
        Expression {
            root: self.root.clone(),
            var: var.to_string(),
        }
    }

    /// Collapse every variable-free subtree that evaluates cleanly.
    pub fn folded(&self) -> Expression {
        Expression {
            root: diff::fold(&self.root),
            var: self.var.clone(),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.root.write(&self.var, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expression {
        Expression::parse(s, "x").unwrap()
    }

    fn c(v: f64) -> Box<Node> {
        Box::new(Node::Const(v))
    }

    #[test]
    fn parses_root_power() {
        let e = p("2*x^(1/2)");
        let want = Node::Binary(
            BinOp::Mul,
            c(2.0),
            Box::new(Node::Binary(
                BinOp::Pow,
                Box::new(Node::Var),
                Box::new(Node::Binary(BinOp::Div, c(1.0), c(2.0))),
            )),
        );
        assert_eq!(e.node(), &want);
    }

    #[test]
    fn parses_cubic() {
        let e = p("x^3 - x");
        let want = Node::Binary(
            BinOp::Sub,
            Box::new(Node::Binary(BinOp::Pow, Box::new(Node::Var), c(3.0))),
            Box::new(Node::Var),
        );
        assert_eq!(e.node(), &want);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        match Expression::parse("2*(", "x") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_and_arity() {
        assert!(matches!(
            Expression::parse("y + 1", "x"),
            Err(ParseError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(
            Expression::parse("sqrt(x, 2)", "x"),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            Expression::parse("exp x", "x"),
            Err(ParseError::Arity { .. })
        ));
    }

    #[test]
    fn power_is_right_associative_and_minus_binds_loosely() {
        assert_eq!(p("2^3^2").eval(0.0).unwrap(), 512.0);
        assert_eq!(p("-x^2").eval(3.0).unwrap(), -9.0);
        assert_eq!(p("x^-1").eval(4.0).unwrap(), 0.25);
        assert_eq!(p("-exp(x)").eval(0.0).unwrap(), -1.0);
    }

    #[test]
    fn evaluates_examples() {
        assert_eq!(p("2*x^(1/2)").eval(1.0).unwrap(), 2.0);
        assert_eq!(p("x^3 - x").eval(1.0).unwrap(), 0.0);
        assert!(matches!(
            p("ln(x)").eval(-1.0),
            Err(DomainError::LogOfNonPositive(_))
        ));
        assert!(p("sqrt(x)").eval(-1.0).is_err());
        assert!(p("1/x").eval(0.0).is_err());
        assert!(p("x^(1/3)").eval(-8.0).is_err());
        assert_eq!(p("x^3").eval(-2.0).unwrap(), -8.0);
        assert!(p("asin(x)").eval(1.5).is_err());
        assert!(p("exp(x)").eval(1000.0).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(p("pi").eval(0.0).unwrap(), std::f64::consts::PI);
        assert_eq!(p("e").eval(0.0).unwrap(), std::f64::consts::E);
        assert_eq!(p("1e-3 + 2.5E2").eval(0.0).unwrap(), 250.001);
    }

    #[test]
    fn compose_substitutes() {
        let outer = Expression::parse("ln(s)", "s").unwrap();
        let inner = Expression::parse("x^2 + 1", "x").unwrap();
        let h = outer.compose(&inner);
        assert_eq!(h.var(), "x");
        assert!((h.eval(2.0).unwrap() - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn display_reparses() {
        for s in [
            "2*x^(1/2)",
            "-x^2",
            "(-x)^2",
            "x - (x - 1)",
            "x / (2 * x)",
            "-(2)",
            "-2 * x",
            "x^-2",
            "2^3^2",
            "(2^3)^2",
            "--x",
        ] {
            let Ok(e) = Expression::parse(s, "x") else {
                assert_eq!(s, "--x");
                continue;
            };
            let printed = e.to_string();
            let back = Expression::parse(&printed, "x").unwrap();
            assert_eq!(back, e, "{s} printed as {printed}");
        }
    }
}
