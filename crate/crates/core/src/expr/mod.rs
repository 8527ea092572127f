//! Scalar expression language for potentials, prepotentials and vector-field
//! components.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-'? atom
//! atom   := number | identifier | func '(' args ')' | '(' expr ')'
//! func   := 'ln' | 'exp' | 'sqrt' | 'pow'
//! ```
//!
//! `^` is right-associative. Unary minus attaches to the atom before any `^`,
//! so `-x^2` is `(-x)^2`. There is no implicit multiplication; `pow(a, b)` is
//! sugar for `a^b`.

mod dual;
mod jet;
mod parser;

pub use dual::{Dual, Dual2, Dual3, Primal, Scalar};
pub use jet::Jet3;

use num_complex::Complex64;
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("`{func}` takes {expected} argument(s), got {found} (byte {offset})")]
    Arity {
        func: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("point has {found} coordinates, expression is over {expected} variables")]
    Dimension { expected: usize, found: usize },
    #[error("expression was parsed in {parsed:?} mode, evaluated in {requested:?} mode")]
    WrongMode { parsed: Mode, requested: Mode },
}

/// Whether variables range over the reals or the complex numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Ln,
    Exp,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    /// `i`, available in complex mode only.
    ImagUnit,
}

impl Node {
    /// Integer value of a constant exponent, if the node is one.
    fn integer_constant(&self) -> Option<i32> {
        let c = match self {
            Node::Num(c) => *c,
            Node::Neg(inner) => match inner.as_ref() {
                Node::Num(c) => -*c,
                _ => return None,
            },
            _ => return None,
        };
        (c.fract() == 0.0 && c.abs() <= 1024.0).then_some(c as i32)
    }
}

/// A parsed expression together with the variable names it ranges over.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpression {
    root: Node,
    variables: Vec<String>,
    mode: Mode,
}

/// Parse `text` over the declared variables.
pub fn parse_expression(
    text: &str,
    variables: &[&str],
    mode: Mode,
) -> Result<ScalarExpression, ExprError> {
    let vars: Vec<String> = variables.iter().map(|s| s.to_string()).collect();
    let root = parser::Parser::new(text, &vars, mode)?.parse()?;
    Ok(ScalarExpression { root, variables: vars, mode })
}

/// `x1..xn` (real) or `z1..zn` (complex).
pub fn default_variables(n: usize, mode: Mode) -> Vec<String> {
    let prefix = match mode {
        Mode::Real => "x",
        Mode::Complex => "z",
    };
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl ScalarExpression {
    /// Parse over the default variable names for `n` variables.
    pub fn parse(text: &str, n: usize, mode: Mode) -> Result<Self, ExprError> {
        let names = default_variables(n, mode);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        parse_expression(text, &refs, mode)
    }

    /// Real-mode expression over `x1..xn`.
    pub fn real(text: &str, n: usize) -> Result<Self, ExprError> {
        Self::parse(text, n, Mode::Real)
    }

    pub fn constant(c: f64, n: usize) -> Self {
        ScalarExpression {
            root: Node::Num(c),
            variables: default_variables(n, Mode::Real),
            mode: Mode::Real,
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Fully parenthesised text that re-parses to the same tree.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_node(&self.root, &mut out);
        out
    }

    fn write_node(&self, node: &Node, out: &mut String) {
        match node {
            Node::Num(c) if *c >= 0.0 => out.push_str(&format!("{c:?}")),
            Node::Num(c) => out.push_str(&format!("(-{:?})", -c)),
            Node::Var(i) => out.push_str(&self.variables[*i]),
            Node::ImagUnit => out.push('i'),
            Node::Neg(inner) => {
                out.push('-');
                match inner.as_ref() {
                    Node::Num(c) if *c >= 0.0 => self.write_node(inner, out),
                    Node::Var(_) | Node::Call(..) | Node::ImagUnit => self.write_node(inner, out),
                    _ => {
                        out.push('(');
                        self.write_node(inner, out);
                        out.push(')');
                    }
                }
            }
            Node::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                    BinOp::Pow => '^',
                };
                out.push('(');
                self.write_node(l, out);
                out.push(sym);
                self.write_node(r, out);
                out.push(')');
            }
            Node::Call(f, arg) => {
                out.push_str(f.name());
                out.push('(');
                self.write_node(arg, out);
                out.push(')');
            }
        }
    }

    /// Evaluate at a point over any scalar type.
    pub fn eval_generic<S: Scalar>(&self, point: &[S]) -> Result<S, ExprError> {
        if point.len() != self.variables.len() {
            return Err(ExprError::Dimension {
                expected: self.variables.len(),
                found: point.len(),
            });
        }
        eval_node(&self.root, point)
    }

    fn require_mode(&self, requested: Mode) -> Result<(), ExprError> {
        if self.mode == requested {
            Ok(())
        } else {
            Err(ExprError::WrongMode { parsed: self.mode, requested })
        }
    }

    /// Value at a real point.
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        self.require_mode(Mode::Real)?;
        self.eval_generic(point)
    }

    /// Value at a complex point.
    pub fn eval_complex_value(&self, point: &[Complex64]) -> Result<Complex64, ExprError> {
        self.require_mode(Mode::Complex)?;
        self.eval_generic(point)
    }
}

impl fmt::Display for ScalarExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn check<S: Scalar>(v: S, what: &str) -> Result<S, ExprError> {
    if v.primal().is_finite() {
        Ok(v)
    } else {
        Err(ExprError::Overflow(format!("{what} produced a non-finite value")))
    }
}

fn eval_node<S: Scalar>(node: &Node, vars: &[S]) -> Result<S, ExprError> {
    match node {
        Node::Num(c) => Ok(S::constant(*c)),
        Node::Var(i) => Ok(vars[*i]),
        Node::ImagUnit => S::imaginary_unit()
            .ok_or_else(|| ExprError::Domain("imaginary unit in a real evaluation".into())),
        Node::Neg(inner) => Ok(-eval_node(inner, vars)?),
        Node::Binary(op, l, r) => {
            if *op == BinOp::Pow {
                return eval_pow(l, r, vars);
            }
            let a = eval_node(l, vars)?;
            let b = eval_node(r, vars)?;
            match op {
                BinOp::Add => check(a + b, "addition"),
                BinOp::Sub => check(a - b, "subtraction"),
                BinOp::Mul => check(a * b, "multiplication"),
                BinOp::Div => {
                    if b.primal().is_zero() {
                        return Err(ExprError::Domain(format!(
                            "division by zero (numerator {:?})",
                            a.primal()
                        )));
                    }
                    check(a / b, "division")
                }
                BinOp::Pow => unreachable!(),
            }
        }
        Node::Call(f, arg) => {
            let a = eval_node(arg, vars)?;
            match f {
                Func::Ln => {
                    if !a.primal().log_admissible() {
                        return Err(ExprError::Domain(format!("ln of {:?}", a.primal())));
                    }
                    check(a.ln(), "ln")
                }
                Func::Exp => check(a.exp(), "exp"),
                Func::Sqrt => {
                    if !a.primal().sqrt_admissible() {
                        return Err(ExprError::Domain(format!("sqrt of {:?}", a.primal())));
                    }
                    check(a.sqrt(), "sqrt")
                }
            }
        }
    }
}

fn eval_pow<S: Scalar>(base: &Node, exponent: &Node, vars: &[S]) -> Result<S, ExprError> {
    let b = eval_node(base, vars)?;
    if let Some(n) = exponent.integer_constant() {
        if n < 0 && b.primal().is_zero() {
            return Err(ExprError::Domain(format!("zero raised to negative power {n}")));
        }
        return check(b.powi(n), "integer power");
    }
    let e = eval_node(exponent, vars)?;
    if !b.primal().log_admissible() {
        return Err(ExprError::Domain(format!(
            "non-integer power of non-positive base {:?}",
            b.primal()
        )));
    }
    check((e * b.ln()).exp(), "power")
}
