//! Model-definition files: a JSON document declaring name, spin, growth constants
//! and p_n as an expression over β[a], l[a] (1-based), n and the constants
//! pi, b, bhat, F_ipi, sin2pib, I.
//!
//! Grammar: `+ - * / ^`, parentheses, the functions exp, sinh, cosh, sin, cos,
//! tanh, sqrt, ln, and `prod(a = lo..hi, expr)` / `sum(a = lo..hi, expr)`.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{OperatorModel, DEFAULT_MAX_N};
use crate::error::{Error, Result};
use crate::minimal_ff::f_ipi;
use crate::scattering::ModelParams;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Imag,
    Var(String),
    Index(String, Box<Expr>),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(String, Box<Expr>),
    Reduce { prod: bool, var: String, lo: Box<Expr>, hi: Box<Expr>, body: Box<Expr> },
}

const FUNCTIONS: [&str; 8] = ["exp", "sinh", "cosh", "sin", "cos", "tanh", "sqrt", "ln"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    Range,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || (chars[i] == '.' && chars.get(i + 1) != Some(&'.'))) {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Model(format!("bad number `{s}`")))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if c == '.' && chars.get(i + 1) == Some(&'.') {
            out.push(Tok::Range);
            i += 2;
        } else if "+-*/^()[],=×−".contains(c) {
            out.push(Tok::Sym(match c {
                '×' => '*',
                '−' => '-',
                other => other,
            }));
            i += 1;
        } else {
            return Err(Error::Model(format!("unexpected character `{c}` in expression")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => Err(Error::Model(format!("expected `{c}`, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Expr::Bin(c, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Sym(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Expr::Bin(c, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Tok::Sym('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if let Some(Tok::Sym('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        let base = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Sym('(')) => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if name == "prod" || name == "sum" {
                    self.expect('(')?;
                    let var = match self.next() {
                        Some(Tok::Ident(v)) => v,
                        other => return Err(Error::Model(format!("expected index variable, found {other:?}"))),
                    };
                    self.expect('=')?;
                    let lo = self.expr()?;
                    match self.next() {
                        Some(Tok::Range) => {}
                        other => return Err(Error::Model(format!("expected `..`, found {other:?}"))),
                    }
                    let hi = self.expr()?;
                    self.expect(',')?;
                    let body = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Reduce {
                        prod: name == "prod",
                        var,
                        lo: Box::new(lo),
                        hi: Box::new(hi),
                        body: Box::new(body),
                    });
                }
                if FUNCTIONS.contains(&name.as_str()) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(name, Box::new(arg)));
                }
                if let Some(Tok::Sym('[')) = self.peek() {
                    self.pos += 1;
                    let idx = self.expr()?;
                    self.expect(']')?;
                    let canonical = match name.as_str() {
                        "beta" | "β" => "beta",
                        "l" | "ell" | "ℓ" => "l",
                        other => return Err(Error::Model(format!("unknown indexed symbol `{other}`"))),
                    };
                    return Ok(Expr::Index(canonical.to_string(), Box::new(idx)));
                }
                if name == "I" || name == "i" {
                    return Ok(Expr::Imag);
                }
                Ok(Expr::Var(name))
            }
            other => Err(Error::Model(format!("unexpected token {other:?}"))),
        }
    }
}

/// Constants available to expressions.
#[derive(Clone, Copy, Debug)]
struct Constants {
    b: f64,
    bhat: f64,
    f_ipi: f64,
    sin2pib: f64,
}

struct Env<'a> {
    n: usize,
    beta: &'a [Complex64],
    ell: &'a [u8],
    locals: Vec<(String, i64)>,
    k: Constants,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { toks: tokenize(src)?, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Model(format!("trailing input after position {}", p.pos)));
        }
        e.check_names(&mut Vec::new())?;
        Ok(e)
    }

    fn check_names(&self, bound: &mut Vec<String>) -> Result<()> {
        match self {
            Expr::Num(_) | Expr::Imag => Ok(()),
            Expr::Var(v) => {
                let known = ["n", "pi", "π", "b", "bhat", "F_ipi", "sin2pib"];
                if known.contains(&v.as_str()) || bound.contains(v) {
                    Ok(())
                } else {
                    Err(Error::Model(format!("unknown symbol `{v}`")))
                }
            }
            Expr::Index(_, e) | Expr::Neg(e) | Expr::Call(_, e) => e.check_names(bound),
            Expr::Bin(_, a, b) => {
                a.check_names(bound)?;
                b.check_names(bound)
            }
            Expr::Reduce { var, lo, hi, body, .. } => {
                lo.check_names(bound)?;
                hi.check_names(bound)?;
                bound.push(var.clone());
                let r = body.check_names(bound);
                bound.pop();
                r
            }
        }
    }

    fn int(&self, env: &mut Env) -> Result<i64> {
        let v = self.eval(env)?;
        let r = v.re.round();
        if (v.re - r).abs() > 1e-9 || v.im.abs() > 1e-9 {
            return Err(Error::Model(format!("index expression is not an integer: {v}")));
        }
        Ok(r as i64)
    }

    fn eval(&self, env: &mut Env) -> Result<Complex64> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(match self {
            Expr::Num(v) => c(*v),
            Expr::Imag => Complex64::new(0.0, 1.0),
            Expr::Var(name) => {
                if let Some((_, v)) = env.locals.iter().rev().find(|(n, _)| n == name) {
                    return Ok(c(*v as f64));
                }
                match name.as_str() {
                    "n" => c(env.n as f64),
                    "pi" | "π" => c(PI),
                    "b" => c(env.k.b),
                    "bhat" => c(env.k.bhat),
                    "F_ipi" => c(env.k.f_ipi),
                    "sin2pib" => c(env.k.sin2pib),
                    other => return Err(Error::Model(format!("unknown symbol `{other}`"))),
                }
            }
            Expr::Index(name, idx) => {
                let i = idx.int(env)?;
                if i < 1 || i as usize > env.n {
                    return Err(Error::Model(format!("index {i} out of range 1..{}", env.n)));
                }
                let i = i as usize - 1;
                if name == "beta" {
                    env.beta[i]
                } else {
                    c(env.ell[i] as f64)
                }
            }
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                match op {
                    '+' => x + y,
                    '-' => x - y,
                    '*' => x * y,
                    '/' => x / y,
                    _ => {
                        if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() < 1e9 {
                            x.powi(y.re as i32)
                        } else {
                            x.powc(y)
                        }
                    }
                }
            }
            Expr::Call(f, e) => {
                let x = e.eval(env)?;
                match f.as_str() {
                    "exp" => x.exp(),
                    "sinh" => x.sinh(),
                    "cosh" => x.cosh(),
                    "sin" => x.sin(),
                    "cos" => x.cos(),
                    "tanh" => x.tanh(),
                    "sqrt" => x.sqrt(),
                    _ => x.ln(),
                }
            }
            Expr::Reduce { prod, var, lo, hi, body } => {
                let (lo, hi) = (lo.int(env)?, hi.int(env)?);
                let mut acc = c(if *prod { 1.0 } else { 0.0 });
                for i in lo..=hi {
                    env.locals.push((var.clone(), i));
                    let v = body.eval(env);
                    env.locals.pop();
                    if *prod {
                        acc *= v?;
                    } else {
                        acc += v?;
                    }
                }
                acc
            }
        })
    }
}

/// The JSON layout of a model-definition file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    #[serde(default)]
    pub spin: f64,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    #[serde(default)]
    pub k: i32,
    /// Vacuum expectation value as `[re, im]`.
    #[serde(default = "default_f0")]
    pub f0: [f64; 2],
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    pub p: String,
}

fn default_c1() -> f64 {
    1.0
}
fn default_f0() -> [f64; 2] {
    [1.0, 0.0]
}
fn default_max_n() -> usize {
    DEFAULT_MAX_N
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        serde_json::from_str(&text).map_err(|e| Error::Model(format!("{}: {e}", path.display())))
    }

    /// Compiles the expression into an operator model bound to `params`.
    pub fn into_model(self, params: &ModelParams) -> Result<OperatorModel> {
        let expr = Arc::new(Expr::parse(&self.p)?);
        let k = Constants { b: params.b, bhat: params.b_hat, f_ipi: f_ipi(params), sin2pib: params.sin_2pi_b() };
        // Probe once so that malformed index ranges surface at load time.
        let probe_beta = [Complex64::new(0.1, 0.0), Complex64::new(-0.2, 0.0)];
        expr.eval(&mut Env { n: 2, beta: &probe_beta, ell: &[0, 1], locals: Vec::new(), k })?;
        let e = expr.clone();
        let p = Arc::new(move |n: usize, beta: &[Complex64], ell: &[u8]| {
            e.eval(&mut Env { n, beta, ell, locals: Vec::new(), k }).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        });
        let mut m = OperatorModel::new(&self.name, self.spin, Complex64::new(self.f0[0], self.f0[1]), p)
            .with_growth(self.c1, self.c2, self.k)
            .with_max_n(self.max_n);
        m.convergence_test_only = false;
        Ok(m)
    }
}
