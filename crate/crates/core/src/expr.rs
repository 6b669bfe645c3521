//! Expression potentials: a small recursive-descent parser over the variable
//! `s`, named parameters and `sqrt`, plus jet evaluation of the resulting tree.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' unary)?
//! atom   := number | 's' | identifier | '(' expr ')' | 'sqrt' '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-s^2` is
//! `-(s^2)` and `2^3^2` is `2^(3^2)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::jet::Jet2;
use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Const(f64),
    S,
    Param(String),
    Neg(Box<ExprAst>),
    Bin(BinOp, Box<ExprAst>, Box<ExprAst>),
    Sqrt(Box<ExprAst>),
}

impl ExprAst {
    pub fn bin(op: BinOp, a: ExprAst, b: ExprAst) -> Self {
        ExprAst::Bin(op, Box::new(a), Box::new(b))
    }

    /// Names of the parameters still present in the tree.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            ExprAst::Param(p) => out.push(p.clone()),
            ExprAst::Neg(a) | ExprAst::Sqrt(a) => a.collect_params(out),
            ExprAst::Bin(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            ExprAst::Const(_) | ExprAst::S => {}
        }
    }

    /// Substitute parameter values; every parameter must be bound.
    pub fn bind(&self, values: &BTreeMap<String, f64>) -> Result<ExprAst> {
        Ok(match self {
            ExprAst::Param(p) => match values.get(p) {
                Some(v) => ExprAst::Const(*v),
                None => return Err(Error::UnboundParameter(p.clone())),
            },
            ExprAst::Const(c) => ExprAst::Const(*c),
            ExprAst::S => ExprAst::S,
            ExprAst::Neg(a) => ExprAst::Neg(Box::new(a.bind(values)?)),
            ExprAst::Sqrt(a) => ExprAst::Sqrt(Box::new(a.bind(values)?)),
            ExprAst::Bin(op, a, b) => ExprAst::bin(*op, a.bind(values)?, b.bind(values)?),
        })
    }

    /// Evaluate with `s` carried as a jet.
    pub fn eval<T: Scalar>(&self, s: Jet2<T>) -> Result<Jet2<T>> {
        match self {
            ExprAst::Const(c) => Ok(Jet2::constant(T::lit(*c))),
            ExprAst::S => Ok(s),
            ExprAst::Param(p) => Err(Error::UnboundParameter(p.clone())),
            ExprAst::Neg(a) => Ok(-a.eval(s)?),
            ExprAst::Sqrt(a) => {
                let x = a.eval(s)?;
                if x.v < T::zero() {
                    return Err(Error::Evaluation(format!(
                        "sqrt of negative argument {}",
                        x.v
                    )));
                }
                Ok(x.sqrt())
            }
            ExprAst::Bin(op, a, b) => {
                let x = a.eval(s)?;
                let y = b.eval(s)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y.v == T::zero() {
                            return Err(Error::Evaluation("division by zero".into()));
                        }
                        Ok(x / y)
                    }
                    BinOp::Pow => pow(x, y),
                }
            }
        }
    }
}

fn pow<T: Scalar>(x: Jet2<T>, y: Jet2<T>) -> Result<Jet2<T>> {
    if y.is_constant() {
        let p = y.v;
        if p.fract() == T::zero() && p.abs() <= T::lit(1024.0) {
            let n = p.to_i32().expect("small integral exponent");
            if n < 0 && x.v == T::zero() {
                return Err(Error::Evaluation("zero raised to a negative power".into()));
            }
            return Ok(x.powi(n));
        }
        if x.v < T::zero() {
            return Err(Error::Evaluation(format!(
                "negative base {} with non-integer exponent",
                x.v
            )));
        }
        return Ok(x.powf(p));
    }
    if x.v <= T::zero() {
        return Err(Error::Evaluation(format!(
            "non-positive base {} with variable exponent",
            x.v
        )));
    }
    Ok((y * x.ln()).exp())
}

/// Fully parenthesized rendering that reparses to the same tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Const(c) => write!(f, "{c:?}"),
            ExprAst::S => f.write_str("s"),
            ExprAst::Param(p) => f.write_str(p),
            ExprAst::Neg(a) => write!(f, "(-{a})"),
            ExprAst::Sqrt(a) => write!(f, "sqrt({a})"),
            ExprAst::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn run(src: &str) -> Result<Self> {
        let chars: Vec<char> = src.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    } else {
                        return Err(Error::Syntax {
                            position: j,
                            message: "malformed exponent".into(),
                        });
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    position: start,
                    message: format!("malformed number `{text}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Syntax {
                        position: start,
                        message: format!("number `{text}` out of range"),
                    });
                }
                toks.push((Tok::Num(value), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
            } else if "+-*/^()".contains(c) {
                toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(Error::Syntax {
                    position: i,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        toks.push((Tok::End, chars.len()));
        Ok(Self { toks })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    declared: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected `{c}`")))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
        };
        Error::Syntax {
            position: self.offset(),
            message: format!("{what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = ExprAst::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = ExprAst::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<ExprAst> {
        if self.eat('-') {
            return Ok(ExprAst::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<ExprAst> {
        let base = self.atom()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            return Ok(ExprAst::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(ExprAst::Const(n))
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, at) = self.bump();
                match name.as_str() {
                    "s" => Ok(ExprAst::S),
                    "sqrt" => {
                        self.expect('(')?;
                        let inner = self.expr()?;
                        self.expect(')')?;
                        Ok(ExprAst::Sqrt(Box::new(inner)))
                    }
                    _ if self.declared.contains(&name.as_str()) => Ok(ExprAst::Param(name)),
                    _ => Err(Error::UnknownIdentifier { name, position: at }),
                }
            }
            _ => Err(self.unexpected("expected an operand")),
        }
    }
}

/// Parse `source` as a potential in `s`; `declared` lists the parameter
/// names the expression may reference.
pub fn parse_potential_expr(source: &str, declared: &[&str]) -> Result<ExprAst> {
    let lexer = Lexer::run(source)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        declared,
    };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("expected an operator or end of input"));
    }
    Ok(ast)
}
