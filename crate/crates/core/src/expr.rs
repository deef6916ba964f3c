//! Closed-form scalar expressions over chart coordinates.
//!
//! The grammar covers the variables `x`, `y` and `r = sqrt(x^2 + y^2)`,
//! numeric literals, the constants `pi` and `e`, the binary operators
//! `+ - * / ^`, unary minus and a fixed set of elementary functions.
//! Precedence from loosest to tightest is `+ -`, `* /`, unary `-`, `^`;
//! `^` is right-associative, so `-2^2` is `-4` and `2^3^2` is `512`.
//!
//! Evaluation never yields NaN or infinity: any such intermediate is
//! reported as an [`EvalError::Domain`].

use std::fmt;

use thiserror::Error;

use crate::field::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in {what} at ({}, {})", .at.x, .at.y)]
    Domain { what: String, at: Point },
}

impl EvalError {
    pub(crate) fn domain(what: impl Into<String>, at: Point) -> Self {
        EvalError::Domain { what: what.into(), at }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
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

    /// (left, right) binding powers for the Pratt loop.
    fn binding_power(self) -> (u8, u8) {
        match self {
            BinOp::Add | BinOp::Sub => (1, 2),
            BinOp::Mul | BinOp::Div => (3, 4),
            BinOp::Pow => (8, 7),
        }
    }
}

const PREFIX_NEG_BP: u8 = 5;

/// Deepest expression tree the parser accepts; evaluation, printing and
/// dropping all recurse over the tree.
pub const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Abs,
    Min,
    Max,
}

impl Func {
    const ALL: [Func; 13] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Abs,
        Func::Min,
        Func::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree of a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next_token()?;
            let done = tok == Tok::Eof;
            out.push((tok, at));
            if done {
                return Ok(out);
            }
        }
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Tok, usize), ParseError> {
        while matches!(self.peek_byte(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek_byte() else {
            return Ok((Tok::Eof, start));
        };
        let tok = match b {
            b'0'..=b'9' | b'.' => self.number()?,
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while matches!(self.peek_byte(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(b as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while matches!(lx.peek_byte(), Some(b'0'..=b'9')) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.peek_byte() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        // An exponent is only consumed when digits follow, so `2e` stays `2` then `e`.
        if matches!(self.peek_byte(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek_byte(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Tok::Num(v)),
            _ => Err(ParseError::Syntax {
                offset: start,
                message: format!("number `{text}` out of range"),
            }),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.cursor].0
    }

    fn offset(&self) -> usize {
        self.toks[self.cursor].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.cursor].clone();
        if t.0 != Tok::Eof {
            self.cursor += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        };
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn too_deep(&self, depth: usize, at: usize) -> Result<usize, ParseError> {
        if depth > MAX_DEPTH {
            Err(ParseError::Syntax {
                offset: at,
                message: format!("expression nested deeper than {MAX_DEPTH}"),
            })
        } else {
            Ok(depth)
        }
    }

    /// Returns the parsed expression with its tree depth.
    fn expr_bp(&mut self, min_bp: u8, level: usize) -> Result<(Expr, usize), ParseError> {
        // Printing adds at most one pair of parentheses per node, so this
        // bound lets every accepted tree reparse from its own output.
        if level > 2 * MAX_DEPTH + 2 {
            return Err(ParseError::Syntax {
                offset: self.offset(),
                message: format!("expression nested deeper than {MAX_DEPTH}"),
            });
        }
        let (mut lhs, mut depth) = self.prefix(level)?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                Tok::Op('^') => BinOp::Pow,
                _ => break,
            };
            let (l_bp, r_bp) = op.binding_power();
            if l_bp < min_bp {
                break;
            }
            let (_, at) = self.bump();
            let (rhs, rd) = self.expr_bp(r_bp, level + 1)?;
            depth = self.too_deep(depth.max(rd) + 1, at)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, depth))
    }

    fn prefix(&mut self, level: usize) -> Result<(Expr, usize), ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok((Expr::Num(v), 1)),
            Tok::Op('-') => {
                let (inner, d) = self.expr_bp(PREFIX_NEG_BP, level + 1)?;
                Ok((Expr::Neg(Box::new(inner)), self.too_deep(d + 1, at)?))
            }
            Tok::LParen => {
                let inner = self.expr_bp(0, level + 1)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, at, level),
            _ => {
                self.cursor -= usize::from(tok != Tok::Eof);
                Err(self.unexpected("an operand"))
            }
        }
    }

    fn identifier(&mut self, name: String, at: usize, level: usize) -> Result<(Expr, usize), ParseError> {
        match name.as_str() {
            "x" => return Ok((Expr::Var(Var::X), 1)),
            "y" => return Ok((Expr::Var(Var::Y), 1)),
            "r" => return Ok((Expr::Var(Var::R), 1)),
            "pi" => return Ok((Expr::Const(Constant::Pi), 1)),
            "e" => return Ok((Expr::Const(Constant::E), 1)),
            _ => {}
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(ParseError::UnknownIdentifier { offset: at, name });
        };
        self.expect(Tok::LParen, "`(` after function name")?;
        let (first, mut depth) = self.expr_bp(0, level + 1)?;
        let mut args = vec![first];
        while *self.peek() == Tok::Comma {
            self.bump();
            let (a, d) = self.expr_bp(0, level + 1)?;
            depth = depth.max(d);
            args.push(a);
        }
        if args.len() != func.arity() {
            return Err(ParseError::Syntax {
                offset: at,
                message: format!(
                    "`{}` takes {} argument(s), got {}",
                    func.name(),
                    func.arity(),
                    args.len()
                ),
            });
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok((Expr::Call(func, args), self.too_deep(depth + 1, at)?))
    }
}

/// Parses `source` into an [`Expr`].
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokenize(source)?;
    if toks.len() == 1 {
        return Err(ParseError::Syntax {
            offset: toks[0].1,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser { toks, cursor: 0 };
    let (e, _) = p.expr_bp(0, 0)?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

fn checked(v: f64, what: &str, at: Point) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::domain(what, at))
    }
}

impl Expr {
    pub fn eval(&self, p: Point) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Const(c) => Ok(c.value()),
            Expr::Var(Var::X) => Ok(p.x),
            Expr::Var(Var::Y) => Ok(p.y),
            Expr::Var(Var::R) => checked(p.x.hypot(p.y), "r", p),
            Expr::Neg(e) => Ok(-e.eval(p)?),
            Expr::Binary(op, l, r) => {
                let a = l.eval(p)?;
                let b = r.eval(p)?;
                let v = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::domain("division by zero", p));
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                };
                checked(v, &format!("`{}`", op.symbol()), p)
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(p)?;
                let v = match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Atan => a.atan(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::domain("log of nonpositive value", p));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::domain("sqrt of negative value", p));
                        }
                        a.sqrt()
                    }
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Tanh => a.tanh(),
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(p)?),
                    Func::Max => a.max(args[1].eval(p)?),
                };
                checked(v, f.name(), p)
            }
        }
    }
}

/// Fully parenthesized rendering; parsing it back yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Var(Var::R) => f.write_str("r"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Evaluates `e` at `p`.
pub fn eval_field(e: &Expr, p: Point) -> Result<f64, EvalError> {
    e.eval(p)
}

/// Default finite-difference step for first derivatives at `p`.
pub fn default_step(p: Point) -> f64 {
    1e-6 * (1.0 + p.x.hypot(p.y))
}

/// Fourth-order central difference of `f` along `dir` at `p`.
pub(crate) fn fd4<F>(f: &F, p: Point, dir: (f64, f64), h: f64) -> Result<f64, EvalError>
where
    F: Fn(Point) -> Result<f64, EvalError>,
{
    let at = |k: f64| f(Point::new(p.x + k * h * dir.0, p.y + k * h * dir.1));
    Ok((-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h))
}

/// Gradient of `e` at `p` by fourth-order central differences with step `h`
/// (defaults to `1e-6 * (1 + |p|)`).
pub fn grad_field(e: &Expr, p: Point, h: Option<f64>) -> Result<(f64, f64), EvalError> {
    let h = h.unwrap_or_else(|| default_step(p));
    let f = |q: Point| e.eval(q);
    Ok((fd4(&f, p, (1.0, 0.0), h)?, fd4(&f, p, (0.0, 1.0), h)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, y: f64) -> f64 {
        parse_expr(s).unwrap().eval(Point::new(x, y)).unwrap()
    }

    #[test]
    fn conformal_factor_at_origin() {
        assert_eq!(ev("2/(1-(x^2+y^2))", 0.0, 0.0), 2.0);
        assert_eq!(ev("x*y", 2.0, 3.0), 6.0);
        assert_eq!(ev("tanh(r/2)", 0.0, 0.0), 0.0);
        assert_eq!(ev("1-1/y", 0.0, 2.0), 0.5);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse_expr("2/(1-").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 5, .. }), "{err:?}");
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_expr("1 + foo(x)").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 4,
                name: "foo".into()
            }
        );
    }

    #[test]
    fn misc_syntax_errors() {
        for (src, off) in [("", 0), ("   ", 3), ("1 +", 3), ("(1", 2), ("1 2", 2), ("#", 0)] {
            let err = parse_expr(src).unwrap_err();
            assert_eq!(err.offset(), off, "{src:?} -> {err}");
        }
        assert!(parse_expr("min(1)").is_err());
        assert!(parse_expr("sin(1, 2)").is_err());
        assert!(parse_expr("1e999").is_err());
    }

    #[test]
    fn nesting_is_bounded() {
        let parens = format!("{}x{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(parse_expr(&parens).is_err());
        let chain = vec!["1"; 10_000].join("+");
        assert!(parse_expr(&chain).is_err());
        assert!(parse_expr(&"-".repeat(10_000)).is_err());
        let ok = vec!["x"; MAX_DEPTH].join("+");
        let e = parse_expr(&ok).unwrap();
        assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev("1-2-3", 0.0, 0.0), -4.0);
        assert_eq!(ev("8/4/2", 0.0, 0.0), 1.0);
        assert_eq!(ev("1+2*3", 0.0, 0.0), 7.0);
        assert_eq!(ev("-x*y", 2.0, 3.0), -6.0);
        assert_eq!(ev("2e3 + 1.5E-1", 0.0, 0.0), 2000.15);
        assert_eq!(ev("min(x, y) + max(x, y)", 2.0, 5.0), 7.0);
        assert!((ev("r", 3.0, 4.0) - 5.0).abs() < 1e-15);
        assert!((ev("pi - 4*atan(1)", 0.0, 0.0)).abs() < 1e-15);
        assert!((ev("log(e)", 0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = |s: &str, x, y| parse_expr(s).unwrap().eval(Point::new(x, y));
        assert!(p("log(x)", -1.0, 0.0).is_err());
        assert!(p("log(x)", 0.0, 0.0).is_err());
        assert!(p("1/x", 0.0, 0.0).is_err());
        assert!(p("sqrt(x)", -1.0, 0.0).is_err());
        assert!(p("x^0.5", -4.0, 0.0).is_err());
        assert!(p("exp(x)", 1000.0, 0.0).is_err());
        assert!(p("(-8)^(1/3)", 0.0, 0.0).is_err());
    }

    #[test]
    fn gradients() {
        let g = grad_field(&parse_expr("x*y").unwrap(), Point::new(2.0, 3.0), None).unwrap();
        assert!((g.0 - 3.0).abs() < 1e-8 && (g.1 - 2.0).abs() < 1e-8);
        let g = grad_field(&parse_expr("x^2+y^2").unwrap(), Point::new(1.0, 1.0), None).unwrap();
        assert!((g.0 - 2.0).abs() < 1e-8 && (g.1 - 2.0).abs() < 1e-8);
        // lambda_x = lambda^2 x = 4x/(1-x^2)^2 for lambda = 2/(1-r^2)
        let g = grad_field(&parse_expr("2/(1-(x^2+y^2))").unwrap(), Point::new(0.5, 0.0), None).unwrap();
        assert!((g.0 - 4.0 * 0.5 / 0.75f64.powi(2)).abs() < 1e-6, "{g:?}");
        assert!(g.1.abs() < 1e-6);
    }

    #[test]
    fn gradient_domain_error_on_stencil() {
        let e = parse_expr("log(x)").unwrap();
        assert!(grad_field(&e, Point::new(1e-7, 0.0), Some(1e-6)).is_err());
    }

    #[test]
    fn display_round_trip_examples() {
        for src in [
            "2/(1-(x^2+y^2))",
            "-2^2",
            "--x",
            "min(x, -y) ^ 2 ^ 0.5",
            "sqrt((r+1)*log(r+1)/r)",
            "1e-7 * pi - e",
        ] {
            let a = parse_expr(src).unwrap();
            let b = parse_expr(&a.to_string()).unwrap();
            assert_eq!(a, b, "{src}");
        }
    }
}
