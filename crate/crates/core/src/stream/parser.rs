//! Text syntax for stream equations, e.g.
//!
//! ```text
//! A = [1,2,3,4,5]
//! C = A fby B
//! D = A @.time B
//! E = #.time
//! N = 0 fby N + 1
//! ```

use std::sync::Arc;

use crate::model::{is_identifier, Dim};

use super::ast::{BinOp, StreamExpr, UnOp};
use super::{StreamError, StreamValue, TIME};

#[derive(Debug, Clone, PartialEq, Eq)]
enum T {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: &[&str] = &[
    "==", "!=", "<=", ">=", "<", ">", "=", "+", "-", "*", "/", "%", "(", ")", "[", "]", ",", "@", "#", ".", ";",
];

pub(crate) const KEYWORDS: &[&str] = &[
    "first", "next", "prev", "fby", "wvr", "asa", "upon", "if", "then", "else", "fi", "and", "or", "not", "true",
    "false", "nil",
];

fn lex(text: &str) -> Result<Vec<(T, usize)>, StreamError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((T::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| StreamError::Syntax {
                pos,
                msg: format!("integer literal `{digits}` is out of range"),
            })?;
            out.push((T::Int(n), pos));
            continue;
        }
        for sym in SYMBOLS {
            let len = sym.len();
            if i + len <= chars.len() && chars[i..i + len].iter().copied().eq(sym.chars()) {
                out.push((T::Sym(sym), pos));
                i += len;
                continue 'outer;
            }
        }
        return Err(StreamError::Syntax {
            pos,
            msg: format!("unknown character `{c}`"),
        });
    }
    out.push((T::Eof, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(T, usize)>,
    at: usize,
}

type PResult<T> = Result<T, StreamError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &T {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) {
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
    }

    fn error<X>(&self, msg: impl Into<String>) -> PResult<X> {
        Err(StreamError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), T::Sym(s) if *s == sym)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), T::Ident(s) if s == kw)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        let hit = self.is_sym(sym);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.is_kw(kw);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_sym(&mut self, sym: &str) -> PResult<()> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            let found = self.describe();
            self.error(format!("expected `{sym}`, found {found}"))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            let found = self.describe();
            self.error(format!("expected `{kw}`, found {found}"))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            T::Ident(s) => format!("`{s}`"),
            T::Int(n) => format!("`{n}`"),
            T::Sym(s) => format!("`{s}`"),
            T::Eof => "end of input".into(),
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            T::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => {
                let found = self.describe();
                self.error(format!("expected a name, found {found}"))
            }
        }
    }

    /// Optional `.d` suffix on an operator; `time` when absent.
    fn dim_suffix(&mut self) -> PResult<Dim> {
        if self.eat_sym(".") {
            Ok(Dim::new(&self.name()?))
        } else {
            Ok(Dim::new(TIME))
        }
    }

    fn expr(&mut self) -> PResult<StreamExpr> {
        let left = self.wvr()?;
        if self.eat_kw("fby") {
            let d = self.dim_suffix()?;
            let right = self.expr()?;
            return Ok(StreamExpr::Fby(d, Arc::new(left), Arc::new(right)));
        }
        Ok(left)
    }

    fn wvr(&mut self) -> PResult<StreamExpr> {
        let mut left = self.at_level()?;
        loop {
            let ctor: fn(Dim, Arc<StreamExpr>, Arc<StreamExpr>) -> StreamExpr = if self.eat_kw("wvr") {
                StreamExpr::Wvr
            } else if self.eat_kw("asa") {
                StreamExpr::Asa
            } else if self.eat_kw("upon") {
                StreamExpr::Upon
            } else {
                return Ok(left);
            };
            let d = self.dim_suffix()?;
            let right = self.at_level()?;
            left = ctor(d, Arc::new(left), Arc::new(right));
        }
    }

    fn at_level(&mut self) -> PResult<StreamExpr> {
        let mut left = self.or()?;
        while self.eat_sym("@") {
            self.expect_sym(".")?;
            let d = Dim::new(&self.name()?);
            let right = self.or()?;
            left = StreamExpr::At(d, Arc::new(left), Arc::new(right));
        }
        Ok(left)
    }

    fn or(&mut self) -> PResult<StreamExpr> {
        let mut left = self.and()?;
        while self.eat_kw("or") {
            left = StreamExpr::binary(BinOp::Or, left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> PResult<StreamExpr> {
        let mut left = self.not()?;
        while self.eat_kw("and") {
            left = StreamExpr::binary(BinOp::And, left, self.not()?);
        }
        Ok(left)
    }

    fn not(&mut self) -> PResult<StreamExpr> {
        if self.eat_kw("not") {
            return Ok(StreamExpr::Unary(UnOp::Not, Arc::new(self.not()?)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> PResult<StreamExpr> {
        let left = self.sum()?;
        let op = match self.peek() {
            T::Sym("==") => BinOp::Eq,
            T::Sym("!=") => BinOp::Ne,
            T::Sym("<") => BinOp::Lt,
            T::Sym("<=") => BinOp::Le,
            T::Sym(">") => BinOp::Gt,
            T::Sym(">=") => BinOp::Ge,
            _ => return Ok(left),
        };
        self.bump();
        Ok(StreamExpr::binary(op, left, self.sum()?))
    }

    fn sum(&mut self) -> PResult<StreamExpr> {
        let mut left = self.product()?;
        loop {
            let op = match self.peek() {
                T::Sym("+") => BinOp::Add,
                T::Sym("-") => BinOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            left = StreamExpr::binary(op, left, self.product()?);
        }
    }

    fn product(&mut self) -> PResult<StreamExpr> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                T::Sym("*") => BinOp::Mul,
                T::Sym("/") => BinOp::Div,
                T::Sym("%") => BinOp::Rem,
                _ => return Ok(left),
            };
            self.bump();
            left = StreamExpr::binary(op, left, self.unary()?);
        }
    }

    fn unary(&mut self) -> PResult<StreamExpr> {
        if self.eat_sym("-") {
            return Ok(StreamExpr::Unary(UnOp::Neg, Arc::new(self.unary()?)));
        }
        for (kw, ctor) in [
            ("first", StreamExpr::First as fn(Dim, Arc<StreamExpr>) -> StreamExpr),
            ("next", StreamExpr::Next),
            ("prev", StreamExpr::Prev),
        ] {
            if self.eat_kw(kw) {
                let d = self.dim_suffix()?;
                return Ok(ctor(d, Arc::new(self.unary()?)));
            }
        }
        self.atom()
    }

    fn literal_value(&mut self) -> PResult<StreamValue> {
        let negative = self.eat_sym("-");
        let v = match self.peek().clone() {
            T::Int(n) => StreamValue::Int(if negative { -n } else { n }),
            T::Ident(s) if !negative && s == "true" => StreamValue::Bool(true),
            T::Ident(s) if !negative && s == "false" => StreamValue::Bool(false),
            T::Ident(s) if !negative && s == "nil" => StreamValue::Nil,
            _ => {
                let found = self.describe();
                return self.error(format!("expected a literal, found {found}"));
            }
        };
        self.bump();
        Ok(v)
    }

    fn atom(&mut self) -> PResult<StreamExpr> {
        match self.peek().clone() {
            T::Int(n) => {
                self.bump();
                Ok(StreamExpr::Const(StreamValue::Int(n)))
            }
            T::Ident(s) if s == "true" || s == "false" || s == "nil" => Ok(StreamExpr::Const(self.literal_value()?)),
            T::Ident(s) if s == "if" => {
                self.bump();
                let c = self.expr()?;
                self.expect_kw("then")?;
                let a = self.expr()?;
                self.expect_kw("else")?;
                let b = self.expr()?;
                self.expect_kw("fi")?;
                Ok(StreamExpr::If(Arc::new(c), Arc::new(a), Arc::new(b)))
            }
            T::Ident(_) => Ok(StreamExpr::Ref(self.name()?)),
            T::Sym("#") => {
                self.bump();
                self.expect_sym(".")?;
                Ok(StreamExpr::Query(Dim::new(&self.name()?)))
            }
            T::Sym("[") => {
                self.bump();
                let mut values = Vec::new();
                if !self.eat_sym("]") {
                    loop {
                        values.push(self.literal_value()?);
                        if self.eat_sym("]") {
                            break;
                        }
                        self.expect_sym(",")?;
                    }
                }
                let d = self.dim_suffix()?;
                Ok(StreamExpr::List(values, d))
            }
            T::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => {
                let found = self.describe();
                self.error(format!("expected a stream expression, found {found}"))
            }
        }
    }

    fn equation(&mut self) -> PResult<(String, StreamExpr)> {
        let name = self.name()?;
        self.expect_sym("=")?;
        Ok((name, self.expr()?))
    }

    fn finish(&self) -> PResult<()> {
        if matches!(self.peek(), T::Eof) {
            Ok(())
        } else {
            let found = self.describe();
            self.error(format!("unexpected {found}"))
        }
    }
}

pub fn parse_stream_expr(text: &str) -> Result<StreamExpr, StreamError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses `name = expr`.
pub fn parse_equation(text: &str) -> Result<(String, StreamExpr), StreamError> {
    let mut p = Parser::new(text)?;
    let eq = p.equation()?;
    p.finish()?;
    Ok(eq)
}

/// Parses equations separated by `;` or newlines.
pub fn parse_equations(text: &str) -> Result<Vec<(String, StreamExpr)>, StreamError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let mut p = Parser::new(line)?;
        while !matches!(p.peek(), T::Eof) {
            out.push(p.equation()?);
            if !p.eat_sym(";") {
                break;
            }
        }
        p.finish()?;
    }
    Ok(out)
}

/// Parses a stream expression followed by an optional dimension name and
/// an optional count, as in `(A wvr B) time 2`.
pub fn parse_stream_prefix(text: &str) -> Result<(StreamExpr, Option<Dim>, Option<u64>), StreamError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    let dim = match p.peek().clone() {
        T::Ident(name) if is_identifier(&name) && !KEYWORDS.contains(&name.as_str()) => {
            p.bump();
            Some(Dim::new(&name))
        }
        _ => None,
    };
    let count = match p.peek().clone() {
        T::Int(n) if n >= 0 => {
            p.bump();
            Some(n as u64)
        }
        _ => None,
    };
    p.finish()?;
    Ok((e, dim, count))
}
