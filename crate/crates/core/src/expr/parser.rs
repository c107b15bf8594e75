//! Recursive-descent parsers for the two expression grammars. Each
//! precedence level is one function; operators of one level associate to
//! the left.

use crate::boxset::{ArithOp, BoolExpr, CmpOp};
use crate::model::Dim;

use super::ast::*;
use super::lexer::{Tok, Token};
use super::ExprError;

pub(crate) struct Parser<'t> {
    toks: &'t [Token],
    at: usize,
}

type PResult<T> = Result<T, ExprError>;

impl<'t> Parser<'t> {
    pub(crate) fn new(toks: &'t [Token]) -> Self {
        debug_assert!(matches!(toks.last(), Some(Token { tok: Tok::Eof, .. })));
        Parser { toks, at: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> &Tok {
        let t = &self.toks[self.at].tok;
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> ExprError {
        match self.peek() {
            Tok::RParen => ExprError::UnbalancedParens { pos: self.pos() },
            Tok::Eof if wanted == "`)`" => ExprError::UnbalancedParens { pos: self.pos() },
            other => self.error(format!("expected {wanted}, found `{other}`")),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{tok}`")))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub(crate) fn finish(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::RParen => Err(ExprError::UnbalancedParens { pos: self.pos() }),
            other => Err(self.error(format!("unexpected `{other}`"))),
        }
    }

    // ---- context expressions ----

    /// Full context expression, including an optional top-level comparison.
    pub(crate) fn context_expr(&mut self) -> PResult<ContextExpr> {
        let left = self.ctx_range()?;
        let op = match self.peek() {
            Tok::EqEq => CompareOp::Equal,
            Tok::SubsetEq => CompareOp::Subset,
            Tok::SupersetEq => CompareOp::Superset,
            _ => return Ok(left),
        };
        self.bump();
        let right = self.ctx_range()?;
        if matches!(self.peek(), Tok::EqEq | Tok::SubsetEq | Tok::SupersetEq) {
            return Err(self.error("comparisons do not chain"));
        }
        Ok(ContextExpr::Compare(op, Box::new(left), Box::new(right)))
    }

    fn ctx_range(&mut self) -> PResult<ContextExpr> {
        let mut left = self.ctx_additive()?;
        loop {
            match self.peek() {
                Tok::Undirected => {
                    self.bump();
                    let right = self.ctx_additive()?;
                    left = ContextExpr::binary(ContextBinOp::UndirectedRange, left, right);
                }
                Tok::Directed => {
                    self.bump();
                    let right = self.ctx_additive()?;
                    left = ContextExpr::binary(ContextBinOp::DirectedRange, left, right);
                }
                // `a <= b` is `b => a`.
                Tok::LtEq => {
                    self.bump();
                    let right = self.ctx_additive()?;
                    left = ContextExpr::binary(ContextBinOp::DirectedRange, right, left);
                }
                _ => return Ok(left),
            }
        }
    }

    fn ctx_additive(&mut self) -> PResult<ContextExpr> {
        let mut left = self.ctx_conjunctive()?;
        loop {
            let op = match self.peek() {
                Tok::Override => ContextBinOp::Override,
                Tok::Difference => ContextBinOp::Difference,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.ctx_conjunctive()?;
            left = ContextExpr::binary(op, left, right);
        }
    }

    fn ctx_conjunctive(&mut self) -> PResult<ContextExpr> {
        let mut left = self.ctx_choice()?;
        loop {
            let op = match self.peek() {
                Tok::Amp => ContextBinOp::Conjunction,
                Tok::Percent => ContextBinOp::Disjunction,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.ctx_choice()?;
            left = ContextExpr::binary(op, left, right);
        }
    }

    fn ctx_choice(&mut self) -> PResult<ContextExpr> {
        let first = self.ctx_postfix()?;
        if self.peek() != &Tok::Bar {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat(&Tok::Bar) {
            items.push(self.ctx_postfix()?);
        }
        Ok(ContextExpr::Choice(items))
    }

    fn ctx_postfix(&mut self) -> PResult<ContextExpr> {
        let mut e = self.ctx_atom()?;
        loop {
            match self.peek() {
                Tok::Project => {
                    self.bump();
                    e = ContextExpr::Projection(Box::new(e), self.dimset()?);
                }
                Tok::Hide => {
                    self.bump();
                    e = ContextExpr::Hiding(Box::new(e), self.dimset()?);
                }
                Tok::Slash => {
                    self.bump();
                    let right = self.ctx_atom()?;
                    e = ContextExpr::binary(ContextBinOp::Substitution, e, right);
                }
                _ => return Ok(e),
            }
        }
    }

    fn ctx_atom(&mut self) -> PResult<ContextExpr> {
        match self.peek() {
            Tok::Ident(_) => Ok(ContextExpr::Var(self.ident()?)),
            Tok::LBrace => match self.peek_at(1) {
                Tok::LParen | Tok::RBrace => Ok(ContextExpr::Literal(self.context_literal()?)),
                _ => Err(self.error("expected a context literal `{(d,t),...}`")),
            },
            Tok::LParen => {
                self.bump();
                let e = self.ctx_range()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("a context operand")),
        }
    }

    fn dimset(&mut self) -> PResult<DimSetExpr> {
        match self.peek() {
            Tok::Ident(_) => Ok(DimSetExpr::Var(self.ident()?)),
            Tok::LBrace => {
                self.bump();
                let mut names = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        names.push(self.ident()?);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Ok(DimSetExpr::Literal(names))
            }
            _ => Err(self.unexpected("a dimension set")),
        }
    }

    pub(crate) fn context_literal(&mut self) -> PResult<ContextLit> {
        self.expect(Tok::LBrace)?;
        let mut pairs = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(pairs);
        }
        loop {
            self.expect(Tok::LParen)?;
            let dim = self.ident()?;
            self.expect(Tok::Comma)?;
            let tag = self.tag_literal()?;
            self.expect(Tok::RParen)?;
            pairs.push((dim, tag));
            if self.eat(&Tok::RBrace) {
                return Ok(pairs);
            }
            self.expect(Tok::Comma)?;
        }
    }

    pub(crate) fn tag_literal(&mut self) -> PResult<TagLit> {
        let negative = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(TagLit::Int(if negative { -n } else { n }))
            }
            _ if negative => Err(self.unexpected("an integer")),
            Tok::Str(s) => {
                self.bump();
                Ok(TagLit::Str(s))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(match name.as_str() {
                    "true" => TagLit::Bool(true),
                    "false" => TagLit::Bool(false),
                    _ => TagLit::Label(name),
                })
            }
            _ => Err(self.unexpected("a tag")),
        }
    }

    // ---- context-set expressions ----

    pub(crate) fn set_expr(&mut self) -> PResult<SetExpr> {
        let mut left = self.set_additive()?;
        loop {
            let op = match self.peek() {
                Tok::Join => SetBinOp::Join,
                Tok::SetIntersection => SetBinOp::Intersection,
                Tok::SetUnion => SetBinOp::Union,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.set_additive()?;
            left = SetExpr::binary(op, left, right);
        }
    }

    fn set_additive(&mut self) -> PResult<SetExpr> {
        let mut left = self.set_choice()?;
        loop {
            let op = match self.peek() {
                Tok::Override => SetBinOp::Override,
                Tok::Difference => SetBinOp::Difference,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.set_choice()?;
            left = SetExpr::binary(op, left, right);
        }
    }

    fn set_choice(&mut self) -> PResult<SetExpr> {
        let mut left = self.set_postfix()?;
        while self.eat(&Tok::Bar) {
            let right = self.set_postfix()?;
            left = SetExpr::binary(SetBinOp::Choice, left, right);
        }
        Ok(left)
    }

    fn set_postfix(&mut self) -> PResult<SetExpr> {
        let mut e = self.set_atom()?;
        loop {
            match self.peek() {
                Tok::Project => {
                    self.bump();
                    e = SetExpr::Projection(Box::new(e), self.dimset()?);
                }
                Tok::Hide => {
                    self.bump();
                    e = SetExpr::Hiding(Box::new(e), self.dimset()?);
                }
                Tok::Slash => {
                    self.bump();
                    self.expect(Tok::Lt)?;
                    let dim = self.ident()?;
                    self.expect(Tok::Comma)?;
                    let tag = self.tag_literal()?;
                    self.expect(Tok::Gt)?;
                    e = SetExpr::Substitution(Box::new(e), dim, tag);
                }
                _ => return Ok(e),
            }
        }
    }

    /// Tries to read `C <=> C`, `C => C` or `C <= C` over context operands.
    /// Restores the position and returns `None` when the input is not a
    /// range.
    fn try_range(&mut self) -> Option<PResult<SetExpr>> {
        let start = self.at;
        let left = match self.ctx_postfix() {
            Ok(e) => e,
            Err(_) => {
                self.at = start;
                return None;
            }
        };
        let (kind, swap) = match self.peek() {
            Tok::Undirected => (RangeKind::Undirected, false),
            Tok::Directed => (RangeKind::Directed, false),
            Tok::LtEq => (RangeKind::Directed, true),
            _ => {
                self.at = start;
                return None;
            }
        };
        self.bump();
        Some(self.ctx_postfix().map(|right| {
            let (l, r) = if swap { (right, left) } else { (left, right) };
            SetExpr::Range(kind, Box::new(l), Box::new(r))
        }))
    }

    fn set_atom(&mut self) -> PResult<SetExpr> {
        if let Tok::Ident(name) = self.peek() {
            if name == "Box" && self.peek_at(1) == &Tok::LBracket {
                return self.box_literal();
            }
        }
        if self.peek() == &Tok::LBrace && self.peek_at(1) == &Tok::LBrace {
            return self.set_literal();
        }
        if let Some(range) = self.try_range() {
            return range;
        }
        match self.peek() {
            Tok::Ident(_) => Ok(SetExpr::Var(self.ident()?)),
            Tok::LBrace if self.peek_at(1) == &Tok::RBrace => {
                self.bump();
                self.bump();
                Ok(SetExpr::Literal(Vec::new()))
            }
            Tok::LParen => {
                self.bump();
                let e = self.set_expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("a context-set operand")),
        }
    }

    fn set_literal(&mut self) -> PResult<SetExpr> {
        self.expect(Tok::LBrace)?;
        let mut members = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(SetExpr::Literal(members));
        }
        loop {
            members.push(self.context_literal()?);
            if self.eat(&Tok::RBrace) {
                return Ok(SetExpr::Literal(members));
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn box_literal(&mut self) -> PResult<SetExpr> {
        self.ident()?;
        self.expect(Tok::LBracket)?;
        let mut dims = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            dims.push(self.ident()?);
        }
        let predicate = if self.eat(&Tok::Bar) {
            self.pred_or(&dims)?
        } else {
            BoolExpr::Const(true)
        };
        self.expect(Tok::RBracket)?;
        Ok(SetExpr::Box { dims, predicate })
    }

    // ---- Box predicates ----

    pub(crate) fn pred_or(&mut self, dims: &[String]) -> PResult<BoolExpr> {
        let mut left = self.pred_and(dims)?;
        while self.peek() == &Tok::Ident("or".into()) {
            self.bump();
            let right = self.pred_and(dims)?;
            left = BoolExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn pred_and(&mut self, dims: &[String]) -> PResult<BoolExpr> {
        let mut left = self.pred_not(dims)?;
        while self.peek() == &Tok::Ident("and".into()) {
            self.bump();
            let right = self.pred_not(dims)?;
            left = BoolExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn pred_not(&mut self, dims: &[String]) -> PResult<BoolExpr> {
        if self.peek() == &Tok::Ident("not".into()) {
            self.bump();
            return Ok(BoolExpr::Not(Box::new(self.pred_not(dims)?)));
        }
        self.pred_cmp(dims)
    }

    fn pred_cmp(&mut self, dims: &[String]) -> PResult<BoolExpr> {
        let left = self.pred_sum(dims)?;
        let op = match self.peek() {
            Tok::EqEq | Tok::Assign => CmpOp::Eq,
            Tok::NotEq => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::LtEq => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::GtEq => CmpOp::Ge,
            _ => return Ok(left),
        };
        self.bump();
        let right = self.pred_sum(dims)?;
        Ok(BoolExpr::Cmp(op, Box::new(left), Box::new(right)))
    }

    fn pred_sum(&mut self, dims: &[String]) -> PResult<BoolExpr> {
        let mut left = self.pred_product(dims)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.pred_product(dims)?;
            left = BoolExpr::Arith(op, Box::new(left), Box::new(right));
        }
    }

    fn pred_product(&mut self, dims: &[String]) -> PResult<BoolExpr> {
        let mut left = self.pred_unary(dims)?;
        while self.eat(&Tok::Star) {
            let right = self.pred_unary(dims)?;
            left = BoolExpr::Arith(ArithOp::Mul, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn pred_unary(&mut self, dims: &[String]) -> PResult<BoolExpr> {
        if self.eat(&Tok::Minus) {
            return Ok(BoolExpr::Neg(Box::new(self.pred_unary(dims)?)));
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(BoolExpr::Lit(crate::model::TagValue::Int(n)))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(BoolExpr::Lit(crate::model::TagValue::str(&s)))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(match name.as_str() {
                    "true" => BoolExpr::Const(true),
                    "false" => BoolExpr::Const(false),
                    _ if dims.contains(&name) => BoolExpr::Var(Dim::new(&name)),
                    _ => BoolExpr::Label(name),
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.pred_or(dims)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("a predicate operand")),
        }
    }
}
