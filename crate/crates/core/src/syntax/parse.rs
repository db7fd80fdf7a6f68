//! Lexer and recursive-descent parser for principals, types, terms and
//! program files.
//!
//! Program files may start with header lines
//!
//! ```text
//! context: [Alice<- |> Bob<-]
//! pc: Alice<-
//! gamma: [X, x : Alice-> says X]
//! ```
//!
//! followed by a single term. `--` starts a comment.

use std::fmt;

use thiserror::Error;

use super::{Binding, Context, Side, Term, Type};
use crate::delegation::{Delegation, Delegations};
use crate::principal::Principal;

/// Position of a node in the source text (1-based).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Source positions mirroring the shape of a parsed term; children follow
/// the order of [`Term::children`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(span: Span) -> Self {
        SpanTree { span, children: Vec::new() }
    }

    fn node(span: Span, children: Vec<SpanTree>) -> Self {
        SpanTree { span, children }
    }

    pub fn child(&self, i: usize) -> Option<&SpanTree> {
        self.children.get(i)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

/// A parsed program file.
#[derive(Clone, Debug)]
pub struct Program {
    pub delegations: Delegations,
    pub pc: Option<Principal>,
    pub gamma: Context,
    pub term: Term,
    pub spans: SpanTree,
}

const KEYWORDS: &[&str] = &[
    "unit", "top", "bot", "says", "forall", "case", "of", "bind", "in", "assume", "proj1", "proj2", "inj1", "inj2",
    "eta", "sealed", "ctx", "hole", "where",
];

const SYMBOLS: &[&str] = &[
    "/\\", "\\/", "->", "<-", "|>", "\\", "|", "<", ">", "(", ")", "[", "]", "{", "}", ",", ".", ":", "=", "+", "*",
    "@", "#",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Kw(s) | Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let ident_start = |c: char| c.is_alphabetic() || c == '_';
    let ident_char = |c: char| c.is_alphanumeric() || c == '_' || c == '\'' || c == '%';
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if ident_start(c) {
            let start = i;
            while i < chars.len() && ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push((tok, span));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.chars().count();
                col += s.chars().count();
                out.push((Tok::Sym(s), span));
            }
            None => {
                return Err(ParseError { span, message: format!("unexpected character `{c}`") });
            }
        }
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Term,
    Type,
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    extended: bool,
    scope: Vec<(String, Kind)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, extended: bool) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, extended, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { span: self.span(), message: message.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(t) if *t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    /// Run `f`, restoring the position and scope if it fails.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let (pos, depth) = (self.pos, self.scope.len());
        let r = f(self);
        if r.is_err() {
            self.pos = pos;
            self.scope.truncate(depth);
        }
        r
    }

    fn kind_of(&self, x: &str) -> Option<Kind> {
        self.scope.iter().rev().find(|(y, _)| y == x).map(|(_, k)| *k)
    }

    fn require_extended(&self, what: &str) -> PResult<()> {
        if self.extended {
            Ok(())
        } else {
            self.error(format!("{what} is not part of the source language"))
        }
    }

    // Principals.

    fn principal(&mut self) -> PResult<Principal> {
        let mut p = self.principal_conj()?;
        while self.eat_sym("\\/") {
            let q = self.principal_conj()?;
            p = p.or(&q);
        }
        Ok(p)
    }

    fn principal_conj(&mut self) -> PResult<Principal> {
        let mut p = self.principal_post()?;
        while self.is_sym("/\\") {
            self.bump();
            let q = self.principal_post()?;
            p = p.and(&q);
        }
        Ok(p)
    }

    fn principal_post(&mut self) -> PResult<Principal> {
        let mut p = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Principal::name(&s)
            }
            Tok::Kw("top") => {
                self.bump();
                Principal::Top
            }
            Tok::Kw("bot") => {
                self.bump();
                Principal::Bot
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.principal()?;
                self.expect_sym(")")?;
                p
            }
            _ => return self.unexpected("a principal"),
        };
        loop {
            if self.eat_sym("->") {
                p = p.conf();
            } else if self.eat_sym("<-") {
                p = p.integ();
            } else {
                return Ok(p);
            }
        }
    }

    fn bracketed_principal(&mut self) -> PResult<Principal> {
        self.expect_sym("[")?;
        let p = self.principal()?;
        self.expect_sym("]")?;
        Ok(p)
    }

    fn delegation(&mut self) -> PResult<Delegation> {
        let p = self.principal()?;
        self.expect_sym("|>")?;
        let q = self.principal()?;
        Ok(Delegation::new(p, q))
    }

    // Types.

    fn ty(&mut self) -> PResult<Type> {
        if self.is_kw("forall") {
            self.bump();
            let x = self.ident()?;
            let pc = self.bracketed_principal()?;
            self.expect_sym(".")?;
            let body = self.ty()?;
            return Ok(Type::forall(&x, pc, body));
        }
        let lhs = self.ty_sum()?;
        if self.is_sym("[") {
            let arrow = self.attempt(|p| {
                let pc = p.bracketed_principal()?;
                p.expect_sym("->")?;
                Ok(pc)
            });
            if let Ok(pc) = arrow {
                let rhs = self.ty()?;
                return Ok(Type::fun(lhs, pc, rhs));
            }
        }
        Ok(lhs)
    }

    fn ty_sum(&mut self) -> PResult<Type> {
        let mut t = self.ty_prod()?;
        while self.eat_sym("+") {
            let u = self.ty_prod()?;
            t = Type::sum(t, u);
        }
        Ok(t)
    }

    fn ty_prod(&mut self) -> PResult<Type> {
        let mut t = self.ty_says()?;
        while self.eat_sym("*") {
            let u = self.ty_says()?;
            t = Type::prod(t, u);
        }
        Ok(t)
    }

    fn ty_says(&mut self) -> PResult<Type> {
        let labeled = self.attempt(|p| {
            let l = p.principal()?;
            if p.is_kw("says") {
                p.bump();
                let t = p.ty_says()?;
                Ok(Type::says(l, t))
            } else if p.eat_sym("|>") {
                let q = p.principal()?;
                Ok(Type::ActsFor(l, q))
            } else {
                p.unexpected("`says` or `|>`")
            }
        });
        match labeled {
            Ok(t) => Ok(t),
            Err(e) => self.ty_atom().map_err(|e2| if e2.span == self.span() { e } else { e2 }),
        }
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Kw("unit") => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(Type::Var(x))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.ty()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.unexpected("a type"),
        }
    }

    // Terms.

    fn term(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Sym("\\") => {
                self.bump();
                let x = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.ty()?;
                let pc = self.bracketed_principal()?;
                self.expect_sym(".")?;
                self.scope.push((x.clone(), Kind::Term));
                let body = self.term();
                self.scope.pop();
                let (body, sb) = body?;
                Ok((Term::lam(&x, ty, pc, body), SpanTree::node(start, vec![sb])))
            }
            Tok::Sym("/\\") => {
                self.bump();
                let x = self.ident()?;
                let pc = self.bracketed_principal()?;
                self.expect_sym(".")?;
                self.scope.push((x.clone(), Kind::Type));
                let body = self.term();
                self.scope.pop();
                let (body, sb) = body?;
                Ok((Term::tlam(&x, pc, body), SpanTree::node(start, vec![sb])))
            }
            Tok::Kw("case") => {
                self.bump();
                let (scrutinee, s0) = self.term()?;
                self.expect_kw("of")?;
                let x = self.ident()?;
                self.expect_sym(".")?;
                self.scope.push((x.clone(), Kind::Term));
                let left = self.term();
                self.scope.pop();
                let (left, s1) = left?;
                self.expect_sym("|")?;
                let at = self.span();
                let y = self.ident()?;
                if y != x {
                    return Err(ParseError {
                        span: at,
                        message: format!("both case branches must bind the same variable (`{x}` and `{y}`)"),
                    });
                }
                self.expect_sym(".")?;
                self.scope.push((x.clone(), Kind::Term));
                let right = self.term();
                self.scope.pop();
                let (right, s2) = right?;
                let t = Term::Case {
                    scrutinee: Box::new(scrutinee),
                    binder: x,
                    left: Box::new(left),
                    right: Box::new(right),
                };
                Ok((t, SpanTree::node(start, vec![s0, s1, s2])))
            }
            Tok::Kw("bind") => {
                self.bump();
                let x = self.ident()?;
                self.expect_sym("=")?;
                let (bound, s0) = self.term()?;
                self.expect_kw("in")?;
                self.scope.push((x.clone(), Kind::Term));
                let body = self.term();
                self.scope.pop();
                let (body, s1) = body?;
                Ok((Term::bind(&x, bound, body), SpanTree::node(start, vec![s0, s1])))
            }
            Tok::Kw("assume") => {
                self.bump();
                let (ev, s0) = self.term()?;
                self.expect_kw("in")?;
                let (body, s1) = self.term()?;
                Ok((Term::assume(ev, body), SpanTree::node(start, vec![s0, s1])))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.span();
        let (mut e, mut s) = self.application()?;
        while self.is_kw("where") {
            self.require_extended("`where`")?;
            self.bump();
            let (v, sv) = self.atom()?;
            e = Term::Where(Box::new(e), Box::new(v));
            s = SpanTree::node(start, vec![s, sv]);
        }
        Ok((e, s))
    }

    fn starts_arg(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) => true,
            Tok::Kw(k) => matches!(*k, "unit" | "hole"),
            Tok::Sym(s) => matches!(*s, "(" | "<" | "{" | "#"),
            Tok::Eof => false,
        }
    }

    fn application(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.span();
        let (mut e, mut s) = self.prefix()?;
        while self.starts_arg() {
            match self.argument()? {
                Arg::Type(t) => {
                    e = Term::tapp(e, t);
                    s = SpanTree::node(start, vec![s]);
                }
                Arg::Term(a, sa) => {
                    e = Term::app(e, a);
                    s = SpanTree::node(start, vec![s, sa]);
                }
            }
        }
        Ok((e, s))
    }

    /// An application argument: a type when the tokens denote one (a bound
    /// type variable, `unit`, or a parenthesized type), otherwise a term.
    fn argument(&mut self) -> PResult<Arg> {
        match self.peek().clone() {
            Tok::Kw("unit") => {
                self.bump();
                Ok(Arg::Type(Type::Unit))
            }
            Tok::Ident(x) if self.kind_of(&x) == Some(Kind::Type) => {
                self.bump();
                Ok(Arg::Type(Type::Var(x)))
            }
            Tok::Sym("(") => match self.attempt(|p| p.atom()) {
                Ok((a, sa)) => Ok(Arg::Term(a, sa)),
                Err(term_err) => self
                    .attempt(|p| {
                        p.bump();
                        let t = p.ty()?;
                        p.expect_sym(")")?;
                        Ok(Arg::Type(t))
                    })
                    .map_err(|_| term_err),
            },
            _ => {
                let (a, sa) = self.atom()?;
                Ok(Arg::Term(a, sa))
            }
        }
    }

    fn prefix(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.span();
        let one = |e: Term, s: SpanTree| (e, SpanTree::node(start, vec![s]));
        match self.peek().clone() {
            Tok::Kw(k @ ("proj1" | "proj2")) => {
                self.bump();
                let side = if k == "proj1" { Side::Left } else { Side::Right };
                let (e, s) = self.prefix()?;
                Ok(one(Term::Proj(side, Box::new(e)), s))
            }
            Tok::Kw(k @ ("inj1" | "inj2")) => {
                self.bump();
                let side = if k == "inj1" { Side::Left } else { Side::Right };
                self.expect_sym("@")?;
                let t = self.ty_atom()?;
                let (e, s) = self.prefix()?;
                Ok(one(Term::Inj(side, t, Box::new(e)), s))
            }
            Tok::Kw("eta") => {
                self.bump();
                let l = self.bracketed_principal()?;
                let (e, s) = self.prefix()?;
                Ok(one(Term::eta(l, e), s))
            }
            Tok::Kw("sealed") => {
                self.require_extended("`sealed`")?;
                self.bump();
                let l = self.bracketed_principal()?;
                let (e, s) = self.prefix()?;
                Ok(one(Term::sealed(l, e), s))
            }
            Tok::Kw("ctx") => {
                self.require_extended("`ctx`")?;
                self.bump();
                let l = self.bracketed_principal()?;
                let (e, s) = self.prefix()?;
                Ok(one(Term::ProtCtx(l, Box::new(e)), s))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(x) => {
                if self.kind_of(&x) == Some(Kind::Type) {
                    return self.error(format!("`{x}` is a type variable, not a term"));
                }
                self.bump();
                Ok((Term::Var(x), SpanTree::leaf(start)))
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    return Ok((Term::Unit, SpanTree::leaf(start)));
                }
                let (e, s) = self.term()?;
                self.expect_sym(")")?;
                Ok((e, s))
            }
            Tok::Sym("<") => {
                self.bump();
                let del = self.attempt(|p| {
                    let d = p.delegation()?;
                    p.expect_sym(">")?;
                    Ok(d)
                });
                if let Ok(d) = del {
                    return Ok((Term::delegation(&d), SpanTree::leaf(start)));
                }
                let (a, sa) = self.term()?;
                self.expect_sym(",")?;
                let (b, sb) = self.term()?;
                self.expect_sym(">")?;
                Ok((Term::pair(a, b), SpanTree::node(start, vec![sa, sb])))
            }
            Tok::Sym("{") => {
                self.require_extended("a bracket")?;
                self.bump();
                let (a, sa) = self.term()?;
                self.expect_sym("|")?;
                let (b, sb) = self.term()?;
                self.expect_sym("}")?;
                Ok((Term::bracket(a, b), SpanTree::node(start, vec![sa, sb])))
            }
            Tok::Kw("hole") => {
                self.require_extended("a hole")?;
                self.bump();
                self.expect_sym("[")?;
                let t = self.ty()?;
                self.expect_sym("]")?;
                Ok((Term::Hole(t), SpanTree::leaf(start)))
            }
            Tok::Sym("#") => {
                self.require_extended("`#`")?;
                self.bump();
                Ok((Term::Opaque, SpanTree::leaf(start)))
            }
            _ => self.unexpected("a term"),
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect_sym("[")?;
        let mut out = Vec::new();
        if self.eat_sym("]") {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_sym("]") {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn binding(&mut self) -> PResult<Binding> {
        let x = self.ident()?;
        if self.eat_sym(":") {
            Ok(Binding::Var(x, self.ty()?))
        } else {
            Ok(Binding::TyVar(x))
        }
    }

    fn header_key(&self) -> Option<String> {
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(k), Tok::Sym(":")) if matches!(k.as_str(), "context" | "pc" | "gamma") => Some(k.clone()),
            _ => None,
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut delegations = Delegations::new();
        let mut pc = None;
        let mut gamma = Context::new();
        while let Some(key) = self.header_key() {
            let line = self.span().line;
            self.bump();
            self.bump();
            match key.as_str() {
                "context" => {
                    for d in self.list(|p| {
                        let angled = p.eat_sym("<");
                        let d = p.delegation()?;
                        if angled {
                            p.expect_sym(">")?;
                        }
                        Ok(d)
                    })? {
                        delegations.push(d);
                    }
                }
                "pc" => {
                    // The pc header ends with its line, since a term may
                    // start with `/\` and would otherwise extend it.
                    let end = (self.pos..self.toks.len())
                        .find(|&i| self.toks[i].1.line > line || self.toks[i].0 == Tok::Eof)
                        .expect("token stream ends with Eof");
                    let mut toks = self.toks[self.pos..end].to_vec();
                    toks.push((Tok::Eof, self.toks[end].1));
                    let mut sub = Parser { toks, pos: 0, extended: self.extended, scope: Vec::new() };
                    pc = Some(sub.principal()?);
                    sub.expect_eof()?;
                    self.pos = end;
                }
                _ => {
                    for b in self.list(|p| p.binding())? {
                        gamma.push(b);
                    }
                }
            }
        }
        for b in gamma.bindings() {
            if let Binding::TyVar(x) = b {
                self.scope.push((x.clone(), Kind::Type));
            }
        }
        let (term, spans) = self.term()?;
        self.expect_eof()?;
        Ok(Program { delegations, pc, gamma, term, spans })
    }
}

enum Arg {
    Type(Type),
    Term(Term, SpanTree),
}

fn whole<T>(src: &str, extended: bool, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::new(src, extended)?;
    let r = f(&mut p)?;
    p.expect_eof()?;
    Ok(r)
}

/// Parse a source-level term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    whole(src, false, |p| p.term().map(|(t, _)| t))
}

/// Parse a term that may contain runtime and harness forms.
pub fn parse_extended(src: &str) -> Result<Term, ParseError> {
    whole(src, true, |p| p.term().map(|(t, _)| t))
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    whole(src, false, |p| p.ty())
}

pub fn parse_principal(src: &str) -> Result<Principal, ParseError> {
    whole(src, false, |p| p.principal())
}

/// Parse `p |> q`, optionally wrapped in angle brackets.
pub fn parse_delegation(src: &str) -> Result<Delegation, ParseError> {
    whole(src, false, |p| {
        let angled = p.eat_sym("<");
        let d = p.delegation()?;
        if angled {
            p.expect_sym(">")?;
        }
        Ok(d)
    })
}

/// Parse a program file: optional headers followed by one term.
///
/// With `extended` set, runtime and harness forms are accepted in the term.
pub fn parse_program(src: &str, extended: bool) -> Result<Program, ParseError> {
    Parser::new(src, extended)?.program()
}

impl std::str::FromStr for Principal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_principal(s)
    }
}

impl std::str::FromStr for Type {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_type(s)
    }
}
