//! Recursive-descent parser for the ASCII formula language.
//!
//! ```text
//! formula  := gdisj
//! gdisj    := disj ( "<|>" disj )*
//! disj     := conj ( "|" conj )*
//! conj     := unit ( "&" unit )*
//! unit     := prim [ ("->>" | "->") unit ]
//! prim     := "!" prim | "(" formula ")" | quant | atom
//! quant    := ("exists" | "forall") varlist "." formula
//! ```
//!
//! A quantifier body extends as far right as possible. An identifier in term
//! position is a constant symbol when declared in the [`ParseContext`] and a
//! variable otherwise.

use std::collections::{BTreeMap, BTreeSet};

use super::{to_nnf, DepAtom, Expr, Formula, SyntaxError, Term, Var};

const RESERVED: &[&str] = &["exists", "forall", "dep", "const", "inc", "ind", "anon", "ne"];

/// Names the parser needs to resolve: registered dependency arities and
/// declared constant symbols.
#[derive(Clone, Debug, Default)]
pub struct ParseContext {
    pub dependencies: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

impl ParseContext {
    pub fn with_constants<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.constants.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn with_dependency(mut self, name: impl Into<String>, arity: usize) -> Self {
        self.dependencies.insert(name.into(), arity);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Colon,
    Eq,
    Neq,
    Bang,
    Amp,
    Pipe,
    GOr,
    Hook,
    Arrow,
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(t) => format!(
            "`{}`",
            match t {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::Comma => ",",
                Tok::Semi => ";",
                Tok::Dot => ".",
                Tok::Colon => ":",
                Tok::Eq => "=",
                Tok::Neq => "!=",
                Tok::Bang => "!",
                Tok::Amp => "&",
                Tok::Pipe => "|",
                Tok::GOr => "<|>",
                Tok::Hook => "->>",
                Tok::Arrow => "->",
                Tok::Ident(_) => unreachable!(),
            }
        ),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<|>") {
            (Tok::GOr, 3)
        } else if rest.starts_with("->>") {
            (Tok::Hook, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'') {
                j += 1;
            }
            (Tok::Ident(text[i..j].to_string()), j - i)
        } else {
            let t = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b';' => Tok::Semi,
                b'.' => Tok::Dot,
                b':' => Tok::Colon,
                b'=' => Tok::Eq,
                b'!' => Tok::Bang,
                b'&' => Tok::Amp,
                b'|' => Tok::Pipe,
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(SyntaxError::Parse { pos: start, msg: format!("unexpected character `{ch}`") });
                }
            };
            (t, 1)
        };
        out.push((tok, start));
        i += len;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    ctx: &'a ParseContext,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), SyntaxError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", describe(Some(&t)), describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => {
                let found = describe(other);
                self.err(format!("expected identifier, found {found}"))
            }
        }
    }

    fn formula(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.disj()?;
        while self.eat(&Tok::GOr) {
            let rhs = self.disj()?;
            lhs = Expr::GlobalOr(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conj()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unit()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unit()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unit(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.offset();
        let lhs = self.prim()?;
        let hook = match self.peek() {
            Some(Tok::Hook) => true,
            Some(Tok::Arrow) => false,
            _ => return Ok(lhs),
        };
        if !lhs.is_first_order() {
            return if hook {
                Err(SyntaxError::HookGuardNotFirstOrder)
            } else {
                Err(SyntaxError::Parse { pos: start, msg: "the antecedent of `->` must be first order".into() })
            };
        }
        self.pos += 1;
        let rhs = self.unit()?;
        Ok(if hook { Expr::Hook(Box::new(lhs), Box::new(rhs)) } else { Expr::Implies(Box::new(lhs), Box::new(rhs)) })
    }

    fn prim(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                let inner = self.prim()?;
                if inner.has_dependency_atoms() {
                    return Err(SyntaxError::NegatedDependency);
                }
                Ok(Expr::Not(Box::new(inner)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(s)) if s == "exists" || s == "forall" => {
                let universal = s == "forall";
                self.pos += 1;
                let vars = self.varlist()?;
                if vars.is_empty() {
                    return self.err("quantifier without variables");
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(vars.into_iter().rev().fold(body, |b, v| {
                    if universal {
                        Expr::Forall(v, Box::new(b))
                    } else {
                        Expr::Exists(v, Box::new(b))
                    }
                }))
            }
            Some(Tok::Ident(_)) => self.atom(),
            other => {
                let found = describe(other);
                self.err(format!("expected a formula, found {found}"))
            }
        }
    }

    fn varlist(&mut self) -> Result<Vec<Var>, SyntaxError> {
        let mut vars = Vec::new();
        if !matches!(self.peek(), Some(Tok::Ident(_))) {
            return Ok(vars);
        }
        loop {
            let name = self.ident()?;
            self.check_variable_name(&name)?;
            vars.push(Var::new(name));
            if !self.eat(&Tok::Comma) {
                return Ok(vars);
            }
        }
    }

    fn check_variable_name(&self, name: &str) -> Result<(), SyntaxError> {
        if RESERVED.contains(&name) {
            return Err(SyntaxError::Parse { pos: self.offset(), msg: format!("`{name}` is reserved") });
        }
        if self.ctx.constants.contains(name) {
            return Err(SyntaxError::Parse {
                pos: self.offset(),
                msg: format!("constant `{name}` used where a variable is required"),
            });
        }
        Ok(())
    }

    fn nonempty_varlist(&mut self) -> Result<Vec<Var>, SyntaxError> {
        let vs = self.varlist()?;
        if vs.is_empty() {
            return self.err("expected at least one variable");
        }
        Ok(vs)
    }

    fn two_lists(&mut self, allow_empty_left: bool) -> Result<(Vec<Var>, Vec<Var>), SyntaxError> {
        self.expect(Tok::LParen)?;
        let left = if allow_empty_left { self.varlist()? } else { self.nonempty_varlist()? };
        self.expect(Tok::Semi)?;
        let right = self.nonempty_varlist()?;
        self.expect(Tok::RParen)?;
        Ok((left, right))
    }

    fn one_list(&mut self) -> Result<Vec<Var>, SyntaxError> {
        self.expect(Tok::LParen)?;
        let vs = self.nonempty_varlist()?;
        self.expect(Tok::RParen)?;
        Ok(vs)
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let name = self.ident()?;
        if RESERVED.contains(&name.as_str()) {
            self.pos -= 1;
            return self.err(format!("`{name}` is reserved"));
        }
        Ok(if self.ctx.constants.contains(&name) { Term::Const(name) } else { Term::Var(Var::new(name)) })
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let Some(Tok::Ident(name)) = self.peek().cloned() else { unreachable!() };
        let followed_by_paren = self.peek_at(1) == Some(&Tok::LParen);
        if followed_by_paren && RESERVED.contains(&name.as_str()) {
            self.pos += 1;
            let atom = match name.as_str() {
                "dep" => {
                    let (l, r) = self.two_lists(true)?;
                    DepAtom::Dep(l, r)
                }
                "inc" => {
                    let at = self.offset();
                    let (l, r) = self.two_lists(false)?;
                    if l.len() != r.len() {
                        return Err(SyntaxError::Parse {
                            pos: at,
                            msg: "inclusion atom needs tuples of equal length".into(),
                        });
                    }
                    DepAtom::Inc(l, r)
                }
                "ind" => {
                    let (l, r) = self.two_lists(false)?;
                    DepAtom::Ind(l, r)
                }
                "anon" => {
                    let (l, r) = self.two_lists(false)?;
                    DepAtom::Anon(l, r)
                }
                "const" => DepAtom::Const(self.one_list()?),
                "ne" => DepAtom::Ne(self.one_list()?),
                _ => {
                    self.pos -= 1;
                    return self.err(format!("`{name}` is reserved"));
                }
            };
            return Ok(Expr::Atom(atom));
        }
        if name == "D" && self.peek_at(1) == Some(&Tok::Colon) {
            self.pos += 2;
            let dep = self.ident()?;
            let vars = self.one_list()?;
            let Some(&arity) = self.ctx.dependencies.get(&dep) else {
                return Err(SyntaxError::UnknownDependency(dep));
            };
            if arity != vars.len() {
                return Err(SyntaxError::ArityMismatch { name: dep, expected: arity, found: vars.len() });
            }
            return Ok(Expr::Atom(DepAtom::Named(dep, vars)));
        }
        if followed_by_paren {
            self.pos += 2;
            let mut args = vec![self.term()?];
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
            return Ok(Expr::Rel(name, args));
        }
        let lhs = self.term()?;
        let negated = match self.peek() {
            Some(Tok::Eq) => false,
            Some(Tok::Neq) => true,
            other => {
                let found = describe(other);
                return self.err(format!("expected `=` or `!=`, found {found}"));
            }
        };
        self.pos += 1;
        let rhs = self.term()?;
        Ok(if negated { Expr::Neq(lhs, rhs) } else { Expr::Eq(lhs, rhs) })
    }
}

/// Parses text into the general expression tree (negation and `->` kept).
pub fn parse_expr(text: &str, ctx: &ParseContext) -> Result<Expr, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), ctx };
    let e = p.formula()?;
    if p.pos != p.toks.len() {
        let found = describe(p.peek());
        return p.err(format!("unexpected {found}"));
    }
    Ok(e)
}

/// Parses text and normalizes it to NNF.
pub fn parse_formula(text: &str, ctx: &ParseContext) -> Result<Formula, SyntaxError> {
    to_nnf(&parse_expr(text, ctx)?)
}
