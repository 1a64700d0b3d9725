//! Formula syntax: terms, the NNF `Formula` tree used by the evaluators, the
//! general `Expr` tree produced by the parser, and the DED / U-sentence
//! shape validators.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

mod ded;
mod nnf;
mod parser;
mod printer;
mod usentence;

pub use ded::{validate_ded, DedDisjunct, DedSentence};
pub use nnf::{desugar_hook, negate, to_nnf};
pub use parser::{parse_expr, parse_formula, ParseContext};
pub use usentence::{validate_usentence, ULiteral, USentence};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_string())
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::from(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// Dependency atoms. Tuples hold variables only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DepAtom {
    /// `dep(v̄;w̄)`; an empty left tuple is constancy of `w̄`.
    Dep(Vec<Var>, Vec<Var>),
    Const(Vec<Var>),
    Inc(Vec<Var>, Vec<Var>),
    Ind(Vec<Var>, Vec<Var>),
    Anon(Vec<Var>, Vec<Var>),
    Ne(Vec<Var>),
    /// `D:NAME(v̄)`, resolved against a dependency registry.
    Named(String, Vec<Var>),
}

impl DepAtom {
    /// All variables in argument order, left tuple first.
    pub fn vars(&self) -> Vec<Var> {
        match self {
            DepAtom::Dep(l, r) | DepAtom::Inc(l, r) | DepAtom::Ind(l, r) | DepAtom::Anon(l, r) => {
                l.iter().chain(r).cloned().collect()
            }
            DepAtom::Const(v) | DepAtom::Ne(v) | DepAtom::Named(_, v) => v.clone(),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> DepAtom {
        let mut m = |vs: &Vec<Var>| vs.iter().map(&mut *f).collect::<Vec<_>>();
        match self {
            DepAtom::Dep(l, r) => {
                let l = m(l);
                DepAtom::Dep(l, m(r))
            }
            DepAtom::Inc(l, r) => {
                let l = m(l);
                DepAtom::Inc(l, m(r))
            }
            DepAtom::Ind(l, r) => {
                let l = m(l);
                DepAtom::Ind(l, m(r))
            }
            DepAtom::Anon(l, r) => {
                let l = m(l);
                DepAtom::Anon(l, m(r))
            }
            DepAtom::Const(v) => DepAtom::Const(m(v)),
            DepAtom::Ne(v) => DepAtom::Ne(m(v)),
            DepAtom::Named(n, v) => DepAtom::Named(n.clone(), m(v)),
        }
    }
}

/// A formula in negation normal form.
///
/// Negation only occurs on relational atoms and as `!=`; dependency atoms are
/// never negated. Binary connectives associate to the left when parsed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Rel {
        negated: bool,
        name: String,
        args: Vec<Term>,
    },
    Eq(Term, Term),
    Neq(Term, Term),
    Atom(DepAtom),
    And(Box<Formula>, Box<Formula>),
    /// Team (lax) disjunction.
    Or(Box<Formula>, Box<Formula>),
    /// Global disjunction `<|>`.
    GlobalOr(Box<Formula>, Box<Formula>),
    /// `θ ->> φ` with first-order `θ`.
    Hook(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel { negated: false, name: name.to_string(), args }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn global_or(a: Formula, b: Formula) -> Formula {
        Formula::GlobalOr(Box::new(a), Box::new(b))
    }

    pub fn hook(theta: Formula, phi: Formula) -> Formula {
        Formula::Hook(Box::new(theta), Box::new(phi))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists_all(vars: &[Var], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |b, v| Formula::exists(v.clone(), b))
    }

    pub fn forall_all(vars: &[Var], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |b, v| Formula::forall(v.clone(), b))
    }

    /// Left-associated conjunction; `None` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    pub fn global_disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::global_or)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Rel { .. } | Formula::Eq(..) | Formula::Neq(..) | Formula::Atom(_))
    }

    pub fn has_dependency_atoms(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Rel { .. } | Formula::Eq(..) | Formula::Neq(..) => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::GlobalOr(a, b) | Formula::Hook(a, b) => {
                a.has_dependency_atoms() || b.has_dependency_atoms()
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.has_dependency_atoms(),
        }
    }

    /// No dependency atoms and no global disjunction.
    pub fn is_first_order(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::GlobalOr(..) => false,
            Formula::Rel { .. } | Formula::Eq(..) | Formula::Neq(..) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Hook(a, b) => a.is_first_order() && b.is_first_order(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.is_first_order(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let term = |t: &Term, bound: &Vec<Var>, out: &mut BTreeSet<Var>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Rel { args, .. } => args.iter().for_each(|t| term(t, bound, out)),
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Atom(d) => {
                for v in d.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::GlobalOr(a, b) | Formula::Hook(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel { args, .. } => out.extend(args.iter().filter_map(Term::as_var).cloned()),
            Formula::Eq(a, b) | Formula::Neq(a, b) => out.extend([a, b].into_iter().filter_map(Term::as_var).cloned()),
            Formula::Atom(d) => out.extend(d.vars()),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Relation symbols with the arities they are used at.
    pub fn relations(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Rel { name, args, .. } = f {
                out.insert((name.clone(), args.len()));
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut add = |t: &Term| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        };
        self.visit(&mut |f| match f {
            Formula::Rel { args, .. } => args.iter().for_each(&mut add),
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                add(a);
                add(b);
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::GlobalOr(a, b) | Formula::Hook(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.visit(f),
            _ => {}
        }
    }

    /// Renames every occurrence of every variable, binders included.
    pub fn rename_all(&self, map: &dyn Fn(&Var) -> Var) -> Formula {
        let rt = |t: &Term| match t {
            Term::Var(v) => Term::Var(map(v)),
            c => c.clone(),
        };
        match self {
            Formula::Rel { negated, name, args } => {
                Formula::Rel { negated: *negated, name: name.clone(), args: args.iter().map(rt).collect() }
            }
            Formula::Eq(a, b) => Formula::Eq(rt(a), rt(b)),
            Formula::Neq(a, b) => Formula::Neq(rt(a), rt(b)),
            Formula::Atom(d) => Formula::Atom(d.map_vars(&mut |v| map(v))),
            Formula::And(a, b) => Formula::and(a.rename_all(map), b.rename_all(map)),
            Formula::Or(a, b) => Formula::or(a.rename_all(map), b.rename_all(map)),
            Formula::GlobalOr(a, b) => Formula::global_or(a.rename_all(map), b.rename_all(map)),
            Formula::Hook(a, b) => Formula::hook(a.rename_all(map), b.rename_all(map)),
            Formula::Exists(v, b) => Formula::exists(map(v), b.rename_all(map)),
            Formula::Forall(v, b) => Formula::forall(map(v), b.rename_all(map)),
        }
    }

    /// Renames free occurrences of variables. The caller is responsible for
    /// choosing targets that are not captured by inner quantifiers.
    pub fn rename_free(&self, map: &dyn Fn(&Var) -> Option<Var>) -> Formula {
        self.rename_inner(map, &mut Vec::new())
    }

    fn rename_inner(&self, map: &dyn Fn(&Var) -> Option<Var>, bound: &mut Vec<Var>) -> Formula {
        let rv = |v: &Var, bound: &Vec<Var>| {
            if bound.contains(v) {
                v.clone()
            } else {
                map(v).unwrap_or_else(|| v.clone())
            }
        };
        let rt = |t: &Term, bound: &Vec<Var>| match t {
            Term::Var(v) => Term::Var(rv(v, bound)),
            c => c.clone(),
        };
        match self {
            Formula::Rel { negated, name, args } => Formula::Rel {
                negated: *negated,
                name: name.clone(),
                args: args.iter().map(|t| rt(t, bound)).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(rt(a, bound), rt(b, bound)),
            Formula::Neq(a, b) => Formula::Neq(rt(a, bound), rt(b, bound)),
            Formula::Atom(d) => {
                let snapshot = bound.clone();
                Formula::Atom(d.map_vars(&mut |v| rv(v, &snapshot)))
            }
            Formula::And(a, b) => Formula::and(a.rename_inner(map, bound), b.rename_inner(map, bound)),
            Formula::Or(a, b) => Formula::or(a.rename_inner(map, bound), b.rename_inner(map, bound)),
            Formula::GlobalOr(a, b) => Formula::global_or(a.rename_inner(map, bound), b.rename_inner(map, bound)),
            Formula::Hook(a, b) => Formula::hook(a.rename_inner(map, bound), b.rename_inner(map, bound)),
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                bound.push(v.clone());
                let body = b.rename_inner(map, bound);
                bound.pop();
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v.clone(), body)
                } else {
                    Formula::forall(v.clone(), body)
                }
            }
        }
    }
}

/// A formula with unrestricted negation and implication, as written by users.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Neq(Term, Term),
    Atom(DepAtom),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    GlobalOr(Box<Expr>, Box<Expr>),
    Hook(Box<Expr>, Box<Expr>),
    /// Material implication `a -> b`, read as `!a | b`.
    Implies(Box<Expr>, Box<Expr>),
    Exists(Var, Box<Expr>),
    Forall(Var, Box<Expr>),
}

impl Expr {
    pub fn has_dependency_atoms(&self) -> bool {
        match self {
            Expr::Atom(_) => true,
            Expr::Rel(..) | Expr::Eq(..) | Expr::Neq(..) => false,
            Expr::Not(a) | Expr::Exists(_, a) | Expr::Forall(_, a) => a.has_dependency_atoms(),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::GlobalOr(a, b) | Expr::Hook(a, b) | Expr::Implies(a, b) => {
                a.has_dependency_atoms() || b.has_dependency_atoms()
            }
        }
    }

    pub fn is_first_order(&self) -> bool {
        match self {
            Expr::Atom(_) | Expr::GlobalOr(..) => false,
            Expr::Rel(..) | Expr::Eq(..) | Expr::Neq(..) => true,
            Expr::Not(a) | Expr::Exists(_, a) | Expr::Forall(_, a) => a.is_first_order(),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Hook(a, b) | Expr::Implies(a, b) => {
                a.is_first_order() && b.is_first_order()
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Expr::Rel(..) | Expr::Eq(..) | Expr::Neq(..) | Expr::Atom(_))
    }

    pub fn relations(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Rel(n, a) = e {
                out.insert((n.clone(), a.len()));
            }
        });
        out
    }

    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Not(a) | Expr::Exists(_, a) | Expr::Forall(_, a) => a.visit(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::GlobalOr(a, b) | Expr::Hook(a, b) | Expr::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        // Negation and implication do not bind, so the NNF image has the same
        // free variables; compute directly to avoid failing on dependency atoms.
        fn go(e: &Expr, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            let term = |t: &Term, bound: &Vec<Var>, out: &mut BTreeSet<Var>| {
                if let Term::Var(v) = t {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            };
            match e {
                Expr::Rel(_, args) => args.iter().for_each(|t| term(t, bound, out)),
                Expr::Eq(a, b) | Expr::Neq(a, b) => {
                    term(a, bound, out);
                    term(b, bound, out);
                }
                Expr::Atom(d) => out.extend(d.vars().into_iter().filter(|v| !bound.contains(v))),
                Expr::Not(a) => go(a, bound, out),
                Expr::And(a, b) | Expr::Or(a, b) | Expr::GlobalOr(a, b) | Expr::Hook(a, b) | Expr::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Expr::Exists(v, a) | Expr::Forall(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl From<&Formula> for Expr {
    fn from(f: &Formula) -> Expr {
        let b = |x: &Formula| Box::new(Expr::from(x));
        match f {
            Formula::Rel { negated, name, args } => {
                let r = Expr::Rel(name.clone(), args.clone());
                if *negated {
                    Expr::Not(Box::new(r))
                } else {
                    r
                }
            }
            Formula::Eq(a, c) => Expr::Eq(a.clone(), c.clone()),
            Formula::Neq(a, c) => Expr::Neq(a.clone(), c.clone()),
            Formula::Atom(d) => Expr::Atom(d.clone()),
            Formula::And(x, y) => Expr::And(b(x), b(y)),
            Formula::Or(x, y) => Expr::Or(b(x), b(y)),
            Formula::GlobalOr(x, y) => Expr::GlobalOr(b(x), b(y)),
            Formula::Hook(x, y) => Expr::Hook(b(x), b(y)),
            Formula::Exists(v, x) => Expr::Exists(v.clone(), b(x)),
            Formula::Forall(v, x) => Expr::Forall(v.clone(), b(x)),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown dependency `{0}`")]
    UnknownDependency(String),
    #[error("dependency `{name}` has arity {expected} but is applied to {found} variables")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("negation over a dependency atom")]
    NegatedDependency,
    #[error("the left side of `->>` must be first order")]
    HookGuardNotFirstOrder,
    #[error("validation failed at `{node}`: {reason}")]
    Validation { node: String, reason: String },
}

impl SyntaxError {
    pub(crate) fn invalid(node: impl fmt::Display, reason: impl Into<String>) -> SyntaxError {
        SyntaxError::Validation { node: node.to_string(), reason: reason.into() }
    }
}

/// Returns `base` if unused, otherwise the first of `base_1`, `base_2`, ...
/// not in `used`. The result is added to `used`.
pub fn fresh_var(base: &str, used: &mut BTreeSet<Var>) -> Var {
    let mut candidate = Var::from(base);
    let mut i = 1;
    while used.contains(&candidate) {
        candidate = Var::new(format!("{base}_{i}"));
        i += 1;
    }
    used.insert(candidate.clone());
    candidate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables_respect_binding() {
        let f = parse_formula("exists x. (E(x,y) & dep(x;z))", &ParseContext::default()).unwrap();
        assert_eq!(f.free_vars(), [Var::from("y"), Var::from("z")].into_iter().collect());
        assert_eq!(f.all_vars().len(), 3);
    }

    #[test]
    fn fresh_names_are_deterministic() {
        let mut used: BTreeSet<Var> = [Var::from("x"), Var::from("x_1")].into_iter().collect();
        assert_eq!(fresh_var("x", &mut used), Var::from("x_2"));
        assert_eq!(fresh_var("y", &mut used), Var::from("y"));
        assert_eq!(fresh_var("y", &mut used), Var::from("y_1"));
    }

    #[test]
    fn rename_skips_bound_occurrences() {
        let ctx = ParseContext::default();
        let f = parse_formula("x=y & exists x. x=y", &ctx).unwrap();
        let g = f.rename_free(&|v| (v.as_str() == "x").then(|| Var::from("w")));
        assert_eq!(g.to_string(), "w=y & exists x. x=y");
    }
}
