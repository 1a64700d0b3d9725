//! Generalized dependencies: builtin atoms, first order definitions and
//! explicit decision tables, plus bounded checkers for their closure
//! properties.

mod checks;

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::structures::{Element, Relation, Structure, StructureError};
use crate::syntax::{validate_ded, DedSentence, DepAtom, Expr, Formula, ParseContext, SyntaxError, Term, Var};
use crate::tarski::{tarski_sentence, TarskiError};

pub use checks::{
    check_closure_properties, check_domain_independence, check_hom_preservation, check_isomorphism_closure,
    check_union_chain_preservation, check_union_chain_with, find_hom_counterexample, ClosureReport,
    DomainCounterexample, HomCounterexample, IsoCounterexample, RelationPair, UnionCounterexample, Verdict,
    MAX_TUPLE_SPACE,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DependencyError {
    #[error("dependency `{name}` has arity {expected}, applied to a relation of arity {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("dependency `{0}` has no table entry for this structure")]
    MissingEntry(String),
    #[error("invalid dependency definition: {0}")]
    InvalidDefinition(String),
    #[error("unknown dependency `{0}`")]
    Unknown(String),
    #[error("the relations do not form a chain: element {0} is not contained in element {1}")]
    NotAChain(usize, usize),
    #[error("relation contains elements outside the domain")]
    OutsideDomain,
    #[error("instance space too large: {0} candidate tuples exceeds the limit")]
    Budget(usize),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Tarski(#[from] TarskiError),
}

/// The builtin atoms, with the widths of their variable tuples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinKind {
    /// `dep(v̄; w̄)`; an empty left side is constancy.
    Dep {
        left: usize,
        right: usize,
    },
    Const {
        width: usize,
    },
    Inc {
        width: usize,
    },
    Ind {
        left: usize,
        right: usize,
    },
    Anon {
        left: usize,
        right: usize,
    },
    Ne {
        width: usize,
    },
}

impl BuiltinKind {
    /// The kind of a builtin atom and its argument list; `None` for named atoms.
    pub fn of_atom(atom: &DepAtom) -> Option<(BuiltinKind, Vec<Var>)> {
        Some(match atom {
            DepAtom::Dep(l, r) => (BuiltinKind::Dep { left: l.len(), right: r.len() }, concat(l, r)),
            DepAtom::Const(v) => (BuiltinKind::Const { width: v.len() }, v.clone()),
            DepAtom::Inc(l, r) => (BuiltinKind::Inc { width: l.len() }, concat(l, r)),
            DepAtom::Ind(l, r) => (BuiltinKind::Ind { left: l.len(), right: r.len() }, concat(l, r)),
            DepAtom::Anon(l, r) => (BuiltinKind::Anon { left: l.len(), right: r.len() }, concat(l, r)),
            DepAtom::Ne(v) => (BuiltinKind::Ne { width: v.len() }, v.clone()),
            DepAtom::Named(..) => return None,
        })
    }

    pub fn arity(&self) -> usize {
        match *self {
            BuiltinKind::Dep { left, right } | BuiltinKind::Ind { left, right } | BuiltinKind::Anon { left, right } => {
                left + right
            }
            BuiltinKind::Inc { width } => 2 * width,
            BuiltinKind::Const { width } | BuiltinKind::Ne { width } => width,
        }
    }

    pub fn is_downward_closed(&self) -> bool {
        matches!(self, BuiltinKind::Dep { .. } | BuiltinKind::Const { .. })
    }

    /// Decides the atom on the projection `X(v̄)` given as a set of tuples.
    pub fn holds<'a, T, I>(&self, tuples: I) -> bool
    where
        T: Ord + 'a,
        I: IntoIterator<Item = &'a [T]>,
    {
        let tuples: Vec<&[T]> = tuples.into_iter().collect();
        match *self {
            BuiltinKind::Ne { .. } => !tuples.is_empty(),
            BuiltinKind::Const { .. } => tuples.windows(2).all(|w| w[0] == w[1]),
            BuiltinKind::Dep { left, .. } => {
                let mut seen: BTreeMap<&[T], &[T]> = BTreeMap::new();
                tuples.iter().all(|t| {
                    let (l, r) = t.split_at(left);
                    *seen.entry(l).or_insert(r) == r
                })
            }
            BuiltinKind::Inc { width } => {
                let right: BTreeSet<&[T]> = tuples.iter().map(|t| &t[width..]).collect();
                tuples.iter().all(|t| right.contains(&t[..width]))
            }
            BuiltinKind::Ind { left, .. } => {
                let distinct: BTreeSet<&[T]> = tuples.iter().copied().collect();
                let l: BTreeSet<&[T]> = distinct.iter().map(|t| &t[..left]).collect();
                let r: BTreeSet<&[T]> = distinct.iter().map(|t| &t[left..]).collect();
                distinct.len() == l.len() * r.len()
            }
            BuiltinKind::Anon { left, .. } => {
                let mut groups: BTreeMap<&[T], BTreeSet<&[T]>> = BTreeMap::new();
                for t in &tuples {
                    let (l, r) = t.split_at(left);
                    groups.entry(l).or_default().insert(r);
                }
                groups.values().all(|g| g.len() >= 2)
            }
        }
    }

    /// Renders the atom applied to `vars`.
    pub fn atom(&self, vars: &[Var]) -> DepAtom {
        let v = vars.to_vec();
        match *self {
            BuiltinKind::Dep { left, .. } => DepAtom::Dep(v[..left].to_vec(), v[left..].to_vec()),
            BuiltinKind::Const { .. } => DepAtom::Const(v),
            BuiltinKind::Inc { width } => DepAtom::Inc(v[..width].to_vec(), v[width..].to_vec()),
            BuiltinKind::Ind { left, .. } => DepAtom::Ind(v[..left].to_vec(), v[left..].to_vec()),
            BuiltinKind::Anon { left, .. } => DepAtom::Anon(v[..left].to_vec(), v[left..].to_vec()),
            BuiltinKind::Ne { .. } => DepAtom::Ne(v),
        }
    }
}

fn concat(l: &[Var], r: &[Var]) -> Vec<Var> {
    l.iter().chain(r).cloned().collect()
}

/// What an extensional dependency answers for structures absent from its table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefaultPolicy {
    Accept,
    Reject,
    /// Missing entries are errors.
    Strict,
}

pub type DecisionTable = BTreeMap<(BTreeSet<Element>, Relation), bool>;

#[derive(Clone, Debug, PartialEq)]
pub enum Semantics {
    Builtin(BuiltinKind),
    /// A sentence over the single relation `symbol` and equality.
    FirstOrder {
        symbol: String,
        sentence: Formula,
    },
    Extensional {
        table: DecisionTable,
        default: DefaultPolicy,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dependency {
    name: String,
    arity: usize,
    semantics: Semantics,
    /// Result of the last isomorphism-closure check, if one was run.
    iso_closed: Option<bool>,
}

impl Dependency {
    pub fn builtin(name: impl Into<String>, kind: BuiltinKind) -> Self {
        Dependency {
            name: name.into(),
            arity: kind.arity(),
            semantics: Semantics::Builtin(kind),
            iso_closed: Some(true),
        }
    }

    /// `D = {(M, R) : (M, R) ⊨ sentence}`.
    pub fn first_order(
        name: impl Into<String>,
        arity: usize,
        symbol: impl Into<String>,
        sentence: Formula,
    ) -> Result<Self, DependencyError> {
        let symbol = symbol.into();
        if !sentence.is_first_order() {
            return Err(DependencyError::InvalidDefinition("the sentence must be first order".into()));
        }
        if let Some(v) = sentence.free_vars().into_iter().next() {
            return Err(DependencyError::InvalidDefinition(format!("free variable `{v}`")));
        }
        if let Some(c) = sentence.constants().into_iter().next() {
            return Err(DependencyError::InvalidDefinition(format!("constant `{c}`")));
        }
        for (r, k) in sentence.relations() {
            if r != symbol {
                return Err(DependencyError::InvalidDefinition(format!("relation `{r}` is not `{symbol}`")));
            }
            if k != arity {
                return Err(DependencyError::InvalidDefinition(format!(
                    "`{symbol}` used with {k} arguments, declared arity {arity}"
                )));
            }
        }
        Ok(Dependency {
            name: name.into(),
            arity,
            semantics: Semantics::FirstOrder { symbol, sentence },
            iso_closed: Some(true),
        })
    }

    /// Parses the defining sentence; the relation symbol is `R`.
    pub fn first_order_text(name: impl Into<String>, arity: usize, text: &str) -> Result<Self, DependencyError> {
        let f = crate::syntax::parse_formula(text, &ParseContext::default())?;
        Dependency::first_order(name, arity, "R", f)
    }

    /// The dependency defined by a validated DED.
    pub fn from_ded(name: impl Into<String>, ded: &DedSentence) -> Result<Self, DependencyError> {
        let (symbol, arity) = ded
            .relation
            .clone()
            .ok_or_else(|| DependencyError::InvalidDefinition("the DED mentions no relation".into()))?;
        Dependency::first_order(name, arity, symbol, ded.to_formula())
    }

    /// Parses and validates a DED text over `R`.
    pub fn ded_text(name: impl Into<String>, text: &str) -> Result<Self, DependencyError> {
        let e: Expr = crate::syntax::parse_expr(text, &ParseContext::default())?;
        Dependency::from_ded(name, &validate_ded(&e)?)
    }

    pub fn extensional(name: impl Into<String>, arity: usize, table: DecisionTable, default: DefaultPolicy) -> Self {
        Dependency { name: name.into(), arity, semantics: Semantics::Extensional { table, default }, iso_closed: None }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn semantics(&self) -> &Semantics {
        &self.semantics
    }

    pub fn iso_closed(&self) -> Option<bool> {
        self.iso_closed
    }

    /// Runs the isomorphism-closure check over the table's own domains and
    /// records the result.
    pub fn check_isomorphism_closure(&mut self) -> Result<bool, DependencyError> {
        let ok = check_isomorphism_closure(self)?.is_none();
        self.iso_closed = Some(ok);
        Ok(ok)
    }

    /// Syntactically downward closed: builtin `dep`/`const`, or a first order
    /// definition in which the relation occurs only negatively.
    pub fn is_downward_closed(&self) -> bool {
        match &self.semantics {
            Semantics::Builtin(k) => k.is_downward_closed(),
            Semantics::FirstOrder { symbol, sentence } => {
                let mut positive = false;
                sentence.visit(&mut |f| {
                    if let Formula::Rel { negated: false, name, .. } = f {
                        positive |= name == symbol;
                    }
                });
                !positive
            }
            Semantics::Extensional { .. } => false,
        }
    }

    /// `(M, R) ∈ D`.
    pub fn holds(&self, domain: &BTreeSet<Element>, rel: &Relation) -> Result<bool, DependencyError> {
        if rel.arity() != self.arity {
            return Err(DependencyError::ArityMismatch {
                name: self.name.clone(),
                expected: self.arity,
                found: rel.arity(),
            });
        }
        match &self.semantics {
            Semantics::Builtin(k) => Ok(k.holds(rel.tuples().iter().map(Vec::as_slice))),
            Semantics::FirstOrder { symbol, sentence } => {
                let mut m = Structure::new(domain.iter().copied())?;
                if !rel.elements().is_subset(domain) {
                    return Err(DependencyError::OutsideDomain);
                }
                m.set_relation(symbol.clone(), rel.clone())?;
                Ok(tarski_sentence(&m, sentence)?)
            }
            Semantics::Extensional { table, default } => match table.get(&(domain.clone(), rel.clone())) {
                Some(b) => Ok(*b),
                None => match default {
                    DefaultPolicy::Accept => Ok(true),
                    DefaultPolicy::Reject => Ok(false),
                    DefaultPolicy::Strict => Err(DependencyError::MissingEntry(self.name.clone())),
                },
            },
        }
    }

    /// The atom `D(v̄)` in formula syntax.
    pub fn atom(&self, vars: &[Var]) -> DepAtom {
        match &self.semantics {
            Semantics::Builtin(k) => k.atom(vars),
            _ => DepAtom::Named(self.name.clone(), vars.to_vec()),
        }
    }
}

/// `(M, R) ∈ D`.
pub fn dep_holds(d: &Dependency, domain: &BTreeSet<Element>, rel: &Relation) -> Result<bool, DependencyError> {
    d.holds(domain, rel)
}

/// `∀v̄(¬R v̄ ∨ (R v̄ ∧ D v̄))`, over the relation symbol `symbol`. Satisfied
/// by the unit team exactly when `(M, R^M) ∈ D`.
pub fn dep_class_sentence(d: &Dependency, symbol: &str) -> Formula {
    let vars: Vec<Var> = (1..=d.arity()).map(|i| Var::new(format!("v{i}"))).collect();
    let args: Vec<Term> = vars.iter().cloned().map(Term::Var).collect();
    let body = Formula::or(
        Formula::Rel { negated: true, name: symbol.to_string(), args: args.clone() },
        Formula::and(Formula::rel(symbol, args), Formula::Atom(d.atom(&vars))),
    );
    Formula::forall_all(&vars, body)
}

/// Named dependencies available to `D:name(...)` atoms.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    deps: BTreeMap<String, Dependency>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, d: Dependency) {
        self.deps.insert(d.name.clone(), d);
    }

    pub fn with(mut self, d: Dependency) -> Self {
        self.insert(d);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Dependency> {
        self.deps.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Dependency> {
        self.deps.values()
    }

    /// A parse context declaring every registered name with its arity.
    pub fn parse_context(&self) -> ParseContext {
        let mut ctx = ParseContext::default();
        for d in self.deps.values() {
            ctx = ctx.with_dependency(d.name.clone(), d.arity);
        }
        ctx
    }
}

/// Nonempty subsets of `0..n` ordered by size, then lexicographically.
pub(crate) fn domains_up_to(n: usize) -> Vec<BTreeSet<Element>> {
    (1..=n).flat_map(|k| (0..n as u32).map(Element).combinations(k)).map(|c| c.into_iter().collect()).collect()
}
