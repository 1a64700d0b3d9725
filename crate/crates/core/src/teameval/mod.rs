//! Satisfaction of formulas by teams under lax team semantics.
//!
//! Three strategies share one set of rules. `Naive` applies them directly.
//! `Memoized` evaluates each subformula on the projection of the team onto
//! its free variables and caches results. `Optimized` adds pruning from
//! downward closure, a backtracking search for existential witnesses and
//! witness symmetry reduction.

mod compile;
mod search;

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::dependencies::{BuiltinKind, Dependency, DependencyError, Registry};
use crate::structures::{team_projection, Element, Relation, Structure, StructureError, Team, Tuple};
use crate::syntax::{DepAtom, Formula, Var};
use crate::tarski::TarskiError;

pub use search::Session;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Naive,
    Memoized,
    Optimized,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "memoized" => Ok(Strategy::Memoized),
            "optimized" => Ok(Strategy::Optimized),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub strategy: Strategy,
    /// Maximum number of evaluation steps; `None` is unlimited.
    pub budget: Option<u64>,
    /// Restrict witnesses of symmetric existential variables. Defaults to on
    /// for the optimized strategy only.
    pub symmetry: Option<bool>,
    /// Use syntactic downward closure to enumerate partitions instead of
    /// covers, and single witnesses instead of witness sets.
    pub closure_pruning: bool,
}

impl EvalOptions {
    pub fn new(strategy: Strategy) -> Self {
        EvalOptions { strategy, budget: None, symmetry: None, closure_pruning: true }
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_symmetry(mut self, on: bool) -> Self {
        self.symmetry = Some(on);
        self
    }
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions::new(Strategy::Optimized)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("evaluation budget of {limit} steps exceeded")]
    Budget { limit: u64 },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("dependency `{0}` is not registered")]
    UnregisteredDependency(String),
    #[error("dependency `{name}` has arity {expected}, applied to {found} variables")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("free variable `{0}` is not in the team's domain")]
    UnboundVariable(Var),
    #[error("team mentions {0}, which is not in the structure")]
    ForeignElement(Element),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Tarski(#[from] TarskiError),
    #[error(transparent)]
    Dependency(#[from] DependencyError),
}

impl EvalError {
    /// Budget and size limits, as opposed to malformed input.
    pub fn is_resource(&self) -> bool {
        matches!(self, EvalError::Budget { .. } | EvalError::TooLarge(_))
    }
}

/// `M ⊨_X φ` for a formula without named dependencies.
pub fn team_eval(m: &Structure, x: &Team, f: &Formula, strategy: Strategy) -> Result<bool, EvalError> {
    team_eval_with(m, x, f, &Registry::new(), &EvalOptions::new(strategy))
}

pub fn team_eval_with(
    m: &Structure,
    x: &Team,
    f: &Formula,
    registry: &Registry,
    opts: &EvalOptions,
) -> Result<bool, EvalError> {
    Session::new(m, f, registry, *opts)?.eval(x)
}

/// Decides a builtin atom on `X` directly from its projection.
pub fn eval_builtin_atom(x: &Team, atom: &DepAtom) -> Result<bool, EvalError> {
    let (kind, vars) = BuiltinKind::of_atom(atom).ok_or_else(|| EvalError::UnregisteredDependency(atom.to_string()))?;
    let proj = team_projection(x, &vars)?;
    Ok(kind.holds(proj.iter().map(Vec::as_slice)))
}

/// `(M, X(v̄)) ∈ D`.
pub fn eval_dep_atom(m: &Structure, x: &Team, d: &Dependency, vars: &[Var]) -> Result<bool, EvalError> {
    if vars.len() != d.arity() {
        return Err(EvalError::ArityMismatch { name: d.name().to_string(), expected: d.arity(), found: vars.len() });
    }
    let rel = Relation::new(vars.len(), team_projection(x, vars)?)?;
    let domain: BTreeSet<Element> = m.domain().iter().copied().collect();
    Ok(d.holds(&domain, &rel)?)
}

/// Every team `Y` over `Dom(X) ∪ {v}` with `Y ≡ X` off `v`, built from one
/// nonempty witness set per row of `X` with `v` erased. The variable `v` is
/// appended when absent.
pub fn existential_witness_teams(m: &Structure, x: &Team, v: &Var) -> Result<Vec<Team>, EvalError> {
    let pos = x.position(v);
    let mut vars = x.vars().to_vec();
    if pos.is_none() {
        vars.push(v.clone());
    }
    let at = pos.unwrap_or(vars.len() - 1);
    let groups: BTreeSet<Tuple> = x
        .rows()
        .iter()
        .map(|r| {
            let mut g = r.clone();
            if pos.is_some() {
                g[at] = m.domain()[0];
            } else {
                g.push(m.domain()[0]);
            }
            g
        })
        .collect();
    if groups.len() * m.size() > 20 {
        return Err(EvalError::TooLarge(format!("{} witness choices", groups.len() * m.size())));
    }
    let subsets: Vec<Vec<Element>> = (1..=m.size()).flat_map(|k| m.domain().iter().copied().combinations(k)).collect();
    let mut out = Vec::new();
    for pick in groups.iter().map(|_| subsets.iter()).multi_cartesian_product() {
        let rows = groups.iter().zip(pick).flat_map(|(g, w)| {
            w.iter().map(move |e| {
                let mut r = g.clone();
                r[at] = *e;
                r
            })
        });
        out.push(Team::new(vars.clone(), rows)?);
    }
    if groups.is_empty() {
        out.push(Team::empty(vars));
    }
    Ok(out)
}
