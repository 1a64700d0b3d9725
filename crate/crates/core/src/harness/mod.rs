//! Exhaustive instance enumeration, equivalence checking at a bound, and the
//! two executable constructions (the chain sentence and the parity models).

mod constructions;
mod corpus;
pub mod oracles;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dependencies::{DependencyError, Registry};
use crate::structures::{relation_from_mask, tuples_over, Element, RelModel, Structure, StructureError, Team, Tuple};
use crate::syntax::{Formula, SyntaxError, USentence, Var};
use crate::tarski::{tarski_sentence, TarskiError};
use crate::teameval::{EvalError, EvalOptions, Session};
use crate::ulogic::ULogicError;

pub use constructions::{
    build_chain_instance, build_parity_instance, even_cardinality_sentence, ChainInstance, ParityInstance,
};
pub use corpus::{formula_corpus, CorpusConfig};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("malformed chain: {0}")]
    MalformedChain(String),
    #[error("parity models need ℓ ≥ 2, got {0}")]
    ParityLength(usize),
    #[error("free variable `{0}` is not among the team variables")]
    UnboundVariable(Var),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Dependency(#[from] DependencyError),
    #[error(transparent)]
    Tarski(#[from] TarskiError),
    #[error(transparent)]
    ULogic(#[from] ULogicError),
}

impl HarnessError {
    pub fn is_resource(&self) -> bool {
        match self {
            HarnessError::TooLarge(_) => true,
            HarnessError::Eval(e) => e.is_resource(),
            HarnessError::Dependency(DependencyError::Budget(_)) => true,
            _ => false,
        }
    }
}

/// Bounds for raw enumeration: domains `{a, b, …}` of size `1..=max_domain`,
/// every interpretation of one relation symbol, every team over `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_domain: usize,
    pub symbol: String,
    pub arity: usize,
    pub vars: Vec<Var>,
}

/// Tuple or row spaces beyond this many points are refused.
const MAX_SPACE: usize = 20;

impl Bounds {
    pub fn new(max_domain: usize, arity: usize, vars: &[&str]) -> Self {
        Bounds { max_domain, symbol: "R".to_string(), arity, vars: vars.iter().map(|v| Var::from(*v)).collect() }
    }

    pub fn with_symbol(mut self, symbol: impl Into<String>) -> Self {
        self.symbol = symbol.into();
        self
    }

    fn check(&self) -> Result<(), HarnessError> {
        if self.max_domain == 0 || self.arity == 0 {
            return Err(HarnessError::TooLarge("bounds must be at least 1".into()));
        }
        let n = self.max_domain;
        for (what, k) in [("relation", self.arity), ("team", self.vars.len())] {
            let space = n.checked_pow(k as u32).unwrap_or(usize::MAX);
            if space > MAX_SPACE {
                return Err(HarnessError::TooLarge(format!("{what} space of {space} points at size {n}")));
            }
        }
        Ok(())
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| if i < 26 { char::from(b'a' + i as u8).to_string() } else { format!("e{i}") }).collect()
}

/// Every structure within the bounds, by domain size and then relation mask
/// over the lexicographically ordered tuple space.
pub fn enumerate_structures(bounds: &Bounds) -> Result<Vec<Structure>, HarnessError> {
    bounds.check()?;
    let mut out = Vec::new();
    for n in 1..=bounds.max_domain {
        let base = Structure::from_labels(&labels(n))?;
        let tuples = tuples_over(base.domain(), bounds.arity);
        for mask in 0..1u64 << tuples.len() {
            let mut m = base.clone();
            m.set_relation(bounds.symbol.clone(), relation_from_mask(bounds.arity, &tuples, mask))?;
            out.push(m);
        }
    }
    Ok(out)
}

/// Every team over `vars` with values in `m`, by row mask, the empty team
/// first.
pub fn enumerate_teams(m: &Structure, vars: &[Var]) -> Result<Vec<Team>, HarnessError> {
    let rows = tuples_over(m.domain(), vars.len());
    if rows.len() > MAX_SPACE {
        return Err(HarnessError::TooLarge(format!("team space of {} rows", rows.len())));
    }
    (0..1u64 << rows.len())
        .map(|mask| {
            let picked: Vec<Tuple> =
                rows.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| r.clone()).collect();
            Ok(Team::new(vars.to_vec(), picked)?)
        })
        .collect()
}

/// Teams for each domain size `1..=max_domain`, indexed by size minus one.
fn teams_by_size(bounds: &Bounds) -> Result<Vec<Vec<Team>>, HarnessError> {
    (1..=bounds.max_domain).map(|n| enumerate_teams(&Structure::with_size(n)?, &bounds.vars)).collect()
}

/// `(M, X)` pairs in canonical order: domain size, relation mask, team mask.
/// No isomorphism reduction is done.
pub fn enumerate_instances(bounds: &Bounds) -> Result<Instances, HarnessError> {
    Ok(Instances { structures: enumerate_structures(bounds)?, teams: teams_by_size(bounds)?, si: 0, ti: 0 })
}

/// Iterator over [`enumerate_instances`].
#[derive(Debug)]
pub struct Instances {
    structures: Vec<Structure>,
    teams: Vec<Vec<Team>>,
    si: usize,
    ti: usize,
}

impl Iterator for Instances {
    type Item = (Structure, Team);

    fn next(&mut self) -> Option<(Structure, Team)> {
        loop {
            let m = self.structures.get(self.si)?;
            if let Some(x) = self.teams[m.size() - 1].get(self.ti) {
                self.ti += 1;
                return Some((m.clone(), x.clone()));
            }
            self.si += 1;
            self.ti = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent { bound: usize },
    Counterexample { structure: Structure, team: Team, left: bool, right: bool },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

/// Compares `φ` and `ψ` on every instance within the bounds. Both formulas
/// must have their free variables among `bounds.vars`.
pub fn check_semantic_equivalence(
    phi: &Formula,
    psi: &Formula,
    bounds: &Bounds,
    registry: &Registry,
    opts: &EvalOptions,
) -> Result<Equivalence, HarnessError> {
    let vars: BTreeSet<&Var> = bounds.vars.iter().collect();
    for f in [phi, psi] {
        if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(HarnessError::UnboundVariable(v));
        }
    }
    let teams = teams_by_size(bounds)?;
    for m in &enumerate_structures(bounds)? {
        let mut left = Session::new(m, phi, registry, *opts)?;
        let mut right = Session::new(m, psi, registry, *opts)?;
        for x in &teams[m.size() - 1] {
            let (l, r) = (left.eval(x)?, right.eval(x)?);
            if l != r {
                return Ok(Equivalence::Counterexample { structure: m.clone(), team: x.clone(), left: l, right: r });
            }
        }
    }
    Ok(Equivalence::Equivalent { bound: bounds.max_domain })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferReport {
    /// Catalogue positions of sentences true in `A` and false in `B`.
    pub violations: Vec<usize>,
}

impl TransferReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `A ⊨ φ ⇒ B ⊨ φ` for every catalogue sentence, reading each
/// sentence's relation symbol as the instance's relation.
pub fn u_transfer_check(a: &RelModel, b: &RelModel, catalogue: &[USentence]) -> Result<TransferReport, HarnessError> {
    let mut violations = Vec::new();
    for (i, u) in catalogue.iter().enumerate() {
        if u.arity() != a.arity() || u.arity() != b.arity() {
            return Err(ULogicError::ArityMismatch(u.arity(), a.arity().max(b.arity())).into());
        }
        let f = u.to_formula();
        let in_a = tarski_sentence(&a.to_structure(&u.relation), &f)?;
        if in_a && !tarski_sentence(&b.to_structure(&u.relation), &f)? {
            violations.push(i);
        }
    }
    Ok(TransferReport { violations })
}

/// Domain `{0, …, n-1}` as a set.
pub fn domain_set(n: usize) -> BTreeSet<Element> {
    (0..n as u32).map(Element).collect()
}
