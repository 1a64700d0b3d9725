//! Lowering formulas for a fixed structure: variables become digit positions
//! of a packed row code, relations become lookup tables, and subformulas are
//! hash-consed into a node arena with closure and locality information.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;

use super::EvalError;
use crate::dependencies::{BuiltinKind, Registry};
use crate::structures::Structure;
use crate::syntax::{DepAtom, Formula, Term, Var};
use crate::tarski::TarskiError;

pub(crate) type VarId = u32;
pub(crate) type NodeId = u32;

/// Rows are packed as fixed-width digits, one slot per variable. Variables
/// outside a team's domain hold digit 0.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub n: u32,
    pub bits: u32,
    pub vars: Vec<Var>,
    pub ids: BTreeMap<Var, VarId>,
}

impl Layout {
    fn new(n: usize) -> Self {
        let bits = (usize::BITS - (n.max(2) - 1).leading_zeros()).max(1);
        Layout { n: n as u32, bits, vars: Vec::new(), ids: BTreeMap::new() }
    }

    pub fn capacity(&self) -> usize {
        (64 / self.bits) as usize
    }

    pub fn intern(&mut self, v: &Var) -> Result<VarId, EvalError> {
        if let Some(id) = self.ids.get(v) {
            return Ok(*id);
        }
        if self.vars.len() >= self.capacity() {
            return Err(EvalError::TooLarge(format!(
                "{} variables over a domain of size {} do not fit a packed row",
                self.vars.len() + 1,
                self.n
            )));
        }
        let id = self.vars.len() as VarId;
        self.vars.push(v.clone());
        self.ids.insert(v.clone(), id);
        Ok(id)
    }

    #[inline]
    pub fn field(&self, v: VarId) -> u64 {
        ((1u64 << self.bits) - 1) << (self.bits * v)
    }

    #[inline]
    pub fn get(&self, code: u64, v: VarId) -> u32 {
        ((code >> (self.bits * v)) & ((1u64 << self.bits) - 1)) as u32
    }

    #[inline]
    pub fn set(&self, code: u64, v: VarId, e: u32) -> u64 {
        (code & !self.field(v)) | ((e as u64) << (self.bits * v))
    }

    /// Code bits covered by the variables in `mask`.
    pub fn code_mask(&self, mask: u64) -> u64 {
        (0..64).filter(|i| mask >> i & 1 == 1).fold(0, |acc, i| acc | self.field(i))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct RelTable {
    pub arity: usize,
    pub cells: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Arg {
    Var(VarId),
    Elem(u32),
}

/// A first order formula evaluated on one row at a time.
#[derive(Clone, Debug)]
pub(crate) enum RowF {
    Rel { negated: bool, rel: usize, args: Vec<Arg> },
    Eq(Arg, Arg),
    Neq(Arg, Arg),
    And(Box<RowF>, Box<RowF>),
    Or(Box<RowF>, Box<RowF>),
    Implies(Box<RowF>, Box<RowF>),
    Exists(VarId, Box<RowF>),
    Forall(VarId, Box<RowF>),
}

impl RowF {
    #[inline]
    fn arg(layout: &Layout, code: u64, a: Arg) -> u32 {
        match a {
            Arg::Var(v) => layout.get(code, v),
            Arg::Elem(e) => e,
        }
    }

    pub fn eval(&self, layout: &Layout, rels: &[RelTable], code: u64) -> bool {
        match self {
            RowF::Rel { negated, rel, args } => {
                let t = &rels[*rel];
                let idx = args
                    .iter()
                    .rev()
                    .fold(0usize, |acc, a| acc * layout.n as usize + Self::arg(layout, code, *a) as usize);
                debug_assert_eq!(t.arity, args.len());
                t.cells[idx] != *negated
            }
            RowF::Eq(a, b) => Self::arg(layout, code, *a) == Self::arg(layout, code, *b),
            RowF::Neq(a, b) => Self::arg(layout, code, *a) != Self::arg(layout, code, *b),
            RowF::And(a, b) => a.eval(layout, rels, code) && b.eval(layout, rels, code),
            RowF::Or(a, b) => a.eval(layout, rels, code) || b.eval(layout, rels, code),
            RowF::Implies(a, b) => !a.eval(layout, rels, code) || b.eval(layout, rels, code),
            RowF::Exists(v, b) => (0..layout.n).any(|e| b.eval(layout, rels, layout.set(code, *v, e))),
            RowF::Forall(v, b) => (0..layout.n).all(|e| b.eval(layout, rels, layout.set(code, *v, e))),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Kind {
    Lit(RowF),
    Builtin(BuiltinKind, Vec<VarId>),
    Named(String, Vec<VarId>),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    GlobalOr(NodeId, NodeId),
    Hook(RowF, NodeId),
    Exists(VarId, NodeId),
    Forall(VarId, NodeId),
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub kind: Kind,
    /// Free variables as a bit mask over variable ids.
    pub free: u64,
    pub code_mask: u64,
    /// Syntactically downward closed.
    pub dc: bool,
    /// `(shift, weight)` per free variable, for dense team keys.
    pub key_digits: Vec<(u32, u64)>,
    /// `n^|free|` when at most 64, so a team over the free variables fits a bit mask.
    pub dense_rows: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Formula(Formula),
    Hook(Formula, NodeId),
    Forall(VarId, NodeId),
    Builtin(BuiltinKind, Vec<VarId>),
}

pub(crate) struct Program {
    pub layout: Layout,
    pub rels: Vec<RelTable>,
    pub nodes: Vec<Node>,
    pub root: NodeId,
    /// Downward closed consequences of each node, for partial checks.
    pub necessary: Vec<Vec<NodeId>>,
    /// Existential variables whose witnesses may be drawn from `witnesses`.
    pub symmetric: u64,
    pub witnesses: Vec<u32>,
    interned: FxHashMap<Key, NodeId>,
    rel_ids: BTreeMap<String, usize>,
    constants: BTreeMap<String, u32>,
}

impl Program {
    pub fn compile(m: &Structure, f: &Formula, registry: &Registry) -> Result<Program, EvalError> {
        let mut layout = Layout::new(m.size());
        for v in f.all_vars() {
            layout.intern(&v)?;
        }
        let index = |e| m.domain().binary_search(&e).expect("constant inside the domain") as u32;
        let constants = m.constants().iter().map(|(c, e)| (c.clone(), index(*e))).collect();
        let mut p = Program {
            layout,
            rels: Vec::new(),
            nodes: Vec::new(),
            root: 0,
            necessary: Vec::new(),
            symmetric: 0,
            witnesses: Vec::new(),
            interned: FxHashMap::default(),
            rel_ids: BTreeMap::new(),
            constants,
        };
        for (name, rel) in m.relations() {
            let n = m.size();
            let size = n.checked_pow(rel.arity() as u32).filter(|s| *s <= 1 << 24).ok_or_else(|| {
                EvalError::TooLarge(format!("relation `{name}` of arity {} is too large to tabulate", rel.arity()))
            })?;
            let mut cells = vec![false; size];
            for t in rel.tuples() {
                let idx = t.iter().rev().fold(0usize, |acc, e| acc * n + index(*e) as usize);
                cells[idx] = true;
            }
            p.rel_ids.insert(name.clone(), p.rels.len());
            p.rels.push(RelTable { arity: rel.arity(), cells });
        }
        p.root = p.node(f, registry)?;
        Ok(p)
    }

    fn arg(&self, t: &Term) -> Result<Arg, EvalError> {
        Ok(match t {
            Term::Var(v) => Arg::Var(self.layout.ids[v]),
            Term::Const(c) => {
                Arg::Elem(*self.constants.get(c).ok_or_else(|| TarskiError::UninterpretedConstant(c.clone()))?)
            }
        })
    }

    pub fn row_formula(&self, f: &Formula) -> Result<RowF, EvalError> {
        let rec = |g: &Formula| self.row_formula(g).map(Box::new);
        Ok(match f {
            Formula::Rel { negated, name, args } => {
                let rel = *self.rel_ids.get(name).ok_or_else(|| TarskiError::UninterpretedRelation(name.clone()))?;
                if self.rels[rel].arity != args.len() {
                    return Err(TarskiError::ArityMismatch {
                        name: name.clone(),
                        expected: self.rels[rel].arity,
                        found: args.len(),
                    }
                    .into());
                }
                RowF::Rel { negated: *negated, rel, args: args.iter().map(|t| self.arg(t)).collect::<Result<_, _>>()? }
            }
            Formula::Eq(a, b) => RowF::Eq(self.arg(a)?, self.arg(b)?),
            Formula::Neq(a, b) => RowF::Neq(self.arg(a)?, self.arg(b)?),
            Formula::Atom(_) => return Err(TarskiError::DependencyAtom.into()),
            Formula::And(a, b) => RowF::And(rec(a)?, rec(b)?),
            Formula::Or(a, b) | Formula::GlobalOr(a, b) => RowF::Or(rec(a)?, rec(b)?),
            Formula::Hook(a, b) => RowF::Implies(rec(a)?, rec(b)?),
            Formula::Exists(v, b) => RowF::Exists(self.layout.ids[v], rec(b)?),
            Formula::Forall(v, b) => RowF::Forall(self.layout.ids[v], rec(b)?),
        })
    }

    fn mask_of<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> u64 {
        vars.into_iter().fold(0, |acc, v| acc | 1 << self.layout.ids[v])
    }

    fn push(&mut self, key: Key, kind: Kind, free: u64, dc: bool) -> NodeId {
        let n = self.layout.n as u64;
        let free_ids: Vec<u32> = (0..64).filter(|i| free >> i & 1 == 1).collect();
        let mut weight = 1u64;
        let mut key_digits = Vec::new();
        for v in &free_ids {
            key_digits.push((self.layout.bits * v, weight));
            weight = weight.saturating_mul(n);
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            kind,
            free,
            code_mask: self.layout.code_mask(free),
            dc,
            key_digits,
            dense_rows: (weight <= 64).then_some(weight as u32),
        });
        self.necessary.push(Vec::new());
        self.interned.insert(key, id);
        id
    }

    fn node(&mut self, f: &Formula, registry: &Registry) -> Result<NodeId, EvalError> {
        let key = Key::Formula(f.clone());
        if let Some(id) = self.interned.get(&key) {
            return Ok(*id);
        }
        let free = self.mask_of(&f.free_vars());
        let (kind, dc) = match f {
            Formula::Rel { .. } | Formula::Eq(..) | Formula::Neq(..) => (Kind::Lit(self.row_formula(f)?), true),
            Formula::Atom(DepAtom::Named(name, vars)) => {
                let d = registry.get(name).ok_or_else(|| EvalError::UnregisteredDependency(name.clone()))?;
                if d.arity() != vars.len() {
                    return Err(EvalError::ArityMismatch {
                        name: name.clone(),
                        expected: d.arity(),
                        found: vars.len(),
                    });
                }
                let ids = vars.iter().map(|v| self.layout.ids[v]).collect();
                (Kind::Named(name.clone(), ids), d.is_downward_closed())
            }
            Formula::Atom(atom) => {
                let (k, vars) = BuiltinKind::of_atom(atom).expect("builtin atom");
                (Kind::Builtin(k, vars.iter().map(|v| self.layout.ids[v]).collect()), k.is_downward_closed())
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::GlobalOr(a, b) => {
                let (a, b) = (self.node(a, registry)?, self.node(b, registry)?);
                let dc = self.nodes[a as usize].dc && self.nodes[b as usize].dc;
                let kind = match f {
                    Formula::And(..) => Kind::And(a, b),
                    Formula::Or(..) => Kind::Or(a, b),
                    _ => Kind::GlobalOr(a, b),
                };
                (kind, dc)
            }
            Formula::Hook(theta, body) => {
                let guard = self.row_formula(theta)?;
                let b = self.node(body, registry)?;
                (Kind::Hook(guard, b), self.nodes[b as usize].dc)
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let b = self.node(body, registry)?;
                let v = self.layout.ids[v];
                let dc = self.nodes[b as usize].dc;
                let kind = if matches!(f, Formula::Exists(..)) { Kind::Exists(v, b) } else { Kind::Forall(v, b) };
                (kind, dc)
            }
        };
        let id = self.push(key, kind, free, dc);
        self.analyse_necessary(id, f);
        Ok(id)
    }

    /// Downward closed formulas implied by node `id` on the same team, split as
    /// finely as the connectives allow.
    fn analyse_necessary(&mut self, id: NodeId, f: &Formula) {
        let node = &self.nodes[id as usize];
        let conds: Vec<NodeId> = match (&node.kind, f) {
            (Kind::And(a, b), _) => {
                let mut c = self.necessary[*a as usize].clone();
                c.extend(self.necessary[*b as usize].iter().copied());
                c.sort_unstable();
                c.dedup();
                c
            }
            (Kind::Hook(guard, b), Formula::Hook(theta, _)) => {
                let (guard, b) = (guard.clone(), *b);
                self.necessary[b as usize]
                    .clone()
                    .into_iter()
                    .map(|c| self.derived(Key::Hook((**theta).clone(), c), Kind::Hook(guard.clone(), c), c))
                    .collect()
            }
            (Kind::Forall(v, b), _) => {
                let (v, b) = (*v, *b);
                self.necessary[b as usize]
                    .clone()
                    .into_iter()
                    .map(|c| {
                        if self.nodes[c as usize].free >> v & 1 == 1 {
                            self.derived(Key::Forall(v, c), Kind::Forall(v, c), c)
                        } else {
                            c
                        }
                    })
                    .collect()
            }
            (Kind::Exists(v, b), _) => {
                let v = *v;
                self.necessary[*b as usize]
                    .clone()
                    .into_iter()
                    .filter_map(|c| if self.nodes[c as usize].free >> v & 1 == 0 { Some(c) } else { self.erase(c, v) })
                    .collect()
            }
            _ if node.dc => vec![id],
            _ => Vec::new(),
        };
        self.necessary[id as usize] = conds;
    }

    /// A constancy or dependence condition with `v` dropped, which any team
    /// satisfying `c` still satisfies once `v` is erased.
    fn erase(&mut self, c: NodeId, v: VarId) -> Option<NodeId> {
        let (kind, args) = match &self.nodes[c as usize].kind {
            Kind::Builtin(BuiltinKind::Const { .. }, args) => {
                let kept: Vec<VarId> = args.iter().copied().filter(|a| *a != v).collect();
                (BuiltinKind::Const { width: kept.len() }, kept)
            }
            Kind::Builtin(BuiltinKind::Dep { left, .. }, args) if !args[..*left].contains(&v) => {
                let mut kept = args[..*left].to_vec();
                kept.extend(args[*left..].iter().copied().filter(|a| *a != v));
                (BuiltinKind::Dep { left: *left, right: kept.len() - left }, kept)
            }
            _ => return None,
        };
        if kind.arity() == 0 || matches!(kind, BuiltinKind::Dep { right: 0, .. }) {
            return None;
        }
        let key = Key::Builtin(kind, args.clone());
        if let Some(id) = self.interned.get(&key) {
            return Some(*id);
        }
        let free = args.iter().fold(0u64, |m, a| m | 1 << a);
        let id = self.push(key, Kind::Builtin(kind, args), free, true);
        self.necessary[id as usize] = vec![id];
        Some(id)
    }

    /// A hook or universal node wrapped around the downward closed node `c`.
    fn derived(&mut self, key: Key, kind: Kind, c: NodeId) -> NodeId {
        if let Some(id) = self.interned.get(&key) {
            return *id;
        }
        let inner = self.nodes[c as usize].free;
        let free = match &kind {
            Kind::Forall(v, _) => inner & !(1 << v),
            Kind::Hook(..) => {
                let Key::Hook(theta, _) = &key else { unreachable!() };
                inner | self.mask_of(&theta.free_vars())
            }
            _ => unreachable!(),
        };
        let id = self.push(key, kind, free, true);
        self.necessary[id as usize] = vec![id];
        id
    }

    /// Marks existential variables whose witnesses can be restricted to the
    /// named elements plus one anonymous representative.
    ///
    /// A candidate is bound exactly once, by `∃`, and occurs only in
    /// (in)equalities with constants and in positive equalities with other
    /// candidates outside hook guards. Mapping every unnamed element to a
    /// single representative preserves all such atoms on every row, so any
    /// witness team can be collapsed without changing satisfaction.
    pub fn analyse_symmetry(&mut self, f: &Formula) {
        let mut exists: BTreeMap<Var, usize> = BTreeMap::new();
        let mut forall: BTreeSet<Var> = BTreeSet::new();
        f.visit(&mut |g| match g {
            Formula::Exists(v, _) => *exists.entry(v.clone()).or_default() += 1,
            Formula::Forall(v, _) => {
                forall.insert(v.clone());
            }
            _ => {}
        });
        let free = f.free_vars();
        let mut cand: BTreeSet<Var> = exists
            .into_iter()
            .filter(|(v, c)| *c == 1 && !forall.contains(v) && !free.contains(v))
            .map(|(v, _)| v)
            .collect();
        let mut edges: Vec<(Var, Var, bool)> = Vec::new();
        let mut banned: BTreeSet<Var> = BTreeSet::new();
        scan(f, false, &mut edges, &mut banned);
        cand.retain(|v| !banned.contains(v));
        loop {
            let before = cand.len();
            for (a, b, positive) in &edges {
                let ok = *positive && cand.contains(a) && cand.contains(b);
                if !ok {
                    cand.remove(a);
                    cand.remove(b);
                }
            }
            if cand.len() == before {
                break;
            }
        }
        self.symmetric = self.mask_of(&cand);
        let mut named: Vec<u32> = self.constants_in(f);
        if let Some(fresh) = (0..self.layout.n).find(|e| !named.contains(e)) {
            named.push(fresh);
        }
        named.sort_unstable();
        self.witnesses = named;
    }

    fn constants_in(&self, f: &Formula) -> Vec<u32> {
        let mut out: Vec<u32> = f.constants().iter().filter_map(|c| self.constants.get(c).copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn scan(f: &Formula, guard: bool, edges: &mut Vec<(Var, Var, bool)>, banned: &mut BTreeSet<Var>) {
    match f {
        Formula::Rel { args, .. } => banned.extend(args.iter().filter_map(Term::as_var).cloned()),
        Formula::Atom(d) => banned.extend(d.vars()),
        Formula::Eq(Term::Var(a), Term::Var(b)) | Formula::Neq(Term::Var(a), Term::Var(b)) if a != b => {
            edges.push((a.clone(), b.clone(), !guard && matches!(f, Formula::Eq(..))));
        }
        Formula::Eq(..) | Formula::Neq(..) => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::GlobalOr(a, b) => {
            scan(a, guard, edges, banned);
            scan(b, guard, edges, banned);
        }
        Formula::Hook(a, b) => {
            scan(a, true, edges, banned);
            scan(b, guard, edges, banned);
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => scan(b, guard, edges, banned),
    }
}
