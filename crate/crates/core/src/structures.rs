//! Finite structures, assignments, teams and identity types.
//!
//! Elements are opaque tokens. Two structures share an element only when they
//! use the same token, which is how substructure relations are expressed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, Term, Var};
use crate::tarski::{self, TarskiError};

/// An element of a structure's domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub u32);

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

pub type Tuple = Vec<Element>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("structure domain is empty")]
    EmptyDomain,
    #[error("element {0} is not in the domain")]
    ForeignElement(Element),
    #[error("relation {name} declared with arity {arity} but contains a tuple of length {found}")]
    ArityMismatch { name: String, arity: usize, found: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(Var),
    #[error("duplicate variable `{0}` in team domain")]
    DuplicateVariable(Var),
    #[error("team row has {found} values but the team has {expected} variables")]
    RowWidth { expected: usize, found: usize },
    #[error("identity type of the empty tuple is undefined")]
    EmptyTuple,
    #[error("not a substructure: {0}")]
    NotSubstructure(String),
    #[error(transparent)]
    Tarski(#[from] TarskiError),
}

/// A set of tuples of a fixed arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

impl Relation {
    pub fn empty(arity: usize) -> Self {
        Relation { arity, tuples: BTreeSet::new() }
    }

    pub fn new<I>(arity: usize, tuples: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = Tuple>,
    {
        let mut rel = Relation::empty(arity);
        for t in tuples {
            if t.len() != arity {
                return Err(StructureError::ArityMismatch { name: String::new(), arity, found: t.len() });
            }
            rel.tuples.insert(t);
        }
        Ok(rel)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Element]) -> bool {
        self.tuples.contains(t)
    }

    pub fn insert(&mut self, t: Tuple) {
        assert_eq!(t.len(), self.arity, "tuple arity");
        self.tuples.insert(t);
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.is_subset(&other.tuples)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.arity, other.arity, "union of relations of different arity");
        Relation { arity: self.arity, tuples: self.tuples.union(&other.tuples).cloned().collect() }
    }

    /// `self ∩ domain^k`.
    pub fn restrict_to(&self, domain: &BTreeSet<Element>) -> Relation {
        Relation {
            arity: self.arity,
            tuples: self.tuples.iter().filter(|t| t.iter().all(|e| domain.contains(e))).cloned().collect(),
        }
    }

    /// Image of the relation under an element map; elements missing from the
    /// map are left in place.
    pub fn map_elements(&self, f: &BTreeMap<Element, Element>) -> Relation {
        Relation {
            arity: self.arity,
            tuples: self.tuples.iter().map(|t| t.iter().map(|e| *f.get(e).unwrap_or(e)).collect()).collect(),
        }
    }

    pub fn elements(&self) -> BTreeSet<Element> {
        self.tuples.iter().flatten().copied().collect()
    }
}

impl FromIterator<Tuple> for Relation {
    /// Panics on an empty iterator (arity unknown) or mixed arities.
    fn from_iter<I: IntoIterator<Item = Tuple>>(iter: I) -> Self {
        let tuples: BTreeSet<Tuple> = iter.into_iter().collect();
        let arity = tuples.iter().next().map(Vec::len).expect("arity of empty relation");
        assert!(tuples.iter().all(|t| t.len() == arity), "mixed arities");
        Relation { arity, tuples }
    }
}

/// A finite first-order structure with a nonempty domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    domain: Vec<Element>,
    labels: BTreeMap<Element, String>,
    constants: BTreeMap<String, Element>,
    relations: BTreeMap<String, Relation>,
}

impl Structure {
    /// A structure with the given domain and no symbols.
    pub fn new<I: IntoIterator<Item = Element>>(domain: I) -> Result<Self, StructureError> {
        let mut domain: Vec<Element> = domain.into_iter().collect();
        domain.sort();
        domain.dedup();
        if domain.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        Ok(Structure { domain, labels: BTreeMap::new(), constants: BTreeMap::new(), relations: BTreeMap::new() })
    }

    /// Elements `0..n`.
    pub fn with_size(n: usize) -> Result<Self, StructureError> {
        Structure::new((0..n as u32).map(Element))
    }

    /// Builds a domain from labels, assigning tokens in listing order.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self, StructureError> {
        let mut s = Structure::with_size(labels.len())?;
        for (i, l) in labels.iter().enumerate() {
            s.labels.insert(Element(i as u32), l.as_ref().to_string());
        }
        Ok(s)
    }

    pub fn domain(&self) -> &[Element] {
        &self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn contains(&self, e: Element) -> bool {
        self.domain.binary_search(&e).is_ok()
    }

    pub fn label(&self, e: Element) -> String {
        self.labels.get(&e).cloned().unwrap_or_else(|| e.to_string())
    }

    pub fn set_label(&mut self, e: Element, label: impl Into<String>) {
        self.labels.insert(e, label.into());
    }

    pub fn element_by_label(&self, label: &str) -> Option<Element> {
        self.labels.iter().find(|(_, l)| l.as_str() == label).map(|(e, _)| *e)
    }

    pub fn set_constant(&mut self, name: impl Into<String>, e: Element) -> Result<(), StructureError> {
        if !self.contains(e) {
            return Err(StructureError::ForeignElement(e));
        }
        self.constants.insert(name.into(), e);
        Ok(())
    }

    pub fn constant(&self, name: &str) -> Option<Element> {
        self.constants.get(name).copied()
    }

    pub fn constants(&self) -> &BTreeMap<String, Element> {
        &self.constants
    }

    pub fn set_relation(&mut self, name: impl Into<String>, rel: Relation) -> Result<(), StructureError> {
        let name = name.into();
        for t in rel.tuples() {
            if let Some(e) = t.iter().find(|e| !self.contains(**e)) {
                return Err(StructureError::ForeignElement(*e));
            }
        }
        self.relations.insert(name, rel);
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn format_tuple(&self, t: &[Element]) -> String {
        let parts: Vec<String> = t.iter().map(|e| self.label(*e)).collect();
        format!("({})", parts.join(","))
    }
}

/// All `k`-tuples over `domain` in lexicographic order.
pub fn tuples_over(domain: &[Element], k: usize) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                domain.iter().map(move |e| {
                    let mut t = t.clone();
                    t.push(*e);
                    t
                })
            })
            .collect();
    }
    out
}

/// The relation holding `tuples[i]` exactly when bit `i` of `mask` is set.
pub fn relation_from_mask(arity: usize, tuples: &[Tuple], mask: u64) -> Relation {
    Relation {
        arity,
        tuples: tuples.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect(),
    }
}

/// A structure over a single relation symbol, written `(A, R)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelModel {
    pub domain: BTreeSet<Element>,
    pub relation: Relation,
}

impl RelModel {
    pub fn new<I: IntoIterator<Item = Element>>(domain: I, relation: Relation) -> Result<Self, StructureError> {
        let domain: BTreeSet<Element> = domain.into_iter().collect();
        if domain.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        if let Some(e) = relation.elements().into_iter().find(|e| !domain.contains(e)) {
            return Err(StructureError::ForeignElement(e));
        }
        Ok(RelModel { domain, relation })
    }

    pub fn arity(&self) -> usize {
        self.relation.arity()
    }

    /// Interprets the relation under `symbol` in a fresh structure.
    pub fn to_structure(&self, symbol: &str) -> Structure {
        let mut s = Structure::new(self.domain.iter().copied()).expect("nonempty domain");
        s.set_relation(symbol, self.relation.clone()).expect("relation within domain");
        s
    }

    /// `self` is a substructure of `sup`: the domain is contained and the
    /// relation is the restriction of `sup`'s relation.
    pub fn substructure_of(&self, sup: &RelModel) -> Result<(), StructureError> {
        if self.arity() != sup.arity() {
            return Err(StructureError::NotSubstructure(format!("arity {} vs {}", self.arity(), sup.arity())));
        }
        if !self.domain.is_subset(&sup.domain) {
            return Err(StructureError::NotSubstructure("domain not contained".into()));
        }
        if sup.relation.restrict_to(&self.domain) != self.relation {
            return Err(StructureError::NotSubstructure(
                "relation is not the restriction of the superstructure's relation".into(),
            ));
        }
        Ok(())
    }
}

/// A variable assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    bindings: BTreeMap<Var, Element>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment::default()
    }

    pub fn get(&self, v: &Var) -> Option<Element> {
        self.bindings.get(v).copied()
    }

    /// `s[a/v]`
    pub fn with(&self, v: Var, a: Element) -> Assignment {
        let mut s = self.clone();
        s.bindings.insert(v, a);
        s
    }

    pub fn set(&mut self, v: Var, a: Element) {
        self.bindings.insert(v, a);
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }
}

impl FromIterator<(Var, Element)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Var, Element)>>(iter: I) -> Self {
        Assignment { bindings: iter.into_iter().collect() }
    }
}

/// A set of assignments sharing one ordered variable domain.
///
/// Rows are kept in a `BTreeSet`, so duplicates collapse and the row order is
/// the canonical one (lexicographic in the variable order).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Team {
    vars: Vec<Var>,
    rows: BTreeSet<Tuple>,
}

impl Team {
    pub fn new<I>(vars: Vec<Var>, rows: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = Tuple>,
    {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(StructureError::DuplicateVariable(v.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for r in rows {
            if r.len() != vars.len() {
                return Err(StructureError::RowWidth { expected: vars.len(), found: r.len() });
            }
            set.insert(r);
        }
        Ok(Team { vars, rows: set })
    }

    pub fn empty(vars: Vec<Var>) -> Self {
        Team::new(vars, []).expect("distinct variables")
    }

    /// `{ε}`, the team holding only the empty assignment.
    pub fn unit() -> Self {
        Team { vars: Vec::new(), rows: std::iter::once(Vec::new()).collect() }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &BTreeSet<Tuple> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn position(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows.iter().map(move |r| self.vars.iter().cloned().zip(r.iter().copied()).collect())
    }

    /// The same team with its variables listed in sorted order.
    pub fn canonical(&self) -> Team {
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by(|a, b| self.vars[*a].cmp(&self.vars[*b]));
        Team {
            vars: order.iter().map(|i| self.vars[*i].clone()).collect(),
            rows: self.rows.iter().map(|r| order.iter().map(|i| r[*i]).collect()).collect(),
        }
    }
}

/// `X(v̄) = { s(v̄) : s ∈ X }`. Repeated variables are allowed.
pub fn team_projection(x: &Team, vars: &[Var]) -> Result<BTreeSet<Tuple>, StructureError> {
    let idx = vars
        .iter()
        .map(|v| x.position(v).ok_or_else(|| StructureError::UnknownVariable(v.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(x.rows.iter().map(|r| idx.iter().map(|i| r[*i]).collect()).collect())
}

/// `X ≡_V Y`: the projections onto a fixed listing of `V` coincide.
pub fn team_equiv_on(x: &Team, y: &Team, vars: &BTreeSet<Var>) -> Result<bool, StructureError> {
    let list: Vec<Var> = vars.iter().cloned().collect();
    Ok(team_projection(x, &list)? == team_projection(y, &list)?)
}

/// `X|θ`: the rows satisfying the first-order formula `θ` in Tarski semantics.
pub fn restrict_team(x: &Team, theta: &Formula, m: &Structure) -> Result<Team, StructureError> {
    if theta.has_dependency_atoms() {
        return Err(TarskiError::DependencyAtom.into());
    }
    let mut rows = BTreeSet::new();
    for (row, s) in x.rows.iter().zip(x.assignments()) {
        if tarski::tarski_eval(m, &s, theta)? {
            rows.insert(row.clone());
        }
    }
    Ok(Team { vars: x.vars.clone(), rows })
}

/// `X[M/v] = { s[m/v] : s ∈ X, m ∈ M }`. Overwrites `v` when it is already
/// in the team's domain, otherwise appends it.
pub fn extend_universal(x: &Team, v: &Var, m: &Structure) -> Result<Team, StructureError> {
    if m.domain().is_empty() {
        return Err(StructureError::EmptyDomain);
    }
    let (vars, pos) = match x.position(v) {
        Some(p) => (x.vars.clone(), p),
        None => {
            let mut vs = x.vars.clone();
            vs.push(v.clone());
            let p = vs.len() - 1;
            (vs, p)
        }
    };
    let mut rows = BTreeSet::new();
    for r in &x.rows {
        for e in m.domain() {
            let mut row = r.clone();
            if pos == row.len() {
                row.push(*e);
            } else {
                row[pos] = *e;
            }
            rows.insert(row);
        }
    }
    Ok(Team { vars, rows })
}

/// The equality pattern of a tuple: position `i` maps to the index of the
/// first position holding the same element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdentityType {
    classes: Vec<usize>,
}

impl IdentityType {
    pub fn arity(&self) -> usize {
        self.classes.len()
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.classes[i] == self.classes[j]
    }

    pub fn satisfied_by(&self, t: &[Element]) -> bool {
        t.len() == self.classes.len() && (0..t.len()).all(|i| (0..i).all(|j| (t[i] == t[j]) == self.same_class(i, j)))
    }

    /// `τ(x₁…x_k)`: the conjunction of the equalities and inequalities between
    /// the given variables that the pattern prescribes.
    pub fn to_formula(&self, vars: &[Var]) -> Formula {
        assert_eq!(vars.len(), self.arity(), "one variable per position");
        let var = |i: usize| Term::Var(vars[i].clone());
        let pairs: Vec<(usize, usize)> =
            (0..self.arity()).flat_map(|i| (i + 1..self.arity()).map(move |j| (i, j))).collect();
        let eqs = pairs.iter().filter(|(i, j)| self.same_class(*i, *j)).map(|(i, j)| Formula::Eq(var(*i), var(*j)));
        let neqs = pairs.iter().filter(|(i, j)| !self.same_class(*i, *j)).map(|(i, j)| Formula::Neq(var(*i), var(*j)));
        Formula::conjunction(eqs.chain(neqs)).unwrap_or_else(|| Formula::Eq(var(0), var(0)))
    }
}

pub fn identity_type_of(t: &[Element]) -> Result<IdentityType, StructureError> {
    if t.is_empty() {
        return Err(StructureError::EmptyTuple);
    }
    let classes = (0..t.len()).map(|i| (0..=i).find(|j| t[*j] == t[i]).expect("i matches itself")).collect();
    Ok(IdentityType { classes })
}

/// Enumerates the homomorphisms `h: (B, S) → (A, R)` that fix `A` pointwise.
///
/// Each map is returned on the whole of `B`.
pub fn enumerate_retraction_homs(sub: &RelModel, sup: &RelModel) -> Result<RetractionHoms, StructureError> {
    sub.substructure_of(sup)?;
    let outside: Vec<Element> = sup.domain.difference(&sub.domain).copied().collect();
    let targets: Vec<Element> = sub.domain.iter().copied().collect();
    Ok(RetractionHoms { sub: sub.clone(), sup: sup.clone(), outside, targets, counter: Some(Vec::new()) })
}

pub struct RetractionHoms {
    sub: RelModel,
    sup: RelModel,
    outside: Vec<Element>,
    targets: Vec<Element>,
    counter: Option<Vec<usize>>,
}

impl RetractionHoms {
    fn advance(&mut self) -> Option<Vec<usize>> {
        let counter = self.counter.as_mut()?;
        if counter.is_empty() {
            // first call
            *counter = vec![0; self.outside.len()];
            let first = counter.clone();
            if self.outside.is_empty() {
                self.counter = None;
            }
            return Some(first);
        }
        for i in (0..counter.len()).rev() {
            counter[i] += 1;
            if counter[i] < self.targets.len() {
                return Some(counter.clone());
            }
            counter[i] = 0;
        }
        self.counter = None;
        None
    }
}

impl Iterator for RetractionHoms {
    type Item = BTreeMap<Element, Element>;

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(choice) = self.advance() {
            let mut h: BTreeMap<Element, Element> = self.sub.domain.iter().map(|a| (*a, *a)).collect();
            for (b, c) in self.outside.iter().zip(&choice) {
                h.insert(*b, self.targets[*c]);
            }
            if self.sup.relation.map_elements(&h).is_subset(&self.sub.relation) {
                return Some(h);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn e(i: u32) -> Element {
        Element(i)
    }

    fn v(s: &str) -> Var {
        Var::from(s)
    }

    fn team(vars: &[&str], rows: &[&[u32]]) -> Team {
        Team::new(vars.iter().map(|s| v(s)).collect(), rows.iter().map(|r| r.iter().map(|i| e(*i)).collect())).unwrap()
    }

    #[test]
    fn projection_examples() {
        let x = team(&["x", "y"], &[&[0, 1], &[1, 1]]);
        assert_eq!(team_projection(&x, &[v("y")]).unwrap(), [vec![e(1)]].into_iter().collect());
        let empty = team(&["x"], &[]);
        assert!(team_projection(&empty, &[v("x")]).unwrap().is_empty());
        let x = team(&["x", "y"], &[&[0, 1]]);
        assert_eq!(
            team_projection(&x, &[v("x"), v("x"), v("y")]).unwrap(),
            [vec![e(0), e(0), e(1)]].into_iter().collect()
        );
        assert!(matches!(team_projection(&x, &[v("z")]), Err(StructureError::UnknownVariable(_))));
    }

    #[test]
    fn equivalence_examples() {
        let vs: BTreeSet<Var> = [v("x")].into_iter().collect();
        assert!(team_equiv_on(&team(&["x", "y"], &[&[0, 1]]), &team(&["x", "y"], &[&[0, 2]]), &vs).unwrap());
        assert!(team_equiv_on(&team(&["x"], &[]), &team(&["x"], &[]), &vs).unwrap());
        assert!(!team_equiv_on(&team(&["x"], &[&[0]]), &team(&["x"], &[&[0], &[1]]), &vs).unwrap());
        let other: BTreeSet<Var> = [v("q")].into_iter().collect();
        assert!(team_equiv_on(&team(&["x"], &[]), &team(&["x"], &[]), &other).is_err());
    }

    #[test]
    fn restriction_examples() {
        let m = Structure::with_size(2).unwrap();
        let x = team(&["x", "y"], &[&[0, 1], &[1, 1]]);
        let eq = parse_formula("x=y", &Default::default()).unwrap();
        assert_eq!(restrict_team(&x, &eq, &m).unwrap(), team(&["x", "y"], &[&[1, 1]]));
        let taut = parse_formula("x=x", &Default::default()).unwrap();
        assert_eq!(restrict_team(&x, &taut, &m).unwrap(), x);
        let contra = parse_formula("x!=x", &Default::default()).unwrap();
        assert!(restrict_team(&x, &contra, &m).unwrap().is_empty());
        let dep = parse_formula("dep(x;y)", &Default::default()).unwrap();
        assert!(restrict_team(&x, &dep, &m).is_err());
    }

    #[test]
    fn universal_extension_examples() {
        let m = Structure::with_size(2).unwrap();
        let x = team(&["x"], &[&[0]]);
        assert_eq!(extend_universal(&x, &v("y"), &m).unwrap(), team(&["x", "y"], &[&[0, 0], &[0, 1]]));
        assert!(extend_universal(&team(&["x"], &[]), &v("y"), &m).unwrap().is_empty());
        assert_eq!(extend_universal(&x, &v("x"), &m).unwrap(), team(&["x"], &[&[0], &[1]]));
    }

    #[test]
    fn identity_type_examples() {
        let t = identity_type_of(&[e(0), e(0), e(1)]).unwrap();
        let vars = [v("x1"), v("x2"), v("x3")];
        assert_eq!(t.to_formula(&vars).to_string(), "x1=x2 & x1!=x3 & x2!=x3");
        let single = identity_type_of(&[e(4)]).unwrap();
        assert_eq!(single.to_formula(&[v("x1")]).to_string(), "x1=x1");
        assert_eq!(identity_type_of(&[e(0), e(1)]).unwrap(), identity_type_of(&[e(2), e(3)]).unwrap());
        assert!(t.satisfied_by(&[e(0), e(0), e(2)]));
        assert!(!t.satisfied_by(&[e(0), e(1), e(2)]));
        assert_eq!(identity_type_of(&[]), Err(StructureError::EmptyTuple));
    }

    fn rel(arity: usize, tuples: &[&[u32]]) -> Relation {
        Relation::new(arity, tuples.iter().map(|t| t.iter().map(|i| e(*i)).collect())).unwrap()
    }

    #[test]
    fn retraction_hom_examples() {
        let sub = RelModel::new([e(0)], rel(2, &[&[0, 0]])).unwrap();
        let sup = RelModel::new([e(0), e(1)], rel(2, &[&[0, 0], &[0, 1]])).unwrap();
        let homs: Vec<_> = enumerate_retraction_homs(&sub, &sup).unwrap().collect();
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0][&e(1)], e(0));

        let homs: Vec<_> = enumerate_retraction_homs(&sup, &sup).unwrap().collect();
        assert_eq!(homs, vec![[(e(0), e(0)), (e(1), e(1))].into_iter().collect()]);

        let sub = RelModel::new([e(0)], rel(2, &[])).unwrap();
        let sup = RelModel::new([e(0), e(1)], rel(2, &[&[0, 1]])).unwrap();
        assert_eq!(enumerate_retraction_homs(&sub, &sup).unwrap().count(), 0);

        let bad = RelModel::new([e(0)], rel(2, &[])).unwrap();
        let sup = RelModel::new([e(0), e(1)], rel(2, &[&[0, 0]])).unwrap();
        assert!(enumerate_retraction_homs(&bad, &sup).is_err());
    }

    #[test]
    fn team_rows_collapse() {
        let x = team(&["x"], &[&[0], &[0], &[1]]);
        assert_eq!(x.len(), 2);
        assert!(Team::new(vec![v("x"), v("x")], []).is_err());
    }
}
