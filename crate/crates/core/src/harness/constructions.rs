use itertools::Itertools;

use super::{labels, HarnessError};
use crate::dependencies::{Dependency, Registry};
use crate::structures::{Element, Relation, Structure};
use crate::syntax::{parse_formula, Formula, ParseContext, Term, Var};

/// The model carrying a chain `S₁ ⊆ S₂ ⊆ …` as one indexed relation, and the
/// sentence `∃i(LT(i,d) ∧ ∀v̄(S(i,v̄) ↪ D v̄))`.
#[derive(Clone, Debug)]
pub struct ChainInstance {
    pub structure: Structure,
    pub formula: Formula,
    pub registry: Registry,
    /// `indices[n - 1]` is the element standing for index `n`.
    pub indices: Vec<Element>,
}

/// Builds the chain model over base elements `a, b, …` (the first
/// `base_size` elements) followed by index elements `1, …, max(L, d)`.
///
/// `S` holds `(n, ā)` for `ā ∈ chain[n - 1]`; indices past the chain carry
/// no tuples. `N` marks the indices, `LT` is their order and the constant
/// `d` names index `d`.
pub fn build_chain_instance(
    d: usize,
    dep: &Dependency,
    base_size: usize,
    chain: &[Relation],
) -> Result<ChainInstance, HarnessError> {
    let k = dep.arity();
    if d == 0 {
        return Err(HarnessError::MalformedChain("d must be a positive index".into()));
    }
    if chain.is_empty() {
        return Err(HarnessError::MalformedChain("empty chain".into()));
    }
    if let Some(r) = chain.iter().find(|r| r.arity() != k) {
        return Err(HarnessError::MalformedChain(format!("relation of arity {} for a {k}-ary dependency", r.arity())));
    }
    if let Some(i) = chain.iter().tuple_windows().position(|(a, b)| !a.is_subset(b)) {
        return Err(HarnessError::MalformedChain(format!("link {} is not contained in link {}", i + 1, i + 2)));
    }
    if chain.iter().flat_map(|r| r.elements()).any(|e| e.0 as usize >= base_size) {
        return Err(HarnessError::MalformedChain("tuple outside the base domain".into()));
    }

    let count = chain.len().max(d);
    let mut names = labels(base_size);
    names.extend((1..=count).map(|n| n.to_string()));
    let mut m = Structure::from_labels(&names)?;
    let indices: Vec<Element> = (0..count).map(|n| Element((base_size + n) as u32)).collect();

    m.set_relation("N", Relation::new(1, indices.iter().map(|i| vec![*i]))?)?;
    let lt = indices.iter().tuple_combinations().map(|(a, b)| vec![*a, *b]);
    m.set_relation("LT", Relation::new(2, lt)?)?;
    let s = chain.iter().zip(&indices).flat_map(|(r, i)| {
        r.tuples().iter().map(move |t| {
            let mut row = vec![*i];
            row.extend(t);
            row
        })
    });
    m.set_relation("S", Relation::new(k + 1, s)?)?;
    m.set_constant("d", indices[d - 1])?;

    let i = Var::from("i");
    let vs: Vec<Var> = (1..=k).map(|j| Var::new(format!("v{j}"))).collect();
    let mut s_args = vec![Term::Var(i.clone())];
    s_args.extend(vs.iter().cloned().map(Term::Var));
    let hook = Formula::hook(Formula::rel("S", s_args), Formula::Atom(dep.atom(&vs)));
    let formula = Formula::exists(
        i.clone(),
        Formula::and(Formula::rel("LT", vec![Term::Var(i), Term::Const("d".into())]), Formula::forall_all(&vs, hook)),
    );
    Ok(ChainInstance { structure: m, formula, registry: Registry::new().with(dep.clone()), indices })
}

/// The parity model `M_ℓ` with its sentence, which holds iff `ℓ` is even.
#[derive(Clone, Debug)]
pub struct ParityInstance {
    pub ell: usize,
    pub structure: Structure,
    pub formula: Formula,
    pub dependency: Dependency,
    pub registry: Registry,
}

pub const ANTISYMMETRY: &str = "forall x,y. ((R(x,y) & R(y,x)) -> x=y)";

const PARITY_SENTENCE: &str = "forall n,n'. ((N(n) & N(n')) ->> exists v,v'. (\
    (n=one ->> v=one) & (n=end ->> v!=one) & \
    (E(n,n') ->> ((v=one ->> v'!=one) & (v!=one ->> v'=one))) & \
    forall z1,z2. (((v=one & Q(n,z1,z2)) | (v!=one & T(n,z1,z2))) ->> D:antisym(z1,z2)) & \
    forall w1,w2. (((v'=one & Q(n',w1,w2)) | (v'!=one & T(n',w1,w2))) ->> D:antisym(w1,w2)) & \
    (n=n' ->> v=v')))";

/// Domain `1, …, ℓ` followed by `p₁, q₁, …, p_ℓ, q_ℓ`. `N` holds the numbers,
/// `E` is the successor relation, `Q = {(i, pᵢ, qᵢ)}`, `T = {(i, qᵢ, pᵢ)}`,
/// and `one`, `end` name `1` and `ℓ`. The dependency is antisymmetry.
pub fn build_parity_instance(ell: usize) -> Result<ParityInstance, HarnessError> {
    if ell < 2 {
        return Err(HarnessError::ParityLength(ell));
    }
    let mut names: Vec<String> = (1..=ell).map(|i| i.to_string()).collect();
    for i in 1..=ell {
        names.push(format!("p{i}"));
        names.push(format!("q{i}"));
    }
    let mut m = Structure::from_labels(&names)?;
    let num = |i: usize| Element(i as u32 - 1);
    let p = |i: usize| Element((ell + 2 * (i - 1)) as u32);
    let q = |i: usize| Element((ell + 2 * (i - 1) + 1) as u32);

    m.set_relation("N", Relation::new(1, (1..=ell).map(|i| vec![num(i)]))?)?;
    m.set_relation("E", Relation::new(2, (1..ell).map(|i| vec![num(i), num(i + 1)]))?)?;
    m.set_relation("Q", Relation::new(3, (1..=ell).map(|i| vec![num(i), p(i), q(i)]))?)?;
    m.set_relation("T", Relation::new(3, (1..=ell).map(|i| vec![num(i), q(i), p(i)]))?)?;
    m.set_constant("one", num(1))?;
    m.set_constant("end", num(ell))?;

    let dependency = Dependency::first_order_text("antisym", 2, ANTISYMMETRY)?;
    let registry = Registry::new().with(dependency.clone());
    let ctx = registry.parse_context().with_constants(["one", "end"]);
    let formula = parse_formula(PARITY_SENTENCE, &ctx)?;
    Ok(ParityInstance { ell, structure: m, formula, dependency, registry })
}

/// A dependence logic sentence true in exactly the structures of even
/// cardinality: `y = f(x)` and `w = f(z)` for one fixed-point-free
/// involution `f`.
pub fn even_cardinality_sentence() -> Formula {
    parse_formula(
        "forall x. exists y. forall z. exists w. \
         (dep(x;y) & dep(z;w) & (x=z ->> y=w) & (y=z ->> w=x) & x!=y)",
        &ParseContext::default(),
    )
    .expect("fixed sentence parses")
}
