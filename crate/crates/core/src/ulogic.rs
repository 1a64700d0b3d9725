//! U-sentences `∃x̄(η(x̄) ∧ ∀ȳ(Rȳ → θ(x̄, ȳ)))`: closure under conjunction,
//! compilation into team formulas over constancy and nonemptiness atoms, and
//! the finite embedding check.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::structures::{identity_type_of, RelModel, StructureError, Tuple};
use crate::syntax::{fresh_var, DepAtom, Formula, Term, ULiteral, USentence, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ULogicError {
    #[error("relation arities differ: {0} and {1}")]
    ArityMismatch(usize, usize),
    #[error("relation symbols differ: `{0}` and `{1}`")]
    RelationMismatch(String, String),
    #[error("constant symbols cannot be translated: {0}")]
    Constants(String),
    #[error("no sentences given")]
    Empty,
    #[error("dependency atom `{0}` has {1} arguments, the sentence has arity {2}")]
    AtomArity(String, usize, usize),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Renames every variable of `u`: the universal ones to `target`, the rest to
/// names outside `avoid`. Bound variables inside `θ` are renamed as well, so
/// nothing in the result can capture a variable of `target`.
fn rename_apart(u: &USentence, target: &[Var], avoid: &BTreeSet<Var>) -> USentence {
    let mut used: BTreeSet<Var> = avoid.iter().chain(target).chain(&u.all_vars()).cloned().collect();
    let mut map: BTreeMap<Var, Var> = u.forall.iter().cloned().zip(target.iter().cloned()).collect();
    for v in u.all_vars() {
        if !map.contains_key(&v) {
            let base = v.as_str().trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
            let base = if base.is_empty() { "v" } else { base };
            map.insert(v.clone(), fresh_var(base, &mut used));
        }
    }
    let f = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
    USentence {
        relation: u.relation.clone(),
        exists: u.exists.iter().map(f).collect(),
        eta: u.eta.iter().map(|l| l.rename(&f)).collect(),
        forall: target.to_vec(),
        theta: u.theta.rename_all(&f),
    }
}

fn check_compatible(a: &USentence, b: &USentence) -> Result<(), ULogicError> {
    if a.arity() != b.arity() {
        return Err(ULogicError::ArityMismatch(a.arity(), b.arity()));
    }
    if a.relation != b.relation {
        return Err(ULogicError::RelationMismatch(a.relation.clone(), b.relation.clone()));
    }
    Ok(())
}

/// `∃x̄z̄((η(x̄) ∧ η′(z̄)) ∧ ∀ȳ(Rȳ → (θ(x̄, ȳ) ∧ θ′(z̄, ȳ))))`, with `ψ` renamed
/// apart from `φ` and its universal variables identified with `φ`'s.
pub fn usentence_conjoin(phi: &USentence, psi: &USentence) -> Result<USentence, ULogicError> {
    check_compatible(phi, psi)?;
    let psi = rename_apart(psi, &phi.forall, &phi.all_vars());
    Ok(USentence {
        relation: phi.relation.clone(),
        exists: phi.exists.iter().chain(&psi.exists).cloned().collect(),
        eta: phi.eta.iter().chain(&psi.eta).cloned().collect(),
        forall: phi.forall.clone(),
        theta: Formula::and(phi.theta.clone(), psi.theta),
    })
}

fn eq_all(a: &[Term], b: &[Term]) -> Formula {
    Formula::conjunction(a.iter().zip(b).map(|(x, y)| Formula::Eq(x.clone(), y.clone()))).expect("nonempty tuple")
}

/// `φ′(ȳ) = ∃x̄(const(x̄) ∧ η′(x̄) ∧ θ(x̄, ȳ))`, where `η′` replaces each
/// `R(z̄)` by `z̄ = z̄ ∨ (ne(z̄) ∧ z̄ = ȳ)`. A team `X` over `ȳ` satisfies
/// `φ′` exactly when `(M, X(ȳ))` satisfies `φ`, except that on the empty team
/// `φ′` holds whenever `η` has no relational literal.
pub fn usentence_translate(u: &USentence) -> Result<Formula, ULogicError> {
    if u.has_constants() {
        let mut names: BTreeSet<String> = u.theta.constants();
        for l in &u.eta {
            if let ULiteral::Eq(a, b) | ULiteral::Neq(a, b) = l {
                names.extend([a, b].into_iter().filter_map(|t| match t {
                    Term::Const(c) => Some(c.clone()),
                    Term::Var(_) => None,
                }));
            }
        }
        return Err(ULogicError::Constants(names.into_iter().collect::<Vec<_>>().join(", ")));
    }
    let ys: Vec<Term> = u.forall.iter().cloned().map(Term::Var).collect();
    let mut parts = Vec::new();
    if !u.exists.is_empty() {
        parts.push(Formula::Atom(DepAtom::Const(u.exists.clone())));
    }
    for l in &u.eta {
        parts.push(match l {
            ULiteral::Rel(z) => {
                let zvars: Vec<Var> = z.iter().filter_map(Term::as_var).cloned().collect();
                Formula::or(eq_all(z, z), Formula::and(Formula::Atom(DepAtom::Ne(zvars)), eq_all(z, &ys)))
            }
            ULiteral::Eq(a, b) => Formula::Eq(a.clone(), b.clone()),
            ULiteral::Neq(a, b) => Formula::Neq(a.clone(), b.clone()),
        });
    }
    parts.push(u.theta.clone());
    let body = Formula::conjunction(parts).expect("θ is always present");
    Ok(Formula::exists_all(&u.exists, body))
}

/// `⊔ᵢ φᵢ′(ȳ)` over a common `ȳ`, taken from the first sentence.
pub fn disjunction_translate(us: &[USentence]) -> Result<Formula, ULogicError> {
    let first = us.first().ok_or(ULogicError::Empty)?;
    let mut out = Vec::new();
    for u in us {
        check_compatible(first, u)?;
        let u = if u.forall == first.forall { u.clone() } else { rename_apart(u, &first.forall, &BTreeSet::new()) };
        out.push(usentence_translate(&u)?);
    }
    Ok(Formula::global_disjunction(out).expect("nonempty"))
}

/// Replaces every atom `D:name(v̄)` in `host` by the translation of `u` at
/// `v̄`, renaming the translation's bound variables away from `host`.
pub fn inline_dependency(host: &Formula, name: &str, u: &USentence) -> Result<Formula, ULogicError> {
    let avoid = host.all_vars();
    let mut err = None;
    let out = replace_atoms(host, &mut |atom| match atom {
        DepAtom::Named(n, vars) if n == name => {
            if vars.len() != u.arity() {
                err = Some(ULogicError::AtomArity(n.clone(), vars.len(), u.arity()));
                return None;
            }
            // fresh universal names first, so that repeated arguments are fine
            let mut used = avoid.clone();
            let ys: Vec<Var> = u.forall.iter().map(|y| fresh_var(y.as_str(), &mut used)).collect();
            let apart = rename_apart(u, &ys, &used);
            let compiled = match usentence_translate(&apart) {
                Ok(f) => f,
                Err(e) => {
                    err = Some(e);
                    return None;
                }
            };
            let sub: BTreeMap<Var, Var> = ys.into_iter().zip(vars.iter().cloned()).collect();
            Some(compiled.rename_free(&|v| sub.get(v).cloned()))
        }
        _ => None,
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn replace_atoms(f: &Formula, r: &mut dyn FnMut(&DepAtom) -> Option<Formula>) -> Formula {
    match f {
        Formula::Atom(a) => r(a).unwrap_or_else(|| f.clone()),
        Formula::And(a, b) => Formula::and(replace_atoms(a, r), replace_atoms(b, r)),
        Formula::Or(a, b) => Formula::or(replace_atoms(a, r), replace_atoms(b, r)),
        Formula::GlobalOr(a, b) => Formula::global_or(replace_atoms(a, r), replace_atoms(b, r)),
        Formula::Hook(a, b) => Formula::hook((**a).clone(), replace_atoms(b, r)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), replace_atoms(b, r)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), replace_atoms(b, r)),
        _ => f.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbeddingVerdict {
    Holds,
    /// A tuple of `S` whose equality pattern relative to all of `A` is not
    /// realized in `R`.
    Fails(Tuple),
}

/// Decides whether `(A, R) → (B, S)` is a U-embedding: a substructure such
/// that every `∀ȳ(Rȳ → θ(ȳ, ā))` true in `(A, R)` stays true in `(B, S)`,
/// for `θ` over the empty signature. Such `θ` only see equality patterns, and
/// the most demanding parameter tuple lists all of `A`, so it suffices that
/// every `b̄ ∈ S` shares its identity type relative to `A` with some `r̄ ∈ R`.
pub fn u_embedding_check(sub: &RelModel, sup: &RelModel) -> Result<EmbeddingVerdict, ULogicError> {
    sub.substructure_of(sup)?;
    let params: Tuple = sub.domain.iter().copied().collect();
    let with_params = |t: &Tuple| -> Tuple { t.iter().chain(&params).copied().collect() };
    let realized: BTreeSet<_> =
        sub.relation.tuples().iter().map(|r| identity_type_of(&with_params(r))).collect::<Result<_, _>>()?;
    for b in sup.relation.tuples() {
        if !realized.contains(&identity_type_of(&with_params(b))?) {
            return Ok(EmbeddingVerdict::Fails(b.clone()));
        }
    }
    Ok(EmbeddingVerdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{Element, Relation, Structure, Team};
    use crate::syntax::{parse_expr, validate_usentence, ParseContext};
    use crate::tarski::tarski_sentence;
    use crate::teameval::{team_eval, Strategy};

    fn u(s: &str) -> USentence {
        validate_usentence(&parse_expr(s, &ParseContext::default()).unwrap()).unwrap()
    }

    fn e(i: u32) -> Element {
        Element(i)
    }

    fn rel(k: usize, ts: &[&[u32]]) -> Relation {
        Relation::new(k, ts.iter().map(|t| t.iter().map(|i| e(*i)).collect())).unwrap()
    }

    fn model(dom: &[u32], r: Relation) -> RelModel {
        RelModel::new(dom.iter().map(|i| e(*i)), r).unwrap()
    }

    #[test]
    fn singleton_translation_text() {
        let f = usentence_translate(&u("exists x. (R(x) & forall y. (R(y) -> y=x))")).unwrap();
        assert_eq!(f.to_string(), "exists x. (const(x) & (x=x | (ne(x) & x=y)) & y=x)");
        let c = usentence_translate(&u("exists x. forall y. (R(y) -> y=x)")).unwrap();
        assert_eq!(c.to_string(), "exists x. (const(x) & y=x)");
    }

    #[test]
    fn singleton_translation_teams() {
        let f = usentence_translate(&u("exists x. (R(x) & forall y. (R(y) -> y=x))")).unwrap();
        let m = Structure::with_size(2).unwrap();
        let y = || vec![Var::from("y")];
        let t = |rows: &[u32]| Team::new(y(), rows.iter().map(|i| vec![e(*i)])).unwrap();
        assert!(team_eval(&m, &t(&[0]), &f, Strategy::Optimized).unwrap());
        assert!(!team_eval(&m, &t(&[0, 1]), &f, Strategy::Optimized).unwrap());
        assert!(!team_eval(&m, &t(&[]), &f, Strategy::Optimized).unwrap());
    }

    #[test]
    fn constants_are_rejected() {
        let ctx = ParseContext::default().with_constants(["c"]);
        let s = validate_usentence(&parse_expr("exists x. (x=c & forall y. (R(y) -> y=x))", &ctx).unwrap()).unwrap();
        assert_eq!(usentence_translate(&s), Err(ULogicError::Constants("c".into())));
    }

    #[test]
    fn conjoin_renames_apart() {
        let a = u("exists x. (R(x) & forall y. (R(y) -> y=x))");
        let b = u("exists x. forall z. (R(z) -> exists y. z=x & y=y)");
        let c = usentence_conjoin(&a, &b).unwrap();
        assert_eq!(c.forall, a.forall);
        assert_eq!(c.exists.len(), 2);
        assert_ne!(c.exists[0], c.exists[1]);
        assert_eq!(c.to_string(), "exists x,x_1. (R(x) & forall y. (R(y) -> (y=x & exists y_1. (y=x_1 & y_1=y_1))))");
        let d = u("forall y1,y2. (R(y1,y2) -> y1=y2)");
        assert_eq!(usentence_conjoin(&a, &d), Err(ULogicError::ArityMismatch(1, 2)));
    }

    #[test]
    fn conjoin_with_neutral_element() {
        let a = u("exists x. (R(x) & forall y. (R(y) -> y=x))");
        let top = u("exists x. (x=x & forall y. (R(y) -> y=y))");
        let c = usentence_conjoin(&a, &top).unwrap();
        for n in 1..=3 {
            let m = Structure::with_size(n).unwrap();
            let dom: Vec<Element> = m.domain().to_vec();
            let tuples = crate::structures::tuples_over(&dom, 1);
            for mask in 0..1u64 << tuples.len() {
                let mut s = m.clone();
                s.set_relation("R", crate::structures::relation_from_mask(1, &tuples, mask)).unwrap();
                assert_eq!(
                    tarski_sentence(&s, &a.to_formula()).unwrap(),
                    tarski_sentence(&s, &c.to_formula()).unwrap()
                );
            }
        }
    }

    #[test]
    fn disjunction_compiler() {
        let a = u("exists x. forall y. (R(y) -> y=x)");
        let b = u("exists z. (R(z) & forall w. (R(w) -> w=z))");
        let f = disjunction_translate(&[a.clone(), b]).unwrap();
        assert_eq!(f.free_vars(), [Var::from("y")].into_iter().collect());
        assert_eq!(disjunction_translate(std::slice::from_ref(&a)).unwrap(), usentence_translate(&a).unwrap());
        assert_eq!(disjunction_translate(&[]), Err(ULogicError::Empty));
    }

    #[test]
    fn inlining() {
        let ne = u("exists x. (R(x) & forall y. (R(y) -> y=y))");
        let host = crate::syntax::parse_formula(
            "exists y. (D:ne(y) & y=x)",
            &ParseContext::default().with_dependency("ne", 1),
        )
        .unwrap();
        let f = inline_dependency(&host, "ne", &ne).unwrap();
        assert_eq!(f.to_string(), "exists y. ((exists x_1. (const(x_1) & (x_1=x_1 | (ne(x_1) & x_1=y)) & y=y)) & y=x)");
    }

    #[test]
    fn embedding_examples() {
        let a = model(&[0, 1], rel(1, &[&[0]]));
        assert_eq!(u_embedding_check(&a, &a).unwrap(), EmbeddingVerdict::Holds);
        let b = model(&[0, 1, 2], rel(1, &[&[0], &[2]]));
        assert_eq!(u_embedding_check(&a, &b).unwrap(), EmbeddingVerdict::Fails(vec![e(2)]));
        let a2 = model(&[0, 1], rel(2, &[&[0, 1]]));
        let b2 = model(&[0, 1], rel(2, &[&[0, 1], &[1, 0]]));
        assert!(u_embedding_check(&a2, &b2).is_err());
        let not_sub = model(&[0], rel(1, &[]));
        assert!(u_embedding_check(&not_sub, &a).is_err());
    }
}
