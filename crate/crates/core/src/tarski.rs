//! Plain recursive first-order satisfaction over finite structures.
//!
//! Hooks read as material implication and `<|>` as classical disjunction,
//! which is what they mean on a single assignment.

use thiserror::Error;

use crate::structures::{Assignment, Element, Structure};
use crate::syntax::{Formula, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TarskiError {
    #[error("dependency atoms have no Tarskian meaning")]
    DependencyAtom,
    #[error("relation `{0}` is not interpreted")]
    UninterpretedRelation(String),
    #[error("constant `{0}` is not interpreted")]
    UninterpretedConstant(String),
    #[error("relation `{name}` has arity {expected}, used with {found} arguments")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("variable `{0}` is unassigned")]
    Unassigned(Var),
}

struct Env<'a> {
    base: &'a Assignment,
    stack: Vec<(Var, Element)>,
}

impl Env<'_> {
    fn lookup(&self, v: &Var) -> Option<Element> {
        self.stack.iter().rev().find(|(w, _)| w == v).map(|(_, e)| *e).or_else(|| self.base.get(v))
    }
}

fn term(m: &Structure, env: &Env, t: &Term) -> Result<Element, TarskiError> {
    match t {
        Term::Var(v) => env.lookup(v).ok_or_else(|| TarskiError::Unassigned(v.clone())),
        Term::Const(c) => m.constant(c).ok_or_else(|| TarskiError::UninterpretedConstant(c.clone())),
    }
}

fn eval(m: &Structure, env: &mut Env, f: &Formula) -> Result<bool, TarskiError> {
    Ok(match f {
        Formula::Rel { negated, name, args } => {
            let rel = m.relation(name).ok_or_else(|| TarskiError::UninterpretedRelation(name.clone()))?;
            if rel.arity() != args.len() {
                return Err(TarskiError::ArityMismatch {
                    name: name.clone(),
                    expected: rel.arity(),
                    found: args.len(),
                });
            }
            let tuple = args.iter().map(|t| term(m, env, t)).collect::<Result<Vec<_>, _>>()?;
            rel.contains(&tuple) != *negated
        }
        Formula::Eq(a, b) => term(m, env, a)? == term(m, env, b)?,
        Formula::Neq(a, b) => term(m, env, a)? != term(m, env, b)?,
        Formula::Atom(_) => return Err(TarskiError::DependencyAtom),
        Formula::And(a, b) => eval(m, env, a)? && eval(m, env, b)?,
        Formula::Or(a, b) | Formula::GlobalOr(a, b) => eval(m, env, a)? || eval(m, env, b)?,
        Formula::Hook(a, b) => !eval(m, env, a)? || eval(m, env, b)?,
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let universal = matches!(f, Formula::Forall(..));
            for e in m.domain() {
                env.stack.push((v.clone(), *e));
                let r = eval(m, env, b);
                env.stack.pop();
                if r? != universal {
                    return Ok(!universal);
                }
            }
            universal
        }
    })
}

/// `M ⊨_s φ` in the usual sense. Quantifiers range over the domain of `m`.
pub fn tarski_eval(m: &Structure, s: &Assignment, f: &Formula) -> Result<bool, TarskiError> {
    if f.has_dependency_atoms() {
        return Err(TarskiError::DependencyAtom);
    }
    eval(m, &mut Env { base: s, stack: Vec::new() }, f)
}

/// Evaluates a sentence under the empty assignment.
pub fn tarski_sentence(m: &Structure, f: &Formula) -> Result<bool, TarskiError> {
    tarski_eval(m, &Assignment::empty(), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{identity_type_of, Relation};
    use crate::syntax::{parse_formula, ParseContext};

    fn model() -> Structure {
        let mut m = Structure::from_labels(&["a", "b"]).unwrap();
        m.set_relation("E", Relation::new(2, [vec![Element(0), Element(1)]]).unwrap()).unwrap();
        m
    }

    fn p(s: &str) -> Formula {
        parse_formula(s, &ParseContext::default()).unwrap()
    }

    #[test]
    fn quantifier_examples() {
        let m = model();
        assert!(tarski_sentence(&m, &p("exists x,y. E(x,y)")).unwrap());
        assert!(!tarski_sentence(&m, &p("forall x. E(x,x)")).unwrap());
    }

    #[test]
    fn identity_type_pattern() {
        let m = Structure::with_size(3).unwrap();
        let vars = [Var::from("x1"), Var::from("x2"), Var::from("x3")];
        let tau = identity_type_of(&[Element(0), Element(0), Element(1)]).unwrap().to_formula(&vars);
        let s: Assignment = vars.iter().cloned().zip([Element(0), Element(0), Element(2)]).collect();
        assert!(tarski_eval(&m, &s, &tau).unwrap());
    }

    #[test]
    fn errors() {
        let m = model();
        assert_eq!(tarski_sentence(&m, &p("exists x. S(x)")), Err(TarskiError::UninterpretedRelation("S".into())));
        assert!(matches!(tarski_sentence(&m, &p("exists x. E(x)")), Err(TarskiError::ArityMismatch { .. })));
        assert_eq!(tarski_sentence(&m, &p("x=x")), Err(TarskiError::Unassigned(Var::from("x"))));
        assert_eq!(tarski_sentence(&m, &p("exists x. ne(x)")), Err(TarskiError::DependencyAtom));
        let c = parse_formula("exists x. x=c", &ParseContext::default().with_constants(["c"])).unwrap();
        assert_eq!(tarski_sentence(&m, &c), Err(TarskiError::UninterpretedConstant("c".into())));
    }

    #[test]
    fn sentences_ignore_the_assignment() {
        let m = model();
        let f = p("exists x. forall y. (E(x,y) | x=y)");
        let a = tarski_sentence(&m, &f).unwrap();
        for e in m.domain() {
            let s: Assignment = [(Var::from("x"), *e), (Var::from("y"), *e)].into_iter().collect();
            assert_eq!(tarski_eval(&m, &s, &f).unwrap(), a);
        }
    }
}
