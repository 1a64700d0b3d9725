use std::collections::BTreeSet;
use std::fmt;

use super::{to_nnf, Expr, Formula, SyntaxError, Term, Var};

/// One disjunct `∃ȳ ψ(x̄, ȳ)` of a DED consequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedDisjunct {
    pub existential: Vec<Var>,
    /// Relational atoms and equalities.
    pub consequent: Vec<Expr>,
}

/// `∀x̄(φ(x̄) → ⋁ᵢ ∃ȳ⁽ⁱ⁾ ψᵢ(x̄, ȳ⁽ⁱ⁾))` over a single relation symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedSentence {
    /// The relation symbol and its arity; `None` for pure equality sentences.
    pub relation: Option<(String, usize)>,
    pub universal: Vec<Var>,
    pub antecedent: Vec<Expr>,
    pub disjuncts: Vec<DedDisjunct>,
}

fn conjuncts(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn disjuncts(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::Or(a, b) => {
            disjuncts(a, out);
            disjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn positive_atoms(e: &Expr) -> Result<Vec<Expr>, SyntaxError> {
    let mut items = Vec::new();
    conjuncts(e, &mut items);
    for a in &items {
        match a {
            Expr::Rel(_, args) => {
                if let Some(c) = args.iter().find(|t| matches!(t, Term::Const(_))) {
                    return Err(SyntaxError::invalid(a, format!("constant `{c}` outside the signature {{R}}")));
                }
            }
            Expr::Eq(x, y) => {
                if matches!(x, Term::Const(_)) || matches!(y, Term::Const(_)) {
                    return Err(SyntaxError::invalid(a, "constants are not allowed"));
                }
            }
            Expr::Neq(..) => return Err(SyntaxError::invalid(a, "inequalities are not allowed")),
            Expr::Not(_) => return Err(SyntaxError::invalid(a, "negations are not allowed")),
            Expr::Implies(..) | Expr::Hook(..) => {
                return Err(SyntaxError::invalid(a, "nested implications are not allowed"))
            }
            Expr::Atom(_) => return Err(SyntaxError::invalid(a, "dependency atoms are not allowed")),
            _ => return Err(SyntaxError::invalid(a, "expected a conjunction of relational and identity atoms")),
        }
    }
    Ok(items)
}

fn vars_of(atoms: &[Expr]) -> BTreeSet<Var> {
    atoms.iter().flat_map(|a| a.free_vars()).collect()
}

/// Checks that `e` has DED shape and decomposes it.
///
/// An implication-free body is read as a consequent with an empty
/// antecedent.
pub fn validate_ded(e: &Expr) -> Result<DedSentence, SyntaxError> {
    let mut universal = Vec::new();
    let mut cur = e;
    while let Expr::Forall(v, b) = cur {
        universal.push(v.clone());
        cur = b;
    }
    if universal.is_empty() {
        return Err(SyntaxError::invalid(e, "expected a universal prefix"));
    }
    let (ante, cons) = match cur {
        Expr::Implies(a, b) | Expr::Hook(a, b) => (Some(&**a), &**b),
        other => (None, other),
    };
    let antecedent = match ante {
        Some(a) => positive_atoms(a)?,
        None => Vec::new(),
    };
    let scope: BTreeSet<Var> = universal.iter().cloned().collect();
    if let Some(v) = vars_of(&antecedent).difference(&scope).next() {
        return Err(SyntaxError::invalid(e, format!("variable `{v}` is not bound")));
    }
    let mut parts = Vec::new();
    disjuncts(cons, &mut parts);
    let mut out = Vec::new();
    for part in &parts {
        let mut existential = Vec::new();
        let mut body = part;
        while let Expr::Exists(v, b) = body {
            existential.push(v.clone());
            body = b;
        }
        let consequent = positive_atoms(body)?;
        let mut local = scope.clone();
        local.extend(existential.iter().cloned());
        if let Some(v) = vars_of(&consequent).difference(&local).next() {
            return Err(SyntaxError::invalid(part, format!("variable `{v}` is not bound")));
        }
        out.push(DedDisjunct { existential, consequent });
    }
    let rels: BTreeSet<(String, usize)> =
        antecedent.iter().chain(out.iter().flat_map(|d| d.consequent.iter())).flat_map(Expr::relations).collect();
    if rels.len() > 1 {
        let names: Vec<String> = rels.iter().map(|(n, k)| format!("{n}/{k}")).collect();
        return Err(SyntaxError::invalid(e, format!("more than one relation symbol: {}", names.join(", "))));
    }
    Ok(DedSentence { relation: rels.into_iter().next(), universal, antecedent, disjuncts: out })
}

fn conj(atoms: &[Expr]) -> Option<Expr> {
    atoms.iter().cloned().reduce(|a, b| Expr::And(Box::new(a), Box::new(b)))
}

impl DedSentence {
    pub fn to_expr(&self) -> Expr {
        let first = Term::Var(self.universal[0].clone());
        let ante = conj(&self.antecedent).unwrap_or_else(|| Expr::Eq(first.clone(), first));
        let cons = self
            .disjuncts
            .iter()
            .map(|d| {
                let body = conj(&d.consequent).expect("nonempty consequent");
                d.existential.iter().rev().fold(body, |b, v| Expr::Exists(v.clone(), Box::new(b)))
            })
            .reduce(|a, b| Expr::Or(Box::new(a), Box::new(b)))
            .expect("nonempty disjunction");
        let body = Expr::Implies(Box::new(ante), Box::new(cons));
        self.universal.iter().rev().fold(body, |b, v| Expr::Forall(v.clone(), Box::new(b)))
    }

    pub fn to_formula(&self) -> Formula {
        to_nnf(&self.to_expr()).expect("DEDs are dependency free")
    }
}

impl fmt::Display for DedSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, ParseContext};

    fn v(s: &str) -> Result<DedSentence, SyntaxError> {
        validate_ded(&parse_expr(s, &ParseContext::default()).unwrap())
    }

    #[test]
    fn functional_dependency() {
        let d = v("forall x,y,z. ((R(x,y) & R(x,z)) -> y=z)").unwrap();
        assert_eq!(d.universal.len(), 3);
        assert_eq!(d.disjuncts.len(), 1);
        assert!(d.disjuncts[0].existential.is_empty());
        assert_eq!(d.relation, Some(("R".into(), 2)));
        assert_eq!(d.to_string(), "forall x,y,z. ((R(x,y) & R(x,z)) -> y=z)");
    }

    #[test]
    fn non_emptiness() {
        let d = v("forall x. (x=x -> exists y1,y2. R(y1,y2))").unwrap();
        assert_eq!(d.disjuncts[0].existential.len(), 2);
    }

    #[test]
    fn rejected_shapes() {
        assert!(v("forall x,y. (R(x,y) -> exists z. !R(z,x))").is_err());
        assert!(v("forall x,y. (R(x,y) -> x!=y)").is_err());
        assert!(v("forall x,y. (R(x,y) -> (R(y,x) -> x=y))").is_err());
        assert!(v("forall x. (R(x) -> S(x))").is_err());
        assert!(v("exists x. R(x)").is_err());
        assert!(v("forall x. (R(x) -> R(y))").is_err());
    }

    #[test]
    fn disjunctive_consequent() {
        let d = v("forall x. (R(x,x) -> ((exists y. R(x,y)) | x=x))").unwrap();
        assert_eq!(d.disjuncts.len(), 2);
    }
}
