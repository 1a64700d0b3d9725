use std::collections::BTreeSet;
use std::fmt;

use super::{to_nnf, Expr, Formula, SyntaxError, Term, Var};

/// A literal of `η`: a positive `R` atom or an (in)equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ULiteral {
    Rel(Vec<Term>),
    Eq(Term, Term),
    Neq(Term, Term),
}

impl ULiteral {
    pub fn vars(&self) -> Vec<Var> {
        let ts: Vec<&Term> = match self {
            ULiteral::Rel(args) => args.iter().collect(),
            ULiteral::Eq(a, b) | ULiteral::Neq(a, b) => vec![a, b],
        };
        ts.into_iter().filter_map(Term::as_var).cloned().collect()
    }

    pub fn has_constants(&self) -> bool {
        let ts: Vec<&Term> = match self {
            ULiteral::Rel(args) => args.iter().collect(),
            ULiteral::Eq(a, b) | ULiteral::Neq(a, b) => vec![a, b],
        };
        ts.iter().any(|t| matches!(t, Term::Const(_)))
    }

    pub fn rename(&self, f: &dyn Fn(&Var) -> Var) -> ULiteral {
        let t = |t: &Term| match t {
            Term::Var(v) => Term::Var(f(v)),
            c => c.clone(),
        };
        match self {
            ULiteral::Rel(args) => ULiteral::Rel(args.iter().map(t).collect()),
            ULiteral::Eq(a, b) => ULiteral::Eq(t(a), t(b)),
            ULiteral::Neq(a, b) => ULiteral::Neq(t(a), t(b)),
        }
    }

    fn to_expr(&self, relation: &str) -> Expr {
        match self {
            ULiteral::Rel(args) => Expr::Rel(relation.to_string(), args.clone()),
            ULiteral::Eq(a, b) => Expr::Eq(a.clone(), b.clone()),
            ULiteral::Neq(a, b) => Expr::Neq(a.clone(), b.clone()),
        }
    }
}

/// `∃x̄(η(x̄) ∧ ∀ȳ(Rȳ → θ(x̄, ȳ)))` with `R` positive in `η` and absent from `θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct USentence {
    pub relation: String,
    pub exists: Vec<Var>,
    pub eta: Vec<ULiteral>,
    pub forall: Vec<Var>,
    /// First order, relation free.
    pub theta: Formula,
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

/// Matches `∀ȳ(R(ȳ) → θ)`.
fn universal_part(e: &Expr) -> Option<(Vec<Var>, String, Vec<Term>, &Expr)> {
    let mut vars = Vec::new();
    let mut cur = e;
    while let Expr::Forall(v, b) = cur {
        vars.push(v.clone());
        cur = b;
    }
    if vars.is_empty() {
        return None;
    }
    match cur {
        Expr::Implies(a, t) | Expr::Hook(a, t) => match &**a {
            Expr::Rel(name, args) => Some((vars, name.clone(), args.clone(), &**t)),
            _ => None,
        },
        _ => None,
    }
}

pub fn validate_usentence(e: &Expr) -> Result<USentence, SyntaxError> {
    let mut exists = Vec::new();
    let mut cur = e;
    while let Expr::Exists(v, b) = cur {
        exists.push(v.clone());
        cur = b;
    }
    let mut parts = Vec::new();
    conjuncts(cur, &mut parts);
    let universal: Vec<usize> = (0..parts.len()).filter(|i| universal_part(&parts[*i]).is_some()).collect();
    let idx = match universal.as_slice() {
        [i] => *i,
        [] => return Err(SyntaxError::invalid(cur, "expected a conjunct of the form forall y. (R(y) -> θ)")),
        _ => return Err(SyntaxError::invalid(cur, "more than one universal conjunct")),
    };
    let (forall, relation, args, theta_expr) = universal_part(&parts[idx]).expect("matched above");
    let expected: Vec<Term> = forall.iter().cloned().map(Term::Var).collect();
    if args != expected {
        return Err(SyntaxError::invalid(
            &parts[idx],
            "the guard atom must list the universal variables once each, in order",
        ));
    }
    let yset: BTreeSet<Var> = forall.iter().cloned().collect();
    if yset.len() != forall.len() {
        return Err(SyntaxError::invalid(&parts[idx], "repeated universal variable"));
    }
    let xset: BTreeSet<Var> = exists.iter().cloned().collect();
    if let Some(v) = xset.intersection(&yset).next() {
        return Err(SyntaxError::invalid(e, format!("variable `{v}` is both existential and universal")));
    }

    let mut eta = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        if i == idx {
            continue;
        }
        let lit = match p {
            Expr::Rel(name, a) if *name == relation && a.len() == forall.len() => ULiteral::Rel(a.clone()),
            Expr::Rel(name, _) if *name == relation => {
                return Err(SyntaxError::invalid(p, "relation used at a different arity"))
            }
            Expr::Rel(..) => return Err(SyntaxError::invalid(p, "relation symbol outside the signature")),
            Expr::Not(inner) if matches!(**inner, Expr::Rel(..)) => {
                return Err(SyntaxError::invalid(p, "the relation occurs negatively in η"))
            }
            Expr::Not(inner) => match &**inner {
                Expr::Eq(a, b) => ULiteral::Neq(a.clone(), b.clone()),
                Expr::Neq(a, b) => ULiteral::Eq(a.clone(), b.clone()),
                _ => return Err(SyntaxError::invalid(p, "η must be a conjunction of literals")),
            },
            Expr::Eq(a, b) => ULiteral::Eq(a.clone(), b.clone()),
            Expr::Neq(a, b) => ULiteral::Neq(a.clone(), b.clone()),
            _ => return Err(SyntaxError::invalid(p, "η must be a conjunction of literals")),
        };
        if let Some(v) = lit.vars().into_iter().find(|v| !xset.contains(v)) {
            return Err(SyntaxError::invalid(p, format!("variable `{v}` is not existentially bound")));
        }
        eta.push(lit);
    }

    if !theta_expr.is_first_order() {
        return Err(SyntaxError::invalid(theta_expr, "θ must be first order"));
    }
    if !theta_expr.relations().is_empty() {
        let reason = if theta_expr.relations().iter().any(|(n, _)| *n == relation) {
            "the relation occurs in θ"
        } else {
            "relation symbol outside the signature"
        };
        return Err(SyntaxError::invalid(theta_expr, reason));
    }
    let theta = to_nnf(theta_expr)?;
    if let Some(v) = theta.free_vars().into_iter().find(|v| !xset.contains(v) && !yset.contains(v)) {
        return Err(SyntaxError::invalid(theta_expr, format!("variable `{v}` is not bound")));
    }
    Ok(USentence { relation, exists, eta, forall, theta })
}

impl USentence {
    pub fn arity(&self) -> usize {
        self.forall.len()
    }

    pub fn has_constants(&self) -> bool {
        self.eta.iter().any(ULiteral::has_constants) || !self.theta.constants().is_empty()
    }

    pub fn to_expr(&self) -> Expr {
        let guard = Expr::Rel(self.relation.clone(), self.forall.iter().cloned().map(Term::Var).collect());
        let body = Expr::Implies(Box::new(guard), Box::new(Expr::from(&self.theta)));
        let universal = self.forall.iter().rev().fold(body, |b, v| Expr::Forall(v.clone(), Box::new(b)));
        let mut eta: Vec<Expr> = self.eta.iter().map(|l| l.to_expr(&self.relation)).collect();
        if eta.is_empty() {
            if let Some(x) = self.exists.first() {
                eta.push(Expr::Eq(Term::Var(x.clone()), Term::Var(x.clone())));
            }
        }
        let matrix = eta.into_iter().rev().fold(universal, |acc, l| Expr::And(Box::new(l), Box::new(acc)));
        let matrix = match matrix {
            // keep the conjunction left-associated like parsed text
            Expr::And(..) => {
                let mut items = Vec::new();
                conjuncts(&matrix, &mut items);
                items.into_iter().reduce(|a, b| Expr::And(Box::new(a), Box::new(b))).expect("nonempty")
            }
            other => other,
        };
        self.exists.iter().rev().fold(matrix, |b, v| Expr::Exists(v.clone(), Box::new(b)))
    }

    pub fn to_formula(&self) -> Formula {
        to_nnf(&self.to_expr()).expect("U-sentences are dependency free")
    }

    /// All variable names used, bound or free, including inside `θ`.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.exists.iter().chain(&self.forall).cloned().collect();
        out.extend(self.theta.all_vars());
        out
    }
}

impl fmt::Display for USentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}
