use super::{Expr, Formula, SyntaxError};

/// Pushes negation down to relational atoms and equalities.
///
/// `a -> b` becomes `!a | b`; a negated hook `!(θ ->> φ)` becomes `θ & !φ`,
/// and a negated global disjunction becomes a conjunction, both of which are
/// the classical readings on first-order operands.
pub fn to_nnf(e: &Expr) -> Result<Formula, SyntaxError> {
    nnf(e, false)
}

fn nnf(e: &Expr, neg: bool) -> Result<Formula, SyntaxError> {
    let bin = |a: &Expr, b: &Expr, na: bool, nb: bool| -> Result<(Formula, Formula), SyntaxError> {
        Ok((nnf(a, na)?, nnf(b, nb)?))
    };
    Ok(match (e, neg) {
        (Expr::Rel(name, args), negated) => Formula::Rel { negated, name: name.clone(), args: args.clone() },
        (Expr::Eq(a, b), false) | (Expr::Neq(a, b), true) => Formula::Eq(a.clone(), b.clone()),
        (Expr::Neq(a, b), false) | (Expr::Eq(a, b), true) => Formula::Neq(a.clone(), b.clone()),
        (Expr::Atom(d), false) => Formula::Atom(d.clone()),
        (Expr::Atom(_), true) => return Err(SyntaxError::NegatedDependency),
        (Expr::Not(a), n) => {
            if !n && a.has_dependency_atoms() {
                return Err(SyntaxError::NegatedDependency);
            }
            nnf(a, !n)?
        }
        (Expr::And(a, b), false) | (Expr::Or(a, b), true) => {
            let (x, y) = bin(a, b, neg, neg)?;
            Formula::and(x, y)
        }
        (Expr::Or(a, b), false) | (Expr::And(a, b), true) => {
            let (x, y) = bin(a, b, neg, neg)?;
            Formula::or(x, y)
        }
        (Expr::GlobalOr(a, b), false) => {
            let (x, y) = bin(a, b, false, false)?;
            Formula::global_or(x, y)
        }
        (Expr::GlobalOr(a, b), true) => {
            let (x, y) = bin(a, b, true, true)?;
            Formula::and(x, y)
        }
        (Expr::Hook(a, b), false) => {
            let (x, y) = bin(a, b, false, false)?;
            Formula::hook(x, y)
        }
        (Expr::Hook(a, b), true) | (Expr::Implies(a, b), true) => {
            let (x, y) = bin(a, b, false, true)?;
            Formula::and(x, y)
        }
        (Expr::Implies(a, b), false) => {
            if a.has_dependency_atoms() {
                return Err(SyntaxError::NegatedDependency);
            }
            let (x, y) = bin(a, b, true, false)?;
            Formula::or(x, y)
        }
        (Expr::Exists(v, a), false) | (Expr::Forall(v, a), true) => Formula::exists(v.clone(), nnf(a, neg)?),
        (Expr::Forall(v, a), false) | (Expr::Exists(v, a), true) => Formula::forall(v.clone(), nnf(a, neg)?),
    })
}

/// Classical negation `θ′` of a dependency-free formula, in NNF.
pub fn negate(f: &Formula) -> Result<Formula, SyntaxError> {
    if f.has_dependency_atoms() {
        return Err(SyntaxError::NegatedDependency);
    }
    nnf(&Expr::from(f), true)
}

/// `θ ->> φ` rewritten as `θ′ | (θ & φ)`; applied to every hook, innermost
/// first.
pub fn desugar_hook(f: &Formula) -> Result<Formula, SyntaxError> {
    Ok(match f {
        Formula::Hook(theta, phi) => {
            let theta = desugar_hook(theta)?;
            let phi = desugar_hook(phi)?;
            Formula::or(negate(&theta)?, Formula::and(theta, phi))
        }
        Formula::And(a, b) => Formula::and(desugar_hook(a)?, desugar_hook(b)?),
        Formula::Or(a, b) => Formula::or(desugar_hook(a)?, desugar_hook(b)?),
        Formula::GlobalOr(a, b) => Formula::global_or(desugar_hook(a)?, desugar_hook(b)?),
        Formula::Exists(v, b) => Formula::exists(v.clone(), desugar_hook(b)?),
        Formula::Forall(v, b) => Formula::forall(v.clone(), desugar_hook(b)?),
        atom => atom.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_formula, ParseContext};

    fn n(s: &str) -> String {
        to_nnf(&parse_expr(s, &ParseContext::default()).unwrap()).unwrap().to_string()
    }

    #[test]
    fn de_morgan() {
        assert_eq!(n("!(R(x) & x=y)"), "!R(x) | x!=y");
        assert_eq!(n("!exists x. R(x)"), "forall x. !R(x)");
        assert_eq!(n("!!R(x)"), "R(x)");
        assert_eq!(n("!(x=y -> R(x))"), "x=y & !R(x)");
        assert_eq!(n("R(x) -> ne(x)"), "!R(x) | ne(x)");
    }

    #[test]
    fn desugared_hook() {
        let f = parse_formula("x=y ->> ne(x)", &ParseContext::default()).unwrap();
        assert_eq!(desugar_hook(&f).unwrap().to_string(), "x!=y | (x=y & ne(x))");
    }

    #[test]
    fn negation_requires_first_order() {
        let f = parse_formula("dep(x;y)", &ParseContext::default()).unwrap();
        assert_eq!(negate(&f), Err(SyntaxError::NegatedDependency));
    }
}
