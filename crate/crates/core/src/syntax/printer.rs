//! Printing in the parser's syntax. `parse(print(f)) == f` for every formula.
//!
//! Besides what precedence requires, conjunctions inside disjunctions and
//! hooks inside binary connectives are parenthesized, and a quantifier is
//! printed bare only where its scope would end anyway.

use std::fmt::{self, Display, Write};

use itertools::Itertools;

use super::{DepAtom, Expr, Formula, Term, Var};

fn list(vs: &[Var]) -> String {
    vs.iter().join(",")
}

impl Display for DepAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepAtom::Dep(l, r) => write!(f, "dep({};{})", list(l), list(r)),
            DepAtom::Const(v) => write!(f, "const({})", list(v)),
            DepAtom::Inc(l, r) => write!(f, "inc({};{})", list(l), list(r)),
            DepAtom::Ind(l, r) => write!(f, "ind({};{})", list(l), list(r)),
            DepAtom::Anon(l, r) => write!(f, "anon({};{})", list(l), list(r)),
            DepAtom::Ne(v) => write!(f, "ne({})", list(v)),
            DepAtom::Named(n, v) => write!(f, "D:{}({})", n, list(v)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Top,
    QuantBody,
    GOrLeft,
    GOrRight,
    OrLeft,
    OrRight,
    AndLeft,
    AndRight,
    HookLeft,
    HookRight,
    Negated,
}

/// `tail` is true when nothing follows `e` before the enclosing group closes,
/// which is when a quantifier may be printed without parentheses.
fn needs_parens(e: &Expr, pos: Pos, tail: bool) -> bool {
    use Pos::*;
    let quant = matches!(e, Expr::Exists(..) | Expr::Forall(..));
    let hook = matches!(e, Expr::Hook(..) | Expr::Implies(..));
    match e {
        Expr::Rel(..) | Expr::Eq(..) | Expr::Neq(..) | Expr::Atom(_) | Expr::Not(_) => false,
        _ if quant => !(tail && !matches!(pos, HookLeft | Negated)),
        _ if hook => !matches!(pos, Top | HookRight),
        Expr::GlobalOr(..) => !matches!(pos, Top | GOrLeft),
        Expr::Or(..) => !matches!(pos, Top | GOrLeft | GOrRight | OrLeft),
        Expr::And(..) => !matches!(pos, Top | GOrLeft | GOrRight | AndLeft),
        _ => unreachable!(),
    }
}

fn write_term(out: &mut String, t: &Term) {
    let _ = write!(out, "{t}");
}

fn write_expr(out: &mut String, e: &Expr, pos: Pos, tail: bool) {
    let paren = needs_parens(e, pos, tail);
    let tail = tail || paren;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Rel(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(out, a);
            }
            out.push(')');
        }
        Expr::Eq(a, b) => {
            write_term(out, a);
            out.push('=');
            write_term(out, b);
        }
        Expr::Neq(a, b) => {
            write_term(out, a);
            out.push_str("!=");
            write_term(out, b);
        }
        Expr::Atom(d) => {
            let _ = write!(out, "{d}");
        }
        Expr::Not(a) => {
            out.push('!');
            let bare = matches!(**a, Expr::Rel(..) | Expr::Not(_));
            if bare {
                write_expr(out, a, Pos::Negated, false);
            } else {
                out.push('(');
                write_expr(out, a, Pos::Top, true);
                out.push(')');
            }
        }
        Expr::GlobalOr(a, b) => {
            write_expr(out, a, Pos::GOrLeft, false);
            out.push_str(" <|> ");
            write_expr(out, b, Pos::GOrRight, tail);
        }
        Expr::Or(a, b) => {
            write_expr(out, a, Pos::OrLeft, false);
            out.push_str(" | ");
            write_expr(out, b, Pos::OrRight, tail);
        }
        Expr::And(a, b) => {
            write_expr(out, a, Pos::AndLeft, false);
            out.push_str(" & ");
            write_expr(out, b, Pos::AndRight, tail);
        }
        Expr::Hook(a, b) | Expr::Implies(a, b) => {
            if a.is_atomic() || matches!(**a, Expr::Not(_)) {
                write_expr(out, a, Pos::HookLeft, false);
            } else {
                out.push('(');
                write_expr(out, a, Pos::Top, true);
                out.push(')');
            }
            out.push_str(if matches!(e, Expr::Hook(..)) { " ->> " } else { " -> " });
            write_expr(out, b, Pos::HookRight, tail);
        }
        Expr::Exists(..) | Expr::Forall(..) => {
            let universal = matches!(e, Expr::Forall(..));
            let mut vars = Vec::new();
            let mut cur = e;
            while let (Expr::Exists(v, b), false) | (Expr::Forall(v, b), true) = (cur, universal) {
                vars.push(v.clone());
                cur = b;
            }
            out.push_str(if universal { "forall " } else { "exists " });
            out.push_str(&list(&vars));
            out.push_str(". ");
            let bare = cur.is_atomic() || matches!(cur, Expr::Not(_) | Expr::Exists(..) | Expr::Forall(..));
            if bare {
                write_expr(out, cur, Pos::QuantBody, tail);
            } else {
                out.push('(');
                write_expr(out, cur, Pos::Top, true);
                out.push(')');
            }
        }
    }
    if paren {
        out.push(')');
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, Pos::Top, true);
        f.write_str(&s)
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&Expr::from(self), f)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_expr, parse_formula, ParseContext};

    fn rt(s: &str) -> String {
        parse_formula(s, &ParseContext::default()).unwrap().to_string()
    }

    #[test]
    fn canonical_layout() {
        assert_eq!(rt("exists x.(R(x)&forall y.(R(y)->>y=x))"), "exists x. (R(x) & forall y. (R(y) ->> y=x))");
        assert_eq!(rt("forall x. forall y. exists z. E(x,z)"), "forall x,y. exists z. E(x,z)");
        assert_eq!(rt("a=b | c=d & e=f"), "a=b | (c=d & e=f)");
        assert_eq!(rt("a=b & (c=d & e=f)"), "a=b & (c=d & e=f)");
        assert_eq!(rt("(a=b ->> c=d) & e=f"), "(a=b ->> c=d) & e=f");
        assert_eq!(rt("a=b ->> c=d ->> e=f"), "a=b ->> c=d ->> e=f");
        assert_eq!(rt("(a=b ->> c=d) ->> e=f"), "(a=b ->> c=d) ->> e=f");
        assert_eq!(rt("dep(;w) & const(w) <|> !E(x,y)"), "dep(;w) & const(w) <|> !E(x,y)");
        assert_eq!(rt("(exists x. E(x,x)) & x=x"), "(exists x. E(x,x)) & x=x");
        assert_eq!(rt("x=x & exists x. E(x,x)"), "x=x & exists x. E(x,x)");
        assert_eq!(rt("(x=x & exists x. E(x,x)) | y=y"), "(x=x & exists x. E(x,x)) | y=y");
    }

    #[test]
    fn expr_layout() {
        let e = parse_expr("forall x,y,z. ((R(x,y) & R(x,z)) -> y=z)", &ParseContext::default()).unwrap();
        assert_eq!(e.to_string(), "forall x,y,z. ((R(x,y) & R(x,z)) -> y=z)");
        let e = parse_expr("!(x=y | !R(x))", &ParseContext::default()).unwrap();
        assert_eq!(e.to_string(), "!(x=y | !R(x))");
    }
}
