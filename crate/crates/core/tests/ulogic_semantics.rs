use itertools::Itertools;
use proptest::prelude::*;

use teamsem::dependencies::{Dependency, Registry};
use teamsem::harness::enumerate_teams;
use teamsem::structures::{relation_from_mask, tuples_over, Element, RelModel, Relation, Structure, Team};
use teamsem::syntax::{parse_expr, parse_formula, validate_usentence, Formula, ParseContext, Term, USentence, Var};
use teamsem::tarski::tarski_sentence;
use teamsem::teameval::{team_eval, team_eval_with, EvalOptions, Strategy as Mode};
use teamsem::ulogic::{
    disjunction_translate, inline_dependency, u_embedding_check, usentence_translate, EmbeddingVerdict,
};

const EMPTY_CLASS: &str = "exists x. forall y. (R(y) -> y!=y)";
const NE: &str = "exists x. (R(x) & forall y. (R(y) -> y=y))";
const CONSTANCY: &str = "exists x. forall y. (R(y) -> y=x)";
const SINGLETON: &str = "exists x. (R(x) & forall y. (R(y) -> y=x))";
const AT_MOST_TWO: &str = "exists x1,x2. forall y. (R(y) -> (y=x1 | y=x2))";
const REFLEXIVE_DIAGONAL: &str = "exists x. (R(x,x) & forall y1,y2. (R(y1,y2) -> y1=y2))";

fn u(text: &str) -> USentence {
    validate_usentence(&parse_expr(text, &ParseContext::default()).unwrap()).unwrap()
}

/// Every pure set of size 1..=3 with every team over `y`.
fn unary_teams() -> Vec<(Structure, Team)> {
    let y = [Var::from("y")];
    (1..=3)
        .flat_map(|n| {
            let m = Structure::with_size(n).unwrap();
            enumerate_teams(&m, &y).unwrap().into_iter().map(move |x| (m.clone(), x))
        })
        .collect()
}

fn holds(m: &Structure, x: &Team, f: &Formula) -> bool {
    team_eval(m, x, f, Mode::Optimized).unwrap()
}

#[test]
fn empty_class_or_ne_is_valid() {
    let f = disjunction_translate(&[u(EMPTY_CLASS), u(NE)]).unwrap();
    for (m, x) in unary_teams() {
        assert!(holds(&m, &x, &f), "fails on {x:?}");
    }
}

#[test]
fn constancy_or_singleton_is_at_most_one_value() {
    let f = disjunction_translate(&[u(CONSTANCY), u(SINGLETON)]).unwrap();
    let reference = parse_formula("const(y) <|> (const(y) & ne(y))", &ParseContext::default()).unwrap();
    for (m, x) in unary_teams() {
        let expected = x.len() <= 1;
        assert_eq!(holds(&m, &x, &f), expected, "{x:?}");
        assert_eq!(holds(&m, &x, &reference), expected, "{x:?}");
    }
}

#[test]
fn constancy_translation_is_const() {
    let f = usentence_translate(&u(CONSTANCY)).unwrap();
    for (m, x) in unary_teams() {
        assert_eq!(holds(&m, &x, &f), x.len() <= 1, "{x:?}");
    }
}

#[test]
fn singleton_translation_on_teams() {
    let f = usentence_translate(&u(SINGLETON)).unwrap();
    for (m, x) in unary_teams() {
        assert_eq!(holds(&m, &x, &f), x.len() == 1, "{x:?}");
    }
}

const UNARY_HOSTS: [&str; 5] = [
    "D:u(x)",
    "exists z. (D:u(z) & z!=x)",
    "forall z. (D:u(z) | D:u(x))",
    "x!=z ->> D:u(x)",
    "D:u(x) <|> (D:u(z) & x=z)",
];

const BINARY_HOSTS: [&str; 3] = ["D:u(x,z)", "exists w. D:u(x,w)", "D:u(z,z) | D:u(x,x)"];

#[test]
fn inlined_translation_matches_registered_dependency() {
    let vars = [Var::from("x"), Var::from("z")];
    let cases = [EMPTY_CLASS, NE, CONSTANCY, SINGLETON, AT_MOST_TWO]
        .map(|t| (t, &UNARY_HOSTS[..]))
        .into_iter()
        .chain([(REFLEXIVE_DIAGONAL, &BINARY_HOSTS[..])]);
    for (text, hosts) in cases {
        let s = u(text);
        let d = Dependency::first_order("u", s.arity(), "R", s.to_formula()).unwrap();
        let registry = Registry::new().with(d);
        let empty = Registry::new();
        let opts = EvalOptions::new(Mode::Optimized);
        for host_text in hosts {
            let host = parse_formula(host_text, &registry.parse_context()).unwrap();
            let inlined = inline_dependency(&host, "u", &s).unwrap();
            assert!(!inlined.to_string().contains("D:"), "{inlined}");
            for n in 1..=3 {
                let m = Structure::with_size(n).unwrap();
                for x in enumerate_teams(&m, &vars).unwrap() {
                    let direct = team_eval_with(&m, &x, &host, &registry, &opts).unwrap();
                    let compiled = team_eval_with(&m, &x, &inlined, &empty, &opts).unwrap();
                    assert_eq!(direct, compiled, "{text} in {host_text} on {x:?} (|M| = {n})");
                }
            }
        }
    }
}

#[test]
fn translation_matches_tarski_on_every_relation() {
    for text in [EMPTY_CLASS, NE, CONSTANCY, SINGLETON, AT_MOST_TWO] {
        let s = u(text);
        let f = usentence_translate(&s).unwrap();
        for (m, x) in unary_teams() {
            let mut with_r = m.clone();
            let tuples: Vec<_> = x.rows().iter().cloned().collect();
            with_r.set_relation("R", Relation::new(1, tuples).unwrap()).unwrap();
            let tarski = tarski_sentence(&with_r, &s.to_formula()).unwrap();
            // The compiled formula only departs from Tarski on ∅ when η has no R atom
            // and is unsatisfiable; none of these sentences has that shape.
            assert_eq!(holds(&m, &x, &f), tarski, "{text} on {x:?}");
        }
    }
}

fn term_for(i: usize, arity: usize) -> Term {
    if i < arity {
        Term::var(&format!("y{}", i + 1))
    } else {
        Term::Const(format!("p{}", i - arity))
    }
}

/// `⋁_{r ∈ R}` of the identity type of `r` followed by all of `A`, written
/// over `ȳ` and the constants `p0, p1, ...`.
fn realized_types(a: &RelModel) -> Formula {
    let arity = a.arity();
    let params: Vec<Element> = a.domain.iter().copied().collect();
    let disjuncts = a.relation.tuples().iter().map(|r| {
        let full: Vec<Element> = r.iter().chain(&params).copied().collect();
        let atoms = (0..full.len()).tuple_combinations().map(|(i, j)| {
            let (s, t) = (term_for(i, arity), term_for(j, arity));
            if full[i] == full[j] {
                Formula::Eq(s, t)
            } else {
                Formula::Neq(s, t)
            }
        });
        Formula::conjunction(atoms).unwrap_or_else(|| Formula::Eq(term_for(0, arity), term_for(0, arity)))
    });
    disjuncts.reduce(Formula::or).unwrap_or_else(|| Formula::Neq(term_for(0, arity), term_for(0, arity)))
}

/// `∀ȳ(Rȳ → θ)` evaluated in `(A, R)` with `p_i` naming the `i`-th element of `params`.
fn transfers(model: &RelModel, params: usize, theta: &Formula) -> bool {
    let mut m = Structure::new(model.domain.iter().copied()).unwrap();
    for i in 0..params {
        m.set_constant(format!("p{i}"), Element(i as u32)).unwrap();
    }
    m.set_relation("R", model.relation.clone()).unwrap();
    let ys: Vec<Var> = (1..=model.arity()).map(|i| Var::from(format!("y{i}"))).collect();
    let guard = Formula::Rel { negated: true, name: "R".into(), args: ys.iter().cloned().map(Term::Var).collect() };
    tarski_sentence(&m, &Formula::forall_all(&ys, Formula::or(guard, theta.clone()))).unwrap()
}

/// All `(A, R) ⊆ (B, S)` with `A = {0..m}` an initial segment of `B = {0..n}`.
fn embeddings(max: usize, arity: usize) -> Vec<(RelModel, RelModel)> {
    let mut out = Vec::new();
    for n in 1..=max {
        let b: Vec<Element> = (0..n as u32).map(Element).collect();
        let tuples = tuples_over(&b, arity);
        for mask in 0..1u64 << tuples.len() {
            let s = relation_from_mask(arity, &tuples, mask);
            for m in 1..=n {
                let a: std::collections::BTreeSet<Element> = b[..m].iter().copied().collect();
                let sub = RelModel::new(a.iter().copied(), s.restrict_to(&a)).unwrap();
                out.push((sub, RelModel::new(b.iter().copied(), s.clone()).unwrap()));
            }
        }
    }
    out
}

#[test]
fn embedding_failure_is_witnessed_by_the_realized_types() {
    for (arity, max) in [(1, 3), (2, 2)] {
        for (a, b) in embeddings(max, arity) {
            let theta = realized_types(&a);
            let params = a.domain.len();
            assert!(transfers(&a, params, &theta));
            let fails = matches!(u_embedding_check(&a, &b).unwrap(), EmbeddingVerdict::Fails(_));
            assert_eq!(fails, !transfers(&b, params, &theta), "{a:?} into {b:?}");
        }
    }
}

/// A `(universal?, variable)` quantifier prefix and a DNF matrix of
/// `(equal?, term, term)` literals.
type ThetaShape = (Vec<(bool, usize)>, Vec<Vec<(bool, usize, usize)>>);

/// Prenex formulas of quantifier rank ≤ 2 over equality, with term indices
/// resolved against the variables and parameters actually available.
fn theta() -> impl Strategy<Value = ThetaShape> {
    let prefix = prop::collection::vec((any::<bool>(), 0..2usize), 0..=2);
    let literal = (any::<bool>(), 0..8usize, 0..8usize);
    let matrix = prop::collection::vec(prop::collection::vec(literal, 1..=3), 1..=3);
    (prefix, matrix)
}

fn build_theta(prefix: &[(bool, usize)], matrix: &[Vec<(bool, usize, usize)>], arity: usize, params: usize) -> Formula {
    let bound: Vec<&str> = prefix.iter().map(|(_, v)| ["z", "w"][*v]).collect();
    let pool: Vec<Term> = (1..=arity)
        .map(|i| Term::var(&format!("y{i}")))
        .chain(bound.iter().map(|v| Term::var(v)))
        .chain((0..params).map(|i| Term::Const(format!("p{i}"))))
        .collect();
    let term = |i: usize| pool[i % pool.len()].clone();
    let clause = |lits: &Vec<(bool, usize, usize)>| {
        lits.iter()
            .map(|(eq, s, t)| if *eq { Formula::Eq(term(*s), term(*t)) } else { Formula::Neq(term(*s), term(*t)) })
            .reduce(Formula::and)
            .unwrap()
    };
    let body = matrix.iter().map(clause).reduce(Formula::or).unwrap();
    prefix.iter().rev().fold(body, |f, (universal, v)| {
        let v = Var::from(["z", "w"][*v]);
        if *universal {
            Formula::forall(v, f)
        } else {
            Formula::exists(v, f)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Quantified `θ` are only sampled when `A = B`. Over a finite `A ⊊ B`
    /// they can count the domain; see `quantifiers_see_the_larger_domain`.
    #[test]
    fn holding_embeddings_transfer_sampled_formulas(
        (arity, pick) in (1..=2usize, 0..1000usize),
        (prefix, matrix) in theta(),
    ) {
        let all = embeddings(if arity == 1 { 3 } else { 2 }, arity);
        let (a, b) = &all[pick % all.len()];
        if u_embedding_check(a, b).unwrap() == EmbeddingVerdict::Holds {
            let prefix = if a.domain == b.domain { &prefix[..] } else { &[] };
            let f = build_theta(prefix, &matrix, arity, a.domain.len());
            prop_assert!(!transfers(a, a.domain.len(), &f) || transfers(b, a.domain.len(), &f), "{} from {:?} to {:?}", f, a, b);
        }
    }
}

#[test]
fn quantifiers_see_the_larger_domain() {
    let a = RelModel::new([Element(0)], Relation::new(1, vec![vec![Element(0)]]).unwrap()).unwrap();
    let b = RelModel::new((0..3).map(Element), a.relation.clone()).unwrap();
    assert_eq!(u_embedding_check(&a, &b).unwrap(), EmbeddingVerdict::Holds);
    let everything_is_p0 = Formula::forall(Var::from("z"), Formula::Eq(Term::Const("p0".into()), Term::var("z")));
    assert!(transfers(&a, 1, &everything_is_p0));
    assert!(!transfers(&b, 1, &everything_is_p0));
}
