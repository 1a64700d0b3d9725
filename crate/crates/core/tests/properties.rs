use proptest::prelude::*;

use teamsem::dependencies::Registry;
use teamsem::structures::{tuples_over, Element, Relation, Structure, Team, Tuple};
use teamsem::syntax::{parse_formula, DepAtom, Formula, ParseContext, Term, Var};
use teamsem::teameval::{team_eval, team_eval_with, EvalOptions, Strategy as Mode};

const VARS: [&str; 3] = ["x", "y", "z"];

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(&VARS[..]).prop_map(Var::from)
}

fn vars(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Var>> {
    prop::collection::vec(var(), len)
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![4 => var().prop_map(Term::Var), 1 => Just(Term::Const("c".into()))]
}

fn fo_atom() -> BoxedStrategy<Formula> {
    prop_oneof![
        (any::<bool>(), term(), term()).prop_map(|(negated, a, b)| Formula::Rel {
            negated,
            name: "E".into(),
            args: vec![a, b]
        }),
        (term(), term()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (term(), term()).prop_map(|(a, b)| Formula::Neq(a, b)),
    ]
    .boxed()
}

fn downward_atom() -> BoxedStrategy<Formula> {
    prop_oneof![
        (vars(1..=2), vars(1..=1)).prop_map(|(l, r)| Formula::Atom(DepAtom::Dep(l, r))),
        vars(1..=2).prop_map(|v| Formula::Atom(DepAtom::Const(v))),
    ]
    .boxed()
}

fn union_atom() -> BoxedStrategy<Formula> {
    prop_oneof![
        (1..=2usize).prop_flat_map(|n| (vars(n..=n), vars(n..=n))).prop_map(|(l, r)| Formula::Atom(DepAtom::Inc(l, r))),
        (vars(1..=1), vars(1..=2)).prop_map(|(l, r)| Formula::Atom(DepAtom::Anon(l, r))),
        vars(1..=2).prop_map(|v| Formula::Atom(DepAtom::Ne(v))),
    ]
    .boxed()
}

fn any_atom() -> BoxedStrategy<Formula> {
    prop_oneof![
        downward_atom(),
        union_atom(),
        (vars(1..=1), vars(1..=2)).prop_map(|(l, r)| Formula::Atom(DepAtom::Ind(l, r))),
    ]
    .boxed()
}

fn first_order() -> BoxedStrategy<Formula> {
    fo_atom()
        .prop_recursive(2, 8, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (var(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
                (var(), inner).prop_map(|(v, b)| Formula::forall(v, b)),
            ]
        })
        .boxed()
}

/// Formulas over `atoms` and first order literals, closed under the
/// connectives that `global` allows.
fn formula(atoms: BoxedStrategy<Formula>, global: bool) -> BoxedStrategy<Formula> {
    prop_oneof![2 => fo_atom(), 3 => atoms]
        .prop_recursive(3, 12, 2, move |inner| {
            let mut cases = vec![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed(),
                (var(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)).boxed(),
                (var(), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)).boxed(),
                (first_order(), inner.clone()).prop_map(|(t, b)| Formula::hook(t, b)).boxed(),
            ];
            if global {
                cases.push((inner.clone(), inner).prop_map(|(a, b)| Formula::global_or(a, b)).boxed());
            }
            prop::strategy::Union::new(cases)
        })
        .boxed()
}

/// A structure of size 1..=3 with a binary `E` given by `mask` and `c`
/// naming the first element.
fn structure(n: usize, mask: u64) -> Structure {
    let mut m = Structure::with_size(n).unwrap();
    let tuples = tuples_over(m.domain(), 2);
    let e = tuples.iter().enumerate().filter(|(i, _)| *i < 64 && mask >> i & 1 == 1).map(|(_, t)| t.clone());
    m.set_relation("E", Relation::new(2, e.collect::<Vec<_>>()).unwrap()).unwrap();
    m.set_constant("c", Element(0)).unwrap();
    m
}

/// A team whose rows are the tuples at `picks`, taken modulo the number of
/// candidate rows. Teams stay small because lax disjunction is exponential
/// in the team size.
fn team(m: &Structure, names: &[&str], picks: &[usize]) -> Team {
    let rows = tuples_over(m.domain(), names.len());
    let chosen: Vec<Tuple> = picks.iter().map(|i| rows[i % rows.len()].clone()).collect();
    Team::new(names.iter().map(|v| Var::from(*v)).collect(), chosen).unwrap()
}

fn sub_team(x: &Team, mask: u64) -> Team {
    let rows: Vec<Tuple> =
        x.rows().iter().enumerate().filter(|(i, _)| *i < 64 && mask >> i & 1 == 1).map(|(_, r)| r.clone()).collect();
    Team::new(x.vars().to_vec(), rows).unwrap()
}

fn union(x: &Team, y: &Team) -> Team {
    Team::new(x.vars().to_vec(), x.rows().iter().chain(y.rows()).cloned().collect::<Vec<_>>()).unwrap()
}

fn eval(m: &Structure, x: &Team, f: &Formula) -> bool {
    team_eval(m, x, f, Mode::Optimized).unwrap()
}

fn picks() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..81usize, 0..=6)
}

fn instance() -> impl Strategy<Value = (usize, u64, Vec<usize>)> {
    (1..=3usize).prop_flat_map(|n| (Just(n), 0..1u64 << (n * n), picks()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1024))]

    #[test]
    fn print_then_parse_is_identity(f in formula(any_atom(), true)) {
        let ctx = ParseContext::default().with_constants(["c"]);
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text, &ctx).unwrap(), f, "{}", text);
    }

    #[test]
    fn downward_closed_fragment(f in formula(downward_atom(), true), (n, rel, rows) in instance(), keep in any::<u64>()) {
        let m = structure(n, rel);
        let x = team(&m, &VARS, &rows);
        let y = sub_team(&x, keep);
        prop_assert!(!eval(&m, &x, &f) || eval(&m, &y, &f), "{} fails on a subteam", f);
    }

    #[test]
    fn union_closed_fragment(f in formula(union_atom(), false), (n, rel, a) in instance(), b in picks()) {
        let m = structure(n, rel);
        let x = team(&m, &VARS, &a);
        let y = team(&m, &VARS, &b);
        prop_assert!(!(eval(&m, &x, &f) && eval(&m, &y, &f)) || eval(&m, &union(&x, &y), &f), "{} fails on a union", f);
    }

    #[test]
    fn empty_team_satisfies_ne_free_formulas(f in formula(prop_oneof![downward_atom(), union_atom()].boxed(), true), (n, rel, _) in instance()) {
        let m = structure(n, rel);
        let mut has_ne = false;
        f.visit(&mut |g| has_ne |= matches!(g, Formula::Atom(DepAtom::Ne(_))));
        if !has_ne {
            prop_assert!(eval(&m, &Team::empty(VARS.iter().map(|v| Var::from(*v)).collect()), &f), "{}", f);
        }
    }

    #[test]
    fn extra_columns_do_not_matter(f in formula(any_atom(), true), (n, rel, rows) in instance()) {
        let m = structure(n, rel);
        let wide = team(&m, &["x", "y", "z", "w"], &rows);
        let narrow = Team::new(
            VARS.iter().map(|v| Var::from(*v)).collect(),
            wide.rows().iter().map(|r| r[..3].to_vec()).collect::<Vec<_>>(),
        ).unwrap();
        prop_assert_eq!(eval(&m, &wide, &f), eval(&m, &narrow, &f), "{}", f);
    }

    #[test]
    fn strategies_agree(f in formula(any_atom(), true), (n, rel, rows) in instance()) {
        let m = structure(n, rel);
        let x = team(&m, &VARS, &rows);
        let r = Registry::new();
        let optimized = eval(&m, &x, &f);
        prop_assert_eq!(team_eval(&m, &x, &f, Mode::Memoized).unwrap(), optimized, "{}", f);
        let naive = EvalOptions::new(Mode::Naive).with_budget(Some(200_000));
        match team_eval_with(&m, &x, &f, &r, &naive) {
            Ok(v) => prop_assert_eq!(v, optimized, "{}", f),
            Err(e) if e.is_resource() => {}
            Err(e) => return Err(TestCaseError::fail(format!("{f}: {e}"))),
        }
    }
}
