use std::fs;
use std::path::Path;

use itertools::Itertools;

use teamsem::harness::{enumerate_instances, Bounds};
use teamsem::structures::{Structure, Team};
use teamsem::syntax::{parse_formula, ParseContext};
use teamsem::teameval::{team_eval, Strategy};

fn render(m: &Structure, x: &Team) -> String {
    let relations = m
        .relations()
        .iter()
        .map(|(name, r)| format!("{name}={{{}}}", r.tuples().iter().map(|t| m.format_tuple(t)).join(",")))
        .join(" ");
    let rows = x.rows().iter().map(|t| m.format_tuple(t)).join(",");
    let vars = x.vars().iter().join(",");
    format!("|M|={} {relations} X({vars})={{{rows}}}", m.size())
}

#[test]
fn instance_order_matches_golden_file() {
    let bounds = Bounds::new(2, 1, &["x", "y"]);
    let text: String = enumerate_instances(&bounds).unwrap().map(|(m, x)| render(&m, &x) + "\n").collect();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/instances_d2_a1_xy.txt");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap();
    assert_eq!(text, want);
    // 2 relations × 2 teams at |M| = 1, 4 relations × 16 teams at |M| = 2
    assert_eq!(text.lines().count(), 2 * 2 + 4 * 16);
}

fn has_derangement(n: usize) -> bool {
    (0..n).permutations(n).any(|p| p.iter().enumerate().all(|(i, j)| i != *j))
}

/// The sentence with hooks `(x=z ∧ y≠w) ↪ ⊥` and `(x≠z ∧ y=w) ↪ ⊥` makes
/// `w = f(z)` for one injective `f` without fixed points, a derangement, so
/// it is true at every size ≥ 2, odd sizes included.
#[test]
fn hooked_contradiction_sentence_defines_derangements() {
    let text = "forall x. exists y. forall z. exists w. \
                (dep(x;y) & dep(z;w) & ((x=z & y!=w) ->> x!=x) & ((x!=z & y=w) ->> x!=x) & x!=y)";
    let f = parse_formula(text, &ParseContext::default()).unwrap();
    for n in 1..=4 {
        let m = Structure::with_size(n).unwrap();
        let v = team_eval(&m, &Team::unit(), &f, Strategy::Optimized).unwrap();
        assert_eq!(v, has_derangement(n), "|M| = {n}");
    }
}
