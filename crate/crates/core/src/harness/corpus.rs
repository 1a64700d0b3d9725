use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{DepAtom, Formula, Term, Var};

/// Parameters for [`formula_corpus`].
#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    /// Nesting depth of connectives and quantifiers; literals have depth 0.
    pub max_depth: usize,
    pub vars: Vec<Var>,
    /// A binary relation symbol.
    pub symbol: String,
    /// Allow builtin dependency atoms among the leaves.
    pub dependency_atoms: bool,
}

impl CorpusConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        CorpusConfig {
            seed,
            count,
            max_depth: 3,
            vars: vec![Var::from("x"), Var::from("y")],
            symbol: "E".into(),
            dependency_atoms: false,
        }
    }

    pub fn with_dependency_atoms(mut self) -> Self {
        self.dependency_atoms = true;
        self
    }
}

struct Gen<'a> {
    cfg: &'a CorpusConfig,
    rng: ChaCha8Rng,
}

impl Gen<'_> {
    fn var(&mut self) -> Var {
        self.cfg.vars.choose(&mut self.rng).expect("nonempty variable list").clone()
    }

    fn term(&mut self) -> Term {
        Term::Var(self.var())
    }

    fn leaf(&mut self) -> Formula {
        let kinds = if self.cfg.dependency_atoms { 5 } else { 3 };
        match self.rng.gen_range(0..kinds) {
            0 => Formula::Rel {
                negated: self.rng.gen(),
                name: self.cfg.symbol.clone(),
                args: vec![self.term(), self.term()],
            },
            1 => Formula::Eq(self.term(), self.term()),
            2 => Formula::Neq(self.term(), self.term()),
            _ => {
                let (a, b) = (self.var(), self.var());
                Formula::Atom(match self.rng.gen_range(0..6) {
                    0 => DepAtom::Dep(vec![a], vec![b]),
                    1 => DepAtom::Const(vec![a]),
                    2 => DepAtom::Inc(vec![a], vec![b]),
                    3 => DepAtom::Ind(vec![a], vec![b]),
                    4 => DepAtom::Anon(vec![a], vec![b]),
                    _ => DepAtom::Ne(vec![a]),
                })
            }
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.leaf();
        }
        match self.rng.gen_range(0..4) {
            0 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
            1 => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
            2 => Formula::exists(self.var(), self.formula(depth - 1)),
            _ => Formula::forall(self.var(), self.formula(depth - 1)),
        }
    }
}

/// Distinct negation normal form formulas over one binary relation, drawn
/// deterministically from `cfg.seed`. Returns fewer than `cfg.count` only if
/// the space is nearly exhausted.
pub fn formula_corpus(cfg: &CorpusConfig) -> Vec<Formula> {
    let mut g = Gen { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed) };
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(cfg.count);
    let mut attempts = 0;
    while out.len() < cfg.count && attempts < cfg.count * 1000 {
        attempts += 1;
        let f = g.formula(cfg.max_depth);
        if seen.insert(f.to_string()) {
            out.push(f);
        }
    }
    out
}
