//! The satisfaction relation over packed teams.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use super::compile::{Kind, Node, NodeId, Program, VarId};
use super::{EvalError, EvalOptions, Strategy};
use crate::dependencies::Registry;
use crate::structures::{Element, Relation, Structure, Team};
use crate::syntax::Formula;

/// A team as sorted, distinct packed rows over the variables in `vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Rows {
    pub vars: u64,
    pub rows: Vec<u64>,
}

impl Rows {
    fn normalize(mut self) -> Rows {
        self.rows.sort_unstable();
        self.rows.dedup();
        self
    }

    fn project(&self, keep_vars: u64, code_mask: u64) -> Rows {
        if self.vars & !keep_vars == 0 {
            return self.clone();
        }
        Rows { vars: self.vars & keep_vars, rows: self.rows.iter().map(|r| r & code_mask).collect() }.normalize()
    }

    fn select(&self, mask: u64) -> Rows {
        Rows {
            vars: self.vars,
            rows: self.rows.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| *r).collect(),
        }
    }
}

enum Cache {
    /// Indexed by the team's bit mask over the dense row space.
    Dense(Vec<u8>),
    Small(FxHashMap<u64, bool>),
    Sparse(FxHashMap<Vec<u64>, bool>),
}

/// A formula compiled against one structure, reusable across teams.
///
/// With the memoized and optimized strategies the cache persists across
/// calls to [`Session::eval`]; results depend only on the team.
pub struct Session<'a> {
    m: &'a Structure,
    registry: &'a Registry,
    opts: EvalOptions,
    prog: Program,
    caches: Vec<Cache>,
    domain: BTreeSet<Element>,
    steps: u64,
    symmetry: bool,
}

impl<'a> Session<'a> {
    pub fn new(m: &'a Structure, f: &Formula, registry: &'a Registry, opts: EvalOptions) -> Result<Self, EvalError> {
        let mut prog = Program::compile(m, f, registry)?;
        let symmetry = opts.symmetry.unwrap_or(opts.strategy == Strategy::Optimized);
        if symmetry {
            prog.analyse_symmetry(f);
        }
        let caches = prog
            .nodes
            .iter()
            .map(|node| match node.dense_rows {
                Some(r) if r <= 16 => Cache::Dense(vec![2; 1 << r]),
                Some(_) => Cache::Small(FxHashMap::default()),
                None => Cache::Sparse(FxHashMap::default()),
            })
            .collect();
        Ok(Session {
            m,
            registry,
            opts,
            prog,
            caches,
            domain: m.domain().iter().copied().collect(),
            steps: 0,
            symmetry,
        })
    }

    /// Evaluation steps taken so far, counted against the budget.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn reset_steps(&mut self) {
        self.steps = 0;
    }

    /// `M ⊨_X φ`. Variables of `x` that are not free in the formula are
    /// ignored.
    pub fn eval(&mut self, x: &Team) -> Result<bool, EvalError> {
        let root = self.prog.root;
        let free = self.prog.nodes[root as usize].free;
        let layout = &self.prog.layout;
        let mut cols = Vec::new();
        let mut have = 0u64;
        for (i, v) in x.vars().iter().enumerate() {
            if let Some(id) = layout.ids.get(v) {
                if free >> id & 1 == 1 {
                    cols.push((i, *id));
                    have |= 1 << id;
                }
            }
        }
        if have != free {
            let missing = (0..64).find(|i| free >> i & 1 == 1 && have >> i & 1 == 0).expect("missing variable");
            return Err(EvalError::UnboundVariable(layout.vars[missing as usize].clone()));
        }
        let mut rows = Vec::with_capacity(x.len());
        for row in x.rows() {
            let mut code = 0u64;
            for (i, id) in &cols {
                let e = self.m.domain().binary_search(&row[*i]).map_err(|_| EvalError::ForeignElement(row[*i]))?;
                code = layout.set(code, *id, e as u32);
            }
            rows.push(code);
        }
        let team = Rows { vars: free, rows }.normalize();
        self.sat(root, team)
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        match self.opts.budget {
            Some(limit) if self.steps > limit => Err(EvalError::Budget { limit }),
            _ => Ok(()),
        }
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.prog.nodes[id as usize]
    }

    fn dense_key(&self, node: &Node, rows: &[u64]) -> u64 {
        let digit = (1u64 << self.prog.layout.bits) - 1;
        rows.iter().fold(0u64, |acc, r| {
            let idx = node.key_digits.iter().fold(0u64, |i, (shift, w)| i + ((r >> shift) & digit) * w);
            acc | 1 << idx
        })
    }

    fn lookup(&mut self, id: NodeId, team: &Rows) -> (Option<bool>, u64) {
        let node = &self.prog.nodes[id as usize];
        let key = if node.dense_rows.is_some() { self.dense_key(node, &team.rows) } else { 0 };
        let hit = match &self.caches[id as usize] {
            Cache::Dense(v) => match v[key as usize] {
                2 => None,
                b => Some(b == 1),
            },
            Cache::Small(m) => m.get(&key).copied(),
            Cache::Sparse(m) => m.get(&team.rows).copied(),
        };
        (hit, key)
    }

    fn store(&mut self, id: NodeId, key: u64, team: Rows, value: bool) {
        match &mut self.caches[id as usize] {
            Cache::Dense(v) => v[key as usize] = value as u8,
            Cache::Small(m) => {
                m.insert(key, value);
            }
            Cache::Sparse(m) => {
                m.insert(team.rows, value);
            }
        }
    }

    pub(crate) fn sat(&mut self, id: NodeId, team: Rows) -> Result<bool, EvalError> {
        self.tick()?;
        if self.opts.strategy == Strategy::Naive {
            return self.rule(id, &team);
        }
        let node = self.node(id);
        let team = team.project(node.free, node.code_mask);
        let (hit, key) = self.lookup(id, &team);
        if let Some(b) = hit {
            return Ok(b);
        }
        let value = self.rule(id, &team)?;
        self.store(id, key, team, value);
        Ok(value)
    }

    fn rule(&mut self, id: NodeId, team: &Rows) -> Result<bool, EvalError> {
        let prog = &self.prog;
        let layout = &prog.layout;
        match &prog.nodes[id as usize].kind {
            Kind::Lit(f) => Ok(team.rows.iter().all(|r| f.eval(layout, &prog.rels, *r))),
            Kind::Builtin(k, args) => {
                let tuples: Vec<Vec<u32>> =
                    team.rows.iter().map(|r| args.iter().map(|v| layout.get(*r, *v)).collect()).collect();
                Ok(k.holds(tuples.iter().map(Vec::as_slice)))
            }
            Kind::Named(name, args) => {
                let d = self.registry.get(name).expect("checked at compile time");
                let dom = self.m.domain();
                let rel = Relation::new(
                    args.len(),
                    team.rows.iter().map(|r| args.iter().map(|v| dom[layout.get(*r, *v) as usize]).collect()),
                )?;
                Ok(d.holds(&self.domain, &rel)?)
            }
            Kind::And(a, b) => {
                let (a, b) = (*a, *b);
                Ok(self.sat(a, team.clone())? && self.sat(b, team.clone())?)
            }
            Kind::GlobalOr(a, b) => {
                let (a, b) = (*a, *b);
                Ok(self.sat(a, team.clone())? || self.sat(b, team.clone())?)
            }
            Kind::Hook(guard, b) => {
                let rows = team.rows.iter().copied().filter(|r| guard.eval(layout, &prog.rels, *r)).collect();
                let b = *b;
                self.sat(b, Rows { vars: team.vars, rows })
            }
            Kind::Forall(v, b) => {
                let (v, b) = (*v, *b);
                let rows = team.rows.iter().flat_map(|r| (0..layout.n).map(move |e| layout.set(*r, v, e))).collect();
                self.sat(b, Rows { vars: team.vars | 1 << v, rows }.normalize())
            }
            Kind::Exists(v, b) => {
                let (v, b) = (*v, *b);
                self.exists(v, b, team)
            }
            Kind::Or(a, b) => {
                let (a, b) = (*a, *b);
                self.or(a, b, team)
            }
        }
    }

    fn witness_values(&self, v: VarId) -> Vec<u32> {
        if self.symmetry && self.prog.symmetric >> v & 1 == 1 {
            self.prog.witnesses.clone()
        } else {
            (0..self.prog.layout.n).collect()
        }
    }

    /// The teams `Y` with `Y ≡ X` off `v` are exactly the unions, over the
    /// rows `g` of `X` with `v` erased, of `{g[e/v] : e ∈ W_g}` for nonempty
    /// `W_g ⊆ M`: every row of `X` needs an extension in `Y`, and every row of
    /// `Y` restricts to some row of `X`. Downward closed bodies only need
    /// singleton `W_g`, since shrinking `Y` keeps it equivalent to `X`.
    fn exists(&mut self, v: VarId, body: NodeId, team: &Rows) -> Result<bool, EvalError> {
        let layout = &self.prog.layout;
        let vars = team.vars | 1 << v;
        let groups: Vec<u64> = {
            let mut g: Vec<u64> = team.rows.iter().map(|r| r & !layout.field(v)).collect();
            g.sort_unstable();
            g.dedup();
            g
        };
        if groups.is_empty() {
            return self.sat(body, Rows { vars, rows: Vec::new() });
        }
        let values = self.witness_values(v);
        let singletons = self.opts.closure_pruning && self.node(body).dc;
        let choices: Vec<Vec<u32>> = if singletons {
            values.iter().map(|e| vec![*e]).collect()
        } else {
            if values.len() > 16 {
                return Err(EvalError::TooLarge(format!("{} witness values per row", values.len())));
            }
            (1u32..1 << values.len())
                .map(|s| values.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, e)| *e).collect())
                .collect()
        };
        if self.opts.strategy == Strategy::Optimized {
            return self.exists_search(v, body, team, &groups, &choices);
        }
        let mut pick = vec![0usize; groups.len()];
        loop {
            self.tick()?;
            let y = self.extend(v, vars, &groups, &pick, &choices);
            if self.sat(body, y)? {
                return Ok(true);
            }
            if !advance(&mut pick, choices.len()) {
                return Ok(false);
            }
        }
    }

    fn extend(&self, v: VarId, vars: u64, groups: &[u64], pick: &[usize], choices: &[Vec<u32>]) -> Rows {
        let layout = &self.prog.layout;
        let rows =
            groups.iter().zip(pick).flat_map(|(g, c)| choices[*c].iter().map(move |e| layout.set(*g, v, *e))).collect();
        Rows { vars, rows }.normalize()
    }

    /// Backtracking over per-group witness choices. Downward closed
    /// consequences of the body are checked on every partial team, and the
    /// group with the fewest surviving choices is assigned next.
    fn exists_search(
        &mut self,
        v: VarId,
        body: NodeId,
        team: &Rows,
        groups: &[u64],
        choices: &[Vec<u32>],
    ) -> Result<bool, EvalError> {
        let vars = team.vars | 1 << v;
        let conds = self.prog.necessary[body as usize].clone();
        let (with_v, without_v): (Vec<NodeId>, Vec<NodeId>) =
            conds.into_iter().partition(|c| self.node(*c).free >> v & 1 == 1);
        for c in without_v {
            if !self.sat(c, team.clone())? {
                return Ok(false);
            }
        }
        let bits = self.prog.layout.bits;
        let field = self.prog.layout.field(v);
        let rows_of = |g: u64, c: usize| -> Vec<u64> {
            choices[c].iter().map(|e| (g & !field) | (*e as u64) << (bits * v)).collect()
        };

        let mut viable: Vec<Vec<usize>> = Vec::with_capacity(groups.len());
        for g in groups {
            let mut keep = Vec::new();
            for c in 0..choices.len() {
                if self.partial_ok(&with_v, vars, &[], &rows_of(*g, c))? {
                    keep.push(c);
                }
            }
            if keep.is_empty() {
                return Ok(false);
            }
            viable.push(keep);
        }

        // depth-first search; each frame records the group, its candidates and the next index
        let mut assigned: Vec<Option<usize>> = vec![None; groups.len()];
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let mut partial: Vec<u64> = Vec::new();
        let mut frame = self.next_frame(&with_v, vars, groups, &viable, &assigned, &partial, &rows_of)?;
        loop {
            self.tick()?;
            match frame {
                Some((g, cands)) => stack.push((g, cands, 0)),
                None if assigned.iter().all(Option::is_some) => {
                    let y = Rows { vars, rows: partial.clone() }.normalize();
                    if self.sat(body, y)? {
                        return Ok(true);
                    }
                }
                None => {}
            }
            // advance the deepest frame with remaining candidates
            loop {
                let Some((g, cands, next)) = stack.last_mut() else {
                    return Ok(false);
                };
                let g = *g;
                if let Some(c) = assigned[g].take() {
                    let k = choices[c].len();
                    partial.truncate(partial.len() - k);
                }
                if *next < cands.len() {
                    let c = cands[*next];
                    *next += 1;
                    assigned[g] = Some(c);
                    partial.extend(rows_of(groups[g], c));
                    break;
                }
                stack.pop();
            }
            frame = self.next_frame(&with_v, vars, groups, &viable, &assigned, &partial, &rows_of)?;
        }
    }

    /// Picks the unassigned group with the fewest choices consistent with the
    /// partial team. `Ok(None)` when all are assigned or some group has no
    /// consistent choice.
    #[allow(clippy::too_many_arguments)]
    fn next_frame(
        &mut self,
        conds: &[NodeId],
        vars: u64,
        groups: &[u64],
        viable: &[Vec<usize>],
        assigned: &[Option<usize>],
        partial: &[u64],
        rows_of: &dyn Fn(u64, usize) -> Vec<u64>,
    ) -> Result<Option<(usize, Vec<usize>)>, EvalError> {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for g in 0..groups.len() {
            if assigned[g].is_some() {
                continue;
            }
            let mut ok = Vec::new();
            for c in &viable[g] {
                if self.partial_ok(conds, vars, partial, &rows_of(groups[g], *c))? {
                    ok.push(*c);
                }
            }
            if ok.is_empty() {
                return Ok(None);
            }
            let better = best.as_ref().is_none_or(|(_, b)| ok.len() < b.len());
            if better {
                let forced = ok.len() == 1;
                best = Some((g, ok));
                if forced {
                    break;
                }
            }
        }
        Ok(best)
    }

    fn partial_ok(&mut self, conds: &[NodeId], vars: u64, partial: &[u64], extra: &[u64]) -> Result<bool, EvalError> {
        if conds.is_empty() {
            return Ok(true);
        }
        let y = Rows { vars, rows: partial.iter().chain(extra).copied().collect() }.normalize();
        for c in conds {
            if !self.sat(*c, y.clone())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `X = X₁ ∪ X₂` with `X₁ ⊨ a` and `X₂ ⊨ b`. Covers are enumerated in
    /// general; when either side is downward closed a cover can be shrunk to
    /// a partition, so partitions suffice.
    fn or(&mut self, a: NodeId, b: NodeId, team: &Rows) -> Result<bool, EvalError> {
        let k = team.rows.len();
        let (dca, dcb) = (self.node(a).dc, self.node(b).dc);
        let partitions = self.opts.closure_pruning && (dca || dcb);
        if self.opts.strategy != Strategy::Optimized {
            return self.or_enumerate(a, b, team, (1u64 << k.min(63)) - 1, 0, partitions);
        }
        // rows that cannot go to a downward closed side are forced to the other
        let mut left_only = 0u64;
        let mut right_only = 0u64;
        if k > 63 {
            return Err(EvalError::TooLarge(format!("disjunction over a team of {k} rows")));
        }
        for i in 0..k {
            let single = Rows { vars: team.vars, rows: vec![team.rows[i]] };
            let fits_a = !(self.opts.closure_pruning && dca) || self.sat(a, single.clone())?;
            let fits_b = !(self.opts.closure_pruning && dcb) || self.sat(b, single)?;
            match (fits_a, fits_b) {
                (false, false) => return Ok(false),
                (false, true) => right_only |= 1 << i,
                (true, false) => left_only |= 1 << i,
                (true, true) => {}
            }
        }
        let all = (1u64 << k) - 1;
        let free = all & !left_only & !right_only;
        // greedy candidates first: everything free on one side
        for left in [left_only | free, left_only] {
            self.tick()?;
            let right = if partitions { all & !left } else { all & !left_only };
            if self.sat(a, team.select(left))? && self.sat(b, team.select(right))? {
                return Ok(true);
            }
        }
        self.or_enumerate(a, b, team, free, left_only, partitions)
    }

    /// Tries every split of the rows in `free`; rows in `left` always go left
    /// and the rest of the team outside `free` always goes right.
    fn or_enumerate(
        &mut self,
        a: NodeId,
        b: NodeId,
        team: &Rows,
        free: u64,
        left: u64,
        partitions: bool,
    ) -> Result<bool, EvalError> {
        let k = team.rows.len();
        if k > 63 {
            return Err(EvalError::TooLarge(format!("disjunction over a team of {k} rows")));
        }
        let all = (1u64 << k) - 1;
        let fixed_right = all & !free & !left;
        let free_bits: Vec<u32> = (0..k as u32).filter(|i| free >> i & 1 == 1).collect();
        if partitions {
            for s in 0u64..1 << free_bits.len() {
                self.tick()?;
                let l = left | scatter(s, &free_bits);
                let r = fixed_right | (free & !l);
                if self.sat(a, team.select(l))? && self.sat(b, team.select(r))? {
                    return Ok(true);
                }
            }
        } else {
            // each free row goes left, right or both
            let mut digits = vec![0u8; free_bits.len()];
            loop {
                self.tick()?;
                let mut l = left;
                let mut r = fixed_right;
                for (d, bit) in digits.iter().zip(&free_bits) {
                    if *d != 1 {
                        l |= 1 << bit;
                    }
                    if *d != 0 {
                        r |= 1 << bit;
                    }
                }
                if self.sat(a, team.select(l))? && self.sat(b, team.select(r))? {
                    return Ok(true);
                }
                let mut i = 0;
                loop {
                    if i == digits.len() {
                        return Ok(false);
                    }
                    digits[i] += 1;
                    if digits[i] < 3 {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
            }
        }
        Ok(false)
    }
}

fn scatter(s: u64, bits: &[u32]) -> u64 {
    bits.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).fold(0, |acc, (_, b)| acc | 1 << b)
}

/// Odometer step; false after the last combination.
fn advance(pick: &mut [usize], base: usize) -> bool {
    for p in pick.iter_mut() {
        *p += 1;
        if *p < base {
            return true;
        }
        *p = 0;
    }
    false
}
