//! Brute-force answers for the constructions, computed without the team
//! evaluator.

use std::collections::BTreeSet;

use itertools::{iproduct, Itertools};

use crate::dependencies::{dep_holds, Dependency, DependencyError};
use crate::structures::{Element, Relation};

/// Searches index sets `I, J, I′, J′ ⊆ {1, …, ℓ}` covering `1…ℓ` with
/// `1 ∈ I∖J`, `ℓ ∈ J∖I`, `I ∩ J = I′ ∩ J′ = ∅`, `I = I′`, `J = J′`, and
/// successors alternating between `I` and `J`. Returns `(I, J)` when found.
pub fn parity_oracle(ell: usize) -> Option<(BTreeSet<usize>, BTreeSet<usize>)> {
    let all: BTreeSet<usize> = (1..=ell).collect();
    let subsets: Vec<BTreeSet<usize>> = all.iter().copied().powerset().map(|s| s.into_iter().collect()).collect();
    let ok = |i: &BTreeSet<usize>, j: &BTreeSet<usize>, i2: &BTreeSet<usize>, j2: &BTreeSet<usize>| {
        let cover = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| a.union(b).copied().collect::<BTreeSet<_>>() == all;
        cover(i, j)
            && cover(i2, j2)
            && i.contains(&1)
            && !j.contains(&1)
            && j.contains(&ell)
            && !i.contains(&ell)
            && i.is_disjoint(j)
            && i2.is_disjoint(j2)
            && i == i2
            && j == j2
            && i.iter().filter(|n| **n < ell).all(|n| j.contains(&(n + 1)))
            && j.iter().filter(|n| **n < ell).all(|n| i.contains(&(n + 1)))
    };
    iproduct!(&subsets, &subsets, &subsets, &subsets)
        .find(|(i, j, i2, j2)| ok(i, j, i2, j2))
        .map(|(i, j, _, _)| (i.clone(), j.clone()))
}

/// Some `f: n → n` with `f(f(x)) = x ≠ f(x)` for all `x`, by trying every
/// function.
pub fn fixed_point_free_involution(n: usize) -> Option<Vec<usize>> {
    (0..n)
        .map(|_| 0..n)
        .multi_cartesian_product()
        .find(|f| (0..n).all(|x| f[x] != x && f[f[x]] == x))
        .or_else(|| (n == 0).then(Vec::new))
}

/// A nonempty `I ⊆ {1, …, d-1}` with `(domain, ⋃_{n∈I} S_n) ∈ D`, where
/// `S_n = chain[n-1]` and indices past the chain are empty.
pub fn chain_oracle(
    dep: &Dependency,
    domain: &BTreeSet<Element>,
    chain: &[Relation],
    d: usize,
) -> Result<Option<BTreeSet<usize>>, DependencyError> {
    let link = |n: usize| chain.get(n - 1).cloned().unwrap_or_else(|| Relation::empty(dep.arity()));
    for set in (1..d).powerset().filter(|s| !s.is_empty()) {
        let union = set.iter().fold(Relation::empty(dep.arity()), |acc, n| acc.union(&link(*n)));
        if dep_holds(dep, domain, &union)? {
            return Ok(Some(set.into_iter().collect()));
        }
    }
    Ok(None)
}
