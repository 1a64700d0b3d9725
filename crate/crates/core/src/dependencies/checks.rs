//! Bounded exhaustive checkers. A pass only means no violation exists up to
//! the reported bound.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use super::{domains_up_to, Dependency, DependencyError, Semantics};
use crate::structures::{
    enumerate_retraction_homs, relation_from_mask, tuples_over, Element, RelModel, Relation, Tuple,
};

/// Largest tuple space `|M|^k` the exhaustive checkers will enumerate.
pub const MAX_TUPLE_SPACE: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<C> {
    /// No violation among instances up to `bound`.
    Pass {
        bound: usize,
    },
    Counterexample(C),
}

impl<C> Verdict<C> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn counterexample(&self) -> Option<&C> {
        match self {
            Verdict::Counterexample(c) => Some(c),
            Verdict::Pass { .. } => None,
        }
    }
}

/// `(M, R)` and `(N, R)` receive different answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainCounterexample {
    pub m: BTreeSet<Element>,
    pub n: BTreeSet<Element>,
    pub relation: Relation,
}

/// `member ∈ D`, `non_member ∉ D`, over the same domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationPair {
    pub domain: BTreeSet<Element>,
    pub member: Relation,
    pub non_member: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionCounterexample {
    pub domain: BTreeSet<Element>,
    pub parts: Vec<Relation>,
    pub union: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCounterexample {
    pub domain: BTreeSet<Element>,
    pub relation: Relation,
    pub image_domain: BTreeSet<Element>,
    pub image: Relation,
    pub map: BTreeMap<Element, Element>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCounterexample {
    pub sub: RelModel,
    pub sup: RelModel,
    pub hom: BTreeMap<Element, Element>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub bound: usize,
    pub downwards: Verdict<RelationPair>,
    pub upwards: Verdict<RelationPair>,
    pub union_closed: Verdict<UnionCounterexample>,
    pub isomorphism_closed: Verdict<IsoCounterexample>,
}

fn space(n: usize, k: usize) -> Result<Vec<Tuple>, DependencyError> {
    let size = n.checked_pow(k as u32).unwrap_or(usize::MAX);
    if size > MAX_TUPLE_SPACE {
        return Err(DependencyError::Budget(size));
    }
    let elems: Vec<Element> = (0..n as u32).map(Element).collect();
    Ok(tuples_over(&elems, k))
}

/// Compares `(M, R)` with `(N, R)` for all domains `M, N ⊆ {0..max_domain}`
/// and all `R ⊆ (M ∩ N)^k`.
pub fn check_domain_independence(
    d: &Dependency,
    max_domain: usize,
) -> Result<Verdict<DomainCounterexample>, DependencyError> {
    let k = d.arity();
    let domains = domains_up_to(max_domain);
    for m in &domains {
        for n in &domains {
            let shared: Vec<Element> = m.intersection(n).copied().collect();
            let size = shared.len().checked_pow(k as u32).unwrap_or(usize::MAX);
            if size > MAX_TUPLE_SPACE {
                return Err(DependencyError::Budget(size));
            }
            let tuples = tuples_over(&shared, k);
            for mask in 0..1u64 << tuples.len() {
                let r = relation_from_mask(k, &tuples, mask);
                if d.holds(m, &r)? != d.holds(n, &r)? {
                    return Ok(Verdict::Counterexample(DomainCounterexample {
                        m: m.clone(),
                        n: n.clone(),
                        relation: r,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass { bound: max_domain })
}

/// Submasks of `mask`, ascending.
fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut cur = Some(0u64);
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == mask { None } else { Some((c.wrapping_sub(mask)) & mask) };
        Some(c)
    })
}

/// Downward, upward, binary-union and isomorphism closure on the domains
/// `{0..n}` for `n ≤ max_domain`.
pub fn check_closure_properties(d: &Dependency, max_domain: usize) -> Result<ClosureReport, DependencyError> {
    let k = d.arity();
    let mut down = None;
    let mut up = None;
    let mut union = None;
    let mut iso = None;
    for n in 1..=max_domain {
        let tuples = space(n, k)?;
        let domain: BTreeSet<Element> = (0..n as u32).map(Element).collect();
        let full = (1u64 << tuples.len()) - 1;
        let member: Vec<bool> =
            (0..=full).map(|mask| d.holds(&domain, &relation_from_mask(k, &tuples, mask))).collect::<Result<_, _>>()?;
        let rel = |mask: u64| relation_from_mask(k, &tuples, mask);
        let pair = |a: u64, b: u64| RelationPair { domain: domain.clone(), member: rel(a), non_member: rel(b) };

        if down.is_none() {
            down = (0..=full)
                .filter(|r| member[*r as usize])
                .find_map(|r| submasks(r).find(|s| !member[*s as usize]).map(|s| pair(r, s)));
        }
        if up.is_none() {
            up = (0..=full).filter(|r| member[*r as usize]).find_map(|r| {
                submasks(full & !r).map(|extra| r | extra).find(|s| !member[*s as usize]).map(|s| pair(r, s))
            });
        }
        if union.is_none() {
            let members: Vec<u64> = (0..=full).filter(|r| member[*r as usize]).collect();
            union = members
                .iter()
                .enumerate()
                .flat_map(|(i, a)| members[i..].iter().map(move |b| (*a, *b)))
                .find(|(a, b)| !member[(a | b) as usize])
                .map(|(a, b)| UnionCounterexample {
                    domain: domain.clone(),
                    parts: vec![rel(a), rel(b)],
                    union: rel(a | b),
                });
        }
        if iso.is_none() {
            let index: BTreeMap<&Tuple, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
            'outer: for perm in (0..n as u32).permutations(n) {
                let image_of: Vec<usize> = tuples
                    .iter()
                    .map(|t| index[&t.iter().map(|e| Element(perm[e.0 as usize])).collect::<Tuple>()])
                    .collect();
                for mask in 0..=full {
                    let img =
                        (0..tuples.len()).filter(|i| mask >> i & 1 == 1).fold(0u64, |acc, i| acc | 1 << image_of[i]);
                    if member[mask as usize] != member[img as usize] {
                        iso = Some(IsoCounterexample {
                            domain: domain.clone(),
                            relation: rel(mask),
                            image_domain: domain.clone(),
                            image: rel(img),
                            map: (0..n as u32).map(|i| (Element(i), Element(perm[i as usize]))).collect(),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }
    fn verdict<C>(c: Option<C>, bound: usize) -> Verdict<C> {
        c.map_or(Verdict::Pass { bound }, Verdict::Counterexample)
    }
    Ok(ClosureReport {
        bound: max_domain,
        downwards: verdict(down, max_domain),
        upwards: verdict(up, max_domain),
        union_closed: verdict(union, max_domain),
        isomorphism_closed: verdict(iso, max_domain),
    })
}

/// Checks isomorphism closure of an extensional dependency on its own table:
/// every entry is compared with its images under injections into the union of
/// the table's domains. Other kinds are closed by construction.
pub fn check_isomorphism_closure(d: &Dependency) -> Result<Option<IsoCounterexample>, DependencyError> {
    let Semantics::Extensional { table, .. } = d.semantics() else {
        return Ok(None);
    };
    let universe: Vec<Element> = table.keys().flat_map(|(m, _)| m.iter().copied()).unique().sorted().collect();
    for ((m, r), b) in table {
        let src: Vec<Element> = m.iter().copied().collect();
        for target in universe.iter().copied().permutations(src.len()) {
            let map: BTreeMap<Element, Element> = src.iter().copied().zip(target.iter().copied()).collect();
            let image_domain: BTreeSet<Element> = target.into_iter().collect();
            let image = r.map_elements(&map);
            match d.holds(&image_domain, &image) {
                Ok(c) if c != *b => {
                    return Ok(Some(IsoCounterexample {
                        domain: m.clone(),
                        relation: r.clone(),
                        image_domain,
                        image,
                        map,
                    }))
                }
                Ok(_) | Err(DependencyError::MissingEntry(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

/// Like [`check_union_chain_preservation`] with a caller-supplied membership
/// test, so repeated checks can share a cache.
pub fn check_union_chain_with<F>(
    domain: &BTreeSet<Element>,
    chain: &[Relation],
    mut holds: F,
) -> Result<Verdict<UnionCounterexample>, DependencyError>
where
    F: FnMut(&Relation) -> Result<bool, DependencyError>,
{
    for (i, w) in chain.windows(2).enumerate() {
        if !w[0].is_subset(&w[1]) {
            return Err(DependencyError::NotAChain(i, i + 1));
        }
    }
    if chain.iter().any(|r| !r.elements().is_subset(domain)) {
        return Err(DependencyError::OutsideDomain);
    }
    let Some(first) = chain.first() else {
        return Ok(Verdict::Pass { bound: 0 });
    };
    for r in chain {
        if !holds(r)? {
            return Ok(Verdict::Pass { bound: chain.len() });
        }
    }
    let union = chain.iter().fold(first.clone(), |acc, r| acc.union(r));
    if holds(&union)? {
        Ok(Verdict::Pass { bound: chain.len() })
    } else {
        Ok(Verdict::Counterexample(UnionCounterexample { domain: domain.clone(), parts: chain.to_vec(), union }))
    }
}

/// If every relation of the chain is in `D`, so is their union.
pub fn check_union_chain_preservation(
    d: &Dependency,
    domain: &BTreeSet<Element>,
    chain: &[Relation],
) -> Result<Verdict<UnionCounterexample>, DependencyError> {
    check_union_chain_with(domain, chain, |r| d.holds(domain, r))
}

/// If `(B, S) ∈ D` and some homomorphism `(B, S) → (A, R)` fixes `A`
/// pointwise, then `(A, R) ∈ D`.
pub fn check_hom_preservation(
    d: &Dependency,
    sub: &RelModel,
    sup: &RelModel,
) -> Result<Verdict<HomCounterexample>, DependencyError> {
    let mut homs = enumerate_retraction_homs(sub, sup)?;
    if !d.holds(&sup.domain, &sup.relation)? {
        return Ok(Verdict::Pass { bound: sup.domain.len() });
    }
    match homs.next() {
        Some(hom) if !d.holds(&sub.domain, &sub.relation)? => {
            Ok(Verdict::Counterexample(HomCounterexample { sub: sub.clone(), sup: sup.clone(), hom }))
        }
        _ => Ok(Verdict::Pass { bound: sup.domain.len() }),
    }
}

/// Searches all `(B, S)` with `B = {0..n}`, `n ≤ max_domain`, and all nonempty
/// `A ⊆ B`, for a retraction-homomorphism counterexample. Returns the first in
/// enumeration order (size of `B`, then `S` by mask, then `A`).
pub fn find_hom_counterexample(
    d: &Dependency,
    max_domain: usize,
) -> Result<Verdict<HomCounterexample>, DependencyError> {
    let k = d.arity();
    for n in 1..=max_domain {
        let tuples = space(n, k)?;
        let b: BTreeSet<Element> = (0..n as u32).map(Element).collect();
        let subdomains = domains_up_to(n);
        for mask in 0..1u64 << tuples.len() {
            let sup = RelModel { domain: b.clone(), relation: relation_from_mask(k, &tuples, mask) };
            for a in &subdomains {
                let sub = RelModel { domain: a.clone(), relation: sup.relation.restrict_to(a) };
                if let Verdict::Counterexample(c) = check_hom_preservation(d, &sub, &sup)? {
                    return Ok(Verdict::Counterexample(c));
                }
            }
        }
    }
    Ok(Verdict::Pass { bound: max_domain })
}
