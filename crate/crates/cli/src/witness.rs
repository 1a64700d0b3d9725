//! JSON renderings of the closure checkers' counterexamples. Elements are
//! written by their default names (`e0`, `e1`, ...).

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use teamsem::dependencies::{
    DomainCounterexample, HomCounterexample, IsoCounterexample, RelationPair, UnionCounterexample,
};
use teamsem::structures::{Element, RelModel, Relation};

pub trait Witness {
    fn to_json(&self) -> Value;
}

fn set(s: &BTreeSet<Element>) -> Value {
    s.iter().map(|e| e.to_string()).collect()
}

fn rel(r: &Relation) -> Value {
    r.tuples().iter().map(|t| t.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect()
}

fn map(m: &BTreeMap<Element, Element>) -> Value {
    Value::Object(m.iter().map(|(a, b)| (a.to_string(), Value::String(b.to_string()))).collect())
}

fn model(m: &RelModel) -> Value {
    json!({ "domain": set(&m.domain), "relation": rel(&m.relation) })
}

impl Witness for DomainCounterexample {
    fn to_json(&self) -> Value {
        json!({ "domain": set(&self.m), "other_domain": set(&self.n), "relation": rel(&self.relation) })
    }
}

impl Witness for RelationPair {
    fn to_json(&self) -> Value {
        json!({ "domain": set(&self.domain), "member": rel(&self.member), "non_member": rel(&self.non_member) })
    }
}

impl Witness for UnionCounterexample {
    fn to_json(&self) -> Value {
        json!({
            "domain": set(&self.domain),
            "parts": self.parts.iter().map(rel).collect::<Vec<_>>(),
            "union": rel(&self.union),
        })
    }
}

impl Witness for IsoCounterexample {
    fn to_json(&self) -> Value {
        json!({
            "domain": set(&self.domain),
            "relation": rel(&self.relation),
            "image_domain": set(&self.image_domain),
            "image": rel(&self.image),
            "map": map(&self.map),
        })
    }
}

impl Witness for HomCounterexample {
    fn to_json(&self) -> Value {
        json!({ "sub": model(&self.sub), "sup": model(&self.sup), "hom": map(&self.hom) })
    }
}
