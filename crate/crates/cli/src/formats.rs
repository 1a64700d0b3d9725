//! JSON file formats for structures, teams, assignments, dependencies and
//! chains. Elements are written by label.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use teamsem::dependencies::{BuiltinKind, Dependency};
use teamsem::structures::{Assignment, Element, Relation, Structure, Team, Tuple};
use teamsem::syntax::Var;

#[derive(Debug, Serialize, Deserialize)]
pub struct RelationFile {
    pub arity: usize,
    pub tuples: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StructureFile {
    pub domain: Vec<String>,
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelationFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TeamFile {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DependencyFile {
    pub name: String,
    pub arity: usize,
    pub kind: String,
    #[serde(default)]
    pub sentence: Option<String>,
    /// For `builtin`: one of dep, const, inc, ind, anon, ne.
    #[serde(default)]
    pub atom: Option<String>,
    /// For builtin dep/ind/anon: the width of the left tuple.
    #[serde(default)]
    pub left: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChainFile {
    pub domain: Vec<String>,
    pub arity: usize,
    pub links: Vec<Vec<Vec<String>>>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn element(m: &Structure, label: &str) -> Result<Element> {
    m.element_by_label(label).ok_or_else(|| anyhow!("unknown element `{label}`"))
}

fn tuple(m: &Structure, labels: &[String]) -> Result<Tuple> {
    labels.iter().map(|l| element(m, l)).collect()
}

impl StructureFile {
    pub fn to_structure(&self) -> Result<Structure> {
        let mut m = Structure::from_labels(&self.domain)?;
        if m.size() != self.domain.len() {
            bail!("duplicate domain labels");
        }
        for (name, e) in &self.constants {
            let e = element(&m, e)?;
            m.set_constant(name.clone(), e)?;
        }
        for (name, r) in &self.relations {
            let tuples = r.tuples.iter().map(|t| tuple(&m, t)).collect::<Result<Vec<_>>>()?;
            m.set_relation(name.clone(), Relation::new(r.arity, tuples)?)?;
        }
        Ok(m)
    }

    pub fn from_structure(m: &Structure) -> StructureFile {
        StructureFile {
            domain: m.domain().iter().map(|e| m.label(*e)).collect(),
            constants: m.constants().iter().map(|(c, e)| (c.clone(), m.label(*e))).collect(),
            relations: m
                .relations()
                .iter()
                .map(|(name, r)| {
                    let tuples = r.tuples().iter().map(|t| labels(m, t)).collect();
                    (name.clone(), RelationFile { arity: r.arity(), tuples })
                })
                .collect(),
        }
    }
}

fn labels(m: &Structure, t: &[Element]) -> Vec<String> {
    t.iter().map(|e| m.label(*e)).collect()
}

impl TeamFile {
    pub fn to_team(&self, m: &Structure) -> Result<Team> {
        let rows = self.rows.iter().map(|r| tuple(m, r)).collect::<Result<Vec<_>>>()?;
        Ok(Team::new(self.vars.iter().map(|v| Var::from(v.as_str())).collect(), rows)?)
    }

    pub fn from_team(m: &Structure, x: &Team) -> TeamFile {
        TeamFile {
            vars: x.vars().iter().map(|v| v.to_string()).collect(),
            rows: x.rows().iter().map(|r| labels(m, r)).collect(),
        }
    }
}

/// An assignment file maps variable names to element labels.
pub fn assignment(m: &Structure, map: &BTreeMap<String, String>) -> Result<Assignment> {
    map.iter().map(|(v, e)| Ok((Var::from(v.as_str()), element(m, e)?))).collect()
}

impl DependencyFile {
    pub fn to_dependency(&self) -> Result<Dependency> {
        let sentence = || self.sentence.as_deref().ok_or_else(|| anyhow!("`{}` kind needs a sentence", self.kind));
        let d = match self.kind.as_str() {
            "fo" => Dependency::first_order_text(self.name.clone(), self.arity, sentence()?)?,
            "ded" => Dependency::ded_text(self.name.clone(), sentence()?)?,
            "builtin" => Dependency::builtin(self.name.clone(), self.builtin_kind()?),
            other => bail!("unknown dependency kind `{other}` (expected fo, ded or builtin)"),
        };
        if d.arity() != self.arity {
            bail!("dependency `{}` declares arity {} but defines arity {}", self.name, self.arity, d.arity());
        }
        Ok(d)
    }

    fn builtin_kind(&self) -> Result<BuiltinKind> {
        let k = self.arity;
        let split = |default: usize| -> Result<(usize, usize)> {
            let left = self.left.unwrap_or(default);
            if left > k {
                bail!("left width {left} exceeds arity {k}");
            }
            Ok((left, k - left))
        };
        Ok(match self.atom.as_deref().unwrap_or(&self.name) {
            "dep" => {
                let (left, right) = split(k.saturating_sub(1))?;
                BuiltinKind::Dep { left, right }
            }
            "ind" => {
                let (left, right) = split(k / 2)?;
                BuiltinKind::Ind { left, right }
            }
            "anon" => {
                let (left, right) = split(k.saturating_sub(1))?;
                BuiltinKind::Anon { left, right }
            }
            "inc" if k.is_multiple_of(2) => BuiltinKind::Inc { width: k / 2 },
            "inc" => bail!("inclusion atoms need an even arity"),
            "const" => BuiltinKind::Const { width: k },
            "ne" => BuiltinKind::Ne { width: k },
            other => bail!("unknown builtin atom `{other}`"),
        })
    }
}

impl ChainFile {
    /// The base domain size and the links as relations over elements `0..n`.
    pub fn to_chain(&self) -> Result<(usize, Vec<Relation>)> {
        let m = Structure::from_labels(&self.domain)?;
        let links = self
            .links
            .iter()
            .map(|l| Ok(Relation::new(self.arity, l.iter().map(|t| tuple(&m, t)).collect::<Result<Vec<_>>>()?)?))
            .collect::<Result<Vec<_>>>()?;
        Ok((m.size(), links))
    }
}
