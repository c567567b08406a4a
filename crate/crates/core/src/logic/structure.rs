use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<u32>>,
}

/// Finite relational structure on the universe `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelStructure {
    pub n: u32,
    pub relations: BTreeMap<String, Relation>,
}

impl RelStructure {
    pub fn new(n: u32) -> Self {
        RelStructure { n, relations: BTreeMap::new() }
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.relations.get(name) {
            Some(r) if r.arity != arity => {
                Err(Error::InvalidInput(format!("relation {name} already has arity {}", r.arity)))
            }
            Some(_) => Ok(()),
            None => {
                self.relations.insert(name.to_string(), Relation { arity, tuples: BTreeSet::new() });
                Ok(())
            }
        }
    }

    pub fn add_tuple(&mut self, name: &str, tuple: &[u32]) -> Result<()> {
        self.add_relation(name, tuple.len())?;
        if let Some(&x) = tuple.iter().find(|&&x| x >= self.n) {
            return Err(Error::InvalidInput(format!("element {x} outside universe of size {}", self.n)));
        }
        self.relations.get_mut(name).unwrap().tuples.insert(tuple.to_vec());
        Ok(())
    }

    pub fn holds(&self, name: &str, tuple: &[u32]) -> bool {
        self.relations.get(name).is_some_and(|r| r.tuples.contains(tuple))
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).map(|r| r.arity)
    }

    /// Graph on `0..n` with a symmetric binary relation `E`.
    pub fn undirected_graph(n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        let mut s = RelStructure::new(n);
        s.add_relation("E", 2)?;
        for &(a, b) in edges {
            s.add_tuple("E", &[a, b])?;
            s.add_tuple("E", &[b, a])?;
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in &self.relations {
            for t in &r.tuples {
                if t.len() != r.arity {
                    return Err(Error::InvalidInput(format!("tuple {t:?} of {name} has wrong arity")));
                }
                if t.iter().any(|&x| x >= self.n) {
                    return Err(Error::InvalidInput(format!("tuple {t:?} of {name} leaves the universe")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: RelStructure = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Relation names with arities, for vocabulary comparisons.
    pub fn vocabulary(&self) -> BTreeMap<&str, usize> {
        self.relations.iter().map(|(k, r)| (k.as_str(), r.arity)).collect()
    }
}
