//! JSON model files:
//! `{"worlds": k, "rq": [[i,j],...], "rm": [[i,l],...], "valuation": {"p": [w,...]}}`.
//!
//! `rq` may omit reflexive and symmetric pairs; the loader completes them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{QuantumModalStructure, Relation, Violation, WorldSet, MAX_WORLDS};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("invalid model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("model violates the structure conditions: {}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub worlds: usize,
    #[serde(default)]
    pub rq: Vec<[usize; 2]>,
    #[serde(default)]
    pub rm: Vec<[usize; 2]>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<usize>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, ModelFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model files always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// Lists every pair of both relations explicitly.
    pub fn from_structure(s: &QuantumModalStructure) -> Self {
        ModelFile {
            worlds: s.worlds,
            rq: s.rq.pairs().map(|(i, j)| [i, j]).collect(),
            rm: s.rm.pairs().map(|(i, l)| [i, l]).collect(),
            valuation: s
                .valuation
                .iter()
                .map(|(atom, set)| (atom.clone(), set.iter().collect()))
                .collect(),
        }
    }

    /// Builds the structure, completing `rq` to a reflexive symmetric
    /// relation, then validates it when `validate` is set.
    pub fn into_structure(&self, validate: bool) -> Result<QuantumModalStructure, ModelFileError> {
        let k = self.worlds;
        if k == 0 || k > MAX_WORLDS {
            return Err(ModelFileError::Malformed(format!(
                "world count {k} outside 1..={MAX_WORLDS}"
            )));
        }
        let in_range = |what: &str, w: usize| {
            if w < k {
                Ok(w)
            } else {
                Err(ModelFileError::Malformed(format!(
                    "{what} mentions world {w}, but there are only {k}"
                )))
            }
        };
        let mut s = QuantumModalStructure::new(k);
        for &[i, j] in &self.rq {
            s.rq.insert(in_range("rq", i)?, in_range("rq", j)?);
        }
        s.complete_rq();
        let mut rm = Relation::empty(k);
        for &[i, l] in &self.rm {
            rm.insert(in_range("rm", i)?, in_range("rm", l)?);
        }
        s.rm = rm;
        for (atom, worlds) in &self.valuation {
            if crate::formula::parse(atom)
                .ok()
                .and_then(|f| f.atom_name().map(str::to_owned))
                != Some(atom.clone())
            {
                return Err(ModelFileError::Malformed(format!(
                    "invalid atom name {atom:?}"
                )));
            }
            let mut set = WorldSet::EMPTY;
            for &w in worlds {
                set.insert(in_range("valuation", w)?);
            }
            s.valuation.insert(atom.clone(), set);
        }
        if validate {
            let violations = s
                .validate()
                .map_err(|e| ModelFileError::Malformed(e.to_string()))?;
            if !violations.is_empty() {
                return Err(ModelFileError::Invalid(violations));
            }
        }
        Ok(s)
    }
}

impl QuantumModalStructure {
    pub fn to_model_file(&self) -> ModelFile {
        ModelFile::from_structure(self)
    }

    pub fn from_model_json(text: &str, validate: bool) -> Result<Self, ModelFileError> {
        ModelFile::from_json(text)?.into_structure(validate)
    }

    /// Graphviz rendering: `rq` as undirected edges (self-loops omitted),
    /// `rm` as directed edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph structure {\n");
        for w in 0..self.worlds {
            let atoms: Vec<&str> = self
                .valuation
                .iter()
                .filter(|(_, set)| set.contains(w))
                .map(|(a, _)| a.as_str())
                .collect();
            out.push_str(&format!("  w{w} [label=\"{w}: {}\"];\n", atoms.join(",")));
        }
        for (i, j) in self.rq.pairs().filter(|&(i, j)| i < j) {
            out.push_str(&format!("  w{i} -> w{j} [dir=none, style=dashed];\n"));
        }
        for (i, l) in self.rm.pairs() {
            out.push_str(&format!("  w{i} -> w{l};\n"));
        }
        out.push_str("}\n");
        out
    }
}
