//! Symbolic algebra of generators whose commutators (or Poisson brackets) are central scalars.
//!
//! Polynomials are kept in the normal order fixed by the generator list of their context.
//! Because every commutator is a multiple of the identity, moving one generator past another
//! produces only lower-degree terms, so rewriting terminates and the product is associative.

mod poly;
mod presets;
mod table;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::{anticommutator, commutator, multiply, Algebra, BracketMode, Monomial, NormalPoly};
pub use presets::{
    bogoliubov_symbolic_check, duron_algebra, verify_table, verify_table_named, BogoliubovSymbolic,
    Preset, TableEntry, TableReport,
};
pub use table::CommutationTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CcrError {
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands belong to different generator contexts")]
    Context,
    #[error("bracket of `{0}` with itself must vanish")]
    SelfBracket(String),
    #[error("conflicting entries for the pair ({0}, {1})")]
    Conflict(String, String),
    #[error("table line {line}: {msg}")]
    TableSyntax { line: usize, msg: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Position,
    Momentum,
    Time,
    FrequencyConjugate,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn new(name: impl Into<String>, kind: GeneratorKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

/// Ordered list of generators; the order is the normal order of every polynomial in the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
}

impl GeneratorSet {
    pub fn new(gens: Vec<Generator>) -> Result<Self, CcrError> {
        let mut index = HashMap::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(CcrError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Self { gens, index })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, CcrError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| CcrError::UnknownGenerator(name.to_string()))
    }

    pub fn get(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.gens.iter()
    }
}
