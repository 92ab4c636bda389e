//! Catalog documents over enumerated types.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::aut::{self, AutDescriptor};
use crate::degeneration::{self, ClosedStatus, Digraph};
use crate::enumerate;
use crate::error::Result;
use crate::patterns;
use crate::Curve;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub key: String,
    pub label: String,
    pub curve: Curve,
    pub genus: u32,
    pub aut: AutDescriptor,
    pub aut_group: String,
    pub special: bool,
    pub status: ClosedStatus,
    /// Keys of the targets of one-step moves.
    pub moves: Vec<String>,
    pub patterns: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub g: u32,
    pub n: u32,
    pub r: u32,
    pub max_components: u32,
    pub types: Vec<CatalogEntry>,
    /// Degeneration digraph over the types and their move targets.
    pub digraph: Digraph,
    pub dot: String,
}

pub fn run_report(g: u32, n: u32, r: u32, max_components: u32) -> Result<Catalog> {
    let types = enumerate::enumerate_types(g, n, r, max_components)?;
    let digraph = degeneration::degeneration_digraph(&types, r)?;
    let mut entries = Vec::with_capacity(types.len());
    for (i, curve) in types.iter().enumerate() {
        let node = &digraph.nodes[i];
        let aut = aut::aut_identity_component(curve, r)?;
        let moves = digraph
            .edges
            .iter()
            .filter(|e| e.from == i)
            .map(|e| digraph.nodes[e.to].key.clone())
            .collect();
        let census = patterns::pattern_census(&patterns::all_patterns(curve)?)
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        entries.push(CatalogEntry {
            key: node.key.clone(),
            label: degeneration::describe(curve),
            curve: curve.clone(),
            genus: curve.arithmetic_genus()?,
            aut_group: aut.to_string(),
            aut,
            special: node.special,
            status: degeneration::closed_point_status(curve, r)?,
            moves,
            patterns: census,
        });
    }
    let dot = digraph.to_dot();
    Ok(Catalog {
        g,
        n,
        r,
        max_components,
        types: entries,
        digraph,
        dot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_pseudostable_catalog() {
        let cat = run_report(2, 0, 2, 3).unwrap();
        assert!(!cat.types.is_empty());
        assert!(cat.dot.starts_with("digraph"));
        for entry in &cat.types {
            assert_eq!(entry.genus, 2);
            assert_eq!(entry.special, entry.moves.is_empty());
            assert_eq!(entry.status == ClosedStatus::NotClosed, !entry.special);
        }
        let json = serde_json::to_string(&cat).unwrap();
        let back: Catalog = serde_json::from_str(&json).unwrap();
        assert_eq!(back.types.len(), cat.types.len());
    }
}
