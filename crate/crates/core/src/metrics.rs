//! Variability statistics over a dataset: nodes per graph (NbN), distinct
//! labels per graph (NbL) and relation-node counts per arity.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ConceptualGraph;
use crate::vocab::MarkerId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("statistics need at least one graph")]
    EmptyDataset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetStats {
    pub cg_count: usize,
    pub nb_nodes_mean: f64,
    pub nb_nodes_stddev: f64,
    pub nb_labels_mean: f64,
    pub nb_labels_stddev: f64,
    /// Mean number of relation nodes of each arity per graph.
    pub arity_counts: BTreeMap<usize, f64>,
}

impl DatasetStats {
    /// Mean count for `arity`, zero when no graph has such a relation.
    pub fn arity(&self, arity: usize) -> f64 {
        self.arity_counts.get(&arity).copied().unwrap_or(0.0)
    }
}

#[derive(Hash, PartialEq, Eq)]
enum Label<'a> {
    Concept(u32),
    Relation(usize, u32),
    Marker(&'a MarkerId),
}

/// Distinct concept types, relation types and markers occurring in `g`.
pub fn distinct_labels(g: &ConceptualGraph) -> usize {
    let mut seen = HashSet::new();
    for c in g.concepts() {
        seen.insert(Label::Concept(c.concept_type.0));
        if let Some(m) = &c.marker {
            seen.insert(Label::Marker(m));
        }
    }
    for r in g.relations() {
        seen.insert(Label::Relation(r.relation_type.arity, r.relation_type.id.0));
    }
    seen.len()
}

/// Mean and population standard deviation.
pub fn mean_and_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn compute_stats(dataset: &[ConceptualGraph]) -> Result<DatasetStats, MetricsError> {
    if dataset.is_empty() {
        return Err(MetricsError::EmptyDataset);
    }
    let nodes: Vec<f64> = dataset.iter().map(|g| g.size() as f64).collect();
    let labels: Vec<f64> = dataset.iter().map(|g| distinct_labels(g) as f64).collect();
    let mut totals: BTreeMap<usize, usize> = BTreeMap::new();
    for g in dataset {
        for r in g.relations() {
            *totals.entry(r.relation_type.arity).or_default() += 1;
        }
    }
    let n = dataset.len() as f64;
    let (nb_nodes_mean, nb_nodes_stddev) = mean_and_stddev(&nodes);
    let (nb_labels_mean, nb_labels_stddev) = mean_and_stddev(&labels);
    Ok(DatasetStats {
        cg_count: dataset.len(),
        nb_nodes_mean,
        nb_nodes_stddev,
        nb_labels_mean,
        nb_labels_stddev,
        arity_counts: totals.into_iter().map(|(k, c)| (k, c as f64 / n)).collect(),
    })
}
