//! The generation loop: draw γ-CGs, instantiate their variables, specialize
//! the drawn type labels and join the result into the graph under
//! construction until it is large enough; repeat for every graph of the
//! dataset.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{
    instantiate, specialize_labels, validate_gamma, Assignment, GammaCG, GammaError, LocalMint,
    RelationDomainPolicy, Specialization, VariableTarget,
};
use crate::graph::{ConceptNode, ConceptualGraph, NodeId, RelationNode, ValidationReport};
use crate::hierarchy::TypeId;
use crate::rng::{self, Stage};
use crate::vocab::{MarkerId, Vocabulary};

/// Instantiation attempts per drawn component before the γ-CG is set aside
/// for the rest of the current graph.
pub const MAX_INSTANTIATION_ATTEMPTS: usize = 16;

/// Consecutive joins that add no node before generation gives up.
pub const MAX_STALLED_JOINS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GeneratorConfig {
    #[serde(rename = "maxCGs")]
    pub max_cgs: usize,
    pub min_size: usize,
    pub max_spe: usize,
    pub seed: u64,
    #[serde(default)]
    pub relation_domain_policy: RelationDomainPolicy,
}

impl GeneratorConfig {
    pub fn new(max_cgs: usize, min_size: usize, max_spe: usize, seed: u64) -> Self {
        GeneratorConfig { max_cgs, min_size, max_spe, seed, relation_domain_policy: RelationDomainPolicy::default() }
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        if self.max_cgs == 0 {
            return Err(GenerateError::Config("maxCGs must be at least 1".into()));
        }
        if self.min_size == 0 {
            return Err(GenerateError::Config("minSize must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("the γ-CG set is empty")]
    NoGammas,
    #[error("γ-CG `{name}` does not conform to the vocabulary:\n{report}")]
    InvalidGamma { name: String, report: ValidationReport },
    #[error("graph {index}: every γ-CG failed to instantiate; last error: {last}")]
    Exhausted { index: usize, last: GammaError },
    #[error("graph {index}: {stalled} consecutive joins added no node (size {size}, minimum {min_size})")]
    NoProgress { index: usize, stalled: usize, size: usize, min_size: usize },
    #[error("failed to build worker pool: {0}")]
    Pool(String),
}

/// Two nodes sharing a marker whose types are incomparable, left unmerged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedMerge {
    pub marker: MarkerId,
    pub kept: NodeId,
    pub other: NodeId,
}

/// A merge of `removed` into `kept`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub kept: NodeId,
    pub removed: NodeId,
}

#[derive(Debug, Clone)]
pub struct Joined {
    pub graph: ConceptualGraph,
    pub merges: Vec<Merge>,
    pub skipped: Vec<SkippedMerge>,
    /// Where each node of the right-hand graph ended up.
    pub right_ids: HashMap<NodeId, NodeId>,
}

struct Cluster {
    representative: NodeId,
    concept_type: TypeId,
}

/// Joins `right` into `left` by disjoint union, merging concept nodes that
/// carry the same individual marker.
///
/// A merged node keeps the more specific of the two types and takes over
/// every argument slot of the nodes it absorbed. Same-marker nodes with
/// incomparable types are left apart and reported in `skipped`. `left` keeps
/// its node ids; `right` is shifted past them.
pub fn join(vocab: &Vocabulary, left: &ConceptualGraph, right: &ConceptualGraph) -> Joined {
    let concepts = vocab.concepts();
    let offset = left.next_id();
    let shift = |id: NodeId| NodeId(id.0 + offset);

    let mut clusters: BTreeMap<&MarkerId, Vec<Cluster>> = BTreeMap::new();
    let mut redirect: HashMap<NodeId, NodeId> = HashMap::new();
    let mut merges = Vec::new();
    let mut skipped = Vec::new();

    let candidates = left
        .concepts()
        .iter()
        .map(|c| (c, c.id, false))
        .chain(right.concepts().iter().map(|c| (c, shift(c.id), true)));
    for (c, id, from_right) in candidates {
        let Some(marker) = &c.marker else { continue };
        let list = clusters.entry(marker).or_default();
        match list.iter_mut().find(|cl| concepts.comparable(cl.concept_type, c.concept_type)) {
            Some(cl) => {
                cl.concept_type = concepts
                    .meet_if_comparable(cl.concept_type, c.concept_type)
                    .expect("comparable");
                redirect.insert(id, cl.representative);
                merges.push(Merge { kept: cl.representative, removed: id });
            }
            None => {
                if from_right {
                    if let Some(first) = list.first() {
                        skipped.push(SkippedMerge { marker: marker.clone(), kept: first.representative, other: id });
                    }
                }
                list.push(Cluster { representative: id, concept_type: c.concept_type });
            }
        }
    }
    let merged_types: HashMap<NodeId, TypeId> = clusters
        .values()
        .flatten()
        .map(|cl| (cl.representative, cl.concept_type))
        .collect();
    let resolve = |id: NodeId| redirect.get(&id).copied().unwrap_or(id);

    let mut out_concepts = Vec::with_capacity(left.concepts().len() + right.concepts().len());
    let mut right_ids = HashMap::with_capacity(right.size());
    for (c, id, from_right) in left
        .concepts()
        .iter()
        .map(|c| (c, c.id, false))
        .chain(right.concepts().iter().map(|c| (c, shift(c.id), true)))
    {
        if from_right {
            right_ids.insert(c.id, resolve(id));
        }
        if redirect.contains_key(&id) {
            continue;
        }
        out_concepts.push(ConceptNode {
            id,
            concept_type: merged_types.get(&id).copied().unwrap_or(c.concept_type),
            marker: c.marker.clone(),
        });
    }

    let mut out_relations = Vec::with_capacity(left.relations().len() + right.relations().len());
    for r in left.relations() {
        out_relations.push(RelationNode {
            id: r.id,
            relation_type: r.relation_type,
            arguments: r.arguments.iter().map(|&a| resolve(a)).collect(),
        });
    }
    for r in right.relations() {
        right_ids.insert(r.id, shift(r.id));
        out_relations.push(RelationNode {
            id: shift(r.id),
            relation_type: r.relation_type,
            arguments: r.arguments.iter().map(|&a| resolve(shift(a))).collect(),
        });
    }

    Joined {
        graph: ConceptualGraph::from_trusted(out_concepts, out_relations, offset + right.next_id()),
        merges,
        skipped,
        right_ids,
    }
}

/// What happened when one component was added to a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentRecord {
    pub gamma: String,
    pub attempts: usize,
    pub assignments: Vec<Assignment>,
    /// Node ids as of the join that added this component.
    pub specializations: Vec<Specialization>,
    pub merges: Vec<Merge>,
    pub skipped_merges: Vec<SkippedMerge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MintedMarker {
    pub id: MarkerId,
    pub concept_type: String,
}

/// Audit trail for one generated graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerationProvenance {
    pub index: usize,
    pub components: Vec<ComponentRecord>,
    /// γ-CGs set aside after exhausting their instantiation attempts.
    pub set_aside: Vec<String>,
    pub minted: Vec<MintedMarker>,
}

/// One graph plus what it took to build it.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: ConceptualGraph,
    pub provenance: GenerationProvenance,
    pub minted: Vec<(MarkerId, TypeId)>,
}

/// Builds one graph: starting from the empty graph, draw a γ-CG uniformly,
/// instantiate it, specialize its type-variable labels by up to `max_spe`
/// steps, and join it in, until the graph has at least `min_size` nodes.
pub fn generate_one<R: Rng + ?Sized>(
    vocab: &Vocabulary,
    gammas: &[GammaCG],
    config: &GeneratorConfig,
    index: usize,
    rng: &mut R,
) -> Result<Generated, GenerateError> {
    if gammas.is_empty() {
        return Err(GenerateError::NoGammas);
    }
    let mut mint = LocalMint::new(format!("g{index}."));
    let mut acc = ConceptualGraph::new();
    let mut components = Vec::new();
    let mut available: Vec<usize> = (0..gammas.len()).collect();
    let mut set_aside = Vec::new();
    let mut stalled = 0;
    let mut last_error = None;

    while acc.size() < config.min_size {
        if available.is_empty() {
            return Err(GenerateError::Exhausted { index, last: last_error.expect("set aside after a failure") });
        }
        let slot = rng.random_range(0..available.len());
        let gamma = &gammas[available[slot]];

        let mut instance = None;
        let mut attempts = 0;
        while attempts < MAX_INSTANTIATION_ATTEMPTS {
            attempts += 1;
            match instantiate(vocab, gamma, config.relation_domain_policy, &mut mint, rng) {
                Ok(i) => {
                    instance = Some(i);
                    break;
                }
                Err(e) => last_error = Some(e),
            }
        }
        let Some(mut instance) = instance else {
            set_aside.push(gamma.name.clone());
            available.swap_remove(slot);
            continue;
        };

        let targets: Vec<VariableTarget> = gamma.variables.iter().map(|v| v.target).collect();
        let specs = specialize_labels(vocab, &mut instance.graph, &targets, config.max_spe, rng);

        let before = acc.size();
        let joined = join(vocab, &acc, &instance.graph);
        acc = joined.graph;
        components.push(ComponentRecord {
            gamma: gamma.name.clone(),
            attempts,
            assignments: instance.assignments,
            specializations: specs
                .into_iter()
                .map(|s| Specialization { node: joined.right_ids[&s.node], steps: s.steps })
                .collect(),
            merges: joined.merges,
            skipped_merges: joined.skipped,
        });

        if acc.size() == before {
            stalled += 1;
            if stalled >= MAX_STALLED_JOINS {
                return Err(GenerateError::NoProgress { index, stalled, size: acc.size(), min_size: config.min_size });
            }
        } else {
            stalled = 0;
        }
    }

    let minted = mint.into_minted();
    Ok(Generated {
        graph: acc,
        provenance: GenerationProvenance {
            index,
            components,
            set_aside,
            minted: minted
                .iter()
                .map(|(id, t)| MintedMarker { id: id.clone(), concept_type: vocab.concept_label(*t).to_owned() })
                .collect(),
        },
        minted,
    })
}

/// A generated dataset. `vocabulary` is the input vocabulary extended with
/// every marker minted during generation.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub vocabulary: Vocabulary,
    pub graphs: Vec<ConceptualGraph>,
    pub provenance: Vec<GenerationProvenance>,
}

fn check_inputs(vocab: &Vocabulary, gammas: &[GammaCG], config: &GeneratorConfig) -> Result<(), GenerateError> {
    config.validate()?;
    if gammas.is_empty() {
        return Err(GenerateError::NoGammas);
    }
    for g in gammas {
        let report = validate_gamma(vocab, g, config.relation_domain_policy);
        if !report.is_ok() {
            return Err(GenerateError::InvalidGamma { name: g.name.clone(), report });
        }
    }
    Ok(())
}

fn assemble(vocab: &Vocabulary, parts: Vec<Generated>) -> Dataset {
    let mut vocabulary = vocab.clone();
    let mut graphs = Vec::with_capacity(parts.len());
    let mut provenance = Vec::with_capacity(parts.len());
    for part in parts {
        for (m, t) in part.minted {
            let fresh = vocabulary.insert_marker(m, t);
            debug_assert!(fresh, "minted ids carry a per-graph prefix");
        }
        graphs.push(part.graph);
        provenance.push(part.provenance);
    }
    Dataset { vocabulary, graphs, provenance }
}

/// Generates `config.max_cgs` graphs sequentially.
pub fn generate_dataset(vocab: &Vocabulary, gammas: &[GammaCG], config: &GeneratorConfig) -> Result<Dataset, GenerateError> {
    generate_dataset_with_jobs(vocab, gammas, config, 1)
}

/// Generates `config.max_cgs` graphs on up to `jobs` threads. Graph `i` uses
/// its own stream derived from `(seed, i)`, so the output does not depend on
/// `jobs`.
pub fn generate_dataset_with_jobs(
    vocab: &Vocabulary,
    gammas: &[GammaCG],
    config: &GeneratorConfig,
    jobs: usize,
) -> Result<Dataset, GenerateError> {
    check_inputs(vocab, gammas, config)?;
    let build = |i: usize| {
        let mut rng = rng::stream(config.seed, Stage::Generate, i as u64);
        generate_one(vocab, gammas, config, i, &mut rng)
    };
    let parts: Vec<Generated> = if jobs <= 1 {
        (0..config.max_cgs).map(build).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| GenerateError::Pool(e.to_string()))?;
        pool.install(|| (0..config.max_cgs).into_par_iter().map(build).collect::<Result<_, _>>())?
    };
    Ok(assemble(vocab, parts))
}
