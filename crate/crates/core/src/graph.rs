//! Conceptual graphs: bipartite labeled multigraphs of concept and relation
//! nodes, plus conformance checking against a vocabulary.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::TypeId;
use crate::vocab::{MarkerId, RelationTypeId, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptNode {
    pub id: NodeId,
    pub concept_type: TypeId,
    /// `None` for a generic node.
    pub marker: Option<MarkerId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationNode {
    pub id: NodeId,
    pub relation_type: RelationTypeId,
    /// Concept node at each argument position; repeats are allowed.
    pub arguments: Vec<NodeId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node id {0} used more than once")]
    DuplicateNode(NodeId),
    #[error("relation {relation} argument {position} refers to {argument}, which is not a concept node")]
    DanglingArgument { relation: NodeId, position: usize, argument: NodeId },
    #[error("relation {relation} has {found} arguments but its type has arity {arity}")]
    ArityMismatch { relation: NodeId, arity: usize, found: usize },
    #[error("no node {0}")]
    UnknownNode(NodeId),
    #[error("{0} is not a concept node")]
    NotAConcept(NodeId),
    #[error("{0} is not a relation node")]
    NotARelation(NodeId),
}

/// A conceptual graph `(C, R, E, label)`. Edges are the positional
/// `arguments` of each relation node.
///
/// Both node lists are kept sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptualGraph {
    concepts: Vec<ConceptNode>,
    relations: Vec<RelationNode>,
    next_id: u32,
}

impl ConceptualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assembles a graph from explicit nodes, checking id uniqueness, arity
    /// and that every argument resolves to a concept node.
    pub fn from_parts(mut concepts: Vec<ConceptNode>, mut relations: Vec<RelationNode>) -> Result<Self, GraphError> {
        concepts.sort_by_key(|c| c.id);
        relations.sort_by_key(|r| r.id);
        let mut ids = HashSet::with_capacity(concepts.len() + relations.len());
        for id in concepts.iter().map(|c| c.id).chain(relations.iter().map(|r| r.id)) {
            if !ids.insert(id) {
                return Err(GraphError::DuplicateNode(id));
            }
        }
        let next_id = ids.iter().map(|i| i.0 + 1).max().unwrap_or(0);
        let g = ConceptualGraph { concepts, relations, next_id };
        for r in &g.relations {
            g.check_relation(r)?;
        }
        Ok(g)
    }

    fn check_relation(&self, r: &RelationNode) -> Result<(), GraphError> {
        if r.arguments.len() != r.relation_type.arity {
            return Err(GraphError::ArityMismatch {
                relation: r.id,
                arity: r.relation_type.arity,
                found: r.arguments.len(),
            });
        }
        for (position, &argument) in r.arguments.iter().enumerate() {
            if self.concept(argument).is_none() {
                return Err(GraphError::DanglingArgument { relation: r.id, position, argument });
            }
        }
        Ok(())
    }

    fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn add_concept(&mut self, concept_type: TypeId, marker: Option<MarkerId>) -> NodeId {
        let id = self.fresh_id();
        self.concepts.push(ConceptNode { id, concept_type, marker });
        id
    }

    pub fn add_relation(&mut self, relation_type: RelationTypeId, arguments: Vec<NodeId>) -> Result<NodeId, GraphError> {
        let node = RelationNode { id: NodeId(self.next_id), relation_type, arguments };
        self.check_relation(&node)?;
        self.next_id += 1;
        self.relations.push(node);
        Ok(NodeId(self.next_id - 1))
    }

    pub fn concepts(&self) -> &[ConceptNode] {
        &self.concepts
    }

    pub fn relations(&self) -> &[RelationNode] {
        &self.relations
    }

    /// Node count, concepts plus relations.
    pub fn size(&self) -> usize {
        self.concepts.len() + self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// One past the largest id ever allocated.
    pub fn next_id(&self) -> u32 {
        self.next_id
    }

    pub fn concept(&self, id: NodeId) -> Option<&ConceptNode> {
        self.concepts
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.concepts[i])
    }

    pub fn relation(&self, id: NodeId) -> Option<&RelationNode> {
        self.relations
            .binary_search_by_key(&id, |r| r.id)
            .ok()
            .map(|i| &self.relations[i])
    }

    pub(crate) fn concept_mut(&mut self, id: NodeId) -> Option<&mut ConceptNode> {
        match self.concepts.binary_search_by_key(&id, |c| c.id) {
            Ok(i) => Some(&mut self.concepts[i]),
            Err(_) => None,
        }
    }

    pub(crate) fn relation_mut(&mut self, id: NodeId) -> Option<&mut RelationNode> {
        match self.relations.binary_search_by_key(&id, |r| r.id) {
            Ok(i) => Some(&mut self.relations[i]),
            Err(_) => None,
        }
    }

    /// `(relation node, position)` for every argument slot filled by `c`.
    pub fn incident(&self, c: NodeId) -> impl Iterator<Item = (&RelationNode, usize)> + '_ {
        self.relations.iter().flat_map(move |r| {
            r.arguments
                .iter()
                .enumerate()
                .filter(move |(_, &a)| a == c)
                .map(move |(k, _)| (r, k))
        })
    }

    /// Rebuilds from parts that are already consistent. Used by operators
    /// that construct nodes themselves.
    pub(crate) fn from_trusted(concepts: Vec<ConceptNode>, relations: Vec<RelationNode>, next_id: u32) -> Self {
        debug_assert!(concepts.windows(2).all(|w| w[0].id < w[1].id));
        debug_assert!(relations.windows(2).all(|w| w[0].id < w[1].id));
        ConceptualGraph { concepts, relations, next_id }
    }
}

/// One conformance problem found by a validator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownConceptType { node: NodeId },
    UnknownRelationType { node: NodeId },
    UnknownMarker { node: NodeId, marker: MarkerId },
    /// The argument's type is not below the relation's restriction.
    Signature {
        relation: NodeId,
        relation_type: String,
        position: usize,
        concept: NodeId,
        concept_type: String,
        restriction: String,
    },
    /// A marked node whose type is not below the marker's declared type.
    MarkerType { node: NodeId, concept_type: String, marker: MarkerId, marker_type: String },
    DanglingTarget { variable: String, node: NodeId },
    DuplicateTarget { variable: String, node: NodeId },
    EmptyDomain { variable: String },
    DomainKind { variable: String },
    InadmissibleValue { variable: String, value: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            UnknownConceptType { node } => write!(f, "concept node {node}: unknown concept type"),
            UnknownRelationType { node } => write!(f, "relation node {node}: unknown relation type"),
            UnknownMarker { node, marker } => write!(f, "concept node {node}: unknown marker `{marker}`"),
            Signature { relation, relation_type, position, concept, concept_type, restriction } => write!(
                f,
                "relation node {relation} ({relation_type}) position {position}: concept {concept} of type \
                 `{concept_type}` is not below restriction `{restriction}`"
            ),
            MarkerType { node, concept_type, marker, marker_type } => write!(
                f,
                "concept node {node}: type `{concept_type}` is not below `{marker_type}`, the type of marker `{marker}`"
            ),
            DanglingTarget { variable, node } => write!(f, "variable `{variable}`: target node {node} does not exist"),
            DuplicateTarget { variable, node } => {
                write!(f, "variable `{variable}`: label slot of node {node} already has a variable")
            }
            EmptyDomain { variable } => write!(f, "variable `{variable}`: empty domain"),
            DomainKind { variable } => write!(f, "variable `{variable}`: domain kind does not match its target"),
            InadmissibleValue { variable, value } => {
                write!(f, "variable `{variable}`: value `{value}` is not admissible for its target")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every label of `g` against `vocab`: types and markers exist, each
/// argument satisfies its signature restriction, and each marked node's type
/// is at or below the marker's type.
pub fn validate_graph(vocab: &Vocabulary, g: &ConceptualGraph) -> ValidationReport {
    let concepts = vocab.concepts();
    let mut report = ValidationReport::default();
    for c in g.concepts() {
        if !concepts.contains(c.concept_type) {
            report.push(Violation::UnknownConceptType { node: c.id });
            continue;
        }
        if let Some(m) = &c.marker {
            match vocab.marker_type(m) {
                None => report.push(Violation::UnknownMarker { node: c.id, marker: m.clone() }),
                Some(mt) if !concepts.le(c.concept_type, mt) => report.push(Violation::MarkerType {
                    node: c.id,
                    concept_type: concepts.label(c.concept_type).to_owned(),
                    marker: m.clone(),
                    marker_type: concepts.label(mt).to_owned(),
                }),
                Some(_) => {}
            }
        }
    }
    for r in g.relations() {
        if !vocab.has_relation(r.relation_type) {
            report.push(Violation::UnknownRelationType { node: r.id });
            continue;
        }
        let sig = vocab.sig(r.relation_type);
        for (position, &arg) in r.arguments.iter().enumerate() {
            let Some(c) = g.concept(arg) else { continue };
            if !concepts.contains(c.concept_type) {
                continue;
            }
            if !concepts.le(c.concept_type, sig[position]) {
                report.push(Violation::Signature {
                    relation: r.id,
                    relation_type: vocab.relation_label(r.relation_type).to_owned(),
                    position,
                    concept: c.id,
                    concept_type: concepts.label(c.concept_type).to_owned(),
                    restriction: concepts.label(sig[position]).to_owned(),
                });
            }
        }
    }
    report
}
