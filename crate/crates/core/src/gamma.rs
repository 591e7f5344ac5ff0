//! γ-CGs: conceptual graphs whose labels may be variables with explicit
//! value domains, and the machinery to compute admissible domains and to
//! instantiate variables.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{validate_graph, ConceptualGraph, GraphError, NodeId, ValidationReport, Violation};
use crate::hierarchy::TypeId;
use crate::vocab::{MarkerId, RelationTypeId, Vocabulary};

/// How the admissible values of a relation-type variable are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationDomainPolicy {
    /// Any relation type of the same arity.
    ArityOnly,
    /// Same arity, and every current argument type is at or below the
    /// candidate's restriction at that position.
    #[default]
    SignatureCompatible,
}

/// The label slot a variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariableTarget {
    RelationType(NodeId),
    ConceptType(NodeId),
    Marker(NodeId),
}

impl VariableTarget {
    pub fn node(self) -> NodeId {
        match self {
            VariableTarget::RelationType(n) | VariableTarget::ConceptType(n) | VariableTarget::Marker(n) => n,
        }
    }

    fn rank(self) -> u8 {
        match self {
            VariableTarget::RelationType(_) => 0,
            VariableTarget::ConceptType(_) => 1,
            VariableTarget::Marker(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    RelationTypes(BTreeSet<RelationTypeId>),
    ConceptTypes(BTreeSet<TypeId>),
    Markers(BTreeSet<MarkerId>),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Domain::RelationTypes(s) => s.len(),
            Domain::ConceptTypes(s) => s.len(),
            Domain::Markers(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn matches(&self, target: VariableTarget) -> bool {
        matches!(
            (self, target),
            (Domain::RelationTypes(_), VariableTarget::RelationType(_))
                | (Domain::ConceptTypes(_), VariableTarget::ConceptType(_))
                | (Domain::Markers(_), VariableTarget::Marker(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub target: VariableTarget,
    pub domain: Domain,
}

/// A conceptual graph with zero or more label variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaCG {
    pub name: String,
    pub graph: ConceptualGraph,
    pub variables: Vec<Variable>,
}

impl GammaCG {
    pub fn new(name: impl Into<String>, graph: ConceptualGraph) -> Self {
        GammaCG { name: name.into(), graph, variables: Vec::new() }
    }

    pub fn has_variable_on(&self, target: VariableTarget) -> bool {
        self.variables.iter().any(|v| v.target == target)
    }

    /// First `v<n>` name not used by an existing variable.
    pub fn fresh_variable_name(&self) -> String {
        let taken: HashSet<&str> = self.variables.iter().map(|v| v.name.as_str()).collect();
        (1..)
            .map(|n| format!("v{n}"))
            .find(|n| !taken.contains(n.as_str()))
            .expect("unbounded range")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("concept node {0} carries no marker")]
    NoMarker(NodeId),
    #[error("concept node {node} carries unknown marker `{marker}`")]
    UnknownMarker { node: NodeId, marker: MarkerId },
    #[error("variable `{variable}`: no value in its domain fits the graph at draw time")]
    EmptyEffectiveDomain { variable: String },
    #[error("variable `{variable}`: domain kind does not match its target")]
    DomainKind { variable: String },
}

fn relation_node(g: &ConceptualGraph, node: NodeId) -> Result<&crate::graph::RelationNode, GraphError> {
    g.relation(node).ok_or(if g.concept(node).is_some() {
        GraphError::NotARelation(node)
    } else {
        GraphError::UnknownNode(node)
    })
}

fn concept_node(g: &ConceptualGraph, node: NodeId) -> Result<&crate::graph::ConceptNode, GraphError> {
    g.concept(node).ok_or(if g.relation(node).is_some() {
        GraphError::NotAConcept(node)
    } else {
        GraphError::UnknownNode(node)
    })
}

fn signature_accepts(vocab: &Vocabulary, g: &ConceptualGraph, args: &[NodeId], candidate: RelationTypeId) -> bool {
    let concepts = vocab.concepts();
    vocab
        .sig(candidate)
        .iter()
        .zip(args)
        .all(|(&restriction, &a)| g.concept(a).is_some_and(|c| concepts.le(c.concept_type, restriction)))
}

/// Admissible relation types for the relation node `node`.
pub fn relation_type_domain(
    vocab: &Vocabulary,
    g: &ConceptualGraph,
    node: NodeId,
    policy: RelationDomainPolicy,
) -> Result<BTreeSet<RelationTypeId>, GraphError> {
    let r = relation_node(g, node)?;
    let same_arity = vocab.relation_types_of_arity(r.relation_type.arity);
    Ok(match policy {
        RelationDomainPolicy::ArityOnly => same_arity.collect(),
        RelationDomainPolicy::SignatureCompatible => same_arity
            .filter(|&cand| signature_accepts(vocab, g, &r.arguments, cand))
            .collect(),
    })
}

/// Restrictions imposed on concept node `c` by every argument slot it fills.
fn restrictions_on(vocab: &Vocabulary, g: &ConceptualGraph, c: NodeId) -> Vec<TypeId> {
    let mut out: Vec<TypeId> = g.incident(c).map(|(r, k)| vocab.sig(r.relation_type)[k]).collect();
    out.sort();
    out.dedup();
    out
}

/// Concept types `t` with `t ≤ σ(r)(k)` for every slot `(r, k)` filled by
/// the concept node.
pub fn concept_type_domain(vocab: &Vocabulary, g: &ConceptualGraph, node: NodeId) -> Result<BTreeSet<TypeId>, GraphError> {
    concept_node(g, node)?;
    let restrictions = restrictions_on(vocab, g, node);
    let concepts = vocab.concepts();
    Ok(concepts
        .types()
        .filter(|&t| restrictions.iter().all(|&r| concepts.le(t, r)))
        .collect())
}

/// Markers `m` with `τ(m) ≤ τ(m_i)` where `m_i` is the node's marker.
pub fn marker_domain(vocab: &Vocabulary, g: &ConceptualGraph, node: NodeId) -> Result<BTreeSet<MarkerId>, GammaError> {
    let c = concept_node(g, node)?;
    let current = c.marker.as_ref().ok_or(GammaError::NoMarker(node))?;
    let bound = vocab
        .marker_type(current)
        .ok_or_else(|| GammaError::UnknownMarker { node, marker: current.clone() })?;
    let concepts = vocab.concepts();
    Ok(vocab
        .markers()
        .filter(|&(_, t)| concepts.le(t, bound))
        .map(|(m, _)| m.clone())
        .collect())
}

/// The admissible domain of `target`, materialized in the same shape as a
/// variable domain.
pub fn admissible_domain(
    vocab: &Vocabulary,
    g: &ConceptualGraph,
    target: VariableTarget,
    policy: RelationDomainPolicy,
) -> Result<Domain, GammaError> {
    Ok(match target {
        VariableTarget::RelationType(n) => Domain::RelationTypes(relation_type_domain(vocab, g, n, policy)?),
        VariableTarget::ConceptType(n) => Domain::ConceptTypes(concept_type_domain(vocab, g, n)?),
        VariableTarget::Marker(n) => Domain::Markers(marker_domain(vocab, g, n)?),
    })
}

/// Checks that `variable.domain` is non-empty and contained in the
/// admissible domain of its target.
pub fn validate_domain(
    vocab: &Vocabulary,
    gcg: &GammaCG,
    variable: &Variable,
    policy: RelationDomainPolicy,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let name = || variable.name.clone();
    if variable.domain.is_empty() {
        report.push(Violation::EmptyDomain { variable: name() });
    }
    if !variable.domain.matches(variable.target) {
        report.push(Violation::DomainKind { variable: name() });
        return report;
    }
    let admissible = match admissible_domain(vocab, &gcg.graph, variable.target, policy) {
        Ok(d) => d,
        Err(GammaError::Graph(_)) => {
            report.push(Violation::DanglingTarget { variable: name(), node: variable.target.node() });
            return report;
        }
        Err(GammaError::UnknownMarker { node, marker }) => {
            report.push(Violation::UnknownMarker { node, marker });
            return report;
        }
        Err(_) => {
            // a marker variable on a generic node: nothing bounds it
            report.push(Violation::DomainKind { variable: name() });
            return report;
        }
    };
    let mut bad = |value: String| report.push(Violation::InadmissibleValue { variable: name(), value });
    match (&variable.domain, &admissible) {
        (Domain::RelationTypes(d), Domain::RelationTypes(a)) => {
            for r in d.difference(a) {
                let label = if vocab.has_relation(*r) { vocab.relation_label(*r).to_owned() } else { r.to_string() };
                bad(label);
            }
        }
        (Domain::ConceptTypes(d), Domain::ConceptTypes(a)) => {
            for t in d.difference(a) {
                let label =
                    if vocab.concepts().contains(*t) { vocab.concept_label(*t).to_owned() } else { t.to_string() };
                bad(label);
            }
        }
        (Domain::Markers(d), Domain::Markers(a)) => {
            for m in d.difference(a) {
                bad(m.to_string());
            }
        }
        _ => unreachable!("kind checked above"),
    }
    report
}

/// Full conformance check: the graph, variable targets, and every domain.
pub fn validate_gamma(vocab: &Vocabulary, gcg: &GammaCG, policy: RelationDomainPolicy) -> ValidationReport {
    let mut report = validate_graph(vocab, &gcg.graph);
    let mut slots = HashSet::new();
    for v in &gcg.variables {
        if !slots.insert(v.target) {
            report.push(Violation::DuplicateTarget { variable: v.name.clone(), node: v.target.node() });
        }
        report.extend(validate_domain(vocab, gcg, v, policy));
    }
    report
}

/// Registry of markers created while instantiating one graph. Ids are
/// derived from a per-graph prefix so independent mints never collide.
#[derive(Debug, Clone, Default)]
pub struct LocalMint {
    prefix: String,
    minted: Vec<(MarkerId, TypeId)>,
}

impl LocalMint {
    pub fn new(prefix: impl Into<String>) -> Self {
        LocalMint { prefix: prefix.into(), minted: Vec::new() }
    }

    pub fn mint(&mut self, vocab: &Vocabulary, concept_type: TypeId) -> MarkerId {
        let base = vocab.concept_label(concept_type);
        let mut n = self.minted.len();
        loop {
            let id = MarkerId::new(format!("{base}#{}{n}", self.prefix));
            if vocab.marker_type(&id).is_none() && !self.minted.iter().any(|(m, _)| *m == id) {
                self.minted.push((id.clone(), concept_type));
                return id;
            }
            n += 1;
        }
    }

    pub fn marker_type(&self, m: &MarkerId) -> Option<TypeId> {
        self.minted.iter().find(|(x, _)| x == m).map(|&(_, t)| t)
    }

    pub fn minted(&self) -> &[(MarkerId, TypeId)] {
        &self.minted
    }

    pub fn into_minted(self) -> Vec<(MarkerId, TypeId)> {
        self.minted
    }
}

/// One variable's drawn value, rendered as a label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub variable: String,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct Instantiation {
    pub graph: ConceptualGraph,
    pub assignments: Vec<Assignment>,
}

fn pick<T: Clone, R: Rng + ?Sized>(items: &[T], rng: &mut R) -> Option<T> {
    if items.is_empty() {
        None
    } else {
        Some(items[rng.random_range(0..items.len())].clone())
    }
}

/// Replaces every variable's label with a value drawn uniformly from the
/// part of its domain that keeps the graph conformant.
///
/// Relation-type variables are drawn first, then concept types, then
/// markers, so each draw sees the earlier choices. Drawing a marker narrows
/// the node's type to the more specific of its type and the marker's type;
/// when no marker fits, a fresh one is minted for the node's type.
pub fn instantiate<R: Rng + ?Sized>(
    vocab: &Vocabulary,
    gcg: &GammaCG,
    policy: RelationDomainPolicy,
    mint: &mut LocalMint,
    rng: &mut R,
) -> Result<Instantiation, GammaError> {
    let concepts = vocab.concepts();
    let mut g = gcg.graph.clone();
    let mut assignments = Vec::with_capacity(gcg.variables.len());

    let mut order: Vec<&Variable> = gcg.variables.iter().collect();
    order.sort_by_key(|v| v.target.rank());
    let marker_vars: HashSet<NodeId> = gcg
        .variables
        .iter()
        .filter_map(|v| match v.target {
            VariableTarget::Marker(n) => Some(n),
            _ => None,
        })
        .collect();

    for var in order {
        let empty = || GammaError::EmptyEffectiveDomain { variable: var.name.clone() };
        let value = match (var.target, &var.domain) {
            (VariableTarget::RelationType(node), Domain::RelationTypes(domain)) => {
                let args = relation_node(&g, node)?.arguments.clone();
                let arity = args.len();
                let candidates: Vec<RelationTypeId> = domain
                    .iter()
                    .copied()
                    .filter(|&r| r.arity == arity && vocab.has_relation(r))
                    .filter(|&r| match policy {
                        RelationDomainPolicy::SignatureCompatible => signature_accepts(vocab, &g, &args, r),
                        RelationDomainPolicy::ArityOnly => vocab.sig(r).iter().zip(&args).all(|(&s, a)| {
                            g.concept(*a).is_some_and(|c| concepts.comparable(c.concept_type, s))
                        }),
                    })
                    .collect();
                let chosen = pick(&candidates, rng).ok_or_else(empty)?;
                // Arguments more general than a restriction are narrowed to it.
                for (k, a) in args.iter().enumerate() {
                    let s = vocab.sig(chosen)[k];
                    let c = g.concept_mut(*a).expect("argument checked");
                    if let Some(t) = concepts.meet_if_comparable(c.concept_type, s) {
                        c.concept_type = t;
                    }
                }
                g.relation_mut(node).expect("checked above").relation_type = chosen;
                vocab.relation_label(chosen).to_owned()
            }
            (VariableTarget::ConceptType(node), Domain::ConceptTypes(domain)) => {
                let node_ref = concept_node(&g, node)?;
                let marker_bound = match (&node_ref.marker, marker_vars.contains(&node)) {
                    (Some(m), false) => vocab.marker_type(m).or_else(|| mint.marker_type(m)),
                    _ => None,
                };
                let restrictions = restrictions_on(vocab, &g, node);
                let candidates: Vec<TypeId> = domain
                    .iter()
                    .copied()
                    .filter(|&t| concepts.contains(t))
                    .filter(|&t| restrictions.iter().all(|&r| concepts.le(t, r)))
                    .filter(|&t| marker_bound.is_none_or(|b| concepts.le(t, b)))
                    .collect();
                let chosen = pick(&candidates, rng).ok_or_else(empty)?;
                g.concept_mut(node).expect("checked above").concept_type = chosen;
                vocab.concept_label(chosen).to_owned()
            }
            (VariableTarget::Marker(node), Domain::Markers(domain)) => {
                let current = concept_node(&g, node)?.concept_type;
                let candidates: Vec<(MarkerId, TypeId)> = domain
                    .iter()
                    .filter_map(|m| vocab.marker_type(m).map(|t| (m.clone(), t)))
                    .filter(|&(_, t)| concepts.comparable(current, t))
                    .collect();
                let (marker, narrowed) = match pick(&candidates, rng) {
                    Some((m, t)) => (m, concepts.meet_if_comparable(current, t).expect("filtered comparable")),
                    None => (mint.mint(vocab, current), current),
                };
                let c = g.concept_mut(node).expect("checked above");
                c.concept_type = narrowed;
                c.marker = Some(marker.clone());
                marker.to_string()
            }
            _ => return Err(GammaError::DomainKind { variable: var.name.clone() }),
        };
        assignments.push(Assignment { variable: var.name.clone(), value });
    }
    Ok(Instantiation { graph: g, assignments })
}

/// How far one label was walked down its hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Specialization {
    pub node: NodeId,
    pub steps: usize,
}

/// Specializes the given type labels by up to `max_steps` downward moves
/// each: relation labels first, through children whose signature the current
/// arguments satisfy, then concept labels.
pub fn specialize_labels<R: Rng + ?Sized>(
    vocab: &Vocabulary,
    g: &mut ConceptualGraph,
    targets: &[VariableTarget],
    max_steps: usize,
    rng: &mut R,
) -> Vec<Specialization> {
    let mut ordered: Vec<VariableTarget> = targets
        .iter()
        .copied()
        .filter(|t| !matches!(t, VariableTarget::Marker(_)))
        .collect();
    ordered.sort_by_key(|t| t.rank());
    let mut out = Vec::with_capacity(ordered.len());
    for target in ordered {
        match target {
            VariableTarget::RelationType(node) => {
                let Some(r) = g.relation(node) else { continue };
                let (current, args) = (r.relation_type, r.arguments.clone());
                let h = vocab.relation_hierarchy(current.arity).expect("valid relation type");
                let (id, steps) = h.random_descendant_where(current.id, max_steps, rng, |child| {
                    signature_accepts(vocab, g, &args, RelationTypeId { arity: current.arity, id: child })
                });
                g.relation_mut(node).expect("exists").relation_type = RelationTypeId { arity: current.arity, id };
                out.push(Specialization { node, steps });
            }
            VariableTarget::ConceptType(node) => {
                let Some(c) = g.concept_mut(node) else { continue };
                let (t, steps) = vocab.concepts().random_descendant_where(c.concept_type, max_steps, rng, |_| true);
                c.concept_type = t;
                out.push(Specialization { node, steps });
            }
            VariableTarget::Marker(_) => unreachable!("filtered"),
        }
    }
    out
}

impl fmt::Display for VariableTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariableTarget::RelationType(n) => write!(f, "relation type of {n}"),
            VariableTarget::ConceptType(n) => write!(f, "concept type of {n}"),
            VariableTarget::Marker(n) => write!(f, "marker of {n}"),
        }
    }
}
