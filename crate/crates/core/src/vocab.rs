//! The vocabulary: concept types, relation types per arity, signatures and
//! individual markers with their types.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::{HierarchyError, HierarchyKind, TypeHierarchy, TypeId};

/// A relation type: its arity selects the hierarchy, `id` the type inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationTypeId {
    pub arity: usize,
    pub id: TypeId,
}

impl fmt::Display for RelationTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}/{}", self.id.0, self.arity)
    }
}

/// Identifier of an individual marker.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarkerId(String);

impl MarkerId {
    pub fn new(id: impl Into<String>) -> Self {
        MarkerId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MarkerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VocabularyError {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("relation type `{label}` declares arity 0")]
    ZeroArity { label: String },
    #[error("relation type `{label}` has arity {arity} but its signature has {found} restrictions")]
    SignatureLength { label: String, arity: usize, found: usize },
    #[error("{context}: unknown concept type `{label}`")]
    UnknownConceptType { context: String, label: String },
    #[error("signature of `{narrower}` is not at least as restrictive as `{wider}` at position {position}")]
    NonMonotone { narrower: String, wider: String, position: usize },
    #[error("label `{label}` is used by both a concept type and a relation type")]
    LabelClash { label: String },
    #[error("relation label `{label}` is declared for arities {first} and {second}")]
    RelationLabelClash { label: String, first: usize, second: usize },
    #[error("marker `{0}` declared twice")]
    DuplicateMarker(MarkerId),
    #[error("unknown relation type {0}")]
    UnknownRelationType(RelationTypeId),
    #[error("position {position} out of range for `{label}` of arity {arity}")]
    Arity { label: String, arity: usize, position: usize },
}

/// The vocabulary 5-tuple: concept hierarchy, one relation hierarchy per
/// arity, a signature per relation type, and the marker registry with its
/// typing map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    concepts: TypeHierarchy,
    relations: BTreeMap<usize, TypeHierarchy>,
    signatures: BTreeMap<usize, Vec<Vec<TypeId>>>,
    markers: BTreeMap<MarkerId, TypeId>,
    relation_labels: HashMap<String, RelationTypeId>,
}

impl Vocabulary {
    pub fn builder() -> VocabularyBuilder {
        VocabularyBuilder::default()
    }

    pub fn concepts(&self) -> &TypeHierarchy {
        &self.concepts
    }

    pub fn top(&self) -> TypeId {
        self.concepts.root()
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.relations.keys().copied()
    }

    pub fn relation_hierarchy(&self, arity: usize) -> Option<&TypeHierarchy> {
        self.relations.get(&arity)
    }

    /// Every relation type, ordered by arity then id.
    pub fn relation_types(&self) -> impl Iterator<Item = RelationTypeId> + '_ {
        self.relations
            .iter()
            .flat_map(|(&arity, h)| h.types().map(move |id| RelationTypeId { arity, id }))
    }

    pub fn relation_count(&self) -> usize {
        self.relations.values().map(TypeHierarchy::len).sum()
    }

    /// Relation types of one arity, in id order.
    pub fn relation_types_of_arity(&self, arity: usize) -> impl Iterator<Item = RelationTypeId> + '_ {
        self.relations
            .get(&arity)
            .into_iter()
            .flat_map(move |h| h.types().map(move |id| RelationTypeId { arity, id }))
    }

    pub fn has_relation(&self, r: RelationTypeId) -> bool {
        self.relations.get(&r.arity).is_some_and(|h| h.contains(r.id))
    }

    pub fn relation_label(&self, r: RelationTypeId) -> &str {
        self.relations[&r.arity].label(r.id)
    }

    pub fn lookup_relation(&self, label: &str) -> Option<RelationTypeId> {
        self.relation_labels.get(label).copied()
    }

    pub fn concept_label(&self, t: TypeId) -> &str {
        self.concepts.label(t)
    }

    pub fn lookup_concept(&self, label: &str) -> Option<TypeId> {
        self.concepts.lookup(label)
    }

    /// `a ≤ b` between relation types; types of different arity are never
    /// comparable.
    pub fn relation_le(&self, a: RelationTypeId, b: RelationTypeId) -> bool {
        a.arity == b.arity && self.relations[&a.arity].le(a.id, b.id)
    }

    pub fn signature(&self, r: RelationTypeId) -> Result<&[TypeId], VocabularyError> {
        self.signatures
            .get(&r.arity)
            .and_then(|s| s.get(r.id.index()))
            .map(Vec::as_slice)
            .ok_or(VocabularyError::UnknownRelationType(r))
    }

    /// Concept-type restriction at argument `position` of `r`.
    pub fn restriction_for(&self, r: RelationTypeId, position: usize) -> Result<TypeId, VocabularyError> {
        let sig = self.signature(r)?;
        sig.get(position).copied().ok_or_else(|| VocabularyError::Arity {
            label: self.relation_label(r).to_owned(),
            arity: r.arity,
            position,
        })
    }

    /// Signature lookup for ids that are known to be valid.
    pub(crate) fn sig(&self, r: RelationTypeId) -> &[TypeId] {
        &self.signatures[&r.arity][r.id.index()]
    }

    pub fn markers(&self) -> impl ExactSizeIterator<Item = (&MarkerId, TypeId)> + '_ {
        self.markers.iter().map(|(m, &t)| (m, t))
    }

    pub fn marker_count(&self) -> usize {
        self.markers.len()
    }

    pub fn marker_type(&self, m: &MarkerId) -> Option<TypeId> {
        self.markers.get(m).copied()
    }

    /// Registers a fresh marker typed `concept_type` and returns it.
    pub fn mint_marker(&mut self, concept_type: TypeId) -> MarkerId {
        let base = self.concepts.label(concept_type).to_owned();
        let mut n = self.markers.len();
        loop {
            let candidate = MarkerId(format!("{base}#{n}"));
            if !self.markers.contains_key(&candidate) {
                self.markers.insert(candidate.clone(), concept_type);
                return candidate;
            }
            n += 1;
        }
    }

    /// Adds an already-named marker; returns false if the id is taken.
    pub(crate) fn insert_marker(&mut self, m: MarkerId, concept_type: TypeId) -> bool {
        use std::collections::btree_map::Entry;
        match self.markers.entry(m) {
            Entry::Vacant(v) => {
                v.insert(concept_type);
                true
            }
            Entry::Occupied(_) => false,
        }
    }

    /// Every violated pointwise monotonicity constraint, as
    /// `(narrower, wider, position)`. Empty for a well-formed vocabulary.
    pub fn monotonicity_violations(&self) -> Vec<(RelationTypeId, RelationTypeId, usize)> {
        let mut out = Vec::new();
        for (&arity, h) in &self.relations {
            let sigs = &self.signatures[&arity];
            for narrow in h.types() {
                for wide in h.ancestors_or_self(narrow) {
                    let pairs = sigs[narrow.index()].iter().zip(&sigs[wide.index()]);
                    for (k, (&a, &b)) in pairs.enumerate() {
                        if !self.concepts.le(a, b) {
                            out.push((RelationTypeId { arity, id: narrow }, RelationTypeId { arity, id: wide }, k));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct RelationDecl {
    label: String,
    arity: usize,
    parents: Vec<String>,
    signature: Vec<String>,
}

/// Collects declarations by label and checks every vocabulary invariant on
/// [`build`](VocabularyBuilder::build).
#[derive(Debug, Clone, Default)]
pub struct VocabularyBuilder {
    concepts: Vec<(String, Vec<String>)>,
    relations: Vec<RelationDecl>,
    markers: Vec<(String, String)>,
}

impl VocabularyBuilder {
    pub fn concept<I, S>(&mut self, label: impl Into<String>, parents: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.concepts
            .push((label.into(), parents.into_iter().map(Into::into).collect()));
        self
    }

    pub fn relation<I, S, J, T>(&mut self, label: impl Into<String>, parents: I, signature: J) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        J: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let signature: Vec<String> = signature.into_iter().map(Into::into).collect();
        self.relation_with_arity(label, signature.len(), parents, signature)
    }

    /// Declares a relation with an explicit arity, so a signature of the
    /// wrong length is reported instead of silently defining the arity.
    pub fn relation_with_arity<I, S, J, T>(
        &mut self,
        label: impl Into<String>,
        arity: usize,
        parents: I,
        signature: J,
    ) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        J: IntoIterator<Item = T>,
        T: Into<String>,
    {
        self.relations.push(RelationDecl {
            label: label.into(),
            arity,
            parents: parents.into_iter().map(Into::into).collect(),
            signature: signature.into_iter().map(Into::into).collect(),
        });
        self
    }

    pub fn marker(&mut self, id: impl Into<String>, concept_type: impl Into<String>) -> &mut Self {
        self.markers.push((id.into(), concept_type.into()));
        self
    }

    pub fn build(&self) -> Result<Vocabulary, VocabularyError> {
        let concepts = TypeHierarchy::new(HierarchyKind::Concept, self.concepts.iter().cloned())?;

        let mut by_arity: BTreeMap<usize, Vec<&RelationDecl>> = BTreeMap::new();
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for decl in &self.relations {
            if decl.arity == 0 {
                return Err(VocabularyError::ZeroArity { label: decl.label.clone() });
            }
            if decl.signature.len() != decl.arity {
                return Err(VocabularyError::SignatureLength {
                    label: decl.label.clone(),
                    arity: decl.arity,
                    found: decl.signature.len(),
                });
            }
            if concepts.lookup(&decl.label).is_some() {
                return Err(VocabularyError::LabelClash { label: decl.label.clone() });
            }
            if let Some(&other) = seen.get(decl.label.as_str()) {
                if other != decl.arity {
                    return Err(VocabularyError::RelationLabelClash {
                        label: decl.label.clone(),
                        first: other,
                        second: decl.arity,
                    });
                }
            }
            seen.insert(&decl.label, decl.arity);
            by_arity.entry(decl.arity).or_default().push(decl);
        }

        let mut relations = BTreeMap::new();
        let mut signatures = BTreeMap::new();
        let mut relation_labels = HashMap::new();
        for (arity, decls) in by_arity {
            let h = TypeHierarchy::new(
                HierarchyKind::Relation { arity },
                decls.iter().map(|d| (d.label.clone(), d.parents.clone())),
            )?;
            let mut sigs = vec![Vec::new(); h.len()];
            for d in decls {
                let id = h.lookup(&d.label).expect("label was just inserted");
                sigs[id.index()] = d
                    .signature
                    .iter()
                    .map(|l| {
                        concepts.lookup(l).ok_or_else(|| VocabularyError::UnknownConceptType {
                            context: format!("signature of `{}`", d.label),
                            label: l.clone(),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                relation_labels.insert(d.label.clone(), RelationTypeId { arity, id });
            }
            relations.insert(arity, h);
            signatures.insert(arity, sigs);
        }

        let mut markers = BTreeMap::new();
        for (id, ty) in &self.markers {
            let t = concepts.lookup(ty).ok_or_else(|| VocabularyError::UnknownConceptType {
                context: format!("marker `{id}`"),
                label: ty.clone(),
            })?;
            if markers.insert(MarkerId(id.clone()), t).is_some() {
                return Err(VocabularyError::DuplicateMarker(MarkerId(id.clone())));
            }
        }

        let vocab = Vocabulary { concepts, relations, signatures, markers, relation_labels };
        if let Some(&(narrow, wide, position)) = vocab.monotonicity_violations().first() {
            return Err(VocabularyError::NonMonotone {
                narrower: vocab.relation_label(narrow).to_owned(),
                wider: vocab.relation_label(wide).to_owned(),
                position,
            });
        }
        Ok(vocab)
    }
}
