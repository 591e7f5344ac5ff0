//! Type hierarchies: finite partial orders stored as direct-parent DAGs.
//!
//! A hierarchy is built once from `(label, parent labels)` entries. Nodes are
//! sorted by label so that two hierarchies with the same content compare equal
//! and serialize identically, whatever order they were declared in.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a type inside one [`TypeHierarchy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeId(pub u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HierarchyKind {
    Concept,
    Relation { arity: usize },
}

impl fmt::Display for HierarchyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HierarchyKind::Concept => f.write_str("concept hierarchy"),
            HierarchyKind::Relation { arity } => write!(f, "arity-{arity} relation hierarchy"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("{kind}: no types declared")]
    Empty { kind: HierarchyKind },
    #[error("{kind}: duplicate type label `{label}`")]
    DuplicateLabel { kind: HierarchyKind, label: String },
    #[error("{kind}: type `{child}` names unknown parent `{parent}`")]
    UnknownParent { kind: HierarchyKind, child: String, parent: String },
    #[error("{kind}: expected exactly one root type, found {found:?}")]
    Root { kind: HierarchyKind, found: Vec<String> },
    #[error("{kind}: parent relation has a cycle through `{label}`")]
    Cycle { kind: HierarchyKind, label: String },
    #[error("{kind}: unknown type {id}")]
    UnknownType { kind: HierarchyKind, id: TypeId },
}

/// A finite partial order of types with a single greatest element.
///
/// The order is stored as direct parents; the reflexive-transitive closure is
/// materialized as one ancestor bitset per type, so `is_subtype` is O(1).
#[derive(Debug, Clone)]
pub struct TypeHierarchy {
    kind: HierarchyKind,
    labels: Vec<String>,
    parents: Vec<Vec<TypeId>>,
    children: Vec<Vec<TypeId>>,
    root: TypeId,
    by_label: HashMap<String, TypeId>,
    ancestors: Vec<FixedBitSet>,
    depth: Vec<u32>,
}

impl PartialEq for TypeHierarchy {
    fn eq(&self, other: &Self) -> bool {
        // everything else is derived from these
        self.kind == other.kind
            && self.labels == other.labels
            && self.parents == other.parents
            && self.root == other.root
    }
}

impl Eq for TypeHierarchy {}

impl TypeHierarchy {
    /// Builds a hierarchy from `(label, parents)` pairs. The root is the
    /// unique entry without parents.
    pub fn new<L, P>(kind: HierarchyKind, entries: impl IntoIterator<Item = (L, P)>) -> Result<Self, HierarchyError>
    where
        L: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let mut raw: Vec<(String, Vec<String>)> = entries
            .into_iter()
            .map(|(l, ps)| (l.into(), ps.into_iter().map(Into::into).collect()))
            .collect();
        if raw.is_empty() {
            return Err(HierarchyError::Empty { kind });
        }
        raw.sort_by(|a, b| a.0.cmp(&b.0));

        let mut by_label = HashMap::with_capacity(raw.len());
        for (i, (label, _)) in raw.iter().enumerate() {
            if by_label.insert(label.clone(), TypeId(i as u32)).is_some() {
                return Err(HierarchyError::DuplicateLabel { kind, label: label.clone() });
            }
        }

        let n = raw.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (i, (label, ps)) in raw.iter().enumerate() {
            for p in ps {
                let pid = *by_label.get(p).ok_or_else(|| HierarchyError::UnknownParent {
                    kind,
                    child: label.clone(),
                    parent: p.clone(),
                })?;
                if !parents[i].contains(&pid) {
                    parents[i].push(pid);
                    children[pid.index()].push(TypeId(i as u32));
                }
            }
            parents[i].sort();
        }
        for c in &mut children {
            c.sort();
        }

        let roots: Vec<usize> = (0..n).filter(|&i| parents[i].is_empty()).collect();
        if roots.len() != 1 {
            return Err(HierarchyError::Root {
                kind,
                found: roots.iter().map(|&i| raw[i].0.clone()).collect(),
            });
        }
        let root = TypeId(roots[0] as u32);

        // Kahn's algorithm from the root; anything left over sits on a cycle.
        let mut pending: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            order.push(t);
            for &c in &children[t.index()] {
                pending[c.index()] -= 1;
                if pending[c.index()] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&i| pending[i] > 0).unwrap_or(0);
            return Err(HierarchyError::Cycle { kind, label: raw[stuck].0.clone() });
        }

        let mut ancestors = vec![FixedBitSet::with_capacity(n); n];
        for &t in &order {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(t.index());
            for p in &parents[t.index()] {
                set.union_with(&ancestors[p.index()]);
            }
            ancestors[t.index()] = set;
        }

        let mut depth = vec![u32::MAX; n];
        depth[root.index()] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            for &c in &children[t.index()] {
                if depth[c.index()] == u32::MAX {
                    depth[c.index()] = depth[t.index()] + 1;
                    queue.push_back(c);
                }
            }
        }

        Ok(TypeHierarchy {
            kind,
            labels: raw.into_iter().map(|(l, _)| l).collect(),
            parents,
            children,
            root,
            by_label,
            ancestors,
            depth,
        })
    }

    pub fn kind(&self) -> HierarchyKind {
        self.kind
    }

    pub fn root(&self) -> TypeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, t: TypeId) -> bool {
        t.index() < self.labels.len()
    }

    pub fn types(&self) -> impl ExactSizeIterator<Item = TypeId> + '_ {
        (0..self.labels.len() as u32).map(TypeId)
    }

    pub fn label(&self, t: TypeId) -> &str {
        &self.labels[t.index()]
    }

    pub fn lookup(&self, label: &str) -> Option<TypeId> {
        self.by_label.get(label).copied()
    }

    pub fn parents(&self, t: TypeId) -> &[TypeId] {
        &self.parents[t.index()]
    }

    pub fn children(&self, t: TypeId) -> &[TypeId] {
        &self.children[t.index()]
    }

    pub fn is_leaf(&self, t: TypeId) -> bool {
        self.children[t.index()].is_empty()
    }

    /// Shortest number of parent steps from `t` to the root.
    pub fn depth(&self, t: TypeId) -> u32 {
        self.depth[t.index()]
    }

    /// Number of levels, so a root-only hierarchy has height 1.
    pub fn height(&self) -> u32 {
        self.depth.iter().copied().max().unwrap_or(0) + 1
    }

    fn check(&self, t: TypeId) -> Result<(), HierarchyError> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(HierarchyError::UnknownType { kind: self.kind, id: t })
        }
    }

    /// `a ≤ b`: `a` equals `b` or is one of its descendants.
    pub fn is_subtype(&self, a: TypeId, b: TypeId) -> Result<bool, HierarchyError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.le(a, b))
    }

    /// Unchecked `a ≤ b` for ids already known to belong to this hierarchy.
    pub(crate) fn le(&self, a: TypeId, b: TypeId) -> bool {
        self.ancestors[a.index()].contains(b.index())
    }

    pub(crate) fn comparable(&self, a: TypeId, b: TypeId) -> bool {
        self.le(a, b) || self.le(b, a)
    }

    /// The more specific of two comparable types, `None` when incomparable.
    pub fn most_specific(&self, a: TypeId, b: TypeId) -> Result<Option<TypeId>, HierarchyError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.meet_if_comparable(a, b))
    }

    pub(crate) fn meet_if_comparable(&self, a: TypeId, b: TypeId) -> Option<TypeId> {
        if self.le(a, b) {
            Some(a)
        } else if self.le(b, a) {
            Some(b)
        } else {
            None
        }
    }

    /// All `t' ≤ t`, including `t`, in id order.
    pub fn descendants_or_self(&self, t: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        self.types().filter(move |&d| self.le(d, t))
    }

    /// All `t' ≥ t`, including `t`, in id order.
    pub fn ancestors_or_self(&self, t: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        self.ancestors[t.index()].ones().map(|i| TypeId(i as u32))
    }

    /// Walks down from `t` a number of edges drawn uniformly in `[0, steps]`,
    /// picking each child uniformly and stopping early at leaves.
    pub fn random_descendant<R: Rng + ?Sized>(&self, t: TypeId, steps: usize, rng: &mut R) -> TypeId {
        self.random_descendant_where(t, steps, rng, |_| true).0
    }

    /// Like [`random_descendant`](Self::random_descendant) but only through
    /// children accepted by `admit`. Returns the reached type and the number
    /// of edges actually walked.
    pub fn random_descendant_where<R, F>(&self, t: TypeId, steps: usize, rng: &mut R, mut admit: F) -> (TypeId, usize)
    where
        R: Rng + ?Sized,
        F: FnMut(TypeId) -> bool,
    {
        let moves = rng.random_range(0..=steps);
        let mut current = t;
        let mut walked = 0;
        let mut candidates = Vec::new();
        while walked < moves {
            candidates.clear();
            candidates.extend(self.children(current).iter().copied().filter(|&c| admit(c)));
            if candidates.is_empty() {
                break;
            }
            current = candidates[rng.random_range(0..candidates.len())];
            walked += 1;
        }
        (current, walked)
    }
}
