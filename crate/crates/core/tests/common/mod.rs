//! Shared test helpers: a random vocabulary builder that does not go through
//! `autogen`, random valid graphs, and brute-force versions of the subtype
//! and domain predicates.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cgsynth::gamma::{Domain, GammaCG, RelationDomainPolicy, Variable, VariableTarget};
use cgsynth::graph::{ConceptualGraph, NodeId};
use cgsynth::metrics::DatasetStats;
use cgsynth::vocab::{MarkerId, RelationTypeId, Vocabulary};
use cgsynth::TypeId;
use rand::seq::IndexedRandom;
use rand::Rng;

/// Concept DAG over `n` types: type `i` takes one or two parents among the
/// types before it, so `c0` is the only root. Relations form one tree per
/// arity; a child's restrictions are descendants of its parent's.
pub fn random_vocabulary<R: Rng>(rng: &mut R, max_types: usize) -> Vocabulary {
    let n_concepts = rng.random_range(1..=max_types.max(1) / 2 + 1);
    let mut parents: Vec<Vec<usize>> = vec![vec![]];
    for i in 1..n_concepts {
        let mut ps = BTreeSet::from([rng.random_range(0..i)]);
        if i > 1 && rng.random_bool(0.3) {
            ps.insert(rng.random_range(0..i));
        }
        parents.push(ps.into_iter().collect());
    }
    let children = |t: usize| -> Vec<usize> { (0..n_concepts).filter(|&c| parents[c].contains(&t)).collect() };
    let descend = |rng: &mut R, mut t: usize| {
        for _ in 0..rng.random_range(0..3) {
            let kids = children(t);
            if kids.is_empty() {
                break;
            }
            t = *kids.choose(rng).unwrap();
        }
        t
    };
    let clabel = |i: usize| format!("c{i}");

    let mut b = Vocabulary::builder();
    for (i, ps) in parents.iter().enumerate() {
        b.concept(clabel(i), ps.iter().map(|&p| clabel(p)));
    }
    let n_relations = rng.random_range(0..=max_types.saturating_sub(n_concepts));
    let arities: Vec<usize> = (1..=3).filter(|_| rng.random_bool(0.7)).collect();
    let mut per_arity: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for _ in 0..n_relations {
        let Some(&arity) = arities.choose(rng) else { break };
        let sigs = per_arity.entry(arity).or_default();
        let label = format!("r{arity}_{}", sigs.len());
        if sigs.is_empty() {
            let sig: Vec<usize> = (0..arity).map(|_| descend(rng, 0)).collect();
            b.relation_with_arity(label, arity, Vec::<String>::new(), sig.iter().map(|&t| clabel(t)));
            sigs.push(sig);
        } else {
            let p = rng.random_range(0..sigs.len());
            let sig: Vec<usize> = sigs[p].clone().into_iter().map(|t| descend(rng, t)).collect();
            b.relation_with_arity(label, arity, [format!("r{arity}_{p}")], sig.iter().map(|&t| clabel(t)));
            sigs.push(sig);
        }
    }
    for m in 0..rng.random_range(0..=n_concepts * 2) {
        b.marker(format!("m{m}"), clabel(rng.random_range(0..n_concepts)));
    }
    b.build().expect("random vocabulary is well formed")
}

/// `a ≤ b` by walking parent links upward from `a`.
pub fn concept_le(v: &Vocabulary, a: TypeId, b: TypeId) -> bool {
    let h = v.concepts();
    let mut stack = vec![a];
    let mut seen = BTreeSet::new();
    while let Some(t) = stack.pop() {
        if t == b {
            return true;
        }
        if seen.insert(t) {
            stack.extend_from_slice(h.parents(t));
        }
    }
    false
}

pub fn relation_le(v: &Vocabulary, a: RelationTypeId, b: RelationTypeId) -> bool {
    if a.arity != b.arity {
        return false;
    }
    let h = v.relation_hierarchy(a.arity).unwrap();
    let mut t = a.id;
    loop {
        if t == b.id {
            return true;
        }
        match h.parents(t).first() {
            Some(&p) => t = p,
            None => return false,
        }
    }
}

/// Every element of the vocabulary filtered by the relation-domain predicate.
pub fn oracle_relation_domain(
    v: &Vocabulary,
    g: &ConceptualGraph,
    node: NodeId,
    policy: RelationDomainPolicy,
) -> BTreeSet<RelationTypeId> {
    let r = g.relation(node).unwrap();
    v.relation_types()
        .filter(|c| c.arity == r.arguments.len())
        .filter(|&c| match policy {
            RelationDomainPolicy::ArityOnly => true,
            RelationDomainPolicy::SignatureCompatible => r.arguments.iter().enumerate().all(|(k, a)| {
                concept_le(v, g.concept(*a).unwrap().concept_type, v.restriction_for(c, k).unwrap())
            }),
        })
        .collect()
}

pub fn oracle_concept_domain(v: &Vocabulary, g: &ConceptualGraph, node: NodeId) -> BTreeSet<TypeId> {
    v.concepts()
        .types()
        .filter(|&t| {
            g.relations().iter().all(|r| {
                r.arguments
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a == node)
                    .all(|(k, _)| concept_le(v, t, v.restriction_for(r.relation_type, k).unwrap()))
            })
        })
        .collect()
}

pub fn oracle_marker_domain(v: &Vocabulary, g: &ConceptualGraph, node: NodeId) -> BTreeSet<MarkerId> {
    let current = g.concept(node).unwrap().marker.clone().unwrap();
    let bound = v.marker_type(&current).unwrap();
    v.markers().filter(|&(_, t)| concept_le(v, t, bound)).map(|(m, _)| m.clone()).collect()
}

fn random_below<R: Rng>(v: &Vocabulary, t: TypeId, rng: &mut R) -> TypeId {
    let below: Vec<TypeId> = v.concepts().types().filter(|&c| concept_le(v, c, t)).collect();
    *below.choose(rng).unwrap()
}

/// A graph that passes `validate_graph`: relations are drawn uniformly and
/// each argument either reuses a fitting concept node or adds a new one.
/// Markers are attached with probability `marker_p` when one fits.
pub fn random_graph<R: Rng>(v: &Vocabulary, rng: &mut R, relations: usize, marker_p: f64) -> ConceptualGraph {
    let rel_types: Vec<RelationTypeId> = v.relation_types().collect();
    let mut g = ConceptualGraph::new();
    let fresh_concept = |g: &mut ConceptualGraph, bound: TypeId, rng: &mut R| {
        let t = random_below(v, bound, rng);
        let fits: Vec<(&MarkerId, TypeId)> = v.markers().filter(|&(_, mt)| concept_le(v, t, mt)).collect();
        let marker = if !fits.is_empty() && rng.random_bool(marker_p) { Some(fits.choose(rng).unwrap().0.clone()) } else { None };
        g.add_concept(t, marker)
    };
    if rel_types.is_empty() {
        for _ in 0..relations {
            fresh_concept(&mut g, v.top(), rng);
        }
        return g;
    }
    for _ in 0..relations {
        let r = *rel_types.choose(rng).unwrap();
        let mut args = Vec::with_capacity(r.arity);
        for k in 0..r.arity {
            let bound = v.restriction_for(r, k).unwrap();
            let reusable: Vec<NodeId> =
                g.concepts().iter().filter(|c| concept_le(v, c.concept_type, bound)).map(|c| c.id).collect();
            let id = if !reusable.is_empty() && rng.random_bool(0.4) {
                *reusable.choose(rng).unwrap()
            } else {
                fresh_concept(&mut g, bound, rng)
            };
            args.push(id);
        }
        g.add_relation(r, args).unwrap();
    }
    g
}

/// Adds up to `count` variables to random free slots. Each domain is the
/// slot's current label plus a random subset of its admissible domain, so
/// the graph as written is always one valid instantiation.
pub fn random_gamma<R: Rng>(v: &Vocabulary, rng: &mut R, name: &str, relations: usize, count: usize) -> GammaCG {
    let g = random_graph(v, rng, relations, 0.5);
    let mut slots: Vec<VariableTarget> = g.relations().iter().map(|r| VariableTarget::RelationType(r.id)).collect();
    for c in g.concepts() {
        slots.push(VariableTarget::ConceptType(c.id));
        if c.marker.is_some() {
            slots.push(VariableTarget::Marker(c.id));
        }
    }
    let mut gcg = GammaCG::new(name, g);
    for &target in slots.choose_multiple(rng, count) {
        let adm = cgsynth::gamma::admissible_domain(v, &gcg.graph, target, RelationDomainPolicy::default()).unwrap();
        let g = &gcg.graph;
        let domain = match (adm, target) {
            (Domain::RelationTypes(d), VariableTarget::RelationType(n)) => {
                Domain::RelationTypes(subset(d, g.relation(n).unwrap().relation_type, rng))
            }
            (Domain::ConceptTypes(d), VariableTarget::ConceptType(n)) => {
                Domain::ConceptTypes(subset(d, g.concept(n).unwrap().concept_type, rng))
            }
            (Domain::Markers(d), VariableTarget::Marker(n)) => {
                Domain::Markers(subset(d, g.concept(n).unwrap().marker.clone().unwrap(), rng))
            }
            _ => unreachable!(),
        };
        let name = gcg.fresh_variable_name();
        gcg.variables.push(Variable { name, target, domain });
    }
    gcg
}

fn subset<T: Ord + Clone, R: Rng>(all: BTreeSet<T>, current: T, rng: &mut R) -> BTreeSet<T> {
    let items: Vec<T> = all.into_iter().collect();
    let k = rng.random_range(0..=items.len());
    let mut out: BTreeSet<T> = items.choose_multiple(rng, k).cloned().collect();
    out.insert(current);
    out
}

/// Drops markers already in `taken` or repeated within `g`.
pub fn unique_markers(g: &ConceptualGraph, taken: &BTreeSet<MarkerId>) -> ConceptualGraph {
    let mut seen = taken.clone();
    let concepts = g
        .concepts()
        .iter()
        .cloned()
        .map(|mut c| {
            if let Some(m) = &c.marker {
                if !seen.insert(m.clone()) {
                    c.marker = None;
                }
            }
            c
        })
        .collect();
    ConceptualGraph::from_parts(concepts, g.relations().to_vec()).unwrap()
}

pub fn markers(g: &ConceptualGraph) -> BTreeSet<MarkerId> {
    g.concepts().iter().filter_map(|c| c.marker.clone()).collect()
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Recount from labels as strings, independent of the ids used internally.
pub fn recount(v: &Vocabulary, graphs: &[ConceptualGraph]) -> (f64, f64, f64, f64, BTreeMap<usize, f64>) {
    let mut nodes = Vec::new();
    let mut labels = Vec::new();
    let mut arity: BTreeMap<usize, f64> = BTreeMap::new();
    for g in graphs {
        nodes.push((g.concepts().len() + g.relations().len()) as f64);
        let mut set = BTreeSet::new();
        for c in g.concepts() {
            set.insert(format!("concept:{}", v.concept_label(c.concept_type)));
            if let Some(m) = &c.marker {
                set.insert(format!("marker:{m}"));
            }
        }
        for r in g.relations() {
            set.insert(format!("relation:{}", v.relation_label(r.relation_type)));
            *arity.entry(r.arguments.len()).or_default() += 1.0;
        }
        labels.push(set.len() as f64);
    }
    for x in arity.values_mut() {
        *x /= graphs.len() as f64;
    }
    let (nm, ns) = mean_sd(&nodes);
    let (lm, ls) = mean_sd(&labels);
    (nm, ns, lm, ls, arity)
}

pub fn same_stats(a: &DatasetStats, b: &DatasetStats) -> bool {
    a.cg_count == b.cg_count
        && close(a.nb_nodes_mean, b.nb_nodes_mean)
        && close(a.nb_nodes_stddev, b.nb_nodes_stddev)
        && close(a.nb_labels_mean, b.nb_labels_mean)
        && close(a.nb_labels_stddev, b.nb_labels_stddev)
        && a.arity_counts.len() == b.arity_counts.len()
        && a.arity_counts.iter().zip(&b.arity_counts).all(|((k1, x), (k2, y))| k1 == k2 && close(*x, *y))
}
