//! Random input generation: vocabularies, γ-CGs and variables built from a
//! few numeric parameters, each of which may be fixed or drawn from a normal
//! distribution.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{
    admissible_domain, instantiate, specialize_labels, Domain, GammaCG, GammaError, LocalMint, RelationDomainPolicy,
    Variable, VariableTarget,
};
use crate::generator::{join, MAX_INSTANTIATION_ATTEMPTS};
use crate::graph::ConceptualGraph;
use crate::hierarchy::TypeId;
use crate::vocab::{MarkerId, RelationTypeId, Vocabulary, VocabularyError};

/// A numeric parameter: a fixed value, or a normal distribution sampled
/// then rounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ParamSpec {
    Fixed(f64),
    Normal { mean: f64, stddev: f64 },
}

impl ParamSpec {
    pub fn fixed(v: f64) -> Self {
        ParamSpec::Fixed(v)
    }

    pub fn normal(mean: f64, stddev: f64) -> Self {
        ParamSpec::Normal { mean, stddev }
    }

    fn check(&self, name: &str) -> Result<(), AutogenError> {
        match *self {
            ParamSpec::Fixed(v) if !v.is_finite() => Err(AutogenError::Config(format!("{name}: value must be finite"))),
            ParamSpec::Normal { mean, stddev } if !mean.is_finite() || !stddev.is_finite() || stddev < 0.0 => Err(
                AutogenError::Config(format!("{name}: mean must be finite and stddev finite and non-negative")),
            ),
            _ => Ok(()),
        }
    }
}

/// Draws `spec`, rounds to the nearest integer and clamps into `[min, max]`.
pub fn sample_param<R: Rng + ?Sized>(spec: ParamSpec, (min, max): (i64, i64), rng: &mut R) -> i64 {
    debug_assert!(min <= max);
    let raw = match spec {
        ParamSpec::Fixed(v) => v,
        ParamSpec::Normal { mean, stddev } => {
            if stddev == 0.0 {
                mean
            } else {
                Normal::new(mean, stddev).expect("stddev checked").sample(rng)
            }
        }
    };
    (raw.round() as i64).clamp(min, max)
}

fn sample_count<R: Rng + ?Sized>(spec: ParamSpec, range: (i64, i64), rng: &mut R) -> usize {
    sample_param(spec, range, rng) as usize
}

/// Valid ranges for sampled parameters.
pub mod ranges {
    pub const DEPTH: (i64, i64) = (1, 64);
    pub const CHILDREN: (i64, i64) = (1, 64);
    pub const MARKERS: (i64, i64) = (0, 1024);
    pub const GAMMA_COUNT: (i64, i64) = (1, 100_000);
    pub const SIZE: (i64, i64) = (1, 1_000_000);
    pub const SPECIALISATIONS: (i64, i64) = (0, 64);
    pub const VARIABLES: (i64, i64) = (0, 100_000);
    pub const VALUES: (i64, i64) = (1, 100_000);
}

#[derive(Debug, Error)]
pub enum AutogenError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("the vocabulary has no relation types")]
    NoRelationTypes,
    #[error("every signature component failed to instantiate: {0}")]
    Exhausted(GammaError),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Pronounceable labels, unique thanks to a running numeric suffix.
#[derive(Debug, Default)]
struct LabelFactory {
    next: usize,
}

impl LabelFactory {
    fn word<R: Rng + ?Sized>(&mut self, capitalized: bool, rng: &mut R) -> String {
        let syllables = rng.random_range(2..=3);
        let mut s = String::with_capacity(syllables * 2 + 4);
        for i in 0..syllables {
            let c = CONSONANTS[rng.random_range(0..CONSONANTS.len())] as char;
            s.push(if capitalized && i == 0 { c.to_ascii_uppercase() } else { c });
            s.push(VOWELS[rng.random_range(0..VOWELS.len())] as char);
        }
        self.next += 1;
        s.push_str(&self.next.to_string());
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct AutoVocConfig {
    pub concept_depth: ParamSpec,
    pub relation_depth: ParamSpec,
    pub max_children: ParamSpec,
    pub markers_per_type: ParamSpec,
    #[serde(default = "default_arities")]
    pub arities: BTreeSet<usize>,
}

fn default_arities() -> BTreeSet<usize> {
    BTreeSet::from([1, 2, 3])
}

impl Default for AutoVocConfig {
    fn default() -> Self {
        AutoVocConfig {
            concept_depth: ParamSpec::fixed(4.0),
            relation_depth: ParamSpec::fixed(3.0),
            max_children: ParamSpec::fixed(3.0),
            markers_per_type: ParamSpec::fixed(3.0),
            arities: default_arities(),
        }
    }
}

impl AutoVocConfig {
    pub fn validate(&self) -> Result<(), AutogenError> {
        self.concept_depth.check("conceptDepth")?;
        self.relation_depth.check("relationDepth")?;
        self.max_children.check("maxChildren")?;
        self.markers_per_type.check("markersPerType")?;
        if self.arities.contains(&0) {
            return Err(AutogenError::Config("arities must be positive".into()));
        }
        Ok(())
    }
}

/// Grows a rooted tree level by level. The first child of each node on the
/// leftmost chain is forced so the tree reaches exactly `depth` levels; other
/// nodes take 0..=max_children children and may stop early.
fn grow_tree<R: Rng + ?Sized>(depth: usize, max_children: usize, rng: &mut R) -> Vec<Option<usize>> {
    let mut parent = vec![None];
    let mut level = vec![(0usize, true)];
    for _ in 1..depth {
        let mut next = Vec::new();
        for &(node, on_chain) in &level {
            let lo = usize::from(on_chain);
            let count = rng.random_range(lo..=max_children);
            for k in 0..count {
                parent.push(Some(node));
                next.push((parent.len() - 1, on_chain && k == 0));
            }
        }
        level = next;
    }
    parent
}

/// Builds a random vocabulary: a concept tree of the sampled depth with
/// markers on every type, and one relation tree per arity whose top has the
/// all-⊤ signature. Each child relation keeps or narrows every restriction of
/// its parent by one step, so signatures are monotone by construction.
pub fn auto_vocabulary<R: Rng + ?Sized>(config: &AutoVocConfig, rng: &mut R) -> Result<Vocabulary, AutogenError> {
    config.validate()?;
    let mut labels = LabelFactory::default();
    let mut builder = Vocabulary::builder();

    let depth = sample_count(config.concept_depth, ranges::DEPTH, rng);
    let max_children = sample_count(config.max_children, ranges::CHILDREN, rng);
    let tree = grow_tree(depth, max_children, rng);
    let mut concept_labels: Vec<String> = Vec::with_capacity(tree.len());
    let mut concept_children: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    for (i, p) in tree.iter().enumerate() {
        let label = if i == 0 { "Top".to_owned() } else { labels.word(true, rng) };
        match p {
            None => builder.concept(label.clone(), Vec::<String>::new()),
            Some(p) => {
                concept_children[*p].push(i);
                builder.concept(label.clone(), [concept_labels[*p].clone()])
            }
        };
        concept_labels.push(label);
    }
    for label in &concept_labels {
        let count = sample_count(config.markers_per_type, ranges::MARKERS, rng);
        for k in 0..count {
            builder.marker(format!("{label}#{k}"), label.clone());
        }
    }

    for &arity in &config.arities {
        let depth = sample_count(config.relation_depth, ranges::DEPTH, rng);
        let tree = grow_tree(depth, max_children, rng);
        let mut rel_labels: Vec<String> = Vec::with_capacity(tree.len());
        let mut signatures: Vec<Vec<usize>> = Vec::with_capacity(tree.len());
        for p in &tree {
            let (label, signature) = match p {
                None => (format!("T{arity}"), vec![0; arity]),
                Some(p) => {
                    let sig = signatures[*p]
                        .iter()
                        .map(|&restriction| {
                            let kids = &concept_children[restriction];
                            if kids.is_empty() || rng.random_bool(0.5) {
                                restriction
                            } else {
                                kids[rng.random_range(0..kids.len())]
                            }
                        })
                        .collect();
                    (labels.word(false, rng), sig)
                }
            };
            let parents: Vec<String> = p.iter().map(|&p| rel_labels[p].clone()).collect();
            builder.relation_with_arity(
                label.clone(),
                arity,
                parents,
                signature.iter().map(|&c| concept_labels[c].clone()),
            );
            rel_labels.push(label);
            signatures.push(signature);
        }
    }
    Ok(builder.build()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct AutoGcgConfig {
    pub count: ParamSpec,
    pub min_size: ParamSpec,
    /// Specialization steps applied to each drawn label.
    #[serde(default = "default_gcg_spe")]
    pub max_spe: ParamSpec,
    /// Probability that a concept node is given an individual marker.
    #[serde(default = "default_individual_ratio")]
    pub individual_ratio: f64,
}

fn default_gcg_spe() -> ParamSpec {
    ParamSpec::fixed(1.0)
}

fn default_individual_ratio() -> f64 {
    0.5
}

impl Default for AutoGcgConfig {
    fn default() -> Self {
        AutoGcgConfig {
            count: ParamSpec::fixed(10.0),
            min_size: ParamSpec::fixed(8.0),
            max_spe: default_gcg_spe(),
            individual_ratio: default_individual_ratio(),
        }
    }
}

impl AutoGcgConfig {
    pub fn validate(&self) -> Result<(), AutogenError> {
        self.count.check("count")?;
        self.min_size.check("minSize")?;
        self.max_spe.check("maxSpe")?;
        if !(0.0..=1.0).contains(&self.individual_ratio) {
            return Err(AutogenError::Config("individualRatio must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// The graph of one signature: a relation node over fresh concept nodes
/// typed by its restrictions, with every type label a variable.
fn signature_component(vocab: &Vocabulary, r: RelationTypeId, policy: RelationDomainPolicy) -> GammaCG {
    let mut g = ConceptualGraph::new();
    let args: Vec<_> = vocab.sig(r).iter().map(|&t| g.add_concept(t, None)).collect();
    let rel = g.add_relation(r, args.clone()).expect("arity matches signature");
    let mut gcg = GammaCG::new(vocab.relation_label(r), g);
    let targets = std::iter::once(VariableTarget::RelationType(rel)).chain(args.into_iter().map(VariableTarget::ConceptType));
    for target in targets {
        let domain = admissible_domain(vocab, &gcg.graph, target, policy).expect("targets exist");
        let name = gcg.fresh_variable_name();
        gcg.variables.push(Variable { name, target, domain });
    }
    gcg
}

/// Gives each concept node a marker with probability `ratio`, drawn among
/// markers whose type is comparable to the node's; the node keeps the more
/// specific of the two types.
fn attach_markers<R: Rng + ?Sized>(vocab: &Vocabulary, g: &mut ConceptualGraph, ratio: f64, rng: &mut R) {
    let concepts = vocab.concepts();
    let ids: Vec<_> = g.concepts().iter().map(|c| c.id).collect();
    for id in ids {
        if !rng.random_bool(ratio) {
            continue;
        }
        let c = g.concept_mut(id).expect("listed above");
        let candidates: Vec<(&MarkerId, TypeId)> =
            vocab.markers().filter(|&(_, t)| concepts.comparable(t, c.concept_type)).collect();
        if candidates.is_empty() {
            continue;
        }
        let (m, t) = candidates[rng.random_range(0..candidates.len())];
        c.concept_type = concepts.meet_if_comparable(c.concept_type, t).expect("comparable");
        c.marker = Some(m.clone());
    }
}

/// Builds variable-free γ-CGs by running the generation loop over the
/// signature graphs of `vocab`, with every label drawn at random and then
/// specialized.
pub fn auto_gamma_cgs<R: Rng + ?Sized>(
    vocab: &Vocabulary,
    config: &AutoGcgConfig,
    policy: RelationDomainPolicy,
    rng: &mut R,
) -> Result<Vec<GammaCG>, AutogenError> {
    config.validate()?;
    if vocab.relation_count() == 0 {
        return Err(AutogenError::NoRelationTypes);
    }
    let components: Vec<GammaCG> = vocab.relation_types().map(|r| signature_component(vocab, r, policy)).collect();
    let count = sample_count(config.count, ranges::GAMMA_COUNT, rng);
    let width = count.to_string().len().max(3);
    let mut out = Vec::with_capacity(count);
    let mut mint = LocalMint::default();

    for i in 0..count {
        let min_size = sample_count(config.min_size, ranges::SIZE, rng);
        let max_spe = sample_count(config.max_spe, ranges::SPECIALISATIONS, rng);
        let mut available: Vec<usize> = (0..components.len()).collect();
        let mut acc = ConceptualGraph::new();
        while acc.size() < min_size {
            if available.is_empty() {
                return Err(AutogenError::Config("no signature component can be instantiated".into()));
            }
            let slot = rng.random_range(0..available.len());
            let component = &components[available[slot]];
            let mut last = None;
            let mut instance = None;
            for _ in 0..MAX_INSTANTIATION_ATTEMPTS {
                match instantiate(vocab, component, policy, &mut mint, rng) {
                    Ok(inst) => {
                        instance = Some(inst);
                        break;
                    }
                    Err(e) => last = Some(e),
                }
            }
            let Some(instance) = instance else {
                available.swap_remove(slot);
                if available.is_empty() {
                    return Err(AutogenError::Exhausted(last.expect("an attempt failed")));
                }
                continue;
            };
            let mut g = instance.graph;
            attach_markers(vocab, &mut g, config.individual_ratio, rng);
            let targets: Vec<_> = component.variables.iter().map(|v| v.target).collect();
            specialize_labels(vocab, &mut g, &targets, max_spe, rng);
            acc = join(vocab, &acc, &g).graph;
        }
        out.push(GammaCG::new(format!("gcg-{i:0width$}"), acc));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct AutoVarConfig {
    #[serde(rename = "conceptVarsPerCG")]
    pub concept_vars_per_cg: ParamSpec,
    #[serde(rename = "relationVarsPerCG")]
    pub relation_vars_per_cg: ParamSpec,
    #[serde(rename = "markerVarsPerCG")]
    pub marker_vars_per_cg: ParamSpec,
    pub values_per_variable: ParamSpec,
    pub specialisations: ParamSpec,
}

impl Default for AutoVarConfig {
    fn default() -> Self {
        AutoVarConfig {
            concept_vars_per_cg: ParamSpec::fixed(1.0),
            relation_vars_per_cg: ParamSpec::fixed(1.0),
            marker_vars_per_cg: ParamSpec::fixed(1.0),
            values_per_variable: ParamSpec::fixed(3.0),
            specialisations: ParamSpec::fixed(1.0),
        }
    }
}

impl AutoVarConfig {
    pub fn validate(&self) -> Result<(), AutogenError> {
        self.concept_vars_per_cg.check("conceptVarsPerCG")?;
        self.relation_vars_per_cg.check("relationVarsPerCG")?;
        self.marker_vars_per_cg.check("markerVarsPerCG")?;
        self.values_per_variable.check("valuesPerVariable")?;
        self.specialisations.check("specialisations")
    }
}

#[derive(Debug, Clone)]
pub struct AutoVarOutcome {
    pub gammas: Vec<GammaCG>,
    /// One line per γ-CG that had fewer free slots than requested.
    pub warnings: Vec<String>,
}

/// Picks `min(k, |items|)` distinct items uniformly.
fn sample_distinct<T: Clone, R: Rng + ?Sized>(items: &[T], k: usize, rng: &mut R) -> Vec<T> {
    let k = k.min(items.len());
    index::sample(rng, items.len(), k).into_iter().map(|i| items[i].clone()).collect()
}

/// Adds variables to free label slots of each γ-CG.
///
/// Per graph, the requested numbers of relation-type, concept-type and
/// marker variables are placed on distinct unclaimed slots. Each domain holds
/// the slot's current label plus values sampled from its admissible domain,
/// `valuesPerVariable` in total when enough exist; sampled type values are
/// then specialized by up to `specialisations` steps within the admissible
/// set.
pub fn auto_variables<R: Rng + ?Sized>(
    vocab: &Vocabulary,
    gammas: &[GammaCG],
    config: &AutoVarConfig,
    policy: RelationDomainPolicy,
    rng: &mut R,
) -> Result<AutoVarOutcome, AutogenError> {
    config.validate()?;
    let concepts = vocab.concepts();
    let mut warnings = Vec::new();
    let mut out = Vec::with_capacity(gammas.len());

    for gamma in gammas {
        let mut gcg = gamma.clone();
        let wanted = [
            sample_count(config.relation_vars_per_cg, ranges::VARIABLES, rng),
            sample_count(config.concept_vars_per_cg, ranges::VARIABLES, rng),
            sample_count(config.marker_vars_per_cg, ranges::VARIABLES, rng),
        ];
        let free: [Vec<VariableTarget>; 3] = [
            gcg.graph
                .relations()
                .iter()
                .map(|r| VariableTarget::RelationType(r.id))
                .filter(|t| !gcg.has_variable_on(*t))
                .collect(),
            gcg.graph
                .concepts()
                .iter()
                .map(|c| VariableTarget::ConceptType(c.id))
                .filter(|t| !gcg.has_variable_on(*t))
                .collect(),
            gcg.graph
                .concepts()
                .iter()
                .filter(|c| c.marker.is_some())
                .map(|c| VariableTarget::Marker(c.id))
                .filter(|t| !gcg.has_variable_on(*t))
                .collect(),
        ];
        let kinds = ["relation-type", "concept-type", "marker"];
        let mut chosen: [Vec<VariableTarget>; 3] = Default::default();
        for k in 0..3 {
            if wanted[k] > free[k].len() {
                warnings.push(format!(
                    "{}: requested {} {} variables, only {} free slots",
                    gcg.name,
                    wanted[k],
                    kinds[k],
                    free[k].len()
                ));
            }
            chosen[k] = sample_distinct(&free[k], wanted[k], rng);
            chosen[k].sort();
        }
        let marker_slots: BTreeSet<_> = gcg
            .variables
            .iter()
            .map(|v| v.target)
            .chain(chosen[2].iter().copied())
            .filter_map(|t| match t {
                VariableTarget::Marker(n) => Some(n),
                _ => None,
            })
            .collect();

        for target in chosen.iter().flatten().copied() {
            let values = sample_count(config.values_per_variable, ranges::VALUES, rng);
            let steps = sample_count(config.specialisations, ranges::SPECIALISATIONS, rng);
            let g = &gcg.graph;
            let domain = match (target, admissible_domain(vocab, g, target, policy)?) {
                (VariableTarget::RelationType(n), Domain::RelationTypes(adm)) => {
                    let current = g.relation(n).expect("free slot").relation_type;
                    let others: Vec<_> = adm.iter().copied().filter(|&r| r != current).collect();
                    let h = vocab.relation_hierarchy(current.arity).expect("valid");
                    let mut d = BTreeSet::from([current]);
                    for r in sample_distinct(&others, values - 1, rng) {
                        let (id, _) = h.random_descendant_where(r.id, steps, rng, |c| {
                            adm.contains(&RelationTypeId { arity: r.arity, id: c })
                        });
                        d.insert(RelationTypeId { arity: r.arity, id });
                    }
                    Domain::RelationTypes(d)
                }
                (VariableTarget::ConceptType(n), Domain::ConceptTypes(adm)) => {
                    let node = g.concept(n).expect("free slot");
                    // A marker that stays fixed bounds the usable types too.
                    let bound = match &node.marker {
                        Some(m) if !marker_slots.contains(&n) => vocab.marker_type(m),
                        _ => None,
                    };
                    let usable: Vec<TypeId> = adm
                        .iter()
                        .copied()
                        .filter(|&t| t != node.concept_type && bound.is_none_or(|b| concepts.le(t, b)))
                        .collect();
                    let mut d = BTreeSet::from([node.concept_type]);
                    for t in sample_distinct(&usable, values - 1, rng) {
                        d.insert(concepts.random_descendant(t, steps, rng));
                    }
                    Domain::ConceptTypes(d)
                }
                (VariableTarget::Marker(n), Domain::Markers(adm)) => {
                    let current = g.concept(n).and_then(|c| c.marker.clone()).expect("marked slot");
                    let others: Vec<_> = adm.iter().filter(|&m| *m != current).cloned().collect();
                    let mut d = BTreeSet::from([current]);
                    d.extend(sample_distinct(&others, values - 1, rng));
                    Domain::Markers(d)
                }
                _ => unreachable!("admissible domain matches target kind"),
            };
            let name = gcg.fresh_variable_name();
            gcg.variables.push(Variable { name, target, domain });
        }
        out.push(gcg);
    }
    Ok(AutoVarOutcome { gammas: out, warnings })
}
