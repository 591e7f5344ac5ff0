//! JSON documents for vocabularies, γ-CGs, CGs and datasets, plus DOT
//! export. Field names and layout are described in `docs/format.md`.
//!
//! Every document starts with `formatVersion` and `kind`. Lists are written
//! in a canonical order so saving the same value twice gives the same bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{Domain, GammaCG, Variable, VariableTarget};
use crate::generator::{Dataset, GenerationProvenance, GeneratorConfig};
use crate::graph::{ConceptNode, ConceptualGraph, NodeId, RelationNode};
use crate::metrics::{compute_stats, DatasetStats};
use crate::vocab::{MarkerId, Vocabulary, VocabularyBuilder};

pub const FORMAT_VERSION: &str = "1.0.0";
const SUPPORTED_MAJOR: u64 = 1;

pub const VOCABULARY_FILE: &str = "vocabulary.json";
pub const GAMMA_DIR: &str = "gamma";
pub const DATASET_DIR: &str = "dataset";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const PROVENANCE_FILE: &str = "provenance.json";

/// A problem with the contents of one document.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}, column {column}, at `{field}`: {message}")]
    Parse { line: usize, column: usize, field: String, message: String },
    #[error("unsupported formatVersion `{0}` (supported: {SUPPORTED_MAJOR}.x)")]
    Version(String),
    #[error("expected a `{expected}` document, found `{found}`")]
    Kind { expected: &'static str, found: String },
    #[error("{0}")]
    Validation(String),
}

impl FormatError {
    /// True for documents that parse but describe an invalid value.
    pub fn is_validation(&self) -> bool {
        matches!(self, FormatError::Validation(_))
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
}

impl IoError {
    pub fn is_validation(&self) -> bool {
        matches!(self, IoError::Format { source, .. } if source.is_validation())
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_owned(), source }
    }

    fn format(path: &Path, source: FormatError) -> Self {
        IoError::Format { path: path.to_owned(), source }
    }
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Validation(msg.into())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Header {
    format_version: String,
    kind: String,
}

fn parse<T: DeserializeOwned>(text: &str, expected: &'static str) -> Result<T, FormatError> {
    let parse_error = |e: serde_json::Error, field: String| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        field,
        message: e.to_string(),
    };
    let kind = document_kind(text)?;
    if kind != expected {
        return Err(FormatError::Kind { expected, found: kind });
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        parse_error(e.into_inner(), field)
    })
}

/// The `kind` field of a document, after the version check.
pub fn document_kind(text: &str) -> Result<String, FormatError> {
    let header: Header = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        field: String::from("."),
        message: e.to_string(),
    })?;
    let version = semver::Version::parse(&header.format_version)
        .map_err(|_| FormatError::Version(header.format_version.clone()))?;
    if version.major != SUPPORTED_MAJOR {
        return Err(FormatError::Version(header.format_version));
    }
    Ok(header.kind)
}

fn render<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| IoError::io(path, e))
}

// ---------------------------------------------------------------------------
// Vocabulary

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct VocabularyDoc {
    format_version: String,
    kind: String,
    concept_types: Vec<ConceptTypeDoc>,
    relation_types: Vec<RelationTypeDoc>,
    markers: Vec<MarkerDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConceptTypeDoc {
    label: String,
    parents: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationTypeDoc {
    label: String,
    arity: usize,
    parents: Vec<String>,
    signature: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkerDoc {
    id: MarkerId,
    #[serde(rename = "type")]
    concept_type: String,
}

pub fn vocabulary_to_string(v: &Vocabulary) -> String {
    let concepts = v.concepts();
    let concept_types = concepts
        .types()
        .map(|t| ConceptTypeDoc {
            label: concepts.label(t).to_owned(),
            parents: concepts.parents(t).iter().map(|&p| concepts.label(p).to_owned()).collect(),
        })
        .collect();
    let relation_types = v
        .relation_types()
        .map(|r| {
            let h = v.relation_hierarchy(r.arity).expect("listed arity");
            RelationTypeDoc {
                label: h.label(r.id).to_owned(),
                arity: r.arity,
                parents: h.parents(r.id).iter().map(|&p| h.label(p).to_owned()).collect(),
                signature: v.sig(r).iter().map(|&t| concepts.label(t).to_owned()).collect(),
            }
        })
        .collect();
    let markers = v
        .markers()
        .map(|(m, t)| MarkerDoc { id: m.clone(), concept_type: concepts.label(t).to_owned() })
        .collect();
    render(&VocabularyDoc {
        format_version: FORMAT_VERSION.into(),
        kind: "vocabulary".into(),
        concept_types,
        relation_types,
        markers,
    })
}

pub fn vocabulary_from_str(text: &str) -> Result<Vocabulary, FormatError> {
    let doc: VocabularyDoc = parse(text, "vocabulary")?;
    let mut b = VocabularyBuilder::default();
    for c in doc.concept_types {
        b.concept(c.label, c.parents);
    }
    for r in doc.relation_types {
        b.relation_with_arity(r.label, r.arity, r.parents, r.signature);
    }
    for m in doc.markers {
        b.marker(m.id.as_str(), m.concept_type);
    }
    b.build().map_err(|e| invalid(e.to_string()))
}

pub fn save_vocabulary(path: &Path, v: &Vocabulary) -> Result<(), IoError> {
    write(path, &vocabulary_to_string(v))
}

pub fn load_vocabulary(path: &Path) -> Result<Vocabulary, IoError> {
    vocabulary_from_str(&read(path)?).map_err(|e| IoError::format(path, e))
}

// ---------------------------------------------------------------------------
// Graphs

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct GraphBody {
    next_id: u32,
    concepts: Vec<ConceptDoc>,
    relations: Vec<RelationDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConceptDoc {
    id: NodeId,
    #[serde(rename = "type")]
    concept_type: String,
    marker: Option<MarkerId>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    id: NodeId,
    #[serde(rename = "type")]
    relation_type: String,
    arguments: Vec<NodeId>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CgDoc {
    format_version: String,
    kind: String,
    next_id: u32,
    concepts: Vec<ConceptDoc>,
    relations: Vec<RelationDoc>,
}

fn graph_body(v: &Vocabulary, g: &ConceptualGraph) -> GraphBody {
    GraphBody {
        next_id: g.next_id(),
        concepts: g
            .concepts()
            .iter()
            .map(|c| ConceptDoc {
                id: c.id,
                concept_type: v.concept_label(c.concept_type).to_owned(),
                marker: c.marker.clone(),
            })
            .collect(),
        relations: g
            .relations()
            .iter()
            .map(|r| RelationDoc {
                id: r.id,
                relation_type: v.relation_label(r.relation_type).to_owned(),
                arguments: r.arguments.clone(),
            })
            .collect(),
    }
}

/// Resolves labels and node references. Marker ids are kept as written;
/// whether they exist is left to [`crate::validate_graph`].
fn graph_from_body(v: &Vocabulary, body: GraphBody) -> Result<ConceptualGraph, FormatError> {
    let concepts = body
        .concepts
        .into_iter()
        .map(|c| {
            let concept_type = v
                .lookup_concept(&c.concept_type)
                .ok_or_else(|| invalid(format!("concept node {}: unknown concept type `{}`", c.id, c.concept_type)))?;
            Ok(ConceptNode { id: c.id, concept_type, marker: c.marker })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let relations = body
        .relations
        .into_iter()
        .map(|r| {
            let relation_type = v
                .lookup_relation(&r.relation_type)
                .ok_or_else(|| invalid(format!("relation node {}: unknown relation type `{}`", r.id, r.relation_type)))?;
            Ok(RelationNode { id: r.id, relation_type, arguments: r.arguments })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let g = ConceptualGraph::from_parts(concepts, relations).map_err(|e| invalid(e.to_string()))?;
    if body.next_id < g.next_id() {
        return Err(invalid(format!("nextId {} is not above every node id", body.next_id)));
    }
    let (concepts, relations) = (g.concepts().to_vec(), g.relations().to_vec());
    Ok(ConceptualGraph::from_trusted(concepts, relations, body.next_id))
}

pub fn cg_to_string(v: &Vocabulary, g: &ConceptualGraph) -> String {
    let GraphBody { next_id, concepts, relations } = graph_body(v, g);
    render(&CgDoc { format_version: FORMAT_VERSION.into(), kind: "cg".into(), next_id, concepts, relations })
}

pub fn cg_from_str(v: &Vocabulary, text: &str) -> Result<ConceptualGraph, FormatError> {
    let doc: CgDoc = parse(text, "cg")?;
    graph_from_body(v, GraphBody { next_id: doc.next_id, concepts: doc.concepts, relations: doc.relations })
}

pub fn save_cg(path: &Path, v: &Vocabulary, g: &ConceptualGraph) -> Result<(), IoError> {
    write(path, &cg_to_string(v, g))
}

pub fn load_cg(path: &Path, v: &Vocabulary) -> Result<ConceptualGraph, IoError> {
    cg_from_str(v, &read(path)?).map_err(|e| IoError::format(path, e))
}

// ---------------------------------------------------------------------------
// γ-CGs

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct GammaDoc {
    format_version: String,
    kind: String,
    name: String,
    graph: GraphBody,
    variables: Vec<VariableDoc>,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
enum SlotKind {
    RelationType,
    ConceptType,
    Marker,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    slot: SlotKind,
    node: NodeId,
    domain: Vec<String>,
}

pub fn gamma_to_string(v: &Vocabulary, gcg: &GammaCG) -> String {
    let variables = gcg
        .variables
        .iter()
        .map(|var| {
            let slot = match var.target {
                VariableTarget::RelationType(_) => SlotKind::RelationType,
                VariableTarget::ConceptType(_) => SlotKind::ConceptType,
                VariableTarget::Marker(_) => SlotKind::Marker,
            };
            let domain = match &var.domain {
                Domain::RelationTypes(d) => d.iter().map(|&r| v.relation_label(r).to_owned()).collect(),
                Domain::ConceptTypes(d) => d.iter().map(|&t| v.concept_label(t).to_owned()).collect(),
                Domain::Markers(d) => d.iter().map(|m| m.as_str().to_owned()).collect(),
            };
            VariableDoc { name: var.name.clone(), slot, node: var.target.node(), domain }
        })
        .collect();
    render(&GammaDoc {
        format_version: FORMAT_VERSION.into(),
        kind: "gamma-cg".into(),
        name: gcg.name.clone(),
        graph: graph_body(v, &gcg.graph),
        variables,
    })
}

pub fn gamma_from_str(v: &Vocabulary, text: &str) -> Result<GammaCG, FormatError> {
    let doc: GammaDoc = parse(text, "gamma-cg")?;
    let graph = graph_from_body(v, doc.graph)?;
    let mut gcg = GammaCG::new(doc.name, graph);
    let mut names = BTreeSet::new();
    for var in doc.variables {
        if !names.insert(var.name.clone()) {
            return Err(invalid(format!("duplicate variable name `{}`", var.name)));
        }
        let missing = |what: &str, label: &str| invalid(format!("variable `{}`: unknown {what} `{label}`", var.name));
        let (target, domain) = match var.slot {
            SlotKind::RelationType => (
                VariableTarget::RelationType(var.node),
                Domain::RelationTypes(
                    var.domain
                        .iter()
                        .map(|l| v.lookup_relation(l).ok_or_else(|| missing("relation type", l)))
                        .collect::<Result<_, _>>()?,
                ),
            ),
            SlotKind::ConceptType => (
                VariableTarget::ConceptType(var.node),
                Domain::ConceptTypes(
                    var.domain
                        .iter()
                        .map(|l| v.lookup_concept(l).ok_or_else(|| missing("concept type", l)))
                        .collect::<Result<_, _>>()?,
                ),
            ),
            SlotKind::Marker => (
                VariableTarget::Marker(var.node),
                Domain::Markers(
                    var.domain
                        .iter()
                        .map(|m| {
                            let m = MarkerId::new(m.as_str());
                            v.marker_type(&m).map(|_| m.clone()).ok_or_else(|| missing("marker", m.as_str()))
                        })
                        .collect::<Result<_, _>>()?,
                ),
            ),
        };
        let node_ok = match target {
            VariableTarget::RelationType(n) => gcg.graph.relation(n).is_some(),
            VariableTarget::ConceptType(n) | VariableTarget::Marker(n) => gcg.graph.concept(n).is_some(),
        };
        if !node_ok {
            return Err(invalid(format!("variable `{}`: no suitable node {}", var.name, var.node)));
        }
        if gcg.has_variable_on(target) {
            return Err(invalid(format!("variable `{}`: slot {target} already has a variable", var.name)));
        }
        gcg.variables.push(Variable { name: var.name, target, domain });
    }
    Ok(gcg)
}

pub fn save_gamma(path: &Path, v: &Vocabulary, gcg: &GammaCG) -> Result<(), IoError> {
    write(path, &gamma_to_string(v, gcg))
}

pub fn load_gamma(path: &Path, v: &Vocabulary) -> Result<GammaCG, IoError> {
    gamma_from_str(v, &read(path)?).map_err(|e| IoError::format(path, e))
}

/// File name used for a γ-CG inside a `gamma/` directory.
pub fn gamma_file_name(gcg: &GammaCG) -> String {
    let safe: String = gcg
        .name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    format!("{safe}.json")
}

/// Writes each γ-CG to `dir/<name>.json`. Names that map to the same file
/// name are rejected.
pub fn save_gamma_dir(dir: &Path, v: &Vocabulary, gammas: &[GammaCG]) -> Result<Vec<PathBuf>, IoError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(gammas.len());
    for g in gammas {
        let path = dir.join(gamma_file_name(g));
        if !seen.insert(path.clone()) {
            return Err(IoError::format(&path, invalid(format!("two γ-CGs share the file name of `{}`", g.name))));
        }
        save_gamma(&path, v, g)?;
        out.push(path);
    }
    Ok(out)
}

/// Loads every `*.json` file of `dir` in file-name order.
pub fn load_gamma_dir(dir: &Path, v: &Vocabulary) -> Result<Vec<GammaCG>, IoError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| IoError::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| IoError::io(dir, err)))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths.iter().map(|p| load_gamma(p, v)).collect()
}

// ---------------------------------------------------------------------------
// Datasets

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DatasetManifest {
    pub format_version: String,
    pub kind: String,
    pub config: GeneratorConfig,
    pub stats: DatasetStats,
    pub cg_file_refs: Vec<String>,
    pub provenance_ref: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ProvenanceDoc {
    format_version: String,
    kind: String,
    graphs: Vec<GenerationProvenance>,
}

pub fn cg_file_name(index: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len().max(4);
    format!("cg-{index:0width$}.json")
}

/// A dataset as read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub vocabulary: Vocabulary,
    pub manifest: DatasetManifest,
    pub graphs: Vec<ConceptualGraph>,
    pub provenance: Option<Vec<GenerationProvenance>>,
}

/// Writes `root/vocabulary.json` and `root/dataset/` (manifest, one file per
/// graph, provenance).
pub fn save_dataset(root: &Path, dataset: &Dataset, config: &GeneratorConfig) -> Result<DatasetManifest, IoError> {
    let v = &dataset.vocabulary;
    save_vocabulary(&root.join(VOCABULARY_FILE), v)?;
    let dir = root.join(DATASET_DIR);
    let n = dataset.graphs.len();
    let mut refs = Vec::with_capacity(n);
    for (i, g) in dataset.graphs.iter().enumerate() {
        let name = cg_file_name(i, n);
        save_cg(&dir.join(&name), v, g)?;
        refs.push(name);
    }
    write(
        &dir.join(PROVENANCE_FILE),
        &render(&ProvenanceDoc {
            format_version: FORMAT_VERSION.into(),
            kind: "provenance".into(),
            graphs: dataset.provenance.clone(),
        }),
    )?;
    let stats = compute_stats(&dataset.graphs).map_err(|e| IoError::format(&dir, invalid(e.to_string())))?;
    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION.into(),
        kind: "manifest".into(),
        config: *config,
        stats,
        cg_file_refs: refs,
        provenance_ref: Some(PROVENANCE_FILE.into()),
    };
    write(&dir.join(MANIFEST_FILE), &render(&manifest))?;
    Ok(manifest)
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest, IoError> {
    let manifest: DatasetManifest = parse(&read(path)?, "manifest").map_err(|e| IoError::format(path, e))?;
    if manifest.cg_file_refs.len() != manifest.stats.cg_count {
        return Err(IoError::format(
            path,
            invalid(format!(
                "cgFileRefs lists {} files but stats.cgCount is {}",
                manifest.cg_file_refs.len(),
                manifest.stats.cg_count
            )),
        ));
    }
    Ok(manifest)
}

pub fn load_provenance(path: &Path) -> Result<Vec<GenerationProvenance>, IoError> {
    let doc: ProvenanceDoc = parse(&read(path)?, "provenance").map_err(|e| IoError::format(path, e))?;
    Ok(doc.graphs)
}

/// Reads a directory written by [`save_dataset`].
pub fn load_dataset(root: &Path) -> Result<LoadedDataset, IoError> {
    let vocabulary = load_vocabulary(&root.join(VOCABULARY_FILE))?;
    let dir = root.join(DATASET_DIR);
    let manifest = load_manifest(&dir.join(MANIFEST_FILE))?;
    let graphs = manifest
        .cg_file_refs
        .iter()
        .map(|name| load_cg(&dir.join(name), &vocabulary))
        .collect::<Result<Vec<_>, _>>()?;
    let provenance = match &manifest.provenance_ref {
        Some(name) => Some(load_provenance(&dir.join(name))?),
        None => None,
    };
    Ok(LoadedDataset { vocabulary, manifest, graphs, provenance })
}

// ---------------------------------------------------------------------------
// DOT

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' | '\\' => {
                out.push('\\');
                out.push(ch);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

/// Renders `g` as a Graphviz digraph: concept nodes are boxes labelled
/// `type : marker` (or `type : *`), relation nodes are ellipses, and each
/// edge from a relation to its argument is labelled with the 0-based
/// position.
pub fn export_dot(v: &Vocabulary, g: &ConceptualGraph) -> String {
    let mut out = String::from("digraph cg {\n");
    for c in g.concepts() {
        let marker = c.marker.as_ref().map_or("*", |m| m.as_str());
        let label = format!("{} : {}", v.concept_label(c.concept_type), marker);
        writeln!(out, "  n{} [shape=box, label={}];", c.id.0, quote(&label)).unwrap();
    }
    for r in g.relations() {
        writeln!(out, "  n{} [shape=ellipse, label={}];", r.id.0, quote(v.relation_label(r.relation_type))).unwrap();
    }
    for r in g.relations() {
        for (pos, a) in r.arguments.iter().enumerate() {
            writeln!(out, "  n{} -> n{} [label=\"{pos}\"];", r.id.0, a.0).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
