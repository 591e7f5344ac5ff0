//! The TOML run configuration shared by `generate` and the `auto-*` stages.

use std::fs;
use std::path::{Path, PathBuf};

use cgsynth::autogen::{AutoGcgConfig, AutoVarConfig, AutoVocConfig};
use cgsynth::gamma::RelationDomainPolicy;
use cgsynth::generator::GeneratorConfig;
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfigDocument {
    /// Overridden by `--seed`; drawn from entropy when absent everywhere.
    pub seed: Option<u64>,
    /// Applies to every stage that computes relation-type domains.
    #[serde(default)]
    pub relation_domain_policy: RelationDomainPolicy,
    #[serde(default)]
    pub inputs: Inputs,
    pub auto_voc: Option<AutoVocConfig>,
    pub auto_gcg: Option<AutoGcgConfig>,
    pub auto_var: Option<AutoVarConfig>,
    pub generator: Option<GeneratorSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// Built-in vocabulary and its hand-written γ-CGs.
    Reference,
    /// Built-in vocabulary only.
    ReferenceVocabulary,
}

/// Explicit inputs. Relative paths are resolved against the directory of the
/// configuration file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Inputs {
    pub vocabulary: Option<PathBuf>,
    /// γ-CG files, or directories whose `*.json` files are all γ-CGs.
    #[serde(default)]
    pub gammas: Vec<PathBuf>,
    pub fixture: Option<Fixture>,
}

/// Generator parameters without the seed, which lives at top level.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GeneratorSection {
    #[serde(rename = "maxCGs")]
    pub max_cgs: usize,
    pub min_size: usize,
    pub max_spe: usize,
}

impl GeneratorSection {
    pub fn with_seed(self, seed: u64, policy: RelationDomainPolicy) -> GeneratorConfig {
        GeneratorConfig { relation_domain_policy: policy, ..GeneratorConfig::new(self.max_cgs, self.min_size, self.max_spe, seed) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VocabularySource {
    File(PathBuf),
    Reference,
    Auto(AutoVocConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GammaSource {
    Files(Vec<PathBuf>),
    Reference,
    Auto(AutoGcgConfig),
}

impl RunConfigDocument {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::config(anyhow::anyhow!("invalid configuration: {e}")))
    }

    /// Reads `path` and resolves relative input paths against its directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::config(anyhow::anyhow!("{}: {e}", path.display())))?;
        let mut doc = Self::parse(&text).map_err(|f| f.context(path.display().to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(v) = &mut doc.inputs.vocabulary {
            *v = base.join(&*v);
        }
        for g in &mut doc.inputs.gammas {
            *g = base.join(&*g);
        }
        Ok(doc)
    }

    /// The single vocabulary source, if one is configured.
    pub fn vocabulary_source(&self) -> Result<Option<VocabularySource>, Failure> {
        let mut found = Vec::new();
        if let Some(p) = &self.inputs.vocabulary {
            found.push(("inputs.vocabulary", VocabularySource::File(p.clone())));
        }
        if self.inputs.fixture.is_some() {
            found.push(("inputs.fixture", VocabularySource::Reference));
        }
        if let Some(c) = &self.auto_voc {
            found.push(("autoVoc", VocabularySource::Auto(c.clone())));
        }
        single("vocabulary", found)
    }

    /// The single γ-CG source, if one is configured.
    pub fn gamma_source(&self) -> Result<Option<GammaSource>, Failure> {
        let mut found = Vec::new();
        if !self.inputs.gammas.is_empty() {
            found.push(("inputs.gammas", GammaSource::Files(self.inputs.gammas.clone())));
        }
        if self.inputs.fixture == Some(Fixture::Reference) {
            found.push(("inputs.fixture", GammaSource::Reference));
        }
        if let Some(c) = &self.auto_gcg {
            found.push(("autoGcg", GammaSource::Auto(c.clone())));
        }
        single("γ-CG", found)
    }

    /// Both sources must be unambiguous even when a command needs only one.
    pub fn check(&self) -> Result<(), Failure> {
        self.vocabulary_source()?;
        self.gamma_source()?;
        Ok(())
    }
}

fn single<T>(what: &str, mut found: Vec<(&str, T)>) -> Result<Option<T>, Failure> {
    match found.len() {
        0 => Ok(None),
        1 => Ok(found.pop().map(|(_, s)| s)),
        _ => {
            let names: Vec<&str> = found.iter().map(|(n, _)| *n).collect();
            Err(Failure::config(anyhow::anyhow!("more than one {what} source: {}", names.join(", "))))
        }
    }
}
