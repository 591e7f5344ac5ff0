//! Turns a run configuration into a vocabulary, a γ-CG set and a dataset.
//! Each autogen stage draws from its own stream of the run seed.

use std::collections::hash_map::RandomState;
use std::hash::BuildHasher;
use std::path::PathBuf;

use cgsynth::autogen::{auto_gamma_cgs, auto_variables, auto_vocabulary};
use cgsynth::fixtures::{reference_gammas, reference_vocabulary};
use cgsynth::gamma::GammaCG;
use cgsynth::generator::{generate_dataset_with_jobs, Dataset, GeneratorConfig};
use cgsynth::io::{load_gamma, load_gamma_dir, load_vocabulary};
use cgsynth::rng::{stream, Stage};
use cgsynth::Vocabulary;

use crate::config::{GammaSource, RunConfigDocument, VocabularySource};
use crate::Failure;

/// `--seed` wins over the document; with neither, a seed is drawn from the
/// process's hash randomness.
pub fn resolve_seed(flag: Option<u64>, doc: &RunConfigDocument) -> u64 {
    flag.or(doc.seed).unwrap_or_else(|| RandomState::new().hash_one(std::time::SystemTime::now()))
}

fn missing(what: &str) -> Failure {
    Failure::config(anyhow::anyhow!("no {what} source: set one in [inputs] or add the [{}] section", match what {
        "vocabulary" => "autoVoc",
        _ => "autoGcg",
    }))
}

pub fn vocabulary(doc: &RunConfigDocument, seed: u64) -> Result<Vocabulary, Failure> {
    match doc.vocabulary_source()?.ok_or_else(|| missing("vocabulary"))? {
        VocabularySource::File(path) => Ok(load_vocabulary(&path)?),
        VocabularySource::Reference => Ok(reference_vocabulary()),
        VocabularySource::Auto(config) => {
            Ok(auto_vocabulary(&config, &mut stream(seed, Stage::AutoVocabulary, 0))?)
        }
    }
}

fn load_gamma_paths(vocab: &Vocabulary, paths: &[PathBuf]) -> Result<Vec<GammaCG>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(load_gamma_dir(p, vocab)?);
        } else {
            out.push(load_gamma(p, vocab)?);
        }
    }
    Ok(out)
}

/// γ-CGs from the configured source, before the optional autoVar stage.
pub fn base_gammas(doc: &RunConfigDocument, vocab: &Vocabulary, seed: u64) -> Result<Vec<GammaCG>, Failure> {
    match doc.gamma_source()?.ok_or_else(|| missing("γ-CG"))? {
        GammaSource::Files(paths) => load_gamma_paths(vocab, &paths),
        GammaSource::Reference => Ok(reference_gammas(vocab)),
        GammaSource::Auto(config) => Ok(auto_gamma_cgs(
            vocab,
            &config,
            doc.relation_domain_policy,
            &mut stream(seed, Stage::AutoGamma, 0),
        )?),
    }
}

/// Applies the autoVar section when present. Returns the warnings raised
/// for γ-CGs with too few free slots.
pub fn with_variables(
    doc: &RunConfigDocument,
    vocab: &Vocabulary,
    gammas: Vec<GammaCG>,
    seed: u64,
) -> Result<(Vec<GammaCG>, Vec<String>), Failure> {
    match &doc.auto_var {
        None => Ok((gammas, Vec::new())),
        Some(config) => {
            let out = auto_variables(
                vocab,
                &gammas,
                config,
                doc.relation_domain_policy,
                &mut stream(seed, Stage::AutoVariables, 0),
            )?;
            Ok((out.gammas, out.warnings))
        }
    }
}

pub struct Run {
    pub vocabulary: Vocabulary,
    pub gammas: Vec<GammaCG>,
    pub warnings: Vec<String>,
    pub config: GeneratorConfig,
    pub dataset: Dataset,
}

/// The whole pipeline: vocabulary, γ-CGs, variables, then generation.
pub fn run(doc: &RunConfigDocument, seed: u64, jobs: usize) -> Result<Run, Failure> {
    doc.check()?;
    let section = doc
        .generator
        .ok_or_else(|| Failure::config(anyhow::anyhow!("the [generator] section is required")))?;
    let config = section.with_seed(seed, doc.relation_domain_policy);
    config.validate()?;
    let vocabulary = vocabulary(doc, seed)?;
    let gammas = base_gammas(doc, &vocabulary, seed)?;
    let (gammas, warnings) = with_variables(doc, &vocabulary, gammas, seed)?;
    let dataset = generate_dataset_with_jobs(&vocabulary, &gammas, &config, jobs)?;
    Ok(Run { vocabulary, gammas, warnings, config, dataset })
}
