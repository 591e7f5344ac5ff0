//! One function per subcommand. Human-readable output goes to the writer
//! passed in; diagnostics that are not the command's result go to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cgsynth::gamma::{validate_gamma, RelationDomainPolicy};
use cgsynth::io::{
    cg_from_str, document_kind, export_dot, gamma_from_str, load_dataset, load_manifest, load_provenance,
    load_vocabulary, save_dataset, save_gamma_dir, save_vocabulary, DATASET_DIR, GAMMA_DIR, MANIFEST_FILE,
    VOCABULARY_FILE,
};
use cgsynth::metrics::{compute_stats, DatasetStats};
use cgsynth::{validate_graph, Vocabulary};

use crate::config::RunConfigDocument;
use crate::output::write_atomically;
use crate::{pipeline, Failure, EXIT_VALIDATION};

fn warn(lines: &[String]) {
    for w in lines {
        eprintln!("warning: {w}");
    }
}

/// Runs the full pipeline and writes `vocabulary.json`, `gamma/` and
/// `dataset/` under `out`.
pub fn generate(config: &Path, out: &Path, seed: Option<u64>, jobs: usize, w: &mut impl Write) -> Result<(), Failure> {
    let doc = RunConfigDocument::load(config)?;
    let seed = pipeline::resolve_seed(seed, &doc);
    let run = pipeline::run(&doc, seed, jobs)?;
    warn(&run.warnings);
    let manifest = write_atomically(out, |dir| {
        save_gamma_dir(&dir.join(GAMMA_DIR), &run.vocabulary, &run.gammas)?;
        Ok(save_dataset(dir, &run.dataset, &run.config)?)
    })?;
    writeln!(w, "seed {seed}: wrote {} CGs to {}", manifest.cg_file_refs.len(), out.display())?;
    write!(w, "{}", stats_table(&manifest.stats))?;
    Ok(())
}

pub fn auto_voc(config: &Path, out: &Path, seed: Option<u64>, w: &mut impl Write) -> Result<(), Failure> {
    let doc = RunConfigDocument::load(config)?;
    if doc.auto_voc.is_none() {
        return Err(Failure::config(anyhow::anyhow!("the [autoVoc] section is required")));
    }
    let seed = pipeline::resolve_seed(seed, &doc);
    let v = pipeline::vocabulary(&RunConfigDocument { inputs: Default::default(), ..doc }, seed)?;
    write_atomically(out, |dir| Ok(save_vocabulary(&dir.join(VOCABULARY_FILE), &v)?))?;
    writeln!(
        w,
        "seed {seed}: {} concept types (height {}), {} relation types, {} markers",
        v.concepts().len(),
        v.concepts().height(),
        v.relation_count(),
        v.markers().count()
    )?;
    Ok(())
}

fn write_gammas(out: &Path, v: &Vocabulary, gammas: &[cgsynth::gamma::GammaCG]) -> Result<(), Failure> {
    write_atomically(out, |dir| {
        save_vocabulary(&dir.join(VOCABULARY_FILE), v)?;
        save_gamma_dir(&dir.join(GAMMA_DIR), v, gammas)?;
        Ok(())
    })
}

pub fn auto_gcg(config: &Path, out: &Path, seed: Option<u64>, w: &mut impl Write) -> Result<(), Failure> {
    let doc = RunConfigDocument::load(config)?;
    doc.check()?;
    if doc.auto_gcg.is_none() {
        return Err(Failure::config(anyhow::anyhow!("the [autoGcg] section is required")));
    }
    let seed = pipeline::resolve_seed(seed, &doc);
    let v = pipeline::vocabulary(&doc, seed)?;
    let gammas = pipeline::base_gammas(&doc, &v, seed)?;
    write_gammas(out, &v, &gammas)?;
    let nodes: usize = gammas.iter().map(|g| g.graph.size()).sum();
    writeln!(w, "seed {seed}: {} γ-CGs, {nodes} nodes in total", gammas.len())?;
    Ok(())
}

pub fn auto_var(config: &Path, out: &Path, seed: Option<u64>, w: &mut impl Write) -> Result<(), Failure> {
    let doc = RunConfigDocument::load(config)?;
    doc.check()?;
    if doc.auto_var.is_none() {
        return Err(Failure::config(anyhow::anyhow!("the [autoVar] section is required")));
    }
    let seed = pipeline::resolve_seed(seed, &doc);
    let v = pipeline::vocabulary(&doc, seed)?;
    let before = pipeline::base_gammas(&doc, &v, seed)?;
    let count = |gs: &[cgsynth::gamma::GammaCG]| gs.iter().map(|g| g.variables.len()).sum::<usize>();
    let old = count(&before);
    let (gammas, warnings) = pipeline::with_variables(&doc, &v, before, seed)?;
    warn(&warnings);
    write_gammas(out, &v, &gammas)?;
    writeln!(w, "seed {seed}: {} γ-CGs, variables {old} -> {}", gammas.len(), count(&gammas))?;
    Ok(())
}

/// Header row and one value row. Arities 1 to 3 always appear; higher ones
/// get their own columns when present.
pub fn stats_table(s: &DatasetStats) -> String {
    let mut arities: Vec<usize> = (1..=3).collect();
    arities.extend(s.arity_counts.keys().copied().filter(|&k| k > 3));
    arities.sort_unstable();
    let mut head = format!("{:>6}  {:>16}  {:>16}", "CGs", "NbN", "NbL");
    let mut row = format!(
        "{:>6}  {:>16}  {:>16}",
        s.cg_count,
        format!("{:.1} ± {:.1}", s.nb_nodes_mean, s.nb_nodes_stddev),
        format!("{:.1} ± {:.1}", s.nb_labels_mean, s.nb_labels_stddev)
    );
    for k in arities {
        head.push_str(&format!("  {:>7}", format!("Ar{k}")));
        row.push_str(&format!("  {:>7.2}", s.arity_counts.get(&k).copied().unwrap_or(0.0)));
    }
    format!("{head}\n{row}\n")
}

/// Accepts an output root or its `dataset/` directory.
fn dataset_root(dir: &Path) -> PathBuf {
    if !dir.join(DATASET_DIR).join(MANIFEST_FILE).is_file() && dir.join(MANIFEST_FILE).is_file() {
        if let Some(parent) = dir.parent() {
            return parent.to_owned();
        }
    }
    dir.to_owned()
}

pub fn stats(dir: &Path, w: &mut impl Write) -> Result<(), Failure> {
    let loaded = load_dataset(&dataset_root(dir))?;
    let stats = compute_stats(&loaded.graphs).map_err(Failure::config)?;
    if stats != loaded.manifest.stats {
        eprintln!("warning: recomputed statistics differ from the manifest");
    }
    write!(w, "{}", stats_table(&stats))?;
    Ok(())
}

/// The vocabulary next to a document: the flag, else the nearest
/// `vocabulary.json` in the file's directory or one of its two parents.
fn find_vocabulary(explicit: Option<&Path>, doc: &Path) -> Result<PathBuf, Failure> {
    if let Some(p) = explicit {
        return Ok(p.to_owned());
    }
    doc.ancestors()
        .skip(1)
        .take(3)
        .map(|d| d.join(VOCABULARY_FILE))
        .find(|p| p.is_file())
        .ok_or_else(|| {
            Failure::config(anyhow::anyhow!("{}: no vocabulary found; pass --vocabulary", doc.display()))
        })
}

fn json_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), Failure> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            json_files(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    Ok(())
}

/// Outcome of checking one document: problems to print, and the exit code
/// they imply.
struct Checked {
    lines: Vec<String>,
    code: u8,
}

fn check_document(path: &Path, vocabulary: Option<&Path>, policy: RelationDomainPolicy) -> Result<Checked, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::config(anyhow::anyhow!("{}: {e}", path.display())))?;
    let kind = document_kind(&text).map_err(|e| Failure::from(e).context(path.display().to_string()))?;
    let lines: Vec<String> = match kind.as_str() {
        "vocabulary" => {
            load_vocabulary(path)?;
            Vec::new()
        }
        "cg" | "gamma-cg" => {
            let v = load_vocabulary(&find_vocabulary(vocabulary, path)?)?;
            let report = if kind == "cg" {
                let g = cg_from_str(&v, &text).map_err(|e| Failure::from(e).context(path.display().to_string()))?;
                validate_graph(&v, &g)
            } else {
                let g = gamma_from_str(&v, &text).map_err(|e| Failure::from(e).context(path.display().to_string()))?;
                validate_gamma(&v, &g, policy)
            };
            report.violations.iter().map(|x| x.to_string()).collect()
        }
        "manifest" => {
            let m = load_manifest(path)?;
            let dir = path.parent().unwrap_or(Path::new("."));
            m.cg_file_refs
                .iter()
                .chain(&m.provenance_ref)
                .filter(|name| !dir.join(name).is_file())
                .map(|name| format!("missing referenced file `{name}`"))
                .collect()
        }
        "provenance" => {
            load_provenance(path)?;
            Vec::new()
        }
        other => return Err(Failure::config(anyhow::anyhow!("{}: unknown document kind `{other}`", path.display()))),
    };
    let code = if lines.is_empty() { 0 } else { EXIT_VALIDATION };
    Ok(Checked { lines, code })
}

/// Checks every document under `paths`, printing one line per violation.
/// Returns the exit code: the worst over all documents.
pub fn validate(
    paths: &[PathBuf],
    vocabulary: Option<&Path>,
    policy: RelationDomainPolicy,
    w: &mut impl Write,
) -> Result<u8, Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            json_files(p, &mut files)?;
        } else {
            files.push(p.clone());
        }
    }
    let mut worst = 0;
    let mut problems = 0;
    for f in &files {
        match check_document(f, vocabulary, policy) {
            Ok(c) => {
                for line in &c.lines {
                    writeln!(w, "{}: {line}", f.display())?;
                }
                problems += c.lines.len();
                worst = worst.max(c.code);
            }
            Err(e) => {
                writeln!(w, "{e}")?;
                problems += 1;
                worst = worst.max(e.code);
            }
        }
    }
    eprintln!("checked {} documents, {problems} problems", files.len());
    Ok(worst)
}

pub fn export_dot_cmd(
    path: &Path,
    vocabulary: Option<&Path>,
    out: Option<&Path>,
    w: &mut impl Write,
) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::config(anyhow::anyhow!("{}: {e}", path.display())))?;
    let kind = document_kind(&text).map_err(|e| Failure::from(e).context(path.display().to_string()))?;
    let v = load_vocabulary(&find_vocabulary(vocabulary, path)?)?;
    let graph = match kind.as_str() {
        "cg" => cg_from_str(&v, &text),
        "gamma-cg" => gamma_from_str(&v, &text).map(|g| g.graph),
        other => {
            return Err(Failure::config(anyhow::anyhow!("{}: cannot export a `{other}` document", path.display())))
        }
    }
    .map_err(|e| Failure::from(e).context(path.display().to_string()))?;
    let dot = export_dot(&v, &graph);
    match out {
        Some(p) => fs::write(p, dot).map_err(|e| Failure::config(anyhow::anyhow!("{}: {e}", p.display())))?,
        None => w.write_all(dot.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn table_shows_higher_arities() {
        let s = DatasetStats {
            cg_count: 2,
            nb_nodes_mean: 31.0,
            nb_nodes_stddev: 0.0,
            nb_labels_mean: 20.5,
            nb_labels_stddev: 1.5,
            arity_counts: BTreeMap::from([(2, 10.0), (5, 0.5)]),
        };
        let t = stats_table(&s);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 2);
        for col in ["NbN", "NbL", "Ar1", "Ar2", "Ar3", "Ar5"] {
            assert!(lines[0].contains(col), "{col}");
        }
        assert!(!lines[0].contains("Ar4"));
        assert!(lines[1].contains("31.0 ± 0.0"));
        assert!(lines[1].contains("0.50"));
    }
}
