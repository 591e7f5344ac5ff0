//! Acceptance run: ten criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines always reach the terminal; exits nonzero if
//! any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use cgsynth::autogen::{auto_gamma_cgs, auto_vocabulary, AutoGcgConfig, AutoVocConfig, ParamSpec};
use cgsynth::fixtures::{reference_vocabulary, shared_marker_pair};
use cgsynth::gamma::{concept_type_domain, marker_domain, relation_type_domain, RelationDomainPolicy};
use cgsynth::generator::{generate_dataset, join, GeneratorConfig};
use cgsynth::io::*;
use cgsynth::metrics::{compute_stats, distinct_labels};
use cgsynth::rng::seeded;
use cgsynth::{validate_graph, ConceptualGraph};
use cgsynth_cli::config::RunConfigDocument;
use cgsynth_cli::pipeline;
use common::*;
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load_config(name: &str) -> RunConfigDocument {
    RunConfigDocument::load(&config(name)).expect("shipped config loads")
}

// ---------------------------------------------------------------------------
// 1 and 2 share the same hundred full-auto runs.

struct FullAutoRun {
    violations: usize,
    count: usize,
    min: usize,
    max: usize,
    largest_gamma: usize,
}

fn full_auto_runs() -> &'static Result<Vec<FullAutoRun>, String> {
    static RUNS: OnceLock<Result<Vec<FullAutoRun>, String>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let doc = load_config("full-auto.toml");
        (0..100u64)
            .map(|seed| {
                let run = pipeline::run(&doc, seed, 1).map_err(|e| format!("seed {seed}: {e}"))?;
                let sizes: Vec<usize> = run.dataset.graphs.iter().map(|g| g.size()).collect();
                Ok(FullAutoRun {
                    violations: run.dataset.graphs.iter().map(|g| validate_graph(&run.dataset.vocabulary, g).len()).sum(),
                    count: sizes.len(),
                    min: sizes.iter().copied().min().unwrap_or(0),
                    max: sizes.iter().copied().max().unwrap_or(0),
                    largest_gamma: run.gammas.iter().map(|g| g.graph.size()).max().unwrap_or(0),
                })
            })
            .collect()
    })
}

fn soundness() -> Outcome {
    let runs = full_auto_runs().as_ref().map_err(Clone::clone)?;
    let violations: usize = runs.iter().map(|r| r.violations).sum();
    let graphs: usize = runs.iter().map(|r| r.count).sum();
    ensure(violations == 0, format!("{graphs} CGs over {} seeds, {violations} violations", runs.len()))
}

fn size_contract() -> Outcome {
    let runs = full_auto_runs().as_ref().map_err(Clone::clone)?;
    let bad: Vec<String> = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.count != 100 || r.min < 30 || r.max >= 30 + r.largest_gamma)
        .map(|(seed, r)| format!("seed {seed}: {} CGs, sizes {}..={}, bound {}", r.count, r.min, r.max, 30 + r.largest_gamma))
        .collect();
    let lo = runs.iter().map(|r| r.min).min().unwrap_or(0);
    let hi = runs.iter().map(|r| r.max).max().unwrap_or(0);
    ensure(bad.is_empty(), format!("sizes {lo}..={hi} over {} runs; {} violations {bad:?}", runs.len(), bad.len()))
}

// ---------------------------------------------------------------------------
// 3 and 4 go through the binary.

fn run_generate(cfg: &Path, out: &Path, extra: &[&str]) -> Result<Duration, String> {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_cgsynth"))
        .args(["generate", "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !o.status.success() {
        return Err(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    Ok(elapsed)
}

fn runtime() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut times = Vec::new();
    for name in ["reference.toml", "full-auto.toml"] {
        let t = run_generate(&config(name), &dir.path().join(name), &[])?;
        times.push((name, t));
    }
    let worst = times.iter().map(|(_, t)| *t).max().unwrap_or_default();
    let detail = times.iter().map(|(n, t)| format!("{n} {:.2}s", t.as_secs_f64())).collect::<Vec<_>>().join(", ");
    ensure(worst < Duration::from_secs(5), format!("100 CGs, minSize 30: {detail}"))
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_owned()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_owned(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn diff_count(a: &BTreeMap<PathBuf, Vec<u8>>, b: &BTreeMap<PathBuf, Vec<u8>>) -> usize {
    let keys: BTreeSet<&PathBuf> = a.keys().chain(b.keys()).collect();
    keys.into_iter().filter(|k| a.get(*k) != b.get(*k)).count()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut diffs = 0;
    let mut files = 0;
    for name in ["full-auto.toml", "reference.toml"] {
        let base = dir.path().join(name);
        run_generate(&config(name), &base.join("a"), &["--seed", "42"])?;
        run_generate(&config(name), &base.join("b"), &["--seed", "42"])?;
        run_generate(&config(name), &base.join("c"), &["--seed", "42", "--jobs", "4"])?;
        let a = tree(&base.join("a"));
        files += a.len();
        diffs += diff_count(&a, &tree(&base.join("b"))) + diff_count(&a, &tree(&base.join("c")));
    }
    ensure(diffs == 0 && files > 0, format!("{files} files compared across repeat and --jobs 4 runs, {diffs} diffs"))
}

// ---------------------------------------------------------------------------

fn domain_oracle() -> Outcome {
    let mut checked = 0;
    let mut mismatches = 0;
    for seed in 0..50 {
        let mut rng = seeded(seed);
        let v = random_vocabulary(&mut rng, 100);
        for _ in 0..3 {
            let n = rng.random_range(0..12);
            let g = random_graph(&v, &mut rng, n, 0.5);
            for r in g.relations() {
                for policy in [RelationDomainPolicy::ArityOnly, RelationDomainPolicy::SignatureCompatible] {
                    checked += 1;
                    if relation_type_domain(&v, &g, r.id, policy).ok() != Some(oracle_relation_domain(&v, &g, r.id, policy)) {
                        mismatches += 1;
                    }
                }
            }
            for c in g.concepts() {
                checked += 1;
                if concept_type_domain(&v, &g, c.id).ok() != Some(oracle_concept_domain(&v, &g, c.id)) {
                    mismatches += 1;
                }
                if c.marker.is_some() {
                    checked += 1;
                    if marker_domain(&v, &g, c.id).ok() != Some(oracle_marker_domain(&v, &g, c.id)) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    ensure(mismatches == 0, format!("{checked} domains on 50 vocabularies, {mismatches} mismatches"))
}

fn structural_auto_voc() -> Outcome {
    let config = AutoVocConfig {
        concept_depth: ParamSpec::fixed(4.0),
        relation_depth: ParamSpec::fixed(3.0),
        max_children: ParamSpec::fixed(3.0),
        markers_per_type: ParamSpec::fixed(3.0),
        ..AutoVocConfig::default()
    };
    let mut problems = Vec::new();
    let mut pairs = 0;
    for seed in 0..100 {
        let v = auto_vocabulary(&config, &mut seeded(seed)).map_err(|e| e.to_string())?;
        let c = v.concepts();
        if c.height() != 4 {
            problems.push(format!("seed {seed}: concept depth {}", c.height()));
        }
        for t in c.types() {
            if c.children(t).len() > 3 {
                problems.push(format!("seed {seed}: {} has {} children", c.label(t), c.children(t).len()));
            }
            let markers = v.markers().filter(|&(_, mt)| mt == t).count();
            if markers != 3 {
                problems.push(format!("seed {seed}: {} has {markers} markers", c.label(t)));
            }
        }
        for arity in v.arities() {
            let h = v.relation_hierarchy(arity).unwrap();
            if h.height() != 3 {
                problems.push(format!("seed {seed}: arity {arity} depth {}", h.height()));
            }
            if h.types().any(|t| h.children(t).len() > 3) {
                problems.push(format!("seed {seed}: arity {arity} has a node with more than 3 children"));
            }
        }
        let rels: Vec<_> = v.relation_types().collect();
        for &a in &rels {
            for &b in &rels {
                if a != b && relation_le(&v, a, b) {
                    pairs += 1;
                    let monotone = (0..a.arity).all(|k| {
                        concept_le(&v, v.restriction_for(a, k).unwrap(), v.restriction_for(b, k).unwrap())
                    });
                    if !monotone {
                        problems.push(format!("seed {seed}: {} not below {}", v.relation_label(a), v.relation_label(b)));
                    }
                }
            }
        }
    }
    ensure(
        problems.is_empty(),
        format!("100 seeds, {pairs} ancestor pairs checked, {} violations {:?}", problems.len(), problems.iter().take(3).collect::<Vec<_>>()),
    )
}

// ---------------------------------------------------------------------------
// 7: NbL spread and arity mix across input modes.

#[derive(Default)]
struct ModeSummary {
    /// NbL of every CG of every run in the block.
    labels: Vec<f64>,
    within_sd: Vec<f64>,
    arity: BTreeMap<usize, f64>,
    runs: usize,
}

impl ModeSummary {
    fn add(&mut self, graphs: &[ConceptualGraph]) {
        let stats = compute_stats(graphs).expect("non-empty dataset");
        self.labels.extend(graphs.iter().map(|g| distinct_labels(g) as f64));
        self.within_sd.push(stats.nb_labels_stddev);
        for (k, x) in &stats.arity_counts {
            *self.arity.entry(*k).or_default() += x;
        }
        self.runs += 1;
    }

    fn pooled_sd(&self) -> f64 {
        mean_sd(&self.labels).1
    }

    fn mean_within_sd(&self) -> f64 {
        mean_sd(&self.within_sd).0
    }

    fn ar(&self, k: usize) -> f64 {
        self.arity.get(&k).copied().unwrap_or(0.0) / self.runs as f64
    }

    /// Share of relation nodes whose arity is not 2.
    fn non_binary(&self) -> f64 {
        let total: f64 = self.arity.values().sum();
        (total - self.arity.get(&2).copied().unwrap_or(0.0)) / total
    }
}

fn block(mode: &str, seeds: std::ops::Range<u64>) -> Result<ModeSummary, String> {
    let doc = load_config(mode);
    let mut summary = ModeSummary::default();
    for seed in seeds {
        let run = pipeline::run(&doc, seed, 1).map_err(|e| format!("{mode} seed {seed}: {e}"))?;
        summary.add(&run.dataset.graphs);
    }
    Ok(summary)
}

/// NbL spread is taken over every CG of a block's runs. The mean of the
/// per-run spreads is printed next to it.
fn variability() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for rep in 0..3u64 {
        let seeds = rep * 100..rep * 100 + 100;
        let base = block("reference.toml", seeds.clone())?;
        let voc = block("auto-voc.toml", seeds.clone())?;
        let gcg = block("auto-gcg.toml", seeds)?;
        let ratio = voc.pooled_sd() / base.pooled_sd();
        let arity_ok = gcg.ar(1) > 0.0 && gcg.ar(3) > 0.0 && gcg.non_binary() > base.non_binary();
        ok &= ratio >= 1.5 && arity_ok;
        lines.push(format!(
            "rep {rep}: NbL sd reference {:.2} vs Auto Voc {:.2} (x{ratio:.2}; within-run {:.2} vs {:.2}); \
             Auto γCG Ar1 {:.2} Ar3 {:.2}, non-binary share {:.3} vs {:.3}",
            base.pooled_sd(),
            voc.pooled_sd(),
            base.mean_within_sd(),
            voc.mean_within_sd(),
            gcg.ar(1),
            gcg.ar(3),
            gcg.non_binary(),
            base.non_binary()
        ));
    }
    let detail = lines.join("\n        ");
    ensure(ok, detail)
}

// ---------------------------------------------------------------------------

fn metrics_oracle() -> Outcome {
    let mut mismatches = 0;
    for seed in 0..20 {
        let mut rng = seeded(seed);
        let v = random_vocabulary(&mut rng, 60);
        let n = rng.random_range(1..=20);
        let mut graphs: Vec<ConceptualGraph> = (0..n)
            .map(|_| {
                let k = rng.random_range(0..10);
                random_graph(&v, &mut rng, k, 0.5)
            })
            .collect();
        let stats = compute_stats(&graphs).map_err(|e| e.to_string())?;
        let (nm, ns, lm, ls, arity) = recount(&v, &graphs);
        let arity_ok = stats.arity_counts.len() == arity.len()
            && arity.iter().all(|(k, x)| stats.arity_counts.get(k).is_some_and(|y| close(*x, *y)));
        if stats.cg_count != n
            || !close(stats.nb_nodes_mean, nm)
            || !close(stats.nb_nodes_stddev, ns)
            || !close(stats.nb_labels_mean, lm)
            || !close(stats.nb_labels_stddev, ls)
            || !arity_ok
        {
            mismatches += 1;
        }
        graphs.shuffle(&mut rng);
        if !same_stats(&compute_stats(&graphs).map_err(|e| e.to_string())?, &stats) {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, format!("20 datasets plus shuffles, {mismatches} mismatches"))
}

fn join_properties() -> Outcome {
    let mut failures = 0;
    let empty = ConceptualGraph::new();
    for seed in 0..1000 {
        let mut rng = seeded(seed);
        let v = random_vocabulary(&mut rng, 40);
        let n = rng.random_range(0..6);
        let a = unique_markers(&random_graph(&v, &mut rng, n, 0.5), &BTreeSet::new());
        let n = rng.random_range(0..6);
        let b = unique_markers(&random_graph(&v, &mut rng, n, 0.5), &markers(&a));
        if join(&v, &empty, &a).graph != a || join(&v, &a, &empty).graph != a {
            failures += 1;
        }
        let j = join(&v, &a, &b);
        if j.graph.size() != a.size() + b.size() || !j.merges.is_empty() {
            failures += 1;
        }
    }
    let v = reference_vocabulary();
    let (left, right) = shared_marker_pair(&v);
    let j = join(&v, &left, &right);
    let dave: Vec<_> = j.graph.concepts().iter().filter(|c| c.marker.as_ref().is_some_and(|m| m.as_str() == "dave")).collect();
    let shared_ok = j.merges.len() == 1
        && j.graph.size() == left.size() + right.size() - 1
        && dave.len() == 1
        && v.concept_label(dave[0].concept_type) == "Researcher"
        && j.graph.incident(dave[0].id).count() == 2;
    if !shared_ok {
        failures += 1;
    }
    ensure(failures == 0, format!("1000 random fixtures plus the shared-marker pair, {failures} failures"))
}

fn round_trips() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut diffs = Vec::new();
    for seed in 0..100u64 {
        let mut rng = seeded(seed);
        let v = random_vocabulary(&mut rng, 60);
        let text = vocabulary_to_string(&v);
        match vocabulary_from_str(&text) {
            Ok(back) if back == v && vocabulary_to_string(&back) == text => {}
            _ => diffs.push(format!("vocabulary {seed}")),
        }
        let n = rng.random_range(0..8);
        let gcg = random_gamma(&v, &mut rng, "g", n, 3);
        let text = gamma_to_string(&v, &gcg);
        match gamma_from_str(&v, &text) {
            Ok(back) if back == gcg && gamma_to_string(&v, &back) == text => {}
            _ => diffs.push(format!("γ-CG {seed}")),
        }
        let g = random_graph(&v, &mut rng, n, 0.5);
        let text = cg_to_string(&v, &g);
        match cg_from_str(&v, &text) {
            Ok(back) if back == g && cg_to_string(&v, &back) == text => {}
            _ => diffs.push(format!("CG {seed}")),
        }

        let voc = auto_vocabulary(&AutoVocConfig::default(), &mut rng).map_err(|e| e.to_string())?;
        let gcg_config = AutoGcgConfig { count: ParamSpec::fixed(3.0), ..AutoGcgConfig::default() };
        let gammas = auto_gamma_cgs(&voc, &gcg_config, RelationDomainPolicy::default(), &mut rng).map_err(|e| e.to_string())?;
        let config = GeneratorConfig::new(5, 15, 2, seed);
        let d = generate_dataset(&voc, &gammas, &config).map_err(|e| e.to_string())?;
        let (a, b) = (dir.path().join(format!("{seed}a")), dir.path().join(format!("{seed}b")));
        let manifest = save_dataset(&a, &d, &config).map_err(|e| e.to_string())?;
        save_dataset(&b, &d, &config).map_err(|e| e.to_string())?;
        let same = match load_dataset(&a) {
            Ok(l) => {
                l.graphs == d.graphs
                    && l.vocabulary == d.vocabulary
                    && l.manifest == manifest
                    && compute_stats(&l.graphs).ok().as_ref() == Some(&manifest.stats)
            }
            Err(_) => false,
        };
        if !same || diff_count(&tree(&a), &tree(&b)) != 0 {
            diffs.push(format!("dataset {seed}"));
        }
    }
    ensure(diffs.is_empty(), format!("100 instances of each document type, {} diffs {diffs:?}", diffs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("soundness", soundness),
        ("size and count contract", size_contract),
        ("runtime bound", runtime),
        ("determinism", determinism),
        ("domain oracle", domain_oracle),
        ("auto vocabulary structure", structural_auto_voc),
        ("variability trend", variability),
        ("metrics oracle", metrics_oracle),
        ("join properties", join_properties),
        ("format round trips", round_trips),
    ];
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (name, _) in &criteria {
            println!("{name}: test");
        }
        return;
    }
    let filter = args.iter().find(|a| !a.starts_with('-'));
    let mut failed = 0;
    println!("\nacceptance criteria");
    for (i, (name, check)) in criteria.iter().enumerate() {
        if filter.is_some_and(|f| !name.contains(f.as_str()) && !"acceptance".contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name} [{secs:.1}s]: {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
