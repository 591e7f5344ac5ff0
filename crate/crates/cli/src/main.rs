use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use cgsynth::gamma::RelationDomainPolicy;
use cgsynth_cli::{commands, Failure};
use clap::{Parser, Subcommand, ValueEnum};

/// Synthetic conceptual-graph datasets from a vocabulary and γ-CG templates.
#[derive(Parser, Debug)]
#[command(name = "cgsynth", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline and write a dataset directory.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for graph generation.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Build a random vocabulary from the [autoVoc] section.
    AutoVoc {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build variable-free γ-CGs from the [autoGcg] section.
    AutoGcg {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Add variables to the configured γ-CGs per the [autoVar] section.
    AutoVar {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check documents or directories of documents.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Vocabulary for CG and γ-CG files; found next to them when omitted.
        #[arg(long)]
        vocabulary: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Policy::SignatureCompatible)]
        relation_domain_policy: Policy,
    },
    /// Print NbN, NbL and arity counts for a dataset directory.
    Stats { dir: PathBuf },
    /// Render a CG or γ-CG file as Graphviz DOT.
    ExportDot {
        path: PathBuf,
        #[arg(long)]
        vocabulary: Option<PathBuf>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Policy {
    ArityOnly,
    SignatureCompatible,
}

impl From<Policy> for RelationDomainPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::ArityOnly => RelationDomainPolicy::ArityOnly,
            Policy::SignatureCompatible => RelationDomainPolicy::SignatureCompatible,
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let out = &mut io::stdout().lock();
    match cli.command {
        Command::Generate { config, out: dir, seed, jobs } => commands::generate(&config, &dir, seed, jobs, out)?,
        Command::AutoVoc { config, out: dir, seed } => commands::auto_voc(&config, &dir, seed, out)?,
        Command::AutoGcg { config, out: dir, seed } => commands::auto_gcg(&config, &dir, seed, out)?,
        Command::AutoVar { config, out: dir, seed } => commands::auto_var(&config, &dir, seed, out)?,
        Command::Validate { paths, vocabulary, relation_domain_policy } => {
            return commands::validate(&paths, vocabulary.as_deref(), relation_domain_policy.into(), out)
        }
        Command::Stats { dir } => commands::stats(&dir, out)?,
        Command::ExportDot { path, vocabulary, out: file } => {
            commands::export_dot_cmd(&path, vocabulary.as_deref(), file.as_deref(), out)?
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cgsynth_cli::EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
