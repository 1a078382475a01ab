//! `linkstab`: runs one experiment and writes its CSV artifact.
//!
//! Exit status: 0 when the artifact was fully written, 2 for configuration
//! or parameter errors, 1 for I/O failures.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use linkstab_core::experiment::{run, ExperimentConfig, ExperimentFile, Overrides};
use linkstab_core::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    Indoor,
    Outdoor,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Indoor => "indoor",
            Preset::Outdoor => "outdoor",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "linkstab", version, about = "Link-stability experiments with CSV output")]
struct Cli {
    /// Experiment file (TOML).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides the seed in the config.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Output CSV path; stdout when neither this nor the config sets one.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Deployment preset the config's [deployment] table is applied over.
    #[arg(long, value_enum)]
    preset: Option<Preset>,

    /// Experiment kind: prr-sweep, node-compare, region, relay-sweep,
    /// entropy or route-stability.
    #[arg(long)]
    kind: Option<String>,

    /// Worker threads for the sweeps (default: all cores). Output does not
    /// depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    Config(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn write_atomic(path: &Path, data: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(data.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => ExperimentFile::from_path(p)?,
        None => ExperimentFile::default(),
    };
    let overrides = Overrides {
        kind: cli.kind,
        preset: cli.preset.map(|p| p.name().to_string()),
        seed: cli.seed,
        out: cli.out,
    };
    let config = ExperimentConfig::from_file(&file, &overrides)?;

    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Failure::Config(
                "invalid parameter `workers`: must be at least 1".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("invalid parameter `workers`: {e}")))?;
    }

    let csv = run(&config)?;
    match &config.out {
        Some(path) => {
            write_atomic(path, &csv).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let (msg, code) = match execute(Cli::parse()) {
        Ok(()) => return ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => (msg, 2),
        Err(Failure::Io(msg)) => (msg, 1),
    };
    eprintln!("linkstab: {}", one_line(&msg));
    ExitCode::from(code)
}
