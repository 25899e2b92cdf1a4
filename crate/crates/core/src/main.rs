use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;

use scrambling::experiments::{load_config, run_with_workers, ExperimentConfig};

/// Run one experiment from a JSON config and write its CSV/JSON outputs.
#[derive(Parser)]
#[command(name = "scrambling", version)]
struct Cli {
    /// Experiment kind; must match the config's `kind`.
    #[arg(value_parser = PossibleValuesParser::new(ExperimentConfig::KINDS))]
    kind: String,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix; overrides the config's `output`.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (default: one per core).
    #[arg(long, env = "SCRAMBLING_WORKERS")]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli.config).and_then(|mut cfg| {
        if cfg.kind() != cli.kind {
            return Err(scrambling::Error::InvalidArgument(format!(
                "config {} is a `{}` experiment, not `{}`",
                cli.config.display(),
                cfg.kind(),
                cli.kind
            )));
        }
        if let Some(seed) = cli.seed {
            cfg.set_seed(seed);
        }
        if let Some(out) = cli.out.clone() {
            cfg.set_output(out);
        }
        run_with_workers(&cfg, cli.workers)
    });
    match result {
        Ok(manifest) => {
            for o in &manifest.outputs {
                println!("{}  {}", o.sha256, o.path);
            }
            eprintln!("{} finished in {:.2}s", manifest.kind, manifest.duration_seconds);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
