use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hmimo_bench::{output, run, BenchError, Experiment, OutputFormat, SweepSpec};
use hmimo_core::ModelVariant;

/// Near-field / far-field holographic MIMO channel model sweeps.
#[derive(Parser)]
#[command(name = "hmimo-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// NMSE and capacity against TX-RX distance.
    SweepDistance(RunArgs),
    /// NMSE and capacity against the number of TX elements.
    SweepElements(RunArgs),
    /// A single geometry, optionally with leading singular values.
    Point(RunArgs),
    /// Print the default configuration for an experiment as JSON.
    Config {
        #[arg(value_parser = parse_experiment)]
        experiment: Experiment,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON sweep configuration; defaults to the built-in full-size setup.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Comma-separated model labels, e.g. OCM,PSCM,FSCM.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Number of leading singular values to report per variant.
    #[arg(long)]
    dump_singular_values: Option<usize>,
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    serde_json::from_value(serde_json::Value::from(s))
        .map_err(|_| format!("unknown experiment {s:?} (distance, tx-elements, single-point)"))
}

fn load_spec(args: &RunArgs, experiment: Experiment) -> Result<SweepSpec, BenchError> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let spec = SweepSpec::from_json(&text)?;
            if spec.experiment != experiment {
                return Err(BenchError::Config(vec![format!(
                    "config describes a {} run, but the subcommand runs {experiment}",
                    spec.experiment
                )]));
            }
            spec
        }
        None => SweepSpec::default_for(experiment),
    };
    if let Some(labels) = &args.variants {
        let mut errs = Vec::new();
        spec.variants = labels
            .iter()
            .filter_map(|l| l.trim().parse::<ModelVariant>().map_err(|e| errs.push(e.to_string())).ok())
            .collect();
        if !errs.is_empty() {
            return Err(BenchError::Config(errs));
        }
    }
    if let Some(path) = &args.output {
        spec.output_path = Some(path.clone());
    }
    if let Some(format) = args.format {
        spec.output_format = format;
    }
    if let Some(snr) = args.snr_db {
        spec.snr_db = snr;
    }
    if let Some(w) = args.workers {
        spec.workers = Some(w);
    }
    if let Some(k) = args.dump_singular_values {
        spec.dump_singular_values = k;
    }
    Ok(spec)
}

fn execute(args: &RunArgs, experiment: Experiment) -> Result<(), BenchError> {
    let spec = load_spec(args, experiment)?;
    let sweep = spec.resolve()?;
    let rows = run(&spec)?;
    match &spec.output_path {
        Some(path) => output::write(&sweep, &rows, spec.output_format, BufWriter::new(File::create(path)?)),
        None => output::write(&sweep, &rows, spec.output_format, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SweepDistance(args) => execute(args, Experiment::Distance),
        Command::SweepElements(args) => execute(args, Experiment::TxElements),
        Command::Point(args) => execute(args, Experiment::SinglePoint),
        Command::Config { experiment } => {
            println!("{}", SweepSpec::default_for(*experiment).to_json());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
