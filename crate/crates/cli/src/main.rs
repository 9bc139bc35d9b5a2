use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lorentz_metrics_cli::config::{ExperimentConfig, ExperimentKind, CONFIG_VERSION};
use lorentz_metrics_cli::output::{write_csv, write_text, ResultRow, COLUMNS};
use lorentz_metrics_cli::runner::run;
use lorentz_metrics_cli::svg;
use lorentz_metrics_cli::validate::{Level, DEFAULT_SEED};

/// Invariant distances on domains of Minkowski space.
#[derive(Parser)]
#[command(name = "lorentz-metrics", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distances between pairs of points.
    Distance(Opts),
    /// Two metrics on the same pairs, with their ratio.
    Compare(Opts),
    /// Four-point hyperbolicity estimates per scale.
    Hyperbolicity(Opts),
    /// Stable acausality of a sampled spacelike graph.
    Acausality(Opts),
    /// Thin-triangle and bigon defects.
    Thinness(Opts),
    /// The acceptance suite.
    Validate(Opts),
}

#[derive(Args)]
struct Opts {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving the declared output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Validation level, fast or full.
    #[arg(long)]
    level: Option<Level>,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn print_rows(rows: &[ResultRow]) {
    println!("{}", COLUMNS.join(","));
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for r in rows {
        let _ = w.write_record(r.fields());
    }
    let _ = w.flush();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = match cli.command {
        Command::Distance(o) => (ExperimentKind::Distance, o),
        Command::Compare(o) => (ExperimentKind::Compare, o),
        Command::Hyperbolicity(o) => (ExperimentKind::Hyperbolicity, o),
        Command::Acausality(o) => (ExperimentKind::Acausality, o),
        Command::Thinness(o) => (ExperimentKind::Thinness, o),
        Command::Validate(o) => (ExperimentKind::Validate, o),
    };

    if let Some(n) = std::env::var("LORENTZ_METRICS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let mut cfg = match (&opts.config, kind) {
        (Some(p), _) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => return fail(2, e),
        },
        (None, ExperimentKind::Validate) => {
            let text = format!(r#"{{"version": {CONFIG_VERSION}, "experiment": "validate", "seed": {DEFAULT_SEED}}}"#);
            ExperimentConfig::from_json(&text).expect("minimal config parses")
        }
        (None, _) => return fail(2, "--config is required"),
    };
    if cfg.experiment != kind {
        return fail(
            2,
            format!("config describes a {} experiment, not {}", cfg.experiment.as_str(), kind.as_str()),
        );
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(l) = opts.level {
        cfg.level = Some(l.to_string());
    }

    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(e.exit_code() as u8, e),
    };

    if let Some(name) = &cfg.outputs.csv {
        if let Err(e) = std::fs::create_dir_all(&opts.out).and_then(|_| write_csv(&opts.out.join(name), &outcome.rows)) {
            return fail(4, format!("writing {name}: {e}"));
        }
    } else if kind != ExperimentKind::Validate {
        print_rows(&outcome.rows);
    }
    if let (Some(name), Some(scene)) = (&cfg.outputs.svg, &outcome.scene) {
        if let Err(e) =
            std::fs::create_dir_all(&opts.out).and_then(|_| write_text(&opts.out.join(name), &svg::render(scene)))
        {
            return fail(4, format!("writing {name}: {e}"));
        }
    } else if cfg.outputs.svg.is_some() {
        eprintln!("note: svg output is only drawn for domains of dimension 1+1");
    }
    for r in outcome.rows.iter().filter(|r| r.kind == "error") {
        eprintln!("solver failure: {} {}", r.metric, r.mesh);
    }
    ExitCode::from(outcome.exit_code() as u8)
}
