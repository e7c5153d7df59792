use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use warpfold::report::{run, sample_grid, GridField, ScenarioConfig};
use warpfold::Error;

#[derive(Parser)]
#[command(name = "warpfold", version, about = "Verify identities of warped orthogonal complex structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report path; defaults to `output.report` in the config, else stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Record wall time per check (reports are then no longer reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Sample a field on a regular grid and write CSV.
    Grid {
        #[arg(long)]
        config: PathBuf,
        /// lambda-sq, nijenhuis, gauss-curvature or fs-density
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(path: Option<PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, report, seed, timings } => ScenarioConfig::load(&config).and_then(|mut cfg| {
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.timings |= timings;
            let out = report.or_else(|| cfg.output.report.clone());
            let r = run(&cfg)?;
            emit(out, &r.to_json())?;
            for rec in r.records.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {}", rec.name);
            }
            eprintln!("{}/{} checks passed", r.summary.passed, r.summary.total);
            Ok(r.summary.all_pass)
        }),
        Command::Grid { config, field, resolution, output } => ScenarioConfig::load(&config).and_then(|cfg| {
            let field: GridField = field.parse()?;
            let g = sample_grid(&cfg, field, resolution)?;
            emit(output.or_else(|| cfg.output.grid.clone()), &g.to_csv())?;
            Ok(true)
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
