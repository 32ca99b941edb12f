use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eventreg::experiments::{
    figure_experiment, run_experiment, validate_spec, ExperimentError, ExperimentSpec, ResultSet, CATALOG,
};

#[derive(Parser)]
#[command(name = "eventreg", version, about = "Run trajectory and event regulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file (or a bare catalog id).
    Run {
        config: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// List catalog ids.
    List,
    /// Check a config without simulating.
    Validate {
        config: String,
        #[command(flatten)]
        flags: SpecFlags,
    },
    /// Run the catalog entry behind a figure id with its default parameters.
    Reproduce {
        /// One of fig1, fig3, fig5, fig6, fig7, fig8, fig10, fig12, ifsync.
        figure: String,
        #[command(flatten)]
        flags: RunFlags,
    },
}

#[derive(Args)]
struct SpecFlags {
    /// Seed; takes precedence over the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter override `dotted.path=value`; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct RunFlags {
    #[command(flatten)]
    spec: SpecFlags,
    /// Output directory (default `$EVENTREG_OUT/<id>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite a non-empty output directory.
    #[arg(long)]
    force: bool,
}

fn load(config: &str) -> Result<ExperimentSpec, ExperimentError> {
    let path = Path::new(config);
    if path.is_file() {
        return ExperimentSpec::from_file(path);
    }
    if CATALOG.iter().any(|e| e.id == config) {
        return Ok(ExperimentSpec::new(config));
    }
    Err(ExperimentError::Config(format!("{config:?} is neither a config file nor a catalog id")))
}

fn apply(mut spec: ExperimentSpec, flags: &SpecFlags) -> Result<ExperimentSpec, ExperimentError> {
    if let Some(seed) = flags.seed {
        spec.seed = Some(seed);
    }
    for arg in &flags.overrides {
        let (key, value) = ExperimentSpec::parse_override(arg)?;
        spec.overrides.insert(key, value);
    }
    Ok(spec)
}

fn run(spec: ExperimentSpec, flags: &RunFlags) -> Result<ResultSet, ExperimentError> {
    let mut spec = apply(spec, &flags.spec)?;
    if let Some(out) = &flags.out {
        spec.out_dir = Some(out.clone());
    }
    run_experiment(&spec, flags.force)
}

fn print_result(rs: &ResultSet) {
    println!("experiment {} seed {}", rs.manifest.experiment, rs.manifest.seed);
    println!("wrote {}", rs.dir.display());
    for (k, v) in &rs.metrics {
        println!("{k} = {v}");
    }
}

fn dispatch(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::List => {
            for e in CATALOG {
                println!("{:<20} {:<7} {}", e.id, e.figure, e.description);
            }
        }
        Command::Validate { config, flags } => {
            let spec = apply(load(&config)?, &flags)?;
            let m = validate_spec(&spec)?;
            println!("ok {} seed {}", m.experiment, m.seed);
        }
        Command::Run { config, flags } => print_result(&run(load(&config)?, &flags)?),
        Command::Reproduce { figure, flags } => {
            let id = figure_experiment(&figure)
                .ok_or_else(|| ExperimentError::Config(format!("unknown figure id {figure:?}")))?;
            print_result(&run(ExperimentSpec::new(id), &flags)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", e.to_string().lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
