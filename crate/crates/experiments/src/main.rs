use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ptcd_core::counterdiabatic::CdMode;
use ptcd_core::paths::Direction;
use ptcd_experiments::{runners, ExperimentConfig, ExperimentKind, Overrides, Result, RunError};

/// Run one of the encircling/counterdiabatic experiments and write its
/// CSV/JSON outputs.
#[derive(Debug, Parser)]
#[command(name = "ptcd", version)]
struct Args {
    /// adiabaticity_sweep, encircle, period_sweep, apollonius_deviation or topology_scan
    #[arg(long)]
    experiment: Option<ExperimentKind>,
    /// TOML config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: config `output`, else `out/<experiment>`)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    period: Option<f64>,
    /// cw or ccw
    #[arg(long)]
    direction: Option<Direction>,
    /// none, hermitian or full
    #[arg(long)]
    cd: Option<CdMode>,
    /// Clamp on every drive matrix entry
    #[arg(long)]
    max_drive_amp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    jmin: Option<f64>,
    #[arg(long)]
    jmax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta_amp: Option<f64>,
    #[arg(long)]
    gamma_e: Option<f64>,
    #[arg(long)]
    gamma_f: Option<f64>,
    /// Set κ directly instead of through the decay rates
    #[arg(long, conflicts_with_all = ["gamma_e", "gamma_f"])]
    kappa: Option<f64>,
    /// Print the merged config as TOML and exit
    #[arg(long)]
    print_config: bool,
    /// Only validate the files already in the output directory
    #[arg(long)]
    validate: bool,
}

fn run(args: Args) -> Result<()> {
    let mut config = match (&args.config, args.experiment) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(kind)) => ExperimentConfig::new(kind),
        (None, None) => return Err(RunError::config("experiment", "give --experiment or --config")),
    };
    config.apply(&Overrides {
        experiment: args.experiment,
        output: args.out,
        dt: args.dt,
        period: args.period,
        direction: args.direction,
        cd: args.cd,
        max_drive_amp: args.max_drive_amp,
        j_min: args.jmin,
        j_max: args.jmax,
        delta_amp: args.delta_amp,
        gamma_e: args.gamma_e,
        gamma_f: args.gamma_f,
        kappa: args.kappa,
    });
    if args.print_config {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let out = config.output.clone().unwrap_or_else(|| PathBuf::from("out").join(config.experiment.as_str()));
    if args.validate {
        for (path, rows) in ptcd_experiments::schema::validate_dir(&out)? {
            println!("ok {} ({rows})", path.display());
        }
        return Ok(());
    }
    let settings = config.resolve()?;
    for path in runners::run(&settings, &out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ptcd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
