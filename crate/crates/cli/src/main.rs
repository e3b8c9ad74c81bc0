//! `vfso`: vertical FSO link budgets, sweeps, aggregation sizing and
//! backhaul cost comparison.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 link failure
//! (`evaluate` only, when any scenario has negative margin).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use vertical_fso::config::{load_config, parse_config, RunConfig};
use vertical_fso::report::{self, ReportBundle};

const EXIT_CONFIG: u8 = 1;
const EXIT_LINK_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "vfso",
    version,
    about = "Vertical free-space-optical backhaul simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the link budget once per configured scenario.
    Evaluate(CommonArgs),
    /// Run the configured altitude/divergence sweeps and write one CSV each.
    Sweep(CommonArgs),
    /// Generate a HetNet layout and compare backhaul TCO.
    Cost(CommonArgs),
    /// Size how many small cells one link can backhaul.
    Aggregate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration; reference defaults are used when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a configuration field, e.g. `--set geometry.nfp_altitude_m=5000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (takes precedence over the config file).
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    /// Do not write files; print the summary only.
    #[arg(long)]
    dry_run: bool,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => load_config(path, &self.overrides)?,
            None => parse_config("", &self.overrides)?,
        };
        if let Some(dir) = &self.output_dir {
            config.output_dir = dir.clone();
        }
        Ok(config)
    }

    fn emit(&self, config: &RunConfig, bundle: &ReportBundle) -> Result<()> {
        print!("{}", bundle.summary);
        if self.dry_run {
            return Ok(());
        }
        let written = bundle
            .write_to(&config.output_dir)
            .with_context(|| format!("writing reports to {}", config.output_dir.display()))?;
        for path in written {
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Evaluate(args) => {
            let config = args.load()?;
            let outcome = report::evaluate(&config)?;
            args.emit(&config, &outcome.bundle)?;
            Ok(if outcome.all_viable() {
                0
            } else {
                EXIT_LINK_FAILURE
            })
        }
        Command::Sweep(args) => {
            let config = args.load()?;
            args.emit(&config, &report::sweep(&config))?;
            Ok(0)
        }
        Command::Cost(args) => {
            let config = args.load()?;
            args.emit(&config, &report::cost(&config)?.bundle)?;
            Ok(0)
        }
        Command::Aggregate(args) => {
            let config = args.load()?;
            args.emit(&config, &report::aggregate(&config)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
