//! `dude`, the campaign runner and calculator front end.
//!
//! Exit codes: 0 success, 1 validation error, 2 campaign assertion
//! failure, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dude_cli::calc::{run_calc, CALCULATORS};
use dude_cli::config::{default_config, parse_config};
use dude_cli::emit::{emit, OutputFormat};
use dude_cli::CliError;
use dude_core::linkbudget::FormulaMode;
use dude_core::scenario::{
    run_decoupling_time_campaign, run_formula_comparison, run_region_campaign,
    run_transit_campaign, run_zone_campaign, ScenarioConfig, ScenarioResult,
};

/// Environment variable consulted for the default output directory.
const OUT_DIR_ENV: &str = "DUDE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "dude",
    version,
    about = "Downlink/uplink decoupling simulator for LTE heterogeneous networks",
    after_help = calculators_help()
)]
struct Cli {
    /// Config file (key = value lines); documented defaults when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the formula mode.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Output directory (default: $DUDE_OUT_DIR, then ./out).
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    /// Output file format.
    #[arg(short, long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    DbConsistent,
    Literal,
}

impl From<ModeArg> for FormulaMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::DbConsistent => FormulaMode::DbConsistent,
            ModeArg::Literal => FormulaMode::Literal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decoupling-region geometry: ratio constant, boundary circle, area.
    Region,
    /// Linear-transit SINR / spectral-efficiency / power traces.
    Transit,
    /// Decoupling-time CDFs over the random-walk ensemble.
    Mobility,
    /// Interference-zone table over device distances and thresholds.
    Zones,
    /// Formula-mode comparison grid.
    Compare,
    /// Run every campaign.
    All,
    /// Evaluate one named calculator and print the value.
    Calc {
        /// Calculator name (see the list under --help).
        name: String,
        /// Numeric arguments.
        args: Vec<f64>,
    },
}

fn calculators_help() -> String {
    let mut s = String::from("Calculators:\n");
    for (_, line) in CALCULATORS {
        s.push_str("  ");
        s.push_str(line);
        s.push('\n');
    }
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(path)?,
        None => default_config(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        cfg.provenance
            .insert("seed".into(), format!("set to {seed} (--seed flag)"));
    }
    if let Some(mode) = cli.mode {
        cfg.pc.mode = mode.into();
        cfg.provenance.insert(
            "pc.mode".into(),
            format!("set to {} (--mode flag)", cfg.pc.mode),
        );
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Calc { name, args } = &cli.command {
        let mode = cli.mode.map_or(FormulaMode::DbConsistent, Into::into);
        let out = run_calc(name, args, mode)?;
        println!("{:.9}{} (mode: {mode})", out.value, out.unit);
        return Ok(());
    }

    let cfg = load_config(&cli)?;
    let dir = out_dir(&cli);
    let format: OutputFormat = cli.format.into();

    type Campaign = fn(&ScenarioConfig) -> dude_core::Result<ScenarioResult>;
    let selected: Vec<Campaign> = match cli.command {
        Command::Region => vec![run_region_campaign],
        Command::Transit => vec![run_transit_campaign],
        Command::Mobility => vec![run_decoupling_time_campaign],
        Command::Zones => vec![run_zone_campaign],
        Command::Compare => vec![run_formula_comparison],
        Command::All => vec![
            run_region_campaign,
            run_transit_campaign,
            run_decoupling_time_campaign,
            run_zone_campaign,
            run_formula_comparison,
        ],
        Command::Calc { .. } => unreachable!("handled above"),
    };

    for campaign in selected {
        let result = campaign(&cfg)?;
        let path = emit(&result, &dir, format)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
