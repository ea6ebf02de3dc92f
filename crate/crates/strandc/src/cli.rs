use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use strandc_core::analyzer::GcMode;
use strandc_core::compiler::Sabotage;
use strandc_core::crn::Species;

#[derive(Debug, Parser)]
#[command(
    name = "strandc",
    version,
    about = "Compile chemical reaction networks to DNA strand displacement gadgets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a CRN and write the structured system export (JSON).
    Compile(CompileArgs),
    /// Compile, then enumerate interactions and report crosstalk.
    Check(CheckArgs),
    /// Compile and run stochastic simulations of the gadget network.
    Simulate(SimulateArgs),
    /// Render every gadget's complexes as a Graphviz document.
    ExportDot(CompileArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CompileArgs {
    /// CRN text file, or `-` for standard input.
    pub input: PathBuf,
    /// Repair reactant-ordering violations instead of failing.
    #[arg(long)]
    pub fix_order: bool,
    /// Initial copies of every gate, output gate and linker.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub fuel_count: u64,
    /// Initial species counts, e.g. "A=10,B=5".
    #[arg(long, value_name = "LIST", value_parser = parse_init)]
    pub init: Option<InitCounts>,
    /// Deliberately break one design rule.
    #[arg(long, value_enum)]
    pub sabotage: Option<SabotageArg>,
    /// Output file (standard output if absent).
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub compile: CompileArgs,
    #[arg(long, value_enum, default_value_t = GcArg::Assumed)]
    pub gc: GcArg,
    /// Also write the structured report (JSON) here.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub compile: CompileArgs,
    #[arg(long, value_enum, default_value_t = GcArg::Assumed)]
    pub gc: GcArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, conflicts_with_all = ["max_time", "quiescence"])]
    pub max_steps: Option<u64>,
    #[arg(long, conflicts_with = "quiescence")]
    pub max_time: Option<f64>,
    /// Run until no reaction can fire (the default).
    #[arg(long)]
    pub quiescence: bool,
    /// Add spurious displacement channels to the network.
    #[arg(long)]
    pub include_spurious: bool,
    /// Independent runs with seeds `seed, seed+1, ...`, executed in parallel.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trajectories: u64,
    /// Rate override for one low-level reaction, e.g. "r0:release=2.5".
    #[arg(long, value_name = "LABEL=VALUE", value_parser = parse_rate)]
    pub rate: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GcArg {
    Assumed,
    Off,
}

impl From<GcArg> for GcMode {
    fn from(g: GcArg) -> Self {
        match g {
            GcArg::Assumed => GcMode::Assumed,
            GcArg::Off => GcMode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SabotageArg {
    ShareLinkerToehold,
    LinkerEqualsT,
    SwapOrder,
}

impl From<SabotageArg> for Sabotage {
    fn from(s: SabotageArg) -> Self {
        match s {
            SabotageArg::ShareLinkerToehold => Sabotage::ShareLinkerToehold,
            SabotageArg::LinkerEqualsT => Sabotage::LinkerEqualsT,
            SabotageArg::SwapOrder => Sabotage::SwapOrder,
        }
    }
}

pub type InitCounts = BTreeMap<Species, u64>;

pub fn parse_init(s: &str) -> Result<InitCounts, String> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (name, n) = item
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=COUNT, got {item:?}"))?;
        let species = Species::new(name.trim()).map_err(|e| e.to_string())?;
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|e| format!("count for {name}: {e}"))?;
        if out.insert(species, n).is_some() {
            return Err(format!("{name} given twice"));
        }
    }
    Ok(out)
}

fn parse_rate(s: &str) -> Result<(String, f64), String> {
    let (label, v) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected LABEL=VALUE, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|e| format!("rate for {label}: {e}"))?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(format!("rate for {label} must be finite and non-negative"));
    }
    Ok((label.to_owned(), v))
}
