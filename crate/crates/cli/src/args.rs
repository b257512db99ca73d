use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hfsp_core::labeling::{Dominance, Limits};
use hfsp_core::verify::BigM;
use hfsp_core::{HeuristicKind, Selection, SolverConfig};

use crate::manifest::Preset;

/// Default directory for generated suites, solutions, LP files and CSVs.
pub const OUT_DIR_ENV: &str = "HFSP_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "hfsp",
    version,
    about = "Noise-restricted hybrid-fuel shortest paths: generate, solve, benchmark, verify"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a suite of instances from a manifest or a preset.
    Generate(GenerateArgs),
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Solve every instance of a suite under a configuration matrix.
    Bench(BenchArgs),
    /// Compare solver and brute-force oracle on a small suite.
    Verify(VerifyArgs),
    /// Write the MILP model of an instance in LP format.
    ExportMilp(ExportArgs),
    /// Rebuild a solution from MILP variable values.
    ImportMilp(ImportArgs),
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "hfsp-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct Limit {
    /// Stop after creating this many labels (exit code 3).
    #[arg(long)]
    pub max_labels: Option<u64>,
    /// Stop after this many seconds of search (exit code 3).
    #[arg(long)]
    pub max_seconds: Option<f64>,
}

impl Limit {
    pub fn limits(&self) -> Limits {
        Limits {
            max_labels: self.max_labels,
            max_time: self.max_seconds.map(std::time::Duration::from_secs_f64),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Manifest JSON listing generator specs.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub manifest: Option<PathBuf>,
    /// Built-in suite: scaling, connectivity, oracle or smoke.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Base seed of preset suites.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instances per preset cell.
    #[arg(long, default_value_t = 10)]
    pub per_cell: usize,
    /// Leave out preset cells with more nodes than this.
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Write the preset manifest to stdout instead of generating.
    #[arg(long, requires = "preset")]
    pub print_manifest: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, default_value = "label")]
    pub selection: Selection,
    #[arg(long, default_value = "sup")]
    pub heuristic: HeuristicKind,
    /// `resource` prunes on resources only; `elementary` also compares
    /// visited node sets.
    #[arg(long, default_value = "resource")]
    pub dominance: Dominance,
    #[command(flatten)]
    pub limit: Limit,
    /// Solution file; defaults to `<out-dir>/<instance stem>.solution.json`.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

impl SolveArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            selection: self.selection,
            heuristic: self.heuristic,
            dominance: self.dominance,
            limits: self.limit.limits(),
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Suite directory written by `generate`.
    pub suite: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "label,node")]
    pub selection: Vec<Selection>,
    #[arg(long, value_delimiter = ',', default_value = "sup,sld")]
    pub heuristic: Vec<HeuristicKind>,
    #[arg(long, value_delimiter = ',', default_value = "resource")]
    pub dominance: Vec<Dominance>,
    #[command(flatten)]
    pub limit: Limit,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// CSV file; defaults to `<out-dir>/bench.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write per-cell medians and quartiles to this CSV.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

impl BenchArgs {
    pub fn configs(&self) -> Vec<SolverConfig> {
        let mut out = Vec::new();
        for &selection in &self.selection {
            for &heuristic in &self.heuristic {
                for &dominance in &self.dominance {
                    out.push(SolverConfig {
                        selection,
                        heuristic,
                        dominance,
                        limits: self.limit.limits(),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Args)]
pub struct MilpFlags {
    /// Write the literal two-sided battery recurrence with its V * sum g
    /// startup terms instead of the switch-on formulation.
    #[arg(long)]
    pub literal_milp: bool,
    /// Big-M constant: `auto` or a number.
    #[arg(long, default_value = "auto", value_parser = parse_big_m)]
    pub big_m: BigM,
}

fn parse_big_m(s: &str) -> Result<BigM, String> {
    if s == "auto" {
        return Ok(BigM::Auto);
    }
    match s.parse::<f64>() {
        Ok(m) if m.is_finite() && m > 0.0 => Ok(BigM::Fixed(m)),
        _ => Err(format!(
            "big-M must be `auto` or a positive number, got `{s}`"
        )),
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "label,node")]
    pub selection: Vec<Selection>,
    #[arg(long, value_delimiter = ',', default_value = "sup,sld")]
    pub heuristic: Vec<HeuristicKind>,
    #[arg(long, default_value = "resource")]
    pub dominance: Dominance,
    /// Write `<id>.lp` next to each instance and substitute every solution.
    #[arg(long)]
    pub export_milp: bool,
    #[command(flatten)]
    pub milp: MilpFlags,
    /// Oracle refuses instances with more nodes than this.
    #[arg(long, default_value_t = 12)]
    pub oracle_max_nodes: usize,
    /// Oracle gives up after this many edge traversals.
    #[arg(long, default_value_t = 50_000_000)]
    pub oracle_max_steps: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub milp: MilpFlags,
    /// LP file; defaults to `<out-dir>/<instance stem>.lp`.
    #[arg(long)]
    pub lp: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    pub instance: PathBuf,
    /// Variable values, one `name value` pair per line.
    pub values: PathBuf,
    /// Solution file; defaults to `<out-dir>/<instance stem>.solution.json`.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}
