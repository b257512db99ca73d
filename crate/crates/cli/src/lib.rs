//! Command-line harness around `hfsp-core`: suite generation from manifests,
//! single solves, benchmark CSVs, oracle verification and MILP export.
//!
//! Exit codes are a stable contract: 0 solved (or command succeeded),
//! 1 error, 2 no feasible path, 3 search limit reached.

pub mod args;
pub mod manifest;
pub mod record;
pub mod suite;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hfsp_core::heuristics::sup_table;
use hfsp_core::verify::{export_milp, import_milp_solution, ExportOptions, OracleBudget};

pub use args::{Cli, Command};
pub use manifest::{preset, Entry, Manifest, Preset, PresetOptions};
pub use record::{BenchRecord, PlotRow, Status};
pub use suite::{
    bench_instance, generate_suite, load_suite, run_bench, verify_suite, SuiteItem, Verdict,
    VerifyOptions, VerifyRow,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success,
    Error,
    Infeasible,
    Limit,
}

impl Exit {
    pub fn code(self) -> u8 {
        match self {
            Exit::Success => 0,
            Exit::Error => 1,
            Exit::Infeasible => 2,
            Exit::Limit => 3,
        }
    }
}

pub fn run(cli: Cli) -> Result<Exit> {
    match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Solve(a) => solve(&a),
        Command::Bench(a) => bench(&a),
        Command::Verify(a) => verify(&a),
        Command::ExportMilp(a) => export(&a),
        Command::ImportMilp(a) => import(&a),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_owned()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn generate(a: &args::GenerateArgs) -> Result<Exit> {
    let manifest = match (&a.manifest, a.preset) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Manifest::from_json(&text)?
        }
        (None, Some(p)) => preset(
            p,
            &PresetOptions {
                seed: a.seed,
                per_cell: a.per_cell,
                max_nodes: a.max_nodes,
            },
        ),
        (None, None) => bail!("give --manifest or --preset"),
    };
    if a.print_manifest {
        print!("{}", manifest.to_json());
        return Ok(Exit::Success);
    }
    let resolved = generate_suite(&manifest, &a.out.out_dir, a.jobs)?;
    println!(
        "wrote {} instances and {} to {}",
        resolved.entries.len(),
        manifest::MANIFEST_FILE,
        a.out.out_dir.display()
    );
    Ok(Exit::Success)
}

fn solve(a: &args::SolveArgs) -> Result<Exit> {
    let inst = suite::read_instance(&a.instance)?;
    let id = stem(&a.instance);
    let bound = sup_table(&inst).get(inst.start);
    let (record, solution) = bench_instance(&id, &inst, bound, &a.config());
    let mut stdout = std::io::stdout().lock();
    record::write_csv(&mut stdout, std::slice::from_ref(&record))?;
    stdout.flush()?;
    match record.status {
        Status::Optimal => {
            let sol = solution.expect("optimal rows carry a solution");
            let path = a
                .solution
                .clone()
                .unwrap_or_else(|| a.out.out_dir.join(format!("{id}.solution.json")));
            write_file(&path, &(sol.to_json() + "\n"))?;
            eprintln!(
                "cost {} ({} labels treated, {:.3}s); solution written to {}",
                sol.cost,
                record.labels_treated,
                record.wall_time,
                path.display()
            );
            Ok(Exit::Success)
        }
        Status::Infeasible => {
            eprintln!("no feasible path");
            Ok(Exit::Infeasible)
        }
        Status::Limit => {
            eprintln!("{}", record.message);
            Ok(Exit::Limit)
        }
        Status::Error => bail!("{}", record.message),
    }
}

fn bench(a: &args::BenchArgs) -> Result<Exit> {
    let items = load_suite(&a.suite)?;
    let configs = a.configs();
    let records = run_bench(&items, &configs, a.jobs)?;
    let csv_path = a
        .csv
        .clone()
        .unwrap_or_else(|| a.out.out_dir.join("bench.csv"));
    let mut buf = Vec::new();
    record::write_csv(&mut buf, &records)?;
    write_file(&csv_path, std::str::from_utf8(&buf)?)?;
    if let Some(path) = &a.plot_data {
        let mut buf = Vec::new();
        record::write_plot_csv(&mut buf, &record::plot_rows(&records))?;
        write_file(path, std::str::from_utf8(&buf)?)?;
    }
    let failed = records.iter().filter(|r| r.status == Status::Error).count();
    let limited = records.iter().filter(|r| r.status == Status::Limit).count();
    println!(
        "{} runs over {} instances written to {} ({failed} errors, {limited} hit limits)",
        records.len(),
        items.len(),
        csv_path.display()
    );
    Ok(if failed > 0 {
        Exit::Error
    } else {
        Exit::Success
    })
}

fn milp_options(f: &args::MilpFlags) -> ExportOptions {
    ExportOptions {
        big_m: f.big_m,
        literal: f.literal_milp,
    }
}

fn verify(a: &args::VerifyArgs) -> Result<Exit> {
    let items = load_suite(&a.suite)?;
    let mut configs = Vec::new();
    for &selection in &a.selection {
        for &heuristic in &a.heuristic {
            configs.push(hfsp_core::SolverConfig {
                dominance: a.dominance,
                ..hfsp_core::SolverConfig::new(selection, heuristic)
            });
        }
    }
    let opts = VerifyOptions {
        configs,
        budget: OracleBudget {
            max_nodes: a.oracle_max_nodes,
            max_steps: a.oracle_max_steps,
        },
        export: a
            .export_milp
            .then(|| (a.suite.clone(), milp_options(&a.milp))),
    };
    let rows = verify_suite(&items, &opts, a.jobs)?;
    let (mut matched, mut skipped, mut failed) = (0, 0, 0);
    for row in &rows {
        let line = match &row.verdict {
            Verdict::Match { cost: Some(c) } => format!("match    {} cost {c}", row.id),
            Verdict::Match { cost: None } => format!("match    {} infeasible", row.id),
            Verdict::Mismatch { oracle, found } => {
                format!("MISMATCH {} oracle {oracle:?} solver {found:?}", row.id)
            }
            Verdict::Skipped(why) => format!("skipped  {} ({why})", row.id),
        };
        println!("{line}");
        for b in &row.milp_breaches {
            println!("  milp row violated: {b}");
        }
        for n in &row.notes {
            println!("  {n}");
        }
        match (&row.verdict, row.ok()) {
            (Verdict::Skipped(_), true) => skipped += 1,
            (_, true) => matched += 1,
            (_, false) => failed += 1,
        }
    }
    println!(
        "{matched}/{} match, {skipped} skipped, {failed} failed",
        rows.len()
    );
    Ok(if failed > 0 {
        Exit::Error
    } else {
        Exit::Success
    })
}

fn export(a: &args::ExportArgs) -> Result<Exit> {
    let inst = suite::read_instance(&a.instance)?;
    let path: PathBuf =
        a.lp.clone()
            .unwrap_or_else(|| a.out.out_dir.join(format!("{}.lp", stem(&a.instance))));
    write_file(&path, &export_milp(&inst, &milp_options(&a.milp)))?;
    println!("{}", path.display());
    Ok(Exit::Success)
}

fn import(a: &args::ImportArgs) -> Result<Exit> {
    let inst = suite::read_instance(&a.instance)?;
    let text =
        fs::read_to_string(&a.values).with_context(|| format!("reading {}", a.values.display()))?;
    let sol = import_milp_solution(&inst, &text)
        .with_context(|| format!("importing {}", a.values.display()))?;
    let path = a.solution.clone().unwrap_or_else(|| {
        a.out
            .out_dir
            .join(format!("{}.solution.json", stem(&a.instance)))
    });
    write_file(&path, &(sol.to_json() + "\n"))?;
    println!("cost {} written to {}", sol.cost, path.display());
    Ok(Exit::Success)
}
