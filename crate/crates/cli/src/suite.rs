//! Suite directories: generation from a manifest, loading, benchmarking and
//! oracle verification.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use hfsp_core::generators::generate;
use hfsp_core::heuristics::sup_table;
use hfsp_core::instance::check_solution;
use hfsp_core::labeling::{SolveError, SolveOutcome};
use hfsp_core::verify::{oracle_solve_with, ExportOptions, MilpModel, OracleBudget, OracleError};
use hfsp_core::{solve, Instance, Solution, SolverConfig};
use log::{info, warn};
use rayon::prelude::*;

use crate::manifest::{Entry, Manifest, MANIFEST_FILE};
use crate::record::{BenchRecord, Status};

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("starting worker pool")
}

/// Generates every entry into `out_dir`, writes the resolved manifest there
/// and returns it. Entries sharing a placement are generated from the seed
/// of their base entry's accepted draw with a single attempt, so a rejected
/// draw is an error rather than a silently different placement.
pub fn generate_suite(manifest: &Manifest, out_dir: &Path, jobs: usize) -> Result<Manifest> {
    manifest.check()?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let pool = pool(jobs)?;
    let mut resolved = manifest.clone();
    let (bases, shared): (Vec<usize>, Vec<usize>) =
        (0..resolved.entries.len()).partition(|&i| resolved.entries[i].share_nodes_with.is_none());

    let run = |entries: &[Entry], idx: &[usize]| -> Result<Vec<(usize, u64)>> {
        pool.install(|| {
            idx.par_iter()
                .map(|&i| write_instance(&entries[i], out_dir).map(|seed| (i, seed)))
                .collect()
        })
    };
    for (i, seed) in run(&resolved.entries, &bases)? {
        resolved.entries[i].attempt_seed = Some(seed);
    }
    let seed_of: HashMap<String, u64> = resolved
        .entries
        .iter()
        .filter_map(|e| e.attempt_seed.map(|s| (e.id.clone(), s)))
        .collect();
    for &i in &shared {
        let e = &mut resolved.entries[i];
        let base = e.share_nodes_with.as_deref().expect("partitioned");
        let seed = *seed_of.get(base).ok_or_else(|| {
            anyhow!(
                "entry `{}` shares nodes with `{base}`, which itself shares nodes",
                e.id
            )
        })?;
        e.spec.seed = seed;
        e.spec.max_attempts = 1;
    }
    for (i, seed) in run(&resolved.entries, &shared)? {
        resolved.entries[i].attempt_seed = Some(seed);
    }
    for e in &mut resolved.entries {
        e.file = Some(e.file_name());
    }
    fs::write(out_dir.join(MANIFEST_FILE), resolved.to_json())?;
    info!(
        "generated {} instances into {}",
        resolved.entries.len(),
        out_dir.display()
    );
    Ok(resolved)
}

fn write_instance(entry: &Entry, out_dir: &Path) -> Result<u64> {
    let inst = generate(&entry.spec).with_context(|| format!("generating `{}`", entry.id))?;
    let meta = inst
        .meta
        .as_ref()
        .expect("generated instances carry metadata");
    if meta["verified"] == "label_limit" {
        warn!("`{}`: feasibility check hit its label limit", entry.id);
    }
    let seed = meta["attempt_seed"]
        .as_u64()
        .expect("attempt seed recorded");
    let path = out_dir.join(entry.file_name());
    fs::write(&path, inst.to_json()).with_context(|| format!("writing {}", path.display()))?;
    Ok(seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteItem {
    pub id: String,
    pub path: PathBuf,
}

/// Instances of a suite directory: the manifest's entries when a manifest is
/// present, otherwise every `*.json` file except solutions, sorted by name.
pub fn load_suite(dir: &Path) -> Result<Vec<SuiteItem>> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if manifest_path.exists() {
        let manifest = Manifest::from_json(&fs::read_to_string(&manifest_path)?)
            .with_context(|| format!("reading {}", manifest_path.display()))?;
        return Ok(manifest
            .entries
            .iter()
            .map(|e| SuiteItem {
                id: e.id.clone(),
                path: dir.join(e.file_name()),
            })
            .collect());
    }
    let mut items = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some(stem) = name.strip_suffix(".json") {
            if !stem.ends_with(".solution") {
                items.push(SuiteItem {
                    id: stem.to_owned(),
                    path: path.clone(),
                });
            }
        }
    }
    if items.is_empty() {
        bail!("{} holds no instances", dir.display());
    }
    items.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(items)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (inst, report) = Instance::from_json_with_report(&text)
        .with_context(|| format!("loading {}", path.display()))?;
    if report.max_rounding_error > 0.0 {
        warn!(
            "{}: resources rounded to the quantum, largest error {}",
            path.display(),
            report.max_rounding_error
        );
    }
    Ok(inst)
}

/// Family and dimension from generator metadata; hand-made files report
/// `custom`.
fn family_of(inst: &Instance) -> String {
    inst.meta
        .as_ref()
        .and_then(|m| m["generator"]["family"].as_str())
        .unwrap_or("custom")
        .to_owned()
}

/// `2 (Bmax - Bmin + 1) (Q0 + 1)`, saturating.
pub fn label_bound(inst: &Instance) -> u64 {
    let b = (inst.bmax.0 - inst.bmin.0 + 1).max(0) as u64;
    let q = (inst.q0.0 + 1).max(0) as u64;
    b.saturating_mul(q).saturating_mul(2)
}

/// Solves one instance under one configuration and checks the result
/// against the lower bound and the independent feasibility checker.
pub fn bench_instance(
    id: &str,
    inst: &Instance,
    sup_bound: f64,
    config: &SolverConfig,
) -> (BenchRecord, Option<Solution>) {
    let mut record = BenchRecord {
        instance: id.to_owned(),
        family: family_of(inst),
        dim: inst.dimension(),
        n_nodes: inst.num_nodes(),
        n_edges: inst.undirected_edge_count(),
        noise_fraction: inst.noise_fraction(),
        selection: config.selection.to_string(),
        heuristic: config.heuristic.to_string(),
        dominance: config.dominance.to_string(),
        status: Status::Error,
        cost: None,
        sup_lower_bound: sup_bound,
        wall_time: 0.0,
        heuristic_time: 0.0,
        labels_created: 0,
        labels_treated: 0,
        labels_pruned: 0,
        peak_open: 0,
        max_labels_at_node: 0,
        label_bound: label_bound(inst),
        message: String::new(),
    };
    let (stats, solution) = match solve(inst, config) {
        Ok(SolveOutcome::Optimal { solution, stats }) => {
            record.status = Status::Optimal;
            record.cost = Some(solution.cost);
            (stats, Some(solution))
        }
        Ok(SolveOutcome::Infeasible { stats }) => {
            record.status = Status::Infeasible;
            (stats, None)
        }
        Err(SolveError::LimitExceeded { stats, bound }) => {
            record.status = Status::Limit;
            record.message = format!("limit reached, open bound {bound}");
            (stats, None)
        }
        Err(e) => {
            record.message = e.to_string();
            return (record, None);
        }
    };
    record.wall_time = stats.wall_time.max(f64::MIN_POSITIVE);
    record.heuristic_time = stats.heuristic_time;
    record.labels_created = stats.labels_created;
    record.labels_treated = stats.labels_treated;
    record.labels_pruned = stats.labels_pruned;
    record.peak_open = stats.peak_open;
    record.max_labels_at_node = stats.max_labels_at_node;
    if let Some(sol) = &solution {
        if let Err(v) = check_solution(inst, sol) {
            record.status = Status::Error;
            record.message = format!("returned path fails the feasibility check: {v}");
        } else if sol.cost < sup_bound {
            record.status = Status::Error;
            record.message = format!(
                "cost {} below the unconstrained bound {sup_bound}",
                sol.cost
            );
        }
    }
    (record, solution)
}

fn error_records(item: &SuiteItem, configs: &[SolverConfig], message: &str) -> Vec<BenchRecord> {
    configs
        .iter()
        .map(|c| BenchRecord {
            instance: item.id.clone(),
            family: "unknown".into(),
            dim: 0,
            n_nodes: 0,
            n_edges: 0,
            noise_fraction: 0.0,
            selection: c.selection.to_string(),
            heuristic: c.heuristic.to_string(),
            dominance: c.dominance.to_string(),
            status: Status::Error,
            cost: None,
            sup_lower_bound: f64::NAN,
            wall_time: 0.0,
            heuristic_time: 0.0,
            labels_created: 0,
            labels_treated: 0,
            labels_pruned: 0,
            peak_open: 0,
            max_labels_at_node: 0,
            label_bound: 0,
            message: message.to_owned(),
        })
        .collect()
}

/// Every instance under every configuration. Instances run in parallel on
/// `jobs` threads, each solve single-threaded; a failing instance yields
/// error rows and the run continues. Rows come back sorted.
pub fn run_bench(
    items: &[SuiteItem],
    configs: &[SolverConfig],
    jobs: usize,
) -> Result<Vec<BenchRecord>> {
    let pool = pool(jobs)?;
    let nested: Vec<Vec<BenchRecord>> = pool.install(|| {
        items
            .par_iter()
            .map(|item| match read_instance(&item.path) {
                Ok(inst) => {
                    let bound = sup_table(&inst).get(inst.start);
                    configs
                        .iter()
                        .map(|c| bench_instance(&item.id, &inst, bound, c).0)
                        .collect()
                }
                Err(e) => error_records(item, configs, &format!("{e:#}")),
            })
            .collect()
    });
    let mut records: Vec<BenchRecord> = nested.into_iter().flatten().collect();
    crate::record::sort_records(&mut records);
    Ok(records)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Every configuration matched the oracle (both `None` when infeasible).
    Match {
        cost: Option<f64>,
    },
    Mismatch {
        oracle: Option<f64>,
        found: Vec<(String, Option<f64>)>,
    },
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub id: String,
    pub verdict: Verdict,
    /// MILP rows violated by substituted solver solutions, when exported.
    pub milp_breaches: Vec<String>,
    pub notes: Vec<String>,
}

impl VerifyRow {
    pub fn ok(&self) -> bool {
        !matches!(self.verdict, Verdict::Mismatch { .. })
            && self.milp_breaches.is_empty()
            && self.notes.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub configs: Vec<SolverConfig>,
    pub budget: OracleBudget,
    /// Write `<id>.lp` into this directory and substitute every solution.
    pub export: Option<(PathBuf, ExportOptions)>,
}

/// Compares each configuration's optimal cost with the oracle's, exactly.
pub fn verify_item(item: &SuiteItem, opts: &VerifyOptions) -> VerifyRow {
    let mut row = VerifyRow {
        id: item.id.clone(),
        verdict: Verdict::Skipped(String::new()),
        milp_breaches: Vec::new(),
        notes: Vec::new(),
    };
    let inst = match read_instance(&item.path) {
        Ok(i) => i,
        Err(e) => {
            row.verdict = Verdict::Skipped(format!("{e:#}"));
            return row;
        }
    };
    let oracle = match oracle_solve_with(&inst, opts.budget) {
        Ok(o) => o.optimal_cost(),
        Err(e @ (OracleError::TooManyNodes { .. } | OracleError::BudgetExceeded(_))) => {
            row.verdict = Verdict::Skipped(e.to_string());
            return row;
        }
    };
    let model = opts.export.as_ref().map(|(dir, export)| {
        let model = MilpModel::build(&inst, export);
        let path = dir.join(format!("{}.lp", item.id));
        if let Err(e) = fs::write(&path, model.to_lp()) {
            row.notes.push(format!("writing {}: {e}", path.display()));
        }
        model
    });
    let mut found = Vec::new();
    for config in &opts.configs {
        let label = format!("{}/{}", config.selection, config.heuristic);
        match solve(&inst, config) {
            Ok(outcome) => {
                if let Some(sol) = outcome.solution() {
                    if let Err(v) = check_solution(&inst, sol) {
                        row.notes
                            .push(format!("{label}: infeasible path returned: {v}"));
                    }
                    if let Some(model) = &model {
                        let values = model.assignment(&inst, sol);
                        for b in model.breaches(&values) {
                            row.milp_breaches.push(format!("{label}: {}", b.name));
                        }
                    }
                }
                found.push((label, outcome.cost()));
            }
            Err(e) => row.notes.push(format!("{label}: {e}")),
        }
    }
    row.verdict = if found.iter().all(|(_, c)| *c == oracle) {
        Verdict::Match { cost: oracle }
    } else {
        Verdict::Mismatch { oracle, found }
    };
    row
}

pub fn verify_suite(
    items: &[SuiteItem],
    opts: &VerifyOptions,
    jobs: usize,
) -> Result<Vec<VerifyRow>> {
    let pool = pool(jobs)?;
    Ok(pool.install(|| {
        items
            .par_iter()
            .map(|item| verify_item(item, opts))
            .collect()
    }))
}
