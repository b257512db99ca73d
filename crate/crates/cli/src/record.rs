//! One CSV row per (instance, configuration) run, and the per-cell
//! aggregates written by `--plot-data`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use anyhow::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Limit,
    Error,
}

/// Columns in file order. `cost` is empty unless `status` is `optimal`;
/// `sup_lower_bound` is `inf` when the goal is unreachable. Times are in
/// seconds: `wall_time` covers the search only, `heuristic_time` the
/// construction of the cost-to-go table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub family: String,
    pub dim: u8,
    pub n_nodes: usize,
    /// Undirected edge count: a pair joined in both directions counts once.
    pub n_edges: usize,
    pub noise_fraction: f64,
    pub selection: String,
    pub heuristic: String,
    pub dominance: String,
    pub status: Status,
    pub cost: Option<f64>,
    pub sup_lower_bound: f64,
    pub wall_time: f64,
    pub heuristic_time: f64,
    pub labels_created: u64,
    pub labels_treated: u64,
    pub labels_pruned: u64,
    pub peak_open: u64,
    pub max_labels_at_node: u64,
    /// `2 (Bmax - Bmin + 1) (Q0 + 1)`, the per-node label bound.
    pub label_bound: u64,
    pub message: String,
}

impl BenchRecord {
    /// Row order of bench output.
    pub fn sort_key(&self) -> (&str, usize, &str, &str, &str, &str) {
        (
            &self.family,
            self.n_nodes,
            &self.selection,
            &self.heuristic,
            &self.dominance,
            &self.instance,
        )
    }

    /// The columns that must not change between repeated runs.
    pub fn deterministic_part(&self) -> BenchRecord {
        BenchRecord {
            wall_time: 0.0,
            heuristic_time: 0.0,
            ..self.clone()
        }
    }
}

pub fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Median and quartiles of one (family, dim, size, configuration) cell, over
/// the rows that solved to optimality or proved infeasibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub family: String,
    pub dim: u8,
    pub n_nodes: usize,
    pub selection: String,
    pub heuristic: String,
    pub dominance: String,
    pub runs: usize,
    pub finished: usize,
    pub time_min: f64,
    pub time_q1: f64,
    pub time_median: f64,
    pub time_q3: f64,
    pub time_max: f64,
    pub treated_median: f64,
    pub created_median: f64,
}

/// Linear interpolation between closest ranks; `sorted` must be ascending
/// and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

pub fn plot_rows(records: &[BenchRecord]) -> Vec<PlotRow> {
    type Key = (String, u8, usize, String, String, String);
    let mut cells: BTreeMap<Key, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        let key = (
            r.family.clone(),
            r.dim,
            r.n_nodes,
            r.selection.clone(),
            r.heuristic.clone(),
            r.dominance.clone(),
        );
        cells.entry(key).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((family, dim, n_nodes, selection, heuristic, dominance), rows) in cells {
        let done: Vec<&&BenchRecord> = rows
            .iter()
            .filter(|r| matches!(r.status, Status::Optimal | Status::Infeasible))
            .collect();
        let mut times: Vec<f64> = done.iter().map(|r| r.wall_time).collect();
        times.sort_by(f64::total_cmp);
        let treated: Vec<f64> = done.iter().map(|r| r.labels_treated as f64).collect();
        let created: Vec<f64> = done.iter().map(|r| r.labels_created as f64).collect();
        let q = |p: f64| {
            if times.is_empty() {
                f64::NAN
            } else {
                quantile(&times, p)
            }
        };
        let m = |v: &[f64]| if v.is_empty() { f64::NAN } else { median(v) };
        out.push(PlotRow {
            family,
            dim,
            n_nodes,
            selection,
            heuristic,
            dominance,
            runs: rows.len(),
            finished: done.len(),
            time_min: q(0.0),
            time_q1: q(0.25),
            time_median: q(0.5),
            time_q3: q(0.75),
            time_max: q(1.0),
            treated_median: m(&treated),
            created_median: m(&created),
        });
    }
    out
}

pub fn write_plot_csv<W: Write>(out: W, rows: &[PlotRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(instance: &str, n: usize, selection: &str, time: f64, status: Status) -> BenchRecord {
        BenchRecord {
            instance: instance.into(),
            family: "euclidean".into(),
            dim: 2,
            n_nodes: n,
            n_edges: 2 * n,
            noise_fraction: 0.3,
            selection: selection.into(),
            heuristic: "sup".into(),
            dominance: "resource".into(),
            status,
            cost: (status == Status::Optimal).then_some(1.5),
            sup_lower_bound: 1.25,
            wall_time: time,
            heuristic_time: 0.001,
            labels_created: 10,
            labels_treated: (time * 100.0) as u64,
            labels_pruned: 2,
            peak_open: 4,
            max_labels_at_node: 3,
            label_bound: 1000,
            message: String::new(),
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn csv_round_trip_keeps_empty_cost() {
        let rows = vec![
            record("a", 10, "label", 0.5, Status::Optimal),
            record("b", 10, "node", 0.25, Status::Infeasible),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("instance,family,dim,n_nodes,n_edges,noise_fraction,selection,heuristic,dominance,status,cost,"));
        assert!(text.contains(",infeasible,,"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn sorting_follows_family_size_selection_heuristic() {
        let mut rows = vec![
            record("b", 20, "label", 0.1, Status::Optimal),
            record("a", 10, "node", 0.1, Status::Optimal),
            record("c", 10, "label", 0.1, Status::Optimal),
        ];
        sort_records(&mut rows);
        let order: Vec<&str> = rows.iter().map(|r| r.instance.as_str()).collect();
        assert_eq!(order, ["c", "a", "b"]);
    }

    #[test]
    fn plot_rows_skip_unfinished_runs() {
        let rows = vec![
            record("a", 10, "label", 1.0, Status::Optimal),
            record("b", 10, "label", 3.0, Status::Infeasible),
            record("c", 10, "label", 99.0, Status::Limit),
            record("d", 20, "label", 2.0, Status::Optimal),
        ];
        let plot = plot_rows(&rows);
        assert_eq!(plot.len(), 2);
        assert_eq!((plot[0].runs, plot[0].finished), (3, 2));
        assert_eq!(plot[0].time_median, 2.0);
        assert_eq!(plot[0].time_max, 3.0);
        assert_eq!(plot[1].n_nodes, 20);
    }
}
