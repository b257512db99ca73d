//! JSON instance files.
//!
//! Resource fields (`c`, `z`, `b0`, `bmin`, `bmax`, `q0`, `v`) are written in
//! nominal units and quantized on load by the document's `quantization` step.
//! Saving writes one node or edge per line with a fixed key order, so
//! `save(load(f)) == f` for any file produced by `save`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{Edge, Instance, NodeCoord, Violation};
use crate::units::Quantization;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Side information gathered while loading.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadReport {
    /// Largest absolute difference between a nominal resource value in the
    /// file and its quantized value.
    pub max_rounding_error: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    nodes: Vec<Vec<f64>>,
    edges: Vec<EdgeDoc>,
    start: usize,
    goal: usize,
    b0: f64,
    bmin: f64,
    bmax: f64,
    q0: f64,
    v: f64,
    quantization: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    u: usize,
    v: usize,
    d: f64,
    c: f64,
    z: f64,
    gen_allowed: bool,
    #[serde(default)]
    gliding: bool,
    #[serde(default)]
    undirected: bool,
}

impl Instance {
    /// Parses and validates an instance document.
    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        let (inst, report) = Self::from_json_with_report(text)?;
        if report.max_rounding_error > 0.0 {
            log::warn!(
                "resource values rounded to quantization {} (max error {:e})",
                inst.quantization.step(),
                report.max_rounding_error
            );
        }
        Ok(inst)
    }

    pub fn from_json_with_report(text: &str) -> Result<(Instance, LoadReport), InstanceError> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        let quantization =
            Quantization::new(doc.quantization).ok_or_else(|| InstanceError::Field {
                field: "quantization".into(),
                message: format!("must be finite and positive, got {}", doc.quantization),
            })?;
        let mut report = LoadReport::default();
        let mut quantize = |x: f64| {
            let (u, err) = quantization.to_units(x);
            report.max_rounding_error = report.max_rounding_error.max(err);
            u
        };

        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (i, c) in doc.nodes.iter().enumerate() {
            let coord = match c.as_slice() {
                [x, y] => NodeCoord::planar(*x, *y),
                [x, y, z] => NodeCoord::spatial(*x, *y, *z),
                _ => {
                    return Err(InstanceError::Field {
                        field: format!("nodes[{i}]"),
                        message: format!("expected [x, y] or [x, y, z], got {} values", c.len()),
                    })
                }
            };
            nodes.push(coord);
        }

        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            let edge = Edge {
                from: e.u,
                to: e.v,
                cost: e.d,
                drain: quantize(e.c),
                recharge: quantize(e.z),
                gen_allowed: e.gen_allowed,
                gliding: e.gliding,
            };
            if e.undirected {
                let reverse = Edge {
                    from: e.v,
                    to: e.u,
                    ..edge.clone()
                };
                edges.push(edge);
                edges.push(reverse);
            } else {
                edges.push(edge);
            }
        }

        let inst = Instance {
            nodes,
            edges,
            start: doc.start,
            goal: doc.goal,
            b0: quantize(doc.b0),
            bmin: quantize(doc.bmin),
            bmax: quantize(doc.bmax),
            q0: quantize(doc.q0),
            startup: quantize(doc.v),
            quantization,
            meta: doc.meta,
        };
        let violations = inst.validate();
        if !violations.is_empty() {
            return Err(InstanceError::Invalid(violations));
        }
        Ok((inst, report))
    }

    /// Canonical JSON text. Consecutive reverse edges with identical
    /// parameters are written back as a single `undirected` record.
    pub fn to_json(&self) -> String {
        let q = &self.quantization;
        let mut out = String::from("{\n  \"nodes\": [");
        for (i, n) in self.nodes.iter().enumerate() {
            let coords = match n.z {
                Some(z) => vec![n.x, n.y, z],
                None => vec![n.x, n.y],
            };
            let sep = if i == 0 { "\n" } else { ",\n" };
            write!(
                out,
                "{sep}    {}",
                serde_json::to_string(&coords).expect("finite floats")
            )
            .unwrap();
        }
        out.push_str(if self.nodes.is_empty() {
            "],\n"
        } else {
            "\n  ],\n"
        });

        out.push_str("  \"edges\": [");
        let mut i = 0;
        let mut first = true;
        while i < self.edges.len() {
            let e = &self.edges[i];
            let undirected = self.edges.get(i + 1).is_some_and(|r| is_reverse_twin(e, r));
            let doc = EdgeDoc {
                u: e.from,
                v: e.to,
                d: e.cost,
                c: q.to_nominal(e.drain),
                z: q.to_nominal(e.recharge),
                gen_allowed: e.gen_allowed,
                gliding: e.gliding,
                undirected,
            };
            let sep = if first { "\n" } else { ",\n" };
            write!(
                out,
                "{sep}    {}",
                serde_json::to_string(&doc).expect("edge serializes")
            )
            .unwrap();
            first = false;
            i += if undirected { 2 } else { 1 };
        }
        out.push_str(if self.edges.is_empty() {
            "],\n"
        } else {
            "\n  ],\n"
        });

        let scalars: [(&str, String); 8] = [
            ("start", self.start.to_string()),
            ("goal", self.goal.to_string()),
            ("b0", number(q.to_nominal(self.b0))),
            ("bmin", number(q.to_nominal(self.bmin))),
            ("bmax", number(q.to_nominal(self.bmax))),
            ("q0", number(q.to_nominal(self.q0))),
            ("v", number(q.to_nominal(self.startup))),
            ("quantization", number(q.step())),
        ];
        for (k, v) in scalars {
            writeln!(out, "  \"{k}\": {v},").unwrap();
        }
        match &self.meta {
            Some(meta) => {
                let text = serde_json::to_string(meta).expect("meta serializes");
                writeln!(out, "  \"meta\": {text}").unwrap();
            }
            None => {
                // drop the trailing comma of the last scalar
                out.truncate(out.len() - 2);
                out.push('\n');
            }
        }
        out.push_str("}\n");
        out
    }
}

fn number(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn is_reverse_twin(a: &Edge, b: &Edge) -> bool {
    a.from == b.to
        && a.to == b.from
        && a.cost == b.cost
        && a.drain == b.drain
        && a.recharge == b.recharge
        && a.gen_allowed == b.gen_allowed
        && a.gliding == b.gliding
}
