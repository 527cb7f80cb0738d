//! Canned experiments: each one runs a small set of built-in scenarios and
//! reduces their summaries to the comparison the scenario family exists
//! to make.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::json;

use super::world::run_scenario;
use super::{load_builtin, RunArtifacts, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Slicing,
    Placement,
    Split,
}

impl ExperimentKind {
    pub fn all() -> [ExperimentKind; 3] {
        [
            ExperimentKind::Slicing,
            ExperimentKind::Placement,
            ExperimentKind::Split,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Slicing => "slicing",
            ExperimentKind::Placement => "placement",
            ExperimentKind::Split => "split",
        }
    }

    /// Case label paired with the built-in scenario it runs.
    fn cases(self) -> &'static [(&'static str, &'static str)] {
        match self {
            ExperimentKind::Slicing => {
                &[("fair", "slicing_fair"), ("sliced", "slicing_sliced")]
            }
            ExperimentKind::Placement => &[
                ("edge_fair", "slicing_fair"),
                ("edge_sliced", "slicing_sliced"),
                ("cloud_fair", "placement_cloud_fair"),
                ("cloud_sliced", "placement_cloud_sliced"),
            ],
            ExperimentKind::Split => &[("edge", "split_edge"), ("cloud", "split_cloud")],
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "slicing" => Ok(ExperimentKind::Slicing),
            "placement" => Ok(ExperimentKind::Placement),
            "split" => Ok(ExperimentKind::Split),
            other => Err(format!(
                "unknown experiment {other:?}; expected slicing, placement or split"
            )),
        }
    }
}

pub struct CaseResult {
    pub label: &'static str,
    pub scenario: &'static str,
    pub artifacts: RunArtifacts,
}

pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub cases: Vec<CaseResult>,
    pub comparison: serde_json::Value,
    pub table: String,
}

/// Runs every case of the experiment (cases are independent, so they run on
/// their own threads) and folds the summaries into a comparison.
pub fn run_experiment(kind: ExperimentKind) -> Result<ExperimentReport, ScenarioError> {
    let specs = kind.cases();
    let results: Vec<Result<RunArtifacts, ScenarioError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|&(_, scenario)| {
                scope.spawn(move || run_scenario(&load_builtin(scenario)?))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment worker panicked"))
            .collect()
    });
    let mut cases = Vec::with_capacity(specs.len());
    for (&(label, scenario), result) in specs.iter().zip(results) {
        cases.push(CaseResult {
            label,
            scenario,
            artifacts: result?,
        });
    }
    let comparison = compare(kind, &cases);
    let table = render_table(kind, &cases, &comparison);
    Ok(ExperimentReport {
        kind,
        cases,
        comparison,
        table,
    })
}

fn case<'a>(cases: &'a [CaseResult], label: &str) -> &'a RunArtifacts {
    &cases
        .iter()
        .find(|c| c.label == label)
        .expect("case labels are static")
        .artifacts
}

fn flow_mean(a: &RunArtifacts, flow: &str, field: &str) -> f64 {
    a.summary["flows"][flow][field].as_f64().unwrap_or(f64::NAN)
}

fn ue_total_bps(a: &RunArtifacts) -> f64 {
    let Some(flows) = a.summary["flows"].as_object() else {
        return f64::NAN;
    };
    flows
        .iter()
        .filter(|(id, _)| id.as_str() != "uav-1")
        .filter_map(|(_, v)| v["mean_throughput_bps"].as_f64())
        .sum()
}

fn compare(kind: ExperimentKind, cases: &[CaseResult]) -> serde_json::Value {
    match kind {
        ExperimentKind::Slicing => {
            let fair = case(cases, "fair");
            let sliced = case(cases, "sliced");
            let delay_fair = flow_mean(fair, "uav-1", "mean_queue_delay_ms");
            let delay_sliced = flow_mean(sliced, "uav-1", "mean_queue_delay_ms");
            json!({
                "experiment": "slicing",
                "uav_throughput_bps": {
                    "fair": flow_mean(fair, "uav-1", "mean_throughput_bps"),
                    "sliced": flow_mean(sliced, "uav-1", "mean_throughput_bps"),
                },
                "ue_total_throughput_bps": {
                    "fair": ue_total_bps(fair),
                    "sliced": ue_total_bps(sliced),
                },
                "uav_queue_delay_ms": {
                    "fair": delay_fair,
                    "sliced": delay_sliced,
                },
                "uav_queue_delay_reduction_pct": (delay_fair - delay_sliced) / delay_fair * 100.0,
            })
        }
        ExperimentKind::Placement => {
            let rtt =
                |label: &str| flow_mean(case(cases, label), "uav-1", "mean_latency_rtt_ms");
            json!({
                "experiment": "placement",
                "uav_rtt_ms": {
                    "edge_fair": rtt("edge_fair"),
                    "edge_sliced": rtt("edge_sliced"),
                    "cloud_fair": rtt("cloud_fair"),
                    "cloud_sliced": rtt("cloud_sliced"),
                },
                "cloud_minus_edge_rtt_ms": {
                    "fair": rtt("cloud_fair") - rtt("edge_fair"),
                    "sliced": rtt("cloud_sliced") - rtt("edge_sliced"),
                },
            })
        }
        ExperimentKind::Split => {
            let edge = &case(cases, "edge").summary["split"];
            let cloud = &case(cases, "cloud").summary["split"];
            let points: Vec<serde_json::Value> = edge["points"]
                .as_array()
                .into_iter()
                .flatten()
                .zip(cloud["points"].as_array().into_iter().flatten())
                .map(|(e, c)| {
                    json!({
                        "k": e["k"],
                        "edge_latency_ms": e["latency_ms"],
                        "cloud_latency_ms": c["latency_ms"],
                        "fps": e["fps"],
                    })
                })
                .collect();
            let latency_at = |points: &serde_json::Value, k: &serde_json::Value| {
                points
                    .as_array()
                    .into_iter()
                    .flatten()
                    .find(|p| &p["k"] == k)
                    .and_then(|p| p["latency_ms"].as_f64())
                    .unwrap_or(f64::NAN)
            };
            let edge_l0 = latency_at(&edge["points"], &json!(0));
            let edge_best = latency_at(&edge["points"], &edge["best_k"]);
            json!({
                "experiment": "split",
                "profile": edge["profile"],
                "best_k": { "edge": edge["best_k"], "cloud": cloud["best_k"] },
                "points": points,
                "edge_latency_reduction_pct": (edge_l0 - edge_best) / edge_l0 * 100.0,
            })
        }
    }
}

fn render_table(
    kind: ExperimentKind,
    cases: &[CaseResult],
    comparison: &serde_json::Value,
) -> String {
    let mut out = String::new();
    match kind {
        ExperimentKind::Slicing => {
            let _ = writeln!(out, "slicing: fair sharing vs reserved slice");
            let _ = writeln!(
                out,
                "{:<10} {:>12} {:>16} {:>14}",
                "case", "uav_mbps", "ue_total_mbps", "uav_delay_ms"
            );
            for c in cases {
                let _ = writeln!(
                    out,
                    "{:<10} {:>12.3} {:>16.3} {:>14.2}",
                    c.label,
                    flow_mean(&c.artifacts, "uav-1", "mean_throughput_bps") / 1.0e6,
                    ue_total_bps(&c.artifacts) / 1.0e6,
                    flow_mean(&c.artifacts, "uav-1", "mean_queue_delay_ms"),
                );
            }
            let _ = writeln!(
                out,
                "uav queue delay reduction: {:.1}%",
                comparison["uav_queue_delay_reduction_pct"]
                    .as_f64()
                    .unwrap_or(f64::NAN)
            );
        }
        ExperimentKind::Placement => {
            let _ = writeln!(out, "placement: application server at the edge vs in the cloud");
            let _ = writeln!(out, "{:<14} {:>14}", "case", "uav_rtt_ms");
            for c in cases {
                let _ = writeln!(
                    out,
                    "{:<14} {:>14.3}",
                    c.label,
                    flow_mean(&c.artifacts, "uav-1", "mean_latency_rtt_ms"),
                );
            }
            let delta = &comparison["cloud_minus_edge_rtt_ms"];
            let _ = writeln!(
                out,
                "cloud - edge rtt: fair {:.3} ms, sliced {:.3} ms",
                delta["fair"].as_f64().unwrap_or(f64::NAN),
                delta["sliced"].as_f64().unwrap_or(f64::NAN),
            );
        }
        ExperimentKind::Split => {
            let _ = writeln!(out, "split: on-board layers vs end-to-end inference latency");
            let _ = writeln!(
                out,
                "{:<6} {:>12} {:>12} {:>10}",
                "k", "edge_ms", "cloud_ms", "fps"
            );
            for p in comparison["points"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    out,
                    "{:<6} {:>12.3} {:>12.3} {:>10.3}",
                    p["k"].as_u64().unwrap_or(0),
                    p["edge_latency_ms"].as_f64().unwrap_or(f64::NAN),
                    p["cloud_latency_ms"].as_f64().unwrap_or(f64::NAN),
                    p["fps"].as_f64().unwrap_or(f64::NAN),
                );
            }
            let _ = writeln!(
                out,
                "best split: edge k={} cloud k={}, edge latency {:.2}% below all-offload",
                comparison["best_k"]["edge"],
                comparison["best_k"]["cloud"],
                comparison["edge_latency_reduction_pct"]
                    .as_f64()
                    .unwrap_or(f64::NAN),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slicing_experiment_contrasts_the_two_regimes() {
        let report = run_experiment(ExperimentKind::Slicing).unwrap();
        let uav = &report.comparison["uav_throughput_bps"];
        let fair = uav["fair"].as_f64().unwrap();
        let sliced = uav["sliced"].as_f64().unwrap();
        assert!((fair - 4.5e6).abs() <= 0.02 * 4.5e6, "fair {fair}");
        assert!(sliced >= 12.74e6, "sliced {sliced}");
        let reduction = report.comparison["uav_queue_delay_reduction_pct"]
            .as_f64()
            .unwrap();
        assert!(reduction >= 45.0, "delay reduction {reduction}");
        assert!(report.table.contains("sliced"));
    }

    #[test]
    fn placement_experiment_isolates_the_backhaul_gap() {
        let report = run_experiment(ExperimentKind::Placement).unwrap();
        let delta = &report.comparison["cloud_minus_edge_rtt_ms"];
        for label in ["fair", "sliced"] {
            let got = delta[label].as_f64().unwrap();
            assert!((got - 200.0).abs() < 1e-6, "{label} delta {got}");
        }
    }

    #[test]
    fn split_experiment_lands_on_the_same_optimum_either_way() {
        let report = run_experiment(ExperimentKind::Split).unwrap();
        assert_eq!(report.comparison["best_k"]["edge"], 10);
        assert_eq!(report.comparison["best_k"]["cloud"], 10);
        let points = report.comparison["points"].as_array().unwrap();
        assert_eq!(points.len(), 4);
        for p in points {
            let edge = p["edge_latency_ms"].as_f64().unwrap();
            let cloud = p["cloud_latency_ms"].as_f64().unwrap();
            assert!((cloud - edge - 100.0).abs() < 1e-9, "edge {edge} cloud {cloud}");
        }
    }
}
