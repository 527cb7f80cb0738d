//! Run artifacts: the metrics CSV, the derived summary and the decision log.
//!
//! The summary is always computed by [`summarize`], whether from the live
//! sample buffer or from a parsed metrics.csv, so the two can be compared
//! byte for byte.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde_json::json;

use crate::metrics::Sample;
use crate::time::SimTime;

use super::{
    ScenarioDoc, M_LATENCY_OW, M_LATENCY_RTT, M_PACKET_DROP, M_QUEUE_DELAY, M_RESIDUAL,
    M_SI_ACTION, M_SPLIT_BEST_K, M_SPLIT_CURRENT_K, M_SPLIT_FPS, M_SPLIT_LATENCY, M_THROUGHPUT,
};

pub const METRICS_HEADER: &str = "time_ms,entity,metric,value";
const SI_LOG_HEADER: &str = "time_ms,kind,subject,detail";

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub scenario: String,
    pub summary: serde_json::Value,
    pub metrics_csv: String,
    /// Pretty-printed `summary`, exactly what lands in summary.json.
    pub summary_json: String,
    pub si_log_csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SiLogRow {
    pub time: SimTime,
    pub kind: String,
    pub subject: String,
    pub detail: String,
}

pub(crate) fn assemble(
    doc: &ScenarioDoc,
    samples: Vec<Sample>,
    si_log: Vec<SiLogRow>,
) -> RunArtifacts {
    let metrics_csv = metrics_to_csv(&samples);
    let summary = summarize(&doc.name, doc.seed, doc.horizon_s, &samples);
    let summary_json = format!(
        "{}\n",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    let si_log_csv = si_log_to_csv(&si_log);
    RunArtifacts {
        scenario: doc.name.clone(),
        summary,
        metrics_csv,
        summary_json,
        si_log_csv,
    }
}

fn metrics_to_csv(samples: &[Sample]) -> String {
    let mut out = String::with_capacity(32 * samples.len() + 32);
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&s.time.ms_string());
        out.push(',');
        out.push_str(&s.entity);
        out.push(',');
        out.push_str(&s.metric);
        out.push(',');
        out.push_str(&format!("{}", s.value));
        out.push('\n');
    }
    out
}

/// CSV fields must stay comma-free; the log keeps its vocabulary clean but
/// error strings pass through here too.
pub(crate) fn sanitize_field(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            ',' => ';',
            '\n' | '\r' => ' ',
            c => c,
        })
        .collect()
}

fn si_log_to_csv(rows: &[SiLogRow]) -> String {
    let mut out = String::new();
    out.push_str(SI_LOG_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.time.ms_string(),
            sanitize_field(&row.kind),
            sanitize_field(&row.subject),
            sanitize_field(&row.detail),
        ));
    }
    out
}

/// Inverse of the metrics serializer. Timestamps parse back exactly (they
/// are fixed-point milliseconds) and values are shortest-round-trip floats,
/// so a parse-summarize pass reproduces the original summary bit for bit.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<Sample>, String> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == METRICS_HEADER => {}
        other => return Err(format!("bad header: {:?}", other.map(|(_, l)| l))),
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        let [time, entity, metric, value] = fields.as_slice() else {
            return Err(format!("line {n}: expected 4 fields, got {}", fields.len()));
        };
        let (ms, frac) = time
            .split_once('.')
            .ok_or_else(|| format!("line {n}: time {time:?} is not fixed-point ms"))?;
        if frac.len() != 3 {
            return Err(format!("line {n}: time {time:?} needs exactly 3 fraction digits"));
        }
        let us = ms
            .parse::<u64>()
            .ok()
            .zip(frac.parse::<u64>().ok())
            .map(|(a, b)| a * 1_000 + b)
            .ok_or_else(|| format!("line {n}: unparsable time {time:?}"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| format!("line {n}: unparsable value {value:?}"))?;
        samples.push(Sample {
            time: SimTime::from_us(us),
            entity: (*entity).to_owned(),
            metric: (*metric).to_owned(),
            value,
        });
    }
    Ok(samples)
}

#[derive(Default)]
struct Mean {
    sum: f64,
    n: u64,
}

impl Mean {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.n += 1;
    }

    fn get(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

#[derive(Default)]
struct FlowAcc {
    throughput: Mean,
    queue_delay: Mean,
    latency_ow: Mean,
    latency_rtt: Mean,
    delivered: u64,
    dropped: u64,
    residual: u64,
}

/// Aggregates a sorted sample list into the run summary. Means are plain
/// arithmetic means in row order, which makes the result reproducible from
/// the CSV.
pub fn summarize(
    scenario: &str,
    seed: u64,
    horizon_s: f64,
    samples: &[Sample],
) -> serde_json::Value {
    let mut flows: BTreeMap<&str, FlowAcc> = BTreeMap::new();
    let mut si_actions: BTreeMap<&str, u64> = BTreeMap::new();
    let mut split_points: BTreeMap<usize, (Option<f64>, Option<f64>)> = BTreeMap::new();
    let mut split_best: Option<(&str, u64)> = None;
    let mut split_final: Option<u64> = None;

    for s in samples {
        match s.metric.as_str() {
            M_THROUGHPUT => flows.entry(&s.entity).or_default().throughput.push(s.value),
            M_QUEUE_DELAY => {
                let acc = flows.entry(&s.entity).or_default();
                acc.queue_delay.push(s.value);
                acc.delivered += 1;
            }
            M_LATENCY_OW => flows.entry(&s.entity).or_default().latency_ow.push(s.value),
            M_LATENCY_RTT => flows.entry(&s.entity).or_default().latency_rtt.push(s.value),
            M_PACKET_DROP => flows.entry(&s.entity).or_default().dropped += 1,
            M_RESIDUAL => flows.entry(&s.entity).or_default().residual = s.value as u64,
            M_SI_ACTION => *si_actions.entry(&s.entity).or_default() += 1,
            M_SPLIT_LATENCY | M_SPLIT_FPS => {
                let Some(k) = s.entity.strip_prefix("k=").and_then(|k| k.parse().ok()) else {
                    continue;
                };
                let slot = split_points.entry(k).or_default();
                if s.metric == M_SPLIT_LATENCY {
                    slot.0 = Some(s.value);
                } else {
                    slot.1 = Some(s.value);
                }
            }
            M_SPLIT_BEST_K => split_best = Some((&s.entity, s.value as u64)),
            M_SPLIT_CURRENT_K => split_final = Some(s.value as u64),
            _ => {}
        }
    }

    let flows_json: serde_json::Value = flows
        .iter()
        .map(|(id, acc)| {
            (
                (*id).to_owned(),
                json!({
                    "mean_throughput_bps": acc.throughput.get(),
                    "delivered_packets": acc.delivered,
                    "mean_queue_delay_ms": acc.queue_delay.get(),
                    "mean_latency_ow_ms": acc.latency_ow.get(),
                    "mean_latency_rtt_ms": acc.latency_rtt.get(),
                    "dropped_packets": acc.dropped,
                    "residual_packets": acc.residual,
                }),
            )
        })
        .collect::<serde_json::Map<_, _>>()
        .into();

    let split_json = match split_best {
        None => serde_json::Value::Null,
        Some((profile, best_k)) => json!({
            "profile": profile,
            "best_k": best_k,
            "final_k": split_final,
            "points": split_points
                .iter()
                .map(|(k, (latency, fps))| json!({
                    "k": k,
                    "latency_ms": latency,
                    "fps": fps,
                }))
                .collect::<Vec<_>>(),
        }),
    };

    json!({
        "scenario": scenario,
        "seed": seed,
        "horizon_s": horizon_s,
        "flows": flows_json,
        "si_actions": si_actions,
        "split": split_json,
    })
}

fn atomic_write(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    std::fs::write(tmp, contents)?;
    std::fs::rename(tmp, path)
}

/// Writes metrics.csv, summary.json and si_log.csv under `dir`. Each file
/// lands via a rename, so a crash can leave stale temp files but never a
/// half-written artifact.
pub fn write_artifacts(dir: &Path, artifacts: &RunArtifacts) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    atomic_write(&dir.join("metrics.csv"), &artifacts.metrics_csv)?;
    atomic_write(&dir.join("summary.json"), &artifacts.summary_json)?;
    atomic_write(&dir.join("si_log.csv"), &artifacts.si_log_csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(us: u64, entity: &str, metric: &str, value: f64) -> Sample {
        Sample {
            time: SimTime::from_us(us),
            entity: entity.into(),
            metric: metric.into(),
            value,
        }
    }

    #[test]
    fn csv_round_trips_exactly() {
        let samples = vec![
            sample(0, "k=0", M_SPLIT_LATENCY, 136.29444444444445),
            sample(100_000, "uav-1", M_THROUGHPUT, 4.5e6),
            sample(100_123, "uav-1", M_QUEUE_DELAY, 66.70000000000002),
            sample(100_123, "uav-1", M_PACKET_DROP, 1.0),
        ];
        let csv = metrics_to_csv(&samples);
        assert!(csv.starts_with("time_ms,entity,metric,value\n0.000,k=0,"));
        assert!(csv.contains("100.123,uav-1,queue_delay_ms,66.70000000000002\n"));
        let parsed = parse_metrics_csv(&csv).unwrap();
        assert_eq!(parsed, samples);
    }

    #[test]
    fn csv_parse_reports_the_offending_line() {
        let err = parse_metrics_csv("time_ms,entity,metric,value\n1.000,a,m\n").unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_metrics_csv("nope\n").unwrap_err();
        assert!(err.contains("bad header"), "{err}");
    }

    #[test]
    fn summary_recomputes_identically_from_csv() {
        let samples = vec![
            sample(100_000, "uav-1", M_THROUGHPUT, 4_499_999.999_999_987),
            sample(100_500, "uav-1", M_QUEUE_DELAY, 64.0),
            sample(100_500, "uav-1", M_LATENCY_OW, 69.0),
            sample(100_500, "uav-1", M_LATENCY_RTT, 74.0),
            sample(200_000, "uav-1", M_THROUGHPUT, 4_500_000.000_000_013),
            sample(200_000, "vRAN", M_SI_ACTION, 1.0),
            sample(300_000, "uav-1", M_RESIDUAL, 25.0),
        ];
        let a = summarize("s", 42, 0.3, &samples);
        let b = summarize("s", 42, 0.3, &parse_metrics_csv(&metrics_to_csv(&samples)).unwrap());
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a["flows"]["uav-1"]["delivered_packets"], 1);
        assert_eq!(a["si_actions"]["vRAN"], 1);
        assert_eq!(a["flows"]["uav-1"]["residual_packets"], 25);
    }

    #[test]
    fn sanitize_strips_csv_breakers() {
        assert_eq!(sanitize_field("a,b\nc"), "a;b c");
    }
}
