//! DNN split-point evaluation for UAV-to-server inference offloading.
//!
//! A profile lists per-layer compute cost on the UAV and on the server plus
//! the size of each layer's boundary activation (everything that must cross
//! the network if the model is cut after that layer). Splitting at k means
//! layers 1..=k run on the UAV, the boundary tensor goes up the radio link,
//! and the rest runs server-side. k = 0 ships the raw input; k = N runs the
//! whole model on board and ships only the final output.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SplitError {
    #[error("split index {k} out of range; profile has {layers} layers")]
    IndexOutOfRange { k: usize, layers: usize },
    #[error("profile line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("cannot read profile: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCost {
    pub uav_ms: f64,
    pub srv_ms: f64,
    /// Bits crossing the network when the model is cut after this layer.
    /// For branching models this includes every earlier tensor a later
    /// layer still needs, not just this layer's own output.
    pub out_activation_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnnProfile {
    pub name: String,
    /// Frame size after subsampling and quantization, in bits.
    pub input_bits: u64,
    pub quant_bits: u32,
    pub layers: Vec<LayerCost>,
}

impl DnnProfile {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Bits that cross the uplink for split point `k`.
    pub fn tx_bits(&self, k: usize) -> Result<u64, SplitError> {
        self.check_k(k)?;
        Ok(if k == 0 {
            self.input_bits
        } else {
            self.layers[k - 1].out_activation_bits
        })
    }

    fn check_k(&self, k: usize) -> Result<(), SplitError> {
        if k > self.layers.len() {
            return Err(SplitError::IndexOutOfRange {
                k,
                layers: self.layers.len(),
            });
        }
        Ok(())
    }

    /// Rescales compute costs for hardware that is slower or faster than
    /// the profiled reference (factor > 1 means slower).
    pub fn scaled(&self, uav_factor: f64, srv_factor: f64) -> DnnProfile {
        let mut p = self.clone();
        for layer in &mut p.layers {
            layer.uav_ms *= uav_factor;
            layer.srv_ms *= srv_factor;
        }
        p
    }

    /// Text format, one record per line:
    ///
    /// ```text
    /// name,layer_count,input_bits,quant_bits
    /// layer_index,uav_ms,srv_ms,out_activation_bits
    /// ```
    ///
    /// Layer indices are 1-based and must appear in order.
    pub fn parse(text: &str) -> Result<DnnProfile, SplitError> {
        let bad = |line: usize, reason: &str| SplitError::Malformed {
            line,
            reason: reason.to_owned(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or_else(|| bad(1, "empty profile"))?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(line, "header needs name,layer_count,input_bits,quant_bits"));
        }
        let name = fields[0].to_owned();
        let count: usize = fields[1]
            .parse()
            .map_err(|_| bad(line, "layer_count is not an integer"))?;
        let input_bits: u64 = fields[2]
            .parse()
            .map_err(|_| bad(line, "input_bits is not an integer"))?;
        let quant_bits: u32 = fields[3]
            .parse()
            .map_err(|_| bad(line, "quant_bits is not an integer"))?;
        if input_bits == 0 {
            return Err(bad(line, "input_bits must be positive"));
        }
        if !(1..=32).contains(&quant_bits) {
            return Err(bad(line, "quant_bits must be in 1..=32"));
        }
        let mut layers = Vec::with_capacity(count);
        for (line, text) in lines {
            let fields: Vec<&str> = text.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(bad(line, "layer needs index,uav_ms,srv_ms,out_activation_bits"));
            }
            let index: usize = fields[0]
                .parse()
                .map_err(|_| bad(line, "layer index is not an integer"))?;
            if index != layers.len() + 1 {
                return Err(bad(line, "layer indices must be 1-based and in order"));
            }
            let uav_ms: f64 = fields[1]
                .parse()
                .map_err(|_| bad(line, "uav_ms is not a number"))?;
            let srv_ms: f64 = fields[2]
                .parse()
                .map_err(|_| bad(line, "srv_ms is not a number"))?;
            let out_activation_bits: u64 = fields[3]
                .parse()
                .map_err(|_| bad(line, "out_activation_bits is not an integer"))?;
            if !(uav_ms.is_finite() && uav_ms >= 0.0 && srv_ms.is_finite() && srv_ms >= 0.0) {
                return Err(bad(line, "compute costs must be finite and non-negative"));
            }
            if out_activation_bits == 0 {
                return Err(bad(line, "out_activation_bits must be positive"));
            }
            layers.push(LayerCost {
                uav_ms,
                srv_ms,
                out_activation_bits,
            });
        }
        if layers.len() != count {
            return Err(bad(
                1,
                &format!("header promises {count} layers, found {}", layers.len()),
            ));
        }
        Ok(DnnProfile {
            name,
            input_bits,
            quant_bits,
            layers,
        })
    }

    pub fn from_path(path: &Path) -> Result<DnnProfile, SplitError> {
        let text = std::fs::read_to_string(path)?;
        DnnProfile::parse(&text)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!(
            "{},{},{},{}\n",
            self.name,
            self.layers.len(),
            self.input_bits,
            self.quant_bits
        );
        for (i, l) in self.layers.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                l.uav_ms,
                l.srv_ms,
                l.out_activation_bits
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    MinLatency,
    MaxFps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitEvaluation {
    pub k: usize,
    pub latency_ms: f64,
    pub fps: f64,
}

fn tx_ms(bits: u64, uplink_bps: f64) -> f64 {
    assert!(
        uplink_bps.is_finite() && uplink_bps > 0.0,
        "uplink rate must be positive"
    );
    bits as f64 / uplink_bps * 1_000.0
}

/// End-to-end latency of one frame for split point `k`: UAV compute, uplink
/// transfer of the boundary tensor, one-way transport to the serving node,
/// then server compute.
pub fn split_latency(
    profile: &DnnProfile,
    k: usize,
    uplink_bps: f64,
    path_one_way_ms: f64,
) -> Result<f64, SplitError> {
    let bits = profile.tx_bits(k)?;
    let uav: f64 = profile.layers[..k].iter().map(|l| l.uav_ms).sum();
    let srv: f64 = profile.layers[k..].iter().map(|l| l.srv_ms).sum();
    Ok(uav + tx_ms(bits, uplink_bps) + path_one_way_ms + srv)
}

/// Steady-state frame rate when UAV compute, uplink transfer and server
/// compute run as a three-stage pipeline: the slowest stage sets the rate.
/// Propagation delay adds latency but does not occupy any stage.
pub fn pipeline_fps(profile: &DnnProfile, k: usize, uplink_bps: f64) -> Result<f64, SplitError> {
    let bits = profile.tx_bits(k)?;
    let uav: f64 = profile.layers[..k].iter().map(|l| l.uav_ms).sum();
    let srv: f64 = profile.layers[k..].iter().map(|l| l.srv_ms).sum();
    let bottleneck = uav.max(tx_ms(bits, uplink_bps)).max(srv);
    Ok(1_000.0 / bottleneck)
}

pub fn evaluate(
    profile: &DnnProfile,
    k: usize,
    uplink_bps: f64,
    path_one_way_ms: f64,
) -> Result<SplitEvaluation, SplitError> {
    Ok(SplitEvaluation {
        k,
        latency_ms: split_latency(profile, k, uplink_bps, path_one_way_ms)?,
        fps: pipeline_fps(profile, k, uplink_bps)?,
    })
}

/// Exhaustive search over all split points. Ties go to the smallest k, so
/// equal scores prefer keeping less of the model on the UAV.
pub fn best_split(
    profile: &DnnProfile,
    uplink_bps: f64,
    path_one_way_ms: f64,
    objective: Objective,
) -> SplitEvaluation {
    let mut best: Option<SplitEvaluation> = None;
    for k in 0..=profile.layer_count() {
        let eval = evaluate(profile, k, uplink_bps, path_one_way_ms)
            .expect("k ranges over valid split points");
        let better = match (&best, objective) {
            (None, _) => true,
            (Some(b), Objective::MinLatency) => eval.latency_ms < b.latency_ms,
            (Some(b), Objective::MaxFps) => eval.fps > b.fps,
        };
        if better {
            best = Some(eval);
        }
    }
    best.expect("profiles always admit k = 0")
}
