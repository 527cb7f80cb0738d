//! Scenario documents and execution.
//!
//! A scenario is a JSON document naming the topology, the radio cell, the
//! traffic, the initial slice and placement state, optional DNN split
//! settings and the policy set driving the intelligence loop. Loading
//! resolves the DNN profile; validation collects every problem in one pass
//! instead of stopping at the first.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::policy::{compile, Policy};
use crate::radio::{Cell, RadioError, SliceConfig};
use crate::si::{ActionTag, Awareness, SiError, TargetSystem};
use crate::split::{DnnProfile, Objective, SplitError};
use crate::time::SimTime;
use crate::topology::{NodeKind, Topology};
use crate::topology::Flow;
use crate::transport::Placement;

pub mod experiments;
mod report;
mod world;

pub use report::{parse_metrics_csv, summarize, write_artifacts, RunArtifacts};
pub use world::run_scenario;

pub const M_THROUGHPUT: &str = "throughput_bps";
pub const M_QUEUE_DELAY: &str = "queue_delay_ms";
pub const M_LATENCY_OW: &str = "latency_ow_ms";
pub const M_LATENCY_RTT: &str = "latency_rtt_ms";
pub const M_PACKET_DROP: &str = "packet_drop";
pub const M_RESIDUAL: &str = "residual_packets";
pub const M_SI_ACTION: &str = "si_action";
pub const M_SPLIT_LATENCY: &str = "split_latency_ms";
pub const M_SPLIT_FPS: &str = "split_fps";
pub const M_SPLIT_BEST_K: &str = "split_best_k";
pub const M_SPLIT_CURRENT_K: &str = "split_current_k";

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("no built-in scenario named {0:?}")]
    UnknownBuiltin(String),
    #[error("profile error: {0}")]
    Profile(#[from] SplitError),
    #[error("scenario is invalid:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Si(#[from] SiError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub horizon_s: f64,
    pub topology: Topology,
    #[serde(default)]
    pub cell: Cell,
    /// Cell used only to price the DNN uplink transfer. Defaults to the
    /// main cell.
    #[serde(default)]
    pub uplink_cell: Option<Cell>,
    pub flows: Vec<Flow>,
    #[serde(default)]
    pub slices: Vec<SliceConfig>,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default = "default_queue_cap")]
    pub queue_cap_packets: usize,
    #[serde(default = "default_sample_period")]
    pub sample_period_ms: f64,
    #[serde(default)]
    pub migration_downtime_ms: f64,
    #[serde(default)]
    pub dnn: Option<DnnSection>,
    #[serde(default)]
    pub policies: Vec<Policy>,
    #[serde(default)]
    pub si: SiSection,
}

fn default_seed() -> u64 {
    crate::engine::DEFAULT_SEED
}

fn default_queue_cap() -> usize {
    25
}

fn default_sample_period() -> f64 {
    100.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DnnSection {
    /// Profile file, relative to the scenario document's directory.
    pub profile_path: String,
    /// Flow whose radio endpoint runs the on-board half of the model.
    pub uplink_flow: String,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    /// Split points reported in the metrics alongside 0 and the optimum.
    #[serde(default = "default_evaluate_splits")]
    pub evaluate_splits: Vec<usize>,
}

fn default_objective() -> Objective {
    Objective::MinLatency
}

fn default_evaluate_splits() -> Vec<usize> {
    vec![3, 6, 10]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_loop_period")]
    pub loop_period_ms: f64,
    #[serde(default = "default_dwell")]
    pub dwell_ms: f64,
    #[serde(default = "default_hysteresis")]
    pub hysteresis: f64,
    #[serde(default = "default_cooldown")]
    pub cooldown_ms: f64,
    #[serde(default = "default_context_window")]
    pub context_window: usize,
    /// Empty means one default adapter per known subsystem.
    #[serde(default)]
    pub adapters: Vec<AdapterDoc>,
}

fn default_loop_period() -> f64 {
    100.0
}

fn default_dwell() -> f64 {
    200.0
}

fn default_hysteresis() -> f64 {
    0.02
}

fn default_cooldown() -> f64 {
    1_000.0
}

fn default_context_window() -> usize {
    64
}

impl Default for SiSection {
    fn default() -> Self {
        SiSection {
            enabled: false,
            loop_period_ms: default_loop_period(),
            dwell_ms: default_dwell(),
            hysteresis: default_hysteresis(),
            cooldown_ms: default_cooldown(),
            context_window: default_context_window(),
            adapters: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterDoc {
    pub system: TargetSystem,
    #[serde(default = "default_awareness")]
    pub awareness: Awareness,
    #[serde(default = "default_actuation_delay")]
    pub actuation_delay_ms: f64,
    #[serde(default)]
    pub local_decision_delay_ms: f64,
    pub accepts: Vec<ActionTag>,
}

fn default_awareness() -> Awareness {
    Awareness::BasicAware
}

fn default_actuation_delay() -> f64 {
    10.0
}

/// A parsed scenario plus its resolved DNN profile, ready to run.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub doc: ScenarioDoc,
    pub profile: Option<DnnProfile>,
}

const PROFILE_SSD_VGG16: &str = include_str!("../../data/ssd_vgg16_synthetic.profile");

const BUILTIN: &[(&str, &str)] = &[
    ("slicing_fair", include_str!("../../scenarios/slicing_fair.json")),
    (
        "slicing_sliced",
        include_str!("../../scenarios/slicing_sliced.json"),
    ),
    (
        "placement_cloud_fair",
        include_str!("../../scenarios/placement_cloud_fair.json"),
    ),
    (
        "placement_cloud_sliced",
        include_str!("../../scenarios/placement_cloud_sliced.json"),
    ),
    ("split_edge", include_str!("../../scenarios/split_edge.json")),
    ("split_cloud", include_str!("../../scenarios/split_cloud.json")),
    ("closed_loop", include_str!("../../scenarios/closed_loop.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|&(name, _)| name).collect()
}

pub fn load_builtin(name: &str) -> Result<LoadedScenario, ScenarioError> {
    let Some(&(_, text)) = BUILTIN.iter().find(|&&(n, _)| n == name) else {
        return Err(ScenarioError::UnknownBuiltin(name.to_owned()));
    };
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|source| ScenarioError::Parse {
        path: format!("builtin:{name}"),
        source,
    })?;
    let profile = match &doc.dnn {
        Some(_) => Some(DnnProfile::parse(PROFILE_SSD_VGG16)?),
        None => None,
    };
    Ok(LoadedScenario { doc, profile })
}

pub fn load_from_path(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let show = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: show.clone(),
        source,
    })?;
    let doc: ScenarioDoc =
        serde_json::from_str(&text).map_err(|source| ScenarioError::Parse { path: show, source })?;
    let profile = match &doc.dnn {
        Some(dnn) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            let profile_path = base.join(&dnn.profile_path);
            let text =
                std::fs::read_to_string(&profile_path).map_err(|source| ScenarioError::Io {
                    path: profile_path.display().to_string(),
                    source,
                })?;
            Some(DnnProfile::parse(&text)?)
        }
        None => None,
    };
    Ok(LoadedScenario { doc, profile })
}

/// Identifiers end up as CSV fields and metric entities, so they must stay
/// printable and comma-free.
fn id_ok(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_graphic() && c != ',' && c != '"')
}

impl LoadedScenario {
    /// Every problem found, empty when the scenario is runnable.
    pub fn validate(&self) -> Vec<String> {
        let doc = &self.doc;
        let mut problems = Vec::new();
        if !id_ok(&doc.name) {
            problems.push(format!("scenario name {:?} is not a clean identifier", doc.name));
        }
        if !(doc.horizon_s.is_finite() && doc.horizon_s > 0.0) {
            problems.push(format!("horizon_s must be finite and positive, got {}", doc.horizon_s));
        }
        problems.extend(doc.topology.validate());
        for (label, cell) in std::iter::once(("cell", &doc.cell))
            .chain(doc.uplink_cell.iter().map(|c| ("uplink_cell", c)))
        {
            if cell.prb_count == 0 {
                problems.push(format!("{label}: prb_count must be positive"));
            }
            if !(cell.tti_ms.is_finite() && cell.tti_ms > 0.0) {
                problems.push(format!("{label}: tti_ms must be finite and positive"));
            }
            if cell.bits_per_prb_per_tti == 0 {
                problems.push(format!("{label}: bits_per_prb_per_tti must be positive"));
            }
            if !(cell.bandwidth_hz.is_finite() && cell.bandwidth_hz > 0.0) {
                problems.push(format!("{label}: bandwidth_hz must be finite and positive"));
            }
        }
        if doc.queue_cap_packets == 0 {
            problems.push("queue_cap_packets must be positive".into());
        }
        if !(doc.migration_downtime_ms.is_finite() && doc.migration_downtime_ms >= 0.0) {
            problems.push(format!(
                "migration_downtime_ms must be finite and non-negative, got {}",
                doc.migration_downtime_ms
            ));
        }

        let sample_us = SimTime::from_ms(doc.sample_period_ms).as_us();
        if !(doc.sample_period_ms.is_finite() && doc.sample_period_ms > 0.0) || sample_us == 0 {
            problems.push(format!(
                "sample_period_ms must be finite and positive, got {}",
                doc.sample_period_ms
            ));
        } else {
            let tti_us = doc.cell.tti().as_us();
            if tti_us == 0 || !sample_us.is_multiple_of(tti_us) {
                problems.push(format!(
                    "sample_period_ms ({}) must be a whole number of TTIs ({} ms)",
                    doc.sample_period_ms, doc.cell.tti_ms
                ));
            }
        }

        if doc.flows.is_empty() {
            problems.push("scenario declares no flows".into());
        }
        for (i, flow) in doc.flows.iter().enumerate() {
            if !id_ok(&flow.id) {
                problems.push(format!("flow #{i} id {:?} is not a clean identifier", flow.id));
            }
            if doc.flows[..i].iter().any(|other| other.id == flow.id) {
                problems.push(format!("duplicate flow id {:?}", flow.id));
            }
            match doc.topology.node(&flow.src) {
                None => problems.push(format!("flow {:?}: unknown src node {:?}", flow.id, flow.src)),
                Some(n) if !matches!(n.kind, NodeKind::Uav | NodeKind::Ue) => {
                    problems.push(format!(
                        "flow {:?}: src {:?} is a {:?}, not a radio endpoint",
                        flow.id, flow.src, n.kind
                    ));
                }
                Some(_) => {}
            }
            if doc.topology.node(&flow.dst).is_none() {
                problems.push(format!("flow {:?}: unknown dst node {:?}", flow.id, flow.dst));
            }
            if !(flow.demand_bps.is_finite() && flow.demand_bps > 0.0) {
                problems.push(format!(
                    "flow {:?}: demand_bps must be finite and positive, got {}",
                    flow.id, flow.demand_bps
                ));
            } else if flow.packet_bits == 0 {
                problems.push(format!("flow {:?}: packet_bits must be positive", flow.id));
            } else if flow.packet_bits as f64 / flow.demand_bps * 1.0e6 < 1.0 {
                problems.push(format!(
                    "flow {:?}: packet arrival period is under 1 us; lower demand_bps or raise packet_bits",
                    flow.id
                ));
            }
        }

        let mut reserved_total = 0.0;
        for (i, slice) in doc.slices.iter().enumerate() {
            if !id_ok(&slice.id) {
                problems.push(format!("slice #{i} id {:?} is not a clean identifier", slice.id));
            }
            if doc.slices[..i].iter().any(|other| other.id == slice.id) {
                problems.push(format!("duplicate slice id {:?}", slice.id));
            }
            if !(slice.reserved_bps.is_finite() && slice.reserved_bps > 0.0) {
                problems.push(format!(
                    "slice {:?}: reserved_bps must be finite and positive, got {}",
                    slice.id, slice.reserved_bps
                ));
            } else {
                reserved_total += slice.reserved_bps;
            }
            if slice.members.is_empty() {
                problems.push(format!("slice {:?} has no members", slice.id));
            }
            for member in &slice.members {
                if !doc.flows.iter().any(|f| &f.id == member) {
                    problems.push(format!("slice {:?}: unknown member flow {member:?}", slice.id));
                }
            }
        }
        if reserved_total > doc.cell.capacity_bps() {
            problems.push(format!(
                "slices reserve {reserved_total} b/s but the cell carries {} b/s",
                doc.cell.capacity_bps()
            ));
        }

        problems.extend(doc.placement.validate(&doc.topology));

        if let Some(dnn) = &doc.dnn {
            if !doc.flows.iter().any(|f| f.id == dnn.uplink_flow) {
                problems.push(format!("dnn: unknown uplink_flow {:?}", dnn.uplink_flow));
            }
            match &self.profile {
                None => problems.push("dnn section present but no profile is loaded".into()),
                Some(profile) => {
                    for &k in &dnn.evaluate_splits {
                        if k > profile.layer_count() {
                            problems.push(format!(
                                "dnn: split point {k} exceeds the profile's {} layers",
                                profile.layer_count()
                            ));
                        }
                    }
                }
            }
        }

        let demand_of = |id: &str| {
            doc.flows
                .iter()
                .find(|f| f.id == id)
                .map(|f| f.demand_bps)
        };
        match compile(&doc.policies, demand_of) {
            Err(err) => problems.push(format!("policies: {err}")),
            Ok(compiled) => {
                for goal in &compiled.goals {
                    if !doc.flows.iter().any(|f| f.id == goal.subject) {
                        problems.push(format!(
                            "goal {:?}: subject {:?} is not a declared flow",
                            goal.id, goal.subject
                        ));
                    }
                }
            }
        }

        let si = &doc.si;
        if si.enabled {
            let loop_us = SimTime::from_ms(si.loop_period_ms).as_us();
            if !(si.loop_period_ms.is_finite() && si.loop_period_ms > 0.0) || loop_us == 0 {
                problems.push(format!(
                    "si: loop_period_ms must be finite and positive, got {}",
                    si.loop_period_ms
                ));
            } else if sample_us != 0 && !loop_us.is_multiple_of(sample_us) {
                problems.push(format!(
                    "si: loop_period_ms ({}) must be a multiple of sample_period_ms ({})",
                    si.loop_period_ms, doc.sample_period_ms
                ));
            }
            if !(si.dwell_ms.is_finite() && si.dwell_ms > 0.0) {
                problems.push(format!("si: dwell_ms must be finite and positive, got {}", si.dwell_ms));
            }
            if !(si.hysteresis.is_finite() && (0.0..1.0).contains(&si.hysteresis)) {
                problems.push(format!(
                    "si: hysteresis must be in [0, 1), got {}",
                    si.hysteresis
                ));
            }
            if !(si.cooldown_ms.is_finite() && si.cooldown_ms >= 0.0) {
                problems.push(format!(
                    "si: cooldown_ms must be finite and non-negative, got {}",
                    si.cooldown_ms
                ));
            }
            if si.context_window == 0 {
                problems.push("si: context_window must be positive".into());
            }
            for (i, adapter) in si.adapters.iter().enumerate() {
                if si.adapters[..i].iter().any(|a| a.system == adapter.system) {
                    problems.push(format!("si: duplicate adapter for {:?}", adapter.system));
                }
                if adapter.accepts.is_empty() {
                    problems.push(format!("si: adapter for {:?} accepts nothing", adapter.system));
                }
                if !(adapter.actuation_delay_ms.is_finite() && adapter.actuation_delay_ms >= 0.0) {
                    problems.push(format!(
                        "si: adapter for {:?}: actuation_delay_ms must be finite and non-negative",
                        adapter.system
                    ));
                }
                if !(adapter.local_decision_delay_ms.is_finite()
                    && adapter.local_decision_delay_ms >= 0.0)
                {
                    problems.push(format!(
                        "si: adapter for {:?}: local_decision_delay_ms must be finite and non-negative",
                        adapter.system
                    ));
                }
            }
        }

        problems
    }

    /// Split points reported in the metrics: 0, the configured extras and
    /// the optimum, deduplicated and ordered.
    pub(crate) fn report_splits(&self, best_k: usize) -> Vec<usize> {
        let mut ks = BTreeSet::new();
        ks.insert(0);
        if let Some(dnn) = &self.doc.dnn {
            ks.extend(dnn.evaluate_splits.iter().copied());
        }
        ks.insert(best_k);
        ks.into_iter().collect()
    }
}
