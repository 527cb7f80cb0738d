//! System intelligence: a closed control loop that ingests telemetry,
//! assesses it against goals, decides on reconfiguration actions and emits
//! them through per-system adapters.
//!
//! The loop runs at a fixed period. Detection is windowed: a goal only
//! transitions state when its windowed mean leaves a hysteresis band around
//! the target, and never before one dwell window of telemetry exists.
//! Actions respect a per-target cooldown so one persistent violation does
//! not hammer a subsystem with duplicates while the last fix is still
//! taking effect.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::policy::{check, Comparator, Goal, GoalStatus, Metric};
use crate::radio::SliceConfig;
use crate::split::{best_split, DnnProfile, Objective};
use crate::time::SimTime;
use crate::topology::{Flow, FlowClass, NodeKind, Topology};
use crate::transport::{Placement, VnfKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SiError {
    #[error("no strategy registered for situation kind {0:?}")]
    NoStrategy(SituationKind),
    #[error("no adapter registered for target system {0:?}")]
    UnknownTarget(TargetSystem),
    #[error("adapter for {system:?} does not accept {action:?} actions")]
    UnsupportedAction {
        system: TargetSystem,
        action: ActionTag,
    },
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum TelemetryMetric {
    ThroughputBps,
    LatencyMs,
    QueueDelayMs,
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum TargetSystem {
    #[serde(rename = "vRAN")]
    VRan,
    #[serde(rename = "MEC")]
    Mec,
    #[serde(rename = "Core5G")]
    Core5G,
    #[serde(rename = "AiApp")]
    AiApp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Awareness {
    /// Legacy subsystem: receives bare commands.
    Unaware,
    /// Knows the control protocol but delegates all decisions.
    BasicAware,
    /// Runs local logic: receives recommendations and decides itself,
    /// adding its own decision delay.
    AdvancedAware,
}

/// Normalized telemetry: canonical units, tagged with source and entity.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryRecord {
    pub time: SimTime,
    pub source: String,
    pub entity: String,
    pub metric: TelemetryMetric,
    pub value: f64,
}

/// What a telemetry source reports before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSample {
    pub source: String,
    pub entity: String,
    pub value: f64,
}

/// Per-source normalization rule: which metric the source reports and the
/// factor that converts its unit to the canonical one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSchema {
    pub metric: TelemetryMetric,
    pub scale: f64,
}

/// Ring buffers of recent telemetry, keyed by (entity, metric). Keyed with
/// a BTreeMap so iteration order never depends on hashing.
#[derive(Debug, Clone)]
pub struct ContextStore {
    window: usize,
    buffers: BTreeMap<(String, TelemetryMetric), VecDeque<(SimTime, f64)>>,
}

impl ContextStore {
    pub fn new(window: usize) -> Self {
        assert!(window > 0, "context window must hold at least one sample");
        ContextStore {
            window,
            buffers: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, record: &TelemetryRecord) {
        let buf = self
            .buffers
            .entry((record.entity.clone(), record.metric))
            .or_default();
        if let Some(&(last, _)) = buf.back() {
            assert!(record.time >= last, "telemetry pushed out of order");
        }
        if buf.len() == self.window {
            buf.pop_front();
        }
        buf.push_back((record.time, record.value));
    }

    /// Mean of the samples in the half-open window `(now - dwell, now]`.
    /// None when no sample falls inside.
    pub fn windowed_mean(
        &self,
        entity: &str,
        metric: TelemetryMetric,
        now: SimTime,
        dwell: SimTime,
    ) -> Option<f64> {
        let buf = self.buffers.get(&(entity.to_owned(), metric))?;
        let floor = now.saturating_sub(dwell);
        let mut sum = 0.0;
        let mut count = 0u32;
        for &(t, v) in buf.iter().rev() {
            if t > now {
                continue;
            }
            if t <= floor && !(floor == SimTime::ZERO && t == SimTime::ZERO) {
                break;
            }
            sum += v;
            count += 1;
        }
        (count > 0).then(|| sum / count as f64)
    }

    pub fn sample_count(&self, entity: &str, metric: TelemetryMetric) -> usize {
        self.buffers
            .get(&(entity.to_owned(), metric))
            .map_or(0, VecDeque::len)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum SituationKind {
    SlaViolation,
    SlaRestored,
}

/// An assessed condition worth reacting to.
#[derive(Debug, Clone, PartialEq)]
pub struct Situation {
    pub kind: SituationKind,
    pub goal_id: String,
    pub subject: String,
    pub metric: Metric,
    pub observed: f64,
    /// Violation depth relative to the goal value, clamped to [0, 1].
    /// Restorations carry zero.
    pub severity: f64,
    pub detected_at: SimTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionKind {
    CreateSlice {
        slice_id: String,
        reserved_bps: f64,
        members: Vec<String>,
    },
    ReconfigureSlice {
        slice_id: String,
        reserved_bps: f64,
    },
    MigrateVnf {
        vnf: VnfKind,
        target_node: String,
    },
    SetSplit {
        flow: String,
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionTag {
    CreateSlice,
    ReconfigureSlice,
    MigrateVnf,
    SetSplit,
}

impl ActionKind {
    pub fn tag(&self) -> ActionTag {
        match self {
            ActionKind::CreateSlice { .. } => ActionTag::CreateSlice,
            ActionKind::ReconfigureSlice { .. } => ActionTag::ReconfigureSlice,
            ActionKind::MigrateVnf { .. } => ActionTag::MigrateVnf,
            ActionKind::SetSplit { .. } => ActionTag::SetSplit,
        }
    }

    /// Which subsystem executes this action. Slice work goes to the vRAN;
    /// moving the application server is MEC business while core functions
    /// belong to the 5G core orchestrator; split changes go to the
    /// application itself.
    pub fn target(&self) -> TargetSystem {
        match self {
            ActionKind::CreateSlice { .. } | ActionKind::ReconfigureSlice { .. } => {
                TargetSystem::VRan
            }
            ActionKind::MigrateVnf { vnf, .. } => {
                if *vnf == VnfKind::AppServer {
                    TargetSystem::Mec
                } else {
                    TargetSystem::Core5G
                }
            }
            ActionKind::SetSplit { .. } => TargetSystem::AiApp,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub kind: ActionKind,
    pub target: TargetSystem,
    pub issued_at: SimTime,
    /// Provenance, usually the goal id that triggered the decision.
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterDescriptor {
    pub system: TargetSystem,
    pub awareness: Awareness,
    pub actuation_delay: SimTime,
    /// Extra delay an advanced-aware system spends deciding whether to
    /// follow a recommendation. Ignored for the other awareness levels.
    pub local_decision_delay: SimTime,
    pub accepts: Vec<ActionTag>,
}

/// What an adapter hands to its subsystem: either a command (the system
/// must comply) or a recommendation (an advanced-aware system applies its
/// own judgement, modeled as an extra delay before compliance).
#[derive(Debug, Clone, PartialEq)]
pub struct AdapterCommand {
    pub system: TargetSystem,
    pub action: Action,
    pub recommendation: bool,
    pub apply_at: SimTime,
    /// Serialized message in the subsystem's own schema.
    pub payload: String,
}

/// Reusable operator knowledge: model profiles, alternative placements and
/// which action families a situation kind may try, in preference order.
#[derive(Debug, Clone)]
pub struct KnowledgeRegistry {
    pub profiles: BTreeMap<String, DnnProfile>,
    pub candidate_placements: Vec<Placement>,
    pub slice_id_prefix: String,
    /// Reserved rate = goal value times this factor.
    pub overprovision: f64,
    pub strategies: BTreeMap<SituationKind, Vec<ActionTag>>,
}

impl Default for KnowledgeRegistry {
    fn default() -> Self {
        let mut strategies = BTreeMap::new();
        strategies.insert(
            SituationKind::SlaViolation,
            vec![
                ActionTag::CreateSlice,
                ActionTag::ReconfigureSlice,
                ActionTag::MigrateVnf,
                ActionTag::SetSplit,
            ],
        );
        strategies.insert(SituationKind::SlaRestored, Vec::new());
        KnowledgeRegistry {
            profiles: BTreeMap::new(),
            candidate_placements: Vec::new(),
            slice_id_prefix: "si-".into(),
            overprovision: 1.0,
            strategies,
        }
    }
}

/// Read-only snapshot of the running system for the decision step.
#[derive(Debug, Clone, Copy)]
pub struct SystemView<'a> {
    pub topology: &'a Topology,
    pub placement: &'a Placement,
    pub slices: &'a [SliceConfig],
    pub flows: &'a [Flow],
    pub dnn: Option<DnnBinding<'a>>,
}

/// Links a flow to the DNN profile whose split point the loop may adjust.
#[derive(Debug, Clone, Copy)]
pub struct DnnBinding<'a> {
    pub profile_name: &'a str,
    pub flow_id: &'a str,
    pub uplink_bps: f64,
    pub path_one_way_ms: f64,
}

impl SystemView<'_> {
    fn flow_class(&self, id: &str) -> Option<FlowClass> {
        self.flows.iter().find(|f| f.id == id).map(|f| f.class)
    }

    fn node_kind(&self, id: &str) -> Option<NodeKind> {
        self.topology.node(id).map(|n| n.kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopConfig {
    pub period: SimTime,
    pub dwell: SimTime,
    pub hysteresis: f64,
    pub cooldown: SimTime,
    pub context_window: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            period: SimTime::from_ms(100.0),
            dwell: SimTime::from_ms(200.0),
            hysteresis: 0.02,
            cooldown: SimTime::from_ms(1_000.0),
            context_window: 64,
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct StepOutcome {
    pub records: Vec<TelemetryRecord>,
    pub situations: Vec<Situation>,
    pub actions: Vec<Action>,
    pub commands: Vec<AdapterCommand>,
}

pub struct ControlLoop {
    cfg: LoopConfig,
    schemas: BTreeMap<String, SourceSchema>,
    context: ContextStore,
    open: BTreeMap<String, Situation>,
    cooldown_until: BTreeMap<TargetSystem, SimTime>,
    unknown_sources: BTreeMap<String, u64>,
}

impl ControlLoop {
    pub fn new(cfg: LoopConfig) -> Self {
        ControlLoop {
            context: ContextStore::new(cfg.context_window),
            cfg,
            schemas: BTreeMap::new(),
            open: BTreeMap::new(),
            cooldown_until: BTreeMap::new(),
            unknown_sources: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> &LoopConfig {
        &self.cfg
    }

    pub fn register_source(&mut self, name: impl Into<String>, schema: SourceSchema) {
        self.schemas.insert(name.into(), schema);
    }

    /// The built-in sources of the simulated network: the vRAN reports
    /// per-flow downlink throughput in kb/s, the UPF reports one-way packet
    /// latency in ms, the base station reports queueing delay in ms.
    pub fn with_default_sources(cfg: LoopConfig) -> Self {
        let mut lp = Self::new(cfg);
        lp.register_source(
            "vran",
            SourceSchema {
                metric: TelemetryMetric::ThroughputBps,
                scale: 1_000.0,
            },
        );
        lp.register_source(
            "upf",
            SourceSchema {
                metric: TelemetryMetric::LatencyMs,
                scale: 1.0,
            },
        );
        lp.register_source(
            "bs",
            SourceSchema {
                metric: TelemetryMetric::QueueDelayMs,
                scale: 1.0,
            },
        );
        lp
    }

    pub fn context(&self) -> &ContextStore {
        &self.context
    }

    pub fn unknown_source_count(&self, source: &str) -> u64 {
        self.unknown_sources.get(source).copied().unwrap_or(0)
    }

    /// Normalizes raw samples against the schema registry. Samples from
    /// unregistered sources are dropped and counted, not errors: a mixed
    /// deployment keeps running when one exporter is misconfigured.
    pub fn ingest(&mut self, now: SimTime, raw: &[RawSample]) -> Vec<TelemetryRecord> {
        let mut records = Vec::with_capacity(raw.len());
        for sample in raw {
            let Some(schema) = self.schemas.get(&sample.source) else {
                *self.unknown_sources.entry(sample.source.clone()).or_insert(0) += 1;
                tracing::warn!(source = %sample.source, "telemetry from unknown source dropped");
                continue;
            };
            records.push(TelemetryRecord {
                time: now,
                source: sample.source.clone(),
                entity: sample.entity.clone(),
                metric: schema.metric,
                value: sample.value * schema.scale,
            });
        }
        records
    }

    pub fn observe(&mut self, records: &[TelemetryRecord]) {
        for r in records {
            self.context.push(r);
        }
    }

    /// Checks every goal against its windowed mean and reports state
    /// transitions. A violation opens when the margin drops below the
    /// hysteresis band; it closes (SlaRestored) only after the margin rises
    /// above the band. Nothing is assessed before one dwell window has
    /// elapsed since the start of the run.
    pub fn assess(&mut self, goals: &[Goal], now: SimTime) -> Vec<Situation> {
        let mut out = Vec::new();
        if now < self.cfg.dwell {
            return out;
        }
        for goal in goals {
            let metric = match goal.metric {
                Metric::Throughput => TelemetryMetric::ThroughputBps,
                Metric::Latency => TelemetryMetric::LatencyMs,
            };
            let Some(mean) =
                self.context
                    .windowed_mean(&goal.subject, metric, now, self.cfg.dwell)
            else {
                continue;
            };
            let result = check(goal, mean);
            let is_open = self.open.contains_key(&goal.id);
            if result.margin < -self.cfg.hysteresis && !is_open {
                let situation = Situation {
                    kind: SituationKind::SlaViolation,
                    goal_id: goal.id.clone(),
                    subject: goal.subject.clone(),
                    metric: goal.metric,
                    observed: mean,
                    severity: (-result.margin).clamp(0.0, 1.0),
                    detected_at: now,
                };
                self.open.insert(goal.id.clone(), situation.clone());
                out.push(situation);
            } else if result.margin > self.cfg.hysteresis && is_open {
                self.open.remove(&goal.id);
                debug_assert_eq!(result.status, GoalStatus::Satisfied);
                out.push(Situation {
                    kind: SituationKind::SlaRestored,
                    goal_id: goal.id.clone(),
                    subject: goal.subject.clone(),
                    metric: goal.metric,
                    observed: mean,
                    severity: 0.0,
                    detected_at: now,
                });
            }
        }
        out
    }

    /// Maps situations to concrete actions using a fixed rulebook, gated by
    /// the per-target cooldown.
    ///
    /// Rules, in order:
    /// 1. Throughput floor broken on a mission-critical flow: reserve a
    ///    slice at the goal rate (or re-reserve the existing one).
    /// 2. Latency ceiling broken while the application server sits in the
    ///    cloud: migrate the server and the UPF to the edge candidate from
    ///    the registry.
    /// 3. Latency ceiling broken with the server already at the edge, for
    ///    the flow bound to a DNN profile: recompute the best split point.
    ///
    /// A situation kind with no registry entry at all is a configuration
    /// error ([`SiError::NoStrategy`]); a situation no rule matches is
    /// skipped silently (the loop has nothing sensible to do).
    pub fn decide(
        &mut self,
        now: SimTime,
        situations: &[Situation],
        goals: &[Goal],
        registry: &KnowledgeRegistry,
        view: &SystemView<'_>,
    ) -> Result<Vec<Action>, SiError> {
        let mut actions = Vec::new();
        for situation in situations {
            let allowed = registry
                .strategies
                .get(&situation.kind)
                .ok_or(SiError::NoStrategy(situation.kind))?;
            if situation.kind != SituationKind::SlaViolation {
                continue;
            }
            let Some(goal) = goals.iter().find(|g| g.id == situation.goal_id) else {
                continue;
            };
            let mut kinds: Vec<ActionKind> = Vec::new();
            match goal.metric {
                Metric::Throughput if goal.comparator == Comparator::AtLeast => {
                    if view.flow_class(&goal.subject) != Some(FlowClass::MissionCritical) {
                        continue;
                    }
                    let reserved_bps = goal.value * registry.overprovision;
                    let existing = view
                        .slices
                        .iter()
                        .find(|s| s.members.iter().any(|m| m == &goal.subject));
                    match existing {
                        Some(slice) if allowed.contains(&ActionTag::ReconfigureSlice) => {
                            kinds.push(ActionKind::ReconfigureSlice {
                                slice_id: slice.id.clone(),
                                reserved_bps,
                            });
                        }
                        None if allowed.contains(&ActionTag::CreateSlice) => {
                            kinds.push(ActionKind::CreateSlice {
                                slice_id: format!(
                                    "{}{}",
                                    registry.slice_id_prefix, goal.subject
                                ),
                                reserved_bps,
                                members: vec![goal.subject.clone()],
                            });
                        }
                        _ => {}
                    }
                }
                Metric::Latency if goal.comparator == Comparator::AtMost => {
                    let app_node = view.placement.node_of(VnfKind::AppServer);
                    let app_kind = app_node.and_then(|n| view.node_kind(n));
                    if app_kind == Some(NodeKind::CloudServer)
                        && allowed.contains(&ActionTag::MigrateVnf)
                    {
                        let candidate = registry.candidate_placements.iter().find(|p| {
                            p.node_of(VnfKind::AppServer)
                                .and_then(|n| view.node_kind(n))
                                == Some(NodeKind::EdgeServer)
                        });
                        if let Some(candidate) = candidate {
                            for vnf in [VnfKind::AppServer, VnfKind::Upf] {
                                let Some(target_node) = candidate.node_of(vnf) else {
                                    continue;
                                };
                                if view.placement.node_of(vnf) != Some(target_node) {
                                    kinds.push(ActionKind::MigrateVnf {
                                        vnf,
                                        target_node: target_node.to_owned(),
                                    });
                                }
                            }
                        }
                    } else if app_kind == Some(NodeKind::EdgeServer)
                        && allowed.contains(&ActionTag::SetSplit)
                    {
                        let Some(dnn) = view.dnn else { continue };
                        if dnn.flow_id != goal.subject {
                            continue;
                        }
                        let Some(profile) = registry.profiles.get(dnn.profile_name) else {
                            tracing::warn!(
                                profile = dnn.profile_name,
                                "split requested but profile not in registry"
                            );
                            continue;
                        };
                        let best = best_split(
                            profile,
                            dnn.uplink_bps,
                            dnn.path_one_way_ms,
                            Objective::MinLatency,
                        );
                        kinds.push(ActionKind::SetSplit {
                            flow: goal.subject.clone(),
                            k: best.k,
                        });
                    }
                }
                _ => {}
            }
            for kind in kinds {
                let target = kind.target();
                let ready = self
                    .cooldown_until
                    .get(&target)
                    .is_none_or(|&until| now >= until);
                if !ready {
                    tracing::debug!(?target, "action suppressed by cooldown");
                    continue;
                }
                self.cooldown_until.insert(target, now + self.cfg.cooldown);
                actions.push(Action {
                    kind,
                    target,
                    issued_at: now,
                    reason: goal.id.clone(),
                });
            }
        }
        Ok(actions)
    }

    /// One full loop iteration over a fresh batch of telemetry.
    pub fn step_control_loop(
        &mut self,
        now: SimTime,
        raw: &[RawSample],
        goals: &[Goal],
        registry: &KnowledgeRegistry,
        adapters: &[AdapterDescriptor],
        view: &SystemView<'_>,
    ) -> Result<StepOutcome, SiError> {
        let records = self.ingest(now, raw);
        self.observe(&records);
        let situations = self.assess(goals, now);
        let actions = self.decide(now, &situations, goals, registry, view)?;
        let commands = emit(&actions, adapters)?;
        Ok(StepOutcome {
            records,
            situations,
            actions,
            commands,
        })
    }
}

/// Routes actions through their target adapters. Unaware and basic-aware
/// systems get commands applied after the actuation delay; advanced-aware
/// systems get recommendations and add their local decision delay.
pub fn emit(
    actions: &[Action],
    adapters: &[AdapterDescriptor],
) -> Result<Vec<AdapterCommand>, SiError> {
    let mut commands = Vec::with_capacity(actions.len());
    for action in actions {
        let adapter = adapters
            .iter()
            .find(|a| a.system == action.target)
            .ok_or(SiError::UnknownTarget(action.target))?;
        if !adapter.accepts.contains(&action.kind.tag()) {
            return Err(SiError::UnsupportedAction {
                system: adapter.system,
                action: action.kind.tag(),
            });
        }
        let recommendation = adapter.awareness == Awareness::AdvancedAware;
        let mut apply_at = action.issued_at + adapter.actuation_delay;
        if recommendation {
            apply_at += adapter.local_decision_delay;
        }
        commands.push(AdapterCommand {
            system: adapter.system,
            action: action.clone(),
            recommendation,
            apply_at,
            payload: render_payload(action),
        });
    }
    Ok(commands)
}

/// Message body in the target subsystem's schema. Serialization uses
/// sorted-key JSON, so payload bytes are deterministic.
fn render_payload(action: &Action) -> String {
    let body = match &action.kind {
        ActionKind::CreateSlice {
            slice_id,
            reserved_bps,
            members,
        } => serde_json::json!({
            "api": "vran.slice.v1",
            "op": "create",
            "slice": {"id": slice_id, "reserved_bps": reserved_bps, "members": members},
        }),
        ActionKind::ReconfigureSlice {
            slice_id,
            reserved_bps,
        } => serde_json::json!({
            "api": "vran.slice.v1",
            "op": "reconfigure",
            "slice": {"id": slice_id, "reserved_bps": reserved_bps},
        }),
        ActionKind::MigrateVnf { vnf, target_node } => serde_json::json!({
            "api": "nfv.orchestrate.v1",
            "op": "migrate",
            "vnf": vnf,
            "target": target_node,
        }),
        ActionKind::SetSplit { flow, k } => serde_json::json!({
            "api": "app.inference.v1",
            "op": "set-split",
            "flow": flow,
            "k": k,
        }),
    };
    body.to_string()
}

/// One adapter per known subsystem, all command-driven, accepting exactly
/// the action families that subsystem executes.
pub fn default_adapters(actuation_delay: SimTime) -> Vec<AdapterDescriptor> {
    vec![
        AdapterDescriptor {
            system: TargetSystem::VRan,
            awareness: Awareness::BasicAware,
            actuation_delay,
            local_decision_delay: SimTime::ZERO,
            accepts: vec![ActionTag::CreateSlice, ActionTag::ReconfigureSlice],
        },
        AdapterDescriptor {
            system: TargetSystem::Mec,
            awareness: Awareness::BasicAware,
            actuation_delay,
            local_decision_delay: SimTime::ZERO,
            accepts: vec![ActionTag::MigrateVnf],
        },
        AdapterDescriptor {
            system: TargetSystem::Core5G,
            awareness: Awareness::BasicAware,
            actuation_delay,
            local_decision_delay: SimTime::ZERO,
            accepts: vec![ActionTag::MigrateVnf],
        },
        AdapterDescriptor {
            system: TargetSystem::AiApp,
            awareness: Awareness::AdvancedAware,
            actuation_delay,
            local_decision_delay: SimTime::ZERO,
            accepts: vec![ActionTag::SetSplit],
        },
    ]
}
