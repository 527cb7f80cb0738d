//! Scenario execution: event world construction and the handler that drives
//! it to the horizon.
//!
//! Event layout per simulated millisecond: the TTI event drains the cell,
//! then (on sampling boundaries) throughput is measured and the control
//! loop steps, so a loop decision always sees the interval it just closed.
//! Arrivals are drift-free chains computed as `phase + n * period` rather
//! than accumulated increments.

use rand::Rng;

use crate::engine::Engine;
use crate::policy::Goal;
use crate::radio::{serve_tti, Bearer, Cell, Scheduler, SliceConfig};
use crate::si::{
    default_adapters, ActionKind, AdapterCommand, AdapterDescriptor, ControlLoop, DnnBinding,
    KnowledgeRegistry, LoopConfig, RawSample, Situation, SituationKind, SystemView, TargetSystem,
};
use crate::split::{best_split, evaluate, DnnProfile};
use crate::time::SimTime;
use crate::topology::{Flow, FlowClass, NodeKind, Topology};
use crate::transport::{migrate, path_latency, PathReport, Placement, VnfKind};

use super::report::{assemble, sanitize_field, SiLogRow};
use super::{
    LoadedScenario, RunArtifacts, ScenarioError, M_LATENCY_OW, M_LATENCY_RTT, M_PACKET_DROP,
    M_QUEUE_DELAY, M_RESIDUAL, M_SI_ACTION, M_SPLIT_BEST_K, M_SPLIT_CURRENT_K, M_SPLIT_FPS,
    M_SPLIT_LATENCY, M_THROUGHPUT,
};

enum Ev {
    Tti,
    Arrival { flow: usize, n: u64 },
    Apply(Box<AdapterCommand>),
    PlacementEffective,
}

fn target_label(t: TargetSystem) -> &'static str {
    match t {
        TargetSystem::VRan => "vRAN",
        TargetSystem::Mec => "MEC",
        TargetSystem::Core5G => "Core5G",
        TargetSystem::AiApp => "AiApp",
    }
}

fn action_detail(kind: &ActionKind) -> String {
    match kind {
        ActionKind::CreateSlice {
            slice_id,
            reserved_bps,
            members,
        } => format!(
            "create_slice {slice_id} reserved_bps={reserved_bps} members={}",
            members.join("+")
        ),
        ActionKind::ReconfigureSlice {
            slice_id,
            reserved_bps,
        } => format!("reconfigure_slice {slice_id} reserved_bps={reserved_bps}"),
        ActionKind::MigrateVnf { vnf, target_node } => {
            format!("migrate_vnf {vnf:?} -> {target_node}")
        }
        ActionKind::SetSplit { flow, k } => format!("set_split {flow} k={k}"),
    }
}

#[derive(Default, Clone, Copy)]
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

    fn reset(&mut self) {
        *self = Mean::default();
    }
}

struct DnnState {
    profile: DnnProfile,
    flow: usize,
    uplink_bps: f64,
    current_k: usize,
}

/// What applying an action changed, beyond the log note. A staged placement
/// only becomes live once the migration downtime elapses.
enum Applied {
    Done,
    PlacementStaged,
}

struct World {
    horizon: SimTime,
    cell: Cell,
    sample_every: SimTime,
    loop_every: SimTime,
    topology: Topology,
    flows: Vec<Flow>,
    migration_downtime: SimTime,

    bearers: Vec<Bearer>,
    scheduler: Scheduler,
    slices: Vec<SliceConfig>,

    placement: Placement,
    /// Where migrations have been commanded to land; becomes `placement`
    /// once the downtime elapses.
    placement_staged: Placement,
    paths: Vec<Option<PathReport>>,

    phases_us: Vec<f64>,
    periods_us: Vec<f64>,

    window_bits: Vec<u64>,
    window_delay: Vec<Mean>,
    window_queue: Vec<Mean>,

    si_enabled: bool,
    control: ControlLoop,
    goals: Vec<Goal>,
    registry: KnowledgeRegistry,
    adapters: Vec<AdapterDescriptor>,
    si_log: Vec<SiLogRow>,

    dnn: Option<DnnState>,
}

impl World {
    fn flow_index(&self, id: &str) -> Option<usize> {
        self.flows.iter().position(|f| f.id == id)
    }

    fn recompute_paths(&mut self) {
        self.paths = self
            .flows
            .iter()
            .map(|f| path_latency(&self.topology, &self.placement, f).ok())
            .collect();
    }

    fn make_placement_live(&mut self) {
        self.placement = self.placement_staged.clone();
        self.recompute_paths();
    }

    fn log(&mut self, time: SimTime, kind: &str, subject: &str, detail: String) {
        self.si_log.push(SiLogRow {
            time,
            kind: kind.to_owned(),
            subject: subject.to_owned(),
            detail,
        });
    }

    /// Executes one action against the world state. Returns a log note plus
    /// what else must happen; a failed apply reports a reason and never
    /// aborts the run.
    fn apply_action(&mut self, kind: &ActionKind) -> Result<(String, Applied), String> {
        match kind {
            ActionKind::CreateSlice {
                slice_id,
                reserved_bps,
                members,
            } => {
                if self.slices.iter().any(|s| &s.id == slice_id) {
                    return Err(format!("slice {slice_id} already exists"));
                }
                let total: f64 =
                    self.slices.iter().map(|s| s.reserved_bps).sum::<f64>() + reserved_bps;
                if total > self.cell.capacity_bps() {
                    return Err(format!(
                        "reserving {reserved_bps} b/s would oversubscribe the cell"
                    ));
                }
                for member in members {
                    if self.flow_index(member).is_none() {
                        return Err(format!("unknown member flow {member}"));
                    }
                }
                self.slices.push(SliceConfig {
                    id: slice_id.clone(),
                    reserved_bps: *reserved_bps,
                    members: members.clone(),
                });
                Ok((action_detail(kind), Applied::Done))
            }
            ActionKind::ReconfigureSlice {
                slice_id,
                reserved_bps,
            } => {
                let others: f64 = self
                    .slices
                    .iter()
                    .filter(|s| &s.id != slice_id)
                    .map(|s| s.reserved_bps)
                    .sum();
                if others + reserved_bps > self.cell.capacity_bps() {
                    return Err(format!(
                        "reserving {reserved_bps} b/s would oversubscribe the cell"
                    ));
                }
                let Some(slice) = self.slices.iter_mut().find(|s| &s.id == slice_id) else {
                    return Err(format!("no slice named {slice_id}"));
                };
                slice.reserved_bps = *reserved_bps;
                Ok((action_detail(kind), Applied::Done))
            }
            ActionKind::MigrateVnf { vnf, target_node } => {
                let next = migrate(&self.placement_staged, *vnf, target_node, &self.topology)
                    .map_err(|e| e.to_string())?;
                self.placement_staged = next;
                Ok((action_detail(kind), Applied::PlacementStaged))
            }
            ActionKind::SetSplit { flow, k } => {
                let flow_idx = self.flow_index(flow);
                let Some(dnn) = self.dnn.as_mut() else {
                    return Err("scenario has no dnn section".into());
                };
                if flow_idx != Some(dnn.flow) {
                    return Err(format!("flow {flow} is not the dnn uplink flow"));
                }
                if *k > dnn.profile.layer_count() {
                    return Err(format!(
                        "split {k} exceeds the profile's {} layers",
                        dnn.profile.layer_count()
                    ));
                }
                dnn.current_k = *k;
                Ok((action_detail(kind), Applied::Done))
            }
        }
    }

    fn situation_detail(s: &Situation) -> String {
        let kind = match s.kind {
            SituationKind::SlaViolation => "sla_violation",
            SituationKind::SlaRestored => "sla_restored",
        };
        format!("{kind} observed={} severity={:.3}", s.observed, s.severity)
    }

    /// Closes the sampling window that ends at `now`: throughput rows per
    /// flow, one control-loop step when due, accumulator reset.
    fn sample(&mut self, engine: &mut Engine<Ev>, now: SimTime) -> Result<(), ScenarioError> {
        let secs = self.sample_every.as_secs();
        let mut raws = Vec::with_capacity(3 * self.flows.len());
        for (i, flow) in self.flows.iter().enumerate() {
            let bps = self.window_bits[i] as f64 / secs;
            engine.metrics().record(now, &flow.id, M_THROUGHPUT, bps);
            raws.push(RawSample {
                source: "vran".into(),
                entity: flow.id.clone(),
                value: bps / 1_000.0,
            });
            if let Some(ow) = self.window_delay[i].get() {
                raws.push(RawSample {
                    source: "upf".into(),
                    entity: flow.id.clone(),
                    value: ow,
                });
            }
            if let Some(q) = self.window_queue[i].get() {
                raws.push(RawSample {
                    source: "bs".into(),
                    entity: flow.id.clone(),
                    value: q,
                });
            }
        }
        for i in 0..self.flows.len() {
            self.window_bits[i] = 0;
            self.window_delay[i].reset();
            self.window_queue[i].reset();
        }

        if self.si_enabled && now.as_us().is_multiple_of(self.loop_every.as_us()) {
            let view = SystemView {
                topology: &self.topology,
                placement: &self.placement,
                slices: &self.slices,
                flows: &self.flows,
                dnn: self.dnn.as_ref().map(|d| DnnBinding {
                    profile_name: &d.profile.name,
                    flow_id: &self.flows[d.flow].id,
                    uplink_bps: d.uplink_bps,
                    path_one_way_ms: self.paths[d.flow]
                        .as_ref()
                        .map_or(0.0, PathReport::one_way_ms),
                }),
            };
            let step = self.control.step_control_loop(
                now,
                &raws,
                &self.goals,
                &self.registry,
                &self.adapters,
                &view,
            )?;
            for situation in &step.situations {
                self.si_log.push(SiLogRow {
                    time: now,
                    kind: "situation".into(),
                    subject: situation.goal_id.clone(),
                    detail: Self::situation_detail(situation),
                });
            }
            for action in &step.actions {
                engine
                    .metrics()
                    .record(now, target_label(action.target), M_SI_ACTION, 1.0);
                self.si_log.push(SiLogRow {
                    time: now,
                    kind: "action".into(),
                    subject: target_label(action.target).to_owned(),
                    detail: format!("{} reason={}", action_detail(&action.kind), action.reason),
                });
            }
            for cmd in step.commands {
                self.si_log.push(SiLogRow {
                    time: now,
                    kind: "command".into(),
                    subject: target_label(cmd.system).to_owned(),
                    detail: format!(
                        "{} apply_at={} recommendation={}",
                        action_detail(&cmd.action.kind),
                        cmd.apply_at.ms_string(),
                        cmd.recommendation
                    ),
                });
                engine
                    .schedule(cmd.apply_at, Ev::Apply(Box::new(cmd)))
                    .expect("apply_at is never before the issuing step");
            }
        }
        Ok(())
    }
}

fn handle(engine: &mut Engine<Ev>, world: &mut World, ev: Ev) -> Result<(), ScenarioError> {
    let now = engine.now();
    match ev {
        Ev::Arrival { flow, n } => {
            let bits = world.flows[flow].packet_bits;
            if !world.bearers[flow].push(bits, now) {
                engine
                    .metrics()
                    .record(now, &world.flows[flow].id, M_PACKET_DROP, 1.0);
            }
            let next_us = world.phases_us[flow] + (n + 1) as f64 * world.periods_us[flow];
            engine
                .schedule(SimTime::from_us_f64(next_us), Ev::Arrival { flow, n: n + 1 })
                .expect("arrival chains move forward");
        }
        Ev::Tti => {
            let grants = world
                .scheduler
                .allocate_tti(&world.cell, &world.bearers, &world.slices)?;
            let delivered = serve_tti(&mut world.bearers, &grants, &world.cell);
            for d in delivered {
                let flow_id = &world.flows[d.bearer].id;
                let q_ms = now.saturating_sub(d.enqueued_at).as_us() as f64 / 1_000.0;
                engine.metrics().record(now, flow_id, M_QUEUE_DELAY, q_ms);
                world.window_queue[d.bearer].push(q_ms);
                world.window_bits[d.bearer] += d.bits;
                if let Some(path) = &world.paths[d.bearer] {
                    let ow = q_ms + path.one_way_ms();
                    engine.metrics().record(now, flow_id, M_LATENCY_OW, ow);
                    engine
                        .metrics()
                        .record(now, flow_id, M_LATENCY_RTT, q_ms + path.rtt_ms());
                    world.window_delay[d.bearer].push(ow);
                }
            }
            engine
                .schedule(now + world.cell.tti(), Ev::Tti)
                .expect("next TTI is in the future");
            if now.as_us().is_multiple_of(world.sample_every.as_us()) {
                world.sample(engine, now)?;
            }
        }
        Ev::Apply(cmd) => {
            let subject = target_label(cmd.system).to_owned();
            match world.apply_action(&cmd.action.kind) {
                Ok((note, Applied::Done)) => world.log(now, "apply", &subject, note),
                Ok((note, Applied::PlacementStaged)) => {
                    let effective_at = now + world.migration_downtime;
                    engine
                        .schedule(effective_at, Ev::PlacementEffective)
                        .expect("effective time is never in the past");
                    let note = format!("{note} effective_at={}", effective_at.ms_string());
                    world.log(now, "apply", &subject, note);
                }
                Err(reason) => world.log(now, "apply_error", &subject, sanitize_field(&reason)),
            }
        }
        Ev::PlacementEffective => {
            world.make_placement_live();
            let detail = world
                .placement
                .iter()
                .map(|(vnf, node)| format!("{vnf:?}={node}"))
                .collect::<Vec<_>>()
                .join(" ");
            world.log(now, "placement", "topology", detail);
        }
    }
    Ok(())
}

fn build(loaded: &LoadedScenario) -> Result<(Engine<Ev>, World), ScenarioError> {
    let problems = loaded.validate();
    if !problems.is_empty() {
        return Err(ScenarioError::Invalid(problems));
    }
    let doc = &loaded.doc;
    let compiled = crate::policy::compile(&doc.policies, |id| {
        doc.flows.iter().find(|f| f.id == id).map(|f| f.demand_bps)
    })
    .expect("policies were checked during validation");

    let mut engine: Engine<Ev> = Engine::new(doc.seed);

    let bearers: Vec<Bearer> = doc
        .flows
        .iter()
        .map(|f| Bearer::new(f.id.clone(), f.demand_bps, doc.queue_cap_packets))
        .collect();
    let scheduler = Scheduler::new(bearers.len());

    let mut registry = KnowledgeRegistry::default();
    for node in &doc.topology.nodes {
        if node.kind == NodeKind::EdgeServer {
            let mut p = Placement::new();
            p.assign(VnfKind::Upf, node.id.clone());
            p.assign(VnfKind::AppServer, node.id.clone());
            registry.candidate_placements.push(p);
        }
    }

    let si = &doc.si;
    let control = ControlLoop::with_default_sources(LoopConfig {
        period: SimTime::from_ms(si.loop_period_ms),
        dwell: SimTime::from_ms(si.dwell_ms),
        hysteresis: si.hysteresis,
        cooldown: SimTime::from_ms(si.cooldown_ms),
        context_window: si.context_window,
    });
    let adapters = if si.adapters.is_empty() {
        default_adapters(SimTime::from_ms(DEFAULT_ACTUATION_MS))
    } else {
        si.adapters
            .iter()
            .map(|a| AdapterDescriptor {
                system: a.system,
                awareness: a.awareness,
                actuation_delay: SimTime::from_ms(a.actuation_delay_ms),
                local_decision_delay: SimTime::from_ms(a.local_decision_delay_ms),
                accepts: a.accepts.clone(),
            })
            .collect()
    };

    let mut world = World {
        horizon: SimTime::from_secs(doc.horizon_s),
        cell: doc.cell.clone(),
        sample_every: SimTime::from_ms(doc.sample_period_ms),
        loop_every: SimTime::from_ms(si.loop_period_ms),
        topology: doc.topology.clone(),
        flows: doc.flows.clone(),
        migration_downtime: SimTime::from_ms(doc.migration_downtime_ms),
        bearers,
        scheduler,
        slices: doc.slices.clone(),
        placement: doc.placement.clone(),
        placement_staged: doc.placement.clone(),
        paths: Vec::new(),
        phases_us: Vec::new(),
        periods_us: Vec::new(),
        window_bits: vec![0; doc.flows.len()],
        window_delay: vec![Mean::default(); doc.flows.len()],
        window_queue: vec![Mean::default(); doc.flows.len()],
        si_enabled: si.enabled,
        control,
        goals: compiled.goals,
        registry,
        adapters,
        si_log: Vec::new(),
        dnn: None,
    };
    world.recompute_paths();

    // Imperative policies fire at activation, before any traffic exists.
    // Migrations count as part of the initial deployment, so they skip the
    // downtime. Split changes need the DNN state and run in a second pass.
    let mut setup_error = None;
    let mut apply_setup = |world: &mut World, kind: &ActionKind| match world.apply_action(kind) {
        Ok((note, _)) => world.log(SimTime::ZERO, "imperative", "policy", note),
        Err(reason) => setup_error = Some(reason),
    };
    for kind in &compiled.immediate {
        if !matches!(kind, ActionKind::SetSplit { .. }) {
            apply_setup(&mut world, kind);
        }
    }
    world.make_placement_live();

    if let Some(dnn_doc) = &doc.dnn {
        let flow = world
            .flow_index(&dnn_doc.uplink_flow)
            .expect("checked during validation");
        let profile = loaded.profile.clone().expect("checked during validation");
        let uav_scale = world
            .topology
            .node(&world.flows[flow].src)
            .map_or(1.0, |n| n.compute_scale);
        let srv_scale = world
            .placement
            .node_of(VnfKind::AppServer)
            .and_then(|id| world.topology.node(id))
            .map_or(1.0, |n| n.compute_scale);
        let profile = profile.scaled(1.0 / uav_scale, 1.0 / srv_scale);
        let uplink_bps = doc
            .uplink_cell
            .as_ref()
            .unwrap_or(&doc.cell)
            .capacity_bps();
        let path_ms = world.paths[flow]
            .as_ref()
            .map_or(0.0, PathReport::one_way_ms);
        let best = best_split(&profile, uplink_bps, path_ms, dnn_doc.objective);
        for k in loaded.report_splits(best.k) {
            let ev = evaluate(&profile, k, uplink_bps, path_ms)
                .expect("split points were checked during validation");
            let entity = format!("k={k}");
            engine
                .metrics()
                .record(SimTime::ZERO, &entity, M_SPLIT_LATENCY, ev.latency_ms);
            engine
                .metrics()
                .record(SimTime::ZERO, &entity, M_SPLIT_FPS, ev.fps);
        }
        engine
            .metrics()
            .record(SimTime::ZERO, &profile.name, M_SPLIT_BEST_K, best.k as f64);
        world
            .registry
            .profiles
            .insert(profile.name.clone(), profile.clone());
        world.dnn = Some(DnnState {
            profile,
            flow,
            uplink_bps,
            current_k: best.k,
        });
    }

    for kind in &compiled.immediate {
        if matches!(kind, ActionKind::SetSplit { .. }) {
            apply_setup(&mut world, kind);
        }
    }
    if let Some(reason) = setup_error {
        return Err(ScenarioError::Invalid(vec![format!(
            "imperative policy cannot apply: {reason}"
        )]));
    }

    // Mission-critical sources start in phase; best-effort sources get a
    // random phase inside their first period so they do not arrive in
    // lockstep. This is the run's only randomness.
    for (i, flow) in world.flows.iter().enumerate() {
        let period_us = flow.packet_bits as f64 / flow.demand_bps * 1.0e6;
        let phase_us = match flow.class {
            FlowClass::MissionCritical => 0.0,
            FlowClass::BestEffort => engine.rng().random_range(0.0..period_us),
        };
        world.periods_us.push(period_us);
        world.phases_us.push(phase_us);
        engine
            .schedule(SimTime::from_us_f64(phase_us), Ev::Arrival { flow: i, n: 0 })
            .expect("phases are non-negative");
    }
    engine
        .schedule(world.cell.tti(), Ev::Tti)
        .expect("first TTI is in the future");

    Ok((engine, world))
}

const DEFAULT_ACTUATION_MS: f64 = 10.0;

/// Runs a loaded scenario to its horizon and returns the full artifact set.
pub fn run_scenario(loaded: &LoadedScenario) -> Result<RunArtifacts, ScenarioError> {
    let (mut engine, mut world) = build(loaded)?;
    let horizon = world.horizon;
    engine.run_until(horizon, &mut world, handle)?;
    for (i, flow) in world.flows.iter().enumerate() {
        engine
            .metrics()
            .record(horizon, &flow.id, M_RESIDUAL, world.bearers[i].queue_len() as f64);
    }
    if let Some(dnn) = &world.dnn {
        engine.metrics().record(
            horizon,
            &world.flows[dnn.flow].id,
            M_SPLIT_CURRENT_K,
            dnn.current_k as f64,
        );
    }
    let mut samples = engine.into_metrics().into_samples();
    samples.sort_by(|a, b| (a.time, a.entity.as_str()).cmp(&(b.time, b.entity.as_str())));
    Ok(assemble(&loaded.doc, samples, world.si_log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{load_builtin, parse_metrics_csv, summarize};

    fn flow_mean(summary: &serde_json::Value, flow: &str, field: &str) -> f64 {
        summary["flows"][flow][field]
            .as_f64()
            .unwrap_or_else(|| panic!("missing {flow}.{field}: {summary:#}"))
    }

    #[test]
    fn fair_sharing_splits_the_cell_evenly() {
        let mut loaded = load_builtin("slicing_fair").unwrap();
        loaded.doc.horizon_s = 2.0;
        let artifacts = run_scenario(&loaded).unwrap();
        let uav = flow_mean(&artifacts.summary, "uav-1", "mean_throughput_bps");
        assert!((uav - 4.5e6).abs() <= 0.03 * 4.5e6, "uav mean {uav}");
        for ue in ["ue-1", "ue-2", "ue-3"] {
            let got = flow_mean(&artifacts.summary, ue, "mean_throughput_bps");
            assert!((got - 4.5e6).abs() <= 0.03 * 4.5e6, "{ue} mean {got}");
        }
        // Saturated queue: delivered packets waited out most of a full
        // buffer drain at the fair rate.
        let delay = flow_mean(&artifacts.summary, "uav-1", "mean_queue_delay_ms");
        assert!(delay > 40.0, "queue delay {delay}");
        assert!(
            artifacts.summary["flows"]["uav-1"]["dropped_packets"]
                .as_u64()
                .unwrap()
                > 0
        );
    }

    #[test]
    fn reserved_slice_delivers_the_mission_rate() {
        let mut loaded = load_builtin("slicing_sliced").unwrap();
        loaded.doc.horizon_s = 2.0;
        let artifacts = run_scenario(&loaded).unwrap();
        let uav = flow_mean(&artifacts.summary, "uav-1", "mean_throughput_bps");
        assert!(uav >= 12.74e6, "uav mean {uav}");
        let ue_total: f64 = ["ue-1", "ue-2", "ue-3"]
            .iter()
            .map(|ue| flow_mean(&artifacts.summary, ue, "mean_throughput_bps"))
            .sum();
        assert!((ue_total - 5.0e6).abs() <= 0.08 * 5.0e6, "ue total {ue_total}");
    }

    #[test]
    fn runs_are_bit_for_bit_reproducible() {
        let mut loaded = load_builtin("slicing_fair").unwrap();
        loaded.doc.horizon_s = 1.0;
        let a = run_scenario(&loaded).unwrap();
        let b = run_scenario(&loaded).unwrap();
        assert_eq!(a.metrics_csv, b.metrics_csv);
        assert_eq!(a.summary_json, b.summary_json);
        assert_eq!(a.si_log_csv, b.si_log_csv);
    }

    #[test]
    fn summary_recomputes_from_the_csv() {
        let mut loaded = load_builtin("closed_loop").unwrap();
        loaded.doc.horizon_s = 1.0;
        let artifacts = run_scenario(&loaded).unwrap();
        let parsed = parse_metrics_csv(&artifacts.metrics_csv).unwrap();
        let recomputed = summarize(
            &loaded.doc.name,
            loaded.doc.seed,
            loaded.doc.horizon_s,
            &parsed,
        );
        assert_eq!(
            serde_json::to_string(&artifacts.summary).unwrap(),
            serde_json::to_string(&recomputed).unwrap()
        );
    }

    #[test]
    fn closed_loop_creates_one_slice_and_recovers() {
        let mut loaded = load_builtin("closed_loop").unwrap();
        loaded.doc.horizon_s = 2.0;
        let artifacts = run_scenario(&loaded).unwrap();
        assert_eq!(artifacts.summary["si_actions"]["vRAN"], 1);
        assert!(
            artifacts
                .si_log_csv
                .contains("200.000,action,vRAN,create_slice si-uav-1"),
            "{}",
            artifacts.si_log_csv
        );
        assert!(
            artifacts
                .si_log_csv
                .contains("210.000,apply,vRAN,create_slice si-uav-1"),
            "{}",
            artifacts.si_log_csv
        );
        // Post-recovery windows carry the guaranteed rate.
        let samples = parse_metrics_csv(&artifacts.metrics_csv).unwrap();
        let late: Vec<f64> = samples
            .iter()
            .filter(|s| {
                s.metric == M_THROUGHPUT
                    && s.entity == "uav-1"
                    && s.time >= SimTime::from_ms(400.0)
            })
            .map(|s| s.value)
            .collect();
        assert!(!late.is_empty());
        let mean = late.iter().sum::<f64>() / late.len() as f64;
        assert!(mean >= 12.74e6, "post-recovery mean {mean}");
    }

    #[test]
    fn split_scenarios_report_the_frozen_landscape() {
        let artifacts = run_scenario(&load_builtin("split_edge").unwrap()).unwrap();
        let split = &artifacts.summary["split"];
        assert_eq!(split["best_k"], 10);
        assert_eq!(split["profile"], "ssd-vgg16-synthetic");
        let points = split["points"].as_array().unwrap();
        let ks: Vec<u64> = points.iter().map(|p| p["k"].as_u64().unwrap()).collect();
        assert_eq!(ks, [0, 3, 6, 10]);
        let latency_of = |k: u64| {
            points
                .iter()
                .find(|p| p["k"] == k)
                .and_then(|p| p["latency_ms"].as_f64())
                .unwrap()
        };
        assert!((latency_of(0) - 141.294).abs() < 1e-3, "{}", latency_of(0));
        assert!((latency_of(10) - 133.3206).abs() < 1e-3, "{}", latency_of(10));

        let cloud = run_scenario(&load_builtin("split_cloud").unwrap()).unwrap();
        assert_eq!(cloud.summary["split"]["best_k"], 10);
        let cloud_points = cloud.summary["split"]["points"].as_array().unwrap();
        let cloud_l0 = cloud_points[0]["latency_ms"].as_f64().unwrap();
        assert!((cloud_l0 - 241.294).abs() < 1e-3, "{cloud_l0}");
    }

    #[test]
    fn imperative_migration_applies_at_setup() {
        let mut loaded = load_builtin("placement_cloud_fair").unwrap();
        loaded.doc.horizon_s = 1.0;
        loaded.doc.migration_downtime_ms = 300.0;
        loaded.doc.policies.push(crate::policy::Policy::Imperative {
            action: ActionKind::MigrateVnf {
                vnf: VnfKind::AppServer,
                target_node: "edge-1".into(),
            },
        });
        // Setup migrations skip the downtime, so the whole run sees the
        // edge path: RTT = queueing + 2 x 5 ms.
        let artifacts = run_scenario(&loaded).unwrap();
        assert!(artifacts
            .si_log_csv
            .contains("0.000,imperative,policy,migrate_vnf AppServer -> edge-1"));
        let rtt = flow_mean(&artifacts.summary, "uav-1", "mean_latency_rtt_ms");
        let q = flow_mean(&artifacts.summary, "uav-1", "mean_queue_delay_ms");
        assert!((rtt - q - 10.0).abs() < 1e-9, "rtt {rtt} queue {q}");
    }
}
