//! End-to-end behaviour of the intelligence loop, both against synthetic
//! telemetry and inside a full scenario run.

use uavsim_core::policy::{Comparator, Goal, Metric, Policy, Unit};
use uavsim_core::radio::SliceConfig;
use uavsim_core::scenario::{load_builtin, parse_metrics_csv, run_scenario, M_LATENCY_RTT};
use uavsim_core::si::{
    default_adapters, ActionKind, ControlLoop, KnowledgeRegistry, LoopConfig, RawSample,
    SituationKind, SystemView,
};
use uavsim_core::time::SimTime;
use uavsim_core::topology::{Flow, FlowClass, Link, Node, NodeKind, Topology};
use uavsim_core::transport::{Placement, VnfKind};

fn ms(v: f64) -> SimTime {
    SimTime::from_ms(v)
}

fn tiny_world() -> (Topology, Placement, Vec<Flow>) {
    let topology = Topology {
        nodes: vec![
            Node {
                id: "uav-1".into(),
                kind: NodeKind::Uav,
                compute_scale: 1.0,
            },
            Node {
                id: "bs-1".into(),
                kind: NodeKind::BaseStation,
                compute_scale: 1.0,
            },
            Node {
                id: "edge-1".into(),
                kind: NodeKind::EdgeServer,
                compute_scale: 1.0,
            },
        ],
        links: vec![
            Link {
                src: "uav-1".into(),
                dst: "bs-1".into(),
                one_way_latency_ms: 0.0,
                capacity_bps: None,
            },
            Link {
                src: "bs-1".into(),
                dst: "edge-1".into(),
                one_way_latency_ms: 5.0,
                capacity_bps: None,
            },
        ],
    };
    let mut placement = Placement::new();
    placement.assign(VnfKind::Upf, "edge-1");
    placement.assign(VnfKind::AppServer, "edge-1");
    let flows = vec![Flow {
        id: "uav-1".into(),
        src: "uav-1".into(),
        dst: "edge-1".into(),
        demand_bps: 10.0e6,
        class: FlowClass::MissionCritical,
        packet_bits: 12_000,
    }];
    (topology, placement, flows)
}

#[test]
fn control_loop_reacts_then_settles_then_respects_cooldown() {
    let (topology, placement, flows) = tiny_world();
    let goals = vec![Goal::new(
        "uav-1",
        Metric::Throughput,
        Comparator::AtLeast,
        10.0e6,
        Unit::Mbps,
    )];
    let registry = KnowledgeRegistry::default();
    let adapters = default_adapters(ms(10.0));
    let mut slices: Vec<SliceConfig> = Vec::new();
    let mut control = ControlLoop::with_default_sources(LoopConfig::default());

    let feed = |bps: f64| {
        vec![RawSample {
            source: "vran".into(),
            entity: "uav-1".into(),
            value: bps / 1_000.0,
        }]
    };
    let step = |control: &mut ControlLoop, t: f64, bps: f64, slices: &[SliceConfig]| {
        let view = SystemView {
            topology: &topology,
            placement: &placement,
            slices,
            flows: &flows,
            dnn: None,
        };
        control
            .step_control_loop(ms(t), &feed(bps), &goals, &registry, &adapters, &view)
            .unwrap()
    };

    // Starved below the goal: nothing may fire before the dwell elapses.
    let early = step(&mut control, 0.0, 8.0e6, &slices);
    assert!(early.situations.is_empty() && early.actions.is_empty());
    let early = step(&mut control, 100.0, 8.0e6, &slices);
    assert!(early.situations.is_empty());

    let hit = step(&mut control, 200.0, 8.0e6, &slices);
    assert_eq!(hit.situations.len(), 1);
    assert_eq!(hit.situations[0].kind, SituationKind::SlaViolation);
    assert!((hit.situations[0].severity - 0.2).abs() < 1e-9);
    assert_eq!(hit.actions.len(), 1);
    let ActionKind::CreateSlice {
        slice_id,
        reserved_bps,
        members,
    } = &hit.actions[0].kind
    else {
        panic!("expected a slice creation, got {:?}", hit.actions[0].kind);
    };
    assert_eq!(slice_id, "si-uav-1");
    assert_eq!(*reserved_bps, 10.0e6);
    assert_eq!(members, &["uav-1".to_string()]);
    assert_eq!(hit.commands.len(), 1);
    assert_eq!(hit.commands[0].apply_at, ms(210.0));
    // Mirror the actuation so later decisions see the slice.
    slices.push(SliceConfig {
        id: slice_id.clone(),
        reserved_bps: *reserved_bps,
        members: members.clone(),
    });

    // Healthy rate: once the dwell window flushes, the situation closes
    // without any new action.
    let mut restored = 0;
    let mut extra_actions = 0;
    for t in [300.0, 400.0, 500.0, 600.0] {
        let out = step(&mut control, t, 10.5e6, &slices);
        restored += out
            .situations
            .iter()
            .filter(|s| s.kind == SituationKind::SlaRestored)
            .count();
        extra_actions += out.actions.len();
    }
    assert_eq!(restored, 1);
    assert_eq!(extra_actions, 0);

    // Starve again: the violation re-opens inside the cooldown window, so
    // the loop stays quiet rather than stacking reconfigurations.
    let mut reopened = 0;
    let mut cooled_actions = 0;
    for t in [700.0, 800.0, 900.0] {
        let out = step(&mut control, t, 8.0e6, &slices);
        reopened += out
            .situations
            .iter()
            .filter(|s| s.kind == SituationKind::SlaViolation)
            .count();
        cooled_actions += out.actions.len();
    }
    assert_eq!(reopened, 1);
    assert_eq!(cooled_actions, 0);
}

#[test]
fn si_migrates_the_app_server_out_of_the_cloud() {
    let mut loaded = load_builtin("placement_cloud_fair").unwrap();
    loaded.doc.horizon_s = 2.0;
    loaded.doc.migration_downtime_ms = 50.0;
    loaded.doc.si.enabled = true;
    loaded.doc.policies.push(Policy::Intent {
        text: "guarantee flow uav-1 latency at-most 80 ms".into(),
    });
    let artifacts = run_scenario(&loaded).unwrap();

    assert_eq!(artifacts.summary["si_actions"]["MEC"], 1);
    assert!(
        artifacts
            .si_log_csv
            .contains("200.000,action,MEC,migrate_vnf AppServer -> edge-1"),
        "{}",
        artifacts.si_log_csv
    );
    // Ten ms actuation plus fifty ms migration downtime.
    assert!(artifacts
        .si_log_csv
        .contains("210.000,apply,MEC,migrate_vnf AppServer -> edge-1 effective_at=260.000"));
    assert!(artifacts.si_log_csv.contains("260.000,placement,topology,"));
    assert!(artifacts.si_log_csv.contains("sla_restored"));

    // The uav round trip collapses by the backhaul gap once the server
    // runs at the edge.
    let samples = parse_metrics_csv(&artifacts.metrics_csv).unwrap();
    let rtt_mean = |from_ms: f64, to_ms: f64| {
        let vals: Vec<f64> = samples
            .iter()
            .filter(|s| {
                s.metric == M_LATENCY_RTT
                    && s.entity == "uav-1"
                    && s.time >= ms(from_ms)
                    && s.time < ms(to_ms)
            })
            .map(|s| s.value)
            .collect();
        assert!(!vals.is_empty(), "no rtt rows in [{from_ms}, {to_ms})");
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let before = rtt_mean(0.0, 200.0);
    let after = rtt_mean(400.0, 2_000.0);
    assert!(
        after < before - 150.0,
        "rtt before {before} after {after}"
    );
}
