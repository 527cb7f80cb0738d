//! VNF placement and transport-path latency.
//!
//! Latency model: links are undirected with a fixed one-way delay stored in
//! whole microseconds; the data path of a flow runs radio endpoint -> UPF
//! node -> application server node, each leg along its shortest path. Only
//! placement of the two data-path functions (UPF, application server)
//! changes what a flow experiences; control-plane functions ride along for
//! completeness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::time::SimTime;
use crate::topology::{Flow, NodeKind, Topology};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum VnfKind {
    #[serde(rename = "UPF")]
    Upf,
    #[serde(rename = "AMF")]
    Amf,
    #[serde(rename = "SMF")]
    Smf,
    #[serde(rename = "HSS")]
    Hss,
    #[serde(rename = "PCRF")]
    Pcrf,
    AppServer,
}

impl VnfKind {
    pub fn is_data_path(self) -> bool {
        matches!(self, VnfKind::Upf | VnfKind::AppServer)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("no path between {from:?} and {to:?}")]
    NoPath { from: String, to: String },
    #[error("cannot place {vnf:?} on {node:?}: {reason}")]
    InvalidTarget {
        vnf: VnfKind,
        node: String,
        reason: String,
    },
    #[error("{vnf:?} is not placed anywhere")]
    Unplaced { vnf: VnfKind },
}

/// Which node hosts which function. Serialized as a plain map, e.g.
/// `{"UPF": "edge-1", "AppServer": "edge-1"}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Placement {
    assignments: BTreeMap<VnfKind, String>,
}

impl Placement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, vnf: VnfKind, node: impl Into<String>) {
        self.assignments.insert(vnf, node.into());
    }

    pub fn node_of(&self, vnf: VnfKind) -> Option<&str> {
        self.assignments.get(&vnf).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VnfKind, &str)> {
        self.assignments.iter().map(|(k, v)| (*k, v.as_str()))
    }

    /// Structural checks against a topology: every assigned node must exist
    /// and be a server, and both data-path functions must be assigned.
    pub fn validate(&self, topo: &Topology) -> Vec<String> {
        let mut problems = Vec::new();
        for (vnf, node_id) in self.iter() {
            match topo.node(node_id) {
                None => problems.push(format!("{vnf:?} placed on unknown node {node_id:?}")),
                Some(node)
                    if !matches!(node.kind, NodeKind::EdgeServer | NodeKind::CloudServer) =>
                {
                    problems.push(format!(
                        "{vnf:?} placed on {node_id:?} which is a {:?}, not a server",
                        node.kind
                    ));
                }
                Some(_) => {}
            }
        }
        for vnf in [VnfKind::Upf, VnfKind::AppServer] {
            if self.node_of(vnf).is_none() {
                problems.push(format!("data-path function {vnf:?} is not placed"));
            }
        }
        problems
    }
}

/// Shortest-path result for one flow under one placement. Latency is kept
/// in whole microseconds so comparisons between placements are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub one_way_us: u64,
    pub hops: Vec<String>,
}

impl PathReport {
    pub fn one_way_ms(&self) -> f64 {
        self.one_way_us as f64 / 1_000.0
    }

    pub fn rtt_ms(&self) -> f64 {
        (2 * self.one_way_us) as f64 / 1_000.0
    }
}

/// Dijkstra over the undirected link graph. Returns total latency in
/// microseconds plus the hop list, or None when `to` is unreachable.
/// Ties resolve deterministically (by node index) but any equal-cost path
/// reports the same latency, which is all the callers depend on.
fn shortest_path(topo: &Topology, from: usize, to: usize) -> Option<(u64, Vec<usize>)> {
    let n = topo.nodes.len();
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for link in &topo.links {
        let (Some(a), Some(b)) = (topo.node_index(&link.src), topo.node_index(&link.dst))
        else {
            continue;
        };
        let w = SimTime::from_ms(link.one_way_latency_ms).as_us();
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let mut dist = vec![u64::MAX; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = std::collections::BinaryHeap::new();
    dist[from] = 0;
    heap.push(std::cmp::Reverse((0u64, from)));
    while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == to {
            break;
        }
        for &(v, w) in &adj[u] {
            let cand = d + w;
            if cand < dist[v] {
                dist[v] = cand;
                prev[v] = u;
                heap.push(std::cmp::Reverse((cand, v)));
            }
        }
    }
    if dist[to] == u64::MAX {
        return None;
    }
    let mut hops = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        hops.push(cur);
    }
    hops.reverse();
    Some((dist[to], hops))
}

fn leg(topo: &Topology, from_id: &str, to_id: &str) -> Result<(u64, Vec<usize>), TransportError> {
    let no_path = || TransportError::NoPath {
        from: from_id.to_owned(),
        to: to_id.to_owned(),
    };
    // Unknown endpoints report as unreachable; scenario validation flags
    // them with better context before a run starts.
    let from = topo.node_index(from_id).ok_or_else(no_path)?;
    let to = topo.node_index(to_id).ok_or_else(no_path)?;
    shortest_path(topo, from, to).ok_or_else(no_path)
}

/// Latency of `flow`'s data path under `placement`: radio endpoint to the
/// UPF node, then on to the application server node.
pub fn path_latency(
    topo: &Topology,
    placement: &Placement,
    flow: &Flow,
) -> Result<PathReport, TransportError> {
    let upf = placement
        .node_of(VnfKind::Upf)
        .ok_or(TransportError::Unplaced { vnf: VnfKind::Upf })?;
    let app = placement
        .node_of(VnfKind::AppServer)
        .ok_or(TransportError::Unplaced {
            vnf: VnfKind::AppServer,
        })?;
    let (us1, hops1) = leg(topo, &flow.src, upf)?;
    let (us2, hops2) = leg(topo, upf, app)?;
    let mut hops: Vec<String> = hops1
        .into_iter()
        .map(|i| topo.nodes[i].id.clone())
        .collect();
    hops.extend(hops2.into_iter().skip(1).map(|i| topo.nodes[i].id.clone()));
    Ok(PathReport {
        one_way_us: us1 + us2,
        hops,
    })
}

/// Moves one function to another server node and returns the new placement.
/// The caller decides when the move takes effect (instantly or after a
/// configured downtime); this only checks that the move is legal.
pub fn migrate(
    placement: &Placement,
    vnf: VnfKind,
    target: &str,
    topo: &Topology,
) -> Result<Placement, TransportError> {
    let node = topo.node(target).ok_or_else(|| TransportError::InvalidTarget {
        vnf,
        node: target.to_owned(),
        reason: "no such node".into(),
    })?;
    if !matches!(node.kind, NodeKind::EdgeServer | NodeKind::CloudServer) {
        return Err(TransportError::InvalidTarget {
            vnf,
            node: target.to_owned(),
            reason: format!("{:?} cannot host a VNF", node.kind),
        });
    }
    let mut next = placement.clone();
    next.assign(vnf, target);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{FlowClass, Link, Node};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn node(id: &str, kind: NodeKind) -> Node {
        Node {
            id: id.into(),
            kind,
            compute_scale: 1.0,
        }
    }

    fn link(src: &str, dst: &str, ms: f64) -> Link {
        Link {
            src: src.into(),
            dst: dst.into(),
            one_way_latency_ms: ms,
            capacity_bps: None,
        }
    }

    /// UAV and base station, an edge server 5 ms behind the base station,
    /// a cloud 100 ms behind the edge.
    fn reference_topo() -> Topology {
        Topology {
            nodes: vec![
                node("uav-1", NodeKind::Uav),
                node("bs-1", NodeKind::BaseStation),
                node("edge-1", NodeKind::EdgeServer),
                node("cloud-1", NodeKind::CloudServer),
            ],
            links: vec![
                link("uav-1", "bs-1", 0.0),
                link("bs-1", "edge-1", 5.0),
                link("edge-1", "cloud-1", 100.0),
            ],
        }
    }

    fn flow() -> Flow {
        Flow {
            id: "uav-1".into(),
            src: "uav-1".into(),
            dst: "edge-1".into(),
            demand_bps: 13.0e6,
            class: FlowClass::MissionCritical,
            packet_bits: 12_000,
        }
    }

    fn placed(upf: &str, app: &str) -> Placement {
        let mut p = Placement::new();
        p.assign(VnfKind::Upf, upf);
        p.assign(VnfKind::AppServer, app);
        p
    }

    #[test]
    fn edge_and_cloud_paths_have_known_latencies() {
        let topo = reference_topo();
        let edge = path_latency(&topo, &placed("edge-1", "edge-1"), &flow()).unwrap();
        assert_eq!(edge.one_way_us, 5_000);
        assert_eq!(edge.hops, vec!["uav-1", "bs-1", "edge-1"]);

        let cloud = path_latency(&topo, &placed("cloud-1", "cloud-1"), &flow()).unwrap();
        assert_eq!(cloud.one_way_us, 105_000);
        assert_eq!(cloud.hops, vec!["uav-1", "bs-1", "edge-1", "cloud-1"]);

        // UPF at the edge, server in the cloud: the second leg pays the
        // cloud link.
        let split = path_latency(&topo, &placed("edge-1", "cloud-1"), &flow()).unwrap();
        assert_eq!(split.one_way_us, 105_000);

        let delta_ms = (cloud.one_way_us as i64 - edge.one_way_us as i64) as f64 * 2.0 / 1_000.0;
        assert_eq!(delta_ms, 200.0);
        assert_eq!(cloud.rtt_ms(), 210.0);
    }

    #[test]
    fn migrate_validates_the_target() {
        let topo = reference_topo();
        let p = placed("cloud-1", "cloud-1");
        let moved = migrate(&p, VnfKind::AppServer, "edge-1", &topo).unwrap();
        assert_eq!(moved.node_of(VnfKind::AppServer), Some("edge-1"));
        // Original untouched; the world swaps placements at apply time.
        assert_eq!(p.node_of(VnfKind::AppServer), Some("cloud-1"));

        let err = migrate(&p, VnfKind::AppServer, "bs-1", &topo).unwrap_err();
        assert!(matches!(err, TransportError::InvalidTarget { .. }));
        let err = migrate(&p, VnfKind::Upf, "nowhere", &topo).unwrap_err();
        assert!(matches!(err, TransportError::InvalidTarget { .. }));
    }

    #[test]
    fn missing_functions_and_partitions_are_reported() {
        let topo = reference_topo();
        let mut p = Placement::new();
        p.assign(VnfKind::Upf, "edge-1");
        let err = path_latency(&topo, &p, &flow()).unwrap_err();
        assert_eq!(
            err,
            TransportError::Unplaced {
                vnf: VnfKind::AppServer
            }
        );

        let mut island = reference_topo();
        island.nodes.push(node("far-1", NodeKind::CloudServer));
        let err = path_latency(&island, &placed("edge-1", "far-1"), &flow()).unwrap_err();
        assert!(matches!(err, TransportError::NoPath { .. }));
    }

    #[test]
    fn placement_validation_flags_non_servers() {
        let topo = reference_topo();
        let mut p = placed("edge-1", "uav-1");
        p.assign(VnfKind::Amf, "ghost");
        let problems = p.validate(&topo);
        assert_eq!(problems.len(), 2, "got {problems:?}");
    }

    /// Exhaustive simple-path enumeration as the shortest-path oracle.
    fn brute_force(topo: &Topology, from: usize, to: usize) -> Option<u64> {
        fn dfs(
            adj: &[Vec<(usize, u64)>],
            here: usize,
            to: usize,
            seen: &mut Vec<bool>,
            cost: u64,
            best: &mut Option<u64>,
        ) {
            if here == to {
                *best = Some(best.map_or(cost, |b: u64| b.min(cost)));
                return;
            }
            for &(next, w) in &adj[here] {
                if !seen[next] {
                    seen[next] = true;
                    dfs(adj, next, to, seen, cost + w, best);
                    seen[next] = false;
                }
            }
        }
        let n = topo.nodes.len();
        let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
        for l in &topo.links {
            let a = topo.node_index(&l.src).unwrap();
            let b = topo.node_index(&l.dst).unwrap();
            let w = SimTime::from_ms(l.one_way_latency_ms).as_us();
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut best = None;
        dfs(&adj, from, to, &mut seen, 0, &mut best);
        best
    }

    #[test]
    fn shortest_path_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x907);
        for _case in 0..200 {
            let n = rng.random_range(2..=8);
            let mut topo = Topology {
                nodes: (0..n)
                    .map(|i| node(&format!("n{i}"), NodeKind::Router))
                    .collect(),
                links: Vec::new(),
            };
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.random_bool(0.4) {
                        topo.links.push(link(
                            &format!("n{a}"),
                            &format!("n{b}"),
                            rng.random_range(0.0..50.0),
                        ));
                    }
                }
            }
            let from = rng.random_range(0..n);
            let to = rng.random_range(0..n);
            let got = shortest_path(&topo, from, to);
            let want = brute_force(&topo, from, to);
            match (got, want) {
                (Some((d, hops)), Some(w)) => {
                    assert_eq!(d, w, "case topo {:?}", topo.links.len());
                    assert_eq!(hops.first(), Some(&from));
                    assert_eq!(hops.last(), Some(&to));
                }
                (None, None) => {}
                (got, want) => panic!("dijkstra {got:?} vs oracle {want:?}"),
            }
        }
    }
}
