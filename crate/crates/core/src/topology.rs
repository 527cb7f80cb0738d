//! Static scenario substrate: nodes, links and traffic flows.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Uav,
    Ue,
    BaseStation,
    EdgeServer,
    CloudServer,
    Router,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Relative compute speed, 1.0 = the reference hardware a DNN profile
    /// was measured on. Only servers and UAVs meaningfully use this.
    #[serde(default = "default_compute_scale")]
    pub compute_scale: f64,
}

fn default_compute_scale() -> f64 {
    1.0
}

/// Undirected link; latency applies in both directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Link {
    pub src: String,
    pub dst: String,
    pub one_way_latency_ms: f64,
    #[serde(default)]
    pub capacity_bps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowClass {
    MissionCritical,
    BestEffort,
}

/// A unidirectional traffic demand. `src` is the radio endpoint (UAV or UE)
/// whose downlink bearer carries the flow; `dst` is the wired peer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Flow {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub demand_bps: f64,
    pub class: FlowClass,
    #[serde(default = "default_packet_bits")]
    pub packet_bits: u64,
}

fn default_packet_bits() -> u64 {
    12_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

impl Topology {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Collects every structural problem instead of stopping at the first,
    /// so a scenario author sees the full list in one pass.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id.is_empty() {
                problems.push(format!("node #{i} has an empty id"));
            }
            if self.nodes[..i].iter().any(|other| other.id == node.id) {
                problems.push(format!("duplicate node id {:?}", node.id));
            }
            if !(node.compute_scale.is_finite() && node.compute_scale > 0.0) {
                problems.push(format!(
                    "node {:?}: compute_scale must be finite and positive, got {}",
                    node.id, node.compute_scale
                ));
            }
        }
        for (i, link) in self.links.iter().enumerate() {
            for end in [&link.src, &link.dst] {
                if self.node(end).is_none() {
                    problems.push(format!("link #{i} references unknown node {end:?}"));
                }
            }
            if link.src == link.dst {
                problems.push(format!("link #{i} is a self loop on {:?}", link.src));
            }
            if !(link.one_way_latency_ms.is_finite() && link.one_way_latency_ms >= 0.0) {
                problems.push(format!(
                    "link #{i}: one_way_latency_ms must be finite and non-negative, got {}",
                    link.one_way_latency_ms
                ));
            }
            if let Some(cap) = link.capacity_bps {
                if !(cap.is_finite() && cap > 0.0) {
                    problems.push(format!(
                        "link #{i}: capacity_bps must be finite and positive, got {cap}"
                    ));
                }
            }
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str, kind: NodeKind) -> Node {
        Node {
            id: id.into(),
            kind,
            compute_scale: 1.0,
        }
    }

    #[test]
    fn validate_collects_all_problems() {
        let topo = Topology {
            nodes: vec![
                node("a", NodeKind::Uav),
                node("a", NodeKind::BaseStation),
                Node {
                    id: "b".into(),
                    kind: NodeKind::EdgeServer,
                    compute_scale: -1.0,
                },
            ],
            links: vec![
                Link {
                    src: "a".into(),
                    dst: "missing".into(),
                    one_way_latency_ms: 1.0,
                    capacity_bps: None,
                },
                Link {
                    src: "b".into(),
                    dst: "b".into(),
                    one_way_latency_ms: -2.0,
                    capacity_bps: Some(0.0),
                },
            ],
        };
        let problems = topo.validate();
        assert_eq!(problems.len(), 6, "unexpected set: {problems:?}");
    }

    #[test]
    fn flow_packet_bits_defaults_in_json() {
        let flow: Flow = serde_json::from_str(
            r#"{"id":"f","src":"a","dst":"b","demand_bps":1e6,"class":"BestEffort"}"#,
        )
        .unwrap();
        assert_eq!(flow.packet_bits, 12_000);
        assert_eq!(flow.class, FlowClass::BestEffort);
    }
}
