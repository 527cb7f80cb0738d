//! Deterministic discrete-event simulator for a UAV-assisted 5G cell.
//!
//! The crate models a small mission-critical deployment: a UAV and a handful
//! of user terminals attached to one base station, edge and cloud servers
//! behind it, TTI-granular downlink scheduling with optional slice
//! reservations, virtual network function placement, DNN split inference
//! offloading, and a closed control loop that watches telemetry against
//! declared goals and reconfigures the network when they are violated.
//!
//! Layering, bottom up:
//!
//! * [`time`], [`engine`], [`metrics`]: the event core.
//! * [`topology`]: nodes, links, flows.
//! * [`radio`]: max-min fair PRB scheduling and slice reservations.
//! * [`transport`]: VNF placement and shortest-path latency.
//! * [`split`]: DNN split-point evaluation.
//! * [`policy`]: intent grammar, goal compilation and goal checking.
//! * [`si`]: the monitor-assess-decide-emit control loop.
//! * [`scenario`]: JSON scenario documents, the composed world, experiment
//!   drivers and artifact export.

pub mod engine;
pub mod metrics;
pub mod policy;
pub mod radio;
pub mod scenario;
pub mod si;
pub mod split;
pub mod time;
pub mod topology;
pub mod transport;
