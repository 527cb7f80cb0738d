//! TTI-granular downlink MAC: max-min fair PRB scheduling with optional
//! slice reservations and per-bearer tail-drop FIFO queues.
//!
//! Model, per TTI: slice reservations are granted first in declaration
//! order, capped by member backlog; the rest of the grid forms a shared
//! pool split max-min fairly by demand among backlogged bearers. Fractional
//! fair shares accumulate in per-bearer credit counters so integer PRB
//! grants average out to the fair rates over a few TTIs. Unused reservation
//! and pool PRBs go to whoever is still backlogged (work conservation).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadioError {
    #[error("slice reservations total {reserved_bps} b/s, cell capacity is {capacity_bps} b/s")]
    OverSubscribedSlices { reserved_bps: f64, capacity_bps: f64 },
}

/// Downlink cell parameters. The default is a 5 MHz grid: 25 PRBs per 1 ms
/// TTI at 720 bits each, 18 Mb/s total.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cell {
    pub bandwidth_hz: f64,
    pub prb_count: u32,
    pub tti_ms: f64,
    pub bits_per_prb_per_tti: u64,
}

impl Default for Cell {
    fn default() -> Self {
        Cell {
            bandwidth_hz: 5.0e6,
            prb_count: 25,
            tti_ms: 1.0,
            bits_per_prb_per_tti: 720,
        }
    }
}

impl Cell {
    pub fn tti(&self) -> SimTime {
        SimTime::from_ms(self.tti_ms)
    }

    pub fn capacity_bps(&self) -> f64 {
        self.prb_count as f64 * self.bits_per_prb_per_tti as f64 * 1_000.0 / self.tti_ms
    }

    fn tti_secs(&self) -> f64 {
        self.tti_ms / 1_000.0
    }

    /// Fractional PRBs per TTI equivalent to a bit rate.
    fn prbs_equiv(&self, bps: f64) -> f64 {
        bps * self.tti_secs() / self.bits_per_prb_per_tti as f64
    }
}

/// A slice reserves `reserved_bps` of the cell for its member flows.
/// Unused reservation is returned to the shared pool every TTI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceConfig {
    pub id: String,
    pub reserved_bps: f64,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    bits: u64,
    enqueued_at: SimTime,
}

/// Per-flow downlink queue at the base station. Fixed capacity, tail drop.
#[derive(Debug, Clone)]
pub struct Bearer {
    pub flow_id: String,
    pub demand_bps: f64,
    queue: VecDeque<Packet>,
    cap_packets: usize,
    /// Bits of the head packet already transmitted in earlier TTIs.
    head_served_bits: u64,
    pub dropped_packets: u64,
}

impl Bearer {
    pub fn new(flow_id: impl Into<String>, demand_bps: f64, cap_packets: usize) -> Self {
        Bearer {
            flow_id: flow_id.into(),
            demand_bps,
            queue: VecDeque::new(),
            cap_packets,
            head_served_bits: 0,
            dropped_packets: 0,
        }
    }

    /// Enqueues one packet; returns false and counts a drop when the queue
    /// is full.
    pub fn push(&mut self, bits: u64, now: SimTime) -> bool {
        if self.queue.len() >= self.cap_packets {
            self.dropped_packets += 1;
            return false;
        }
        self.queue.push_back(Packet {
            bits,
            enqueued_at: now,
        });
        true
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn backlog_bits(&self) -> u64 {
        let total: u64 = self.queue.iter().map(|p| p.bits).sum();
        total - self.head_served_bits
    }
}

/// One fully delivered packet. Partially transmitted packets stay in the
/// queue and carry their progress in `Bearer::head_served_bits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivered {
    pub bearer: usize,
    pub bits: u64,
    pub enqueued_at: SimTime,
}

/// Max-min fair (water-filling) allocation of `capacity` among `demands`.
/// Returns one allocation per demand, in input order. Allocations never
/// exceed demands and sum to at most the capacity.
pub fn maxmin_fair(capacity: f64, demands: &[f64]) -> Vec<f64> {
    let n = demands.len();
    let mut alloc = vec![0.0; n];
    if n == 0 || capacity <= 0.0 {
        return alloc;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| demands[a].total_cmp(&demands[b]));
    let mut remaining = capacity;
    for (rank, &i) in order.iter().enumerate() {
        let active = (n - rank) as f64;
        let share = remaining / active;
        let d = demands[i].max(0.0);
        if d <= share {
            alloc[i] = d;
            remaining -= d;
        } else {
            // Everyone still unserved has demand above the equal share;
            // they all get exactly the share.
            for &j in &order[rank..] {
                alloc[j] = share;
            }
            break;
        }
    }
    alloc
}

/// Integer ceiling of an f64 PRB count, tolerant of values that sit a few
/// ulps above a whole number after unit conversion.
fn ceil_prbs(x: f64) -> u64 {
    (x - 1e-9).ceil().max(0.0) as u64
}

fn ceil_div(bits: u64, per_prb: u64) -> u64 {
    bits.div_ceil(per_prb)
}

/// The PRB scheduler. Credit counters persist across TTIs so fractional
/// fair shares turn into a fair rotation of whole PRBs.
#[derive(Debug, Clone)]
pub struct Scheduler {
    credits: Vec<f64>,
}

impl Scheduler {
    pub fn new(bearer_count: usize) -> Self {
        Scheduler {
            credits: vec![0.0; bearer_count],
        }
    }

    /// Allocates the TTI's PRB grid. Returns PRBs granted per bearer.
    ///
    /// Fails when the slices together reserve more than the cell carries;
    /// equality is allowed.
    pub fn allocate_tti(
        &mut self,
        cell: &Cell,
        bearers: &[Bearer],
        slices: &[SliceConfig],
    ) -> Result<Vec<u32>, RadioError> {
        assert_eq!(bearers.len(), self.credits.len(), "bearer set changed size");
        let reserved_total: f64 = slices.iter().map(|s| s.reserved_bps).sum();
        let capacity = cell.capacity_bps();
        if reserved_total > capacity {
            return Err(RadioError::OverSubscribedSlices {
                reserved_bps: reserved_total,
                capacity_bps: capacity,
            });
        }

        let n = bearers.len();
        let bpp = cell.bits_per_prb_per_tti;
        let mut grants = vec![0u32; n];
        let mut remaining = cell.prb_count;

        let residual_prbs = |granted: u32, bearer: &Bearer| -> u64 {
            let served = granted as u64 * bpp;
            ceil_div(bearer.backlog_bits().saturating_sub(served), bpp)
        };

        // Reservations first, in slice declaration order, capped by what the
        // members actually have queued.
        for slice in slices {
            let mut need = ceil_prbs(cell.prbs_equiv(slice.reserved_bps)).min(remaining as u64);
            for member in &slice.members {
                if need == 0 || remaining == 0 {
                    break;
                }
                let Some(i) = bearers.iter().position(|b| &b.flow_id == member) else {
                    continue;
                };
                let take = residual_prbs(grants[i], &bearers[i])
                    .min(need)
                    .min(remaining as u64) as u32;
                grants[i] += take;
                remaining -= take;
                need -= take as u64;
            }
        }

        // Shared pool: max-min fair by demand among still-backlogged bearers
        // (slice members included). Only eligible bearers earn credit, so an
        // idle bearer cannot hoard priority.
        let eligible: Vec<usize> = (0..n)
            .filter(|&i| residual_prbs(grants[i], &bearers[i]) > 0)
            .collect();
        if !eligible.is_empty() && remaining > 0 {
            let pool_bps = remaining as f64 * bpp as f64 / cell.tti_secs();
            let pool_demands: Vec<f64> = eligible
                .iter()
                .map(|&i| {
                    let residual_bits =
                        bearers[i].backlog_bits() - grants[i] as u64 * bpp;
                    bearers[i]
                        .demand_bps
                        .min(residual_bits as f64 / cell.tti_secs())
                })
                .collect();
            let fair = maxmin_fair(pool_bps, &pool_demands);
            for (k, &i) in eligible.iter().enumerate() {
                self.credits[i] += cell.prbs_equiv(fair[k]);
            }
            // Grant whole PRBs to the highest-credit backlogged bearer, ties
            // to the lowest index. Credit only orders the grants; every PRB
            // someone can use gets handed out.
            while remaining > 0 {
                let mut best: Option<usize> = None;
                for &i in &eligible {
                    if residual_prbs(grants[i], &bearers[i]) == 0 {
                        continue;
                    }
                    match best {
                        Some(b) if self.credits[i] <= self.credits[b] => {}
                        _ => best = Some(i),
                    }
                }
                let Some(i) = best else { break };
                grants[i] += 1;
                self.credits[i] -= 1.0;
                remaining -= 1;
            }
        }

        // Bound the fairness memory so a long imbalance cannot turn into an
        // unbounded burst entitlement later.
        let bound = cell.prb_count as f64;
        for c in &mut self.credits {
            *c = c.clamp(-bound, bound);
        }
        Ok(grants)
    }
}

/// Transmits up to the granted budget from each bearer's queue. Packets
/// split across TTIs; a packet counts as delivered in the TTI its last bit
/// leaves the queue. Budget beyond the backlog is wasted.
pub fn serve_tti(bearers: &mut [Bearer], grants: &[u32], cell: &Cell) -> Vec<Delivered> {
    assert_eq!(bearers.len(), grants.len());
    let mut delivered = Vec::new();
    for (i, bearer) in bearers.iter_mut().enumerate() {
        let mut budget = grants[i] as u64 * cell.bits_per_prb_per_tti;
        while budget > 0 {
            let Some(head) = bearer.queue.front().copied() else {
                break;
            };
            let need = head.bits - bearer.head_served_bits;
            let take = need.min(budget);
            budget -= take;
            if take == need {
                bearer.queue.pop_front();
                bearer.head_served_bits = 0;
                delivered.push(Delivered {
                    bearer: i,
                    bits: head.bits,
                    enqueued_at: head.enqueued_at,
                });
            } else {
                bearer.head_served_bits += take;
            }
        }
    }
    delivered
}
