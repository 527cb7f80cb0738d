//! Discrete-event engine: a clock, an event queue and one RNG stream.
//!
//! Determinism contract: events fire in `(fire_at, insertion order)` order,
//! all randomness goes through the engine's seeded generator, and nothing
//! in the hot path iterates a hash map. Two runs with the same seed and the
//! same handler produce identical event sequences and identical RNG draws.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::metrics::MetricSink;
use crate::time::SimTime;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("cannot schedule event at {at:?}; clock is already at {now:?}")]
    SchedulingInPast { at: SimTime, now: SimTime },
}

/// Queue entry. Ordering ignores the payload: earlier `fire_at` first, ties
/// broken by insertion sequence.
struct Scheduled<P> {
    fire_at: SimTime,
    seq: u64,
    payload: P,
}

impl<P> PartialEq for Scheduled<P> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<P> Eq for Scheduled<P> {}

impl<P> PartialOrd for Scheduled<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Scheduled<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq))
    }
}

pub struct Engine<P> {
    clock: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Reverse<Scheduled<P>>>,
    rng: ChaCha8Rng,
    metrics: MetricSink,
    running: bool,
}

impl<P> Engine<P> {
    pub fn new(seed: u64) -> Self {
        Engine {
            clock: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            metrics: MetricSink::new(),
            running: false,
        }
    }

    pub fn now(&self) -> SimTime {
        self.clock
    }

    /// The run's single RNG stream. Handlers must not construct their own
    /// generators, otherwise replays diverge.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn metrics(&mut self) -> &mut MetricSink {
        &mut self.metrics
    }

    pub fn into_metrics(self) -> MetricSink {
        self.metrics
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Scheduling at the current instant is legal; the event fires after the
    /// running handler returns. Scheduling strictly before `now` is a bug in
    /// the caller and is reported, not clamped.
    pub fn schedule(&mut self, fire_at: SimTime, payload: P) -> Result<(), SimError> {
        if fire_at < self.clock {
            return Err(SimError::SchedulingInPast {
                at: fire_at,
                now: self.clock,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(Scheduled {
            fire_at,
            seq,
            payload,
        }));
        Ok(())
    }

    /// Drains events with `fire_at <= horizon` in order, passing each to
    /// `handler`. Afterwards the clock sits exactly at `horizon`; events
    /// beyond the horizon stay queued for a later call. A handler error
    /// aborts the run with the clock left at the failing event's time.
    pub fn run_until<W, E>(
        &mut self,
        horizon: SimTime,
        world: &mut W,
        mut handler: impl FnMut(&mut Engine<P>, &mut W, P) -> Result<(), E>,
    ) -> Result<(), E> {
        assert!(!self.running, "run_until is not reentrant");
        self.running = true;
        let result = loop {
            match self.queue.peek() {
                Some(Reverse(next)) if next.fire_at <= horizon => {}
                _ => break Ok(()),
            }
            let Reverse(event) = self.queue.pop().expect("peeked entry present");
            debug_assert!(event.fire_at >= self.clock);
            self.clock = event.fire_at;
            if let Err(err) = handler(self, world, event.payload) {
                break Err(err);
            }
        };
        self.running = false;
        if result.is_ok() && horizon > self.clock {
            self.clock = horizon;
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    type E = Engine<u32>;

    fn drain(engine: &mut E, horizon: u64) -> Vec<(u64, u32)> {
        let mut trace = Vec::new();
        engine
            .run_until(
                SimTime::from_us(horizon),
                &mut trace,
                |eng, tr: &mut Vec<(u64, u32)>, p| {
                    tr.push((eng.now().as_us(), p));
                    Ok::<(), ()>(())
                },
            )
            .unwrap();
        trace
    }

    #[test]
    fn fires_in_time_then_insertion_order() {
        let mut eng = E::new(DEFAULT_SEED);
        eng.schedule(SimTime::from_us(30), 1).unwrap();
        eng.schedule(SimTime::from_us(10), 2).unwrap();
        eng.schedule(SimTime::from_us(30), 3).unwrap();
        eng.schedule(SimTime::from_us(20), 4).unwrap();
        let trace = drain(&mut eng, 100);
        assert_eq!(trace, vec![(10, 2), (20, 4), (30, 1), (30, 3)]);
    }

    #[test]
    fn schedule_in_past_is_an_error() {
        let mut eng = E::new(DEFAULT_SEED);
        eng.schedule(SimTime::from_us(50), 1).unwrap();
        drain(&mut eng, 100);
        let err = eng.schedule(SimTime::from_us(99), 2).unwrap_err();
        assert_eq!(
            err,
            SimError::SchedulingInPast {
                at: SimTime::from_us(99),
                now: SimTime::from_us(100),
            }
        );
    }

    #[test]
    fn schedule_at_now_fires_after_current_handler() {
        let mut eng = E::new(DEFAULT_SEED);
        eng.schedule(SimTime::from_us(10), 1).unwrap();
        let mut trace: Vec<(u64, u32)> = Vec::new();
        eng.run_until(SimTime::from_us(20), &mut trace, |eng, tr, p| {
            tr.push((eng.now().as_us(), p));
            if p == 1 {
                eng.schedule(eng.now(), 2).unwrap();
            }
            Ok::<(), ()>(())
        })
        .unwrap();
        assert_eq!(trace, vec![(10, 1), (10, 2)]);
    }

    #[test]
    fn clock_lands_on_horizon_and_future_events_stay_queued() {
        let mut eng = E::new(DEFAULT_SEED);
        eng.schedule(SimTime::from_us(5), 1).unwrap();
        eng.schedule(SimTime::from_us(500), 2).unwrap();
        let trace = drain(&mut eng, 100);
        assert_eq!(trace, vec![(5, 1)]);
        assert_eq!(eng.now(), SimTime::from_us(100));
        assert_eq!(eng.pending(), 1);
        let trace = drain(&mut eng, 1_000);
        assert_eq!(trace, vec![(500, 2)]);
        assert_eq!(eng.now(), SimTime::from_us(1_000));
    }

    #[test]
    fn handler_error_stops_the_run() {
        let mut eng = E::new(DEFAULT_SEED);
        eng.schedule(SimTime::from_us(10), 1).unwrap();
        eng.schedule(SimTime::from_us(20), 2).unwrap();
        let result: Result<(), &str> =
            eng.run_until(SimTime::from_us(100), &mut (), |_, _, p| {
                if p == 2 {
                    Err("boom")
                } else {
                    Ok(())
                }
            });
        assert_eq!(result, Err("boom"));
        assert_eq!(eng.now(), SimTime::from_us(20));
    }

    #[test]
    fn same_seed_same_trace_and_draws() {
        let run = || {
            let mut eng = E::new(7);
            for i in 0..50u32 {
                let at = SimTime::from_us(1 + (i as u64 * 37) % 200);
                eng.schedule(at, i).unwrap();
            }
            let mut log: Vec<(u64, u32, u64)> = Vec::new();
            eng.run_until(SimTime::from_us(400), &mut log, |eng, log, p| {
                let draw: u64 = eng.rng().random_range(0..1_000_000);
                log.push((eng.now().as_us(), p, draw));
                if p % 7 == 0 {
                    let jitter: u64 = eng.rng().random_range(0..50);
                    eng.schedule(eng.now() + SimTime::from_us(jitter + 1), p + 1_000)?;
                }
                Ok::<(), SimError>(())
            })
            .unwrap();
            log
        };
        assert_eq!(run(), run());
    }
}
