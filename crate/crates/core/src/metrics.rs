//! Metric collection. A run appends time-stamped samples to a [`MetricSink`];
//! the export layer sorts and serializes them after the run.

use crate::time::SimTime;

/// One observation. `entity` names the thing being measured (a flow, a node,
/// a split point), `metric` the quantity, `value` the reading in the metric's
/// canonical unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: SimTime,
    pub entity: String,
    pub metric: String,
    pub value: f64,
}

/// Append-only sample buffer. Samples must arrive in non-decreasing time
/// order, which holds by construction when all recording happens inside
/// event handlers.
#[derive(Debug, Default, Clone)]
pub struct MetricSink {
    samples: Vec<Sample>,
    last_time: SimTime,
}

impl MetricSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, time: SimTime, entity: &str, metric: &str, value: f64) {
        assert!(
            time >= self.last_time,
            "metric sample at {time:?} recorded after {:?}",
            self.last_time
        );
        self.last_time = time;
        self.samples.push(Sample {
            time,
            entity: entity.to_owned(),
            metric: metric.to_owned(),
            value,
        });
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_in_order() {
        let mut sink = MetricSink::new();
        sink.record(SimTime::from_us(10), "flow-a", "throughput_bps", 1.0e6);
        sink.record(SimTime::from_us(10), "flow-b", "throughput_bps", 2.0e6);
        sink.record(SimTime::from_us(20), "flow-a", "queue_delay_ms", 3.5);
        assert_eq!(sink.len(), 3);
        assert_eq!(sink.samples()[2].metric, "queue_delay_ms");
    }

    #[test]
    #[should_panic(expected = "recorded after")]
    fn rejects_time_regression() {
        let mut sink = MetricSink::new();
        sink.record(SimTime::from_us(10), "x", "m", 0.0);
        sink.record(SimTime::from_us(9), "x", "m", 0.0);
    }
}
