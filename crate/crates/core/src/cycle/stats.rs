//! Cycle-loop statistics: rate, deadline misses, jitter percentiles.

use std::time::Instant;

const MAX_SAMPLES: usize = 16384;

#[derive(Debug, Clone)]
pub struct CycleStats {
    pub cycles: u64,
    pub sensor_reads: u64,
    pub actuator_writes: u64,
    pub decode_errors: u64,
    pub missed_deadlines: u64,
    pub ownership_rejections: u64,
    pub clamped_positions: u64,
    first_arrival: Option<Instant>,
    last_arrival: Option<Instant>,
    /// Inter-arrival intervals in seconds, ring buffer.
    intervals: Vec<f64>,
    next_slot: usize,
}

impl Default for CycleStats {
    fn default() -> Self {
        CycleStats {
            cycles: 0,
            sensor_reads: 0,
            actuator_writes: 0,
            decode_errors: 0,
            missed_deadlines: 0,
            ownership_rejections: 0,
            clamped_positions: 0,
            first_arrival: None,
            last_arrival: None,
            intervals: Vec::with_capacity(MAX_SAMPLES),
            next_slot: 0,
        }
    }
}

impl CycleStats {
    pub fn record_arrival(&mut self, at: Instant) {
        if self.first_arrival.is_none() {
            self.first_arrival = Some(at);
        }
        if let Some(prev) = self.last_arrival {
            let dt = at.duration_since(prev).as_secs_f64();
            if self.intervals.len() < MAX_SAMPLES {
                self.intervals.push(dt);
            } else {
                self.intervals[self.next_slot] = dt;
                self.next_slot = (self.next_slot + 1) % MAX_SAMPLES;
            }
        }
        self.last_arrival = Some(at);
    }

    /// Mean observed cycle rate over the whole run.
    pub fn mean_rate_hz(&self) -> Option<f64> {
        let (first, last) = (self.first_arrival?, self.last_arrival?);
        if self.cycles < 2 {
            return None;
        }
        let span = last.duration_since(first).as_secs_f64();
        if span <= 0.0 {
            return None;
        }
        Some((self.cycles - 1) as f64 / span)
    }

    /// p-th percentile of |interval − nominal| in milliseconds.
    pub fn jitter_percentile_ms(&self, nominal_period: f64, p: f64) -> Option<f64> {
        if self.intervals.is_empty() {
            return None;
        }
        let mut jitter: Vec<f64> = self
            .intervals
            .iter()
            .map(|dt| (dt - nominal_period).abs() * 1e3)
            .collect();
        jitter.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let idx = ((jitter.len() as f64 - 1.0) * p / 100.0).round() as usize;
        Some(jitter[idx.min(jitter.len() - 1)])
    }

    /// |reads − writes|, which the loop keeps ≤ 1.
    pub fn exchange_imbalance(&self) -> u64 {
        self.sensor_reads.abs_diff(self.actuator_writes)
    }
}
