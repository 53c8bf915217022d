//! Measurement conditioning shared by the strategies: a fixed-length
//! averaging buffer and a go/no-go filter on the variance of recent
//! confidence values.

use thiserror::Error;

use crate::channel::Measurement;
use crate::geodesy::GeoPoint;

pub const DEFAULT_BUFFER_CAPACITY: usize = 8;
pub const DEFAULT_SAMPLE_PERIOD_S: f64 = 0.2;
pub const DEFAULT_QV_WINDOW: usize = 5;
pub const DEFAULT_QV_THRESHOLD: f64 = 0.005;
pub const DEFAULT_QV_ESCALATION: f64 = 2.0;

/// Timestamp tolerance when checking the sampling period.
const PERIOD_EPS_S: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum SamplingError {
    #[error("sample at t={got} arrived before t={min} (previous sample + period)")]
    OutOfOrder { got: f64, min: f64 },
}

/// Collects `capacity` consecutive readings and emits their mean power,
/// stamped with the position of the earlier of the two middle samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    capacity: usize,
    period_s: f64,
    entries: Vec<Measurement>,
    last_t: Option<f64>,
}

impl Default for SampleBuffer {
    fn default() -> Self {
        Self::new(DEFAULT_BUFFER_CAPACITY, DEFAULT_SAMPLE_PERIOD_S)
    }
}

impl SampleBuffer {
    pub fn new(capacity: usize, period_s: f64) -> Self {
        assert!(capacity >= 1, "buffer capacity must be positive");
        Self {
            capacity,
            period_s,
            entries: Vec::with_capacity(capacity),
            last_t: None,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Drops partial contents; timestamp ordering is still enforced.
    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn push(&mut self, m: Measurement) -> Result<Option<(f64, GeoPoint)>, SamplingError> {
        if let Some(last) = self.last_t {
            let min = last + self.period_s;
            if m.t < min - PERIOD_EPS_S {
                return Err(SamplingError::OutOfOrder { got: m.t, min });
            }
        }
        self.last_t = Some(m.t);
        self.entries.push(m);
        if self.entries.len() < self.capacity {
            return Ok(None);
        }
        let avg = self.entries.iter().map(|e| e.rssi_dbm).sum::<f64>() / self.capacity as f64;
        let center = self.entries[(self.capacity - 1) / 2].rx_pos;
        self.entries.clear();
        Ok(Some((avg, center)))
    }
}

/// Quality-variance gate. Before the first acceptance each rejection grows
/// the threshold geometrically; afterwards it is frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct QvFilter {
    pub window: usize,
    pub threshold: f64,
    pub escalation: f64,
    ever_accepted: bool,
    accepted: usize,
    rejected: usize,
}

impl Default for QvFilter {
    fn default() -> Self {
        Self::new(DEFAULT_QV_WINDOW, DEFAULT_QV_THRESHOLD, DEFAULT_QV_ESCALATION)
    }
}

impl QvFilter {
    pub fn new(window: usize, threshold: f64, escalation: f64) -> Self {
        assert!(window >= 2, "variance needs at least two values");
        assert!(threshold > 0.0, "threshold must be positive");
        assert!(escalation > 1.0, "escalation must exceed 1");
        Self {
            window,
            threshold,
            escalation,
            ever_accepted: false,
            accepted: 0,
            rejected: 0,
        }
    }

    pub fn ever_accepted(&self) -> bool {
        self.ever_accepted
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted
    }

    pub fn rejected_count(&self) -> usize {
        self.rejected
    }

    /// Judges the last `window` entries of `recent`. Returns the mean power
    /// of those entries on acceptance.
    pub fn accept(&mut self, recent: &[Measurement]) -> (bool, Option<f64>) {
        assert!(
            recent.len() >= self.window,
            "need {} readings, got {}",
            self.window,
            recent.len()
        );
        let tail = &recent[recent.len() - self.window..];
        let var = sample_variance(tail.iter().map(|m| m.confidence));
        if var <= self.threshold {
            self.ever_accepted = true;
            self.accepted += 1;
            let mean = tail.iter().map(|m| m.rssi_dbm).sum::<f64>() / tail.len() as f64;
            (true, Some(mean))
        } else {
            self.rejected += 1;
            if !self.ever_accepted {
                self.threshold *= self.escalation;
            }
            (false, None)
        }
    }
}

/// Functional form of [`QvFilter::accept`].
pub fn qv_accept(filter: &QvFilter, recent: &[Measurement]) -> (bool, Option<f64>, QvFilter) {
    let mut next = filter.clone();
    let (ok, avg) = next.accept(recent);
    (ok, avg, next)
}

/// Unbiased (n - 1) sample variance.
pub fn sample_variance(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}
