//! Episode loop, scoring, logging and batch benchmarking.
//!
//! An episode is a fixed-step loop at `dt`: the vehicle advances, a channel
//! sample is drawn every `sample_period_s`, the strategy answers, and one
//! log record is written per sample. The estimates logged at the fast and
//! final deadlines are what gets scored.

mod bench;
mod log;
mod plot;
mod score;

pub use bench::{run_benchmark, BenchmarkReport, EpisodeOutcome, StrategySummary};
pub use log::{fmt_sig9, round_sig9, FlightLog, LogRecord, LOG_HEADER};
pub use plot::{error_series, radio_map_from_log, write_error_csv, write_radio_map_csv, ErrorPoint};
pub use score::{competition_average, median, score_log, snapshot_at, ScoreReport};

use serde_json::{json, Value};
use thiserror::Error;

use crate::channel::{ChannelParams, ChannelProfile, ChannelState};
use crate::geodesy::{contains, to_geo, EnuPoint, GeoPoint, GeoRect};
use crate::strategies::{self, MissionContext, Strategy, StrategyKind, StrategyParams, Tick};
use crate::vehicle::{Vehicle, VehicleError, DEFAULT_ARRIVAL_TOL_M, DEFAULT_DT_S};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {field}: {message}")]
    Config { field: String, message: String },
    #[error("vehicle rejected a command: {0}")]
    Vehicle(#[from] VehicleError),
    #[error("log schema mismatch: expected header `{expected}`, found `{found}`")]
    Schema { expected: String, found: String },
    #[error("log line {line}: bad {field} value `{value}`")]
    Parse {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("log line {0}: time does not increase")]
    Order(usize),
    #[error("incomplete fast snapshot: log ends at t = {0} s")]
    IncompleteFast(f64),
    #[error("incomplete final snapshot: log ends at t = {0} s")]
    IncompleteFinal(f64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Default arena origin (south-west corner of the UAV fence).
pub const DEFAULT_ORIGIN: GeoPoint = GeoPoint {
    lat: 35.7275,
    lon: -78.696,
    alt: 0.0,
};

pub fn default_uav_fence() -> GeoRect {
    GeoRect::from_enu_bounds(
        EnuPoint::flat(0.0, 0.0),
        EnuPoint::flat(300.0, 300.0),
        &DEFAULT_ORIGIN,
        20.0,
        110.0,
    )
}

pub fn default_rover_fence() -> GeoRect {
    GeoRect::from_enu_bounds(
        EnuPoint::flat(60.0, -60.0),
        EnuPoint::flat(360.0, 240.0),
        &DEFAULT_ORIGIN,
        0.0,
        110.0,
    )
}

/// Start: the UAV-fence south-west corner at 50 m.
pub fn default_start() -> GeoPoint {
    to_geo(&EnuPoint::new(0.0, 0.0, 50.0), &DEFAULT_ORIGIN)
}

/// The three hiding spots: near the start, far corner near an edge, and
/// outside the UAV fence but inside the rover fence.
pub fn default_locations() -> [GeoPoint; 3] {
    [(110.0, 50.0), (255.0, 215.0), (335.0, 120.0)]
        .map(|(x, y)| to_geo(&EnuPoint::flat(x, y), &DEFAULT_ORIGIN))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub uav_fence: GeoRect,
    pub rover_fence: GeoRect,
    pub rover_pos: GeoPoint,
    pub start_pos: GeoPoint,
    pub channel: ChannelParams,
    pub strategy: StrategyKind,
    pub params: StrategyParams,
    pub seed: u64,
    pub dt: f64,
    pub duration_s: f64,
    pub fast_deadline_s: f64,
    pub sample_period_s: f64,
}

impl EpisodeConfig {
    /// Default arena with the rover at `rover_pos`.
    pub fn new(strategy: StrategyKind, rover_pos: GeoPoint) -> Self {
        Self {
            uav_fence: default_uav_fence(),
            rover_fence: default_rover_fence(),
            rover_pos,
            start_pos: default_start(),
            channel: ChannelProfile::Emulator.params(),
            strategy,
            params: StrategyParams::default(),
            seed: 0,
            dt: DEFAULT_DT_S,
            duration_s: 600.0,
            fast_deadline_s: 180.0,
            sample_period_s: 0.2,
        }
    }

    pub fn with_profile(mut self, p: ChannelProfile) -> Self {
        self.channel = p.params();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Local frame origin: UAV-fence south-west corner at ground level.
    pub fn origin(&self) -> GeoPoint {
        GeoPoint::new(self.uav_fence.south, self.uav_fence.west, 0.0)
    }

    pub fn mission(&self) -> MissionContext {
        MissionContext {
            origin: self.origin(),
            uav_fence: self.uav_fence,
            rover_fence: self.rover_fence,
            start: self.start_pos,
            sample_period_s: self.sample_period_s,
            fast_deadline_s: self.fast_deadline_s,
            duration_s: self.duration_s,
        }
    }

    fn steps(&self, span: f64) -> Option<u64> {
        let k = span / self.dt;
        let r = k.round();
        ((k - r).abs() < 1e-6 && r >= 1.0).then_some(r as u64)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let e = HarnessError::config;
        if !self.uav_fence.is_valid() {
            return Err(e("uav_fence", "need south < north, west < east, alt_min < alt_max"));
        }
        if !self.rover_fence.is_valid() {
            return Err(e("rover_fence", "need south < north, west < east, alt_min < alt_max"));
        }
        if !self.rover_pos.is_valid() || !contains(&self.rover_fence, &self.rover_pos, false) {
            return Err(e("rover_pos", "must lie inside rover_fence"));
        }
        if !self.start_pos.is_valid() || !contains(&self.uav_fence, &self.start_pos, true) {
            return Err(e("start_pos", "must lie inside uav_fence and its altitude band"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(e("dt", "must be positive"));
        }
        let every = self
            .steps(self.sample_period_s)
            .ok_or_else(|| e("sample_period_s", "must be a positive multiple of dt"))?;
        let total = self
            .steps(self.duration_s)
            .ok_or_else(|| e("duration_s", "must be a positive multiple of dt"))?;
        if total % every != 0 {
            return Err(e("duration_s", "must be a multiple of sample_period_s"));
        }
        let fast = self
            .steps(self.fast_deadline_s)
            .ok_or_else(|| e("fast_deadline_s", "must be a positive multiple of dt"))?;
        if fast % every != 0 {
            return Err(e("fast_deadline_s", "must be a multiple of sample_period_s"));
        }
        if self.fast_deadline_s > self.duration_s {
            return Err(e("fast_deadline_s", "must not exceed duration_s"));
        }
        self.channel
            .validate()
            .map_err(|(f, m)| HarnessError::config(format!("channel.{f}"), m))?;
        let p = &self.params;
        p.gp.kernel()
            .validate()
            .map_err(|(f, m)| HarnessError::config(format!("gp.{f}"), m))?;
        if p.gp.grid_nx < 2 || p.gp.grid_ny < 2 {
            return Err(e("gp.grid_nx", "grid needs at least 2x2 nodes"));
        }
        if !(p.gp.kappa >= 0.0) {
            return Err(e("gp.kappa", "must be >= 0"));
        }
        if p.sampling.buffer_capacity == 0 {
            return Err(e("sampling.buffer_capacity", "must be >= 1"));
        }
        if p.sampling.qv_window < 2 {
            return Err(e("sampling.qv_window", "must be >= 2"));
        }
        if !(p.sampling.qv_threshold > 0.0) {
            return Err(e("sampling.qv_threshold", "must be positive"));
        }
        if !(p.sampling.qv_escalation > 1.0) {
            return Err(e("sampling.qv_escalation", "must exceed 1"));
        }
        Ok(())
    }
}

/// Runs one episode with the configured strategy.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<(ScoreReport, FlightLog), HarnessError> {
    run_episode_with(cfg, strategies::build(cfg.strategy, &cfg.params))
}

/// Runs one episode with a caller-supplied strategy.
pub fn run_episode_with(
    cfg: &EpisodeConfig,
    mut strategy: Box<dyn Strategy>,
) -> Result<(ScoreReport, FlightLog), HarnessError> {
    cfg.validate()?;
    let ctx = cfg.mission();
    let mut vehicle = Vehicle::new(cfg.start_pos, cfg.uav_fence);
    let mut channel = ChannelState::new(cfg.seed);
    let mut estimate: Option<GeoPoint> = None;

    let d = strategy.start(&ctx, &vehicle.state);
    if let Some(c) = d.command {
        vehicle.command(&c)?;
    }
    estimate = d.estimate.or(estimate);

    let every = cfg.steps(cfg.sample_period_s).expect("validated");
    let total = cfg.steps(cfg.duration_s).expect("validated");
    let mut log = FlightLog {
        records: Vec::with_capacity((total / every) as usize),
    };
    for k in 1..=total {
        vehicle.step(cfg.dt);
        let t = k as f64 * cfg.dt;
        vehicle.state.t = t;
        if k % every != 0 {
            continue;
        }
        let s = vehicle.state;
        let m = channel.sample(&cfg.channel, &cfg.rover_pos, &s.pos, s.tilt_deg, t);
        let tick = Tick {
            t,
            vehicle: &s,
            arrived: vehicle.at_waypoint(DEFAULT_ARRIVAL_TOL_M),
        };
        let d = strategy.on_measurement(&m, &tick);
        if let Some(c) = d.command {
            vehicle.command(&c)?;
        }
        estimate = d.estimate.or(estimate);
        let est = estimate.unwrap_or(cfg.start_pos);
        log.records.push(
            LogRecord {
                t,
                lat: s.pos.lat,
                lon: s.pos.lon,
                alt: s.pos.alt,
                tilt_deg: s.tilt_deg,
                rssi_dbm: m.rssi_dbm,
                confidence: m.confidence,
                accepted: d.accepted,
                est_lat: est.lat,
                est_lon: est.lon,
                phase: strategy.phase().to_string(),
            }
            .rounded(),
        );
    }
    let report = replay(&log, cfg)?;
    Ok((report, log))
}

/// Rescores a log; equals the report of the run that produced it.
pub fn replay(log: &FlightLog, cfg: &EpisodeConfig) -> Result<ScoreReport, HarnessError> {
    score_log(log, &cfg.rover_pos, cfg.fast_deadline_s, cfg.duration_s)
}

/// Path, fast/final estimates and the true rover as a GeoJSON collection.
pub fn flight_geojson(log: &FlightLog, report: &ScoreReport, rover: &GeoPoint) -> Value {
    let path: Vec<Value> = log
        .records
        .iter()
        .map(|r| json!([r.lon, r.lat, r.alt]))
        .collect();
    let point = |p: &GeoPoint, role: &str, err: Option<f64>| {
        json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [p.lon, p.lat]},
            "properties": {"role": role, "error_m": err},
        })
    };
    json!({
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": path},
                "properties": {"role": "path", "distance_m": report.distance_flown_m},
            },
            point(&report.fast_estimate, "fast_estimate", Some(report.fast_error_m)),
            point(&report.final_estimate, "final_estimate", Some(report.final_error_m)),
            point(rover, "rover", None),
        ],
    })
}
