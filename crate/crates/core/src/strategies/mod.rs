//! Search policies. Every policy consumes one measurement at a time and
//! answers with an optional new waypoint and its current rover estimate.

mod baseline;
mod gradient;
mod nyu_bo;
mod uga_gp;
mod unt_recursive;

pub use baseline::{baseline_step, Baseline};
pub use gradient::{gradient_step, GradientSearch, GradientSearchState};
pub use nyu_bo::{fit_boundary_offset, BoPhase, BoSearch};
pub use uga_gp::{GpPhase, GpSeek};
pub use unt_recursive::{next_quadrant, RecursiveSweep, SweepPhase};

use serde::{Deserialize, Serialize};

use crate::channel::Measurement;
use crate::geodesy::{to_enu, to_geo, EnuPoint, GeoPoint, GeoRect};
use crate::gp::{KernelParams, RadioMapGrid};
use crate::sampling::{
    DEFAULT_BUFFER_CAPACITY, DEFAULT_QV_ESCALATION, DEFAULT_QV_THRESHOLD, DEFAULT_QV_WINDOW,
};
use crate::vehicle::{VehicleState, WaypointCommand};

/// What a strategy hands back to the episode loop after each measurement.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StrategyDecision {
    pub command: Option<WaypointCommand>,
    /// Replaces the current estimate when present.
    pub estimate: Option<GeoPoint>,
    /// Whether the measurement fed the strategy's estimator.
    pub accepted: bool,
}

impl StrategyDecision {
    pub fn used() -> Self {
        Self {
            accepted: true,
            ..Self::default()
        }
    }
}

/// Static knowledge a strategy has about the mission (never the rover).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionContext {
    /// Local frame origin (UAV fence south-west corner, ground level).
    pub origin: GeoPoint,
    pub uav_fence: GeoRect,
    pub rover_fence: GeoRect,
    pub start: GeoPoint,
    pub sample_period_s: f64,
    pub fast_deadline_s: f64,
    pub duration_s: f64,
}

impl MissionContext {
    pub fn enu(&self, p: &GeoPoint) -> EnuPoint {
        to_enu(p, &self.origin)
    }

    pub fn geo(&self, e: &EnuPoint) -> GeoPoint {
        to_geo(e, &self.origin)
    }

    pub fn uav_bounds(&self) -> Bounds {
        Bounds::of(&self.uav_fence, &self.origin)
    }

    pub fn rover_bounds(&self) -> Bounds {
        Bounds::of(&self.rover_fence, &self.origin)
    }

    /// Waypoint at `(x, y)` in the local frame and the given altitude.
    pub fn waypoint(&self, x: f64, y: f64, alt: f64, speed: f64) -> WaypointCommand {
        WaypointCommand::new(self.geo(&EnuPoint::new(x, y, alt - self.origin.alt)), speed)
    }
}

/// Per-tick view of the vehicle handed to strategies.
#[derive(Debug, Clone, Copy)]
pub struct Tick<'a> {
    pub t: f64,
    pub vehicle: &'a VehicleState,
    /// The active waypoint (if any) has been reached.
    pub arrived: bool,
}

pub trait Strategy: Send {
    fn kind(&self) -> StrategyKind;
    fn start(&mut self, ctx: &MissionContext, vehicle: &VehicleState) -> StrategyDecision;
    fn on_measurement(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision;
    fn phase(&self) -> &'static str;
    /// Rover-fence radio map, for GP-based strategies.
    fn radio_map(&self) -> Option<&RadioMapGrid> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Baseline,
    Gradient,
    NyuBo,
    UntRecursive,
    UgaGp,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Baseline,
        StrategyKind::Gradient,
        StrategyKind::NyuBo,
        StrategyKind::UntRecursive,
        StrategyKind::UgaGp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::Gradient => "gradient",
            Self::NyuBo => "nyu_bo",
            Self::UntRecursive => "unt_recursive",
            Self::UgaGp => "uga_gp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn uses_gp(self) -> bool {
        matches!(self, Self::NyuBo | Self::UgaGp)
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineParams {
    pub leg_m: f64,
    pub speed_mps: f64,
    pub altitude_m: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            leg_m: 40.0,
            speed_mps: 10.0,
            altitude_m: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradientParams {
    pub initial_interval_m: f64,
    pub interval_min_m: f64,
    pub interval_max_m: f64,
    pub decay: f64,
    pub momentum_step_m: f64,
    pub boundary_margin_m: f64,
    pub speed_mps: f64,
    pub altitude_m: f64,
}

impl Default for GradientParams {
    fn default() -> Self {
        Self {
            initial_interval_m: 40.0,
            interval_min_m: 5.0,
            interval_max_m: 80.0,
            decay: 0.9,
            momentum_step_m: 5.0,
            boundary_margin_m: 10.0,
            speed_mps: 10.0,
            altitude_m: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NyuBoParams {
    pub altitude_m: f64,
    pub edge_speed_mps: f64,
    /// Edge traversal is abandoned after this many seconds.
    pub edge_deadline_s: f64,
    /// Moving-average width used to locate the per-edge maximum.
    pub edge_smoothing: usize,
    pub optimize_speed_mps: f64,
    /// Raw samples averaged into one GP observation.
    pub obs_samples: usize,
    /// Optimize-phase GP updates before boundary detection is armed.
    pub probe_warmup_updates: usize,
    /// Consecutive on-boundary estimates that trigger the probe.
    pub boundary_updates: usize,
    pub probe_leg_m: f64,
    pub probe_speed_mps: f64,
    /// Path-loss exponent of the range model fitted on the probe leg.
    pub probe_path_loss_exponent: f64,
}

impl Default for NyuBoParams {
    fn default() -> Self {
        Self {
            altitude_m: 20.0,
            edge_speed_mps: 10.0,
            edge_deadline_s: 150.0,
            edge_smoothing: 25,
            optimize_speed_mps: 10.0,
            obs_samples: 20,
            probe_warmup_updates: 30,
            boundary_updates: 3,
            probe_leg_m: 60.0,
            probe_speed_mps: 5.0,
            probe_path_loss_exponent: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UntParams {
    pub altitude_m: f64,
    pub max_depth: usize,
    pub sweep_speed_mps: f64,
    pub transit_speed_mps: f64,
    /// Sweep speed is lowered so each edge yields at least this many averages.
    pub min_averages_per_edge: usize,
}

impl Default for UntParams {
    fn default() -> Self {
        Self {
            altitude_m: 20.0,
            max_depth: 4,
            sweep_speed_mps: 10.0,
            transit_speed_mps: 10.0,
            min_averages_per_edge: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UgaParams {
    pub altitude_m: f64,
    pub speed_mps: f64,
    /// Startup corners are pulled this fraction of the way to the center.
    pub startup_shrink: f64,
    /// Accepted samples averaged into one GP observation.
    pub obs_samples: usize,
    pub circle_radius_m: f64,
    pub circle_points: usize,
    pub converge_radius_m: f64,
    pub converge_count: usize,
}

impl Default for UgaParams {
    fn default() -> Self {
        Self {
            altitude_m: 20.0,
            speed_mps: 5.0,
            startup_shrink: 0.2,
            obs_samples: 10,
            circle_radius_m: 40.0,
            circle_points: 8,
            converge_radius_m: 15.0,
            converge_count: 3,
        }
    }
}

/// Shared GP settings (`gp.*`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GpSettings {
    pub lengthscale_m: f64,
    pub signal_var: f64,
    pub noise_var: f64,
    pub prior_mean_dbm: f64,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub kappa: f64,
}

impl Default for GpSettings {
    fn default() -> Self {
        let k = KernelParams::default();
        Self {
            lengthscale_m: k.lengthscale_m,
            signal_var: k.signal_var,
            noise_var: k.noise_var,
            prior_mean_dbm: k.prior_mean_dbm,
            grid_nx: 30,
            grid_ny: 30,
            kappa: 3.0,
        }
    }
}

impl GpSettings {
    pub fn kernel(&self) -> KernelParams {
        KernelParams {
            lengthscale_m: self.lengthscale_m,
            signal_var: self.signal_var,
            noise_var: self.noise_var,
            prior_mean_dbm: self.prior_mean_dbm,
        }
    }
}

/// Measurement-conditioning settings (`sampling.*`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingParams {
    pub buffer_capacity: usize,
    pub qv_window: usize,
    pub qv_threshold: f64,
    pub qv_escalation: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            qv_window: DEFAULT_QV_WINDOW,
            qv_threshold: DEFAULT_QV_THRESHOLD,
            qv_escalation: DEFAULT_QV_ESCALATION,
        }
    }
}

/// All per-strategy parameter tables.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategyParams {
    pub baseline: BaselineParams,
    pub gradient: GradientParams,
    pub nyu_bo: NyuBoParams,
    pub unt_recursive: UntParams,
    pub uga_gp: UgaParams,
    pub gp: GpSettings,
    pub sampling: SamplingParams,
}

pub fn build(kind: StrategyKind, params: &StrategyParams) -> Box<dyn Strategy> {
    match kind {
        StrategyKind::Baseline => Box::new(Baseline::new(params.baseline)),
        StrategyKind::Gradient => Box::new(GradientSearch::new(params.gradient)),
        StrategyKind::NyuBo => Box::new(BoSearch::new(params.nyu_bo, params.gp)),
        StrategyKind::UntRecursive => {
            Box::new(RecursiveSweep::new(params.unt_recursive, params.sampling))
        }
        StrategyKind::UgaGp => Box::new(GpSeek::new(params.uga_gp, params.gp, params.sampling)),
    }
}

/// Axis-aligned rectangle in the local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Bounds {
    pub fn of(r: &GeoRect, origin: &GeoPoint) -> Self {
        let (lo, hi) = r.to_enu_bounds(origin);
        Self {
            x0: lo.x,
            y0: lo.y,
            x1: hi.x,
            y1: hi.y,
        }
    }

    pub fn clamp(&self, x: f64, y: f64) -> (f64, f64) {
        (x.clamp(self.x0, self.x1), y.clamp(self.y0, self.y1))
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// The four compass headings used by the leg-based searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinal {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Cardinal {
    /// Rotate 90 degrees clockwise.
    pub fn cw(self) -> Self {
        match self {
            Self::North => Self::East,
            Self::East => Self::South,
            Self::South => Self::West,
            Self::West => Self::North,
        }
    }

    pub fn unit(self) -> (f64, f64) {
        match self {
            Self::North => (0.0, 1.0),
            Self::East => (1.0, 0.0),
            Self::South => (0.0, -1.0),
            Self::West => (-1.0, 0.0),
        }
    }
}

/// Averages consecutive readings into one observation located at the mean
/// receiver position.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsAccumulator {
    size: usize,
    sum_rssi: f64,
    sum_x: f64,
    sum_y: f64,
    count: usize,
}

impl ObsAccumulator {
    pub fn new(size: usize) -> Self {
        Self {
            size: size.max(1),
            sum_rssi: 0.0,
            sum_x: 0.0,
            sum_y: 0.0,
            count: 0,
        }
    }

    pub fn push(&mut self, p: EnuPoint, rssi: f64) -> Option<(EnuPoint, f64)> {
        self.sum_rssi += rssi;
        self.sum_x += p.x;
        self.sum_y += p.y;
        self.count += 1;
        if self.count < self.size {
            return None;
        }
        let n = self.count as f64;
        let out = (EnuPoint::flat(self.sum_x / n, self.sum_y / n), self.sum_rssi / n);
        *self = Self::new(self.size);
        Some(out)
    }
}

/// Tracks one straight leg: its endpoints and the readings taken on it.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Leg {
    pub from: EnuPoint,
    pub to: EnuPoint,
    pub sum: f64,
    pub n: usize,
}

impl Leg {
    pub fn new(from: EnuPoint, to: EnuPoint) -> Self {
        Self { from, to, sum: 0.0, n: 0 }
    }

    pub fn add(&mut self, rssi: f64) {
        self.sum += rssi;
        self.n += 1;
    }

    pub fn average(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }

    pub fn midpoint(&self) -> EnuPoint {
        EnuPoint::flat(0.5 * (self.from.x + self.to.x), 0.5 * (self.from.y + self.to.y))
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::geodesy::{to_geo, EnuPoint, GeoRect};

    pub const ORIGIN: GeoPoint = GeoPoint {
        lat: 35.7275,
        lon: -78.696,
        alt: 0.0,
    };

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> GeoRect {
        GeoRect::from_enu_bounds(
            EnuPoint::flat(x0, y0),
            EnuPoint::flat(x1, y1),
            &ORIGIN,
            20.0,
            110.0,
        )
    }

    pub fn ctx() -> MissionContext {
        MissionContext {
            origin: ORIGIN,
            uav_fence: rect(0.0, 0.0, 300.0, 300.0),
            rover_fence: rect(60.0, -60.0, 360.0, 240.0),
            start: to_geo(&EnuPoint::new(0.0, 0.0, 50.0), &ORIGIN),
            sample_period_s: 0.2,
            fast_deadline_s: 180.0,
            duration_s: 600.0,
        }
    }

    pub fn meas(ctx: &MissionContext, t: f64, x: f64, y: f64, rssi: f64) -> Measurement {
        Measurement {
            t,
            rx_pos: ctx.geo(&EnuPoint::new(x, y, 30.0)),
            rssi_dbm: rssi,
            confidence: 0.9,
        }
    }
}
