//! Two radio maps sharing one GP: a guidance map over the UAV fence drives
//! UCB waypoint selection and an estimate map over the rover fence gives
//! the rover guess. Readings pass a quality-variance gate first.

use super::{
    GpSettings, MissionContext, ObsAccumulator, SamplingParams, Strategy, StrategyDecision,
    StrategyKind, Tick, UgaParams,
};
use crate::channel::Measurement;
use crate::geodesy::EnuPoint;
use crate::gp::{acquire_ucb_index, estimate_peak_index, GpModel, RadioMapGrid};
use crate::sampling::QvFilter;
use crate::vehicle::VehicleState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpPhase {
    /// Hovering at the start until the gate first opens.
    Hover,
    /// Visiting the fixed spread-out waypoints; `next` indexes them.
    Spread { next: usize },
    Optimize,
    Circle { next: usize },
}

pub struct GpSeek {
    params: UgaParams,
    gp: GpSettings,
    ctx: Option<MissionContext>,
    phase: GpPhase,
    qv: QvFilter,
    window: Vec<Measurement>,
    model: GpModel,
    guidance: Option<RadioMapGrid>,
    estimate_grid: Option<RadioMapGrid>,
    acc: ObsAccumulator,
    spread: Vec<EnuPoint>,
    circle: Vec<EnuPoint>,
    history: Vec<EnuPoint>,
    target: Option<EnuPoint>,
    circles_flown: usize,
}

impl GpSeek {
    pub fn new(params: UgaParams, gp: GpSettings, sampling: SamplingParams) -> Self {
        Self {
            params,
            gp,
            ctx: None,
            phase: GpPhase::Hover,
            qv: QvFilter::new(sampling.qv_window, sampling.qv_threshold, sampling.qv_escalation),
            window: Vec::new(),
            model: GpModel::new(gp.kernel()),
            guidance: None,
            estimate_grid: None,
            acc: ObsAccumulator::new(params.obs_samples),
            spread: Vec::new(),
            circle: Vec::new(),
            history: Vec::new(),
            target: None,
            circles_flown: 0,
        }
    }

    pub fn gp_phase(&self) -> GpPhase {
        self.phase
    }

    pub fn qv(&self) -> &QvFilter {
        &self.qv
    }

    pub fn circles_flown(&self) -> usize {
        self.circles_flown
    }

    pub fn model(&self) -> &GpModel {
        &self.model
    }

    fn ctx(&self) -> MissionContext {
        self.ctx.expect("start() not called")
    }

    fn go(&mut self, p: EnuPoint) -> Option<crate::vehicle::WaypointCommand> {
        let ctx = self.ctx();
        self.target = Some(p);
        Some(ctx.waypoint(p.x, p.y, self.params.altitude_m, self.params.speed_mps))
    }

    /// Per-reading gate verdict; readings before the window fills fail.
    fn gate(&mut self, m: &Measurement) -> bool {
        self.window.push(*m);
        let w = self.qv.window;
        if self.window.len() > w {
            self.window.remove(0);
        }
        self.window.len() == w && self.qv.accept(&self.window).0
    }

    fn absorb(&mut self, m: &Measurement) -> Option<EnuPoint> {
        let p = self.ctx().enu(&m.rx_pos);
        let (pos, avg) = self.acc.push(EnuPoint::flat(p.x, p.y), m.rssi_dbm)?;
        self.model.push(pos, avg).ok()?;
        self.guidance.as_mut()?.sync(&self.model);
        let grid = self.estimate_grid.as_mut()?;
        grid.sync(&self.model);
        Some(grid.node_enu(estimate_peak_index(grid)))
    }

    fn converged(&self) -> bool {
        let k = self.params.converge_count.max(1);
        if self.history.len() < k {
            return false;
        }
        let tail = &self.history[self.history.len() - k..];
        tail.iter().enumerate().all(|(i, a)| {
            tail[i + 1..]
                .iter()
                .all(|b| a.horizontal_distance(b) < self.params.converge_radius_m)
        })
    }

    /// Circle waypoints around `c`, counter-clockwise from the one nearest `from`.
    fn circle_around(&self, c: EnuPoint, from: EnuPoint) -> Vec<EnuPoint> {
        let u = self.ctx().uav_bounds();
        let n = self.params.circle_points.max(3);
        let r = self.params.circle_radius_m;
        let pts: Vec<EnuPoint> = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                let (x, y) = u.clamp(c.x + r * a.cos(), c.y + r * a.sin());
                EnuPoint::flat(x, y)
            })
            .collect();
        let mut first = 0;
        for (i, p) in pts.iter().enumerate() {
            if p.horizontal_distance(&from) < pts[first].horizontal_distance(&from) {
                first = i;
            }
        }
        (0..n).map(|i| pts[(first + i) % n]).collect()
    }

    fn ucb_target(&self) -> EnuPoint {
        let grid = self.guidance.as_ref().expect("grids built in start()");
        grid.node_enu(acquire_ucb_index(grid, self.gp.kappa))
    }
}

impl Strategy for GpSeek {
    fn kind(&self) -> StrategyKind {
        StrategyKind::UgaGp
    }

    fn start(&mut self, ctx: &MissionContext, vehicle: &VehicleState) -> StrategyDecision {
        self.ctx = Some(*ctx);
        let g = &self.gp;
        self.guidance = Some(RadioMapGrid::new(ctx.uav_fence, ctx.origin, g.grid_nx, g.grid_ny));
        self.estimate_grid = Some(RadioMapGrid::new(ctx.rover_fence, ctx.origin, g.grid_nx, g.grid_ny));
        let u = ctx.uav_bounds();
        let (cx, cy) = u.center();
        let here = ctx.enu(&vehicle.pos);
        let shrink = self.params.startup_shrink;
        let mut corners = vec![
            EnuPoint::flat(u.x0, u.y0),
            EnuPoint::flat(u.x1, u.y0),
            EnuPoint::flat(u.x1, u.y1),
            EnuPoint::flat(u.x0, u.y1),
        ];
        // drop the corner we start nearest to, then visit the rest in order
        let mut start = 0;
        for (i, c) in corners.iter().enumerate() {
            if c.horizontal_distance(&here) < corners[start].horizontal_distance(&here) {
                start = i;
            }
        }
        corners.rotate_left(start);
        self.spread = corners[1..]
            .iter()
            .map(|c| EnuPoint::flat(c.x + shrink * (cx - c.x), c.y + shrink * (cy - c.y)))
            .collect();
        self.phase = GpPhase::Hover;
        let (hx, hy) = u.clamp(here.x, here.y);
        StrategyDecision {
            command: self.go(EnuPoint::flat(hx, hy)),
            ..StrategyDecision::default()
        }
    }

    fn on_measurement(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision {
        let ctx = self.ctx();
        let accepted = self.gate(m);
        let mut d = StrategyDecision {
            accepted,
            ..StrategyDecision::default()
        };
        let estimate = if accepted { self.absorb(m) } else { None };
        if let Some(e) = estimate {
            d.estimate = Some(ctx.geo(&e));
            if self.phase == GpPhase::Optimize {
                self.history.push(e);
            }
        }
        match self.phase {
            GpPhase::Hover => {
                if self.qv.ever_accepted() {
                    self.phase = GpPhase::Spread { next: 0 };
                    d.command = self.go(self.spread[0]);
                }
            }
            GpPhase::Spread { next } => {
                if tick.arrived {
                    let next = next + 1;
                    if next < self.spread.len() {
                        self.phase = GpPhase::Spread { next };
                        d.command = self.go(self.spread[next]);
                    } else {
                        self.phase = GpPhase::Optimize;
                        d.command = self.go(self.ucb_target());
                    }
                }
            }
            GpPhase::Optimize => {
                if estimate.is_some() && self.converged() {
                    let c = *self.history.last().expect("history non-empty");
                    let here = ctx.enu(&tick.vehicle.pos);
                    self.circle = self.circle_around(c, here);
                    self.circles_flown += 1;
                    self.phase = GpPhase::Circle { next: 0 };
                    d.command = self.go(self.circle[0]);
                } else if tick.arrived {
                    let p = self.ucb_target();
                    if self.target.is_none_or(|t| t.horizontal_distance(&p) >= 1.0) {
                        d.command = self.go(p);
                    }
                }
            }
            GpPhase::Circle { next } => {
                if tick.arrived {
                    let next = next + 1;
                    if next < self.circle.len() {
                        self.phase = GpPhase::Circle { next };
                        d.command = self.go(self.circle[next]);
                    } else {
                        self.history.clear();
                        self.phase = GpPhase::Optimize;
                        d.command = self.go(self.ucb_target());
                    }
                }
            }
        }
        d
    }

    fn phase(&self) -> &'static str {
        match self.phase {
            GpPhase::Hover | GpPhase::Spread { .. } => "startup",
            GpPhase::Optimize => "optimize",
            GpPhase::Circle { .. } => "circle",
        }
    }

    fn radio_map(&self) -> Option<&RadioMapGrid> {
        self.estimate_grid.as_ref()
    }
}
