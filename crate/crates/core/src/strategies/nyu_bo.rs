//! Edge traverse, then Bayesian optimization over a GP radio map, with a
//! range-fit probe when the rover appears to sit outside the UAV fence.

use super::{
    Bounds, Cardinal, GpSettings, MissionContext, NyuBoParams, ObsAccumulator, Strategy,
    StrategyDecision, StrategyKind, Tick,
};
use crate::channel::Measurement;
use crate::geodesy::EnuPoint;
use crate::gp::{acquire_ucb_index, estimate_peak_index, GpModel, RadioMapGrid};
use crate::vehicle::VehicleState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoPhase {
    EdgeTraverse,
    Optimize,
    BoundaryProbe,
}

/// Grid search for the outward offset `D` of the transmitter beyond a fence
/// edge. Each sample is `(s, dz, rssi)` with `s` the inward distance from the
/// edge and `dz` the height above the transmitter; the model is
/// `rssi = A - 10 n log10(sqrt((s + D)^2 + dz^2))` with `A` solved in closed
/// form. Returns `(D, A)`, or `None` with fewer than three samples.
pub fn fit_boundary_offset(
    samples: &[(f64, f64, f64)],
    path_loss_exponent: f64,
    d_min: f64,
    d_max: f64,
) -> Option<(f64, f64)> {
    if samples.len() < 3 || d_max < d_min {
        return None;
    }
    let n = samples.len() as f64;
    let steps = ((d_max - d_min) / 0.5).floor() as usize;
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 0..=steps {
        let d = d_min + 0.5 * k as f64;
        let g = |s: f64, dz: f64| 10.0 * path_loss_exponent * ((s + d).hypot(dz).max(1.0)).log10();
        let a = samples.iter().map(|&(s, dz, r)| r + g(s, dz)).sum::<f64>() / n;
        let sse: f64 = samples
            .iter()
            .map(|&(s, dz, r)| (r - a + g(s, dz)).powi(2))
            .sum();
        if best.is_none_or(|(_, _, b)| sse < b) {
            best = Some((d, a, sse));
        }
    }
    best.map(|(d, a, _)| (d, a))
}

#[derive(Debug, Clone, Copy)]
enum EdgeLeg {
    ToStart,
    SouthOut,
    SouthBack,
    West,
}

#[derive(Debug, Clone)]
struct Probe {
    /// Outward direction across the shared edge.
    outward: Cardinal,
    anchor: EnuPoint,
    inner: EnuPoint,
    inbound: bool,
    far_m: f64,
    samples: Vec<(f64, f64, f64)>,
}

pub struct BoSearch {
    params: NyuBoParams,
    gp: GpSettings,
    ctx: Option<MissionContext>,
    phase: BoPhase,
    leg: EdgeLeg,
    south: Vec<Vec<(f64, f64)>>,
    west: Vec<(f64, f64)>,
    model: GpModel,
    guidance: Option<RadioMapGrid>,
    estimate_grid: Option<RadioMapGrid>,
    acc: ObsAccumulator,
    target: Option<EnuPoint>,
    updates: usize,
    on_edge: Option<(Cardinal, usize)>,
    probe: Option<Probe>,
    /// Latest probe fit `(D, A)`.
    pub boundary_fit: Option<(f64, f64)>,
}

impl BoSearch {
    pub fn new(params: NyuBoParams, gp: GpSettings) -> Self {
        Self {
            params,
            gp,
            ctx: None,
            phase: BoPhase::EdgeTraverse,
            leg: EdgeLeg::ToStart,
            south: vec![Vec::new(), Vec::new()],
            west: Vec::new(),
            model: GpModel::new(gp.kernel()),
            guidance: None,
            estimate_grid: None,
            acc: ObsAccumulator::new(params.obs_samples),
            target: None,
            updates: 0,
            on_edge: None,
            probe: None,
            boundary_fit: None,
        }
    }

    pub fn bo_phase(&self) -> BoPhase {
        self.phase
    }

    pub fn model(&self) -> &GpModel {
        &self.model
    }

    fn ctx(&self) -> MissionContext {
        self.ctx.expect("start() not called")
    }

    fn go(&mut self, p: EnuPoint, speed: f64) -> StrategyDecision {
        let ctx = self.ctx();
        self.target = Some(p);
        StrategyDecision {
            command: Some(ctx.waypoint(p.x, p.y, self.params.altitude_m, speed)),
            ..StrategyDecision::used()
        }
    }

    /// Position of the largest moving average (first one on ties).
    fn smoothed_argmax(series: &[(f64, f64)], width: usize) -> Option<(f64, f64)> {
        let w = width.clamp(1, series.len().max(1));
        if series.len() < w {
            return None;
        }
        let mut best: Option<(f64, f64)> = None;
        for win in series.windows(w) {
            let avg = win.iter().map(|s| s.1).sum::<f64>() / w as f64;
            let pos = win[w / 2].0;
            if best.is_none_or(|(_, b)| avg > b) {
                best = Some((pos, avg));
            }
        }
        best
    }

    fn fast_estimate(&self) -> EnuPoint {
        let w = self.params.edge_smoothing;
        let rb = self.ctx().rover_bounds();
        let (cx, cy) = rb.center();
        let mut sx: Option<(f64, f64)> = None;
        for leg in &self.south {
            if let Some(c) = Self::smoothed_argmax(leg, w) {
                if sx.is_none_or(|(_, b)| c.1 > b) {
                    sx = Some(c);
                }
            }
        }
        let x = sx.map_or(cx, |c| c.0);
        let y = Self::smoothed_argmax(&self.west, w).map_or(cy, |c| c.0);
        let (x, y) = rb.clamp(x, y);
        EnuPoint::flat(x, y)
    }

    fn begin_optimize(&mut self) -> StrategyDecision {
        self.phase = BoPhase::Optimize;
        let est = self.fast_estimate();
        let mut d = self.next_ucb(true);
        d.estimate = Some(self.ctx().geo(&est));
        d
    }

    /// UCB waypoint. Once the UAV has arrived, the node it is sitting on is
    /// excluded so repeated readings do not pile up on a single spot.
    fn next_ucb(&mut self, force: bool) -> StrategyDecision {
        let grid = self.guidance.as_ref().expect("grids built in start()");
        let mut p = grid.node_enu(acquire_ucb_index(grid, self.gp.kappa));
        if let Some(t) = self.target.filter(|t| t.horizontal_distance(&p) < 1.0) {
            let (dx, dy) = grid.spacing_m();
            let min_gap = 0.5 * dx.min(dy);
            let kappa = self.gp.kappa;
            let mut best = f64::NEG_INFINITY;
            for (i, c) in grid.cells().iter().enumerate() {
                let q = grid.node_enu(i);
                let s = c.mean_dbm + kappa * c.var_db2.sqrt();
                if q.horizontal_distance(&t) > min_gap && s > best {
                    best = s;
                    p = q;
                }
            }
        }
        let same = self.target.is_some_and(|t| t.horizontal_distance(&p) < 1.0);
        if same && !force {
            return StrategyDecision::used();
        }
        self.go(p, self.params.optimize_speed_mps)
    }

    /// Shared edge the estimate is pinned against, if any.
    fn pinned_edge(&self, est: &EnuPoint) -> Option<Cardinal> {
        let ctx = self.ctx();
        let u = ctx.uav_bounds();
        let r = ctx.rover_bounds();
        let (dx, dy) = self.estimate_grid.as_ref()?.spacing_m();
        let eps = 1e-6;
        if r.x1 > u.x1 + eps && est.x >= u.x1 - dx {
            Some(Cardinal::East)
        } else if r.x0 < u.x0 - eps && est.x <= u.x0 + dx {
            Some(Cardinal::West)
        } else if r.y1 > u.y1 + eps && est.y >= u.y1 - dy {
            Some(Cardinal::North)
        } else if r.y0 < u.y0 - eps && est.y <= u.y0 + dy {
            Some(Cardinal::South)
        } else {
            None
        }
    }

    fn begin_probe(&mut self, outward: Cardinal, est: EnuPoint) -> StrategyDecision {
        let ctx = self.ctx();
        let u = ctx.uav_bounds();
        let r = ctx.rover_bounds();
        let (ux, uy) = outward.unit();
        let (ex, ey) = u.clamp(est.x, est.y);
        let (anchor, far) = match outward {
            Cardinal::East => (EnuPoint::flat(u.x1, ey), r.x1 - u.x1),
            Cardinal::West => (EnuPoint::flat(u.x0, ey), u.x0 - r.x0),
            Cardinal::North => (EnuPoint::flat(ex, u.y1), r.y1 - u.y1),
            Cardinal::South => (EnuPoint::flat(ex, u.y0), u.y0 - r.y0),
        };
        let (ix, iy) = u.clamp(anchor.x - ux * self.params.probe_leg_m, anchor.y - uy * self.params.probe_leg_m);
        self.phase = BoPhase::BoundaryProbe;
        self.probe = Some(Probe {
            outward,
            anchor,
            inner: EnuPoint::flat(ix, iy),
            inbound: false,
            far_m: far,
            samples: Vec::new(),
        });
        self.go(anchor, self.params.probe_speed_mps)
    }

    fn probe_step(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision {
        let ctx = self.ctx();
        let rb = ctx.rover_bounds();
        let leg = self.params.probe_leg_m;
        let n = self.params.probe_path_loss_exponent;
        let probe = self.probe.as_mut().expect("probe phase without probe");
        let p = ctx.enu(&m.rx_pos);
        let (ux, uy) = probe.outward.unit();
        let s = (probe.anchor.x - p.x) * ux + (probe.anchor.y - p.y) * uy;
        probe.samples.push((s, p.z, m.rssi_dbm));
        if !tick.arrived {
            return StrategyDecision::used();
        }
        let fit = fit_boundary_offset(&probe.samples, n, -leg, probe.far_m);
        let estimate = fit.map(|(d, _)| {
            let (x, y) = rb.clamp(probe.anchor.x + ux * d, probe.anchor.y + uy * d);
            ctx.geo(&EnuPoint::flat(x, y))
        });
        probe.inbound = !probe.inbound;
        let next = if probe.inbound { probe.inner } else { probe.anchor };
        self.boundary_fit = fit.or(self.boundary_fit);
        let mut d = self.go(next, self.params.probe_speed_mps);
        d.estimate = estimate;
        d
    }

    fn absorb(&mut self, m: &Measurement) -> Option<EnuPoint> {
        let ctx = self.ctx();
        let p = ctx.enu(&m.rx_pos);
        let (pos, avg) = self.acc.push(EnuPoint::flat(p.x, p.y), m.rssi_dbm)?;
        self.model.push(pos, avg).ok()?;
        self.guidance.as_mut()?.sync(&self.model);
        let grid = self.estimate_grid.as_mut()?;
        grid.sync(&self.model);
        Some(grid.node_enu(estimate_peak_index(grid)))
    }
}

impl Strategy for BoSearch {
    fn kind(&self) -> StrategyKind {
        StrategyKind::NyuBo
    }

    fn start(&mut self, ctx: &MissionContext, vehicle: &VehicleState) -> StrategyDecision {
        self.ctx = Some(*ctx);
        let g = &self.gp;
        self.guidance = Some(RadioMapGrid::new(ctx.uav_fence, ctx.origin, g.grid_nx, g.grid_ny));
        self.estimate_grid = Some(RadioMapGrid::new(ctx.rover_fence, ctx.origin, g.grid_nx, g.grid_ny));
        let u = ctx.uav_bounds();
        let here = ctx.enu(&vehicle.pos);
        let sw = EnuPoint::flat(u.x0, u.y0);
        self.leg = EdgeLeg::ToStart;
        let d = self.go(sw, self.params.edge_speed_mps);
        if here.horizontal_distance(&sw) < 1.0 && (here.z - self.params.altitude_m).abs() < 1.0 {
            self.leg = EdgeLeg::SouthOut;
            return self.go(EnuPoint::flat(u.x1, u.y0), self.params.edge_speed_mps);
        }
        d
    }

    fn on_measurement(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision {
        let ctx = self.ctx();
        let estimate = self.absorb(m);
        match self.phase {
            BoPhase::EdgeTraverse => {
                let p = ctx.enu(&m.rx_pos);
                match self.leg {
                    EdgeLeg::SouthOut => self.south[0].push((p.x, m.rssi_dbm)),
                    EdgeLeg::SouthBack => self.south[1].push((p.x, m.rssi_dbm)),
                    EdgeLeg::West => self.west.push((p.y, m.rssi_dbm)),
                    EdgeLeg::ToStart => {}
                }
                if tick.t > self.params.edge_deadline_s {
                    return self.begin_optimize();
                }
                if !tick.arrived {
                    return StrategyDecision::used();
                }
                let u: Bounds = ctx.uav_bounds();
                let speed = self.params.edge_speed_mps;
                match self.leg {
                    EdgeLeg::ToStart => {
                        self.leg = EdgeLeg::SouthOut;
                        self.go(EnuPoint::flat(u.x1, u.y0), speed)
                    }
                    EdgeLeg::SouthOut => {
                        self.leg = EdgeLeg::SouthBack;
                        self.go(EnuPoint::flat(u.x0, u.y0), speed)
                    }
                    EdgeLeg::SouthBack => {
                        self.leg = EdgeLeg::West;
                        self.go(EnuPoint::flat(u.x0, u.y1), speed)
                    }
                    EdgeLeg::West => self.begin_optimize(),
                }
            }
            BoPhase::Optimize => {
                let Some(est) = estimate else {
                    return if tick.arrived { self.next_ucb(false) } else { StrategyDecision::used() };
                };
                self.updates += 1;
                if self.updates > self.params.probe_warmup_updates {
                    match (self.pinned_edge(&est), self.on_edge) {
                        (Some(e), Some((prev, k))) if e == prev => self.on_edge = Some((e, k + 1)),
                        (Some(e), _) => self.on_edge = Some((e, 1)),
                        (None, _) => self.on_edge = None,
                    }
                    if let Some((e, k)) = self.on_edge {
                        if k >= self.params.boundary_updates.max(1) {
                            let mut d = self.begin_probe(e, est);
                            d.estimate = Some(ctx.geo(&est));
                            return d;
                        }
                    }
                }
                let mut d = if tick.arrived { self.next_ucb(false) } else { StrategyDecision::used() };
                // the edge estimate stands until the fast deadline has passed
                if tick.t > ctx.fast_deadline_s {
                    d.estimate = Some(ctx.geo(&est));
                }
                d
            }
            BoPhase::BoundaryProbe => self.probe_step(m, tick),
        }
    }

    fn phase(&self) -> &'static str {
        match self.phase {
            BoPhase::EdgeTraverse => "edge_traverse",
            BoPhase::Optimize => "optimize",
            BoPhase::BoundaryProbe => "boundary_probe",
        }
    }

    fn radio_map(&self) -> Option<&RadioMapGrid> {
        self.estimate_grid.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(d: f64, a: f64, n: f64) -> Vec<(f64, f64, f64)> {
        (0..=60)
            .map(|i| {
                let s = i as f64;
                (s, 25.0, a - 10.0 * n * (s + d).hypot(25.0).log10())
            })
            .collect()
    }

    #[test]
    fn offset_fit_recovers_exact_data() {
        let (d, a) = fit_boundary_offset(&synth(35.0, -30.0, 2.0), 2.0, -60.0, 60.0).unwrap();
        assert!((d - 35.0).abs() < 1e-9);
        assert!((a + 30.0).abs() < 1e-9);
    }

    #[test]
    fn offset_fit_needs_samples() {
        assert!(fit_boundary_offset(&synth(10.0, -30.0, 2.0)[..2], 2.0, -60.0, 60.0).is_none());
    }

    #[test]
    fn offset_fit_is_capped() {
        let (d, _) = fit_boundary_offset(&synth(200.0, -30.0, 2.0), 2.0, -60.0, 60.0).unwrap();
        assert_eq!(d, 60.0);
    }

    #[test]
    fn smoothing_picks_plateau_center() {
        let series: Vec<(f64, f64)> = (0..30)
            .map(|i| (i as f64 * 10.0, -((i as f64 - 12.0).abs())))
            .collect();
        let (pos, _) = BoSearch::smoothed_argmax(&series, 5).unwrap();
        assert_eq!(pos, 120.0);
    }
}
