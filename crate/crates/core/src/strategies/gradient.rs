//! Leg search with an annealed step, a momentum term that lengthens legs
//! while power keeps rising, and soft per-direction boundaries recorded
//! wherever power fell.

use super::baseline::plan_leg;
use super::{
    Cardinal, GradientParams, Leg, MissionContext, Strategy, StrategyDecision, StrategyKind, Tick,
};
use crate::channel::Measurement;
use crate::geodesy::EnuPoint;
use crate::vehicle::VehicleState;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSearchState {
    pub params: GradientParams,
    /// Annealed base leg length.
    pub interval_m: f64,
    /// Additive term grown by consecutive improvements.
    pub momentum_m: f64,
    pub heading: Cardinal,
    /// Soft boundary per heading: x for east/west, y for north/south.
    pub bounds: [Option<f64>; 4],
}

impl GradientSearchState {
    pub fn new(params: GradientParams) -> Self {
        Self {
            params,
            interval_m: params.initial_interval_m,
            momentum_m: 0.0,
            heading: Cardinal::North,
            bounds: [None; 4],
        }
    }

    pub fn leg_length(&self) -> f64 {
        (self.interval_m + self.momentum_m).min(self.params.interval_max_m)
    }

    /// Room left before the soft boundary ahead, if one applies.
    fn room(&self, heading: Cardinal, pos: EnuPoint) -> Option<f64> {
        let b = self.bounds[heading as usize]?;
        let m = self.params.boundary_margin_m;
        match heading {
            Cardinal::East if pos.x < b => Some(b - m - pos.x),
            Cardinal::West if pos.x > b => Some(pos.x - b - m),
            Cardinal::North if pos.y < b => Some(b - m - pos.y),
            Cardinal::South if pos.y > b => Some(pos.y - b - m),
            _ => None,
        }
    }

    /// Leg length along `heading` after applying the stop-short rule, or
    /// `None` when the boundary leaves less than the minimum interval.
    pub fn truncated(&self, heading: Cardinal, pos: EnuPoint, len: f64) -> Option<f64> {
        match self.room(heading, pos) {
            Some(room) if room < self.params.interval_min_m => None,
            Some(room) => Some(len.min(room)),
            None => Some(len),
        }
    }
}

/// Updates the search state after a completed leg ending at `pos` and
/// returns the next `(heading, length)`.
pub fn gradient_step(state: &mut GradientSearchState, improved: bool, pos: EnuPoint) -> (Cardinal, f64) {
    let p = state.params;
    if improved {
        state.momentum_m += p.momentum_step_m;
    } else {
        let coord = match state.heading {
            Cardinal::East | Cardinal::West => pos.x,
            Cardinal::North | Cardinal::South => pos.y,
        };
        state.bounds[state.heading as usize] = Some(coord);
        state.heading = state.heading.cw();
        state.interval_m = (state.interval_m * p.decay).max(p.interval_min_m);
        state.momentum_m = 0.0;
    }
    let len = state.leg_length();
    let mut heading = state.heading;
    for _ in 0..4 {
        if let Some(l) = state.truncated(heading, pos, len) {
            state.heading = heading;
            return (heading, l);
        }
        heading = heading.cw();
    }
    (state.heading, p.interval_min_m)
}

pub struct GradientSearch {
    state: GradientSearchState,
    ctx: Option<MissionContext>,
    leg: Option<Leg>,
    prev_avg: Option<f64>,
    best: Option<f64>,
}

impl GradientSearch {
    pub fn new(params: GradientParams) -> Self {
        Self {
            state: GradientSearchState::new(params),
            ctx: None,
            leg: None,
            prev_avg: None,
            best: None,
        }
    }

    pub fn state(&self) -> &GradientSearchState {
        &self.state
    }

    fn fly(&mut self, ctx: &MissionContext, pos: EnuPoint, heading: Cardinal, len: f64) -> StrategyDecision {
        let (heading, to) = plan_leg(pos, heading, len, &ctx.uav_bounds());
        self.state.heading = heading;
        self.leg = Some(Leg::new(EnuPoint::flat(pos.x, pos.y), to));
        let p = self.state.params;
        StrategyDecision {
            command: Some(ctx.waypoint(to.x, to.y, p.altitude_m, p.speed_mps)),
            ..StrategyDecision::used()
        }
    }
}

impl Strategy for GradientSearch {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Gradient
    }

    fn start(&mut self, ctx: &MissionContext, vehicle: &VehicleState) -> StrategyDecision {
        self.ctx = Some(*ctx);
        let len = self.state.leg_length();
        self.fly(ctx, ctx.enu(&vehicle.pos), self.state.heading, len)
    }

    fn on_measurement(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision {
        let ctx = self.ctx.expect("start() not called");
        if let Some(leg) = self.leg.as_mut() {
            leg.add(m.rssi_dbm);
        }
        if !tick.arrived {
            return StrategyDecision::used();
        }
        let pos = ctx.enu(&tick.vehicle.pos);
        let leg = self.leg.take();
        let mut estimate = None;
        let mut next = (self.state.heading, self.state.leg_length());
        if let Some(avg) = leg.as_ref().and_then(Leg::average) {
            if self.best.is_none_or(|b| avg > b) {
                self.best = Some(avg);
                estimate = leg.as_ref().map(|l| ctx.geo(&l.midpoint()));
            }
            if let Some(prev) = self.prev_avg {
                next = gradient_step(&mut self.state, avg >= prev, pos);
            }
            self.prev_avg = Some(avg);
        }
        let mut d = self.fly(&ctx, pos, next.0, next.1);
        d.estimate = estimate;
        d
    }

    fn phase(&self) -> &'static str {
        "legs"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> GradientSearchState {
        GradientSearchState::new(GradientParams::default())
    }

    #[test]
    fn momentum_lengthens_consecutive_legs() {
        let mut s = state();
        let mut legs = vec![s.leg_length()];
        let pos = EnuPoint::flat(100.0, 100.0);
        for _ in 0..2 {
            legs.push(gradient_step(&mut s, true, pos).1);
        }
        assert_eq!(legs, vec![40.0, 45.0, 50.0]);
        assert_eq!(s.heading, Cardinal::North);
    }

    #[test]
    fn decrease_anneals_and_turns() {
        let mut s = state();
        let (h, len) = gradient_step(&mut s, false, EnuPoint::flat(100.0, 140.0));
        assert_eq!(h, Cardinal::East);
        assert!((len - 36.0).abs() < 1e-12);
        assert_eq!(s.momentum_m, 0.0);
        assert_eq!(s.bounds[Cardinal::North as usize], Some(140.0));
    }

    #[test]
    fn interval_floor() {
        let mut s = state();
        for _ in 0..60 {
            gradient_step(&mut s, false, EnuPoint::flat(1000.0, 1000.0));
        }
        assert_eq!(s.interval_m, s.params.interval_min_m);
    }

    #[test]
    fn stops_short_of_recorded_boundary() {
        let mut s = state();
        s.bounds[Cardinal::East as usize] = Some(200.0);
        let len = s.truncated(Cardinal::East, EnuPoint::flat(150.0, 0.0), 80.0).unwrap();
        assert!((150.0 + len - 190.0).abs() < 1e-12);
        // already inside the margin: blocked
        assert!(s.truncated(Cardinal::East, EnuPoint::flat(188.0, 0.0), 80.0).is_none());
        // boundary behind: unrestricted
        assert_eq!(s.truncated(Cardinal::East, EnuPoint::flat(250.0, 0.0), 80.0), Some(80.0));
    }

    #[test]
    fn blocked_heading_rotates() {
        let mut s = state();
        s.heading = Cardinal::North;
        s.bounds[Cardinal::East as usize] = Some(105.0);
        // decrease heading north at (100, 50): next would be east, but the
        // east boundary is 5 m away, so the leg goes south instead
        let (h, _) = gradient_step(&mut s, false, EnuPoint::flat(100.0, 50.0));
        assert_eq!(h, Cardinal::South);
    }
}
