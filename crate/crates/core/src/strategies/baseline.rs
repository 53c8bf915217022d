//! Organizer reference search: fixed-length legs, turn 90 degrees clockwise
//! whenever the leg-average power drops.

use super::{
    BaselineParams, Bounds, Cardinal, Leg, MissionContext, Strategy, StrategyDecision,
    StrategyKind, Tick,
};
use crate::channel::Measurement;
use crate::geodesy::EnuPoint;
use crate::vehicle::VehicleState;

/// Heading for the next leg. A tie counts as "not a decrease".
pub fn baseline_step(heading: Cardinal, avg_this_leg: f64, avg_prev_leg: f64) -> Cardinal {
    if avg_this_leg < avg_prev_leg {
        heading.cw()
    } else {
        heading
    }
}

/// Target `len` meters from `from` along `heading`, clamped to the fence.
/// Legs the fence would shorten below a meter rotate clockwise instead.
pub(crate) fn plan_leg(
    from: EnuPoint,
    mut heading: Cardinal,
    len: f64,
    fence: &Bounds,
) -> (Cardinal, EnuPoint) {
    for _ in 0..4 {
        let (ux, uy) = heading.unit();
        let (x, y) = fence.clamp(from.x + ux * len, from.y + uy * len);
        if (x - from.x).hypot(y - from.y) >= 1.0 {
            return (heading, EnuPoint::flat(x, y));
        }
        heading = heading.cw();
    }
    (heading, EnuPoint::flat(from.x, from.y))
}

pub struct Baseline {
    params: BaselineParams,
    ctx: Option<MissionContext>,
    heading: Cardinal,
    leg: Option<Leg>,
    prev_avg: Option<f64>,
    best: Option<(f64, EnuPoint)>,
}

impl Baseline {
    pub fn new(params: BaselineParams) -> Self {
        Self {
            params,
            ctx: None,
            heading: Cardinal::North,
            leg: None,
            prev_avg: None,
            best: None,
        }
    }

    fn start_leg(&mut self, ctx: &MissionContext, pos: EnuPoint) -> StrategyDecision {
        let (heading, to) = plan_leg(pos, self.heading, self.params.leg_m, &ctx.uav_bounds());
        self.heading = heading;
        self.leg = Some(Leg::new(EnuPoint::flat(pos.x, pos.y), to));
        StrategyDecision {
            command: Some(ctx.waypoint(to.x, to.y, self.params.altitude_m, self.params.speed_mps)),
            ..StrategyDecision::used()
        }
    }
}

impl Strategy for Baseline {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Baseline
    }

    fn start(&mut self, ctx: &MissionContext, vehicle: &VehicleState) -> StrategyDecision {
        self.ctx = Some(*ctx);
        self.start_leg(ctx, ctx.enu(&vehicle.pos))
    }

    fn on_measurement(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision {
        let ctx = self.ctx.expect("start() not called");
        if let Some(leg) = self.leg.as_mut() {
            leg.add(m.rssi_dbm);
        }
        if !tick.arrived {
            return StrategyDecision::used();
        }
        let leg = self.leg.take();
        let mut estimate = None;
        if let Some(avg) = leg.as_ref().and_then(Leg::average) {
            let mid = leg.as_ref().map(Leg::midpoint).unwrap_or_default();
            if self.best.is_none_or(|(b, _)| avg > b) {
                self.best = Some((avg, mid));
                estimate = Some(ctx.geo(&mid));
            }
            if let Some(prev) = self.prev_avg {
                self.heading = baseline_step(self.heading, avg, prev);
            }
            self.prev_avg = Some(avg);
        }
        let mut d = self.start_leg(&ctx, ctx.enu(&tick.vehicle.pos));
        d.estimate = estimate;
        d
    }

    fn phase(&self) -> &'static str {
        "legs"
    }
}
