//! First-order UAV kinematics: straight-line waypoint tracking with a speed
//! cap, instantaneous heading changes and a geofence that clamps every target.

use thiserror::Error;

use crate::geodesy::{to_enu, to_geo, EnuPoint, GeoPoint, GeoRect};

pub const MAX_SPEED_MPS: f64 = 10.0;
pub const MAX_TILT_DEG: f64 = 5.0;
pub const DEFAULT_DT_S: f64 = 0.1;
pub const DEFAULT_ARRIVAL_TOL_M: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum VehicleError {
    #[error("waypoint target is not finite")]
    NonFiniteTarget,
    #[error("waypoint speed is not finite")]
    NonFiniteSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub pos: GeoPoint,
    /// Degrees clockwise from north.
    pub heading_deg: f64,
    pub speed_mps: f64,
    pub tilt_deg: f64,
    pub t: f64,
}

impl VehicleState {
    pub fn at_rest(pos: GeoPoint) -> Self {
        Self {
            pos,
            heading_deg: 0.0,
            speed_mps: 0.0,
            tilt_deg: 0.0,
            t: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaypointCommand {
    pub target: GeoPoint,
    pub speed_mps: f64,
}

impl WaypointCommand {
    pub fn new(target: GeoPoint, speed_mps: f64) -> Self {
        Self { target, speed_mps }
    }
}

/// Clamps `cmd` into the fence (each axis independently) and the speed into
/// `(0, 10]`.
pub fn set_waypoint(cmd: &WaypointCommand, fence: &GeoRect) -> Result<WaypointCommand, VehicleError> {
    let t = cmd.target;
    if !(t.lat.is_finite() && t.lon.is_finite() && t.alt.is_finite()) {
        return Err(VehicleError::NonFiniteTarget);
    }
    if cmd.speed_mps.is_nan() {
        return Err(VehicleError::NonFiniteSpeed);
    }
    let speed = if cmd.speed_mps > 0.0 {
        cmd.speed_mps.min(MAX_SPEED_MPS)
    } else {
        // non-positive requests fall back to the slowest meaningful speed
        0.1
    };
    Ok(WaypointCommand {
        target: fence.clamp(t),
        speed_mps: speed,
    })
}

/// A UAV with its active (already clamped) command and its fence.
#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub state: VehicleState,
    pub command: Option<WaypointCommand>,
    pub fence: GeoRect,
}

impl Vehicle {
    pub fn new(start: GeoPoint, fence: GeoRect) -> Self {
        Self {
            state: VehicleState::at_rest(fence.clamp(start)),
            command: None,
            fence,
        }
    }

    pub fn command(&mut self, cmd: &WaypointCommand) -> Result<WaypointCommand, VehicleError> {
        let accepted = set_waypoint(cmd, &self.fence)?;
        self.command = Some(accepted);
        Ok(accepted)
    }

    pub fn step(&mut self, dt: f64) {
        self.state = step(&self.state, self.command.as_ref(), &self.fence, dt);
    }

    pub fn at_waypoint(&self, tol_m: f64) -> bool {
        at_waypoint(&self.state, self.command.as_ref(), tol_m)
    }
}

/// Advances the vehicle by `dt` seconds toward the active target.
pub fn step(state: &VehicleState, cmd: Option<&WaypointCommand>, fence: &GeoRect, dt: f64) -> VehicleState {
    let t = state.t + dt;
    let hold = |pos: GeoPoint| VehicleState {
        pos: fence.clamp(pos),
        heading_deg: state.heading_deg,
        speed_mps: 0.0,
        tilt_deg: 0.0,
        t,
    };
    let Some(cmd) = cmd else {
        return hold(state.pos);
    };
    let rel = to_enu(&cmd.target, &state.pos);
    let dist = rel.distance(&EnuPoint::default());
    let speed = cmd.speed_mps.clamp(0.0, MAX_SPEED_MPS);
    let reach = speed * dt;
    if dist == 0.0 || speed == 0.0 {
        return hold(if dist == 0.0 { cmd.target } else { state.pos });
    }
    let heading = if rel.x == 0.0 && rel.y == 0.0 {
        state.heading_deg
    } else {
        rel.x.atan2(rel.y).to_degrees().rem_euclid(360.0)
    };
    let moving = VehicleState {
        heading_deg: heading,
        speed_mps: speed,
        tilt_deg: MAX_TILT_DEG * speed / MAX_SPEED_MPS,
        t,
        pos: state.pos,
    };
    if dist <= reach {
        // arrival: snap onto the target and hold from the next step on
        return VehicleState {
            pos: fence.clamp(cmd.target),
            ..moving
        };
    }
    let k = reach / dist;
    let delta = EnuPoint::new(rel.x * k, rel.y * k, rel.z * k);
    VehicleState {
        pos: fence.clamp(to_geo(&delta, &state.pos)),
        ..moving
    }
}

/// True iff the 3D distance to the active target is within `tol_m`.
pub fn at_waypoint(state: &VehicleState, cmd: Option<&WaypointCommand>, tol_m: f64) -> bool {
    match cmd {
        Some(c) => to_enu(&c.target, &state.pos).distance(&EnuPoint::default()) <= tol_m,
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesy::contains;
    use proptest::prelude::*;

    const ORIGIN: GeoPoint = GeoPoint {
        lat: 35.7,
        lon: -78.7,
        alt: 0.0,
    };

    fn fence() -> GeoRect {
        GeoRect::from_enu_bounds(
            EnuPoint::flat(0.0, 0.0),
            EnuPoint::flat(300.0, 300.0),
            &ORIGIN,
            20.0,
            110.0,
        )
    }

    fn geo(x: f64, y: f64, z: f64) -> GeoPoint {
        to_geo(&EnuPoint::new(x, y, z), &ORIGIN)
    }

    #[test]
    fn clamping_rules() {
        let f = fence();
        let inside = WaypointCommand::new(geo(100.0, 100.0, 50.0), 5.0);
        assert_eq!(set_waypoint(&inside, &f).unwrap(), inside);

        let east = set_waypoint(&WaypointCommand::new(geo(350.0, 120.0, 50.0), 5.0), &f).unwrap();
        let e = to_enu(&east.target, &ORIGIN);
        assert!((e.x - 300.0).abs() < 1e-6 && (e.y - 120.0).abs() < 1e-6);

        let low = set_waypoint(&WaypointCommand::new(geo(100.0, 100.0, 5.0), 5.0), &f).unwrap();
        assert_eq!(low.target.alt, 20.0);

        let fast = set_waypoint(&WaypointCommand::new(geo(100.0, 100.0, 50.0), 25.0), &f).unwrap();
        assert_eq!(fast.speed_mps, 10.0);

        let bad = WaypointCommand::new(GeoPoint::new(f64::NAN, 0.0, 30.0), 5.0);
        assert_eq!(set_waypoint(&bad, &f), Err(VehicleError::NonFiniteTarget));
    }

    #[test]
    fn holding_at_target() {
        let f = fence();
        let p = geo(100.0, 100.0, 40.0);
        let s = VehicleState::at_rest(p);
        let cmd = WaypointCommand::new(p, 10.0);
        let n = step(&s, Some(&cmd), &f, 0.1);
        assert_eq!(n.pos, p);
        assert_eq!(n.tilt_deg, 0.0);
        assert_eq!(n.speed_mps, 0.0);
    }

    #[test]
    fn one_meter_per_step_at_full_speed() {
        let f = fence();
        let s = VehicleState::at_rest(geo(100.0, 100.0, 40.0));
        let cmd = WaypointCommand::new(geo(200.0, 100.0, 40.0), 10.0);
        let n = step(&s, Some(&cmd), &f, 0.1);
        let moved = to_enu(&n.pos, &s.pos);
        assert!((moved.x - 1.0).abs() < 1e-3 && moved.y.abs() < 1e-3);
        assert!((n.heading_deg - 90.0).abs() < 1e-6);
        assert_eq!(n.tilt_deg, 5.0);
    }

    #[test]
    fn snaps_when_close() {
        let f = fence();
        let s = VehicleState::at_rest(geo(100.0, 100.0, 40.0));
        let target = geo(100.5, 100.0, 40.0);
        let n = step(&s, Some(&WaypointCommand::new(target, 10.0)), &f, 0.1);
        assert_eq!(n.pos, target);
    }

    #[test]
    fn arrival_tolerance() {
        let s = VehicleState::at_rest(geo(100.0, 100.0, 40.0));
        let at = |dx: f64| {
            let cmd = WaypointCommand::new(geo(100.0 + dx, 100.0, 40.0), 5.0);
            at_waypoint(&s, Some(&cmd), 2.0)
        };
        assert!(at(0.0));
        assert!(!at(2.1));
        assert!(at(1.9));
    }

    #[test]
    fn travel_time_matches_distance_over_speed() {
        let f = fence();
        let mut v = Vehicle::new(geo(10.0, 10.0, 30.0), f);
        v.command(&WaypointCommand::new(geo(160.0, 10.0, 30.0), 7.5)).unwrap();
        let dt = 0.1;
        let mut steps = 0;
        while !v.at_waypoint(1e-6) {
            v.step(dt);
            steps += 1;
        }
        let t = steps as f64 * dt;
        assert!((t - 150.0 / 7.5).abs() <= dt + 1e-9, "{t}");
    }

    proptest! {
        #[test]
        fn never_leaves_fence_and_respects_speed(
            targets in proptest::collection::vec((-200.0..500.0f64, -200.0..500.0f64, -10.0..200.0f64, 0.5..30.0f64), 1..6)
        ) {
            let f = fence();
            let mut v = Vehicle::new(geo(0.0, 0.0, 50.0), f);
            let dt = 0.1;
            for (x, y, z, sp) in targets {
                v.command(&WaypointCommand::new(geo(x, y, z), sp)).unwrap();
                for _ in 0..300 {
                    let before = v.state;
                    v.step(dt);
                    prop_assert!(contains(&f, &v.state.pos, true));
                    let d = to_enu(&v.state.pos, &before.pos).distance(&EnuPoint::default());
                    prop_assert!(d <= MAX_SPEED_MPS * dt + 1e-9);
                    if v.state.speed_mps == 0.0 {
                        prop_assert_eq!(v.state.tilt_deg, 0.0);
                    }
                    if v.state.speed_mps == MAX_SPEED_MPS {
                        prop_assert_eq!(v.state.tilt_deg, MAX_TILT_DEG);
                    }
                }
            }
        }
    }
}
