//! Point-mass flight to a waypoint, including a target outside the fence
//! that gets clamped onto it.
//!
//!     cargo run --example vehicle_flight

use afar_twin::geodesy::{to_enu, to_geo, EnuPoint};
use afar_twin::harness::{default_start, default_uav_fence, DEFAULT_ORIGIN};
use afar_twin::vehicle::{Vehicle, WaypointCommand, DEFAULT_ARRIVAL_TOL_M, DEFAULT_DT_S};

fn main() {
    let fence = default_uav_fence();
    let mut v = Vehicle::new(default_start(), fence);
    let wanted = to_geo(&EnuPoint::new(420.0, 150.0, 140.0), &DEFAULT_ORIGIN);
    let cmd = v.command(&WaypointCommand::new(wanted, 25.0)).expect("finite command");
    let c = to_enu(&cmd.target, &DEFAULT_ORIGIN);
    println!(
        "asked for (420, 150, 140) at 25 m/s, flying to ({:.1}, {:.1}, {:.1}) at {} m/s",
        c.x, c.y, c.z, cmd.speed_mps
    );

    let mut k = 0u32;
    while !v.at_waypoint(DEFAULT_ARRIVAL_TOL_M) {
        v.step(DEFAULT_DT_S);
        k += 1;
        if k % 50 == 0 {
            let s = v.state;
            let p = to_enu(&s.pos, &DEFAULT_ORIGIN);
            println!(
                "t={:5.1}  ({:6.1}, {:6.1}, {:5.1})  heading {:5.1}  speed {:4.1}  tilt {:.1}",
                k as f64 * DEFAULT_DT_S,
                p.x,
                p.y,
                p.z,
                s.heading_deg,
                s.speed_mps,
                s.tilt_deg
            );
        }
    }
    println!("arrived after {:.1} s", k as f64 * DEFAULT_DT_S);
}
