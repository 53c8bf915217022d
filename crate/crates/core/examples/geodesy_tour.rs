//! Local-frame projection, fence quadrants and the nearest-corner rule.
//!
//!     cargo run --example geodesy_tour

use afar_twin::geodesy::{
    horizontal_distance, nearest_corner, rect_quadrant, segment_intersection, to_enu, to_geo,
    EnuPoint, Segment,
};
use afar_twin::harness::{default_locations, default_rover_fence, default_uav_fence, DEFAULT_ORIGIN};

fn main() {
    let origin = DEFAULT_ORIGIN;
    let uav = default_uav_fence();
    let rover = default_rover_fence();

    let (lo, hi) = uav.to_enu_bounds(&origin);
    println!("UAV fence   ({:.1}, {:.1}) .. ({:.1}, {:.1}) m, alt {}..{}", lo.x, lo.y, hi.x, hi.y, uav.alt_min, uav.alt_max);
    let (lo, hi) = rover.to_enu_bounds(&origin);
    println!("rover fence ({:.1}, {:.1}) .. ({:.1}, {:.1}) m", lo.x, lo.y, hi.x, hi.y);

    for (i, p) in default_locations().iter().enumerate() {
        let e = to_enu(p, &origin);
        let back = to_geo(&e, &origin);
        println!(
            "L{}  {:.7}, {:.7}  ->  ({:7.2}, {:7.2}) m   round trip {:.1e} m",
            i + 1,
            p.lat,
            p.lon,
            e.x,
            e.y,
            horizontal_distance(p, &back)
        );
    }

    // Recursive narrowing toward a strong reading at (40, 260).
    let strong = to_geo(&EnuPoint::flat(40.0, 260.0), &origin);
    let mut r = uav;
    for depth in 1..=4 {
        let c = nearest_corner(&r, &strong);
        r = rect_quadrant(&r, c);
        let (lo, hi) = r.to_enu_bounds(&origin);
        println!("depth {depth}: {c:?} quadrant ({:.1}, {:.1}) .. ({:.1}, {:.1})", lo.x, lo.y, hi.x, hi.y);
    }

    let ns = Segment::new(EnuPoint::flat(120.0, 0.0), EnuPoint::flat(120.0, 300.0));
    let ew = Segment::new(EnuPoint::flat(0.0, 75.0), EnuPoint::flat(300.0, 75.0));
    println!("chord crossing: {:?}", segment_intersection(&ns, &ew));
}
