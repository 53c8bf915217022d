//! Fits a GP to noisy readings along a lawnmower pass and prints the
//! posterior mean over the rover fence as a coarse ASCII heat map.
//!
//!     cargo run --release --example radio_map -- [seed]

use afar_twin::channel::{ChannelProfile, ChannelState};
use afar_twin::geodesy::{to_enu, to_geo, EnuPoint};
use afar_twin::gp::{acquire_ucb, estimate_peak, GpModel, KernelParams, RadioMapGrid};
use afar_twin::harness::{default_locations, default_rover_fence, DEFAULT_ORIGIN};

fn main() {
    let seed: u64 = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed"));
    let origin = DEFAULT_ORIGIN;
    let rover = default_locations()[1];
    let params = ChannelProfile::Emulator.params();
    let mut ch = ChannelState::new(seed);
    let mut model = GpModel::new(KernelParams::default());

    // Ten readings averaged per training point, every 20 m along five passes.
    for row in 0..5 {
        let y = 30.0 + 60.0 * row as f64;
        for col in 0..15 {
            let x = 20.0 * col as f64;
            let rx = to_geo(&EnuPoint::new(x, y, 20.0), &origin);
            let avg = (0..10)
                .map(|_| ch.sample(&params, &rover, &rx, 0.0, 0.0).rssi_dbm)
                .sum::<f64>()
                / 10.0;
            model.push(EnuPoint::flat(x, y), avg).expect("finite reading");
        }
    }

    let (nx, ny) = (31, 31);
    let grid = RadioMapGrid::evaluate(default_rover_fence(), origin, nx, ny, &model);
    let (lo, hi) = grid
        .cells()
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), c| (lo.min(c.mean_dbm), hi.max(c.mean_dbm)));
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for iy in (0..ny).rev() {
        let line: String = (0..nx)
            .map(|ix| {
                let v = grid.cells()[iy * nx + ix].mean_dbm;
                let s = ((v - lo) / (hi - lo) * 9.0).round() as usize;
                shades[s.min(9)]
            })
            .collect();
        println!("{line}");
    }

    let peak = to_enu(&estimate_peak(&grid), &origin);
    let next = to_enu(&acquire_ucb(&grid, 3.0), &origin);
    let truth = to_enu(&rover, &origin);
    println!("mean {lo:.1} .. {hi:.1} dBm over {} training points", model.len());
    println!("peak estimate ({:.1}, {:.1}), truth ({:.1}, {:.1})", peak.x, peak.y, truth.x, truth.y);
    println!("next UCB target ({:.1}, {:.1})", next.x, next.y);
}
