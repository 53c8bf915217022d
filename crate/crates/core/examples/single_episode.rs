//! One episode end to end: phase timeline, estimate error over time and the
//! final score.
//!
//!     cargo run --release --example single_episode -- [strategy] [profile] [location 1-3] [seed]

use afar_twin::channel::ChannelProfile;
use afar_twin::geodesy::{horizontal_distance, to_enu, GeoPoint};
use afar_twin::harness::{default_locations, run_episode, EpisodeConfig};
use afar_twin::strategies::StrategyKind;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind = args
        .first()
        .map(|s| StrategyKind::parse(s).expect("unknown strategy"))
        .unwrap_or(StrategyKind::NyuBo);
    let profile = args
        .get(1)
        .map(|s| ChannelProfile::parse(s).expect("unknown profile"))
        .unwrap_or(ChannelProfile::Emulator);
    let loc: usize = args.get(2).map_or(1, |s| s.parse().expect("location index"));
    let seed: u64 = args.get(3).map_or(0, |s| s.parse().expect("seed"));

    let rover = default_locations()[loc - 1];
    let cfg = EpisodeConfig::new(kind, rover).with_profile(profile).with_seed(seed);
    let origin = cfg.origin();
    let (report, log) = run_episode(&cfg).expect("episode runs");

    let r = to_enu(&rover, &origin);
    println!("{kind} / {} / L{loc} at ({:.0}, {:.0}) / seed {seed}", profile.name(), r.x, r.y);
    let mut phase = "";
    for rec in &log.records {
        let est = GeoPoint::new(rec.est_lat, rec.est_lon, 0.0);
        let err = horizontal_distance(&est, &rover);
        let p = to_enu(&GeoPoint::new(rec.lat, rec.lon, rec.alt), &origin);
        let e = to_enu(&est, &origin);
        let tick = (rec.t * 5.0).round() as u64;
        if rec.phase != phase || tick % 150 == 0 {
            println!(
                "t={:6.1}  {:<15} uav=({:6.1},{:6.1},{:5.1})  est=({:6.1},{:6.1})  err={:6.1} m",
                rec.t, rec.phase, p.x, p.y, p.z, e.x, e.y, err
            );
            phase = &rec.phase;
        }
    }
    println!(
        "\nfast {:.2} m, final {:.2} m, flown {:.0} m, samples {} accepted / {} rejected",
        report.fast_error_m,
        report.final_error_m,
        report.distance_flown_m,
        report.samples_accepted,
        report.samples_rejected
    );
}
