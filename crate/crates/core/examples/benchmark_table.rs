//! Multi-seed benchmark over the three default hiding spots.
//!
//!     cargo run --release --example benchmark_table -- [profile] [seeds]
//!
//! Prints the per-location median table and each strategy's median per-seed
//! final average.

use std::time::Instant;

use afar_twin::channel::ChannelProfile;
use afar_twin::harness::{default_locations, run_benchmark, EpisodeConfig};
use afar_twin::strategies::StrategyKind;

fn main() {
    let mut args = std::env::args().skip(1);
    let profile = args
        .next()
        .map(|p| ChannelProfile::parse(&p).expect("profile: emulator | testbed | ideal"))
        .unwrap_or(ChannelProfile::Emulator);
    let n: u64 = args.next().map_or(5, |s| s.parse().expect("seed count"));
    let locations = default_locations();
    let base = EpisodeConfig::new(StrategyKind::Baseline, locations[0]).with_profile(profile);
    let seeds: Vec<u64> = (0..n).collect();

    let t0 = Instant::now();
    let report = run_benchmark(&base, &StrategyKind::ALL, &locations, &seeds);
    println!(
        "{} profile, {} seeds, {} episodes in {:.1} s\n",
        profile.name(),
        n,
        report.episodes.len(),
        t0.elapsed().as_secs_f64()
    );
    print!("{}", report.table());
    println!();
    for s in StrategyKind::ALL {
        println!("{:<14} median final average {:7.2} m", s.name(), report.median_final_average(s));
    }
    for f in report.failures() {
        eprintln!("failed: {} L{} seed {}: {:?}", f.strategy, f.location + 1, f.seed, f.result);
    }
}
