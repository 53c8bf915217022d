//! Writes a flight log, reads it back and rescores it; the replayed report
//! matches the live one exactly.
//!
//!     cargo run --release --example replay_log -- [strategy]

use afar_twin::harness::{default_locations, replay, run_episode, EpisodeConfig, FlightLog};
use afar_twin::strategies::StrategyKind;

fn main() {
    let kind = std::env::args()
        .nth(1)
        .map_or(StrategyKind::UntRecursive, |s| StrategyKind::parse(&s).expect("unknown strategy"));
    let cfg = EpisodeConfig::new(kind, default_locations()[2]).with_seed(5);
    let (live, log) = run_episode(&cfg).expect("episode runs");

    let csv = log.to_csv_string();
    println!("{} records, {} bytes of CSV", log.records.len(), csv.len());
    for line in csv.lines().take(4) {
        println!("  {line}");
    }

    let back = FlightLog::read_csv(csv.as_bytes()).expect("parse");
    let replayed = replay(&back, &cfg).expect("complete log");
    println!("live     fast {:.3} m  final {:.3} m", live.fast_error_m, live.final_error_m);
    println!("replayed fast {:.3} m  final {:.3} m", replayed.fast_error_m, replayed.final_error_m);
    assert_eq!(live, replayed);

    let cut = FlightLog {
        records: back.records[..1200].to_vec(),
    };
    match replay(&cut, &cfg) {
        Ok(_) => println!("truncated log scored?"),
        Err(e) => println!("truncated at t={}: {e}", cut.records.last().unwrap().t),
    }
}
