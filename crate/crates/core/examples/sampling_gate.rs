//! Buffer averaging and the quality-variance gate on a steady signal and on
//! one that keeps dropping into fades.
//!
//!     cargo run --example sampling_gate

use afar_twin::channel::{ChannelProfile, ChannelState, Measurement};
use afar_twin::geodesy::{to_geo, EnuPoint, GeoPoint};
use afar_twin::sampling::{QvFilter, SampleBuffer};

fn run(name: &str, profile: ChannelProfile) {
    let tx = GeoPoint::new(35.7275, -78.696, 0.0);
    let rx = to_geo(&EnuPoint::new(60.0, 40.0, 30.0), &tx);
    let params = profile.params();
    let mut ch = ChannelState::new(3);
    let mut buf = SampleBuffer::default();
    let mut qv = QvFilter::default();
    let mut recent: Vec<Measurement> = Vec::new();
    let mut averages = Vec::new();
    for k in 0..600 {
        let m = ch.sample(&params, &tx, &rx, 0.0, k as f64 * 0.2);
        if let Some((avg, _)) = buf.push(m).expect("ordered") {
            averages.push(avg);
        }
        recent.push(m);
        if recent.len() > qv.window {
            recent.remove(0);
        }
        if recent.len() == qv.window {
            qv.accept(&recent);
        }
    }
    let mean = averages.iter().sum::<f64>() / averages.len() as f64;
    println!(
        "{name:<9} {} buffer averages, mean {mean:.2} dBm; gate accepted {} rejected {} (threshold now {:.4})",
        averages.len(),
        qv.accepted_count(),
        qv.rejected_count(),
        qv.threshold
    );
}

fn main() {
    run("ideal", ChannelProfile::Ideal);
    run("emulator", ChannelProfile::Emulator);
    run("testbed", ChannelProfile::Testbed);
}
