//! Received power versus ground range for each channel profile, with the
//! overhead antenna null visible close in.
//!
//!     cargo run --example channel_profiles -- [altitude_m]

use afar_twin::channel::{deterministic_rssi_dbm, ChannelProfile, ChannelState};
use afar_twin::geodesy::{to_geo, EnuPoint, GeoPoint};

fn main() {
    let alt: f64 = std::env::args().nth(1).map_or(30.0, |s| s.parse().expect("altitude"));
    let tx = GeoPoint::new(35.7275, -78.696, 0.0);
    let profiles = [ChannelProfile::Ideal, ChannelProfile::Emulator, ChannelProfile::Testbed];

    println!("altitude {alt} m; columns are the mean of 200 readings");
    print!("{:>8} {:>10}", "range m", "model dBm");
    for p in profiles {
        print!(" {:>10}", p.name());
    }
    println!();
    for range in [0.0, 5.0, 10.0, 17.0, 25.0, 40.0, 60.0, 100.0, 150.0, 250.0] {
        let rel = EnuPoint::new(range, 0.0, alt);
        let rx = to_geo(&rel, &tx);
        let model = deterministic_rssi_dbm(&ChannelProfile::Ideal.params(), &rel, 0.0);
        print!("{range:>8.0} {model:>10.2}");
        for p in profiles {
            let params = p.params();
            let mut ch = ChannelState::new(7);
            let n = 200;
            let mean = (0..n)
                .map(|k| ch.sample(&params, &tx, &rx, 0.0, k as f64 * 0.2).rssi_dbm)
                .sum::<f64>()
                / n as f64;
            print!(" {mean:>10.2}");
        }
        println!();
    }

    let params = ChannelProfile::Testbed.params();
    let mut ch = ChannelState::new(11);
    let rx = to_geo(&EnuPoint::new(80.0, 0.0, alt), &tx);
    let trace: String = (0..120)
        .map(|k| {
            let m = ch.sample(&params, &tx, &rx, 0.0, k as f64 * 0.2);
            if ch.fade.in_fade {
                '_'
            } else if m.confidence > 0.5 {
                '#'
            } else {
                '.'
            }
        })
        .collect();
    println!("\ntestbed fades at 80 m (_ = in fade):\n{trace}");
}
