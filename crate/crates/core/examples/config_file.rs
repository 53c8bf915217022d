//! Loading a TOML run configuration, applying command-line style overrides
//! and seeing how a bad key is reported.
//!
//!     cargo run --release --example config_file

use afar_twin::channel::ChannelProfile;
use afar_twin::config::{Overrides, RunConfigFile};
use afar_twin::harness::run_episode;
use afar_twin::strategies::StrategyKind;

const TOML: &str = r#"
rover_pos = { lat = 35.7294335, lon = -78.6931751 }
strategy = "unt_recursive"
seed = 9
channel_profile = "testbed"

[channel]
noise_sigma_db = 6.0

[unt_recursive]
max_depth = 3
"#;

fn main() {
    let file = RunConfigFile::from_toml_str(TOML).expect("valid config");
    let cfg = file.episode(&Overrides::default()).expect("complete config");
    println!(
        "from file: {} seed {} sigma {} fades {}",
        cfg.strategy, cfg.seed, cfg.channel.noise_sigma_db, cfg.channel.fades_enabled
    );
    let (r, _) = run_episode(&cfg).expect("episode runs");
    println!("  final error {:.2} m", r.final_error_m);

    let flags = Overrides {
        strategy: Some(StrategyKind::UgaGp),
        seed: Some(2),
        channel_profile: Some(ChannelProfile::Ideal),
    };
    let cfg = file.episode(&flags).expect("complete config");
    println!(
        "with flags: {} seed {} sigma {} fades {}",
        cfg.strategy, cfg.seed, cfg.channel.noise_sigma_db, cfg.channel.fades_enabled
    );

    for bad in ["seed = 1", "rover_pos = { lat = 35.7285, lon = -78.6935 }\n[gp]\nkappa = -1.0", "rover_pos = { lat = 35.7285, lon = -78.6935 }\nspeed = 3"] {
        let err = RunConfigFile::from_toml_str(bad).and_then(|f| f.episode(&Overrides::default()));
        println!("{:?} -> {}", bad.replace('\n', " / "), err.map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string()));
    }
}
