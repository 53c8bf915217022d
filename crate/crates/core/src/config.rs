//! TOML run configuration. Every key is optional except `rover_pos`;
//! unknown keys are rejected. Command-line flags override file values.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelParams, ChannelProfile};
use crate::geodesy::{GeoPoint, GeoRect};
use crate::harness::{
    default_locations, default_rover_fence, default_start, default_uav_fence, EpisodeConfig,
};
use crate::strategies::{
    BaselineParams, GpSettings, GradientParams, NyuBoParams, SamplingParams, StrategyKind,
    StrategyParams, UgaParams, UntParams,
};
use crate::vehicle::DEFAULT_DT_S;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Parse(String),
    #[error("config: missing required key `{0}`")]
    Missing(&'static str),
    #[error("config: {key}: {message}")]
    Invalid { key: String, message: String },
}

/// Per-field overrides applied on top of the selected channel profile.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelOverrides {
    pub freq_hz: Option<f64>,
    pub tx_power_dbm: Option<f64>,
    pub noise_sigma_db: Option<f64>,
    pub fades_enabled: Option<bool>,
    pub fade_depth_db: Option<(f64, f64)>,
    pub fade_enter_prob: Option<f64>,
    pub fade_exit_prob: Option<f64>,
    pub overhead_null_db: Option<f64>,
    pub tilt_penalty_db_per_deg: Option<f64>,
    pub noise_floor_dbm: Option<f64>,
}

impl ChannelOverrides {
    pub fn apply(&self, mut p: ChannelParams) -> ChannelParams {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        set!(
            freq_hz,
            tx_power_dbm,
            noise_sigma_db,
            fades_enabled,
            fade_depth_db,
            fade_enter_prob,
            fade_exit_prob,
            overhead_null_db,
            tilt_penalty_db_per_deg,
            noise_floor_dbm
        );
        p
    }

    fn all(p: ChannelParams) -> Self {
        Self {
            freq_hz: Some(p.freq_hz),
            tx_power_dbm: Some(p.tx_power_dbm),
            noise_sigma_db: Some(p.noise_sigma_db),
            fades_enabled: Some(p.fades_enabled),
            fade_depth_db: Some(p.fade_depth_db),
            fade_enter_prob: Some(p.fade_enter_prob),
            fade_exit_prob: Some(p.fade_exit_prob),
            overhead_null_db: Some(p.overhead_null_db),
            tilt_penalty_db_per_deg: Some(p.tilt_penalty_db_per_deg),
            noise_floor_dbm: Some(p.noise_floor_dbm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    /// True rover position; required by `run`, `replay` and `plot-data`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rover_pos: Option<GeoPoint>,
    pub start_pos: GeoPoint,
    pub strategy: StrategyKind,
    pub seed: u64,
    pub dt: f64,
    pub duration_s: f64,
    pub fast_deadline_s: f64,
    pub sample_period_s: f64,
    pub channel_profile: ChannelProfile,
    /// Hiding spots used by `bench`.
    pub locations: Vec<GeoPoint>,
    pub uav_fence: GeoRect,
    pub rover_fence: GeoRect,
    pub channel: ChannelOverrides,
    pub gp: GpSettings,
    pub sampling: SamplingParams,
    pub baseline: BaselineParams,
    pub gradient: GradientParams,
    pub nyu_bo: NyuBoParams,
    pub unt_recursive: UntParams,
    pub uga_gp: UgaParams,
}

impl Default for RunConfigFile {
    fn default() -> Self {
        Self {
            rover_pos: None,
            start_pos: default_start(),
            strategy: StrategyKind::NyuBo,
            seed: 0,
            dt: DEFAULT_DT_S,
            duration_s: 600.0,
            fast_deadline_s: 180.0,
            sample_period_s: 0.2,
            channel_profile: ChannelProfile::Emulator,
            locations: default_locations().to_vec(),
            uav_fence: default_uav_fence(),
            rover_fence: default_rover_fence(),
            channel: ChannelOverrides::default(),
            gp: GpSettings::default(),
            sampling: SamplingParams::default(),
            baseline: BaselineParams::default(),
            gradient: GradientParams::default(),
            nyu_bo: NyuBoParams::default(),
            unt_recursive: UntParams::default(),
            uga_gp: UgaParams::default(),
        }
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub strategy: Option<StrategyKind>,
    pub seed: Option<u64>,
    pub channel_profile: Option<ChannelProfile>,
}

impl RunConfigFile {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| ConfigError::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn params(&self) -> StrategyParams {
        StrategyParams {
            baseline: self.baseline,
            gradient: self.gradient,
            nyu_bo: self.nyu_bo,
            unt_recursive: self.unt_recursive,
            uga_gp: self.uga_gp,
            gp: self.gp,
            sampling: self.sampling,
        }
    }

    fn build(&self, rover: GeoPoint, o: &Overrides) -> Result<EpisodeConfig, ConfigError> {
        let profile = o.channel_profile.unwrap_or(self.channel_profile);
        let cfg = EpisodeConfig {
            uav_fence: self.uav_fence,
            rover_fence: self.rover_fence,
            rover_pos: rover,
            start_pos: self.start_pos,
            channel: self.channel.apply(profile.params()),
            strategy: o.strategy.unwrap_or(self.strategy),
            params: self.params(),
            seed: o.seed.unwrap_or(self.seed),
            dt: self.dt,
            duration_s: self.duration_s,
            fast_deadline_s: self.fast_deadline_s,
            sample_period_s: self.sample_period_s,
        };
        cfg.validate().map_err(|e| match e {
            crate::harness::HarnessError::Config { field, message } => ConfigError::Invalid {
                key: field,
                message,
            },
            other => ConfigError::Parse(other.to_string()),
        })?;
        Ok(cfg)
    }

    /// Single-episode configuration; `rover_pos` must be present.
    pub fn episode(&self, o: &Overrides) -> Result<EpisodeConfig, ConfigError> {
        let rover = self.rover_pos.ok_or(ConfigError::Missing("rover_pos"))?;
        self.build(rover, o)
    }

    /// Benchmark base configuration and hiding spots. Every location is
    /// validated against the fences.
    pub fn benchmark(&self, o: &Overrides) -> Result<(EpisodeConfig, Vec<GeoPoint>), ConfigError> {
        if self.locations.is_empty() {
            return Err(ConfigError::Invalid {
                key: "locations".into(),
                message: "need at least one hiding spot".into(),
            });
        }
        for (i, &l) in self.locations.iter().enumerate() {
            self.build(l, o).map_err(|e| match e {
                ConfigError::Invalid { key, message } if key == "rover_pos" => ConfigError::Invalid {
                    key: format!("locations[{i}]"),
                    message,
                },
                other => other,
            })?;
        }
        let base = self.build(self.locations[0], o)?;
        Ok((base, self.locations.clone()))
    }
}

/// Every config key with its default, as a commented TOML document.
pub fn reference() -> String {
    let mut defaults = RunConfigFile::default();
    defaults.channel = ChannelOverrides::all(ChannelProfile::Emulator.params());
    let body = toml::to_string(&defaults).expect("defaults serialize");
    let l1 = default_locations()[0];
    format!(
        "# required (no default):\nrover_pos = {{ lat = {}, lon = {} }}\n\n\
         # defaults; [channel] shows the emulator profile, and any key set there\n\
         # overrides the selected channel_profile (emulator | testbed | ideal)\n{body}",
        l1.lat, l1.lon
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "rover_pos = { lat = 35.728, lon = -78.695 }\n";

    #[test]
    fn minimal_file_uses_defaults() {
        let f = RunConfigFile::from_toml_str(MINIMAL).unwrap();
        let cfg = f.episode(&Overrides::default()).unwrap();
        assert_eq!(cfg.strategy, StrategyKind::NyuBo);
        assert_eq!(cfg.channel, ChannelProfile::Emulator.params());
        assert_eq!(cfg.duration_s, 600.0);
    }

    #[test]
    fn flags_override_file() {
        let text = format!("{MINIMAL}strategy = \"baseline\"\nseed = 3\n");
        let f = RunConfigFile::from_toml_str(&text).unwrap();
        let o = Overrides {
            strategy: Some(StrategyKind::NyuBo),
            seed: Some(7),
            channel_profile: Some(ChannelProfile::Testbed),
        };
        let cfg = f.episode(&o).unwrap();
        assert_eq!(cfg.strategy, StrategyKind::NyuBo);
        assert_eq!(cfg.seed, 7);
        assert!(cfg.channel.fades_enabled);
        let cfg = f.episode(&Overrides::default()).unwrap();
        assert_eq!((cfg.strategy, cfg.seed), (StrategyKind::Baseline, 3));
    }

    #[test]
    fn channel_overrides_layer_on_profile() {
        let text = format!("{MINIMAL}channel_profile = \"testbed\"\n[channel]\nnoise_sigma_db = 2.5\n");
        let cfg = RunConfigFile::from_toml_str(&text)
            .unwrap()
            .episode(&Overrides::default())
            .unwrap();
        assert_eq!(cfg.channel.noise_sigma_db, 2.5);
        assert!(cfg.channel.fades_enabled);
    }

    #[test]
    fn missing_rover_names_the_key() {
        let err = RunConfigFile::from_toml_str("seed = 1\n")
            .unwrap()
            .episode(&Overrides::default())
            .unwrap_err();
        assert!(err.to_string().contains("rover_pos"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfigFile::from_toml_str(&format!("{MINIMAL}[gp]\nlengthscale = 3\n")).unwrap_err();
        assert!(err.to_string().contains("lengthscale"), "{err}");
        let err = RunConfigFile::from_toml_str("rover = 1\n").unwrap_err();
        assert!(err.to_string().contains("rover"), "{err}");
    }

    #[test]
    fn invalid_values_name_the_key() {
        let text = format!("{MINIMAL}[gp]\nlengthscale_m = -1.0\n");
        let err = RunConfigFile::from_toml_str(&text)
            .unwrap()
            .episode(&Overrides::default())
            .unwrap_err();
        assert!(err.to_string().contains("gp.lengthscale_m"), "{err}");
    }

    #[test]
    fn reference_lists_every_table_and_parses_back() {
        let r = reference();
        for key in [
            "rover_pos",
            "start_pos",
            "strategy",
            "seed",
            "dt",
            "duration_s",
            "fast_deadline_s",
            "sample_period_s",
            "channel_profile",
            "[[locations]]",
            "[uav_fence]",
            "[rover_fence]",
            "[channel]",
            "noise_sigma_db",
            "[gp]",
            "kappa",
            "[sampling]",
            "qv_threshold",
            "[baseline]",
            "[gradient]",
            "[nyu_bo]",
            "[unt_recursive]",
            "[uga_gp]",
            "circle_radius_m",
        ] {
            assert!(r.contains(key), "missing {key}");
        }
        let back = RunConfigFile::from_toml_str(&r).unwrap();
        assert!(back.episode(&Overrides::default()).is_ok());
    }
}
