//! Received-signal model between the hidden transmitter and the UAV receiver.
//!
//! The deterministic core is free-space path loss plus a simple antenna
//! penalty (a null straight overhead and a small loss proportional to the
//! airframe tilt). On top of it sit zero-mean Gaussian noise in the dB domain
//! and an optional two-state Markov burst fade that models receiver dropout.
//!
//! The confidence value attached to every measurement is a stand-in for the
//! sounder's quality metric, which is not published: SNR above the noise
//! floor mapped linearly onto `[0, 1]` over 40 dB, scaled down by a random
//! factor in `[0.2, 0.6]` while a fade is active.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geodesy::{to_enu, EnuPoint, GeoPoint};
use crate::rng::{self, StreamRng};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Distances below this are clamped before evaluating path loss.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// SNR span mapped onto the unit confidence range.
const CONFIDENCE_SPAN_DB: f64 = 40.0;
const FADE_CONFIDENCE_FACTOR: (f64, f64) = (0.2, 0.6);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelProfile {
    /// Clean digital-twin channel: 10 dB noise, no fades.
    #[serde(rename = "emulator")]
    Emulator,
    /// Field-like channel: 5 dB noise plus 30-40 dB burst fades.
    #[serde(rename = "testbed")]
    Testbed,
    /// Deterministic channel: no noise, no fades.
    #[serde(rename = "ideal")]
    Ideal,
}

impl ChannelProfile {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "emulator" => Some(Self::Emulator),
            "testbed" => Some(Self::Testbed),
            "ideal" => Some(Self::Ideal),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Emulator => "emulator",
            Self::Testbed => "testbed",
            Self::Ideal => "ideal",
        }
    }

    pub fn params(self) -> ChannelParams {
        let base = ChannelParams::default();
        match self {
            Self::Emulator => base,
            Self::Testbed => ChannelParams {
                noise_sigma_db: 5.0,
                fades_enabled: true,
                ..base
            },
            Self::Ideal => ChannelParams {
                noise_sigma_db: 0.0,
                fades_enabled: false,
                ..base
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub freq_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_sigma_db: f64,
    pub fades_enabled: bool,
    pub fade_depth_db: (f64, f64),
    pub fade_enter_prob: f64,
    pub fade_exit_prob: f64,
    pub overhead_null_db: f64,
    pub tilt_penalty_db_per_deg: f64,
    pub noise_floor_dbm: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            freq_hz: 3.4e9,
            tx_power_dbm: 20.0,
            noise_sigma_db: 10.0,
            fades_enabled: false,
            fade_depth_db: (30.0, 40.0),
            fade_enter_prob: 0.05,
            fade_exit_prob: 0.30,
            overhead_null_db: 10.0,
            tilt_penalty_db_per_deg: 0.3,
            noise_floor_dbm: -95.0,
        }
    }
}

impl ChannelParams {
    /// Returns the name of the first offending field, if any.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !(self.freq_hz > 0.0 && self.freq_hz.is_finite()) {
            return Err(("freq_hz", "must be positive".into()));
        }
        if !(self.noise_sigma_db >= 0.0 && self.noise_sigma_db.is_finite()) {
            return Err(("noise_sigma_db", "must be >= 0".into()));
        }
        if !(self.fade_depth_db.0 <= self.fade_depth_db.1 && self.fade_depth_db.0 >= 0.0) {
            return Err(("fade_depth_db", "need 0 <= min <= max".into()));
        }
        if !prob(self.fade_enter_prob) {
            return Err(("fade_enter_prob", "must be in [0, 1]".into()));
        }
        if !prob(self.fade_exit_prob) {
            return Err(("fade_exit_prob", "must be in [0, 1]".into()));
        }
        if !(self.overhead_null_db >= 0.0) {
            return Err(("overhead_null_db", "must be >= 0".into()));
        }
        if !(self.tilt_penalty_db_per_deg >= 0.0) {
            return Err(("tilt_penalty_db_per_deg", "must be >= 0".into()));
        }
        if !self.tx_power_dbm.is_finite() || !self.noise_floor_dbm.is_finite() {
            return Err(("tx_power_dbm", "must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FadeState {
    pub in_fade: bool,
    pub current_depth_db: f64,
    rng: StreamRng,
}

impl FadeState {
    pub fn new(seed: u64) -> Self {
        Self {
            in_fade: false,
            current_depth_db: 0.0,
            rng: rng::stream(seed, rng::CHANNEL_FADE),
        }
    }

    /// One Markov step. Always consumes three uniforms so that the stream
    /// position depends only on the number of samples taken.
    fn advance(&mut self, p: &ChannelParams) -> f64 {
        let u: f64 = self.rng.random();
        let depth_u: f64 = self.rng.random();
        let factor_u: f64 = self.rng.random();
        if !p.fades_enabled {
            self.in_fade = false;
        } else if self.in_fade {
            if u < p.fade_exit_prob {
                self.in_fade = false;
            }
        } else if u < p.fade_enter_prob {
            self.in_fade = true;
            let (lo, hi) = p.fade_depth_db;
            self.current_depth_db = lo + depth_u * (hi - lo);
        }
        if !self.in_fade {
            self.current_depth_db = 0.0;
        }
        let (lo, hi) = FADE_CONFIDENCE_FACTOR;
        lo + factor_u * (hi - lo)
    }
}

/// Full per-episode channel state: fade process plus the noise stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    pub fade: FadeState,
    noise_rng: StreamRng,
}

impl ChannelState {
    pub fn new(seed: u64) -> Self {
        Self {
            fade: FadeState::new(seed),
            noise_rng: rng::stream(seed, rng::CHANNEL_NOISE),
        }
    }

    /// In-place variant of [`sample_measurement`].
    pub fn sample(
        &mut self,
        params: &ChannelParams,
        tx: &GeoPoint,
        rx: &GeoPoint,
        tilt_deg: f64,
        t: f64,
    ) -> Measurement {
        let factor = self.fade.advance(params);
        let z: f64 = StandardNormal.sample(&mut self.noise_rng);
        let rel = to_enu(rx, tx);
        let det = deterministic_rssi_dbm(params, &rel, tilt_deg);
        let rssi = (det - self.fade.current_depth_db + params.noise_sigma_db * z)
            .max(params.noise_floor_dbm);
        let mut confidence = snr_confidence(rssi, params.noise_floor_dbm);
        if self.fade.in_fade {
            confidence *= factor;
        }
        Measurement {
            t,
            rx_pos: *rx,
            rssi_dbm: rssi,
            confidence,
        }
    }
}

/// One sounder reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub t: f64,
    pub rx_pos: GeoPoint,
    pub rssi_dbm: f64,
    pub confidence: f64,
}

/// Free-space path loss in dB, with distance clamped to [`MIN_DISTANCE_M`].
pub fn fspl_db(d: f64, freq_hz: f64) -> f64 {
    let d = d.max(MIN_DISTANCE_M);
    20.0 * (4.0 * std::f64::consts::PI * d * freq_hz / SPEED_OF_LIGHT).log10()
}

/// Elevation of `rx` seen from the transmitter, in degrees (90 = zenith).
pub fn elevation_deg(rx: &EnuPoint) -> f64 {
    let horiz = rx.x.hypot(rx.y);
    rx.z.atan2(horiz).to_degrees()
}

/// Non-positive antenna gain for a receiver at `rx` relative to the
/// transmitter: a linear null ramp above 60 deg elevation plus a tilt loss.
pub fn antenna_gain_db(params: &ChannelParams, rx: &EnuPoint, tilt_deg: f64) -> f64 {
    let elev = elevation_deg(rx);
    let null = params.overhead_null_db * ((elev - 60.0) / 30.0).max(0.0);
    let tilt = params.tilt_penalty_db_per_deg * tilt_deg.max(0.0);
    -(null + tilt)
}

/// Received power with every random impairment removed (noise floor not
/// applied).
pub fn deterministic_rssi_dbm(params: &ChannelParams, rx_rel_tx: &EnuPoint, tilt_deg: f64) -> f64 {
    let d = rx_rel_tx.distance(&EnuPoint::default());
    params.tx_power_dbm - fspl_db(d, params.freq_hz) + antenna_gain_db(params, rx_rel_tx, tilt_deg)
}

pub fn snr_confidence(rssi_dbm: f64, noise_floor_dbm: f64) -> f64 {
    ((rssi_dbm - noise_floor_dbm) / CONFIDENCE_SPAN_DB).clamp(0.0, 1.0)
}

/// Pure transition: `(geometry, state) -> (measurement, next state)`.
pub fn sample_measurement(
    tx: &GeoPoint,
    rx: &GeoPoint,
    tilt_deg: f64,
    params: &ChannelParams,
    state: &ChannelState,
    t: f64,
) -> (Measurement, ChannelState) {
    let mut next = state.clone();
    let m = next.sample(params, tx, rx, tilt_deg, t);
    (m, next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesy::to_geo;
    use proptest::prelude::*;

    const TX: GeoPoint = GeoPoint {
        lat: 35.7,
        lon: -78.7,
        alt: 0.0,
    };

    /// Textbook form with the distance in km and frequency in MHz.
    fn fspl_oracle(d_m: f64, f_hz: f64) -> f64 {
        32.45 + 20.0 * (f_hz / 1e6).log10() + 20.0 * (d_m / 1000.0).log10()
    }

    #[test]
    fn path_loss_reference_points() {
        for (d, expect) in [(1.0, 43.08), (100.0, 83.08)] {
            let got = fspl_db(d, 3.4e9);
            assert!((got - expect).abs() < 0.01, "{d} m: {got}");
            assert!((got - fspl_oracle(d, 3.4e9)).abs() < 0.01);
        }
        assert_eq!(fspl_db(0.0, 3.4e9), fspl_db(1.0, 3.4e9));
    }

    #[test]
    fn antenna_penalties() {
        let p = ChannelParams::default();
        assert_eq!(antenna_gain_db(&p, &EnuPoint::new(500.0, 0.0, 0.0), 0.0), 0.0);
        assert!((antenna_gain_db(&p, &EnuPoint::new(0.0, 0.0, 50.0), 0.0) + 10.0).abs() < 1e-12);
        let h = 30.0;
        let at60 = EnuPoint::new(h / 60f64.to_radians().tan(), 0.0, h);
        assert!((antenna_gain_db(&p, &at60, 5.0) + 1.5).abs() < 1e-9);
    }

    #[test]
    fn clean_channel_at_100m() {
        let p = ChannelProfile::Ideal.params();
        let rx = to_geo(&EnuPoint::new(100.0, 0.0, 0.0), &TX);
        let st = ChannelState::new(1);
        let (m, _) = sample_measurement(&TX, &rx, 0.0, &p, &st, 0.0);
        assert!((m.rssi_dbm + 63.08).abs() < 0.01, "{}", m.rssi_dbm);
    }

    #[test]
    fn floor_clamp_zeroes_confidence() {
        let p = ChannelProfile::Ideal.params();
        let rx = to_geo(&EnuPoint::new(9_000.0, 0.0, 0.0), &TX);
        let (m, _) = sample_measurement(&TX, &rx, 0.0, &p, &ChannelState::new(1), 0.0);
        assert_eq!(m.rssi_dbm, p.noise_floor_dbm);
        assert_eq!(m.confidence, 0.0);
    }

    #[test]
    fn identical_state_identical_output() {
        let p = ChannelProfile::Testbed.params();
        let rx = to_geo(&EnuPoint::new(80.0, 40.0, 30.0), &TX);
        let st = ChannelState::new(99);
        let a = sample_measurement(&TX, &rx, 2.0, &p, &st, 1.0);
        let b = sample_measurement(&TX, &rx, 2.0, &p, &st, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn disabling_fades_leaves_noise_draws_untouched() {
        let rx = to_geo(&EnuPoint::new(80.0, 40.0, 30.0), &TX);
        let with = ChannelProfile::Testbed.params();
        let without = ChannelParams {
            fades_enabled: false,
            ..with
        };
        let mut a = ChannelState::new(5);
        let mut b = ChannelState::new(5);
        for i in 0..500 {
            let ma = a.sample(&with, &TX, &rx, 0.0, i as f64);
            let mb = b.sample(&without, &TX, &rx, 0.0, i as f64);
            if !a.fade.in_fade && ma.rssi_dbm > with.noise_floor_dbm {
                assert_eq!(ma.rssi_dbm, mb.rssi_dbm);
            }
        }
    }

    #[test]
    fn noise_statistics_match_sigma() {
        let p = ChannelProfile::Emulator.params();
        let rx = to_geo(&EnuPoint::new(100.0, 0.0, 30.0), &TX);
        let det = deterministic_rssi_dbm(&p, &to_enu(&rx, &TX), 0.0);
        let mut st = ChannelState::new(3);
        let n = 20_000;
        let xs: Vec<f64> = (0..n)
            .map(|i| st.sample(&p, &TX, &rx, 0.0, i as f64).rssi_dbm)
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - det).abs() < 0.5, "mean {mean} vs {det}");
        assert!((9.5..=10.5).contains(&var.sqrt()), "sd {}", var.sqrt());
    }

    #[test]
    fn stationary_fade_fraction() {
        let p = ChannelProfile::Testbed.params();
        let mut fs = FadeState::new(11);
        let n = 200_000;
        let mut in_fade = 0usize;
        for _ in 0..n {
            fs.advance(&p);
            if fs.in_fade {
                in_fade += 1;
                assert!((30.0..=40.0).contains(&fs.current_depth_db));
            } else {
                assert_eq!(fs.current_depth_db, 0.0);
            }
        }
        let frac = in_fade as f64 / n as f64;
        let expect = 0.05 / 0.35;
        assert!((frac - expect).abs() < 0.02, "{frac}");
    }

    proptest! {
        #[test]
        fn doubling_distance_adds_6db(d in 1.0..5_000.0f64) {
            let delta = fspl_db(2.0 * d, 3.4e9) - fspl_db(d, 3.4e9);
            prop_assert!((delta - 20.0 * 2f64.log10()).abs() < 1e-9);
        }

        #[test]
        fn clean_rssi_decreasing_in_range(d in 1.0..2_000.0f64, extra in 0.01..500.0f64) {
            let p = ChannelParams { overhead_null_db: 0.0, ..ChannelProfile::Ideal.params() };
            let near = deterministic_rssi_dbm(&p, &EnuPoint::new(d, 0.0, 0.0), 0.0);
            let far = deterministic_rssi_dbm(&p, &EnuPoint::new(d + extra, 0.0, 0.0), 0.0);
            prop_assert!(far < near);
        }

        #[test]
        fn confidence_in_unit_range_and_monotone_in_depth(
            seed in 0u64..1000, x in -400.0..400.0f64, y in -400.0..400.0f64, d1 in 30.0..40.0f64, d2 in 30.0..40.0f64
        ) {
            let p = ChannelProfile::Testbed.params();
            let rx = to_geo(&EnuPoint::new(x, y, 40.0), &TX);
            let mut st = ChannelState::new(seed);
            for i in 0..20 {
                let m = st.sample(&p, &TX, &rx, 3.0, i as f64);
                prop_assert!((0.0..=1.0).contains(&m.confidence));
                prop_assert!(m.rssi_dbm >= p.noise_floor_dbm);
            }
            // same draw, deeper fade -> no higher confidence
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            let mk = |depth: f64| {
                let mut s = ChannelState::new(seed);
                s.fade.in_fade = true;
                s.fade.current_depth_db = depth;
                let q = ChannelParams { fade_exit_prob: 0.0, fade_depth_db: (depth, depth), ..p };
                s.sample(&q, &TX, &rx, 0.0, 0.0).confidence
            };
            prop_assert!(mk(hi) <= mk(lo));
        }
    }
}
