//! Competition scoring over a flight log.

use serde::Serialize;

use super::log::FlightLog;
use super::HarnessError;
use crate::geodesy::{horizontal_distance, to_enu, GeoPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreReport {
    pub fast_error_m: f64,
    pub final_error_m: f64,
    pub fast_estimate: GeoPoint,
    pub final_estimate: GeoPoint,
    pub distance_flown_m: f64,
    pub samples_accepted: usize,
    pub samples_rejected: usize,
}

/// Mean of per-location errors, the way competition averages were formed.
pub fn competition_average(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return f64::NAN;
    }
    errors.iter().sum::<f64>() / errors.len() as f64
}

/// Median with the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Logged estimate at time `t` (matched to within a microsecond).
pub fn snapshot_at(log: &FlightLog, t: f64) -> Option<GeoPoint> {
    log.records
        .iter()
        .find(|r| (r.t - t).abs() < 1e-6)
        .map(|r| GeoPoint::new(r.est_lat, r.est_lon, 0.0))
}

/// Scores a log against the true rover position.
pub fn score_log(
    log: &FlightLog,
    rover: &GeoPoint,
    fast_deadline_s: f64,
    final_deadline_s: f64,
) -> Result<ScoreReport, HarnessError> {
    let last_t = log.records.last().map_or(0.0, |r| r.t);
    let fast = snapshot_at(log, fast_deadline_s).ok_or(HarnessError::IncompleteFast(last_t))?;
    let fin = snapshot_at(log, final_deadline_s).ok_or(HarnessError::IncompleteFinal(last_t))?;
    let mut flown = 0.0;
    for w in log.records.windows(2) {
        let a = GeoPoint::new(w[0].lat, w[0].lon, w[0].alt);
        let b = GeoPoint::new(w[1].lat, w[1].lon, w[1].alt);
        let e = to_enu(&b, &a);
        flown += (e.x * e.x + e.y * e.y + e.z * e.z).sqrt();
    }
    let accepted = log.records.iter().filter(|r| r.accepted).count();
    Ok(ScoreReport {
        fast_error_m: horizontal_distance(&fast, rover),
        final_error_m: horizontal_distance(&fin, rover),
        fast_estimate: fast,
        final_estimate: fin,
        distance_flown_m: flown,
        samples_accepted: accepted,
        samples_rejected: log.records.len() - accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesy::{to_geo, EnuPoint};
    use crate::harness::log::LogRecord;

    const ORIGIN: GeoPoint = GeoPoint {
        lat: 35.7275,
        lon: -78.696,
        alt: 0.0,
    };

    fn rec(t: f64, est: &GeoPoint) -> LogRecord {
        LogRecord {
            t,
            lat: ORIGIN.lat,
            lon: ORIGIN.lon,
            alt: 30.0,
            tilt_deg: 0.0,
            rssi_dbm: -70.0,
            confidence: 0.5,
            accepted: t > 200.0,
            est_lat: est.lat,
            est_lon: est.lon,
            phase: "x".into(),
        }
    }

    #[test]
    fn hand_built_log() {
        let rover = to_geo(&EnuPoint::flat(30.0, 40.0), &ORIGIN);
        let log = FlightLog {
            records: vec![rec(180.0, &ORIGIN), rec(600.0, &rover)],
        };
        let s = score_log(&log, &rover, 180.0, 600.0).unwrap();
        assert!((s.fast_error_m - 50.0).abs() < 0.01);
        assert!(s.final_error_m.abs() < 1e-9);
        assert_eq!((s.samples_accepted, s.samples_rejected), (1, 1));
        assert_eq!(s.distance_flown_m, 0.0);
    }

    #[test]
    fn truncated_logs_are_incomplete() {
        let log = FlightLog {
            records: vec![rec(100.0, &ORIGIN)],
        };
        assert!(matches!(
            score_log(&log, &ORIGIN, 180.0, 600.0),
            Err(HarnessError::IncompleteFast(_))
        ));
        let log = FlightLog {
            records: vec![rec(180.0, &ORIGIN), rec(300.0, &ORIGIN)],
        };
        assert!(matches!(
            score_log(&log, &ORIGIN, 180.0, 600.0),
            Err(HarnessError::IncompleteFinal(_))
        ));
    }

    #[test]
    fn averaging_and_medians() {
        assert!((competition_average(&[1.97, 2.7, 3.1]) - 2.59).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
