//! Plot-ready data derived from a flight log.

use std::io::Write;

use super::log::{fmt_sig9, FlightLog};
use super::{EpisodeConfig, HarnessError};
use crate::geodesy::{horizontal_distance, to_enu, EnuPoint, GeoPoint};
use crate::gp::{GpError, GpModel, RadioMapGrid};
use crate::strategies::{ObsAccumulator, StrategyKind};

/// One point of the error-vs-time curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPoint {
    pub t: f64,
    pub error_m: f64,
    /// `"fast"` or `"final"` on the scoring deadlines, empty otherwise.
    pub marker: &'static str,
}

pub fn error_series(log: &FlightLog, cfg: &EpisodeConfig) -> Vec<ErrorPoint> {
    log.records
        .iter()
        .map(|r| {
            let est = GeoPoint::new(r.est_lat, r.est_lon, 0.0);
            let marker = if (r.t - cfg.fast_deadline_s).abs() < 1e-6 {
                "fast"
            } else if (r.t - cfg.duration_s).abs() < 1e-6 {
                "final"
            } else {
                ""
            };
            ErrorPoint {
                t: r.t,
                error_m: horizontal_distance(&est, &cfg.rover_pos),
                marker,
            }
        })
        .collect()
}

pub fn write_error_csv<W: Write>(points: &[ErrorPoint], w: W) -> Result<(), HarnessError> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(["t", "error_m", "marker"])?;
    for p in points {
        out.write_record([fmt_sig9(p.t), fmt_sig9(p.error_m), p.marker.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Rebuilds the rover-fence radio map from the accepted readings in a log,
/// averaged the way the strategy averaged them. `None` for strategies that
/// keep no map.
pub fn radio_map_from_log(
    log: &FlightLog,
    cfg: &EpisodeConfig,
) -> Option<Result<RadioMapGrid, GpError>> {
    let obs = match cfg.strategy {
        StrategyKind::NyuBo => cfg.params.nyu_bo.obs_samples,
        StrategyKind::UgaGp => cfg.params.uga_gp.obs_samples,
        _ => return None,
    };
    let origin = cfg.origin();
    let gp = cfg.params.gp;
    let mut model = GpModel::new(gp.kernel());
    let mut acc = ObsAccumulator::new(obs);
    for r in log.records.iter().filter(|r| r.accepted) {
        let p = to_enu(&GeoPoint::new(r.lat, r.lon, 0.0), &origin);
        if let Some((pos, avg)) = acc.push(EnuPoint::flat(p.x, p.y), r.rssi_dbm) {
            if let Err(e) = model.push(pos, avg) {
                return Some(Err(e));
            }
        }
    }
    Some(Ok(RadioMapGrid::evaluate(
        cfg.rover_fence,
        origin,
        gp.grid_nx,
        gp.grid_ny,
        &model,
    )))
}

/// Grid CSV: `lon,lat,mean_dbm,var_db2`, row-major from the south-west node.
pub fn write_radio_map_csv<W: Write>(grid: &RadioMapGrid, w: W) -> Result<(), HarnessError> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(["lon", "lat", "mean_dbm", "var_db2"])?;
    for (i, c) in grid.cells().iter().enumerate() {
        let g = grid.node_geo(i);
        out.write_record([
            fmt_sig9(g.lon),
            fmt_sig9(g.lat),
            fmt_sig9(c.mean_dbm),
            fmt_sig9(c.var_db2),
        ])?;
    }
    out.flush()?;
    Ok(())
}
