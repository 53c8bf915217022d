//! Flight log records and their CSV form.

use std::io::{Read, Write};

use super::HarnessError;

pub const LOG_HEADER: [&str; 11] = [
    "t",
    "lat",
    "lon",
    "alt",
    "tilt_deg",
    "rssi_dbm",
    "confidence",
    "accepted",
    "est_lat",
    "est_lon",
    "phase",
];

/// One logged measurement tick. Floats are stored already rounded to nine
/// significant digits so a CSV round trip is lossless.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub t: f64,
    pub lat: f64,
    pub lon: f64,
    pub alt: f64,
    pub tilt_deg: f64,
    pub rssi_dbm: f64,
    pub confidence: f64,
    pub accepted: bool,
    pub est_lat: f64,
    pub est_lon: f64,
    pub phase: String,
}

impl LogRecord {
    /// Rounds every float field to its logged precision.
    pub fn rounded(mut self) -> Self {
        for v in [
            &mut self.t,
            &mut self.lat,
            &mut self.lon,
            &mut self.alt,
            &mut self.tilt_deg,
            &mut self.rssi_dbm,
            &mut self.confidence,
            &mut self.est_lat,
            &mut self.est_lon,
        ] {
            *v = round_sig9(*v);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlightLog {
    pub records: Vec<LogRecord>,
}

/// `%.9g`-style formatting.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let mant = trim_zeros(mant);
        return format!("{mant}e{exp}");
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_sig9(x).parse().expect("formatted float parses")
}

impl FlightLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(LOG_HEADER)?;
        for r in &self.records {
            let f = fmt_sig9;
            out.write_record([
                f(r.t),
                f(r.lat),
                f(r.lon),
                f(r.alt),
                f(r.tilt_deg),
                f(r.rssi_dbm),
                f(r.confidence),
                if r.accepted { "1" } else { "0" }.to_string(),
                f(r.est_lat),
                f(r.est_lon),
                r.phase.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Parses a log, checking the header and that time strictly increases.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, HarnessError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let header = rdr.headers()?.clone();
        if header.iter().ne(LOG_HEADER) {
            return Err(HarnessError::Schema {
                expected: LOG_HEADER.join(","),
                found: header.iter().collect::<Vec<_>>().join(","),
            });
        }
        let mut records = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let line = i + 2;
            let num = |k: usize| -> Result<f64, HarnessError> {
                row[k].parse::<f64>().map_err(|_| HarnessError::Parse {
                    line,
                    field: LOG_HEADER[k],
                    value: row[k].to_string(),
                })
            };
            let accepted = match &row[7] {
                "1" => true,
                "0" => false,
                v => {
                    return Err(HarnessError::Parse {
                        line,
                        field: "accepted",
                        value: v.to_string(),
                    })
                }
            };
            let rec = LogRecord {
                t: num(0)?,
                lat: num(1)?,
                lon: num(2)?,
                alt: num(3)?,
                tilt_deg: num(4)?,
                rssi_dbm: num(5)?,
                confidence: num(6)?,
                accepted,
                est_lat: num(8)?,
                est_lon: num(9)?,
                phase: row[10].to_string(),
            };
            if records.last().is_some_and(|p: &LogRecord| rec.t <= p.t) {
                return Err(HarnessError::Order(line));
            }
            records.push(rec);
        }
        Ok(Self { records })
    }
}
