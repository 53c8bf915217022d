//! Multi-seed benchmark over the hiding locations.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use super::score::{competition_average, median, ScoreReport};
use super::{run_episode, EpisodeConfig, HarnessError};
use crate::geodesy::GeoPoint;
use crate::strategies::StrategyKind;

#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub strategy: StrategyKind,
    /// Zero-based location index.
    pub location: usize,
    pub seed: u64,
    pub result: Result<ScoreReport, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategySummary {
    pub strategy: StrategyKind,
    /// Per-location median errors.
    pub fast_median_m: Vec<f64>,
    pub final_median_m: Vec<f64>,
    /// Competition average of the per-location medians.
    pub fast_average_m: f64,
    pub final_average_m: f64,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub locations: Vec<GeoPoint>,
    pub seeds: Vec<u64>,
    pub strategies: Vec<StrategyKind>,
    /// Ordered by (strategy, location, seed).
    pub episodes: Vec<EpisodeOutcome>,
}

/// Runs every (strategy, location, seed) combination in parallel. Failed
/// episodes are recorded rather than aborting the batch.
pub fn run_benchmark(
    base: &EpisodeConfig,
    strategies: &[StrategyKind],
    locations: &[GeoPoint],
    seeds: &[u64],
) -> BenchmarkReport {
    let mut jobs = Vec::new();
    for &s in strategies {
        for l in 0..locations.len() {
            for &seed in seeds {
                jobs.push((s, l, seed));
            }
        }
    }
    let episodes = jobs
        .par_iter()
        .map(|&(strategy, location, seed)| {
            let cfg = EpisodeConfig {
                strategy,
                rover_pos: locations[location],
                seed,
                ..base.clone()
            };
            let result = run_episode(&cfg)
                .map(|(r, _)| r)
                .map_err(|e: HarnessError| e.to_string());
            EpisodeOutcome {
                strategy,
                location,
                seed,
                result,
            }
        })
        .collect();
    BenchmarkReport {
        locations: locations.to_vec(),
        seeds: seeds.to_vec(),
        strategies: strategies.to_vec(),
        episodes,
    }
}

impl BenchmarkReport {
    fn reports(&self, s: StrategyKind, loc: usize) -> impl Iterator<Item = &ScoreReport> {
        self.episodes
            .iter()
            .filter(move |e| e.strategy == s && e.location == loc)
            .filter_map(|e| e.result.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &EpisodeOutcome> {
        self.episodes.iter().filter(|e| e.result.is_err())
    }

    pub fn summary(&self, s: StrategyKind) -> StrategySummary {
        let n = self.locations.len();
        let fast: Vec<f64> = (0..n)
            .map(|l| median(&self.reports(s, l).map(|r| r.fast_error_m).collect::<Vec<_>>()))
            .collect();
        let fin: Vec<f64> = (0..n)
            .map(|l| median(&self.reports(s, l).map(|r| r.final_error_m).collect::<Vec<_>>()))
            .collect();
        StrategySummary {
            strategy: s,
            fast_average_m: competition_average(&fast),
            final_average_m: competition_average(&fin),
            fast_median_m: fast,
            final_median_m: fin,
            failures: self
                .failures()
                .filter(|e| e.strategy == s)
                .count(),
        }
    }

    /// Competition average per seed: `(seed, fast_avg, final_avg)`. Seeds
    /// with any failed location are skipped.
    pub fn per_seed_averages(&self, s: StrategyKind) -> Vec<(u64, f64, f64)> {
        let n = self.locations.len();
        self.seeds
            .iter()
            .filter_map(|&seed| {
                let rs: Vec<&ScoreReport> = self
                    .episodes
                    .iter()
                    .filter(|e| e.strategy == s && e.seed == seed)
                    .filter_map(|e| e.result.as_ref().ok())
                    .collect();
                (rs.len() == n).then(|| {
                    let f: Vec<f64> = rs.iter().map(|r| r.fast_error_m).collect();
                    let g: Vec<f64> = rs.iter().map(|r| r.final_error_m).collect();
                    (seed, competition_average(&f), competition_average(&g))
                })
            })
            .collect()
    }

    /// Median over seeds of the per-seed final average.
    pub fn median_final_average(&self, s: StrategyKind) -> f64 {
        median(&self.per_seed_averages(s).iter().map(|a| a.2).collect::<Vec<_>>())
    }

    /// Per-episode CSV: `strategy,location,seed,fast_error_m,final_error_m`.
    /// Failed episodes are omitted.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(["strategy", "location", "seed", "fast_error_m", "final_error_m"])?;
        for e in &self.episodes {
            if let Ok(r) = &e.result {
                out.write_record([
                    e.strategy.name().to_string(),
                    (e.location + 1).to_string(),
                    e.seed.to_string(),
                    super::fmt_sig9(r.fast_error_m),
                    super::fmt_sig9(r.final_error_m),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Text table laid out like the competition results: per-location
    /// median errors and their averages, one row per strategy.
    pub fn table(&self) -> String {
        let n = self.locations.len();
        let mut head = vec!["Strategy".to_string()];
        head.extend((1..=n).map(|i| format!("Fast {i}")));
        head.push("Fast Average".into());
        head.extend((1..=n).map(|i| format!("Final {i}")));
        head.push("Final Average".into());
        let mut rows = vec![head];
        for &s in &self.strategies {
            let m = self.summary(s);
            let mut row = vec![s.name().to_string()];
            row.extend(m.fast_median_m.iter().map(|v| format!("{v:.2}")));
            row.push(format!("{:.2}", m.fast_average_m));
            row.extend(m.final_median_m.iter().map(|v| format!("{v:.2}")));
            row.push(format!("{:.2}", m.final_average_m));
            rows.push(row);
        }
        let cols = rows[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, r) in rows.iter().enumerate() {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(c, v)| {
                    if c == 0 {
                        format!("{v:<w$}", w = widths[c])
                    } else {
                        format!("{v:>w$}", w = widths[c])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
            if i == 0 {
                let total = widths.iter().sum::<usize>() + 2 * (cols - 1);
                let _ = writeln!(out, "{}", "-".repeat(total));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesy::GeoPoint;

    fn fake(errors: &[(StrategyKind, usize, u64, f64)]) -> BenchmarkReport {
        let p = GeoPoint::new(0.0, 0.0, 0.0);
        BenchmarkReport {
            locations: vec![p; 3],
            seeds: vec![1, 2],
            strategies: vec![StrategyKind::Baseline],
            episodes: errors
                .iter()
                .map(|&(strategy, location, seed, e)| EpisodeOutcome {
                    strategy,
                    location,
                    seed,
                    result: Ok(ScoreReport {
                        fast_error_m: 2.0 * e,
                        final_error_m: e,
                        fast_estimate: p,
                        final_estimate: p,
                        distance_flown_m: 0.0,
                        samples_accepted: 0,
                        samples_rejected: 0,
                    }),
                })
                .collect(),
        }
    }

    #[test]
    fn summary_and_table() {
        let b = StrategyKind::Baseline;
        let r = fake(&[
            (b, 0, 1, 1.0),
            (b, 0, 2, 3.0),
            (b, 1, 1, 10.0),
            (b, 1, 2, 10.0),
            (b, 2, 1, 5.0),
            (b, 2, 2, 7.0),
        ]);
        let s = r.summary(b);
        assert_eq!(s.final_median_m, vec![2.0, 10.0, 6.0]);
        assert!((s.final_average_m - 6.0).abs() < 1e-12);
        assert_eq!(r.per_seed_averages(b), vec![(1, 32.0 / 3.0, 16.0 / 3.0), (2, 40.0 / 3.0, 20.0 / 3.0)]);
        let t = r.table();
        let head = t.lines().next().unwrap();
        let cols: Vec<&str> = head.split("  ").map(str::trim).filter(|c| !c.is_empty()).collect();
        assert_eq!(
            cols,
            ["Strategy", "Fast 1", "Fast 2", "Fast 3", "Fast Average", "Final 1", "Final 2", "Final 3", "Final Average"]
        );
        assert!(t.contains("6.00"));
    }

    #[test]
    fn csv_rows_in_order() {
        let b = StrategyKind::Baseline;
        let r = fake(&[(b, 0, 1, 1.5), (b, 1, 1, 2.5)]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "strategy,location,seed,fast_error_m,final_error_m\nbaseline,1,1,3,1.5\nbaseline,2,1,5,2.5\n"
        );
    }
}
