//! Command-line front end. Each subcommand is a plain function returning
//! the process exit code: 0 success, 1 runtime failure, 2 configuration
//! error.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::channel::ChannelProfile;
use crate::config::{self, ConfigError, Overrides, RunConfigFile};
use crate::harness::{
    error_series, flight_geojson, radio_map_from_log, replay, run_benchmark, run_episode,
    write_error_csv, write_radio_map_csv, EpisodeConfig, FlightLog, HarnessError, ScoreReport,
};
use crate::strategies::StrategyKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "afar", version, about = "UAV transmitter-search digital twin")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode and write its log, GeoJSON track and score summary.
    Run(RunArgs),
    /// Run every strategy/location/seed combination and tabulate errors.
    Bench(BenchArgs),
    /// Rescore a flight log.
    Replay(ReplayArgs),
    /// Error-vs-time CSV and, for GP strategies, the reconstructed radio map.
    PlotData(PlotArgs),
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    StrategyKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = StrategyKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown strategy `{s}` (expected one of: {})", names.join(", "))
    })
}

fn parse_profile(s: &str) -> Result<ChannelProfile, String> {
    ChannelProfile::parse(s)
        .ok_or_else(|| format!("unknown channel profile `{s}` (expected emulator, testbed or ideal)"))
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for every output file
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Master seed (overrides `seed`)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Channel profile: emulator, testbed or ideal (overrides `channel_profile`)
    #[arg(long, value_parser = parse_profile)]
    pub channel_profile: Option<ChannelProfile>,
    /// Suppress standard output
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Strategy (overrides `strategy`)
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<StrategyKind>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Seeds per location, counting up from the master seed
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// Comma-separated strategies (default: all)
    #[arg(long)]
    pub strategies: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Flight log CSV
    pub log: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<StrategyKind>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Flight log CSV
    pub log: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Strategy that produced the log (overrides `strategy`)
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<StrategyKind>,
}

/// The clap command with the configuration reference appended to `--help`.
pub fn command() -> clap::Command {
    let reference = format!("Configuration keys and defaults:\n\n{}", config::reference());
    Cli::command()
        .after_long_help(reference.clone())
        .mut_subcommands(|c| c.after_long_help(reference.clone()))
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_CONFIG;
        }
    };
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Replay(a) => cmd_replay(a),
        Command::PlotData(a) => cmd_plot_data(a),
    }
}

fn load(common: &CommonArgs) -> Result<RunConfigFile, ConfigError> {
    match &common.config {
        Some(p) => RunConfigFile::load(p),
        None => Ok(RunConfigFile::default()),
    }
}

fn overrides(common: &CommonArgs, strategy: Option<StrategyKind>) -> Overrides {
    Overrides {
        strategy,
        seed: common.seed,
        channel_profile: common.channel_profile,
    }
}

fn episode_config(common: &CommonArgs, strategy: Option<StrategyKind>) -> Result<EpisodeConfig, i32> {
    load(common)
        .and_then(|f| f.episode(&overrides(common, strategy)))
        .map_err(|e| {
            eprintln!("error: {e}");
            EXIT_CONFIG
        })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, HarnessError> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn runtime<T>(r: Result<T, HarnessError>) -> Result<T, i32> {
    r.map_err(|e| {
        eprintln!("error: {e}");
        EXIT_RUNTIME
    })
}

/// Human-readable episode summary.
pub fn score_summary(cfg: &EpisodeConfig, r: &ScoreReport) -> String {
    let ch = &cfg.channel;
    format!(
        "strategy        {}\n\
         seed            {}\n\
         channel         noise sigma {} dB, fades {}\n\
         fast error      {:.2} m at t = {} s\n\
         final error     {:.2} m at t = {} s\n\
         fast estimate   {:.7}, {:.7}\n\
         final estimate  {:.7}, {:.7}\n\
         distance flown  {:.0} m\n\
         samples         {} accepted, {} rejected\n",
        cfg.strategy,
        cfg.seed,
        ch.noise_sigma_db,
        if ch.fades_enabled { "on" } else { "off" },
        r.fast_error_m,
        cfg.fast_deadline_s,
        r.final_error_m,
        cfg.duration_s,
        r.fast_estimate.lat,
        r.fast_estimate.lon,
        r.final_estimate.lat,
        r.final_estimate.lon,
        r.distance_flown_m,
        r.samples_accepted,
        r.samples_rejected,
    )
}

pub fn cmd_run(a: &RunArgs) -> i32 {
    let cfg = match episode_config(&a.common, a.strategy) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let out = &a.common.out_dir;
    let result = (|| -> Result<String, HarnessError> {
        let (report, log) = run_episode(&cfg)?;
        log.write_csv(create(out, "flight_log.csv")?)?;
        let geo = flight_geojson(&log, &report, &cfg.rover_pos);
        serde_json::to_writer_pretty(create(out, "flight.geojson")?, &geo)
            .map_err(std::io::Error::other)?;
        let summary = score_summary(&cfg, &report);
        std::fs::write(out.join("score.txt"), &summary)?;
        Ok(summary)
    })();
    match runtime(result) {
        Ok(summary) => {
            if !a.common.quiet {
                print!("{summary}");
            }
            EXIT_OK
        }
        Err(code) => code,
    }
}

pub fn cmd_bench(a: &BenchArgs) -> i32 {
    let strategies = match &a.strategies {
        None => StrategyKind::ALL.to_vec(),
        Some(list) => {
            let parsed: Result<Vec<_>, _> = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(parse_strategy)
                .collect();
            match parsed {
                Ok(v) if !v.is_empty() => v,
                Ok(_) => {
                    eprintln!("error: --strategies: empty strategy list");
                    return EXIT_CONFIG;
                }
                Err(e) => {
                    eprintln!("error: --strategies: {e}");
                    return EXIT_CONFIG;
                }
            }
        }
    };
    if a.seeds == 0 {
        eprintln!("error: --seeds must be at least 1");
        return EXIT_CONFIG;
    }
    let (base, locations) = match load(&a.common).and_then(|f| f.benchmark(&overrides(&a.common, None))) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let seeds: Vec<u64> = (0..a.seeds).map(|i| base.seed.wrapping_add(i)).collect();
    let report = run_benchmark(&base, &strategies, &locations, &seeds);
    let table = report.table();
    let written = (|| -> Result<(), HarnessError> {
        report.write_csv(create(&a.common.out_dir, "bench.csv")?)?;
        std::fs::write(a.common.out_dir.join("table.txt"), &table)?;
        Ok(())
    })();
    if let Err(code) = runtime(written) {
        return code;
    }
    if !a.common.quiet {
        println!(
            "{} strategies x {} locations x {} seeds = {} episodes",
            strategies.len(),
            locations.len(),
            seeds.len(),
            report.episodes.len()
        );
        print!("{table}");
    }
    let mut failed = 0;
    for f in report.failures() {
        failed += 1;
        if let Err(e) = &f.result {
            eprintln!("episode failed: {} location {} seed {}: {e}", f.strategy, f.location + 1, f.seed);
        }
    }
    if failed > 0 {
        EXIT_RUNTIME
    } else {
        EXIT_OK
    }
}

fn read_log(path: &Path) -> Result<FlightLog, i32> {
    let file = File::open(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_RUNTIME
    });
    runtime(FlightLog::read_csv(file?))
}

pub fn cmd_replay(a: &ReplayArgs) -> i32 {
    let cfg = match episode_config(&a.common, a.strategy) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let log = match read_log(&a.log) {
        Ok(l) => l,
        Err(code) => return code,
    };
    match runtime(replay(&log, &cfg)) {
        Ok(r) => {
            if !a.common.quiet {
                print!("{}", score_summary(&cfg, &r));
            }
            EXIT_OK
        }
        Err(code) => code,
    }
}

pub fn cmd_plot_data(a: &PlotArgs) -> i32 {
    let cfg = match episode_config(&a.common, a.strategy) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let log = match read_log(&a.log) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let out = &a.common.out_dir;
    let points = error_series(&log, &cfg);
    let written = create(out, "error_vs_time.csv").and_then(|w| write_error_csv(&points, w));
    if let Err(code) = runtime(written) {
        return code;
    }
    match radio_map_from_log(&log, &cfg) {
        None => {
            eprintln!("note: {} keeps no radio map; radio_map.csv not written", cfg.strategy);
        }
        Some(Err(e)) => {
            eprintln!("error: radio map reconstruction failed: {e}");
            return EXIT_RUNTIME;
        }
        Some(Ok(grid)) => {
            let written = create(out, "radio_map.csv").and_then(|w| write_radio_map_csv(&grid, w));
            if let Err(code) = runtime(written) {
                return code;
            }
        }
    }
    if !a.common.quiet {
        println!("wrote {} error points to {}", points.len(), out.display());
    }
    EXIT_OK
}
