//! Plugging a hand-written strategy into the episode loop: a lawnmower
//! survey that reports the strongest single reading seen so far. Under
//! 10 dB noise that max is a poor estimator, which the built-ins avoid by
//! averaging.
//!
//!     cargo run --release --example custom_strategy

use afar_twin::channel::Measurement;
use afar_twin::geodesy::GeoPoint;
use afar_twin::harness::{default_locations, run_episode, run_episode_with, EpisodeConfig};
use afar_twin::strategies::{MissionContext, Strategy, StrategyDecision, StrategyKind, Tick};
use afar_twin::vehicle::VehicleState;

struct Lawnmower {
    ctx: Option<MissionContext>,
    lanes: Vec<(f64, f64)>,
    next: usize,
    best: Option<(f64, GeoPoint)>,
}

impl Lawnmower {
    fn new(spacing: f64) -> Self {
        Self {
            ctx: None,
            lanes: Vec::new(),
            next: 0,
            best: None,
        }
        .with_spacing(spacing)
    }

    fn with_spacing(mut self, spacing: f64) -> Self {
        let mut x = 0.0;
        let mut north = true;
        while x <= 300.0 {
            let (a, b) = if north { (0.0, 300.0) } else { (300.0, 0.0) };
            self.lanes.push((x, a));
            self.lanes.push((x, b));
            north = !north;
            x += spacing;
        }
        self
    }

    fn advance(&mut self) -> StrategyDecision {
        let ctx = self.ctx.expect("started");
        let Some(&(x, y)) = self.lanes.get(self.next) else {
            return StrategyDecision::used();
        };
        self.next += 1;
        StrategyDecision {
            command: Some(ctx.waypoint(x, y, 20.0, 10.0)),
            ..StrategyDecision::used()
        }
    }
}

impl Strategy for Lawnmower {
    fn kind(&self) -> StrategyKind {
        // Not one of the built-ins; the loop never asks.
        StrategyKind::Baseline
    }

    fn start(&mut self, ctx: &MissionContext, _: &VehicleState) -> StrategyDecision {
        self.ctx = Some(*ctx);
        self.advance()
    }

    fn on_measurement(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision {
        if self.best.is_none_or(|(p, _)| m.rssi_dbm > p) {
            self.best = Some((m.rssi_dbm, m.rx_pos));
        }
        let mut d = if tick.arrived {
            self.advance()
        } else {
            StrategyDecision::used()
        };
        let ctx = self.ctx.expect("started");
        d.estimate = self.best.map(|(_, p)| ctx.rover_fence.clamp(p.with_alt(0.0)));
        d
    }

    fn phase(&self) -> &'static str {
        if self.next < self.lanes.len() {
            "survey"
        } else {
            "hold"
        }
    }
}

fn main() {
    for (i, rover) in default_locations().iter().enumerate() {
        let cfg = EpisodeConfig::new(StrategyKind::Baseline, *rover).with_seed(1);
        let (mine, _) = run_episode_with(&cfg, Box::new(Lawnmower::new(30.0))).expect("episode runs");
        let (base, _) = run_episode(&cfg).expect("episode runs");
        println!(
            "L{}  lawnmower fast {:6.1} final {:6.1}   baseline fast {:6.1} final {:6.1}",
            i + 1,
            mine.fast_error_m,
            mine.final_error_m,
            base.fast_error_m,
            base.final_error_m
        );
    }
}
