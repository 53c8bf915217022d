//! Recursive perimeter sweep.
//!
//! The UAV flies the perimeter of the current rectangle (initially the
//! overlap of the two fences), averaging readings in blocks of eight. The
//! strongest average on each edge is kept; the chord joining the north and
//! south maxima is intersected with the chord joining the east and west
//! maxima to produce the current guess. The search then recurses into the
//! quadrant whose outer corner is closest to the strongest reading overall.

use super::{
    Bounds, MissionContext, SamplingParams, Strategy, StrategyDecision, StrategyKind, Tick,
    UntParams,
};
use crate::channel::Measurement;
use crate::geodesy::{
    nearest_corner, rect_quadrant, segment_intersection, Corner, EnuPoint, GeoPoint, GeoRect,
    Segment,
};
use crate::sampling::SampleBuffer;
use crate::vehicle::VehicleState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPhase {
    /// Flying to the entry corner of the current rectangle.
    Transit,
    /// On the perimeter; `leg` counts completed edges (0..4).
    Sweeping { leg: usize },
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    South = 0,
    East = 1,
    North = 2,
    West = 3,
}

impl Edge {
    /// Edge walked when leaving `c` counter-clockwise.
    fn leaving(c: Corner) -> Edge {
        match c {
            Corner::SouthWest => Edge::South,
            Corner::SouthEast => Edge::East,
            Corner::NorthEast => Edge::North,
            Corner::NorthWest => Edge::West,
        }
    }

    fn distance(self, b: &Bounds, p: &EnuPoint) -> f64 {
        match self {
            Edge::South => (p.y - b.y0).abs(),
            Edge::East => (p.x - b.x1).abs(),
            Edge::North => (p.y - b.y1).abs(),
            Edge::West => (p.x - b.x0).abs(),
        }
    }
}

fn corner_after(c: Corner, k: usize) -> Corner {
    Corner::from_index((c.index() + k) % 4).expect("corner index in range")
}

/// Quadrant for the next recursion: the one whose outer corner is nearest
/// the strongest reading.
pub fn next_quadrant(rect: &GeoRect, strongest: &GeoPoint) -> GeoRect {
    rect_quadrant(rect, nearest_corner(rect, strongest))
}

pub struct RecursiveSweep {
    params: UntParams,
    buffer_capacity: usize,
    ctx: Option<MissionContext>,
    rect: Option<GeoRect>,
    depth: usize,
    phase: SweepPhase,
    entry: Corner,
    buffer: SampleBuffer,
    edge_max: [Option<(f64, EnuPoint)>; 4],
    /// Edge visiting order for the current sweep (tie-break for corners).
    edge_order: [Edge; 4],
    overall: Option<(f64, EnuPoint)>,
    guess: Option<EnuPoint>,
    history: Vec<GeoRect>,
}

impl RecursiveSweep {
    pub fn new(params: UntParams, sampling: SamplingParams) -> Self {
        Self {
            params,
            buffer_capacity: sampling.buffer_capacity,
            ctx: None,
            rect: None,
            depth: 0,
            phase: SweepPhase::Transit,
            entry: Corner::SouthWest,
            buffer: SampleBuffer::new(sampling.buffer_capacity, 0.0),
            edge_max: [None; 4],
            edge_order: [Edge::South, Edge::East, Edge::North, Edge::West],
            overall: None,
            guess: None,
            history: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Every rectangle swept so far, outermost first.
    pub fn rects(&self) -> &[GeoRect] {
        &self.history
    }

    pub fn sweep_phase(&self) -> SweepPhase {
        self.phase
    }

    fn bounds(&self) -> Bounds {
        let ctx = self.ctx.expect("start() not called");
        Bounds::of(self.rect.as_ref().expect("rect set"), &ctx.origin)
    }

    fn corner_enu(&self, c: Corner) -> EnuPoint {
        let ctx = self.ctx.expect("start() not called");
        let g = self.rect.expect("rect set").corner(c);
        let e = ctx.enu(&g);
        EnuPoint::flat(e.x, e.y)
    }

    fn goto(&self, c: Corner, speed: f64) -> StrategyDecision {
        let ctx = self.ctx.expect("start() not called");
        let p = self.corner_enu(c);
        StrategyDecision {
            command: Some(ctx.waypoint(p.x, p.y, self.params.altitude_m, speed)),
            ..StrategyDecision::default()
        }
    }

    fn sweep_speed(&self) -> f64 {
        let b = self.bounds();
        let side = b.width().min(b.height());
        let period = self.ctx.map_or(0.2, |c| c.sample_period_s);
        let block = self.buffer_capacity as f64 * period;
        let floor = side / (self.params.min_averages_per_edge.max(1) as f64 * block);
        self.params.sweep_speed_mps.min(floor).max(0.5)
    }

    fn enter(&mut self, rect: GeoRect, from: &GeoPoint) -> StrategyDecision {
        self.rect = Some(rect);
        self.history.push(rect);
        self.entry = nearest_corner(&rect, from);
        self.phase = SweepPhase::Transit;
        self.edge_max = [None; 4];
        self.overall = None;
        for k in 0..4 {
            self.edge_order[k] = Edge::leaving(corner_after(self.entry, k));
        }
        self.goto(self.entry, self.params.transit_speed_mps)
    }

    fn record(&mut self, avg: f64, center: EnuPoint) {
        let b = self.bounds();
        let mut edge = self.edge_order[0];
        let mut best = f64::INFINITY;
        for e in self.edge_order {
            let d = e.distance(&b, &center);
            if d < best {
                best = d;
                edge = e;
            }
        }
        let slot = &mut self.edge_max[edge as usize];
        if slot.is_none_or(|(v, _)| avg > v) {
            *slot = Some((avg, center));
        }
        if self.overall.is_none_or(|(v, _)| avg > v) {
            self.overall = Some((avg, center));
        }
    }

    /// Chord intersection, falling back to the strongest reading.
    fn intersect(&self) -> Option<EnuPoint> {
        let get = |e: Edge| self.edge_max[e as usize].map(|(_, p)| p);
        let chords = match (get(Edge::North), get(Edge::South), get(Edge::East), get(Edge::West)) {
            (Some(n), Some(s), Some(e), Some(w)) => {
                segment_intersection(&Segment::new(s, n), &Segment::new(w, e))
            }
            _ => None,
        };
        chords.or(self.overall.map(|(_, p)| p))
    }

    fn finish_sweep(&mut self, pos: &GeoPoint) -> StrategyDecision {
        let ctx = self.ctx.expect("start() not called");
        let guess = self.intersect();
        if guess.is_some() {
            self.guess = guess;
        }
        let estimate = self.guess.map(|g| ctx.geo(&g));
        let Some((_, strongest)) = self.overall else {
            // nothing recorded: sweep again
            let mut d = self.enter(self.rect.expect("rect set"), pos);
            self.history.pop();
            d.estimate = estimate;
            return d;
        };
        if self.depth >= self.params.max_depth {
            self.phase = SweepPhase::Done;
            let hold = self.guess.unwrap_or(strongest);
            return StrategyDecision {
                command: Some(ctx.waypoint(hold.x, hold.y, self.params.altitude_m, self.params.transit_speed_mps)),
                estimate,
                accepted: true,
            };
        }
        self.depth += 1;
        let next = next_quadrant(&self.rect.expect("rect set"), &ctx.geo(&strongest));
        let mut d = self.enter(next, pos);
        d.estimate = estimate;
        d.accepted = true;
        d
    }
}

impl Strategy for RecursiveSweep {
    fn kind(&self) -> StrategyKind {
        StrategyKind::UntRecursive
    }

    fn start(&mut self, ctx: &MissionContext, vehicle: &VehicleState) -> StrategyDecision {
        self.ctx = Some(*ctx);
        let u = &ctx.uav_fence;
        let r = &ctx.rover_fence;
        let overlap = GeoRect {
            south: u.south.max(r.south),
            west: u.west.max(r.west),
            north: u.north.min(r.north),
            east: u.east.min(r.east),
            alt_min: u.alt_min,
            alt_max: u.alt_max,
        };
        // disjoint fences: sweep the UAV fence instead
        let rect = if overlap.south < overlap.north && overlap.west < overlap.east {
            overlap
        } else {
            *u
        };
        self.buffer = SampleBuffer::new(self.buffer_capacity, ctx.sample_period_s);
        self.enter(rect, &vehicle.pos)
    }

    fn on_measurement(&mut self, m: &Measurement, tick: &Tick<'_>) -> StrategyDecision {
        let ctx = self.ctx.expect("start() not called");
        match self.phase {
            SweepPhase::Done => StrategyDecision::default(),
            SweepPhase::Transit => {
                if !tick.arrived {
                    return StrategyDecision::default();
                }
                self.buffer.clear();
                self.phase = SweepPhase::Sweeping { leg: 0 };
                self.goto(corner_after(self.entry, 1), self.sweep_speed())
            }
            SweepPhase::Sweeping { leg } => {
                if let Ok(Some((avg, center))) = self.buffer.push(*m) {
                    let c = ctx.enu(&center);
                    self.record(avg, EnuPoint::flat(c.x, c.y));
                }
                if !tick.arrived {
                    return StrategyDecision::used();
                }
                let leg = leg + 1;
                if leg < 4 {
                    self.phase = SweepPhase::Sweeping { leg };
                    let mut d = self.goto(corner_after(self.entry, leg + 1), self.sweep_speed());
                    d.accepted = true;
                    return d;
                }
                self.finish_sweep(&tick.vehicle.pos)
            }
        }
    }

    fn phase(&self) -> &'static str {
        match self.phase {
            SweepPhase::Transit => "transit",
            SweepPhase::Sweeping { .. } => "sweeping",
            SweepPhase::Done => "done",
        }
    }
}
