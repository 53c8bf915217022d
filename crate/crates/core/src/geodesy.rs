//! Geographic <-> local planar conversion and the small amount of rectangle
//! and segment geometry the search strategies need.
//!
//! All local work happens in an east/north/up frame obtained with an
//! equirectangular projection around a chosen origin. Over the few hundred
//! meters of a search arena the projection error is well below a centimeter,
//! and lines of constant latitude/longitude stay straight, so a geographic
//! rectangle maps onto an axis-aligned ENU rectangle exactly.

use serde::{Deserialize, Serialize};

/// Mean earth radius used by the local projection.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A WGS-84 position with altitude above ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    #[serde(default)]
    pub alt: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64, alt: f64) -> Self {
        Self { lat, lon, alt }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && self.alt.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }

    pub fn with_alt(self, alt: f64) -> Self {
        Self { alt, ..self }
    }
}

/// Meters east / north / up of some origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnuPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EnuPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn flat(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn horizontal_distance(&self, other: &EnuPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance(&self, other: &EnuPoint) -> f64 {
        let dz = self.z - other.z;
        (self.horizontal_distance(other).powi(2) + dz * dz).sqrt()
    }
}

/// Geographic rectangle with an altitude band. Boundaries are closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoRect {
    pub south: f64,
    pub west: f64,
    pub north: f64,
    pub east: f64,
    #[serde(default = "default_alt_min")]
    pub alt_min: f64,
    #[serde(default = "default_alt_max")]
    pub alt_max: f64,
}

fn default_alt_min() -> f64 {
    20.0
}

fn default_alt_max() -> f64 {
    110.0
}

/// Corner naming used by [`rect_quadrant`] and in flight logs:
/// 0 = SW, 1 = SE, 2 = NE, 3 = NW (counter-clockwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    SouthWest = 0,
    SouthEast = 1,
    NorthEast = 2,
    NorthWest = 3,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::SouthWest,
        Corner::SouthEast,
        Corner::NorthEast,
        Corner::NorthWest,
    ];

    pub fn from_index(i: usize) -> Option<Corner> {
        Self::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl GeoRect {
    pub fn is_valid(&self) -> bool {
        [self.south, self.west, self.north, self.east, self.alt_min, self.alt_max]
            .iter()
            .all(|v| v.is_finite())
            && self.south < self.north
            && self.west < self.east
            && self.alt_min < self.alt_max
    }

    pub fn center(&self) -> GeoPoint {
        GeoPoint::new(
            0.5 * (self.south + self.north),
            0.5 * (self.west + self.east),
            0.5 * (self.alt_min + self.alt_max),
        )
    }

    /// Corner position at ground level (`alt = alt_min`).
    pub fn corner(&self, c: Corner) -> GeoPoint {
        let (lat, lon) = match c {
            Corner::SouthWest => (self.south, self.west),
            Corner::SouthEast => (self.south, self.east),
            Corner::NorthEast => (self.north, self.east),
            Corner::NorthWest => (self.north, self.west),
        };
        GeoPoint::new(lat, lon, self.alt_min)
    }

    /// Per-axis clamp of a point into the closed rectangle and altitude band.
    pub fn clamp(&self, p: GeoPoint) -> GeoPoint {
        GeoPoint::new(
            p.lat.clamp(self.south, self.north),
            p.lon.clamp(self.west, self.east),
            p.alt.clamp(self.alt_min, self.alt_max),
        )
    }

    /// Rectangle bounds in the local frame: `(min, max)` corners, z ignored.
    pub fn to_enu_bounds(&self, origin: &GeoPoint) -> (EnuPoint, EnuPoint) {
        let sw = to_enu(&GeoPoint::new(self.south, self.west, origin.alt), origin);
        let ne = to_enu(&GeoPoint::new(self.north, self.east, origin.alt), origin);
        (EnuPoint::flat(sw.x, sw.y), EnuPoint::flat(ne.x, ne.y))
    }

    /// Builds a rectangle from local-frame bounds.
    pub fn from_enu_bounds(
        min: EnuPoint,
        max: EnuPoint,
        origin: &GeoPoint,
        alt_min: f64,
        alt_max: f64,
    ) -> GeoRect {
        let sw = to_geo(&EnuPoint::flat(min.x, min.y), origin);
        let ne = to_geo(&EnuPoint::flat(max.x, max.y), origin);
        GeoRect {
            south: sw.lat,
            west: sw.lon,
            north: ne.lat,
            east: ne.lon,
            alt_min,
            alt_max,
        }
    }

    pub fn area_deg2(&self) -> f64 {
        (self.north - self.south) * (self.east - self.west)
    }
}

/// A 2D line segment in the local frame; `z` is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: EnuPoint,
    pub b: EnuPoint,
}

impl Segment {
    pub fn new(a: EnuPoint, b: EnuPoint) -> Self {
        Self { a, b }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a.x == self.b.x && self.a.y == self.b.y
    }
}

fn deg_to_rad(d: f64) -> f64 {
    d.to_radians()
}

/// Equirectangular projection of `p` into the frame centered at `origin`.
pub fn to_enu(p: &GeoPoint, origin: &GeoPoint) -> EnuPoint {
    let cos_lat = deg_to_rad(origin.lat).cos();
    EnuPoint {
        x: EARTH_RADIUS_M * deg_to_rad(p.lon - origin.lon) * cos_lat,
        y: EARTH_RADIUS_M * deg_to_rad(p.lat - origin.lat),
        z: p.alt - origin.alt,
    }
}

/// Inverse of [`to_enu`] under the same projection.
pub fn to_geo(e: &EnuPoint, origin: &GeoPoint) -> GeoPoint {
    let cos_lat = deg_to_rad(origin.lat).cos();
    GeoPoint {
        lat: origin.lat + (e.y / EARTH_RADIUS_M).to_degrees(),
        lon: origin.lon + (e.x / (EARTH_RADIUS_M * cos_lat)).to_degrees(),
        alt: origin.alt + e.z,
    }
}

/// Ground distance in meters. The east component is scaled by the cosine of
/// the mean latitude so the result is exactly symmetric in its arguments.
pub fn horizontal_distance(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let cos_lat = deg_to_rad(0.5 * (a.lat + b.lat)).cos();
    let x = EARTH_RADIUS_M * deg_to_rad(b.lon - a.lon) * cos_lat;
    let y = EARTH_RADIUS_M * deg_to_rad(b.lat - a.lat);
    x.hypot(y)
}

/// Intersection of two closed segments. Parallel, collinear and disjoint
/// pairs yield `None`.
pub fn segment_intersection(s1: &Segment, s2: &Segment) -> Option<EnuPoint> {
    if s1.is_degenerate() || s2.is_degenerate() {
        return None;
    }
    let r = (s1.b.x - s1.a.x, s1.b.y - s1.a.y);
    let s = (s2.b.x - s2.a.x, s2.b.y - s2.a.y);
    let denom = r.0 * s.1 - r.1 * s.0;
    let scale = (r.0.hypot(r.1)) * (s.0.hypot(s.1));
    if denom.abs() <= 1e-12 * scale {
        return None;
    }
    let qp = (s2.a.x - s1.a.x, s2.a.y - s1.a.y);
    let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
    const EPS: f64 = 1e-12;
    if !(-EPS..=1.0 + EPS).contains(&t) || !(-EPS..=1.0 + EPS).contains(&u) {
        return None;
    }
    let t = t.clamp(0.0, 1.0);
    Some(EnuPoint::flat(s1.a.x + t * r.0, s1.a.y + t * r.1))
}

/// Closed containment test; the altitude band is only checked on request.
pub fn contains(r: &GeoRect, p: &GeoPoint, check_alt: bool) -> bool {
    let horiz = p.lat >= r.south && p.lat <= r.north && p.lon >= r.west && p.lon <= r.east;
    horiz && (!check_alt || (p.alt >= r.alt_min && p.alt <= r.alt_max))
}

/// Quarter of `r` whose outer corner is `corner` and whose inner corner is
/// the center of `r`. The altitude band is preserved.
pub fn rect_quadrant(r: &GeoRect, corner: Corner) -> GeoRect {
    let mid_lat = 0.5 * (r.south + r.north);
    let mid_lon = 0.5 * (r.west + r.east);
    let (south, north) = match corner {
        Corner::SouthWest | Corner::SouthEast => (r.south, mid_lat),
        Corner::NorthEast | Corner::NorthWest => (mid_lat, r.north),
    };
    let (west, east) = match corner {
        Corner::SouthWest | Corner::NorthWest => (r.west, mid_lon),
        Corner::SouthEast | Corner::NorthEast => (mid_lon, r.east),
    };
    GeoRect {
        south,
        west,
        north,
        east,
        alt_min: r.alt_min,
        alt_max: r.alt_max,
    }
}

/// Corner of `r` closest (horizontally) to `p`; ties go to the lower index.
pub fn nearest_corner(r: &GeoRect, p: &GeoPoint) -> Corner {
    let mut best = Corner::SouthWest;
    let mut best_d = f64::INFINITY;
    for c in Corner::ALL {
        let d = horizontal_distance(p, &r.corner(c));
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}
