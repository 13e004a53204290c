//! Base-station deployments around a probe user at the origin.
//!
//! Poisson deployments are generated radially: the squared distances of a
//! PPP of intensity `λ` from the origin are the arrival times of a 1-D
//! Poisson process of rate `πλ`, so points come out sorted and a larger
//! window only appends points to a smaller one drawn from the same stream.
//! Angles use a separate substream, so the distance sequence is identical
//! whether or not coordinates are requested.

mod voronoi;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{tags, Stream};

pub use voronoi::{circumcircle_is_empty, voronoi_vertices, WorstCaseSite};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn dist_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn scale(self, c: f64) -> Point {
        Point::new(self.x * c, self.y * c)
    }
}

/// Disk-shaped simulation window centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    radius: f64,
}

impl Region {
    pub fn disk(radius: f64) -> Result<Self> {
        if radius > 0.0 && radius.is_finite() {
            Ok(Region { radius })
        } else {
            Err(Error::InvalidParameter(format!(
                "region radius must be positive, got {radius}"
            )))
        }
    }

    /// Disk holding `expected_points` points of a process with the given
    /// intensity on average.
    pub fn for_expected_points(expected_points: f64, intensity: f64) -> Result<Self> {
        check_intensity(intensity)?;
        Region::disk((expected_points / (PI * intensity)).sqrt())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: Point) -> bool {
        p.norm_sq() <= self.radius * self.radius
    }
}

fn check_intensity(intensity: f64) -> Result<()> {
    if intensity > 0.0 && intensity.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "intensity must be positive, got {intensity}"
        )))
    }
}

/// Base-station coordinates inside a [`Region`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    sorted: bool,
    region: Region,
}

impl PointSet {
    /// Wraps arbitrary points; fails if any lies outside `region`.
    pub fn new(points: Vec<Point>, region: Region) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !region.contains(**p)) {
            return Err(Error::InvalidParameter(format!(
                "point ({}, {}) lies outside the region of radius {}",
                p.x,
                p.y,
                region.radius()
            )));
        }
        let sorted = points.windows(2).all(|w| w[0].norm_sq() <= w[1].norm_sq());
        Ok(PointSet {
            points,
            sorted,
            region,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Sorts by distance from the origin, ties broken by original index.
    pub fn sort_by_distance(&mut self) {
        if !self.sorted {
            self.points
                .sort_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()));
            self.sorted = true;
        }
    }

    /// The same configuration with every coordinate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Ok(PointSet {
            points: self.points.iter().map(|p| p.scale(c)).collect(),
            sorted: self.sorted,
            region: Region::disk(self.region.radius * c)?,
        })
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSpec {
    pub intensity: f64,
    pub power: f64,
}

impl TierSpec {
    pub fn new(intensity: f64, power: f64) -> Result<Self> {
        let t = TierSpec { intensity, power };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        check_intensity(self.intensity)?;
        if self.power > 0.0 && self.power.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "tier power must be positive, got {}",
                self.power
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeploymentModel {
    Ppp,
    Hip,
    SquareLattice,
    TriangularLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    Square,
    Triangular,
}

impl LatticeKind {
    /// Nearest-neighbour spacing giving one point per `1 / intensity` area.
    pub fn spacing(self, intensity: f64) -> f64 {
        match self {
            LatticeKind::Square => 1.0 / intensity.sqrt(),
            LatticeKind::Triangular => (2.0 / (3f64.sqrt() * intensity)).sqrt(),
        }
    }

    fn model(self) -> DeploymentModel {
        match self {
            LatticeKind::Square => DeploymentModel::SquareLattice,
            LatticeKind::Triangular => DeploymentModel::TriangularLattice,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tier {
    pub points: PointSet,
    pub power: f64,
}

/// One or more tiers of base stations.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    tiers: Vec<Tier>,
    model: DeploymentModel,
}

impl Deployment {
    pub fn tiers(&self) -> &[Tier] {
        &self.tiers
    }

    pub fn model(&self) -> DeploymentModel {
        self.model
    }

    pub fn total_points(&self) -> usize {
        self.tiers.iter().map(|t| t.points.len()).sum()
    }
}

/// Sorted squared distances from the origin of a PPP restricted to `region`.
pub fn sample_ppp_sq_distances(intensity: f64, region: Region, stream: Stream) -> Result<Vec<f64>> {
    check_intensity(intensity)?;
    let mut rng = stream.child(tags::RADII).rng();
    let limit = region.radius * region.radius;
    let scale = 1.0 / (PI * intensity);
    let mut out = Vec::with_capacity((region.area() * intensity * 1.05) as usize + 8);
    let mut t = 0.0f64;
    loop {
        let e: f64 = Exp1.sample(&mut rng);
        t += e;
        let r2 = t * scale;
        if r2 > limit {
            break;
        }
        out.push(r2);
    }
    Ok(out)
}

/// Homogeneous PPP of the given intensity in `region`, sorted by distance.
pub fn sample_ppp(intensity: f64, region: Region, stream: Stream) -> Result<PointSet> {
    let radii = sample_ppp_sq_distances(intensity, region, stream)?;
    let mut rng = stream.child(tags::ANGLES).rng();
    let points = radii
        .into_iter()
        .map(|r2| {
            let r = r2.sqrt();
            let phi = rng.random::<f64>() * 2.0 * PI;
            let (s, c) = phi.sin_cos();
            Point::new(r * c, r * s)
        })
        .collect();
    Ok(PointSet {
        points,
        sorted: true,
        region,
    })
}

/// Tier index for each of `count` points, by independent thinning with
/// probabilities `λ_k / Σλ`.
pub fn sample_tier_marks(tiers: &[TierSpec], count: usize, stream: Stream) -> Result<Vec<u16>> {
    if tiers.is_empty() {
        return Err(Error::InvalidParameter("at least one tier is required".into()));
    }
    for t in tiers {
        t.validate()?;
    }
    if tiers.len() == 1 {
        return Ok(vec![0; count]);
    }
    let total: f64 = tiers.iter().map(|t| t.intensity).sum();
    let mut cum = Vec::with_capacity(tiers.len());
    let mut acc = 0.0;
    for t in tiers {
        acc += t.intensity / total;
        cum.push(acc);
    }
    let last = cum.len() - 1;
    let mut rng = stream.child(tags::TIER_MARKS).rng();
    Ok((0..count)
        .map(|_| {
            let u: f64 = rng.random();
            cum.iter().position(|&c| u < c).unwrap_or(last) as u16
        })
        .collect())
}

/// Multi-tier HIP deployment: a PPP of intensity `Σλ_k` thinned into tiers.
pub fn sample_hip(tiers: &[TierSpec], region: Region, stream: Stream) -> Result<Deployment> {
    if tiers.is_empty() {
        return Err(Error::InvalidParameter("at least one tier is required".into()));
    }
    let total: f64 = tiers.iter().map(|t| t.intensity).sum();
    let all = sample_ppp(total, region, stream)?;
    let marks = sample_tier_marks(tiers, all.len(), stream)?;
    let mut split: Vec<Vec<Point>> = vec![Vec::new(); tiers.len()];
    for (p, &m) in all.points.iter().zip(&marks) {
        split[m as usize].push(*p);
    }
    let tiers = split
        .into_iter()
        .zip(tiers)
        .map(|(points, spec)| Tier {
            points: PointSet {
                points,
                sorted: true,
                region,
            },
            power: spec.power,
        })
        .collect();
    Ok(Deployment {
        tiers,
        model: DeploymentModel::Hip,
    })
}

/// Lattice deployment translated by a uniform offset within one cell.
pub fn sample_lattice(
    kind: LatticeKind,
    intensity: f64,
    region: Region,
    stream: Stream,
) -> Result<Deployment> {
    check_intensity(intensity)?;
    let mut rng = stream.child(tags::LATTICE_OFFSET).rng();
    let (u, v): (f64, f64) = (rng.random(), rng.random());
    let mut points = lattice_points(kind, intensity, region, u, v);
    if points.len() < 2 {
        return Err(Error::InsufficientWindow {
            radius: region.radius,
        });
    }
    points.sort_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()));
    Ok(Deployment {
        tiers: vec![Tier {
            points: PointSet {
                points,
                sorted: true,
                region,
            },
            power: 1.0,
        }],
        model: kind.model(),
    })
}

/// Lattice points `i a1 + j a2 - (u a1 + v a2)` inside `region`, for cell
/// coordinates `u, v` in `[0, 1)`.
pub fn lattice_points(kind: LatticeKind, intensity: f64, region: Region, u: f64, v: f64) -> Vec<Point> {
    let s = kind.spacing(intensity);
    let (a1, a2) = match kind {
        LatticeKind::Square => (Point::new(s, 0.0), Point::new(0.0, s)),
        LatticeKind::Triangular => (Point::new(s, 0.0), Point::new(0.5 * s, 0.5 * 3f64.sqrt() * s)),
    };
    let r = region.radius;
    let r2 = r * r;
    let off = Point::new(u * a1.x + v * a2.x, u * a1.y + v * a2.y);
    let jmax = (r / a2.y).ceil() as i64 + 1;
    let mut out = Vec::new();
    for j in -jmax..=jmax {
        let y = j as f64 * a2.y - off.y;
        // x = i a1.x + j a2.x - off.x must lie within [-r, r]
        let shift = j as f64 * a2.x - off.x;
        let imin = ((-r - shift) / a1.x).floor() as i64;
        let imax = ((r - shift) / a1.x).ceil() as i64;
        for i in imin..=imax {
            let p = Point::new(i as f64 * a1.x + shift, y);
            if p.norm_sq() <= r2 {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_validation() {
        assert!(Region::disk(0.0).is_err());
        assert!(Region::disk(-1.0).is_err());
        let r = Region::disk(2.0).unwrap();
        assert!((r.area() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn ppp_rejects_bad_intensity() {
        let r = Region::disk(1.0).unwrap();
        assert!(sample_ppp(0.0, r, Stream::root(0)).is_err());
        assert!(sample_ppp(-1.0, r, Stream::root(0)).is_err());
    }

    #[test]
    fn ppp_mean_count() {
        let region = Region::disk((1000.0 / PI).sqrt()).unwrap();
        let n = 2000;
        let total: usize = (0..n)
            .map(|i| sample_ppp(1.0, region, Stream::root(3).child(i)).unwrap().len())
            .sum();
        let mean = total as f64 / n as f64;
        // sd of the mean = sqrt(1000 / 2000)
        assert!((mean - 1000.0).abs() < 4.0 * (0.5f64).sqrt(), "{mean}");
    }

    #[test]
    fn ppp_count_variance_equals_mean() {
        let region = Region::disk((4000.0 / PI).sqrt()).unwrap();
        let counts: Vec<f64> = (0..10_000)
            .map(|i| {
                sample_ppp_sq_distances(1.0, region, Stream::root(4).child(i))
                    .unwrap()
                    .len() as f64
            })
            .collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / 4000.0 - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn tiny_window_is_empty() {
        let region = Region::disk(1e-6).unwrap();
        let empty = (0..200)
            .filter(|&i| sample_ppp(1.0, region, Stream::root(5).child(i)).unwrap().is_empty())
            .count();
        assert!(empty >= 199);
    }

    #[test]
    fn ppp_points_uniform_in_disk() {
        let region = Region::disk(10.0).unwrap();
        let set = sample_ppp(5.0, region, Stream::root(6)).unwrap();
        assert!(set.is_sorted());
        assert!(set.points().iter().all(|p| region.contains(*p)));
        // fraction in the inner half-radius disk ~ 1/4, and quadrant balance
        let n = set.len() as f64;
        let inner = set.points().iter().filter(|p| p.norm_sq() < 25.0).count() as f64;
        assert!((inner / n - 0.25).abs() < 4.0 * (0.25 * 0.75 / n).sqrt());
        let q1 = set.points().iter().filter(|p| p.x > 0.0 && p.y > 0.0).count() as f64;
        assert!((q1 / n - 0.25).abs() < 4.0 * (0.25 * 0.75 / n).sqrt());
    }

    #[test]
    fn larger_window_extends_smaller() {
        let s = Stream::root(8);
        let small = sample_ppp(1.0, Region::disk(10.0).unwrap(), s).unwrap();
        let big = sample_ppp(1.0, Region::disk(20.0).unwrap(), s).unwrap();
        assert_eq!(small.points(), &big.points()[..small.len()]);
    }

    #[test]
    fn single_tier_hip_is_ppp() {
        let region = Region::disk(12.0).unwrap();
        let s = Stream::root(9);
        let hip = sample_hip(&[TierSpec::new(1.0, 1.0).unwrap()], region, s).unwrap();
        let ppp = sample_ppp(1.0, region, s).unwrap();
        assert_eq!(hip.tiers().len(), 1);
        assert_eq!(hip.tiers()[0].points, ppp);
        assert!(sample_hip(&[], region, s).is_err());
    }

    #[test]
    fn hip_thinning_preserves_intensity() {
        let region = Region::disk((1000.0 / PI).sqrt()).unwrap();
        let tiers = [TierSpec::new(0.5, 1.0).unwrap(), TierSpec::new(0.5, 10.0).unwrap()];
        let n = 1000;
        let mut totals = [0usize; 2];
        for i in 0..n {
            let d = sample_hip(&tiers, region, Stream::root(10).child(i)).unwrap();
            for (k, t) in d.tiers().iter().enumerate() {
                assert!(t.points.is_sorted());
                totals[k] += t.points.len();
            }
        }
        for t in totals {
            let mean = t as f64 / n as f64;
            assert!((mean - 500.0).abs() < 4.0 * (500.0 / n as f64).sqrt(), "{mean}");
        }
    }

    #[test]
    fn square_lattice_count_in_big_disk() {
        let region = Region::disk(50.0).unwrap();
        for i in 0..50 {
            let d = sample_lattice(LatticeKind::Square, 1.0, region, Stream::root(11).child(i)).unwrap();
            let n = d.total_points();
            assert!((7700..=8000).contains(&n), "{n}");
        }
    }

    #[test]
    fn square_lattice_nearest_within_half_diagonal() {
        let region = Region::disk(5.0).unwrap();
        for i in 0..200 {
            let d = sample_lattice(LatticeKind::Square, 2.0, region, Stream::root(12).child(i)).unwrap();
            let nearest = d.tiers()[0].points.points()[0].norm_sq().sqrt();
            assert!(nearest <= LatticeKind::Square.spacing(2.0) * 2f64.sqrt() / 2.0 + 1e-12);
        }
    }

    #[test]
    fn triangular_min_distance() {
        let s = LatticeKind::Triangular.spacing(1.0);
        assert!((s - (2.0 / 3f64.sqrt()).sqrt()).abs() < 1e-15);
        assert!((s - 1.074_569_931_823).abs() < 1e-9);
        let region = Region::disk(6.0).unwrap();
        let d = sample_lattice(LatticeKind::Triangular, 1.0, region, Stream::root(13)).unwrap();
        let pts = d.tiers()[0].points.points();
        let mut min = f64::INFINITY;
        for i in 0..pts.len() {
            for j in 0..i {
                min = min.min(pts[i].dist_sq(pts[j]));
            }
        }
        assert!((min.sqrt() - s).abs() < 1e-9);
        // one point per unit area
        let count = lattice_points(LatticeKind::Triangular, 1.0, Region::disk(40.0).unwrap(), 0.3, 0.6).len() as f64;
        assert!((count / (PI * 1600.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn lattice_window_too_small() {
        let region = Region::disk(0.1).unwrap();
        assert!(matches!(
            sample_lattice(LatticeKind::Square, 1.0, region, Stream::root(1)),
            Err(Error::InsufficientWindow { .. })
        ));
    }

    #[test]
    fn point_set_rejects_outside_points() {
        let r = Region::disk(1.0).unwrap();
        assert!(PointSet::new(vec![Point::new(2.0, 0.0)], r).is_err());
        let s = PointSet::new(vec![Point::new(0.5, 0.0), Point::new(0.1, 0.0)], r).unwrap();
        assert!(!s.is_sorted());
    }
}
