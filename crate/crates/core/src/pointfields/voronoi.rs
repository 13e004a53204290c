//! Voronoi vertices of a planar point set.
//!
//! Each Voronoi cell is built by clipping a bounding square with the
//! bisectors of neighbours taken in increasing distance order, found through
//! a uniform grid. A neighbour farther than twice the current cell radius
//! cannot cut the cell, which ends the search. Cell corners between two
//! bisector edges are Voronoi vertices; they are re-derived as circumcenters
//! of their defining triple and deduplicated by coordinate.

use serde::{Deserialize, Serialize};

use super::{Point, PointSet};
use crate::error::{Error, Result};

/// Vertices closer than this (per coordinate) are the same vertex.
const DEDUP_TOL: f64 = 1e-9;
/// Relative tolerance of the equidistance and empty-circle checks.
const CIRCLE_TOL: f64 = 1e-9;

/// A Voronoi vertex: the location of a worst-case user, equidistant from
/// its three nearest base stations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseSite {
    pub vertex: Point,
    /// Indices into the generating point set, ascending.
    pub triple: [usize; 3],
    pub circumradius: f64,
}

struct Grid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl Grid {
    fn build(points: &[Point]) -> Grid {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let w = (hi.x - lo.x).max(1e-12);
        let h = (hi.y - lo.y).max(1e-12);
        let cell = (w * h / points.len() as f64).sqrt().max(w.max(h) / 4096.0);
        let nx = (w / cell) as usize + 1;
        let ny = (h / cell) as usize + 1;
        let mut counts = vec![0u32; nx * ny + 1];
        let key = |p: &Point| {
            let cx = (((p.x - lo.x) / cell) as usize).min(nx - 1);
            let cy = (((p.y - lo.y) / cell) as usize).min(ny - 1);
            cy * nx + cx
        };
        for p in points {
            counts[key(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; points.len()];
        for (i, p) in points.iter().enumerate() {
            let k = key(p);
            items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        Grid {
            origin: lo,
            cell,
            nx,
            ny,
            start: counts,
            items,
        }
    }

    /// Calls `f(j)` for every point in grid cells overlapping the square of
    /// half-width `r` around `c`.
    fn visit_square(&self, c: Point, r: f64, mut f: impl FnMut(usize)) {
        let span = |v: f64, o: f64, n: usize| {
            let a = ((v - r - o) / self.cell).floor().max(0.0) as usize;
            let b = ((v + r - o) / self.cell).floor();
            if b < 0.0 {
                return None;
            }
            let b = (b as usize).min(n - 1);
            (a <= b).then_some((a, b))
        };
        let (Some((x0, x1)), Some((y0, y1))) =
            (span(c.x, self.origin.x, self.nx), span(c.y, self.origin.y, self.ny))
        else {
            return;
        };
        for cy in y0..=y1 {
            let row = cy * self.nx;
            let s = self.start[row + x0] as usize;
            let e = self.start[row + x1 + 1] as usize;
            for &j in &self.items[s..e] {
                f(j as usize);
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Corner {
    at: Point,
    /// Generator of the edge leaving this corner; `None` for the bounding box.
    edge: Option<u32>,
}

/// Clips `poly` to the half-plane of points at least as close to `p` as to `q`.
fn clip(poly: &[Corner], p: Point, q: Point, qi: u32, out: &mut Vec<Corner>) -> bool {
    let nx = q.x - p.x;
    let ny = q.y - p.y;
    let mx = 0.5 * (p.x + q.x);
    let my = 0.5 * (p.y + q.y);
    let side = |v: Point| (v.x - mx) * nx + (v.y - my) * ny;
    if poly.iter().all(|c| side(c.at) <= 0.0) {
        return false;
    }
    out.clear();
    let n = poly.len();
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        let sa = side(a.at);
        let sb = side(b.at);
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa <= 0.0) != (sb <= 0.0) {
            let t = sa / (sa - sb);
            let x = Point::new(a.at.x + t * (b.at.x - a.at.x), a.at.y + t * (b.at.y - a.at.y));
            let edge = if sa <= 0.0 { Some(qi) } else { a.edge };
            out.push(Corner { at: x, edge });
        }
    }
    true
}

fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
    if d.abs() <= 1e-12 * scale {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Some(Point::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d))
}

/// All Voronoi vertices of `points` within `inner_radius` of the origin.
///
/// Every returned site has an empty circumcircle (no other point strictly
/// inside) and three generators equidistant from the vertex. Cocircular
/// configurations yield one site per distinct vertex location.
pub fn voronoi_vertices(points: &PointSet, inner_radius: f64) -> Result<Vec<WorstCaseSite>> {
    let pts = points.points();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: pts.len(),
        });
    }
    let region_radius = points.region().radius();
    if !(inner_radius > 0.0) || inner_radius >= region_radius {
        return Err(Error::InvalidParameter(format!(
            "inner radius must lie in (0, {region_radius}), got {inner_radius}"
        )));
    }

    let grid = Grid::build(pts);
    let half_box = 4.0 * region_radius;
    let reach = 2.0 * region_radius;
    let mut poly = Vec::with_capacity(32);
    let mut scratch = Vec::with_capacity(32);
    let mut near: Vec<(f64, u32)> = Vec::with_capacity(64);
    let mut candidates: Vec<WorstCaseSite> = Vec::new();

    for (i, &p) in pts.iter().enumerate() {
        poly.clear();
        for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
            poly.push(Corner {
                at: Point::new(p.x + dx * half_box, p.y + dy * half_box),
                edge: None,
            });
        }
        let mut max_r2 = 2.0 * half_box * half_box;
        let mut done_r2 = -1.0;
        let mut r = 3.0 * grid.cell;
        'search: loop {
            let r2 = r * r;
            near.clear();
            grid.visit_square(p, r, |j| {
                if j != i {
                    let d2 = p.dist_sq(pts[j]);
                    if d2 > done_r2 && d2 <= r2 {
                        near.push((d2, j as u32));
                    }
                }
            });
            near.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(d2, j) in &near {
                if d2 >= 4.0 * max_r2 {
                    break 'search;
                }
                if clip(&poly, p, pts[j as usize], j, &mut scratch) {
                    std::mem::swap(&mut poly, &mut scratch);
                    max_r2 = poly.iter().map(|c| p.dist_sq(c.at)).fold(0.0, f64::max);
                }
            }
            if r2 >= 4.0 * max_r2 || r >= reach {
                break;
            }
            done_r2 = r2;
            r *= 2.0;
        }

        let n = poly.len();
        for k in 0..n {
            let (Some(a), Some(b)) = (poly[(k + n - 1) % n].edge, poly[k].edge) else {
                continue;
            };
            if a == b {
                continue;
            }
            // cheap reject before the exact circumcenter
            if poly[k].at.norm_sq().sqrt() > inner_radius + 1e-6 * (1.0 + inner_radius) {
                continue;
            }
            let mut triple = [i, a as usize, b as usize];
            triple.sort_unstable();
            let Some(v) = circumcenter(pts[triple[0]], pts[triple[1]], pts[triple[2]]) else {
                continue;
            };
            if v.norm_sq() > inner_radius * inner_radius {
                continue;
            }
            candidates.push(WorstCaseSite {
                vertex: v,
                triple,
                circumradius: v.dist_sq(pts[triple[0]]).sqrt(),
            });
        }
    }

    candidates.sort_by(|a, b| {
        a.vertex
            .x
            .total_cmp(&b.vertex.x)
            .then(a.vertex.y.total_cmp(&b.vertex.y))
            .then(a.triple.cmp(&b.triple))
    });
    let mut sites: Vec<WorstCaseSite> = Vec::with_capacity(candidates.len() / 3 + 1);
    for c in candidates {
        let dup = sites
            .iter()
            .rev()
            .take_while(|s| c.vertex.x - s.vertex.x <= DEDUP_TOL)
            .any(|s| (c.vertex.y - s.vertex.y).abs() <= DEDUP_TOL);
        if !dup && is_valid_site(&c, pts, &grid) {
            sites.push(c);
        }
    }
    Ok(sites)
}

fn is_valid_site(site: &WorstCaseSite, pts: &[Point], grid: &Grid) -> bool {
    let r = site.circumradius;
    let tol = CIRCLE_TOL * r;
    if site
        .triple
        .iter()
        .any(|&k| (site.vertex.dist_sq(pts[k]).sqrt() - r).abs() > tol)
    {
        return false;
    }
    let inner = r - tol;
    let mut empty = true;
    grid.visit_square(site.vertex, r, |j| {
        if !site.triple.contains(&j) && site.vertex.dist_sq(pts[j]) < inner * inner {
            empty = false;
        }
    });
    empty
}

/// Brute-force empty-circumcircle check of one site against every point.
pub fn circumcircle_is_empty(site: &WorstCaseSite, points: &[Point]) -> bool {
    let inner = site.circumradius * (1.0 - CIRCLE_TOL);
    points
        .iter()
        .enumerate()
        .all(|(j, p)| site.triple.contains(&j) || site.vertex.dist_sq(*p) >= inner * inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointfields::{lattice_points, sample_ppp, LatticeKind, Region};
    use crate::rng::Stream;
    use std::f64::consts::PI;

    fn set(points: Vec<Point>, radius: f64) -> PointSet {
        PointSet::new(points, Region::disk(radius).unwrap()).unwrap()
    }

    #[test]
    fn equilateral_triangle() {
        let pts = (0..3)
            .map(|k| {
                let a = PI / 2.0 + k as f64 * 2.0 * PI / 3.0;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let sites = voronoi_vertices(&set(pts, 2.0), 1.0).unwrap();
        assert_eq!(sites.len(), 1);
        assert!(sites[0].vertex.norm_sq() < 1e-24);
        assert_eq!(sites[0].triple, [0, 1, 2]);
        assert!((sites[0].circumradius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cocircular_square() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        let sites = voronoi_vertices(&set(pts, 2.0), 1.0).unwrap();
        assert_eq!(sites.len(), 1, "{sites:?}");
        assert!((sites[0].vertex.x - 0.5).abs() < 1e-12);
        assert!((sites[0].vertex.y - 0.5).abs() < 1e-12);
        assert!((sites[0].circumradius - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_have_no_vertex() {
        let pts = (0..5).map(|k| Point::new(k as f64 * 0.3 - 0.6, 0.0)).collect();
        assert!(voronoi_vertices(&set(pts, 2.0), 1.0).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(
            voronoi_vertices(&set(pts, 2.0), 1.0),
            Err(Error::InsufficientPoints { .. })
        ));
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert!(voronoi_vertices(&set(pts.clone(), 2.0), 2.0).is_err());
        assert!(voronoi_vertices(&set(pts, 2.0), 0.0).is_err());
    }

    #[test]
    fn square_lattice_vertices_are_cell_corners() {
        let region = Region::disk(8.0).unwrap();
        let pts = lattice_points(LatticeKind::Square, 1.0, region, 0.25, 0.6);
        let sites = voronoi_vertices(&PointSet::new(pts.clone(), region).unwrap(), 4.0).unwrap();
        // cell corners are lattice points shifted by (1/2, 1/2)
        for s in &sites {
            let fx = (s.vertex.x + 0.25 - 0.5).rem_euclid(1.0);
            let fy = (s.vertex.y + 0.6 - 0.5).rem_euclid(1.0);
            assert!(fx.min(1.0 - fx) < 1e-9 && fy.min(1.0 - fy) < 1e-9, "{s:?}");
            assert!((s.circumradius - 0.5f64.sqrt()).abs() < 1e-9);
            assert!(circumcircle_is_empty(s, &pts));
        }
        // one vertex per unit area
        let expected = PI * 16.0;
        assert!((sites.len() as f64 - expected).abs() < 2.0 * PI * 4.0 + 4.0);
    }

    #[test]
    fn matches_brute_force_on_small_ppp() {
        for seed in 0..20 {
            let region = Region::disk(4.0).unwrap();
            let set = sample_ppp(1.0, region, Stream::root(seed)).unwrap();
            let pts = set.points();
            if pts.len() < 3 {
                continue;
            }
            let inner = 2.5;
            let fast = voronoi_vertices(&set, inner).unwrap();
            let mut slow = Vec::new();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    for c in b + 1..pts.len() {
                        let Some(v) = circumcenter(pts[a], pts[b], pts[c]) else {
                            continue;
                        };
                        if v.norm_sq() > inner * inner {
                            continue;
                        }
                        let site = WorstCaseSite {
                            vertex: v,
                            triple: [a, b, c],
                            circumradius: v.dist_sq(pts[a]).sqrt(),
                        };
                        if circumcircle_is_empty(&site, pts) {
                            slow.push(site);
                        }
                    }
                }
            }
            slow.sort_by(|a, b| a.vertex.x.total_cmp(&b.vertex.x));
            assert_eq!(fast.len(), slow.len(), "seed {seed}");
            for (f, s) in fast.iter().zip(&slow) {
                assert_eq!(f.triple, s.triple);
                assert!(f.vertex.dist_sq(s.vertex) < 1e-20);
            }
        }
    }
}
