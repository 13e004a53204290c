//! Per-realization ISR and SIR evaluation.

use rand_xoshiro::Xoshiro256PlusPlus;

use super::estimate::SampleSet;
use super::scenario::{DeploymentKind, Scenario, Scheme};
use super::Engine;
use crate::error::{Error, Result};
use crate::fading::FadingSampler;
use crate::pointfields::{
    sample_lattice, sample_ppp, sample_ppp_sq_distances, sample_tier_marks, voronoi_vertices,
    LatticeKind, Region, TierSpec,
};
use crate::rng::{tags, Stream};

/// Realizations per parallel task.
const CHUNK: usize = 512;
/// Redraws allowed for a worst-case realization without any vertex.
const MAX_ATTEMPTS: u32 = 64;
/// Worst-case vertices are kept within this fraction of the window radius.
pub const INNER_RADIUS_FRACTION: f64 = 0.5;

/// `x^(alpha/2)` specialized on the exponent.
#[derive(Debug, Clone, Copy)]
enum HalfPower {
    Int(i32),
    HalfInt(i32),
    Real(f64),
}

impl HalfPower {
    fn new(half_alpha: f64) -> Self {
        if half_alpha.fract() == 0.0 && half_alpha <= 64.0 {
            HalfPower::Int(half_alpha as i32)
        } else if (half_alpha - 0.5).fract() == 0.0 && half_alpha <= 64.0 {
            HalfPower::HalfInt((half_alpha - 0.5) as i32)
        } else {
            HalfPower::Real(half_alpha)
        }
    }

    #[inline(always)]
    fn apply(self, x: f64) -> f64 {
        match self {
            HalfPower::Int(k) => x.powi(k),
            HalfPower::HalfInt(k) => x.powi(k) * x.sqrt(),
            HalfPower::Real(h) => x.powf(h),
        }
    }
}

/// What each realization produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Output {
    /// Fading-free ISR: distance ratios and powers only.
    MeanIsr,
    /// `h / ISR` with fading on the serving link (and interferers if enabled).
    Sir,
}

/// Random source for interferer fading; a no-op when fading is off.
struct LinkFading {
    sampler: Option<(FadingSampler, Xoshiro256PlusPlus)>,
}

impl LinkFading {
    #[inline(always)]
    fn gain(&mut self) -> f64 {
        match &mut self.sampler {
            None => 1.0,
            Some((s, rng)) => s.sample(rng),
        }
    }
}

pub(crate) struct Kernel<'a> {
    scenario: &'a Scenario,
    region: Region,
    power: HalfPower,
    fading: FadingSampler,
    /// `P_k^(-2/alpha)` per tier: squared distances are scaled by this so
    /// that the strongest average signal has the smallest value.
    tier_scale: Vec<f64>,
    /// HIP only: largest effective squared distance kept. Truncating in the
    /// effective domain makes every tier configuration see the same window.
    hip_cutoff: f64,
    silenced: usize,
    root: Stream,
    fingerprint: u64,
}

impl<'a> Kernel<'a> {
    pub(crate) fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        let half = scenario.alpha.half();
        let tier_scale = match &scenario.deployment {
            DeploymentKind::Hip(tiers) => tiers.iter().map(|t| t.power.powf(-1.0 / half)).collect(),
            _ => vec![1.0],
        };
        let (region, hip_cutoff) = match &scenario.deployment {
            DeploymentKind::Hip(tiers) => {
                // effective positions form a PPP of intensity Σ λ_k / s_k
                let eff: f64 = tiers.iter().zip(&tier_scale).map(|(t, s)| t.intensity / s).sum();
                let cutoff = scenario.window_points as f64 / (std::f64::consts::PI * eff);
                let min_scale = tier_scale.iter().copied().fold(f64::INFINITY, f64::min);
                (Region::disk((cutoff / min_scale).sqrt())?, cutoff)
            }
            _ => (scenario.region()?, f64::INFINITY),
        };
        Ok(Kernel {
            scenario,
            region,
            power: HalfPower::new(half),
            fading: scenario.fading.sampler()?,
            tier_scale,
            hip_cutoff,
            silenced: match scenario.scheme {
                Scheme::Silence(n) => n as usize,
                _ => 0,
            },
            root: Stream::root(scenario.master_seed),
            fingerprint: scenario.fingerprint(),
        })
    }

    fn link_fading(&self, output: Output, stream: Stream) -> LinkFading {
        let on = output == Output::Sir && self.scenario.interferer_fading && !self.scenario.fading.is_none();
        LinkFading {
            sampler: on.then(|| (self.fading, stream.child(tags::INTERFERER_FADING).rng())),
        }
    }

    /// Appends the samples of realization `index` to `out`; returns the
    /// number of rejected attempts.
    pub(crate) fn realization(&self, index: u64, output: Output, out: &mut Vec<f64>) -> Result<u32> {
        let stream = self.root.child(index);
        let start = out.len();
        let mut attempt = 0u32;
        loop {
            let deployment = stream.path(&[tags::DEPLOYMENT, attempt as u64]);
            let mut links = self.link_fading(output, stream);
            if self.scenario.scheme.is_worst_case() {
                self.worst_case(deployment, &mut links, out)?;
            } else {
                out.push(self.typical_user(deployment, &mut links)?);
            }
            if out.len() > start {
                break;
            }
            attempt += 1;
            if attempt >= MAX_ATTEMPTS {
                return Err(Error::NoSite {
                    index,
                    attempts: attempt,
                    fingerprint: self.fingerprint,
                });
            }
        }
        if output == Output::Sir {
            let mut rng = stream.child(tags::SERVING_FADING).rng();
            for v in &mut out[start..] {
                *v = self.fading.sample(&mut rng) / *v;
            }
        }
        Ok(attempt)
    }

    /// Effective squared distances `r^2 P^(-2/alpha)` of all base stations,
    /// plus whether they are already ascending.
    fn effective_sq_distances(&self, stream: Stream) -> Result<(Vec<f64>, bool)> {
        match &self.scenario.deployment {
            DeploymentKind::Ppp => Ok((sample_ppp_sq_distances(1.0, self.region, stream)?, true)),
            DeploymentKind::Hip(tiers) => self.hip_distances(tiers, stream),
            DeploymentKind::SquareLattice | DeploymentKind::TriangularLattice => {
                let kind = if self.scenario.deployment == DeploymentKind::SquareLattice {
                    LatticeKind::Square
                } else {
                    LatticeKind::Triangular
                };
                let d = sample_lattice(kind, 1.0, self.region, stream)?;
                let d2 = d.tiers()[0].points.points().iter().map(|p| p.norm_sq()).collect();
                Ok((d2, true))
            }
        }
    }

    fn hip_distances(&self, tiers: &[TierSpec], stream: Stream) -> Result<(Vec<f64>, bool)> {
        let total: f64 = tiers.iter().map(|t| t.intensity).sum();
        let mut d2 = sample_ppp_sq_distances(total, self.region, stream)?;
        let marks = sample_tier_marks(tiers, d2.len(), stream)?;
        let uniform = self.tier_scale.iter().all(|&s| s == self.tier_scale[0]);
        for (d, &m) in d2.iter_mut().zip(&marks) {
            *d *= self.tier_scale[m as usize];
        }
        d2.retain(|&d| d <= self.hip_cutoff);
        Ok((d2, uniform))
    }

    fn typical_user(&self, stream: Stream, links: &mut LinkFading) -> Result<f64> {
        let (d, sorted) = self.effective_sq_distances(stream)?;
        let keep_out = self.silenced + 1;
        if d.len() < keep_out + 1 {
            return Err(Error::InsufficientPoints {
                needed: keep_out + 1,
                got: d.len(),
            });
        }
        // indices of the serving BS and the silenced ones, strongest first
        let strongest = if sorted {
            (0..keep_out).collect()
        } else {
            k_smallest(&d, keep_out)
        };
        let serving = d[strongest[0]];
        let mut isr = 0.0;
        if sorted {
            for &x in &d[keep_out..] {
                isr += links.gain() * self.power.apply(serving / x);
            }
        } else {
            for (i, &x) in d.iter().enumerate() {
                if !strongest.contains(&i) {
                    isr += links.gain() * self.power.apply(serving / x);
                }
            }
        }
        Ok(isr)
    }

    fn worst_case(&self, stream: Stream, links: &mut LinkFading, out: &mut Vec<f64>) -> Result<()> {
        let cooperating = match self.scenario.scheme {
            Scheme::WorstCaseCoop(n) => n,
            _ => 1,
        };
        let points = sample_ppp(1.0, self.region, stream)?;
        if points.len() < 3 {
            return Ok(());
        }
        let sites = voronoi_vertices(&points, INNER_RADIUS_FRACTION * self.region.radius())?;
        let pts = points.points();
        for site in sites {
            let r2 = site.circumradius * site.circumradius;
            let mut isr = 0.0;
            for _ in cooperating..3 {
                isr += links.gain();
            }
            for (j, p) in pts.iter().enumerate() {
                if !site.triple.contains(&j) {
                    isr += links.gain() * self.power.apply(r2 / site.vertex.dist_sq(*p));
                }
            }
            out.push(isr / cooperating as f64);
        }
        Ok(())
    }
}

/// Indices of the `k` smallest values, ascending, ties to the lower index.
fn k_smallest(d: &[f64], k: usize) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::with_capacity(k + 1);
    for (i, &x) in d.iter().enumerate() {
        if best.len() == k && x >= d[best[k - 1]] {
            continue;
        }
        let pos = best.partition_point(|&j| d[j] <= x);
        best.insert(pos, i);
        best.truncate(k);
    }
    best
}

struct Chunk {
    values: Vec<f64>,
    sizes: Vec<u32>,
    rejected: u64,
}

pub(crate) fn collect(engine: &Engine, scenario: &Scenario, output: Output) -> Result<SampleSet> {
    let kernel = Kernel::new(scenario)?;
    let n = scenario.realizations as usize;
    let chunks = n.div_ceil(CHUNK);
    let results = engine.map_indexed(chunks, |c| -> Result<Chunk> {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(n);
        let mut chunk = Chunk {
            values: Vec::with_capacity(hi - lo),
            sizes: Vec::with_capacity(hi - lo),
            rejected: 0,
        };
        for index in lo..hi {
            let before = chunk.values.len();
            chunk.rejected += kernel.realization(index as u64, output, &mut chunk.values)? as u64;
            chunk.sizes.push((chunk.values.len() - before) as u32);
        }
        Ok(chunk)
    });
    let mut values = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(n);
    let mut rejected = 0;
    for r in results {
        let c = r?;
        values.extend_from_slice(&c.values);
        sizes.extend_from_slice(&c.sizes);
        rejected += c.rejected;
    }
    let grouped = scenario.scheme.is_worst_case();
    SampleSet::new(values, grouped.then_some(sizes), kernel.fingerprint, rejected)
}
