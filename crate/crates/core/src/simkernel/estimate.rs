use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monte Carlo samples of the ISR or SIR for one scenario.
///
/// Samples are grouped by deployment realization. Typical-user schemes give
/// one sample per realization; worst-case schemes give one per Voronoi vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    /// Samples contributed by each accepted realization, `None` when every
    /// realization contributed exactly one.
    group_sizes: Option<Vec<u32>>,
    fingerprint: u64,
    rejected: u64,
}

pub type IsrSampleSet = SampleSet;

impl SampleSet {
    pub fn new(values: Vec<f64>, group_sizes: Option<Vec<u32>>, fingerprint: u64, rejected: u64) -> Result<Self> {
        if let Some(g) = &group_sizes {
            let total: u64 = g.iter().map(|&c| c as u64).sum();
            if total != values.len() as u64 {
                return Err(Error::InvalidParameter(format!(
                    "group sizes add up to {total}, expected {}",
                    values.len()
                )));
            }
        }
        Ok(SampleSet {
            values,
            group_sizes,
            fingerprint,
            rejected,
        })
    }

    /// Ungrouped samples.
    pub fn from_values(values: Vec<f64>) -> Self {
        SampleSet {
            values,
            group_sizes: None,
            fingerprint: 0,
            rejected: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn group_sizes(&self) -> Option<&[u32]> {
        self.group_sizes.as_deref()
    }

    pub fn groups(&self) -> usize {
        self.group_sizes.as_ref().map_or(self.values.len(), Vec::len)
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Realizations discarded because they produced no sample.
    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    /// Iterator over the samples of each group.
    pub fn group_slices(&self) -> Box<dyn Iterator<Item = &[f64]> + '_> {
        match &self.group_sizes {
            None => Box::new(self.values.chunks(1)),
            Some(sizes) => {
                let mut start = 0usize;
                Box::new(sizes.iter().map(move |&c| {
                    let s = &self.values[start..start + c as usize];
                    start += c as usize;
                    s
                }))
            }
        }
    }

    /// Mean of `f(sample)` with a batch-means standard error over groups.
    pub fn mean_of<F: Fn(f64) -> f64>(&self, f: F) -> Result<MisrEstimate> {
        if self.values.is_empty() {
            return Err(Error::InsufficientPoints { needed: 1, got: 0 });
        }
        let n = self.values.len();
        let terms: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let total: f64 = terms.iter().sum();
        let mean = total / n as f64;
        let stderr = match &self.group_sizes {
            None => {
                if n < 2 {
                    f64::INFINITY
                } else {
                    let ss: f64 = terms.iter().map(|t| (t - mean).powi(2)).sum();
                    (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
                }
            }
            Some(sizes) => {
                let b = sizes.len();
                if b < 2 {
                    f64::INFINITY
                } else {
                    let mut start = 0usize;
                    let mut ss = 0.0;
                    for &c in sizes {
                        let s: f64 = terms[start..start + c as usize].iter().sum();
                        ss += (s - mean * c as f64).powi(2);
                        start += c as usize;
                    }
                    let mean_count = n as f64 / b as f64;
                    (ss / (b as f64 * (b - 1) as f64)).sqrt() / mean_count
                }
            }
        };
        Ok(MisrEstimate {
            mean,
            stderr,
            n: n as u64,
            heavy_tail: top_share(&terms, total) > HEAVY_TAIL_SHARE,
        })
    }
}

/// Share of the moment sum above which an estimate is flagged heavy-tailed.
pub const HEAVY_TAIL_SHARE: f64 = 0.5;

/// Fraction of `total` contributed by the largest 1% of `terms`.
fn top_share(terms: &[f64], total: f64) -> f64 {
    if total <= 0.0 || terms.is_empty() {
        return 0.0;
    }
    let k = terms.len().div_ceil(100);
    let mut v = terms.to_vec();
    let idx = v.len() - k;
    v.select_nth_unstable_by(idx, |a, b| a.total_cmp(b));
    v[idx..].iter().sum::<f64>() / total
}

/// Sample mean of the ISR (or one of its powers) with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisrEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    /// The top 1% of samples carry more than half of the estimate.
    pub heavy_tail: bool,
}

impl MisrEstimate {
    /// `|a - b| / sqrt(se_a^2 + se_b^2)`.
    pub fn z_score(&self, other: &MisrEstimate) -> f64 {
        (self.mean - other.mean).abs() / (self.stderr.powi(2) + other.stderr.powi(2)).sqrt()
    }
}
