//! Batched Monte Carlo averaging of matrix-valued samples with a batch
//! bootstrap for scalar functionals of the mean.
//!
//! Samples are split into a fixed number of batches, each driven by its own
//! RNG substream. Batches may run on any number of threads; their sums are
//! reduced in batch order, so results depend only on the seed.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::qcore::linalg::{CMatrix, C64};
use crate::rng::{streams, substream, LabRng};

pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_RESAMPLES: usize = 200;
const MAX_BATCHES: usize = 64;
const MIN_BATCHES: usize = 8;
const BATCH_MEMORY_BYTES: usize = 512 << 20;

/// Point estimate with a Monte Carlo error bar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            stderr: 0.0,
            samples: 0,
        }
    }
}

/// Per-batch sums of sampled matrices.
#[derive(Clone, Debug)]
pub struct BatchSums {
    pub sums: Vec<CMatrix>,
    pub counts: Vec<usize>,
}

impl BatchSums {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> CMatrix {
        let mut acc = self.sums[0].clone();
        for s in &self.sums[1..] {
            acc += s;
        }
        acc / C64::new(self.total() as f64, 0.0)
    }

    /// Entrywise standard error of the mean, from the spread of batch means.
    pub fn entry_stderr(&self) -> nalgebra::DMatrix<f64> {
        let b = self.sums.len();
        let mean = self.mean();
        let (r, c) = mean.shape();
        let mut var = nalgebra::DMatrix::<f64>::zeros(r, c);
        if b < 2 {
            return var;
        }
        for (s, &n) in self.sums.iter().zip(&self.counts) {
            let bm = s / C64::new(n as f64, 0.0);
            for j in 0..c {
                for i in 0..r {
                    var[(i, j)] += (bm[(i, j)] - mean[(i, j)]).norm_sqr();
                }
            }
        }
        // batch means carry variance σ²/n_b; the grand mean σ²/N
        let scale = 1.0 / ((b - 1) as f64 * b as f64);
        var.map(|v| (v * scale).sqrt())
    }

    /// Mean and error bar of `g(mean)` by resampling whole batches.
    pub fn bootstrap<G>(&self, resamples: usize, seed: u64, g: G) -> Result<Estimate>
    where
        G: Fn(&CMatrix) -> Result<f64> + Sync,
    {
        let value = g(&self.mean())?;
        let b = self.sums.len();
        if b < 2 || resamples == 0 {
            return Ok(Estimate {
                value,
                stderr: 0.0,
                samples: self.total(),
            });
        }
        let draws: Vec<Vec<usize>> = {
            let mut rng = substream(seed, streams::BOOTSTRAP, 0);
            (0..resamples)
                .map(|_| (0..b).map(|_| rng.random_range(0..b)).collect())
                .collect()
        };
        let reps: Vec<f64> = draws
            .par_iter()
            .map(|idx| {
                let mut acc = self.sums[idx[0]].clone();
                let mut n = self.counts[idx[0]];
                for &k in &idx[1..] {
                    acc += &self.sums[k];
                    n += self.counts[k];
                }
                g(&(acc / C64::new(n as f64, 0.0)))
            })
            .collect::<Result<_>>()?;
        let mean_rep = reps.iter().sum::<f64>() / reps.len() as f64;
        let var =
            reps.iter().map(|r| (r - mean_rep).powi(2)).sum::<f64>() / (reps.len() - 1) as f64;
        // norms of noisy matrices are biased upwards; fold the bootstrap
        // bias estimate into the error bar rather than hiding it
        let bias = mean_rep - value;
        Ok(Estimate {
            value,
            stderr: (var + bias * bias).sqrt(),
            samples: self.total(),
        })
    }
}

/// Number of batches for `samples` draws of `dim x dim` matrices.
pub fn choose_batches(samples: usize, dim: usize) -> usize {
    let per = dim * dim * std::mem::size_of::<C64>();
    let by_memory = (BATCH_MEMORY_BYTES / per.max(1)).max(MIN_BATCHES);
    samples.clamp(1, MAX_BATCHES).min(by_memory)
}

/// Sums `f(rng)` over `samples` draws split into `batches` substreams.
pub fn batched_sum<F>(
    samples: usize,
    batches: usize,
    seed: u64,
    label: u64,
    f: F,
) -> Result<BatchSums>
where
    F: Fn(&mut LabRng) -> Result<CMatrix> + Sync,
{
    if samples == 0 {
        return Err(LabError::Invalid(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let batches = batches.clamp(1, samples);
    let base = samples / batches;
    let extra = samples % batches;
    let results: Vec<(CMatrix, usize)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = base + usize::from(b < extra);
            let mut rng = substream(seed, label, b as u64);
            let mut acc = f(&mut rng)?;
            for _ in 1..n {
                acc += f(&mut rng)?;
            }
            Ok((acc, n))
        })
        .collect::<Result<_>>()?;
    let (sums, counts) = results.into_iter().unzip();
    Ok(BatchSums { sums, counts })
}

/// Wilson score interval at ~95% (z = 1.96).
pub fn wilson_interval(wins: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = trials as f64;
    let p = wins as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin(rng: &mut LabRng) -> Result<CMatrix> {
        Ok(CMatrix::from_element(
            1,
            1,
            C64::new(rng.random::<f64>(), 0.0),
        ))
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let a = batched_sum(1000, 16, 9, 1, coin).unwrap().mean();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| batched_sum(1000, 16, 9, 1, coin).unwrap().mean());
        assert_eq!(a, b);
        assert!((a[(0, 0)].re - 0.5).abs() < 0.05);
    }

    #[test]
    fn bootstrap_error_matches_clt() {
        let sums = batched_sum(4096, 64, 3, 1, coin).unwrap();
        let est = sums.bootstrap(200, 3, |m| Ok(m[(0, 0)].re)).unwrap();
        // uniform(0,1) has sd 0.2887; stderr of the mean over 4096 draws is 0.0045
        assert!(
            est.stderr > 0.002 && est.stderr < 0.009,
            "stderr {}",
            est.stderr
        );
        let se = sums.entry_stderr()[(0, 0)];
        assert!(se > 0.002 && se < 0.009, "entry stderr {se}");
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && hi - lo < 0.21);
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi < 0.05);
    }

    #[test]
    fn batch_choice_respects_memory() {
        assert_eq!(choose_batches(4096, 16), 64);
        assert_eq!(choose_batches(10, 16), 10);
        assert!(choose_batches(4096, 1024) <= 32);
    }
}
