//! Seeded, chunk-parallel Monte Carlo estimation over ordered fading gains.
//!
//! Draws are organized in fixed-size chunks, each driven by its own
//! counter-seeded ChaCha stream, so an estimate is a pure function of
//! `(seed, n_samples, chunk_size)` no matter how many workers rayon uses:
//! chunk counts are integers and their sum is order-independent.

use crate::config::{ChannelRealization, SchemeKind, SystemConfig};
use crate::estimate::ProbabilityEstimate;
use crate::model::{self, Region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub const DEFAULT_CHUNK_SIZE: u64 = 65_536;

/// Reproducibility contract for one Monte Carlo run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerSpec {
    pub seed: u64,
    pub n_samples: u64,
    pub chunk_size: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplerError {
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("chunk size must be at least 1")]
    ZeroChunk,
}

impl SamplerSpec {
    pub fn new(seed: u64, n_samples: u64, chunk_size: u64) -> Result<Self, SamplerError> {
        if n_samples == 0 {
            return Err(SamplerError::ZeroSamples);
        }
        if chunk_size == 0 {
            return Err(SamplerError::ZeroChunk);
        }
        Ok(Self { seed, n_samples, chunk_size })
    }

    pub fn with_defaults(seed: u64, n_samples: u64) -> Result<Self, SamplerError> {
        Self::new(seed, n_samples, DEFAULT_CHUNK_SIZE)
    }

    fn chunk_count(&self) -> u64 {
        self.n_samples.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, index: u64) -> u64 {
        let start = index * self.chunk_size;
        self.chunk_size.min(self.n_samples - start)
    }
}

fn chunk_rng(seed: u64, chunk_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index);
    rng
}

#[inline]
fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p() // -ln(1 - u), u in [0, 1)
}

/// Draw `buf.len()` unit exponentials and sort ascending.  Insertion sort
/// wins for the small user counts this tool targets (the analysis itself is
/// exercised at M = 5); larger draws fall back to the standard sort.
#[inline]
fn fill_sorted_gains(rng: &mut ChaCha8Rng, buf: &mut [f64]) {
    for slot in buf.iter_mut() {
        *slot = exp1(rng);
    }
    if buf.len() <= 16 {
        for i in 1..buf.len() {
            let v = buf[i];
            let mut j = i;
            while j > 0 && buf[j - 1] > v {
                buf[j] = buf[j - 1];
                j -= 1;
            }
            buf[j] = v;
        }
    } else {
        buf.sort_unstable_by(f64::total_cmp);
    }
}

const MAX_STACK_USERS: usize = 16;

/// Runs `accumulate` over every draw of every chunk and sums the resulting
/// count vectors.  `K` counters per chunk keep the reduction commutative.
fn chunked_counts<const K: usize, F>(users: usize, spec: &SamplerSpec, accumulate: F) -> [u64; K]
where
    F: Fn(&[f64], &mut [u64; K]) + Sync,
{
    (0..spec.chunk_count())
        .into_par_iter()
        .map(|ci| {
            let mut rng = chunk_rng(spec.seed, ci);
            let mut stack = [0.0f64; MAX_STACK_USERS];
            let mut heap;
            let buf: &mut [f64] = if users <= MAX_STACK_USERS {
                &mut stack[..users]
            } else {
                heap = vec![0.0; users];
                &mut heap
            };
            let mut counts = [0u64; K];
            for _ in 0..spec.chunk_len(ci) {
                fill_sorted_gains(&mut rng, buf);
                accumulate(buf, &mut counts);
            }
            counts
        })
        .reduce(
            || [0u64; K],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Deterministic stream of ordered channel realizations.
///
/// The sequence visits chunks in index order, so it enumerates exactly the
/// draws the parallel estimators consume.
pub fn sample_ordered_gains(
    users: usize,
    spec: &SamplerSpec,
) -> impl Iterator<Item = ChannelRealization> + '_ {
    assert!(users >= 2, "need at least two users");
    let total_chunks = spec.chunk_count();
    (0..total_chunks).flat_map(move |ci| {
        let mut rng = chunk_rng(spec.seed, ci);
        (0..spec.chunk_len(ci)).map(move |_| {
            let mut gains = vec![0.0; users];
            fill_sorted_gains(&mut rng, &mut gains);
            ChannelRealization::new(gains).expect("sorted by construction")
        })
    })
}

/// Monte Carlo estimate of the hybrid-vs-OMA failure probability for one
/// scheme.
pub fn mc_probability(
    cfg: &SystemConfig,
    scheme: SchemeKind,
    spec: &SamplerSpec,
) -> Result<ProbabilityEstimate, model::ModelError> {
    match scheme {
        SchemeKind::HsicHybrid | SchemeKind::FsicHybrid => {}
        SchemeKind::Oma => return Err(model::ModelError::NotHybrid(scheme)),
    }
    let (mi, ni) = (cfg.m - 1, cfg.n - 1);
    let hits = chunked_counts::<1, _>(cfg.users, spec, |gains, counts| {
        let (x, y) = (gains[mi], gains[ni]);
        let hit = match scheme {
            SchemeKind::HsicHybrid => model::hsic_indicator(cfg, x, y),
            _ => model::fsic_indicator(cfg, x, y),
        };
        counts[0] += hit as u64;
    })[0];
    Ok(ProbabilityEstimate::monte_carlo(hits, spec.n_samples))
}

/// HSIC and FSIC estimates from one shared sample stream.  Because HSIC
/// failure implies FSIC failure realization by realization, the HSIC value
/// never exceeds the FSIC value here.
#[derive(Clone, Copy, Debug)]
pub struct SchemePair {
    pub hsic: ProbabilityEstimate,
    pub fsic: ProbabilityEstimate,
}

pub fn mc_probability_pair(cfg: &SystemConfig, spec: &SamplerSpec) -> SchemePair {
    let (mi, ni) = (cfg.m - 1, cfg.n - 1);
    let counts = chunked_counts::<2, _>(cfg.users, spec, |gains, counts| {
        let (x, y) = (gains[mi], gains[ni]);
        counts[0] += model::hsic_indicator(cfg, x, y) as u64;
        counts[1] += model::fsic_indicator(cfg, x, y) as u64;
    });
    SchemePair {
        hsic: ProbabilityEstimate::monte_carlo(counts[0], spec.n_samples),
        fsic: ProbabilityEstimate::monte_carlo(counts[1], spec.n_samples),
    }
}

/// Empirical masses of the four-region partition on a shared stream.
#[derive(Clone, Copy, Debug)]
pub struct RegionMasses {
    pub p11: ProbabilityEstimate,
    pub p12: ProbabilityEstimate,
    pub p21: ProbabilityEstimate,
    pub p22: ProbabilityEstimate,
    counts: [u64; 4],
    n_samples: u64,
}

impl RegionMasses {
    pub fn get(&self, region: Region) -> ProbabilityEstimate {
        match region {
            Region::P11 => self.p11,
            Region::P12 => self.p12,
            Region::P21 => self.p21,
            Region::P22 => self.p22,
        }
    }

    /// Sum of the four masses; equals the HSIC estimate on the same stream
    /// bit for bit (the hit counts are summed before the division).
    pub fn total(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.n_samples as f64
    }
}

pub fn mc_region_decomposition(cfg: &SystemConfig, spec: &SamplerSpec) -> RegionMasses {
    let (mi, ni) = (cfg.m - 1, cfg.n - 1);
    let counts = chunked_counts::<4, _>(cfg.users, spec, |gains, counts| {
        if let Some(region) = model::lemma1_region(cfg, gains[mi], gains[ni]) {
            let slot = match region {
                Region::P11 => 0,
                Region::P12 => 1,
                Region::P21 => 2,
                Region::P22 => 3,
            };
            counts[slot] += 1;
        }
    });
    RegionMasses {
        p11: ProbabilityEstimate::monte_carlo(counts[0], spec.n_samples),
        p12: ProbabilityEstimate::monte_carlo(counts[1], spec.n_samples),
        p21: ProbabilityEstimate::monte_carlo(counts[2], spec.n_samples),
        p22: ProbabilityEstimate::monte_carlo(counts[3], spec.n_samples),
        counts,
        n_samples: spec.n_samples,
    }
}
