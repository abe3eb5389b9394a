//! Classical two-ball coincidence experiment.
//!
//! Ball 1 lands in bin `b` with probability `p1[b]`, ball 2 independently
//! with `p2[b]`. An observer who can only register the two balls meeting in
//! the same bin sees coincidences at rate `Σ p1·p2`, distributed over bins as
//! the normalized product `p1·p2 / Σ p1·p2`.
//!
//! Trials are processed in fixed chunks of [`CHUNK_TRIALS`]. Chunk `c` draws
//! ball 1 from `stream_seed(seed, BALL1_STREAM, c)` and ball 2 from
//! `stream_seed(seed, BALL2_STREAM, c)`, so results do not depend on how the
//! chunks are scheduled across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_seed, SplitMix64};
use crate::spectral::{InverseCdf, ProbabilityTable};

pub const TABLE_TOL: f64 = 1e-12;
pub const CHUNK_TRIALS: u64 = 1 << 16;
pub const BALL1_STREAM: u64 = 0xB0B1_0000_0000_0001;
pub const BALL2_STREAM: u64 = 0xB0B2_0000_0000_0002;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBallConfig {
    pub bins: usize,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub n: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    1
}

impl TwoBallConfig {
    pub fn uniform(bins: usize, n: u64, seed: u64) -> Self {
        let p = vec![1.0 / bins as f64; bins];
        Self {
            bins,
            p1: p.clone(),
            p2: p,
            n,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 bins, got {}", self.bins)));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("number of throws must be ≥ 1".into()));
        }
        for (name, p) in [("p1", &self.p1), ("p2", &self.p2)] {
            if p.len() != self.bins {
                return Err(Error::InvalidTable(format!("{name} has {} entries for {} bins", p.len(), self.bins)));
            }
            check_table(name, p)?;
        }
        Ok(())
    }
}

fn check_table(name: &str, p: &[f64]) -> Result<()> {
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidTable(format!("{name}[{i}] = {v} is negative or non-finite")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > TABLE_TOL {
        return Err(Error::InvalidTable(format!("{name} sums to {total}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductDistribution {
    pub rate: f64,
    pub conditional: ProbabilityTable,
}

/// Coincidence rate `Σ p1_b p2_b` and the conditional bin distribution
/// given a coincidence.
pub fn product_distribution(p1: &[f64], p2: &[f64]) -> Result<ProductDistribution> {
    if p1.len() != p2.len() {
        return Err(Error::DimensionMismatch {
            expected: p1.len(),
            found: p2.len(),
        });
    }
    check_table("p1", p1)?;
    check_table("p2", p2)?;
    let joint: Vec<f64> = p1.iter().zip(p2).map(|(a, b)| a * b).collect();
    let rate: f64 = joint.iter().sum();
    if rate <= 0.0 {
        return Err(Error::UndefinedConditional);
    }
    let conditional = joint.iter().map(|j| (j / rate).min(1.0)).collect();
    Ok(ProductDistribution {
        rate,
        conditional: ProbabilityTable::indexed(conditional)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoBallResult {
    pub trials: u64,
    pub seed: u64,
    pub coincidences: u64,
    pub coincidences_by_bin: Vec<u64>,
    pub empirical_coincidence_rate: f64,
    /// All zeros when there were no coincidences.
    pub empirical_conditional: Vec<f64>,
    pub exact_rate: f64,
    /// `None` when the two tables have disjoint supports.
    pub exact_conditional: Option<Vec<f64>>,
    pub tv_distance: Option<f64>,
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Coincidence counts per bin for one chunk of trials.
fn run_chunk(cfg: &TwoBallConfig, s1: &InverseCdf, s2: &InverseCdf, chunk: u64, len: u64) -> Vec<u64> {
    let mut ball1 = SplitMix64::new(stream_seed(cfg.seed, BALL1_STREAM, chunk));
    let mut ball2 = SplitMix64::new(stream_seed(cfg.seed, BALL2_STREAM, chunk));
    let mut hits = vec![0u64; cfg.bins];
    for _ in 0..len {
        let b1 = s1.draw(ball1.next_f64());
        let b2 = s2.draw(ball2.next_f64());
        if b1 == b2 {
            hits[b1] += 1;
        }
    }
    hits
}

pub fn run_two_ball(cfg: &TwoBallConfig) -> Result<TwoBallResult> {
    cfg.validate()?;
    let t1 = ProbabilityTable::with_tolerance(cfg.p1.clone(), (0..cfg.bins).map(|b| b as f64).collect(), TABLE_TOL)?;
    let t2 = ProbabilityTable::with_tolerance(cfg.p2.clone(), (0..cfg.bins).map(|b| b as f64).collect(), TABLE_TOL)?;
    let (s1, s2) = (t1.sampler(), t2.sampler());

    let chunks = cfg.n.div_ceil(CHUNK_TRIALS);
    let per_chunk: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_TRIALS.min(cfg.n - c * CHUNK_TRIALS);
            run_chunk(cfg, &s1, &s2, c, len)
        })
        .collect();
    let mut by_bin = vec![0u64; cfg.bins];
    for hits in per_chunk {
        for (t, h) in by_bin.iter_mut().zip(hits) {
            *t += h;
        }
    }
    let coincidences: u64 = by_bin.iter().sum();
    let empirical_conditional: Vec<f64> = if coincidences > 0 {
        by_bin.iter().map(|&h| h as f64 / coincidences as f64).collect()
    } else {
        vec![0.0; cfg.bins]
    };

    let exact_rate: f64 = cfg.p1.iter().zip(&cfg.p2).map(|(a, b)| a * b).sum();
    let exact_conditional = match product_distribution(&cfg.p1, &cfg.p2) {
        Ok(pd) => Some(pd.conditional.probs().to_vec()),
        Err(Error::UndefinedConditional) => None,
        Err(e) => return Err(e),
    };
    let tv_distance = match (&exact_conditional, coincidences) {
        (Some(exact), c) if c > 0 => Some(total_variation(&empirical_conditional, exact)),
        _ => None,
    };

    Ok(TwoBallResult {
        trials: cfg.n,
        seed: cfg.seed,
        coincidences,
        coincidences_by_bin: by_bin,
        empirical_coincidence_rate: coincidences as f64 / cfg.n as f64,
        empirical_conditional,
        exact_rate,
        exact_conditional,
        tv_distance,
    })
}

pub const TWO_BALL_CSV_HEADER: &str = "bin,empirical_conditional,exact_conditional";

pub fn two_ball_csv(result: &TwoBallResult) -> String {
    let mut out = String::from(TWO_BALL_CSV_HEADER);
    out.push('\n');
    for (b, emp) in result.empirical_conditional.iter().enumerate() {
        let exact = result
            .exact_conditional
            .as_ref()
            .map_or_else(|| "nan".to_string(), |e| crate::io::fmt_real(e[b]));
        out.push_str(&format!("{b},{},{exact}\n", crate::io::fmt_real(*emp)));
    }
    out
}
