//! Exact recall probabilities by complete enumeration.
//!
//! With `m` cue components, an attempt fixes a cue subset `S` (`|S| = m`) to
//! the reference values and draws the other `n - m` components uniformly from
//! `{+1, -1}`. Under [`CuePlacement::Averaged`] every subset is equally likely,
//! so the probability is a count over `C(n, m) * 2^(n - m)` configurations.
//! [`CuePlacement::Leading`] always cues positions `0..m`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{full_mask, CuePlacement, TrainedNet};
use crate::rational::{binomial_u64, RationalProb};

/// Unreduced success count over an enumerated configuration space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct RecallCount {
    pub successes: u64,
    pub total: u64,
}

impl RecallCount {
    pub fn probability(&self) -> RationalProb {
        RationalProb::from_counts(self.successes, self.total)
    }
}

/// Exact `P` at every cue size `m = 0..=n` (`q = m/n`, `d = 1 - q`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct RecallCurve {
    pub n: usize,
    pub points: Vec<RationalProb>,
}

impl RecallCurve {
    /// Free-recall probability (`m = 0`).
    pub fn free_recall(&self) -> &RationalProb {
        &self.points[0]
    }

    /// Recognition probability (`m = n`).
    pub fn recognition(&self) -> &RationalProb {
        &self.points[self.n]
    }

    pub fn cue_intensity(&self, m: usize) -> f64 {
        m as f64 / self.n as f64
    }
}

/// Iterates all `n`-bit masks with exactly `k` bits set, in increasing order.
fn masks_with_popcount(n: usize, k: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << n;
    let first = if k == 0 { 0u64 } else { (1u64 << k) - 1 };
    let mut next = Some(first).filter(|&f| f < limit);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let v = (((r ^ cur) >> 2) / c) | r;
            Some(v).filter(|&v| v < limit)
        };
        Some(cur as u32)
    })
}

/// Iterates every submask of `mask`, including `0` and `mask` itself.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

fn check_cue(net: &TrainedNet, m: usize) -> Result<()> {
    if m > net.n() {
        Err(Error::CueSize { m, n: net.n() })
    } else {
        Ok(())
    }
}

/// Success count by walking every cue subset and every noise assignment.
pub fn exact_recall_count(net: &TrainedNet, m: usize) -> Result<RecallCount> {
    check_cue(net, m)?;
    let n = net.n();
    let kernel = net.kernel();
    let x0 = net.reference().bits();
    let subsets: Box<dyn Iterator<Item = u32>> = match net.conventions().cue {
        CuePlacement::Averaged => Box::new(masks_with_popcount(n, m)),
        CuePlacement::Leading => Box::new(std::iter::once(full_mask(m))),
    };
    let mut successes = 0u64;
    let mut total = 0u64;
    for cue in subsets {
        let cued = x0 & cue;
        for noise in submasks(full_mask(n) & !cue) {
            total += 1;
            if kernel.is_success(cued | noise) {
                successes += 1;
            }
        }
    }
    Ok(RecallCount { successes, total })
}

pub fn exact_recall_prob(net: &TrainedNet, m: usize) -> Result<RationalProb> {
    Ok(exact_recall_count(net, m)?.probability())
}

/// Free-recall success count over all `2^n` inputs.
pub fn free_recall_count(net: &TrainedNet) -> u64 {
    net.kernel().success_count()
}

/// Whole curve from a single pass over the `2^n` inputs.
///
/// A full input `u` arises from cue subset `S` iff `u` agrees with the
/// reference on `S`, so under averaged placement the count at cue size `m`
/// is `sum_u success(u) * C(agree(u), m)`. Under leading placement it is the
/// number of successful inputs whose agreement prefix is at least `m` long.
pub fn recall_counts(net: &TrainedNet) -> Vec<RecallCount> {
    let n = net.n();
    let kernel = net.kernel();
    let x0 = net.reference().bits();
    let all = full_mask(n);
    let mut hist = vec![0u64; n + 1];
    let placement = net.conventions().cue;
    for u in 0..=all {
        if !kernel.is_success(u) {
            continue;
        }
        let agree = !(u ^ x0) & all;
        let key = match placement {
            CuePlacement::Averaged => agree.count_ones() as usize,
            CuePlacement::Leading => (agree.trailing_ones() as usize).min(n),
        };
        hist[key] += 1;
    }
    (0..=n)
        .map(|m| {
            let free = 1u64 << (n - m);
            match placement {
                CuePlacement::Averaged => RecallCount {
                    successes: (m..=n).map(|a| hist[a] * binomial_u64(a as u64, m as u64)).sum(),
                    total: binomial_u64(n as u64, m as u64) * free,
                },
                CuePlacement::Leading => {
                    RecallCount { successes: hist[m..].iter().sum(), total: free }
                }
            }
        })
        .collect()
}

pub fn recall_curve(net: &TrainedNet) -> RecallCurve {
    RecallCurve {
        n: net.n(),
        points: recall_counts(net).iter().map(RecallCount::probability).collect(),
    }
}

/// Sampled recall probability with its binomial standard error.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Bernoulli estimate of [`exact_recall_prob`]; deterministic for a given seed.
pub fn mc_recall_estimate(net: &TrainedNet, m: usize, trials: u64, seed: u64) -> Result<McEstimate> {
    check_cue(net, m)?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let n = net.n();
    let all = full_mask(n);
    let x0 = net.reference().bits();
    let kernel = net.kernel();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0u64;
    for _ in 0..trials {
        let cue = match net.conventions().cue {
            CuePlacement::Averaged => {
                index::sample(&mut rng, n, m).iter().fold(0u32, |acc, i| acc | 1 << i)
            }
            CuePlacement::Leading => full_mask(m),
        };
        let noise: u32 = rng.random::<u32>() & all;
        if kernel.is_success((x0 & cue) | (noise & !cue)) {
            successes += 1;
        }
    }
    let estimate = successes as f64 / trials as f64;
    let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McEstimate { successes, trials, estimate, std_error })
}
