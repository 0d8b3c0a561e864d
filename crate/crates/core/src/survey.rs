//! Monte Carlo survey over uniformly random cut-link sets.
//!
//! Every trial draws `n_d` distinct links out of the `n * n`, cuts them from
//! the trained net and records the exact free-recall success count over all
//! `2^n` inputs. Trials are grouped into series so that frequencies come with
//! an across-series spread.
//!
//! Each trial owns an RNG stream keyed by `(seed, series, trial)`, so the
//! result does not depend on how trials are split across workers.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::statistics::Statistics;

use crate::error::{Error, Result};
use crate::net::{BipolarVector, Conventions, DamageSpec, Link, TrainedNet, MAX_NEURONS};
use crate::rational::RationalProb;
use crate::recall::free_recall_count;

/// Which free-recall value to log matching damage sets for.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchTarget {
    /// P_FR of the net with input neurons `0..n_k` deleted, computed at run time.
    NeuronLoss { n_k: usize },
    /// An explicit probability; it must be expressible as `k / 2^n`.
    Exact(RationalProb),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub n: usize,
    pub n_d: usize,
    pub trials_per_series: u64,
    pub series: u32,
    pub seed: u64,
    pub conventions: Conventions,
    pub reference: BipolarVector,
    pub target: Option<MatchTarget>,
}

impl SurveyConfig {
    /// Nine neurons, ten cut links, ten series of 10^5 trials, logging sets
    /// that match the four-neuron-deletion P_FR.
    pub fn default_protocol(seed: u64) -> Self {
        Self {
            n: 9,
            n_d: 10,
            trials_per_series: 100_000,
            series: 10,
            seed,
            conventions: Conventions::default(),
            reference: BipolarVector::all_plus(9).expect("9 neurons"),
            target: Some(MatchTarget::NeuronLoss { n_k: 4 }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_NEURONS {
            return Err(Error::NeuronCount(self.n));
        }
        if self.n_d > self.n * self.n {
            return Err(Error::CutSetSize { n_d: self.n_d, links: self.n * self.n });
        }
        if self.trials_per_series == 0 {
            return Err(Error::Config("trials_per_series must be at least 1".into()));
        }
        if self.series == 0 {
            return Err(Error::Config("series must be at least 1".into()));
        }
        if self.reference.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: self.reference.len() });
        }
        if let Some(MatchTarget::NeuronLoss { n_k }) = self.target {
            if n_k > self.n {
                return Err(Error::Config(format!("n_k = {n_k} exceeds n = {}", self.n)));
            }
        }
        Ok(())
    }

    pub fn total_trials(&self) -> u64 {
        self.trials_per_series * u64::from(self.series)
    }

    pub fn intact_net(&self) -> TrainedNet {
        TrainedNet::train(self.reference, self.conventions)
    }

    /// Resolves the match target to a success count out of `2^n`.
    pub fn target_count(&self) -> Result<Option<u64>> {
        let Some(target) = &self.target else {
            return Ok(None);
        };
        let count = match target {
            MatchTarget::NeuronLoss { n_k } => {
                let net = self.intact_net().apply_damage(&DamageSpec::delete_inputs(0..*n_k))?;
                free_recall_count(&net)
            }
            MatchTarget::Exact(p) => {
                let scaled = p.numer() * (num_bigint::BigUint::from(1u32) << self.n);
                if &scaled % p.denom() != num_bigint::BigUint::from(0u32) {
                    return Err(Error::Config(format!(
                        "target {p} is not a multiple of 1/2^{}",
                        self.n
                    )));
                }
                let k = scaled / p.denom();
                u64::try_from(k).expect("k <= 2^n")
            }
        };
        Ok(Some(count))
    }
}

/// One logged trial whose P_FR hit the target.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct MatchRecord {
    pub series: u32,
    pub trial: u64,
    pub links: Vec<Link>,
}

/// Timing and build info; not part of the serialized survey.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct RunInfo {
    pub wall_clock_secs: f64,
    pub version: String,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct LesionSurvey {
    pub config: SurveyConfig,
    /// Free-recall success count of the undamaged net.
    pub intact_count: u64,
    pub target_count: Option<u64>,
    /// Per series: success count (out of `2^n`) to number of trials.
    pub histograms: Vec<BTreeMap<u64, u64>>,
    /// Sorted by `(series, trial)`.
    pub matched: Vec<MatchRecord>,
    #[serde(skip)]
    pub run: RunInfo,
}

impl LesionSurvey {
    pub fn empty(config: SurveyConfig) -> Result<Self> {
        config.validate()?;
        let intact_count = free_recall_count(&config.intact_net());
        let target_count = config.target_count()?;
        Ok(Self {
            histograms: vec![BTreeMap::new(); config.series as usize],
            config,
            intact_count,
            target_count,
            matched: Vec::new(),
            run: RunInfo { wall_clock_secs: 0.0, version: env!("CARGO_PKG_VERSION").to_string() },
        })
    }

    pub fn total_trials(&self) -> u64 {
        self.histograms.iter().flat_map(|h| h.values()).sum()
    }

    /// Trials per key summed over series.
    pub fn pooled(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for h in &self.histograms {
            for (&k, &c) in h {
                *out.entry(k).or_insert(0) += c;
            }
        }
        out
    }

    pub fn distinct_values(&self) -> usize {
        self.pooled().len()
    }

    /// P_FR for a histogram key.
    pub fn key_probability(&self, key: u64) -> RationalProb {
        RationalProb::from_counts(key, 1u64 << self.config.n)
    }

    /// Frequency statistics of the bin holding the intact net's P_FR.
    pub fn intact_bin(&self) -> FrequencyStats {
        let counts: Vec<u64> =
            self.histograms.iter().map(|h| h.get(&self.intact_count).copied().unwrap_or(0)).collect();
        frequency_stats(&counts, self.config.trials_per_series)
    }
}

/// Domain-separated stream for one trial.
pub fn trial_rng(seed: u64, series: u32, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..12].copy_from_slice(&series.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..32].copy_from_slice(b"cutlinks");
    ChaCha8Rng::from_seed(key)
}

/// Uniform `n_d`-subset of the `n * n` links, in sorted order.
///
/// Partial Fisher-Yates over link indices `i * n + j`.
pub fn sample_cut_set<R: Rng + ?Sized>(rng: &mut R, n: usize, n_d: usize) -> Result<Vec<Link>> {
    let total = n * n;
    if n_d > total {
        return Err(Error::CutSetSize { n_d, links: total });
    }
    let mut idx: Vec<u16> = (0..total as u16).collect();
    for k in 0..n_d {
        let r = rng.random_range(k..total);
        idx.swap(k, r);
    }
    let mut chosen = idx[..n_d].to_vec();
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|l| Link::new(l as usize / n, l as usize % n)).collect())
}

const CHUNK: u64 = 4096;

fn run_chunk(
    config: &SurveyConfig,
    intact: &TrainedNet,
    base: &LesionSurvey,
    series: u32,
    trials: std::ops::Range<u64>,
) -> LesionSurvey {
    let mut part = LesionSurvey {
        histograms: vec![BTreeMap::new(); config.series as usize],
        matched: Vec::new(),
        run: base.run.clone(),
        ..base.clone()
    };
    let hist = &mut part.histograms[series as usize];
    for trial in trials {
        let mut rng = trial_rng(config.seed, series, trial);
        let links = sample_cut_set(&mut rng, config.n, config.n_d).expect("validated n_d");
        let net = intact
            .apply_damage(&DamageSpec::cut(links.iter().copied()))
            .expect("sampled links are in range");
        let count = free_recall_count(&net);
        *hist.entry(count).or_insert(0) += 1;
        if base.target_count == Some(count) {
            part.matched.push(MatchRecord { series, trial, links });
        }
    }
    part
}

/// Runs the survey on the global rayon pool.
pub fn run_survey(config: &SurveyConfig) -> Result<LesionSurvey> {
    run_survey_inner(config)
}

/// Runs the survey on a dedicated pool of `workers` threads.
pub fn run_survey_with_workers(config: &SurveyConfig, workers: usize) -> Result<LesionSurvey> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_survey_inner(config))
}

fn run_survey_inner(config: &SurveyConfig) -> Result<LesionSurvey> {
    let start = Instant::now();
    let base = LesionSurvey::empty(config.clone())?;
    let intact = config.intact_net();
    let chunks: Vec<(u32, std::ops::Range<u64>)> = (0..config.series)
        .flat_map(|s| {
            (0..config.trials_per_series)
                .step_by(CHUNK as usize)
                .map(move |lo| (s, lo..(lo + CHUNK).min(config.trials_per_series)))
        })
        .collect();
    let parts: Vec<LesionSurvey> = chunks
        .into_par_iter()
        .map(|(s, range)| run_chunk(config, &intact, &base, s, range))
        .collect();
    let mut survey = merge_partials(std::iter::once(base).chain(parts).collect())?;
    survey.run.wall_clock_secs = start.elapsed().as_secs_f64();
    Ok(survey)
}

/// Key-wise sum of survey fragments that share one configuration.
pub fn merge_partials(parts: Vec<LesionSurvey>) -> Result<LesionSurvey> {
    let mut iter = parts.into_iter();
    let mut acc = iter
        .next()
        .ok_or_else(|| Error::Config("nothing to merge".into()))?;
    for part in iter {
        if part.config != acc.config || part.target_count != acc.target_count {
            return Err(Error::ConfigMismatch);
        }
        for (mine, theirs) in acc.histograms.iter_mut().zip(part.histograms) {
            for (k, c) in theirs {
                *mine.entry(k).or_insert(0) += c;
            }
        }
        acc.matched.extend(part.matched);
        acc.run.wall_clock_secs = acc.run.wall_clock_secs.max(part.run.wall_clock_secs);
    }
    acc.matched.sort();
    Ok(acc)
}

/// Across-series frequency of one event.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct FrequencyStats {
    /// Occurrences over all series.
    pub total: u64,
    /// Mean of the per-series frequencies (fraction, not percent).
    pub mean: f64,
    /// Sample standard deviation of the per-series frequencies; 0 for one series.
    pub std: f64,
    /// Series in which the event occurred at least once.
    pub series_present: usize,
}

/// Mean and sample std of `count / trials_per_series` over series.
pub fn frequency_stats(per_series: &[u64], trials_per_series: u64) -> FrequencyStats {
    let freqs: Vec<f64> = per_series.iter().map(|&c| c as f64 / trials_per_series as f64).collect();
    let total: u64 = per_series.iter().sum();
    let mean = total as f64 / (trials_per_series as f64 * per_series.len() as f64);
    let std = if freqs.len() < 2 { 0.0 } else { freqs.iter().std_dev() };
    FrequencyStats { total, mean, std, series_present: per_series.iter().filter(|&&c| c > 0).count() }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BinStats {
    /// Success count out of `2^n`.
    pub key: u64,
    pub stats: FrequencyStats,
}

/// Per-key frequency mean and std across series, sorted by P_FR.
pub fn histogram_stats(survey: &LesionSurvey) -> Vec<BinStats> {
    survey
        .pooled()
        .keys()
        .map(|&key| {
            let counts: Vec<u64> =
                survey.histograms.iter().map(|h| h.get(&key).copied().unwrap_or(0)).collect();
            BinStats { key, stats: frequency_stats(&counts, survey.config.trials_per_series) }
        })
        .collect()
}
