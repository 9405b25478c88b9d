use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{winner_trace, HoleSystem};
use crate::odometer::AdicPoint;

/// Seed of the sampled point used by `trial`: word 0 of ChaCha stream `trial`.
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.next_u64()
}

/// Outcome of one sampled point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub point_seed: u64,
    pub switch_count: usize,
    pub wins: Vec<usize>,
}

/// Aggregates over all trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSummary {
    pub trials: u64,
    pub n_max: usize,
    /// `win_histograms[i][w]`: trials in which hole `i` won exactly `w` scales.
    pub win_histograms: Vec<Vec<u64>>,
    /// `switch_histogram[s]`: trials with `s` winner switches.
    pub switch_histogram: Vec<u64>,
    /// `indecisive_counts[h - 1]`: trials in which every hole won at least `h` scales, `h = 1..=3`.
    pub indecisive_counts: [u64; 3],
}

impl SampleSummary {
    /// Fraction of `h`-indecisive trials, `h = 1..=3`; `None` without trials.
    pub fn fraction_indecisive(&self, h: usize) -> Option<f64> {
        assert!((1..=3).contains(&h), "H ranges over 1..=3");
        (self.trials > 0).then(|| self.indecisive_counts[h - 1] as f64 / self.trials as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRun {
    pub records: Vec<TrialRecord>,
    pub summary: SampleSummary,
}

fn run_trial(sys: &HoleSystem, n_max: usize, seed: u64, trial: u64) -> TrialRecord {
    let point_seed = derive_seed(seed, trial);
    let x = AdicPoint::sampled(sys.spec().clone(), point_seed);
    let stats = winner_trace(sys, &x, n_max).stats();
    TrialRecord {
        trial,
        point_seed,
        switch_count: stats.switch_count,
        wins: stats.wins,
    }
}

/// Monte Carlo companion to genericity: winner statistics of `trials`
/// sampled points. The result depends only on the arguments, never on
/// `threads` (`None` or `Some(1)` runs sequentially).
pub fn sample_genericity(
    sys: &HoleSystem,
    n_max: usize,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> SampleRun {
    let records: Vec<TrialRecord> = match threads {
        Some(t) if t > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .expect("thread pool");
            pool.install(|| {
                (0..trials)
                    .into_par_iter()
                    .map(|trial| run_trial(sys, n_max, seed, trial))
                    .collect()
            })
        }
        _ => (0..trials).map(|trial| run_trial(sys, n_max, seed, trial)).collect(),
    };

    let mut summary = SampleSummary {
        trials,
        n_max,
        win_histograms: vec![vec![0; n_max + 1]; sys.len()],
        switch_histogram: vec![0; n_max + 1],
        indecisive_counts: [0; 3],
    };
    for record in &records {
        summary.switch_histogram[record.switch_count] += 1;
        for (hole, &w) in record.wins.iter().enumerate() {
            summary.win_histograms[hole][w] += 1;
        }
        for h in 1..=3 {
            if record.wins.iter().all(|&w| w >= h) {
                summary.indecisive_counts[h - 1] += 1;
            }
        }
    }
    SampleRun { records, summary }
}
