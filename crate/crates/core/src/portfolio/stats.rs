use serde::{Deserialize, Serialize};

use super::run::RunRecord;

/// One step of an empirical CDF: `P[X <= x] = p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub x: usize,
    pub p: f64,
}

/// Summary of the iteration counts of a set of trials.
///
/// Mean and variance use uncensored trials only. `cdf` divides by all trials,
/// so it ends at the uncensored fraction; `conditional_cdf` divides by the
/// uncensored trials and ends at 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStatistics {
    pub trials: usize,
    pub uncensored: usize,
    pub censored: usize,
    /// `None` when every trial was censored.
    pub mean: Option<f64>,
    /// Unbiased sample variance; 0 when fewer than two trials are uncensored.
    pub variance: f64,
    pub variance_defined: bool,
    pub cdf: Vec<CdfPoint>,
    pub conditional_cdf: Vec<CdfPoint>,
}

impl TrialStatistics {
    pub fn all_censored(&self) -> bool {
        self.uncensored == 0
    }

    pub fn success_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.uncensored as f64 / self.trials as f64
        }
    }

    /// CSV with header `x,p` for the unconditional CDF.
    pub fn cdf_csv(&self) -> String {
        let mut out = String::from("x,p\n");
        for pt in &self.cdf {
            out.push_str(&format!("{},{}\n", pt.x, pt.p));
        }
        out
    }
}

pub fn trial_statistics(record: &RunRecord) -> TrialStatistics {
    let values: Vec<usize> = record
        .trials
        .iter()
        .filter(|t| !t.censored)
        .map(|t| t.iterations)
        .collect();
    statistics_of(&values, record.trials.len())
}

/// Statistics of `uncensored` iteration counts out of `total` trials.
pub fn statistics_of(uncensored: &[usize], total: usize) -> TrialStatistics {
    let n = uncensored.len();
    let total = total.max(n);
    let mean = (n > 0).then(|| uncensored.iter().map(|&v| v as f64).sum::<f64>() / n as f64);
    let variance_defined = n >= 2;
    let variance = match mean {
        Some(m) if variance_defined => {
            uncensored
                .iter()
                .map(|&v| (v as f64 - m).powi(2))
                .sum::<f64>()
                / (n - 1) as f64
        }
        _ => 0.0,
    };
    let mut sorted = uncensored.to_vec();
    sorted.sort_unstable();
    let steps = |denominator: usize| -> Vec<CdfPoint> {
        let mut pts: Vec<CdfPoint> = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            let p = (i + 1) as f64 / denominator as f64;
            match pts.last_mut() {
                Some(last) if last.x == x => last.p = p,
                _ => pts.push(CdfPoint { x, p }),
            }
        }
        pts
    };
    TrialStatistics {
        trials: total,
        uncensored: n,
        censored: total - n,
        mean,
        variance,
        variance_defined,
        cdf: steps(total),
        conditional_cdf: steps(n),
    }
}
