//! Small-blocklength checks of the coding lemmas: exact counts where the
//! matrix ensemble can be enumerated, Monte Carlo otherwise, and an
//! end-to-end syndrome-sum codec for the modulo-2 sum.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{HomMatrix, PrimaryCyclic};

mod cover;
mod km;
mod lemmas;
mod nested;

pub use cover::source_cover_check;
pub use km::{isd_decode, km_codec_run, BitMatrix, IsdOutcome};
pub use lemmas::{
    count_dependency_classes, dependency_class, joint_kernel_check, joint_kernel_suite, kernel_membership_check,
    kernel_membership_suite, solve_linear_check,
};
pub use nested::{nested_parity_build, NestedCodes};

/// Largest matrix ensemble enumerated exactly; larger ones are sampled.
pub const EXHAUSTIVE_MATRIX_LIMIT: u64 = 1 << 20;
/// Largest kernel enumerated by the covering check.
pub const KERNEL_LIMIT: u64 = 1 << 22;
/// Monte Carlo frequencies within this many standard deviations pass.
pub const SIGMA_BOUND: f64 = 4.0;

// RNG stream tags
pub(crate) const STREAM_MATRIX: u64 = 1;
pub(crate) const STREAM_TRIAL: u64 = 2;
pub(crate) const STREAM_SAMPLE: u64 = 3;

/// Decoder used by the syndrome-sum codec.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    /// Most probable sequence in the syndrome's coset.
    #[default]
    Ml,
    /// First typical sequence found in the coset.
    Typicality,
}

fn default_trials() -> usize {
    1000
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_matrix_seeds() -> usize {
    1
}

fn default_isd_iterations() -> usize {
    4000
}

fn one() -> u32 {
    1
}

fn two() -> u64 {
    2
}

/// Parameters shared by all checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Blocklength.
    pub n: usize,
    /// Rows of the parity-check matrix.
    #[serde(default)]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k11: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k12: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<usize>,
    #[serde(default = "two")]
    pub p: u64,
    #[serde(default = "one")]
    pub r: u32,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Typicality slack.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub decoder: Decoder,
    /// Number of independent matrix draws the trials are spread over.
    #[serde(default = "default_matrix_seeds")]
    pub matrix_seeds: usize,
    /// Information-set iterations per decoding attempt.
    #[serde(default = "default_isd_iterations")]
    pub isd_iterations: usize,
}

impl SimConfig {
    pub fn new(p: u64, r: u32, n: usize, k: usize) -> Self {
        SimConfig {
            n,
            k,
            k11: None,
            k12: None,
            k2: None,
            p,
            r,
            trials: default_trials(),
            seed: 0,
            epsilon: default_epsilon(),
            decoder: Decoder::Ml,
            matrix_seeds: default_matrix_seeds(),
            isd_iterations: default_isd_iterations(),
        }
    }

    pub fn ring(&self) -> Result<PrimaryCyclic> {
        PrimaryCyclic::new(self.p, self.r)
    }

    pub fn validate(&self) -> Result<()> {
        self.ring()?;
        if self.n == 0 {
            return Err(Error::arg("blocklength must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::arg("at least one trial is required"));
        }
        if self.matrix_seeds == 0 {
            return Err(Error::arg("at least one matrix seed is required"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::arg("epsilon must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    Exhaustive,
    MonteCarlo,
}

/// One compared quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub label: String,
    /// Subgroup index the prediction depends on, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<u32>,
    pub observed: u64,
    pub total: u64,
    pub frequency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
    /// `|frequency - predicted|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    /// Binomial standard deviation of the frequency under the prediction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl ReportEntry {
    pub(crate) fn exact(label: String, class: Option<u32>, observed: u64, total: u64, predicted_count: u64) -> Self {
        let dev = observed.abs_diff(predicted_count) as f64 / total as f64;
        ReportEntry {
            label,
            class,
            observed,
            total,
            frequency: observed as f64 / total as f64,
            predicted: Some(predicted_count as f64 / total as f64),
            deviation: Some(dev),
            sigma: Some(0.0),
        }
    }

    pub(crate) fn sampled(label: String, class: Option<u32>, observed: u64, total: u64, predicted: Option<f64>) -> Self {
        let frequency = observed as f64 / total as f64;
        ReportEntry {
            label,
            class,
            observed,
            total,
            frequency,
            predicted,
            deviation: predicted.map(|q| (frequency - q).abs()),
            sigma: predicted.map(|q| (q * (1.0 - q) / total as f64).sqrt()),
        }
    }

    /// Exact entries must match; sampled ones must lie within
    /// [`SIGMA_BOUND`] standard deviations (at least one count).
    pub fn within_bounds(&self) -> bool {
        match (self.deviation, self.sigma) {
            (Some(d), Some(0.0)) => d == 0.0,
            (Some(d), Some(s)) => d <= (SIGMA_BOUND * s).max(1.0 / self.total as f64),
            _ => true,
        }
    }
}

/// Result of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub check: String,
    pub mode: SimMode,
    pub config: SimConfig,
    pub entries: Vec<ReportEntry>,
    /// Named scalar results.
    #[serde(default)]
    pub summary: BTreeMap<String, f64>,
    pub max_deviation: f64,
    /// Whether every entry with a prediction is within bounds.
    pub passed: bool,
    pub exhaustive_matrix_limit: u64,
    pub kernel_limit: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SimReport {
    pub(crate) fn finish(check: &str, mode: SimMode, config: SimConfig, entries: Vec<ReportEntry>) -> Self {
        let max_deviation = entries.iter().filter_map(|e| e.deviation).fold(0.0, f64::max);
        let passed = entries.iter().all(ReportEntry::within_bounds);
        SimReport {
            check: check.into(),
            mode,
            config,
            entries,
            summary: BTreeMap::new(),
            max_deviation,
            passed,
            exhaustive_matrix_limit: EXHAUSTIVE_MATRIX_LIMIT,
            kernel_limit: KERNEL_LIMIT,
            notes: Vec::new(),
        }
    }

    /// True when an exhaustive check disagrees with its prediction.
    pub fn exhaustive_failure(&self) -> bool {
        self.mode == SimMode::Exhaustive && !self.passed
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Counter-based generator for item `index` of stream `tag`: the key comes
/// from the seed and the ChaCha stream from `(tag, index)`, so results do
/// not depend on evaluation order.
pub fn stream_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(splitmix(splitmix(tag) ^ index));
    rng
}

/// A `k x n` matrix with iid uniform entries in `Z_{p^r}`, the `index`-th
/// draw for this seed.
pub fn random_hom_indexed(cfg: &SimConfig, rows: usize, index: u64) -> Result<HomMatrix> {
    let m = cfg.ring()?.order();
    let mut rng = stream_rng(cfg.seed, STREAM_MATRIX, index);
    let entries = (0..rows * cfg.n).map(|_| rng.gen_range(0..m)).collect();
    HomMatrix::new(cfg.p, cfg.r, rows, cfg.n, entries)
}

/// The first random `k x n` matrix for this configuration.
pub fn random_hom(cfg: &SimConfig) -> Result<HomMatrix> {
    cfg.validate()?;
    random_hom_indexed(cfg, cfg.k, 0)
}

/// `base^exp` if it fits below `limit`.
pub(crate) fn checked_pow(base: u64, exp: u64, limit: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > limit {
            return None;
        }
    }
    Some(acc)
}

/// The `idx`-th vector of `Z_m^len` in mixed-radix order, last entry fastest.
pub(crate) fn vector_at(mut idx: u64, m: u64, len: usize) -> Vec<u64> {
    let mut v = vec![0; len];
    for slot in v.iter_mut().rev() {
        *slot = idx % m;
        idx /= m;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_hom_is_reproducible() {
        let mut cfg = SimConfig::new(2, 2, 5, 3);
        cfg.seed = 11;
        let a = random_hom(&cfg).unwrap();
        assert_eq!(a, random_hom(&cfg).unwrap());
        cfg.seed = 12;
        assert_ne!(a, random_hom(&cfg).unwrap());
        let empty = random_hom(&SimConfig::new(2, 1, 4, 0)).unwrap();
        assert_eq!(empty.rows(), 0);
        assert_eq!(empty.kernel_log_size(), 4);
    }

    #[test]
    fn vectors_in_mixed_radix_order() {
        assert_eq!(vector_at(5, 2, 3), vec![1, 0, 1]);
        assert_eq!(checked_pow(4, 3, 100), Some(64));
        assert_eq!(checked_pow(4, 4, 100), None);
    }
}
