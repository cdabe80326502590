//! Nested parity-check matrices: the coarse code's matrix extends the fine
//! codes' matrices by extra rows.

use rand::Rng;

use super::{random_hom_indexed, stream_rng, ReportEntry, SimConfig, SimMode, SimReport, KERNEL_LIMIT, STREAM_SAMPLE};
use crate::error::{Error, Result};
use crate::group::HomMatrix;

/// `H11`, `H12 = [H11; ΔH1]` and `H2 = [H12; ΔH2]`, with the sampled
/// containment check `ker H2 ⊆ ker H12 ⊆ ker H11`.
#[derive(Clone, Debug)]
pub struct NestedCodes {
    pub fine1: HomMatrix,
    pub fine2: HomMatrix,
    pub coarse: HomMatrix,
    pub report: SimReport,
}

fn random_combination<R: Rng>(gens: &[(Vec<u64>, u32)], p: u64, m: u64, n: usize, rng: &mut R) -> Vec<u64> {
    let mut x = vec![0u64; n];
    for (g, v) in gens {
        let t = rng.gen_range(0..p.pow(*v));
        for (xi, gi) in x.iter_mut().zip(g) {
            *xi = (*xi + t * gi) % m;
        }
    }
    x
}

/// Builds the three matrices from independent uniform blocks and checks on
/// `cfg.trials` random coarse codewords (or all of them when the coarse
/// code is small) that they lie in both fine codes.
pub fn nested_parity_build(cfg: &SimConfig) -> Result<NestedCodes> {
    cfg.validate()?;
    let (k11, k12, k2) = match (cfg.k11, cfg.k12, cfg.k2) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::arg("nested codes need k11, k12 and k2")),
    };
    if !(k11 <= k12 && k12 <= k2) {
        return Err(Error::arg(format!("need k11 <= k12 <= k2, got {k11}, {k12}, {k2}")));
    }
    let h11 = random_hom_indexed(cfg, k11, 0)?;
    let d1 = random_hom_indexed(cfg, k12 - k11, 1)?;
    let d2 = random_hom_indexed(cfg, k2 - k12, 2)?;
    let h12 = h11.stack(&d1)?;
    let h2 = h12.stack(&d2)?;

    let (p, m, n) = (cfg.p, cfg.ring()?.order(), cfg.n);
    let log_size = h2.kernel_log_size();
    let size = (p as f64).powi(log_size as i32);
    let (mode, words) = if size <= cfg.trials as f64 && size <= KERNEL_LIMIT as f64 {
        (SimMode::Exhaustive, h2.kernel_elements(KERNEL_LIMIT)?)
    } else {
        let gens = h2.kernel_generators();
        let mut rng = stream_rng(cfg.seed, STREAM_SAMPLE, 0);
        (SimMode::MonteCarlo, (0..cfg.trials).map(|_| random_combination(&gens, p, m, n, &mut rng)).collect())
    };
    let total = words.len() as u64;
    let zero = |h: &HomMatrix, w: &[u64]| -> Result<bool> { Ok(h.apply(w)?.iter().all(|x| *x == 0)) };
    let (mut in2, mut in12, mut in11) = (0u64, 0u64, 0u64);
    for w in &words {
        in2 += u64::from(zero(&h2, w)?);
        in12 += u64::from(zero(&h12, w)?);
        in11 += u64::from(zero(&h11, w)?);
    }
    let entries = vec![
        ReportEntry::exact("coarse codewords in ker H2".into(), None, in2, total, total),
        ReportEntry::exact("coarse codewords in ker H12".into(), None, in12, total, total),
        ReportEntry::exact("coarse codewords in ker H11".into(), None, in11, total, total),
    ];
    let mut report = SimReport::finish("nested", mode, cfg.clone(), entries);
    report.summary.insert("log_p_kernel_h11".into(), f64::from(h11.kernel_log_size()));
    report.summary.insert("log_p_kernel_h12".into(), f64::from(h12.kernel_log_size()));
    report.summary.insert("log_p_kernel_h2".into(), f64::from(log_size));
    Ok(NestedCodes { fine1: h11, fine2: h12, coarse: h2, report })
}
