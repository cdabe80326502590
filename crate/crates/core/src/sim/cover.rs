//! Covering behaviour of random kernels used as source codes.

use rand::Rng;
use rayon::prelude::*;

use super::{random_hom_indexed, stream_rng, ReportEntry, SimConfig, SimMode, SimReport, KERNEL_LIMIT, STREAM_SAMPLE};
use crate::error::{Error, Result};
use crate::prob::JointPmf;
use crate::rate::coding::source_rate_from_entropy;

/// Attempts at drawing a typical source sequence before giving up.
const TYPICAL_ATTEMPTS: usize = 10_000;

/// Kernel elements flattened row by row.
fn kernel_table(cfg: &SimConfig, index: u64) -> Result<Vec<u16>> {
    let h = random_hom_indexed(cfg, cfg.k, index)?;
    let log = h.kernel_log_size();
    let size = (cfg.p as f64).powi(log as i32);
    if size > KERNEL_LIMIT as f64 {
        return Err(Error::ResourceGuard(format!("kernel of {size} words exceeds {KERNEL_LIMIT}")));
    }
    let words = h.kernel_elements(KERNEL_LIMIT)?;
    Ok(words.into_iter().flatten().map(|x| x as u16).collect())
}

fn typical(counts: &[usize], probs: &[f64], n: usize, eps: f64) -> bool {
    counts.iter().zip(probs).all(|(&c, &p)| if p == 0.0 { c == 0 } else { (c as f64 / n as f64 - p).abs() <= eps })
}

/// Fraction of typical `x^n` that have a jointly typical partner in the
/// kernel of a random `k x n` matrix over `Z_{p^r}`, for `P_XU` with `U` on
/// `Z_{p^r}`. Trial `t` uses matrix `t mod matrix_seeds`.
pub fn source_cover_check(pxu: &JointPmf, cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let m = cfg.ring()?.order() as usize;
    let shape = pxu.shape();
    if shape.len() != 2 || shape[1] != m {
        return Err(Error::arg(format!("expected a pmf over (X, U) with U on Z{m}")));
    }
    if m > u16::MAX as usize + 1 {
        return Err(Error::ResourceGuard("group too large for the covering check".into()));
    }
    let nx = shape[0];
    let pu = pxu.marginal(&[1])?;
    if !pu.table().iter().enumerate().any(|(u, &q)| q > 0.0 && u as u64 % cfg.p != 0) {
        return Err(Error::Redundant { modulus: m as u64, subgroup: format!("{}Z{m}", cfg.p) });
    }
    let px = pxu.marginal(&[0])?.table().to_vec();
    let joint = pxu.table().to_vec();
    let h_u_given_x = pxu.conditional_entropy(&[1], &[0])?;
    let log_m = (m as f64).log2();
    let src = source_rate_from_entropy(h_u_given_x, cfg.p, cfg.r);

    let n = cfg.n;
    let kernels: Vec<Vec<u16>> = (0..cfg.matrix_seeds as u64).map(|i| kernel_table(cfg, i)).collect::<Result<_>>()?;
    let cum: Vec<f64> = px.iter().scan(0.0, |acc, p| {
        *acc += p;
        Some(*acc)
    }).collect();

    // (covered, found a typical x)
    let outcomes: Vec<(usize, bool, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mi = t % cfg.matrix_seeds;
            let mut rng = stream_rng(cfg.seed, STREAM_SAMPLE, t as u64);
            let mut x = vec![0usize; n];
            let mut ok = false;
            for _ in 0..TYPICAL_ATTEMPTS {
                let mut counts = vec![0usize; nx];
                for xi in x.iter_mut() {
                    let u: f64 = rng.gen();
                    *xi = cum.iter().position(|c| u < *c).unwrap_or(nx - 1);
                    counts[*xi] += 1;
                }
                if typical(&counts, &px, n, cfg.epsilon) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return (mi, false, false);
            }
            let mut counts = vec![0usize; nx * m];
            let covered = kernels[mi].chunks(n).any(|word| {
                counts.iter_mut().for_each(|c| *c = 0);
                for (xi, ui) in x.iter().zip(word) {
                    counts[xi * m + *ui as usize] += 1;
                }
                typical(&counts, &joint, n, cfg.epsilon)
            });
            (mi, covered, true)
        })
        .collect();

    let tested = outcomes.iter().filter(|o| o.2).count() as u64;
    let covered = outcomes.iter().filter(|o| o.1).count() as u64;
    let mut entries = Vec::new();
    if tested > 0 {
        entries.push(ReportEntry::sampled("covered typical sequences".into(), None, covered, tested, None));
    }
    for mi in 0..cfg.matrix_seeds {
        let mine: Vec<_> = outcomes.iter().filter(|o| o.0 == mi && o.2).collect();
        if !mine.is_empty() {
            let c = mine.iter().filter(|o| o.1).count() as u64;
            entries.push(ReportEntry::sampled(format!("matrix {mi}"), None, c, mine.len() as u64, None));
        }
    }
    let mut rep = SimReport::finish("cover", SimMode::MonteCarlo, cfg.clone(), entries);
    let s = &mut rep.summary;
    s.insert("coverage".into(), if tested > 0 { covered as f64 / tested as f64 } else { 0.0 });
    s.insert("rate".into(), cfg.k as f64 * log_m / n as f64);
    s.insert("threshold_rate".into(), src);
    s.insert("threshold_k".into(), src * n as f64 / log_m);
    s.insert("untypical_trials".into(), (cfg.trials as u64 - tested) as f64);
    if h_u_given_x == 0.0 {
        rep.notes.push("H(U|X) = 0: U is a function of X and only k = 0 is below the threshold".into());
    }
    if tested < cfg.trials as u64 {
        rep.notes.push(format!("{} trials found no typical source sequence", cfg.trials as u64 - tested));
    }
    Ok(rep)
}
