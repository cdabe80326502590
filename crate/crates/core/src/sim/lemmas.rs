//! Kernel-membership probabilities, pairwise dependency classes and the
//! one-variable linear equation over Z_{p^r}.

use super::{checked_pow, random_hom_indexed, vector_at, ReportEntry, SimConfig, SimMode, SimReport, EXHAUSTIVE_MATRIX_LIMIT};
use crate::error::{Error, Result};
use crate::group::{smallest_containing_subgroup, solve_linear, valuation};

fn check_vector(cfg: &SimConfig, z: &[u64], name: &str) -> Result<()> {
    if z.len() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, got: z.len() });
    }
    let m = cfg.ring()?.order();
    if z.iter().any(|x| *x >= m) {
        return Err(Error::arg(format!("{name} has entries outside Z{m}")));
    }
    Ok(())
}

fn show(v: &[u64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Evaluates `pred` on every `k x n` matrix when the ensemble is small
/// enough, otherwise on `cfg.trials` random ones. Returns the mode, the
/// number of hits and the number of matrices.
fn count_matrices(cfg: &SimConfig, pred: impl Fn(&[u64]) -> bool) -> Result<(SimMode, u64, u64)> {
    let m = cfg.ring()?.order();
    let cells = (cfg.k * cfg.n) as u64;
    if let Some(total) = checked_pow(m, cells, EXHAUSTIVE_MATRIX_LIMIT) {
        let hits = (0..total).filter(|&idx| pred(&vector_at(idx, m, cfg.k * cfg.n))).count() as u64;
        return Ok((SimMode::Exhaustive, hits, total));
    }
    let mut hits = 0;
    for t in 0..cfg.trials as u64 {
        let h = random_hom_indexed(cfg, cfg.k, t)?;
        hits += u64::from(pred(h.entries()));
    }
    Ok((SimMode::MonteCarlo, hits, cfg.trials as u64))
}

fn in_kernel(entries: &[u64], n: usize, m: u64, z: &[u64]) -> bool {
    entries.chunks(n).all(|row| row.iter().zip(z).fold(0u64, |acc, (a, b)| (acc + a * b) % m) == 0)
}

fn entry(mode: SimMode, label: String, class: u32, hits: u64, total: u64, log_p_inv: u64, p: u64) -> ReportEntry {
    match mode {
        SimMode::Exhaustive => {
            // total is a power of p at least p^log_p_inv
            let predicted = total / p.pow(log_p_inv as u32);
            ReportEntry::exact(label, Some(class), hits, total, predicted)
        }
        SimMode::MonteCarlo => {
            let q = (p as f64).powf(-(log_p_inv as f64));
            ReportEntry::sampled(label, Some(class), hits, total, Some(q))
        }
    }
}

/// Frequency of `Φ z = 0` for a uniformly random `Φ`, against
/// `p^{-(r-i)k}` where `z ∈ p^i Z^n \ p^{i+1} Z^n` (and 1 for `z = 0`).
pub fn kernel_membership_check(cfg: &SimConfig, z: &[u64]) -> Result<SimReport> {
    cfg.validate()?;
    check_vector(cfg, z, "z")?;
    let (p, r, m, n) = (cfg.p, cfg.r, cfg.ring()?.order(), cfg.n);
    let i = smallest_containing_subgroup(p, r, z)?;
    let (mode, hits, total) = count_matrices(cfg, |e| in_kernel(e, n, m, z))?;
    let exp = u64::from(r - i) * cfg.k as u64;
    let e = entry(mode, format!("z=({})", show(z)), i, hits, total, exp, p);
    Ok(SimReport::finish("lemma4", mode, cfg.clone(), vec![e]))
}

/// [`kernel_membership_check`] for every `z` in `Z_{p^r}^n`.
pub fn kernel_membership_suite(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let m = cfg.ring()?.order();
    let count = checked_pow(m, cfg.n as u64, EXHAUSTIVE_MATRIX_LIMIT)
        .ok_or_else(|| Error::ResourceGuard(format!("Z{m}^{} is too large to sweep", cfg.n)))?;
    let mut entries = Vec::with_capacity(count as usize);
    let mut mode = SimMode::Exhaustive;
    for idx in 0..count {
        let rep = kernel_membership_check(cfg, &vector_at(idx, m, cfg.n))?;
        mode = rep.mode;
        entries.extend(rep.entries);
    }
    Ok(SimReport::finish("lemma4", mode, cfg.clone(), entries))
}

/// Index `i` with `D(u1, u2) = p^i Z_{p^r}`: the smallest subgroup holding
/// the 2x2 minors `u1[k] u2[l] - u2[k] u1[l]` over unit `u1[k]`, `l != k`.
/// With no such minor (`n = 1`) the class is `r`.
pub fn dependency_class(p: u64, r: u32, u1: &[u64], u2: &[u64]) -> Result<u32> {
    let m = p.pow(r);
    if u1.len() != u2.len() {
        return Err(Error::DimensionMismatch { expected: u1.len(), got: u2.len() });
    }
    if !u1.iter().any(|x| x % p != 0) {
        return Err(Error::Redundant { modulus: m, subgroup: format!("{p}Z{m}") });
    }
    let mut minors = Vec::new();
    for k in (0..u1.len()).filter(|&k| u1[k] % p != 0) {
        for l in (0..u1.len()).filter(|&l| l != k) {
            minors.push((u1[k] * u2[l] % m + m - u2[k] * u1[l] % m) % m);
        }
    }
    if minors.is_empty() {
        return Ok(r);
    }
    smallest_containing_subgroup(p, r, &minors)
}

/// Frequency of `Φ u1 = Φ u2 = 0` against `p^{-(2r-i)k}` with `i` the
/// dependency class of the pair. `u1` must be non-redundant.
pub fn joint_kernel_check(cfg: &SimConfig, u1: &[u64], u2: &[u64]) -> Result<SimReport> {
    cfg.validate()?;
    check_vector(cfg, u1, "u1")?;
    check_vector(cfg, u2, "u2")?;
    let (p, r, m, n) = (cfg.p, cfg.r, cfg.ring()?.order(), cfg.n);
    let i = dependency_class(p, r, u1, u2)?;
    let (mode, hits, total) = count_matrices(cfg, |e| in_kernel(e, n, m, u1) && in_kernel(e, n, m, u2))?;
    let exp = u64::from(2 * r - i) * cfg.k as u64;
    let e = entry(mode, format!("u1=({}) u2=({})", show(u1), show(u2)), i, hits, total, exp, p);
    Ok(SimReport::finish("lemma6", mode, cfg.clone(), vec![e]))
}

/// [`joint_kernel_check`] for every non-redundant `u1` and every `u2`.
pub fn joint_kernel_suite(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let m = cfg.ring()?.order();
    let count = checked_pow(m, cfg.n as u64, 1 << 10)
        .ok_or_else(|| Error::ResourceGuard(format!("pairs over Z{m}^{} are too many to sweep", cfg.n)))?;
    let mut entries = Vec::new();
    let mut mode = SimMode::Exhaustive;
    for a in 0..count {
        let u1 = vector_at(a, m, cfg.n);
        if u1.iter().all(|x| x % cfg.p == 0) {
            continue;
        }
        for b in 0..count {
            let rep = joint_kernel_check(cfg, &u1, &vector_at(b, m, cfg.n))?;
            mode = rep.mode;
            entries.extend(rep.entries);
        }
    }
    Ok(SimReport::finish("lemma6", mode, cfg.clone(), entries))
}

/// Sizes of the classes `D_i(u1) = {u2 != u1 : D(u1, u2) = p^i Z}` by
/// enumeration, against `p^r (p^{(r-i)(n-1)} - p^{(r-i-1)(n-1)})` for
/// `i < r` and `p^r - 1` for `i = r`.
pub fn count_dependency_classes(p: u64, r: u32, n: usize, u1: &[u64]) -> Result<SimReport> {
    let cfg = SimConfig::new(p, r, n, 0);
    cfg.validate()?;
    check_vector(&cfg, u1, "u1")?;
    let m = cfg.ring()?.order();
    let total = checked_pow(m, n as u64, EXHAUSTIVE_MATRIX_LIMIT)
        .ok_or_else(|| Error::ResourceGuard(format!("Z{m}^{n} exceeds {EXHAUSTIVE_MATRIX_LIMIT} sequences")))?;
    let mut counts = vec![0u64; r as usize + 1];
    for idx in 0..total {
        let u2 = vector_at(idx, m, n);
        if u2 == u1 {
            continue;
        }
        counts[dependency_class(p, r, u1, &u2)? as usize] += 1;
    }
    let others = total - 1;
    let e = (n - 1) as u32;
    let entries = (0..=r)
        .map(|i| {
            let predicted = if i < r { m * (p.pow((r - i) * e) - p.pow((r - i - 1) * e)) } else { m - 1 };
            ReportEntry::exact(format!("|D_{i}|"), Some(i), counts[i as usize], others, predicted)
        })
        .collect();
    let mut rep = SimReport::finish("lemma7", SimMode::Exhaustive, cfg, entries);
    rep.notes.push(format!("u1=({})", show(u1)));
    Ok(rep)
}

/// Every `(a, b)` in `Z_{p^r}^2`: the brute-force solution set of
/// `a x = b` must equal [`solve_linear`] and have `p^i` elements when
/// `a ∈ p^i Z \ p^{i+1} Z` and `b ∈ p^i Z`, none otherwise.
pub fn solve_linear_check(p: u64, r: u32) -> Result<SimReport> {
    let cfg = SimConfig::new(p, r, 1, 0);
    cfg.validate()?;
    let m = cfg.ring()?.order();
    let mut agree = vec![0u64; r as usize + 1];
    let mut pairs = vec![0u64; r as usize + 1];
    let mut solutions = 0u64;
    for a in 0..m {
        let i = valuation(p, r, a);
        for b in 0..m {
            let brute: Vec<u64> = (0..m).filter(|x| a * x % m == b).collect();
            let predicted = if b % p.pow(i) == 0 { p.pow(i) } else { 0 };
            let ok = brute.len() as u64 == predicted && solve_linear(p, r, a, b)? == brute;
            solutions += brute.len() as u64;
            pairs[i as usize] += 1;
            agree[i as usize] += u64::from(ok);
        }
    }
    let entries = (0..=r)
        .map(|i| {
            let label = if i < r { format!("a in {}^{i}Z{m} \\ {}^{}Z{m}", p, p, i + 1) } else { "a = 0".into() };
            let t = pairs[i as usize];
            ReportEntry::exact(label, Some(i), agree[i as usize], t, t)
        })
        .collect();
    let mut rep = SimReport::finish("lemma8", SimMode::Exhaustive, cfg, entries);
    rep.summary.insert("solutions".into(), solutions as f64);
    Ok(rep)
}
