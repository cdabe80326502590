//! Point-to-point and special-case rates: lossless and lossy group codes,
//! the Shannon rate-distortion function on a grid, the binary lossy XOR
//! problem and the modulo-two sum baseline.

use serde::{Deserialize, Serialize};

use super::coding::{channel_rate_rooted, source_rate_from_entropy};
use super::region::conditional_grid;
use crate::error::{Error, Result};
use crate::group::{is_prime, AbelianGroup, PrimaryCyclic};
use crate::prob::{entropy_of, h2, Alphabet, ConditionalPmf, JointPmf};

/// Feasibility slack on distortion constraints.
pub const DISTORTION_SLACK: f64 = 1e-12;
/// Largest number of channels a single-source grid search evaluates.
pub const GRID_LIMIT: usize = 20_000_000;

fn check_pmf(px: &[f64]) -> Result<()> {
    JointPmf::from_shape(&[px.len()], px.to_vec()).map(|_| ())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LosslessGroupRate {
    pub rate: f64,
    /// `H([X]_i) >= (i/r) H(X)` for every `i`, the condition under which
    /// the group code matches the entropy.
    pub sufficient: bool,
    /// `(i, H([X]_i))` for `0 <= i <= r`.
    pub coset_entropies: Vec<(u32, f64)>,
}

/// Rate of lossless compression of a non-redundant source on Z_{p^r} with a
/// group code.
pub fn lossless_group_rate(px: &[f64], f: PrimaryCyclic) -> Result<LosslessGroupRate> {
    if px.len() as u64 != f.order() {
        return Err(Error::DimensionMismatch { expected: f.order() as usize, got: px.len() });
    }
    let pmf = JointPmf::new(vec![Alphabet::cyclic(f)], px.to_vec())?;
    let rate = super::coding::channel_code_rate(&pmf, 0, &[])?;
    let hx = entropy_of(pmf.table().iter().copied());
    let mut coset_entropies = Vec::new();
    let mut sufficient = true;
    for i in 0..=f.r() {
        let q = pmf.quotient(0, i)?;
        let h = entropy_of(q.table().iter().copied());
        if h < i as f64 / f.r() as f64 * hx - 1e-12 {
            sufficient = false;
        }
        coset_entropies.push((i, h));
    }
    Ok(LosslessGroupRate { rate, sufficient, coset_entropies })
}

/// A single-source rate with the channel attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceRate {
    pub rate: f64,
    pub distortion: f64,
    pub channel: Vec<Vec<f64>>,
}

fn single_source_search(
    px: &[f64],
    d: &[Vec<f64>],
    target: f64,
    step: f64,
    rate: impl Fn(&[f64], &ConditionalPmf) -> Option<f64>,
) -> Result<SourceRate> {
    check_pmf(px)?;
    if d.len() != px.len() {
        return Err(Error::DimensionMismatch { expected: px.len(), got: d.len() });
    }
    let nu = d.first().map_or(0, |r| r.len());
    if nu == 0 || d.iter().any(|r| r.len() != nu) {
        return Err(Error::arg("distortion matrix must be rectangular and non-empty"));
    }
    let mut best: Option<SourceRate> = None;
    for ch in conditional_grid(px.len(), nu, step, GRID_LIMIT)? {
        let mut dist = 0.0;
        for (x, p) in px.iter().enumerate() {
            for u in 0..nu {
                dist += p * ch.get(x, u) * d[x][u];
            }
        }
        if dist > target + DISTORTION_SLACK {
            continue;
        }
        let Some(r) = rate(px, &ch) else { continue };
        if best.as_ref().map_or(true, |b| r < b.rate) {
            best = Some(SourceRate { rate: r, distortion: dist, channel: ch.rows() });
        }
    }
    best.ok_or_else(|| Error::Infeasible(format!("no grid channel meets distortion {target}")))
}

fn joint_xu(px: &[f64], ch: &ConditionalPmf) -> Vec<Vec<f64>> {
    px.iter().enumerate().map(|(x, p)| ch.row(x).iter().map(|c| p * c).collect()).collect()
}

fn cond_entropy_u_given_x(px: &[f64], ch: &ConditionalPmf) -> f64 {
    px.iter().enumerate().map(|(x, p)| p * entropy_of(ch.row(x).iter().copied())).sum()
}

fn output_dist(px: &[f64], ch: &ConditionalPmf) -> Vec<f64> {
    let j = joint_xu(px, ch);
    let nu = ch.to_alphabet().len();
    (0..nu).map(|u| j.iter().map(|r| r[u]).sum()).collect()
}

/// Smallest rate of a group code over `group` meeting distortion `target`,
/// searched over test channels `P_{U|X}` on a simplex grid. `d` is indexed
/// `[x][u]` with `u` an element index of `group`.
///
/// For `Z_{p^r}` the rate is `log p^r - min(H(U|X), r |H(U|X) - log
/// p^(r-1)|^+)`, for a sum of distinct-or-equal prime order groups it is
/// `sum log p_i - H(U|X)`. Redundant test channels are re-rooted onto the
/// subgroup they live in.
pub fn lossy_group_rate(px: &[f64], d: &[Vec<f64>], target: f64, group: &AbelianGroup, step: f64) -> Result<SourceRate> {
    let nu = d.first().map_or(0, |r| r.len());
    if nu as u64 != group.order() {
        return Err(Error::DimensionMismatch { expected: group.order() as usize, got: nu });
    }
    if group.rank() == 1 {
        let f = group.factors()[0];
        single_source_search(px, d, target, step, |px, ch| {
            let out = output_dist(px, ch);
            // re-root onto the smallest coset-subgroup holding the support
            let support: Vec<u64> = (0..nu as u64).filter(|u| out[*u as usize] > 0.0).collect();
            let z0 = support[0];
            let m = f.order();
            let shift = support.iter().map(|&u| crate::group::valuation(f.p(), f.r(), (u + m - z0) % m)).min().unwrap_or(f.r());
            let r = f.r() - shift;
            if r == 0 {
                return Some(0.0);
            }
            let h = cond_entropy_u_given_x(px, ch);
            Some((r as f64 * (f.p() as f64).log2() - source_rate_from_entropy(h, f.p(), r)).max(0.0))
        })
    } else if group.factors().iter().all(|f| f.r() == 1) {
        let log_order: f64 = group.factors().iter().map(|f| (f.p() as f64).log2()).sum();
        single_source_search(px, d, target, step, |px, ch| Some((log_order - cond_entropy_u_given_x(px, ch)).max(0.0)))
    } else {
        Err(Error::arg(format!(
            "{group} mixes a non-prime factor with others; use a primary cyclic group or a sum of prime-order groups"
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShannonRd {
    pub rate: f64,
    pub distortion: f64,
    pub channel: Vec<Vec<f64>>,
    /// Smallest prime `q` with the reconstruction alphabet inside Z_q.
    pub q: u64,
    /// `H(Xhat|X)` and `H(Xhat)` in bits.
    pub h_cond: f64,
    pub h_out: f64,
    /// `k1/n = H(Xhat|X) / log q` and `k2/n = H(Xhat) / log q`.
    pub k1_over_n: f64,
    pub k2_over_n: f64,
}

/// `min I(X; Xhat)` subject to `E d <= target` over a channel grid.
pub fn shannon_rd(px: &[f64], d: &[Vec<f64>], target: f64, step: f64) -> Result<ShannonRd> {
    let best = single_source_search(px, d, target, step, |px, ch| {
        let out = output_dist(px, ch);
        Some((entropy_of(out) - cond_entropy_u_given_x(px, ch)).max(0.0))
    })?;
    let nu = best.channel[0].len() as u64;
    let q = (nu.max(2)..).find(|n| is_prime(*n)).expect("primes are unbounded");
    let ch = ConditionalPmf::from_rows(&best.channel)?;
    let h_cond = cond_entropy_u_given_x(px, &ch);
    let h_out = entropy_of(output_dist(px, &ch));
    let lq = (q as f64).log2();
    Ok(ShannonRd {
        rate: best.rate,
        distortion: best.distortion,
        channel: best.channel,
        q,
        h_cond,
        h_out,
        k1_over_n: h_cond / lq,
        k2_over_n: h_out / lq,
    })
}

/// Which reconstruction is optimal in the binary lossy XOR problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XorCase {
    Zero,
    Xor,
    Complement,
    One,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XorClosedForm {
    pub alpha: f64,
    pub case: XorCase,
    pub d: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Rates and distortion for the doubly symmetric binary source with
/// `P(X != Y) = p`, `P(X = Y) = q`, quantized through binary symmetric test
/// channels that keep the input with probabilities `q1`, `q2`, using the
/// Z2 embedding of the optimal reconstruction. Ties in the reconstruction
/// go to the smaller symbol, as in [`super::reconstruct::optimal_reconstruction`].
pub fn lossy_xor_closed_form(p: f64, q: f64, q1: f64, q2: f64) -> Result<XorClosedForm> {
    for (name, v) in [("p", p), ("q", q), ("q1", q1), ("q2", q2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::arg(format!("{name} = {v} is not a probability")));
        }
    }
    if (p + q - 1.0).abs() > 1e-12 {
        return Err(Error::arg("p and q must sum to 1"));
    }
    let alpha = q1 * q2 + (1.0 - q1) * (1.0 - q2);
    let beta = 1.0 - alpha;
    // posterior comparisons for U+V = 0 and U+V = 1
    let tol = super::reconstruct::TIE_TOL;
    let zero_when_sum0 = q * alpha >= p * beta - tol;
    let one_when_sum1 = p * alpha > q * beta + tol;
    let (case, d) = match (zero_when_sum0, one_when_sum1) {
        (true, true) => (XorCase::Xor, beta),
        (true, false) => (XorCase::Zero, p),
        (false, true) => (XorCase::One, q),
        (false, false) => (XorCase::Complement, alpha),
    };
    let (r1, r2) = match case {
        XorCase::Zero | XorCase::One => (0.0, 0.0),
        XorCase::Xor | XorCase::Complement => {
            let hz = h2(q * alpha + p * beta);
            ((hz - h2(q1)).max(0.0), (hz - h2(q2)).max(0.0))
        }
    };
    Ok(XorClosedForm { alpha, case, d, r1, r2 })
}

/// `min(2 H(X+Y), H(X, Y))` for a pair of binary sources.
pub fn korner_marton_sum_rate(pxy: &JointPmf) -> Result<f64> {
    if pxy.shape() != [2, 2] {
        return Err(Error::arg("expected a 2x2 pmf"));
    }
    let t = pxy.table();
    let hz = h2(t[1] + t[2]);
    Ok((2.0 * hz).min(entropy_of(t.iter().copied())))
}

/// Channel-code rate of `px` on Z_{p^r} without side information, re-rooted.
pub fn rooted_entropy_rate(px: &[f64], f: PrimaryCyclic) -> Result<f64> {
    let pmf = JointPmf::new(vec![Alphabet::cyclic(f)], px.to_vec())?;
    let atoms = pmf.to_atoms();
    let root = super::coding::rooting_of(&atoms, 0, f);
    Ok(channel_rate_rooted(&atoms, 0, f, root, &[]))
}
