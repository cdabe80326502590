//! Digit-by-digit rates for a fixed embedding and encoding order.

use serde::{Deserialize, Serialize};

use super::coding::{channel_rate_rooted, rooting_of, source_rate_rooted, Rooting};
use super::reconstruct::{expected_distortion, optimal_reconstruction, Distortion};
use crate::embedding::{digit_view, DigitView, Embedding};
use crate::error::{Error, Result};
use crate::group::PrimaryCyclic;
use crate::prob::{JointPmf, Sel};

/// Largest number of digits for which every encoding order is tried.
pub const MAX_PERMUTED_DIGITS: usize = 6;

/// How an encoder spends rate on one digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageOption {
    /// Nested codes whose fine code is good for the sum digit.
    Channel,
    /// Nested codes whose fine code is good for the encoder's own digit.
    Digit,
    /// The encoder's digit is constant and nothing is sent.
    Silent,
}

impl StageOption {
    pub fn code(&self) -> &'static str {
        match self {
            StageOption::Channel => "1",
            StageOption::Digit => "2",
            StageOption::Silent => "0",
        }
    }

    pub fn from_code(c: &str) -> Result<Self> {
        match c {
            "1" => Ok(StageOption::Channel),
            "2" => Ok(StageOption::Digit),
            "0" => Ok(StageOption::Silent),
            _ => Err(Error::Parse(format!("unknown stage option `{c}`"))),
        }
    }
}

/// Which of the two per-stage rate expressions each encoder uses.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptionPolicy {
    /// The smaller of the two expressions, per encoder and stage.
    #[default]
    Min,
    /// Only the sum-digit expression; an encoder whose digit is constant
    /// stays silent.
    ChannelOnly,
    /// Only the own-digit expression.
    DigitOnly,
    /// Options fixed per stage, `[encoder 1, encoder 2]`.
    Fixed(Vec<[StageOption; 2]>),
}

/// Rates of one encoding stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRates {
    /// Digit index (position in the group's factor list).
    pub digit: usize,
    pub p: u64,
    pub r: u32,
    /// Encoder 1 rate under the sum-digit and own-digit options, clamped at 0.
    pub enc1: [f64; 2],
    pub enc2: [f64; 2],
    pub choice: [StageOption; 2],
    pub r1: f64,
    pub r2: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Total rates for one embedding and order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Rates {
    pub r1: f64,
    pub r2: f64,
    pub stages: Vec<StageRates>,
}

fn check_permutation(perm: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if perm.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: perm.len() });
    }
    for &j in perm {
        if j >= k || seen[j] {
            return Err(Error::arg(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        seen[j] = true;
    }
    Ok(())
}

fn note(label: &str, root: Rooting, f: PrimaryCyclic) -> Option<String> {
    if root.is_identity() {
        return None;
    }
    Some(format!(
        "{label} re-rooted from Z{} onto Z{} (offset {}, subgroup {}^{})",
        f.order(),
        f.p().pow(f.r() - root.shift),
        root.offset,
        f.p(),
        root.shift
    ))
}

/// Per-stage rates for the digit order `perm` (stage `b` encodes digit
/// `perm[b]`, with the sum digits of earlier stages as decoder side
/// information).
pub fn theorem1_rates(view: &DigitView, perm: &[usize], policy: &OptionPolicy) -> Result<Theorem1Rates> {
    let k = view.k();
    check_permutation(perm, k)?;
    if let OptionPolicy::Fixed(opts) = policy {
        if opts.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: opts.len() });
        }
    }
    let atoms = view.atoms();
    let cols = view.columns();
    let mut stages = Vec::with_capacity(k);
    let (mut r1, mut r2) = (0.0, 0.0);
    let mut side: Vec<Sel> = Vec::new();
    let mut side_u: Vec<Sel> = vec![atoms.full(cols.x)];
    let mut side_v: Vec<Sel> = vec![atoms.full(cols.y)];
    for (b, &j) in perm.iter().enumerate() {
        let f = view.factors()[j];
        let (uc, vc, zc) = (cols.u_digits[j], cols.v_digits[j], cols.z_digits[j]);
        let (ru, rv, rz) = (rooting_of(atoms, uc, f), rooting_of(atoms, vc, f), rooting_of(atoms, zc, f));
        let ch_z = channel_rate_rooted(atoms, zc, f, rz, &side);
        let ch_u = channel_rate_rooted(atoms, uc, f, ru, &side);
        let ch_v = channel_rate_rooted(atoms, vc, f, rv, &side);
        let src_u = source_rate_rooted(atoms, uc, f, ru, &side_u);
        let src_v = source_rate_rooted(atoms, vc, f, rv, &side_v);
        let enc1 = [(ch_z - src_u).max(0.0), (ch_u - src_u).max(0.0)];
        let enc2 = [(ch_z - src_v).max(0.0), (ch_v - src_v).max(0.0)];
        let u_const = ru.exponent(f) == 0;
        let v_const = rv.exponent(f) == 0;
        let pick = |rates: [f64; 2], constant: bool, slot: usize| -> (StageOption, f64) {
            match policy {
                OptionPolicy::Min => {
                    if rates[1] < rates[0] {
                        (StageOption::Digit, rates[1])
                    } else {
                        (StageOption::Channel, rates[0])
                    }
                }
                OptionPolicy::ChannelOnly if constant => (StageOption::Silent, 0.0),
                OptionPolicy::ChannelOnly => (StageOption::Channel, rates[0]),
                OptionPolicy::DigitOnly => (StageOption::Digit, rates[1]),
                OptionPolicy::Fixed(opts) => match opts[b][slot] {
                    StageOption::Channel => (StageOption::Channel, rates[0]),
                    StageOption::Digit => (StageOption::Digit, rates[1]),
                    StageOption::Silent => (StageOption::Silent, 0.0),
                },
            }
        };
        let (c1, s1) = pick(enc1, u_const, 0);
        let (c2, s2) = pick(enc2, v_const, 1);
        r1 += s1;
        r2 += s2;
        let notes = [note("sum digit", rz, f), note("encoder 1 digit", ru, f), note("encoder 2 digit", rv, f)]
            .into_iter()
            .flatten()
            .collect();
        stages.push(StageRates {
            digit: j,
            p: f.p(),
            r: f.r(),
            enc1,
            enc2,
            choice: [c1, c2],
            r1: s1,
            r2: s2,
            notes,
        });
        side.push(atoms.full(zc));
        side_u.push(atoms.full(uc));
        side_v.push(atoms.full(vc));
    }
    Ok(Theorem1Rates { r1, r2, stages })
}

/// Where a rate point came from, enough to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Group name, `BT` for Berger-Tung points.
    pub group: String,
    /// Index of the embedding among those enumerated for this group.
    pub embedding: usize,
    pub permutation: Vec<usize>,
    pub options: Vec<[StageOption; 2]>,
    /// Index of the auxiliary channel pair.
    pub channel: usize,
    /// Step of the channel grid `channel` indexes; `None` for explicit lists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<f64>,
    /// The optimal reconstruction is constant, so no rate is needed.
    #[serde(default)]
    pub constant_reconstruction: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Provenance {
    pub fn permutation_code(&self) -> String {
        self.permutation.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(">")
    }

    pub fn options_code(&self) -> String {
        self.options.iter().map(|o| format!("{}{}", o[0].code(), o[1].code())).collect::<Vec<_>>().join(";")
    }
}

/// An achievable `(R1, R2, D)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub d: f64,
    pub r1: f64,
    pub r2: f64,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageRates>,
}

impl RatePoint {
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// The rate point of `pmf` (over `X, Y, U, V`) for embedding `e` of the
/// optimal reconstruction under `d`, digits encoded in order `perm`.
///
/// The embedding only has to make `G` a function of `s_u(U) + s_v(V)`;
/// its `s_g` is relabelled accordingly. A constant reconstruction needs no
/// rate at all.
pub fn theorem1_rate_point(
    pmf: &JointPmf,
    e: &Embedding,
    perm: &[usize],
    d: &Distortion,
    policy: &OptionPolicy,
) -> Result<RatePoint> {
    let g = optimal_reconstruction(pmf, d)?;
    let dist = expected_distortion(pmf, d, &g)?;
    let mut prov = Provenance {
        group: e.group().name(),
        embedding: 0,
        permutation: perm.to_vec(),
        options: Vec::new(),
        channel: 0,
        grid: None,
        constant_reconstruction: false,
        notes: Vec::new(),
    };
    if g.is_constant() {
        prov.constant_reconstruction = true;
        return Ok(RatePoint { d: dist, r1: 0.0, r2: 0.0, provenance: prov, stages: Vec::new() });
    }
    let e = e.relabel_for(&g)?;
    let view = digit_view(&e, pmf)?;
    let rates = theorem1_rates(&view, perm, policy)?;
    prov.options = rates.stages.iter().map(|s| s.choice).collect();
    prov.notes = rates.stages.iter().flat_map(|s| s.notes.clone()).collect();
    Ok(RatePoint { d: dist, r1: rates.r1, r2: rates.r2, provenance: prov, stages: rates.stages })
}

/// All permutations of `0..k` in lexicographic order; errors above
/// [`MAX_PERMUTED_DIGITS`].
pub fn permutations(k: usize) -> Result<Vec<Vec<usize>>> {
    if k > MAX_PERMUTED_DIGITS {
        return Err(Error::ResourceGuard(format!(
            "{k} digits would need {k}! encoding orders; at most {MAX_PERMUTED_DIGITS} digits are permuted"
        )));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_listing() {
        assert_eq!(permutations(0).unwrap(), vec![Vec::<usize>::new()]);
        assert_eq!(permutations(3).unwrap().len(), 6);
        assert_eq!(permutations(3).unwrap()[1], vec![0, 2, 1]);
        assert!(matches!(permutations(7), Err(Error::ResourceGuard(_))));
    }
}
