//! Result bundles and their CSV rendering.

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::spec::{ProblemSpec, SpecFile};
use crate::error::{Error, Result};
use crate::rate::region::{berger_tung_point, theorem1_points_for_channel};
use crate::rate::{berger_tung_region, theorem1_region, RatePoint, RegionCurve};

/// Which regions `region` computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RegionMode {
    Theorem1,
    BergerTung,
    Both,
}

/// Lowest sum rate reached with one group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupBest {
    pub sum_rate: f64,
    pub d: f64,
    /// Index into the region's `points`.
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionResult {
    #[serde(flatten)]
    pub curve: RegionCurve,
    /// Best point per group name among the retained points.
    pub best_by_group: BTreeMap<String, GroupBest>,
}

impl RegionResult {
    fn new(curve: RegionCurve) -> Self {
        let mut best_by_group: BTreeMap<String, GroupBest> = BTreeMap::new();
        for (i, p) in curve.points.iter().enumerate() {
            let entry = GroupBest { sum_rate: p.sum(), d: p.d, point: i };
            match best_by_group.get(&p.provenance.group) {
                Some(b) if (b.sum_rate, b.d) <= (entry.sum_rate, entry.d) => {}
                _ => {
                    best_by_group.insert(p.provenance.group.clone(), entry);
                }
            }
        }
        RegionResult { curve, best_by_group }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem1: Option<RegionResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub berger_tung: Option<RegionResult>,
}

/// Everything `region` produces for one specification file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the canonical specification JSON.
    pub input_digest: String,
    pub problems: Vec<ProblemResult>,
}

pub fn input_digest(spec: &SpecFile) -> String {
    let hash = Sha256::digest(spec.canonical_json().as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn solve_problem(p: &ProblemSpec, mode: RegionMode) -> Result<ProblemResult> {
    let pxy = p.joint_pmf()?;
    let d = p.distortion()?;
    let channels = p.channels()?;
    let cfg = p.sweep_config()?;
    let theorem1 = match mode {
        RegionMode::Theorem1 | RegionMode::Both => Some(RegionResult::new(theorem1_region(&pxy, &channels, &d, &cfg)?)),
        RegionMode::BergerTung => None,
    };
    let berger_tung = match mode {
        RegionMode::BergerTung | RegionMode::Both => {
            Some(RegionResult::new(berger_tung_region(&pxy, &channels, &d, cfg.retention, cfg.refine)?))
        }
        RegionMode::Theorem1 => None,
    };
    Ok(ProblemResult { name: p.name.clone(), theorem1, berger_tung })
}

pub fn solve(spec: &SpecFile, mode: RegionMode) -> Result<ResultBundle> {
    let problems = spec.problems().iter().map(|p| solve_problem(p, mode)).collect::<Result<Vec<_>>>()?;
    Ok(ResultBundle {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input_digest: input_digest(spec),
        problems,
    })
}

/// Recomputes a point from the problem and its provenance alone.
pub fn recompute_point(p: &ProblemSpec, point: &RatePoint) -> Result<RatePoint> {
    let prov = &point.provenance;
    let mut problem = p.clone();
    if let Some(step) = prov.grid {
        problem.sweep.grid_step = step;
    }
    let channels = problem.channels()?;
    let (cu, cv) = channels.get(prov.channel)?;
    let pxy = p.joint_pmf()?;
    let d = p.distortion()?;
    if prov.group == "BT" {
        return berger_tung_point(&pxy, &cu, &cv, &d, prov.channel, prov.grid);
    }
    let cfg = problem.sweep_config()?;
    let candidates = theorem1_points_for_channel(&pxy, &cu, &cv, &d, &cfg, prov.channel, prov.grid, &mut HashMap::new())?;
    candidates
        .into_iter()
        .find(|q| {
            q.provenance.group == prov.group
                && q.provenance.embedding == prov.embedding
                && q.provenance.permutation == prov.permutation
        })
        .ok_or_else(|| Error::arg("provenance does not identify a point of this problem"))
}

/// `x` with six significant digits, trailing zeros removed.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub const CSV_HEADER: [&str; 11] =
    ["D", "R1", "R2", "Rsum", "group", "permutation", "options", "channel_id", "embedding", "mode", "problem"];

/// All points of the bundle, one CSV row each.
pub fn write_csv<W: std::io::Write>(bundle: &ResultBundle, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (pi, prob) in bundle.problems.iter().enumerate() {
        let label = prob.name.clone().unwrap_or_else(|| pi.to_string());
        for (mode, region) in [("theorem1", &prob.theorem1), ("berger-tung", &prob.berger_tung)] {
            let Some(region) = region else { continue };
            for p in &region.curve.points {
                let pr = &p.provenance;
                w.write_record([
                    sig6(p.d),
                    sig6(p.r1),
                    sig6(p.r2),
                    sig6(p.sum()),
                    pr.group.clone(),
                    pr.permutation_code(),
                    pr.options_code(),
                    pr.channel.to_string(),
                    pr.embedding.to_string(),
                    mode.to_string(),
                    label.clone(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(3.0), "3");
        assert_eq!(sig6(3.905_612_3), "3.90561");
        assert_eq!(sig6(0.012_345_678), "0.0123457");
        assert_eq!(sig6(-1.5), "-1.5");
        assert_eq!(sig6(123_456_789.0), "123456789");
        assert_eq!(sig6(1e-9), "1.00000e-9");
        assert_eq!(sig6(0.0), "0");
    }
}
