//! Sweeps over auxiliary channels: the group-code region and the
//! Berger-Tung baseline.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::envelope::{lower_convex_envelope, Envelope};
use super::reconstruct::{expected_distortion, optimal_reconstruction, Distortion};
use super::theorem::{permutations, theorem1_rates, OptionPolicy, Provenance, RatePoint, MAX_PERMUTED_DIGITS};
use crate::embedding::{candidate_groups, digit_view, Embedding, EmbeddingSearch, FunctionTable, SearchMode};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::prob::{compose_markov, ConditionalPmf, JointPmf};

/// Compositions of `total` into `parts` non-negative parts, lexicographic.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=rest {
            cur.push(a);
            rec(rest - a, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

fn steps_for(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::arg(format!("grid step {step} must lie in (0, 1]")));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::arg(format!("grid step {step} must divide 1")));
    }
    Ok(n as usize)
}

/// Every conditional `P_{U|X}` whose rows lie on the simplex lattice of the
/// given step, guarded by `limit`.
pub fn conditional_grid(x_size: usize, u_size: usize, step: f64, limit: usize) -> Result<Vec<ConditionalPmf>> {
    let steps = steps_for(step)?;
    let rows = compositions(steps, u_size);
    let total = (rows.len() as f64).powi(x_size as i32);
    if total > limit as f64 {
        return Err(Error::ResourceGuard(format!("conditional grid has {total:e} points, above {limit}")));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut choice = vec![0usize; x_size];
    loop {
        let table: Vec<Vec<f64>> =
            choice.iter().map(|&c| rows[c].iter().map(|&k| k as f64 / steps as f64).collect()).collect();
        out.push(ConditionalPmf::from_rows(&table)?);
        let mut k = x_size;
        let mut advanced = false;
        while k > 0 {
            k -= 1;
            choice[k] += 1;
            if choice[k] < rows.len() {
                advanced = true;
                break;
            }
            choice[k] = 0;
        }
        if !advanced {
            break;
        }
    }
    Ok(out)
}

/// Every pair of conditionals `(P_{U|X}, P_{V|Y})` whose rows lie on the
/// simplex lattice of the given step. Channel `id` is a mixed-radix index
/// over rows, first the rows of `P_{U|X}` then those of `P_{V|Y}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelGrid {
    x_size: usize,
    y_size: usize,
    step: f64,
    steps: usize,
    u_rows: Vec<Vec<usize>>,
    v_rows: Vec<Vec<usize>>,
}

impl ChannelGrid {
    pub fn new(x_size: usize, y_size: usize, u_size: usize, v_size: usize, step: f64) -> Result<Self> {
        if u_size == 0 || v_size == 0 {
            return Err(Error::arg("auxiliary alphabets must be non-empty"));
        }
        let steps = steps_for(step)?;
        let grid = ChannelGrid {
            x_size,
            y_size,
            step,
            steps,
            u_rows: compositions(steps, u_size),
            v_rows: compositions(steps, v_size),
        };
        let len = (grid.u_rows.len() as f64).powi(x_size as i32) * (grid.v_rows.len() as f64).powi(y_size as i32);
        if len > 1e10 {
            return Err(Error::ResourceGuard(format!("channel grid has {len:e} points")));
        }
        Ok(grid)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.u_rows.len().pow(self.x_size as u32) * self.v_rows.len().pow(self.y_size as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn digits(&self, mut id: usize) -> Vec<usize> {
        let n = self.x_size + self.y_size;
        let mut d = vec![0; n];
        for k in (0..n).rev() {
            let radix = if k < self.x_size { self.u_rows.len() } else { self.v_rows.len() };
            d[k] = id % radix;
            id /= radix;
        }
        d
    }

    /// Integer rows (in units of the step) of channel `id`.
    pub fn lattice_rows(&self, id: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let d = self.digits(id);
        let u = d[..self.x_size].iter().map(|&i| self.u_rows[i].clone()).collect();
        let v = d[self.x_size..].iter().map(|&i| self.v_rows[i].clone()).collect();
        (u, v)
    }

    /// Inverse of [`ChannelGrid::lattice_rows`].
    pub fn index_of(&self, u: &[Vec<usize>], v: &[Vec<usize>]) -> Option<usize> {
        let find = |rows: &[Vec<usize>], r: &Vec<usize>| rows.binary_search(r).ok();
        let mut id = 0;
        for r in u {
            id = id * self.u_rows.len() + find(&self.u_rows, r)?;
        }
        for r in v {
            id = id * self.v_rows.len() + find(&self.v_rows, r)?;
        }
        Some(id)
    }

    pub fn get(&self, id: usize) -> Result<(ConditionalPmf, ConditionalPmf)> {
        if id >= self.len() {
            return Err(Error::arg(format!("channel id {id} out of range")));
        }
        let (u, v) = self.lattice_rows(id);
        let to_pmf = |rows: Vec<Vec<usize>>| {
            let rows: Vec<Vec<f64>> =
                rows.into_iter().map(|r| r.into_iter().map(|c| c as f64 / self.steps as f64).collect()).collect();
            ConditionalPmf::from_rows(&rows)
        };
        Ok((to_pmf(u)?, to_pmf(v)?))
    }

    /// Ids on a finer grid within `radius` coarse steps of coarse channel `id`.
    pub fn neighbours_on(&self, id: usize, fine: &ChannelGrid) -> Vec<usize> {
        let ratio = fine.steps / self.steps;
        let (u, v) = self.lattice_rows(id);
        let around = |row: &Vec<usize>| -> Vec<Vec<usize>> {
            let centre: Vec<usize> = row.iter().map(|c| c * ratio).collect();
            compositions(fine.steps, row.len())
                .into_iter()
                .filter(|n| n.iter().zip(&centre).all(|(a, b)| a.abs_diff(*b) <= ratio))
                .collect()
        };
        let options: Vec<Vec<Vec<usize>>> = u.iter().chain(v.iter()).map(around).collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; options.len()];
        loop {
            let rows: Vec<Vec<usize>> = choice.iter().zip(&options).map(|(c, o)| o[*c].clone()).collect();
            if let Some(i) = fine.index_of(&rows[..self.x_size], &rows[self.x_size..]) {
                out.push(i);
            }
            let mut k = options.len();
            let mut advanced = false;
            while k > 0 {
                k -= 1;
                choice[k] += 1;
                if choice[k] < options[k].len() {
                    advanced = true;
                    break;
                }
                choice[k] = 0;
            }
            if !advanced {
                break;
            }
        }
        out
    }
}

/// The auxiliary channels to sweep.
#[derive(Clone, Debug)]
pub enum Channels {
    Grid(ChannelGrid),
    List(Vec<(ConditionalPmf, ConditionalPmf)>),
}

impl Channels {
    pub fn len(&self) -> usize {
        match self {
            Channels::Grid(g) => g.len(),
            Channels::List(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: usize) -> Result<(ConditionalPmf, ConditionalPmf)> {
        match self {
            Channels::Grid(g) => g.get(id),
            Channels::List(l) => l.get(id).cloned().ok_or_else(|| Error::arg(format!("channel id {id} out of range"))),
        }
    }

    fn step(&self) -> Option<f64> {
        match self {
            Channels::Grid(g) => Some(g.step()),
            Channels::List(_) => None,
        }
    }
}

/// Which points a sweep keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Retention {
    /// Every evaluated point.
    All,
    /// Only points on the `(D, R1 + R2)` Pareto frontier.
    #[default]
    Pareto,
}

/// Groups tried for each reconstruction function.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum GroupChoice {
    /// Every class with order in `[|image|, |U||V|]`.
    #[default]
    Auto,
    List(Vec<AbelianGroup>),
    /// Exactly these embeddings (relabelled to each reconstruction; ones
    /// that do not determine it are skipped).
    Embeddings(Vec<FixedEmbedding>),
}

/// An explicitly chosen embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedEmbedding {
    pub embedding: Embedding,
    /// Also try every reassignment of the source symbols among the same
    /// group elements (see [`Embedding::relabelings`]).
    pub relabel: bool,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub groups: GroupChoice,
    pub embedding_mode: SearchMode,
    pub embedding_limit: usize,
    pub policy: OptionPolicy,
    pub retention: Retention,
    /// Finer grid step for a second pass around frontier channels.
    pub refine: Option<f64>,
    /// Embeddings with more digits than this are a resource-guard error
    /// (every digit order is tried).
    pub max_digits: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            groups: GroupChoice::Auto,
            embedding_mode: SearchMode::All,
            embedding_limit: 4096,
            policy: OptionPolicy::Min,
            retention: Retention::Pareto,
            refine: None,
            max_digits: MAX_PERMUTED_DIGITS,
        }
    }
}

/// Result of a sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionCurve {
    pub points: Vec<RatePoint>,
    pub envelope: Envelope,
    pub channels_evaluated: usize,
}

impl RegionCurve {
    /// Smallest sum rate among points with distortion at most `d`.
    pub fn min_sum_rate_at(&self, d: f64) -> Option<f64> {
        self.points.iter().filter(|p| p.d <= d).map(|p| p.sum()).fold(None, |a, s| Some(a.map_or(s, |a: f64| a.min(s))))
    }
}

fn tie_key(p: &RatePoint) -> (Option<u64>, usize, &str, usize, &[usize]) {
    let pr = &p.provenance;
    (pr.grid.map(f64::to_bits), pr.channel, pr.group.as_str(), pr.embedding, &pr.permutation)
}

/// Pareto frontier in `(D, R1 + R2)`, sorted by increasing `D`. Exact ties
/// are resolved by provenance so the result does not depend on insertion
/// order.
#[derive(Clone, Debug, Default)]
pub struct Frontier {
    pts: Vec<RatePoint>,
}

impl Frontier {
    fn beats(a: &RatePoint, b: &RatePoint) -> bool {
        a.d <= b.d && a.sum() <= b.sum() && (a.d < b.d || a.sum() < b.sum() || tie_key(a) < tie_key(b))
    }

    pub fn insert(&mut self, p: RatePoint) {
        // last point with d <= p.d has the smallest sum among those
        let pos = self.pts.partition_point(|q| q.d <= p.d);
        if pos > 0 && Frontier::beats(&self.pts[pos - 1], &p) {
            return;
        }
        let mut lo = pos;
        while lo > 0 && self.pts[lo - 1].d == p.d && Frontier::beats(&p, &self.pts[lo - 1]) {
            lo -= 1;
        }
        let mut hi = pos;
        while hi < self.pts.len() && Frontier::beats(&p, &self.pts[hi]) {
            hi += 1;
        }
        self.pts.splice(lo..hi, std::iter::once(p));
    }

    pub fn merge(mut self, other: Frontier) -> Frontier {
        for p in other.pts {
            self.insert(p);
        }
        self
    }

    pub fn into_points(self) -> Vec<RatePoint> {
        self.pts
    }
}

type EmbeddingCache = HashMap<(FunctionTable, AbelianGroup), Vec<Embedding>>;

fn embeddings_for(
    cache: &mut EmbeddingCache,
    g: &FunctionTable,
    group: &AbelianGroup,
    cfg: &SweepConfig,
) -> Result<Vec<Embedding>> {
    let key = (g.clone(), group.clone());
    if let Some(e) = cache.get(&key) {
        return Ok(e.clone());
    }
    let found = EmbeddingSearch::new(g, group).mode(cfg.embedding_mode).limit(cfg.embedding_limit).run()?;
    cache.insert(key, found.clone());
    Ok(found)
}

/// Group-code rate points for one auxiliary channel pair.
pub fn theorem1_points_for_channel(
    pxy: &JointPmf,
    cu: &ConditionalPmf,
    cv: &ConditionalPmf,
    d: &Distortion,
    cfg: &SweepConfig,
    channel: usize,
    step: Option<f64>,
    cache: &mut EmbeddingCache,
) -> Result<Vec<RatePoint>> {
    let pmf = compose_markov(pxy, cu, cv)?;
    let g = optimal_reconstruction(&pmf, d)?;
    let dist = expected_distortion(&pmf, d, &g)?;
    let base = Provenance {
        group: String::new(),
        embedding: 0,
        permutation: Vec::new(),
        options: Vec::new(),
        channel,
        grid: step,
        constant_reconstruction: false,
        notes: Vec::new(),
    };
    if g.is_constant() {
        let prov = Provenance { group: "Z1".into(), constant_reconstruction: true, ..base };
        return Ok(vec![RatePoint { d: dist, r1: 0.0, r2: 0.0, provenance: prov, stages: Vec::new() }]);
    }
    let mut embeddings: Vec<(Embedding, usize)> = Vec::new();
    match &cfg.groups {
        GroupChoice::Auto | GroupChoice::List(_) => {
            let groups = match &cfg.groups {
                GroupChoice::List(l) => l.clone(),
                _ => candidate_groups(&g)?,
            };
            for group in groups.iter().filter(|a| a.order() as usize >= g.image().len()) {
                for (i, e) in embeddings_for(cache, &g, group, cfg)?.into_iter().enumerate() {
                    embeddings.push((e, i));
                }
            }
        }
        GroupChoice::Embeddings(list) => {
            // a relabelled entry contributes one index per relabelling that
            // determines the reconstruction
            let mut next = 0;
            for fixed in list {
                if fixed.relabel {
                    let all = fixed.embedding.relabelings(&g, cfg.embedding_limit)?;
                    for e in all {
                        embeddings.push((e, next));
                        next += 1;
                    }
                } else {
                    if let Ok(e) = fixed.embedding.relabel_for(&g) {
                        embeddings.push((e, next));
                    }
                    next += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    for (e, ei) in embeddings {
        let view = digit_view(&e, &pmf)?;
        if view.k() > cfg.max_digits {
            return Err(Error::ResourceGuard(format!(
                "{} has {} digits; the permutation cap allows {}",
                e.group(),
                view.k(),
                cfg.max_digits
            )));
        }
        for perm in permutations(view.k())? {
            let rates = theorem1_rates(&view, &perm, &cfg.policy)?;
            let mut notes = base.notes.clone();
            notes.extend(rates.stages.iter().flat_map(|s| s.notes.iter().cloned()));
            let prov = Provenance {
                group: e.group().name(),
                embedding: ei,
                permutation: perm,
                options: rates.stages.iter().map(|s| s.choice).collect(),
                channel,
                grid: step,
                constant_reconstruction: false,
                notes,
            };
            out.push(RatePoint { d: dist, r1: rates.r1, r2: rates.r2, provenance: prov, stages: rates.stages });
        }
    }
    Ok(out)
}

/// Berger-Tung corner point `(I(X;U|V), I(Y;V))` for one channel pair; its
/// sum is `I(XY;UV)`.
pub fn berger_tung_point(
    pxy: &JointPmf,
    cu: &ConditionalPmf,
    cv: &ConditionalPmf,
    d: &Distortion,
    channel: usize,
    step: Option<f64>,
) -> Result<RatePoint> {
    let pmf = compose_markov(pxy, cu, cv)?;
    let g = optimal_reconstruction(&pmf, d)?;
    let dist = expected_distortion(&pmf, d, &g)?;
    let r1 = pmf.mutual_information(&[0], &[2], &[3])?;
    let sum = pmf.mutual_information(&[0, 1], &[2, 3], &[])?;
    let prov = Provenance {
        group: "BT".into(),
        embedding: 0,
        permutation: Vec::new(),
        options: Vec::new(),
        channel,
        grid: step,
        constant_reconstruction: false,
        notes: Vec::new(),
    };
    Ok(RatePoint { d: dist, r1, r2: (sum - r1).max(0.0), provenance: prov, stages: Vec::new() })
}

fn sweep<F>(channels: &Channels, ids: Vec<usize>, retention: Retention, eval: F) -> Result<Vec<RatePoint>>
where
    F: Fn(usize, &mut EmbeddingCache) -> Result<Vec<RatePoint>> + Sync,
{
    let _ = channels;
    match retention {
        Retention::All => {
            let chunks: Vec<Vec<RatePoint>> = ids
                .par_iter()
                .map_init(EmbeddingCache::new, |cache, &id| eval(id, cache))
                .collect::<Result<_>>()?;
            Ok(chunks.into_iter().flatten().collect())
        }
        Retention::Pareto => {
            let frontier = ids
                .par_chunks(256)
                .map_init(EmbeddingCache::new, |cache, chunk| {
                    let mut f = Frontier::default();
                    for &id in chunk {
                        for p in eval(id, cache)? {
                            f.insert(p);
                        }
                    }
                    Ok::<Frontier, Error>(f)
                })
                .try_reduce(Frontier::default, |a, b| Ok(a.merge(b)))?;
            Ok(frontier.into_points())
        }
    }
}

fn finish(points: Vec<RatePoint>, evaluated: usize) -> Result<RegionCurve> {
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.d, p.sum())).collect();
    let envelope = if pairs.is_empty() { Envelope::default() } else { lower_convex_envelope(&pairs)? };
    Ok(RegionCurve { points, envelope, channels_evaluated: evaluated })
}

fn refine_ids(channels: &Channels, points: &[RatePoint], fine_step: f64) -> Result<Option<(ChannelGrid, Vec<usize>)>> {
    let Channels::Grid(coarse) = channels else { return Ok(None) };
    let fine = ChannelGrid::new(coarse.x_size, coarse.y_size, coarse.u_rows[0].len(), coarse.v_rows[0].len(), fine_step)?;
    if fine.steps % coarse.steps != 0 || fine.steps == coarse.steps {
        return Err(Error::arg("refinement step must evenly subdivide the grid step"));
    }
    let mut ids: Vec<usize> = Vec::new();
    let mut centres: Vec<usize> = points.iter().map(|p| p.provenance.channel).collect();
    centres.sort_unstable();
    centres.dedup();
    for c in centres {
        ids.extend(coarse.neighbours_on(c, &fine));
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(Some((fine, ids)))
}

/// Group-code rate points over all channels, groups, embeddings and orders.
pub fn theorem1_region(pxy: &JointPmf, channels: &Channels, d: &Distortion, cfg: &SweepConfig) -> Result<RegionCurve> {
    let eval = |chs: &Channels, id: usize, cache: &mut EmbeddingCache| {
        let (cu, cv) = chs.get(id)?;
        theorem1_points_for_channel(pxy, &cu, &cv, d, cfg, id, chs.step(), cache)
    };
    let ids: Vec<usize> = (0..channels.len()).collect();
    let mut evaluated = ids.len();
    let mut points = sweep(channels, ids, cfg.retention, |id, c| eval(channels, id, c))?;
    if let Some(step) = cfg.refine {
        if let Some((fine, ids)) = refine_ids(channels, &points, step)? {
            evaluated += ids.len();
            let fine = Channels::Grid(fine);
            let extra = sweep(&fine, ids, cfg.retention, |id, c| eval(&fine, id, c))?;
            points = merge_points(points, extra, cfg.retention);
        }
    }
    finish(points, evaluated)
}

/// Berger-Tung sum-rate points over all channels.
pub fn berger_tung_region(
    pxy: &JointPmf,
    channels: &Channels,
    d: &Distortion,
    retention: Retention,
    refine: Option<f64>,
) -> Result<RegionCurve> {
    let eval = |chs: &Channels, id: usize| -> Result<Vec<RatePoint>> {
        let (cu, cv) = chs.get(id)?;
        Ok(vec![berger_tung_point(pxy, &cu, &cv, d, id, chs.step())?])
    };
    let ids: Vec<usize> = (0..channels.len()).collect();
    let mut evaluated = ids.len();
    let mut points = sweep(channels, ids, retention, |id, _| eval(channels, id))?;
    if let Some(step) = refine {
        if let Some((fine, ids)) = refine_ids(channels, &points, step)? {
            evaluated += ids.len();
            let fine = Channels::Grid(fine);
            let extra = sweep(&fine, ids, retention, |id, _| eval(&fine, id))?;
            points = merge_points(points, extra, retention);
        }
    }
    finish(points, evaluated)
}

fn merge_points(a: Vec<RatePoint>, b: Vec<RatePoint>, retention: Retention) -> Vec<RatePoint> {
    match retention {
        Retention::All => a.into_iter().chain(b).collect(),
        Retention::Pareto => {
            let mut f = Frontier::default();
            for p in a.into_iter().chain(b) {
                f.insert(p);
            }
            f.into_points()
        }
    }
}
