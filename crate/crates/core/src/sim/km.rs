//! Syndrome-sum codec for the modulo-2 sum of two binary sources: both
//! encoders send `A x` and `A y` under one shared random `A`, the decoder
//! looks for `z` in the coset `{z : A z = A x + A y}`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{random_hom_indexed, stream_rng, Decoder, ReportEntry, SimConfig, SimMode, SimReport, STREAM_TRIAL};
use crate::error::{Error, Result};
use crate::group::HomMatrix;
use crate::prob::{h2, JointPmf};

/// The ML search stops once the expected number of other coset members at
/// most as heavy as the best candidate drops below this.
pub const ISD_STOP_TOL: f64 = 1e-2;

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn bit(v: &[u64], i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

fn flip(v: &mut [u64], i: usize) {
    v[i / 64] ^= 1 << (i % 64);
}

/// Matrix over GF(2) stored as row bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    /// From a matrix over Z_2.
    pub fn from_hom(h: &HomMatrix) -> Result<Self> {
        if h.modulus() != 2 {
            return Err(Error::arg("bit matrices need entries in Z2"));
        }
        let mut m = BitMatrix::zeros(h.rows(), h.cols());
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                if h.get(i, j) == 1 {
                    m.set(i, j);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        bit(self.row(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize) {
        let s = self.stride;
        flip(&mut self.data[i * s..(i + 1) * s], j);
    }

    /// `A x` for a bitset `x` of length `cols`; the result has one bit per row.
    pub fn mul(&self, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; words(self.rows)];
        for i in 0..self.rows {
            let parity = self.row(i).iter().zip(x).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1;
            if parity == 1 {
                flip(&mut out, i);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| bit(&rows[r], c)) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for r in rank + 1..rows.len() {
                if bit(&rows[r], c) {
                    rows[r].iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Result of one decoding attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsdOutcome {
    /// Best candidate found (a bitset of length `n`).
    pub solution: Option<Vec<u64>>,
    pub weight: usize,
    pub iterations: usize,
    pub rank: usize,
    /// The stopping rule fired before the budget ran out.
    pub certified: bool,
    /// The coset holds too many light members to single one out; the
    /// solution is the lightest seen but is not trusted.
    pub ambiguous: bool,
}

/// An ML decode is reported ambiguous once the chance that it returns the
/// source sequence is provably below this.
pub const ISD_AMBIGUOUS_TOL: f64 = 0.05;

/// `P(Bin(n, q) < w)`.
fn binomial_below(n: usize, q: f64, w: usize) -> f64 {
    if q <= 0.0 {
        return if w > 0 { 1.0 } else { 0.0 };
    }
    let (lq, lp) = (q.ln(), (1.0 - q).ln());
    let mut log_c = 0.0f64;
    let mut total = 0.0;
    for j in 0..w.min(n + 1) {
        total += (log_c + j as f64 * lq + (n - j) as f64 * lp).exp();
        log_c += ((n - j) as f64 / (j + 1) as f64).ln();
    }
    total.min(1.0)
}

/// `sum_{j <= w} C(n, j) 2^-rank`.
fn expected_lighter(n: usize, w: usize, rank: usize) -> f64 {
    let mut c = 1.0f64;
    let mut total = 0.0;
    for j in 0..=w.min(n) {
        total += c;
        c *= (n - j) as f64 / (j + 1) as f64;
    }
    total * 2f64.powi(-(rank as i32))
}

/// Columns swapped into the information set per iteration.
const ISD_SWAPS: usize = 16;

/// `[H | s]` kept in reduced form, column-major: every pivot column is a
/// unit vector and rows without a pivot are zero.
struct Reduced<const W: usize> {
    cols: Vec<[u64; W]>,
    s: [u64; W],
    row_pivot: Vec<usize>,
    free: Vec<usize>,
}

fn has<const W: usize>(v: &[u64; W], t: usize) -> bool {
    v[t / 64] >> (t % 64) & 1 == 1
}

impl<const W: usize> Reduced<W> {
    /// Makes column `c` the unit vector at row `t` by row operations.
    fn pivot(&mut self, c: usize, t: usize) {
        let mut e = self.cols[c];
        e[t / 64] ^= 1 << (t % 64);
        let (word, shift) = (t / 64, t % 64);
        for col in self.cols.iter_mut().chain(std::iter::once(&mut self.s)) {
            let mask = 0u64.wrapping_sub(col[word] >> shift & 1);
            for w in 0..W {
                col[w] ^= e[w] & mask;
            }
        }
    }

    /// Gauss-Jordan with pivots taken in `order`. Returns `None` when the
    /// syndrome is outside the column space.
    fn new(h: &BitMatrix, syndrome: &[u64], order: &[usize]) -> Option<Self> {
        let (k, n) = (h.rows(), h.cols());
        let mut cols = vec![[0u64; W]; n];
        for i in 0..k {
            for (j, col) in cols.iter_mut().enumerate() {
                if h.get(i, j) {
                    col[i / 64] ^= 1 << (i % 64);
                }
            }
        }
        let mut s = [0u64; W];
        for i in (0..k).filter(|&i| bit(syndrome, i)) {
            s[i / 64] ^= 1 << (i % 64);
        }
        let mut red = Reduced { cols, s, row_pivot: vec![usize::MAX; k], free: Vec::new() };
        let mut used = [0u64; W];
        let mut rank = 0;
        for &c in order {
            if rank == k {
                red.free.push(c);
                continue;
            }
            let t = (0..W).find_map(|w| {
                let m = red.cols[c][w] & !used[w];
                (m != 0).then(|| w * 64 + m.trailing_zeros() as usize)
            });
            match t {
                Some(t) => {
                    red.pivot(c, t);
                    red.row_pivot[t] = c;
                    used[t / 64] ^= 1 << (t % 64);
                    rank += 1;
                }
                None => red.free.push(c),
            }
        }
        let consistent = red.s.iter().zip(&used).all(|(a, u)| a & !u == 0);
        consistent.then_some(red)
    }

    fn rank(&self) -> usize {
        self.cols.len() - self.free.len()
    }

    /// Exchanges a random non-zero free column with one of the pivots it
    /// touches.
    fn swap<R: Rng>(&mut self, rng: &mut R) {
        for _ in 0..8 {
            let f = rng.gen_range(0..self.free.len());
            let c = self.free[f];
            let col = self.cols[c];
            let ones: usize = col.iter().map(|w| w.count_ones() as usize).sum();
            if ones == 0 {
                continue;
            }
            let pick = rng.gen_range(0..ones);
            let t = (0..64 * W).filter(|&t| has(&col, t)).nth(pick).expect("pick below weight");
            self.pivot(c, t);
            self.free[f] = self.row_pivot[t];
            self.row_pivot[t] = c;
            return;
        }
    }

    /// The coset member with the given free positions set.
    fn solution(&self, set: &[usize], resid: &[u64; W]) -> Vec<u64> {
        let mut x = vec![0u64; words(self.cols.len())];
        for &f in set {
            flip(&mut x, self.free[f]);
        }
        for (t, &c) in self.row_pivot.iter().enumerate() {
            if c != usize::MAX && has(resid, t) {
                flip(&mut x, c);
            }
        }
        x
    }
}

/// Best candidate from one scan: weight, chosen free positions, residual.
type Hit<const W: usize> = (usize, [usize; 2], usize, [u64; W]);

/// Tries the empty set, every single and every pair of free columns. A
/// candidate is accepted when its weight lies in `lo..=*hi`; with
/// `first` the first acceptance is returned, otherwise `*hi` tightens to
/// just below each accepted weight and the last one wins.
#[inline(always)]
fn scan<const W: usize>(fc: &[[u64; W]], s: &[u64; W], lo: usize, hi: &mut usize, first: bool) -> Option<Hit<W>> {
    let pop = |v: &[u64; W]| v.iter().map(|w| w.count_ones() as usize).sum::<usize>();
    let xor = |a: &[u64; W], b: &[u64; W]| {
        let mut out = [0u64; W];
        for w in 0..W {
            out[w] = a[w] ^ b[w];
        }
        out
    };
    let mut hit: Option<Hit<W>> = None;
    let mut accept = |w: usize, set: [usize; 2], len: usize, resid: [u64; W], hi: &mut usize| -> bool {
        if w < lo || w > *hi {
            return false;
        }
        hit = Some((w, set, len, resid));
        if !first {
            *hi = w.saturating_sub(1);
        }
        first
    };
    if accept(pop(s), [0, 0], 0, *s, hi) {
        return hit;
    }
    for (i, ci) in fc.iter().enumerate() {
        let t = xor(s, ci);
        if accept(1 + pop(&t), [i, 0], 1, t, hi) {
            return hit;
        }
        if *hi < 2 {
            continue;
        }
        for j in i + 1..fc.len() {
            let cj = &fc[j];
            let mut w = 2;
            for k in 0..W {
                w += (t[k] ^ cj[k]).count_ones() as usize;
            }
            if w <= *hi && w >= lo && accept(w, [i, j], 2, xor(&t, cj), hi) {
                return hit;
            }
        }
    }
    hit
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn scan_popcnt<const W: usize>(fc: &[[u64; W]], s: &[u64; W], lo: usize, hi: &mut usize, first: bool) -> Option<Hit<W>> {
    scan(fc, s, lo, hi, first)
}

/// [`scan`] with the hardware population count when the CPU has one.
fn scan_fast<const W: usize>(fc: &[[u64; W]], s: &[u64; W], lo: usize, hi: &mut usize, first: bool) -> Option<Hit<W>> {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the feature was detected at runtime.
        return unsafe { scan_popcnt(fc, s, lo, hi, first) };
    }
    scan(fc, s, lo, hi, first)
}

/// Information-set decoding over GF(2). The system is kept in reduced form
/// and each iteration swaps random columns into the information set, then
/// tries every candidate with at most two non-pivot positions set.
///
/// With `typical = None` it returns the lightest candidate seen, stopping
/// once [`ISD_STOP_TOL`] is met or when the solution is unique. Given the
/// per-bit flip probability `q` of the sought sequence it also stops when
/// the best weight `w` makes ML success unlikely: `P(weight < w)` plus the
/// chance of no other coset member at most as heavy as `w` is below
/// [`ISD_AMBIGUOUS_TOL`] (reported as `ambiguous`). With
/// `typical = Some((lo, hi))` it returns the first candidate whose weight
/// lies in `lo..=hi`.
pub fn isd_decode<R: Rng>(
    h: &BitMatrix,
    syndrome: &[u64],
    max_iterations: usize,
    typical: Option<(usize, usize)>,
    q: Option<f64>,
    rng: &mut R,
) -> IsdOutcome {
    assert!(h.rows() <= 64 * 64, "syndrome longer than 4096 bits");
    match words(h.rows()).max(1) {
        1 => isd_fixed::<1, R>(h, syndrome, max_iterations, typical, q, rng),
        2 => isd_fixed::<2, R>(h, syndrome, max_iterations, typical, q, rng),
        3..=4 => isd_fixed::<4, R>(h, syndrome, max_iterations, typical, q, rng),
        5..=8 => isd_fixed::<8, R>(h, syndrome, max_iterations, typical, q, rng),
        9..=16 => isd_fixed::<16, R>(h, syndrome, max_iterations, typical, q, rng),
        _ => isd_fixed::<64, R>(h, syndrome, max_iterations, typical, q, rng),
    }
}

fn isd_fixed<const W: usize, R: Rng>(
    h: &BitMatrix,
    syndrome: &[u64],
    max_iterations: usize,
    typical: Option<(usize, usize)>,
    q: Option<f64>,
    rng: &mut R,
) -> IsdOutcome {
    let n = h.cols();
    let failed = |iterations, rank, certified| IsdOutcome { solution: None, weight: 0, iterations, rank, certified, ambiguous: false };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let Some(mut red) = Reduced::<W>::new(h, syndrome, &order) else {
        // inconsistent syndrome: nothing in the coset
        return failed(1, h.rank(), true);
    };
    let rank = red.rank();
    // with at most two free columns one scan visits the whole coset
    let exhaustive = red.free.len() <= 2;
    let mut best: Option<(usize, Vec<u64>)> = None;
    let mut fc: Vec<[u64; W]> = Vec::with_capacity(red.free.len());
    let mut iterations = 0;
    while iterations < max_iterations.max(1) {
        iterations += 1;
        if iterations > 1 && !red.free.is_empty() {
            for _ in 0..ISD_SWAPS {
                red.swap(rng);
            }
        }
        fc.clear();
        fc.extend(red.free.iter().map(|&j| red.cols[j]));
        let s = red.s;
        let (lo, mut hi) = match typical {
            Some(window) => window,
            None => (0, best.as_ref().map_or(n, |b| b.0.saturating_sub(1))),
        };
        if best.as_ref().map_or(true, |b| b.0 > 0) || typical.is_some() {
            if let Some((w, set, len, resid)) = scan_fast(&fc, &s, lo, &mut hi, typical.is_some()) {
                best = Some((w, red.solution(&set[..len], &resid)));
                if typical.is_some() {
                    break;
                }
            }
        }
        if exhaustive && typical.is_some() {
            return match best {
                Some((weight, x)) => IsdOutcome { solution: Some(x), weight, iterations, rank, certified: true, ambiguous: false },
                None => failed(iterations, rank, true),
            };
        }
        if typical.is_none() {
            let w = best.as_ref().map_or(n, |b| b.0);
            let lighter = expected_lighter(n, w, rank);
            // unique solution, a lighter competitor is unlikely, or many are expected
            let ambiguous = !exhaustive
                && q.map_or(false, |q| binomial_below(n, q, w) + (-lighter).exp() < ISD_AMBIGUOUS_TOL);
            if exhaustive || lighter < ISD_STOP_TOL || ambiguous {
                let (weight, x) = best.expect("candidate recorded");
                return IsdOutcome { solution: Some(x), weight, iterations, rank, certified: true, ambiguous };
            }
        }
    }
    match (typical, best) {
        (Some(_), Some((w, x))) => IsdOutcome { solution: Some(x), weight: w, iterations, rank, certified: true, ambiguous: false },
        (Some(_), None) => failed(iterations, rank, false),
        (None, best) => {
            let (weight, x) = best.expect("at least one iteration ran");
            IsdOutcome { solution: Some(x), weight, iterations, rank, certified: false, ambiguous: false }
        }
    }
}

struct Trial {
    matrix: usize,
    error: bool,
    iterations: usize,
    certified: bool,
    ambiguous: bool,
    failed: bool,
}

/// Block error rate of the syndrome-sum codec for a binary pair source.
/// Trial `t` uses matrix `t mod matrix_seeds`; all randomness is derived
/// from `(seed, t)`, so the report does not depend on the thread count.
pub fn km_codec_run(pxy: &JointPmf, cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    if cfg.p != 2 || cfg.r != 1 {
        return Err(Error::arg("the syndrome-sum codec runs over Z2"));
    }
    if pxy.shape() != [2, 2] {
        return Err(Error::arg("the syndrome-sum codec needs a binary pair source"));
    }
    let t = pxy.table();
    let q1 = t[1] + t[2];
    let n = cfg.n;
    let mats: Vec<BitMatrix> = (0..cfg.matrix_seeds)
        .map(|i| random_hom_indexed(cfg, cfg.k, i as u64).and_then(|h| BitMatrix::from_hom(&h)))
        .collect::<Result<_>>()?;
    let ranks: Vec<usize> = mats.iter().map(BitMatrix::rank).collect();
    // decode the complement when 1 is the likelier symbol
    let flip_all = q1 > 0.5;
    let ones: Vec<u64> = {
        let mut v = vec![0u64; words(n)];
        (0..n).for_each(|i| flip(&mut v, i));
        v
    };
    let ones_syn: Vec<Vec<u64>> = mats.iter().map(|a| a.mul(&ones)).collect();
    let window = {
        let lo = ((q1 - cfg.epsilon) * n as f64).ceil().max(0.0) as usize;
        let hi = ((q1 + cfg.epsilon) * n as f64).floor().min(n as f64) as usize;
        (lo, hi)
    };
    let cum = [t[0], t[0] + t[1], t[0] + t[1] + t[2]];
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|ti| {
            let mi = ti % cfg.matrix_seeds;
            let a = &mats[mi];
            let mut rng = stream_rng(cfg.seed, STREAM_TRIAL, ti as u64);
            let mut x = vec![0u64; words(n)];
            let mut y = vec![0u64; words(n)];
            for i in 0..n {
                let u: f64 = rng.gen();
                let cell = cum.iter().position(|c| u < *c).unwrap_or(3);
                if cell >= 2 {
                    flip(&mut x, i);
                }
                if cell % 2 == 1 {
                    flip(&mut y, i);
                }
            }
            let z: Vec<u64> = x.iter().zip(&y).map(|(a, b)| a ^ b).collect();
            let s1 = a.mul(&x);
            let s2 = a.mul(&y);
            let mut s: Vec<u64> = s1.iter().zip(&s2).map(|(a, b)| a ^ b).collect();
            let out = match cfg.decoder {
                Decoder::Ml => {
                    if flip_all {
                        s.iter_mut().zip(&ones_syn[mi]).for_each(|(a, b)| *a ^= b);
                    }
                    let mut o = isd_decode(a, &s, cfg.isd_iterations, None, Some(q1.min(1.0 - q1)), &mut rng);
                    if flip_all {
                        if let Some(sol) = o.solution.as_mut() {
                            sol.iter_mut().zip(&ones).for_each(|(a, b)| *a ^= b);
                        }
                    }
                    o
                }
                Decoder::Typicality => isd_decode(a, &s, cfg.isd_iterations, Some(window), None, &mut rng),
            };
            let failed = out.solution.is_none();
            Trial {
                matrix: mi,
                error: out.ambiguous || out.solution.as_ref() != Some(&z),
                iterations: out.iterations,
                certified: out.certified,
                ambiguous: out.ambiguous,
                failed,
            }
        })
        .collect();

    let mut entries = Vec::with_capacity(cfg.matrix_seeds + 1);
    let errors = trials.iter().filter(|t| t.error).count() as u64;
    entries.push(ReportEntry::sampled("block error".into(), None, errors, cfg.trials as u64, None));
    for mi in 0..cfg.matrix_seeds {
        let mine: Vec<&Trial> = trials.iter().filter(|t| t.matrix == mi).collect();
        if mine.is_empty() {
            continue;
        }
        let e = mine.iter().filter(|t| t.error).count() as u64;
        entries.push(ReportEntry::sampled(format!("matrix {mi}"), None, e, mine.len() as u64, None));
    }
    let mut rep = SimReport::finish("km", SimMode::MonteCarlo, cfg.clone(), entries);
    let total = cfg.trials as f64;
    let full = ranks.iter().filter(|&&r| r == cfg.k.min(n)).count() as f64 / cfg.matrix_seeds as f64;
    let s = &mut rep.summary;
    s.insert("error_rate".into(), errors as f64 / total);
    s.insert("rate".into(), cfg.k as f64 / n as f64);
    s.insert("entropy_z".into(), h2(q1));
    s.insert("full_rank_fraction".into(), full);
    s.insert("mean_iterations".into(), trials.iter().map(|t| t.iterations as f64).sum::<f64>() / total);
    s.insert("uncertified_fraction".into(), trials.iter().filter(|t| !t.certified).count() as f64 / total);
    s.insert("ambiguous_fraction".into(), trials.iter().filter(|t| t.ambiguous).count() as f64 / total);
    s.insert("decoder_failures".into(), trials.iter().filter(|t| t.failed).count() as f64);
    if cfg.k >= n {
        rep.notes.push(format!("{:.3} of the matrices have full column rank", full));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(v: &[u8]) -> Vec<u64> {
        let mut out = vec![0u64; words(v.len())];
        for (i, b) in v.iter().enumerate() {
            if *b == 1 {
                flip(&mut out, i);
            }
        }
        out
    }

    #[test]
    fn hamming_code_corrects_one_error() {
        // parity checks of the [7,4] Hamming code: column j is j+1 in binary
        let mut h = BitMatrix::zeros(3, 7);
        for j in 0..7 {
            for i in 0..3 {
                if (j + 1) >> i & 1 == 1 {
                    h.set(i, j);
                }
            }
        }
        assert_eq!(h.rank(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for pos in 0..7 {
            let mut e = vec![0u8; 7];
            e[pos] = 1;
            let e = bits(&e);
            let out = isd_decode(&h, &h.mul(&e), 50, None, None, &mut rng);
            assert_eq!(out.solution, Some(e));
            assert_eq!(out.weight, 1);
        }
    }

    #[test]
    fn stopping_rule() {
        assert!(expected_lighter(200, 10, 88) < ISD_STOP_TOL);
        assert!(expected_lighter(200, 20, 88) > 1.0);
        assert_eq!(expected_lighter(4, 4, 0), 16.0);
        assert!((binomial_below(2, 0.5, 1) - 0.25).abs() < 1e-12);
        assert!((binomial_below(2, 0.5, 3) - 1.0).abs() < 1e-12);
        assert_eq!(binomial_below(10, 0.1, 0), 0.0);
    }
}
