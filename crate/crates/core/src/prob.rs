//! Finite joint distributions and information measures (in bits).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, PrimaryCyclic};

/// Tolerance on the total mass of an input table before it is normalized.
pub const NORMALIZE_TOL: f64 = 1e-9;
/// Tolerance used when checking Markov conditions.
pub const MARKOV_TOL: f64 = 1e-10;

/// Entropy of a (not necessarily normalized) list of masses, `0 log 0 = 0`.
pub fn entropy_of<I: IntoIterator<Item = f64>>(masses: I) -> f64 {
    let mut h = 0.0;
    for p in masses {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Binary entropy function.
pub fn h2(p: f64) -> f64 {
    entropy_of([p, 1.0 - p])
}

/// A finite alphabet with optional group structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alphabet {
    labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<AbelianGroup>,
}

impl Alphabet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::arg("alphabet must be non-empty"));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::arg("alphabet labels must be distinct"));
        }
        Ok(Alphabet { labels, group: None })
    }

    /// Labels `0..n-1`.
    pub fn indexed(n: usize) -> Self {
        Alphabet { labels: (0..n.max(1)).map(|i| i.to_string()).collect(), group: None }
    }

    /// The elements of `g` in index order, with the group attached.
    pub fn of_group(g: &AbelianGroup) -> Self {
        Alphabet { labels: g.elements().map(|e| e.to_string()).collect(), group: Some(g.clone()) }
    }

    /// Z_{p^r}, labelled `0..p^r-1`.
    pub fn cyclic(f: PrimaryCyclic) -> Self {
        let g = AbelianGroup::new(vec![f]).expect("single factor");
        Alphabet { labels: (0..f.order()).map(|i| i.to_string()).collect(), group: Some(g) }
    }

    pub fn with_group(mut self, g: AbelianGroup) -> Result<Self> {
        if g.order() as usize != self.labels.len() {
            return Err(Error::DimensionMismatch { expected: self.labels.len(), got: g.order() as usize });
        }
        self.group = Some(g);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn group(&self) -> Option<&AbelianGroup> {
        self.group.as_ref()
    }

    /// The factor when the attached group is primary cyclic.
    pub fn primary_factor(&self) -> Option<PrimaryCyclic> {
        match &self.group {
            Some(g) if g.rank() == 1 => Some(g.factors()[0]),
            _ => None,
        }
    }
}

fn check_masses(table: &mut [f64]) -> Result<()> {
    if let Some(x) = table.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::arg(format!("probability mass {x} is negative or not finite")));
    }
    let total: f64 = table.iter().sum();
    if (total - 1.0).abs() > NORMALIZE_TOL {
        return Err(Error::arg(format!("masses sum to {total}, not 1")));
    }
    for x in table.iter_mut() {
        *x /= total;
    }
    Ok(())
}

/// A dense joint pmf over a product of alphabets, row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    table: Vec<f64>,
}

impl JointPmf {
    /// Validates and normalizes `table`. The masses must be non-negative and
    /// sum to one within [`NORMALIZE_TOL`].
    pub fn new(axes: Vec<Alphabet>, mut table: Vec<f64>) -> Result<Self> {
        let size: usize = axes.iter().map(|a| a.len()).product();
        if table.len() != size {
            return Err(Error::DimensionMismatch { expected: size, got: table.len() });
        }
        check_masses(&mut table)?;
        Ok(JointPmf { axes, table })
    }

    /// Indexed alphabets of the given sizes.
    pub fn from_shape(shape: &[usize], table: Vec<f64>) -> Result<Self> {
        JointPmf::new(shape.iter().map(|&n| Alphabet::indexed(n)).collect(), table)
    }

    /// A two-dimensional pmf from its rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::arg("ragged probability matrix"));
        }
        JointPmf::from_shape(&[rows.len(), cols], rows.concat())
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Alphabet {
        &self.axes[i]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (i, a) in idx.iter().zip(&self.axes) {
            flat = flat * a.len() + i;
        }
        flat
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank()];
        for k in (0..self.rank()).rev() {
            let n = self.axes[k].len();
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn prob(&self, idx: &[usize]) -> f64 {
        self.table[self.flat_index(idx)]
    }

    /// Attaches a group to an axis whose size equals the group order.
    pub fn attach_group(mut self, axis: usize, g: AbelianGroup) -> Result<Self> {
        self.check_axes(&[axis])?;
        self.axes[axis] = self.axes[axis].clone().with_group(g)?;
        Ok(self)
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for (k, &a) in axes.iter().enumerate() {
            if a >= self.rank() {
                return Err(Error::arg(format!("axis {a} out of range for rank {}", self.rank())));
            }
            if axes[..k].contains(&a) {
                return Err(Error::arg(format!("axis {a} repeated")));
            }
        }
        Ok(())
    }

    /// Marginal over `axes`, in the given order.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        self.check_axes(axes)?;
        let table = self.marginal_table(axes);
        Ok(JointPmf { axes: axes.iter().map(|&a| self.axes[a].clone()).collect(), table })
    }

    fn marginal_table(&self, axes: &[usize]) -> Vec<f64> {
        let size: usize = axes.iter().map(|&a| self.axes[a].len()).product();
        let mut out = vec![0.0; size];
        let mut idx = vec![0usize; self.rank()];
        for &p in &self.table {
            if p > 0.0 {
                let mut k = 0;
                for &a in axes {
                    k = k * self.axes[a].len() + idx[a];
                }
                out[k] += p;
            }
            for j in (0..self.rank()).rev() {
                idx[j] += 1;
                if idx[j] < self.axes[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
        out
    }

    /// Joint entropy of the listed axes.
    pub fn entropy(&self, axes: &[usize]) -> Result<f64> {
        self.check_axes(axes)?;
        Ok(entropy_of(self.marginal_table(axes)))
    }

    /// `H(target | given)`.
    pub fn conditional_entropy(&self, target: &[usize], given: &[usize]) -> Result<f64> {
        let both: Vec<usize> = target.iter().chain(given).copied().collect();
        self.check_axes(&both)?;
        Ok(entropy_of(self.marginal_table(&both)) - entropy_of(self.marginal_table(given)))
    }

    /// `I(a; b | given)`.
    pub fn mutual_information(&self, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
        let all: Vec<usize> = a.iter().chain(b).chain(given).copied().collect();
        self.check_axes(&all)?;
        let h = |axes: &[usize]| entropy_of(self.marginal_table(axes));
        let ag: Vec<usize> = a.iter().chain(given).copied().collect();
        let bg: Vec<usize> = b.iter().chain(given).copied().collect();
        Ok((h(&ag) + h(&bg) - h(&all) - h(given)).max(0.0))
    }

    fn cyclic_axis(&self, axis: usize) -> Result<PrimaryCyclic> {
        self.check_axes(&[axis])?;
        self.axes[axis]
            .primary_factor()
            .ok_or_else(|| Error::arg(format!("axis {axis} does not carry a primary cyclic group")))
    }

    /// Replaces a Z_{p^r} axis by its coset label `[Z]_i = Z mod p^i`.
    pub fn quotient(&self, axis: usize, i: u32) -> Result<JointPmf> {
        let f = self.cyclic_axis(axis)?;
        if i > f.r() {
            return Err(Error::arg(format!("coset index {i} exceeds exponent {}", f.r())));
        }
        let m = f.p().pow(i) as usize;
        let new_axis = if i == 0 {
            Alphabet::indexed(1)
        } else {
            Alphabet::cyclic(PrimaryCyclic::new(f.p(), i)?)
        };
        let mut axes = self.axes.clone();
        axes[axis] = new_axis;
        let size: usize = axes.iter().map(|a| a.len()).product();
        let mut table = vec![0.0; size];
        for (flat, &p) in self.table.iter().enumerate() {
            let mut idx = self.unravel(flat);
            idx[axis] %= m;
            let mut k = 0;
            for (v, a) in idx.iter().zip(&axes) {
                k = k * a.len() + v;
            }
            table[k] += p;
        }
        Ok(JointPmf { axes, table })
    }

    /// Appends the axis `a + b` computed in the group shared by both axes.
    pub fn with_sum_axis(&self, a: usize, b: usize) -> Result<JointPmf> {
        self.check_axes(&[a, b])?;
        let ga = self.axes[a].group().ok_or_else(|| Error::arg(format!("axis {a} has no group")))?;
        let gb = self.axes[b].group().ok_or_else(|| Error::arg(format!("axis {b} has no group")))?;
        if ga != gb {
            return Err(Error::arg("summed axes must carry the same group"));
        }
        let add = ga.addition_table();
        let n = ga.order() as usize;
        let mut axes = self.axes.clone();
        axes.push(Alphabet::of_group(ga));
        let mut table = vec![0.0; self.table.len() * n];
        for (flat, &p) in self.table.iter().enumerate() {
            let idx = self.unravel(flat);
            table[flat * n + add[idx[a] * n + idx[b]]] = p;
        }
        Ok(JointPmf { axes, table })
    }

    /// Positive-mass cells as an [`AtomTable`], one column per axis.
    pub fn to_atoms(&self) -> AtomTable {
        let mut probs = Vec::new();
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); self.rank()];
        for (flat, &p) in self.table.iter().enumerate() {
            if p > 0.0 {
                probs.push(p);
                for (c, v) in self.unravel(flat).into_iter().enumerate() {
                    cols[c].push(v as u32);
                }
            }
        }
        let cards = self.axes.iter().map(|a| a.len() as u32).collect();
        AtomTable { probs, cols, cards }
    }
}

/// `H(axes)`.
pub fn entropy(pmf: &JointPmf, axes: &[usize]) -> Result<f64> {
    pmf.entropy(axes)
}

/// `H(target | given)`.
pub fn conditional_entropy(pmf: &JointPmf, target: &[usize], given: &[usize]) -> Result<f64> {
    pmf.conditional_entropy(target, given)
}

/// `I(a; b | given)`.
pub fn mutual_information(pmf: &JointPmf, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
    pmf.mutual_information(a, b, given)
}

/// `[Z]_i` in place of axis `axis`.
pub fn quotient_rv(pmf: &JointPmf, axis: usize, i: u32) -> Result<JointPmf> {
    pmf.quotient(axis, i)
}

/// A random variable on Z_{p^r} is non-redundant when it puts mass outside
/// the subgroup `pZ_{p^r}`.
pub fn is_nonredundant(pmf: &JointPmf, axis: usize) -> Result<bool> {
    let f = pmf.cyclic_axis(axis)?;
    let marginal = pmf.marginal_table(&[axis]);
    Ok(marginal.iter().enumerate().any(|(x, &p)| p > 0.0 && x as u64 % f.p() != 0))
}

/// Appends `Z = U + V`.
pub fn sum_rv(pmf: &JointPmf, u: usize, v: usize) -> Result<JointPmf> {
    pmf.with_sum_axis(u, v)
}

/// A conditional pmf `P(to | from)` stored as one row per `from` value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPmf {
    from: Alphabet,
    to: Alphabet,
    table: Vec<f64>,
}

impl ConditionalPmf {
    /// Every row must be a distribution (normalized within [`NORMALIZE_TOL`]).
    pub fn new(from: Alphabet, to: Alphabet, mut table: Vec<f64>) -> Result<Self> {
        let size = from.len() * to.len();
        if table.len() != size {
            return Err(Error::DimensionMismatch { expected: size, got: table.len() });
        }
        for row in table.chunks_mut(to.len()) {
            check_masses(row)?;
        }
        Ok(ConditionalPmf { from, to, table })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::arg("ragged channel matrix"));
        }
        ConditionalPmf::new(Alphabet::indexed(rows.len()), Alphabet::indexed(cols), rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let table = (0..n * n).map(|i| if i / n == i % n { 1.0 } else { 0.0 }).collect();
        ConditionalPmf { from: Alphabet::indexed(n), to: Alphabet::indexed(n), table }
    }

    pub fn from_alphabet(&self) -> &Alphabet {
        &self.from
    }

    pub fn to_alphabet(&self) -> &Alphabet {
        &self.to
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.table[from * self.to.len() + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.table[from * self.to.len()..(from + 1) * self.to.len()]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.to.len()).map(|r| r.to_vec()).collect()
    }

    /// Rows whose conditioning value has zero mass under `marginal`.
    pub fn unused_rows(&self, marginal: &[f64]) -> Vec<usize> {
        marginal.iter().enumerate().filter(|(_, p)| **p == 0.0).map(|(i, _)| i).collect()
    }
}

/// Joint pmf of `(X, Y, U, V)` for `U - X - Y - V`. The two Markov
/// conditions are checked on the result.
pub fn compose_markov(pxy: &JointPmf, pu_x: &ConditionalPmf, pv_y: &ConditionalPmf) -> Result<JointPmf> {
    if pxy.rank() != 2 {
        return Err(Error::arg("source pmf must have exactly two axes"));
    }
    let (nx, ny) = (pxy.axis(0).len(), pxy.axis(1).len());
    if pu_x.from.len() != nx {
        return Err(Error::DimensionMismatch { expected: nx, got: pu_x.from.len() });
    }
    if pv_y.from.len() != ny {
        return Err(Error::DimensionMismatch { expected: ny, got: pv_y.from.len() });
    }
    let (nu, nv) = (pu_x.to.len(), pv_y.to.len());
    let mut table = vec![0.0; nx * ny * nu * nv];
    for x in 0..nx {
        for y in 0..ny {
            let pxy_ = pxy.prob(&[x, y]);
            if pxy_ == 0.0 {
                continue;
            }
            for u in 0..nu {
                let a = pxy_ * pu_x.get(x, u);
                for v in 0..nv {
                    table[((x * ny + y) * nu + u) * nv + v] = a * pv_y.get(y, v);
                }
            }
        }
    }
    let axes = vec![pxy.axis(0).clone(), pxy.axis(1).clone(), pu_x.to.clone(), pv_y.to.clone()];
    let joint = JointPmf::new(axes, table)?;
    let m1 = joint.mutual_information(&[2], &[1, 3], &[0])?;
    let m2 = joint.mutual_information(&[3], &[0, 2], &[1])?;
    if m1 > MARKOV_TOL || m2 > MARKOV_TOL {
        return Err(Error::Infeasible(format!(
            "Markov conditions violated: I(U;YV|X)={m1:e}, I(V;XU|Y)={m2:e}"
        )));
    }
    Ok(joint)
}

/// Column selector for [`AtomTable`] entropies: the value
/// `(((v + shift) % wrap) / div) % modulo` of column `col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sel {
    pub col: usize,
    pub shift: u32,
    pub wrap: u32,
    pub div: u32,
    pub modulo: u32,
}

impl Sel {
    pub fn new(col: usize, card: u32) -> Self {
        Sel { col, shift: 0, wrap: card, div: 1, modulo: card }
    }
}

/// Sparse joint distribution: a list of weighted outcomes, each assigning a
/// value to every column. Used for digit-level views whose dense tables
/// would be large.
#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    probs: Vec<f64>,
    cols: Vec<Vec<u32>>,
    cards: Vec<u32>,
}

impl AtomTable {
    pub fn new(probs: Vec<f64>) -> Self {
        AtomTable { probs, cols: Vec::new(), cards: Vec::new() }
    }

    pub fn push_column(&mut self, values: Vec<u32>, card: u32) -> Result<usize> {
        if values.len() != self.probs.len() {
            return Err(Error::DimensionMismatch { expected: self.probs.len(), got: values.len() });
        }
        if values.iter().any(|v| *v >= card) {
            return Err(Error::arg("column value exceeds its cardinality"));
        }
        self.cols.push(values);
        self.cards.push(card);
        Ok(self.cols.len() - 1)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn column(&self, c: usize) -> &[u32] {
        &self.cols[c]
    }

    pub fn card(&self, c: usize) -> u32 {
        self.cards[c]
    }

    pub fn full(&self, c: usize) -> Sel {
        Sel::new(c, self.cards[c])
    }

    fn value(&self, s: &Sel, atom: usize) -> u32 {
        (((self.cols[s.col][atom] + s.shift) % s.wrap) / s.div) % s.modulo
    }

    /// Joint entropy of the selected (derived) columns.
    pub fn entropy(&self, sels: &[Sel]) -> f64 {
        let n = self.probs.len();
        if sels.is_empty() || n <= 1 {
            return 0.0;
        }
        let mut radix: u64 = 1;
        let mut fits = true;
        for s in sels {
            match radix.checked_mul(s.modulo as u64) {
                Some(v) => radix = v,
                None => fits = false,
            }
        }
        if fits {
            let mut keyed: Vec<(u64, f64)> = (0..n)
                .map(|a| {
                    let mut k = 0u64;
                    for s in sels {
                        k = k * s.modulo as u64 + self.value(s, a) as u64;
                    }
                    (k, self.probs[a])
                })
                .collect();
            keyed.sort_unstable_by_key(|e| e.0);
            let mut h = 0.0;
            let mut i = 0;
            while i < n {
                let mut mass = 0.0;
                let k = keyed[i].0;
                while i < n && keyed[i].0 == k {
                    mass += keyed[i].1;
                    i += 1;
                }
                if mass > 0.0 {
                    h -= mass * mass.log2();
                }
            }
            h
        } else {
            let mut order: Vec<usize> = (0..n).collect();
            let key = |a: usize| sels.iter().map(|s| self.value(s, a)).collect::<Vec<u32>>();
            order.sort_by_key(|&a| key(a));
            let mut h = 0.0;
            let mut i = 0;
            while i < n {
                let k = key(order[i]);
                let mut mass = 0.0;
                while i < n && key(order[i]) == k {
                    mass += self.probs[order[i]];
                    i += 1;
                }
                if mass > 0.0 {
                    h -= mass * mass.log2();
                }
            }
            h
        }
    }

    /// `H(target | given)`.
    pub fn conditional_entropy(&self, target: &[Sel], given: &[Sel]) -> f64 {
        let both: Vec<Sel> = target.iter().chain(given).copied().collect();
        (self.entropy(&both) - self.entropy(given)).max(0.0)
    }

    /// Distinct values of a column among positive-mass atoms, sorted.
    pub fn support(&self, c: usize) -> Vec<u32> {
        let mut s: Vec<u32> =
            self.cols[c].iter().zip(&self.probs).filter(|(_, p)| **p > 0.0).map(|(v, _)| *v).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, r: u32) -> AbelianGroup {
        AbelianGroup::new(vec![PrimaryCyclic::new(p, r).unwrap()]).unwrap()
    }

    #[test]
    fn quotient_of_z8() {
        let probs: Vec<f64> = (1..=8).map(|i| i as f64 / 36.0).collect();
        let pmf = JointPmf::from_shape(&[8], probs.clone()).unwrap().attach_group(0, z(2, 3)).unwrap();
        let q = quotient_rv(&pmf, 0, 2).unwrap();
        for k in 0..4 {
            assert!((q.table()[k] - probs[k] - probs[k + 4]).abs() < 1e-15);
        }
    }

    #[test]
    fn nonredundancy() {
        let mk = |t: Vec<f64>, p, r| JointPmf::from_shape(&[t.len()], t).unwrap().attach_group(0, z(p, r)).unwrap();
        assert!(!is_nonredundant(&mk(vec![0.5, 0.0, 0.5, 0.0], 2, 2), 0).unwrap());
        assert!(is_nonredundant(&mk(vec![0.5, 0.5, 0.0, 0.0], 2, 2), 0).unwrap());
        assert!(!is_nonredundant(&mk(vec![1.0, 0.0], 2, 1), 0).unwrap());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(JointPmf::from_shape(&[2], vec![0.5, 0.4]).is_err());
        assert!(JointPmf::from_shape(&[2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::from_shape(&[3], vec![0.5, 0.5]).is_err());
        let ok = JointPmf::from_shape(&[2], vec![0.5, 0.5 + 1e-10]).unwrap();
        assert!((ok.table().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_basics() {
        let pmf = JointPmf::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert!((pmf.entropy(&[0, 1]).unwrap() - 2.0).abs() < 1e-12);
        assert!(pmf.mutual_information(&[0], &[1], &[]).unwrap().abs() < 1e-12);
        assert!(pmf.entropy(&[0, 0]).is_err());
    }

    #[test]
    fn atoms_match_dense() {
        let pmf = JointPmf::from_rows(&[vec![0.1, 0.2, 0.05], vec![0.3, 0.0, 0.35]]).unwrap();
        let atoms = pmf.to_atoms();
        let (a, b) = (atoms.full(0), atoms.full(1));
        assert!((atoms.entropy(&[a, b]) - pmf.entropy(&[0, 1]).unwrap()).abs() < 1e-12);
        assert!((atoms.conditional_entropy(&[b], &[a]) - pmf.conditional_entropy(&[1], &[0]).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn markov_composition() {
        let pxy = JointPmf::from_rows(&[vec![0.4, 0.1], vec![0.2, 0.3]]).unwrap();
        let c = ConditionalPmf::from_rows(&[vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
        let j = compose_markov(&pxy, &c, &ConditionalPmf::identity(2)).unwrap();
        let back = j.marginal(&[0, 1]).unwrap();
        for (a, b) in back.table().iter().zip(pxy.table()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
