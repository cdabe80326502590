//! Embedding a reconstruction function `G(U, V)` into a finite abelian group
//! so that `G` is recovered from `s_u(U) + s_v(V)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{cyclic_digits, enumerate_abelian_groups, AbelianGroup, PrimaryCyclic};
use crate::prob::{AtomTable, JointPmf};

/// A function on `U x V` together with the mask of cells that carry
/// positive probability. Values on masked-out cells are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionTable {
    u_size: usize,
    v_size: usize,
    values: Vec<usize>,
    mask: Vec<bool>,
    image: Vec<usize>,
}

impl FunctionTable {
    pub fn new(u_size: usize, v_size: usize, values: Vec<usize>, mask: Vec<bool>) -> Result<Self> {
        let n = u_size * v_size;
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: values.len() });
        }
        if mask.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: mask.len() });
        }
        let mut image: Vec<usize> = values.iter().zip(&mask).filter(|(_, m)| **m).map(|(v, _)| *v).collect();
        if image.is_empty() {
            return Err(Error::arg("function has no positive-mass cells"));
        }
        image.sort_unstable();
        image.dedup();
        Ok(FunctionTable { u_size, v_size, values, mask, image })
    }

    /// Every cell active.
    pub fn full(u_size: usize, v_size: usize, values: Vec<usize>) -> Result<Self> {
        FunctionTable::new(u_size, v_size, values, vec![true; u_size * v_size])
    }

    pub fn from_fn(u_size: usize, v_size: usize, f: impl Fn(usize, usize) -> usize, mask: Vec<bool>) -> Result<Self> {
        let values = (0..u_size * v_size).map(|i| f(i / v_size, i % v_size)).collect();
        FunctionTable::new(u_size, v_size, values, mask)
    }

    /// Mask from the positive cells of a two-axis pmf.
    pub fn with_pmf_mask(u_size: usize, v_size: usize, values: Vec<usize>, puv: &JointPmf) -> Result<Self> {
        if puv.shape() != [u_size, v_size] {
            return Err(Error::arg("pmf shape does not match the function table"));
        }
        let mask = puv.table().iter().map(|p| *p > 0.0).collect();
        FunctionTable::new(u_size, v_size, values, mask)
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn v_size(&self) -> usize {
        self.v_size
    }

    pub fn get(&self, u: usize, v: usize) -> usize {
        self.values[u * self.v_size + v]
    }

    pub fn is_active(&self, u: usize, v: usize) -> bool {
        self.mask[u * self.v_size + v]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Distinct values on active cells, sorted.
    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_constant(&self) -> bool {
        self.image.len() == 1
    }
}

/// Injective maps `s_u`, `s_v` into a group (as element indices) and a
/// labelling `s_g` of group elements. `s_g[a]` is `None` for sums that no
/// active cell produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    group: AbelianGroup,
    s_u: Vec<usize>,
    s_v: Vec<usize>,
    s_g: Vec<Option<usize>>,
}

impl Embedding {
    pub fn new(group: AbelianGroup, s_u: Vec<usize>, s_v: Vec<usize>, s_g: Vec<Option<usize>>) -> Result<Self> {
        let n = group.order() as usize;
        if s_g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: s_g.len() });
        }
        for (name, map) in [("s_u", &s_u), ("s_v", &s_v)] {
            if map.iter().any(|a| *a >= n) {
                return Err(Error::arg(format!("{name} maps outside the group")));
            }
            let mut sorted = map.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != map.len() {
                return Err(Error::InconsistentEmbedding(format!("{name} is not injective")));
            }
        }
        Ok(Embedding { group, s_u, s_v, s_g })
    }

    /// Builds an embedding from explicit digit vectors; `s_g` is derived from
    /// `f`, failing when two active cells with different values collide.
    pub fn from_digits(group: AbelianGroup, s_u: &[Vec<u64>], s_v: &[Vec<u64>], f: &FunctionTable) -> Result<Self> {
        let idx = |d: &Vec<u64>| group.element(d.clone()).map(|e| group.index_of(&e));
        let su = s_u.iter().map(idx).collect::<Result<Vec<_>>>()?;
        let sv = s_v.iter().map(idx).collect::<Result<Vec<_>>>()?;
        let n = group.order() as usize;
        Embedding::new(group, su, sv, vec![None; n])?.relabel_for(f)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn s_u(&self) -> &[usize] {
        &self.s_u
    }

    pub fn s_v(&self) -> &[usize] {
        &self.s_v
    }

    pub fn s_g(&self) -> &[Option<usize>] {
        &self.s_g
    }

    /// Independent check that the embedding reproduces `f` on active cells.
    pub fn verify(&self, f: &FunctionTable) -> bool {
        if self.s_u.len() != f.u_size() || self.s_v.len() != f.v_size() {
            return false;
        }
        let g = &self.group;
        for u in 0..f.u_size() {
            for v in 0..f.v_size() {
                if !f.is_active(u, v) {
                    continue;
                }
                let sum = g.add(&g.element_at(self.s_u[u]), &g.element_at(self.s_v[v])).expect("same group");
                if self.s_g[g.index_of(&sum)] != Some(f.get(u, v)) {
                    return false;
                }
            }
        }
        let distinct = |m: &[usize]| {
            let mut s = m.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len() == m.len()
        };
        distinct(&self.s_u) && distinct(&self.s_v)
    }

    /// Replaces `s_g` by the labelling induced by `f`, provided the group sum
    /// determines `f` on active cells.
    pub fn relabel_for(&self, f: &FunctionTable) -> Result<Embedding> {
        if self.s_u.len() != f.u_size() || self.s_v.len() != f.v_size() {
            return Err(Error::InconsistentEmbedding("alphabet sizes differ from the function".into()));
        }
        let add = self.group.addition_table();
        let n = self.group.order() as usize;
        let mut s_g = vec![None; n];
        for u in 0..f.u_size() {
            for v in 0..f.v_size() {
                if !f.is_active(u, v) {
                    continue;
                }
                let s = add[self.s_u[u] * n + self.s_v[v]];
                match s_g[s] {
                    Some(l) if l != f.get(u, v) => {
                        return Err(Error::InconsistentEmbedding(format!(
                            "cells mapping to element {} carry different values",
                            self.group.element_at(s)
                        )))
                    }
                    _ => s_g[s] = Some(f.get(u, v)),
                }
            }
        }
        Ok(Embedding { group: self.group.clone(), s_u: self.s_u.clone(), s_v: self.s_v.clone(), s_g })
    }

    /// Every embedding obtained by reassigning the symbols of `U` and of `V`
    /// among the same images (`s_u ∘ σ`, `s_v ∘ τ`) that still determines
    /// `f`. The identity relabelling comes first.
    pub fn relabelings(&self, f: &FunctionTable, limit: usize) -> Result<Vec<Embedding>> {
        let count = factorial(self.s_u.len()).saturating_mul(factorial(self.s_v.len()));
        if count > limit as u128 {
            return Err(Error::ResourceGuard(format!("{count} relabellings exceed the limit {limit}")));
        }
        let pu = lex_permutations(self.s_u.len());
        let pv = lex_permutations(self.s_v.len());
        let mut out = Vec::new();
        for a in &pu {
            let s_u: Vec<usize> = a.iter().map(|&i| self.s_u[i]).collect();
            for b in &pv {
                let s_v: Vec<usize> = b.iter().map(|&i| self.s_v[i]).collect();
                let e = Embedding { group: self.group.clone(), s_u: s_u.clone(), s_v, s_g: self.s_g.clone() };
                if let Ok(e) = e.relabel_for(f) {
                    out.push(e);
                }
            }
        }
        Ok(out)
    }

    /// `s_g` extended to a total map by sending unrealized sums to the
    /// smallest realized label.
    pub fn s_g_total(&self) -> Vec<usize> {
        let fill = self.s_g.iter().flatten().min().copied().unwrap_or(0);
        self.s_g.iter().map(|l| l.unwrap_or(fill)).collect()
    }

    /// Digits of `s_u(u)` as strings, for reports.
    pub fn describe(&self) -> String {
        let show = |m: &[usize]| m.iter().map(|a| self.group.element_at(*a).to_string()).collect::<Vec<_>>().join(" ");
        format!("{}: u->[{}] v->[{}]", self.group, show(&self.s_u), show(&self.s_v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    First,
    All,
}

/// Backtracking search for embeddings of `f` into `group`.
#[derive(Clone, Debug)]
pub struct EmbeddingSearch<'a> {
    f: &'a FunctionTable,
    weights: Option<&'a JointPmf>,
    group: &'a AbelianGroup,
    mode: SearchMode,
    limit: usize,
    node_budget: u64,
}

impl<'a> EmbeddingSearch<'a> {
    pub fn new(f: &'a FunctionTable, group: &'a AbelianGroup) -> Self {
        EmbeddingSearch { f, weights: None, group, mode: SearchMode::First, limit: usize::MAX, node_budget: 50_000_000 }
    }

    /// Variables are assigned in order of decreasing marginal mass under `pmf`.
    pub fn weights(mut self, pmf: &'a JointPmf) -> Self {
        self.weights = Some(pmf);
        self
    }

    pub fn mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    /// Stop after this many embeddings.
    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit.max(1);
        self
    }

    pub fn node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn run(&self) -> Result<Vec<Embedding>> {
        let f = self.f;
        let n = self.group.order() as usize;
        if n < f.image().len() {
            return Err(Error::arg(format!(
                "group of order {n} is smaller than the {} values to reconstruct",
                f.image().len()
            )));
        }
        if f.u_size() > n || f.v_size() > n {
            return Ok(Vec::new());
        }
        let (mu, mv) = match self.weights {
            Some(pmf) => {
                if pmf.shape() != [f.u_size(), f.v_size()] {
                    return Err(Error::arg("weight pmf shape does not match the function table"));
                }
                let t = pmf.table();
                let mu: Vec<f64> = (0..f.u_size()).map(|u| t[u * f.v_size()..(u + 1) * f.v_size()].iter().sum()).collect();
                let mv: Vec<f64> = (0..f.v_size()).map(|v| (0..f.u_size()).map(|u| t[u * f.v_size() + v]).sum()).collect();
                (mu, mv)
            }
            None => {
                let deg = |u: usize, v: usize| f.is_active(u, v) as u32 as f64;
                let mu = (0..f.u_size()).map(|u| (0..f.v_size()).map(|v| deg(u, v)).sum()).collect();
                let mv = (0..f.v_size()).map(|v| (0..f.u_size()).map(|u| deg(u, v)).sum()).collect();
                (mu, mv)
            }
        };
        let active_u: Vec<bool> = (0..f.u_size()).map(|u| (0..f.v_size()).any(|v| f.is_active(u, v))).collect();
        let active_v: Vec<bool> = (0..f.v_size()).map(|v| (0..f.u_size()).any(|u| f.is_active(u, v))).collect();
        let mut vars: Vec<(bool, usize, f64)> = Vec::new();
        vars.extend((0..f.u_size()).filter(|&u| active_u[u]).map(|u| (false, u, mu[u])));
        vars.extend((0..f.v_size()).filter(|&v| active_v[v]).map(|v| (true, v, mv[v])));
        vars.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        let mut st = State {
            f,
            add: self.group.addition_table(),
            n,
            vars: vars.iter().map(|v| (v.0, v.1)).collect(),
            su: vec![None; f.u_size()],
            sv: vec![None; f.v_size()],
            used_u: vec![false; n],
            used_v: vec![false; n],
            sg: vec![None; n],
            sg_count: vec![0; n],
            found: Vec::new(),
            first_mode: self.mode == SearchMode::First,
            limit: self.limit,
            nodes: 0,
            budget: self.node_budget,
        };
        st.search(0)?;
        let mut out = Vec::with_capacity(st.found.len());
        for (su, sv, sg) in st.found {
            // symbols without active cells take the smallest free elements
            let complete = |m: Vec<Option<usize>>| {
                let mut used = vec![false; n];
                for a in m.iter().flatten() {
                    used[*a] = true;
                }
                let mut free = (0..n).filter(|a| !used[*a]).collect::<Vec<_>>().into_iter();
                m.into_iter().map(|a| a.unwrap_or_else(|| free.next().expect("enough elements"))).collect::<Vec<_>>()
            };
            out.push(Embedding { group: self.group.clone(), s_u: complete(su), s_v: complete(sv), s_g: sg });
        }
        Ok(out)
    }
}

type Found = (Vec<Option<usize>>, Vec<Option<usize>>, Vec<Option<usize>>);

struct State<'a> {
    f: &'a FunctionTable,
    add: Vec<usize>,
    n: usize,
    vars: Vec<(bool, usize)>,
    su: Vec<Option<usize>>,
    sv: Vec<Option<usize>>,
    used_u: Vec<bool>,
    used_v: Vec<bool>,
    sg: Vec<Option<usize>>,
    sg_count: Vec<u32>,
    found: Vec<Found>,
    first_mode: bool,
    limit: usize,
    nodes: u64,
    budget: u64,
}

impl State<'_> {
    fn done(&self) -> bool {
        (self.first_mode && !self.found.is_empty()) || self.found.len() >= self.limit
    }

    fn search(&mut self, depth: usize) -> Result<()> {
        if depth == self.vars.len() {
            self.found.push((self.su.clone(), self.sv.clone(), self.sg.clone()));
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceGuard(format!("embedding search exceeded {} nodes", self.budget)));
        }
        let (is_v, sym) = self.vars[depth];
        // translation symmetry: the first symbol of each side sits at 0
        let first_of_side = !self.vars[..depth].iter().any(|(s, _)| *s == is_v);
        let candidates = if first_of_side { 1 } else { self.n };
        for a in 0..candidates {
            let used = if is_v { self.used_v[a] } else { self.used_u[a] };
            if used {
                continue;
            }
            let mut touched: Vec<usize> = Vec::new();
            let mut ok = true;
            let partners = if is_v { self.f.u_size() } else { self.f.v_size() };
            for other in 0..partners {
                let (u, v) = if is_v { (other, sym) } else { (sym, other) };
                if !self.f.is_active(u, v) {
                    continue;
                }
                let b = if is_v { self.su[other] } else { self.sv[other] };
                let Some(b) = b else { continue };
                let s = self.add[a * self.n + b];
                let label = self.f.get(u, v);
                match self.sg[s] {
                    Some(l) if l != label => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => self.sg[s] = Some(label),
                }
                self.sg_count[s] += 1;
                touched.push(s);
            }
            if ok {
                if is_v {
                    self.sv[sym] = Some(a);
                    self.used_v[a] = true;
                } else {
                    self.su[sym] = Some(a);
                    self.used_u[a] = true;
                }
                self.search(depth + 1)?;
                if is_v {
                    self.sv[sym] = None;
                    self.used_v[a] = false;
                } else {
                    self.su[sym] = None;
                    self.used_u[a] = false;
                }
            }
            for s in touched {
                self.sg_count[s] -= 1;
                if self.sg_count[s] == 0 {
                    self.sg[s] = None;
                }
            }
            if self.done() {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Embeddings of `f` into `group`, modulo translations of `s_u` and `s_v`
/// (which leave every rate unchanged). `First` returns at most one.
pub fn find_embeddings(f: &FunctionTable, pmf: &JointPmf, group: &AbelianGroup, mode: SearchMode) -> Result<Vec<Embedding>> {
    EmbeddingSearch::new(f, group).weights(pmf).mode(mode).run()
}

/// The embedding of `(U, V)` itself into `Z_alpha + Z_beta`, with
/// `s_u(u) = (u, 0)`, `s_v(v) = (0, v)` and `s_g` returning the pair label
/// `u * beta + v`.
pub fn default_embedding(alpha: usize, beta: usize) -> Result<Embedding> {
    let f = FunctionTable::full(alpha, beta, (0..alpha * beta).collect())?;
    default_embedding_for(&f)
}

/// The default embedding with `s_g` composed with `f`.
pub fn default_embedding_for(f: &FunctionTable) -> Result<Embedding> {
    let (alpha, beta) = (f.u_size(), f.v_size());
    if alpha == 0 || beta == 0 {
        return Err(Error::arg("alphabets must be non-empty"));
    }
    let ga = AbelianGroup::cyclic(alpha as u64)?;
    let gb = AbelianGroup::cyclic(beta as u64)?;
    let (g, pos) = ga.direct_sum(&gb)?;
    let place = |digits: Vec<u64>, offset: usize| {
        let mut d = vec![0u64; g.rank()];
        for (k, x) in digits.into_iter().enumerate() {
            d[pos[offset + k]] = x;
        }
        g.index_of(&g.element(d).expect("digit in range"))
    };
    let s_u = (0..alpha).map(|u| cyclic_digits(alpha as u64, u as u64).map(|d| place(d, 0))).collect::<Result<Vec<_>>>()?;
    let s_v = (0..beta).map(|v| cyclic_digits(beta as u64, v as u64).map(|d| place(d, ga.rank()))).collect::<Result<Vec<_>>>()?;
    let n = g.order() as usize;
    Embedding::new(g, s_u, s_v, vec![None; n])?.relabel_for(f)
}

/// Every group class with order between the image size and `|U||V|`.
pub fn candidate_groups(f: &FunctionTable) -> Result<Vec<AbelianGroup>> {
    let lo = f.image().len() as u64;
    let hi = (f.u_size() * f.v_size()) as u64;
    let mut out = Vec::new();
    if lo <= 1 && f.u_size() <= 1 && f.v_size() <= 1 {
        out.push(AbelianGroup::trivial());
    }
    if hi >= 2 {
        out.extend(enumerate_abelian_groups(lo.max(2), hi)?);
    }
    Ok(out)
}

/// Column layout of a [`DigitView`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitColumns {
    pub x: usize,
    pub y: usize,
    pub u: usize,
    pub v: usize,
    pub u_digits: Vec<usize>,
    pub v_digits: Vec<usize>,
    pub z_digits: Vec<usize>,
}

/// The source and auxiliaries together with the digits of `s_u(U)`,
/// `s_v(V)` and their sum in each primary factor of the group.
#[derive(Clone, Debug)]
pub struct DigitView {
    atoms: AtomTable,
    cols: DigitColumns,
    factors: Vec<PrimaryCyclic>,
    embedding: Embedding,
}

/// Digit view of `pmf` over `(X, Y, U, V)` under `e`.
pub fn digit_view(e: &Embedding, pmf: &JointPmf) -> Result<DigitView> {
    if pmf.rank() != 4 {
        return Err(Error::arg("digit view needs a pmf over (X, Y, U, V)"));
    }
    let shape = pmf.shape();
    if shape[2] != e.s_u.len() {
        return Err(Error::DimensionMismatch { expected: e.s_u.len(), got: shape[2] });
    }
    if shape[3] != e.s_v.len() {
        return Err(Error::DimensionMismatch { expected: e.s_v.len(), got: shape[3] });
    }
    let base = pmf.to_atoms();
    let mut atoms = AtomTable::new(base.probs().to_vec());
    let mut push = |vals: &[u32], card: u32| atoms.push_column(vals.to_vec(), card);
    let x = push(base.column(0), base.card(0))?;
    let y = push(base.column(1), base.card(1))?;
    let u = push(base.column(2), base.card(2))?;
    let v = push(base.column(3), base.card(3))?;
    let g = e.group();
    let n = g.order() as usize;
    let add = g.addition_table();
    let digits: Vec<Vec<u64>> = (0..n).map(|i| g.digits_at(i)).collect();
    let mut cols = DigitColumns { x, y, u, v, u_digits: Vec::new(), v_digits: Vec::new(), z_digits: Vec::new() };
    let su: Vec<usize> = base.column(2).iter().map(|&a| e.s_u[a as usize]).collect();
    let sv: Vec<usize> = base.column(3).iter().map(|&b| e.s_v[b as usize]).collect();
    let sz: Vec<usize> = su.iter().zip(&sv).map(|(a, b)| add[a * n + b]).collect();
    for (j, f) in g.factors().iter().enumerate() {
        let card = f.order() as u32;
        let col = |elems: &[usize]| elems.iter().map(|&a| digits[a][j] as u32).collect::<Vec<u32>>();
        cols.u_digits.push(atoms.push_column(col(&su), card)?);
        cols.v_digits.push(atoms.push_column(col(&sv), card)?);
        cols.z_digits.push(atoms.push_column(col(&sz), card)?);
    }
    Ok(DigitView { atoms, cols, factors: g.factors().to_vec(), embedding: e.clone() })
}

impl DigitView {
    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn columns(&self) -> &DigitColumns {
        &self.cols
    }

    pub fn factors(&self) -> &[PrimaryCyclic] {
        &self.factors
    }

    /// Number of digits (primary factors).
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    /// Checks that `Z = U + V` holds digit-wise and that the reassembled sum
    /// maps through `s_g` on every positive-mass atom.
    pub fn reassembly_holds(&self) -> bool {
        let g = self.embedding.group();
        for a in 0..self.atoms.len() {
            let mut d = Vec::with_capacity(self.k());
            for (j, f) in self.factors.iter().enumerate() {
                let (uu, vv, zz) = (
                    self.atoms.column(self.cols.u_digits[j])[a] as u64,
                    self.atoms.column(self.cols.v_digits[j])[a] as u64,
                    self.atoms.column(self.cols.z_digits[j])[a] as u64,
                );
                if (uu + vv) % f.order() != zz {
                    return false;
                }
                d.push(zz);
            }
            let Ok(el) = g.element(d) else { return false };
            if self.embedding.s_g()[g.index_of(&el)].is_none() {
                return false;
            }
        }
        true
    }

    /// Dense joint pmf over `(X, Y, U_1..U_k, V_1..V_k, Z_1..Z_k)`, refused
    /// above `max_cells` cells.
    pub fn to_joint_pmf(&self, max_cells: usize) -> Result<JointPmf> {
        let mut order = vec![self.cols.x, self.cols.y];
        order.extend(&self.cols.u_digits);
        order.extend(&self.cols.v_digits);
        order.extend(&self.cols.z_digits);
        let shape: Vec<usize> = order.iter().map(|&c| self.atoms.card(c) as usize).collect();
        let cells = shape.iter().try_fold(1usize, |acc, s| acc.checked_mul(*s));
        match cells {
            Some(c) if c <= max_cells => {
                let mut table = vec![0.0; c];
                let mut index: HashMap<usize, f64> = HashMap::new();
                for a in 0..self.atoms.len() {
                    let mut flat = 0;
                    for (c, s) in order.iter().zip(&shape) {
                        flat = flat * s + self.atoms.column(*c)[a] as usize;
                    }
                    *index.entry(flat).or_default() += self.atoms.probs()[a];
                }
                for (k, p) in index {
                    table[k] = p;
                }
                JointPmf::from_shape(&shape, table)
            }
            _ => Err(Error::ResourceGuard(format!("dense digit view would exceed {max_cells} cells"))),
        }
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

/// Permutations of `0..n` in lexicographic order.
fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    while let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) {
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(a: usize, b: usize) -> JointPmf {
        JointPmf::from_shape(&[a, b], vec![1.0 / (a * b) as f64; a * b]).unwrap()
    }

    fn diff_mod4() -> FunctionTable {
        FunctionTable::full(4, 4, (0..16).map(|i| (i / 4 + 4 - i % 4) % 4).collect()).unwrap()
    }

    #[test]
    fn xor_into_z2() {
        let f = FunctionTable::full(2, 2, vec![0, 1, 1, 0]).unwrap();
        let g = AbelianGroup::cyclic(2).unwrap();
        let e = find_embeddings(&f, &uniform(2, 2), &g, SearchMode::All).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].s_u(), &[0, 1]);
        assert_eq!(e[0].s_v(), &[0, 1]);
        assert_eq!(e[0].s_g(), &[Some(0), Some(1)]);
    }

    #[test]
    fn difference_mod_4() {
        let f = diff_mod4();
        let z7 = AbelianGroup::cyclic(7).unwrap();
        let s_u = vec![0, 1, 2, 3];
        let s_v = vec![0, 6, 5, 4];
        let e = Embedding::new(z7.clone(), s_u, s_v, vec![None; 7]).unwrap().relabel_for(&f).unwrap();
        assert!(e.verify(&f));
        assert_eq!(e.s_g()[1], Some(1));
        assert_eq!(e.s_g()[4], Some(1));
        assert_eq!(e.s_g()[3], Some(3));
        assert_eq!(e.s_g()[6], Some(3));
        let found = find_embeddings(&f, &uniform(4, 4), &z7, SearchMode::First).unwrap();
        assert!(found[0].verify(&f));
        let z5 = AbelianGroup::cyclic(5).unwrap();
        assert!(find_embeddings(&f, &uniform(4, 4), &z5, SearchMode::All).unwrap().is_empty());
        // Z6 admits embeddings whose sums are not read as a difference, e.g.
        // s_u = (0, 1, 3, 4), s_v = (0, 4, 3, 1).
        let z6 = AbelianGroup::cyclic(6).unwrap();
        let six = find_embeddings(&f, &uniform(4, 4), &z6, SearchMode::All).unwrap();
        assert_eq!(six.len(), 8);
        assert!(six.iter().all(|e| e.verify(&f)));
        assert!(find_embeddings(&f, &uniform(4, 4), &AbelianGroup::cyclic(3).unwrap(), SearchMode::First).is_err());
    }

    #[test]
    fn binary_table_embedding() {
        let f = diff_mod4();
        let g = AbelianGroup::parse("Z2^3").unwrap();
        let bits = |s: &str| s.chars().map(|c| c.to_digit(2).unwrap() as u64).collect::<Vec<u64>>();
        let su: Vec<Vec<u64>> = ["000", "001", "100", "101"].iter().map(|s| bits(s)).collect();
        let sv: Vec<Vec<u64>> = ["000", "010", "100", "110"].iter().map(|s| bits(s)).collect();
        let e = Embedding::from_digits(g.clone(), &su, &sv, &f).unwrap();
        assert!(e.verify(&f));
        let label = |s: &str| e.s_g()[g.index_of(&g.element(bits(s)).unwrap())];
        for (s, l) in [("000", 0), ("011", 0), ("001", 1), ("110", 1), ("100", 2), ("111", 2), ("010", 3), ("101", 3)] {
            assert_eq!(label(s), Some(l), "{s}");
        }
    }

    #[test]
    fn default_embedding_shapes() {
        let e = default_embedding(2, 4).unwrap();
        assert_eq!(e.group().name(), "Z4+Z2");
        let f = FunctionTable::full(2, 4, (0..8).collect()).unwrap();
        assert!(e.verify(&f));
        let e1 = default_embedding(1, 3).unwrap();
        assert_eq!(e1.group().name(), "Z3");
    }

    #[test]
    fn candidates_for_binary_xor() {
        let f = FunctionTable::full(2, 2, vec![0, 1, 1, 0]).unwrap();
        let names: Vec<String> = candidate_groups(&f).unwrap().iter().map(|g| g.name()).collect();
        assert_eq!(names, ["Z2", "Z3", "Z4", "Z2^2"]);
    }

    #[test]
    fn digit_view_reassembles() {
        let pxy = uniform(4, 4);
        let pmf = crate::prob::compose_markov(
            &pxy,
            &crate::prob::ConditionalPmf::identity(4),
            &crate::prob::ConditionalPmf::identity(4),
        )
        .unwrap();
        let f = diff_mod4();
        let g = AbelianGroup::parse("Z4+Z4").unwrap();
        let e = find_embeddings(&f, &uniform(4, 4), &g, SearchMode::First).unwrap().remove(0);
        let view = digit_view(&e, &pmf).unwrap();
        assert_eq!(view.k(), 2);
        assert!(view.reassembly_holds());
        let dense = view.to_joint_pmf(1 << 20).unwrap();
        assert_eq!(dense.rank(), 8);
    }

    #[test]
    fn product_relabelings() {
        let f = diff_mod4();
        let g = AbelianGroup::parse("Z4+Z4").unwrap();
        let su: Vec<Vec<u64>> = (0..4).map(|x| vec![x, 0]).collect();
        let sv: Vec<Vec<u64>> = (0..4).map(|y| vec![0, y]).collect();
        let e = Embedding::from_digits(g, &su, &sv, &f).unwrap();
        let all = e.relabelings(&f, 1000).unwrap();
        assert_eq!(all.len(), 576);
        assert_eq!(all[0], e);
        assert!(all.iter().all(|x| x.verify(&f)));
        assert!(matches!(e.relabelings(&f, 100), Err(Error::ResourceGuard(_))));
    }
}
