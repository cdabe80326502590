//! Finite abelian groups in primary decomposition, their elements and
//! homomorphisms between powers of a primary cyclic group.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported group order.
pub const MAX_ORDER: u64 = 1 << 16;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as `(p, e)` pairs with increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The cyclic group Z_{p^r}, `p` prime and `r >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimaryCyclic {
    p: u64,
    r: u32,
}

impl PrimaryCyclic {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::arg(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(Error::arg("exponent must be at least 1"));
        }
        match p.checked_pow(r) {
            Some(m) if m <= MAX_ORDER => Ok(PrimaryCyclic { p, r }),
            _ => Err(Error::ResourceGuard(format!(
                "Z_{p}^{r} exceeds the supported order {MAX_ORDER}"
            ))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `p^r`.
    pub fn order(&self) -> u64 {
        self.p.pow(self.r)
    }
}

impl fmt::Display for PrimaryCyclic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z{}", self.order())
    }
}

/// A finite abelian group given as a direct sum of primary cyclic groups in
/// canonical order: non-decreasing prime, and non-increasing exponent among
/// factors with the same prime. The empty sum is the trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    factors: Vec<PrimaryCyclic>,
}

fn canonical_cmp(a: &PrimaryCyclic, b: &PrimaryCyclic) -> std::cmp::Ordering {
    a.p.cmp(&b.p).then(b.r.cmp(&a.r))
}

impl AbelianGroup {
    /// Builds a group from factors in any order; they are sorted canonically.
    pub fn new(mut factors: Vec<PrimaryCyclic>) -> Result<Self> {
        factors.sort_by(canonical_cmp);
        let mut order: u64 = 1;
        for f in &factors {
            order = order.saturating_mul(f.order());
            if order > MAX_ORDER {
                return Err(Error::ResourceGuard(format!(
                    "group order exceeds the supported maximum {MAX_ORDER}"
                )));
            }
        }
        Ok(AbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    /// Z_n in canonical primary form. `n = 1` gives the trivial group.
    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("Z_0 is not finite"));
        }
        if n > MAX_ORDER {
            return Err(Error::ResourceGuard(format!("Z_{n} exceeds {MAX_ORDER}")));
        }
        let factors = factorize(n)
            .into_iter()
            .map(|(p, e)| PrimaryCyclic::new(p, e))
            .collect::<Result<Vec<_>>>()?;
        AbelianGroup::new(factors)
    }

    pub fn factors(&self) -> &[PrimaryCyclic] {
        &self.factors
    }

    /// Number of primary cyclic factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|f| f.order()).product()
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.order()).collect()
    }

    /// Direct sum with another group. Returns the canonical group and, for
    /// each input factor of `self` then `other`, its position in the result.
    pub fn direct_sum(&self, other: &AbelianGroup) -> Result<(AbelianGroup, Vec<usize>)> {
        let all: Vec<PrimaryCyclic> = self.factors.iter().chain(&other.factors).copied().collect();
        let mut idx: Vec<usize> = (0..all.len()).collect();
        // stable sort keeps the inputs' relative order among equal factors
        idx.sort_by(|&a, &b| canonical_cmp(&all[a], &all[b]));
        let mut position = vec![0; all.len()];
        for (pos, &i) in idx.iter().enumerate() {
            position[i] = pos;
        }
        let group = AbelianGroup::new(idx.iter().map(|&i| all[i]).collect())?;
        Ok((group, position))
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.rank()];
        for j in (0..self.rank().saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.factors[j + 1].order() as usize;
        }
        s
    }

    pub fn element(&self, digits: Vec<u64>) -> Result<GroupElement> {
        if digits.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: digits.len() });
        }
        for (d, f) in digits.iter().zip(&self.factors) {
            if *d >= f.order() {
                return Err(Error::arg(format!("digit {d} out of range for {f}")));
            }
        }
        Ok(GroupElement { digits })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { digits: vec![0; self.rank()] }
    }

    fn check(&self, a: &GroupElement) -> Result<()> {
        if a.digits.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: a.digits.len() });
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let digits = a
            .digits
            .iter()
            .zip(&b.digits)
            .zip(&self.factors)
            .map(|((x, y), f)| (x + y) % f.order())
            .collect();
        Ok(GroupElement { digits })
    }

    pub fn negate(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        let digits = a
            .digits
            .iter()
            .zip(&self.factors)
            .map(|(x, f)| (f.order() - x) % f.order())
            .collect();
        Ok(GroupElement { digits })
    }

    /// Mixed-radix index of an element; the last factor varies fastest.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.digits.iter().zip(self.strides()).map(|(d, s)| *d as usize * s).sum()
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        GroupElement { digits: self.digits_at(index) }
    }

    pub fn digits_at(&self, mut index: usize) -> Vec<u64> {
        let mut digits = vec![0; self.rank()];
        for j in (0..self.rank()).rev() {
            let m = self.factors[j].order() as usize;
            digits[j] = (index % m) as u64;
            index /= m;
        }
        digits
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// Addition table on element indices, row-major.
    pub fn addition_table(&self) -> Vec<usize> {
        let n = self.order() as usize;
        let strides = self.strides();
        let digits: Vec<Vec<u64>> = (0..n).map(|i| self.digits_at(i)).collect();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let mut idx = 0;
                for j in 0..self.rank() {
                    let m = self.factors[j].order();
                    idx += ((digits[a][j] + digits[b][j]) % m) as usize * strides[j];
                }
                table[a * n + b] = idx;
            }
        }
        table
    }

    pub fn negation_table(&self) -> Vec<usize> {
        (0..self.order() as usize)
            .map(|i| {
                let e = self.element_at(i);
                self.index_of(&self.negate(&e).expect("same group"))
            })
            .collect()
    }

    /// Short name such as `Z4+Z2` or `Z2^3`; `Z1` for the trivial group.
    pub fn name(&self) -> String {
        if self.factors.is_empty() {
            return "Z1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let mut j = i;
            while j < self.factors.len() && self.factors[j] == self.factors[i] {
                j += 1;
            }
            if j - i > 1 {
                parts.push(format!("{}^{}", self.factors[i], j - i));
            } else {
                parts.push(self.factors[i].to_string());
            }
            i = j;
        }
        parts.join("+")
    }

    /// Parses names like `Z8`, `Z4+Z2`, `Z2^3`, `Z4xZ4`, `Z_6`. Each term is
    /// decomposed into primary factors.
    pub fn parse(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty group name".into()));
        }
        if cleaned.eq_ignore_ascii_case("trivial") {
            return Ok(AbelianGroup::trivial());
        }
        let mut factors = Vec::new();
        for term in cleaned.split(['+', 'x', '⊕', '*']) {
            let body = term
                .strip_prefix('Z')
                .or_else(|| term.strip_prefix('z'))
                .ok_or_else(|| Error::Parse(format!("bad group term `{term}`")))?;
            let body = body.strip_prefix('_').unwrap_or(body);
            let (base, power) = match body.split_once('^') {
                Some((b, e)) => (b, e),
                None => (body, "1"),
            };
            let n: u64 = base.parse().map_err(|_| Error::Parse(format!("bad modulus in `{term}`")))?;
            let k: usize = power.parse().map_err(|_| Error::Parse(format!("bad power in `{term}`")))?;
            for _ in 0..k {
                factors.extend_from_slice(AbelianGroup::cyclic(n)?.factors());
            }
        }
        AbelianGroup::new(factors)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// An element of an [`AbelianGroup`], one digit per primary factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    digits: Vec<u64>,
}

impl GroupElement {
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.iter().all(|d| *d < 10) {
            for d in &self.digits {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// Primary decomposition of Z_n. Errors for `n < 2`.
pub fn decompose_cyclic(n: u64) -> Result<Vec<PrimaryCyclic>> {
    if n < 2 {
        return Err(Error::arg(format!("cannot decompose Z_{n}: order must be at least 2")));
    }
    Ok(AbelianGroup::cyclic(n)?.factors.clone())
}

/// Image of `u` in Z_n under the canonical isomorphism onto the primary
/// decomposition of Z_n (one residue per factor, in canonical order).
pub fn cyclic_digits(n: u64, u: u64) -> Result<Vec<u64>> {
    let g = AbelianGroup::cyclic(n)?;
    Ok(g.factors().iter().map(|f| u % f.order()).collect())
}

/// Partitions of `e` into non-increasing parts, lexicographically decreasing
/// (so `[e]` first and `[1, 1, ..]` last).
fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, e, &mut Vec::new(), &mut out);
    out
}

/// Every isomorphism class of abelian group with order in `[min_order,
/// max_order]`, by increasing order and then by the exponent partitions of
/// each prime in lexicographic order.
pub fn enumerate_abelian_groups(min_order: u64, max_order: u64) -> Result<Vec<AbelianGroup>> {
    if min_order < 2 {
        return Err(Error::arg("minimum order must be at least 2"));
    }
    if min_order > max_order {
        return Err(Error::arg("minimum order exceeds maximum order"));
    }
    if max_order > MAX_ORDER {
        return Err(Error::ResourceGuard(format!("maximum order exceeds {MAX_ORDER}")));
    }
    let mut out = Vec::new();
    for n in min_order..=max_order {
        let per_prime: Vec<(u64, Vec<Vec<u32>>)> =
            factorize(n).into_iter().map(|(p, e)| (p, partitions(e))).collect();
        let mut choice = vec![0usize; per_prime.len()];
        loop {
            let mut factors = Vec::new();
            for (k, (p, parts)) in per_prime.iter().enumerate() {
                for &r in &parts[choice[k]] {
                    factors.push(PrimaryCyclic::new(*p, r)?);
                }
            }
            out.push(AbelianGroup::new(factors)?);
            // odometer, last prime fastest
            let mut advanced = false;
            let mut k = per_prime.len();
            while k > 0 {
                k -= 1;
                choice[k] += 1;
                if choice[k] < per_prime[k].1.len() {
                    advanced = true;
                    break;
                }
                choice[k] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(out)
}

/// `z mod p^i`, the label of the coset of `p^i Z_{p^r}` containing `z`.
pub fn coset_label(p: u64, r: u32, i: u32, z: u64) -> Result<u64> {
    let m = PrimaryCyclic::new(p, r)?.order();
    if i > r {
        return Err(Error::arg(format!("coset index {i} exceeds exponent {r}")));
    }
    if z >= m {
        return Err(Error::arg(format!("{z} is not an element of Z{m}")));
    }
    Ok(z % p.pow(i))
}

/// Largest `v <= r` with `p^v | x` in Z_{p^r}; zero has valuation `r`.
pub fn valuation(p: u64, r: u32, x: u64) -> u32 {
    let m = p.pow(r);
    let mut x = x % m;
    if x == 0 {
        return r;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Inverse of a unit modulo `m`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// All `x` in Z_{p^r} with `a x = b`, in increasing order.
pub fn solve_linear(p: u64, r: u32, a: u64, b: u64) -> Result<Vec<u64>> {
    let m = PrimaryCyclic::new(p, r)?.order();
    if a >= m || b >= m {
        return Err(Error::arg(format!("coefficients must lie in Z{m}")));
    }
    let i = valuation(p, r, a);
    let pi = p.pow(i);
    if b % pi != 0 {
        return Ok(Vec::new());
    }
    if i == r {
        // a = 0 and b = 0
        return Ok((0..m).collect());
    }
    let modulus = p.pow(r - i);
    let unit = (a / pi) % modulus;
    let inv = mod_inverse(unit, modulus).expect("unit after removing p-power");
    let x0 = ((b / pi) % modulus) * inv % modulus;
    Ok((0..pi).map(|t| x0 + t * modulus).collect())
}

/// Smallest `i` such that every value lies in `p^i Z_{p^r}`.
pub fn smallest_containing_subgroup(p: u64, r: u32, values: &[u64]) -> Result<u32> {
    let m = PrimaryCyclic::new(p, r)?.order();
    if values.is_empty() {
        return Err(Error::arg("no values given"));
    }
    if let Some(v) = values.iter().find(|v| **v >= m) {
        return Err(Error::arg(format!("{v} is not an element of Z{m}")));
    }
    Ok(values.iter().map(|&v| valuation(p, r, v)).min().unwrap_or(r))
}

/// A `rows x cols` matrix over Z_{p^r}, viewed as a homomorphism
/// Z_{p^r}^cols -> Z_{p^r}^rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomMatrix {
    p: u64,
    r: u32,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

/// Smith-type decomposition `P H Q = diag(p^v_1, .., p^v_t, 0, ..)`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Valuations of the diagonal, one per column; `r` marks a zero column.
    pub valuations: Vec<u32>,
    /// The column transform `Q`, `cols x cols`, row-major.
    pub q: Vec<u64>,
}

impl HomMatrix {
    pub fn new(p: u64, r: u32, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        let m = PrimaryCyclic::new(p, r)?.order();
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: entries.len() });
        }
        if entries.iter().any(|e| *e >= m) {
            return Err(Error::arg(format!("matrix entries must lie in Z{m}")));
        }
        Ok(HomMatrix { p, r, rows, cols, entries })
    }

    pub fn zeros(p: u64, r: u32, rows: usize, cols: usize) -> Result<Self> {
        HomMatrix::new(p, r, rows, cols, vec![0; rows * cols])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.r)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// `H x` for `x` in Z_{p^r}^cols.
    pub fn apply(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        let m = self.modulus();
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(0u64, |acc, (a, b)| (acc + a * (b % m)) % m))
            .collect())
    }

    /// Vertical concatenation `[self; other]`.
    pub fn stack(&self, other: &HomMatrix) -> Result<HomMatrix> {
        if self.p != other.p || self.r != other.r {
            return Err(Error::arg("cannot stack matrices over different rings"));
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        HomMatrix::new(self.p, self.r, self.rows + other.rows, self.cols, entries)
    }

    /// Rows `start..end` as a new matrix.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<HomMatrix> {
        if start > end || end > self.rows {
            return Err(Error::arg("row range out of bounds"));
        }
        HomMatrix::new(
            self.p,
            self.r,
            end - start,
            self.cols,
            self.entries[start * self.cols..end * self.cols].to_vec(),
        )
    }

    /// Diagonalizes the matrix over the chain ring Z_{p^r} by pivoting on an
    /// entry of minimal valuation, which divides every other entry.
    pub fn smith_form(&self) -> SmithForm {
        let (p, r, m) = (self.p, self.r, self.modulus());
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.entries.clone();
        let mut q: Vec<u64> = (0..cols * cols).map(|i| u64::from(i / cols == i % cols)).collect();
        let mut vals = vec![r; cols];
        let steps = rows.min(cols);
        for t in 0..steps {
            let mut best: Option<(u32, usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = valuation(p, r, a[i * cols + j]);
                    if v < r && best.map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
            let Some((v, bi, bj)) = best else { break };
            if bi != t {
                for j in 0..cols {
                    a.swap(bi * cols + j, t * cols + j);
                }
            }
            if bj != t {
                for i in 0..rows {
                    a.swap(i * cols + bj, i * cols + t);
                }
                for i in 0..cols {
                    q.swap(i * cols + bj, i * cols + t);
                }
            }
            // scale column t so the pivot is exactly p^v
            let pv = p.pow(v);
            let unit = (a[t * cols + t] / pv) % m;
            let inv = mod_inverse(unit, m).expect("unit part");
            for i in 0..rows {
                a[i * cols + t] = a[i * cols + t] * inv % m;
            }
            for i in 0..cols {
                q[i * cols + t] = q[i * cols + t] * inv % m;
            }
            // clear row t to the right with column operations
            for j in t + 1..cols {
                let e = a[t * cols + j];
                if e == 0 {
                    continue;
                }
                let f = (e / pv) % m;
                for i in 0..rows {
                    a[i * cols + j] = (a[i * cols + j] + (m - f) * a[i * cols + t] % m) % m;
                }
                for i in 0..cols {
                    q[i * cols + j] = (q[i * cols + j] + (m - f) * q[i * cols + t] % m) % m;
                }
            }
            // clear column t below with row operations (does not touch Q)
            for i in t + 1..rows {
                let e = a[i * cols + t];
                if e == 0 {
                    continue;
                }
                let f = (e / pv) % m;
                for j in 0..cols {
                    a[i * cols + j] = (a[i * cols + j] + (m - f) * a[t * cols + j] % m) % m;
                }
            }
            vals[t] = v;
        }
        SmithForm { valuations: vals, q }
    }

    /// Generators of the kernel with their additive orders' exponents: the
    /// kernel is the direct sum of the cyclic groups they generate.
    pub fn kernel_generators(&self) -> Vec<(Vec<u64>, u32)> {
        let sf = self.smith_form();
        let (p, r, m, cols) = (self.p, self.r, self.modulus(), self.cols);
        let mut gens = Vec::new();
        for (j, &v) in sf.valuations.iter().enumerate() {
            // x_j ranges over p^(r-v) Z, a cyclic group of order p^v
            if v == 0 {
                continue;
            }
            let scale = p.pow(r - v);
            let g: Vec<u64> = (0..cols).map(|i| sf.q[i * cols + j] * scale % m).collect();
            gens.push((g, v));
        }
        gens
    }

    /// `log_p` of the kernel size.
    pub fn kernel_log_size(&self) -> u32 {
        self.smith_form().valuations.iter().sum()
    }

    /// Every kernel element, guarded by `limit` on the kernel size.
    pub fn kernel_elements(&self, limit: u64) -> Result<Vec<Vec<u64>>> {
        let size = (self.p as f64).powi(self.kernel_log_size() as i32);
        if size > limit as f64 {
            return Err(Error::ResourceGuard(format!(
                "kernel has {size} elements, above the limit {limit}"
            )));
        }
        let m = self.modulus();
        let mut out = vec![vec![0u64; self.cols]];
        for (g, v) in self.kernel_generators() {
            let ord = self.p.pow(v);
            let mut next = Vec::with_capacity(out.len() * ord as usize);
            for base in &out {
                for t in 0..ord {
                    next.push(base.iter().zip(&g).map(|(b, x)| (b + t * x) % m).collect());
                }
            }
            out = next;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: u64, r: u32) -> PrimaryCyclic {
        PrimaryCyclic::new(p, r).unwrap()
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_cyclic(12).unwrap(), vec![pc(2, 2), pc(3, 1)]);
        assert_eq!(decompose_cyclic(8).unwrap(), vec![pc(2, 3)]);
        assert!(decompose_cyclic(1).is_err());
        assert!(decompose_cyclic(0).is_err());
    }

    #[test]
    fn class_counts() {
        let count = |n| enumerate_abelian_groups(n, n).unwrap().len();
        assert_eq!(count(8), 3);
        assert_eq!(count(16), 5);
        assert_eq!(count(36), 4);
        assert_eq!(count(7), 1);
        let eight: Vec<String> = enumerate_abelian_groups(8, 8).unwrap().iter().map(|g| g.name()).collect();
        assert_eq!(eight, ["Z8", "Z4+Z2", "Z2^3"]);
    }

    #[test]
    fn canonical_order_and_names() {
        let g = AbelianGroup::new(vec![pc(3, 1), pc(2, 1), pc(2, 2)]).unwrap();
        assert_eq!(g.factors(), &[pc(2, 2), pc(2, 1), pc(3, 1)]);
        assert_eq!(g.name(), "Z4+Z2+Z3");
        assert_eq!(AbelianGroup::parse("Z2^3").unwrap().name(), "Z2^3");
        assert_eq!(AbelianGroup::parse("Z4xZ4").unwrap().order(), 16);
        assert_eq!(AbelianGroup::parse("Z_6").unwrap().name(), "Z2+Z3");
        assert!(AbelianGroup::parse("Q8").is_err());
    }

    #[test]
    fn direct_sum_positions() {
        let (g, pos) = AbelianGroup::cyclic(2).unwrap().direct_sum(&AbelianGroup::cyclic(4).unwrap()).unwrap();
        assert_eq!(g.name(), "Z4+Z2");
        assert_eq!(pos, vec![1, 0]);
    }

    #[test]
    fn solve_linear_examples() {
        assert_eq!(solve_linear(2, 3, 2, 4).unwrap(), vec![2, 6]);
        assert!(solve_linear(2, 3, 2, 3).unwrap().is_empty());
        assert_eq!(solve_linear(2, 3, 1, 5).unwrap(), vec![5]);
        assert_eq!(solve_linear(2, 2, 0, 0).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn containing_subgroup_examples() {
        assert_eq!(smallest_containing_subgroup(2, 3, &[4]).unwrap(), 2);
        assert_eq!(smallest_containing_subgroup(2, 3, &[2, 4]).unwrap(), 1);
        assert_eq!(smallest_containing_subgroup(2, 3, &[0]).unwrap(), 3);
        assert!(smallest_containing_subgroup(2, 3, &[]).is_err());
    }

    #[test]
    fn coset_labels() {
        assert_eq!(coset_label(2, 3, 2, 6).unwrap(), 2);
        assert_eq!(coset_label(3, 2, 0, 7).unwrap(), 0);
        assert!(coset_label(2, 2, 3, 1).is_err());
    }

    #[test]
    fn kernel_of_small_matrix() {
        // [2 1] over Z4: x2 = -2 x1
        let h = HomMatrix::new(2, 2, 1, 2, vec![2, 1]).unwrap();
        let mut k = h.kernel_elements(1 << 10).unwrap();
        k.sort();
        let mut brute: Vec<Vec<u64>> = (0..16u64)
            .map(|i| vec![i / 4, i % 4])
            .filter(|x| h.apply(x).unwrap() == vec![0])
            .collect();
        brute.sort();
        assert_eq!(k, brute);
    }
}
