//! Rates of good channel and source codes built from group codes over
//! Z_{p^r}.

use crate::error::{Error, Result};
use crate::group::{valuation, PrimaryCyclic};
use crate::prob::{is_nonredundant, AtomTable, JointPmf, Sel};

/// How a digit was relabelled before its rate was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rooting {
    /// Support lies in `offset + p^shift Z_{p^r}`.
    pub shift: u32,
    pub offset: u32,
}

impl Rooting {
    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.offset == 0
    }

    /// Remaining exponent after re-rooting onto `Z_{p^(r - shift)}`.
    pub fn exponent(&self, f: PrimaryCyclic) -> u32 {
        f.r() - self.shift
    }
}

/// Smallest coset of a subgroup `p^s Z_{p^r}` containing the support of
/// column `col`.
pub fn rooting_of(atoms: &AtomTable, col: usize, f: PrimaryCyclic) -> Rooting {
    let support = atoms.support(col);
    let m = f.order();
    let Some(&z0) = support.first() else {
        return Rooting { shift: f.r(), offset: 0 };
    };
    let shift = support
        .iter()
        .map(|&z| valuation(f.p(), f.r(), (z as u64 + m - z0 as u64) % m))
        .min()
        .unwrap_or(f.r());
    if shift == 0 {
        // already spans more than one coset of pZ; no relabelling needed
        return Rooting { shift: 0, offset: 0 };
    }
    Rooting { shift, offset: z0 }
}

/// Selector for `[Z']_i` where `Z'` is the re-rooted column.
fn rooted_sel(col: usize, f: PrimaryCyclic, root: Rooting, i: u32) -> Sel {
    let m = f.order() as u32;
    let div = f.p().pow(root.shift) as u32;
    Sel { col, shift: (m - root.offset) % m, wrap: m, div, modulo: f.p().pow(i) as u32 }
}

/// `max_{0 <= i < r} r/(r-i) (H(Z|S) - H([Z]_i|S))` with `Z` re-rooted by
/// `root`. A constant digit costs nothing.
pub fn channel_rate_rooted(atoms: &AtomTable, col: usize, f: PrimaryCyclic, root: Rooting, side: &[Sel]) -> f64 {
    let r = root.exponent(f);
    if r == 0 {
        return 0.0;
    }
    let h_side = atoms.entropy(side);
    let cond = |i: u32| {
        let mut sels = side.to_vec();
        sels.push(rooted_sel(col, f, root, i));
        (atoms.entropy(&sels) - h_side).max(0.0)
    };
    let hz = cond(r);
    let mut best = hz;
    for i in 1..r {
        let v = r as f64 / (r - i) as f64 * (hz - cond(i));
        if v > best {
            best = v;
        }
    }
    best.max(0.0)
}

/// `min(H(U|X), r |H(U|X) - log p^(r-1)|^+)` with `U` re-rooted by `root`.
pub fn source_rate_rooted(atoms: &AtomTable, col: usize, f: PrimaryCyclic, root: Rooting, given: &[Sel]) -> f64 {
    let r = root.exponent(f);
    if r == 0 {
        return 0.0;
    }
    let h = atoms.conditional_entropy(&[rooted_sel(col, f, root, r)], given);
    source_rate_from_entropy(h, f.p(), r)
}

/// The source-code rate for a given conditional entropy on Z_{p^r}.
pub fn source_rate_from_entropy(h: f64, p: u64, r: u32) -> f64 {
    let excess = (h - (r - 1) as f64 * (p as f64).log2()).max(0.0);
    h.min(r as f64 * excess)
}

/// Channel-code rate of a good channel code over Z_{p^r} for `Z` with side
/// information `S` (the listed axes). `Z` must be non-redundant.
pub fn channel_code_rate(pmf: &JointPmf, z: usize, side: &[usize]) -> Result<f64> {
    let f = nonredundant_axis(pmf, z)?;
    let mut axes = vec![z];
    axes.extend_from_slice(side);
    let m = pmf.marginal(&axes)?;
    let atoms = m.to_atoms();
    let side_sels: Vec<Sel> = (1..axes.len()).map(|c| atoms.full(c)).collect();
    Ok(channel_rate_rooted(&atoms, 0, f, Rooting { shift: 0, offset: 0 }, &side_sels))
}

/// Source-code rate of a good source code over Z_{p^r} for `U` given `X`
/// (the listed axes). `U` must be non-redundant.
pub fn source_code_rate(pmf: &JointPmf, u: usize, x: &[usize]) -> Result<f64> {
    let f = nonredundant_axis(pmf, u)?;
    let h = pmf.conditional_entropy(&[u], x)?;
    Ok(source_rate_from_entropy(h, f.p(), f.r()))
}

fn nonredundant_axis(pmf: &JointPmf, axis: usize) -> Result<PrimaryCyclic> {
    if axis >= pmf.rank() {
        return Err(Error::arg(format!("axis {axis} out of range")));
    }
    let f = pmf
        .axis(axis)
        .primary_factor()
        .ok_or_else(|| Error::arg(format!("axis {axis} does not carry a primary cyclic group")))?;
    if !is_nonredundant(pmf, axis)? {
        return Err(Error::Redundant { modulus: f.order(), subgroup: format!("{}Z{}", f.p(), f.order()) });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;

    fn on_z(p: u64, r: u32, t: Vec<f64>) -> JointPmf {
        let g = AbelianGroup::new(vec![PrimaryCyclic::new(p, r).unwrap()]).unwrap();
        JointPmf::from_shape(&[t.len()], t).unwrap().attach_group(0, g).unwrap()
    }

    #[test]
    fn channel_examples() {
        let uniform = on_z(2, 3, vec![0.125; 8]);
        assert!((channel_code_rate(&uniform, 0, &[]).unwrap() - 3.0).abs() < 1e-12);
        let skew = on_z(2, 2, vec![0.5, 0.0, 0.25, 0.25]);
        assert!((channel_code_rate(&skew, 0, &[]).unwrap() - 1.5).abs() < 1e-12);
        let redundant = on_z(2, 2, vec![0.5, 0.0, 0.5, 0.0]);
        assert!(matches!(channel_code_rate(&redundant, 0, &[]), Err(Error::Redundant { .. })));
    }

    #[test]
    fn source_example() {
        assert!((source_rate_from_entropy(1.5, 2, 2) - 1.0).abs() < 1e-12);
        assert!((source_rate_from_entropy(0.7, 3, 1) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rooting_divides_out_subgroups() {
        // support {1, 3} in Z4 is the coset 1 + 2Z4
        let pmf = on_z(2, 2, vec![0.0, 0.3, 0.0, 0.7]);
        let atoms = pmf.to_atoms();
        let f = PrimaryCyclic::new(2, 2).unwrap();
        let root = rooting_of(&atoms, 0, f);
        assert_eq!(root, Rooting { shift: 1, offset: 1 });
        let h = crate::prob::h2(0.3);
        assert!((channel_rate_rooted(&atoms, 0, f, root, &[]) - h).abs() < 1e-12);
        // unrooted, the same variable needs twice that
        let plain = Rooting { shift: 0, offset: 0 };
        assert!((channel_rate_rooted(&atoms, 0, f, plain, &[]) - 2.0 * h).abs() < 1e-12);
    }
}
