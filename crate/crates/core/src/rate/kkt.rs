//! The maximizer behind the channel-code rate: the largest conditional
//! entropy of a shift `W` restricted to a subgroup, subject to `Z` and
//! `Z + W` having the same conditional law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{entropy_of, JointPmf};

/// Constraint residual accepted for the constructed maximizer.
pub const KKT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxCosetEntropy {
    /// `H(W | Z, S)` at the maximizer.
    pub value: f64,
    /// `H(Z|S) - H([Z]_i|S)`.
    pub closed_form: f64,
    /// `P(Z = z, W = p^i t | S = s)` indexed `[s][z][t]`.
    pub table: Vec<Vec<Vec<f64>>>,
    /// Largest violation of the two marginal constraints.
    pub residual: f64,
}

/// Maximizes `H(W|Z,S)` over `P_{ZW|S}` with `W` in `p^i Z_{p^r}`,
/// `P_{Z|S}` fixed and `P_{Z+W|S} = P_{Z|S}`. `pmf` has axes `(Z)` or
/// `(Z, S)` with a primary cyclic group on `Z`.
///
/// The maximizer spreads each `z` uniformly-in-proportion over its coset:
/// `P(z, w | s) = P(z|s) P(z+w|s) / P(z + p^i Z | s)`.
pub fn max_coset_conditional_entropy(pmf: &JointPmf, i: u32) -> Result<MaxCosetEntropy> {
    if pmf.rank() == 0 || pmf.rank() > 2 {
        return Err(Error::arg("expected a pmf over (Z) or (Z, S)"));
    }
    let f = pmf.axis(0).primary_factor().ok_or_else(|| Error::arg("Z must carry a primary cyclic group"))?;
    if i > f.r() {
        return Err(Error::arg(format!("subgroup index {i} exceeds exponent {}", f.r())));
    }
    let m = f.order() as usize;
    let pi = f.p().pow(i) as usize;
    let shifts = m / pi;
    let ns = if pmf.rank() == 2 { pmf.axis(1).len() } else { 1 };
    let joint = |z: usize, s: usize| if pmf.rank() == 2 { pmf.prob(&[z, s]) } else { pmf.prob(&[z]) };
    let mut table = vec![vec![vec![0.0; shifts]; m]; ns];
    let mut residual: f64 = 0.0;
    let mut value = 0.0;
    let mut closed = 0.0;
    for s in 0..ns {
        let ps: f64 = (0..m).map(|z| joint(z, s)).sum();
        if ps <= 0.0 {
            continue;
        }
        let pz: Vec<f64> = (0..m).map(|z| joint(z, s) / ps).collect();
        let coset: Vec<f64> = (0..pi).map(|c| (0..m).filter(|z| z % pi == c).map(|z| pz[z]).sum()).collect();
        for z in 0..m {
            for t in 0..shifts {
                let z2 = (z + pi * t) % m;
                if coset[z % pi] > 0.0 {
                    table[s][z][t] = pz[z] * pz[z2] / coset[z % pi];
                }
            }
        }
        for z in 0..m {
            let row: f64 = table[s][z].iter().sum();
            let col: f64 = (0..shifts).map(|t| table[s][(z + m - (pi * t) % m) % m][t]).sum();
            residual = residual.max((row - pz[z]).abs()).max((col - pz[z]).abs());
            if pz[z] > 0.0 {
                value += ps * pz[z] * entropy_of(table[s][z].iter().map(|x| x / pz[z]));
            }
        }
        closed += ps * (entropy_of(pz.iter().copied()) - entropy_of(coset.iter().copied()));
    }
    if residual > KKT_TOL {
        return Err(Error::Infeasible(format!("constructed maximizer violates constraints by {residual:e}")));
    }
    if (value - closed).abs() > KKT_TOL {
        return Err(Error::Infeasible(format!("maximizer value {value} differs from {closed}")));
    }
    Ok(MaxCosetEntropy { value, closed_form: closed, table, residual })
}
