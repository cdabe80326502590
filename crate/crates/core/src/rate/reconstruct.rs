//! Distortion measures and the optimal reconstruction function.

use serde::{Deserialize, Serialize};

use crate::embedding::FunctionTable;
use crate::error::{Error, Result};
use crate::prob::JointPmf;

/// Costs within this distance of the minimum count as ties.
pub const TIE_TOL: f64 = 1e-12;

/// `d(x, y, z)` for reconstructions `z` of the pair `(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    values: Vec<f64>,
}

impl Distortion {
    pub fn new(x_size: usize, y_size: usize, z_size: usize, values: Vec<f64>) -> Result<Self> {
        let n = x_size * y_size * z_size;
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: values.len() });
        }
        if z_size == 0 {
            return Err(Error::arg("reconstruction alphabet must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::arg("distortions must be finite and non-negative"));
        }
        Ok(Distortion { x_size, y_size, z_size, values })
    }

    /// `d = 1[z != F(x, y)]` for a target function given x-major.
    pub fn hamming_on_function(x_size: usize, y_size: usize, f: &[usize], z_size: usize) -> Result<Self> {
        if f.len() != x_size * y_size {
            return Err(Error::DimensionMismatch { expected: x_size * y_size, got: f.len() });
        }
        if f.iter().any(|z| *z >= z_size) {
            return Err(Error::arg("target function value outside the reconstruction alphabet"));
        }
        let mut values = vec![1.0; x_size * y_size * z_size];
        for (c, z) in f.iter().enumerate() {
            values[c * z_size + z] = 0.0;
        }
        Distortion::new(x_size, y_size, z_size, values)
    }

    /// Hamming distortion on the pair `(x, y)`, reconstruction index `x * |Y| + y`.
    pub fn lossless_pair(x_size: usize, y_size: usize) -> Result<Self> {
        let f: Vec<usize> = (0..x_size * y_size).collect();
        Distortion::hamming_on_function(x_size, y_size, &f, x_size * y_size)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[(x * self.y_size + y) * self.z_size + z]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_shapes(pmf: &JointPmf, d: &Distortion) -> Result<(usize, usize, usize, usize)> {
    if pmf.rank() != 4 {
        return Err(Error::arg("expected a pmf over (X, Y, U, V)"));
    }
    let s = pmf.shape();
    if s[0] != d.x_size || s[1] != d.y_size {
        return Err(Error::arg("distortion alphabets do not match the source"));
    }
    Ok((s[0], s[1], s[2], s[3]))
}

/// For each positive-mass `(u, v)`, the reconstruction minimizing
/// `E[d(X, Y, z) | u, v]`; ties go to the smallest index. Cells with zero
/// mass are masked out (and given value 0).
pub fn optimal_reconstruction(pmf: &JointPmf, d: &Distortion) -> Result<FunctionTable> {
    let (nx, ny, nu, nv) = check_shapes(pmf, d)?;
    let t = pmf.table();
    let mut values = vec![0; nu * nv];
    let mut mask = vec![false; nu * nv];
    let mut cost = vec![0.0; d.z_size];
    for u in 0..nu {
        for v in 0..nv {
            cost.iter_mut().for_each(|c| *c = 0.0);
            let mut mass = 0.0;
            for x in 0..nx {
                for y in 0..ny {
                    let p = t[((x * ny + y) * nu + u) * nv + v];
                    if p > 0.0 {
                        mass += p;
                        for (z, c) in cost.iter_mut().enumerate() {
                            *c += p * d.get(x, y, z);
                        }
                    }
                }
            }
            if mass > 0.0 {
                let min = cost.iter().cloned().fold(f64::INFINITY, f64::min);
                let tol = TIE_TOL * mass.max(min);
                let z = cost.iter().position(|c| *c <= min + tol).expect("non-empty");
                values[u * nv + v] = z;
                mask[u * nv + v] = true;
            }
        }
    }
    FunctionTable::new(nu, nv, values, mask)
}

/// `E d(X, Y, G(U, V))`.
pub fn expected_distortion(pmf: &JointPmf, d: &Distortion, g: &FunctionTable) -> Result<f64> {
    let (nx, ny, nu, nv) = check_shapes(pmf, d)?;
    if g.u_size() != nu || g.v_size() != nv {
        return Err(Error::arg("reconstruction function does not match the auxiliaries"));
    }
    let t = pmf.table();
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            for u in 0..nu {
                for v in 0..nv {
                    let p = t[((x * ny + y) * nu + u) * nv + v];
                    if p > 0.0 {
                        total += p * d.get(x, y, g.get(u, v));
                    }
                }
            }
        }
    }
    Ok(total)
}
