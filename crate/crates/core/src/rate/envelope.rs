use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower convex envelope of `(D, R)` points, as vertices with increasing
/// `D` and non-increasing `R`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull from below of the achievable region `{(D', R') : D' >= D,
/// R' >= R}` generated by the points. Collinear interior points are dropped.
pub fn lower_convex_envelope(points: &[(f64, f64)]) -> Result<Envelope> {
    if points.is_empty() {
        return Err(Error::arg("no points to envelope"));
    }
    if points.iter().any(|(d, r)| !d.is_finite() || !r.is_finite()) {
        return Err(Error::arg("points must be finite"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // keep points that lower the running minimum rate
    let mut stair: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        match stair.last() {
            Some(&(_, r)) if p.1 >= r => {}
            Some(&(d, _)) if d == p.0 => {
                stair.pop();
                stair.push(p);
            }
            _ => stair.push(p),
        }
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in stair {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(Envelope { vertices: hull })
}

impl Envelope {
    /// Envelope value at `d`; `None` below the smallest achievable distortion.
    pub fn value_at(&self, d: f64) -> Option<f64> {
        let v = &self.vertices;
        let first = v.first()?;
        if d < first.0 {
            return None;
        }
        for w in v.windows(2) {
            let (a, b) = (w[0], w[1]);
            if d <= b.0 {
                let t = (d - a.0) / (b.0 - a.0);
                return Some(a.1 + t * (b.1 - a.1));
            }
        }
        v.last().map(|p| p.1)
    }
}
