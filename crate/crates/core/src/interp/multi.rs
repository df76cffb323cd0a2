use rug::Complex;

use super::tripoly::TriPoly;
use super::uni::AxisInterpolator;
use crate::error::Result;

/// Interpolation on a full tensor grid x × y × z. Values are laid out as
/// `values[(i·ny + j)·nz + k]` for the node (xᵢ, yⱼ, z_k).
#[derive(Clone, Debug)]
pub struct TensorInterpolator {
    pub axes: [AxisInterpolator; 3],
}

impl TensorInterpolator {
    pub fn new(nodes: [Vec<Complex>; 3]) -> Result<Self> {
        let [x, y, z] = nodes;
        Ok(Self {
            axes: [AxisInterpolator::new(x)?, AxisInterpolator::new(y)?, AxisInterpolator::new(z)?],
        })
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.axes[0].len(), self.axes[1].len(), self.axes[2].len()]
    }

    pub fn grid_point(&self, i: usize, j: usize, k: usize) -> [Complex; 3] {
        [
            self.axes[0].nodes[i].clone(),
            self.axes[1].nodes[j].clone(),
            self.axes[2].nodes[k].clone(),
        ]
    }

    /// Nested univariate interpolation, innermost variable first. Dense
    /// coefficients below 2^-tol_bits of the largest are dropped.
    pub fn interpolate(&self, values: &[Complex], tol_bits: f64) -> TriPoly<Complex> {
        let [nx, ny, nz] = self.shape();
        assert_eq!(values.len(), nx * ny * nz, "grid size mismatch");
        let mut a = values.to_vec();
        // along z
        for row in a.chunks_mut(nz) {
            let c = self.axes[2].apply(row);
            row.clone_from_slice(&c);
        }
        // along y
        let mut col = Vec::with_capacity(ny);
        for i in 0..nx {
            for k in 0..nz {
                col.clear();
                col.extend((0..ny).map(|j| a[(i * ny + j) * nz + k].clone()));
                let c = self.axes[1].apply(&col);
                for (j, v) in c.into_iter().enumerate() {
                    a[(i * ny + j) * nz + k] = v;
                }
            }
        }
        // along x
        let mut col = Vec::with_capacity(nx);
        for j in 0..ny {
            for k in 0..nz {
                col.clear();
                col.extend((0..nx).map(|i| a[(i * ny + j) * nz + k].clone()));
                let c = self.axes[0].apply(&col);
                for (i, v) in c.into_iter().enumerate() {
                    a[(i * ny + j) * nz + k] = v;
                }
            }
        }
        let mut p = TriPoly::new();
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    let v = &a[(i * ny + j) * nz + k];
                    if !(v.real().is_zero() && v.imag().is_zero()) {
                        p.terms.insert([i as u32, j as u32, k as u32], v.clone());
                    }
                }
            }
        }
        p.trim(tol_bits);
        p
    }
}

/// One-shot tensor interpolation with the grid sized from the degree
/// bounds: node set `v` must have `bounds[v] + 1` points.
pub fn interp_poly_multi(nodes: [Vec<Complex>; 3], values: &[Complex], bounds: [u32; 3]) -> Result<TriPoly<Complex>> {
    for v in 0..3 {
        assert_eq!(nodes[v].len(), bounds[v] as usize + 1, "axis {v} has the wrong node count");
    }
    let prec = nodes[0][0].prec().0;
    let t = TensorInterpolator::new(nodes)?;
    Ok(t.interpolate(values, prec as f64 / 2.0))
}
