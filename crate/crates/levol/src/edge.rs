//! Edge strength of a feature field: local least-squares gradient
//! estimation reduced to a scalar by the spectral norm.
//!
//! At each node the vector-valued feature field is fitted by an affine
//! model over the von Neumann 1-neighborhood (axis neighbors only, the
//! center pinned to its own value). Minimizing
//! `sum_k || mu_k - mu_i - A (x_k - x_i) ||^2` over axis-aligned offsets
//! decouples per axis, so on interior nodes of a uniform grid each column
//! of `A` is exactly the central difference `(mu_+ - mu_-) / (2 h)`;
//! boundary nodes fall back to the one-sided difference over the existing
//! neighbor. The edge strength is `sqrt(lambda_max(A^T A))`, the largest
//! singular value of the fitted gradient.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::lift::{FeatureField, MomentSpec};

/// Affine fit of a feature field around one node.
#[derive(Debug, Clone)]
pub struct LocalLinearFit {
    /// Fitted gradient, row-major `feature_len x dim`.
    pub gradient: Vec<f64>,
    /// Model offset `b` such that `model(x) = A x + b` passes through the
    /// center node's value.
    pub offset: Vec<f64>,
    /// Sum of squared residuals of the fit over the neighborhood.
    pub residual: f64,
    pub feature_len: usize,
    pub dim: usize,
}

/// Fit the affine model at `node` (flat index).
pub fn fit_local_linear(ff: &FeatureField, node: usize) -> Result<LocalLinearFit> {
    let grid = ff.grid();
    let dim = grid.dim();
    let flen = ff.feature_len();
    let ijk = grid.node_ijk(node);
    let center = ff.feature(node);

    let mut gradient = vec![0.0; flen * dim];
    for axis in 0..dim {
        let n = grid.dims()[axis];
        let h = grid.spacing()[axis];
        let has_minus = ijk[axis] > 0;
        let has_plus = ijk[axis] + 1 < n;
        if !has_minus && !has_plus {
            return Err(Error::DegenerateNeighborhood { node, axis });
        }
        let neighbor = |delta: isize| -> &[f64] {
            let mut q = ijk;
            q[axis] = (q[axis] as isize + delta) as usize;
            ff.feature(grid.node_index(q))
        };
        // least squares over axis offsets {-h, +h} reduces to a weighted
        // difference: sum_s s*h*(mu_s - mu_c) / sum_s h^2
        if has_minus && has_plus {
            let plus = neighbor(1);
            let minus = neighbor(-1);
            let inv = 1.0 / (2.0 * h);
            for r in 0..flen {
                gradient[r * dim + axis] = (plus[r] - minus[r]) * inv;
            }
        } else {
            let (sign, nb) = if has_plus {
                (1.0, neighbor(1))
            } else {
                (-1.0, neighbor(-1))
            };
            let inv = sign / h;
            for r in 0..flen {
                gradient[r * dim + axis] = (nb[r] - center[r]) * inv;
            }
        }
    }

    // offset so the model passes through the center value
    let pos = grid.node_position(ijk);
    let mut offset = Vec::with_capacity(flen);
    for r in 0..flen {
        let mut ax = 0.0;
        for a in 0..dim {
            ax += gradient[r * dim + a] * pos[a];
        }
        offset.push(center[r] - ax);
    }

    // residual over the neighborhood actually used
    let mut residual = 0.0;
    for axis in 0..dim {
        let n = grid.dims()[axis];
        let h = grid.spacing()[axis];
        for (delta, present) in [(-1isize, ijk[axis] > 0), (1, ijk[axis] + 1 < n)] {
            if !present {
                continue;
            }
            let mut q = ijk;
            q[axis] = (q[axis] as isize + delta) as usize;
            let nb = ff.feature(grid.node_index(q));
            let dx = delta as f64 * h;
            for r in 0..flen {
                let e = nb[r] - center[r] - gradient[r * dim + axis] * dx;
                residual += e * e;
            }
        }
    }

    Ok(LocalLinearFit {
        gradient,
        offset,
        residual,
        feature_len: flen,
        dim,
    })
}

/// Largest singular value of a row-major `rows x cols` matrix with
/// `cols <= 3`, via a closed-form symmetric eigensolve of `A^T A`.
pub fn spectral_norm(a: &[f64], rows: usize, cols: usize) -> f64 {
    assert_eq!(a.len(), rows * cols);
    assert!((1..=3).contains(&cols), "cols must be 1..=3");
    // Gram matrix G = A^T A, symmetric cols x cols
    let mut g = [[0.0f64; 3]; 3];
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        for i in 0..cols {
            for j in i..cols {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..cols {
        for j in 0..i {
            g[i][j] = g[j][i];
        }
    }
    let lmax = match cols {
        1 => g[0][0],
        2 => sym2_eig_max(g[0][0], g[0][1], g[1][1]),
        _ => sym3_eig_max(&g),
    };
    lmax.max(0.0).sqrt()
}

/// Largest eigenvalue of [[a, b], [b, c]].
fn sym2_eig_max(a: f64, b: f64, c: f64) -> f64 {
    let mid = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    mid + (half_diff * half_diff + b * b).sqrt()
}

/// Largest eigenvalue of a symmetric 3x3 matrix, trigonometric closed form
/// with guards for (near-)multiple roots.
fn sym3_eig_max(g: &[[f64; 3]; 3]) -> f64 {
    let p1 = g[0][1] * g[0][1] + g[0][2] * g[0][2] + g[1][2] * g[1][2];
    if p1 == 0.0 {
        return g[0][0].max(g[1][1]).max(g[2][2]);
    }
    let q = (g[0][0] + g[1][1] + g[2][2]) / 3.0;
    let p2 = (g[0][0] - q).powi(2) + (g[1][1] - q).powi(2) + (g[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    let inv_p = 1.0 / p;
    let b = [
        [(g[0][0] - q) * inv_p, g[0][1] * inv_p, g[0][2] * inv_p],
        [g[0][1] * inv_p, (g[1][1] - q) * inv_p, g[1][2] * inv_p],
        [g[0][2] * inv_p, g[1][2] * inv_p, (g[2][2] - q) * inv_p],
    ];
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

/// Scalar field of non-negative values on a grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.node_count());
        ScalarField { grid, values }
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.values {
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    }
}

/// Edge-strength field with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct EdgeField {
    pub field: ScalarField,
    pub t0: f64,
    pub duration: f64,
    pub moments: MomentSpec,
}

/// Edge strength at every node: the spectral norm of the locally fitted
/// feature-field gradient.
pub fn edge_strength_field(ff: &FeatureField) -> Result<EdgeField> {
    let grid = ff.grid().clone();
    let dim = grid.dim();
    let flen = ff.feature_len();
    let values = (0..grid.node_count())
        .into_par_iter()
        .map(|node| {
            let fit = fit_local_linear(ff, node)?;
            Ok(spectral_norm(&fit.gradient, flen, dim))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EdgeField {
        field: ScalarField::new(grid, values),
        t0: ff.t0(),
        duration: ff.duration(),
        moments: ff.moment_spec().clone(),
    })
}
