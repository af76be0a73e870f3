//! Height-ridge extraction from 2D scalar fields and ridge-set comparison.
//!
//! A ridge point is where the gradient is orthogonal to the eigenvector of
//! the most negative Hessian eigenvalue. The field is pre-smoothed with a
//! fixed-scale Gaussian, derivatives are taken by central differences, and
//! crossings of `g = grad f . e_min` are located on cell edges by linear
//! interpolation after orienting `e_min` consistently within each cell.
//! Cell segments are chained into polylines; junctions split lines apart.
//!
//! Derivatives need a full central-difference stencil, so the one-node
//! boundary ring carries no ridges.

use std::collections::BTreeMap;

use crate::edge::ScalarField;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Extraction controls. `smoothing_sigma` is in physical length units.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeParams {
    /// Gaussian pre-smoothing scale (0 disables smoothing).
    pub smoothing_sigma: f64,
    /// Keep only ridge points whose (smoothed) field value reaches this.
    pub strength_threshold: f64,
    /// Require the minor Hessian eigenvalue to be below this (<= 0).
    pub eigenvalue_threshold: f64,
    /// Drop polylines with fewer vertices.
    pub min_vertices: usize,
}

impl RidgeParams {
    /// Defaults: smoothing of one grid spacing, no strength floor, any
    /// negative curvature, lines of at least two vertices.
    pub fn for_grid(grid: &GridSpec) -> Self {
        RidgeParams {
            smoothing_sigma: grid.spacing()[0],
            strength_threshold: 0.0,
            eigenvalue_threshold: 0.0,
            min_vertices: 2,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.smoothing_sigma >= 0.0) {
            return Err(Error::InvalidConfig("smoothing_sigma must be >= 0".into()));
        }
        if self.eigenvalue_threshold > 0.0 {
            return Err(Error::InvalidConfig(
                "eigenvalue_threshold must be <= 0".into(),
            ));
        }
        if self.min_vertices < 2 {
            return Err(Error::InvalidConfig("min_vertices must be >= 2".into()));
        }
        Ok(())
    }
}

/// Extracted ridge polyline with a per-vertex strength (the smoothed field
/// value at the vertex).
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeLine {
    pub vertices: Vec<[f64; 2]>,
    pub strengths: Vec<f64>,
}

impl RidgeLine {
    pub fn new(vertices: Vec<[f64; 2]>, strengths: Vec<f64>) -> Self {
        assert!(vertices.len() >= 2 && vertices.len() == strengths.len());
        RidgeLine {
            vertices,
            strengths,
        }
    }

    pub fn arc_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| dist2(w[0], w[1]).sqrt())
            .sum()
    }
}

/// Separable Gaussian smoothing, kernel truncated at three sigma and
/// renormalized; near the boundary only in-domain taps contribute and the
/// weights are renormalized over them.
pub fn gaussian_smooth(field: &ScalarField, sigma: f64) -> ScalarField {
    let grid = field.grid.clone();
    if sigma == 0.0 {
        return field.clone();
    }
    let mut values = field.values.clone();
    let dims = [grid.dims()[0], grid.dims()[1]];
    for axis in 0..2 {
        let h = grid.spacing()[axis];
        let sigma_cells = sigma / h;
        let radius = (3.0 * sigma_cells).ceil() as usize;
        if radius == 0 {
            continue;
        }
        let mut kernel = Vec::with_capacity(2 * radius + 1);
        for k in -(radius as isize)..=(radius as isize) {
            let u = k as f64 / sigma_cells;
            kernel.push((-0.5 * u * u).exp());
        }
        let total: f64 = kernel.iter().sum();
        for w in &mut kernel {
            *w /= total;
        }
        let src = values.clone();
        let (nx, ny) = (dims[0], dims[1]);
        for j in 0..ny {
            for i in 0..nx {
                let center = [i, j][axis] as isize;
                let n = dims[axis] as isize;
                let center_value = src[i + nx * j];
                // accumulate deviations from the center value so constant
                // fields (and plateaus) smooth to themselves exactly
                let mut acc = 0.0;
                let mut wsum = 0.0;
                for (ki, w) in kernel.iter().enumerate() {
                    let o = center + ki as isize - radius as isize;
                    if o < 0 || o >= n {
                        continue;
                    }
                    let idx = if axis == 0 {
                        o as usize + nx * j
                    } else {
                        i + nx * o as usize
                    };
                    acc += w * (src[idx] - center_value);
                    wsum += w;
                }
                values[i + nx * j] = center_value + acc / wsum;
            }
        }
    }
    ScalarField::new(grid, values)
}

/// Per-node derivative data at interior nodes.
struct NodeDerivs {
    grad: [f64; 2],
    lambda_min: f64,
    lambda_gap: f64,
    lambda_scale: f64,
    e_min: [f64; 2],
}

/// Extract ridge lines from a 2D scalar field.
pub fn extract_ridges(field: &ScalarField, params: &RidgeParams) -> Result<Vec<RidgeLine>> {
    params.validate()?;
    let grid = &field.grid;
    if grid.dim() != 2 {
        return Err(Error::invalid_data(
            "ridge input",
            "ridge extraction handles 2D fields only",
        ));
    }
    let (nx, ny) = (grid.dims()[0], grid.dims()[1]);
    if nx < 3 || ny < 3 {
        return Err(Error::FieldTooSmall {
            dims: grid.dims().to_vec(),
        });
    }
    let smoothed = gaussian_smooth(field, params.smoothing_sigma);
    let (hx, hy) = (grid.spacing()[0], grid.spacing()[1]);
    let v = |i: usize, j: usize| smoothed.values[i + nx * j];

    // derivatives at interior nodes only
    let derivs: Vec<Option<NodeDerivs>> = (0..nx * ny)
        .map(|flat| {
            let (i, j) = (flat % nx, flat / nx);
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                return None;
            }
            let gx = (v(i + 1, j) - v(i - 1, j)) / (2.0 * hx);
            let gy = (v(i, j + 1) - v(i, j - 1)) / (2.0 * hy);
            let hxx = (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) / (hx * hx);
            let hyy = (v(i, j + 1) - 2.0 * v(i, j) + v(i, j - 1)) / (hy * hy);
            let hxy = (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) + v(i - 1, j - 1))
                / (4.0 * hx * hy);
            let mid = 0.5 * (hxx + hyy);
            let half_diff = 0.5 * (hxx - hyy);
            let r = (half_diff * half_diff + hxy * hxy).sqrt();
            let lambda_min = mid - r;
            // eigenvector for lambda_min; pick the better-conditioned form
            let e = if half_diff.abs() + hxy.abs() == 0.0 {
                [1.0, 0.0] // isotropic: direction undefined, flagged by gap
            } else {
                let cand1 = [hxy, lambda_min - hxx];
                let cand2 = [lambda_min - hyy, hxy];
                let n1 = cand1[0] * cand1[0] + cand1[1] * cand1[1];
                let n2 = cand2[0] * cand2[0] + cand2[1] * cand2[1];
                let c = if n1 >= n2 { cand1 } else { cand2 };
                let n = (c[0] * c[0] + c[1] * c[1]).sqrt();
                [c[0] / n, c[1] / n]
            };
            Some(NodeDerivs {
                grad: [gx, gy],
                lambda_min,
                lambda_gap: 2.0 * r,
                lambda_scale: (mid + r).abs().max(lambda_min.abs()),
                e_min: e,
            })
        })
        .collect();

    // crossing segments per cell, visited in index order for determinism
    let mut segments: Vec<Segment> = Vec::new();
    for j in 1..ny.saturating_sub(2) {
        for i in 1..nx.saturating_sub(2) {
            collect_cell_segments(
                &smoothed,
                &derivs,
                grid,
                (i, j),
                params,
                &mut segments,
            );
        }
    }

    let mut lines = chain_segments(&segments);
    lines.retain(|l| l.vertices.len() >= params.min_vertices);
    // longest first, deterministic tie-break on the first vertex
    lines.sort_by(|a, b| {
        b.arc_length()
            .partial_cmp(&a.arc_length())
            .unwrap()
            .then_with(|| a.vertices[0][0].partial_cmp(&b.vertices[0][0]).unwrap())
            .then_with(|| a.vertices[0][1].partial_cmp(&b.vertices[0][1]).unwrap())
    });
    Ok(lines)
}

struct Segment {
    a: [f64; 2],
    b: [f64; 2],
    sa: f64,
    sb: f64,
}

struct Crossing {
    point: [f64; 2],
    strength: f64,
}

/// Relative eigenvalue-gap floor below which the minor eigenvector
/// direction is considered undefined and the cell is skipped.
const UMBILIC_GAP: f64 = 1e-9;

fn collect_cell_segments(
    smoothed: &ScalarField,
    derivs: &[Option<NodeDerivs>],
    grid: &GridSpec,
    cell: (usize, usize),
    params: &RidgeParams,
    segments: &mut Vec<Segment>,
) {
    let nx = grid.dims()[0];
    let (i, j) = cell;
    let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
    let mut d: [&NodeDerivs; 4] = [&EMPTY; 4];
    for (k, &(ci, cj)) in corners.iter().enumerate() {
        match derivs[ci + nx * cj].as_ref() {
            Some(nd) => d[k] = nd,
            None => return,
        }
    }
    // skip cells containing near-umbilic corners: e_min is ill-defined
    for nd in &d {
        if nd.lambda_gap < UMBILIC_GAP * nd.lambda_scale.max(f64::MIN_POSITIVE) {
            return;
        }
    }
    // orient eigenvectors against the first corner
    let reference = d[0].e_min;
    let mut g = [0.0; 4];
    let mut lam = [0.0; 4];
    let mut fval = [0.0; 4];
    for k in 0..4 {
        let flip = if d[k].e_min[0] * reference[0] + d[k].e_min[1] * reference[1] < 0.0 {
            -1.0
        } else {
            1.0
        };
        g[k] = flip * (d[k].grad[0] * d[k].e_min[0] + d[k].grad[1] * d[k].e_min[1]);
        lam[k] = d[k].lambda_min;
        let (ci, cj) = corners[k];
        fval[k] = smoothed.values[ci + nx * cj];
    }
    let pos: Vec<[f64; 2]> = corners
        .iter()
        .map(|&(ci, cj)| {
            let p = grid.node_position([ci, cj, 0]);
            [p[0], p[1]]
        })
        .collect();

    let mut crossings: Vec<Crossing> = Vec::new();
    for k in 0..4 {
        let k2 = (k + 1) % 4;
        let (ga, gb) = (g[k], g[k2]);
        let t = if ga == 0.0 && gb != 0.0 {
            0.0
        } else if ga * gb < 0.0 {
            ga / (ga - gb)
        } else {
            continue;
        };
        let lam_c = lam[k] + t * (lam[k2] - lam[k]);
        let f_c = fval[k] + t * (fval[k2] - fval[k]);
        if lam_c >= params.eigenvalue_threshold || f_c < params.strength_threshold {
            continue;
        }
        let point = [
            pos[k][0] + t * (pos[k2][0] - pos[k][0]),
            pos[k][1] + t * (pos[k2][1] - pos[k][1]),
        ];
        if crossings.iter().any(|c| c.point == point) {
            continue;
        }
        crossings.push(Crossing {
            point,
            strength: f_c,
        });
    }
    match crossings.len() {
        0 | 1 => {}
        2 => {
            if crossings[0].point != crossings[1].point {
                segments.push(Segment {
                    a: crossings[0].point,
                    b: crossings[1].point,
                    sa: crossings[0].strength,
                    sb: crossings[1].strength,
                });
            }
        }
        _ => {
            // ambiguous cell: star the crossings through their centroid
            let m = crossings.len() as f64;
            let cx = crossings.iter().map(|c| c.point[0]).sum::<f64>() / m;
            let cy = crossings.iter().map(|c| c.point[1]).sum::<f64>() / m;
            let cs = crossings.iter().map(|c| c.strength).sum::<f64>() / m;
            for c in &crossings {
                if c.point != [cx, cy] {
                    segments.push(Segment {
                        a: c.point,
                        b: [cx, cy],
                        sa: c.strength,
                        sb: cs,
                    });
                }
            }
        }
    }
}

static EMPTY: NodeDerivs = NodeDerivs {
    grad: [0.0, 0.0],
    lambda_min: 0.0,
    lambda_gap: 0.0,
    lambda_scale: 0.0,
    e_min: [1.0, 0.0],
};

/// Join segments whose endpoints coincide within 1e-9 into polylines.
/// Chains stop at junction points (three or more incident segment ends).
fn chain_segments(segments: &[Segment]) -> Vec<RidgeLine> {
    const QUANTUM: f64 = 1e-9;
    let key = |p: [f64; 2]| -> (i64, i64) {
        (
            (p[0] / QUANTUM).round() as i64,
            (p[1] / QUANTUM).round() as i64,
        )
    };
    // endpoint key -> (segment index, end) incidences in segment order
    let mut incident: BTreeMap<(i64, i64), Vec<(usize, u8)>> = BTreeMap::new();
    for (s, seg) in segments.iter().enumerate() {
        incident.entry(key(seg.a)).or_default().push((s, 0));
        incident.entry(key(seg.b)).or_default().push((s, 1));
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let seg = &segments[start];
        let mut verts = vec![seg.a, seg.b];
        let mut strengths = vec![seg.sa, seg.sb];

        // walk forward from the tail, then backward from the head
        for dir in 0..2 {
            loop {
                let tip = if dir == 0 { verts[verts.len() - 1] } else { verts[0] };
                let ends = match incident.get(&key(tip)) {
                    Some(e) => e,
                    None => break,
                };
                if ends.len() != 2 {
                    break; // dead end or junction
                }
                let next = ends.iter().find(|(s, _)| !used[*s]);
                let (s, end) = match next {
                    Some(&(s, end)) => (s, end),
                    None => break, // closed loop or already consumed
                };
                used[s] = true;
                let (far, far_strength) = if end == 0 {
                    (segments[s].b, segments[s].sb)
                } else {
                    (segments[s].a, segments[s].sa)
                };
                if dir == 0 {
                    verts.push(far);
                    strengths.push(far_strength);
                } else {
                    verts.insert(0, far);
                    strengths.insert(0, far_strength);
                }
            }
        }
        // drop exact duplicate consecutive vertices
        let mut clean_v = Vec::with_capacity(verts.len());
        let mut clean_s = Vec::with_capacity(verts.len());
        for (v, s) in verts.into_iter().zip(strengths) {
            if clean_v.last() != Some(&v) {
                clean_v.push(v);
                clean_s.push(s);
            }
        }
        if clean_v.len() >= 2 {
            lines.push(RidgeLine::new(clean_v, clean_s));
        }
    }
    lines
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Shortest Euclidean distance from a point to a polyline (exact
/// point-segment projection with clamped parameter).
pub fn point_polyline_distance(p: [f64; 2], line: &RidgeLine) -> f64 {
    let mut best = f64::INFINITY;
    if line.vertices.len() == 1 {
        return dist2(p, line.vertices[0]).sqrt();
    }
    for w in line.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = [b[0] - a[0], b[1] - a[1]];
        let ap = [p[0] - a[0], p[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if len2 == 0.0 {
            0.0
        } else {
            ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
        };
        let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
        best = best.min(dist2(p, q));
    }
    best.sqrt()
}

/// Symmetric mean of vertex-to-polyline distances between two ridge lines:
/// `d = (sum_k dist(c_i^k, C_j) + sum_k dist(c_j^k, C_i)) / (m + n)`.
pub fn ridge_dissimilarity(ci: &RidgeLine, cj: &RidgeLine) -> f64 {
    let sum_i: f64 = ci
        .vertices
        .iter()
        .map(|&p| point_polyline_distance(p, cj))
        .sum();
    let sum_j: f64 = cj
        .vertices
        .iter()
        .map(|&p| point_polyline_distance(p, ci))
        .sum();
    (sum_i + sum_j) / (ci.vertices.len() + cj.vertices.len()) as f64
}

/// Per-vertex minimum distances from one ridge set to another, with mean
/// and max aggregates.
#[derive(Debug, Clone)]
pub struct DirectedDistance {
    pub per_vertex: Vec<f64>,
    pub mean: f64,
    pub max: f64,
}

/// Distances in both directions between two ridge sets.
#[derive(Debug, Clone)]
pub struct RidgeSetDistance {
    pub forward: DirectedDistance,
    pub reverse: DirectedDistance,
}

fn directed(from: &[RidgeLine], to: &[RidgeLine]) -> DirectedDistance {
    let mut per_vertex = Vec::new();
    for line in from {
        for &v in &line.vertices {
            let d = to
                .iter()
                .map(|l| point_polyline_distance(v, l))
                .fold(f64::INFINITY, f64::min);
            per_vertex.push(d);
        }
    }
    let mean = per_vertex.iter().sum::<f64>() / per_vertex.len() as f64;
    let max = per_vertex.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    DirectedDistance {
        per_vertex,
        mean,
        max,
    }
}

/// Vertex distances from every line of `set_a` to `set_b` and back.
pub fn ridge_set_distance(set_a: &[RidgeLine], set_b: &[RidgeLine]) -> Result<RidgeSetDistance> {
    if set_a.is_empty() || set_b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(RidgeSetDistance {
        forward: directed(set_a, set_b),
        reverse: directed(set_b, set_a),
    })
}
