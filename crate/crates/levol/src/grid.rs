//! Uniform-grid multifield dataset model with space-time interpolation.
//!
//! A [`MultifieldDataset`] holds one time-dependent vector field and any
//! number of named scalar attribute fields on a shared uniform grid. It is
//! immutable after construction, so sampling is reentrant and any number of
//! threads may read it concurrently.
//!
//! Sampling is multilinear in space (bilinear / trilinear) and linear in
//! time between the two bracketing frames. Values are held as `f64`
//! regardless of file precision. Samples taken exactly at a grid node and a
//! stored frame reproduce the stored value bit for bit.

use crate::error::{Error, Result};

/// Point convention: always three components; 2D data uses `z = 0`.
pub type Point = [f64; 3];

/// Uniform rectilinear grid in two or three dimensions.
///
/// Axes are padded internally to three entries; a 2D grid has one node and
/// zero extent along the third axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dim: usize,
    dims: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
}

impl GridSpec {
    pub fn new_2d(dims: [usize; 2], spacing: [f64; 2], origin: [f64; 2]) -> Result<Self> {
        let spec = GridSpec {
            dim: 2,
            dims: [dims[0], dims[1], 1],
            spacing: [spacing[0], spacing[1], 1.0],
            origin: [origin[0], origin[1], 0.0],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn new_3d(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        let spec = GridSpec {
            dim: 3,
            dims,
            spacing,
            origin,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        for a in 0..self.dim {
            if self.dims[a] < 2 {
                return Err(Error::invalid_data(
                    "grid",
                    format!("axis {a} has {} nodes, need at least 2", self.dims[a]),
                ));
            }
            if !(self.spacing[a] > 0.0) || !self.spacing[a].is_finite() {
                return Err(Error::invalid_data(
                    "grid",
                    format!("axis {a} spacing {} must be finite and positive", self.spacing[a]),
                ));
            }
            if !self.origin[a].is_finite() {
                return Err(Error::invalid_data(
                    "grid",
                    format!("axis {a} origin {} must be finite", self.origin[a]),
                ));
            }
        }
        Ok(())
    }

    /// Number of spatial dimensions (2 or 3).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Node counts per axis (length = `dim()`).
    pub fn dims(&self) -> &[usize] {
        &self.dims[..self.dim]
    }

    /// Node spacing per axis (length = `dim()`).
    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    /// Physical coordinates of node (0, 0[, 0]).
    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn node_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Flat node index; x varies fastest, then y, then z.
    #[inline]
    pub fn node_index(&self, ijk: [usize; 3]) -> usize {
        debug_assert!(ijk[0] < self.dims[0] && ijk[1] < self.dims[1] && ijk[2] < self.dims[2]);
        ijk[0] + self.dims[0] * (ijk[1] + self.dims[1] * ijk[2])
    }

    /// Inverse of [`node_index`](Self::node_index).
    #[inline]
    pub fn node_ijk(&self, flat: usize) -> [usize; 3] {
        let i = flat % self.dims[0];
        let rest = flat / self.dims[0];
        [i, rest % self.dims[1], rest / self.dims[1]]
    }

    /// Physical position of a node, `origin + ijk * spacing` per axis.
    #[inline]
    pub fn node_position(&self, ijk: [usize; 3]) -> Point {
        [
            self.origin[0] + self.spacing[0] * ijk[0] as f64,
            self.origin[1] + self.spacing[1] * ijk[1] as f64,
            if self.dim == 3 {
                self.origin[2] + self.spacing[2] * ijk[2] as f64
            } else {
                0.0
            },
        ]
    }

    pub fn min_corner(&self) -> Point {
        let mut p = [0.0; 3];
        p[..self.dim].copy_from_slice(self.origin());
        p
    }

    pub fn max_corner(&self) -> Point {
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.origin[a] + self.spacing[a] * (self.dims[a] - 1) as f64;
        }
        p
    }

    /// True when `p` lies in the closed bounding box of the grid.
    /// 2D grids require `p[2] == 0`.
    pub fn contains(&self, p: Point) -> bool {
        self.locate(p).is_some()
    }

    /// Cell location of `p` on every axis, or `None` when outside the
    /// closed bounding box.
    #[inline]
    pub(crate) fn locate(&self, p: Point) -> Option<[AxisCell; 3]> {
        let x = locate_axis(p[0], self.origin[0], self.spacing[0], self.dims[0])?;
        let y = locate_axis(p[1], self.origin[1], self.spacing[1], self.dims[1])?;
        let z = if self.dim == 3 {
            locate_axis(p[2], self.origin[2], self.spacing[2], self.dims[2])?
        } else {
            // padded axis: a single node at z = 0
            if p[2] != 0.0 {
                return None;
            }
            AxisCell { idx: 0, frac: 0.0 }
        };
        Some([x, y, z])
    }

    fn out_of_domain(&self, p: Point) -> Error {
        Error::OutOfDomain {
            position: p[..self.dim].to_vec(),
            min: self.min_corner()[..self.dim].to_vec(),
            max: self.max_corner()[..self.dim].to_vec(),
        }
    }
}

/// Per-axis cell coordinates: base node index plus fraction in `[0, 1]`.
/// An exact node hit yields `frac == 0.0` (the index may be the last node).
#[derive(Debug, Clone, Copy)]
pub(crate) struct AxisCell {
    pub idx: usize,
    pub frac: f64,
}

/// Locate `x` on a uniform axis with `n` nodes at `origin + i*step`.
///
/// Exact node positions (per the canonical `origin + i*step` formula) are
/// detected and reported with a zero fraction so interpolation reproduces
/// stored values bit for bit.
fn locate_axis(x: f64, origin: f64, step: f64, n: usize) -> Option<AxisCell> {
    let max = origin + step * (n - 1) as f64;
    if !(x >= origin && x <= max) {
        return None; // also rejects NaN
    }
    if n == 1 {
        return Some(AxisCell { idx: 0, frac: 0.0 });
    }
    let s = (x - origin) / step;
    let near = s.round();
    if near >= 0.0 && near <= (n - 1) as f64 && x == origin + step * near {
        return Some(AxisCell {
            idx: near as usize,
            frac: 0.0,
        });
    }
    let mut idx = (s.floor() as isize).clamp(0, n as isize - 2) as usize;
    let mut frac = (x - (origin + step * idx as f64)) / step;
    if frac >= 1.0 && idx < n - 2 {
        idx += 1;
        frac = (x - (origin + step * idx as f64)) / step;
    }
    frac = frac.clamp(0.0, 1.0);
    Some(AxisCell { idx, frac })
}

/// Linear interpolation that returns `a` exactly when `t == 0`.
#[inline]
pub(crate) fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else {
        a + t * (b - a)
    }
}

/// Discrete time axis with uniformly spaced frames.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeAxis {
    t_start: f64,
    t_step: f64,
    frame_count: usize,
}

impl TimeAxis {
    /// A single-frame axis describes a steady field; interpolation then
    /// ignores `t` within the (degenerate) time range.
    pub fn new(t_start: f64, t_step: f64, frame_count: usize) -> Result<Self> {
        if frame_count < 1 {
            return Err(Error::invalid_data("time axis", "frame_count must be at least 1"));
        }
        if !(t_step > 0.0) || !t_step.is_finite() {
            return Err(Error::invalid_data(
                "time axis",
                format!("t_step {t_step} must be finite and positive"),
            ));
        }
        if !t_start.is_finite() {
            return Err(Error::invalid_data("time axis", "t_start must be finite"));
        }
        Ok(TimeAxis {
            t_start,
            t_step,
            frame_count,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_step(&self) -> f64 {
        self.t_step
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.t_step * (self.frame_count - 1) as f64
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn is_steady(&self) -> bool {
        self.frame_count == 1
    }

    pub fn frame_time(&self, frame: usize) -> f64 {
        self.t_start + self.t_step * frame as f64
    }

    /// A steady axis (single frame) is defined for all finite times.
    pub fn contains(&self, t: f64) -> bool {
        if self.frame_count == 1 {
            t.is_finite()
        } else {
            t >= self.t_start && t <= self.t_end()
        }
    }

    fn locate(&self, t: f64) -> Option<AxisCell> {
        if self.frame_count == 1 {
            return t.is_finite().then_some(AxisCell { idx: 0, frac: 0.0 });
        }
        locate_axis(t, self.t_start, self.t_step, self.frame_count)
    }
}

/// One named scalar attribute, stored frame-major then node-major.
#[derive(Debug, Clone)]
struct ScalarSeries {
    name: String,
    values: Vec<f64>,
}

/// Time series of one vector field plus named scalar attributes on a shared
/// uniform grid. Immutable after construction.
#[derive(Debug, Clone)]
pub struct MultifieldDataset {
    grid: GridSpec,
    time: TimeAxis,
    components: usize,
    velocity: Vec<f64>,
    scalars: Vec<ScalarSeries>,
}

impl MultifieldDataset {
    /// `velocity` is frame-major, then node-major (x fastest), with
    /// `grid.dim()` interleaved components per node. Each scalar array is
    /// frame-major then node-major. All values must be finite.
    pub fn new(
        grid: GridSpec,
        time: TimeAxis,
        velocity: Vec<f64>,
        scalars: Vec<(String, Vec<f64>)>,
    ) -> Result<Self> {
        let nodes = grid.node_count();
        let frames = time.frame_count();
        let comps = grid.dim();
        let want_vel = nodes * frames * comps;
        if velocity.len() != want_vel {
            return Err(Error::invalid_data(
                "velocity field",
                format!("expected {want_vel} values, found {}", velocity.len()),
            ));
        }
        if let Some(bad) = velocity.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid_data("velocity field", format!("non-finite value {bad}")));
        }
        let want_scalar = nodes * frames;
        let mut series = Vec::with_capacity(scalars.len());
        for (name, values) in scalars {
            if values.len() != want_scalar {
                return Err(Error::invalid_data(
                    format!("scalar field '{name}'"),
                    format!("expected {want_scalar} values, found {}", values.len()),
                ));
            }
            if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::invalid_data(
                    format!("scalar field '{name}'"),
                    format!("non-finite value {bad}"),
                ));
            }
            series.push(ScalarSeries { name, values });
        }
        Ok(MultifieldDataset {
            grid,
            time,
            components: comps,
            velocity,
            scalars: series,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn time(&self) -> &TimeAxis {
        &self.time
    }

    pub fn scalar_count(&self) -> usize {
        self.scalars.len()
    }

    pub fn scalar_name(&self, attr: usize) -> Option<&str> {
        self.scalars.get(attr).map(|s| s.name.as_str())
    }

    pub fn scalar_names(&self) -> Vec<String> {
        self.scalars.iter().map(|s| s.name.clone()).collect()
    }

    /// Raw scalar values, frame-major then node-major.
    pub fn scalar_values(&self, attr: usize) -> Result<&[f64]> {
        self.scalars
            .get(attr)
            .map(|s| s.values.as_slice())
            .ok_or(Error::UnknownAttribute {
                index: attr,
                count: self.scalars.len(),
            })
    }

    /// Raw velocity values, frame-major, node-major, component fastest.
    pub fn velocity_values(&self) -> &[f64] {
        &self.velocity
    }

    /// Physical extents: (min corner, max corner, t_start, t_end).
    pub fn bounds(&self) -> (Point, Point, f64, f64) {
        (
            self.grid.min_corner(),
            self.grid.max_corner(),
            self.time.t_start(),
            self.time.t_end(),
        )
    }

    /// Velocity at time `t` and position `x`, multilinear in space and
    /// linear in time.
    pub fn sample_velocity(&self, t: f64, x: Point) -> Result<Point> {
        let cell = self.grid.locate(x).ok_or_else(|| self.grid.out_of_domain(x))?;
        let tc = self.time.locate(t).ok_or(Error::OutOfTimeRange {
            t,
            t_start: self.time.t_start(),
            t_end: self.time.t_end(),
        })?;
        Ok(self.velocity_at(&cell, &tc))
    }

    /// Scalar attribute `attr` at time `t` and position `x`, same
    /// interpolation scheme as [`sample_velocity`](Self::sample_velocity).
    pub fn sample_scalar(&self, attr: usize, t: f64, x: Point) -> Result<f64> {
        if attr >= self.scalars.len() {
            return Err(Error::UnknownAttribute {
                index: attr,
                count: self.scalars.len(),
            });
        }
        let cell = self.grid.locate(x).ok_or_else(|| self.grid.out_of_domain(x))?;
        let tc = self.time.locate(t).ok_or(Error::OutOfTimeRange {
            t,
            t_start: self.time.t_start(),
            t_end: self.time.t_end(),
        })?;
        Ok(self.scalar_at(attr, &cell, &tc))
    }

    /// Infallible velocity lookup for the integrator: `None` means the
    /// position left the grid. The time must already be on the axis.
    #[inline]
    pub(crate) fn try_velocity(&self, t: f64, x: Point) -> Option<Point> {
        let cell = self.grid.locate(x)?;
        let tc = self.time.locate(t)?;
        Some(self.velocity_at(&cell, &tc))
    }

    #[inline]
    pub(crate) fn scalar_at_point(&self, attr: usize, t: f64, x: Point) -> Option<f64> {
        let cell = self.grid.locate(x)?;
        let tc = self.time.locate(t)?;
        Some(self.scalar_at(attr, &cell, &tc))
    }

    fn velocity_at(&self, cell: &[AxisCell; 3], tc: &AxisCell) -> Point {
        let nodes = self.grid.node_count();
        let comps = self.components;
        let mut out = [0.0; 3];
        let frame0 = tc.idx * nodes * comps;
        for c in 0..comps {
            let v0 = self.interp_spatial(&self.velocity[frame0..frame0 + nodes * comps], comps, c, cell);
            out[c] = if tc.frac == 0.0 {
                v0
            } else {
                let frame1 = (tc.idx + 1) * nodes * comps;
                let v1 =
                    self.interp_spatial(&self.velocity[frame1..frame1 + nodes * comps], comps, c, cell);
                lerp(v0, v1, tc.frac)
            };
        }
        out
    }

    fn scalar_at(&self, attr: usize, cell: &[AxisCell; 3], tc: &AxisCell) -> f64 {
        let nodes = self.grid.node_count();
        let values = &self.scalars[attr].values;
        let frame0 = tc.idx * nodes;
        let v0 = self.interp_spatial(&values[frame0..frame0 + nodes], 1, 0, cell);
        if tc.frac == 0.0 {
            v0
        } else {
            let frame1 = (tc.idx + 1) * nodes;
            let v1 = self.interp_spatial(&values[frame1..frame1 + nodes], 1, 0, cell);
            lerp(v0, v1, tc.frac)
        }
    }

    /// Multilinear interpolation of one component within a single frame.
    /// `data` is node-major with `stride` interleaved components.
    #[inline]
    fn interp_spatial(&self, data: &[f64], stride: usize, comp: usize, cell: &[AxisCell; 3]) -> f64 {
        let [nx, ny, _] = self.grid.dims;
        let x = &cell[0];
        let y = &cell[1];
        let xi = x.idx;
        let xn = (x.idx + 1).min(nx - 1);
        let yi = y.idx;
        let yn = (y.idx + 1).min(ny - 1);
        let fetch = |i: usize, j: usize, k: usize| -> f64 {
            data[(i + nx * (j + ny * k)) * stride + comp]
        };
        let bilinear = |k: usize| -> f64 {
            let v0 = lerp(fetch(xi, yi, k), fetch(xn, yi, k), x.frac);
            let v1 = lerp(fetch(xi, yn, k), fetch(xn, yn, k), x.frac);
            lerp(v0, v1, y.frac)
        };
        if self.grid.dim == 2 {
            bilinear(0)
        } else {
            let z = &cell[2];
            let zn = (z.idx + 1).min(self.grid.dims[2] - 1);
            let v0 = bilinear(z.idx);
            if z.frac == 0.0 {
                v0
            } else {
                lerp(v0, bilinear(zn), z.frac)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::testutil::steady_2d;

    fn unit_grid_2d(n: usize) -> GridSpec {
        GridSpec::new_2d([n, n], [1.0, 1.0], [0.0, 0.0]).unwrap()
    }

    #[test]
    fn bounds_from_spec() {
        let g = GridSpec::new_2d([3, 3], [1.0, 1.0], [0.0, 0.0]).unwrap();
        assert_eq!(g.min_corner(), [0.0, 0.0, 0.0]);
        assert_eq!(g.max_corner(), [2.0, 2.0, 0.0]);

        let g = GridSpec::new_2d([2, 4], [0.5, 0.5], [-1.0, 0.0]).unwrap();
        assert_eq!(g.max_corner(), [-0.5, 1.5, 0.0]);

        let ds = steady_2d(unit_grid_2d(3), |_, _| [0.0, 0.0], &[]);
        let (_, _, t0, t1) = ds.bounds();
        assert_eq!(t0, t1); // single frame
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new_2d([1, 3], [1.0, 1.0], [0.0, 0.0]).is_err());
        assert!(GridSpec::new_2d([3, 3], [0.0, 1.0], [0.0, 0.0]).is_err());
        assert!(GridSpec::new_3d([3, 3, 2], [1.0, 1.0, 0.25], [0.0; 3]).is_ok());
        assert!(TimeAxis::new(0.0, 0.1, 0).is_err());
        assert!(TimeAxis::new(0.0, -1.0, 2).is_err());
    }

    #[test]
    fn node_indexing_roundtrip() {
        let g = GridSpec::new_3d([4, 3, 2], [1.0, 1.0, 1.0], [0.0; 3]).unwrap();
        assert_eq!(g.node_count(), 24);
        for flat in 0..g.node_count() {
            assert_eq!(g.node_index(g.node_ijk(flat)), flat);
        }
        // x fastest
        assert_eq!(g.node_index([1, 0, 0]), 1);
        assert_eq!(g.node_index([0, 1, 0]), 4);
        assert_eq!(g.node_index([0, 0, 1]), 12);
    }

    #[test]
    fn constant_field_everywhere() {
        let ds = steady_2d(unit_grid_2d(4), |_, _| [1.0, 0.0], &[("c", &|_, _| 7.25)]);
        for &(x, y) in &[(0.0, 0.0), (1.5, 2.25), (3.0, 3.0), (0.1, 2.9)] {
            assert_eq!(ds.sample_velocity(0.0, [x, y, 0.0]).unwrap(), [1.0, 0.0, 0.0]);
            assert_eq!(ds.sample_scalar(0, 0.0, [x, y, 0.0]).unwrap(), 7.25);
        }
    }

    #[test]
    fn nodal_values_reproduced_bit_exact() {
        let g = GridSpec::new_2d([5, 4], [0.1, 0.3], [-0.2, 0.7]).unwrap();
        let ds = steady_2d(g.clone(), |x, y| [x * y, x - y], &[("f", &|x, y| x.sin() + y)]);
        for flat in 0..g.node_count() {
            let ijk = g.node_ijk(flat);
            let p = g.node_position(ijk);
            let v = ds.sample_velocity(0.0, p).unwrap();
            let vel = ds.velocity_values();
            assert_eq!(v[0].to_bits(), vel[flat * 2].to_bits());
            assert_eq!(v[1].to_bits(), vel[flat * 2 + 1].to_bits());
            let s = ds.sample_scalar(0, 0.0, p).unwrap();
            assert_eq!(s.to_bits(), ds.scalar_values(0).unwrap()[flat].to_bits());
        }
    }

    #[test]
    fn linear_field_reproduced() {
        // affine velocity on a 3x3 grid: interpolation must be exact at
        // interior points too
        let ds = steady_2d(unit_grid_2d(3), |x, y| [2.0 * x - y + 0.5, x + 3.0 * y], &[]);
        for &(x, y) in &[(0.5, 0.5), (1.25, 0.75), (1.999, 0.001), (2.0, 2.0)] {
            let v = ds.sample_velocity(0.0, [x, y, 0.0]).unwrap();
            let want = [2.0 * x - y + 0.5, x + 3.0 * y];
            assert!((v[0] - want[0]).abs() <= 1e-12 * want[0].abs().max(1.0));
            assert!((v[1] - want[1]).abs() <= 1e-12 * want[1].abs().max(1.0));
        }
    }

    #[test]
    fn bilinear_closed_form() {
        // f(x,y) = x on a unit grid: value at (0.5, 0.25) is 0.5
        let ds = steady_2d(unit_grid_2d(3), |_, _| [0.0, 0.0], &[("f", &|x, _| x)]);
        assert_eq!(ds.sample_scalar(0, 0.0, [0.5, 0.25, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn linear_time_interpolation() {
        // v(t,x) = (t, 0) stored at frames t = 0 and t = 1
        let g = unit_grid_2d(2);
        let time = TimeAxis::new(0.0, 1.0, 2).unwrap();
        let nodes = g.node_count();
        let mut vel = Vec::new();
        for frame in 0..2 {
            for _ in 0..nodes {
                vel.push(frame as f64);
                vel.push(0.0);
            }
        }
        let ds = MultifieldDataset::new(g, time, vel, vec![]).unwrap();
        let v = ds.sample_velocity(0.5, [0.5, 0.5, 0.0]).unwrap();
        assert_eq!(v, [0.5, 0.0, 0.0]);
        let v = ds.sample_velocity(1.0, [0.5, 0.5, 0.0]).unwrap();
        assert_eq!(v, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn trilinear_3d() {
        let g = GridSpec::new_3d([3, 3, 3], [1.0, 1.0, 1.0], [0.0; 3]).unwrap();
        let time = TimeAxis::new(0.0, 1.0, 1).unwrap();
        let nodes = g.node_count();
        let mut vel = vec![0.0; nodes * 3];
        let mut f = vec![0.0; nodes];
        for flat in 0..nodes {
            let p = g.node_position(g.node_ijk(flat));
            vel[flat * 3] = p[2];
            f[flat] = p[0] + 2.0 * p[1] + 4.0 * p[2];
        }
        let ds = MultifieldDataset::new(g, time, vel, vec![("f".into(), f)]).unwrap();
        let s = ds.sample_scalar(0, 0.0, [0.5, 0.5, 0.5]).unwrap();
        assert!((s - 3.5).abs() < 1e-12);
        let v = ds.sample_velocity(0.0, [0.25, 1.75, 1.5]).unwrap();
        assert!((v[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_errors() {
        let ds = steady_2d(unit_grid_2d(3), |_, _| [0.0, 0.0], &[("f", &|_, _| 0.0)]);
        assert!(matches!(
            ds.sample_velocity(0.0, [-0.1, 0.0, 0.0]),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            ds.sample_velocity(0.0, [2.0001, 0.0, 0.0]),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            ds.sample_scalar(3, 0.0, [0.0, 0.0, 0.0]),
            Err(Error::UnknownAttribute { .. })
        ));
        // steady fields accept any finite time
        assert!(ds.sample_scalar(0, 123.0, [0.0, 0.0, 0.0]).is_ok());
        // unsteady fields reject times off the axis
        let time = TimeAxis::new(0.0, 1.0, 2).unwrap();
        let g = unit_grid_2d(2);
        let vel = vec![0.0; g.node_count() * 2 * 2];
        let uds = MultifieldDataset::new(g, time, vel, vec![]).unwrap();
        assert!(matches!(
            uds.sample_velocity(1.5, [0.0, 0.0, 0.0]),
            Err(Error::OutOfTimeRange { .. })
        ));
    }

    #[test]
    fn boundary_points_are_inside() {
        let ds = steady_2d(unit_grid_2d(3), |x, y| [x, y], &[]);
        // corners and edges of the closed box interpolate from boundary cells
        let v = ds.sample_velocity(0.0, [2.0, 2.0, 0.0]).unwrap();
        assert_eq!(v[0], 2.0);
        let v = ds.sample_velocity(0.0, [2.0, 0.5, 0.0]).unwrap();
        assert_eq!(v[0], 2.0);
    }

    #[test]
    fn sampling_is_pure() {
        let ds = steady_2d(unit_grid_2d(4), |x, y| [x * y + 0.3, y], &[("f", &|x, y| x / (y + 1.5))]);
        let p = [1.37, 2.11, 0.0];
        let a = ds.sample_velocity(0.0, p).unwrap();
        let b = ds.sample_velocity(0.0, p).unwrap();
        assert_eq!(a[0].to_bits(), b[0].to_bits());
        assert_eq!(a[1].to_bits(), b[1].to_bits());
        let s1 = ds.sample_scalar(0, 0.0, p).unwrap();
        let s2 = ds.sample_scalar(0, 0.0, p).unwrap();
        assert_eq!(s1.to_bits(), s2.to_bits());
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = unit_grid_2d(2);
        let time = TimeAxis::new(0.0, 1.0, 1).unwrap();
        let mut vel = vec![0.0; g.node_count() * 2];
        vel[3] = f64::NAN;
        assert!(MultifieldDataset::new(g, time, vel, vec![]).is_err());
    }
}
