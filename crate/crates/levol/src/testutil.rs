//! Dataset builders shared by unit tests.

use crate::grid::{GridSpec, MultifieldDataset, TimeAxis};

/// Steady 2D dataset from nodal closures of (x, y).
pub fn steady_2d(
    grid: GridSpec,
    vel: impl Fn(f64, f64) -> [f64; 2],
    scalars: &[(&str, &dyn Fn(f64, f64) -> f64)],
) -> MultifieldDataset {
    let time = TimeAxis::new(0.0, 1.0, 1).unwrap();
    let nodes = grid.node_count();
    let mut v = Vec::with_capacity(nodes * 2);
    for flat in 0..nodes {
        let p = grid.node_position(grid.node_ijk(flat));
        let [u, w] = vel(p[0], p[1]);
        v.push(u);
        v.push(w);
    }
    let fields = scalars
        .iter()
        .map(|(name, f)| {
            let vals = (0..nodes)
                .map(|flat| {
                    let p = grid.node_position(grid.node_ijk(flat));
                    f(p[0], p[1])
                })
                .collect();
            (name.to_string(), vals)
        })
        .collect();
    MultifieldDataset::new(grid, time, v, fields).unwrap()
}

/// Unsteady 2D dataset from nodal closures of (t, x, y).
pub fn unsteady_2d(
    grid: GridSpec,
    time: TimeAxis,
    vel: impl Fn(f64, f64, f64) -> [f64; 2],
    scalars: &[(&str, &dyn Fn(f64, f64, f64) -> f64)],
) -> MultifieldDataset {
    let nodes = grid.node_count();
    let frames = time.frame_count();
    let mut v = Vec::with_capacity(nodes * frames * 2);
    for frame in 0..frames {
        let t = time.frame_time(frame);
        for flat in 0..nodes {
            let p = grid.node_position(grid.node_ijk(flat));
            let [u, w] = vel(t, p[0], p[1]);
            v.push(u);
            v.push(w);
        }
    }
    let fields = scalars
        .iter()
        .map(|(name, f)| {
            let mut vals = Vec::with_capacity(nodes * frames);
            for frame in 0..frames {
                let t = time.frame_time(frame);
                for flat in 0..nodes {
                    let p = grid.node_position(grid.node_ijk(flat));
                    vals.push(f(t, p[0], p[1]));
                }
            }
            (name.to_string(), vals)
        })
        .collect();
    MultifieldDataset::new(grid, time, v, fields).unwrap()
}
