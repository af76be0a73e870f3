//! Lifting trajectories into attribute space and reducing them to moment
//! feature vectors.
//!
//! Each physical-space trajectory is lifted to a data-space trajectory by
//! interpolating every scalar attribute at its space-time samples
//! (optionally including the spatial coordinates themselves). The lifted
//! trajectory is then summarized per channel by statistical moments: the
//! mean and central moments of the selected orders.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, MultifieldDataset};
use crate::integrate::{integrate_pathline, IntegrationConfig, Trajectory};

/// A trajectory in data space: one tuple of channel values per sample.
#[derive(Debug, Clone)]
pub struct DataTrajectory {
    channels: usize,
    include_space: bool,
    /// Sample-major, channel fastest.
    samples: Vec<f64>,
}

impl DataTrajectory {
    pub fn from_samples(channels: usize, include_space: bool, samples: Vec<f64>) -> Self {
        assert!(channels > 0 && samples.len().is_multiple_of(channels));
        DataTrajectory {
            channels,
            include_space,
            samples,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn include_space(&self) -> bool {
        self.include_space
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len() / self.channels
    }

    pub fn sample(&self, m: usize) -> &[f64] {
        &self.samples[m * self.channels..(m + 1) * self.channels]
    }

    fn channel_iter(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().skip(c).step_by(self.channels).copied()
    }
}

/// Sample every scalar attribute along a trajectory.
///
/// Sample `m` holds the attributes interpolated at `(x^m, t^m)`; with
/// `include_space` the spatial coordinates are prepended to each tuple.
/// Samples past `valid_count` (the frozen tail) repeat the tuple lifted at
/// the exit sample rather than re-sampling at later times.
pub fn lift_trajectory(
    ds: &MultifieldDataset,
    traj: &Trajectory,
    include_space: bool,
) -> Result<DataTrajectory> {
    let dim = ds.grid().dim();
    let n_attr = ds.scalar_count();
    let width = if include_space { dim + n_attr } else { n_attr };
    if width == 0 {
        return Err(Error::invalid_data(
            "lift",
            "dataset has no scalar attributes and spatial lifting is disabled",
        ));
    }
    let count = traj.len();
    let live = traj.valid_count().min(count);
    let mut samples = Vec::with_capacity(count * width);
    for m in 0..live {
        let x = traj.positions()[m];
        let t = traj.times()[m];
        if include_space {
            samples.extend_from_slice(&x[..dim]);
        }
        for attr in 0..n_attr {
            let v = ds.scalar_at_point(attr, t, x).ok_or_else(|| {
                let (min, max, _, _) = ds.bounds();
                Error::OutOfDomain {
                    position: x[..dim].to_vec(),
                    min: min[..dim].to_vec(),
                    max: max[..dim].to_vec(),
                }
            })?;
            samples.push(v);
        }
    }
    if live < count {
        let from = (live - 1) * width;
        let exit_row: Vec<f64> = samples[from..from + width].to_vec();
        for _ in live..count {
            samples.extend_from_slice(&exit_row);
        }
    }
    Ok(DataTrajectory::from_samples(width, include_space, samples))
}

/// Which moments summarize a lifted channel.
///
/// Order 1 is the arithmetic mean; order k >= 2 is the k-th central moment
/// (population normalization, 1/N). With `root_normalize` each central
/// moment is mapped to `sign(m) * |m|^(1/k)` so all entries carry the units
/// of the channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSpec {
    orders: Vec<u8>,
    root_normalize: bool,
}

impl MomentSpec {
    pub const MAX_ORDER: u8 = 5;

    pub fn new(orders: &[u8], root_normalize: bool) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidConfig("moment orders must be non-empty".into()));
        }
        let mut sorted = orders.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted[0] < 1 || *sorted.last().unwrap() > Self::MAX_ORDER {
            return Err(Error::InvalidConfig(format!(
                "moment orders must lie in 1..={}, got {orders:?}",
                Self::MAX_ORDER
            )));
        }
        Ok(MomentSpec {
            orders: sorted,
            root_normalize,
        })
    }

    /// The default parameterization: mean and variance.
    pub fn mean_and_variance() -> Self {
        MomentSpec {
            orders: vec![1, 2],
            root_normalize: false,
        }
    }

    pub fn orders(&self) -> &[u8] {
        &self.orders
    }

    pub fn root_normalize(&self) -> bool {
        self.root_normalize
    }

    pub fn order_count(&self) -> usize {
        self.orders.len()
    }
}

impl Default for MomentSpec {
    fn default() -> Self {
        MomentSpec::mean_and_variance()
    }
}

/// Reduce a lifted trajectory to one moment block per channel
/// (channel-major, then moment order).
///
/// Means are computed relative to the first sample (a provisional mean),
/// which keeps them exact for constant channels and well conditioned for
/// nearly constant ones; central moments then accumulate exact zeros there.
pub fn compute_moments(dt: &DataTrajectory, spec: &MomentSpec) -> Result<Vec<f64>> {
    let n = dt.sample_count();
    if n == 0 {
        return Err(Error::EmptyTrajectory);
    }
    let inv_n = 1.0 / n as f64;
    let mut out = Vec::with_capacity(dt.channels() * spec.order_count());
    for c in 0..dt.channels() {
        let first = dt.sample(0)[c];
        let mut shift_sum = 0.0;
        for v in dt.channel_iter(c) {
            shift_sum += v - first;
        }
        let mean = first + shift_sum * inv_n;
        for &order in spec.orders() {
            if order == 1 {
                out.push(mean);
                continue;
            }
            let k = order as i32;
            let mut acc = 0.0;
            for v in dt.channel_iter(c) {
                acc += (v - mean).powi(k);
            }
            let central = acc * inv_n;
            out.push(if spec.root_normalize() {
                central.signum() * central.abs().powf(1.0 / order as f64)
            } else {
                central
            });
        }
    }
    Ok(out)
}

/// Moment vectors for every grid node, with the provenance needed to label
/// outputs.
#[derive(Debug, Clone)]
pub struct FeatureField {
    grid: GridSpec,
    feature_len: usize,
    values: Vec<f64>,
    channel_names: Vec<String>,
    spec: MomentSpec,
    t0: f64,
    duration: f64,
    intervals: usize,
    include_space: bool,
}

impl FeatureField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Entries per node: channels x selected moment orders.
    pub fn feature_len(&self) -> usize {
        self.feature_len
    }

    pub fn feature(&self, node: usize) -> &[f64] {
        &self.values[node * self.feature_len..(node + 1) * self.feature_len]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn moment_spec(&self) -> &MomentSpec {
        &self.spec
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn include_space(&self) -> bool {
        self.include_space
    }

    /// Standardize each feature entry to zero mean and unit spread across
    /// nodes (entries with zero spread are centered only). Exposed for
    /// experiments that mix channels with different units.
    pub fn standardize(&mut self) {
        let nodes = self.grid.node_count();
        if nodes == 0 {
            return;
        }
        for e in 0..self.feature_len {
            let mut sum = 0.0;
            for node in 0..nodes {
                sum += self.values[node * self.feature_len + e];
            }
            let mean = sum / nodes as f64;
            let mut var = 0.0;
            for node in 0..nodes {
                let d = self.values[node * self.feature_len + e] - mean;
                var += d * d;
            }
            let std = (var / nodes as f64).sqrt();
            let inv = if std > 0.0 { 1.0 / std } else { 1.0 };
            for node in 0..nodes {
                let v = &mut self.values[node * self.feature_len + e];
                *v = (*v - mean) * inv;
            }
        }
    }
}

/// Integrate, lift, and summarize a trajectory for every grid node.
pub fn feature_field(
    ds: &MultifieldDataset,
    cfg: &IntegrationConfig,
    spec: &MomentSpec,
    include_space: bool,
) -> Result<FeatureField> {
    cfg.validate(ds)?;
    let grid = ds.grid().clone();
    let dim = grid.dim();
    let n_attr = ds.scalar_count();
    let width = if include_space { dim + n_attr } else { n_attr };
    if width == 0 {
        return Err(Error::invalid_data(
            "feature field",
            "dataset has no scalar attributes and spatial lifting is disabled",
        ));
    }
    let feature_len = width * spec.order_count();
    let nodes = grid.node_count();
    let mut values = vec![0.0; nodes * feature_len];
    values
        .par_chunks_mut(feature_len)
        .enumerate()
        .try_for_each(|(flat, out)| -> Result<()> {
            let seed = grid.node_position(grid.node_ijk(flat));
            let traj = integrate_pathline(ds, seed, cfg)?;
            let lifted = lift_trajectory(ds, &traj, include_space)?;
            let moments = compute_moments(&lifted, spec)?;
            out.copy_from_slice(&moments);
            Ok(())
        })?;

    let mut channel_names = Vec::with_capacity(width);
    if include_space {
        for axis in ["x", "y", "z"].iter().take(dim) {
            channel_names.push(axis.to_string());
        }
    }
    channel_names.extend(ds.scalar_names());

    Ok(FeatureField {
        grid,
        feature_len,
        values,
        channel_names,
        spec: spec.clone(),
        t0: cfg.t0,
        duration: cfg.duration,
        intervals: cfg.intervals,
        include_space,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::testutil::steady_2d;

    fn dt(channels: usize, samples: &[f64]) -> DataTrajectory {
        DataTrajectory::from_samples(channels, false, samples.to_vec())
    }

    /// Plain two-pass oracle: explicit sums, no shifting.
    fn oracle_moments(samples: &[f64], orders: &[u8]) -> Vec<f64> {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        orders
            .iter()
            .map(|&k| {
                if k == 1 {
                    mean
                } else {
                    samples.iter().map(|s| (s - mean).powi(k as i32)).sum::<f64>() / n
                }
            })
            .collect()
    }

    #[test]
    fn hand_computed_moments() {
        let spec = MomentSpec::new(&[1, 2], false).unwrap();
        let got = compute_moments(&dt(1, &[1.0, 2.0, 3.0]), &spec).unwrap();
        assert_eq!(got[0], 2.0);
        assert_eq!(got[1], 2.0 / 3.0);
    }

    #[test]
    fn third_moment_confirmed_by_oracle() {
        // samples (0,0,0,4): centered samples (-1,-1,-1,3), mu2 = 3,
        // mu3 = (-1-1-1+27)/4 = 6
        let samples = [0.0, 0.0, 0.0, 4.0];
        let expect = oracle_moments(&samples, &[1, 2, 3]);
        assert_eq!(expect, vec![1.0, 3.0, 6.0]);
        let spec = MomentSpec::new(&[1, 2, 3], false).unwrap();
        let got = compute_moments(&dt(1, &samples), &spec).unwrap();
        assert_eq!(got, vec![1.0, 3.0, 6.0]);
    }

    #[test]
    fn constant_channel_is_exact() {
        let spec = MomentSpec::new(&[1, 2, 3, 4, 5], false).unwrap();
        let c = 0.1 + 0.2; // not exactly representable as a round constant
        let got = compute_moments(&dt(1, &[c; 7]), &spec).unwrap();
        assert_eq!(got[0].to_bits(), c.to_bits());
        for k in 1..5 {
            assert_eq!(got[k], 0.0);
        }
    }

    #[test]
    fn single_sample_trajectory() {
        let spec = MomentSpec::new(&[1, 2], false).unwrap();
        let got = compute_moments(&dt(2, &[3.5, -1.25]), &spec).unwrap();
        assert_eq!(got, vec![3.5, 0.0, -1.25, 0.0]);
    }

    #[test]
    fn root_normalization() {
        let spec = MomentSpec::new(&[2], true).unwrap();
        // variance 4 -> spread 2
        let got = compute_moments(&dt(1, &[-2.0, 2.0]), &spec).unwrap();
        assert_eq!(got, vec![2.0]);
        // odd order keeps the sign
        let spec = MomentSpec::new(&[3], true).unwrap();
        let m3 = oracle_moments(&[0.0, 0.0, 8.0], &[3])[0];
        let got = compute_moments(&dt(1, &[0.0, 0.0, 8.0]), &spec).unwrap();
        assert!((got[0] - m3.signum() * m3.abs().powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn moment_spec_validation() {
        assert!(MomentSpec::new(&[], false).is_err());
        assert!(MomentSpec::new(&[0], false).is_err());
        assert!(MomentSpec::new(&[6], false).is_err());
        let spec = MomentSpec::new(&[2, 1, 2], false).unwrap();
        assert_eq!(spec.orders(), &[1, 2]);
    }

    #[test]
    fn empty_trajectory_rejected() {
        let spec = MomentSpec::default();
        assert!(matches!(
            compute_moments(&dt(1, &[]), &spec),
            Err(Error::EmptyTrajectory)
        ));
    }

    #[test]
    fn matches_oracle_on_random_data() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let spec = MomentSpec::new(&[1, 2, 3, 4, 5], false).unwrap();
        for _ in 0..200 {
            let n = rng.gen_range(1..40);
            let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let got = compute_moments(&dt(1, &samples), &spec).unwrap();
            let want = oracle_moments(&samples, spec.orders());
            for (k, (&g, &w)) in got.iter().zip(&want).enumerate() {
                let order = spec.orders()[k] as i32;
                let mean = want[0];
                let scale: f64 = if order == 1 {
                    samples.iter().map(|s| s.abs()).sum::<f64>() / n as f64
                } else {
                    samples.iter().map(|s| (s - mean).abs().powi(order)).sum::<f64>() / n as f64
                };
                assert!(
                    (g - w).abs() <= 1e-12 * scale.max(1e-300),
                    "order {order}: {g} vs {w}"
                );
            }
        }
    }

    #[test]
    fn shift_property_bit_level() {
        // integer samples, power-of-two length, integer shift: the mean
        // shifts exactly and central moments are bitwise unchanged
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let spec = MomentSpec::new(&[1, 2, 3, 4, 5], false).unwrap();
        for _ in 0..100 {
            let n = 1usize << rng.gen_range(0..6);
            let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-1000..1000) as f64).collect();
            let c = rng.gen_range(-1_000_000..1_000_000) as f64;
            let shifted: Vec<f64> = samples.iter().map(|s| s + c).collect();
            let a = compute_moments(&dt(1, &samples), &spec).unwrap();
            let b = compute_moments(&dt(1, &shifted), &spec).unwrap();
            assert_eq!(b[0].to_bits(), (a[0] + c).to_bits());
            for k in 1..a.len() {
                assert_eq!(b[k].to_bits(), a[k].to_bits());
            }
        }
    }

    #[test]
    fn scale_property() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let spec = MomentSpec::new(&[1, 2, 3], false).unwrap();
        for _ in 0..100 {
            let n = rng.gen_range(2..30);
            let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let s = rng.gen_range(0.1..10.0);
            let scaled: Vec<f64> = samples.iter().map(|v| v * s).collect();
            let a = compute_moments(&dt(1, &samples), &spec).unwrap();
            let b = compute_moments(&dt(1, &scaled), &spec).unwrap();
            let mean = a[0];
            for (k, &order) in spec.orders().iter().enumerate() {
                let want = a[k] * s.powi(order as i32);
                // odd central moments can be tiny from cancellation; use
                // the absolute moment as the conditioning scale
                let abs_moment = samples
                    .iter()
                    .map(|v| (v - mean).abs().powi(order as i32))
                    .sum::<f64>()
                    / n as f64;
                let scale = s.powi(order as i32) * abs_moment.max(1e-6);
                assert!((b[k] - want).abs() <= 1e-12 * scale, "order {order}");
            }
        }
    }

    #[test]
    fn stationary_particle_lifts_seed_value() {
        let g = GridSpec::new_2d([5, 5], [0.25, 0.25], [0.0, 0.0]).unwrap();
        let ds = steady_2d(g, |_, _| [0.0, 0.0], &[("f", &|x, _| x)]);
        let cfg = IntegrationConfig::new(0.0, 1.0, 4);
        let traj = integrate_pathline(&ds, [0.3, 0.0, 0.0], &cfg).unwrap();
        let lifted = lift_trajectory(&ds, &traj, false).unwrap();
        assert_eq!(lifted.sample_count(), 5);
        for m in 0..5 {
            assert!((lifted.sample(m)[0] - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn advected_sample_sequence() {
        // uniform v = (1, 0), steady f(x, y) = x, seed (0, 0), T = 1, M = 4:
        // samples are (0, 0.25, 0.5, 0.75, 1.0)
        let g = GridSpec::new_2d([5, 2], [0.25, 1.0], [0.0, 0.0]).unwrap();
        let ds = steady_2d(g, |_, _| [1.0, 0.0], &[("f", &|x, _| x)]);
        let cfg = IntegrationConfig::new(0.0, 1.0, 4);
        let traj = integrate_pathline(&ds, [0.0, 0.0, 0.0], &cfg).unwrap();
        let lifted = lift_trajectory(&ds, &traj, false).unwrap();
        let got: Vec<f64> = (0..5).map(|m| lifted.sample(m)[0]).collect();
        assert_eq!(got, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn include_space_prepends_coordinates() {
        let g = GridSpec::new_2d([3, 3], [1.0, 1.0], [0.0, 0.0]).unwrap();
        let ds = steady_2d(g, |_, _| [0.0, 0.0], &[("f", &|_, _| 2.0)]);
        let cfg = IntegrationConfig::new(0.0, 1.0, 2);
        let traj = integrate_pathline(&ds, [1.0, 2.0, 0.0], &cfg).unwrap();
        let lifted = lift_trajectory(&ds, &traj, true).unwrap();
        assert_eq!(lifted.channels(), 3);
        assert_eq!(lifted.sample(0), &[1.0, 2.0, 2.0]);
    }

    #[test]
    fn frozen_tail_repeats_exit_tuple() {
        // unsteady scalar would change value at later times; the frozen
        // tail must repeat the tuple lifted at the exit sample instead
        let g = GridSpec::new_2d([3, 3], [1.0, 1.0], [0.0, 0.0]).unwrap();
        let time = crate::grid::TimeAxis::new(0.0, 1.0, 3).unwrap();
        let ds = crate::testutil::unsteady_2d(g, time, |_, _, _| [1.0, 0.0], &[("f", &|t, _, _| t)]);
        let cfg = IntegrationConfig::new(0.0, 2.0, 4);
        let traj = integrate_pathline(&ds, [1.5, 1.0, 0.0], &cfg).unwrap();
        assert!(traj.valid_count() < traj.len());
        let lifted = lift_trajectory(&ds, &traj, false).unwrap();
        let exit = lifted.sample(traj.valid_count() - 1)[0];
        for m in traj.valid_count()..lifted.sample_count() {
            assert_eq!(lifted.sample(m)[0], exit);
        }
    }

    #[test]
    fn feature_field_constant_scalar() {
        let g = GridSpec::new_2d([6, 5], [0.5, 0.5], [0.0, 0.0]).unwrap();
        let ds = steady_2d(g, |x, y| [-y + 1.0, x - 1.0], &[("c", &|_, _| 4.5)]);
        let cfg = IntegrationConfig::new(0.0, 0.5, 8);
        let ff = feature_field(&ds, &cfg, &MomentSpec::default(), false).unwrap();
        for node in 0..ff.grid().node_count() {
            assert_eq!(ff.feature(node), &[4.5, 0.0]);
        }
    }

    #[test]
    fn feature_field_short_window_approaches_nodal_values() {
        let g = GridSpec::new_2d([5, 5], [0.25, 0.25], [0.0, 0.0]).unwrap();
        let ds = steady_2d(g, |_, _| [1.0, 1.0], &[("f", &|x, y| x + y)]);
        let cfg = IntegrationConfig::new(0.0, 1e-12, 1);
        let spec = MomentSpec::new(&[1], false).unwrap();
        let ff = feature_field(&ds, &cfg, &spec, false).unwrap();
        for node in 0..ff.grid().node_count() {
            let p = g_pos(&ds, node);
            assert!((ff.feature(node)[0] - (p[0] + p[1])).abs() < 1e-9);
        }
    }

    #[test]
    fn feature_field_stationary_mean_is_nodal_scalar() {
        let g = GridSpec::new_2d([5, 4], [0.25, 0.25], [0.0, 0.0]).unwrap();
        let ds = steady_2d(g, |_, _| [0.0, 0.0], &[("f", &|x, _| 3.0 * x)]);
        let cfg = IntegrationConfig::new(0.0, 1.0, 4);
        let spec = MomentSpec::new(&[1], false).unwrap();
        let ff = feature_field(&ds, &cfg, &spec, false).unwrap();
        for node in 0..ff.grid().node_count() {
            let stored = ds.scalar_values(0).unwrap()[node];
            assert_eq!(ff.feature(node)[0].to_bits(), stored.to_bits());
        }
    }

    fn g_pos(ds: &MultifieldDataset, flat: usize) -> [f64; 3] {
        ds.grid().node_position(ds.grid().node_ijk(flat))
    }
}
