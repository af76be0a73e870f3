//! Dataset persistence: one volume file per field under a shared prefix.
//!
//! `save_dataset(prefix, ds)` writes `<prefix>.velocity.levol` plus one
//! `<prefix>.<name>.levol` per scalar attribute; `load_dataset(prefix)`
//! reads them back, taking attribute names from the headers and ordering
//! scalars by file name for determinism.

use std::path::{Path, PathBuf};

use super::volume::{field_path, read_volume, write_volume, FieldKind, VolumeHeader};
use crate::error::{Error, Result};
use crate::grid::MultifieldDataset;

pub const VELOCITY_FIELD: &str = "velocity";

fn checked_name(name: &str) -> Result<()> {
    if name.is_empty()
        || name == VELOCITY_FIELD
        || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        return Err(Error::invalid_data(
            "field name",
            format!("'{name}' (use ASCII letters, digits, underscores; 'velocity' is reserved)"),
        ));
    }
    Ok(())
}

/// Write every field of the dataset under `prefix`. Returns the paths
/// written, velocity first.
pub fn save_dataset(prefix: &Path, ds: &MultifieldDataset) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::with_capacity(1 + ds.scalar_count());
    let vel_header = VolumeHeader {
        grid: ds.grid().clone(),
        time: ds.time().clone(),
        kind: FieldKind::Vector(ds.grid().dim()),
        name: VELOCITY_FIELD.into(),
    };
    let vel_path = field_path(prefix, VELOCITY_FIELD);
    write_volume(&vel_path, &vel_header, ds.velocity_values())?;
    paths.push(vel_path);
    for attr in 0..ds.scalar_count() {
        let name = ds.scalar_name(attr).unwrap().to_string();
        checked_name(&name)?;
        let header = VolumeHeader {
            grid: ds.grid().clone(),
            time: ds.time().clone(),
            kind: FieldKind::Scalar,
            name: name.clone(),
        };
        let path = field_path(prefix, &name);
        write_volume(&path, &header, ds.scalar_values(attr)?)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Load a dataset saved with [`save_dataset`]: the velocity volume plus
/// every sibling `<prefix>.<name>.levol` scalar volume.
pub fn load_dataset(prefix: &Path) -> Result<MultifieldDataset> {
    let vel_path = field_path(prefix, VELOCITY_FIELD);
    let (vel_header, velocity) = read_volume(&vel_path)?;
    match vel_header.kind {
        FieldKind::Vector(_) => {}
        FieldKind::Scalar => {
            return Err(Error::invalid_data(
                "dataset",
                format!("{} stores a scalar field, expected the velocity", vel_path.display()),
            ))
        }
    }

    // discover sibling scalar volumes: <stem>.<name>.levol in prefix's dir
    let dir = prefix.parent().map(Path::to_path_buf).unwrap_or_default();
    let dir = if dir.as_os_str().is_empty() {
        PathBuf::from(".")
    } else {
        dir
    };
    let stem = prefix
        .file_name()
        .ok_or_else(|| Error::invalid_data("dataset prefix", "empty file name"))?
        .to_string_lossy()
        .to_string();
    let mut scalar_paths: Vec<PathBuf> = Vec::new();
    for entry in std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
        let entry = entry.map_err(|e| Error::io(&dir, e))?;
        let fname = entry.file_name().to_string_lossy().to_string();
        let Some(rest) = fname.strip_prefix(&format!("{stem}.")) else {
            continue;
        };
        let Some(field) = rest.strip_suffix(".levol") else {
            continue;
        };
        if field == VELOCITY_FIELD || field.contains('.') {
            continue;
        }
        scalar_paths.push(entry.path());
    }
    scalar_paths.sort();

    let mut scalars = Vec::with_capacity(scalar_paths.len());
    for path in &scalar_paths {
        let (header, values) = read_volume(path)?;
        if header.kind != FieldKind::Scalar {
            return Err(Error::invalid_data(
                "dataset",
                format!("{} is not a scalar volume", path.display()),
            ));
        }
        if header.grid != vel_header.grid || header.time != vel_header.time {
            return Err(Error::invalid_data(
                "dataset",
                format!(
                    "{} grid/time axis disagrees with the velocity volume",
                    path.display()
                ),
            ));
        }
        scalars.push((header.name, values));
    }
    MultifieldDataset::new(vel_header.grid, vel_header.time, velocity, scalars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{attach_scalar, rasterize_flow, AnalyticFlow, ScalarGenSpec};
    use crate::grid::{GridSpec, TimeAxis};

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("dg");
        let grid = GridSpec::new_2d([17, 9], [0.125, 0.125], [0.0, 0.0]).unwrap();
        let time = TimeAxis::new(0.0, 0.5, 3).unwrap();
        let flow = AnalyticFlow::standard_double_gyre();
        let ds = rasterize_flow(&flow, &grid, &time);
        let ds = attach_scalar(ds, &ScalarGenSpec::Constant { value: 2.0 }, "temp").unwrap();
        let ds = attach_scalar(
            ds,
            &ScalarGenSpec::Linear {
                gradient: [1.0, -0.5],
                offset: 0.25,
            },
            "aux",
        )
        .unwrap();

        let paths = save_dataset(&prefix, &ds).unwrap();
        assert_eq!(paths.len(), 3);
        let back = load_dataset(&prefix).unwrap();
        assert_eq!(back.grid(), ds.grid());
        assert_eq!(back.time(), ds.time());
        assert_eq!(back.scalar_count(), 2);
        // scalars come back sorted by file name: aux before temp
        assert_eq!(back.scalar_name(0).unwrap(), "aux");
        assert_eq!(back.scalar_name(1).unwrap(), "temp");
        // float32 storage round-trips bit-exactly once quantized
        for (a, b) in ds.velocity_values().iter().zip(back.velocity_values()) {
            assert_eq!((*a as f32).to_bits(), (*b as f32).to_bits());
        }
    }

    #[test]
    fn weird_names_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("x");
        let grid = GridSpec::new_2d([3, 3], [1.0, 1.0], [0.0, 0.0]).unwrap();
        let time = TimeAxis::new(0.0, 1.0, 1).unwrap();
        let ds = rasterize_flow(&AnalyticFlow::Uniform { u: 0.0, w: 0.0 }, &grid, &time);
        let ds = attach_scalar(ds, &ScalarGenSpec::Constant { value: 0.0 }, "has space").unwrap();
        assert!(save_dataset(&prefix, &ds).is_err());
    }

    #[test]
    fn missing_velocity_reported_with_path() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("nothing");
        match load_dataset(&prefix) {
            Err(Error::Io { path, .. }) => {
                assert!(path.to_string_lossy().contains("nothing.velocity.levol"));
            }
            other => panic!("expected Io error, got {other:?}"),
        }
    }
}
