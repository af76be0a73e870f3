//! File formats: LEVOL volumes, ridge CSV, PGM heatmaps, and dataset
//! persistence under a shared path prefix.

pub mod dataset;
pub mod pgm;
pub mod ridges_csv;
pub mod volume;

pub use dataset::{load_dataset, save_dataset, VELOCITY_FIELD};
pub use pgm::write_heatmap_pgm;
pub use ridges_csv::{read_ridges_csv, write_ridges_csv};
pub use volume::{read_volume, write_volume, FieldKind, VolumeHeader};
