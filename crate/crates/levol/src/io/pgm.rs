//! 16-bit binary PGM export for quick grayscale inspection of 2D fields.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::edge::ScalarField;
use crate::error::{Error, Result};

/// Write a 2D field as a P5 PGM with 16-bit big-endian samples.
///
/// Values map as `round(65535 * clamp((v - min) / (max - min), 0, 1))`;
/// the range is recorded in a comment line. Rows are written top-down
/// (largest y first) so the image displays with y up.
pub fn write_heatmap_pgm(path: &Path, field: &ScalarField, min: f64, max: f64) -> Result<()> {
    if !(max > min) {
        return Err(Error::DegenerateRange { min, max });
    }
    if field.grid.dim() != 2 {
        return Err(Error::invalid_data(
            "pgm export",
            "only 2D fields can be written as PGM images",
        ));
    }
    let (nx, ny) = (field.grid.dims()[0], field.grid.dims()[1]);
    let mut out = Vec::with_capacity(64 + nx * ny * 2);
    out.extend_from_slice(format!("P5\n# range {min} {max}\n{nx} {ny}\n65535\n").as_bytes());
    let inv = 1.0 / (max - min);
    for j in (0..ny).rev() {
        for i in 0..nx {
            let v = field.values[i + nx * j];
            let u = ((v - min) * inv).clamp(0.0, 1.0);
            let q = (65535.0 * u).round() as u16;
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}
