//! The LEVOL volume format: a text header followed by a raw
//! little-endian float32 body.
//!
//! ```text
//! LEVOL 1
//! dims 256 128
//! spacing 0.0078125 0.0078125
//! origin 0 0
//! t_start 5
//! t_step 0.2
//! frame_count 51
//! kind vector 2
//! name velocity
//! encoding float32le
//! end
//! <binary body>
//! ```
//!
//! The body is frame-major, node-major (x fastest, then y, then z) with
//! interleaved components for vector fields. Floats in the header print in
//! Rust's shortest round-trip form, so `parse(emit(h)) == h` field for
//! field; the body is bit-exact at 32-bit precision.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, TimeAxis};

pub const MAGIC: &str = "LEVOL 1";
pub const ENCODING: &str = "float32le";

/// What one volume file stores per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Vector(usize),
}

impl FieldKind {
    pub fn components(&self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Vector(d) => *d,
        }
    }
}

/// Parsed LEVOL header.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeHeader {
    pub grid: GridSpec,
    pub time: TimeAxis,
    pub kind: FieldKind,
    pub name: String,
}

impl VolumeHeader {
    pub fn value_count(&self) -> usize {
        self.grid.node_count() * self.time.frame_count() * self.kind.components()
    }

    /// Serialize to the text form, including the terminating `end` line.
    pub fn emit(&self) -> String {
        let join_usize = |v: &[usize]| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let join_f64 = |v: &[f64]| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let kind = match self.kind {
            FieldKind::Scalar => "scalar".to_string(),
            FieldKind::Vector(d) => format!("vector {d}"),
        };
        format!(
            "{MAGIC}\ndims {}\nspacing {}\norigin {}\nt_start {}\nt_step {}\nframe_count {}\nkind {}\nname {}\nencoding {ENCODING}\nend\n",
            join_usize(self.grid.dims()),
            join_f64(self.grid.spacing()),
            join_f64(self.grid.origin()),
            self.time.t_start(),
            self.time.t_step(),
            self.time.frame_count(),
            kind,
            self.name,
        )
    }

    /// Parse the text form. `path` is only used for error reporting.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::MalformedHeader {
            path: path.to_path_buf(),
            reason,
        };
        let mut lines = text.lines();
        match lines.next() {
            Some(l) if l.trim_end() == MAGIC => {}
            other => {
                return Err(bad(format!(
                    "expected magic '{MAGIC}', found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut dims: Option<Vec<usize>> = None;
        let mut spacing: Option<Vec<f64>> = None;
        let mut origin: Option<Vec<f64>> = None;
        let mut t_start: Option<f64> = None;
        let mut t_step: Option<f64> = None;
        let mut frame_count: Option<usize> = None;
        let mut kind: Option<FieldKind> = None;
        let mut name: Option<String> = None;
        let mut encoding: Option<String> = None;
        let mut terminated = false;
        for line in lines {
            let line = line.trim_end();
            if line == "end" {
                terminated = true;
                break;
            }
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| bad(format!("line '{line}' is not 'key value'")))?;
            let dup = |k: &str| bad(format!("duplicate key '{k}'"));
            match key {
                "dims" => {
                    if dims.is_some() {
                        return Err(dup(key));
                    }
                    let v = value
                        .split_whitespace()
                        .map(|x| x.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| bad(format!("dims '{value}': {e}")))?;
                    dims = Some(v);
                }
                "spacing" | "origin" => {
                    let v = value
                        .split_whitespace()
                        .map(|x| x.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| bad(format!("{key} '{value}': {e}")))?;
                    if key == "spacing" {
                        if spacing.is_some() {
                            return Err(dup(key));
                        }
                        spacing = Some(v);
                    } else {
                        if origin.is_some() {
                            return Err(dup(key));
                        }
                        origin = Some(v);
                    }
                }
                "t_start" | "t_step" => {
                    let v = value
                        .parse::<f64>()
                        .map_err(|e| bad(format!("{key} '{value}': {e}")))?;
                    if key == "t_start" {
                        if t_start.is_some() {
                            return Err(dup(key));
                        }
                        t_start = Some(v);
                    } else {
                        if t_step.is_some() {
                            return Err(dup(key));
                        }
                        t_step = Some(v);
                    }
                }
                "frame_count" => {
                    if frame_count.is_some() {
                        return Err(dup(key));
                    }
                    frame_count = Some(
                        value
                            .parse::<usize>()
                            .map_err(|e| bad(format!("frame_count '{value}': {e}")))?,
                    );
                }
                "kind" => {
                    if kind.is_some() {
                        return Err(dup(key));
                    }
                    kind = Some(match value {
                        "scalar" => FieldKind::Scalar,
                        v if v.starts_with("vector ") => {
                            let d = v["vector ".len()..]
                                .parse::<usize>()
                                .map_err(|e| bad(format!("kind '{value}': {e}")))?;
                            if !(2..=3).contains(&d) {
                                return Err(bad(format!(
                                    "vector kind needs 2 or 3 components, got {d}"
                                )));
                            }
                            FieldKind::Vector(d)
                        }
                        _ => return Err(bad(format!("unknown kind '{value}'"))),
                    });
                }
                "name" => {
                    if name.is_some() {
                        return Err(dup(key));
                    }
                    name = Some(value.to_string());
                }
                "encoding" => {
                    if encoding.is_some() {
                        return Err(dup(key));
                    }
                    if value != ENCODING {
                        return Err(bad(format!(
                            "unsupported encoding '{value}' (only {ENCODING})"
                        )));
                    }
                    encoding = Some(value.to_string());
                }
                _ => return Err(bad(format!("unknown key '{key}'"))),
            }
        }
        if !terminated {
            return Err(bad("missing 'end' line".into()));
        }
        let dims = dims.ok_or_else(|| bad("missing dims".into()))?;
        let spacing = spacing.ok_or_else(|| bad("missing spacing".into()))?;
        let origin = origin.ok_or_else(|| bad("missing origin".into()))?;
        let t_start = t_start.ok_or_else(|| bad("missing t_start".into()))?;
        let t_step = t_step.ok_or_else(|| bad("missing t_step".into()))?;
        let frame_count = frame_count.ok_or_else(|| bad("missing frame_count".into()))?;
        let kind = kind.ok_or_else(|| bad("missing kind".into()))?;
        let name = name.ok_or_else(|| bad("missing name".into()))?;
        encoding.ok_or_else(|| bad("missing encoding".into()))?;

        if dims.len() != spacing.len() || dims.len() != origin.len() {
            return Err(bad(format!(
                "dims/spacing/origin lengths disagree: {}/{}/{}",
                dims.len(),
                spacing.len(),
                origin.len()
            )));
        }
        let grid = match dims.len() {
            2 => GridSpec::new_2d(
                [dims[0], dims[1]],
                [spacing[0], spacing[1]],
                [origin[0], origin[1]],
            ),
            3 => GridSpec::new_3d(
                [dims[0], dims[1], dims[2]],
                [spacing[0], spacing[1], spacing[2]],
                [origin[0], origin[1], origin[2]],
            ),
            n => return Err(bad(format!("dims must have 2 or 3 axes, got {n}"))),
        }
        .map_err(|e| bad(e.to_string()))?;
        if let FieldKind::Vector(d) = kind {
            if d != grid.dim() {
                return Err(bad(format!(
                    "vector components ({d}) disagree with grid dimension ({})",
                    grid.dim()
                )));
            }
        }
        let time = TimeAxis::new(t_start, t_step, frame_count).map_err(|e| bad(e.to_string()))?;
        Ok(VolumeHeader {
            grid,
            time,
            kind,
            name,
        })
    }
}

/// Write a header and body; values are stored as little-endian f32.
pub fn write_volume(path: &Path, header: &VolumeHeader, values: &[f64]) -> Result<()> {
    if values.len() != header.value_count() {
        return Err(Error::invalid_data(
            "volume body",
            format!(
                "expected {} values, found {}",
                header.value_count(),
                values.len()
            ),
        ));
    }
    let mut bytes = Vec::with_capacity(values.len() * 4);
    for &v in values {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(header.emit().as_bytes())
        .and_then(|_| file.write_all(&bytes))
        .map_err(|e| Error::io(path, e))
}

/// Read a header and body written by [`write_volume`].
pub fn read_volume(path: &Path) -> Result<(VolumeHeader, Vec<f64>)> {
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    // the header is ASCII up to and including the "end\n" line
    let needle = b"\nend\n";
    let split = raw
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + needle.len())
        .ok_or_else(|| Error::MalformedHeader {
            path: path.to_path_buf(),
            reason: "missing 'end' line".into(),
        })?;
    let text = std::str::from_utf8(&raw[..split]).map_err(|e| Error::MalformedHeader {
        path: path.to_path_buf(),
        reason: format!("header is not UTF-8: {e}"),
    })?;
    let header = VolumeHeader::parse(text, path)?;
    let body = &raw[split..];
    let expected = header.value_count() * 4;
    if body.len() != expected {
        return Err(Error::SizeMismatch {
            path: path.to_path_buf(),
            expected,
            actual: body.len(),
        });
    }
    let values = body
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
        .collect();
    Ok((header, values))
}

/// File path for one field of a dataset saved under `prefix`.
pub fn field_path(prefix: &Path, field_name: &str) -> PathBuf {
    let mut os = prefix.as_os_str().to_os_string();
    os.push(".");
    os.push(field_name);
    os.push(".levol");
    PathBuf::from(os)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header_2d() -> VolumeHeader {
        VolumeHeader {
            grid: GridSpec::new_2d([4, 3], [0.5, 0.25], [-1.0, 0.0]).unwrap(),
            time: TimeAxis::new(5.0, 0.2, 2).unwrap(),
            kind: FieldKind::Vector(2),
            name: "velocity".into(),
        }
    }

    #[test]
    fn header_round_trip() {
        let h = header_2d();
        let text = h.emit();
        let parsed = VolumeHeader::parse(&text, Path::new("test.levol")).unwrap();
        assert_eq!(parsed, h);

        // non-round decimals survive via shortest round-trip printing
        let h = VolumeHeader {
            grid: GridSpec::new_2d([256, 128], [1.0 / 128.0, 0.1], [0.3, -0.7]).unwrap(),
            time: TimeAxis::new(0.1, 0.2, 51).unwrap(),
            kind: FieldKind::Scalar,
            name: "tracer".into(),
        };
        let parsed = VolumeHeader::parse(&h.emit(), Path::new("t.levol")).unwrap();
        assert_eq!(parsed, h);
    }

    #[test]
    fn body_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.levol");
        let h = header_2d();
        let values: Vec<f64> = (0..h.value_count())
            .map(|i| (i as f64 * 0.37).sin() * 12.5)
            .collect();
        write_volume(&path, &h, &values).unwrap();
        let (h2, v2) = read_volume(&path).unwrap();
        assert_eq!(h2, h);
        // f32 storage: re-writing must give identical bytes
        let path2 = dir.path().join("v2.levol");
        write_volume(&path2, &h2, &v2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn truncated_body_is_size_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.levol");
        let h = header_2d();
        let values = vec![0.0; h.value_count()];
        write_volume(&path, &h, &values).unwrap();
        let mut raw = fs::read(&path).unwrap();
        raw.truncate(raw.len() - 7);
        fs::write(&path, &raw).unwrap();
        match read_volume(&path) {
            Err(Error::SizeMismatch {
                expected, actual, ..
            }) => {
                assert_eq!(expected, h.value_count() * 4);
                assert_eq!(actual, expected - 7);
            }
            other => panic!("expected SizeMismatch, got {other:?}"),
        }
    }

    #[test]
    fn zero_frames_is_malformed() {
        let h = header_2d();
        let text = h.emit().replace("frame_count 2", "frame_count 0");
        assert!(matches!(
            VolumeHeader::parse(&text, Path::new("x.levol")),
            Err(Error::MalformedHeader { .. })
        ));
    }

    #[test]
    fn bad_magic_and_unknown_keys() {
        let p = Path::new("x.levol");
        assert!(VolumeHeader::parse("LEVOL 9\nend\n", p).is_err());
        let text = header_2d().emit().replace("name velocity", "surprise 1");
        assert!(VolumeHeader::parse(&text, p).is_err());
    }
}
