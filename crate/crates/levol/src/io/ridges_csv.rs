//! Ridge polylines as CSV: `line_id,vertex_id,x,y,strength`, one row per
//! vertex, floats at 17 significant decimal digits so values round-trip.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ridge::RidgeLine;

pub const CSV_HEADER: &str = "line_id,vertex_id,x,y,strength";

pub fn write_ridges_csv(path: &Path, lines: &[RidgeLine]) -> Result<()> {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (line_id, line) in lines.iter().enumerate() {
        for (vertex_id, (v, s)) in line.vertices.iter().zip(&line.strengths).enumerate() {
            out.push_str(&format!(
                "{line_id},{vertex_id},{:.16e},{:.16e},{:.16e}\n",
                v[0], v[1], s
            ));
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_ridges_csv(path: &Path) -> Result<Vec<RidgeLine>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, reason: String| Error::MalformedRow {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines_iter = text.lines().enumerate();
    match lines_iter.next() {
        Some((_, h)) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(bad(
                1,
                format!(
                    "expected header '{CSV_HEADER}', found {:?}",
                    other.map(|(_, h)| h).unwrap_or("")
                ),
            ))
        }
    }
    let mut lines: Vec<RidgeLine> = Vec::new();
    let mut current_id: Option<usize> = None;
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut strengths: Vec<f64> = Vec::new();
    let mut flush = |id: Option<usize>,
                     vertices: &mut Vec<[f64; 2]>,
                     strengths: &mut Vec<f64>,
                     row: usize|
     -> Result<()> {
        if id.is_none() {
            return Ok(());
        }
        if vertices.len() < 2 {
            return Err(bad(
                row,
                format!("line {} has fewer than 2 vertices", id.unwrap()),
            ));
        }
        lines.push(RidgeLine::new(
            std::mem::take(vertices),
            std::mem::take(strengths),
        ));
        Ok(())
    };
    let mut last_row = 1;
    for (idx, row) in lines_iter {
        let row_no = idx + 1;
        last_row = row_no;
        let row = row.trim_end();
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(row_no, format!("expected 5 fields, found {}", fields.len())));
        }
        let line_id: usize = fields[0]
            .parse()
            .map_err(|e| bad(row_no, format!("line_id '{}': {e}", fields[0])))?;
        let _vertex_id: usize = fields[1]
            .parse()
            .map_err(|e| bad(row_no, format!("vertex_id '{}': {e}", fields[1])))?;
        let mut nums = [0.0f64; 3];
        for (k, f) in fields[2..].iter().enumerate() {
            nums[k] = f
                .parse()
                .map_err(|e| bad(row_no, format!("value '{f}': {e}")))?;
            if !nums[k].is_finite() {
                return Err(bad(row_no, format!("non-finite value '{f}'")));
            }
        }
        if current_id != Some(line_id) {
            flush(current_id, &mut vertices, &mut strengths, row_no)?;
            current_id = Some(line_id);
        }
        vertices.push([nums[0], nums[1]]);
        strengths.push(nums[2]);
    }
    flush(current_id, &mut vertices, &mut strengths, last_row)?;
    Ok(lines)
}
