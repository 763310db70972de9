//! Plot-ready text outputs and the analytic paraxial ray period.
//!
//! All reals are written as `{:.16e}` (17 significant digits), which
//! round-trips `f64` exactly.
//!
//! Snapshot format:
//!
//! ```text
//! # z=<z> n=<N> dx=<spacing>
//! ix,iy,x,y,re,im          (N² lines, ix outer, iy inner)
//! ```
//!
//! Trajectory format: header `z,centroid_x,centroid_y,l2_norm`, then one line
//! per record.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::profile::ParabolicProfile;

pub const TRAJECTORY_HEADER: &str = "z,centroid_x,centroid_y,l2_norm";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub z: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub l2_norm: f64,
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_real(path: &Path, line: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite value {s:?}")));
    }
    Ok(v)
}

pub fn write_field_snapshot(path: impl AsRef<Path>, z: f64, field: &Field) -> Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "# z={} n={} dx={}",
        fmt_real(z),
        grid.n_points(),
        fmt_real(grid.spacing())
    )?;
    let x = grid.coordinates();
    for ((i, j), v) in field.values().indexed_iter() {
        writeln!(
            w,
            "{i},{j},{},{},{},{}",
            fmt_real(x[i]),
            fmt_real(x[j]),
            fmt_real(v.re),
            fmt_real(v.im)
        )?;
    }
    w.flush()?;
    Ok(())
}

fn parse_header(path: &Path, header: &str) -> Result<(f64, usize, f64)> {
    let rest = header
        .strip_prefix("# ")
        .ok_or_else(|| parse_err(path, 1, "header must start with '# '"))?;
    let mut z = None;
    let mut n = None;
    let mut dx = None;
    for token in rest.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(path, 1, format!("malformed header token {token:?}")))?;
        match key {
            "z" => z = Some(parse_real(path, 1, value)?),
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(path, 1, format!("bad point count {value:?}")))?,
                )
            }
            "dx" => dx = Some(parse_real(path, 1, value)?),
            other => return Err(parse_err(path, 1, format!("unknown header key {other:?}"))),
        }
    }
    match (z, n, dx) {
        (Some(z), Some(n), Some(dx)) => Ok((z, n, dx)),
        _ => Err(parse_err(path, 1, "header needs z, n and dx")),
    }
}

/// Reads a snapshot written by [`write_field_snapshot`], returning `(z, field)`.
pub fn read_field_snapshot(path: impl AsRef<Path>) -> Result<(f64, Field)> {
    let path = path.as_ref();
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let (z, n, dx) = parse_header(path, &header)?;
    let grid = Grid::new(n, dx).map_err(|e| parse_err(path, 1, e.to_string()))?;

    let mut values = Array2::<Complex64>::zeros((n, n));
    let mut count = 0usize;
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if count == n * n {
            return Err(parse_err(path, line_no, "more data lines than n²"));
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 6 columns, found {}", cols.len()),
            ));
        }
        let (ei, ej) = (count / n, count % n);
        let i: usize = cols[0]
            .parse()
            .map_err(|_| parse_err(path, line_no, "bad ix"))?;
        let j: usize = cols[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, "bad iy"))?;
        if (i, j) != (ei, ej) {
            return Err(parse_err(
                path,
                line_no,
                format!("expected index ({ei}, {ej}), found ({i}, {j})"),
            ));
        }
        parse_real(path, line_no, cols[2])?;
        parse_real(path, line_no, cols[3])?;
        let re = parse_real(path, line_no, cols[4])?;
        let im = parse_real(path, line_no, cols[5])?;
        values[[i, j]] = Complex64::new(re, im);
        count += 1;
    }
    if count != n * n {
        return Err(parse_err(
            path,
            count + 1,
            format!("expected {} data lines, found {count}", n * n),
        ));
    }
    Ok((z, Field::from_values(&grid, values)?))
}

pub fn write_trajectory(path: impl AsRef<Path>, records: &[TrajectoryRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_real(r.z),
            fmt_real(r.centroid_x),
            fmt_real(r.centroid_y),
            fmt_real(r.l2_norm)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Vec<TrajectoryRecord>> {
    let path = path.as_ref();
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != TRAJECTORY_HEADER {
        return Err(parse_err(
            path,
            1,
            format!("expected header {TRAJECTORY_HEADER:?}"),
        ));
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 4 columns, found {}", cols.len()),
            ));
        }
        let rec = TrajectoryRecord {
            z: parse_real(path, line_no, cols[0])?,
            centroid_x: parse_real(path, line_no, cols[1])?,
            centroid_y: parse_real(path, line_no, cols[2])?,
            l2_norm: parse_real(path, line_no, cols[3])?,
        };
        if let Some(prev) = out.last() {
            let prev: &TrajectoryRecord = prev;
            if rec.z < prev.z {
                return Err(parse_err(path, line_no, "z decreases"));
            }
        }
        out.push(rec);
    }
    Ok(out)
}

/// Paraxial ray period `2πa/√depth` of the parabolic profile.
///
/// With `n² = n0²(1 - depth r²/a²)` the ray equation `d²r/dz² = ∇(n²)/(2n²)`
/// linearises near the axis to `r'' = -(depth/a²) r`, independent of `n0`.
pub fn ray_period(profile: &ParabolicProfile) -> Result<f64> {
    if profile.depth.is_nan() || profile.depth <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ray period needs a positive depth, got {}",
            profile.depth
        )));
    }
    if profile.clamp_radius.is_nan() || profile.clamp_radius <= 0.0 {
        return Err(Error::InvalidArgument(
            "clamp radius must be positive".into(),
        ));
    }
    Ok(2.0 * PI * profile.clamp_radius / profile.depth.sqrt())
}
