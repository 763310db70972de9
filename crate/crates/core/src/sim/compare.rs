use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::{read_trajectory, TrajectoryRecord};

/// z samples of two trajectories must agree to this absolute tolerance (μm).
const Z_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub first: PathBuf,
    pub second: PathBuf,
    pub rms_dy: f64,
    pub max_dy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub pairs: Vec<PairComparison>,
}

/// RMS and max of `|Δcentroid_y|` over matching z samples.
pub fn centroid_y_deviation(a: &[TrajectoryRecord], b: &[TrajectoryRecord]) -> Result<(f64, f64)> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "trajectories have {} and {} samples",
            a.len(),
            b.len()
        )));
    }
    let mut sq = 0.0;
    let mut max = 0.0f64;
    for (k, (ra, rb)) in a.iter().zip(b).enumerate() {
        if (ra.z - rb.z).abs() > Z_MATCH_TOL {
            return Err(Error::InvalidArgument(format!(
                "z grids differ at sample {k}: {} vs {}",
                ra.z, rb.z
            )));
        }
        let d = (ra.centroid_y - rb.centroid_y).abs();
        sq += d * d;
        max = max.max(d);
    }
    Ok(((sq / a.len() as f64).sqrt(), max))
}

/// Pairwise comparison of two or three trajectory files.
pub fn compare_runs<P: AsRef<Path>>(paths: &[P]) -> Result<ComparisonReport> {
    if !(2..=3).contains(&paths.len()) {
        return Err(Error::InvalidArgument(format!(
            "compare needs 2 or 3 trajectories, got {}",
            paths.len()
        )));
    }
    let loaded = paths
        .iter()
        .map(read_trajectory)
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..paths.len() {
        for j in (i + 1)..paths.len() {
            let (rms_dy, max_dy) = centroid_y_deviation(&loaded[i], &loaded[j])?;
            pairs.push(PairComparison {
                first: paths[i].as_ref().to_path_buf(),
                second: paths[j].as_ref().to_path_buf(),
                rms_dy,
                max_dy,
            });
        }
    }
    Ok(ComparisonReport { pairs })
}

impl ComparisonReport {
    /// Writes `first,second,rms_dy,max_dy` CSV.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "first,second,rms_dy,max_dy")?;
        for p in &self.pairs {
            writeln!(
                w,
                "{},{},{:.16e},{:.16e}",
                p.first.display(),
                p.second.display(),
                p.rms_dy,
                p.max_dy
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            writeln!(
                f,
                "{} vs {}: rms |dy| = {:.4} um, max |dy| = {:.4} um",
                p.first.display(),
                p.second.display(),
                p.rms_dy,
                p.max_dy
            )?;
        }
        Ok(())
    }
}
