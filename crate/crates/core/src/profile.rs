//! Refractive-index-squared distributions sampled onto a [`Grid`].

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Clamped parabolic profile `n²(r) = n0² (1 - depth (min(r, a) / a)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicProfile {
    pub n0_squared: f64,
    pub depth: f64,
    pub clamp_radius: f64,
}

impl ParabolicProfile {
    pub fn new(n0_squared: f64, depth: f64, clamp_radius: f64) -> Result<Self> {
        let p = ParabolicProfile {
            n0_squared,
            depth,
            clamp_radius,
        };
        p.validate()?;
        Ok(p)
    }

    /// The graded-index fibre used for the reference runs: `1.45 (1 - 0.1 (min(r, 25) / 25)²)`.
    pub fn graded_fiber() -> Self {
        ParabolicProfile {
            n0_squared: 1.45,
            depth: 0.1,
            clamp_radius: 25.0,
        }
    }

    /// Depth-zero profile, `n² = n0_squared` everywhere.
    pub fn uniform(n0_squared: f64) -> Self {
        ParabolicProfile {
            n0_squared,
            depth: 0.0,
            clamp_radius: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n0_squared > 0.0 && self.n0_squared.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "n0_squared must be positive, got {}",
                self.n0_squared
            )));
        }
        if !(0.0..1.0).contains(&self.depth) {
            return Err(Error::InvalidArgument(format!(
                "depth must lie in [0, 1), got {}",
                self.depth
            )));
        }
        if !(self.clamp_radius > 0.0 && self.clamp_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "clamp_radius must be positive, got {}",
                self.clamp_radius
            )));
        }
        Ok(())
    }

    /// Cladding value `n0² (1 - depth)`, reached for `r >= clamp_radius`.
    pub fn cladding(&self) -> f64 {
        self.n0_squared * (1.0 - self.depth)
    }
}

pub fn parabolic_index_squared(x: f64, y: f64, profile: &ParabolicProfile) -> f64 {
    let r = x.hypot(y);
    if r >= profile.clamp_radius {
        return profile.cladding();
    }
    let t = r / profile.clamp_radius;
    profile.n0_squared * (1.0 - profile.depth * t * t)
}

/// Samples of `n²(x, y)` on a grid, indexed `[i_x, i_y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSquaredMap {
    grid: Grid,
    values: Array2<f64>,
}

impl IndexSquaredMap {
    pub fn from_values(grid: &Grid, values: Array2<f64>) -> Result<Self> {
        grid.ensure_shape(&values)?;
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "n² samples must be positive and finite, found {v}"
            )));
        }
        Ok(IndexSquaredMap {
            grid: grid.clone(),
            values,
        })
    }

    pub fn uniform(grid: &Grid, n_squared: f64) -> Result<Self> {
        let n = grid.n_points();
        Self::from_values(grid, Array2::from_elem((n, n), n_squared))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Pointwise `(1 - t) * self + t * other`.
    pub fn blend(&self, other: &IndexSquaredMap, t: f64) -> Result<IndexSquaredMap> {
        self.grid.ensure_same(&other.grid)?;
        let values = &self.values * (1.0 - t) + &other.values * t;
        Self::from_values(&self.grid, values)
    }
}

pub fn sample_profile(grid: &Grid, profile: &ParabolicProfile) -> Result<IndexSquaredMap> {
    profile.validate()?;
    let x = grid.coordinates();
    let n = grid.n_points();
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        parabolic_index_squared(x[i], x[j], profile)
    });
    IndexSquaredMap::from_values(grid, values)
}

/// Elementwise `sqrt(n²_current) - sqrt(n²_initial)`: the index change, not
/// the change in its square.
pub fn index_delta_map(
    current: &IndexSquaredMap,
    initial: &IndexSquaredMap,
) -> Result<Array2<f64>> {
    current.grid.ensure_same(&initial.grid)?;
    let mut out = current.values.mapv(f64::sqrt);
    out.zip_mut_with(&initial.values, |c, i| *c -= i.sqrt());
    Ok(out)
}
