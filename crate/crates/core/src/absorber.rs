//! Separable cosine-power edge absorber.
//!
//! The window edge is taken half a cell beyond the outermost samples, so the
//! sample at index `i` sits `(min(i, N-1-i) + 1/2)·Δx` from the nearest edge.
//! Within `margin` of an edge the 1-D taper is `cos^p(π/2 · d / margin)`, with
//! `d = margin - edge_distance`; it never reaches zero on a sample.

use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorberMask {
    grid: Grid,
    values: Array2<f64>,
    margin: f64,
    exponent: f64,
}

impl AbsorberMask {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// Distance from sample `i` to the nearest window edge.
pub fn edge_distance(i: usize, grid: &Grid) -> f64 {
    let n = grid.n_points();
    (i.min(n - 1 - i) as f64 + 0.5) * grid.spacing()
}

fn taper(i: usize, grid: &Grid, margin: f64, exponent: f64) -> f64 {
    let e = edge_distance(i, grid);
    if e >= margin {
        return 1.0;
    }
    let d = margin - e;
    (FRAC_PI_2 * d / margin).cos().powf(exponent)
}

pub fn make_absorber(grid: &Grid, margin: f64, exponent: f64) -> Result<AbsorberMask> {
    let half = 0.5 * grid.window_width();
    if !(0.0..half).contains(&margin) {
        return Err(Error::InvalidArgument(format!(
            "absorber margin must lie in [0, {half}), got {margin}"
        )));
    }
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "absorber exponent must be positive, got {exponent}"
        )));
    }
    let n = grid.n_points();
    let axis: Vec<f64> = (0..n).map(|i| taper(i, grid, margin, exponent)).collect();
    let values = Array2::from_shape_fn((n, n), |(i, j)| axis[i] * axis[j]);
    Ok(AbsorberMask {
        grid: grid.clone(),
        values,
        margin,
        exponent,
    })
}

pub fn apply_absorber(field: &Field, mask: &AbsorberMask) -> Result<Field> {
    mask.grid.ensure_same(field.grid())?;
    let mut values = field.values().clone();
    values.zip_mut_with(&mask.values, |v, m| *v *= *m);
    Field::from_values(field.grid(), values)
}
