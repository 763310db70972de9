//! Sampling grid, complex field container and scalar field diagnostics.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square, uniformly spaced transverse lattice.
///
/// Coordinates are centred on index `N/2`: `x_i = (i - N/2) * spacing`, so an
/// even grid of 40 points at 1 μm spans −20 … +19 μm.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_points: usize,
    spacing: f64,
    coordinates: Vec<f64>,
}

impl Grid {
    /// Builds a grid of `n_points` per side. `n_points` must be even, since the
    /// FFT wavenumber wrapping assumes a Nyquist bin.
    pub fn new(n_points: usize, spacing: f64) -> Result<Self> {
        if n_points == 0 || !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and positive, got {n_points}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        let half = (n_points / 2) as f64;
        let coordinates = (0..n_points).map(|i| (i as f64 - half) * spacing).collect();
        Ok(Grid {
            n_points,
            spacing,
            coordinates,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Window width `W = N * spacing`.
    pub fn window_width(&self) -> f64 {
        self.n_points as f64 * self.spacing
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    /// Number of unknowns `N²`.
    pub fn len(&self) -> usize {
        self.n_points * self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.n_points == other.n_points && self.spacing == other.spacing {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected_n: self.n_points,
                expected_dx: self.spacing,
                found_n: other.n_points,
                found_dx: other.spacing,
            })
        }
    }

    pub(crate) fn ensure_shape<T>(&self, a: &Array2<T>) -> Result<()> {
        let n = self.n_points;
        if a.dim() == (n, n) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: vec![n, n],
                found: a.shape().to_vec(),
            })
        }
    }
}

/// Flattened position of grid point `(i, j)`: `r = i + N * j`.
pub fn flat_index(i: usize, j: usize, n_points: usize) -> Result<usize> {
    if i >= n_points || j >= n_points {
        return Err(Error::IndexOutOfRange { i, j, n_points });
    }
    Ok(i + n_points * j)
}

/// Inverse of [`flat_index`].
pub fn unflat_index(r: usize, n_points: usize) -> (usize, usize) {
    (r % n_points, r / n_points)
}

/// Complex amplitude samples indexed `[i_x, i_y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Array2<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n_points();
        Field {
            grid: grid.clone(),
            values: Array2::zeros((n, n)),
        }
    }

    pub fn from_values(grid: &Grid, values: Array2<Complex64>) -> Result<Self> {
        grid.ensure_shape(&values)?;
        Ok(Field {
            grid: grid.clone(),
            values,
        })
    }

    /// Field that is one at `(i, j)` and zero elsewhere.
    pub fn impulse(grid: &Grid, i: usize, j: usize) -> Result<Self> {
        flat_index(i, j, grid.n_points())?;
        let mut f = Field::zeros(grid);
        f.values[[i, j]] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// Rebuilds a field from a vector laid out by [`flat_index`].
    pub fn from_flat(grid: &Grid, flat: &[Complex64]) -> Result<Self> {
        let n = grid.n_points();
        if flat.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: vec![n * n],
                found: vec![flat.len()],
            });
        }
        let values = Array2::from_shape_fn((n, n), |(i, j)| flat[i + n * j]);
        Ok(Field {
            grid: grid.clone(),
            values,
        })
    }

    /// Values laid out by [`flat_index`].
    pub fn to_flat(&self) -> Vec<Complex64> {
        let n = self.grid.n_points();
        let mut out = vec![Complex64::default(); n * n];
        for ((i, j), v) in self.values.indexed_iter() {
            out[i + n * j] = *v;
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.mapv(|v| v * c),
        }
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Real Gaussian `exp(-((x - x0)² + (y - y0)²) / w²)`; `width` is the 1/e
/// amplitude radius.
pub fn gaussian_field(grid: &Grid, width: f64, offset_x: f64, offset_y: f64) -> Result<Field> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beam width must be positive, got {width}"
        )));
    }
    let x = grid.coordinates();
    let n = grid.n_points();
    let w2 = width * width;
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        let dx = x[i] - offset_x;
        let dy = x[j] - offset_y;
        Complex64::new((-(dx * dx + dy * dy) / w2).exp(), 0.0)
    });
    Field::from_values(grid, values)
}

/// `sqrt(Σ |E|² Δx²)`.
pub fn l2_norm(field: &Field) -> f64 {
    let dx = field.grid.spacing();
    let s: f64 = field.values.iter().map(|v| v.norm_sqr()).sum();
    (s * dx * dx).sqrt()
}

/// Intensity-weighted centre `(Σ x|E|² / Σ|E|², Σ y|E|² / Σ|E|²)`.
pub fn centroid(field: &Field) -> Result<(f64, f64)> {
    let x = field.grid.coordinates();
    let mut total = 0.0;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for ((i, j), v) in field.values.indexed_iter() {
        let w = v.norm_sqr();
        total += w;
        sx += x[i] * w;
        sy += x[j] * w;
    }
    if total == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok((sx / total, sy / total))
}
