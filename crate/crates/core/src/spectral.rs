//! Two-dimensional FFT on square grids and the diagonal spectral Laplacian.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Signed integer wavenumber of FFT bin `m`: `m` up to `N/2`, `m - N` above.
pub fn wrapped_wavenumber(m: usize, n_points: usize) -> i64 {
    if m <= n_points / 2 {
        m as i64
    } else {
        m as i64 - n_points as i64
    }
}

/// Angular spatial frequency `(2π/W) κ(m)` of bin `m`.
pub fn angular_frequency(m: usize, grid: &Grid) -> f64 {
    2.0 * PI / grid.window_width() * wrapped_wavenumber(m, grid.n_points()) as f64
}

/// Eigenvalues of the periodic spectral Laplacian, `-(2π/W)² (κ(m)² + κ(n)²)`,
/// laid out in FFT order.
pub fn spectral_laplacian_multipliers(grid: &Grid) -> Result<Array2<f64>> {
    let n = grid.n_points();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "spectral Laplacian needs an even point count, got {n}"
        )));
    }
    let scale = (2.0 * PI / grid.window_width()).powi(2);
    Ok(Array2::from_shape_fn((n, n), |(m, l)| {
        let km = wrapped_wavenumber(m, n) as f64;
        let kl = wrapped_wavenumber(l, n) as f64;
        -scale * (km * km + kl * kl)
    }))
}

/// Planned forward/inverse 2-D transforms for one grid size.
///
/// The forward transform is unnormalised; the inverse carries the `1/N²`
/// factor, matching `numpy.fft.fft2` / `ifft2`.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn forward(&self, a: &mut Array2<Complex64>) {
        self.apply(&self.forward, a);
    }

    pub fn inverse(&self, a: &mut Array2<Complex64>) {
        self.apply(&self.inverse, a);
        let s = 1.0 / (self.n * self.n) as f64;
        a.mapv_inplace(|v| v * s);
    }

    fn apply(&self, plan: &Arc<dyn Fft<f64>>, a: &mut Array2<Complex64>) {
        assert_eq!(a.dim(), (self.n, self.n), "FFT size mismatch");
        let mut line = vec![Complex64::default(); self.n];
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        for axis in [Axis(1), Axis(0)] {
            for mut lane in a.lanes_mut(axis) {
                for (dst, src) in line.iter_mut().zip(lane.iter()) {
                    *dst = *src;
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (dst, src) in lane.iter_mut().zip(line.iter()) {
                    *dst = *src;
                }
            }
        }
    }

    /// `IFFT(multipliers ⊙ FFT(a))` in place.
    pub fn apply_multiplier<M>(&self, a: &mut Array2<Complex64>, multipliers: &Array2<M>)
    where
        M: Copy + Into<Complex64>,
    {
        self.forward(a);
        a.zip_mut_with(multipliers, |v, m| *v *= (*m).into());
        self.inverse(a);
    }
}
