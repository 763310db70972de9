//! Reference propagators: the paraxial split-step Fourier method, and an exact
//! dense `exp(iΔz√H)` built from a symmetric eigendecomposition.
//!
//! The dense oracle deliberately goes through nalgebra's symmetric eigensolver
//! rather than the SVD path it is used to check.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::operator::OperatorMatrix;
use crate::profile::IndexSquaredMap;
use crate::spectral::{angular_frequency, Fft2};

/// Largest operator size accepted by [`dense_helmholtz_propagator`].
pub const ORACLE_MAX_UNKNOWNS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelConfig {
    pub reference_index: f64,
    pub k0: f64,
    pub step_length: f64,
}

/// Symmetric split-step propagator for the envelope (carrier
/// `exp(ik₀n_ref z)` removed): half diffraction, full phase screen, half
/// diffraction.
#[derive(Debug, Clone)]
pub struct FresnelPropagator {
    grid: Grid,
    fft: Fft2,
    half_diffraction: Array2<Complex64>,
    phase_screen: Array2<Complex64>,
}

impl FresnelPropagator {
    pub fn new(grid: &Grid, index_sq: &IndexSquaredMap, cfg: &FresnelConfig) -> Result<Self> {
        grid.ensure_same(index_sq.grid())?;
        for (name, v) in [
            ("reference_index", cfg.reference_index),
            ("k0", cfg.k0),
            ("step_length", cfg.step_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let n = grid.n_points();
        let half = 0.5 * cfg.step_length;
        let denom = 2.0 * cfg.k0 * cfg.reference_index;
        let half_diffraction = Array2::from_shape_fn((n, n), |(m, l)| {
            let kx = angular_frequency(m, grid);
            let ky = angular_frequency(l, grid);
            Complex64::from_polar(1.0, -half * (kx * kx + ky * ky) / denom)
        });
        let phase_screen = index_sq.values().mapv(|n_sq| {
            Complex64::from_polar(
                1.0,
                cfg.k0 * cfg.step_length * (n_sq.sqrt() - cfg.reference_index),
            )
        });
        Ok(FresnelPropagator {
            grid: grid.clone(),
            fft: Fft2::new(n),
            half_diffraction,
            phase_screen,
        })
    }

    pub fn step(&self, field: &Field) -> Result<Field> {
        self.grid.ensure_same(field.grid())?;
        let mut a = field.values().clone();
        self.fft.apply_multiplier(&mut a, &self.half_diffraction);
        a.zip_mut_with(&self.phase_screen, |v, p| *v *= p);
        self.fft.apply_multiplier(&mut a, &self.half_diffraction);
        Field::from_values(&self.grid, a)
    }
}

/// One split-step of the paraxial propagator.
pub fn fresnel_step(
    grid: &Grid,
    index_sq: &IndexSquaredMap,
    cfg: &FresnelConfig,
    field: &Field,
) -> Result<Field> {
    FresnelPropagator::new(grid, index_sq, cfg)?.step(field)
}

/// Exact `Σ_q exp(iΔz√λ_q) v_q v_qᵀ` over the full spectrum of a symmetric
/// operator, with the principal branch for negative eigenvalues.
pub fn dense_helmholtz_propagator(
    op: &OperatorMatrix,
    step_length: f64,
) -> Result<Array2<Complex64>> {
    let a = op.entries();
    let n2 = a.nrows();
    if n2 > ORACLE_MAX_UNKNOWNS {
        return Err(Error::OracleTooLarge {
            max: ORACLE_MAX_UNKNOWNS,
            found: n2,
        });
    }
    op.ensure_symmetric()?;
    if step_length == 0.0 {
        return Ok(Array2::from_shape_fn((n2, n2), |(r, s)| {
            Complex64::new(if r == s { 1.0 } else { 0.0 }, 0.0)
        }));
    }
    let m = DMatrix::from_fn(n2, n2, |r, s| 0.5 * (a[[r, s]] + a[[s, r]]));
    let eig = SymmetricEigen::new(m);
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| mode_phase_exact(l, step_length))
        .collect();
    let v = &eig.eigenvectors;
    let mut p = Array2::<Complex64>::zeros((n2, n2));
    for (q, ph) in phases.iter().enumerate() {
        let col = v.column(q);
        for s in 0..n2 {
            let w = ph * col[s];
            if w == Complex64::default() {
                continue;
            }
            for r in 0..n2 {
                p[[r, s]] += w * col[r];
            }
        }
    }
    Ok(p)
}

// Kept separate from the SVD path's helper so the oracle does not share code
// with what it checks.
fn mode_phase_exact(lambda: f64, dz: f64) -> Complex64 {
    let root = Complex64::new(lambda, 0.0).sqrt();
    let root = if root.im < 0.0 { -root } else { root };
    (Complex64::i() * dz * root).exp()
}

/// `unflatten(P · flatten(field))`.
pub fn apply_dense_propagator(p: &Array2<Complex64>, field: &Field) -> Result<Field> {
    let x = field.to_flat();
    if p.dim() != (x.len(), x.len()) {
        return Err(Error::ShapeMismatch {
            expected: vec![x.len(), x.len()],
            found: p.shape().to_vec(),
        });
    }
    let y: Vec<Complex64> = p
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
        .collect();
    Field::from_flat(field.grid(), &y)
}
