//! Dense `N² × N²` matrix for the transverse Helmholtz operator
//! `H = ∇⊥² + k₀² n²`.
//!
//! Row `r = flat_index(m, n)` and column `s = flat_index(p, q)`, so column `s`
//! is the operator's response to a unit impulse at grid point `(p, q)`.

use std::f64::consts::PI;

use ndarray::{Array2, ShapeBuilder};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{unflat_index, Field, Grid};
use crate::par;
use crate::profile::IndexSquaredMap;
use crate::spectral::{spectral_laplacian_multipliers, Fft2};

/// Largest tolerated imaginary residue of the impulse-response columns,
/// relative to the largest entry.
const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

/// Relative asymmetry accepted from either builder.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Vacuum wavenumber `2π/λ₀` (μm⁻¹ for λ₀ in μm).
pub fn vacuum_wavenumber(wavelength: f64) -> f64 {
    2.0 * PI / wavelength
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMethod {
    /// Impulse responses of the spectral Laplacian.
    Fft,
    /// Periodic five-point stencil.
    Fd,
    /// Supplied directly by the caller.
    Explicit,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    grid: Grid,
    k0: f64,
    entries: Array2<f64>,
    method: OperatorMethod,
}

impl OperatorMatrix {
    /// Wraps a caller-built matrix, e.g. `c·I` or an operator with a chosen
    /// spectrum. The matrix must be square with `N²` rows.
    pub fn from_entries(grid: &Grid, k0: f64, entries: Array2<f64>) -> Result<Self> {
        let n2 = grid.len();
        if entries.dim() != (n2, n2) {
            return Err(Error::ShapeMismatch {
                expected: vec![n2, n2],
                found: entries.shape().to_vec(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "operator entries must be finite".into(),
            ));
        }
        Ok(OperatorMatrix {
            grid: grid.clone(),
            k0,
            entries,
            method: OperatorMethod::Explicit,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn method(&self) -> OperatorMethod {
        self.method
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A[r, s] - A[s, r]|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.entries.nrows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for s in (r + 1)..n {
                worst = worst.max((self.entries[[r, s]] - self.entries[[s, r]]).abs());
            }
        }
        worst
    }

    /// Errors unless the asymmetry is within [`SYMMETRY_TOL`] of the largest entry.
    pub fn ensure_symmetric(&self) -> Result<()> {
        let tolerance = SYMMETRY_TOL * self.max_abs();
        let asymmetry = self.asymmetry();
        if asymmetry > tolerance {
            return Err(Error::Asymmetric {
                asymmetry,
                tolerance,
            });
        }
        Ok(())
    }
}

fn check_inputs(grid: &Grid, index_sq: &IndexSquaredMap, k0: f64) -> Result<()> {
    grid.ensure_same(index_sq.grid())?;
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "k0 must be positive, got {k0}"
        )));
    }
    Ok(())
}

/// Builds `H` column by column from the spectral Laplacian's response to a unit
/// impulse at each grid point, then adds `k₀² n²` on the diagonal.
///
/// The inverse transform's imaginary part is dropped only after checking that
/// it is negligible; a large residue means the multipliers are not
/// Hermitian-symmetric.
pub fn build_operator_fft(
    grid: &Grid,
    index_sq: &IndexSquaredMap,
    k0: f64,
) -> Result<OperatorMatrix> {
    check_inputs(grid, index_sq, k0)?;
    let n = grid.n_points();
    let n2 = n * n;
    let multipliers = spectral_laplacian_multipliers(grid)?;
    let fft = Fft2::new(n);
    let k0_sq = k0 * k0;
    let n_sq = index_sq.values();

    let mut data = vec![0.0f64; n2 * n2];
    let residues = par::map_chunks_mut(&mut data, n2, |s, column| {
        let (p, q) = unflat_index(s, n);
        let mut work = Array2::<Complex64>::zeros((n, n));
        work[[p, q]] = Complex64::new(1.0, 0.0);
        fft.apply_multiplier(&mut work, &multipliers);
        let mut residue = 0.0f64;
        for ((m, l), v) in work.indexed_iter() {
            column[m + n * l] = v.re;
            residue = residue.max(v.im.abs());
        }
        column[s] += k0_sq * n_sq[[p, q]];
        residue
    });

    let entries = Array2::from_shape_vec((n2, n2).f(), data).expect("column-major buffer");
    let op = OperatorMatrix {
        grid: grid.clone(),
        k0,
        entries,
        method: OperatorMethod::Fft,
    };
    let residue = residues.into_iter().fold(0.0, f64::max);
    let tolerance = IMAGINARY_RESIDUE_TOL * op.max_abs();
    if residue > tolerance {
        return Err(Error::ImaginaryResidue { residue, tolerance });
    }
    Ok(op)
}

/// Builds `H` from the periodic five-point Laplacian stencil plus `k₀² n²`.
pub fn build_operator_fd(
    grid: &Grid,
    index_sq: &IndexSquaredMap,
    k0: f64,
) -> Result<OperatorMatrix> {
    check_inputs(grid, index_sq, k0)?;
    let n = grid.n_points();
    let n2 = n * n;
    let inv_dx2 = 1.0 / (grid.spacing() * grid.spacing());
    let k0_sq = k0 * k0;
    let n_sq = index_sq.values();

    let mut data = vec![0.0f64; n2 * n2];
    par::map_chunks_mut(&mut data, n2, |s, column| {
        let (p, q) = unflat_index(s, n);
        column[s] = k0_sq * n_sq[[p, q]] - 4.0 * inv_dx2;
        let up = (p + 1) % n;
        let down = (p + n - 1) % n;
        let right = (q + 1) % n;
        let left = (q + n - 1) % n;
        // Accumulate so that on a two-point axis, where the ±1 neighbours
        // coincide, the coupling is doubled rather than overwritten.
        for r in [up + n * q, down + n * q, p + n * right, p + n * left] {
            column[r] += inv_dx2;
        }
    });

    let entries = Array2::from_shape_vec((n2, n2).f(), data).expect("column-major buffer");
    Ok(OperatorMatrix {
        grid: grid.clone(),
        k0,
        entries,
        method: OperatorMethod::Fd,
    })
}

/// Dense product `entries · flatten(field)`, unflattened back onto the grid.
pub fn apply_operator_dense(op: &OperatorMatrix, field: &Field) -> Result<Field> {
    op.grid.ensure_same(field.grid())?;
    let x = field.to_flat();
    let n2 = x.len();
    let mut y = vec![Complex64::default(); n2];
    let entries = &op.entries;
    par::fill_indexed(&mut y, |r| {
        let row = entries.row(r);
        row.iter().zip(x.iter()).map(|(a, v)| v * *a).sum()
    });
    Field::from_flat(&op.grid, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::flat_index;
    use crate::profile::{sample_profile, ParabolicProfile};

    fn uniform(n: usize, dx: f64, n_sq: f64) -> (Grid, IndexSquaredMap) {
        let g = Grid::new(n, dx).unwrap();
        let m = IndexSquaredMap::uniform(&g, n_sq).unwrap();
        (g, m)
    }

    #[test]
    fn fd_small_grid_entries() {
        let (g, m) = uniform(4, 1.0, 1.0);
        let op = build_operator_fd(&g, &m, 1.0).unwrap();
        let a = op.entries();
        for s in 0..16 {
            assert_eq!(a[[s, s]], -3.0);
            let off: Vec<f64> = (0..16)
                .filter(|&r| r != s && a[[r, s]] != 0.0)
                .map(|r| a[[r, s]])
                .collect();
            assert_eq!(off, vec![1.0; 4]);
        }
        assert_eq!(op.method(), OperatorMethod::Fd);
    }

    #[test]
    fn fd_column_sums_are_index_term() {
        let g = Grid::new(6, 0.7).unwrap();
        let m = sample_profile(&g, &ParabolicProfile::new(1.45, 0.3, 2.0).unwrap()).unwrap();
        let k0 = vacuum_wavenumber(1.3);
        let op = build_operator_fd(&g, &m, k0).unwrap();
        for s in 0..36 {
            let (p, q) = unflat_index(s, 6);
            let sum: f64 = op.entries().column(s).sum();
            let expect = k0 * k0 * m.values()[[p, q]];
            assert!((sum - expect).abs() <= 1e-12 * expect);
        }
        assert_eq!(op.asymmetry(), 0.0);
    }

    #[test]
    fn fd_two_point_axis_doubles_coupling() {
        let (g, m) = uniform(2, 1.0, 1.0);
        let op = build_operator_fd(&g, &m, 1.0).unwrap();
        let s = flat_index(0, 0, 2).unwrap();
        assert_eq!(op.entries()[[flat_index(1, 0, 2).unwrap(), s]], 2.0);
        assert_eq!(op.entries()[[flat_index(0, 1, 2).unwrap(), s]], 2.0);
        assert_eq!(op.entries().column(s).sum(), 1.0);
    }

    #[test]
    fn fft_two_point_laplacian_annihilates_dc() {
        let (g, m) = uniform(2, 1.0, 1e-300);
        let op = build_operator_fft(&g, &m, 1e-3).unwrap();
        for r in 0..4 {
            let s: f64 = op.entries().row(r).sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn fft_center_diagonal_matches_brute_force_self_term() {
        let g = Grid::new(40, 1.0).unwrap();
        let m = sample_profile(&g, &ParabolicProfile::graded_fiber()).unwrap();
        let k0 = vacuum_wavenumber(1.3);
        assert!((k0 * k0 - 23.36001041677954).abs() < 1e-12);
        let op = build_operator_fft(&g, &m, k0).unwrap();
        // Self term -(2π/W)² Σκ² / N² summed in numpy: -6.5879609377271455.
        let c = flat_index(20, 20, 40).unwrap();
        assert!((op.entries()[[c, c]] - 27.28405416660319).abs() < 1e-10);
        assert!(op.ensure_symmetric().is_ok());
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let (g, _) = uniform(4, 1.0, 1.0);
        let (_, m) = uniform(6, 1.0, 1.0);
        assert!(build_operator_fft(&g, &m, 1.0).is_err());
        assert!(build_operator_fd(&g, &m, 1.0).is_err());
        let (g, m) = uniform(4, 1.0, 1.0);
        assert!(build_operator_fd(&g, &m, 0.0).is_err());
        assert!(OperatorMatrix::from_entries(&g, 1.0, Array2::zeros((15, 16))).is_err());
    }

    #[test]
    fn dense_apply_examples() {
        let (g, m) = uniform(4, 1.0, 1.3);
        let op = build_operator_fd(&g, &m, 2.0).unwrap();
        let zero = apply_operator_dense(&op, &Field::zeros(&g)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);

        let imp = Field::impulse(&g, 1, 3).unwrap();
        let col = apply_operator_dense(&op, &imp).unwrap();
        let s = flat_index(1, 3, 4).unwrap();
        for (r, v) in col.to_flat().iter().enumerate() {
            assert_eq!(v.re, op.entries()[[r, s]]);
        }

        let ones =
            Field::from_values(&g, Array2::from_elem((4, 4), Complex64::new(1.0, 0.0))).unwrap();
        let out = apply_operator_dense(&op, &ones).unwrap();
        for v in out.values() {
            assert_eq!(*v, Complex64::new(4.0 * 1.3, 0.0));
        }
    }

    #[test]
    fn asymmetric_explicit_matrix_is_flagged() {
        let g = Grid::new(2, 1.0).unwrap();
        let mut a = Array2::eye(4);
        a[[0, 1]] = 0.5;
        let op = OperatorMatrix::from_entries(&g, 1.0, a).unwrap();
        assert!(matches!(
            op.ensure_symmetric(),
            Err(Error::Asymmetric { .. })
        ));
    }
}
