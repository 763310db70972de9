//! Truncated-SVD factorisation of the operator and the rank-limited step
//! `E ← U · diag(exp(iΔz√λ)) · Vᵀ · E`.
//!
//! A singular triplet `(u, σ, v)` of a symmetric matrix is an eigenpair up to
//! sign: `λ = σ · sign⟨u, v⟩`. The sign is recovered before the square root so
//! that negative eigenvalues (evanescent modes) decay as `exp(-Δz√|λ|)`.

use std::cell::Cell;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::svd::{self as faer_svd, ComputeSvdVectors};
use faer::{Mat, Par};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::grid::Grid;
use crate::operator::OperatorMatrix;
use crate::par;

/// Unit-norm tolerance for [`signed_spectrum`] inputs.
const UNIT_NORM_TOL: f64 = 1e-8;

thread_local! {
    static SVD_CALLS: Cell<usize> = const { Cell::new(0) };
}

/// Number of SVDs computed on the calling thread so far.
pub fn svd_invocations() -> usize {
    SVD_CALLS.with(Cell::get)
}

/// Leading singular triplets of an operator, descending in σ.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// `N² × rank`, columns are left singular vectors.
    pub u: Array2<f64>,
    pub sigma: Vec<f64>,
    /// `N² × rank`, columns are right singular vectors.
    pub v: Array2<f64>,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `Σ_q σ_q u_q v_qᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.u * &ndarray::Array1::from(self.sigma.clone());
        scaled.dot(&self.v.t())
    }
}

/// Full SVD of the operator, keeping the leading `rank` triplets.
///
/// Runs single-threaded so that repeated runs are bit-identical.
pub fn truncated_svd(op: &OperatorMatrix, rank: usize) -> Result<TruncatedSvd> {
    let a = op.entries();
    let n2 = a.nrows();
    if rank == 0 || rank > n2 {
        return Err(Error::InvalidArgument(format!(
            "rank must lie in 1..={n2}, got {rank}"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Decomposition(
            "operator has non-finite entries".into(),
        ));
    }

    let m = Mat::<f64>::from_fn(n2, n2, |r, s| a[[r, s]]);
    let mut u = Mat::<f64>::zeros(n2, n2);
    let mut v = Mat::<f64>::zeros(n2, n2);
    let mut s = faer::diag::Diag::<f64>::zeros(n2);
    let par = Par::Seq;
    let scratch = faer_svd::svd_scratch::<f64>(
        n2,
        n2,
        ComputeSvdVectors::Full,
        ComputeSvdVectors::Full,
        par,
        Default::default(),
    );
    let mut buf = MemBuffer::new(scratch);
    faer_svd::svd(
        m.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        Some(v.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    SVD_CALLS.with(|c| c.set(c.get() + 1));

    let sv = s.column_vector();
    let sigma: Vec<f64> = (0..rank).map(|q| sv[q]).collect();
    Ok(TruncatedSvd {
        u: Array2::from_shape_fn((n2, rank), |(r, q)| u[(r, q)]),
        sigma,
        v: Array2::from_shape_fn((n2, rank), |(r, q)| v[(r, q)]),
    })
}

/// Eigenvalue carried by a singular triplet of a symmetric matrix,
/// `σ · sign⟨u, v⟩`, with `sign(0) = +1`.
pub fn signed_spectrum(u_column: &[f64], sigma: f64, v_row: &[f64]) -> Result<f64> {
    if u_column.len() != v_row.len() {
        return Err(Error::ShapeMismatch {
            expected: vec![u_column.len()],
            found: vec![v_row.len()],
        });
    }
    for (name, x) in [("u", u_column), ("v", v_row)] {
        let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "{name} must have unit norm, got {norm}"
            )));
        }
    }
    let dot: f64 = u_column.iter().zip(v_row).map(|(a, b)| a * b).sum();
    Ok(if dot < 0.0 { -sigma } else { sigma })
}

/// `exp(iΔz√λ)` on the principal branch: a pure phase for `λ ≥ 0`, the decay
/// `exp(-Δz√|λ|)` for `λ < 0`.
pub fn mode_phase(eigenvalue: f64, step_length: f64) -> Complex64 {
    if eigenvalue >= 0.0 {
        Complex64::from_polar(1.0, step_length * eigenvalue.sqrt())
    } else {
        Complex64::new((-step_length * (-eigenvalue).sqrt()).exp(), 0.0)
    }
}

/// Truncated propagator for one step length.
///
/// `left` is `N² × n_singular` (columns of `U`); `right` is `n_singular × N²`
/// (rows of `Vᵀ`, each multiplied by its mode's phase and by the sign of its
/// eigenvalue). Both are indexed by the flattened grid position
/// `r = i + N·j`; [`PropagatorFactors::left_at`] and
/// [`PropagatorFactors::right_at`] give the `[i, j, q]` tensor view.
#[derive(Debug, Clone)]
pub struct PropagatorFactors {
    grid: Grid,
    left: Array2<f64>,
    right: Array2<Complex64>,
    singular_values: Vec<f64>,
    signed_eigenvalues: Vec<f64>,
    phases: Vec<Complex64>,
    step_length: f64,
}

impl PropagatorFactors {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_singular(&self) -> usize {
        self.singular_values.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn signed_eigenvalues(&self) -> &[f64] {
        &self.signed_eigenvalues
    }

    /// `exp(iΔz√λ_q)` per retained mode.
    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn step_length(&self) -> f64 {
        self.step_length
    }

    pub fn left(&self) -> &Array2<f64> {
        &self.left
    }

    pub fn right(&self) -> &Array2<Complex64> {
        &self.right
    }

    pub fn left_at(&self, i: usize, j: usize, q: usize) -> f64 {
        self.left[[i + self.grid.n_points() * j, q]]
    }

    pub fn right_at(&self, i: usize, j: usize, q: usize) -> Complex64 {
        self.right[[q, i + self.grid.n_points() * j]]
    }
}

/// Factorises `op` and keeps the `n_singular` largest singular triplets.
pub fn factorize(
    op: &OperatorMatrix,
    n_singular: usize,
    step_length: f64,
) -> Result<PropagatorFactors> {
    if !(step_length > 0.0 && step_length.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step length must be positive, got {step_length}"
        )));
    }
    let svd = truncated_svd(op, n_singular)?;
    let n2 = svd.u.nrows();

    let mut signed = Vec::with_capacity(n_singular);
    for q in 0..n_singular {
        let u = svd.u.column(q).to_vec();
        let v = svd.v.column(q).to_vec();
        signed.push(signed_spectrum(&u, svd.sigma[q], &v)?);
    }
    let phases: Vec<Complex64> = signed.iter().map(|&l| mode_phase(l, step_length)).collect();

    // u_q = sign_q v_q for a symmetric operator, so folding the sign into the
    // right factor makes U diag(sign · phase) Vᵀ equal to Σ phase_q v_q v_qᵀ.
    let right = Array2::from_shape_fn((n_singular, n2), |(q, r)| {
        let sign = if signed[q] < 0.0 { -1.0 } else { 1.0 };
        phases[q] * (sign * svd.v[[r, q]])
    });

    Ok(PropagatorFactors {
        grid: op.grid().clone(),
        left: svd.u,
        right,
        singular_values: svd.sigma,
        signed_eigenvalues: signed,
        phases,
        step_length,
    })
}

/// Advances `field` by one step: project onto the retained right singular
/// vectors, then resum with the left ones.
pub fn step(factors: &PropagatorFactors, field: &Field) -> Result<Field> {
    factors.grid.ensure_same(field.grid())?;
    let x = field.to_flat();
    let right = &factors.right;
    let left = &factors.left;

    let coefficients = par::map_range(factors.n_singular(), |q| {
        right
            .row(q)
            .iter()
            .zip(x.iter())
            .map(|(a, b)| a * b)
            .sum::<Complex64>()
    });

    let mut out = vec![Complex64::default(); x.len()];
    par::fill_indexed(&mut out, |r| {
        left.row(r)
            .iter()
            .zip(coefficients.iter())
            .map(|(a, c)| c * *a)
            .sum()
    });
    Field::from_flat(&factors.grid, &out)
}

/// Multiplies by `exp(iΔz k₀ δn)` pointwise, leaving amplitudes unchanged.
pub fn perturbative_phase(
    field: &Field,
    delta_n: &Array2<f64>,
    k0: f64,
    step_length: f64,
) -> Result<Field> {
    field.grid().ensure_shape(delta_n)?;
    let mut values = field.values().clone();
    values.zip_mut_with(delta_n, |v, d| {
        *v *= Complex64::from_polar(1.0, step_length * k0 * d);
    });
    Field::from_values(field.grid(), values)
}
