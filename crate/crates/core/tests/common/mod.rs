#![allow(dead_code)]

use std::path::PathBuf;

use helmprop::sim::{parse_config, SimConfig};
use helmprop::{sample_profile, vacuum_wavenumber, Field, Grid, IndexSquaredMap, ParabolicProfile};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WAVELENGTH: f64 = 1.3;

pub fn k0() -> f64 {
    vacuum_wavenumber(WAVELENGTH)
}

/// Graded-index profile sampled on an `n × n` grid at 1 um.
pub fn fiber_map(n: usize) -> (Grid, IndexSquaredMap) {
    let grid = Grid::new(n, 1.0).unwrap();
    let map = sample_profile(&grid, &ParabolicProfile::graded_fiber()).unwrap();
    (grid, map)
}

pub fn random_fields(grid: &Grid, count: usize, seed: u64) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n_points();
    (0..count)
        .map(|_| {
            let values = Array2::from_shape_fn((n, n), |_| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            Field::from_values(grid, values).unwrap()
        })
        .collect()
}

pub fn random_matrix(n: usize, seed: u64) -> nalgebra::DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    nalgebra::DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn shipped_config(name: &str) -> SimConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Complex inner product `Σ conj(a) b` over the samples.
pub fn inner(a: &Field, b: &Field) -> Complex64 {
    a.values()
        .iter()
        .zip(b.values().iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}
