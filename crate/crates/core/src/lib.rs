//! One-way Helmholtz beam propagation through a truncated singular value
//! decomposition of the discretised transverse operator `H = ∇⊥² + k₀²n²`.
//!
//! The operator is assembled as a dense `N² × N²` matrix, either from the
//! impulse responses of the spectral Laplacian ([`build_operator_fft`]) or from
//! a periodic five-point stencil ([`build_operator_fd`]). [`factorize`] keeps
//! its leading singular triplets and attaches `exp(iΔz√λ)` to each mode; every
//! subsequent [`step`] is two small contractions.
//!
//! A paraxial split-step propagator ([`FresnelPropagator`]) and an exact dense
//! eigendecomposition oracle ([`dense_helmholtz_propagator`]) serve as
//! references.
//!
//! With the default `parallel` feature the kernels run on rayon; building
//! without it gives the same results sequentially.

pub mod absorber;
pub mod error;
pub mod grid;
pub mod io;
pub mod operator;
pub mod par;
pub mod profile;
pub mod propagator;
pub mod reference;
pub mod sim;
pub mod spectral;

pub use absorber::{apply_absorber, make_absorber, AbsorberMask};
pub use error::{Error, Result};
pub use grid::{centroid, flat_index, gaussian_field, l2_norm, Field, Grid};
pub use io::{
    ray_period, read_field_snapshot, read_trajectory, write_field_snapshot, write_trajectory,
    TrajectoryRecord,
};
pub use operator::{
    apply_operator_dense, build_operator_fd, build_operator_fft, vacuum_wavenumber, OperatorMatrix,
    OperatorMethod,
};
pub use profile::{
    index_delta_map, parabolic_index_squared, sample_profile, IndexSquaredMap, ParabolicProfile,
};
pub use propagator::{
    factorize, perturbative_phase, signed_spectrum, step, truncated_svd, PropagatorFactors,
    TruncatedSvd,
};
pub use reference::{
    apply_dense_propagator, dense_helmholtz_propagator, fresnel_step, FresnelConfig,
    FresnelPropagator,
};
pub use spectral::spectral_laplacian_multipliers;
