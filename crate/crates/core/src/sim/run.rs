use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use crate::absorber::{apply_absorber, make_absorber, AbsorberMask};
use crate::error::{Error, Result};
use crate::grid::{centroid, gaussian_field, l2_norm, Field, Grid};
use crate::io::{write_field_snapshot, write_trajectory, TrajectoryRecord};
use crate::operator::{build_operator_fd, build_operator_fft, vacuum_wavenumber};
use crate::profile::{index_delta_map, sample_profile, IndexSquaredMap};
use crate::propagator::{factorize, perturbative_phase, step, svd_invocations, PropagatorFactors};
use crate::reference::{FresnelConfig, FresnelPropagator};

use super::config::{Method, SimConfig};

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub method: Method,
    pub total_z: f64,
    pub final_centroid: (f64, f64),
    pub final_norm: f64,
    pub elapsed: Duration,
    /// SVDs computed during the run; one for z-invariant SVD runs.
    pub factorizations: usize,
    pub trajectory_path: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,
}

enum Stepper {
    Svd {
        factors: PropagatorFactors,
        k0: f64,
    },
    Fresnel {
        cfg: FresnelConfig,
        propagator: FresnelPropagator,
    },
}

/// Index-squared map at the midpoint of step `s` (0-based).
fn index_at_step(
    cfg: &SimConfig,
    start: &IndexSquaredMap,
    end: Option<&IndexSquaredMap>,
    s: usize,
) -> Result<IndexSquaredMap> {
    match end {
        None => Ok(start.clone()),
        Some(end) => {
            let t = (s as f64 + 0.5) / cfg.n_steps as f64;
            start.blend(end, t)
        }
    }
}

fn record(z: f64, field: &Field) -> Result<TrajectoryRecord> {
    let (cx, cy) = centroid(field)?;
    Ok(TrajectoryRecord {
        z,
        centroid_x: cx,
        centroid_y: cy,
        l2_norm: l2_norm(field),
    })
}

/// Runs one configured propagation and writes its trajectory (and snapshots)
/// under `cfg.output_dir`.
///
/// SVD methods build and factorise the operator once at the first step's
/// midpoint index; a `final_profile` is then followed through the
/// perturbative `exp(iΔz k₀ δn)` factor rather than by refactorising.
pub fn run_simulation(cfg: &SimConfig) -> Result<RunSummary> {
    let started = Instant::now();
    let svd_before = svd_invocations();
    let grid = Grid::new(cfg.n_points, cfg.spacing)?;
    let k0 = vacuum_wavenumber(cfg.wavelength);
    let start_map = sample_profile(&grid, &cfg.profile)?;
    let end_map = cfg
        .final_profile
        .as_ref()
        .map(|p| sample_profile(&grid, p))
        .transpose()?;
    let first_map = index_at_step(cfg, &start_map, end_map.as_ref(), 0)?;

    let mut stepper = match cfg.method {
        Method::SvdFft | Method::SvdFd => {
            let op = if cfg.method == Method::SvdFft {
                build_operator_fft(&grid, &first_map, k0)?
            } else {
                build_operator_fd(&grid, &first_map, k0)?
            };
            let n_singular = cfg
                .n_singular
                .ok_or_else(|| Error::config(None, "n_singular missing"))?;
            Stepper::Svd {
                factors: factorize(&op, n_singular, cfg.step_length)?,
                k0,
            }
        }
        Method::Fresnel => {
            let fcfg = FresnelConfig {
                reference_index: cfg
                    .reference_index
                    .ok_or_else(|| Error::config(None, "reference_index missing"))?,
                k0,
                step_length: cfg.step_length,
            };
            Stepper::Fresnel {
                propagator: FresnelPropagator::new(&grid, &first_map, &fcfg)?,
                cfg: fcfg,
            }
        }
    };

    let absorber: Option<AbsorberMask> = if cfg.absorber_every > 0 {
        Some(make_absorber(
            &grid,
            cfg.absorber_margin,
            cfg.absorber_exponent,
        )?)
    } else {
        None
    };

    fs::create_dir_all(&cfg.output_dir)?;
    let tag = cfg.method.as_str();
    let mut snapshot_paths = Vec::new();
    let mut snapshot = |s: usize, z: f64, field: &Field| -> Result<()> {
        if cfg.snapshot_every > 0 && (s.is_multiple_of(cfg.snapshot_every) || s == cfg.n_steps) {
            let path = cfg.output_dir.join(format!("snapshot_{tag}_{s:06}.csv"));
            write_field_snapshot(&path, z, field)?;
            snapshot_paths.push(path);
        }
        Ok(())
    };

    let mut field = gaussian_field(&grid, cfg.beam_width, cfg.beam_offset_x, cfg.beam_offset_y)?;
    let mut records = Vec::with_capacity(cfg.n_steps + 1);
    records.push(record(0.0, &field)?);
    snapshot(0, 0.0, &field)?;

    for s in 0..cfg.n_steps {
        let varying = end_map.is_some() && s > 0;
        field = match &mut stepper {
            Stepper::Svd { factors, k0 } => {
                let next = step(factors, &field)?;
                if varying {
                    let here = index_at_step(cfg, &start_map, end_map.as_ref(), s)?;
                    let delta = index_delta_map(&here, &first_map)?;
                    perturbative_phase(&next, &delta, *k0, cfg.step_length)?
                } else {
                    next
                }
            }
            Stepper::Fresnel {
                cfg: fcfg,
                propagator,
            } => {
                if varying {
                    let here = index_at_step(cfg, &start_map, end_map.as_ref(), s)?;
                    *propagator = FresnelPropagator::new(&grid, &here, fcfg)?;
                }
                propagator.step(&field)?
            }
        };
        let done = s + 1;
        if let Some(mask) = &absorber {
            if done.is_multiple_of(cfg.absorber_every) {
                field = apply_absorber(&field, mask)?;
            }
        }
        if !field.is_finite() {
            return Err(Error::NonFinite { step: done });
        }
        let z = done as f64 * cfg.step_length;
        records.push(record(z, &field)?);
        snapshot(done, z, &field)?;
    }

    let trajectory_path = cfg.output_dir.join(format!("trajectory_{tag}.csv"));
    write_trajectory(&trajectory_path, &records)?;
    let last = records.last().expect("initial record");

    Ok(RunSummary {
        method: cfg.method,
        total_z: cfg.n_steps as f64 * cfg.step_length,
        final_centroid: (last.centroid_x, last.centroid_y),
        final_norm: last.l2_norm,
        elapsed: started.elapsed(),
        factorizations: svd_invocations() - svd_before,
        trajectory_path,
        snapshot_paths,
    })
}
