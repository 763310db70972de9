mod common;

use std::path::Path;

use common::k0;
use helmprop::sim::{compare_runs, parse_config_str, run_simulation, RunSummary, SimConfig};
use helmprop::{
    l2_norm, read_field_snapshot, read_trajectory, write_trajectory, Field, TrajectoryRecord,
};
use num_complex::Complex64;

fn config(dir: &Path, body: &str) -> SimConfig {
    let text = format!(
        "n_points = 16\nbeam_offset_y = 3.0\noutput_dir = {}\n{body}",
        dir.display()
    );
    parse_config_str(&text).unwrap()
}

fn final_snapshot(summary: &RunSummary) -> Field {
    read_field_snapshot(summary.snapshot_paths.last().unwrap())
        .unwrap()
        .1
}

fn first_snapshot(summary: &RunSummary) -> Field {
    read_field_snapshot(&summary.snapshot_paths[0]).unwrap().1
}

#[test]
fn svd_runs_factorize_once() {
    let tmp = tempfile::tempdir().unwrap();
    for n_steps in [1, 25] {
        for method in ["svd_fft", "svd_fd"] {
            let cfg = config(
                tmp.path(),
                &format!(
                    "method = {method}\nn_singular = 40\nn_steps = {n_steps}\nsnapshot_every = 0\n"
                ),
            );
            assert_eq!(
                run_simulation(&cfg).unwrap().factorizations,
                1,
                "{method} x{n_steps}"
            );
        }
    }
    let cfg = config(tmp.path(), "method = svd_fft\nn_singular = 40\nn_steps = 20\nsnapshot_every = 0\nfinal_profile_n0_squared = 1.46\nfinal_profile_depth = 0.1\nfinal_profile_clamp_radius = 25\n");
    assert_eq!(run_simulation(&cfg).unwrap().factorizations, 1);
    let cfg = config(
        tmp.path(),
        "method = fresnel\nreference_index = 1.2\nn_steps = 5\nsnapshot_every = 0\n",
    );
    assert_eq!(run_simulation(&cfg).unwrap().factorizations, 0);
}

#[test]
fn tiny_step_leaves_the_field_unchanged() {
    let tmp = tempfile::tempdir().unwrap();
    for method in [
        "method = svd_fft\nn_singular = 256",
        "method = svd_fd\nn_singular = 256",
        "method = fresnel\nreference_index = 1.2",
    ] {
        let cfg = config(
            tmp.path(),
            &format!("{method}\nn_steps = 1\nstep_length = 1e-6\nsnapshot_every = 1\n"),
        );
        let summary = run_simulation(&cfg).unwrap();
        let (start, end) = (first_snapshot(&summary), final_snapshot(&summary));
        let rel = end.max_abs_diff(&start) / start.max_abs();
        assert!(rel < 1e-4, "{method}: {rel}");
    }
}

#[test]
fn uniform_medium_full_rank_conserves_norm() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "method = svd_fft\nn_singular = 256\nn_steps = 10\nprofile_depth = 0\nsnapshot_every = 0\n",
    );
    run_simulation(&cfg).unwrap();
    let traj = read_trajectory(tmp.path().join("trajectory_svd_fft.csv")).unwrap();
    assert_eq!(traj.len(), 11);
    let n0 = traj[0].l2_norm;
    for r in &traj {
        assert!(
            (r.l2_norm - n0).abs() < 1e-8 * n0,
            "z = {}: {}",
            r.z,
            r.l2_norm
        );
    }
}

#[test]
fn trajectory_and_snapshot_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "method = fresnel\nreference_index = 1.2\nn_steps = 7\nstep_length = 0.5\nsnapshot_every = 3\n");
    let summary = run_simulation(&cfg).unwrap();
    let traj = read_trajectory(&summary.trajectory_path).unwrap();
    let z: Vec<f64> = traj.iter().map(|r| r.z).collect();
    assert_eq!(z, (0..=7).map(|s| s as f64 * 0.5).collect::<Vec<_>>());
    let names: Vec<String> = summary
        .snapshot_paths
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        [
            "snapshot_fresnel_000000.csv",
            "snapshot_fresnel_000003.csv",
            "snapshot_fresnel_000006.csv",
            "snapshot_fresnel_000007.csv"
        ]
    );
    assert_eq!(summary.total_z, 3.5);
    assert_eq!(
        read_field_snapshot(&summary.snapshot_paths[2]).unwrap().0,
        3.0
    );
}

#[test]
fn absorber_only_acts_on_its_cadence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "method = svd_fft\nn_singular = 256\nn_steps = 6\nabsorber_margin = 4.0\nabsorber_exponent = 2\nabsorber_every = 2\nsnapshot_every = 0\n",
    );
    run_simulation(&cfg).unwrap();
    let traj = read_trajectory(tmp.path().join("trajectory_svd_fft.csv")).unwrap();
    for s in 1..traj.len() {
        let (before, after) = (traj[s - 1].l2_norm, traj[s].l2_norm);
        if s % 2 == 0 {
            assert!(
                after < before * (1.0 - 1e-6),
                "step {s}: {before} -> {after}"
            );
        } else {
            assert!(
                (after - before).abs() < 1e-10 * before,
                "step {s}: {before} -> {after}"
            );
        }
    }
}

#[test]
fn unchanged_final_profile_reproduces_the_static_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let body = "method = svd_fft\nn_singular = 60\nn_steps = 12\nsnapshot_every = 12\n";
    let fixed = run_simulation(&config(a.path(), body)).unwrap();
    let blended = run_simulation(&config(
        b.path(),
        &format!("{body}final_profile_n0_squared = 1.45\nfinal_profile_depth = 0.1\nfinal_profile_clamp_radius = 25\n"),
    ))
    .unwrap();
    // The blend of two equal maps may differ from either by an ulp.
    let (x, y) = (final_snapshot(&fixed), final_snapshot(&blended));
    assert!(x.max_abs_diff(&y) < 1e-12 * x.max_abs());
}

#[test]
fn blended_uniform_medium_picks_up_the_perturbative_phase() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (start, end, n_steps, dz) = (1.45, 1.47, 10usize, 1.0);
    let blend = |s: usize| start + (end - start) * (s as f64 + 0.5) / n_steps as f64;
    let common = format!(
        "method = svd_fft\nn_singular = 256\nn_steps = {n_steps}\nstep_length = {dz}\nprofile_depth = 0\nsnapshot_every = {n_steps}\n"
    );
    // The blended run factorises at the first step's midpoint index.
    let fixed = run_simulation(&config(
        a.path(),
        &format!("{common}profile_n0_squared = {:?}\n", blend(0)),
    ))
    .unwrap();
    let blended = run_simulation(&config(
        b.path(),
        &format!("{common}profile_n0_squared = {start}\nfinal_profile_n0_squared = {end}\nfinal_profile_depth = 0\nfinal_profile_clamp_radius = 25\n"),
    ))
    .unwrap();

    let total: f64 = (1..n_steps)
        .map(|s| dz * k0() * (blend(s).sqrt() - blend(0).sqrt()))
        .sum();
    let expected = final_snapshot(&fixed).scale(Complex64::from_polar(1.0, total));
    let got = final_snapshot(&blended);
    assert!(
        got.max_abs_diff(&expected) < 1e-10 * got.max_abs(),
        "{}",
        got.max_abs_diff(&expected)
    );
    assert!((l2_norm(&got) - l2_norm(&expected)).abs() < 1e-10);
}

#[test]
fn repeated_runs_write_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let body = "method = svd_fd\nn_singular = 50\nn_steps = 9\nsnapshot_every = 4\nabsorber_margin = 3\nabsorber_every = 3\n";
    let first = run_simulation(&config(a.path(), body)).unwrap();
    let second = run_simulation(&config(b.path(), body)).unwrap();
    let mut paths = first.snapshot_paths.clone();
    paths.push(first.trajectory_path.clone());
    for p in paths {
        let twin = b.path().join(p.file_name().unwrap());
        assert_eq!(
            std::fs::read(&p).unwrap(),
            std::fs::read(&twin).unwrap(),
            "{}",
            p.display()
        );
    }
    assert_eq!(second.snapshot_paths.len(), first.snapshot_paths.len());
}

#[test]
fn compare_reports_offsets_and_rejects_mismatched_grids() {
    let tmp = tempfile::tempdir().unwrap();
    let traj = |offset: f64, dz: f64| -> Vec<TrajectoryRecord> {
        (0..5)
            .map(|s| TrajectoryRecord {
                z: s as f64 * dz,
                centroid_x: 0.0,
                centroid_y: 2.0 + offset,
                l2_norm: 1.0,
            })
            .collect()
    };
    let paths: Vec<_> = ["a.csv", "b.csv", "c.csv"]
        .iter()
        .map(|n| tmp.path().join(n))
        .collect();
    write_trajectory(&paths[0], &traj(0.0, 1.0)).unwrap();
    write_trajectory(&paths[1], &traj(1.0, 1.0)).unwrap();
    write_trajectory(&paths[2], &traj(0.0, 2.0)).unwrap();

    let report = compare_runs(&paths[..2]).unwrap();
    assert_eq!(report.pairs.len(), 1);
    assert!((report.pairs[0].rms_dy - 1.0).abs() < 1e-12);
    assert!((report.pairs[0].max_dy - 1.0).abs() < 1e-12);

    let same = compare_runs(&[&paths[0], &paths[0]]).unwrap();
    assert_eq!((same.pairs[0].rms_dy, same.pairs[0].max_dy), (0.0, 0.0));

    assert!(compare_runs(&[&paths[0], &paths[2]]).is_err());
    assert!(compare_runs(&paths[..1]).is_err());
}
