//! `key = value` run configuration.
//!
//! One key per line; `#` starts a comment. Unknown keys are errors. Every key
//! except `method` has a default reproducing the graded-fibre reference run.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::profile::ParabolicProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SvdFft,
    SvdFd,
    Fresnel,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SvdFft => "svd_fft",
            Method::SvdFd => "svd_fd",
            Method::Fresnel => "fresnel",
        }
    }

    pub fn is_svd(&self) -> bool {
        matches!(self, Method::SvdFft | Method::SvdFd)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "svd_fft" => Ok(Method::SvdFft),
            "svd_fd" => Ok(Method::SvdFd),
            "fresnel" => Ok(Method::Fresnel),
            other => Err(format!(
                "unknown method {other:?} (expected svd_fft, svd_fd or fresnel)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_points: usize,
    pub spacing: f64,
    pub wavelength: f64,
    pub beam_width: f64,
    pub beam_offset_x: f64,
    pub beam_offset_y: f64,
    pub profile: ParabolicProfile,
    /// Profile reached at the end of the run; `n²` is blended linearly in z
    /// and the SVD methods apply the change as a perturbative phase.
    pub final_profile: Option<ParabolicProfile>,
    pub method: Method,
    pub n_singular: Option<usize>,
    pub step_length: f64,
    pub n_steps: usize,
    pub reference_index: Option<f64>,
    pub absorber_margin: f64,
    pub absorber_exponent: f64,
    pub absorber_every: usize,
    pub snapshot_every: usize,
    pub output_dir: PathBuf,
}

/// `(key, default, description)` for the CLI help text.
#[rustfmt::skip]
pub const KEYS: &[(&str, &str, &str)] = &[
    ("n_points", "40", "grid points per side (even)"),
    ("spacing", "1.0", "grid spacing, μm"),
    ("wavelength", "1.3", "vacuum wavelength, μm"),
    ("beam_width", "4.0", "Gaussian 1/e amplitude radius, μm"),
    ("beam_offset_x", "0.0", "initial beam centre x, μm"),
    ("beam_offset_y", "5.0", "initial beam centre y, μm"),
    ("profile_n0_squared", "1.45", "on-axis n²"),
    ("profile_depth", "0.1", "fractional n² drop at the clamp radius"),
    ("profile_clamp_radius", "25.0", "clamp radius, μm"),
    ("final_profile_n0_squared", "-", "optional end-of-run profile (all three or none)"),
    ("final_profile_depth", "-", ""),
    ("final_profile_clamp_radius", "-", ""),
    ("method", "required", "svd_fft | svd_fd | fresnel"),
    ("n_singular", "-", "retained rank; required for svd_* methods"),
    ("step_length", "1.0", "axial step, μm"),
    ("n_steps", "496", "number of steps"),
    ("reference_index", "-", "Fresnel reference index; required for fresnel"),
    ("absorber_margin", "0.0", "absorber taper depth, μm"),
    ("absorber_exponent", "2.0", "absorber taper exponent"),
    ("absorber_every", "0", "apply the absorber every k steps; 0 disables"),
    ("snapshot_every", "0", "write a field snapshot every k steps; 0 disables"),
    ("output_dir", "out", "directory for trajectory and snapshots"),
];

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<(usize, T)>>
    where
        T::Err: fmt::Display,
    {
        match self.map.remove(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(|v| Some((line, v))).map_err(|e| {
                Error::config(Some(line), format!("{key}: cannot parse {raw:?}: {e}"))
            }),
        }
    }

    fn value<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        Ok(self.take(key)?.map(|(_, v)| v))
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }
}

fn check(cond: bool, line: Option<usize>, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::config(line, msg()))
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<SimConfig> {
    let known: Vec<&str> = KEYS.iter().map(|k| k.0).collect();
    let mut map = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            Error::config(
                Some(line_no),
                format!("expected key = value, found {content:?}"),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        if !known.contains(&key) {
            return Err(Error::config(Some(line_no), format!("unknown key {key:?}")));
        }
        if value.is_empty() {
            return Err(Error::config(Some(line_no), format!("{key}: empty value")));
        }
        if map
            .insert(key.to_owned(), (line_no, value.to_owned()))
            .is_some()
        {
            return Err(Error::config(
                Some(line_no),
                format!("duplicate key {key:?}"),
            ));
        }
    }
    let mut e = Entries { map };

    let lines: HashMap<&str, Option<usize>> = known.iter().map(|k| (*k, e.line(k))).collect();
    let at = |k: &str| lines.get(k).copied().flatten();

    let method: Method = e
        .value("method")?
        .ok_or_else(|| Error::config(None, "missing required key \"method\""))?;
    let n_points = e.value("n_points")?.unwrap_or(40usize);
    let spacing = e.value("spacing")?.unwrap_or(1.0f64);
    let wavelength = e.value("wavelength")?.unwrap_or(1.3f64);
    let beam_width = e.value("beam_width")?.unwrap_or(4.0f64);
    let beam_offset_x = e.value("beam_offset_x")?.unwrap_or(0.0f64);
    let beam_offset_y = e.value("beam_offset_y")?.unwrap_or(5.0f64);
    let profile = ParabolicProfile {
        n0_squared: e.value("profile_n0_squared")?.unwrap_or(1.45),
        depth: e.value("profile_depth")?.unwrap_or(0.1),
        clamp_radius: e.value("profile_clamp_radius")?.unwrap_or(25.0),
    };
    let final_parts: (Option<f64>, Option<f64>, Option<f64>) = (
        e.value("final_profile_n0_squared")?,
        e.value("final_profile_depth")?,
        e.value("final_profile_clamp_radius")?,
    );
    let final_profile = match final_parts {
        (None, None, None) => None,
        (Some(n0_squared), Some(depth), Some(clamp_radius)) => Some(ParabolicProfile {
            n0_squared,
            depth,
            clamp_radius,
        }),
        _ => {
            return Err(Error::config(
                at("final_profile_n0_squared")
                    .or(at("final_profile_depth"))
                    .or(at("final_profile_clamp_radius")),
                "final_profile_* keys must be given together",
            ))
        }
    };
    let n_singular: Option<usize> = e.value("n_singular")?;
    let step_length = e.value("step_length")?.unwrap_or(1.0f64);
    let n_steps = e.value("n_steps")?.unwrap_or(496usize);
    let reference_index: Option<f64> = e.value("reference_index")?;
    let absorber_margin = e.value("absorber_margin")?.unwrap_or(0.0f64);
    let absorber_exponent = e.value("absorber_exponent")?.unwrap_or(2.0f64);
    let absorber_every = e.value("absorber_every")?.unwrap_or(0usize);
    let snapshot_every = e.value("snapshot_every")?.unwrap_or(0usize);
    let output_dir: PathBuf = e
        .value::<String>("output_dir")?
        .unwrap_or_else(|| "out".into())
        .into();

    check(n_points >= 2 && n_points % 2 == 0, at("n_points"), || {
        format!("n_points must be even and at least 2, got {n_points}")
    })?;
    for (key, v) in [
        ("spacing", spacing),
        ("wavelength", wavelength),
        ("beam_width", beam_width),
        ("step_length", step_length),
        ("absorber_exponent", absorber_exponent),
    ] {
        check(v > 0.0 && v.is_finite(), at(key), || {
            format!("{key} must be positive, got {v}")
        })?;
    }
    for (key, v) in [
        ("beam_offset_x", beam_offset_x),
        ("beam_offset_y", beam_offset_y),
    ] {
        check(v.is_finite(), at(key), || format!("{key} must be finite"))?;
    }
    check(n_steps >= 1, at("n_steps"), || {
        "n_steps must be at least 1".into()
    })?;
    profile.validate().map_err(|err| {
        Error::config(
            at("profile_depth").or(at("profile_n0_squared")),
            err.to_string(),
        )
    })?;
    if let Some(p) = &final_profile {
        p.validate()
            .map_err(|err| Error::config(at("final_profile_depth"), err.to_string()))?;
    }
    let half_window = 0.5 * n_points as f64 * spacing;
    check(
        absorber_margin >= 0.0 && absorber_margin < half_window,
        at("absorber_margin"),
        || format!("absorber_margin must lie in [0, {half_window}), got {absorber_margin}"),
    )?;

    if method.is_svd() {
        let ns = n_singular.ok_or_else(|| {
            Error::config(at("method"), format!("method {method} requires n_singular"))
        })?;
        let max = n_points * n_points;
        check(ns >= 1 && ns <= max, at("n_singular"), || {
            format!("n_singular must lie in 1..={max} for n_points = {n_points}, got {ns}")
        })?;
    } else {
        let r = reference_index.ok_or_else(|| {
            Error::config(at("method"), "method fresnel requires reference_index")
        })?;
        check(r > 0.0 && r.is_finite(), at("reference_index"), || {
            format!("reference_index must be positive, got {r}")
        })?;
    }

    Ok(SimConfig {
        n_points,
        spacing,
        wavelength,
        beam_width,
        beam_offset_x,
        beam_offset_y,
        profile,
        final_profile,
        method,
        n_singular,
        step_length,
        n_steps,
        reference_index,
        absorber_margin,
        absorber_exponent,
        absorber_every,
        snapshot_every,
        output_dir,
    })
}

/// Help text listing every key and its default.
pub fn keys_help() -> String {
    let mut s = String::from("config keys (key = value, '#' comments):\n");
    for (k, d, desc) in KEYS {
        s.push_str(&format!("  {k:<28} default {d:<9} {desc}\n"));
    }
    s
}
