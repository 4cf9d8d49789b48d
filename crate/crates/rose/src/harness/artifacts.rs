//! CSV and key=value summary writers. CSV is the analysis boundary; no
//! plotting lives in this crate.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::propagation::{DepthProfile, FieldTrace};

use super::scenario::Regression;
use super::sweep::SweepRow;

/// Face envelopes: `time_s,re_fwd,im_fwd,re_bwd,im_bwd`.
pub fn write_trace_csv(path: &Path, trace: &FieldTrace) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "time_s,re_fwd,im_fwd,re_bwd,im_bwd")?;
    for (i, t) in trace.times.iter().enumerate() {
        let f = trace.forward_out[i];
        let b = trace.backward_out[i];
        writeln!(w, "{t},{},{},{},{}", f.re, f.im, b.re, b.im)?;
    }
    Ok(())
}

/// Key=value summary plus one `check_<metric>=pass|fail` line per stored
/// expectation.
pub fn write_summary(
    path: &Path,
    summary: &BTreeMap<String, f64>,
    regressions: &[Regression],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (key, value) in summary {
        writeln!(w, "{key}={value}")?;
    }
    for r in regressions {
        writeln!(
            w,
            "check_{}={} # measured {} expected {}",
            r.metric,
            if r.pass { "pass" } else { "fail" },
            r.measured,
            r.expected
        )?;
    }
    Ok(())
}

/// Per-detuning population profiles: one column per recorded time.
pub fn write_profile_csv(
    path: &Path,
    detunings: &[f64],
    profiles: &[(f64, Vec<f64>)],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<String> = profiles
        .iter()
        .map(|(t, _)| format!("n_b_at_{t:.6e}s"))
        .collect();
    writeln!(w, "detuning_radps,{}", header.join(","))?;
    for (i, d) in detunings.iter().enumerate() {
        let row: Vec<String> = profiles.iter().map(|(_, p)| p[i].to_string()).collect();
        writeln!(w, "{d},{}", row.join(","))?;
    }
    Ok(())
}

/// Depth profile: `z_m,energy,area_rad`.
pub fn write_depth_csv(path: &Path, profile: &DepthProfile) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "z_m,energy,area_rad")?;
    for i in 0..profile.z.len() {
        writeln!(w, "{},{},{}", profile.z[i], profile.energy[i], profile.area[i])?;
    }
    Ok(())
}

/// Sweep table: `parameter,measured,analytic`.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "parameter,measured,analytic")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.value, r.measured, r.analytic)?;
    }
    Ok(())
}
