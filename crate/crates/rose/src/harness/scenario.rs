//! Named scenarios and the run pipeline: calibrate, simulate, summarize,
//! regress against the expectations stored in the scenario file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::bloch;
use crate::error::{Error, Result};
use crate::propagation::{self, RunOptions};
use crate::protocol::{self, DetectionWindow, EchoLabel, Geometry};
use crate::pulses::PulseShape;

use super::artifacts;
use super::seq::{self, DetectKind, ScenarioSpec};

/// Command-line grid overrides.
#[derive(Clone, Copy, Debug, Default)]
pub struct GridOverrides {
    pub dt: Option<f64>,
    pub n_det: Option<usize>,
    pub n_z: Option<usize>,
}

impl GridOverrides {
    fn apply(&self, spec: &mut ScenarioSpec) {
        if let Some(dt) = self.dt {
            spec.grid.dt = dt;
        }
        if let Some(n) = self.n_det {
            spec.grid.n_det = n;
        }
        if let Some(n) = self.n_z {
            spec.grid.n_z = n;
        }
    }
}

/// One expectation checked against the summary.
#[derive(Clone, Debug)]
pub struct Regression {
    pub metric: String,
    pub expected: String,
    pub measured: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub name: String,
    pub summary: BTreeMap<String, f64>,
    pub regressions: Vec<Regression>,
    pub artifacts: Vec<PathBuf>,
}

impl ScenarioReport {
    pub fn all_passed(&self) -> bool {
        self.regressions.iter().all(|r| r.pass)
    }
}

const REGISTRY: &[(&str, &str)] = &[
    ("tm_yag_rose", include_str!("../../scenarios/tm_yag_rose.seq")),
    ("er_yso_rose", include_str!("../../scenarios/er_yso_rose.seq")),
    ("er_yso_gain", include_str!("../../scenarios/er_yso_gain.seq")),
    (
        "er_yso_spectrum",
        include_str!("../../scenarios/er_yso_spectrum.seq"),
    ),
    (
        "silencing_2pe",
        include_str!("../../scenarios/silencing_2pe.seq"),
    ),
    (
        "silencing_rose",
        include_str!("../../scenarios/silencing_rose.seq"),
    ),
    (
        "alphal_sweep_base",
        include_str!("../../scenarios/alphal_sweep_base.seq"),
    ),
];

/// Scenario names with their one-line descriptions (the first comment of
/// each file).
pub fn list_scenarios() -> Vec<(String, String)> {
    REGISTRY
        .iter()
        .map(|(name, text)| {
            let description = text
                .lines()
                .find_map(|l| l.trim().strip_prefix('#'))
                .unwrap_or("")
                .trim()
                .to_string();
            (name.to_string(), description)
        })
        .collect()
}

/// Raw sequence text of a registered scenario.
pub fn scenario_source(name: &str) -> Result<&'static str> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

/// Run a registered scenario by name.
pub fn run_scenario(
    name: &str,
    overrides: GridOverrides,
    out_dir: Option<&Path>,
) -> Result<ScenarioReport> {
    let spec = seq::parse_sequence(scenario_source(name)?)?;
    run_scenario_spec(&spec, overrides, out_dir)
}

/// The smallest chirp band half-width `mu beta` in the schedule, if any.
fn chirp_band(spec: &ScenarioSpec) -> Option<f64> {
    spec.pulses
        .iter()
        .filter_map(|p| match &p.shape {
            PulseShape::Chs(c) => Some(c.mu * c.beta),
            _ => None,
        })
        .min_by(f64::total_cmp)
}

/// Run a parsed scenario: calibrate the coupling, simulate, build the
/// summary, write artifacts, and evaluate the stored expectations.
/// Regression failures are reported in the result, not raised as errors.
pub fn run_scenario_spec(
    spec: &ScenarioSpec,
    overrides: GridOverrides,
    out_dir: Option<&Path>,
) -> Result<ScenarioReport> {
    let mut spec = spec.clone();
    overrides.apply(&mut spec);
    seq::validate_semantics(&spec)?;

    let geometry = spec.geometry();
    if geometry == Geometry::BackwardSixtyDeg {
        return Err(Error::Config(
            "the backward 60-degree geometry is analytic-only: use \
             protocol::efficiency_backward instead of a field-solved run"
                .into(),
        ));
    }
    let schedule = spec.schedule();
    let predicted = protocol::predict_echo_times(&schedule);

    // Resolve detection windows.
    let mut windows: Vec<(DetectionWindow, DetectKind)> = Vec::new();
    for d in &spec.detects {
        let window = match d.kind {
            DetectKind::Explicit { lo, hi } => DetectionWindow {
                label: d.label.clone(),
                lo,
                hi,
            },
            DetectKind::Auto(echo) => {
                let mut w = protocol::auto_window(&schedule, echo).ok_or_else(|| {
                    Error::Window(format!(
                        "window `{}` wants the {} echo, but the schedule does \
                         not predict one",
                        d.label,
                        echo.label()
                    ))
                })?;
                w.label = d.label.clone();
                w
            }
        };
        windows.push((window, d.kind));
    }

    // Population sampling: between each rephasing pulse and the next event,
    // where residual tail dressing is smallest, plus every window center.
    // For the last rephasing pulse, the settled population at the headline
    // echo time is the honest reading.
    let rephasing = schedule.rephasing();
    let support_end = schedule.support_end();
    let headline_echo = predicted
        .iter()
        .find(|(l, _)| *l == EchoLabel::Rose)
        .or_else(|| predicted.iter().find(|(l, _)| *l == EchoLabel::TwoPulse))
        .map(|(_, t)| *t);
    let mut nb_samples: Vec<f64> = Vec::new();
    let mut pulse_samples: Vec<f64> = Vec::new();
    for (i, p) in rephasing.iter().enumerate() {
        let t_ref = p.reference_time();
        let sample = match rephasing.get(i + 1) {
            Some(next) => {
                if next.support().0 > p.support().1 {
                    0.5 * (p.support().1 + next.support().0)
                } else {
                    // Overlapping envelope tails: halfway between the pulse
                    // centers keeps the dressing from either tail small.
                    0.5 * (t_ref + next.reference_time())
                }
            }
            None => headline_echo
                .filter(|&e| e > t_ref)
                .unwrap_or(support_end + 0.5e-6),
        };
        pulse_samples.push(sample);
        nb_samples.push(sample);
    }
    for (w, _) in &windows {
        nb_samples.push(w.center());
    }

    let t_end = windows
        .iter()
        .map(|(w, _)| w.hi)
        .chain(nb_samples.iter().copied())
        .fold(support_end, f64::max)
        + 1e-6;
    // The grid-comb recurrence must clear the whole recorded run, not just
    // the driven part.
    spec.grid.validate(&spec.medium, t_end)?;

    // Population band: the inner plateau of the narrowest swept band, clear
    // of the Landau-Zener edge region.
    let band = chirp_band(&spec).map(|half| (-0.5 * half, 0.5 * half));

    let coupling = propagation::calibrate_coupling(&spec.medium, &spec.grid)?;
    let opts = RunOptions {
        initial: spec.prepare,
        t_end,
        nb_sample_times: nb_samples,
        nb_band: band,
        record_depth_profile: false,
        profile_times: pulse_samples.clone(),
    };
    let output = propagation::run_schedule(
        &spec.medium,
        &spec.grid,
        &schedule.pulses,
        coupling,
        &opts,
    )?;

    // Summary metrics.
    let mut summary: BTreeMap<String, f64> = BTreeMap::new();
    summary.insert("coupling".into(), coupling);

    for (w, _) in &windows {
        let energy = output.trace.forward_energy(w.lo, w.hi);
        summary.insert(format!("energy_{}", w.label), energy);
        if let Some(peak) = output.trace.forward_peak_time(w.lo, w.hi) {
            summary.insert(format!("peak_time_{}_s", w.label), peak);
        }
    }

    // Headline echo: the revived window when present, the two-pulse echo
    // otherwise.
    let headline = windows
        .iter()
        .find(|(_, k)| matches!(k, DetectKind::Auto(EchoLabel::Rose)))
        .or_else(|| {
            windows
                .iter()
                .find(|(_, k)| matches!(k, DetectKind::Auto(EchoLabel::TwoPulse)))
        });
    if let (Some(signal), Some((window, _))) = (schedule.signal(), headline) {
        summary.insert(
            "efficiency".into(),
            protocol::measure_efficiency(&output.trace, signal, window)?,
        );
        if let Some(peak) = output.trace.forward_peak_time(window.lo, window.hi) {
            summary.insert("echo_time_s".into(), peak);
        }
    }
    if let ((_, Some(t2), Some(t3)), Geometry::Counterpropagating) =
        (schedule.key_times(), geometry)
    {
        summary.insert(
            "analytic_efficiency".into(),
            protocol::efficiency_forward(spec.medium.alpha_l, t3 - t2, spec.medium.t2),
        );
    }

    // Populations after each rephasing pulse.
    for (i, &t) in pulse_samples.iter().enumerate() {
        if let Some((_, nb)) = output
            .nb_timeline
            .iter()
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
        {
            summary.insert(format!("n_b_after_chs{}", i + 1), *nb);
        }
    }

    // Noise proxy from the population at the revived echo time.
    if let Some((rose_window, _)) = windows
        .iter()
        .find(|(_, k)| matches!(k, DetectKind::Auto(EchoLabel::Rose)))
    {
        if let Some((_, nb)) = output
            .nb_timeline
            .iter()
            .min_by(|a, b| {
                (a.0 - rose_window.center())
                    .abs()
                    .total_cmp(&(b.0 - rose_window.center()).abs())
            })
        {
            summary.insert("n_b_at_echo".into(), *nb);
            summary.insert("snr_proxy".into(), protocol::se_snr_proxy(1.0, *nb));
        }
    }

    // Probe amplification: the transmitted energy ratio of the two probe
    // windows, when the scenario declares them.
    let window_energy = |label: &str| {
        windows
            .iter()
            .find(|(w, _)| w.label == label)
            .map(|(w, _)| output.trace.forward_energy(w.lo, w.hi))
    };
    if let (Some(before), Some(after)) = (window_energy("probe_before"), window_energy("probe_after"))
    {
        if before > 0.0 {
            let gain = after / before;
            summary.insert("gain".into(), gain);
            if spec.medium.alpha_l > 0.0 {
                summary.insert(
                    "n_b_from_gain".into(),
                    protocol::inversion_from_gain(gain, spec.medium.alpha_l)?,
                );
            }
        }
    }

    // Silencing figure: energy in the primary-echo window over the revived
    // echo window, within the same run.
    if let (Some(silenced), Some(revived)) = (
        windows
            .iter()
            .find(|(_, k)| matches!(k, DetectKind::Auto(EchoLabel::TwoPulse))),
        windows
            .iter()
            .find(|(_, k)| matches!(k, DetectKind::Auto(EchoLabel::Rose))),
    ) {
        if geometry == Geometry::Counterpropagating {
            let e_sil = output.trace.forward_energy(silenced.0.lo, silenced.0.hi);
            let e_rev = output.trace.forward_energy(revived.0.lo, revived.0.hi);
            if e_rev > 0.0 {
                summary.insert("silenced_to_echo".into(), e_sil / e_rev);
            }
        }
    }

    // Inversion edge width from the population profile after the first
    // chirped pulse.
    if let (Some(half_band), Some((_, profile))) = (chirp_band(&spec), output.nb_profiles.first())
    {
        let detunings = spec.grid.detunings(&spec.medium);
        let lo = 0.3 * half_band;
        let hi = 1.8 * half_band;
        let pairs: Vec<(f64, f64)> = detunings
            .iter()
            .zip(profile)
            .filter(|(d, _)| **d >= lo && **d <= hi)
            .map(|(d, p)| (*d, *p))
            .collect();
        let dets: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let pops: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        if let Some(width) = bloch::edge_width_10_90(&dets, &pops) {
            summary.insert("edge_width_hz".into(), width / std::f64::consts::TAU);
        }
    }

    // Regressions.
    let regressions: Vec<Regression> = spec
        .expects
        .iter()
        .map(|e| match summary.get(&e.metric) {
            Some(&measured) => Regression {
                metric: e.metric.clone(),
                expected: e.check.describe(),
                measured,
                pass: e.check.passes(measured),
            },
            None => Regression {
                metric: e.metric.clone(),
                expected: format!("{} (metric missing)", e.check.describe()),
                measured: f64::NAN,
                pass: false,
            },
        })
        .collect();

    // Artifacts.
    let mut written = Vec::new();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let trace_path = dir.join(format!("{}_trace.csv", spec.name));
        artifacts::write_trace_csv(&trace_path, &output.trace)?;
        written.push(trace_path);
        let summary_path = dir.join(format!("{}_summary.txt", spec.name));
        artifacts::write_summary(&summary_path, &summary, &regressions)?;
        written.push(summary_path);
        if !output.nb_profiles.is_empty() {
            let profile_path = dir.join(format!("{}_profile.csv", spec.name));
            artifacts::write_profile_csv(
                &profile_path,
                &spec.grid.detunings(&spec.medium),
                &output.nb_profiles,
            )?;
            written.push(profile_path);
        }
    }

    Ok(ScenarioReport {
        name: spec.name.clone(),
        summary,
        regressions,
        artifacts: written,
    })
}
