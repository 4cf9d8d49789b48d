//! Named pulse schedules, echo-time predictions, analytic and measured
//! efficiencies, and the spontaneous-emission population proxy.

use std::f64::consts::PI;

use crate::ensemble::MediumSpec;
use crate::error::{Error, Result};
use crate::propagation::{FieldTrace, RunOutput};
use crate::pulses::{Direction, PulseEvent, PulseShape};

/// Beam geometry of a schedule. Only the first two are field-solved; the
/// backward-retrieval geometry is handled analytically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// All pulses along +z.
    Copropagating,
    /// Rephasing pulses along -z, signal along +z.
    Counterpropagating,
    /// Signal and rephasing paths at 60 degrees, echo retrieved backward.
    BackwardSixtyDeg,
}

impl Geometry {
    pub fn label(&self) -> &'static str {
        match self {
            Geometry::Copropagating => "coprop",
            Geometry::Counterpropagating => "counterprop",
            Geometry::BackwardSixtyDeg => "backward60",
        }
    }
}

/// An ordered pulse schedule with its beam geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub pulses: Vec<PulseEvent>,
    pub geometry: Geometry,
}

/// Pulses with area below this are treated as stored signals rather than
/// rephasing pulses.
const SIGNAL_AREA_LIMIT: f64 = 0.5 * PI;

impl Schedule {
    pub fn new(pulses: Vec<PulseEvent>, geometry: Geometry) -> Self {
        Schedule { pulses, geometry }
    }

    /// The stored signal: the first weak pulse.
    pub fn signal(&self) -> Option<&PulseEvent> {
        self.pulses
            .iter()
            .find(|p| p.shape.area() < SIGNAL_AREA_LIMIT)
    }

    /// Strong rephasing pulses in time order.
    pub fn rephasing(&self) -> Vec<&PulseEvent> {
        self.pulses
            .iter()
            .filter(|p| p.shape.area() >= SIGNAL_AREA_LIMIT)
            .collect()
    }

    /// Reference times (t1, t2, t3) where present.
    pub fn key_times(&self) -> (Option<f64>, Option<f64>, Option<f64>) {
        let t1 = self.signal().map(|p| p.reference_time());
        let reph = self.rephasing();
        let t2 = reph.first().map(|p| p.reference_time());
        let t3 = reph.get(1).map(|p| p.reference_time());
        (t1, t2, t3)
    }

    /// Ordering and revival-causality rules.
    pub fn validate(&self) -> Result<()> {
        let mut last = f64::NEG_INFINITY;
        for p in &self.pulses {
            let t = p.reference_time();
            if t <= last {
                return Err(Error::Config(
                    "schedule rule violated: pulses must be strictly ordered in time".into(),
                ));
            }
            last = t;
        }
        if let (Some(t1), Some(t2), Some(t3)) = self.key_times() {
            let primary = t1 + 2.0 * (t2 - t1);
            if t3 <= primary {
                return Err(Error::Config(format!(
                    "schedule rule violated: the second rephasing pulse at \
                     t3 = {t3:.3e} s must come after the primary echo at \
                     t1 + 2 t12 = {primary:.3e} s"
                )));
            }
        }
        match self.geometry {
            Geometry::Copropagating => {
                if self.pulses.iter().any(|p| p.direction == Direction::Backward) {
                    return Err(Error::Config(
                        "schedule rule violated: copropagating geometry cannot \
                         contain -z pulses"
                            .into(),
                    ));
                }
            }
            Geometry::Counterpropagating => {
                for p in self.rephasing() {
                    if p.direction != Direction::Backward {
                        return Err(Error::Config(
                            "schedule rule violated: counterpropagating geometry \
                             requires -z rephasing pulses"
                                .into(),
                        ));
                    }
                }
            }
            Geometry::BackwardSixtyDeg => {}
        }
        Ok(())
    }

    /// End of the last envelope.
    pub fn support_end(&self) -> f64 {
        self.pulses
            .iter()
            .map(|p| p.support().1)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EchoLabel {
    TwoPulse,
    Rose,
    ThreePulse,
}

impl EchoLabel {
    pub fn label(&self) -> &'static str {
        match self {
            EchoLabel::TwoPulse => "2pe",
            EchoLabel::Rose => "rose",
            EchoLabel::ThreePulse => "3pe",
        }
    }
}

/// Predicted emission times for every echo the schedule supports:
/// two-pulse at `t1 + 2 t12`, revived at `t1 + 2 t23`, and the conventional
/// stimulated echo at `t1 + t23 + 2 t12` for disambiguation.
pub fn predict_echo_times(schedule: &Schedule) -> Vec<(EchoLabel, f64)> {
    let mut out = Vec::new();
    if let (Some(t1), Some(t2), t3) = schedule.key_times() {
        let t12 = t2 - t1;
        out.push((EchoLabel::TwoPulse, t1 + 2.0 * t12));
        if let Some(t3) = t3 {
            let t23 = t3 - t2;
            out.push((EchoLabel::ThreePulse, t1 + t23 + 2.0 * t12));
            out.push((EchoLabel::Rose, t1 + 2.0 * t23));
        }
    }
    out
}

/// A labeled time window on the detector.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionWindow {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
}

impl DetectionWindow {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Default windows: each predicted echo time, padded by twice the signal
/// width on each side (wide windows pick up free-induction tails).
pub fn auto_window(schedule: &Schedule, label: EchoLabel) -> Option<DetectionWindow> {
    let signal = schedule.signal()?;
    let width = match &signal.shape {
        PulseShape::Gaussian(g) => g.fwhm,
        PulseShape::Rect(r) => r.duration,
        PulseShape::Chs(c) => 2.0 / c.beta,
    };
    predict_echo_times(schedule)
        .into_iter()
        .find(|(l, _)| *l == label)
        .map(|(_, t)| DetectionWindow {
            label: label.label().to_string(),
            lo: t - 2.0 * width,
            hi: t + 2.0 * width,
        })
}

/// Forward-recovery efficiency `(alpha L)^2 e^{-alpha L - 4 t23 / T2}`.
pub fn efficiency_forward(alpha_l: f64, t23: f64, t2: f64) -> f64 {
    alpha_l * alpha_l * (-alpha_l - 4.0 * t23 / t2).exp()
}

/// Backward-recovery efficiency `(1 - e^{-alpha L})^2`, which approaches one
/// at large opacity.
pub fn efficiency_backward(alpha_l: f64) -> f64 {
    let captured = 1.0 - (-alpha_l).exp();
    captured * captured
}

/// Ratio of the echo energy in `window` to the energy of the signal measured
/// at the input face.
pub fn measure_efficiency(
    trace: &FieldTrace,
    signal: &PulseEvent,
    window: &DetectionWindow,
) -> Result<f64> {
    if !(window.hi > window.lo) {
        return Err(Error::Window(format!(
            "window `{}` is empty: [{:.3e}, {:.3e}]",
            window.label, window.lo, window.hi
        )));
    }
    let (s_lo, s_hi) = signal.support();
    if window.lo < s_hi && window.hi > s_lo {
        return Err(Error::Window(format!(
            "window `{}` overlaps the input pulse support [{s_lo:.3e}, {s_hi:.3e}]",
            window.label
        )));
    }
    let input = trace.input_energy(s_lo, s_hi);
    if input <= 0.0 {
        return Err(Error::Window("input pulse carries no energy".into()));
    }
    Ok(trace.forward_energy(window.lo, window.hi) / input)
}

/// Upper-level population inferred from a probe amplification factor:
/// `n_b = ln(gain) / (2 alpha L)`, clamped to [0, 1]. The gain is the ratio
/// of transmitted probe intensity after inversion to before (so full
/// inversion gives `e^{2 alpha L}` and an untouched medium gives 1, i.e.
/// `n_b = 1/2` at the transparency point).
pub fn inversion_from_gain(gain: f64, alpha_l: f64) -> Result<f64> {
    if !(gain > 0.0) {
        return Err(Error::InvalidInput(format!(
            "gain must be positive, got {gain}"
        )));
    }
    if !(alpha_l > 0.0) {
        return Err(Error::InvalidInput(format!(
            "alpha L must be positive, got {alpha_l}"
        )));
    }
    Ok((gain.ln() / (2.0 * alpha_l)).clamp(0.0, 1.0))
}

/// Spontaneous-emission signal-to-noise improvement over the plain
/// two-pulse echo: the ratio of upper-level populations at the respective
/// echo times. The fully inverted two-pulse baseline is 1.0.
pub fn se_snr_proxy(nb_at_2pe_echo: f64, nb_at_rose_echo: f64) -> f64 {
    if nb_at_rose_echo <= 0.0 {
        return f64::INFINITY;
    }
    nb_at_2pe_echo / nb_at_rose_echo
}

/// Post-run observables assembled from a trace.
#[derive(Clone, Debug)]
pub struct RunResult {
    /// Measured peak time per window label.
    pub echo_times: Vec<(String, f64)>,
    /// Integrated `|Omega|^2 dt` per window label.
    pub echo_energies: Vec<(String, f64)>,
    /// Echo energy over input-signal energy for the headline window.
    pub efficiency: Option<f64>,
    /// (time, band-mean upper population) samples.
    pub nb_timeline: Vec<(f64, f64)>,
    /// Closed-form forward efficiency for this schedule, when applicable.
    pub analytic_prediction: Option<f64>,
    /// SE noise improvement inferred from the population at the revived
    /// echo time.
    pub snr_proxy: Option<f64>,
}

/// Reduce a run to its observables. The headline window is `rose` when
/// present, otherwise `2pe`.
pub fn analyze(
    output: &RunOutput,
    schedule: &Schedule,
    medium: &MediumSpec,
    windows: &[DetectionWindow],
) -> Result<RunResult> {
    let mut echo_times = Vec::new();
    let mut echo_energies = Vec::new();
    for w in windows {
        if let Some(t) = output.trace.forward_peak_time(w.lo, w.hi) {
            echo_times.push((w.label.clone(), t));
        }
        echo_energies.push((w.label.clone(), output.trace.forward_energy(w.lo, w.hi)));
    }

    let headline = windows
        .iter()
        .find(|w| w.label == "rose")
        .or_else(|| windows.iter().find(|w| w.label == "2pe"));
    let efficiency = match (schedule.signal(), headline) {
        (Some(signal), Some(window)) => Some(measure_efficiency(&output.trace, signal, window)?),
        _ => None,
    };

    let analytic_prediction = match (schedule.key_times(), schedule.geometry) {
        ((Some(_), Some(t2), Some(t3)), Geometry::Counterpropagating) => {
            Some(efficiency_forward(medium.alpha_l, t3 - t2, medium.t2))
        }
        (_, Geometry::BackwardSixtyDeg) => Some(efficiency_backward(medium.alpha_l)),
        _ => None,
    };

    let snr_proxy = windows
        .iter()
        .find(|w| w.label == "rose")
        .and_then(|w| {
            output
                .nb_timeline
                .iter()
                .filter(|(t, _)| (*t - w.center()).abs() <= (w.hi - w.lo))
                .map(|(_, nb)| *nb)
                .next()
        })
        .map(|nb| se_snr_proxy(1.0, nb));

    Ok(RunResult {
        echo_times,
        echo_energies,
        efficiency,
        nb_timeline: output.nb_timeline.clone(),
        analytic_prediction,
        snr_proxy,
    })
}

/// A copropagating two-pulse echo schedule: weak signal plus a rectangular
/// pi pulse.
pub fn two_pulse_echo(
    signal: crate::pulses::GaussianParams,
    pi_pulse: crate::pulses::RectParams,
) -> Schedule {
    Schedule::new(
        vec![
            PulseEvent::new(PulseShape::Gaussian(signal), Direction::Forward),
            PulseEvent::new(PulseShape::Rect(pi_pulse), Direction::Forward),
        ],
        Geometry::Copropagating,
    )
}

/// A counterpropagating revival schedule: weak forward signal plus two
/// backward chirped rephasing pulses.
pub fn rose_counterpropagating(
    signal: crate::pulses::GaussianParams,
    chs: crate::pulses::ChsParams,
    t2: f64,
    t3: f64,
) -> Schedule {
    let first = crate::pulses::ChsParams { center: t2, ..chs };
    let second = crate::pulses::ChsParams { center: t3, ..chs };
    Schedule::new(
        vec![
            PulseEvent::new(PulseShape::Gaussian(signal), Direction::Forward),
            PulseEvent::new(PulseShape::Chs(first), Direction::Backward),
            PulseEvent::new(PulseShape::Chs(second), Direction::Backward),
        ],
        Geometry::Counterpropagating,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{ChsParams, GaussianParams, RectParams};

    fn tiny_signal(center: f64) -> GaussianParams {
        GaussianParams::new(2e-6, 0.05 * PI, center).unwrap()
    }

    #[test]
    fn predicted_times_two_pulse() {
        // A rectangular rephasing pulse acts at its midpoint: started at
        // 9.5 us with 1 us duration it rotates at t2 = 10 us.
        let s = two_pulse_echo(tiny_signal(0.0), RectParams::new(1e-6, PI, 9.5e-6).unwrap());
        let times = predict_echo_times(&s);
        let (label, t) = times[0];
        assert_eq!(label, EchoLabel::TwoPulse);
        assert!((t - 20e-6).abs() < 1e-12);
    }

    #[test]
    fn predicted_times_disambiguate_rose_from_stimulated_echo() {
        // t1 = 0, t12 = 10 us, t23 = 30 us: stimulated echo at 50 us, the
        // revived echo at 60 us.
        let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0).unwrap();
        let s = rose_counterpropagating(tiny_signal(0.0), chs, 10e-6, 40e-6);
        let times = predict_echo_times(&s);
        let find = |l: EchoLabel| times.iter().find(|(x, _)| *x == l).unwrap().1;
        assert!((find(EchoLabel::ThreePulse) - 50e-6).abs() < 1e-12);
        assert!((find(EchoLabel::Rose) - 60e-6).abs() < 1e-12);
        assert!((find(EchoLabel::TwoPulse) - 20e-6).abs() < 1e-12);
    }

    #[test]
    fn rose_time_example_er() {
        // t23 = 41 us: revived echo 82 us after the signal.
        let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0).unwrap();
        let s = rose_counterpropagating(tiny_signal(0.0), chs, 20e-6, 61e-6);
        let rose = predict_echo_times(&s)
            .into_iter()
            .find(|(l, _)| *l == EchoLabel::Rose)
            .unwrap()
            .1;
        assert!((rose - 82e-6).abs() < 1e-12);
    }

    #[test]
    fn rose_time_independent_of_t2_pulse() {
        let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0).unwrap();
        let t1 = 5e-6;
        let t23 = 30e-6;
        let rose_at = |t2: f64| {
            let s = rose_counterpropagating(tiny_signal(t1), chs, t2, t2 + t23);
            predict_echo_times(&s)
                .into_iter()
                .find(|(l, _)| *l == EchoLabel::Rose)
                .unwrap()
                .1
        };
        let reference = rose_at(14e-6);
        for t2 in [12e-6, 16e-6, 20e-6] {
            assert!((rose_at(t2) - reference).abs() < 1e-15);
        }
        assert!((reference - (t1 + 2.0 * t23)).abs() < 1e-15);
    }

    #[test]
    fn forward_efficiency_values() {
        // Relaxation-free maximum at alpha L = 2.
        let peak = efficiency_forward(2.0, 0.0, f64::INFINITY);
        assert!((peak - 4.0 * (-2.0f64).exp()).abs() < 1e-12);
        assert!((peak - 0.5413).abs() < 1e-4);
        // Tm:YAG numbers.
        let tm = efficiency_forward(1.05, 13e-6, 42e-6);
        assert!((tm - 0.112).abs() < 5e-4);
        // Er:YSO numbers.
        let er = efficiency_forward(0.71, 41e-6, 230e-6);
        assert!((er - 0.122).abs() < 1e-3);
    }

    #[test]
    fn forward_efficiency_argmax_at_two() {
        let mut best = (0.0, 0.0);
        let step = 1e-3;
        let mut x = step;
        while x < 6.0 {
            let v = efficiency_forward(x, 0.0, f64::INFINITY);
            if v > best.1 {
                best = (x, v);
            }
            x += step;
        }
        assert!((best.0 - 2.0).abs() <= step);
        assert!((best.1 - 0.541).abs() < 1e-3);
    }

    #[test]
    fn backward_efficiency_values() {
        assert_eq!(efficiency_backward(0.0), 0.0);
        assert!((efficiency_backward(1e3) - 1.0).abs() < 1e-12);
        assert!((efficiency_backward(0.71) - 0.258).abs() < 1e-3);
    }

    #[test]
    fn backward_never_below_forward() {
        let mut x = 0.0;
        while x <= 8.0 {
            assert!(
                efficiency_backward(x) + 1e-12 >= efficiency_forward(x, 0.0, f64::INFINITY),
                "alpha L = {x}"
            );
            x += 0.01;
        }
    }

    #[test]
    fn inversion_from_gain_values() {
        // The measured Er:YSO amplification factor.
        let nb = inversion_from_gain(3.55, 0.71).unwrap();
        assert!((nb - 0.892).abs() < 1e-3);
        // Full inversion reaches e^{2 alpha L}.
        let full = inversion_from_gain((2.0f64 * 0.71).exp(), 0.71).unwrap();
        assert!((full - 1.0).abs() < 1e-12);
        // Unit gain is the transparency point.
        let half = inversion_from_gain(1.0, 0.71).unwrap();
        assert!((half - 0.0).abs() < 1e-12 || half == 0.0);
        assert!(inversion_from_gain(0.0, 0.71).is_err());
        assert!(inversion_from_gain(-1.0, 0.71).is_err());
    }

    #[test]
    fn snr_proxy_values() {
        assert_eq!(se_snr_proxy(1.0, 0.1), 10.0);
        assert_eq!(se_snr_proxy(1.0, 1.0), 1.0);
        assert!(se_snr_proxy(1.0, 0.0).is_infinite());
    }

    #[test]
    fn schedule_rejects_premature_second_rephasing() {
        let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0).unwrap();
        // t1 = 0, t2 = 20 us: primary echo at 40 us; t3 = 35 us is too early.
        let s = rose_counterpropagating(tiny_signal(0.0), chs, 20e-6, 35e-6);
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        let ok = rose_counterpropagating(tiny_signal(0.0), chs, 20e-6, 45e-6);
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn measure_efficiency_trivial_cases() {
        let dt = 1e-8;
        let n = 4000;
        let signal = PulseEvent::new(
            PulseShape::Gaussian(tiny_signal(5e-6)),
            Direction::Forward,
        );
        let mut trace = FieldTrace {
            times: (0..n).map(|i| i as f64 * dt).collect(),
            forward_out: vec![num_complex::Complex64::new(0.0, 0.0); n],
            backward_out: vec![num_complex::Complex64::new(0.0, 0.0); n],
            forward_in: Vec::new(),
            dt,
        };
        trace.forward_in = trace
            .times
            .iter()
            .map(|&t| signal.shape.envelope(t))
            .collect();
        // Zero field in the window: efficiency 0.
        let w = DetectionWindow {
            label: "rose".into(),
            lo: 20e-6,
            hi: 30e-6,
        };
        assert_eq!(measure_efficiency(&trace, &signal, &w).unwrap(), 0.0);

        // An echo identical to the input gives 1, and a global phase leaves
        // the number untouched.
        for (i, &t) in trace.times.clone().iter().enumerate() {
            trace.forward_out[i] =
                signal.shape.envelope(t - 20e-6) * num_complex::Complex64::from_polar(1.0, 0.87);
        }
        let eff = measure_efficiency(&trace, &signal, &w).unwrap();
        assert!((eff - 1.0).abs() < 1e-9);

        // Empty and input-overlapping windows are rejected.
        let empty = DetectionWindow {
            label: "x".into(),
            lo: 30e-6,
            hi: 30e-6,
        };
        assert!(matches!(
            measure_efficiency(&trace, &signal, &empty),
            Err(Error::Window(_))
        ));
        let overlapping = DetectionWindow {
            label: "x".into(),
            lo: 4e-6,
            hi: 12e-6,
        };
        assert!(matches!(
            measure_efficiency(&trace, &signal, &overlapping),
            Err(Error::Window(_))
        ));
    }
}
