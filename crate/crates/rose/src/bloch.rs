//! Optical Bloch equations for one two-level atom at fixed detuning.
//!
//! This module fixes the sign conventions used everywhere else in the crate.
//! With complex coherence `s` and inversion `w` (-1 ground, +1 excited) in
//! the rotating frame,
//!
//! ```text
//! ds/dt = -(i Delta + 1/T2) s + (i/2) Omega(t) w
//! dw/dt = -2 Im(Omega*(t) s) - (w + 1)/T1
//! ```
//!
//! so a resonant rectangular pulse of area pi takes `w` from -1 to +1, and
//! the Bloch-sphere bound reads `4|s|^2 + w^2 <= 1` in the absence of gain.
//! Integration is a fixed-step classical fourth-order scheme: reproducible
//! across runs and platforms, guarded by `dt * max(|Omega|, |Delta|) <= 0.1`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pulses::ChsParams;

/// Stability guard for the fixed-step integrator.
pub const MAX_STEP_RATE: f64 = 0.1;

/// Bloch state of a single atom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomState {
    /// Complex coherence `s` in the rotating frame.
    pub coherence: C64,
    /// Population inversion `w`: -1 ground, +1 excited.
    pub inversion: f64,
}

impl AtomState {
    pub fn ground() -> Self {
        AtomState {
            coherence: C64::new(0.0, 0.0),
            inversion: -1.0,
        }
    }

    pub fn excited() -> Self {
        AtomState {
            coherence: C64::new(0.0, 0.0),
            inversion: 1.0,
        }
    }

    /// Upper-level population `n_b = (w + 1)/2`.
    pub fn upper_population(&self) -> f64 {
        0.5 * (self.inversion + 1.0)
    }

    /// Bloch-vector norm `4|s|^2 + w^2`; conserved under relaxation-free
    /// evolution, at most 1 for physical states.
    pub fn bloch_norm(&self) -> f64 {
        4.0 * self.coherence.norm_sqr() + self.inversion * self.inversion
    }
}

/// Longitudinal and transverse relaxation times; `f64::INFINITY` disables a
/// channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Relaxation {
    pub t1: f64,
    pub t2: f64,
}

impl Relaxation {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0) || !(t2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "relaxation times must be positive (or infinite), got T1={t1}, T2={t2}"
            )));
        }
        Ok(Relaxation { t1, t2 })
    }

    pub fn none() -> Self {
        Relaxation {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
        }
    }

    /// (1/T1, 1/T2); infinite times give exact zeros.
    pub fn rates(&self) -> (f64, f64) {
        (self.t1.recip(), self.t2.recip())
    }
}

#[inline]
fn deriv(s: C64, w: f64, decay: C64, gamma1: f64, drive: C64) -> (C64, f64) {
    let ds = -decay * s + C64::new(0.0, 0.5) * drive * w;
    let dw = -2.0 * (drive.conj() * s).im - gamma1 * (w + 1.0);
    (ds, dw)
}

/// One classical RK4 step of size `dt`.
///
/// `decay = i Delta + 1/T2`; `drive` holds the complex Rabi frequency at the
/// step start, midpoint, and end.
#[inline]
pub(crate) fn rk4_step(
    s: C64,
    w: f64,
    decay: C64,
    gamma1: f64,
    drive: [C64; 3],
    dt: f64,
) -> (C64, f64) {
    let (k1s, k1w) = deriv(s, w, decay, gamma1, drive[0]);
    let h2 = 0.5 * dt;
    let (k2s, k2w) = deriv(s + k1s * h2, w + k1w * h2, decay, gamma1, drive[1]);
    let (k3s, k3w) = deriv(s + k2s * h2, w + k2w * h2, decay, gamma1, drive[1]);
    let (k4s, k4w) = deriv(s + k3s * dt, w + k3w * dt, decay, gamma1, drive[2]);
    let sixth = dt / 6.0;
    (
        s + (k1s + (k2s + k3s) * 2.0 + k4s) * sixth,
        w + (k1w + 2.0 * (k2w + k3w) + k4w) * sixth,
    )
}

/// Integrate one atom from `span.0` to `span.1` under the drive `Omega(t)`.
///
/// The step count is `ceil((tb - ta)/dt)` so the requested `dt` is an upper
/// bound; the guard `dt * max(|Omega|, |Delta|) <= 0.1` is checked against
/// the drive actually sampled and violation reports a workable step size.
pub fn evolve(
    state: AtomState,
    detuning: f64,
    drive: impl Fn(f64) -> C64,
    span: (f64, f64),
    dt: f64,
    relax: Relaxation,
) -> Result<AtomState> {
    let (ta, tb) = span;
    if !(tb > ta) {
        return Err(Error::InvalidInput(format!(
            "evolution span must be forward in time, got [{ta}, {tb}]"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let steps = ((tb - ta) / dt).ceil() as usize;
    let h = (tb - ta) / steps as f64;
    let (gamma1, gamma2) = relax.rates();
    let decay = C64::new(gamma2, detuning);

    let guard = |rate: f64| -> Result<()> {
        if h * rate > MAX_STEP_RATE {
            return Err(Error::StepSize {
                dt: h,
                max_rate: rate,
                suggested: 0.9 * MAX_STEP_RATE / rate,
            });
        }
        Ok(())
    };
    guard(detuning.abs())?;

    let mut s = state.coherence;
    let mut w = state.inversion;
    let mut left = drive(ta);
    for k in 0..steps {
        let t = ta + k as f64 * h;
        let mid = drive(t + 0.5 * h);
        let right = drive(t + h);
        let peak = left.norm().max(mid.norm()).max(right.norm());
        guard(peak)?;
        let (s2, w2) = rk4_step(s, w, decay, gamma1, [left, mid, right], h);
        s = s2;
        w = w2;
        left = right;
    }
    Ok(AtomState {
        coherence: s,
        inversion: w,
    })
}

/// Default integrator step for a chirped pulse: comfortably inside the
/// stability guard for the largest rate present.
fn chs_step(p: &ChsParams, detunings: &[f64]) -> f64 {
    let max_det = detunings.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let max_rate = p.rabi_peak.max(max_det).max(p.beta);
    0.05 / max_rate
}

/// Map `evolve` over a detuning list from the ground state and return the
/// final upper-level populations.
pub fn inversion_profile(
    p: &ChsParams,
    detunings: &[f64],
    relax: Relaxation,
) -> Result<Vec<f64>> {
    let (ta, tb) = p.support();
    let dt = chs_step(p, detunings);
    detunings
        .par_iter()
        .map(|&delta| {
            evolve(
                AtomState::ground(),
                delta,
                |t| p.envelope(t),
                (ta, tb),
                dt,
                relax,
            )
            .map(|st| st.upper_population())
        })
        .collect()
}

/// Populations after two identical back-to-back chirped passes separated by
/// `gap` seconds of free evolution.
pub fn double_pass_profile(
    p: &ChsParams,
    gap: f64,
    detunings: &[f64],
    relax: Relaxation,
) -> Result<Vec<f64>> {
    let second = ChsParams {
        center: p.center + (p.support().1 - p.support().0) + gap,
        ..*p
    };
    let dt = chs_step(p, detunings);
    detunings
        .par_iter()
        .map(|&delta| {
            let mid = evolve(
                AtomState::ground(),
                delta,
                |t| p.envelope(t),
                p.support(),
                dt,
                relax,
            )?;
            // Free evolution across the gap is analytic.
            let (gamma1, gamma2) = relax.rates();
            let dwell = second.support().0 - p.support().1;
            let s = mid.coherence * (-C64::new(gamma2, delta) * dwell).exp();
            let w = -1.0 + (mid.inversion + 1.0) * (-gamma1 * dwell).exp();
            let out = evolve(
                AtomState {
                    coherence: s,
                    inversion: w,
                },
                delta,
                |t| second.envelope(t),
                second.support(),
                dt,
                relax,
            )?;
            Ok(out.upper_population())
        })
        .collect()
}

/// 10-90% width of the falling edge of an inversion profile.
///
/// `detunings` must be ascending and start inside the plateau; the edge is
/// located where the population crosses 90% and 10% of the plateau value,
/// with linear interpolation between samples.
pub fn edge_width_10_90(detunings: &[f64], populations: &[f64]) -> Option<f64> {
    if detunings.len() != populations.len() || detunings.len() < 3 {
        return None;
    }
    let plateau = populations.first().copied()?;
    if plateau <= 0.0 {
        return None;
    }
    let hi = 0.9 * plateau;
    let lo = 0.1 * plateau;
    let cross = |level: f64| -> Option<f64> {
        for i in 1..populations.len() {
            let (p0, p1) = (populations[i - 1], populations[i]);
            if p0 >= level && p1 < level {
                let f = (p0 - level) / (p0 - p1);
                return Some(detunings[i - 1] + f * (detunings[i] - detunings[i - 1]));
            }
        }
        None
    };
    let d_hi = cross(hi)?;
    let d_lo = cross(lo)?;
    Some((d_lo - d_hi).abs())
}
