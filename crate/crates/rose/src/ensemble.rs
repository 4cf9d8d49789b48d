//! Discretization of the medium into (spatial slice x detuning x
//! sub-wavelength optical phase) atoms.
//!
//! Macroscopic polarization, spatial gratings, and phase (mis)matching all
//! emerge from plain summation over this grid. The sub-wavelength phase
//! samples `phi_j = 2 pi j / n_phi` make grating orders exact: with the
//! default `n_phi = 8`, the order -3 grating written by a counterpropagating
//! rephasing pulse projects onto the +-1 propagating orders as an exact sum
//! over eighth roots of unity, i.e. zero to machine precision.
//!
//! The inhomogeneous line is a flat-top distribution sampled on a uniform,
//! zero-centered detuning grid with trapezoidal weights.

use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::bloch::Relaxation;
use crate::error::{Error, Result};
use crate::pulses::PulseEvent;

/// Physical medium: opacity, geometry, relaxation, carrier, and the
/// inhomogeneous line half-width.
///
/// The microscopic dipole moment and atomic density never appear: the
/// opacity `alpha L` is the complete optical interface, and the field
/// coupling is calibrated against Beer's law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumSpec {
    /// Dimensionless opacity `alpha L`.
    pub alpha_l: f64,
    /// Medium thickness, m.
    pub length: f64,
    /// Upper-level lifetime, s (infinite allowed).
    pub t1: f64,
    /// Optical coherence lifetime, s (infinite allowed).
    pub t2: f64,
    /// Carrier wavelength, m.
    pub lambda: f64,
    /// Flat-top inhomogeneous distribution half-width, rad/s.
    pub inhom_halfwidth: f64,
}

impl MediumSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_l >= 0.0) {
            return Err(Error::Config(format!(
                "alphaL must be non-negative, got {}",
                self.alpha_l
            )));
        }
        if !(self.length > 0.0) {
            return Err(Error::Config(format!(
                "medium length must be positive, got {}",
                self.length
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::Config(format!(
                "wavelength must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.t1 > 0.0) || !(self.t2 > 0.0) {
            return Err(Error::Config(format!(
                "relaxation times must be positive (or infinite), got T1={}, T2={}",
                self.t1, self.t2
            )));
        }
        if !(self.inhom_halfwidth > 0.0) {
            return Err(Error::Config(format!(
                "inhomogeneous half-width must be positive, got {}",
                self.inhom_halfwidth
            )));
        }
        Ok(())
    }

    /// Absorption coefficient `alpha`, 1/m.
    pub fn alpha(&self) -> f64 {
        self.alpha_l / self.length
    }

    /// Carrier wavenumber `2 pi / lambda`, rad/m.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.lambda
    }

    pub fn relaxation(&self) -> Relaxation {
        Relaxation {
            t1: self.t1,
            t2: self.t2,
        }
    }

    /// The flat-top line must cover every pulse in a schedule, otherwise the
    /// medium does not look spectrally uniform to the drive.
    pub fn validate_against(&self, pulses: &[PulseEvent]) -> Result<()> {
        self.validate()?;
        for (i, pulse) in pulses.iter().enumerate() {
            let span = pulse.shape.spectral_span();
            if span >= self.inhom_halfwidth {
                return Err(Error::Config(format!(
                    "pulse {i} spans {span:.3e} rad/s but the inhomogeneous \
                     half-width is only {:.3e} rad/s; the line must exceed \
                     the widest pulse span",
                    self.inhom_halfwidth
                )));
            }
        }
        Ok(())
    }
}

/// Discretization of the ensemble and the integration step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleGrid {
    /// Spatial slices along the propagation axis.
    pub n_z: usize,
    /// Detuning samples across the flat-top line (odd, so zero is sampled).
    pub n_det: usize,
    /// Optical-phase samples per cell; at least 8 so grating orders up to
    /// |3| cannot alias onto the radiating orders +-1.
    pub n_phi: usize,
    /// Transverse shells; 1 is a plane wave.
    pub n_r: usize,
    /// Time step, s.
    pub dt: f64,
}

/// Spurious grid-comb recurrence must sit at least this factor beyond the
/// schedule duration.
pub const RECURRENCE_MARGIN: f64 = 2.0;

impl EnsembleGrid {
    pub fn validate(&self, medium: &MediumSpec, schedule_duration: f64) -> Result<()> {
        if self.n_z < 2 {
            return Err(Error::Config(format!(
                "grid rule violated: n_z >= 2 required, got {}",
                self.n_z
            )));
        }
        if self.n_det < 31 || self.n_det % 2 == 0 {
            return Err(Error::Config(format!(
                "grid rule violated: n_det must be odd and >= 31, got {}",
                self.n_det
            )));
        }
        if self.n_phi < 8 {
            return Err(Error::Config(format!(
                "grid rule violated: n_phi >= 8 required to resolve grating \
                 orders up to |3| without aliasing into +-1, got {}",
                self.n_phi
            )));
        }
        if self.n_r < 1 {
            return Err(Error::Config("grid rule violated: n_r >= 1".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!(
                "grid rule violated: dt must be positive, got {}",
                self.dt
            )));
        }
        let spacing = self.detuning_spacing(medium);
        let recurrence = TAU / spacing;
        if schedule_duration > 0.0 && recurrence < RECURRENCE_MARGIN * schedule_duration {
            return Err(Error::Config(format!(
                "grid rule violated: detuning spacing {spacing:.3e} rad/s puts \
                 the grid-comb recurrence at {recurrence:.3e} s, inside \
                 {RECURRENCE_MARGIN} x the schedule duration {schedule_duration:.3e} s; \
                 increase n_det or reduce the inhomogeneous width"
            )));
        }
        Ok(())
    }

    pub fn detuning_spacing(&self, medium: &MediumSpec) -> f64 {
        2.0 * medium.inhom_halfwidth / (self.n_det - 1) as f64
    }

    /// Uniform symmetric detuning samples across the flat-top line.
    pub fn detunings(&self, medium: &MediumSpec) -> Vec<f64> {
        let w = medium.inhom_halfwidth;
        let n = self.n_det;
        (0..n)
            .map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Trapezoidal quadrature weights over the flat top, normalized to sum
    /// to one.
    pub fn detuning_weights(&self) -> Vec<f64> {
        let n = self.n_det;
        let mut w = vec![1.0; n];
        w[0] = 0.5;
        w[n - 1] = 0.5;
        let total: f64 = w.iter().sum();
        for v in &mut w {
            *v /= total;
        }
        w
    }

    /// Optical-phase samples `2 pi j / n_phi`.
    pub fn phases(&self) -> Vec<f64> {
        (0..self.n_phi)
            .map(|j| TAU * j as f64 / self.n_phi as f64)
            .collect()
    }

    pub fn dz(&self, medium: &MediumSpec) -> f64 {
        medium.length / self.n_z as f64
    }

    pub fn cells(&self) -> usize {
        self.n_z * self.n_det * self.n_phi * self.n_r
    }
}

/// Local complex Rabi frequency seen by a cell at optical phase `phi`, given
/// the forward and backward field envelopes at its slice.
#[inline]
pub fn local_drive(forward: C64, backward: C64, phi: f64) -> C64 {
    let (sin, cos) = phi.sin_cos();
    let e_plus = C64::new(cos, sin);
    forward * e_plus + backward * e_plus.conj()
}

/// Which propagating order a polarization projection sources.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionOrder {
    /// Order +1: sources the forward (+z) field.
    Forward,
    /// Order -1: sources the backward (-z) field.
    Backward,
}

/// Bloch states of every (z, detuning, phi) cell, stored flat.
///
/// Transverse shells are independent plane-wave problems (the pump Rabi
/// frequency is rescaled per shell), so they are run as separate instances
/// and combined by [`transverse_average`]; this state holds one shell.
#[derive(Clone, Debug)]
pub struct EnsembleState {
    pub n_z: usize,
    pub n_det: usize,
    pub n_phi: usize,
    /// Coherence per cell, index `(z * n_det + det) * n_phi + phi`.
    pub coherence: Vec<C64>,
    /// Inversion per cell, same indexing.
    pub inversion: Vec<f64>,
}

impl EnsembleState {
    pub fn ground(n_z: usize, n_det: usize, n_phi: usize) -> Self {
        let n = n_z * n_det * n_phi;
        EnsembleState {
            n_z,
            n_det,
            n_phi,
            coherence: vec![C64::new(0.0, 0.0); n],
            inversion: vec![-1.0; n],
        }
    }

    pub fn inverted(n_z: usize, n_det: usize, n_phi: usize) -> Self {
        let mut st = Self::ground(n_z, n_det, n_phi);
        st.inversion.fill(1.0);
        st
    }

    #[inline]
    pub fn index(&self, z: usize, det: usize, phi: usize) -> usize {
        (z * self.n_det + det) * self.n_phi + phi
    }

    /// Harmonic content of one slice: `sum_d w_d (1/n_phi) sum_j s e^{-i m phi_j}`.
    ///
    /// Orders other than +-1 radiate into neither propagating field; they
    /// are exposed for diagnostics and tests.
    pub fn harmonic(&self, slice: usize, order: i32, det_weights: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let inv_nphi = 1.0 / self.n_phi as f64;
        for det in 0..self.n_det {
            let wd = det_weights[det];
            for j in 0..self.n_phi {
                let phi = TAU * j as f64 / self.n_phi as f64;
                let (sin, cos) = (-(order as f64) * phi).sin_cos();
                acc += self.coherence[self.index(slice, det, j)]
                    * C64::new(cos, sin)
                    * (wd * inv_nphi);
            }
        }
        acc
    }

    /// Macroscopic polarization projection of one slice onto a propagating
    /// order.
    pub fn projection(
        &self,
        slice: usize,
        order: ProjectionOrder,
        det_weights: &[f64],
    ) -> C64 {
        let m = match order {
            ProjectionOrder::Forward => 1,
            ProjectionOrder::Backward => -1,
        };
        self.harmonic(slice, m, det_weights)
    }

    /// Ideal instantaneous rephasing map `s -> e^{+-2 i phi} s*, w -> -w`
    /// (the limit of a perfect pi rotation driven from the given direction).
    pub fn apply_ideal_mirror(&mut self, direction: crate::pulses::Direction) {
        let sign = match direction {
            crate::pulses::Direction::Forward => 1.0,
            crate::pulses::Direction::Backward => -1.0,
        };
        for z in 0..self.n_z {
            for det in 0..self.n_det {
                for j in 0..self.n_phi {
                    let phi = TAU * j as f64 / self.n_phi as f64;
                    let (sin, cos) = (2.0 * sign * phi).sin_cos();
                    let idx = self.index(z, det, j);
                    self.coherence[idx] = C64::new(cos, sin) * self.coherence[idx].conj();
                    self.inversion[idx] = -self.inversion[idx];
                }
            }
        }
    }

    /// Mean upper-level population over cells whose detuning lies within
    /// `band` (full ensemble when `None`), weighted like the polarization.
    pub fn mean_upper_population(
        &self,
        detunings: &[f64],
        det_weights: &[f64],
        band: Option<(f64, f64)>,
    ) -> f64 {
        let mut pop = 0.0;
        let mut norm = 0.0;
        let inv = 1.0 / (self.n_z * self.n_phi) as f64;
        for det in 0..self.n_det {
            if let Some((lo, hi)) = band {
                if detunings[det] < lo || detunings[det] > hi {
                    continue;
                }
            }
            let wd = det_weights[det];
            norm += wd;
            for z in 0..self.n_z {
                for j in 0..self.n_phi {
                    pop += wd * inv * 0.5 * (self.inversion[self.index(z, det, j)] + 1.0);
                }
            }
        }
        if norm > 0.0 {
            pop / norm
        } else {
            0.0
        }
    }

    /// Upper-level population per detuning sample, averaged over space and
    /// optical phase.
    pub fn population_profile(&self) -> Vec<f64> {
        let inv = 1.0 / (self.n_z * self.n_phi) as f64;
        (0..self.n_det)
            .map(|det| {
                let mut acc = 0.0;
                for z in 0..self.n_z {
                    for j in 0..self.n_phi {
                        acc += 0.5 * (self.inversion[self.index(z, det, j)] + 1.0);
                    }
                }
                acc * inv
            })
            .collect()
    }

    /// Polarization-weighted sum of the inversion over all cells; the change
    /// of this quantity times `coupling * dz` is the energy the atoms took
    /// from the fields.
    pub fn weighted_inversion_sum(&self, det_weights: &[f64]) -> f64 {
        let inv_nphi = 1.0 / self.n_phi as f64;
        let mut acc = 0.0;
        for z in 0..self.n_z {
            for det in 0..self.n_det {
                let wd = det_weights[det] * inv_nphi;
                for j in 0..self.n_phi {
                    acc += wd * self.inversion[self.index(z, det, j)];
                }
            }
        }
        acc
    }
}

/// One transverse shell of a Gaussian beam pair: the signal intensity weight
/// and the rephasing-pulse Rabi scale at the shell radius.
#[derive(Clone, Copy, Debug)]
pub struct Shell {
    /// Shell radius in units of the signal waist.
    pub radius: f64,
    /// Normalized signal-intensity weight.
    pub weight: f64,
    /// Factor applied to the rephasing Rabi frequency at this radius.
    pub pump_scale: f64,
}

/// Equal-area shells across a disk of two signal waists, with Gaussian
/// signal weights `e^{-2 r^2 / w_s^2}` and pump Rabi scaled by
/// `e^{-r^2 / (rho w_s)^2}` for a rephasing beam `rho` times bigger than the
/// signal. Diagnostic model: acceptance scenarios run one shell.
pub fn transverse_shells(n_r: usize, pump_waist_ratio: f64) -> Vec<Shell> {
    if n_r <= 1 {
        return vec![Shell {
            radius: 0.0,
            weight: 1.0,
            pump_scale: 1.0,
        }];
    }
    let r_max: f64 = 2.0;
    let mut shells: Vec<Shell> = (0..n_r)
        .map(|i| {
            // Area centroid of the i-th equal-area annulus.
            let radius = r_max * ((i as f64 + 0.5) / n_r as f64).sqrt();
            let weight = (-2.0 * radius * radius).exp();
            let pump_scale = if pump_waist_ratio.is_infinite() {
                1.0
            } else {
                (-(radius / pump_waist_ratio).powi(2)).exp()
            };
            Shell {
                radius,
                weight,
                pump_scale,
            }
        })
        .collect();
    let total: f64 = shells.iter().map(|s| s.weight).sum();
    for s in &mut shells {
        s.weight /= total;
    }
    shells
}

/// Signal-weighted average of per-shell results.
pub fn transverse_average(shells: &[Shell], results: &[f64]) -> f64 {
    assert_eq!(shells.len(), results.len());
    shells
        .iter()
        .zip(results)
        .map(|(s, r)| s.weight * r)
        .sum()
}
