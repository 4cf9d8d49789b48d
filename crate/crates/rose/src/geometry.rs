//! Wavevector algebra for echo phase matching.
//!
//! Everything here is analytic: the dynamical solver is one-dimensional and
//! only consumes the sign of a pulse's projection on the optical axis, but
//! the phase-matching bookkeeping is genuinely three-dimensional, so these
//! functions work on full 3-vectors.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Relative tolerance for the equal-magnitude precondition of the echo
/// wavevector operations.
pub const MAGNITUDE_TOL: f64 = 1e-9;

/// Tolerance on `| |direction| - 1 |` for a unit direction vector.
pub const UNIT_TOL: f64 = 1e-12;

/// Cartesian 3-vector; rad/m when used as a wavevector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const EX: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const EY: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const EZ: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

/// A propagating plane-wave mode: unit direction and positive magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveVector {
    direction: Vec3,
    magnitude: f64,
}

impl WaveVector {
    /// Build from a unit direction and a magnitude in rad/m.
    pub fn new(direction: Vec3, magnitude: f64) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Geometry(format!(
                "direction norm {} is not 1 within {UNIT_TOL:e}",
                direction.norm()
            )));
        }
        if !(magnitude > 0.0) {
            return Err(Error::Geometry(format!(
                "wavevector magnitude must be positive, got {magnitude}"
            )));
        }
        Ok(WaveVector {
            direction,
            magnitude,
        })
    }

    /// Build from an arbitrary nonzero vector.
    pub fn from_vector(v: Vec3) -> Result<Self> {
        let magnitude = v.norm();
        let direction = v
            .normalized()
            .ok_or_else(|| Error::Geometry("zero wavevector".into()))?;
        WaveVector::new(direction, magnitude)
    }

    /// Forward mode along +z.
    pub fn along_z(k: f64) -> Result<Self> {
        WaveVector::new(Vec3::EZ, k)
    }

    /// Backward mode along -z.
    pub fn against_z(k: f64) -> Result<Self> {
        WaveVector::new(-Vec3::EZ, k)
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// The full vector `magnitude * direction`.
    pub fn vector(&self) -> Vec3 {
        self.direction * self.magnitude
    }
}

/// Outcome of testing a resultant wavevector against the propagating mode of
/// the medium.
///
/// `mismatch_phase` is the dimensionless phase slip `(|k_out| - k) L`
/// accumulated across the medium. The `silenced` flag applies the fixed
/// boundary `mismatch_phase > pi`; the raw number is reported so callers can
/// apply a stricter criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMatchReport {
    /// The un-normalized resultant wavevector, rad/m.
    pub k_out: Vec3,
    /// `(|k_out| - k) * L`, dimensionless.
    pub mismatch_phase: f64,
    /// `mismatch_phase > pi`.
    pub silenced: bool,
    /// `pi / (|k_out| - k)` in meters, or `+inf` when matched.
    pub coherence_length: f64,
}

fn check_equal_magnitudes(ks: &[&WaveVector]) -> Result<f64> {
    let k = ks[0].magnitude();
    for kv in ks {
        if (kv.magnitude() - k).abs() > MAGNITUDE_TOL * k {
            return Err(Error::Geometry(format!(
                "wavevector magnitudes differ beyond {MAGNITUDE_TOL:e} relative: \
                 {} vs {}",
                kv.magnitude(),
                k
            )));
        }
    }
    Ok(k)
}

/// Resultant wavevector of the primary two-pulse echo, `2 k2 - k1`.
pub fn primary_echo_wavevector(k1: &WaveVector, k2: &WaveVector) -> Result<Vec3> {
    check_equal_magnitudes(&[k1, k2])?;
    Ok(k2.vector() * 2.0 - k1.vector())
}

/// Resultant wavevector of the revived echo after the second rephasing
/// pulse, `2 k3 - k_e = k1 + 2 (k3 - k2)`.
pub fn rose_echo_wavevector(
    k1: &WaveVector,
    k2: &WaveVector,
    k3: &WaveVector,
) -> Result<Vec3> {
    check_equal_magnitudes(&[k1, k2, k3])?;
    Ok(k1.vector() + (k3.vector() - k2.vector()) * 2.0)
}

/// Test a resultant wavevector against the medium mode `k` over thickness
/// `length`.
pub fn phase_match(k_out: Vec3, k: f64, length: f64) -> Result<PhaseMatchReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidInput(format!(
            "medium length must be positive, got {length}"
        )));
    }
    let delta_k = k_out.norm() - k;
    let mismatch_phase = delta_k * length;
    let silenced = mismatch_phase > std::f64::consts::PI;
    let coherence_length = if mismatch_phase.abs() <= std::f64::consts::PI {
        f64::INFINITY
    } else {
        std::f64::consts::PI / delta_k.abs()
    };
    Ok(PhaseMatchReport {
        k_out,
        mismatch_phase,
        silenced,
        coherence_length,
    })
}
