//! Wavevector algebra for the echo family: which emission directions are
//! phase matched, which are silenced, and over what coherence length a
//! mismatched grating can still radiate.
//!
//! Run with: cargo run --example echo_geometry

use std::f64::consts::{PI, TAU};

use rose_sim::geometry::{
    phase_match, primary_echo_wavevector, rose_echo_wavevector, Vec3, WaveVector,
};

fn main() -> rose_sim::Result<()> {
    let lambda = 1536e-9;
    let k = TAU / lambda;
    let length = 7.5e-3;

    println!("medium: lambda = {:.0} nm, L = {:.1} mm\n", lambda * 1e9, length * 1e3);

    // Copropagating two-pulse echo: matched, radiates forward.
    let fwd = WaveVector::along_z(k)?;
    let ke = primary_echo_wavevector(&fwd, &fwd)?;
    let report = phase_match(ke, k, length)?;
    println!("copropagating 2PE:      |k_e| = {:.3} k, silenced = {}", ke.norm() / k, report.silenced);

    // Counterpropagating rephasing: the primary echo grating sits at -3k.
    let bwd = WaveVector::against_z(k)?;
    let ke = primary_echo_wavevector(&fwd, &bwd)?;
    let report = phase_match(ke, k, length)?;
    println!(
        "counterpropagating 2PE: |k_e| = {:.3} k, mismatch phase = {:.2e}, silenced = {}, coherence length = {:.0} nm",
        ke.norm() / k,
        report.mismatch_phase,
        report.silenced,
        report.coherence_length * 1e9
    );

    // The second rephasing pulse along the same path revives emission along
    // the signal direction.
    let ke2 = rose_echo_wavevector(&fwd, &bwd, &bwd)?;
    let report = phase_match(ke2, k, length)?;
    println!(
        "revived echo:           k_e' = {:.3} k along z = {:+.0}, silenced = {}",
        ke2.norm() / k,
        ke2.z.signum(),
        report.silenced
    );

    // Backward retrieval: signal and rephasing paths at 60 degrees.
    let tilt = |theta: f64| Vec3::new(theta.sin(), 0.0, theta.cos());
    let k1 = WaveVector::new(tilt(0.0), k)?;
    let k2 = WaveVector::new(tilt(PI / 3.0), k)?;
    let k3 = WaveVector::new(tilt(2.0 * PI / 3.0), k)?;
    let ke_primary = primary_echo_wavevector(&k1, &k2)?;
    let primary = phase_match(ke_primary, k, length)?;
    let ke_backward = rose_echo_wavevector(&k1, &k2, &k3)?;
    println!(
        "60-degree paths:        primary |k_e| = {:.4} k (coherence length {:.2} lambda), revived k_e' = -k1: {}",
        ke_primary.norm() / k,
        primary.coherence_length / lambda,
        (ke_backward + k1.vector()).norm() < 1e-6 * k
    );
    Ok(())
}
