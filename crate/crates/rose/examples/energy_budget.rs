//! Energy a chirped rephasing pulse leaves in the medium: the closed-form
//! fraction (2/pi)(r0/Omega0^2) alphaL, checked against the simulated field
//! energy balance on a thin slab.
//!
//! Run with: cargo run --release --example energy_budget

use std::f64::consts::PI;

use rose_sim::ensemble::{EnsembleGrid, EnsembleState, MediumSpec};
use rose_sim::propagation::{calibrate_coupling, run_schedule, RunOptions};
use rose_sim::pulses::{pulse_energies, ChsParams, Direction, PulseEvent, PulseShape};

fn main() -> rose_sim::Result<()> {
    let medium = MediumSpec {
        alpha_l: 0.2,
        length: 7.5e-3,
        t1: f64::INFINITY,
        t2: f64::INFINITY,
        lambda: 1536e-9,
        inhom_halfwidth: 5e6,
    };
    let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0)?;
    let beam_area = PI * (45e-6_f64).powi(2);
    let dipole = 1.6e-32; // C m, a weak rare-earth optical transition

    let budget = pulse_energies(&chs, &medium, beam_area, dipole)?;
    println!("adiabaticity r0/Omega0^2 = {:.5}", chs.adiabaticity());
    println!("incoming pulse energy    = {:.4e} J", budget.incoming);
    println!("energy left in medium    = {:.4e} J", budget.absorbed);
    println!("closed-form fraction     = {:.5e}", budget.ratio);

    // Simulated energy balance on the same slab.
    let grid = EnsembleGrid {
        n_z: 24,
        n_det: 801,
        n_phi: 8,
        n_r: 1,
        dt: 1e-8,
    };
    let coupling = calibrate_coupling(&medium, &grid)?;
    let centered = ChsParams {
        center: chs.support().1 - chs.support().0,
        ..chs
    };
    let event = PulseEvent::new(PulseShape::Chs(centered), Direction::Forward);
    let t_end = centered.support().1 + 2e-6;
    println!("\npropagating the chirp through the alphaL = {} slab...", medium.alpha_l);
    let out = run_schedule(&medium, &grid, &[event], coupling, &RunOptions::to_time(t_end))?;

    let e_in = out.trace.input_energy(0.0, t_end);
    let e_fwd = out.trace.forward_energy(0.0, t_end);
    let weights = grid.detuning_weights();
    let initial = EnsembleState::ground(grid.n_z, grid.n_det, grid.n_phi);
    let uptake = coupling
        * grid.dz(&medium)
        * (out.final_state.weighted_inversion_sum(&weights)
            - initial.weighted_inversion_sum(&weights));
    println!("field energy lost        = {:.5e} (Rabi^2 s units)", e_in - e_fwd);
    println!("atomic energy uptake     = {:.5e}", uptake);
    println!("simulated fraction       = {:.5e}", (e_in - e_fwd) / e_in);
    println!(
        "simulated / closed form  = {:.4}",
        (e_in - e_fwd) / e_in / budget.ratio
    );
    Ok(())
}
