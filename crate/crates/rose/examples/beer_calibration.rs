//! Calibrate the field-atom coupling against Beer's law and verify the
//! weak-probe transmission at several opacities.
//!
//! Run with: cargo run --release --example beer_calibration

use rose_sim::ensemble::{EnsembleGrid, MediumSpec};
use rose_sim::propagation::{
    calibrate_coupling, theoretical_coupling, weak_probe_transmission, InitialState,
};

fn main() -> rose_sim::Result<()> {
    let grid = EnsembleGrid {
        n_z: 64,
        n_det: 801,
        n_phi: 8,
        n_r: 1,
        dt: 1e-8,
    };
    println!("alphaL   coupling      vs continuum   transmission   target e^-alphaL");
    for alpha_l in [0.5, 1.0, 2.0] {
        let medium = MediumSpec {
            alpha_l,
            length: 7.5e-3,
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            lambda: 1536e-9,
            inhom_halfwidth: 5e6,
        };
        let coupling = calibrate_coupling(&medium, &grid)?;
        let transmission =
            weak_probe_transmission(&medium, &grid, coupling, InitialState::Ground)?;
        println!(
            "{alpha_l:<8} {coupling:<13.5e} {:<14.4} {transmission:<14.6} {:.6}",
            coupling / theoretical_coupling(&medium),
            (-alpha_l).exp()
        );
    }
    Ok(())
}
