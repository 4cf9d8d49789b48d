//! Propagation losses of a rectangular pi pulse in a broadband absorber:
//! half the energy is gone by z = 1.78/alpha while the pulse area holds at
//! pi (energy loss with area conservation means temporal stretching).
//!
//! Run with: cargo run --release --example pi_pulse_absorption

use std::f64::consts::PI;
use std::path::Path;

use rose_sim::ensemble::{EnsembleGrid, MediumSpec};
use rose_sim::harness::write_depth_csv;
use rose_sim::propagation::{calibrate_coupling, pi_pulse_attenuation};
use rose_sim::pulses::RectParams;

fn main() -> rose_sim::Result<()> {
    let medium = MediumSpec {
        alpha_l: 4.0,
        length: 7.5e-3,
        t1: f64::INFINITY,
        t2: f64::INFINITY,
        lambda: 1536e-9,
        inhom_halfwidth: 3.8e7,
    };
    let grid = EnsembleGrid {
        n_z: 96,
        n_det: 601,
        n_phi: 8,
        n_r: 1,
        dt: 2.5e-9,
    };
    println!("calibrating coupling at alphaL = {}...", medium.alpha_l);
    let coupling = calibrate_coupling(&medium, &grid)?;

    let pulse = RectParams::new(1e-6, PI, 1e-6)?;
    println!("propagating a {} us rectangular pi pulse...", pulse.duration * 1e6);
    let profile = pi_pulse_attenuation(&medium, &grid, &pulse, coupling)?;

    std::fs::create_dir_all("out")?;
    write_depth_csv(Path::new("out/pi_pulse_depth.csv"), &profile)?;
    println!("wrote out/pi_pulse_depth.csv");

    let alpha = medium.alpha();
    let z50 = profile.half_energy_depth().expect("pulse absorbs inside the medium");
    println!("\nhalf-energy depth z50 = {:.4} mm = {:.3}/alpha (1.78/alpha predicted)", z50 * 1e3, z50 * alpha);

    println!("\nalpha*z   energy/input   area/pi");
    for (i, &z) in profile.z.iter().enumerate().step_by(8) {
        println!(
            "{:<8.2}  {:<13.4}  {:.4}",
            alpha * z,
            profile.energy[i] / profile.energy[0],
            profile.area[i] / PI
        );
    }
    Ok(())
}
