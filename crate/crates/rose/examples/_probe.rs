//! Scratch probe: single-atom truncation effects for the chirp pair.
use rose_sim::bloch::{double_pass_profile, edge_width_10_90, inversion_profile, Relaxation};
use rose_sim::pulses::ChsParams;
use std::f64::consts::TAU;

fn overlap_pair_residual(omega0: f64, beta: f64, mu: f64, trunc: f64, t23: f64) -> (f64, f64) {
    // Two chirps t23 apart with whatever tail overlap their truncation
    // gives, driven as one combined envelope.
    use rose_sim::bloch::{evolve, AtomState};
    let relax = Relaxation::none();
    let a = ChsParams::new(omega0, beta, mu, 0.0)
        .unwrap()
        .with_truncation(trunc)
        .unwrap();
    let b = ChsParams { center: t23, ..a };
    let span = (a.support().0, b.support().1);
    let half = mu * beta;
    let band: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.05 * half).collect();
    let dt = 0.04 / omega0.max(half * 2.0);
    let mut worst = 0.0f64;
    let mut mean = 0.0;
    for &delta in &band {
        let out = evolve(
            AtomState::ground(),
            delta,
            |t| a.envelope(t) + b.envelope(t),
            span,
            dt,
            relax,
        )
        .unwrap();
        let nb = out.upper_population();
        worst = worst.max(nb);
        mean += nb / band.len() as f64;
    }
    (worst, mean)
}

fn main() {
    let relax = Relaxation::none();
    println!("overlapping pair vs rabi, Er (beta 1.25e5, mu 10, trunc 6, t23=41us):");
    for omega0 in [1.2e6, 1.6e6, 2.0e6, 2.5e6, 3.0e6, 3.5e6] {
        let (worst, mean) = overlap_pair_residual(omega0, 1.25e5, 10.0, 6.0, 41e-6);
        let chs = ChsParams::new(omega0, 1.25e5, 10.0, 0.0).unwrap();
        let center = inversion_profile(&chs, &[0.0], relax).unwrap()[0];
        println!(
            "  rabi {omega0:.2e}: adiab {:.4}, 1-pass center {center:.5}, pair worst {worst:.5}, mean {mean:.5}",
            chs.adiabaticity()
        );
    }
    println!("overlapping pair vs rabi, Tm (beta 2pi*120k, mu 2, trunc 6, t23=13us):");
    for omega0 in [1.8e6, 2.0e6, 2.2e6, 2.5e6] {
        let (worst, mean) = overlap_pair_residual(omega0, TAU * 120e3, 2.0, 6.0, 13e-6);
        let chs = ChsParams::new(omega0, TAU * 120e3, 2.0, 0.0).unwrap();
        let center = inversion_profile(&chs, &[0.0], relax).unwrap()[0];
        println!(
            "  rabi {omega0:.2e}: adiab {:.4}, 1-pass center {center:.5}, pair worst {worst:.5}, mean {mean:.5}",
            chs.adiabaticity()
        );
    }
    println!("Er params (3.5e6, 1.25e5, mu 10): trunc  center  edge_kHz  band_resid_2pass");
    for trunc in [2.2, 3.0, 6.0] {
        let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0)
            .unwrap()
            .with_truncation(trunc)
            .unwrap();
        let half = chs.mu * chs.beta;
        let center = inversion_profile(&chs, &[0.0], relax).unwrap()[0];
        let dets: Vec<f64> = (0..340).map(|i| 0.4 * half + i as f64 * 4e3).collect();
        let prof = inversion_profile(&chs, &dets, relax).unwrap();
        let edge = edge_width_10_90(&dets, &prof)
            .map(|w| w / TAU / 1e3)
            .unwrap_or(f64::NAN);
        let band: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.05 * half).collect();
        let two = double_pass_profile(&chs, 8e-6, &band, relax).unwrap();
        let resid = two.iter().cloned().fold(0.0, f64::max);
        println!("  {trunc}   {center:.5}  {edge:.1}  {resid:.5}");
    }
    println!("Tm params (2.5e6, 2pi*120k, mu 2): trunc  center  edge_kHz  band_resid");
    for trunc in [2.5, 3.0, 6.0] {
        let chs = ChsParams::new(2.5e6, TAU * 120e3, 2.0, 0.0)
            .unwrap()
            .with_truncation(trunc)
            .unwrap();
        let half = chs.mu * chs.beta;
        let center = inversion_profile(&chs, &[0.0], relax).unwrap()[0];
        let dets: Vec<f64> = (0..300).map(|i| 0.25 * half + i as f64 * 8e3).collect();
        let prof = inversion_profile(&chs, &dets, relax).unwrap();
        let edge = edge_width_10_90(&dets, &prof)
            .map(|w| w / TAU / 1e3)
            .unwrap_or(f64::NAN);
        let band: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.05 * half).collect();
        let two = double_pass_profile(&chs, 5e-6, &band, relax).unwrap();
        let resid = two.iter().cloned().fold(0.0, f64::max);
        println!("  {trunc}   {center:.5}  {edge:.1}  {resid:.5}");
    }
}
