//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with: cargo test --test acceptance -- --nocapture --test-threads 1

use std::f64::consts::{PI, TAU};
use std::sync::Mutex;
use std::time::Instant;

use num_complex::Complex64 as C64;

/// The criteria are compute-bound and internally parallel; interleaving
/// them corrupts the per-criterion runtime budgets, so they take turns.
static TURN: Mutex<()> = Mutex::new(());

fn take_turn() -> std::sync::MutexGuard<'static, ()> {
    TURN.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

use rose_sim::bloch::{
    double_pass_profile, edge_width_10_90, inversion_profile, AtomState, Relaxation,
};
use rose_sim::ensemble::{EnsembleGrid, EnsembleState, MediumSpec, ProjectionOrder};
use rose_sim::harness::{
    parse_sequence, parse_sweep, run_scenario, run_scenario_spec, run_sweep, serialize_sequence,
    GridOverrides,
};
use rose_sim::propagation::{
    calibrate_coupling, pi_pulse_attenuation, run_schedule, weak_probe_transmission,
    InitialState, RunOptions,
};
use rose_sim::protocol::{efficiency_forward, se_snr_proxy};
use rose_sim::pulses::{pulse_energies, ChsParams, Direction, PulseEvent, PulseShape, RectParams};

struct Criterion {
    number: u32,
    name: &'static str,
    checks: Vec<(String, bool)>,
    started: Instant,
}

impl Criterion {
    fn new(number: u32, name: &'static str) -> Self {
        Criterion {
            number,
            name,
            checks: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, label: impl Into<String>, pass: bool) {
        self.checks.push((label.into(), pass));
    }

    fn check_rel(&mut self, label: &str, measured: f64, expected: f64, rtol: f64) {
        let pass = (measured - expected).abs() <= rtol * expected.abs();
        self.check(
            format!("{label}: {measured:.6} vs {expected:.6} (rtol {rtol})"),
            pass,
        );
    }

    fn runtime_budget(&mut self, budget_s: f64) {
        let elapsed = self.started.elapsed().as_secs_f64();
        self.check(
            format!("runtime {elapsed:.1} s within budget {budget_s:.0} s"),
            elapsed <= budget_s,
        );
    }

    fn finish(self) {
        let all = self.checks.iter().all(|(_, p)| *p);
        println!(
            "ACCEPTANCE {:02} ({}): {}",
            self.number,
            self.name,
            if all { "PASS" } else { "FAIL" }
        );
        for (label, pass) in &self.checks {
            println!("    [{}] {label}", if *pass { "ok" } else { "FAIL" });
        }
        assert!(all, "criterion {:02} failed", self.number);
    }
}

fn ideal_medium(alpha_l: f64) -> MediumSpec {
    MediumSpec {
        alpha_l,
        length: 7.5e-3,
        t1: f64::INFINITY,
        t2: f64::INFINITY,
        lambda: 1536e-9,
        inhom_halfwidth: 5e6,
    }
}

fn default_grid() -> EnsembleGrid {
    EnsembleGrid {
        n_z: 64,
        n_det: 801,
        n_phi: 8,
        n_r: 1,
        dt: 1e-8,
    }
}

#[test]
fn criterion_01_beer_calibration() {
    let _turn = take_turn();
    let mut c = Criterion::new(1, "Beer calibration");
    let grid = default_grid();
    for alpha_l in [0.5, 1.0, 2.0] {
        let started = Instant::now();
        let medium = ideal_medium(alpha_l);
        let coupling = calibrate_coupling(&medium, &grid).expect("calibration converges");
        let t = weak_probe_transmission(&medium, &grid, coupling, InitialState::Ground)
            .expect("probe runs");
        let target = (-alpha_l).exp();
        c.check(
            format!(
                "alphaL {alpha_l}: transmission {t:.6} vs e^-alphaL {target:.6} \
                 within 0.5% in {:.1} s",
                started.elapsed().as_secs_f64()
            ),
            (t / target - 1.0).abs() <= 5e-3 && started.elapsed().as_secs_f64() < 10.0,
        );
    }
    c.finish();
}

#[test]
fn criterion_02_gain_check() {
    let _turn = take_turn();
    let mut c = Criterion::new(2, "inverted-medium gain");
    let medium = ideal_medium(0.71);
    let grid = default_grid();
    let coupling = calibrate_coupling(&medium, &grid).expect("calibration converges");
    let t_ground =
        weak_probe_transmission(&medium, &grid, coupling, InitialState::Ground).unwrap();
    let t_inverted =
        weak_probe_transmission(&medium, &grid, coupling, InitialState::Inverted).unwrap();
    let gain = t_inverted / t_ground;
    c.check_rel("probe gain vs e^(2 alphaL) = 4.13", gain, (2.0f64 * 0.71).exp(), 0.02);
    c.runtime_budget(30.0);
    c.finish();
}

#[test]
fn criterion_03_silencing() {
    let _turn = take_turn();
    let mut c = Criterion::new(3, "primary-echo silencing");

    // Exactness: a signal grating hit by an ideal backward rephasing map
    // lands on grating order -3, and with n_phi = 8 its projection onto both
    // radiating orders is an exact sum over roots of unity.
    let grid = EnsembleGrid {
        n_z: 8,
        n_det: 101,
        n_phi: 8,
        n_r: 1,
        dt: 1e-8,
    };
    let medium = ideal_medium(1.0);
    let detunings = grid.detunings(&medium);
    let weights = grid.detuning_weights();
    let t12 = 16e-6;
    let build_signal_state = || {
        let mut st = EnsembleState::ground(grid.n_z, grid.n_det, grid.n_phi);
        for z in 0..st.n_z {
            for (d, &delta) in detunings.iter().enumerate() {
                for j in 0..st.n_phi {
                    let phi = TAU * j as f64 / st.n_phi as f64;
                    let idx = st.index(z, d, j);
                    // Weak excitation dephased for t12, written on order +1.
                    st.coherence[idx] = C64::new(0.0, -0.025)
                        * (-C64::i() * delta * t12).exp()
                        * C64::new(phi.cos(), phi.sin());
                }
            }
        }
        st
    };
    let mut silenced = build_signal_state();
    silenced.apply_ideal_mirror(Direction::Backward);
    let mut reference = build_signal_state();
    reference.apply_ideal_mirror(Direction::Forward);
    // Rephase both to the primary-echo time and compare projections.
    for st in [&mut silenced, &mut reference] {
        for z in 0..st.n_z {
            for (d, &delta) in detunings.iter().enumerate() {
                for j in 0..st.n_phi {
                    let idx = st.index(z, d, j);
                    st.coherence[idx] *= (-C64::i() * delta * t12).exp();
                }
            }
        }
    }
    let p_ref = reference.projection(0, ProjectionOrder::Forward, &weights).norm();
    let p_sil_fwd = silenced.projection(0, ProjectionOrder::Forward, &weights).norm();
    let p_sil_bwd = silenced.projection(0, ProjectionOrder::Backward, &weights).norm();
    c.check(
        format!(
            "projected polarization at the echo time: {:.3e} of the matched \
             geometry (1e-10 bound), backward {:.3e}",
            p_sil_fwd / p_ref,
            p_sil_bwd / p_ref
        ),
        p_sil_fwd <= 1e-10 * p_ref && p_sil_bwd <= 1e-10 * p_ref && p_ref > 1e-3,
    );

    // Full dynamics: the counterpropagating run leaves no echo in the
    // primary window compared with the copropagating reference.
    let reference = run_scenario("silencing_2pe", GridOverrides::default(), None)
        .expect("2pe reference runs");
    let rose = run_scenario("silencing_rose", GridOverrides::default(), None)
        .expect("rose run succeeds");
    let e_ref = reference.summary["energy_echo"];
    let e_sil = rose.summary["energy_silenced"];
    c.check(
        format!(
            "silenced-window energy {:.3e} <= 1e-4 of the reference echo {:.3e} \
             (ratio {:.3e})",
            e_sil,
            e_ref,
            e_sil / e_ref
        ),
        e_sil <= 1e-4 * e_ref,
    );
    c.check(
        format!("reference 2PE echo is real: efficiency {:.3}", reference.summary["efficiency"]),
        reference.summary["efficiency"] > 0.02,
    );
    // Criterion 4 reuses this run.
    let peak = rose.summary["echo_time_s"];
    let dt = 9e-9;
    c.check(
        format!(
            "revival timing (criterion 4 precheck): peak {:.6e} vs 78 us within one \
             step {dt:.1e}",
            peak
        ),
        (peak - 78e-6).abs() <= dt * 1.001,
    );
    c.runtime_budget(180.0);
    c.finish();
}

#[test]
fn criterion_04_revival_timing() {
    let _turn = take_turn();
    let mut c = Criterion::new(4, "revival timing");
    // Same configuration as the silencing run; asserted separately so each
    // criterion reports its own line.
    let rose = run_scenario("silencing_rose", GridOverrides::default(), None)
        .expect("rose run succeeds");
    let dt = 9e-9;
    let peak = rose.summary["echo_time_s"];
    c.check(
        format!("echo peak {peak:.7e} s vs t1 + 2 t23 = 7.8e-5 s within {dt:.0e}"),
        (peak - 78e-6).abs() <= dt * 1.001,
    );

    let er = run_scenario("er_yso_rose", GridOverrides::default(), None)
        .expect("er scenario runs");
    let er_peak = er.summary["echo_time_s"];
    // 82 us after the signal at t1 = 28 us, to the precision the reported
    // storage time carries.
    c.check(
        format!("er echo {er_peak:.6e} s at 82 us after the signal (within 1 us)"),
        (er_peak - 110e-6).abs() <= 1.0e-6,
    );
    c.finish();
}

#[test]
fn criterion_05_forward_efficiency_law() {
    let _turn = take_turn();
    let mut c = Criterion::new(5, "forward efficiency law");
    let sweep = parse_sweep(
        "sweep scenario=alphal_sweep_base param=medium.alphaL lo=0.25 hi=2.0 steps=8\n",
    )
    .unwrap();
    let rows = run_sweep(&sweep, GridOverrides::default(), None).expect("sweep runs");
    for row in &rows {
        if row.value <= 1.5 + 1e-9 {
            c.check(
                format!(
                    "alphaL {:.2}: measured {:.4} vs analytic {:.4} within 10%",
                    row.value, row.measured, row.analytic
                ),
                (row.measured / row.analytic - 1.0).abs() <= 0.10,
            );
        }
    }
    // The measured curve peaks at the alphaL = 2 endpoint of this range.
    let peak = rows
        .iter()
        .max_by(|a, b| a.measured.total_cmp(&b.measured))
        .unwrap();
    c.check(
        format!("measured maximum at the alphaL = 2 endpoint ({:.3})", peak.measured),
        peak.value == 2.0 && (peak.measured - 0.541).abs() <= 0.054,
    );

    // Closed-form argmax: exact scan of the analytic law.
    let mut best = (0.0, 0.0);
    let step = 1e-4;
    let mut x = step;
    while x < 8.0 {
        let v = efficiency_forward(x, 0.0, f64::INFINITY);
        if v > best.1 {
            best = (x, v);
        }
        x += step;
    }
    c.check(
        format!("analytic argmax {:.4} = 2 (one grid step), value {:.4}", best.0, best.1),
        (best.0 - 2.0).abs() <= step && (best.1 - 0.5413).abs() <= 1e-3,
    );
    c.check(
        format!("peak value 4 e^-2 = {:.6} within 0.001 of 0.541", 4.0 * (-2.0f64).exp()),
        (4.0 * (-2.0f64).exp() - 0.541).abs() <= 1e-3,
    );
    c.runtime_budget(900.0);
    c.finish();
}

#[test]
fn criterion_06_scenario_efficiencies() {
    let _turn = take_turn();
    let mut c = Criterion::new(6, "named-scenario efficiencies");
    let started = Instant::now();
    let tm = run_scenario("tm_yag_rose", GridOverrides::default(), None).expect("tm runs");
    let tm_elapsed = started.elapsed().as_secs_f64();
    c.check_rel("tm_yag_rose efficiency", tm.summary["efficiency"], 0.1118, 0.15);
    c.check_rel(
        "tm_yag_rose measured vs analytic",
        tm.summary["efficiency"],
        tm.summary["analytic_efficiency"],
        0.15,
    );
    c.check(format!("tm runtime {tm_elapsed:.0} s < 300 s"), tm_elapsed < 300.0);

    let started = Instant::now();
    let er = run_scenario("er_yso_rose", GridOverrides::default(), None).expect("er runs");
    let er_elapsed = started.elapsed().as_secs_f64();
    c.check_rel("er_yso_rose efficiency", er.summary["efficiency"], 0.1215, 0.15);
    c.check(format!("er runtime {er_elapsed:.0} s < 300 s"), er_elapsed < 300.0);
    c.finish();
}

#[test]
fn criterion_07_chs_inversion() {
    let _turn = take_turn();
    let mut c = Criterion::new(7, "chirped-pulse inversion");
    let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0).unwrap();
    c.check_rel("adiabaticity", chs.adiabaticity(), 0.0128, 0.01);

    let relax = Relaxation::none();
    let center = inversion_profile(&chs, &[0.0], relax).unwrap()[0];
    c.check(format!("band-center n_b {center:.4} >= 0.98"), center >= 0.98);

    let half = chs.mu * chs.beta;
    let detunings: Vec<f64> = (0..300).map(|i| 0.5 * half + i as f64 * 5e3).collect();
    let profile = inversion_profile(&chs, &detunings, relax).unwrap();
    let width_khz = edge_width_10_90(&detunings, &profile).unwrap() / TAU / 1e3;
    c.check(
        format!("spectral edge width {width_khz:.1} kHz within 50 +- 40%"),
        (width_khz - 50.0).abs() <= 20.0,
    );

    let band: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.1 * half).collect();
    let double = double_pass_profile(&chs, 5e-6, &band, relax).unwrap();
    let worst = double.iter().cloned().fold(0.0, f64::max);
    c.check(format!("double-pass residual n_b {worst:.4} <= 0.02 across the band"), worst <= 0.02);
    c.runtime_budget(60.0);
    c.finish();
}

/// The in-medium half of criterion 7: the population reset through a real
/// absorbing medium. The simulated reset ratio beats the measured one, but
/// the absolute residual converges to ~0.12 (field-coupled re-driving during
/// the passes), above the stated 0.1 bound; reported honestly.
#[test]
fn criterion_07b_population_reset_in_medium() {
    let _turn = take_turn();
    let mut c = Criterion::new(7, "population reset through the medium");
    let spectrum = run_scenario("er_yso_spectrum", GridOverrides::default(), None)
        .expect("spectrum scenario runs");
    let nb1 = spectrum.summary["n_b_after_chs1"];
    let nb2 = spectrum.summary["n_b_after_chs2"];
    c.check(format!("band inverted after one chirp: n_b {nb1:.4} >= 0.9"), nb1 >= 0.9);
    c.check(
        format!("residual after the second chirp: n_b {nb2:.4} <= 0.1 (reset ratio {:.3})", nb2 / nb1),
        nb2 <= 0.1,
    );
    let edge_hz = spectrum.summary["edge_width_hz"];
    c.check(
        format!("in-medium edge width {:.1} kHz within 50 +- 40%", edge_hz / 1e3),
        (edge_hz - 50e3).abs() <= 20e3,
    );
    c.finish();
}

#[test]
fn criterion_08_pi_pulse_propagation() {
    let _turn = take_turn();
    let mut c = Criterion::new(8, "pi-pulse propagation");
    let medium = MediumSpec {
        alpha_l: 4.0,
        length: 7.5e-3,
        t1: f64::INFINITY,
        t2: f64::INFINITY,
        lambda: 1536e-9,
        // Wide enough that the medium is spectrally uniform over the whole
        // sinc spectrum of the 1 us rectangular pulse.
        inhom_halfwidth: 3.8e7,
    };
    let grid = EnsembleGrid {
        n_z: 96,
        n_det: 601,
        n_phi: 8,
        n_r: 1,
        dt: 2.5e-9,
    };
    let coupling = calibrate_coupling(&medium, &grid).unwrap();
    let pulse = RectParams::new(1e-6, PI, 1e-6).unwrap();
    let profile = pi_pulse_attenuation(&medium, &grid, &pulse, coupling).unwrap();
    let alpha = medium.alpha();
    let z50 = profile.half_energy_depth().expect("half-energy depth inside medium");
    c.check_rel("z50 * alpha vs 1.78", z50 * alpha, 1.78, 0.10);
    let mut worst: f64 = 0.0;
    for (i, &z) in profile.z.iter().enumerate() {
        if alpha * z <= 2.0 {
            worst = worst.max((profile.area[i] / PI - 1.0).abs());
        }
    }
    c.check(
        format!("area theta(z)/pi within 5% over alpha z in [0, 2] (worst {worst:.4})"),
        worst <= 0.05,
    );
    c.runtime_budget(300.0);
    c.finish();
}

#[test]
fn criterion_09_energy_ratio() {
    let _turn = take_turn();
    let mut c = Criterion::new(9, "chirp energy budget");
    let medium = ideal_medium(0.2);
    let chs = ChsParams::new(3.5e6, 1.25e5, 10.0, 0.0).unwrap();
    let budget = pulse_energies(&chs, &medium, 1e-9, 1.6e-32).unwrap();
    let closed = (2.0 / PI) * chs.adiabaticity() * medium.alpha_l;
    c.check(
        format!("ratio {:.9e} equals (2/pi)(r0/W0^2) alphaL to 1e-9", budget.ratio),
        (budget.ratio - closed).abs() <= 1e-9 * closed,
    );

    // Simulated uptake on an alphaL = 0.2 slab.
    let grid = EnsembleGrid {
        n_z: 24,
        n_det: 801,
        n_phi: 8,
        n_r: 1,
        dt: 1e-8,
    };
    let coupling = calibrate_coupling(&medium, &grid).unwrap();
    let centered = ChsParams {
        center: chs.support().1 - chs.support().0,
        ..chs
    };
    let event = PulseEvent::new(PulseShape::Chs(centered), Direction::Forward);
    let t_end = centered.support().1 + 2e-6;
    let out = run_schedule(&medium, &grid, &[event], coupling, &RunOptions::to_time(t_end))
        .unwrap();
    let e_in = out.trace.input_energy(0.0, t_end);
    let e_out = out.trace.forward_energy(0.0, t_end);
    let fraction = (e_in - e_out) / e_in;
    c.check_rel("simulated uptake fraction vs closed form", fraction, closed, 0.10);
    c.runtime_budget(120.0);
    c.finish();
}

#[test]
fn criterion_10_se_proxy() {
    let _turn = take_turn();
    let mut c = Criterion::new(10, "spontaneous-emission proxy");
    c.check(
        "se_snr_proxy(1.0, 0.1) = 10 exactly".to_string(),
        se_snr_proxy(1.0, 0.1) == 10.0,
    );
    c.finish();
}

const MINI_ROSE: &str = "\
name mini_rose
medium alphaL=1.0 L=7.5mm T1=inf T2=inf lambda=1536nm inhom=7.8Mrad
grid nz=24 ndet=401 nphi=8 nr=1 dt=10ns
pulse t=7us shape=gaussian fwhm=2.5us area=0.05pi dir=+z
pulse t=25us shape=chs beta=300krad mu=10 rabi=4.5Mrad dir=-z
pulse t=55us shape=chs beta=300krad mu=10 rabi=4.5Mrad dir=-z
detect label=rose kind=rose
";

#[test]
fn criterion_11_numerics() {
    let _turn = take_turn();
    let mut c = Criterion::new(11, "numerics invariants");

    // Bloch-vector norm conservation over 1e4 steps.
    let out = rose_sim::bloch::evolve(
        AtomState::ground(),
        1.5e6,
        |t| C64::from_polar(1.2e6, 2.0e5 * t),
        (0.0, 1e4 * 1e-8),
        1e-8,
        Relaxation::none(),
    )
    .unwrap();
    c.check(
        format!("norm drift {:.2e} <= 1e-8 per 1e4 steps", (out.bloch_norm() - 1.0).abs()),
        (out.bloch_norm() - 1.0).abs() <= 1e-8,
    );

    // Grid-doubling stability of the echo energy.
    let base_spec = parse_sequence(MINI_ROSE).unwrap();
    let energy_of = |ov: GridOverrides| {
        run_scenario_spec(&base_spec, ov, None).unwrap().summary["energy_rose"]
    };
    let base = energy_of(GridOverrides::default());
    let double_det = energy_of(GridOverrides {
        n_det: Some(801),
        ..Default::default()
    });
    let double_z = energy_of(GridOverrides {
        n_z: Some(48),
        ..Default::default()
    });
    c.check(
        format!("doubling n_det: echo energy {:.4e} -> {:.4e} within 2%", base, double_det),
        (double_det / base - 1.0).abs() <= 0.02,
    );
    c.check(
        format!("doubling n_z: echo energy {:.4e} -> {:.4e} within 2%", base, double_z),
        (double_z / base - 1.0).abs() <= 0.02,
    );
    let mut spec_16 = base_spec.clone();
    spec_16.grid.n_phi = 16;
    let double_phi = run_scenario_spec(&spec_16, GridOverrides::default(), None)
        .unwrap()
        .summary["energy_rose"];
    c.check(
        format!("doubling n_phi: echo energy {:.4e} -> {:.4e} within 2%", base, double_phi),
        (double_phi / base - 1.0).abs() <= 0.02,
    );

    // Partition independence and bit reproducibility: identical traces for
    // any worker count.
    let run_in_pool = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| run_scenario_spec(&base_spec, GridOverrides::default(), None).unwrap())
    };
    let single = run_in_pool(1);
    let multi = run_in_pool(3);
    let repeat = run_in_pool(3);
    let max_diff = |a: &std::collections::BTreeMap<String, f64>,
                    b: &std::collections::BTreeMap<String, f64>| {
        a.iter()
            .map(|(k, v)| {
                let w = b[k];
                if *v == w {
                    0.0
                } else {
                    (v - w).abs() / v.abs().max(w.abs())
                }
            })
            .fold(0.0, f64::max)
    };
    let partition_diff = max_diff(&single.summary, &multi.summary);
    c.check(
        format!("partition independence: max relative summary difference {partition_diff:.2e}"),
        partition_diff <= 1e-12,
    );
    let repeat_diff = max_diff(&multi.summary, &repeat.summary);
    c.check(
        format!("bit reproducibility on repeat: {repeat_diff:.2e}"),
        repeat_diff == 0.0,
    );

    // Parser round trips for every registered scenario.
    let mut round_trips = true;
    for (name, _) in rose_sim::harness::list_scenarios() {
        let text = rose_sim::harness::scenario_source(&name).unwrap();
        let spec = parse_sequence(text).unwrap();
        round_trips &= parse_sequence(&serialize_sequence(&spec)).unwrap() == spec;
    }
    c.check("parser round-trip on all registered scenarios".to_string(), round_trips);
    c.finish();
}
