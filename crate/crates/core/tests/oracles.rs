//! Analytic engines against dense numerical oracles.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use common::{random_pointer, random_qubit, rng};
use rand::Rng;
use weakmeas::exact::{eta_coefficients, evolve_exact};
use weakmeas::hilbert::{
    annihilation, expm_propagate, identity, number, op_tensor, sigma_x, sigma_z, tensor_product,
    timeordered_propagate, DenseOperator, FockPointerState, JointState, QubitState, C64,
};
use weakmeas::ion::{
    carrier_hamiltonian, carrier_rotation, effective_evolve, jc_evolve, readout_map,
    red_sideband_hamiltonian, Ion, IonLevel, IonRegister, PulseSpec, ION1_AXIS,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn coupling_generator(n_max: usize) -> DenseOperator {
    op_tensor(&sigma_x(), &number(n_max)).unwrap()
}

#[test]
fn evolve_exact_matches_matrix_exponential() {
    let mut r = rng(11);
    let n_max = 16;
    let h = coupling_generator(n_max);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let s0 = random_qubit(&mut r);
        let phi0 = random_pointer(&mut r, n_max, 12);
        let g = r.random_range(0.0..1.5);
        let psi0 = tensor_product(&s0.to_joint(), &phi0.to_joint()).unwrap();
        let oracle = expm_propagate(&h, g, &psi0).unwrap();
        let fast = evolve_exact(&s0, &phi0, g).unwrap();
        worst = worst.max(fast.max_abs_diff(&oracle).unwrap());
    }
    assert!(worst <= 1e-10, "max amplitude error {worst:e}");
}

#[test]
fn eta_example_against_oracle() {
    let s0 = QubitState::new(c(0.6, 0.0), c(0.8, 0.0)).unwrap();
    let eta = eta_coefficients(&s0, 0.3, 2);
    let (sin, cos) = 0.6f64.sin_cos();
    assert!((eta.eta_g - c(0.6 * cos, -0.8 * sin)).norm() < 1e-15);
    assert!((eta.eta_e - c(0.8 * cos, -0.6 * sin)).norm() < 1e-15);

    let phi0 = FockPointerState::fock(4, 2).unwrap();
    let psi0 = tensor_product(&s0.to_joint(), &phi0.to_joint()).unwrap();
    let oracle = expm_propagate(&coupling_generator(4), 0.3, &psi0).unwrap();
    assert!((oracle.amp(&[0, 2]).unwrap() - eta.eta_g).norm() < 1e-12);
    assert!((oracle.amp(&[1, 2]).unwrap() - eta.eta_e).norm() < 1e-12);
}

#[test]
fn tensor_norm_is_multiplicative() {
    let mut r = rng(2);
    for _ in 0..20 {
        let len_a = r.random_range(1..5);
        let len_b = r.random_range(1..5);
        let amps = |r: &mut rand_chacha::ChaCha8Rng, n: usize| -> Vec<C64> {
            (0..n)
                .map(|_| c(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)))
                .collect()
        };
        let a = JointState::new(vec![len_a], amps(&mut r, len_a)).unwrap();
        let b = JointState::new(vec![len_b], amps(&mut r, len_b)).unwrap();
        let ab = tensor_product(&a, &b).unwrap();
        assert!((ab.norm() - a.norm() * b.norm()).abs() < 1e-12);
    }
}

#[test]
fn constant_generator_timeordered_matches_expm() {
    let mut r = rng(3);
    let n_max = 4;
    let h = op_tensor(&sigma_z(), &annihilation(n_max))
        .unwrap()
        .add(
            &op_tensor(&sigma_z(), &annihilation(n_max))
                .unwrap()
                .adjoint(),
        )
        .unwrap()
        .add(&coupling_generator(n_max))
        .unwrap();
    let psi = tensor_product(
        &random_qubit(&mut r).to_joint(),
        &random_pointer(&mut r, n_max, n_max).to_joint(),
    )
    .unwrap();
    let reference = expm_propagate(&h, 1.3, &psi).unwrap();
    let stepped = timeordered_propagate(|_| h.clone(), 0.0, 1.3, &psi, 40).unwrap();
    assert!(stepped.max_abs_diff(&reference).unwrap() < 1e-10);
}

fn sideband(n_max: usize, rabi: f64, detuning: f64, phase: f64) -> impl Fn(f64) -> DenseOperator {
    move |t| red_sideband_hamiltonian(n_max, Ion::First, rabi, detuning, phase, t).unwrap()
}

fn register_basis(ion1: IonLevel, n: usize, ion2: IonLevel, n_max: usize) -> JointState {
    JointState::basis(vec![2, n_max + 1, 2], &[ion1.index(), n, ion2.index()]).unwrap()
}

#[test]
fn resonant_sideband_matches_block_rotation() {
    // |↑,n⟩ → cos(Ω√(n+1) t)|↑,n⟩ − i e^{−iφ} sin(Ω√(n+1) t)|↓,n+1⟩
    let (n_max, rabi, phase, t) = (4, 0.7, 0.4, 2.1);
    for n in 0..n_max {
        let psi = register_basis(IonLevel::Up, n, IonLevel::Down, n_max);
        let out =
            timeordered_propagate(sideband(n_max, rabi, 0.0, phase), 0.0, t, &psi, 200).unwrap();
        let angle = rabi * ((n + 1) as f64).sqrt() * t;
        let stay = out.amp(&[1, n, 0]).unwrap();
        let moved = out.amp(&[0, n + 1, 0]).unwrap();
        assert!((stay - c(angle.cos(), 0.0)).norm() < 1e-8, "n = {n}");
        assert!(
            (moved - c(0.0, -1.0) * C64::from_polar(angle.sin(), -phase)).norm() < 1e-8,
            "n = {n}"
        );
    }
}

#[test]
fn timeordered_self_convergence_is_fourth_order() {
    let n_max = 4;
    let psi = register_basis(IonLevel::Up, 1, IonLevel::Down, n_max);
    let h = sideband(n_max, 1.0, 6.0, 0.3);
    let run = |steps| timeordered_propagate(&h, 0.0, 3.0, &psi, steps).unwrap();
    let (coarse, mid, fine) = (run(30), run(60), run(120));
    let ratio = coarse.max_abs_diff(&mid).unwrap() / mid.max_abs_diff(&fine).unwrap();
    assert!((8.0..=40.0).contains(&ratio), "step-halving ratio {ratio}");
}

fn random_register(r: &mut rand_chacha::ChaCha8Rng, n_max: usize, support: usize) -> IonRegister {
    let mut amps = vec![c(0.0, 0.0); 4 * (n_max + 1)];
    for ion1 in 0..2 {
        for n in 0..=support {
            for ion2 in 0..2 {
                amps[(ion1 * (n_max + 1) + n) * 2 + ion2] =
                    c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            }
        }
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    IonRegister::new(JointState::new(vec![2, n_max + 1, 2], amps).unwrap()).unwrap()
}

#[test]
fn sideband_pulse_matches_timeordered_oracle() {
    let mut r = rng(5);
    let n_max = 6;
    for _ in 0..5 {
        let reg = random_register(&mut r, n_max, 4);
        let rabi = r.random_range(0.2..1.5);
        let detuning = r.random_range(0.0..12.0);
        let duration = r.random_range(0.1..3.0);
        let pulse = PulseSpec::red_sideband_ion1(rabi, detuning, duration).unwrap();
        let fast = jc_evolve(&reg, &pulse).unwrap();
        let oracle = timeordered_propagate(
            sideband(n_max, rabi, detuning, pulse.phase),
            0.0,
            duration,
            reg.state(),
            400,
        )
        .unwrap();
        let err = fast.state().max_abs_diff(&oracle).unwrap();
        assert!(
            err < 1e-8,
            "rabi {rabi}, detuning {detuning}, t {duration}: {err:e}"
        );
        assert!((fast.state().norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn far_detuned_sideband_is_nearly_dispersive() {
    // δ = 20 Ω₀ on |↑,1⟩: little population leaves, and the accumulated phase
    // follows H_eff = (Ω₀²/δ)(a†a τz + |↑⟩⟨↑|), i.e. e^{−2i g₀ t} on |↑,1⟩.
    let (n_max, omega0, delta) = (4, 1.0, 20.0);
    let g0 = omega0 * omega0 / delta;
    let psi = register_basis(IonLevel::Up, 1, IonLevel::Down, n_max);
    let t = 5.0;
    let oracle =
        timeordered_propagate(sideband(n_max, omega0, delta, 0.0), 0.0, t, &psi, 2000).unwrap();
    let reg = IonRegister::new(psi).unwrap();
    let fast = jc_evolve(
        &reg,
        &PulseSpec::red_sideband_ion1(omega0, delta, t).unwrap(),
    )
    .unwrap();
    assert!(fast.state().max_abs_diff(&oracle).unwrap() < 1e-8);

    let stay = oracle.amp(&[1, 1, 0]).unwrap();
    let transferred = 1.0 - stay.norm_sqr();
    assert!(
        transferred <= 4.0 * omega0 * omega0 * 2.0 / (delta * delta),
        "transfer {transferred}"
    );
    let predicted = -2.0 * g0 * t;
    let phase = stay.arg();
    assert!(
        ((phase - predicted) / predicted).abs() < 0.02,
        "phase {phase} vs {predicted}"
    );
}

#[test]
fn effective_evolution_is_exact_evolution_in_the_ion_basis() {
    let mut r = rng(8);
    let n_max = 10;
    for _ in 0..20 {
        let s0 = random_qubit(&mut r);
        let phi0 = random_pointer(&mut r, n_max, n_max);
        let g0 = r.random_range(0.0..2.0);
        let t = r.random_range(0.0..1.0);
        let reg = effective_evolve(&IonRegister::from_qubit(&s0, &phi0).unwrap(), g0, t).unwrap();
        let exact = evolve_exact(&s0, &phi0, g0 * t).unwrap();
        for n in 0..=n_max {
            let [ag, ae] = reg.qubit_amplitudes(n, IonLevel::Down).unwrap();
            assert!((ag - exact.amp(&[0, n]).unwrap()).norm() <= 1e-12);
            assert!((ae - exact.amp(&[1, n]).unwrap()).norm() <= 1e-12);
        }
    }
}

#[test]
fn carrier_pulse_matches_two_level_exponential() {
    let mut r = rng(13);
    for _ in 0..20 {
        let reg = random_register(&mut r, 3, 3);
        let rabi = r.random_range(0.1..3.0);
        let theta = r.random_range(-PI..PI);
        let duration = r.random_range(0.0..4.0);
        let out = carrier_rotation(
            &reg,
            &PulseSpec::carrier_ion1(rabi, theta, duration).unwrap(),
        )
        .unwrap();
        let h = carrier_hamiltonian(rabi, theta);
        let columns = [QubitState::ground(), QubitState::excited()]
            .map(|s| expm_propagate(&h, duration, &s.to_joint()).unwrap());
        let unitary = DenseOperator::from_fn(2, |i, j| columns[j].amps()[i]).unwrap();
        let oracle = reg.state().apply_local(ION1_AXIS, &unitary).unwrap();
        assert!(out.state().max_abs_diff(&oracle).unwrap() <= 1e-12);
    }
}

#[test]
fn readout_on_two_phonons_leaks() {
    // |2, ↓_r⟩ → cos(√2 π/2)|2, ↓_r⟩ − i sin(√2 π/2)|1, ↑_r⟩
    let n_max = 4;
    let psi = register_basis(IonLevel::Down, 2, IonLevel::Down, n_max);
    let reg = IonRegister::new(psi.clone()).unwrap();
    let out = readout_map(&reg, &PulseSpec::red_sideband_ion2(1.0, FRAC_PI_2).unwrap()).unwrap();
    let angle = SQRT_2 * FRAC_PI_2;
    assert!(
        (out.register.amp(IonLevel::Down, 2, IonLevel::Down).unwrap() - c(angle.cos(), 0.0)).norm()
            < 1e-12
    );
    assert!(
        (out.register.amp(IonLevel::Down, 1, IonLevel::Up).unwrap() - c(0.0, -angle.sin())).norm()
            < 1e-12
    );
    assert!((out.leakage - 1.0).abs() < 1e-12);

    let h = move |t| red_sideband_hamiltonian(n_max, Ion::Second, 1.0, 0.0, 0.0, t).unwrap();
    let oracle = timeordered_propagate(h, 0.0, FRAC_PI_2, &psi, 200).unwrap();
    assert!(out.register.state().max_abs_diff(&oracle).unwrap() < 1e-8);
}

#[test]
fn propagators_preserve_norm() {
    let mut r = rng(21);
    let reg = random_register(&mut r, 5, 3);
    let h = op_tensor(&identity(2), &coupling_generator(5)).unwrap();
    let norm_in = reg.state().norm();
    let a = expm_propagate(&h, 0.9, reg.state()).unwrap();
    let b = timeordered_propagate(sideband(5, 0.8, 3.0, 0.1), 0.0, 2.0, reg.state(), 50).unwrap();
    assert!((a.norm() - norm_in).abs() <= 1e-10);
    assert!((b.norm() - norm_in).abs() <= 1e-10);
}
