//! End-to-end checks through the public API only.

use oqsim_core::evolve::{build_step, evolve_trace, exact_reference, Components, Method};
use oqsim_core::measure::Observable;
use oqsim_core::models::{amplitude_damping_model, amplitude_damping_step, dtfim_model};
use oqsim_core::qcore::{Pauli, StateVector};
use oqsim_core::random::{haar_state, seeded};
use oqsim_core::vectorize::{build_generator, devectorize};
use oqsim_core::vqsp;

fn observables(n: usize) -> Vec<(String, Observable)> {
    vec![("x".into(), Observable::single(n, 0, Pauli::X)), ("m".into(), Observable::magnetization(n))]
}

#[test]
fn damped_qubit_circuit_tracks_reference() {
    let model = amplitude_damping_model(1.0, 1.0, 1.0).unwrap();
    let step = amplitude_damping_step(1.0, 1.0, 1.0, 0.01).unwrap();
    let rho0 = StateVector::basis(2, 0);
    let obs = observables(1);
    let alg3 = evolve_trace(&model, &step, &rho0, 100, &Method::Algorithm3(Components::exact_algorithm3(&step).unwrap()), &obs).unwrap();
    let exact = exact_reference(&model, &rho0, 1.0, 100, &obs).unwrap();
    for (name, _) in &obs {
        let dev = alg3.series(name).unwrap().iter().zip(exact.series(name).unwrap()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 0.01, "{name}: {dev}");
    }
    // Populations stay a density matrix.
    let rho = devectorize(alg3.final_state()).unwrap();
    let tr = rho.trace();
    assert!(tr.re > 0.0 && tr.im.abs() < 1e-12);
    assert!(rho.is_hermitian(1e-12 * tr.re));
}

#[test]
fn ising_probabilities_decay_monotonically() {
    let model = dtfim_model(1.0, 1.0, 0.1).unwrap();
    let step = build_step(&build_generator(&model).unwrap(), 0.01, 1).unwrap();
    assert_eq!(step.num_ancillas(), 5);
    let rho0 = StateVector::basis(4, 0);
    let trace =
        evolve_trace(&model, &step, &rho0, 20, &Method::Algorithm4(Components::exact_algorithm4(&step).unwrap()), &observables(2)).unwrap();
    assert!(trace.cumulative_prob.windows(2).all(|w| w[1] < w[0]));
    assert!(trace.max_imag_residue < 1e-10);
}

#[test]
fn encode_then_recover_complex_vector() {
    let target = haar_state(&mut seeded(42), 2);
    let x = vqsp::classify(target.amplitudes()).unwrap();
    assert_eq!(x.case(), vqsp::Case::Complex);
    let embedded = vqsp::embedded_target(&x);
    let (recovered, p) = vqsp::recover(&embedded, x.case()).unwrap();
    assert!(p > 0.0);
    assert!(recovered.fidelity(&target).unwrap() > 1.0 - 1e-12);
}
