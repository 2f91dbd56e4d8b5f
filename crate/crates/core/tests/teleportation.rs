//! The measure-and-displace protocol against the Gaussian noise channel.

use cvtelefid_core::channels::{
    apply_noise, simulate_teleportation_channel, GaussianNoiseChannel, Measurement, TeleportationSetup,
};
use cvtelefid_core::fock::{coherent_state, fidelity_pure_mixed, ComplexAmplitude, DensityMatrix, FockSpace, FockVector, Tolerances};
use cvtelefid_core::quadrature::QuadratureGrid;

const CUTOFF: usize = 30;

/// `e^{−2 atanh η} = (1−η)/(1+η)`, written out independently of the library.
fn sigma_of(eta: f64) -> f64 {
    (1.0 - eta) / (1.0 + eta)
}

fn inputs(space: FockSpace) -> Vec<(&'static str, DensityMatrix)> {
    let tol = Tolerances::default();
    vec![
        ("vacuum", FockVector::vacuum(space).projector()),
        ("number 1", FockVector::number(space, 1).unwrap().projector()),
        (
            "coherent 1",
            coherent_state(ComplexAmplitude::real(1.0), space, &tol).unwrap().projector(),
        ),
    ]
}

#[test]
fn protocol_equals_noise_channel() {
    let space = FockSpace::single(CUTOFF);
    let grid = QuadratureGrid::gauss_hermite(24).unwrap();
    for eta in [0.0, 0.3, 0.5, 0.7] {
        let setup = TeleportationSetup::new(eta, grid.clone(), space).unwrap();
        let channel = GaussianNoiseChannel::gauss_hermite(sigma_of(eta), 20).unwrap();
        for (name, rho) in inputs(space) {
            let sim = simulate_teleportation_channel(&setup, &rho).unwrap();
            let reference = apply_noise(&channel, &rho).unwrap();
            let d = sim.state.trace_distance(&reference.state).unwrap();
            assert!(d < 1e-3, "eta {eta}, {name}: trace distance {d:.3e}");
            assert!((sim.total_probability - 1.0).abs() < 1e-3, "eta {eta}, {name}: {}", sim.total_probability);
            assert!(sim.trace_deficit < 1e-6);
        }
    }
}

#[test]
fn near_perfect_resource_preserves_vacuum() {
    let space = FockSpace::single(CUTOFF);
    let setup = TeleportationSetup::new(0.99, QuadratureGrid::gauss_hermite(24).unwrap(), space).unwrap();
    let vac = FockVector::vacuum(space);
    let out = simulate_teleportation_channel(&setup, &vac.projector()).unwrap();
    let f = fidelity_pure_mixed(&vac, &out.state).unwrap();
    assert!(f > 0.98, "fidelity {f}");
    assert!((f - 1.0 / (1.0 + sigma_of(0.99))).abs() < 1e-3);
}

#[test]
fn classical_resource_halves_coherent_fidelity() {
    // Unit added noise on |α| up to 1.6 spreads past level 30.
    let space = FockSpace::single(40);
    let setup = TeleportationSetup::new(0.0, QuadratureGrid::gauss_hermite(24).unwrap(), space).unwrap();
    let tol = Tolerances::default();
    for alpha in [0.0, 1.0, 1.5] {
        let psi = coherent_state(ComplexAmplitude::new(alpha, -0.3 * alpha), space, &tol).unwrap();
        let out = simulate_teleportation_channel(&setup, &psi.projector()).unwrap();
        let f = fidelity_pure_mixed(&psi, &out.state).unwrap();
        assert!((f - 0.5).abs() < 1e-3, "alpha {alpha}: {f}");
    }
}

/// Projecting modes 1 and 2 onto a displaced copy of the finite-η resource
/// itself, instead of an ideal Bell state, yields the noise channel at
/// `σ = (1−η²)/(1+η²)` and a total probability below one.
#[test]
fn squeezed_projector_gives_squared_eta_channel() {
    let space = FockSpace::single(CUTOFF);
    let grid = QuadratureGrid::gauss_hermite(24).unwrap();
    for eta in [0.3, 0.5] {
        let setup = TeleportationSetup::new(eta, grid.clone(), space)
            .unwrap()
            .with_measurement(Measurement::Squeezed { eta })
            .unwrap();
        let channel = GaussianNoiseChannel::gauss_hermite(sigma_of(eta * eta), 20).unwrap();
        for (name, rho) in inputs(space) {
            let sim = simulate_teleportation_channel(&setup, &rho).unwrap();
            let reference = apply_noise(&channel, &rho).unwrap();
            let d = sim.state.trace_distance(&reference.state).unwrap();
            assert!(d < 1e-3, "eta {eta}, {name}: trace distance {d:.3e}");
            let e2 = eta * eta;
            let expected = (1.0 - e2) * (1.0 - e2) / (1.0 - e2 * e2);
            assert!((sim.total_probability - expected).abs() < 1e-3);
        }
    }
}
