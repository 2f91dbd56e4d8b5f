use cvtelefid_core::analytics::{coherent_entanglement_fidelity, ecs_entanglement_fidelity, EcsSpec};
use cvtelefid_core::channels::GaussianNoiseChannel;
use cvtelefid_core::entfid::{
    compare_purifications, entanglement_fidelity_brute, entanglement_fidelity_overlap, purification_independence_check,
    Purification,
};
use cvtelefid_core::fock::{coherent_state, ComplexAmplitude, DensityMatrix, FockSpace, Tolerances};
use cvtelefid_core::quadrature::QuadratureGrid;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn three_methods_agree_across_separations() {
    let grid = QuadratureGrid::gauss_hermite(20).unwrap();
    // Separations |α−β| = 2, 4, 8 with β = −α.
    for (alpha, cutoff) in [(1.0, 40), (2.0, 60), (4.0, 90)] {
        let (a, b) = (ComplexAmplitude::real(alpha), ComplexAmplitude::real(-alpha));
        let spec = EcsSpec::new(a, b).unwrap();
        let gamma = Purification::ecs(a, b, FockSpace::single(cutoff), &tol()).unwrap();
        let sep_sqr: f64 = 4.0 * alpha * alpha;
        for sigma in [0.0, 0.05, 0.3, 1.0] {
            let closed = ecs_entanglement_fidelity(&spec, sigma).unwrap();
            let exact = entanglement_fidelity_overlap(a, b, sigma, &grid).unwrap();
            let ch = GaussianNoiseChannel::new(sigma, grid.clone()).unwrap();
            let brute = entanglement_fidelity_brute(&gamma, &ch).unwrap();
            assert!(
                (closed - exact.value).abs() <= 1e-4f64.max(10.0 * (-sep_sqr).exp()),
                "alpha {alpha} sigma {sigma}: closed {closed} exact {exact:?}"
            );
            let combined = (exact.est_error + brute.est_error).max(1e-10);
            assert!(
                (exact.value - brute.value).abs() <= 10.0 * combined,
                "alpha {alpha} sigma {sigma}: exact {exact:?} brute {brute:?}"
            );
            for v in [exact.value, brute.value] {
                assert!((0.0..=1.0 + 1e-9).contains(&v));
            }
        }
    }
}

#[test]
fn brute_force_monotone_on_sigma_ladder() {
    let (a, b) = (ComplexAmplitude::real(1.5), ComplexAmplitude::real(-1.5));
    let gamma = Purification::ecs(a, b, FockSpace::single(50), &tol()).unwrap();
    let values: Vec<f64> = [0.0, 0.02, 0.1, 0.25, 0.5, 1.0]
        .iter()
        .map(|&s| entanglement_fidelity_brute(&gamma, &GaussianNoiseChannel::gauss_hermite(s, 20).unwrap()).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[0] >= w[1]), "{values:?}");
}

#[test]
fn large_separation_halves_coherent_value() {
    let grid = QuadratureGrid::gauss_hermite(20).unwrap();
    let sigma = 0.5;
    let r = entanglement_fidelity_overlap(ComplexAmplitude::real(10.0), ComplexAmplitude::real(-10.0), sigma, &grid)
        .unwrap();
    let ratio = r.value / coherent_entanglement_fidelity(sigma).unwrap();
    assert!((ratio - 0.5).abs() < 1e-3, "{ratio}");
}

#[test]
fn ecs_and_tagged_mixture_differ_only_by_overlap_terms() {
    let space = FockSpace::single(60);
    let (a, b) = (ComplexAmplitude::real(2.0), ComplexAmplitude::real(-2.0));
    let ecs = Purification::ecs(a, b, space, &tol()).unwrap();
    let ca = coherent_state(a, space, &tol()).unwrap();
    let cb = coherent_state(b, space, &tol()).unwrap();
    let qubit = Purification::orthogonal_qubit([(0.5, &ca), (0.5, &cb)]).unwrap();
    let ch = GaussianNoiseChannel::gauss_hermite(0.1, 20).unwrap();
    let rep = compare_purifications(&[ecs, qubit], &ch).unwrap();
    assert!(rep.different_states);
    assert!(rep.max_gap <= 10.0 * (-16.0f64).exp(), "{rep:?}");
}

#[test]
fn pure_state_purifications_all_give_standard_fidelity() {
    let space = FockSpace::single(40);
    let psi = coherent_state(ComplexAmplitude::new(0.8, 0.4), space, &tol()).unwrap();
    let trivial = Purification::pure(&psi).unwrap();
    let tagged = Purification::orthogonal_qubit([(1.0, &psi), (0.0, &psi)]).unwrap();
    let rho: DensityMatrix = psi.projector();
    let ch = GaussianNoiseChannel::gauss_hermite(0.25, 20).unwrap();
    let rep = purification_independence_check(&rho, &[trivial, tagged], &ch).unwrap();
    assert!(rep.consistent);
    for e in &rep.entries {
        assert!((e.result.value - 0.8).abs() < 1e-8);
    }
}
