use cvtelefid_core::channels::{apply_noise, compose_noise, GaussianNoiseChannel};
use cvtelefid_core::fock::{
    coherent_state, displacement_operator, fidelity_pure_mixed, ComplexAmplitude, DensityMatrix, FockSpace,
    FockVector, Tolerances,
};
use cvtelefid_core::quadrature::QuadratureGrid;
use proptest::prelude::*;

fn small_state(space: FockSpace, amps: &[(f64, f64)]) -> FockVector {
    let mut c = nalgebra::DVector::zeros(space.mode_dim());
    for (n, &(re, im)) in amps.iter().enumerate() {
        c[n] = num_complex::Complex64::new(re, im);
    }
    FockVector::new(space, c, 0.0).unwrap()
}

fn amps() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
}

#[test]
fn coherent_fidelity_pipeline() {
    let space = FockSpace::single(60);
    let tol = Tolerances::default();
    for alpha in [0.0, 1.0, 2.0] {
        let psi = coherent_state(ComplexAmplitude::real(alpha), space, &tol).unwrap();
        for sigma in [0.01, 0.1, 0.5, 1.0] {
            let ch = GaussianNoiseChannel::gauss_hermite(sigma, 20).unwrap();
            let out = apply_noise(&ch, &psi.projector()).unwrap();
            let f = fidelity_pure_mixed(&psi, &out.state).unwrap();
            assert!((f - 1.0 / (1.0 + sigma)).abs() < 1e-6, "alpha {alpha} sigma {sigma}: {f}");
            assert!(out.trace_deficit < 1e-6);
        }
    }
}

#[test]
fn fidelity_is_phase_independent() {
    // Averaging over 16 phases of |α| = 1.5 reproduces the pointwise value.
    let space = FockSpace::single(50);
    let tol = Tolerances::default();
    let ch = GaussianNoiseChannel::gauss_hermite(0.4, 20).unwrap();
    let mean: f64 = (0..16)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let psi = coherent_state(ComplexAmplitude::from_polar(1.5, theta), space, &tol).unwrap();
            let out = apply_noise(&ch, &psi.projector()).unwrap();
            fidelity_pure_mixed(&psi, &out.state).unwrap()
        })
        .sum::<f64>()
        / 16.0;
    assert!((mean - 1.0 / 1.4).abs() < 1e-6, "{mean}");
}

#[test]
fn polar_grid_agrees_with_cartesian() {
    let space = FockSpace::single(40);
    let rho = FockVector::number(space, 2).unwrap().projector();
    let cart = apply_noise(&GaussianNoiseChannel::gauss_hermite(0.3, 20).unwrap(), &rho).unwrap();
    let polar = apply_noise(
        &GaussianNoiseChannel::new(0.3, QuadratureGrid::polar(20).unwrap()).unwrap(),
        &rho,
    )
    .unwrap();
    assert!(cart.state.max_abs_diff(&polar.state).unwrap() < 1e-8);
}

#[test]
fn semigroup_from_halves() {
    let space = FockSpace::single(40);
    let tol = Tolerances::default();
    let rho = coherent_state(ComplexAmplitude::new(0.5, 0.5), space, &tol).unwrap().projector();
    for sigma in [0.2, 0.6, 1.0] {
        let half = GaussianNoiseChannel::gauss_hermite(sigma / 2.0, 20).unwrap();
        let twice = apply_noise(&half, &apply_noise(&half, &rho).unwrap().state).unwrap();
        let whole = apply_noise(&GaussianNoiseChannel::gauss_hermite(compose_noise(sigma / 2.0, sigma / 2.0).unwrap(), 20).unwrap(), &rho).unwrap();
        assert!(twice.state.max_abs_diff(&whole.state).unwrap() < 1e-6, "sigma {sigma}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_and_hermiticity_preserved(a in amps(), sigma in 0.0f64..2.0) {
        // Output photon number grows like sigma; 60 levels keep the tail below 1e-6 up to sigma = 2.
        let space = FockSpace::single(60);
        let rho = small_state(space, &a).projector();
        let ch = GaussianNoiseChannel::gauss_hermite(sigma, 20).unwrap();
        let out = apply_noise(&ch, &rho).unwrap();
        prop_assert!(out.trace_deficit < 1e-6);
        prop_assert!((out.state.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.state.hermiticity_defect() < 1e-10);
        prop_assert!(out.state.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn displacement_covariance(a in amps(), sigma in 0.05f64..1.0, wr in -0.6f64..0.6, wi in -0.6f64..0.6) {
        let space = FockSpace::single(45);
        let rho = small_state(space, &a).projector();
        let d = displacement_operator(ComplexAmplitude::new(wr, wi), space).unwrap();
        let ch = GaussianNoiseChannel::gauss_hermite(sigma, 20).unwrap();
        let lhs = apply_noise(&ch, &d.conjugate(&rho).unwrap()).unwrap().state;
        let rhs = d.conjugate(&apply_noise(&ch, &rho).unwrap().state).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-6);
    }

    #[test]
    fn linear_in_state(a in amps(), b in amps(), p in 0.0f64..1.0, sigma in 0.0f64..1.0) {
        let space = FockSpace::single(40);
        let (ra, rb) = (small_state(space, &a).projector(), small_state(space, &b).projector());
        let ch = GaussianNoiseChannel::gauss_hermite(sigma, 16).unwrap();
        let mix = DensityMatrix::mixture(&[(p, &ra), (1.0 - p, &rb)]).unwrap();
        let lhs = apply_noise(&ch, &mix).unwrap().state;
        let oa = apply_noise(&ch, &ra).unwrap().state;
        let ob = apply_noise(&ch, &rb).unwrap().state;
        let rhs = DensityMatrix::mixture(&[(p, &oa), (1.0 - p, &ob)]).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
    }
}
