//! Closed-form noise budget, fidelities, thresholds and conversions.

use serde::{Deserialize, Serialize};

use crate::entfid::{EntFidResult, Method};
use crate::fock::{ComplexAmplitude, Tolerances};
use crate::{Error, Result};

/// Bracket and stopping rule of [`required_sigma_for_ecs_fidelity`].
pub const ROOT_BRACKET: (f64, f64) = (1e-12, 4.0);
pub const ROOT_MAX_ITER: usize = 200;
pub const ROOT_TOL: f64 = 1e-12;

fn check_nonneg(name: &'static str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(name, v, "finite and >= 0"))
    }
}

/// Additive contributions to the channel variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    /// Amplification noise; taken as given.
    pub sigma_g: f64,
    /// Finite squeezing of the resource.
    pub sigma_eta: f64,
    /// Detector inefficiency.
    pub sigma_nu: f64,
    pub sigma_other: f64,
}

impl NoiseBudget {
    pub fn new(sigma_g: f64, sigma_eta: f64, sigma_nu: f64, sigma_other: f64) -> Result<Self> {
        Ok(Self {
            sigma_g: check_nonneg("sigma_g", sigma_g)?,
            sigma_eta: check_nonneg("sigma_eta", sigma_eta)?,
            sigma_nu: check_nonneg("sigma_nu", sigma_nu)?,
            sigma_other: check_nonneg("sigma_other", sigma_other)?,
        })
    }

    /// Budget from the squeezing parameter `η` and detector efficiency `ν`.
    pub fn from_physical(sigma_g: f64, eta: f64, nu: f64, sigma_other: f64) -> Result<Self> {
        Self::new(sigma_g, sigma_from_squeezing(eta)?, sigma_from_detector(nu)?, sigma_other)
    }

    pub fn total(&self) -> f64 {
        self.sigma_g + self.sigma_eta + self.sigma_nu + self.sigma_other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcsSpec {
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
}

impl EcsSpec {
    pub fn new(alpha: ComplexAmplitude, beta: ComplexAmplitude) -> Result<Self> {
        let separation = (alpha - beta).norm();
        if separation < Tolerances::default().separation {
            return Err(Error::DegenerateEcs { separation });
        }
        Ok(Self { alpha, beta })
    }

    /// The `β = −α` family with real `α`.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(ComplexAmplitude::real(alpha), ComplexAmplitude::real(-alpha))
    }

    pub fn alpha(&self) -> ComplexAmplitude {
        self.alpha
    }

    pub fn beta(&self) -> ComplexAmplitude {
        self.beta
    }

    /// `|α − β|²`.
    pub fn separation_sqr(&self) -> f64 {
        (self.alpha - self.beta).norm_sqr()
    }

    /// `N = (2 − 2e^{−|α−β|²})^{−1/2}`.
    pub fn normalization(&self) -> f64 {
        (-2.0 * (-self.separation_sqr()).exp_m1()).sqrt().recip()
    }

    /// `(|α|² + |β|²)/2`, which is `|α|²` for `β = −α`.
    pub fn mean_photon_number_approx(&self) -> f64 {
        0.5 * (self.alpha.norm_sqr() + self.beta.norm_sqr())
    }

    /// Exact per-mode mean photon number
    /// `N²(|α|² + |β|² − 2 Re(ᾱβ) e^{−|α−β|²})`.
    pub fn mean_photon_number_exact(&self) -> f64 {
        let (a, b) = (self.alpha.to_c64(), self.beta.to_c64());
        let n = self.normalization();
        n * n * (a.norm_sqr() + b.norm_sqr() - 2.0 * (a.conj() * b).re * (-self.separation_sqr()).exp())
    }
}

/// `σ_η = e^{−2 atanh η}` for a two-mode squeezed resource, `0 ≤ η < 1`.
pub fn sigma_from_squeezing(eta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::domain("eta", eta, "0 <= eta < 1"));
    }
    Ok((-2.0 * eta.atanh()).exp())
}

/// `σ_ν = (1 − ν²)/ν²` for detector efficiency `0 < ν ≤ 1`.
pub fn sigma_from_detector(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::domain("nu", nu, "0 < nu <= 1"));
    }
    Ok((1.0 - nu * nu) / (nu * nu))
}

/// `1/(1+σ)`, the fidelity of every coherent state.
pub fn coherent_entanglement_fidelity(sigma: f64) -> Result<f64> {
    Ok(1.0 / (1.0 + check_nonneg("sigma", sigma)?))
}

/// `½(1/(1+σ))(1 + e^{−|α−β|²σ/(1+σ)})`.
///
/// Exact for the mixture of `|α⟩` and `|β⟩` with orthogonal tags; for the ECS
/// it drops terms of order `e^{−|α−β|²}`.
pub fn ecs_entanglement_fidelity(spec: &EcsSpec, sigma: f64) -> Result<f64> {
    let sigma = check_nonneg("sigma", sigma)?;
    let s_eff = sigma / (1.0 + sigma);
    Ok(0.5 / (1.0 + sigma) * (1.0 + (-spec.separation_sqr() * s_eff).exp()))
}

/// [`ecs_entanglement_fidelity`] tagged as a closed-form result. The error
/// estimate is the size of the neglected overlap terms.
pub fn ecs_entanglement_fidelity_result(spec: &EcsSpec, sigma: f64) -> Result<EntFidResult> {
    Ok(EntFidResult {
        value: ecs_entanglement_fidelity(spec, sigma)?,
        method: Method::ClosedForm,
        est_error: 10.0 * (-spec.separation_sqr()).exp(),
    })
}

/// `σ` with `ecs_entanglement_fidelity(spec, σ) = target`, by bisection on
/// [`ROOT_BRACKET`].
pub fn required_sigma_for_ecs_fidelity(spec: &EcsSpec, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain("target", target, "0 < target < 1"));
    }
    let f = |s: f64| ecs_entanglement_fidelity(spec, s).map(|v| v - target);
    let (mut lo, mut hi) = ROOT_BRACKET;
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::NoRoot(format!(
            "target {target} outside [{:.6}, {:.6}] reachable on sigma in [{lo:e}, {hi}]",
            f_hi + target,
            f_lo + target
        )));
    }
    for _ in 0..ROOT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < ROOT_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Squeezing in dB for `σ_η = e^{−2r}`: `−10 log₁₀ σ_η`.
pub fn squeezing_db(sigma_eta: f64) -> Result<f64> {
    if !(sigma_eta > 0.0 && sigma_eta <= 1.0) {
        return Err(Error::domain("sigma_eta", sigma_eta, "0 < sigma_eta <= 1"));
    }
    Ok(-10.0 * sigma_eta.log10())
}

/// Inverse of [`squeezing_db`].
pub fn sigma_from_db(db: f64) -> Result<f64> {
    if !(db >= 0.0 && db.is_finite()) {
        return Err(Error::domain("db", db, "finite and >= 0"));
    }
    Ok(10f64.powf(-db / 10.0))
}

/// `σ = 1/F̄ − 1`, inverting the coherent-state fidelity.
pub fn sigma_from_average_fidelity(fbar: f64) -> Result<f64> {
    if !(fbar > 0.0 && fbar <= 1.0) {
        return Err(Error::domain("fbar", fbar, "0 < fbar <= 1"));
    }
    Ok(1.0 / fbar - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// `F > 1/2`, beating classical measure-and-prepare; needs `σ < 1`.
    Classical,
    /// `F > 2/3`, beating cloning; needs `σ < 1/2`.
    NoCloning,
}

impl Threshold {
    pub const ALL: [Threshold; 2] = [Threshold::Classical, Threshold::NoCloning];

    pub fn fidelity(self) -> f64 {
        match self {
            Threshold::Classical => 0.5,
            Threshold::NoCloning => 2.0 / 3.0,
        }
    }

    /// Largest variance allowed, exclusive.
    pub fn max_sigma(self) -> f64 {
        match self {
            Threshold::Classical => 1.0,
            Threshold::NoCloning => 0.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Threshold::Classical => "F > 1/2",
            Threshold::NoCloning => "F > 2/3",
        }
    }

    /// Strict comparison on the variance.
    pub fn passes(self, sigma: f64) -> bool {
        sigma < self.max_sigma()
    }
}

/// True when the budget is at or above the unit variance of an unentangled
/// resource (`η = 0` gives exactly `σ_η = 1`).
pub fn is_quantum_duty(total_sigma: f64) -> bool {
    total_sigma >= 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn squeezing_examples() {
        assert_eq!(sigma_from_squeezing(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(sigma_from_squeezing(0.5).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert!(sigma_from_squeezing(0.999).unwrap() < 0.002);
        assert!(sigma_from_squeezing(1.0).is_err());
        assert!(sigma_from_squeezing(-0.1).is_err());
    }

    #[test]
    fn detector_examples() {
        assert_eq!(sigma_from_detector(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(sigma_from_detector(std::f64::consts::FRAC_1_SQRT_2).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma_from_detector(0.9).unwrap(), 0.234568, epsilon = 1e-6);
        assert!(sigma_from_detector(0.0).is_err());
    }

    #[test]
    fn budget_totals() {
        let b = NoiseBudget::from_physical(0.1, 0.5, 0.9, 0.05).unwrap();
        assert_abs_diff_eq!(b.total(), 0.1 + 1.0 / 3.0 + 0.19 / 0.81 + 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(b.total(), 0.718, epsilon = 5e-4);
        let duty = NoiseBudget::from_physical(0.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(duty.total(), 1.0);
        assert!(!Threshold::Classical.passes(duty.total()));
        assert!(is_quantum_duty(duty.total()));
        assert!(NoiseBudget::new(-1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(coherent_entanglement_fidelity(0.0).unwrap(), 1.0);
        assert_eq!(coherent_entanglement_fidelity(1.0).unwrap(), 0.5);
        assert_eq!(coherent_entanglement_fidelity(0.5).unwrap(), 2.0 / 3.0);
        let spec = EcsSpec::symmetric(2.0).unwrap();
        assert_eq!(ecs_entanglement_fidelity(&spec, 0.0).unwrap(), 1.0);
        let want = 0.5 / 1.1 * (1.0 + (-16.0 * 0.1 / 1.1f64).exp());
        assert_abs_diff_eq!(ecs_entanglement_fidelity(&spec, 0.1).unwrap(), want, epsilon = 1e-15);
        assert_abs_diff_eq!(ecs_entanglement_fidelity(&spec, 0.1).unwrap(), 0.5608, epsilon = 2e-4);
        let far = EcsSpec::symmetric(10.0).unwrap();
        assert_abs_diff_eq!(ecs_entanglement_fidelity(&far, 1.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(ecs_entanglement_fidelity(&far, 0.01).unwrap(), 0.5045, epsilon = 1e-4);
    }

    #[test]
    fn degenerate_spec_rejected() {
        let a = ComplexAmplitude::new(1.0, 1.0);
        assert!(matches!(EcsSpec::new(a, a), Err(Error::DegenerateEcs { .. })));
    }

    #[test]
    fn required_sigma_examples() {
        let s2 = required_sigma_for_ecs_fidelity(&EcsSpec::symmetric(2.0).unwrap(), 0.5).unwrap();
        // At target 1/2 the condition reduces to e^{−16σ/(1+σ)} = σ.
        assert_abs_diff_eq!((-16.0 * s2 / (1.0 + s2)).exp(), s2, epsilon = 1e-11);
        assert_abs_diff_eq!(s2, 0.140, epsilon = 1e-3);
        assert_abs_diff_eq!(squeezing_db(s2).unwrap(), 8.5, epsilon = 0.1);
        let s10 = required_sigma_for_ecs_fidelity(&EcsSpec::symmetric(10.0).unwrap(), 0.5).unwrap();
        assert_abs_diff_eq!((-400.0 * s10 / (1.0 + s10)).exp(), s10, epsilon = 1e-11);
        assert_abs_diff_eq!(s10, 0.0113, epsilon = 5e-4);
        assert_abs_diff_eq!(squeezing_db(s10).unwrap(), 19.5, epsilon = 0.1);
    }

    #[test]
    fn unreachable_target_has_no_root() {
        let spec = EcsSpec::symmetric(2.0).unwrap();
        assert!(matches!(required_sigma_for_ecs_fidelity(&spec, 0.05), Err(Error::NoRoot(_))));
        assert!(required_sigma_for_ecs_fidelity(&spec, 1.0).is_err());
        let tiny = required_sigma_for_ecs_fidelity(&spec, 0.99).unwrap();
        assert!(tiny > 0.0 && tiny < 2e-3);
        assert_abs_diff_eq!(ecs_entanglement_fidelity(&spec, tiny).unwrap(), 0.99, epsilon = 1e-9);
    }

    #[test]
    fn db_examples() {
        assert_eq!(squeezing_db(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(squeezing_db(0.140).unwrap(), 8.539, epsilon = 1e-3);
        assert_abs_diff_eq!(sigma_from_db(19.5).unwrap(), 0.0112, epsilon = 1e-4);
        assert!(squeezing_db(0.0).is_err());
        assert!(squeezing_db(1.5).is_err());
    }

    #[test]
    fn average_fidelity_inversion() {
        assert_eq!(sigma_from_average_fidelity(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(sigma_from_average_fidelity(0.58).unwrap(), 0.724, epsilon = 1e-3);
        assert_eq!(sigma_from_average_fidelity(0.5).unwrap(), 1.0);
        assert!(sigma_from_average_fidelity(0.0).is_err());
    }

    #[test]
    fn mean_photon_numbers() {
        let spec = EcsSpec::symmetric(2.0).unwrap();
        assert_eq!(spec.mean_photon_number_approx(), 4.0);
        let e = (-16.0f64).exp();
        assert_abs_diff_eq!(spec.mean_photon_number_exact(), 4.0 * (1.0 + e) / (1.0 - e), epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn ecs_below_coherent(sigma in 1e-6f64..4.0, alpha in 0.1f64..6.0) {
            let spec = EcsSpec::symmetric(alpha).unwrap();
            prop_assert!(ecs_entanglement_fidelity(&spec, sigma).unwrap() < coherent_entanglement_fidelity(sigma).unwrap());
        }

        #[test]
        // Bounded so the separation term stays above rounding level.
        fn ecs_decreasing(s1 in 1e-4f64..1.0, ds in 1e-3f64..1.0, a1 in 0.2f64..2.5, da in 0.05f64..2.0) {
            let spec = EcsSpec::symmetric(a1).unwrap();
            let wider = EcsSpec::symmetric(a1 + da).unwrap();
            let f = ecs_entanglement_fidelity(&spec, s1).unwrap();
            prop_assert!(ecs_entanglement_fidelity(&spec, s1 + ds).unwrap() < f);
            prop_assert!(ecs_entanglement_fidelity(&wider, s1).unwrap() < f);
        }

        #[test]
        fn solver_round_trip(target in 0.3f64..0.95, alpha in 0.5f64..10.0) {
            let spec = EcsSpec::symmetric(alpha).unwrap();
            match required_sigma_for_ecs_fidelity(&spec, target) {
                Ok(s) => prop_assert!((ecs_entanglement_fidelity(&spec, s).unwrap() - target).abs() < 1e-9),
                Err(Error::NoRoot(_)) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn db_round_trip(sigma in 1e-6f64..=1.0) {
            let back = sigma_from_db(squeezing_db(sigma).unwrap()).unwrap();
            prop_assert!((back - sigma).abs() <= 1e-12 * sigma.max(1e-3));
        }

        #[test]
        fn phase_only_dependence_on_separation(r in 0.1f64..5.0, t1 in 0.0f64..6.3, t2 in 0.0f64..6.3, sigma in 0.0f64..2.0) {
            let a = EcsSpec::new(ComplexAmplitude::from_polar(r, t1), ComplexAmplitude::from_polar(r, t1 + std::f64::consts::PI)).unwrap();
            let b = EcsSpec::new(ComplexAmplitude::from_polar(r, t2), ComplexAmplitude::from_polar(r, t2 + std::f64::consts::PI)).unwrap();
            prop_assert!((ecs_entanglement_fidelity(&a, sigma).unwrap() - ecs_entanglement_fidelity(&b, sigma).unwrap()).abs() < 1e-12);
        }
    }
}
