use nalgebra::DVector;

use super::{ln_factorials, ComplexAmplitude, FockSpace, FockVector, Tolerances};
use crate::{Error, Result, C64};

/// Untruncated coherent-state coefficients `e^{−|α|²/2} αⁿ/√(n!)` for
/// `n = 0..=cutoff`, plus the exact Poisson tail beyond the cutoff.
pub(crate) fn coherent_coefficients(alpha: ComplexAmplitude, cutoff: usize) -> (DVector<C64>, f64) {
    let x = alpha.norm_sqr();
    let mut c = DVector::zeros(cutoff + 1);
    if x == 0.0 {
        c[0] = C64::new(1.0, 0.0);
        return (c, 0.0);
    }
    let lnf = ln_factorials(cutoff + 1);
    let ln_r = alpha.norm().ln();
    let theta = alpha.im.atan2(alpha.re);
    for n in 0..=cutoff {
        let nf = n as f64;
        let mag = (-0.5 * x + nf * ln_r - 0.5 * lnf[n]).exp();
        c[n] = C64::from_polar(mag, nf * theta);
    }
    (c, poisson_tail(x, cutoff))
}

/// `Σ_{n > cutoff} e^{−x} xⁿ/n!`, summed directly rather than as `1 − Σ`.
fn poisson_tail(x: f64, cutoff: usize) -> f64 {
    let lnf_next = ln_factorials(cutoff + 1)[cutoff + 1];
    let mut n = cutoff + 1;
    let mut term = (-x + n as f64 * x.ln() - lnf_next).exp();
    let mut sum = 0.0;
    loop {
        sum += term;
        n += 1;
        term *= x / n as f64;
        if (n as f64 > x && term < 1e-18 * sum) || term < 1e-300 {
            break;
        }
    }
    sum
}

/// Truncated, renormalized coherent state `|α⟩`.
///
/// Fails with `CutoffTooSmall` when the Poisson tail beyond the cutoff
/// exceeds `tol.tail`; the tail is kept on the returned vector.
pub fn coherent_state(
    alpha: ComplexAmplitude,
    space: FockSpace,
    tol: &Tolerances,
) -> Result<FockVector> {
    space.expect_modes(1, "coherent_state")?;
    let (c, tail) = coherent_coefficients(alpha, space.cutoff());
    if tail > tol.tail {
        return Err(Error::CutoffTooSmall {
            context: format!("coherent state |alpha| = {:.4}", alpha.norm()),
            cutoff: space.cutoff(),
            lost: tail,
            tolerance: tol.tail,
        });
    }
    FockVector::new(space, c, tail)
}

/// Two-mode squeezed state `√(1−η²) Σ ηⁿ |n⟩|n⟩`, truncated and renormalized.
pub fn two_mode_squeezed_state(eta: f64, space: FockSpace, tol: &Tolerances) -> Result<FockVector> {
    space.expect_modes(2, "two_mode_squeezed_state")?;
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::domain("eta", eta, "0 <= eta < 1"));
    }
    let d = space.mode_dim();
    let tail = eta.powi(2 * d as i32);
    if tail > tol.tail {
        return Err(Error::CutoffTooSmall {
            context: format!("two-mode squeezed state eta = {eta}"),
            cutoff: space.cutoff(),
            lost: tail,
            tolerance: tol.tail,
        });
    }
    let pref = (1.0 - eta * eta).sqrt();
    let mut c = DVector::zeros(space.dim());
    for n in 0..d {
        c[n * d + n] = C64::new(pref * eta.powi(n as i32), 0.0);
    }
    FockVector::new(space, c, tail)
}

fn ecs_raw(alpha: ComplexAmplitude, beta: ComplexAmplitude, space: FockSpace) -> DVector<C64> {
    let (a, _) = coherent_coefficients(alpha, space.cutoff());
    let (b, _) = coherent_coefficients(beta, space.cutoff());
    let d = space.mode_dim();
    DVector::from_fn(d * d, |i, _| {
        let (ia, ib) = (i / d, i % d);
        a[ia] * b[ib] - b[ia] * a[ib]
    })
}

/// Norm of the truncated, unnormalized `|α⟩|β⟩ − |β⟩|α⟩`.
///
/// Converges to `1/N = √(2 − 2e^{−|α−β|²})` as the cutoff grows.
pub fn ecs_unnormalized_norm(
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    space: FockSpace,
) -> Result<f64> {
    space.expect_modes(2, "ecs_unnormalized_norm")?;
    Ok(ecs_raw(alpha, beta, space).norm())
}

/// Antisymmetric entangled coherent state `N(|α⟩|β⟩ − |β⟩|α⟩)`.
///
/// The truncation loss is measured against the closed-form normalization
/// `N = (2 − 2e^{−|α−β|²})^{−1/2}`.
pub fn ecs_state(
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    space: FockSpace,
    tol: &Tolerances,
) -> Result<FockVector> {
    space.expect_modes(2, "ecs_state")?;
    let separation = (alpha - beta).norm();
    if separation < tol.separation {
        return Err(Error::DegenerateEcs { separation });
    }
    let raw = ecs_raw(alpha, beta, space);
    // 2 − 2e^{−s²} via expm1 keeps precision at small separation.
    let exact_norm_sqr = -2.0 * (-(separation * separation)).exp_m1();
    let tail = (1.0 - raw.norm_squared() / exact_norm_sqr).max(0.0);
    if tail > tol.tail {
        return Err(Error::CutoffTooSmall {
            context: format!(
                "entangled coherent state |alpha| = {:.4}, |beta| = {:.4}",
                alpha.norm(),
                beta.norm()
            ),
            cutoff: space.cutoff(),
            lost: tail,
            tolerance: tol.tail,
        });
    }
    FockVector::new(space, raw, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn vacuum_from_zero_amplitude() {
        let v = coherent_state(ComplexAmplitude::ZERO, FockSpace::single(5), &tol()).unwrap();
        assert_eq!(v.coefficients()[0], C64::new(1.0, 0.0));
        assert!(v.coefficients().iter().skip(1).all(|c| c.norm() == 0.0));
    }

    #[test]
    fn coherent_mean_photon_number() {
        let v = coherent_state(ComplexAmplitude::real(2.0), FockSpace::single(40), &tol()).unwrap();
        assert_abs_diff_eq!(v.mean_photon_number().unwrap(), 4.0, epsilon = 1e-9);
    }

    #[test]
    fn coherent_overlap_closed_form() {
        let s = FockSpace::single(40);
        let a = coherent_state(ComplexAmplitude::real(2.0), s, &tol()).unwrap();
        let b = coherent_state(ComplexAmplitude::real(-2.0), s, &tol()).unwrap();
        let ov = a.inner(&b).unwrap();
        assert_abs_diff_eq!(ov.re, (-8.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(ov.re, 3.3546e-4, epsilon = 1e-8);
        assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_cutoff_too_small() {
        let err = coherent_state(ComplexAmplitude::real(2.0), FockSpace::single(8), &tol()).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { .. }));
    }

    #[test]
    fn poisson_tail_matches_complement() {
        // Independent check: 1 − Σ_{n≤N} p_n for a case where cancellation is harmless.
        let x: f64 = 3.0;
        let head: f64 = (0..=5).map(|n| (-x).exp() * x.powi(n) / (1..=n).product::<i32>().max(1) as f64).sum();
        assert_abs_diff_eq!(poisson_tail(x, 5), 1.0 - head, epsilon = 1e-14);
    }

    #[test]
    fn squeezed_schmidt_coefficients() {
        let s = FockSpace::two_mode(40);
        let v = two_mode_squeezed_state(0.5, s, &tol()).unwrap();
        let m = v.as_matrix().unwrap();
        assert_abs_diff_eq!(m[(0, 0)].norm_sqr(), 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 1)].norm_sqr(), 0.1875, epsilon = 1e-14);
        assert_abs_diff_eq!(v.tail_mass(), 0.5f64.powi(82), epsilon = 1e-30);
    }

    #[test]
    fn squeezed_zero_is_vacuum_pair() {
        let v = two_mode_squeezed_state(0.0, FockSpace::two_mode(3), &tol()).unwrap();
        assert_eq!(v.coefficients()[0], C64::new(1.0, 0.0));
        assert!(two_mode_squeezed_state(1.0, FockSpace::two_mode(3), &tol()).is_err());
    }

    #[test]
    fn ecs_unnormalized_norm_matches_closed_form() {
        let s = FockSpace::two_mode(30);
        let n = ecs_unnormalized_norm(ComplexAmplitude::real(2.0), ComplexAmplitude::real(-2.0), s).unwrap();
        let exact = (2.0 - 2.0 * (-16.0f64).exp()).sqrt();
        assert_abs_diff_eq!(n, exact, epsilon = 1e-12);
        assert_abs_diff_eq!(n, 1.41421, epsilon = 1e-5);
    }

    #[test]
    fn ecs_swap_flips_sign() {
        let s = FockSpace::two_mode(32);
        let (a, b) = (ComplexAmplitude::new(2.0, 0.5), ComplexAmplitude::real(-2.0));
        let p = ecs_state(a, b, s, &tol()).unwrap();
        let q = ecs_state(b, a, s, &tol()).unwrap();
        let ov = p.inner(&q).unwrap();
        assert_abs_diff_eq!(ov.re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ov.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ecs_degenerate() {
        let a = ComplexAmplitude::real(1.0);
        let err = ecs_state(a, a, FockSpace::two_mode(10), &tol()).unwrap_err();
        assert!(matches!(err, Error::DegenerateEcs { .. }));
    }
}
