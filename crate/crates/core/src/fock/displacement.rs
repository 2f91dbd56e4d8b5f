//! Displacement-operator matrix elements in the number basis.
//!
//! For `m >= n`
//!
//! ```text
//! ⟨m|D(z)|n⟩ = sqrt(n!/m!) z^(m−n) e^(−|z|²/2) L_n^(m−n)(|z|²)
//! ```
//!
//! and `⟨m|D(z)|n⟩ = sqrt(m!/n!) (−z̄)^(n−m) e^(−|z|²/2) L_m^(n−m)(|z|²)` for
//! `m < n`. Each diagonal `m − n = const` is filled with one upward
//! associated-Laguerre recurrence; prefactors are combined in log space so
//! that large displacements against high levels neither overflow nor
//! underflow prematurely.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ln_factorials, ComplexAmplitude, FockSpace, Operator};
use crate::{Error, Result, C64};

const RESCALE: f64 = 1e150;

/// Rectangular block `⟨m|D(z)|n⟩` for `m < rows`, `n < cols`.
///
/// The block is exact element by element: it is the projection of the
/// infinite-dimensional operator, not the exponential of a truncated generator.
pub fn displacement_block(z: ComplexAmplitude, rows: usize, cols: usize) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return out;
    }
    if z.re == 0.0 && z.im == 0.0 {
        for k in 0..rows.min(cols) {
            out[(k, k)] = C64::new(1.0, 0.0);
        }
        return out;
    }

    let x = z.norm_sqr();
    let ln_r = z.norm().ln();
    let theta = z.im.atan2(z.re);
    let lnf = ln_factorials(rows.max(cols));

    // Lower triangle (m = n + d): phase e^{i d θ}.
    for d in 0..rows {
        let len = (rows - d).min(cols);
        let step = Complex64::from_polar(1.0, d as f64 * theta);
        laguerre_diagonal(x, d, len, ln_r, &lnf, |n, v| {
            out[(n + d, n)] = step * v;
        });
    }
    // Upper triangle (n = m + d): phase of (−z̄)^d, i.e. e^{i d (π − θ)}.
    for d in 1..cols {
        let len = (cols - d).min(rows);
        let step = Complex64::from_polar(1.0, d as f64 * (std::f64::consts::PI - theta));
        laguerre_diagonal(x, d, len, ln_r, &lnf, |m, v| {
            out[(m, m + d)] = step * v;
        });
    }
    out
}

/// Emits `sqrt(k!/(k+d)!) r^d e^{−x/2} L_k^(d)(x)` for `k = 0..len`.
fn laguerre_diagonal(
    x: f64,
    d: usize,
    len: usize,
    ln_r: f64,
    lnf: &[f64],
    mut emit: impl FnMut(usize, f64),
) {
    let df = d as f64;
    let base = df * ln_r - 0.5 * x;
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    let mut log_scale = 0.0_f64;
    for k in 0..len {
        if k == 1 {
            prev = cur;
            cur = 1.0 + df - x;
        } else if k > 1 {
            let kf = k as f64;
            let next = ((2.0 * kf - 1.0 + df - x) * cur - (kf - 1.0 + df) * prev) / kf;
            prev = cur;
            cur = next;
        }
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        let value = if cur == 0.0 {
            0.0
        } else {
            let ln_mag = 0.5 * (lnf[k] - lnf[k + d]) + base + log_scale + cur.abs().ln();
            cur.signum() * ln_mag.exp()
        };
        emit(k, value);
    }
}

/// `D(z) = exp(z a† − z̄ a)` on a single-mode truncated space.
pub fn displacement_operator(z: ComplexAmplitude, space: FockSpace) -> Result<Operator> {
    space.expect_modes(1, "displacement_operator")?;
    let d = space.mode_dim();
    let m = displacement_block(z, d, d);
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidState(format!(
            "non-finite displacement element for z = ({}, {})",
            z.re, z.im
        )));
    }
    Ok(Operator::from_parts(space, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Brute-force oracle: D(z) = e^{-|z|²/2} e^{z a†} e^{-z̄ a} (normal ordering)
    // summed as a double series with exact factorial arithmetic.
    fn normal_ordered_element(z: C64, m: usize, n: usize) -> C64 {
        let fact = |k: usize| (1..=k).fold(1.0_f64, |a, b| a * b as f64);
        let mut acc = C64::new(0.0, 0.0);
        // ⟨m| e^{z a†} e^{-z̄ a} |n⟩ = Σ_k ⟨m|(z a†)^{m-k}/(m-k)! |k⟩⟨k| (-z̄ a)^{n-k}/(n-k)! |n⟩
        for k in 0..=m.min(n) {
            let up = z.powu((m - k) as u32) / fact(m - k) * (fact(m) / fact(k)).sqrt();
            let down = (-z.conj()).powu((n - k) as u32) / fact(n - k) * (fact(n) / fact(k)).sqrt();
            acc += up * down;
        }
        acc * (-0.5 * z.norm_sqr()).exp()
    }

    #[test]
    fn zero_displacement_is_identity() {
        let op = displacement_operator(ComplexAmplitude::ZERO, FockSpace::single(12)).unwrap();
        assert_eq!(op.elements(), &DMatrix::<C64>::identity(13, 13));
    }

    #[test]
    fn vacuum_element() {
        let z = ComplexAmplitude::new(1.0, 0.0);
        let op = displacement_operator(z, FockSpace::single(10)).unwrap();
        assert_abs_diff_eq!(op.elements()[(0, 0)].re, (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(op.elements()[(0, 0)].re, 0.60653, epsilon = 1e-5);
    }

    #[test]
    fn matches_normal_ordered_series() {
        let z = ComplexAmplitude::new(0.7, -1.1);
        let block = displacement_block(z, 15, 15);
        for m in 0..15 {
            for n in 0..15 {
                let want = normal_ordered_element(z.to_c64(), m, n);
                let got = block[(m, n)];
                assert!((got - want).norm() < 1e-12, "({m},{n}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn rectangular_block_agrees_with_square() {
        let z = ComplexAmplitude::new(-1.3, 0.4);
        let sq = displacement_block(z, 30, 30);
        let rect = displacement_block(z, 7, 30);
        for m in 0..7 {
            for n in 0..30 {
                assert!((sq[(m, n)] - rect[(m, n)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn large_displacement_against_high_levels() {
        // Columns of an exact unitary have unit norm; with 2500 rows the
        // column for |n<=5⟩ under |z|≈30 is fully captured.
        let z = ComplexAmplitude::new(21.0, 21.0);
        let block = displacement_block(z, 2500, 6);
        for n in 0..6 {
            let norm: f64 = block.column(n).iter().map(|c| c.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
        }
    }
}
