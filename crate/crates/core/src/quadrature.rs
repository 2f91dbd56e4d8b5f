//! Quadrature rules for the standard complex Gaussian measure
//! `d²t e^{−|t|²}/π`, under which `⟨|t|²⟩ = 1`.
//!
//! A grid is rescaled to variance `σ` (and shifted to a center `c`) by
//! `z = c + √σ t`, which turns it into a rule for `d²z e^{−|z−c|²/σ}/(πσ)`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussHermite, GaussLaguerre};
use serde::{Deserialize, Serialize};

use crate::fock::ComplexAmplitude;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Product of one-dimensional Gauss–Hermite rules in Re and Im; up to `order²` nodes.
    GaussHermiteCartesian,
    /// Gauss–Laguerre in `|t|²` times a `2·order`-point trapezoid in the angle.
    PolarGaussLaguerre,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    scheme: QuadratureScheme,
    order: usize,
    nodes: Vec<(ComplexAmplitude, f64)>,
}

/// Relative weight below which one-dimensional nodes are dropped.
///
/// Weights from the eigenvector solve bottom out near 1e-32 instead of
/// decaying like `e^{−x²}`, so the outermost nodes of high-order rules carry
/// rounding noise rather than mass. Multiplied by a growing integrand that
/// noise can dominate the sum.
pub const MIN_RELATIVE_WEIGHT: f64 = 1e-25;

fn reliable(pairs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let total: f64 = pairs.iter().map(|(_, w)| w).sum();
    pairs
        .iter()
        .copied()
        .filter(|(_, w)| *w >= MIN_RELATIVE_WEIGHT * total)
        .collect()
}

impl QuadratureGrid {
    pub fn new(scheme: QuadratureScheme, order: usize) -> Result<Self> {
        let n = NonZeroUsize::new(order).ok_or_else(|| Error::domain("order", 0.0, ">= 1"))?;
        let mut nodes = match scheme {
            QuadratureScheme::GaussHermiteCartesian => {
                let rule = GaussHermite::new(n);
                let pairs = reliable(rule.as_node_weight_pairs());
                let mut out = Vec::with_capacity(pairs.len() * pairs.len());
                for &(x, wx) in &pairs {
                    for &(y, wy) in &pairs {
                        out.push((ComplexAmplitude::new(x, y), wx * wy));
                    }
                }
                out
            }
            QuadratureScheme::PolarGaussLaguerre => {
                let rule = GaussLaguerre::new(n, FiniteAboveNegOneF64::default());
                let angles = 2 * order;
                let mut out = Vec::with_capacity(order * angles);
                for (u, wu) in reliable(rule.as_node_weight_pairs()) {
                    let r = u.sqrt();
                    for j in 0..angles {
                        let theta = 2.0 * PI * j as f64 / angles as f64;
                        out.push((ComplexAmplitude::from_polar(r, theta), wu));
                    }
                }
                out
            }
        };
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        for (_, w) in &mut nodes {
            *w /= total;
        }
        Ok(Self {
            scheme,
            order,
            nodes,
        })
    }

    pub fn gauss_hermite(order: usize) -> Result<Self> {
        Self::new(QuadratureScheme::GaussHermiteCartesian, order)
    }

    pub fn polar(order: usize) -> Result<Self> {
        Self::new(QuadratureScheme::PolarGaussLaguerre, order)
    }

    /// Same scheme at another order.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        Self::new(self.scheme, order)
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes `t` and weights for the unit-variance measure; weights sum to one.
    pub fn nodes(&self) -> &[(ComplexAmplitude, f64)] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Drops nodes whose weight is below `min_weight` (weights are not renormalized).
    pub fn pruned(&self, min_weight: f64) -> Self {
        Self {
            scheme: self.scheme,
            order: self.order,
            nodes: self
                .nodes
                .iter()
                .copied()
                .filter(|(_, w)| *w >= min_weight)
                .collect(),
        }
    }

    /// Nodes mapped to `z = center + √variance · t`.
    pub fn scaled(
        &self,
        variance: f64,
        center: ComplexAmplitude,
    ) -> impl Iterator<Item = (ComplexAmplitude, f64)> + '_ {
        let s = variance.sqrt();
        self.nodes.iter().map(move |(t, w)| {
            (
                ComplexAmplitude::new(center.re + s * t.re, center.im + s * t.im),
                *w,
            )
        })
    }

    /// `∫ d²z e^{−|z|²/σ}/(πσ) f(z)`.
    pub fn integrate(&self, variance: f64, mut f: impl FnMut(ComplexAmplitude) -> f64) -> f64 {
        self.scaled(variance, ComplexAmplitude::ZERO)
            .map(|(z, w)| w * f(z))
            .sum()
    }

    /// Largest `|t|` among the nodes.
    pub fn max_radius(&self) -> f64 {
        self.nodes.iter().map(|(t, _)| t.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_one() {
        for grid in [QuadratureGrid::gauss_hermite(20).unwrap(), QuadratureGrid::polar(12).unwrap()] {
            let total: f64 = grid.nodes().iter().map(|(_, w)| w).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert!(grid.nodes().iter().all(|(_, w)| *w >= 0.0));
        }
    }

    #[test]
    fn second_moment_is_variance() {
        for grid in [QuadratureGrid::gauss_hermite(8).unwrap(), QuadratureGrid::polar(8).unwrap()] {
            assert_abs_diff_eq!(grid.integrate(0.5, |z| z.norm_sqr()), 0.5, epsilon = 1e-13);
            assert_abs_diff_eq!(grid.integrate(0.5, |z| z.re), 0.0, epsilon = 1e-13);
            // ⟨|z|⁴⟩ = 2σ² for a complex Gaussian.
            assert_abs_diff_eq!(grid.integrate(0.5, |z| z.norm_sqr().powi(2)), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussian_transform() {
        // ∫ e^{−|z|²/σ}/(πσ) e^{−|z|²} = 1/(1+σ)
        let grid = QuadratureGrid::gauss_hermite(20).unwrap();
        for sigma in [0.01, 0.1, 0.5, 1.0] {
            let got = grid.integrate(sigma, |z| (-z.norm_sqr()).exp());
            assert_abs_diff_eq!(got, 1.0 / (1.0 + sigma), epsilon = 1e-9);
        }
        let polar = QuadratureGrid::polar(20).unwrap();
        assert_abs_diff_eq!(polar.integrate(1.0, |z| (-z.norm_sqr()).exp()), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn high_order_tail_nodes_dropped() {
        let grid = QuadratureGrid::gauss_hermite(256).unwrap();
        assert!(grid.len() < 256 * 256);
        assert!(grid.nodes().iter().all(|(_, w)| *w > 1e-60));
        // e^{2 Re t·c} has mean e^{c²}; spurious tail weights would swamp it.
        let c: f64 = 2.0;
        let got: f64 = grid.nodes().iter().map(|(t, w)| w * (2.0 * c * t.re).exp()).sum();
        assert_abs_diff_eq!(got / (c * c).exp(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(QuadratureGrid::gauss_hermite(0).is_err());
    }
}
