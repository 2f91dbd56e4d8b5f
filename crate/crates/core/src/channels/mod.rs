//! Gaussian displacement-noise channel and the direct teleportation model.
//!
//! `E_σ(ρ) = ∫ d²z/(πσ) exp(−|z|²/σ) D(z) ρ D†(z)` is realized as the
//! random-unitary channel `Σ_k w_k D(z_k) ρ D†(z_k)` on the nodes of a
//! [`QuadratureGrid`] rescaled to variance `σ/(1+σ)` and reweighted to the
//! noise density (see [`GaussianNoiseChannel::kraus_terms`]). The variance is
//! in units of squared coherent amplitude; vacuum noise is `σ = 1/2`.

pub mod teleport;

use nalgebra::DMatrix;

use crate::fock::{displacement_block, ComplexAmplitude, DensityMatrix, FockSpace, Tolerances};
use crate::quadrature::QuadratureGrid;
use crate::reduce::ordered_fold;
use crate::{Error, Result, C64};

pub use teleport::{simulate_teleportation_channel, Measurement, TeleportationOutput, TeleportationSetup};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNoiseChannel {
    sigma: f64,
    grid: QuadratureGrid,
    trace_tol: f64,
}

/// A channel output after trace renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub state: DensityMatrix,
    /// Trace lost at the cutoff before renormalization, relative to the
    /// total Kraus weight.
    pub trace_deficit: f64,
}

impl GaussianNoiseChannel {
    pub fn new(sigma: f64, grid: QuadratureGrid) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::domain("sigma", sigma, "finite and >= 0"));
        }
        Ok(Self {
            sigma,
            grid,
            trace_tol: Tolerances::default().channel_trace,
        })
    }

    /// Channel on the default Cartesian Gauss–Hermite grid of the given order.
    pub fn gauss_hermite(sigma: f64, order: usize) -> Result<Self> {
        Self::new(sigma, QuadratureGrid::gauss_hermite(order)?)
    }

    pub fn with_trace_tolerance(mut self, tol: f64) -> Self {
        self.trace_tol = tol;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn trace_tolerance(&self) -> f64 {
        self.trace_tol
    }

    /// Same channel with the grid order changed.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        Ok(Self {
            sigma: self.sigma,
            grid: self.grid.with_order(order)?,
            trace_tol: self.trace_tol,
        })
    }

    /// Displacements `z_k` and weights `w_k` of the Kraus decomposition.
    ///
    /// Matrix elements of `D(z) ρ D†(z)` between low Fock levels carry an
    /// `e^{−|z|²}` envelope, so the nodes follow the combined Gaussian of
    /// variance `σ/(1+σ)` and the weights absorb the ratio to the noise
    /// density. What remains is polynomial in `z`, which Gauss–Hermite
    /// integrates exactly up to its degree.
    pub fn kraus_terms(&self) -> impl Iterator<Item = (ComplexAmplitude, f64)> + '_ {
        let c = self.sigma / (1.0 + self.sigma);
        let s = c.sqrt();
        self.grid.nodes().iter().map(move |(t, w)| {
            let z = ComplexAmplitude::new(s * t.re, s * t.im);
            (z, w * (c * t.norm_sqr()).exp() / (1.0 + self.sigma))
        })
    }

    pub fn is_identity(&self) -> bool {
        self.sigma == 0.0
    }

    /// `E_σ(ρ)` on a single mode.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<ChannelOutput> {
        let space = rho.space();
        space.expect_modes(1, "apply_noise")?;
        if self.is_identity() {
            return Ok(ChannelOutput {
                state: rho.clone(),
                trace_deficit: 0.0,
            });
        }
        let d = space.mode_dim();
        let nodes: Vec<_> = self.kraus_terms().collect();
        let e = rho.elements();
        let acc = ordered_fold(
            nodes.len(),
            || DMatrix::<C64>::zeros(d, d),
            |k, acc| {
                let (z, w) = nodes[k];
                let dz = displacement_block(z, d, d);
                *acc += (&dz * e * dz.adjoint()) * C64::new(w, 0.0);
            },
            |a, b| *a += b,
        );
        self.finish(space, acc, rho.trace() * total_weight(&nodes), "noise channel")
    }

    /// `(I ⊗ E_σ)(ρ)` or `(E_σ ⊗ I)(ρ)` on a two-mode state, acting on `target_mode`.
    pub fn apply_two_mode(&self, rho: &DensityMatrix, target_mode: usize) -> Result<ChannelOutput> {
        let space = rho.space();
        space.expect_modes(2, "apply_noise_two_mode")?;
        if target_mode > 1 {
            return Err(Error::domain("target_mode", target_mode as f64, "0 or 1"));
        }
        if self.is_identity() {
            return Ok(ChannelOutput {
                state: rho.clone(),
                trace_deficit: 0.0,
            });
        }
        let d = space.mode_dim();
        let input = if target_mode == 0 {
            swap_modes(rho.elements(), d)
        } else {
            rho.elements().clone()
        };
        let nodes: Vec<_> = self.kraus_terms().collect();
        let mut acc = ordered_fold(
            nodes.len(),
            || DMatrix::<C64>::zeros(d * d, d * d),
            |k, acc| {
                let (z, w) = nodes[k];
                let dz = displacement_block(z, d, d);
                *acc += conjugate_second_mode(&dz, &input, d) * C64::new(w, 0.0);
            },
            |a, b| *a += b,
        );
        if target_mode == 0 {
            acc = swap_modes(&acc, d);
        }
        self.finish(space, acc, rho.trace() * total_weight(&nodes), "two-mode noise channel")
    }

    fn finish(
        &self,
        space: FockSpace,
        acc: DMatrix<C64>,
        expected_trace: f64,
        context: &str,
    ) -> Result<ChannelOutput> {
        let out = DensityMatrix::unnormalized(space, acc)?;
        let trace = out.trace();
        let deficit = 1.0 - trace / expected_trace;
        if deficit > self.trace_tol {
            return Err(Error::CutoffTooSmall {
                context: format!("{context} with sigma = {}", self.sigma),
                cutoff: space.cutoff(),
                lost: deficit,
                tolerance: self.trace_tol,
            });
        }
        Ok(ChannelOutput {
            state: out.renormalized(),
            trace_deficit: deficit,
        })
    }
}

/// Sum of the Kraus weights. It differs from one by the quadrature error on
/// the constant function, which is not a loss at the cutoff.
pub(crate) fn total_weight(nodes: &[(ComplexAmplitude, f64)]) -> f64 {
    nodes.iter().map(|(_, w)| w).sum()
}

/// `(I ⊗ U) ρ (I ⊗ U)†` with the flat index `a·d + b`.
fn conjugate_second_mode(u: &DMatrix<C64>, rho: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    let n = d * d;
    let mut left = DMatrix::<C64>::zeros(n, n);
    for a in 0..d {
        let block = u * rho.rows(a * d, d);
        left.rows_mut(a * d, d).copy_from(&block);
    }
    let ud = u.adjoint();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for a in 0..d {
        let block = left.columns(a * d, d) * &ud;
        out.columns_mut(a * d, d).copy_from(&block);
    }
    out
}

/// Reorders a two-mode operator from `(a, b)` to `(b, a)` indexing.
fn swap_modes(m: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    let perm = |i: usize| (i % d) * d + i / d;
    DMatrix::from_fn(d * d, d * d, |i, j| m[(perm(i), perm(j))])
}

pub fn apply_noise(channel: &GaussianNoiseChannel, rho: &DensityMatrix) -> Result<ChannelOutput> {
    channel.apply(rho)
}

pub fn apply_noise_two_mode(
    channel: &GaussianNoiseChannel,
    rho: &DensityMatrix,
    target_mode: usize,
) -> Result<ChannelOutput> {
    channel.apply_two_mode(rho, target_mode)
}

/// Variance of `E_{σ1} ∘ E_{σ2}`.
///
/// Gaussian displacement channels compose by convolution of their weights,
/// so `E_{σ1} ∘ E_{σ2} = E_{σ1 + σ2}`.
pub fn compose_noise(sigma1: f64, sigma2: f64) -> Result<f64> {
    if !(sigma1 >= 0.0) {
        return Err(Error::domain("sigma1", sigma1, ">= 0"));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::domain("sigma2", sigma2, ">= 0"));
    }
    Ok(sigma1 + sigma2)
}
