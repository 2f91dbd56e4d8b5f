//! Entanglement fidelity `F_e(ρ, E) = ⟨Γ|(I ⊗ E)(|Γ⟩⟨Γ|)|Γ⟩` of the noise
//! channel, where `|Γ⟩` purifies `ρ`.
//!
//! For a random-displacement channel this is `Σ_k w_k |⟨Γ|I ⊗ D(z_k)|Γ⟩|²`,
//! which both evaluators below use: the Fock brute force computes the
//! overlap from truncated branches, the overlap quadrature from coherent-state
//! algebra with no truncation at all.

mod purification;

use serde::{Deserialize, Serialize};

use crate::channels::{total_weight, GaussianNoiseChannel};
use crate::fock::{displacement_block, ComplexAmplitude, DensityMatrix, Tolerances};
use crate::quadrature::QuadratureGrid;
use crate::reduce::ordered_fold;
use crate::{Error, Result, C64};

pub use purification::{AncillaKind, Purification};

/// Order doublings allowed in the Fock brute force.
pub const MAX_BRUTE_REFINEMENTS: usize = 2;

/// Largest grid order the overlap quadrature refines to.
pub const MAX_OVERLAP_ORDER: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    OverlapQuadrature,
    FockBruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntFidResult {
    pub value: f64,
    pub method: Method,
    pub est_error: f64,
}

/// Returns `Σ w |⟨Γ|D|Γ⟩|²` and `Σ w ‖P D Γ‖² / Σ w` over the channel's Kraus terms.
fn branch_sandwich(gamma: &Purification, channel: &GaussianNoiseChannel) -> (f64, f64) {
    let b = gamma.branches();
    let d = gamma.space().mode_dim();
    let nodes: Vec<_> = channel.kraus_terms().collect();
    let (value, kept) = ordered_fold(
        nodes.len(),
        || (0.0, 0.0),
        |k, acc| {
            let (z, w) = nodes[k];
            let dz = displacement_block(z, d, d);
            // Row r of X is (P D ψ_r)ᵀ.
            let x = b * dz.transpose();
            let amp = b.dotc(&x);
            acc.0 += w * amp.norm_sqr();
            acc.1 += w * x.norm_squared();
        },
        |a, b| {
            a.0 += b.0;
            a.1 += b.1;
        },
    );
    (value, kept / total_weight(&nodes))
}

/// Entanglement fidelity from the truncated purification.
///
/// The channel's grid order is doubled until consecutive estimates agree to
/// 1e-9, at most [`MAX_BRUTE_REFINEMENTS`] times. The reported value comes
/// from the finest grid and `est_error` adds half the last change, the
/// state's truncation tail and the trace lost at the cutoff.
pub fn entanglement_fidelity_brute(
    gamma: &Purification,
    channel: &GaussianNoiseChannel,
) -> Result<EntFidResult> {
    if channel.is_identity() {
        return Ok(EntFidResult {
            value: 1.0,
            method: Method::FockBruteForce,
            est_error: gamma.tail_mass(),
        });
    }
    let (mut coarse, _) = branch_sandwich(gamma, channel);
    let mut order = channel.grid().order();
    let mut refinements = 0;
    let (fine, kept) = loop {
        order *= 2;
        refinements += 1;
        let (fine, kept) = branch_sandwich(gamma, &channel.with_order(order)?);
        if 0.5 * (fine - coarse).abs() <= 1e-9 || refinements == MAX_BRUTE_REFINEMENTS {
            break (fine, kept);
        }
        coarse = fine;
    };
    let deficit = (1.0 - kept).max(0.0);
    if deficit > channel.trace_tolerance() {
        return Err(Error::CutoffTooSmall {
            context: format!("entanglement fidelity at sigma = {}", channel.sigma()),
            cutoff: gamma.space().cutoff(),
            lost: deficit,
            tolerance: channel.trace_tolerance(),
        });
    }
    Ok(EntFidResult {
        value: fine,
        method: Method::FockBruteForce,
        est_error: 0.5 * (fine - coarse).abs() + gamma.tail_mass() + deficit,
    })
}

/// Log of `⟨μ|D(z)|γ⟩`.
fn ln_displaced_overlap(mu: C64, z: C64, gamma: C64) -> C64 {
    let shifted = gamma + z;
    (z * gamma.conj() - z.conj() * gamma) * 0.5 - 0.5 * mu.norm_sqr() - 0.5 * shifted.norm_sqr()
        + mu.conj() * shifted
}

/// `ln(w |⟨Ψ|D(z)|Ψ⟩|² e^{|z|²})` for `Ψ = N(|α⟩|β⟩ − |β⟩|α⟩)`, keeping all
/// four terms of
///
/// ```text
/// ⟨Ψ|D_b(z)|Ψ⟩ = N² [⟨α|D|α⟩ + ⟨β|D|β⟩ − ⟨α|β⟩⟨β|D|α⟩ − ⟨β|α⟩⟨α|D|β⟩]
/// ```
fn ln_weighted_ecs_integrand(a: C64, b: C64, ln_n2: f64, z: C64, ln_w: f64) -> f64 {
    let ln_ab = -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b;
    let half = 0.5 * z.norm_sqr();
    let terms = [
        (1.0, ln_displaced_overlap(a, z, a)),
        (1.0, ln_displaced_overlap(b, z, b)),
        (-1.0, ln_ab + ln_displaced_overlap(b, z, a)),
        (-1.0, ln_ab.conj() + ln_displaced_overlap(a, z, b)),
    ];
    let top = terms.iter().map(|(_, e)| e.re).fold(f64::NEG_INFINITY, f64::max) + half;
    let sum: C64 = terms
        .iter()
        .map(|(s, e)| (e + half - top).exp() * *s)
        .sum();
    if sum.norm_sqr() == 0.0 {
        return f64::NEG_INFINITY;
    }
    ln_w + 2.0 * (ln_n2 + top) + sum.norm_sqr().ln()
}

fn ecs_overlap_at_order(a: C64, b: C64, ln_n2: f64, sigma: f64, grid: &QuadratureGrid) -> f64 {
    // Sampling z from the Gaussian of variance σ/(1+σ) absorbs the e^{−|z|²}
    // envelope of |⟨Ψ|D|Ψ⟩|², leaving a bounded, slowly varying integrand.
    let s_eff = sigma / (1.0 + sigma);
    let nodes: Vec<_> = grid.scaled(s_eff, ComplexAmplitude::ZERO).collect();
    let total = ordered_fold(
        nodes.len(),
        || 0.0,
        |k, acc| {
            let (z, w) = nodes[k];
            if w > 0.0 {
                *acc += ln_weighted_ecs_integrand(a, b, ln_n2, z.to_c64(), w.ln()).exp();
            }
        },
        |x, y| *x += y,
    );
    total / (1.0 + sigma)
}

/// Entanglement fidelity of the ECS `N(|α⟩|β⟩ − |β⟩|α⟩)` under noise on the
/// second mode, by quadrature over the exact coherent-state overlap.
///
/// The grid order is doubled from `grid.order()` until consecutive estimates
/// agree to 1e-12 or [`MAX_OVERLAP_ORDER`] is reached.
pub fn entanglement_fidelity_overlap(
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    sigma: f64,
    grid: &QuadratureGrid,
) -> Result<EntFidResult> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma", sigma, "finite and >= 0"));
    }
    let separation = (alpha - beta).norm();
    if separation < Tolerances::default().separation {
        return Err(Error::DegenerateEcs { separation });
    }
    if sigma == 0.0 {
        return Ok(EntFidResult {
            value: 1.0,
            method: Method::OverlapQuadrature,
            est_error: 0.0,
        });
    }
    let (a, b) = (alpha.to_c64(), beta.to_c64());
    let ln_n2 = -(-2.0 * (-(separation * separation)).exp_m1()).ln();

    let mut order = grid.order();
    let mut current = ecs_overlap_at_order(a, b, ln_n2, sigma, grid);
    loop {
        let next_order = 2 * order;
        let finer = ecs_overlap_at_order(a, b, ln_n2, sigma, &grid.with_order(next_order)?);
        let est_error = 0.5 * (finer - current).abs();
        if est_error <= 1e-12 || next_order >= MAX_OVERLAP_ORDER {
            return Ok(EntFidResult {
                value: finer,
                method: Method::OverlapQuadrature,
                est_error,
            });
        }
        order = next_order;
        current = finer;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurificationEntry {
    pub kind: AncillaKind,
    pub ancilla_dim: usize,
    pub result: EntFidResult,
    /// Max-abs deviation of this purification's reduced state from the reference.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurificationReport {
    pub entries: Vec<PurificationEntry>,
    /// Largest pairwise difference of the fidelity values.
    pub max_gap: f64,
    /// Largest pairwise sum of `est_error`s.
    pub combined_error: f64,
    /// Largest pairwise max-abs difference of the reduced states.
    pub reduced_state_gap: f64,
    /// True when the reduced states differ by more than 1e-8, so a gap is expected.
    pub different_states: bool,
    pub consistent: bool,
}

fn pairwise(entries: &[PurificationEntry], states: &[DensityMatrix]) -> Result<(f64, f64, f64)> {
    let (mut gap, mut err, mut state_gap) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            gap = gap.max((entries[i].result.value - entries[j].result.value).abs());
            err = err.max(entries[i].result.est_error + entries[j].result.est_error);
            state_gap = state_gap.max(states[i].max_abs_diff(&states[j])?);
        }
    }
    Ok((gap, err, state_gap))
}

fn report(
    purifications: &[Purification],
    channel: &GaussianNoiseChannel,
    reference: Option<&DensityMatrix>,
) -> Result<PurificationReport> {
    let mut entries = Vec::with_capacity(purifications.len());
    let mut states = Vec::with_capacity(purifications.len());
    for p in purifications {
        let reduced = p.reduced_state();
        let deviation = match reference {
            Some(rho) => p.check_reduces_to(rho, 1e-8)?,
            None => 0.0,
        };
        entries.push(PurificationEntry {
            kind: p.kind(),
            ancilla_dim: p.ancilla_dim(),
            result: entanglement_fidelity_brute(p, channel)?,
            deviation,
        });
        states.push(reduced);
    }
    let (max_gap, combined_error, reduced_state_gap) = pairwise(&entries, &states)?;
    let different_states = reduced_state_gap > 1e-8;
    Ok(PurificationReport {
        entries,
        max_gap,
        combined_error,
        reduced_state_gap,
        different_states,
        // Rounding floor for sums over thousands of nodes.
        consistent: different_states || max_gap <= combined_error + 1e-12,
    })
}

/// Entanglement fidelity of every purification of `rho_b`; they must agree.
pub fn purification_independence_check(
    rho_b: &DensityMatrix,
    purifications: &[Purification],
    channel: &GaussianNoiseChannel,
) -> Result<PurificationReport> {
    report(purifications, channel, Some(rho_b))
}

/// Entanglement fidelities of purifications that need not share a reduced
/// state. `different_states` flags when a gap between them is expected.
pub fn compare_purifications(
    purifications: &[Purification],
    channel: &GaussianNoiseChannel,
) -> Result<PurificationReport> {
    report(purifications, channel, None)
}
