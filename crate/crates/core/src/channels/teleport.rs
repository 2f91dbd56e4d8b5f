//! Direct Fock-space model of measure-and-displace teleportation.
//!
//! Modes 2 and 3 share the two-mode squeezed resource
//! `|η⟩₂₃ = Σ r_n |n⟩|n⟩`, `r_n = √(1−η²) ηⁿ`. Alice projects modes 1 and 2
//! onto `Π_α = D₁(α)|Φ⟩⟨Φ|D₁†(α)` with `|Φ⟩₁₂ = Σ φ_n |n⟩|n⟩`, and Bob applies
//! `D₃(α)`. For the ideal (infinitely squeezed) Bell measurement `φ_n = 1`,
//! and `{Π_α d²α/π}` resolves the identity on modes 1 and 2.
//!
//! Contracting `⟨Φ|₁₂ D₁†(α)` against `|ψ⟩₁|η⟩₂₃` leaves Bob with
//!
//! ```text
//! M_α|ψ⟩ = Σ_n φ_n r_n ⟨n|D†(α)|ψ⟩ |n⟩₃
//! ```
//!
//! (both two-mode states are Schmidt-diagonal in the number basis, so the
//! sums over modes 1 and 2 collapse onto a single index). The unconditional
//! output is `∫ d²α/π D(α) M_α ρ M_α† D†(α)`, integrated on a Gaussian grid
//! centred on the input amplitude.
//!
//! Bob's uncorrected state sits near `η(β − α)` for an input near `β`, which
//! can be far from the vacuum even when the corrected output is not. It is
//! held in an intermediate space whose cutoff follows the grid extent.

use nalgebra::DMatrix;

use crate::fock::{displacement_block, ComplexAmplitude, DensityMatrix, FockSpace, Tolerances};
use crate::quadrature::QuadratureGrid;
use crate::reduce::ordered_fold;
use crate::{Error, Result, C64};

/// Alice's joint measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measurement {
    /// Projection onto displaced maximally entangled states.
    Ideal,
    /// Projection onto displaced two-mode squeezed states of parameter `eta`.
    ///
    /// The effective squeezing of the whole protocol is then the product of
    /// the measurement and resource parameters.
    Squeezed { eta: f64 },
}

impl Measurement {
    fn parameter(&self) -> f64 {
        match self {
            Measurement::Ideal => 1.0,
            Measurement::Squeezed { eta } => *eta,
        }
    }

    fn schmidt(&self, n: usize) -> f64 {
        match self {
            Measurement::Ideal => 1.0,
            Measurement::Squeezed { eta } => (1.0 - eta * eta).sqrt() * eta.powi(n as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportationSetup {
    eta: f64,
    measurement: Measurement,
    outcome_grid: QuadratureGrid,
    output_space: FockSpace,
    tol: Tolerances,
    min_outcome_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportationOutput {
    /// Outcome-averaged output state, trace-renormalized.
    pub state: DensityMatrix,
    /// `∫ d²α/π Tr(M_α ρ M_α†)` on the grid.
    pub total_probability: f64,
    /// Exact value of the same integral.
    pub expected_probability: f64,
    /// Trace lost at the output cutoff before renormalization.
    pub trace_deficit: f64,
    /// Cutoff of Bob's intermediate (uncorrected) space.
    pub intermediate_cutoff: usize,
    pub outcomes: usize,
}

impl TeleportationSetup {
    pub fn new(eta: f64, outcome_grid: QuadratureGrid, output_space: FockSpace) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::domain("eta", eta, "0 <= eta < 1"));
        }
        output_space.expect_modes(1, "teleportation output")?;
        Ok(Self {
            eta,
            measurement: Measurement::Ideal,
            outcome_grid,
            output_space,
            tol: Tolerances::default(),
            min_outcome_weight: 1e-14,
        })
    }

    pub fn with_measurement(mut self, measurement: Measurement) -> Result<Self> {
        if let Measurement::Squeezed { eta } = measurement {
            if !(0.0..1.0).contains(&eta) {
                return Err(Error::domain("measurement eta", eta, "0 <= eta < 1"));
            }
        }
        self.measurement = measurement;
        Ok(self)
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn measurement(&self) -> Measurement {
        self.measurement
    }

    pub fn outcome_grid(&self) -> &QuadratureGrid {
        &self.outcome_grid
    }

    pub fn output_space(&self) -> FockSpace {
        self.output_space
    }

    /// Product of resource and measurement squeezing parameters.
    pub fn effective_eta(&self) -> f64 {
        self.eta * self.measurement.parameter()
    }

    fn resource_schmidt(&self, n: usize) -> f64 {
        (1.0 - self.eta * self.eta).sqrt() * self.eta.powi(n as i32)
    }

    /// `Σ φ_n² r_n²`, the exact outcome-integrated probability.
    pub fn expected_probability(&self) -> f64 {
        let r2 = self.eta * self.eta;
        match self.measurement {
            Measurement::Ideal => 1.0,
            Measurement::Squeezed { eta } => {
                let m2 = eta * eta;
                (1.0 - m2) * (1.0 - r2) / (1.0 - m2 * r2)
            }
        }
    }

    /// Centre and variance of the Gaussian that carries the outcome grid.
    ///
    /// A coherent input `|β⟩` produces outcomes distributed as
    /// `exp(−(1−κ²)|α−β|²)` with `κ` the effective squeezing parameter.
    pub fn outcome_distribution(&self, rho_in: &DensityMatrix) -> Result<(ComplexAmplitude, f64)> {
        let center = ComplexAmplitude::from(rho_in.mean_amplitude()?);
        let k = self.effective_eta();
        Ok((center, 1.0 / (1.0 - k * k)))
    }

    fn intermediate_cutoff(&self, rho_in: &DensityMatrix, variance: f64, grid: &QuadratureGrid) -> Result<usize> {
        let mean_amp = rho_in.mean_amplitude()?.norm_sqr();
        let spread = (rho_in.mean_photon_number()? - mean_amp).max(0.0).sqrt();
        let reach = variance.sqrt() * grid.max_radius() + 2.0 * spread + 1.0;
        let amp = self.effective_eta() * reach;
        Ok(FockSpace::cutoff_for_amplitude(amp)
            .max(self.output_space.cutoff())
            .max(rho_in.space().cutoff()))
    }

    /// `M_α` restricted to `mid × input` levels.
    fn bob_operator(&self, alpha: ComplexAmplitude, mid: usize, input: usize) -> DMatrix<C64> {
        // ⟨n|D†(α)|j⟩ = ⟨n|D(−α)|j⟩
        let mut m = displacement_block(-alpha, mid, input);
        for n in 0..mid {
            let s = self.measurement.schmidt(n) * self.resource_schmidt(n);
            m.row_mut(n).scale_mut(s);
        }
        m
    }

    /// Outcome probability density (per `d²α`) and the normalized corrected
    /// state for one measurement result. Diagnostic only.
    pub fn conditional_output(
        &self,
        rho_in: &DensityMatrix,
        alpha: ComplexAmplitude,
    ) -> Result<(f64, DensityMatrix)> {
        rho_in.space().expect_modes(1, "teleportation input")?;
        let (_, variance) = self.outcome_distribution(rho_in)?;
        let mid = self.intermediate_cutoff(rho_in, variance, &self.outcome_grid)? + 1;
        let n_in = rho_in.space().mode_dim();
        let m = self.bob_operator(alpha, mid, n_in);
        let prob = (m.adjoint() * &m * rho_in.elements()).trace().re / std::f64::consts::PI;
        let t = displacement_block(alpha, self.output_space.mode_dim(), mid) * m;
        let out = DensityMatrix::unnormalized(self.output_space, &t * rho_in.elements() * t.adjoint())?;
        Ok((prob, out.renormalized()))
    }
}

/// Outcome-averaged output of the teleportation protocol.
pub fn simulate_teleportation_channel(
    setup: &TeleportationSetup,
    rho_in: &DensityMatrix,
) -> Result<TeleportationOutput> {
    rho_in.space().expect_modes(1, "teleportation input")?;
    let (center, variance) = setup.outcome_distribution(rho_in)?;
    let grid = setup.outcome_grid.pruned(setup.min_outcome_weight);
    let mid = setup.intermediate_cutoff(rho_in, variance, &grid)? + 1;
    let n_in = rho_in.space().mode_dim();
    let n_out = setup.output_space.mode_dim();

    // ∫ d²α/π f(α) = Σ_k w_k · v e^{|t_k|²} f(α_k) with α_k = c + √v t_k.
    let nodes: Vec<(ComplexAmplitude, f64)> = grid
        .nodes()
        .iter()
        .map(|(t, w)| {
            let alpha = ComplexAmplitude::new(
                center.re + variance.sqrt() * t.re,
                center.im + variance.sqrt() * t.im,
            );
            (alpha, w * variance * t.norm_sqr().exp())
        })
        .collect();

    let rho = rho_in.elements();
    let (acc, prob) = ordered_fold(
        nodes.len(),
        || (DMatrix::<C64>::zeros(n_out, n_out), 0.0_f64),
        |k, (acc, prob)| {
            let (alpha, w) = nodes[k];
            let m = setup.bob_operator(alpha, mid, n_in);
            *prob += w * (m.adjoint() * &m * rho).trace().re;
            let t = displacement_block(alpha, n_out, mid) * &m;
            *acc += (&t * rho * t.adjoint()) * C64::new(w, 0.0);
        },
        |(a, p), (b, q)| {
            *a += b;
            *p += q;
        },
    );

    let expected = setup.expected_probability() * rho_in.trace();
    if !((prob / expected - 1.0).abs() <= setup.tol.probability) {
        return Err(Error::GridTooCoarse {
            total: prob,
            expected,
            tolerance: setup.tol.probability,
        });
    }
    let out = DensityMatrix::unnormalized(setup.output_space, acc)?;
    let deficit = 1.0 - out.trace() / prob;
    if deficit > setup.tol.channel_trace {
        return Err(Error::CutoffTooSmall {
            context: format!("teleportation output, eta = {}", setup.eta),
            cutoff: setup.output_space.cutoff(),
            lost: deficit,
            tolerance: setup.tol.channel_trace,
        });
    }
    Ok(TeleportationOutput {
        state: out.renormalized(),
        total_probability: prob,
        expected_probability: expected,
        trace_deficit: deficit,
        intermediate_cutoff: mid - 1,
        outcomes: nodes.len(),
    })
}
