use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::fock::{ecs_state, ComplexAmplitude, DensityMatrix, FockSpace, FockVector, Tolerances};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaKind {
    /// The other mode of a two-mode state, e.g. the ECS partner.
    EcsPartner,
    /// Orthogonal two-level ancilla tagging each component.
    OrthogonalQubit,
    /// Arbitrary isometry into an ancilla space.
    CustomIsometry,
}

/// A pure state `|Γ⟩ = Σ_r |r⟩_A ⊗ |ψ_r⟩` on ancilla ⊗ kept mode.
///
/// Stored as the stack of unnormalized kept-mode branches `ψ_r`, one per
/// ancilla basis vector, so a qubit ancilla costs two Fock vectors rather
/// than a second Fock mode. Tracing out the ancilla gives `Σ_r |ψ_r⟩⟨ψ_r|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    kind: AncillaKind,
    /// Row `r` holds the coefficients of `ψ_r`.
    branches: DMatrix<C64>,
    space: FockSpace,
    kept_mode: usize,
    tail_mass: f64,
}

impl Purification {
    fn from_branches(
        kind: AncillaKind,
        branches: DMatrix<C64>,
        space: FockSpace,
        kept_mode: usize,
        tail_mass: f64,
    ) -> Result<Self> {
        let norm = branches.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("purification has norm {norm}")));
        }
        Ok(Self {
            kind,
            branches,
            space,
            kept_mode,
            tail_mass,
        })
    }

    /// Wraps a two-mode pure state, keeping `kept_mode` and using the other
    /// mode as ancilla.
    pub fn from_two_mode(state: &FockVector, kept_mode: usize) -> Result<Self> {
        let psi = state.as_matrix()?;
        let branches = match kept_mode {
            1 => psi,
            0 => psi.transpose(),
            _ => return Err(Error::domain("kept_mode", kept_mode as f64, "0 or 1")),
        };
        Self::from_branches(
            AncillaKind::EcsPartner,
            branches,
            state.space().with_modes(1)?,
            kept_mode,
            state.tail_mass(),
        )
    }

    /// `N(|α⟩_a|β⟩_b − |β⟩_a|α⟩_b)` purifying mode `b`.
    pub fn ecs(
        alpha: ComplexAmplitude,
        beta: ComplexAmplitude,
        space: FockSpace,
        tol: &Tolerances,
    ) -> Result<Self> {
        space.expect_modes(1, "ECS purification")?;
        let state = ecs_state(alpha, beta, space.with_modes(2)?, tol)?;
        Self::from_two_mode(&state, 1)
    }

    /// `√p₀|0⟩|ψ₀⟩ + √p₁|1⟩|ψ₁⟩` for normalized `ψ_i` and `p₀ + p₁ = 1`.
    pub fn orthogonal_qubit(components: [(f64, &FockVector); 2]) -> Result<Self> {
        let iso = DMatrix::<C64>::identity(2, 2);
        let mut p = Self::from_isometry(&components, &iso)?;
        p.kind = AncillaKind::OrthogonalQubit;
        Ok(p)
    }

    /// `Σ_i √p_i V|i⟩ ⊗ |ψ_i⟩` where the columns of `isometry` (ancilla
    /// dimension × component count) are orthonormal.
    pub fn from_isometry(components: &[(f64, &FockVector)], isometry: &DMatrix<C64>) -> Result<Self> {
        let (_, first) = components
            .first()
            .ok_or_else(|| Error::InvalidState("purification needs at least one component".into()))?;
        let space = first.space();
        space.expect_modes(1, "purification component")?;
        if isometry.ncols() != components.len() {
            return Err(Error::SpaceMismatch(format!(
                "isometry has {} columns for {} components",
                isometry.ncols(),
                components.len()
            )));
        }
        let gram = isometry.adjoint() * isometry;
        let defect = (gram - DMatrix::<C64>::identity(components.len(), components.len()))
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.norm()));
        if defect > 1e-10 {
            return Err(Error::InvalidState(format!("isometry columns not orthonormal ({defect:.2e})")));
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 || components.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::domain("component weights", total, "nonnegative, summing to 1"));
        }

        let d = space.mode_dim();
        let mut branches = DMatrix::<C64>::zeros(isometry.nrows(), d);
        let mut tail = 0.0;
        for (i, (p, psi)) in components.iter().enumerate() {
            space.expect_same(&psi.space(), "purification component")?;
            tail += p * psi.tail_mass();
            let amp = C64::new(p.sqrt(), 0.0);
            for r in 0..isometry.nrows() {
                let coef = isometry[(r, i)] * amp;
                for (n, c) in psi.coefficients().iter().enumerate() {
                    branches[(r, n)] += coef * c;
                }
            }
        }
        Self::from_branches(AncillaKind::CustomIsometry, branches, space, 1, tail)
    }

    /// A pure state with a trivial one-dimensional ancilla.
    pub fn pure(psi: &FockVector) -> Result<Self> {
        Self::from_isometry(&[(1.0, psi)], &DMatrix::identity(1, 1))
    }

    pub fn kind(&self) -> AncillaKind {
        self.kind
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn kept_mode(&self) -> usize {
        self.kept_mode
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn ancilla_dim(&self) -> usize {
        self.branches.nrows()
    }

    pub(crate) fn branches(&self) -> &DMatrix<C64> {
        &self.branches
    }

    /// `Tr_A |Γ⟩⟨Γ|`.
    pub fn reduced_state(&self) -> DensityMatrix {
        DensityMatrix::from_parts(self.space, self.branches.transpose() * self.branches.conjugate())
    }

    /// Max-abs deviation of the reduced state from `rho`; `PurificationMismatch`
    /// above `tol`.
    pub fn check_reduces_to(&self, rho: &DensityMatrix, tol: f64) -> Result<f64> {
        let deviation = self.reduced_state().max_abs_diff(rho)?;
        if deviation > tol {
            return Err(Error::PurificationMismatch { deviation });
        }
        Ok(deviation)
    }
}
