use nalgebra::{DMatrix, DVector};

use super::{FockSpace, Tolerances};
use crate::{Error, Result, C64};

/// A pure state in a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    space: FockSpace,
    coefficients: DVector<C64>,
    tail_mass: f64,
}

impl FockVector {
    /// Normalizes `coefficients`; `tail_mass` records the probability the
    /// caller dropped at the cutoff before normalization.
    pub fn new(space: FockSpace, coefficients: DVector<C64>, tail_mass: f64) -> Result<Self> {
        if coefficients.len() != space.dim() {
            return Err(Error::SpaceMismatch(format!(
                "{} coefficients for a space of dimension {}",
                coefficients.len(),
                space.dim()
            )));
        }
        let norm = coefficients.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(Self {
            space,
            coefficients: coefficients / C64::new(norm, 0.0),
            tail_mass,
        })
    }

    /// Number state `|n⟩` of a single mode.
    pub fn number(space: FockSpace, n: usize) -> Result<Self> {
        space.expect_modes(1, "number state")?;
        if n > space.cutoff() {
            return Err(Error::domain("n", n as f64, "<= cutoff"));
        }
        let mut c = DVector::zeros(space.dim());
        c[n] = C64::new(1.0, 0.0);
        Self::new(space, c, 0.0)
    }

    pub fn vacuum(space: FockSpace) -> Self {
        let mut c = DVector::zeros(space.dim());
        c[0] = C64::new(1.0, 0.0);
        Self {
            space,
            coefficients: c,
            tail_mass: 0.0,
        }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn coefficients(&self) -> &DVector<C64> {
        &self.coefficients
    }

    /// Probability lost at the cutoff before renormalization.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        self.space.expect_same(&other.space, "inner product")?;
        Ok(self.coefficients.dotc(&other.coefficients))
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        Self {
            space: self.space,
            coefficients: &self.coefficients * C64::from_polar(1.0, phase),
            tail_mass: self.tail_mass,
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let c = &self.coefficients;
        DensityMatrix::from_parts(self.space, c * c.adjoint())
    }

    /// `Σ n |c_n|²` for a single-mode state.
    pub fn mean_photon_number(&self) -> Result<f64> {
        self.space.expect_modes(1, "mean photon number")?;
        Ok(self
            .coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum())
    }

    /// Two-mode coefficients as a matrix `Ψ[a, b]`.
    pub fn as_matrix(&self) -> Result<DMatrix<C64>> {
        self.space.expect_modes(2, "as_matrix")?;
        let d = self.space.mode_dim();
        Ok(DMatrix::from_fn(d, d, |a, b| self.coefficients[a * d + b]))
    }

    /// `|self⟩ ⊗ |other⟩` on single-mode factors with equal cutoff.
    pub fn tensor(&self, other: &FockVector) -> Result<FockVector> {
        self.space.expect_modes(1, "tensor")?;
        self.space.expect_same(&other.space, "tensor")?;
        let d = self.space.mode_dim();
        let c = DVector::from_fn(d * d, |i, _| {
            self.coefficients[i / d] * other.coefficients[i % d]
        });
        FockVector::new(
            self.space.with_modes(2)?,
            c,
            1.0 - (1.0 - self.tail_mass) * (1.0 - other.tail_mass),
        )
    }
}

/// A density matrix over a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    elements: DMatrix<C64>,
}

impl DensityMatrix {
    /// Checks shape, Hermiticity and unit trace.
    pub fn new(space: FockSpace, elements: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        let rho = Self::unnormalized(space, elements)?;
        let herm = rho.hermiticity_defect();
        if herm > tol.hermiticity {
            return Err(Error::InvalidState(format!(
                "hermiticity defect {herm:.3e} exceeds {:.1e}",
                tol.hermiticity
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(rho)
    }

    /// Checks shape only; trace and Hermiticity are the caller's business.
    pub fn unnormalized(space: FockSpace, elements: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if elements.nrows() != d || elements.ncols() != d {
            return Err(Error::SpaceMismatch(format!(
                "{}x{} matrix for a space of dimension {d}",
                elements.nrows(),
                elements.ncols()
            )));
        }
        Ok(Self { space, elements })
    }

    pub(crate) fn from_parts(space: FockSpace, elements: DMatrix<C64>) -> Self {
        debug_assert_eq!(elements.nrows(), space.dim());
        Self { space, elements }
    }

    /// Thermal state with mean photon number `nbar`, truncated and renormalized.
    pub fn thermal(space: FockSpace, nbar: f64) -> Result<Self> {
        space.expect_modes(1, "thermal state")?;
        if !(nbar >= 0.0) {
            return Err(Error::domain("nbar", nbar, ">= 0"));
        }
        let q = nbar / (1.0 + nbar);
        let d = space.mode_dim();
        let mut m = DMatrix::zeros(d, d);
        for n in 0..d {
            m[(n, n)] = C64::new(q.powi(n as i32), 0.0);
        }
        Ok(Self::from_parts(space, m).renormalized())
    }

    /// `Σ p_i ρ_i`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let space = first.space;
        let mut acc = DMatrix::zeros(space.dim(), space.dim());
        let mut total = 0.0;
        for (p, rho) in parts {
            space.expect_same(&rho.space, "mixture")?;
            if *p < 0.0 {
                return Err(Error::domain("mixture weight", *p, ">= 0"));
            }
            acc += &rho.elements * C64::new(*p, 0.0);
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain("mixture weight sum", total, "1"));
        }
        Ok(Self::from_parts(space, acc))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn into_elements(self) -> DMatrix<C64> {
        self.elements
    }

    pub fn trace(&self) -> f64 {
        self.elements.trace().re
    }

    /// `max |ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.elements.nrows();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.elements[(i, j)] - self.elements[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Divides by the trace.
    pub fn renormalized(&self) -> Self {
        let tr = self.trace();
        Self::from_parts(self.space, &self.elements / C64::new(tr, 0.0))
    }

    /// Smallest eigenvalue of the Hermitian part. Expensive; for checks only.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.elements)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn mean_photon_number(&self) -> Result<f64> {
        self.space.expect_modes(1, "mean photon number")?;
        Ok((0..self.space.mode_dim())
            .map(|n| n as f64 * self.elements[(n, n)].re)
            .sum())
    }

    /// `Tr(ρ a)` for a single mode.
    pub fn mean_amplitude(&self) -> Result<C64> {
        self.space.expect_modes(1, "mean amplitude")?;
        let d = self.space.mode_dim();
        // Tr(ρ a) = Σ_n sqrt(n) ρ_{n-1, n}
        Ok((1..d)
            .map(|n| self.elements[(n - 1, n)] * (n as f64).sqrt())
            .sum())
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.space.expect_same(&other.space, "trace distance")?;
        let diff = &self.elements - &other.elements;
        Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
    }

    /// `max |ρ_ij − σ_ij|`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        self.space.expect_same(&other.space, "max_abs_diff")?;
        Ok((&self.elements - &other.elements)
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.norm())))
    }

    /// `ρ ⊗ σ` for single-mode factors with equal cutoff.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        self.space.expect_modes(1, "tensor")?;
        self.space.expect_same(&other.space, "tensor")?;
        Ok(Self::from_parts(
            self.space.with_modes(2)?,
            self.elements.kronecker(&other.elements),
        ))
    }
}

/// A linear operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    elements: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: FockSpace, elements: DMatrix<C64>) -> Result<Self> {
        if elements.nrows() != space.dim() || elements.ncols() != space.dim() {
            return Err(Error::SpaceMismatch("operator shape".into()));
        }
        Ok(Self { space, elements })
    }

    pub(crate) fn from_parts(space: FockSpace, elements: DMatrix<C64>) -> Self {
        Self { space, elements }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space, self.elements.adjoint())
    }

    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        self.space.expect_same(&rhs.space, "compose")?;
        Ok(Self::from_parts(self.space, &self.elements * &rhs.elements))
    }

    /// `O|ψ⟩` without renormalization.
    pub fn apply(&self, psi: &FockVector) -> Result<DVector<C64>> {
        self.space.expect_same(&psi.space(), "apply")?;
        Ok(&self.elements * psi.coefficients())
    }

    /// `O ρ O†`.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.space.expect_same(&rho.space(), "conjugate")?;
        Ok(DensityMatrix::from_parts(
            self.space,
            &self.elements * rho.elements() * self.elements.adjoint(),
        ))
    }

    /// `max |(O†O − I)_ij|` over the leading `block × block` sub-matrix.
    ///
    /// Truncation breaks unitarity near the cutoff, so only an interior block
    /// is meaningful.
    pub fn unitarity_defect(&self, block: usize) -> f64 {
        let block = block.min(self.elements.nrows());
        let g = self.elements.adjoint() * &self.elements;
        let mut worst = 0.0_f64;
        for i in 0..block {
            for j in 0..block {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let s = FockSpace::single(1);
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.5, 0.0), C64::new(0.1, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        );
        assert!(DensityMatrix::new(s, m, &Tolerances::default()).is_err());
    }

    #[test]
    fn rejects_wrong_trace() {
        let s = FockSpace::single(1);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(0.6, 0.0); 2]));
        assert!(DensityMatrix::new(s, m, &Tolerances::default()).is_err());
    }

    #[test]
    fn thermal_mean() {
        let rho = DensityMatrix::thermal(FockSpace::single(80), 0.5).unwrap();
        assert!((rho.mean_photon_number().unwrap() - 0.5).abs() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let s = FockSpace::single(3);
        let a = FockVector::number(s, 0).unwrap().projector();
        let b = FockVector::number(s, 2).unwrap().projector();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.trace_distance(&a).unwrap() < 1e-14);
    }

    #[test]
    fn number_state_out_of_range() {
        assert!(FockVector::number(FockSpace::single(3), 4).is_err());
    }
}
