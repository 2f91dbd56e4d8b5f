use nalgebra::DMatrix;

use super::{DensityMatrix, FockVector};
use crate::{Error, Result, C64};

/// Reduced state of `keep_mode` (0 or 1) of a two-mode density matrix.
pub fn partial_trace(rho: &DensityMatrix, keep_mode: usize) -> Result<DensityMatrix> {
    let space = rho.space();
    space.expect_modes(2, "partial_trace")?;
    if keep_mode > 1 {
        return Err(Error::domain("keep_mode", keep_mode as f64, "0 or 1"));
    }
    let d = space.mode_dim();
    let e = rho.elements();
    let reduced = if keep_mode == 1 {
        DMatrix::from_fn(d, d, |b, bp| (0..d).map(|a| e[(a * d + b, a * d + bp)]).sum::<C64>())
    } else {
        DMatrix::from_fn(d, d, |a, ap| (0..d).map(|b| e[(a * d + b, ap * d + b)]).sum::<C64>())
    };
    Ok(DensityMatrix::from_parts(space.with_modes(1)?, reduced))
}

/// `F(ψ, ρ) = ⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure_mixed(psi: &FockVector, rho: &DensityMatrix) -> Result<f64> {
    psi.space().expect_same(&rho.space(), "fidelity_pure_mixed")?;
    let c = psi.coefficients();
    Ok(c.dotc(&(rho.elements() * c)).re)
}
