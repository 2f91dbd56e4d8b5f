//! Truncated Fock-space linear algebra.
//!
//! Multi-mode states use a row-major tensor index with mode 0 most
//! significant: for two modes `(a, b)` the flat index is `a * (cutoff + 1) + b`.

mod displacement;
mod ops;
mod state;
mod states;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

pub use displacement::{displacement_block, displacement_operator};
pub use ops::{fidelity_pure_mixed, partial_trace};
pub use state::{DensityMatrix, FockVector, Operator};
pub use states::{coherent_state, ecs_state, ecs_unnormalized_norm, two_mode_squeezed_state};

/// A point `x + ip` in phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    /// Panics on non-finite components.
    pub fn new(re: f64, im: f64) -> Self {
        assert!(
            re.is_finite() && im.is_finite(),
            "complex amplitude must be finite, got ({re}, {im})"
        );
        Self { re, im }
    }

    pub fn try_new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() {
            return Err(Error::domain("re", re, "finite"));
        }
        if !im.is_finite() {
            return Err(Error::domain("im", im, "finite"));
        }
        Ok(Self { re, im })
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0)
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        let c = C64::from_polar(r, theta);
        Self::new(c.re, c.im)
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl From<C64> for ComplexAmplitude {
    fn from(c: C64) -> Self {
        Self::new(c.re, c.im)
    }
}

impl From<ComplexAmplitude> for C64 {
    fn from(a: ComplexAmplitude) -> Self {
        a.to_c64()
    }
}

impl std::ops::Add for ComplexAmplitude {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl std::ops::Sub for ComplexAmplitude {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl std::ops::Neg for ComplexAmplitude {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

/// Truncated Fock space of `modes` modes, each keeping levels `0..=cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    cutoff: usize,
    modes: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize, modes: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::domain("cutoff", cutoff as f64, ">= 1"));
        }
        if modes < 1 {
            return Err(Error::domain("modes", modes as f64, ">= 1"));
        }
        Ok(Self { cutoff, modes })
    }

    /// Panics if `cutoff == 0`.
    pub fn single(cutoff: usize) -> Self {
        Self::new(cutoff, 1).expect("cutoff must be at least 1")
    }

    /// Panics if `cutoff == 0`.
    pub fn two_mode(cutoff: usize) -> Self {
        Self::new(cutoff, 2).expect("cutoff must be at least 1")
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Levels per mode, `cutoff + 1`.
    pub fn mode_dim(&self) -> usize {
        self.cutoff + 1
    }

    /// Total dimension `(cutoff + 1)^modes`.
    pub fn dim(&self) -> usize {
        self.mode_dim().pow(self.modes as u32)
    }

    pub fn with_modes(&self, modes: usize) -> Result<Self> {
        Self::new(self.cutoff, modes)
    }

    /// Default cutoff for states whose largest amplitude in play is `amplitude`:
    /// `ceil(a² + 5a + 10)`, the Poisson tail of a coherent state plus margin.
    pub fn cutoff_for_amplitude(amplitude: f64) -> usize {
        let a = amplitude.abs();
        (a * a + 5.0 * a + 10.0).ceil() as usize
    }

    pub(crate) fn expect_modes(&self, modes: usize, what: &str) -> Result<()> {
        if self.modes != modes {
            return Err(Error::SpaceMismatch(format!(
                "{what} needs a {modes}-mode space, got {} modes",
                self.modes
            )));
        }
        Ok(())
    }

    pub(crate) fn expect_same(&self, other: &FockSpace, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::SpaceMismatch(format!(
                "{what}: {self:?} vs {other:?}"
            )));
        }
        Ok(())
    }
}

/// Numeric tolerances shared by the state constructors and channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed norm defect of a constructed state vector.
    pub norm: f64,
    /// Allowed `max |ρ − ρ†|`.
    pub hermiticity: f64,
    /// Allowed `|Tr ρ − 1|` for normalized density matrices.
    pub trace: f64,
    /// Allowed `max |U†U − I|` on the interior block of a truncated unitary.
    pub unitary: f64,
    /// Largest probability mass a state constructor may drop at the cutoff.
    pub tail: f64,
    /// Minimum `|α − β|` for an entangled coherent state.
    pub separation: f64,
    /// Largest trace lost by a channel application before `CutoffTooSmall`.
    pub channel_trace: f64,
    /// Allowed deviation of an outcome-integrated probability from its exact value.
    pub probability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            hermiticity: 1e-10,
            trace: 1e-8,
            unitary: 1e-8,
            tail: 1e-12,
            separation: 1e-8,
            channel_trace: 1e-6,
            probability: 1e-3,
        }
    }
}

/// `ln(k!)` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}
