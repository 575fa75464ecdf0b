//! Left and right inverses defined by a solution.

use super::{strip_prefix, strip_suffix, ConjugateSolution};
use crate::category::Arrow;
use crate::error::{Error, Result};

/// `φ_{σ,τ}(X) = n·(S*⊗1_τ)(1_ρ̄⊗X)(R⊗1_σ)` with `S* = R*(Y⊗1_ρ)`;
/// `Y = 1` and `n = (R*R)⁻¹` for the normalized left inverse of `R`.
#[derive(Clone, Debug)]
pub struct LeftInverse {
    pub solution: ConjugateSolution,
    pub normalization: f64,
    /// `S ∈ (ι, ρ̄ρ)`.
    s: Arrow,
}

pub fn left_inverse(sol: &ConjugateSolution) -> LeftInverse {
    LeftInverse { solution: sol.clone(), normalization: 1.0 / sol.r_norm_sq(), s: sol.r.clone() }
}

/// The left inverse with `S* = R*(Y⊗1_ρ)`, `Y ∈ (ρ̄, ρ̄)`, using the same
/// normalization constant as [`left_inverse`].
pub fn left_inverse_from_y(sol: &ConjugateSolution, y: &Arrow) -> Result<LeftInverse> {
    if y.src() != &sol.rho_bar || y.dst() != &sol.rho_bar {
        return Err(Error::Endpoint("Y must be an endomorphism of ρ̄".into()));
    }
    let s = y.adjoint().right_id(&sol.rho).after(&sol.r)?;
    Ok(LeftInverse { solution: sol.clone(), normalization: 1.0 / sol.r_norm_sq(), s })
}

impl LeftInverse {
    /// `φ_{σ,τ}(X)` for `X ∈ (ρσ, ρτ)`.
    pub fn apply(&self, x: &Arrow) -> Result<Arrow> {
        Ok(self.raw(x)?.scale_re(self.normalization))
    }

    /// `(S*⊗1_τ)(1_ρ̄⊗X)(R⊗1_σ)` without normalization.
    pub fn raw(&self, x: &Arrow) -> Result<Arrow> {
        let sol = &self.solution;
        let sigma = strip_prefix(x.src(), &sol.rho)?;
        let tau = strip_prefix(x.dst(), &sol.rho)?;
        let inner = x.left_id(&sol.rho_bar).after(&sol.r.right_id(&sigma))?;
        self.s.adjoint().right_id(&tau).after(&inner)
    }
}

/// `ψ_{σ,τ}(X) = n·(1_τ⊗R̄*)(X⊗1_ρ̄)(1_σ⊗R̄)` for `X ∈ (σρ, τρ)`.
#[derive(Clone, Debug)]
pub struct RightInverse {
    pub solution: ConjugateSolution,
    pub normalization: f64,
}

pub fn right_inverse(sol: &ConjugateSolution) -> RightInverse {
    RightInverse { solution: sol.clone(), normalization: 1.0 / sol.r_bar_norm_sq() }
}

impl RightInverse {
    pub fn apply(&self, x: &Arrow) -> Result<Arrow> {
        Ok(self.raw(x)?.scale_re(self.normalization))
    }

    pub fn raw(&self, x: &Arrow) -> Result<Arrow> {
        let sol = &self.solution;
        let sigma = strip_suffix(x.src(), &sol.rho)?;
        let tau = strip_suffix(x.dst(), &sol.rho)?;
        let inner = x.right_id(&sol.rho_bar).after(&sol.r_bar.left_id(&sigma))?;
        sol.r_bar.adjoint().left_id(&tau).after(&inner)
    }
}
