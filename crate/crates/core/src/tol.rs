//! Process-wide default tolerances.
//!
//! All checks compare relative residuals against these values unless a caller
//! passes an explicit tolerance.

use std::sync::RwLock;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Equality residuals (conjugate equations, intertwining, projections).
    pub residual: f64,
    /// Spectral quantities (eigenvalues, dimensions, norms).
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-9, spectral: 1e-7 }
    }
}

static TOLERANCES: RwLock<Tolerances> = RwLock::new(Tolerances { residual: 1e-9, spectral: 1e-7 });

pub fn tolerances() -> Tolerances {
    *TOLERANCES.read().expect("tolerance lock poisoned")
}

pub fn set_tolerances(t: Tolerances) {
    *TOLERANCES.write().expect("tolerance lock poisoned") = t;
}

pub fn residual() -> f64 {
    tolerances().residual
}

pub fn spectral() -> f64 {
    tolerances().spectral
}
