//! Standard solutions, intrinsic dimension and minimality.

use serde::Serialize;

use super::{canonical_solution, product_solution, ConjugateSolution};
use crate::category::{Arrow, BackendKind, Category, Obj};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::tol;

/// Densities of `φ_{ι,ι}(X) = R*(1⊗X)R` and `ψ_{ι,ι}(X) = R̄*(X⊗1)R̄` on
/// `(ρ, ρ)`: `φ(X) = Tr(D_φ X)` with `D_φ` in the algebra itself.
#[derive(Clone, Debug)]
pub struct DensityPair {
    pub d_phi: CMat,
    pub d_psi: CMat,
}

impl DensityPair {
    pub fn compute(cat: &Category, sol: &ConjugateSolution) -> Result<DensityPair> {
        let basis = cat.hom_basis(&sol.rho, &sol.rho)?;
        let n = sol.rho.dim();
        let phi = |x: &Arrow| -> C64 {
            (&sol.r.adjoint() * &x.left_id(&sol.rho_bar).after(&sol.r).expect("endpoints")).scalar().expect("scalar")
        };
        let psi = |x: &Arrow| -> C64 {
            (&sol.r_bar.adjoint() * &x.right_id(&sol.rho_bar).after(&sol.r_bar).expect("endpoints"))
                .scalar()
                .expect("scalar")
        };
        let mut d_phi = CMat::zeros(n, n);
        let mut d_psi = CMat::zeros(n, n);
        for b in &basis {
            let bt = b.mat().adjoint();
            d_phi += &bt * phi(b);
            d_psi += &bt * psi(b);
        }
        Ok(DensityPair { d_phi: linalg::hermitian_part(&d_phi), d_psi: linalg::hermitian_part(&d_psi) })
    }

    /// `‖D_φ - D_ψ‖ / max(‖D_φ‖, ‖D_ψ‖)`.
    pub fn gap(&self) -> f64 {
        let scale = linalg::fro_norm(&self.d_phi).max(linalg::fro_norm(&self.d_psi)).max(1e-300);
        linalg::fro_norm(&(&self.d_phi - &self.d_psi)) / scale
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StandardReport {
    pub standard: bool,
    pub gap: f64,
}

/// Standard iff `φ_{ι,ι} = ψ_{ι,ι}`.
pub fn is_standard(cat: &Category, sol: &ConjugateSolution) -> Result<StandardReport> {
    let gap = DensityPair::compute(cat, sol)?.gap();
    Ok(StandardReport { standard: gap < tol::residual(), gap })
}

/// Replaces `(R, R̄)` by `((1⊗Y)R, (Y⁻¹⊗1)R̄)` with `Y > 0` in `(ρ, ρ)`
/// solving `Y² D_φ Y² = D_ψ`, then balances `‖R‖ = ‖R̄‖` and fixes the phase.
pub fn standardize(cat: &Category, sol: &ConjugateSolution) -> Result<ConjugateSolution> {
    if sol.rho.dim() == 0 {
        return Ok(sol.clone());
    }
    let dp = DensityPair::compute(cat, sol)?;
    let phi_inv = linalg::inverse(&dp.d_phi).map_err(|_| Error::Invalid("degenerate left density".into()))?;
    let p = linalg::geometric_mean(&phi_inv, &dp.d_psi)?;
    let y = Arrow::new(&sol.rho, &sol.rho, linalg::psd_sqrt(&p)?)?;
    let twisted = sol.twisted(&y)?;
    Ok(normalize_phase(&balance(&twisted)))
}

/// Rescales `(cR, R̄/c)` so that `‖R‖ = ‖R̄‖`.
pub fn balance(sol: &ConjugateSolution) -> ConjugateSolution {
    let (a, b) = (sol.r_norm_sq(), sol.r_bar_norm_sq());
    if a <= 0.0 || b <= 0.0 {
        return sol.clone();
    }
    let c = (b / a).powf(0.25);
    sol.scaled(linalg::r(c), linalg::r(1.0 / c))
}

/// Multiplies `R` and `R̄` by a common phase making the first nonzero
/// coordinate of `R` real positive.
pub fn normalize_phase(sol: &ConjugateSolution) -> ConjugateSolution {
    let m = sol.r.mat();
    let top = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    match m.iter().find(|z| z.norm() > 1e-9 * top) {
        Some(z) => {
            let w = z.conj() / z.norm();
            sol.scaled(w, w)
        }
        None => sol.clone(),
    }
}

/// `‖R‖·‖R̄‖`.
pub fn dim_solution(sol: &ConjugateSolution) -> f64 {
    (sol.r_norm_sq() * sol.r_bar_norm_sq()).sqrt()
}

/// A standard solution for `rho`: the backend solution, standardized. In a
/// free category without hom data for the whole word, the product of the
/// standardized generator solutions is used instead.
pub fn standard_solution(cat: &Category, rho: &Obj) -> Result<ConjugateSolution> {
    let sol = canonical_solution(cat, rho)?;
    match standardize(cat, &sol) {
        Ok(s) => Ok(s),
        Err(Error::MissingHom { .. }) if cat.kind() == BackendKind::Free => {
            let unit = cat.unit();
            let one = CMat::from_element(1, 1, linalg::ONE);
            let mut acc = ConjugateSolution::new(&unit, &unit, &unit, one.clone(), one)?;
            for g in rho.factors() {
                let o = Obj::from_parts(rho, std::slice::from_ref(g));
                acc = product_solution(&acc, &standardize(cat, &canonical_solution(cat, &o)?)?)?;
            }
            Ok(acc)
        }
        Err(e) => Err(e),
    }
}

/// Intrinsic dimension `d(ρ)`: sum over irreducible summands of
/// `‖R‖·‖R̄‖` for norm-balanced solutions. Zero objects have `d = 0`.
pub fn dim_object(cat: &Category, rho: &Obj, seed: u64) -> Result<f64> {
    if rho.dim() == 0 {
        return Ok(0.0);
    }
    match cat.kind() {
        BackendKind::Free => {
            let mut d = 1.0;
            for g in rho.factors() {
                let o = Obj::from_parts(rho, std::slice::from_ref(g));
                let sol = canonical_solution(cat, &o)?;
                d *= if cat.is_irreducible(&o)? { dim_solution(&balance(&sol)) } else { dim_solution(&standardize(cat, &sol)?) };
            }
            Ok(d)
        }
        _ => {
            let mut d = 0.0;
            for (_, obj, mult) in cat.multiplicities(rho, seed)? {
                d += mult as f64 * dim_solution(&balance(&canonical_solution(cat, &obj)?));
            }
            Ok(d)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityReport {
    /// `(R*R)(R̄*R̄)`.
    pub product: f64,
    pub d_squared: f64,
    pub minimal: bool,
    /// Density gap of the solution rescaled to `‖R‖ = ‖R̄‖`, for cross-checking.
    pub standard_gap: f64,
}

pub fn minimality_check(cat: &Category, sol: &ConjugateSolution, seed: u64) -> Result<MinimalityReport> {
    let product = sol.r_norm_sq() * sol.r_bar_norm_sq();
    let d = dim_object(cat, &sol.rho, seed)?;
    let d_squared = d * d;
    let minimal = (product - d_squared).abs() <= tol::residual() * d_squared.max(1.0);
    let standard_gap = is_standard(cat, &balance(sol))?.gap;
    Ok(MinimalityReport { product, d_squared, minimal, standard_gap })
}
