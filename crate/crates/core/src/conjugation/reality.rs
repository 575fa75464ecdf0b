//! Real and pseudoreal objects.

use serde::Serialize;

use super::ConjugateSolution;
use crate::category::{Arrow, BackendKind, Category, Obj};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tol;

/// `+1` if a self-conjugate irreducible `ρ` admits a solution with `R̄ = R`,
/// `-1` if only `R̄ = -R` is possible.
///
/// Writes the spanning vector of `(ι, ρρ)` as a matrix `M` (`M[a][b]` is the
/// coefficient of `e_a⊗e_b`); then `conj(M)·M = c·1` with `c` real.
pub fn real_sign(cat: &Category, rho: &Obj) -> Result<i8> {
    let basis = cat.hom_basis(&cat.unit(), &rho.tensor(rho))?;
    if basis.len() != 1 {
        return Err(Error::Invalid(format!("(ι, {rho}.{rho}) has dimension {}, expected 1", basis.len())));
    }
    let n = rho.dim();
    let v = basis[0].mat();
    let m = CMat::from_fn(n, n, |a, b| v[(a * n + b, 0)]);
    let mm = m.map(|z| z.conj()) * &m;
    let c = linalg::trace(&mm) / linalg::r(n as f64);
    let defect = linalg::fro_norm(&(&mm - linalg::identity(n) * c)) / linalg::fro_norm(&mm).max(1e-300);
    let t = tol::spectral();
    if defect > t || c.im.abs() > t * c.norm().max(1e-300) || c.re.abs() <= t * c.norm().max(1e-300) {
        return Err(Error::Invalid(format!("conj(M)M is not a real multiple of 1 (defect {defect:e}, c = {c})")));
    }
    Ok(if c.re > 0.0 { 1 } else { -1 })
}

/// `ρ` is real iff every irreducible `σ` and its conjugate occur equally
/// often and pseudoreal irreducibles occur an even number of times.
pub fn is_real(cat: &Category, rho: &Obj, seed: u64) -> Result<bool> {
    if cat.kind() == BackendKind::Hilb || rho.dim() == 0 {
        return Ok(true);
    }
    if cat.kind() == BackendKind::Free {
        if rho.is_unit() {
            return Ok(true);
        }
        if !cat.is_irreducible(rho)? {
            return Err(Error::Unsupported(format!("reality of reducible `{rho}` in a free category")));
        }
        let bar = cat.conjugate_object(rho)?;
        if bar != *rho {
            return Ok(false);
        }
        let data = cat.free_data().expect("free backend");
        let sign = match data.real_signs.get(&rho.label()) {
            Some(&s) => s,
            None => real_sign(cat, rho)?,
        };
        return Ok(sign > 0);
    }
    let mult = cat.multiplicities(rho, seed)?;
    for (_, sigma, m) in &mult {
        let sigma_bar = cat.conjugate_object(sigma)?;
        let mut m_bar = 0;
        for (_, tau, mt) in &mult {
            if tau.dim() == sigma.dim() && cat.hom_dim(&sigma_bar, tau)? > 0 {
                m_bar = *mt;
            }
        }
        if m_bar != *m {
            return Ok(false);
        }
        let self_conjugate = cat.hom_dim(&sigma_bar, sigma)? > 0;
        if self_conjugate && real_sign(cat, sigma)? < 0 && m % 2 == 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct IteratedReal {
    pub m: usize,
    /// `R_m* R_m`, expected `d^m`.
    pub norm_sq: f64,
    /// The scalar `c` with `(S_m*⊗1)(1⊗S_m) = c·1`.
    pub scalar: f64,
    /// Distance of `(S_m*⊗1)(1⊗S_m)` from `c·1`.
    pub scalar_defect: f64,
    #[serde(skip)]
    pub r_m: Option<Arrow>,
}

/// `R_m = (1_ρ⊗R_{m-1}⊗1_ρ)R` for a solution with `ρ̄ = ρ` and `R̄ = ±R`,
/// and the check that `S_m = d^{-m/2}R_m` satisfies
/// `(S_m*⊗1_{ρ^m})(1_{ρ^m}⊗S_m) = ±d^{-m}·1`.
pub fn iterated_real_solution(sol: &ConjugateSolution, m: usize) -> Result<IteratedReal> {
    if m == 0 {
        return Err(Error::Invalid("m must be at least 1".into()));
    }
    if sol.rho != sol.rho_bar {
        return Err(Error::Invalid("ρ̄ must equal ρ".into()));
    }
    let t = tol::residual();
    let plus = sol.r_bar.rel_diff(&sol.r);
    let minus = sol.r_bar.rel_diff(&sol.r.scale_re(-1.0));
    if plus > t && minus > t {
        return Err(Error::Invalid(format!("R̄ ≠ ±R (defects {plus:e}, {minus:e})")));
    }
    let rho = &sol.rho;
    let mut r_m = sol.r.clone();
    for _ in 1..m {
        r_m = r_m.left_id(rho).right_id(rho).after(&sol.r)?;
    }
    let d = (sol.r_norm_sq() * sol.r_bar_norm_sq()).sqrt();
    let norm_sq = (r_m.adjoint() * &r_m).scalar().expect("scalar").re;
    let s = r_m.scale_re(d.powf(-(m as f64) / 2.0));
    let rm = rho.power(m);
    let lhs = &s.adjoint().right_id(&rm) * &s.left_id(&rm);
    let n = rm.dim();
    let scalar = (linalg::trace(lhs.mat()) / linalg::r(n as f64)).re;
    let scalar_defect = linalg::fro_norm(&(lhs.mat() - linalg::identity(n).scale(scalar)));
    Ok(IteratedReal { m, norm_sq, scalar, scalar_defect, r_m: Some(r_m) })
}
