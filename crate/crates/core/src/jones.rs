//! Jones projections of a solution of the conjugate equations and the
//! restriction of `d²` to the Jones index set.

use serde::Serialize;

use crate::category::Arrow;
use crate::conjugation::ConjugateSolution;
use crate::error::{Error, Result};

pub const K_MAX: usize = 1000;
pub const INDEX_TOL: f64 = 1e-7;

/// `E = ‖R‖⁻² RR*` on `ρ̄ρ`, `Ē = ‖R̄‖⁻² R̄R̄*` on `ρρ̄`, and
/// `lam = ‖R‖⁻²‖R̄‖⁻²`.
#[derive(Clone, Debug)]
pub struct JonesPair {
    pub solution: ConjugateSolution,
    pub e: Arrow,
    pub e_bar: Arrow,
    pub lam: f64,
}

pub fn jones_projections(sol: &ConjugateSolution) -> Result<JonesPair> {
    let (a, b) = (sol.r_norm_sq(), sol.r_bar_norm_sq());
    if a == 0.0 || b == 0.0 {
        return Err(Error::Invalid("R and R̄ must be nonzero".into()));
    }
    let e = sol.r.after(&sol.r.adjoint())?.scale_re(1.0 / a);
    let e_bar = sol.r_bar.after(&sol.r_bar.adjoint())?.scale_re(1.0 / b);
    Ok(JonesPair { solution: sol.clone(), e, e_bar, lam: 1.0 / (a * b) })
}

#[derive(Clone, Debug, Serialize)]
pub struct JonesResiduals {
    /// `E, Ē` are self-adjoint idempotents.
    pub projection: f64,
    /// `(E⊗1)(1⊗Ē)(E⊗1) = lam·E⊗1` on `ρ̄ρρ̄`.
    pub e_bar_side: f64,
    /// `(1⊗Ē)(E⊗1)(1⊗Ē) = lam·1⊗Ē` on `ρ̄ρρ̄`.
    pub e_bar_side_mirror: f64,
    /// `(1⊗E)(Ē⊗1)(1⊗E) = lam·1⊗E` on `ρρ̄ρ`.
    pub e_side: f64,
    /// `(Ē⊗1)(1⊗E)(Ē⊗1) = lam·Ē⊗1` on `ρρ̄ρ`.
    pub e_side_mirror: f64,
    pub max: f64,
    pub lam: f64,
}

impl JonesResiduals {
    pub fn passes(&self, tol: f64) -> bool {
        self.max < tol
    }
}

fn sandwich(x: &Arrow, y: &Arrow, lam: f64) -> Result<f64> {
    let lhs = x.after(y)?.after(x)?;
    let rhs = x.scale_re(lam);
    Ok((&lhs - &rhs).norm() / lam)
}

fn projection_defect(p: &Arrow) -> Result<f64> {
    let sq = p.after(p)?;
    Ok((&sq - p).norm().max((&p.adjoint() - p).norm()))
}

/// Residuals of the Jones relations, relative to `lam`.
pub fn verify_jones_relations(pair: &JonesPair) -> Result<JonesResiduals> {
    let sol = &pair.solution;
    let (rho, rho_bar) = (&sol.rho, &sol.rho_bar);
    let projection = projection_defect(&pair.e)?.max(projection_defect(&pair.e_bar)?);
    // on ρ̄ρρ̄
    let e1 = pair.e.right_id(rho_bar);
    let e2 = pair.e_bar.left_id(rho_bar);
    let e_bar_side = sandwich(&e1, &e2, pair.lam)?;
    let e_bar_side_mirror = sandwich(&e2, &e1, pair.lam)?;
    // on ρρ̄ρ
    let f1 = pair.e.left_id(rho);
    let f2 = pair.e_bar.right_id(rho);
    let e_side = sandwich(&f1, &f2, pair.lam)?;
    let e_side_mirror = sandwich(&f2, &f1, pair.lam)?;
    let max = projection.max(e_bar_side).max(e_bar_side_mirror).max(e_side).max(e_side_mirror);
    Ok(JonesResiduals { projection, e_bar_side, e_bar_side_mirror, e_side, e_side_mirror, max, lam: pair.lam })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "k", rename_all = "snake_case")]
pub enum IndexClass {
    /// `d² = 4cos²(π/k)`.
    Discrete(usize),
    /// `d² ≥ 4`.
    Continuous,
    Outside,
}

impl std::fmt::Display for IndexClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IndexClass::Discrete(k) => write!(f, "discrete({k})"),
            IndexClass::Continuous => write!(f, "continuous"),
            IndexClass::Outside => write!(f, "outside"),
        }
    }
}

pub fn jones_value(k: usize) -> f64 {
    4.0 * (std::f64::consts::PI / k as f64).cos().powi(2)
}

/// Locates `d²` in `{4cos²(π/k) : 3 ≤ k ≤ k_max} ∪ [4, ∞)` with an
/// absolute tolerance.
pub fn index_range(d_squared: f64, tol: f64, k_max: usize) -> IndexClass {
    // 4cos²(π/k) is increasing in k; only the nearest values matter
    for k in 3..=k_max.max(3) {
        let v = jones_value(k);
        if (d_squared - v).abs() < tol {
            return IndexClass::Discrete(k);
        }
        if v > d_squared + tol {
            break;
        }
    }
    if d_squared >= 4.0 - tol {
        IndexClass::Continuous
    } else {
        IndexClass::Outside
    }
}

pub fn index_range_default(d_squared: f64) -> IndexClass {
    index_range(d_squared, INDEX_TOL, K_MAX)
}
