//! Solutions of the conjugate equations and everything built from them.
//!
//! A solution for `ρ` is a pair `R ∈ (ι, ρ̄ρ)`, `R̄ ∈ (ι, ρρ̄)` with
//! `(R̄*⊗1_ρ)(1_ρ⊗R) = 1_ρ` and `(R*⊗1_ρ̄)(1_ρ̄⊗R̄) = 1_ρ̄`.

mod inverse;
mod reality;
mod standard;

use serde::Serialize;

pub use inverse::{left_inverse, left_inverse_from_y, right_inverse, LeftInverse, RightInverse};
pub use reality::{is_real, iterated_real_solution, real_sign, IteratedReal};
pub use standard::{
    dim_object, dim_solution, is_standard, minimality_check, normalize_phase, standard_solution, standardize,
    DensityPair, MinimalityReport, StandardReport,
};

use crate::builtins;
use crate::category::{Arrow, BackendKind, Category, Obj};
use crate::error::{Error, Result};
use crate::linalg::{self, AntilinearMap, CMat, C64};
use crate::tol;

/// A solution `(R, R̄)` of the conjugate equations for `rho`.
#[derive(Clone, Debug)]
pub struct ConjugateSolution {
    pub rho: Obj,
    pub rho_bar: Obj,
    pub r: Arrow,
    pub r_bar: Arrow,
}

impl ConjugateSolution {
    /// Wraps column vectors `R` (in `ρ̄ρ`) and `R̄` (in `ρρ̄`).
    pub fn new(unit: &Obj, rho: &Obj, rho_bar: &Obj, r: CMat, r_bar: CMat) -> Result<ConjugateSolution> {
        if !unit.is_unit() {
            return Err(Error::Invalid("first argument must be the tensor unit".into()));
        }
        let r = Arrow::new(unit, &rho_bar.tensor(rho), r)?;
        let r_bar = Arrow::new(unit, &rho.tensor(rho_bar), r_bar)?;
        Ok(ConjugateSolution { rho: rho.clone(), rho_bar: rho_bar.clone(), r, r_bar })
    }

    pub fn from_arrows(rho: &Obj, rho_bar: &Obj, r: Arrow, r_bar: Arrow) -> Result<ConjugateSolution> {
        if !r.src().is_unit() || !r_bar.src().is_unit() {
            return Err(Error::Endpoint("R and R̄ must start at ι".into()));
        }
        if *r.dst() != rho_bar.tensor(rho) || *r_bar.dst() != rho.tensor(rho_bar) {
            return Err(Error::Endpoint(format!("R must land in {rho_bar}.{rho} and R̄ in {rho}.{rho_bar}")));
        }
        Ok(ConjugateSolution { rho: rho.clone(), rho_bar: rho_bar.clone(), r, r_bar })
    }

    /// `(R̄*⊗1_ρ)(1_ρ⊗R)`, which should be `1_ρ`.
    pub fn first_composite(&self) -> Arrow {
        &self.r_bar.adjoint().right_id(&self.rho) * &self.r.left_id(&self.rho)
    }

    /// `(R*⊗1_ρ̄)(1_ρ̄⊗R̄)`, which should be `1_ρ̄`.
    pub fn second_composite(&self) -> Arrow {
        &self.r.adjoint().right_id(&self.rho_bar) * &self.r_bar.left_id(&self.rho_bar)
    }

    /// The solution `(R̄, R)` for `ρ̄` with conjugate `ρ`.
    pub fn swapped(&self) -> ConjugateSolution {
        ConjugateSolution { rho: self.rho_bar.clone(), rho_bar: self.rho.clone(), r: self.r_bar.clone(), r_bar: self.r.clone() }
    }

    /// `(c·R, c'·R̄)`.
    pub fn scaled(&self, c: C64, c_bar: C64) -> ConjugateSolution {
        ConjugateSolution { rho: self.rho.clone(), rho_bar: self.rho_bar.clone(), r: self.r.scale(c), r_bar: self.r_bar.scale(c_bar) }
    }

    /// `((1_ρ̄⊗Y)R, (Y^{*-1}⊗1_ρ̄)R̄)` for invertible `Y ∈ (ρ, ρ)`.
    pub fn twisted(&self, y: &Arrow) -> Result<ConjugateSolution> {
        if y.src() != &self.rho || y.dst() != &self.rho {
            return Err(Error::Endpoint("twist must be an endomorphism of ρ".into()));
        }
        let yinv_adj = Arrow::new(&self.rho, &self.rho, linalg::inverse(y.mat())?.adjoint())?;
        Ok(ConjugateSolution {
            rho: self.rho.clone(),
            rho_bar: self.rho_bar.clone(),
            r: y.left_id(&self.rho_bar).after(&self.r)?,
            r_bar: yinv_adj.right_id(&self.rho_bar).after(&self.r_bar)?,
        })
    }

    /// `‖R‖²`.
    pub fn r_norm_sq(&self) -> f64 {
        (self.r.adjoint() * &self.r).scalar().map(|z| z.re).unwrap_or(0.0)
    }

    /// `‖R̄‖²`.
    pub fn r_bar_norm_sq(&self) -> f64 {
        (self.r_bar.adjoint() * &self.r_bar).scalar().map(|z| z.re).unwrap_or(0.0)
    }
}

/// Residuals of the two conjugate equations (operator norms of `LHS - 1`).
#[derive(Clone, Debug, Serialize)]
pub struct ConjugateReport {
    pub ok: bool,
    pub residual_1: f64,
    pub residual_2: f64,
}

pub fn verify_conjugate(sol: &ConjugateSolution) -> ConjugateReport {
    verify_conjugate_tol(sol, tol::residual())
}

pub fn verify_conjugate_tol(sol: &ConjugateSolution, tol: f64) -> ConjugateReport {
    let one = Arrow::identity(&sol.rho);
    let one_bar = Arrow::identity(&sol.rho_bar);
    let residual_1 = (&sol.first_composite() - &one).norm();
    let residual_2 = (&sol.second_composite() - &one_bar).norm();
    ConjugateReport { ok: residual_1 < tol && residual_2 < tol, residual_1, residual_2 }
}

/// Outcome of checking the weaker hypotheses: `X = (R̄*⊗1)(1⊗R)` invertible
/// and `ω(T) = R*(T⊗1_ρ)R` faithful on `(ρ̄, ρ̄)`.
#[derive(Clone, Debug, Serialize)]
pub struct WeakConjugateReport {
    pub ok: bool,
    pub x_sigma_min: f64,
    pub invertible: bool,
    /// Smallest eigenvalue of the Gram matrix `ω(B_k* B_l)` over a basis of `(ρ̄, ρ̄)`.
    pub omega_min_eig: f64,
    pub faithful: bool,
    /// Residuals of the corrected pair `(R, (X^{-1*}⊗1)R̄)`.
    pub corrected: Option<ConjugateReport>,
    #[serde(skip)]
    pub corrected_solution: Option<ConjugateSolution>,
}

pub fn verify_weak_conjugate(cat: &Category, sol: &ConjugateSolution) -> Result<WeakConjugateReport> {
    let t = tol::residual();
    let x = sol.first_composite();
    let sv = linalg::singular_values(x.mat());
    let smax = sv.first().copied().unwrap_or(0.0);
    let x_sigma_min = sv.last().copied().unwrap_or(0.0);
    let invertible = x_sigma_min > t * smax.max(1.0);
    let basis = cat.hom_basis(&sol.rho_bar, &sol.rho_bar)?;
    let omega = |a: &Arrow| -> C64 {
        (&(&sol.r.adjoint() * &a.right_id(&sol.rho)) * &sol.r).scalar().expect("scalar")
    };
    let k = basis.len();
    let gram = CMat::from_fn(k, k, |i, j| omega(&(&basis[i].adjoint() * &basis[j])));
    let omega_min_eig = if k == 0 { 0.0 } else { linalg::min_eigenvalue(&gram) };
    let scale = linalg::max_eigenvalue(&gram).abs().max(1e-300);
    let faithful = k > 0 && omega_min_eig > t * scale;
    let (corrected, corrected_solution) = if invertible {
        let xinv_adj = Arrow::new(&sol.rho, &sol.rho, linalg::inverse(x.mat())?.adjoint())?;
        let fixed = ConjugateSolution { r_bar: xinv_adj.right_id(&sol.rho_bar).after(&sol.r_bar)?, ..sol.clone() };
        (Some(verify_conjugate(&fixed)), Some(fixed))
    } else {
        (None, None)
    };
    let ok = invertible && faithful && corrected.as_ref().is_some_and(|c| c.ok);
    Ok(WeakConjugateReport { ok, x_sigma_min, invertible, omega_min_eig, faithful, corrected, corrected_solution })
}

/// The Frobenius reciprocity bijections attached to a solution.
pub struct Frobenius<'a> {
    pub sol: &'a ConjugateSolution,
}

pub fn frobenius_maps(sol: &ConjugateSolution) -> Frobenius<'_> {
    Frobenius { sol }
}

fn strip_prefix(word: &Obj, prefix: &Obj) -> Result<Obj> {
    let (w, p) = (word.factors(), prefix.factors());
    if w.len() >= p.len() && Obj::from_parts(word, &w[..p.len()]) == *prefix {
        Ok(Obj::from_parts(word, &w[p.len()..]))
    } else {
        Err(Error::Endpoint(format!("{word} does not start with {prefix}")))
    }
}

fn strip_suffix(word: &Obj, suffix: &Obj) -> Result<Obj> {
    let (w, s) = (word.factors(), suffix.factors());
    if w.len() >= s.len() && Obj::from_parts(word, &w[w.len() - s.len()..]) == *suffix {
        Ok(Obj::from_parts(word, &w[..w.len() - s.len()]))
    } else {
        Err(Error::Endpoint(format!("{word} does not end with {suffix}")))
    }
}

impl Frobenius<'_> {
    /// `(ρσ, τ) → (σ, ρ̄τ)`: `S ↦ (1_ρ̄⊗S)(R⊗1_σ)`.
    pub fn left_forward(&self, s: &Arrow) -> Result<Arrow> {
        let sigma = strip_prefix(s.src(), &self.sol.rho)?;
        s.left_id(&self.sol.rho_bar).after(&self.sol.r.right_id(&sigma))
    }

    /// `(σ, ρ̄τ) → (ρσ, τ)`: `S' ↦ (R̄*⊗1_τ)(1_ρ⊗S')`.
    pub fn left_backward(&self, s: &Arrow) -> Result<Arrow> {
        let tau = strip_prefix(s.dst(), &self.sol.rho_bar)?;
        self.sol.r_bar.adjoint().right_id(&tau).after(&s.left_id(&self.sol.rho))
    }

    /// `(σρ, τ) → (σ, τρ̄)`: `T ↦ (T⊗1_ρ̄)(1_σ⊗R̄)`.
    pub fn right_forward(&self, t: &Arrow) -> Result<Arrow> {
        let sigma = strip_suffix(t.src(), &self.sol.rho)?;
        t.right_id(&self.sol.rho_bar).after(&self.sol.r_bar.left_id(&sigma))
    }

    /// `(σ, τρ̄) → (σρ, τ)`: `T' ↦ (1_τ⊗R*)(T'⊗1_ρ)`.
    pub fn right_backward(&self, t: &Arrow) -> Result<Arrow> {
        let tau = strip_suffix(t.dst(), &self.sol.rho_bar)?;
        self.sol.r.adjoint().left_id(&tau).after(&t.right_id(&self.sol.rho))
    }
}

/// The conjugate `T• ∈ (ρ̄, ρ̄')` of `T ∈ (ρ, ρ')`:
/// `T• = (1_ρ̄'⊗R̄_ρ*)(1_ρ̄'⊗T*⊗1_ρ̄)(R_ρ'⊗1_ρ̄)`.
pub fn arrow_conjugate(t: &Arrow, sol: &ConjugateSolution, sol_prime: &ConjugateSolution) -> Result<Arrow> {
    if t.src() != &sol.rho || t.dst() != &sol_prime.rho {
        return Err(Error::Endpoint("solutions must match the endpoints of T".into()));
    }
    let a = sol_prime.r.right_id(&sol.rho_bar);
    let b = t.adjoint().left_id(&sol_prime.rho_bar).right_id(&sol.rho_bar);
    let c = sol.r_bar.adjoint().left_id(&sol_prime.rho_bar);
    c.after(&b.after(&a)?)
}

/// Residual of the defining property `(T•⊗1_ρ)R_ρ = (1_ρ̄'⊗T*)R_ρ'`.
pub fn arrow_conjugate_residual(t: &Arrow, tb: &Arrow, sol: &ConjugateSolution, sol_prime: &ConjugateSolution) -> Result<f64> {
    let lhs = tb.right_id(&sol.rho).after(&sol.r)?;
    let rhs = t.adjoint().left_id(&sol_prime.rho_bar).after(&sol_prime.r)?;
    Ok((&lhs - &rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0))
}

/// Left scalar product `R*(1_ρ̄⊗S*T)R` for `S, T ∈ (ρ, ρ')`.
pub fn left_product(s: &Arrow, t: &Arrow, sol: &ConjugateSolution) -> Result<C64> {
    let st = s.adjoint().after(t)?;
    if st.src() != &sol.rho {
        return Err(Error::Endpoint("solution does not belong to the source of S, T".into()));
    }
    Ok((&sol.r.adjoint() * &st.left_id(&sol.rho_bar).after(&sol.r)?).scalar().expect("scalar"))
}

/// Right scalar product `R̄*(S*T⊗1_ρ̄)R̄`.
pub fn right_product(s: &Arrow, t: &Arrow, sol: &ConjugateSolution) -> Result<C64> {
    let st = s.adjoint().after(t)?;
    if st.src() != &sol.rho {
        return Err(Error::Endpoint("solution does not belong to the source of S, T".into()));
    }
    Ok((&sol.r_bar.adjoint() * &st.right_id(&sol.rho_bar).after(&sol.r_bar)?).scalar().expect("scalar"))
}

/// `(left, right)` scalar products.
pub fn scalar_products(s: &Arrow, t: &Arrow, sol: &ConjugateSolution) -> Result<(C64, C64)> {
    Ok((left_product(s, t, sol)?, right_product(s, t, sol)?))
}

/// `tr(T) = (1_ρ, T)`.
pub fn trace(t: &Arrow, sol: &ConjugateSolution) -> Result<C64> {
    left_product(&Arrow::identity(&sol.rho), t, sol)
}

/// The solution attached to the backend: `R = R̄ = Σ e_i⊗e_i` for Hilbert
/// spaces and group representations (conjugate representation on the same
/// space), stored data for free categories; words use the product rule.
pub fn canonical_solution(cat: &Category, rho: &Obj) -> Result<ConjugateSolution> {
    let unit = cat.unit();
    let one = CMat::from_element(1, 1, linalg::ONE);
    let mut acc = ConjugateSolution::new(&unit, &unit, &unit, one.clone(), one)?;
    for g in rho.factors() {
        let obj = Obj::from_parts(rho, std::slice::from_ref(g));
        let sol = generator_solution(cat, &obj)?;
        acc = product_solution(&acc, &sol)?;
    }
    Ok(acc)
}

fn generator_solution(cat: &Category, o: &Obj) -> Result<ConjugateSolution> {
    let unit = cat.unit();
    let bar = cat.conjugate_object(o)?;
    match cat.kind() {
        BackendKind::Hilb | BackendKind::RepFiniteGroup => {
            let n = o.dim();
            let mut v = CMat::zeros(n * n, 1);
            for i in 0..n {
                v[(i * n + i, 0)] = linalg::ONE;
            }
            ConjugateSolution::new(&unit, o, &bar, v.clone(), v)
        }
        BackendKind::Free => {
            let label = o.label();
            let data = cat.free_data().expect("free backend");
            let (r, rb) = data
                .solutions
                .get(&label)
                .ok_or_else(|| Error::Invalid(format!("no conjugate data for `{label}`")))?;
            ConjugateSolution::new(&unit, o, &bar, r.clone(), rb.clone())
        }
    }
}

/// Solution from an invertible antilinear intertwiner `J` of a
/// self-conjugate object: `R = Σ e_i⊗J⁻¹e_i`, `R̄ = Σ e_i⊗Je_i`.
pub fn solution_from_antilinear(cat: &Category, rho: &Obj, j: &AntilinearMap) -> Result<ConjugateSolution> {
    if j.dim() != rho.dim() {
        return Err(Error::Shape(format!("J has dimension {}, object {}", j.dim(), rho.dim())));
    }
    let (r, rb) = builtins::solution_vectors_from_j(j)?;
    ConjugateSolution::new(&cat.unit(), rho, rho, r, rb)
}

/// Solution for `ρ₁ρ₂` with conjugate `ρ̄₂ρ̄₁`:
/// `R = (1_ρ̄₂⊗R₁⊗1_ρ₂)R₂`, `R̄ = (1_ρ₁⊗R̄₂⊗1_ρ̄₁)R̄₁`.
pub fn product_solution(s1: &ConjugateSolution, s2: &ConjugateSolution) -> Result<ConjugateSolution> {
    let rho = s1.rho.try_tensor(&s2.rho)?;
    let rho_bar = s2.rho_bar.tensor(&s1.rho_bar);
    let r = s1.r.left_id(&s2.rho_bar).right_id(&s2.rho).after(&s2.r)?;
    let r_bar = s2.r_bar.left_id(&s1.rho).right_id(&s1.rho_bar).after(&s1.r_bar)?;
    ConjugateSolution::from_arrows(&rho, &rho_bar, r, r_bar)
}

/// Solution for a direct sum given isometries `W_i ∈ (ρ_i, ρ)` and
/// `W̄_i ∈ (ρ̄_i, ρ̄)`: `R = Σ(W̄_i⊗W_i)R_i`, `R̄ = Σ(W_i⊗W̄_i)R̄_i`.
pub fn direct_sum_solution(sols: &[ConjugateSolution], w: &[Arrow], w_bar: &[Arrow]) -> Result<ConjugateSolution> {
    if sols.is_empty() || sols.len() != w.len() || w.len() != w_bar.len() {
        return Err(Error::Invalid("need one pair of isometries per summand".into()));
    }
    let rho = w[0].dst().clone();
    let rho_bar = w_bar[0].dst().clone();
    let mut r = Arrow::zero(sols[0].r.src(), &rho_bar.tensor(&rho));
    let mut r_bar = Arrow::zero(sols[0].r.src(), &rho.tensor(&rho_bar));
    for ((s, wi), wbi) in sols.iter().zip(w).zip(w_bar) {
        if wi.src() != &s.rho || wbi.src() != &s.rho_bar {
            return Err(Error::Endpoint("isometries do not match the summand solutions".into()));
        }
        r = r.try_add(&wbi.tensor(wi)?.after(&s.r)?)?;
        r_bar = r_bar.try_add(&wi.tensor(wbi)?.after(&s.r_bar)?)?;
    }
    ConjugateSolution::from_arrows(&rho, &rho_bar, r, r_bar)
}

/// Builds the direct sums of `ρ_i` and `ρ̄_i` in `cat` and the summed solution.
pub fn direct_sum_of_solutions(cat: &Category, sols: &[ConjugateSolution]) -> Result<(ConjugateSolution, Vec<Arrow>)> {
    let (_, w) = cat.direct_sum(&sols.iter().map(|s| s.rho.clone()).collect::<Vec<_>>())?;
    let (_, wb) = cat.direct_sum(&sols.iter().map(|s| s.rho_bar.clone()).collect::<Vec<_>>())?;
    Ok((direct_sum_solution(sols, &w, &wb)?, w))
}

/// Solution for the subobject `ρ'` cut out by an isometry `W ∈ (ρ', ρ)`.
///
/// `F = (WW*)•` is an idempotent on `ρ̄`; with `X̄` an isometry onto its
/// range and `Ȳ = X̄*F`: `R' = (Ȳ⊗W*)R`, `R̄' = (W*⊗X̄*)R̄`.
pub fn subobject_solution(cat: &Category, sol: &ConjugateSolution, w: &Arrow) -> Result<ConjugateSolution> {
    if w.dst() != &sol.rho {
        return Err(Error::Endpoint("isometry must land in ρ".into()));
    }
    let p = w.after(&w.adjoint())?;
    let f = arrow_conjugate(&p, sol, sol)?;
    let eig_basis = range_basis(f.mat())?;
    let (rho_bar_sub, xbar) = cat.subobject(&sol.rho_bar, &eig_basis, &format!("{}'", sol.rho_bar.label()))?;
    let ybar = xbar.adjoint().after(&f)?;
    let r = ybar.tensor(&w.adjoint())?.after(&sol.r)?;
    let r_bar = w.adjoint().tensor(&xbar.adjoint())?.after(&sol.r_bar)?;
    ConjugateSolution::from_arrows(w.src(), &rho_bar_sub, r, r_bar)
}

/// Orthonormal basis of the range of a (not necessarily self-adjoint) matrix.
fn range_basis(m: &CMat) -> Result<CMat> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Invalid("SVD failed".into()))?;
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > 1e-9 * smax).collect();
    Ok(CMat::from_fn(m.nrows(), cols.len(), |i, j| u[(i, cols[j])]))
}
