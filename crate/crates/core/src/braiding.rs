//! Braidings `ε(ρ, σ) ∈ (ρσ, σρ)`, the central element
//! `κ(ρ) = d(ρ) φ_{ρ,ρ}(ε(ρ,ρ))`, and the braided trace.

use std::collections::HashMap;

use serde::Serialize;

use crate::category::{Arrow, BackendKind, Category, Obj};
use crate::conjugation::{
    self, arrow_conjugate, is_standard, left_inverse, left_product, standard_solution, verify_conjugate,
    verify_weak_conjugate, ConjugateSolution,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::tol;

#[derive(Clone, Debug)]
enum Kind {
    /// Tensor flip of the underlying Hilbert spaces.
    Flip,
    /// Matrices on generator pairs, extended to words by the hexagon rules.
    Table(HashMap<(String, String), CMat>),
}

#[derive(Clone, Debug)]
pub struct Braiding {
    kind: Kind,
    category_id: u64,
    /// All generator matrices are unitary (always true for the flip).
    pub unitary: bool,
}

/// The permutation `x⊗y ↦ y⊗x` from `C^m⊗C^n` to `C^n⊗C^m`.
pub fn swap_matrix(m: usize, n: usize) -> CMat {
    let mut p = CMat::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            p[(j * m + i, i * n + j)] = linalg::ONE;
        }
    }
    p
}

/// The flip, a unitary symmetry of Hilb and Rep(G).
pub fn flip_symmetry(cat: &Category) -> Result<Braiding> {
    match cat.kind() {
        BackendKind::Hilb | BackendKind::RepFiniteGroup => {
            Ok(Braiding { kind: Kind::Flip, category_id: cat.id(), unitary: true })
        }
        _ => Err(Error::Unsupported(format!("{} has no flip symmetry; supply braiding matrices", cat.name()))),
    }
}

/// The braiding recorded with a category: the flip for Hilb and Rep(G),
/// the stored generator matrices for free categories.
pub fn braiding_of(cat: &Category) -> Result<Braiding> {
    match cat.kind() {
        BackendKind::Hilb | BackendKind::RepFiniteGroup => flip_symmetry(cat),
        _ => {
            let data = cat.free_data().expect("free backend");
            if data.braiding.is_empty() {
                return Err(Error::Unsupported(format!("{} carries no braiding data", cat.name())));
            }
            from_generators(cat, data.braiding.clone())
        }
    }
}

/// A braiding given on generator pairs of a free category.
pub fn from_generators(cat: &Category, table: HashMap<(String, String), CMat>) -> Result<Braiding> {
    let mut unitary = true;
    for ((a, b), m) in &table {
        let (oa, ob) = (cat.object(a)?, cat.object(b)?);
        let n = oa.dim() * ob.dim();
        if m.shape() != (n, n) {
            return Err(Error::Shape(format!("ε({a},{b}) must be {n}×{n}")));
        }
        linalg::inverse(m)?;
        unitary &= (m.adjoint() * m - CMat::identity(n, n)).norm() < tol::residual() * (n as f64).sqrt();
    }
    Ok(Braiding { kind: Kind::Table(table), category_id: cat.id(), unitary })
}

impl Braiding {
    pub fn is_flip(&self) -> bool {
        matches!(self.kind, Kind::Flip)
    }

    /// `ε(ρ, σ) ∈ (ρσ, σρ)`.
    pub fn epsilon(&self, rho: &Obj, sigma: &Obj) -> Result<Arrow> {
        if rho.category_id() != self.category_id || sigma.category_id() != self.category_id {
            return Err(Error::BackendMismatch);
        }
        let src = rho.tensor(sigma);
        let dst = sigma.tensor(rho);
        match &self.kind {
            Kind::Flip => Arrow::new(&src, &dst, swap_matrix(rho.dim(), sigma.dim())),
            Kind::Table(t) => self.table_epsilon(t, rho, sigma),
        }
    }

    fn table_epsilon(&self, t: &HashMap<(String, String), CMat>, rho: &Obj, sigma: &Obj) -> Result<Arrow> {
        let (fr, fs) = (rho.factors(), sigma.factors());
        if fr.is_empty() || fs.is_empty() {
            return Ok(Arrow::identity(&rho.tensor(sigma)));
        }
        if fr.len() > 1 {
            // ε(ρ₁ρ₂, σ) = (ε(ρ₁,σ)⊗1)(1⊗ε(ρ₂,σ))
            let r1 = Obj::from_parts(rho, &fr[..1]);
            let r2 = Obj::from_parts(rho, &fr[1..]);
            let a = self.table_epsilon(t, &r1, sigma)?.right_id(&r2);
            let b = self.table_epsilon(t, &r2, sigma)?.left_id(&r1);
            return a.after(&b);
        }
        if fs.len() > 1 {
            // ε(ρ, σ₁σ₂) = (1⊗ε(ρ,σ₂))(ε(ρ,σ₁)⊗1)
            let s1 = Obj::from_parts(sigma, &fs[..1]);
            let s2 = Obj::from_parts(sigma, &fs[1..]);
            let a = self.table_epsilon(t, rho, &s2)?.left_id(&s1);
            let b = self.table_epsilon(t, rho, &s1)?.right_id(&s2);
            return a.after(&b);
        }
        let key = (fr[0].label.clone(), fs[0].label.clone());
        let m = t.get(&key).ok_or_else(|| Error::MissingHom { src: rho.tensor(sigma).label(), dst: sigma.tensor(rho).label() })?;
        Arrow::new(&rho.tensor(sigma), &sigma.tensor(rho), m.clone())
    }

    /// `ε(ρ, σ)⁻¹ ∈ (σρ, ρσ)`.
    pub fn epsilon_inverse(&self, rho: &Obj, sigma: &Obj) -> Result<Arrow> {
        let e = self.epsilon(rho, sigma)?;
        Arrow::new(e.dst(), e.src(), linalg::inverse(e.mat())?)
    }

    /// `‖ε(ρ',σ')(T⊗S) - (S⊗T)ε(ρ,σ)‖` relative, for `T ∈ (ρ,ρ')`, `S ∈ (σ,σ')`.
    pub fn naturality_residual(&self, t: &Arrow, s: &Arrow) -> Result<f64> {
        let lhs = self.epsilon(t.dst(), s.dst())?.after(&t.tensor(s)?)?;
        let rhs = s.tensor(t)?.after(&self.epsilon(t.src(), s.src())?)?;
        Ok((&lhs - &rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300))
    }

    /// `‖ε(σ,ρ)ε(ρ,σ) - 1‖`.
    pub fn symmetry_residual(&self, rho: &Obj, sigma: &Obj) -> Result<f64> {
        let sq = self.epsilon(sigma, rho)?.after(&self.epsilon(rho, sigma)?)?;
        Ok((&sq - &Arrow::identity(&rho.tensor(sigma))).norm())
    }

    /// Braid relation on `ρστ`:
    /// `(ε(σ,τ)⊗1)(1⊗ε(ρ,τ))(ε(ρ,σ)⊗1) = (1⊗ε(ρ,σ))(ε(ρ,τ)⊗1)(1⊗ε(σ,τ))`.
    pub fn yang_baxter_residual(&self, rho: &Obj, sigma: &Obj, tau: &Obj) -> Result<f64> {
        let lhs = self
            .epsilon(sigma, tau)?
            .right_id(rho)
            .after(&self.epsilon(rho, tau)?.left_id(sigma))?
            .after(&self.epsilon(rho, sigma)?.right_id(tau))?;
        let rhs = self
            .epsilon(rho, sigma)?
            .left_id(tau)
            .after(&self.epsilon(rho, tau)?.right_id(sigma))?
            .after(&self.epsilon(sigma, tau)?.left_id(rho))?;
        Ok((&lhs - &rhs).norm() / lhs.norm().max(1e-300))
    }

    /// `‖ε(ρ,σ)*ε(ρ,σ) - 1‖`.
    pub fn unitarity_residual(&self, rho: &Obj, sigma: &Obj) -> Result<f64> {
        let e = self.epsilon(rho, sigma)?;
        Ok((&e.adjoint().after(&e)? - &Arrow::identity(&rho.tensor(sigma))).norm())
    }
}

/// `κ(ρ) = d(ρ) φ_{ρ,ρ}(ε(ρ,ρ))` for the standard left inverse given by
/// `sol`, i.e. `(R*⊗1_ρ)(1_ρ̄⊗ε(ρ,ρ))(R⊗1_ρ) · ‖R̄‖/‖R‖`.
pub fn kappa(cat: &Category, br: &Braiding, sol: &ConjugateSolution) -> Result<Arrow> {
    let st = is_standard(cat, sol)?;
    if !st.standard {
        return Err(Error::Invalid(format!("κ needs a standard solution (gap {:.3e})", st.gap)));
    }
    let d = conjugation::dim_solution(sol);
    let e = br.epsilon(&sol.rho, &sol.rho)?;
    Ok(left_inverse(sol).apply(&e)?.scale_re(d))
}

/// `κ(ρ)` from the standard solution of `ρ`.
pub fn kappa_of(cat: &Category, br: &Braiding, rho: &Obj) -> Result<Arrow> {
    if rho.is_unit() {
        return Ok(Arrow::identity(rho));
    }
    kappa(cat, br, &standard_solution(cat, rho)?)
}

/// `‖Tκ(ρ) - κ(σ)T‖` relative, for `T ∈ (ρ, σ)`.
pub fn centrality_residual(cat: &Category, br: &Braiding, t: &Arrow) -> Result<f64> {
    let kr = kappa_of(cat, br, t.src())?;
    let ks = kappa_of(cat, br, t.dst())?;
    let lhs = t.after(&kr)?;
    let rhs = ks.after(t)?;
    Ok((&lhs - &rhs).norm() / t.norm().max(1e-300))
}

/// `‖κ(ρ₁ρ₂) - (κ(ρ₁)⊗κ(ρ₂))ε(ρ₂,ρ₁)ε(ρ₁,ρ₂)‖` relative.
pub fn kappa_product_residual(cat: &Category, br: &Braiding, rho1: &Obj, rho2: &Obj) -> Result<f64> {
    let k12 = kappa_of(cat, br, &rho1.tensor(rho2))?;
    let k1 = kappa_of(cat, br, rho1)?;
    let k2 = kappa_of(cat, br, rho2)?;
    let double = br.epsilon(rho2, rho1)?.after(&br.epsilon(rho1, rho2)?)?;
    let rhs = k1.tensor(&k2)?.after(&double)?;
    Ok((&k12 - &rhs).norm() / rhs.norm().max(1e-300))
}

/// `‖κ(ρ₁ρ₂) - κ(ρ₁)⊗κ(ρ₂)‖` relative; zero for symmetries.
pub fn kappa_multiplicativity_defect(cat: &Category, br: &Braiding, rho1: &Obj, rho2: &Obj) -> Result<f64> {
    let k12 = kappa_of(cat, br, &rho1.tensor(rho2))?;
    let rhs = kappa_of(cat, br, rho1)?.tensor(&kappa_of(cat, br, rho2)?)?;
    Ok((&k12 - &rhs).norm() / rhs.norm().max(1e-300))
}

pub fn is_unitary(a: &Arrow) -> Result<bool> {
    let one = Arrow::identity(a.src());
    Ok((&a.adjoint().after(a)? - &one).norm() < tol::residual() * one.norm().max(1.0)
        && (&a.after(&a.adjoint())? - &Arrow::identity(a.dst())).norm() < tol::residual() * one.norm().max(1.0))
}

/// `κ•(ρ) = κ(ρ̄)•`, computed with the swapped standard solution of ρ̄.
pub fn kappa_bullet(cat: &Category, br: &Braiding, sol: &ConjugateSolution) -> Result<Arrow> {
    let swapped = sol.swapped();
    let k_bar = kappa(cat, br, &swapped)?;
    arrow_conjugate(&k_bar, &swapped, &swapped)
}

#[derive(Clone, Debug, Serialize)]
pub struct BraidConjugateReport {
    /// `ε(ρ̄,ρ)R` with `R` as partner defines a conjugate of ρ̄.
    pub conjugate_ok: bool,
    /// `ε^{-1*}(ρ̄,ρ)R = (κ(ρ)*⊗1_ρ̄)R̄`.
    pub inverse_adjoint_residual: f64,
    /// `ε(ρ̄,ρ)R = (κ•(ρ)^{-1*}⊗1_ρ̄)R̄`.
    pub bullet_residual: f64,
    pub kappa_unitary: bool,
    pub braiding_unitary: bool,
    /// Standardness of the transported solution, checked when κ is unitary.
    pub transported_standard: Option<bool>,
}

/// Transported conjugate `ε(ρ̄,ρ)R` for ρ̄ and the two identities relating
/// it to `R̄` through κ.
pub fn verify_braid_conjugate(cat: &Category, br: &Braiding, sol: &ConjugateSolution) -> Result<BraidConjugateReport> {
    let k = kappa(cat, br, sol)?;
    let e = br.epsilon(&sol.rho_bar, &sol.rho)?;
    let r_new = e.after(&sol.r)?;
    let candidate = ConjugateSolution::from_arrows(&sol.rho_bar, &sol.rho, r_new.clone(), sol.r.clone())?;
    let weak = verify_weak_conjugate(cat, &candidate)?;
    let transported = weak.corrected_solution.clone();
    let conjugate_ok = weak.ok && transported.as_ref().map(|s| verify_conjugate(s).ok).unwrap_or(false);

    let einv_adj = br.epsilon_inverse(&sol.rho_bar, &sol.rho)?.adjoint();
    let lhs = einv_adj.after(&sol.r)?;
    let rhs = k.adjoint().right_id(&sol.rho_bar).after(&sol.r_bar)?;
    let inverse_adjoint_residual = (&lhs - &rhs).norm() / rhs.norm().max(1e-300);

    let kb = kappa_bullet(cat, br, sol)?;
    let kb_inv_adj = Arrow::new(kb.src(), kb.dst(), linalg::inverse(kb.mat())?.adjoint())?;
    let rhs = kb_inv_adj.right_id(&sol.rho_bar).after(&sol.r_bar)?;
    let bullet_residual = (&r_new - &rhs).norm() / rhs.norm().max(1e-300);

    let kappa_unitary = is_unitary(&k)?;
    let transported_standard = match (&transported, kappa_unitary) {
        (Some(t), true) => Some(is_standard(cat, t)?.standard),
        _ => None,
    };
    Ok(BraidConjugateReport {
        conjugate_ok,
        inverse_adjoint_residual,
        bullet_residual,
        kappa_unitary,
        braiding_unitary: br.unitary,
        transported_standard,
    })
}

/// `(S, T)_ε = R̄*∘ε(ρ̄,ρ)∘(1_ρ̄⊗S*T)∘R` for `S, T ∈ (ρ, ρ)`; any solution.
pub fn epsilon_trace(s: &Arrow, t: &Arrow, br: &Braiding, sol: &ConjugateSolution) -> Result<C64> {
    let st = s.adjoint().after(t)?;
    if st.src() != &sol.rho {
        return Err(Error::Endpoint("S, T must be endomorphisms of the solution's object".into()));
    }
    let v = sol.r_bar.adjoint().after(&br.epsilon(&sol.rho_bar, &sol.rho)?)?.after(&st.left_id(&sol.rho_bar))?.after(&sol.r)?;
    Ok(v.scalar().expect("scalar"))
}

/// `(S, Tκ(ρ)⁻¹)` with the positive trace of a standard solution.
pub fn epsilon_trace_via_kappa(cat: &Category, s: &Arrow, t: &Arrow, br: &Braiding, standard: &ConjugateSolution) -> Result<C64> {
    let k = kappa(cat, br, standard)?;
    let kinv = Arrow::new(k.src(), k.dst(), linalg::inverse(k.mat())?)?;
    left_product(s, &t.after(&kinv)?, standard)
}

/// Residual of recovering `φ_{ρ̄,ρ̄}(R̄R̄*)` from `φ_{ρ,ρ}(ε(ρ,ρ))`:
/// `(1_ρ̄⊗R̄*)(ε(ρ,ρ̄)⊗1_ρ̄)(φ(ε(ρ,ρ))⊗1_{ρ̄ρ̄})(R̄⊗1_ρ̄)`.
pub fn left_inverse_reconstruction_residual(br: &Braiding, sol: &ConjugateSolution) -> Result<f64> {
    let phi = left_inverse(sol);
    let (rho, rho_bar) = (&sol.rho, &sol.rho_bar);
    let direct = phi.apply(&sol.r_bar.after(&sol.r_bar.adjoint())?)?;
    let pe = phi.apply(&br.epsilon(rho, rho)?)?;
    let rebuilt = sol
        .r_bar
        .adjoint()
        .left_id(rho_bar)
        .after(&br.epsilon(rho, rho_bar)?.right_id(rho_bar))?
        .after(&pe.right_id(&rho_bar.tensor(rho_bar)))?
        .after(&sol.r_bar.right_id(rho_bar))?;
    Ok((&direct - &rebuilt).norm() / direct.norm().max(1e-300))
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop44Report {
    pub kappa_unitary: bool,
    /// `φ_{ρ,ρ}(ε(ρ,ρ))` is a multiple of `1_ρ`.
    pub scalar: bool,
    /// Distance of `φ(ε)` from the scalars, relative.
    pub scalar_defect: f64,
    /// The sufficient condition holds (κ unitary and `φ(ε)` scalar);
    /// `None` when κ is not unitary and nothing can be concluded.
    pub verdict: Option<bool>,
    /// Independent check through the density pair.
    pub is_standard: bool,
}

/// Sufficient condition for the left inverse of `sol` to be standard.
pub fn prop44_standardness(cat: &Category, br: &Braiding, sol: &ConjugateSolution) -> Result<Prop44Report> {
    let phi = left_inverse(sol);
    let pe = phi.apply(&br.epsilon(&sol.rho, &sol.rho)?)?;
    let n = sol.rho.dim().max(1) as f64;
    let mean = linalg::trace(pe.mat()) / n;
    let scalar_defect = (pe.mat() - CMat::identity(pe.mat().nrows(), pe.mat().ncols()) * mean).norm() / pe.mat().norm().max(1e-300);
    let scalar = scalar_defect < tol::residual();
    let k = kappa_of(cat, br, &sol.rho)?;
    let kappa_unitary = is_unitary(&k)?;
    let verdict = if kappa_unitary { Some(scalar) } else { None };
    let is_standard = is_standard(cat, sol)?.standard;
    Ok(Prop44Report { kappa_unitary, scalar, scalar_defect, verdict, is_standard })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::conjugation::canonical_solution;
    use crate::random;

    #[test]
    fn flip_on_c2_is_swap() {
        let cat = Category::hilb();
        let c2 = cat.hilb_space(2).unwrap();
        let br = flip_symmetry(&cat).unwrap();
        let e = br.epsilon(&c2, &c2).unwrap();
        let expected = linalg::from_real_rows(
            4,
            4,
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        );
        assert_eq!(e.mat(), &expected);
        let c3 = cat.hilb_space(3).unwrap();
        assert!(br.symmetry_residual(&c2, &c3).unwrap() < 1e-15);
        assert!(br.yang_baxter_residual(&c2, &c3, &c2).unwrap() < 1e-15);
    }

    #[test]
    fn flip_is_natural_on_rep_s3() {
        let s3 = builtins::rep_s3();
        let br = flip_symmetry(&s3).unwrap();
        let mut rng = random::rng(31);
        let std = s3.object("std").unwrap();
        let ss = s3.object("std.std").unwrap();
        let sign = s3.object("sign").unwrap();
        let pairs = [(std.clone(), std.clone()), (ss.clone(), ss.clone()), (sign.clone(), std.tensor(&sign))];
        for (a, b) in pairs {
            let basis = s3.hom_basis(&a, &b).unwrap();
            let t = basis.iter().fold(Arrow::zero(&a, &b), |acc, x| &acc + &x.scale(random::gaussian_complex(&mut rng)));
            let basis = s3.hom_basis(&ss, &ss).unwrap();
            let s = basis.iter().fold(Arrow::zero(&ss, &ss), |acc, x| &acc + &x.scale(random::gaussian_complex(&mut rng)));
            assert!(br.naturality_residual(&t, &s).unwrap() < 1e-10);
        }
        assert!(flip_symmetry(&builtins::suq2(0.5).unwrap()).is_err());
    }

    #[test]
    fn suq2_braiding_is_natural_and_braided() {
        let cat = builtins::suq2(0.5).unwrap();
        let br = braiding_of(&cat).unwrap();
        assert!(!br.unitary);
        let rho = cat.object("rho").unwrap();
        let rr = rho.tensor(&rho);
        assert!(br.yang_baxter_residual(&rho, &rho, &rho).unwrap() < 1e-12);
        for t in cat.hom_basis(&rr, &rr).unwrap() {
            assert!(br.naturality_residual(&t, &Arrow::identity(&rho)).unwrap() < 1e-12);
            assert!(br.naturality_residual(&Arrow::identity(&rho), &t).unwrap() < 1e-12);
        }
        let r = cat.hom_basis(&cat.unit(), &rr).unwrap()[0].clone();
        assert!(br.naturality_residual(&r, &Arrow::identity(&rho)).unwrap() < 1e-12);
        assert!(br.symmetry_residual(&rho, &rho).unwrap() > 0.1);
        // hexagon extension against the direct composite
        let e = br.epsilon(&rr, &rho).unwrap();
        let direct = br.epsilon(&rho, &rho).unwrap().right_id(&rho).after(&br.epsilon(&rho, &rho).unwrap().left_id(&rho)).unwrap();
        assert!(e.rel_diff(&direct) < 1e-15);
    }

    #[test]
    fn kappa_examples() {
        let cat = Category::hilb();
        let br = flip_symmetry(&cat).unwrap();
        for n in 1..4 {
            let c = cat.hilb_space(n).unwrap();
            let k = kappa(&cat, &br, &canonical_solution(&cat, &c).unwrap()).unwrap();
            assert!(k.rel_diff(&Arrow::identity(&c)) < 1e-14);
        }
        assert!(kappa_of(&cat, &br, &cat.unit()).unwrap().rel_diff(&Arrow::identity(&cat.unit())) < 1e-15);
        let c2 = cat.hilb_space(2).unwrap();
        let y = Arrow::new(&c2, &c2, linalg::from_real_rows(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let bent = canonical_solution(&cat, &c2).unwrap().twisted(&y).unwrap();
        assert!(kappa(&cat, &br, &bent).is_err());
    }

    #[test]
    fn kappa_products() {
        let s3 = builtins::rep_s3();
        let br = flip_symmetry(&s3).unwrap();
        let std = s3.object("std").unwrap();
        let sign = s3.object("sign").unwrap();
        assert!(kappa_product_residual(&s3, &br, &std, &sign).unwrap() < 1e-9);
        assert!(kappa_multiplicativity_defect(&s3, &br, &std, &std).unwrap() < 1e-9);
        let cat = builtins::suq2(0.5).unwrap();
        let br = braiding_of(&cat).unwrap();
        let rho = cat.object("rho").unwrap();
        assert!(kappa_product_residual(&cat, &br, &rho, &rho).unwrap() < 1e-9);
        assert!(kappa_multiplicativity_defect(&cat, &br, &rho, &rho).unwrap() > 1e-3);
    }

    #[test]
    fn kappa_is_central_with_matching_eigenvalues() {
        let cat = builtins::suq2(0.5).unwrap();
        let br = braiding_of(&cat).unwrap();
        let rho = cat.object("rho").unwrap();
        let rr = rho.tensor(&rho);
        let k = kappa_of(&cat, &br, &rho).unwrap();
        let mu = k.mat()[(0, 0)];
        assert!(k.rel_diff(&Arrow::identity(&rho).scale(mu)) < 1e-10);
        for t in cat.hom_basis(&rr, &rr).unwrap() {
            assert!(centrality_residual(&cat, &br, &t).unwrap() < 1e-9);
        }
        let r = cat.hom_basis(&cat.unit(), &rr).unwrap()[0].clone();
        assert!(centrality_residual(&cat, &br, &r).unwrap() < 1e-9);
        // κ(ρρ) = 1 on the copy of ι inside ρρ
        let krr = kappa_of(&cat, &br, &rr).unwrap();
        let e_unit = r.after(&r.adjoint()).unwrap().scale_re(1.0 / r.norm().powi(2));
        let on_unit = krr.after(&e_unit).unwrap();
        assert!(on_unit.rel_diff(&e_unit) < 1e-9);
    }

    #[test]
    fn braid_conjugate_identities() {
        let cat = Category::hilb();
        let br = flip_symmetry(&cat).unwrap();
        let c3 = cat.hilb_space(3).unwrap();
        let rep = verify_braid_conjugate(&cat, &br, &canonical_solution(&cat, &c3).unwrap()).unwrap();
        assert!(rep.conjugate_ok && rep.kappa_unitary && rep.transported_standard == Some(true));
        assert!(rep.inverse_adjoint_residual < 1e-14 && rep.bullet_residual < 1e-14);

        let q8 = builtins::rep_q8();
        let br = flip_symmetry(&q8).unwrap();
        let h = q8.object("h").unwrap();
        let rep = verify_braid_conjugate(&q8, &br, &standard_solution(&q8, &h).unwrap()).unwrap();
        assert!(rep.conjugate_ok && rep.kappa_unitary && rep.inverse_adjoint_residual < 1e-9 && rep.bullet_residual < 1e-9);

        let cat = builtins::suq2(0.5).unwrap();
        let br = braiding_of(&cat).unwrap();
        let rho = cat.object("rho").unwrap();
        let rep = verify_braid_conjugate(&cat, &br, &standard_solution(&cat, &rho).unwrap()).unwrap();
        assert!(rep.conjugate_ok, "{rep:?}");
        assert!(rep.inverse_adjoint_residual < 1e-9 && rep.bullet_residual < 1e-9, "{rep:?}");
    }

    #[test]
    fn unitary_braiding_gives_unitary_kappa() {
        let s3 = builtins::rep_s3();
        let br = flip_symmetry(&s3).unwrap();
        for w in ["std", "std.std", "sign.std"] {
            let k = kappa_of(&s3, &br, &s3.object(w).unwrap()).unwrap();
            assert!(is_unitary(&k).unwrap());
        }
    }

    #[test]
    fn epsilon_trace_examples() {
        let cat = Category::hilb();
        let br = flip_symmetry(&cat).unwrap();
        let c2 = cat.hilb_space(2).unwrap();
        let sol = canonical_solution(&cat, &c2).unwrap();
        let one = Arrow::identity(&c2);
        assert!((epsilon_trace(&one, &one, &br, &sol).unwrap() - linalg::r(2.0)).norm() < 1e-14);
        let mut rng = random::rng(32);
        let y = Arrow::new(&c2, &c2, random::invertible(&mut rng, 2)).unwrap();
        let other = sol.twisted(&y).unwrap();
        for _ in 0..10 {
            let s = Arrow::new(&c2, &c2, random::gaussian_matrix(&mut rng, 2, 2)).unwrap();
            let t = Arrow::new(&c2, &c2, random::gaussian_matrix(&mut rng, 2, 2)).unwrap();
            let a = epsilon_trace(&s, &t, &br, &sol).unwrap();
            let b = epsilon_trace(&s, &t, &br, &other).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
            let c = epsilon_trace(&t.adjoint(), &s.adjoint(), &br, &sol).unwrap();
            assert!((a - c).norm() < 1e-10 * a.norm().max(1.0));
            let via = epsilon_trace_via_kappa(&cat, &s, &t, &br, &sol).unwrap();
            assert!((a - via).norm() < 1e-10 * a.norm().max(1.0));
        }
        let c3 = cat.hilb_space(3).unwrap();
        let sol3 = canonical_solution(&cat, &c3).unwrap();
        let prod = conjugation::product_solution(&sol, &sol3).unwrap();
        let s = Arrow::new(&c2, &c2, random::gaussian_matrix(&mut rng, 2, 2)).unwrap();
        let t = Arrow::new(&c2, &c2, random::gaussian_matrix(&mut rng, 2, 2)).unwrap();
        let s2 = Arrow::new(&c3, &c3, random::gaussian_matrix(&mut rng, 3, 3)).unwrap();
        let t2 = Arrow::new(&c3, &c3, random::gaussian_matrix(&mut rng, 3, 3)).unwrap();
        let lhs = epsilon_trace(&s.tensor(&s2).unwrap(), &t.tensor(&t2).unwrap(), &br, &prod).unwrap();
        let rhs = epsilon_trace(&s, &t, &br, &sol).unwrap() * epsilon_trace(&s2, &t2, &br, &sol3).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn epsilon_trace_on_suq2() {
        let cat = builtins::suq2(0.5).unwrap();
        let br = braiding_of(&cat).unwrap();
        let rho = cat.object("rho").unwrap();
        let st = standard_solution(&cat, &rho).unwrap();
        let raw = canonical_solution(&cat, &rho).unwrap();
        let one = Arrow::identity(&rho);
        let a = epsilon_trace(&one, &one, &br, &st).unwrap();
        let b = epsilon_trace(&one, &one, &br, &raw).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm());
        let via = epsilon_trace_via_kappa(&cat, &one, &one, &br, &st).unwrap();
        assert!((a - via).norm() < 1e-10 * a.norm());
    }

    #[test]
    fn left_inverse_determined_by_braiding() {
        let cat = Category::hilb();
        let br = flip_symmetry(&cat).unwrap();
        let c3 = cat.hilb_space(3).unwrap();
        let mut rng = random::rng(33);
        for _ in 0..5 {
            let y = Arrow::new(&c3, &c3, random::invertible(&mut rng, 3)).unwrap();
            let sol = canonical_solution(&cat, &c3).unwrap().twisted(&y).unwrap();
            assert!(left_inverse_reconstruction_residual(&br, &sol).unwrap() < 1e-10);
        }
        let q = builtins::suq2(0.3).unwrap();
        let br = braiding_of(&q).unwrap();
        let rho = q.object("rho").unwrap();
        assert!(left_inverse_reconstruction_residual(&br, &canonical_solution(&q, &rho).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn prop44_examples() {
        let cat = Category::hilb();
        let br = flip_symmetry(&cat).unwrap();
        let c2 = cat.hilb_space(2).unwrap();
        let sol = canonical_solution(&cat, &c2).unwrap();
        let r = prop44_standardness(&cat, &br, &sol).unwrap();
        assert_eq!(r.verdict, Some(true));
        assert!(r.is_standard);
        let y = Arrow::new(&c2, &c2, linalg::from_real_rows(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let r = prop44_standardness(&cat, &br, &sol.twisted(&y).unwrap()).unwrap();
        assert_eq!(r.verdict, Some(false));
        assert!(!r.is_standard);
        let q8 = builtins::rep_q8();
        let br = flip_symmetry(&q8).unwrap();
        let h = q8.object("h").unwrap();
        let r = prop44_standardness(&q8, &br, &canonical_solution(&q8, &h).unwrap()).unwrap();
        assert_eq!(r.verdict, Some(true));
    }
}
