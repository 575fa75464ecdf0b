//! Q-systems `(λ, S, T)`: an isometry `S ∈ (λ, λ²)` that is associative,
//! with a two-sided unit `T ∈ (ι, λ)`.

use serde::Serialize;

use crate::category::{Arrow, Category, Obj};
use crate::conjugation::{self, ConjugateSolution};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::tol;

/// Largest `dim λ^m` the Jones tower will materialize.
pub const DEFAULT_TOWER_CAP: usize = 1024;

#[derive(Clone, Debug)]
pub struct QSystem {
    pub lambda: Obj,
    pub s: Arrow,
    pub t: Arrow,
}

impl QSystem {
    /// `d(φ) = ‖T‖²`, the index of the associated inclusion.
    pub fn index(&self) -> f64 {
        let t = self.t.mat();
        (t.adjoint() * t)[(0, 0)].re
    }

    /// `S' = (U⊗U) S U*`, `T' = U T` for a unitary `U ∈ (λ, λ)`.
    pub fn twisted(&self, u: &Arrow) -> Result<QSystem> {
        let s = u.tensor(u)?.after(&self.s)?.after(&u.adjoint())?;
        let t = u.after(&self.t)?;
        Ok(QSystem { lambda: self.lambda.clone(), s, t })
    }

    /// `λ^n`.
    pub fn power(&self, n: usize) -> Obj {
        self.lambda.power(n)
    }

    /// `R = R̄ = S∘T`, exhibiting λ as a real object.
    pub fn real_solution(&self) -> Result<ConjugateSolution> {
        let r = self.s.after(&self.t)?;
        ConjugateSolution::from_arrows(&self.lambda, &self.lambda, r.clone(), r)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QSystemReport {
    pub isometry_res: f64,
    /// `(1⊗S)S = (S⊗1)S`.
    pub a_res: f64,
    /// Both unit laws for the recovered `T`.
    pub b_res: f64,
    /// `(1⊗S*)(S⊗1) = SS*`.
    pub d_res: f64,
    /// The same identity reached through the terms of `X*X`,
    /// `X = (1⊗S*)(S⊗1) - SS*`, each reduced with a) and b).
    pub d_res_derived: f64,
    /// The smallest singular value of the linear system for `T`, relative
    /// to the largest; zero means `T` is not unique.
    pub t_conditioning: f64,
    pub t_norm_sq: f64,
    pub d_lambda: f64,
    pub irreducible: bool,
    pub ok: bool,
    #[serde(skip)]
    pub t: Option<Arrow>,
}

fn check_lambda(lambda: &Obj, s: &Arrow) -> Result<()> {
    if s.src() != lambda || *s.dst() != lambda.tensor(lambda) {
        return Err(Error::Endpoint(format!("S must lie in ({lambda}, {lambda}.{lambda})")));
    }
    Ok(())
}

/// Solves both halves of the unit law jointly for `T`.
///
/// `S*(1⊗T) = 1` is linear in `T`; the adjoint of `(T*⊗1)S = 1` gives
/// `S*(T⊗1) = 1`.
pub fn recover_t(lambda: &Obj, s: &Arrow) -> Result<(Arrow, f64, f64)> {
    check_lambda(lambda, s)?;
    let n = lambda.dim();
    let unit = Obj::from_parts(lambda, &[]);
    let sa = s.adjoint();
    let one = Arrow::identity(lambda);
    let mut a = CMat::zeros(2 * n * n, n);
    for k in 0..n {
        let ek = Arrow::new(&unit, lambda, linalg::from_columns(n, &[linalg::basis_vec(n, k)]))?;
        let left = sa.after(&ek.left_id(lambda))?;
        let right = sa.after(&ek.right_id(lambda))?;
        let col: CVec = linalg::vec_of(left.mat()).iter().chain(linalg::vec_of(right.mat()).iter()).copied().collect::<Vec<_>>().into();
        a.set_column(k, &col);
    }
    let id = linalg::vec_of(one.mat());
    let b = CMat::from_iterator(2 * n * n, 1, id.iter().chain(id.iter()).copied());
    let sv = linalg::singular_values(&a);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let conditioning = if smax > 0.0 { smin / smax } else { 0.0 };
    let (x, res) = linalg::solve_least_squares(&a, &b)?;
    Ok((Arrow::new(&unit, lambda, x)?, res, conditioning))
}

fn rel(a: &Arrow, b: &Arrow) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Checks the axioms of `(λ, S)` and recovers `T`.
pub fn verify_qsystem(cat: &Category, lambda: &Obj, s: &Arrow) -> Result<QSystemReport> {
    check_lambda(lambda, s)?;
    let tol = tol::residual();
    let one = Arrow::identity(lambda);
    let isometry_res = rel(&s.adjoint().after(s)?, &one);
    let s1 = s.right_id(lambda);
    let one_s = s.left_id(lambda);
    let a_res = rel(&one_s.after(s)?, &s1.after(s)?);
    let (t, _, t_conditioning) = recover_t(lambda, s)?;
    let b1 = s.adjoint().after(&t.left_id(lambda))?;
    let b2 = t.adjoint().right_id(lambda).after(s)?;
    let b_res = rel(&b1, &one).max(rel(&b2, &one));
    let ss = s.after(&s.adjoint())?;
    let lhs = s.adjoint().left_id(lambda).after(&s1)?;
    let d_res = rel(&lhs, &ss);
    // X*X = (S*⊗1)(1⊗SS*)(S⊗1) - (S*⊗1)(1⊗S)SS* - SS*(1⊗S*)(S⊗1) + SS*SS*
    let t1 = s1.adjoint().after(&ss.left_id(lambda))?.after(&s1)?;
    let t2 = s1.adjoint().after(&one_s)?.after(&ss)?;
    let t4 = ss.after(&ss)?;
    let d_res_derived = [&t1, &t2, &t2.adjoint(), &t4].iter().map(|t| rel(t, &ss)).fold(0.0, f64::max);
    let t_norm_sq = (t.mat().adjoint() * t.mat())[(0, 0)].re;
    let d_lambda = conjugation::dim_object(cat, lambda, 0)?;
    let irreducible = cat.hom_dim(&cat.unit(), lambda)? == 1;
    let ok = isometry_res < tol && a_res < tol && b_res < tol && t_conditioning > tol && d_lambda > 1.0 + tol;
    Ok(QSystemReport {
        isometry_res,
        a_res,
        b_res,
        d_res,
        d_res_derived,
        t_conditioning,
        t_norm_sq,
        d_lambda,
        irreducible,
        ok,
        t: Some(t),
    })
}

/// Builds a Q-system from `(λ, S)`, failing when the axioms do not hold.
pub fn qsystem_from_s(cat: &Category, lambda: &Obj, s: Arrow) -> Result<QSystem> {
    let report = verify_qsystem(cat, lambda, &s)?;
    if !report.ok {
        return Err(Error::Invalid(format!(
            "not a Q-system: isometry {:.3e}, a) {:.3e}, b) {:.3e}, d(λ) = {}",
            report.isometry_res, report.a_res, report.b_res, report.d_lambda
        )));
    }
    Ok(QSystem { lambda: lambda.clone(), s, t: report.t.expect("recovered") })
}

/// `λ = ρ̄ρ`, `S = ‖R̄‖⁻¹ 1_ρ̄⊗R̄⊗1_ρ`, `T = ‖R̄‖ R`.
pub fn canonical_qsystem(cat: &Category, sol: &ConjugateSolution) -> Result<QSystem> {
    let st = conjugation::is_standard(cat, sol)?;
    if !st.standard {
        return Err(Error::Invalid(format!("the solution is not standard (gap {:.3e})", st.gap)));
    }
    let d = conjugation::dim_solution(sol);
    if d <= 1.0 + tol::residual() {
        return Err(Error::Invalid(format!("d(λ) = {} but a Q-system needs d(λ) > 1", d * d)));
    }
    let nb = sol.r_bar_norm_sq().sqrt();
    let lambda = sol.rho_bar.tensor(&sol.rho);
    let s = sol.r_bar.left_id(&sol.rho_bar).right_id(&sol.rho);
    let s = s.retype(&lambda, &lambda.tensor(&lambda))?.scale_re(1.0 / nb);
    let t = sol.r.scale_re(nb);
    Ok(QSystem { lambda, s, t })
}

/// Functions on Z₂ inside `Rep(Z₂)`: `λ` the regular representation,
/// `S δ_x = δ_x⊗δ_x`, `T = δ_0 + δ_1`.
pub fn group_algebra_z2() -> Result<(Category, QSystem)> {
    let cat = crate::builtins::rep_z_n(2)?;
    let lambda = cat.object("reg")?;
    let mut s = CMat::zeros(4, 2);
    s[(0, 0)] = linalg::ONE;
    s[(3, 1)] = linalg::ONE;
    let s = Arrow::new(&lambda, &lambda.tensor(&lambda), s)?;
    let t = Arrow::new(&cat.unit(), &lambda, CMat::from_element(2, 1, linalg::ONE))?;
    Ok((cat, QSystem { lambda, s, t }))
}

fn check_power(q: &QSystem, o: &Obj, n: usize) -> Result<()> {
    if *o != q.power(n) {
        return Err(Error::Endpoint(format!("expected λ^{n}, got {o}")));
    }
    Ok(())
}

/// `δ_{r,s}(X) = (S*⊗1_{λ^{s-1}})(1_λ⊗X)(S⊗1_{λ^{r-1}})` for
/// `X ∈ (λ^r, λ^s)`.
pub fn delta(q: &QSystem, x: &Arrow, r: usize, s: usize) -> Result<Arrow> {
    if r == 0 || s == 0 {
        return Err(Error::Invalid("δ_{r,s} needs r, s ≥ 1".into()));
    }
    check_power(q, x.src(), r)?;
    check_power(q, x.dst(), s)?;
    let top = q.s.adjoint().right_id(&q.power(s - 1));
    let bottom = q.s.right_id(&q.power(r - 1));
    top.after(&x.left_id(&q.lambda))?.after(&bottom)
}

/// Residual of `(1_λ⊗Y)(S⊗1_{λ^{r-1}}) = (S⊗1_{λ^{s-1}})Y`, the
/// characterization of the image of δ.
pub fn delta_image_residual(q: &QSystem, y: &Arrow, r: usize, s: usize) -> Result<f64> {
    check_power(q, y.src(), r)?;
    check_power(q, y.dst(), s)?;
    let lhs = y.left_id(&q.lambda).after(&q.s.right_id(&q.power(r - 1)))?;
    let rhs = q.s.right_id(&q.power(s - 1)).after(y)?;
    Ok((&lhs - &rhs).norm() / y.norm().max(1.0))
}

/// `E_0 = ‖T‖⁻² TT*`, `E_1 = SS*`, `E_{i+2} = 1_λ⊗E_i`. `E_i` acts on
/// `λ^{⌊i/2⌋+1}` for even `i` and `λ^{⌊i/2⌋+2}` for odd `i`; smaller
/// projections are embedded into larger powers by `X ↦ X⊗1_λ`.
#[derive(Clone, Debug)]
pub struct JonesTower {
    pub qsystem: QSystem,
    pub projections: Vec<Arrow>,
    pub d: f64,
    pub cap: usize,
}

pub fn tower_level(i: usize) -> usize {
    if i % 2 == 0 {
        i / 2 + 1
    } else {
        i / 2 + 2
    }
}

fn check_cap(q: &QSystem, m: usize, cap: usize) -> Result<()> {
    let dim = (q.lambda.dim() as f64).powi(m as i32);
    if dim > cap as f64 {
        return Err(Error::CapExceeded { required: dim.min(usize::MAX as f64) as usize, cap });
    }
    Ok(())
}

pub fn jones_tower(q: &QSystem, depth: usize, cap: usize) -> Result<JonesTower> {
    check_cap(q, tower_level(depth).max(tower_level(depth.saturating_sub(1))), cap)?;
    let d = q.index();
    let mut projections = vec![q.t.after(&q.t.adjoint())?.scale_re(1.0 / d)];
    if depth >= 1 {
        projections.push(q.s.after(&q.s.adjoint())?);
    }
    for i in 2..=depth {
        let next = projections[i - 2].left_id(&q.lambda);
        projections.push(next);
    }
    Ok(JonesTower { qsystem: q.clone(), projections, d, cap })
}

impl JonesTower {
    /// `E_i` embedded in `(λ^m, λ^m)`.
    pub fn at(&self, i: usize, m: usize) -> Result<Arrow> {
        let level = tower_level(i);
        if m < level {
            return Err(Error::Invalid(format!("E_{i} lives on λ^{level}, not λ^{m}")));
        }
        check_cap(&self.qsystem, m, self.cap)?;
        Ok(self.projections[i].right_id(&self.qsystem.power(m - level)))
    }

    /// `(projection residual, Jones relation residual, commutation residual)`
    /// with the relations `E_iE_{i±1}E_i = d⁻¹E_i` and `E_iE_j = E_jE_i` for
    /// `|i-j| ≥ 2`.
    pub fn residuals(&self) -> Result<TowerReport> {
        let n = self.projections.len();
        let mut projection: f64 = 0.0;
        for p in &self.projections {
            let sq = p.after(p)?;
            projection = projection.max((&sq - p).norm()).max((&p.adjoint() - p).norm());
        }
        let mut relation: f64 = 0.0;
        let mut commutation: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let m = tower_level(i).max(tower_level(j));
                let (ei, ej) = (self.at(i, m)?, self.at(j, m)?);
                if i.abs_diff(j) == 1 {
                    let lhs = ei.after(&ej)?.after(&ei)?;
                    relation = relation.max((&lhs - &ei.scale_re(1.0 / self.d)).norm() * self.d);
                } else {
                    commutation = commutation.max((&ei.after(&ej)? - &ej.after(&ei)?).norm());
                }
            }
        }
        Ok(TowerReport { projection, relation, commutation, lam: 1.0 / self.d })
    }

    /// Residual of `d^{r+s} E_0E_1⋯E_{2s} X E_{2r}⋯E_1E_0 = (1_λ⊗X)E_0` for
    /// `X ∈ (λ^r, λ^s)`, everything realized in `(λ^{r+1}, λ^{s+1})`.
    pub fn chain_identity_residual(&self, x: &Arrow, r: usize, s: usize) -> Result<f64> {
        let q = &self.qsystem;
        check_power(q, x.src(), r)?;
        check_power(q, x.dst(), s)?;
        if 2 * r.max(s) >= self.projections.len() {
            return Err(Error::Invalid(format!("the tower needs depth {}", 2 * r.max(s))));
        }
        let (ml, mr) = (s + 1, r + 1);
        let mut left = Arrow::identity(&q.power(ml));
        for i in 0..=2 * s {
            left = left.after(&self.at(i, ml)?)?;
        }
        let mut right = Arrow::identity(&q.power(mr));
        for i in (0..=2 * r).rev() {
            right = right.after(&self.at(i, mr)?)?;
        }
        let lhs = left.after(&x.right_id(&q.lambda))?.after(&right)?.scale_re(self.d.powi((r + s) as i32));
        let rhs = x.left_id(&q.lambda).after(&self.at(0, mr)?)?;
        Ok((&lhs - &rhs).norm() / rhs.norm().max(x.norm()).max(1e-300))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub projection: f64,
    pub relation: f64,
    pub commutation: f64,
    pub lam: f64,
}

impl TowerReport {
    pub fn max(&self) -> f64 {
        self.projection.max(self.relation).max(self.commutation)
    }
}

#[derive(Clone, Debug)]
pub struct QCenter {
    /// `dim (ι, λ)`.
    pub correspondence_dim: usize,
    /// `dim {Y ∈ (λ,λ) : (1⊗Y)S = SY}`.
    pub solution_dim: usize,
    /// `X ↦ S*(1_λ⊗X)` is injective with image the solution space above.
    pub bijective: bool,
    /// The mirror statement: `X ↦ S*(X⊗1_λ)` onto `{Y : (Y⊗1)S = SY}`.
    pub mirror_bijective: bool,
    /// Basis of `{Y : (Y⊗1)S = SY = (1⊗Y)S}`.
    pub center: Vec<Arrow>,
    /// Images `S*(1⊗X)` of a basis of `(ι, λ)`.
    pub images: Vec<Arrow>,
}

impl QCenter {
    pub fn dimension(&self) -> usize {
        self.center.len()
    }
}

fn solve_in_hom(cat: &Category, lambda: &Obj, maps: &[&dyn Fn(&Arrow) -> Result<Arrow>]) -> Result<Vec<Arrow>> {
    let basis = cat.hom_basis(lambda, lambda)?;
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let mut cols: Vec<CVec> = Vec::new();
    for b in &basis {
        let mut v: Vec<linalg::C64> = Vec::new();
        for f in maps {
            v.extend(linalg::vec_of(f(b)?.mat()).iter().copied());
        }
        cols.push(CVec::from_vec(v));
    }
    let rows = cols[0].len();
    let a = linalg::from_columns(rows, &cols);
    let null = linalg::nullspace(&a, tol::residual());
    null.iter()
        .map(|c| {
            let mut m = CMat::zeros(lambda.dim(), lambda.dim());
            for (k, b) in basis.iter().enumerate() {
                m += b.mat() * c[k];
            }
            Arrow::new(lambda, lambda, m)
        })
        .collect()
}

fn rank(arrows: &[Arrow], tol: f64) -> usize {
    if arrows.is_empty() {
        return 0;
    }
    let cols: Vec<CVec> = arrows.iter().map(|y| linalg::vec_of(y.mat())).collect();
    let sv = linalg::singular_values(&linalg::from_columns(cols[0].len(), &cols));
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > tol * smax.max(1.0)).count()
}

/// The correspondence `X ∈ (ι,λ) ↦ S*(1_λ⊗X)` onto the solutions of
/// `(1⊗Y)S = SY`, its mirror, and the two-sided space where both
/// relations hold.
///
/// The image of `S*(1⊗X)` satisfies `(1⊗Y)S = (1⊗S*)(S⊗1)(1⊗X) = SY` by
/// d); pairing it with `(Y⊗1)S = SY` instead fails already for the
/// canonical Q-system of Hilb C².
pub fn qsystem_center(cat: &Category, q: &QSystem) -> Result<QCenter> {
    let lambda = &q.lambda;
    let tol = tol::residual();
    let left = |y: &Arrow| -> Result<Arrow> { y.right_id(lambda).after(&q.s)?.try_sub(&q.s.after(y)?) };
    let right = |y: &Arrow| -> Result<Arrow> { y.left_id(lambda).after(&q.s)?.try_sub(&q.s.after(y)?) };
    let solutions = solve_in_hom(cat, lambda, &[&right])?;
    let mirror_solutions = solve_in_hom(cat, lambda, &[&left])?;
    let center = solve_in_hom(cat, lambda, &[&left, &right])?;
    let xs = cat.hom_basis(&cat.unit(), lambda)?;
    let images: Vec<Arrow> = xs.iter().map(|x| q.s.adjoint().after(&x.left_id(lambda))).collect::<Result<_>>()?;
    let mirror_images: Vec<Arrow> = xs.iter().map(|x| q.s.adjoint().after(&x.right_id(lambda))).collect::<Result<_>>()?;
    let satisfies = |ys: &[Arrow], f: &dyn Fn(&Arrow) -> Result<Arrow>| {
        ys.iter().all(|y| f(y).map(|r| r.norm() < tol * y.norm().max(1.0)).unwrap_or(false))
    };
    let bijective = satisfies(&images, &right) && rank(&images, tol) == xs.len() && xs.len() == solutions.len();
    let mirror_bijective =
        satisfies(&mirror_images, &left) && rank(&mirror_images, tol) == xs.len() && xs.len() == mirror_solutions.len();
    Ok(QCenter {
        correspondence_dim: xs.len(),
        solution_dim: solutions.len(),
        bijective,
        mirror_bijective,
        center,
        images,
    })
}
