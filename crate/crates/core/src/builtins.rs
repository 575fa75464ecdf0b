//! Built-in example categories.
//!
//! Fixed examples live in `data/*.json`; parametrized families are
//! generated here.

use std::f64::consts::PI;

use crate::category::io::category_from_json;
use crate::category::{Category, FreeData};
use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, AntilinearMap, CMat};

pub const REP_S3_JSON: &str = include_str!("../data/rep_s3.json");
pub const REP_Q8_JSON: &str = include_str!("../data/rep_q8.json");

/// Representations of S₃: `triv`, `sign` and the two-dimensional `std`.
pub fn rep_s3() -> Category {
    category_from_json(REP_S3_JSON).expect("bundled Rep(S3) data is valid")
}

/// Representations of the quaternion group: four characters `triv`, `a`,
/// `b`, `c` and the pseudoreal two-dimensional `h`.
pub fn rep_q8() -> Category {
    category_from_json(REP_Q8_JSON).expect("bundled Rep(Q8) data is valid")
}

/// Representations of the cyclic group Z_n: characters `chi0..chi{n-1}`
/// and the regular representation `reg`.
pub fn rep_z_n(n: usize) -> Result<Category> {
    if n == 0 {
        return Err(Error::Invalid("Z_n needs n ≥ 1".into()));
    }
    let mut objects = Vec::new();
    for k in 0..n {
        let w = 2.0 * PI * (k as f64) / (n as f64);
        objects.push((format!("chi{k}"), vec![CMat::from_element(1, 1, c(w.cos(), w.sin()))], Some(true)));
    }
    let shift = CMat::from_fn(n, n, |i, j| if i == (j + 1) % n { linalg::ONE } else { linalg::ZERO });
    objects.push(("reg".to_string(), vec![shift], Some(n == 1)));
    Category::rep_finite_group(&format!("Rep(Z{n})"), 1, vec![vec![(0, n as i64)]], objects)
}

/// `J` for the fundamental representation of SU_q(2): `Je₁ = q⁻¹e₂`, `Je₂ = e₁`.
pub fn suq2_j(q: f64) -> AntilinearMap {
    AntilinearMap { mat: linalg::from_real_rows(2, 2, &[0.0, 1.0, 1.0 / q, 0.0]) }
}

/// `R = Σ e_i ⊗ J⁻¹e_i`, `R̄ = Σ e_i ⊗ Je_i` for a self-conjugate object
/// realized on the same space as its conjugate.
pub fn solution_vectors_from_j(j: &AntilinearMap) -> Result<(CMat, CMat)> {
    let n = j.dim();
    let jinv = j.inverse()?;
    let mut r = CMat::zeros(n * n, 1);
    let mut rb = CMat::zeros(n * n, 1);
    for i in 0..n {
        let e = linalg::basis_vec(n, i);
        let a = jinv.apply(&e);
        let b = j.apply(&e);
        for k in 0..n {
            r[(i * n + k, 0)] += a[k];
            rb[(i * n + k, 0)] += b[k];
        }
    }
    Ok((r, rb))
}

/// The fundamental representation `rho` of SU_q(2) as a free category,
/// `0 < |q| ≤ 1`, with hom data on `rho`, `rho.rho` and the braiding
/// `ε = A·1 + A⁻¹·U`, `A = i√q`, `U` the rank-one projection times `q+q⁻¹`.
pub fn suq2(q: f64) -> Result<Category> {
    if !(q.abs() <= 1.0 && q != 0.0) {
        return Err(Error::Invalid(format!("q must satisfy 0 < |q| ≤ 1, got {q}")));
    }
    let (r, rb) = solution_vectors_from_j(&suq2_j(q))?;
    let u = &r * r.adjoint();
    let mut data = FreeData::default();
    data.conj.insert("rho".into(), "rho".into());
    data.real_signs.insert("rho".into(), if q > 0.0 { 1 } else { -1 });
    data.homs.insert(("ι".into(), "rho.rho".into()), vec![r.clone()]);
    data.homs.insert(("rho.rho".into(), "rho.rho".into()), vec![identity(4), u]);
    data.solutions.insert("rho".into(), (r.clone(), rb));
    if q > 0.0 {
        let a = c(0.0, q.sqrt());
        let us = (&r * r.adjoint()).unscale(q);
        data.braiding.insert(("rho".into(), "rho".into()), identity(4) * a + us * a.inv());
    }
    Category::free(&format!("SU_q(2), q={q}"), vec![("rho".into(), 2, true)], data)
}

/// Hilbert spaces, optionally with `C<d>` preregistered.
pub fn hilb(d: Option<usize>) -> Category {
    match d {
        Some(d) => Category::hilb_with(&[(format!("C{d}").as_str(), d)]),
        None => Category::hilb(),
    }
}

/// Resolves names such as `hilb:3`, `rep_s3`, `rep_q8`, `rep_z_n:5`,
/// `suq2:q=0.5`.
pub fn category_by_name(name: &str) -> Result<Category> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let num = |a: Option<&str>, key: &str| -> Result<f64> {
        let a = a.ok_or_else(|| Error::Invalid(format!("`{head}` needs a parameter")))?;
        let v = a.strip_prefix(key).map(|s| s.trim_start_matches('=')).unwrap_or(a);
        v.parse::<f64>().map_err(|_| Error::Invalid(format!("bad parameter `{a}`")))
    };
    match head {
        "hilb" => Ok(hilb(arg.map(|_| num(arg, "d")).transpose()?.map(|x| x as usize))),
        "rep_s3" => Ok(rep_s3()),
        "rep_q8" => Ok(rep_q8()),
        "rep_z_n" | "rep_z" => rep_z_n(num(arg, "n")? as usize),
        "suq2" => suq2(num(arg, "q")?),
        _ => Err(Error::Invalid(format!("unknown built-in category `{name}`"))),
    }
}

/// Named built-in categories shipped with the crate.
pub const CATEGORY_NAMES: &[(&str, &str)] = &[
    ("hilb:d", "finite dimensional Hilbert spaces, object C<d>"),
    ("rep_s3", "representations of S3"),
    ("rep_q8", "representations of the quaternion group"),
    ("rep_z_n:n", "representations of Z_n with the regular representation"),
    ("suq2:q", "fundamental representation of SU_q(2)"),
];
