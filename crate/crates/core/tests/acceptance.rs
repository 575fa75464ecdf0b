//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::time::Instant;

use conjdim::builtins;
use conjdim::category::completion::{complete_subobjects, SubobjectTriple};
use conjdim::category::{Arrow, Category, Obj};
use conjdim::conjugation::{
    canonical_solution, dim_solution, left_inverse, solution_from_antilinear, standard_solution, standardize,
};
use conjdim::fusion::{self, ObjectVec};
use conjdim::inclusions::{self, FdInclusion};
use conjdim::jones::{self, IndexClass};
use conjdim::linalg::{self, CMat};
use conjdim::qsystem::{self, QSystem};
use conjdim::random::{self, Rng64};
use num_bigint::BigUint;
use rand::Rng;

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_in(basis: &[Arrow], rng: &mut Rng64) -> Arrow {
    basis.iter().skip(1).fold(basis[0].scale(random::gaussian_complex(rng)), |acc, b| &acc + &b.scale(random::gaussian_complex(rng)))
}

fn d_std(cat: &Category, o: &Obj) -> Result<f64, String> {
    Ok(dim_solution(&standardize(cat, &canonical_solution(cat, o).map_err(err)?).map_err(err)?))
}

fn c1_suq2_dimension() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for q in [0.3, 0.5, 0.9] {
        let start = Instant::now();
        let cat = builtins::suq2(q).map_err(err)?;
        let rho = cat.object("rho").map_err(err)?;
        let sol = solution_from_antilinear(&cat, &rho, &builtins::suq2_j(q)).map_err(err)?;
        let d = dim_solution(&standardize(&cat, &sol).map_err(err)?);
        slowest = slowest.max(start.elapsed().as_secs_f64());
        worst = worst.max((d - (q + 1.0 / q)).abs() / (q + 1.0 / q));
    }
    Ok((worst < 1e-9 && slowest < 0.1, format!("max rel err {worst:.2e}, slowest {:.1} ms", slowest * 1e3)))
}

fn c2_additive_multiplicative() -> Outcome {
    let start = Instant::now();
    let cats = [builtins::hilb(None), builtins::rep_s3(), builtins::rep_z_n(5).map_err(err)?];
    let mut rng = random::rng(2);
    let pick = |cat: &Category, rng: &mut Rng64| -> Result<Obj, String> {
        let named: Vec<Obj> = if cat.kind() == conjdim::category::BackendKind::Hilb {
            (1..4).map(|d| cat.hilb_space(d).unwrap()).collect()
        } else {
            cat.named_objects()
        };
        let small: Vec<Obj> = named.iter().filter(|o| o.dim() <= 2).cloned().collect();
        if rng.random_bool(0.5) {
            Ok(named[rng.random_range(0..named.len())].clone())
        } else {
            Ok(small[rng.random_range(0..small.len())].tensor(&small[rng.random_range(0..small.len())]))
        }
    };
    let (mut add, mut mul) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let cat = &cats[k % 3];
        let (a, b) = (pick(cat, &mut rng)?, pick(cat, &mut rng)?);
        let (da, db) = (d_std(cat, &a)?, d_std(cat, &b)?);
        let (sum, _) = cat.direct_sum(&[a.clone(), b.clone()]).map_err(err)?;
        add = add.max((d_std(cat, &sum)? - da - db).abs() / (da + db));
        mul = mul.max((d_std(cat, &a.tensor(&b))? - da * db).abs() / (da * db));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((add < 1e-8 && mul < 1e-8 && secs < 10.0, format!("additivity {add:.2e}, multiplicativity {mul:.2e}, {secs:.2} s")))
}

fn c3_minimality() -> Outcome {
    let cat = Category::hilb();
    let c3 = cat.hilb_space(3).map_err(err)?;
    let base = standard_solution(&cat, &c3).map_err(err)?;
    let mut rng = random::rng(3);
    let (mut min_product, mut iff_ok, mut unitary_seen) = (f64::INFINITY, true, 0);
    for k in 0..50 {
        let y = if k % 5 == 0 { random::unitary(&mut rng, 3) } else { random::invertible(&mut rng, 3) };
        let sol = base.twisted(&Arrow::new(&c3, &c3, y.clone()).map_err(err)?).map_err(err)?;
        let product = sol.r_norm_sq() * sol.r_bar_norm_sq();
        min_product = min_product.min(product);
        let unitary = (&y * y.adjoint() - linalg::identity(3)).norm() < 1e-8;
        unitary_seen += unitary as usize;
        iff_ok &= ((product - 9.0).abs() < 1e-8) == unitary;
    }
    Ok((
        min_product >= 9.0 - 1e-9 && iff_ok && unitary_seen > 0,
        format!("min product {min_product:.12}, equality iff unitary: {iff_ok} ({unitary_seen} unitary samples)"),
    ))
}

fn c4_jones() -> Outcome {
    let mut cats = vec![builtins::hilb(None), builtins::rep_s3(), builtins::rep_q8(), builtins::rep_z_n(5).map_err(err)?];
    for q in [0.3, 0.5, 0.9, -0.5] {
        cats.push(builtins::suq2(q).map_err(err)?);
    }
    let (mut worst, mut count, mut outside) = (0.0f64, 0, Vec::new());
    for cat in &cats {
        let objs: Vec<Obj> = if cat.kind() == conjdim::category::BackendKind::Hilb {
            (1..5).map(|d| cat.hilb_space(d).unwrap()).collect()
        } else {
            cat.named_objects()
        };
        for o in objs {
            let sol = standard_solution(cat, &o).map_err(err)?;
            let r = jones::verify_jones_relations(&jones::jones_projections(&sol).map_err(err)?).map_err(err)?;
            worst = worst.max(r.max);
            count += 1;
            if jones::index_range_default(1.0 / r.lam) == IndexClass::Outside {
                outside.push(format!("{}:{}", cat.name(), o.label()));
            }
        }
    }
    let fib = fusion::ring_by_name("fibonacci").map_err(err)?;
    let d = fusion::pf_dimension(&fib, &fib.parse_object("tau").map_err(err)?).map_err(err)?.value;
    let d2 = d * d;
    let class = jones::index_range_default(d2);
    let fib_err = (d2 - (3.0 + 5f64.sqrt()) / 2.0).abs();
    Ok((
        worst < 1e-10 && outside.is_empty() && class == IndexClass::Discrete(5) && fib_err < 1e-9,
        format!("{count} solutions, max residual {worst:.2e}, outside {outside:?}; fibonacci d^2 {class}, err {fib_err:.1e}"),
    ))
}

fn random_unitary_in(cat: &Category, o: &Obj, rng: &mut Rng64) -> Result<Arrow, String> {
    let basis = cat.hom_basis(o, o).map_err(err)?;
    let h = random_in(&basis, rng);
    let h = linalg::hermitian_part(h.mat());
    let e = linalg::herm_eigen(&h);
    let phases = CMat::from_fn(e.values.len(), e.values.len(), |i, j| {
        if i == j {
            linalg::c(e.values[i].cos(), e.values[i].sin())
        } else {
            linalg::ZERO
        }
    });
    Arrow::new(o, o, &e.vectors * phases * e.vectors.adjoint()).map_err(err)
}

fn c5_qsystems() -> Outcome {
    let mut bases: Vec<(Category, QSystem)> = Vec::new();
    for d in [2, 3] {
        let hilb = Category::hilb();
        let sol = standard_solution(&hilb, &hilb.hilb_space(d).unwrap()).map_err(err)?;
        let q = qsystem::canonical_qsystem(&hilb, &sol).map_err(err)?;
        bases.push((hilb, q));
    }
    let s3 = builtins::rep_s3();
    let sol = standard_solution(&s3, &s3.object("std").unwrap()).map_err(err)?;
    let q = qsystem::canonical_qsystem(&s3, &sol).map_err(err)?;
    bases.push((s3, q));
    bases.push(qsystem::group_algebra_z2().map_err(err)?);
    let mut rng = random::rng(5);
    let (mut ab, mut dd) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let (cat, q) = &bases[k % bases.len()];
        let u = random_unitary_in(cat, &q.lambda, &mut rng)?;
        let tq = q.twisted(&u).map_err(err)?;
        let r = qsystem::verify_qsystem(cat, &tq.lambda, &tq.s).map_err(err)?;
        ab = ab.max(r.a_res).max(r.b_res);
        dd = dd.max(r.d_res_derived);
    }
    let mut chain = 0.0f64;
    let (z2cat, z2) = qsystem::group_algebra_z2().map_err(err)?;
    let hilb = Category::hilb();
    let sol = standard_solution(&hilb, &hilb.hilb_space(2).unwrap()).map_err(err)?;
    let c2 = qsystem::canonical_qsystem(&hilb, &sol).map_err(err)?;
    for (cat, q) in [(&z2cat, &z2), (&hilb, &c2)] {
        let tower = qsystem::jones_tower(q, 4, 4096).map_err(err)?;
        for r in 0..=2 {
            for s in 0..=2 {
                let basis = cat.hom_basis(&q.power(r), &q.power(s)).map_err(err)?;
                let x = random_in(&basis, &mut rng);
                chain = chain.max(tower.chain_identity_residual(&x, r, s).map_err(err)?);
            }
        }
    }
    Ok((
        ab < 1e-10 && dd < 1e-9 && chain < 1e-9,
        format!("a),b) max {ab:.2e}; derived d) max {dd:.2e}; chain identity max {chain:.2e}"),
    ))
}

fn c6_pimsner_popa() -> Outcome {
    let hilb = Category::hilb();
    let q8 = builtins::rep_q8();
    let s3 = builtins::rep_s3();
    let suq = builtins::suq2(0.5).map_err(err)?;
    let cases: Vec<(&Category, Obj, Obj)> = vec![
        (&hilb, hilb.hilb_space(2).unwrap(), hilb.hilb_space(2).unwrap()),
        (&hilb, hilb.hilb_space(3).unwrap(), hilb.hilb_space(2).unwrap()),
        (&s3, s3.object("std").unwrap(), s3.object("std").unwrap()),
        (&s3, s3.object("std").unwrap(), s3.object("sign").unwrap()),
        (&q8, q8.object("h").unwrap(), q8.object("h").unwrap()),
        (&suq, suq.object("rho").unwrap(), suq.object("rho").unwrap()),
    ];
    let mut rng = random::rng(6);
    let (mut worst, mut sharp) = (f64::INFINITY, 0.0f64);
    for k in 0..100 {
        let (cat, rho, sigma) = &cases[k % cases.len()];
        let sol = standard_solution(cat, rho).map_err(err)?;
        let rs = rho.tensor(sigma);
        let g = random_in(&cat.hom_basis(&rs, &rs).map_err(err)?, &mut rng);
        let x = g.after(&g.adjoint()).map_err(err)?;
        let phi = left_inverse(&sol);
        let bound = phi.raw(&x).map_err(err)?.left_id(rho).scale_re(sol.r_bar_norm_sq());
        worst = worst.min(linalg::min_eigenvalue((&bound - &x).mat()));
        if k < cases.len() {
            let x = sol.r_bar.after(&sol.r_bar.adjoint()).map_err(err)?;
            let bound = phi.raw(&x).map_err(err)?.left_id(rho).scale_re(sol.r_bar_norm_sq());
            sharp = sharp.max(linalg::min_eigenvalue((&bound - &x).mat()).abs());
        }
    }
    Ok((worst >= -1e-9 && sharp < 1e-8, format!("min eigenvalue {worst:.2e}; at X = R̄R̄* {sharp:.2e}")))
}

fn c7_inclusions() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (inc, expect, name) in [(FdInclusion::scalars_in_full(2), 4.0, "C⊂M2"), (FdInclusion::diagonal_in_full(2), 2.0, "diag⊂M2")] {
        let basis = inclusions::pp_basis(&inc).map_err(err)?;
        let r = inclusions::inclusion_conjugate(&inc, &basis);
        let conj = r.first_equation.max(r.second_equation).max(r.intertwining);
        ok &= (r.index - expect).abs() < 1e-9 && r.reconstruction < 1e-10 && conj < 1e-9 && r.ok;
        parts.push(format!("{name}: index {}, reconstruction {:.1e}, conjugate eqs {conj:.1e}", r.index, r.reconstruction));
    }
    Ok((ok, parts.join("; ")))
}

fn c8_growth() -> Outcome {
    let ring = fusion::ring_by_name("su2_fund").map_err(err)?;
    let terms = fusion::growth_sequence(&ring, &ObjectVec::label(1), 6).map_err(err)?;
    let expect: Vec<BigUint> = [1u32, 2, 5, 14, 42, 132].iter().map(|&x| BigUint::from(x)).collect();
    let got: Vec<BigUint> = terms.iter().map(|t| t.exact.clone()).collect();
    let root = terms[5].root;
    let row = terms.iter().map(|t| t.dim.clone()).collect::<Vec<_>>().join(",");
    Ok((got == expect && root <= 2.0, format!("{row}; 132^(1/12) = {root:.12}")))
}

fn c9_non_amenable() -> Outcome {
    let ring = fusion::ring_by_name("a_infinity:2.5").map_err(err)?;
    let rho = ObjectVec::label(1);
    let (mut upper, mut all_not) = (0.0f64, true);
    for depth in 1..=200 {
        let r = fusion::amenability_gap(&ring, &rho, Some(2.5), Some(depth)).map_err(err)?;
        upper = upper.max(r.m_norm_upper);
        all_not &= !r.amenable && r.m_norm_lower <= r.m_norm_upper + 1e-12;
    }
    Ok((upper <= 2.0 + 1e-9 && all_not, format!("max upper bound {upper} over depths 1..=200, verdict NOT amenable: {all_not}")))
}

fn random_projection(n: usize, rng: &mut Rng64) -> CMat {
    let k = rng.random_range(0..=n);
    let u = random::unitary(rng, n);
    let v = linalg::columns(&u, 0..k);
    &v * v.adjoint()
}

fn c10_completion() -> Outcome {
    let cat = Category::hilb();
    let comp = complete_subobjects(&cat);
    let mut rng = random::rng(10);
    let (mut worst, mut norm_exact) = (0.0f64, true);
    let triple = |e: &CMat, f: &CMat, src: &Obj, dst: &Obj, rng: &mut Rng64| -> Result<SubobjectTriple, String> {
        let t = f * random::gaussian_matrix(rng, f.nrows(), e.nrows()) * e;
        SubobjectTriple::new(
            Arrow::new(dst, dst, f.clone()).map_err(err)?,
            Arrow::new(src, dst, t).map_err(err)?,
            Arrow::new(src, src, e.clone()).map_err(err)?,
            1e-12,
        )
        .map_err(err)
    };
    for _ in 0..500 {
        let dims: Vec<usize> = (0..6).map(|_| rng.random_range(1..4)).collect();
        let objs: Vec<Obj> = dims.iter().map(|&d| cat.hilb_space(d).unwrap()).collect();
        let ps: Vec<CMat> = dims.iter().map(|&d| random_projection(d, &mut rng)).collect();
        // (F,T,E): a → b, (G,S,F): b → c; same shape on a' → b' → c'
        let t = triple(&ps[0], &ps[1], &objs[0], &objs[1], &mut rng)?;
        let s = triple(&ps[1], &ps[2], &objs[1], &objs[2], &mut rng)?;
        let t2 = triple(&ps[3], &ps[4], &objs[3], &objs[4], &mut rng)?;
        let s2 = triple(&ps[4], &ps[5], &objs[4], &objs[5], &mut rng)?;
        let st = s.compose(&t, 1e-12).map_err(err)?;
        let direct = s.t.after(&t.t).map_err(err)?;
        worst = worst.max((st.t.mat() - direct.mat()).norm()).max(st.e.rel_diff(&t.e)).max(st.f.rel_diff(&s.f));
        let lhs = s.tensor(&s2).map_err(err)?.compose(&t.tensor(&t2).map_err(err)?, 1e-12).map_err(err)?;
        let rhs = st.tensor(&s2.compose(&t2, 1e-12).map_err(err)?).map_err(err)?;
        worst = worst.max(lhs.rel_diff(&rhs));
        let left_unit = SubobjectTriple::identity(&t.f).compose(&t, 1e-12).map_err(err)?;
        let right_unit = t.compose(&SubobjectTriple::identity(&t.e), 1e-12).map_err(err)?;
        worst = worst.max(left_unit.rel_diff(&t)).max(right_unit.rel_diff(&t));
        let adj = t.adjoint();
        worst = worst.max(adj.f.rel_diff(&t.e)).max(adj.e.rel_diff(&t.f)).max(adj.t.rel_diff(&t.t.adjoint()));
        let star = adj.compose(&t, 1e-12).map_err(err)?;
        let n = t.norm();
        worst = worst.max((star.norm() - n * n).abs() / (n * n).max(1.0));
        norm_exact &= t.norm() == t.t.norm() && comp.embed(&t.t).norm() == t.t.norm();
    }
    Ok((worst < 1e-12 && norm_exact, format!("500 samples, max residual {worst:.2e}, norm identity exact: {norm_exact}")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("SU_q(2) dimension from J", c1_suq2_dimension),
        ("additivity and multiplicativity of d", c2_additive_multiplicative),
        ("minimality of the standard solution", c3_minimality),
        ("Jones relations and index range", c4_jones),
        ("Q-system axioms and chain identity", c5_qsystems),
        ("Pimsner-Popa inequality and sharpness", c6_pimsner_popa),
        ("inclusion index", c7_inclusions),
        ("growth limit (Catalan)", c8_growth),
        ("non-amenability of a_infinity at d = 2.5", c9_non_amenable),
        ("completion axioms", c10_completion),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!("[{}] {:>2}. {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
