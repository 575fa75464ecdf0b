use conjdim::braiding::{centrality_residual, flip_symmetry, is_unitary, kappa_of};
use conjdim::builtins;
use conjdim::category::{Arrow, Category, Obj};
use conjdim::conjugation::{canonical_solution, dim_solution, standard_solution, standardize, verify_conjugate};
use conjdim::fusion::{self, FusionRing, ObjectVec};
use conjdim::inclusions::{self, FdInclusion};
use conjdim::jones;
use conjdim::linalg::{self, CMat};
use conjdim::qsystem::{self, verify_qsystem};
use conjdim::random::{self, Rng64};
use proptest::prelude::*;

fn random_in(basis: &[Arrow], rng: &mut Rng64) -> Arrow {
    basis.iter().skip(1).fold(basis[0].scale(random::gaussian_complex(rng)), |acc, b| &acc + &b.scale(random::gaussian_complex(rng)))
}

fn hilb_arrow(cat: &Category, m: usize, n: usize, rng: &mut Rng64) -> Arrow {
    Arrow::new(&cat.hilb_space(n).unwrap(), &cat.hilb_space(m).unwrap(), random::gaussian_matrix(rng, m, n)).unwrap()
}

fn d_std(cat: &Category, o: &Obj) -> f64 {
    dim_solution(&standardize(cat, &canonical_solution(cat, o).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interchange_and_adjoint(seed in any::<u64>(), dims in prop::array::uniform6(1usize..4)) {
        let cat = Category::hilb();
        let mut rng = random::rng(seed);
        let [a, b, c, x, y, z] = dims;
        let f = hilb_arrow(&cat, b, a, &mut rng);
        let g = hilb_arrow(&cat, c, b, &mut rng);
        let h = hilb_arrow(&cat, y, x, &mut rng);
        let k = hilb_arrow(&cat, z, y, &mut rng);
        let lhs = g.tensor(&k).unwrap().after(&f.tensor(&h).unwrap()).unwrap();
        let rhs = g.after(&f).unwrap().tensor(&k.after(&h).unwrap()).unwrap();
        prop_assert!(lhs.rel_diff(&rhs) < 1e-12);
        prop_assert!(g.after(&f).unwrap().adjoint().rel_diff(&f.adjoint().after(&g.adjoint()).unwrap()) < 1e-12);
        prop_assert!(f.tensor(&h).unwrap().adjoint().rel_diff(&f.adjoint().tensor(&h.adjoint()).unwrap()) < 1e-12);
        let n = f.norm();
        prop_assert!((f.adjoint().after(&f).unwrap().norm() - n * n).abs() <= 1e-12 * n * n);
    }

    #[test]
    fn dimension_is_additive_and_multiplicative(i in 0usize..3, j in 0usize..3) {
        let cat = builtins::rep_s3();
        let objs = cat.named_objects();
        let (a, b) = (&objs[i % objs.len()], &objs[j % objs.len()]);
        let (da, db) = (d_std(&cat, a), d_std(&cat, b));
        let (sum, _) = cat.direct_sum(&[a.clone(), b.clone()]).unwrap();
        prop_assert!((d_std(&cat, &sum) - da - db).abs() < 1e-8 * (da + db));
        prop_assert!((d_std(&cat, &a.tensor(b)) - da * db).abs() < 1e-8 * da * db);
    }

    #[test]
    fn standard_solution_is_minimal(seed in any::<u64>(), n in 1usize..5) {
        let cat = Category::hilb();
        let o = cat.hilb_space(n).unwrap();
        let base = standard_solution(&cat, &o).unwrap();
        let mut rng = random::rng(seed);
        let y = Arrow::new(&o, &o, random::invertible(&mut rng, n)).unwrap();
        let sol = base.twisted(&y).unwrap();
        prop_assert!(verify_conjugate(&sol).residual_1 < 1e-8);
        let d = n as f64;
        prop_assert!(sol.r_norm_sq() * sol.r_bar_norm_sq() >= d * d * (1.0 - 1e-10));
        prop_assert!((d_std(&cat, &o) - d).abs() < 1e-9 * d);
    }

    #[test]
    fn jones_relations_hold(n in 1usize..6) {
        let cat = Category::hilb();
        let sol = standard_solution(&cat, &cat.hilb_space(n).unwrap()).unwrap();
        let r = jones::verify_jones_relations(&jones::jones_projections(&sol).unwrap()).unwrap();
        prop_assert!(r.max < 1e-10);
        prop_assert!((1.0 / r.lam - (n * n) as f64).abs() < 1e-9 * (n * n) as f64);
    }

    #[test]
    fn twisted_qsystems_satisfy_axioms(seed in any::<u64>(), n in 2usize..4) {
        let cat = Category::hilb();
        let sol = standard_solution(&cat, &cat.hilb_space(n).unwrap()).unwrap();
        let q = qsystem::canonical_qsystem(&cat, &sol).unwrap();
        let mut rng = random::rng(seed);
        let u = Arrow::new(&q.lambda, &q.lambda, random::unitary(&mut rng, q.lambda.dim())).unwrap();
        let tq = q.twisted(&u).unwrap();
        let r = verify_qsystem(&cat, &tq.lambda, &tq.s).unwrap();
        prop_assert!(r.a_res < 1e-10 && r.b_res < 1e-10 && r.d_res_derived < 1e-9);
    }

    #[test]
    fn fusion_rules_are_associative(k in 1usize..6, a in 0usize..6, b in 0usize..6, c in 0usize..6) {
        let ring = FusionRing::su2_level_k(k).unwrap();
        let n = ring.size();
        let (a, b, c) = (ObjectVec::label(a % n), ObjectVec::label(b % n), ObjectVec::label(c % n));
        let ab = ring.tensor(&a, &b).unwrap();
        prop_assert_eq!(ring.tensor(&ab, &c).unwrap(), ring.tensor(&a, &ring.tensor(&b, &c).unwrap()).unwrap());
        // Frobenius reciprocity
        prop_assert_eq!(ring.hom_dim(&ab, &c), ring.hom_dim(&b, &ring.tensor(&ring.conjugate(&a), &c).unwrap()));
        let d = |x: &ObjectVec| fusion::dimension_of(&ring, x).unwrap();
        prop_assert!((d(&ab) - d(&a) * d(&b)).abs() < 1e-9 * d(&ab));
    }

    #[test]
    fn inclusion_basis_reconstructs(
        n_blocks in prop::collection::vec(1usize..3, 1..3),
        raw in prop::collection::vec(prop::collection::vec(0usize..3, 3), 3),
        weights in prop::collection::vec(0.2f64..3.0, 3),
    ) {
        let cols = 2;
        let mut lambda: Vec<Vec<usize>> = n_blocks.iter().enumerate().map(|(a, _)| raw[a][..cols].to_vec()).collect();
        for b in 0..cols {
            if lambda.iter().all(|row| row[b] == 0) {
                lambda[0][b] = 1;
            }
        }
        let m_blocks: Vec<usize> = (0..cols).map(|b| (0..n_blocks.len()).map(|a| lambda[a][b] * n_blocks[a]).sum()).collect();
        prop_assume!(m_blocks.iter().sum::<usize>() <= 6);
        let inc = match FdInclusion::new(n_blocks.clone(), m_blocks, lambda, weights[..cols].to_vec()) {
            Ok(inc) => inc,
            Err(_) => return Ok(()),
        };
        let basis = inclusions::pp_basis(&inc).unwrap();
        let e = inclusions::conditional_expectation(&inc);
        for (i, x) in basis.xi.iter().enumerate() {
            for (j, y) in basis.xi.iter().enumerate() {
                let g = e.apply(&(x.adjoint() * y));
                if i == j {
                    prop_assert!((&g * &g - &g).norm() < 1e-9 && (&g - g.adjoint()).norm() < 1e-9);
                } else {
                    prop_assert!(g.norm() < 1e-9);
                }
            }
        }
        prop_assert!(inclusions::reconstruction_residual(&inc, &basis) < 1e-9);
        prop_assert!(basis.index() >= 1.0 - 1e-9);
        prop_assert!(inclusions::expectation_residuals(&inc, 3, 4).passes(1e-9));
    }

    #[test]
    fn kappa_is_central_for_the_flip(seed in any::<u64>(), i in 0usize..3, j in 0usize..3) {
        let cat = builtins::rep_s3();
        let br = flip_symmetry(&cat).unwrap();
        let objs = cat.named_objects();
        let (rho, sigma) = (objs[i % objs.len()].clone(), objs[j % objs.len()].clone());
        let rho = rho.tensor(&sigma);
        let k = kappa_of(&cat, &br, &rho).unwrap();
        prop_assert!(is_unitary(&k).unwrap());
        let basis = cat.hom_basis(&rho, &rho).unwrap();
        let mut rng = random::rng(seed);
        let t = random_in(&basis, &mut rng);
        prop_assert!(centrality_residual(&cat, &br, &t).unwrap() < 1e-9);
    }

    #[test]
    fn spectral_helpers_agree(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = random::rng(seed);
        let p: CMat = random::positive_definite(&mut rng, n, 0.1);
        let e = linalg::herm_eigen(&p);
        prop_assert!(e.values.iter().all(|&v| v > 0.0));
        prop_assert!((linalg::min_eigenvalue(&p) - e.values.iter().cloned().fold(f64::INFINITY, f64::min)).abs() < 1e-10 * p.norm());
    }
}
