//! Dense complex matrix kernel.
//!
//! Everything concrete in the crate is a small `DMatrix<Complex64>`; this
//! module adds the handful of operations nalgebra does not provide in the
//! form we need (Kronecker convention, Hermitian functional calculus,
//! geometric mean, Perron-Frobenius vectors, antilinear maps).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> CMat {
    assert_eq!(rows * cols, entries.len());
    CMat::from_fn(rows, cols, |i, j| r(entries[i * cols + j]))
}

/// Kronecker product with `(a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l]`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMat::zeros(ra * rb, ca * cb);
    for j in 0..ca {
        for i in 0..ra {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for l in 0..cb {
                for k in 0..rb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list, left to right. The empty product is `[[1]]`.
pub fn kron_all<'a>(mats: impl IntoIterator<Item = &'a CMat>) -> CMat {
    mats.into_iter().fold(identity(1), |acc, m| kron(&acc, m))
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().sum()
}

pub fn fro_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt inner product `Tr(a* b)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Operator (spectral) norm.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if a.nrows() == 1 || a.ncols() == 1 {
        return fro_norm(a);
    }
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// `‖a - a*‖ / max(‖a‖, 1)` in Frobenius norm.
pub fn hermitian_defect(a: &CMat) -> f64 {
    fro_norm(&(a - a.adjoint())) / fro_norm(a).max(1.0)
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.is_square() && hermitian_defect(a) <= tol
}

/// Relative distance `‖a-b‖ / max(‖a‖,‖b‖,1)` in Frobenius norm.
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    fro_norm(&(a - b)) / fro_norm(a).max(fro_norm(b)).max(1.0)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors matching `values`.
    pub vectors: CMat,
}

pub fn herm_eigen(a: &CMat) -> HermEigen {
    let n = a.nrows();
    if n == 0 {
        return HermEigen { values: Vec::new(), vectors: zeros(0, 0) };
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |row, col| eig.eigenvectors[(row, order[col])]);
    HermEigen { values, vectors }
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn herm_fn(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let e = herm_eigen(a);
    let n = a.nrows();
    let mut scaled = e.vectors.clone();
    for (j, &v) in e.values.iter().enumerate() {
        let fv = f(v);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    scaled * e.vectors.adjoint()
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    herm_eigen(a).values.first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(a: &CMat) -> f64 {
    herm_eigen(a).values.last().copied().unwrap_or(0.0)
}

fn require_positive_definite(a: &CMat) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!("expected square matrix, got {:?}", a.shape())));
    }
    if !is_hermitian(a, 1e-8) {
        return Err(Error::Invalid("matrix is not Hermitian".into()));
    }
    let e = herm_eigen(a);
    let top = e.values.last().copied().unwrap_or(0.0).abs().max(f64::MIN_POSITIVE);
    let min = e.values.first().copied().unwrap_or(0.0);
    if min <= 1e-13 * top {
        return Err(Error::NotPositive { min_eig: min });
    }
    Ok(())
}

/// Positive square root of a positive semidefinite matrix.
pub fn psd_sqrt(a: &CMat) -> Result<CMat> {
    if !is_hermitian(a, 1e-8) {
        return Err(Error::Invalid("matrix is not Hermitian".into()));
    }
    let e = herm_eigen(a);
    let top = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(&min) = e.values.first() {
        if min < -1e-10 * top.max(1.0) {
            return Err(Error::NotPositive { min_eig: min });
        }
    }
    Ok(herm_fn(a, |x| x.max(0.0).sqrt()))
}

/// `a^{-1/2}` for positive definite `a`.
pub fn pd_inv_sqrt(a: &CMat) -> Result<CMat> {
    require_positive_definite(a)?;
    Ok(herm_fn(a, |x| 1.0 / x.sqrt()))
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    if !a.is_square() {
        return Err(Error::Shape(format!("cannot invert {:?} matrix", a.shape())));
    }
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if a.nrows() > 0 && smin <= 1e-13 * smax.max(f64::MIN_POSITIVE) {
        return Err(Error::Singular { sigma_min: smin });
    }
    a.clone().try_inverse().ok_or(Error::Singular { sigma_min: smin })
}

/// Matrix geometric mean `a^{1/2}(a^{-1/2} b a^{-1/2})^{1/2} a^{1/2}`,
/// the unique positive definite `G` with `G a^{-1} G = b`.
pub fn geometric_mean(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    require_positive_definite(a)?;
    require_positive_definite(b)?;
    let ah = herm_fn(a, f64::sqrt);
    let aih = herm_fn(a, |x| 1.0 / x.sqrt());
    let inner = hermitian_part(&(&aih * b * &aih));
    let g = &ah * herm_fn(&inner, |x| x.max(0.0).sqrt()) * &ah;
    Ok(hermitian_part(&g))
}

/// Orthonormal basis of the kernel of `a`, singular values below
/// `rel · σ_max` counted as zero.
pub fn nullspace(a: &CMat, rel: f64) -> Vec<CVec> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    if a.nrows() == 0 || fro_norm(a) == 0.0 {
        return (0..n).map(|i| CVec::from_fn(n, |k, _| if k == i { ONE } else { ZERO })).collect();
    }
    let padded = if a.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s < rel * smax {
            out.push(CVec::from_fn(n, |j, _| v_t[(k, j)].conj()));
        }
    }
    out
}

/// Orthonormalizes `vectors` (modified Gram-Schmidt, twice), dropping those
/// whose residual norm falls below `tol` relative to their original norm.
pub fn gram_schmidt(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for v in vectors {
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let p = u.dotc(&w);
                w -= u * p;
            }
        }
        let nw = w.norm();
        if nw > tol * norm0 {
            out.push(w / r(nw));
        }
    }
    out
}

/// Flattens a matrix column-major into a vector.
pub fn vec_of(a: &CMat) -> CVec {
    CVec::from_iterator(a.len(), a.iter().copied())
}

/// Inverse of [`vec_of`].
pub fn unvec(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_iterator(rows, cols, v.iter().copied())
}

/// Orthonormal basis (Hilbert-Schmidt) of the span of `mats`.
pub fn orthonormalize_mats(mats: &[CMat], tol: f64) -> Vec<CMat> {
    let Some(first) = mats.first() else { return Vec::new() };
    let (rows, cols) = first.shape();
    let vs: Vec<CVec> = mats.iter().map(vec_of).collect();
    gram_schmidt(&vs, tol).iter().map(|v| unvec(v, rows, cols)).collect()
}

/// Least-squares solution of `a x = b` via SVD, with the residual
/// `‖a x - b‖ / max(‖b‖, 1)`.
pub fn solve_least_squares(a: &CMat, b: &CMat) -> Result<(CMat, f64)> {
    if a.nrows() != b.nrows() {
        return Err(Error::Shape(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let x = svd
        .solve(b, 1e-12 * smax.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let res = fro_norm(&(a * &x - b)) / fro_norm(b).max(1.0);
    Ok((x, res))
}

/// Result of [`pf_eigen`].
#[derive(Clone, Debug)]
pub struct PfEigen {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

pub const PF_MAX_ITER: usize = 1_000_000;
pub const PF_TOL: f64 = 1e-14;

/// Perron-Frobenius eigenvalue and unit nonnegative eigenvector of an
/// entrywise nonnegative square matrix.
///
/// Power iteration on `m + 1`, started from the all-ones vector. The shift
/// keeps periodic matrices (e.g. `[[0,1],[1,0]]`) from oscillating and does
/// not change the eigenvectors.
pub fn pf_eigen(m: &DMatrix<f64>) -> Result<PfEigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Shape(format!("pf_eigen needs a square matrix, got {:?}", m.shape())));
    }
    if n == 0 {
        return Err(Error::Invalid("pf_eigen of an empty matrix".into()));
    }
    if let Some(x) = m.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Invalid(format!("matrix entry {x} is not a nonnegative number")));
    }
    let shifted = m + DMatrix::<f64>::identity(n, n);
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut change = f64::INFINITY;
    for it in 1..=PF_MAX_ITER {
        let w = &shifted * &v;
        let nw = w.norm();
        let w = w / nw;
        change = (&w - &v).amax();
        v = w;
        if change < PF_TOL {
            let mv = m * &v;
            let value = v.dot(&mv) / v.dot(&v);
            let vector = v.iter().map(|x| x.max(0.0)).collect();
            return Ok(PfEigen { value, vector, iterations: it });
        }
    }
    Err(Error::NoConvergence { iterations: PF_MAX_ITER, change })
}

/// Antilinear map `v ↦ mat · conj(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearMap {
    pub mat: CMat,
}

impl AntilinearMap {
    pub fn new(mat: CMat) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Shape(format!("antilinear map needs a square matrix, got {:?}", mat.shape())));
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.mat * v.map(|z| z.conj())
    }

    /// The adjoint `w ↦ matᵀ conj(w)`, characterized by
    /// `⟨Jv, w⟩ = conj⟨v, J*w⟩`.
    pub fn adjoint(&self) -> AntilinearMap {
        AntilinearMap { mat: self.mat.transpose() }
    }

    /// Composition `self ∘ other`, which is linear.
    pub fn then_linear(&self, other: &AntilinearMap) -> CMat {
        &self.mat * other.mat.map(|z| z.conj())
    }

    /// `J^{-1}`: if `J v = Ĵ conj(v)` then `J^{-1} w = conj(Ĵ^{-1}) conj(w)`.
    pub fn inverse(&self) -> Result<AntilinearMap> {
        let inv = inverse(&self.mat)?;
        Ok(AntilinearMap { mat: inv.map(|z| z.conj()) })
    }
}

/// Matrices of the linear maps `J*J` and `J^{-1*}J^{-1}`.
pub fn antilinear_products(j: &AntilinearMap) -> Result<(CMat, CMat)> {
    let jinv = j.inverse()?;
    let jj = hermitian_part(&j.adjoint().then_linear(j));
    let inv_jj = hermitian_part(&jinv.adjoint().then_linear(&jinv));
    Ok((jj, inv_jj))
}

/// `√(Tr(J*J) · Tr(J^{-1*}J^{-1}))`.
pub fn antilinear_dimension(j: &AntilinearMap) -> Result<f64> {
    let (a, b) = antilinear_products(j)?;
    Ok((trace(&a).re * trace(&b).re).sqrt())
}

/// Multiplicity-aware clustering of sorted real values: returns index ranges
/// whose consecutive gaps are at most `gap`.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Columns `range` of `m` as a new matrix.
pub fn columns(m: &CMat, range: std::ops::Range<usize>) -> CMat {
    m.columns(range.start, range.len()).into_owned()
}

/// Matrix whose columns are `vs`.
pub fn from_columns(rows: usize, vs: &[CVec]) -> CMat {
    let mut m = CMat::zeros(rows, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Standard basis vector `e_i` of `C^n`.
pub fn basis_vec(n: usize, i: usize) -> CVec {
    CVec::from_fn(n, |k, _| if k == i { ONE } else { ZERO })
}

/// Matrix unit `E_{ij}` of size `rows × cols`.
pub fn matrix_unit(rows: usize, cols: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CMat {
        crate::random::gaussian_matrix(rng, n, m)
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&identity(2), &identity(3)), identity(6));
        let a = from_real_rows(1, 1, &[2.0]);
        let b = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(kron(&a, &b), from_real_rows(2, 2, &[0.0, 2.0, 2.0, 0.0]));
    }

    #[test]
    fn kron_index_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = rand_mat(&mut rng, 2, 3);
        let b = rand_mat(&mut rng, 3, 2);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..3 {
                for kk in 0..3 {
                    for l in 0..2 {
                        assert_eq!(k[(i * 3 + kk, j * 2 + l)], a[(i, j)] * b[(kk, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let (a, b, c2, d) = (
                rand_mat(&mut rng, 2, 2),
                rand_mat(&mut rng, 2, 2),
                rand_mat(&mut rng, 2, 2),
                rand_mat(&mut rng, 2, 2),
            );
            let lhs = kron(&a, &b) * kron(&c2, &d);
            let rhs = kron(&(&a * &c2), &(&b * &d));
            assert!(rel_diff(&lhs, &rhs) < 1e-14);
        }
    }

    #[test]
    fn pf_examples() {
        let fib = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 1.0]);
        let p = pf_eigen(&fib).unwrap();
        assert!((p.value - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let p = pf_eigen(&DMatrix::identity(4, 4)).unwrap();
        assert!((p.value - 1.0).abs() < 1e-14);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p = pf_eigen(&swap).unwrap();
        assert!((p.value - 1.0).abs() < 1e-14);
        let s = 0.5f64.sqrt();
        assert!((p.vector[0] - s).abs() < 1e-12 && (p.vector[1] - s).abs() < 1e-12);
    }

    #[test]
    fn pf_rejects_negative_entries() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(pf_eigen(&m).is_err());
    }

    #[test]
    fn pf_dominates_spectrum() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            let m = DMatrix::<f64>::from_fn(n, n, |_, _| if rng.random_bool(0.6) { rng.random_range(0.0..3.0) } else { 0.0 });
            let p = pf_eigen(&m).unwrap();
            for ev in m.complex_eigenvalues().iter() {
                assert!(ev.norm() <= p.value + 1e-8, "{} > {}", ev.norm(), p.value);
            }
            assert!(p.vector.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn geometric_mean_examples() {
        let i2 = identity(2);
        assert!(rel_diff(&geometric_mean(&i2, &i2).unwrap(), &i2) < 1e-14);
        let g = geometric_mean(&i2.scale(4.0), &i2).unwrap();
        assert!(rel_diff(&g, &i2.scale(2.0)) < 1e-14);
        let a = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let b = from_real_rows(2, 2, &[9.0, 0.0, 0.0, 1.0]);
        let g = geometric_mean(&a, &b).unwrap();
        assert!(rel_diff(&g, &from_real_rows(2, 2, &[3.0, 0.0, 0.0, 2.0])) < 1e-14);
    }

    #[test]
    fn geometric_mean_riccati_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..5 {
            let x = rand_mat(&mut rng, n, n);
            let y = rand_mat(&mut rng, n, n);
            let a = &x * x.adjoint() + identity(n).scale(0.1);
            let b = &y * y.adjoint() + identity(n).scale(0.1);
            let g = geometric_mean(&a, &b).unwrap();
            let lhs = &g * inverse(&a).unwrap() * &g;
            assert!(rel_diff(&lhs, &b) < 1e-9);
            assert!(rel_diff(&g, &geometric_mean(&b, &a).unwrap()) < 1e-9);
            assert!(min_eigenvalue(&g) > 0.0);
        }
    }

    #[test]
    fn geometric_mean_rejects_non_positive() {
        let a = from_real_rows(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(geometric_mean(&a, &identity(2)), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn antilinear_identity_and_suq2() {
        let j = AntilinearMap::new(identity(3)).unwrap();
        let (a, b) = antilinear_products(&j).unwrap();
        assert!(rel_diff(&a, &identity(3)) < 1e-15 && rel_diff(&b, &identity(3)) < 1e-15);
        let q = 0.5;
        let jhat = from_real_rows(2, 2, &[0.0, 1.0, 1.0 / q, 0.0]);
        let j = AntilinearMap::new(jhat).unwrap();
        let e1 = basis_vec(2, 0);
        assert!((j.apply(&e1) - basis_vec(2, 1).scale(1.0 / q)).norm() < 1e-15);
        let (a, b) = antilinear_products(&j).unwrap();
        assert!((trace(&a).re - 5.0).abs() < 1e-12);
        assert!((trace(&b).re - 1.25).abs() < 1e-12);
        assert!((trace(&a).re * trace(&b).re - 6.25).abs() < 1e-12);
    }

    #[test]
    fn antilinear_adjoint_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..5 {
            let j = AntilinearMap::new(rand_mat(&mut rng, n, n)).unwrap();
            let v = crate::random::gaussian_vector(&mut rng, n);
            let w = crate::random::gaussian_vector(&mut rng, n);
            // ⟨Jv, w⟩ = conj⟨v, J* w⟩
            let lhs = j.apply(&v).dotc(&w);
            let rhs = v.dotc(&j.adjoint().apply(&w)).conj();
            assert!((lhs - rhs).norm() < 1e-10);
            // J*J agrees with the dense conjugate-transpose computation
            let (a, b) = antilinear_products(&j).unwrap();
            let oracle = (j.mat.adjoint() * &j.mat).map(|z| z.conj());
            assert!(rel_diff(&a, &oracle) < 1e-12);
            assert!(trace(&a).re > 0.0 && trace(&b).re > 0.0);
            assert!(trace(&a).im.abs() < 1e-12 && trace(&b).im.abs() < 1e-12);
            assert!(antilinear_dimension(&j).unwrap() >= n as f64 - 1e-9);
        }
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a = from_real_rows(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ns = nullspace(&a, 1e-10);
        assert_eq!(ns.len(), 1);
        assert!((&a * &ns[0]).norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = rand_mat(&mut rng, 3, 3);
        let a = &x * x.adjoint();
        let s = psd_sqrt(&a).unwrap();
        assert!(rel_diff(&(&s * &s), &a) < 1e-10);
    }

    #[test]
    fn clustering() {
        let v = [0.0, 1e-12, 1.0, 1.0 + 1e-12, 3.0];
        assert_eq!(cluster_sorted(&v, 1e-8), vec![0..2, 2..4, 4..5]);
    }
}
