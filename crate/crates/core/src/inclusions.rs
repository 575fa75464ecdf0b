//! Finite dimensional inclusions `N ⊂ M` of multi-matrix algebras, the
//! trace preserving conditional expectation, Pimsner–Popa bases and the
//! conjugate morphism `ρ̄: M → M_n(N)`.
//!
//! Elements of a multi-matrix algebra are stored as block diagonal square
//! matrices. A morphism `A → M_k(B)` acts on matrices over `A` entrywise;
//! 2-cells between such morphisms are `k'×k` matrices over `B`, stored as
//! `(k'·dim B)×(k·dim B)` complex matrices.

use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};
use crate::random;
use crate::tol;

const SUPPORT_CUT: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiMatrixAlgebra {
    blocks: Vec<usize>,
    weights: Vec<f64>,
    offsets: Vec<usize>,
    size: usize,
}

impl MultiMatrixAlgebra {
    /// `⊕ M_{n_b}` with the faithful trace `Σ w_b Tr_b`.
    pub fn new(blocks: Vec<usize>, weights: Vec<f64>) -> Result<MultiMatrixAlgebra> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::Invalid("blocks must be a nonempty list of positive sizes".into()));
        }
        if weights.len() != blocks.len() {
            return Err(Error::Invalid(format!("{} trace weights for {} blocks", weights.len(), blocks.len())));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Invalid("trace weights must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut size = 0;
        for &b in &blocks {
            offsets.push(size);
            size += b;
        }
        Ok(MultiMatrixAlgebra { blocks, weights, offsets, size })
    }

    /// Full matrix algebra `M_n` with the normalized trace.
    pub fn full(n: usize) -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::new(vec![n], vec![1.0 / n as f64]).expect("valid block")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Size of the block diagonal matrices representing elements.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b * b).sum()
    }

    pub fn is_factor(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn one(&self) -> CMat {
        linalg::identity(self.size)
    }

    fn block_of(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size);
        for (b, &n) in self.blocks.iter().enumerate() {
            out.extend(std::iter::repeat_n(b, n));
        }
        out
    }

    /// Zeroes the entries outside the diagonal blocks.
    pub fn project(&self, x: &CMat) -> CMat {
        let owner = self.block_of();
        CMat::from_fn(self.size, self.size, |i, j| if owner[i] == owner[j] { x[(i, j)] } else { linalg::ZERO })
    }

    pub fn off_block_norm(&self, x: &CMat) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn trace(&self, x: &CMat) -> C64 {
        let mut t = linalg::ZERO;
        for (b, &n) in self.blocks.iter().enumerate() {
            let o = self.offsets[b];
            for i in 0..n {
                t += x[(o + i, o + i)] * self.weights[b];
            }
        }
        t
    }

    /// Matrix units `e^b_{ij}`, a linear basis of the algebra.
    pub fn matrix_units(&self) -> Vec<CMat> {
        let mut out = Vec::with_capacity(self.dimension());
        for (b, &n) in self.blocks.iter().enumerate() {
            let o = self.offsets[b];
            for i in 0..n {
                for j in 0..n {
                    out.push(linalg::matrix_unit(self.size, self.size, o + i, o + j));
                }
            }
        }
        out
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> CMat {
        self.project(&random::gaussian_matrix(rng, self.size, self.size))
    }
}

/// A unital inclusion `N ⊂ M` given by its inclusion matrix: `lambda[a][b]`
/// is the multiplicity of the `a`-th block of `N` inside the `b`-th block
/// of `M`. The trace of `M` restricts to `N`.
#[derive(Clone, Debug)]
pub struct FdInclusion {
    pub n_alg: MultiMatrixAlgebra,
    pub m_alg: MultiMatrixAlgebra,
    pub lambda: Vec<Vec<usize>>,
    /// `(N block, M block, offset in M)` for every copy of an `N` block.
    copies: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InclusionFile {
    #[serde(rename = "N_blocks")]
    pub n_blocks: Vec<usize>,
    #[serde(rename = "M_blocks")]
    pub m_blocks: Vec<usize>,
    pub inclusion_matrix: Vec<Vec<usize>>,
    /// Weights of the trace on `M`; defaults to the unnormalized trace.
    #[serde(default)]
    pub trace_weights: Option<Vec<f64>>,
}

impl FdInclusion {
    pub fn new(n_blocks: Vec<usize>, m_blocks: Vec<usize>, lambda: Vec<Vec<usize>>, m_weights: Vec<f64>) -> Result<FdInclusion> {
        let m_alg = MultiMatrixAlgebra::new(m_blocks.clone(), m_weights)?;
        if lambda.len() != n_blocks.len() || lambda.iter().any(|row| row.len() != m_blocks.len()) {
            return Err(Error::Shape(format!(
                "inclusion matrix must be {}×{} (rows: blocks of N, columns: blocks of M)",
                n_blocks.len(),
                m_blocks.len()
            )));
        }
        for (b, &nb) in m_blocks.iter().enumerate() {
            let filled: usize = (0..n_blocks.len()).map(|a| lambda[a][b] * n_blocks[a]).sum();
            if filled != nb {
                return Err(Error::Invalid(format!("non-unital embedding: block {b} of M has size {nb} but receives {filled}")));
            }
        }
        let n_weights: Vec<f64> =
            (0..n_blocks.len()).map(|a| (0..m_blocks.len()).map(|b| lambda[a][b] as f64 * m_alg.weights[b]).sum()).collect();
        if n_weights.iter().any(|&w| w == 0.0) {
            return Err(Error::Invalid("a block of N is not embedded".into()));
        }
        let n_alg = MultiMatrixAlgebra::new(n_blocks.clone(), n_weights)?;
        let mut copies = Vec::new();
        for (b, &off) in m_alg.offsets.iter().enumerate() {
            let mut o = off;
            for (a, &na) in n_blocks.iter().enumerate() {
                for _ in 0..lambda[a][b] {
                    copies.push((a, b, o));
                    o += na;
                }
            }
        }
        Ok(FdInclusion { n_alg, m_alg, lambda, copies })
    }

    /// `C ⊂ M_n` with the normalized trace.
    pub fn scalars_in_full(n: usize) -> FdInclusion {
        FdInclusion::new(vec![1], vec![n], vec![vec![n]], vec![1.0 / n as f64]).expect("valid inclusion")
    }

    /// Diagonal matrices inside `M_n` with the normalized trace.
    pub fn diagonal_in_full(n: usize) -> FdInclusion {
        FdInclusion::new(vec![1; n], vec![n], vec![vec![1]; n], vec![1.0 / n as f64]).expect("valid inclusion")
    }

    /// `M_n ⊂ M_n`.
    pub fn trivial(n: usize) -> FdInclusion {
        FdInclusion::new(vec![n], vec![n], vec![vec![1]], vec![1.0 / n as f64]).expect("valid inclusion")
    }

    pub fn from_description(f: InclusionFile) -> Result<FdInclusion> {
        let weights = f.trace_weights.unwrap_or_else(|| vec![1.0; f.m_blocks.len()]);
        FdInclusion::new(f.n_blocks, f.m_blocks, f.inclusion_matrix, weights)
    }

    pub fn from_json(text: &str) -> Result<FdInclusion> {
        FdInclusion::from_description(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<FdInclusion> {
        FdInclusion::from_json(&std::fs::read_to_string(path)?)
    }

    /// The embedding `N → M`.
    pub fn embed(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(self.m_alg.size, self.m_alg.size);
        for &(a, _, o) in &self.copies {
            let (na, src) = (self.n_alg.blocks[a], self.n_alg.offsets[a]);
            out.view_mut((o, o), (na, na)).copy_from(&x.view((src, src), (na, na)));
        }
        out
    }

    /// The inclusion as a morphism `N → M`.
    pub fn rho(&self) -> Morphism {
        let inc = self.clone();
        Morphism::new(&self.n_alg, &self.m_alg, 1, move |x| inc.embed(x))
    }
}

/// The trace preserving conditional expectation `E: M → N`, i.e. the
/// orthogonal projection onto `N` for `⟨x, y⟩ = tr(x*y)`.
#[derive(Clone, Copy, Debug)]
pub struct ConditionalExpectation<'a> {
    inc: &'a FdInclusion,
}

pub fn conditional_expectation(inc: &FdInclusion) -> ConditionalExpectation<'_> {
    ConditionalExpectation { inc }
}

impl ConditionalExpectation<'_> {
    /// `E(m)` as an element of `N`.
    pub fn apply(&self, m: &CMat) -> CMat {
        let (n, mm) = (&self.inc.n_alg, &self.inc.m_alg);
        let mut out = CMat::zeros(n.size, n.size);
        for &(a, b, o) in &self.inc.copies {
            let (na, dst) = (n.blocks[a], n.offsets[a]);
            let w = mm.weights[b] / n.weights[a];
            let mut view = out.view_mut((dst, dst), (na, na));
            view += m.view((o, o), (na, na)) * linalg::r(w);
        }
        out
    }

    /// `E(m)` viewed inside `M`.
    pub fn apply_in_m(&self, m: &CMat) -> CMat {
        self.inc.embed(&self.apply(m))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectationReport {
    /// `‖E(1) - 1‖`.
    pub unit: f64,
    /// `‖E(n m n') - n E(m) n'‖`, relative.
    pub bimodule: f64,
    /// `|tr(E(m)) - tr(m)|`, relative.
    pub trace: f64,
    /// Smallest eigenvalue of `E(x*x)` relative to `‖x*x‖`.
    pub positivity: f64,
    /// `‖E(E(m)) - E(m)‖`, relative.
    pub idempotent: f64,
}

impl ExpectationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.unit < tol && self.bimodule < tol && self.trace < tol && self.positivity > -tol && self.idempotent < tol
    }
}

/// Bimodule property, trace preservation, positivity and `E(1) = 1` on
/// random samples.
pub fn expectation_residuals(inc: &FdInclusion, seed: u64, samples: usize) -> ExpectationReport {
    let e = conditional_expectation(inc);
    let mut rng = random::rng(seed);
    let unit = (e.apply(&inc.m_alg.one()) - inc.n_alg.one()).norm();
    let (mut bimodule, mut trace, mut positivity, mut idempotent) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for _ in 0..samples {
        let m = inc.m_alg.random(&mut rng);
        let (a, b) = (inc.n_alg.random(&mut rng), inc.n_alg.random(&mut rng));
        let lhs = e.apply(&(inc.embed(&a) * &m * inc.embed(&b)));
        let rhs = &a * e.apply(&m) * &b;
        bimodule = bimodule.max((&lhs - &rhs).norm() / rhs.norm().max(1e-300));
        let (tm, te) = (inc.m_alg.trace(&m), inc.n_alg.trace(&e.apply(&m)));
        trace = trace.max((tm - te).norm() / m.norm());
        let xx = m.adjoint() * &m;
        positivity = positivity.min(linalg::min_eigenvalue(&e.apply(&xx)) / linalg::op_norm(&xx));
        let em = e.apply_in_m(&m);
        idempotent = idempotent.max((e.apply_in_m(&em) - &em).norm() / em.norm().max(1e-300));
    }
    ExpectationReport { unit, bimodule, trace, positivity, idempotent }
}

/// Elements `ξ_i ∈ M` with `m = Σ ξ_i E(ξ_i* m)` and `E(ξ_i* ξ_j) = δ_ij p_i`
/// for projections `p_i ∈ N`.
#[derive(Clone, Debug)]
pub struct PpBasis {
    pub xi: Vec<CMat>,
    /// `p_i = E(ξ_i* ξ_i)`.
    pub supports: Vec<CMat>,
}

impl PpBasis {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Every `p_i` is the unit, so the basis is a genuine one rather than a
    /// quasi-basis.
    pub fn is_orthonormal(&self) -> bool {
        self.supports.iter().all(|p| (p - CMat::identity(p.nrows(), p.ncols())).norm() < 1e-9)
    }

    /// `Σ ξ_i ξ_i*`.
    pub fn index_element(&self) -> CMat {
        let n = self.xi[0].nrows();
        self.xi.iter().fold(CMat::zeros(n, n), |acc, x| acc + x * x.adjoint())
    }

    /// `‖Σ ξ_i ξ_i*‖`.
    pub fn index(&self) -> f64 {
        linalg::op_norm(&self.index_element())
    }
}

/// Gram–Schmidt over the right `N`-module `M` with inner product
/// `⟨x, y⟩ = E(x*y)`, starting from `1` and the matrix units of `M`.
/// Candidates whose supports are orthogonal are merged, so that the result
/// is as short as this greedy pass allows.
pub fn pp_basis(inc: &FdInclusion) -> Result<PpBasis> {
    let e = conditional_expectation(inc);
    let mut xi: Vec<CMat> = Vec::new();
    let mut supports: Vec<CMat> = Vec::new();
    let mut candidates = vec![inc.m_alg.one()];
    candidates.extend(inc.m_alg.matrix_units());
    for v in candidates {
        let scale = linalg::op_norm(&e.apply(&(v.adjoint() * &v)));
        let mut w = v.clone();
        for _ in 0..2 {
            for x in &xi {
                w -= x * e.apply_in_m(&(x.adjoint() * &w));
            }
        }
        let h = e.apply(&(w.adjoint() * &w));
        if linalg::op_norm(&h) <= SUPPORT_CUT * scale {
            continue;
        }
        let cut = SUPPORT_CUT * scale;
        let inv_sqrt = linalg::herm_fn(&h, |t| if t > cut { 1.0 / t.sqrt() } else { 0.0 });
        let p = linalg::herm_fn(&h, |t| if t > cut { 1.0 } else { 0.0 });
        let new = &w * inc.embed(&inv_sqrt);
        match supports.iter().position(|q| (q * &p).norm() < 1e-9) {
            Some(i) => {
                xi[i] += &new;
                supports[i] += &p;
            }
            None => {
                xi.push(new);
                supports.push(p);
            }
        }
    }
    let basis = PpBasis { xi, supports };
    let res = reconstruction_residual(inc, &basis);
    if res > tol::residual() {
        return Err(Error::Invalid(format!("degenerate module structure: reconstruction residual {res:.3e}")));
    }
    Ok(basis)
}

/// `max ‖m - Σ ξ_i E(ξ_i* m)‖` over the matrix units of `M`.
pub fn reconstruction_residual(inc: &FdInclusion, basis: &PpBasis) -> f64 {
    let e = conditional_expectation(inc);
    inc.m_alg
        .matrix_units()
        .iter()
        .map(|m| {
            let back = basis.xi.iter().fold(CMat::zeros(m.nrows(), m.ncols()), |acc, x| acc + x * e.apply_in_m(&(x.adjoint() * m)));
            (&back - m).norm()
        })
        .fold(0.0, f64::max)
}

/// A unital-up-to-projection *-homomorphism `A → M_k(B)`.
#[derive(Clone)]
pub struct Morphism {
    pub src: MultiMatrixAlgebra,
    pub dst: MultiMatrixAlgebra,
    pub k: usize,
    /// `ρ(1)`, a projection in `M_k(B)`.
    pub unit: CMat,
    map: Arc<dyn Fn(&CMat) -> CMat + Send + Sync>,
}

impl std::fmt::Debug for Morphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Morphism").field("src", &self.src.blocks).field("dst", &self.dst.blocks).field("k", &self.k).finish()
    }
}

impl Morphism {
    pub fn new(
        src: &MultiMatrixAlgebra,
        dst: &MultiMatrixAlgebra,
        k: usize,
        map: impl Fn(&CMat) -> CMat + Send + Sync + 'static,
    ) -> Morphism {
        let unit = map(&src.one());
        Morphism { src: src.clone(), dst: dst.clone(), k, unit, map: Arc::new(map) }
    }

    pub fn identity(alg: &MultiMatrixAlgebra) -> Morphism {
        Morphism::new(alg, alg, 1, |x| x.clone())
    }

    pub fn apply(&self, a: &CMat) -> CMat {
        (self.map)(a)
    }

    /// Entrywise application to an `r×c` matrix over the source.
    pub fn amplify(&self, x: &CMat) -> CMat {
        let d = self.src.size;
        let (r, c) = (x.nrows() / d, x.ncols() / d);
        let e = self.k * self.dst.size;
        let mut out = CMat::zeros(r * e, c * e);
        for p in 0..r {
            for q in 0..c {
                let block = x.view((p * d, q * d), (d, d)).into_owned();
                if block.iter().all(|z| *z == linalg::ZERO) {
                    continue;
                }
                out.view_mut((p * e, q * e), (e, e)).copy_from(&self.apply(&block));
            }
        }
        out
    }

    /// `outer ∘ self`: apply `self`, then `outer` entrywise.
    pub fn then(&self, outer: &Morphism) -> Morphism {
        let (inner, o) = (self.clone(), outer.clone());
        Morphism::new(&self.src, &outer.dst, self.k * outer.k, move |x| o.amplify(&inner.apply(x)))
    }

    /// `‖ρ(ab) - ρ(a)ρ(b)‖ + ‖ρ(a*) - ρ(a)*‖` over random pairs, relative.
    pub fn homomorphism_residual(&self, seed: u64, samples: usize) -> f64 {
        let mut rng = random::rng(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let (a, b) = (self.src.random(&mut rng), self.src.random(&mut rng));
            let (ra, rb) = (self.apply(&a), self.apply(&b));
            let prod = self.apply(&(&a * &b));
            let m = (&prod - &ra * &rb).norm() / prod.norm().max(1e-300);
            let s = (self.apply(&a.adjoint()) - ra.adjoint()).norm() / ra.norm().max(1e-300);
            worst = worst.max(m + s);
        }
        worst
    }
}

/// `T ⊗ S = (1 ⊗ T)·σ(S)` for `T ∈ (σ, σ')` and `S` a 2-cell between
/// morphisms into the source of `σ`.
pub fn tensor_cells(t: &CMat, sigma: &Morphism, s: &CMat) -> CMat {
    let rows = s.nrows() / sigma.src.size;
    linalg::kron(&linalg::identity(rows), t) * sigma.amplify(s)
}

/// Orthonormal (Hilbert–Schmidt) basis of the 2-cells `(ρ, σ)` between two
/// morphisms `A → M_k(B)`.
pub fn hom_space(rho: &Morphism, sigma: &Morphism) -> Vec<CMat> {
    let d = rho.dst.size;
    let (rows, cols) = (sigma.k * d, rho.k * d);
    let owner = rho.dst.block_of();
    let free: Vec<(usize, usize)> =
        (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).filter(|&(i, j)| owner[i % d] == owner[j % d]).collect();
    let gens = rho.src.matrix_units();
    let mut images: Vec<(CMat, CMat)> = gens.iter().map(|a| (rho.apply(a), sigma.apply(a))).collect();
    images.push((rho.unit.clone(), linalg::identity(rows)));
    images.push((linalg::identity(cols), sigma.unit.clone()));
    let per = rows * cols;
    let mut lin = CMat::zeros(per * images.len(), free.len());
    for (col, &(i, j)) in free.iter().enumerate() {
        let x = linalg::matrix_unit(rows, cols, i, j);
        for (g, (ra, sa)) in images.iter().enumerate() {
            let v = &x * ra - sa * &x;
            for (k, z) in v.iter().enumerate() {
                lin[(g * per + k, col)] = *z;
            }
        }
    }
    linalg::nullspace(&lin, 1e-10)
        .iter()
        .map(|v: &CVec| {
            let mut x = CMat::zeros(rows, cols);
            for (k, &(i, j)) in free.iter().enumerate() {
                x[(i, j)] = v[k];
            }
            x
        })
        .collect()
}

/// `ρ̄(m)_{ij} = E(ξ_i* m ξ_j)`, a morphism `M → M_n(N)`.
pub fn rho_bar(inc: &FdInclusion, basis: &PpBasis) -> Morphism {
    let (inc2, xi) = (inc.clone(), basis.xi.clone());
    let d = inc.n_alg.size;
    Morphism::new(&inc.m_alg, &inc.n_alg, basis.len(), move |m| {
        let e = conditional_expectation(&inc2);
        let n = xi.len();
        let mut out = CMat::zeros(n * d, n * d);
        for i in 0..n {
            let left = xi[i].adjoint() * m;
            for j in 0..n {
                out.view_mut((i * d, j * d), (d, d)).copy_from(&e.apply(&(&left * &xi[j])));
            }
        }
        out
    })
}

/// `m ↦ (E(ξ_i* m))_i`, identifying `L²(M)` with a corner of `L²(N)^n`.
pub fn module_map(inc: &FdInclusion, basis: &PpBasis, m: &CMat) -> CMat {
    let e = conditional_expectation(inc);
    let d = inc.n_alg.size;
    let mut out = CMat::zeros(basis.len() * d, d);
    for (i, x) in basis.xi.iter().enumerate() {
        out.view_mut((i * d, 0), (d, d)).copy_from(&e.apply(&(x.adjoint() * m)));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub basis_size: usize,
    /// All `E(ξ_i*ξ_i) = 1`.
    pub orthonormal_basis: bool,
    pub reconstruction: f64,
    /// `‖Σ ξ_i ξ_i*‖`.
    pub index: f64,
    /// `(R̄*⊗1_ρ)∘(1_ρ⊗R) = 1_ρ`.
    pub first_equation: f64,
    /// `(R*⊗1_ρ̄)∘(1_ρ̄⊗R̄) = 1_ρ̄`.
    pub second_equation: f64,
    /// `R ∈ (ι_N, ρ̄ρ)` and `R̄ ∈ (ι_M, ρρ̄)`.
    pub intertwining: f64,
    /// `‖R*R - 1_N‖`.
    pub r_isometry: f64,
    /// `‖R̄*R̄ - Σ ξ_i ξ_i*‖`.
    pub r_bar_gram: f64,
    /// `ρ̄` is multiplicative and *-preserving.
    pub rho_bar_homomorphism: f64,
    /// The Jones projection acts on `L²(M) ⊂ L²(N)^n` as `RR*`.
    pub jones_projection: f64,
    /// `ρ̄(m)` implements left multiplication by `m` on `L²(M) ⊂ L²(N)^n`.
    pub left_action: f64,
    /// `‖R‖·‖R̄‖`.
    pub dimension: f64,
    /// `dim N' ∩ M`.
    pub relative_commutant: usize,
    pub ok: bool,
}

/// The solution `R_i = E(ξ_i*)`, `R̄_i = ξ_i*` of the conjugate equations
/// for the inclusion morphism `ρ: N → M` and `ρ̄ = rho_bar`.
pub struct InclusionConjugate {
    pub rho: Morphism,
    pub rho_bar: Morphism,
    pub r: CMat,
    pub r_bar: CMat,
}

pub fn conjugate_pair(inc: &FdInclusion, basis: &PpBasis) -> InclusionConjugate {
    let e = conditional_expectation(inc);
    let (dn, dm, n) = (inc.n_alg.size, inc.m_alg.size, basis.len());
    let mut r = CMat::zeros(n * dn, dn);
    let mut r_bar = CMat::zeros(n * dm, dm);
    for (i, x) in basis.xi.iter().enumerate() {
        r.view_mut((i * dn, 0), (dn, dn)).copy_from(&e.apply(&x.adjoint()));
        r_bar.view_mut((i * dm, 0), (dm, dm)).copy_from(&x.adjoint());
    }
    InclusionConjugate { rho: inc.rho(), rho_bar: rho_bar(inc, basis), r, r_bar }
}

impl InclusionConjugate {
    /// `(R̄*⊗1_ρ)∘(1_ρ⊗R)`, to be compared with `1_ρ`.
    pub fn first_composite(&self) -> CMat {
        let rho_rho_bar = self.rho_bar.then(&self.rho);
        let left = tensor_cells(&self.r_bar.adjoint(), &rho_rho_bar, &self.rho.unit);
        let right = tensor_cells(&self.rho.unit, &self.rho, &self.r);
        left * right
    }

    /// `(R*⊗1_ρ̄)∘(1_ρ̄⊗R̄)`, to be compared with `1_ρ̄`.
    pub fn second_composite(&self) -> CMat {
        let rho_bar_rho = self.rho.then(&self.rho_bar);
        let left = tensor_cells(&self.r.adjoint(), &rho_bar_rho, &self.rho_bar.unit);
        let right = tensor_cells(&self.rho_bar.unit, &self.rho_bar, &self.r_bar);
        left * right
    }

    pub fn intertwining_residual(&self) -> f64 {
        let rbr = self.rho.then(&self.rho_bar);
        let rrb = self.rho_bar.then(&self.rho);
        let mut worst = 0.0f64;
        for a in self.rho.src.matrix_units() {
            worst = worst.max((&self.r * &a - rbr.apply(&a) * &self.r).norm());
        }
        for m in self.rho_bar.src.matrix_units() {
            worst = worst.max((&self.r_bar * &m - rrb.apply(&m) * &self.r_bar).norm());
        }
        worst / self.r.norm().max(self.r_bar.norm())
    }
}

/// Conjugate equations, index and Jones projection for an inclusion.
pub fn inclusion_conjugate(inc: &FdInclusion, basis: &PpBasis) -> InclusionReport {
    let tol = tol::residual();
    let pair = conjugate_pair(inc, basis);
    let e = conditional_expectation(inc);
    let first_equation = (pair.first_composite() - &pair.rho.unit).norm();
    let second_equation = (pair.second_composite() - &pair.rho_bar.unit).norm();
    let r_isometry = (pair.r.adjoint() * &pair.r - inc.n_alg.one()).norm();
    let gram = basis.index_element();
    let r_bar_gram = (pair.r_bar.adjoint() * &pair.r_bar - &gram).norm() / gram.norm();
    let rr = &pair.r * pair.r.adjoint();
    let mut jones_projection = 0.0f64;
    let mut left_action = 0.0f64;
    let units = inc.m_alg.matrix_units();
    for m in &units {
        let vm = module_map(inc, basis, m);
        let lhs = module_map(inc, basis, &e.apply_in_m(m));
        jones_projection = jones_projection.max((&lhs - &rr * &vm).norm());
        for m2 in units.iter().step_by(units.len().div_ceil(4).max(1)) {
            let lhs = module_map(inc, basis, &(m2 * m));
            left_action = left_action.max((&lhs - pair.rho_bar.apply(m2) * &vm).norm());
        }
    }
    let index = linalg::op_norm(&gram);
    let dimension = linalg::op_norm(&pair.r) * linalg::op_norm(&pair.r_bar);
    let relative_commutant = hom_space(&pair.rho, &pair.rho).len();
    let reconstruction = reconstruction_residual(inc, basis);
    let intertwining = pair.intertwining_residual();
    let rho_bar_homomorphism = pair.rho_bar.homomorphism_residual(7, 8);
    let ok = [first_equation, second_equation, r_isometry, r_bar_gram, intertwining, jones_projection, left_action, reconstruction]
        .iter()
        .all(|&x| x < tol)
        && rho_bar_homomorphism < tol;
    InclusionReport {
        basis_size: basis.len(),
        orthonormal_basis: basis.is_orthonormal(),
        reconstruction,
        index,
        first_equation,
        second_equation,
        intertwining,
        r_isometry,
        r_bar_gram,
        rho_bar_homomorphism,
        jones_projection,
        left_action,
        dimension,
        relative_commutant,
        ok,
    }
}

/// Smallest eigenvalue of `E(x*x) - index⁻¹ x*x`, relative to `‖x*x‖`.
pub fn pimsner_popa_margin(inc: &FdInclusion, index: f64, x: &CMat) -> f64 {
    let xx = x.adjoint() * x;
    let e = conditional_expectation(inc).apply_in_m(&xx);
    linalg::min_eigenvalue(&(e - &xx * linalg::r(1.0 / index))) / linalg::op_norm(&xx)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `E` as the orthogonal projection onto the span of the embedded
    /// matrix units of `N`, computed by least squares.
    fn projection_oracle(inc: &FdInclusion, m: &CMat) -> CMat {
        let basis: Vec<CMat> = inc.n_alg.matrix_units().iter().map(|u| inc.embed(u)).collect();
        let k = basis.len();
        let gram = CMat::from_fn(k, k, |i, j| inc.m_alg.trace(&(basis[i].adjoint() * &basis[j])));
        let rhs = CMat::from_fn(k, 1, |i, _| inc.m_alg.trace(&(basis[i].adjoint() * m)));
        let (coef, _) = linalg::solve_least_squares(&gram, &rhs).unwrap();
        basis.iter().enumerate().fold(CMat::zeros(m.nrows(), m.ncols()), |acc, (i, b)| acc + b * coef[(i, 0)])
    }

    fn mixed() -> FdInclusion {
        // C ⊕ C ⊂ M_2 ⊕ C with a non-Markov trace
        FdInclusion::new(vec![1, 1], vec![2, 1], vec![vec![1, 1], vec![1, 0]], vec![0.3, 0.4]).unwrap()
    }

    fn samples() -> Vec<FdInclusion> {
        vec![
            FdInclusion::scalars_in_full(2),
            FdInclusion::diagonal_in_full(2),
            FdInclusion::trivial(2),
            FdInclusion::scalars_in_full(3),
            mixed(),
            FdInclusion::new(vec![2], vec![4], vec![vec![2]], vec![0.25]).unwrap(),
        ]
    }

    #[test]
    fn expectation_examples() {
        let inc = FdInclusion::scalars_in_full(2);
        let e = conditional_expectation(&inc);
        let m = linalg::from_real_rows(2, 2, &[1.0, 2.0, 3.0, 5.0]);
        assert!((e.apply_in_m(&m) - linalg::identity(2).scale(3.0)).norm() < 1e-15);
        let inc = FdInclusion::diagonal_in_full(2);
        let e = conditional_expectation(&inc);
        assert!((e.apply_in_m(&m) - linalg::from_real_rows(2, 2, &[1.0, 0.0, 0.0, 5.0])).norm() < 1e-15);
        for inc in samples() {
            assert!(expectation_residuals(&inc, 3, 20).passes(1e-12));
        }
    }

    #[test]
    fn expectation_matches_projection_oracle() {
        let mut rng = random::rng(41);
        for inc in samples() {
            let e = conditional_expectation(&inc);
            for _ in 0..5 {
                let m = inc.m_alg.random(&mut rng);
                assert!((e.apply_in_m(&m) - projection_oracle(&inc, &m)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn non_unital_embedding_rejected() {
        assert!(FdInclusion::new(vec![1], vec![3], vec![vec![2]], vec![1.0]).is_err());
        assert!(FdInclusion::new(vec![1], vec![2], vec![vec![2, 0]], vec![1.0]).is_err());
        assert!(FdInclusion::from_json(r#"{"N_blocks":[1],"M_blocks":[2],"inclusion_matrix":[[1]]}"#).is_err());
    }

    #[test]
    fn basis_examples() {
        let b = pp_basis(&FdInclusion::scalars_in_full(2)).unwrap();
        assert_eq!(b.len(), 4);
        assert!(b.is_orthonormal());
        assert!((b.index() - 4.0).abs() < 1e-12);
        assert!((b.index_element() - linalg::identity(2).scale(4.0)).norm() < 1e-12);
        let b = pp_basis(&FdInclusion::diagonal_in_full(2)).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b.index() - 2.0).abs() < 1e-12);
        let b = pp_basis(&FdInclusion::trivial(3)).unwrap();
        assert_eq!(b.len(), 1);
        assert!((&b.xi[0] - linalg::identity(3)).norm() < 1e-14);
        for inc in samples() {
            let b = pp_basis(&inc).unwrap();
            assert!(reconstruction_residual(&inc, &b) < 1e-10);
            let e = conditional_expectation(&inc);
            for (i, x) in b.xi.iter().enumerate() {
                for (j, y) in b.xi.iter().enumerate() {
                    let g = e.apply(&(x.adjoint() * y));
                    let expect = if i == j { b.supports[i].clone() } else { CMat::zeros(g.nrows(), g.ncols()) };
                    assert!((g - expect).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn index_is_basis_independent() {
        // a second basis from a unitary change of the first
        let inc = FdInclusion::scalars_in_full(2);
        let b = pp_basis(&inc).unwrap();
        let mut rng = random::rng(42);
        let u = random::unitary(&mut rng, 4);
        let xi: Vec<CMat> = (0..4).map(|i| (0..4).fold(CMat::zeros(2, 2), |acc, j| acc + &b.xi[j] * u[(j, i)])).collect();
        let other = PpBasis { xi, supports: b.supports.clone() };
        assert!(reconstruction_residual(&inc, &other) < 1e-12);
        assert!((other.index_element() - b.index_element()).norm() < 1e-12);
    }

    #[test]
    fn rho_bar_examples() {
        let inc = FdInclusion::trivial(2);
        let b = pp_basis(&inc).unwrap();
        let rb = rho_bar(&inc, &b);
        let mut rng = random::rng(43);
        let m = inc.m_alg.random(&mut rng);
        assert!((rb.apply(&m) - &m).norm() < 1e-14);
        let inc = FdInclusion::scalars_in_full(2);
        let b = pp_basis(&inc).unwrap();
        let rb = rho_bar(&inc, &b);
        assert_eq!(rb.unit.shape(), (4, 4));
        let p = &rb.unit;
        assert!((p * p - p).norm() < 1e-12);
        assert!((linalg::trace(p).re - 4.0).abs() < 1e-12);
        for inc in samples() {
            let b = pp_basis(&inc).unwrap();
            assert!(rho_bar(&inc, &b).homomorphism_residual(44, 10) < 1e-10);
        }
    }

    #[test]
    fn conjugate_pair_examples() {
        for (inc, index) in [(FdInclusion::scalars_in_full(2), 4.0), (FdInclusion::diagonal_in_full(2), 2.0), (FdInclusion::trivial(2), 1.0)] {
            let b = pp_basis(&inc).unwrap();
            let r = inclusion_conjugate(&inc, &b);
            assert!(r.ok, "{r:?}");
            assert!((r.index - index).abs() < 1e-12);
        }
        for inc in samples() {
            let r = inclusion_conjugate(&inc, &pp_basis(&inc).unwrap());
            assert!(r.ok, "{r:?}");
        }
    }

    #[test]
    fn irreducible_index_is_dimension_squared() {
        for n in 2..4 {
            let inc = FdInclusion::scalars_in_full(n);
            let r = inclusion_conjugate(&inc, &pp_basis(&inc).unwrap());
            assert_eq!(r.relative_commutant, n * n);
        }
        let inc = FdInclusion::trivial(3);
        let r = inclusion_conjugate(&inc, &pp_basis(&inc).unwrap());
        assert_eq!(r.relative_commutant, 1);
        assert!((r.dimension.powi(2) - r.index).abs() < 1e-12);
        let inc = FdInclusion::diagonal_in_full(2);
        let r = inclusion_conjugate(&inc, &pp_basis(&inc).unwrap());
        assert_eq!(r.relative_commutant, 2);
        assert!(r.dimension.powi(2) >= r.index - 1e-12);
    }

    #[test]
    fn pimsner_popa_inequality_holds() {
        let mut rng = random::rng(45);
        for inc in samples() {
            let index = pp_basis(&inc).unwrap().index();
            for _ in 0..20 {
                let x = inc.m_alg.random(&mut rng);
                assert!(pimsner_popa_margin(&inc, index, &x) > -1e-10);
            }
        }
    }

    #[test]
    fn two_category_axioms() {
        let mut rng = random::rng(46);
        for inc in [FdInclusion::scalars_in_full(2), FdInclusion::diagonal_in_full(2), mixed()] {
            let b = pp_basis(&inc).unwrap();
            let rho = inc.rho();
            let rb = rho_bar(&inc, &b);
            let inner = rho.then(&rb);
            let ts = hom_space(&rho, &rho);
            let ss = hom_space(&inner, &inner);
            assert!(!ts.is_empty() && !ss.is_empty());
            let pick = |basis: &[CMat], rng: &mut random::Rng64| {
                basis.iter().fold(CMat::zeros(basis[0].nrows(), basis[0].ncols()), |acc, x| acc + x * random::gaussian_complex(rng))
            };
            for _ in 0..5 {
                let (t1, t2) = (pick(&ts, &mut rng), pick(&ts, &mut rng));
                let (s1, s2) = (pick(&ss, &mut rng), pick(&ss, &mut rng));
                let lhs = tensor_cells(&t2, &rho, &s2) * tensor_cells(&t1, &rho, &s1);
                let rhs = tensor_cells(&(&t2 * &t1), &rho, &(&s2 * &s1));
                assert!((&lhs - &rhs).norm() < 1e-10 * rhs.norm().max(1.0));
                // T ⊗ S = ρ'(S)∘T form of the same cell
                let alt = rho.amplify(&s1) * linalg::kron(&linalg::identity(b.len()), &t1);
                assert!((tensor_cells(&t1, &rho, &s1) - alt).norm() < 1e-10);
            }
            // units: 1_ρ ⊗ 1_σ = 1_{ρσ}, and the identity morphism's unit acts trivially
            let unit = tensor_cells(&rho.unit, &rho, &inner.unit);
            assert!((unit - &inner.then(&rho).unit).norm() < 1e-12);
            let id_n = Morphism::identity(&inc.n_alg);
            let s = pick(&ss, &mut rng);
            assert!((tensor_cells(&s, &inner, &id_n.unit) - &s).norm() < 1e-12);
            assert!((tensor_cells(&id_n.unit, &id_n, &s) - &s).norm() < 1e-12);
        }
    }

    #[test]
    fn json_inclusion() {
        let inc = FdInclusion::from_json(r#"{"N_blocks":[1],"M_blocks":[2],"inclusion_matrix":[[2]],"trace_weights":[0.5]}"#).unwrap();
        let b = pp_basis(&inc).unwrap();
        assert!((b.index() - 4.0).abs() < 1e-12);
        let inc = FdInclusion::from_json(r#"{"N_blocks":[1,1],"M_blocks":[2],"inclusion_matrix":[[1],[1]]}"#).unwrap();
        assert!((pp_basis(&inc).unwrap().index() - 2.0).abs() < 1e-12);
    }
}
