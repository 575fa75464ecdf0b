//! Concrete strict tensor C*-categories.
//!
//! Objects are words in generators; ⊗ concatenates words, so the tensor
//! product is strictly associative with the empty word as unit. Arrows carry
//! the matrix of the intertwiner between the underlying Hilbert spaces.

mod arrow;
pub mod completion;
mod decompose;
mod group;
pub mod io;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use arrow::{compose, tensor, Arrow};
pub use decompose::Piece;
pub use group::GroupData;

use crate::error::{Error, Result};
use crate::linalg::{self, kron_all, CMat};

static NEXT_CATEGORY: AtomicU64 = AtomicU64::new(1);
static NEXT_GENERATOR: AtomicU64 = AtomicU64::new(1);

fn fresh_uid() -> u64 {
    NEXT_GENERATOR.fetch_add(1, Ordering::Relaxed)
}

/// Label of the tensor unit.
pub const UNIT_LABEL: &str = "ι";

/// A tensor-indecomposable building block of object words.
#[derive(Debug)]
pub struct Generator {
    pub label: String,
    /// 0 for named objects; derived objects (sums, subobjects) get a fresh id
    /// so that two different realizations never compare equal.
    pub uid: u64,
    pub dim: usize,
    /// Images of the group generators (group backend only).
    pub rep: Option<Vec<CMat>>,
    pub irreducible: Option<bool>,
}

impl Generator {
    fn same(&self, other: &Generator) -> bool {
        self.label == other.label && self.uid == other.uid && self.dim == other.dim
    }
}

/// An object: a word in generators of one category.
#[derive(Clone, Debug)]
pub struct Obj {
    cat: u64,
    factors: Vec<Arc<Generator>>,
}

impl PartialEq for Obj {
    fn eq(&self, other: &Self) -> bool {
        self.cat == other.cat
            && self.factors.len() == other.factors.len()
            && self.factors.iter().zip(&other.factors).all(|(a, b)| a.same(b))
    }
}

impl Eq for Obj {}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Obj {
    pub fn category_id(&self) -> u64 {
        self.cat
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|g| g.dim).product()
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Arc<Generator>] {
        &self.factors
    }

    pub fn label(&self) -> String {
        if self.factors.is_empty() {
            UNIT_LABEL.to_string()
        } else {
            self.factors.iter().map(|g| g.label.as_str()).collect::<Vec<_>>().join(".")
        }
    }

    /// Strict tensor product: concatenation of words.
    pub fn tensor(&self, other: &Obj) -> Obj {
        assert_eq!(self.cat, other.cat, "objects from different categories");
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Obj { cat: self.cat, factors }
    }

    pub fn try_tensor(&self, other: &Obj) -> Result<Obj> {
        if self.cat != other.cat {
            return Err(Error::BackendMismatch);
        }
        Ok(self.tensor(other))
    }

    /// `self^n` with `self^0 = ι`.
    pub fn power(&self, n: usize) -> Obj {
        let mut factors = Vec::with_capacity(self.factors.len() * n);
        for _ in 0..n {
            factors.extend(self.factors.iter().cloned());
        }
        Obj { cat: self.cat, factors }
    }

    /// The word made of `factors`, in the category of `like`.
    pub fn from_parts(like: &Obj, factors: &[Arc<Generator>]) -> Obj {
        Obj { cat: like.cat, factors: factors.to_vec() }
    }

    fn single(cat: u64, g: Arc<Generator>) -> Obj {
        Obj { cat, factors: vec![g] }
    }
}

/// Which concrete model backs a category.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Hilb,
    RepFiniteGroup,
    Free,
}

/// User-supplied data for the free backend.
#[derive(Clone, Debug, Default)]
pub struct FreeData {
    /// Spanning sets keyed by (source word, target word) labels.
    pub homs: HashMap<(String, String), Vec<CMat>>,
    /// Conjugate of each generator label.
    pub conj: HashMap<String, String>,
    /// Stored conjugate solutions `(R, R̄)` for generators, as column vectors.
    pub solutions: HashMap<String, (CMat, CMat)>,
    /// Real (+1) / pseudoreal (-1) signs of self-conjugate generators.
    pub real_signs: HashMap<String, i8>,
    /// Braiding matrices ε(ρ, σ) ∈ (ρσ, σρ) for generator pairs.
    pub braiding: HashMap<(String, String), CMat>,
}

#[derive(Debug)]
enum Backend {
    Hilb,
    Rep(GroupData),
    Free(FreeData),
}

/// A concrete strict tensor C*-category with a fixed set of named objects.
#[derive(Debug)]
pub struct Category {
    id: u64,
    name: String,
    backend: Backend,
    generators: Vec<Arc<Generator>>,
}

impl Category {
    fn with_backend(name: &str, backend: Backend, generators: Vec<Arc<Generator>>) -> Category {
        Category {
            id: NEXT_CATEGORY.fetch_add(1, Ordering::Relaxed),
            name: name.to_string(),
            backend,
            generators,
        }
    }

    /// Finite dimensional Hilbert spaces. Objects `C<d>` exist for every `d`.
    pub fn hilb() -> Category {
        Self::with_backend("Hilb", Backend::Hilb, Vec::new())
    }

    /// Hilbert spaces with additional named objects.
    pub fn hilb_with(objects: &[(&str, usize)]) -> Category {
        let gens = objects
            .iter()
            .map(|(l, d)| {
                Arc::new(Generator { label: l.to_string(), uid: 0, dim: *d, rep: None, irreducible: Some(*d == 1) })
            })
            .collect();
        Self::with_backend("Hilb", Backend::Hilb, gens)
    }

    /// Unitary representations of a finite group given by generators and
    /// relations. Each relation is a word of `(generator, exponent)` pairs
    /// that must evaluate to the identity in every object.
    pub fn rep_finite_group(
        name: &str,
        n_generators: usize,
        relations: Vec<Vec<(usize, i64)>>,
        objects: Vec<(String, Vec<CMat>, Option<bool>)>,
    ) -> Result<Category> {
        let mut gens = Vec::new();
        for (label, mats, irr) in objects {
            if mats.len() != n_generators {
                return Err(Error::Invalid(format!(
                    "object {label}: {} generator matrices, expected {n_generators}",
                    mats.len()
                )));
            }
            let dim = mats.first().map(|m| m.nrows()).unwrap_or(1);
            group::check_representation(&label, dim, &mats, &relations)?;
            gens.push(Arc::new(Generator { label, uid: 0, dim, rep: Some(mats), irreducible: irr }));
        }
        let reps: Vec<&Vec<CMat>> = gens.iter().map(|g| g.rep.as_ref().unwrap()).collect();
        let data = GroupData::enumerate(n_generators, relations, &reps)?;
        Ok(Self::with_backend(name, Backend::Rep(data), gens))
    }

    /// Category given entirely by stored hom data.
    pub fn free(name: &str, objects: Vec<(String, usize, bool)>, data: FreeData) -> Result<Category> {
        let gens: Vec<Arc<Generator>> = objects
            .into_iter()
            .map(|(label, dim, irr)| Arc::new(Generator { label, uid: 0, dim, rep: None, irreducible: Some(irr) }))
            .collect();
        for g in &gens {
            if let Some(c) = data.conj.get(&g.label) {
                if !gens.iter().any(|h| &h.label == c) {
                    return Err(Error::Invalid(format!("conjugate `{c}` of `{}` is not an object", g.label)));
                }
            }
        }
        let mut data = data;
        for mats in data.homs.values_mut() {
            *mats = linalg::orthonormalize_mats(mats, 1e-10);
        }
        Ok(Self::with_backend(name, Backend::Free(data), gens))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> BackendKind {
        match self.backend {
            Backend::Hilb => BackendKind::Hilb,
            Backend::Rep(_) => BackendKind::RepFiniteGroup,
            Backend::Free(_) => BackendKind::Free,
        }
    }

    pub fn group(&self) -> Option<&GroupData> {
        match &self.backend {
            Backend::Rep(g) => Some(g),
            _ => None,
        }
    }

    pub fn free_data(&self) -> Option<&FreeData> {
        match &self.backend {
            Backend::Free(d) => Some(d),
            _ => None,
        }
    }

    /// Named objects in registration order.
    pub fn named_objects(&self) -> Vec<Obj> {
        self.generators.iter().map(|g| Obj::single(self.id, g.clone())).collect()
    }

    pub fn unit(&self) -> Obj {
        Obj { cat: self.id, factors: Vec::new() }
    }

    pub fn hilb_space(&self, d: usize) -> Result<Obj> {
        if self.kind() != BackendKind::Hilb {
            return Err(Error::Unsupported(format!("C{d} only exists in Hilb")));
        }
        Ok(Obj::single(
            self.id,
            Arc::new(Generator { label: format!("C{d}"), uid: 0, dim: d, rep: None, irreducible: Some(d == 1) }),
        ))
    }

    fn generator(&self, label: &str) -> Result<Arc<Generator>> {
        if let Some(g) = self.generators.iter().find(|g| g.label == label) {
            return Ok(g.clone());
        }
        if let Some(base) = label.strip_suffix('*') {
            if let Some(g) = self.generators.iter().find(|g| g.label == base) {
                return Ok(self.conjugate_generator(g)?);
            }
        }
        if self.kind() == BackendKind::Hilb {
            if let Some(d) = label.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
                return Ok(self.hilb_space(d)?.factors[0].clone());
            }
        }
        Err(Error::UnknownObject(label.to_string()))
    }

    /// Parses a word such as `rho.rho*` or `C2.C3`; `ι`, `1` or the empty
    /// string denote the unit.
    pub fn object(&self, word: &str) -> Result<Obj> {
        let w = word.trim();
        if w.is_empty() || w == UNIT_LABEL || w == "1" || w == "iota" {
            return Ok(self.unit());
        }
        let factors = w.split('.').map(|l| self.generator(l.trim())).collect::<Result<Vec<_>>>()?;
        Ok(Obj { cat: self.id, factors })
    }

    fn check_obj(&self, o: &Obj) -> Result<()> {
        if o.cat != self.id {
            return Err(Error::BackendMismatch);
        }
        Ok(())
    }

    pub fn identity(&self, o: &Obj) -> Arrow {
        Arrow::identity(o)
    }

    /// Group-generator images of a word (group backend).
    pub fn rep_matrices(&self, o: &Obj) -> Result<Vec<CMat>> {
        self.check_obj(o)?;
        let g = self.group().ok_or_else(|| Error::Unsupported("not a group category".into()))?;
        Ok((0..g.n_generators())
            .map(|k| kron_all(o.factors.iter().map(|f| &f.rep.as_ref().expect("group object without matrices")[k])))
            .collect())
    }

    /// Orthonormal (Hilbert-Schmidt) basis of the arrow space `(src, dst)`.
    pub fn hom_basis(&self, src: &Obj, dst: &Obj) -> Result<Vec<Arrow>> {
        self.check_obj(src)?;
        self.check_obj(dst)?;
        let (n, m) = (src.dim(), dst.dim());
        let mats: Vec<CMat> = match &self.backend {
            Backend::Hilb => {
                let mut v = Vec::with_capacity(n * m);
                for i in 0..m {
                    for j in 0..n {
                        v.push(linalg::matrix_unit(m, n, i, j));
                    }
                }
                v
            }
            Backend::Rep(g) => {
                let a = self.rep_matrices(src)?;
                let b = self.rep_matrices(dst)?;
                g.intertwiners(&a, &b)
            }
            Backend::Free(d) => self.free_hom(d, src, dst)?,
        };
        mats.into_iter().map(|mat| Arrow::new(src, dst, mat)).collect()
    }

    pub fn hom_dim(&self, src: &Obj, dst: &Obj) -> Result<usize> {
        match &self.backend {
            Backend::Hilb => Ok(src.dim() * dst.dim()),
            Backend::Rep(g) => {
                let a = self.rep_matrices(src)?;
                let b = self.rep_matrices(dst)?;
                Ok(g.hom_dimension(&a, &b))
            }
            Backend::Free(_) => Ok(self.hom_basis(src, dst)?.len()),
        }
    }

    fn free_hom(&self, d: &FreeData, src: &Obj, dst: &Obj) -> Result<Vec<CMat>> {
        if src.is_unit() && dst.is_unit() {
            return Ok(vec![linalg::identity(1)]);
        }
        let key = (src.label(), dst.label());
        if let Some(v) = d.homs.get(&key) {
            return Ok(v.clone());
        }
        if let Some(v) = d.homs.get(&(key.1.clone(), key.0.clone())) {
            return Ok(v.iter().map(|m| m.adjoint()).collect());
        }
        if src == dst && src.factors.len() == 1 && src.factors[0].irreducible == Some(true) {
            let k = src.dim();
            return Ok(vec![linalg::identity(k).scale(1.0 / (k as f64).sqrt())]);
        }
        Err(Error::MissingHom { src: key.0, dst: key.1 })
    }

    /// Independent hom computation: nullspace of the stacked intertwining
    /// constraints `σ(g)X - Xρ(g)` over group generators, via SVD.
    pub fn hom_basis_nullspace(&self, src: &Obj, dst: &Obj) -> Result<Vec<Arrow>> {
        let (n, m) = (src.dim(), dst.dim());
        match &self.backend {
            Backend::Rep(_) => {
                let a = self.rep_matrices(src)?;
                let b = self.rep_matrices(dst)?;
                let mut blocks = Vec::new();
                for (ag, bg) in a.iter().zip(&b) {
                    // vec(B X - X A) = (1 ⊗ B - Aᵀ ⊗ 1) vec(X), column-major vec
                    blocks.push(linalg::kron(&linalg::identity(n), bg) - linalg::kron(&ag.transpose(), &linalg::identity(m)));
                }
                let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
                let mut c = CMat::zeros(rows, n * m);
                let mut off = 0;
                for b in &blocks {
                    c.view_mut((off, 0), (b.nrows(), n * m)).copy_from(b);
                    off += b.nrows();
                }
                linalg::nullspace(&c, 1e-10)
                    .iter()
                    .map(|v| Arrow::new(src, dst, linalg::unvec(v, m, n)))
                    .collect()
            }
            _ => self.hom_basis(src, dst),
        }
    }

    /// Relative residual of the membership conditions for `t` in its arrow
    /// space.
    pub fn hom_residual(&self, t: &Arrow) -> Result<f64> {
        self.check_obj(t.src())?;
        let scale = linalg::fro_norm(t.mat()).max(1.0);
        match &self.backend {
            Backend::Hilb => Ok(0.0),
            Backend::Rep(_) => {
                let a = self.rep_matrices(t.src())?;
                let b = self.rep_matrices(t.dst())?;
                Ok(a.iter()
                    .zip(&b)
                    .map(|(ag, bg)| linalg::fro_norm(&(bg * t.mat() - t.mat() * ag)))
                    .fold(0.0, f64::max)
                    / scale)
            }
            Backend::Free(_) => {
                let basis = self.hom_basis(t.src(), t.dst())?;
                let mut rest = t.mat().clone();
                for b in &basis {
                    let p = linalg::hs_inner(b.mat(), &rest);
                    rest -= b.mat() * p;
                }
                Ok(linalg::fro_norm(&rest) / scale)
            }
        }
    }

    /// Whether `(o, o)` is one-dimensional. Zero objects are not irreducible.
    pub fn is_irreducible(&self, o: &Obj) -> Result<bool> {
        self.check_obj(o)?;
        if o.dim() == 0 {
            return Ok(false);
        }
        if let [g] = o.factors.as_slice() {
            if let Some(flag) = g.irreducible {
                if self.kind() == BackendKind::Free || g.uid == 0 && self.kind() != BackendKind::Hilb {
                    return Ok(flag);
                }
            }
        }
        match &self.backend {
            Backend::Hilb => Ok(o.dim() == 1),
            _ => Ok(self.hom_dim(o, o)? == 1),
        }
    }

    fn conjugate_generator(&self, g: &Arc<Generator>) -> Result<Arc<Generator>> {
        match &self.backend {
            Backend::Hilb => Ok(g.clone()),
            Backend::Rep(_) => {
                let label = match g.label.strip_suffix('*') {
                    Some(base) => base.to_string(),
                    None => format!("{}*", g.label),
                };
                if let Some(named) = self.generators.iter().find(|h| h.label == label && h.uid == g.uid) {
                    return Ok(named.clone());
                }
                let rep = g.rep.as_ref().map(|ms| ms.iter().map(|m| m.map(|z| z.conj())).collect());
                Ok(Arc::new(Generator { label, uid: g.uid, dim: g.dim, rep, irreducible: g.irreducible }))
            }
            Backend::Free(d) => {
                let c = d
                    .conj
                    .get(&g.label)
                    .ok_or_else(|| Error::Invalid(format!("no conjugate recorded for `{}`", g.label)))?;
                self.generators
                    .iter()
                    .find(|h| &h.label == c)
                    .cloned()
                    .ok_or_else(|| Error::UnknownObject(c.clone()))
            }
        }
    }

    /// The canonical conjugate object: reversed word of conjugate generators.
    pub fn conjugate_object(&self, o: &Obj) -> Result<Obj> {
        self.check_obj(o)?;
        let factors = o.factors.iter().rev().map(|g| self.conjugate_generator(g)).collect::<Result<Vec<_>>>()?;
        Ok(Obj { cat: self.id, factors })
    }

    /// Direct sum of `objs` with the canonical isometries `W_i ∈ (objs[i], sum)`.
    pub fn direct_sum(&self, objs: &[Obj]) -> Result<(Obj, Vec<Arrow>)> {
        for o in objs {
            self.check_obj(o)?;
        }
        let total: usize = objs.iter().map(Obj::dim).sum();
        let sum = match &self.backend {
            Backend::Hilb => self.hilb_space(total)?,
            Backend::Rep(g) => {
                let reps = objs.iter().map(|o| self.rep_matrices(o)).collect::<Result<Vec<_>>>()?;
                let mats = (0..g.n_generators())
                    .map(|k| {
                        let mut m = CMat::zeros(total, total);
                        let mut off = 0;
                        for r in &reps {
                            let b = &r[k];
                            m.view_mut((off, off), b.shape()).copy_from(b);
                            off += b.nrows();
                        }
                        m
                    })
                    .collect();
                let label = format!("({})", objs.iter().map(Obj::label).collect::<Vec<_>>().join("+"));
                Obj::single(
                    self.id,
                    Arc::new(Generator { label, uid: fresh_uid(), dim: total, rep: Some(mats), irreducible: None }),
                )
            }
            Backend::Free(_) => return Err(Error::Unsupported("direct sums in a free category".into())),
        };
        let mut isos = Vec::new();
        let mut off = 0;
        for o in objs {
            let mut w = CMat::zeros(total, o.dim());
            for i in 0..o.dim() {
                w[(off + i, i)] = linalg::ONE;
            }
            off += o.dim();
            isos.push(Arrow::new(o, &sum, w)?);
        }
        Ok((sum, isos))
    }

    /// The subobject cut out by an isometry `w` (columns spanning an
    /// invariant subspace of `o`), with the isometry as an arrow into `o`.
    pub fn subobject(&self, o: &Obj, w: &CMat, label: &str) -> Result<(Obj, Arrow)> {
        self.check_obj(o)?;
        if w.nrows() != o.dim() {
            return Err(Error::Shape(format!("isometry has {} rows, object dim {}", w.nrows(), o.dim())));
        }
        let k = w.ncols();
        let iso_defect = linalg::rel_diff(&(w.adjoint() * w), &linalg::identity(k));
        if iso_defect > 1e-8 {
            return Err(Error::Invalid(format!("not an isometry (defect {iso_defect:e})")));
        }
        let sub = match &self.backend {
            Backend::Hilb => self.hilb_space(k)?,
            Backend::Rep(_) => {
                let reps = self.rep_matrices(o)?;
                let p = w * w.adjoint();
                let mut mats = Vec::new();
                for a in &reps {
                    let inv = linalg::fro_norm(&(a * &p - &p * a)) / (k.max(1) as f64);
                    if inv > 1e-8 {
                        return Err(Error::Invalid(format!("subspace is not invariant (defect {inv:e})")));
                    }
                    mats.push(w.adjoint() * a * w);
                }
                Obj::single(
                    self.id,
                    Arc::new(Generator { label: label.to_string(), uid: fresh_uid(), dim: k, rep: Some(mats), irreducible: None }),
                )
            }
            Backend::Free(_) => return Err(Error::Unsupported("subobjects in a free category".into())),
        };
        let iso = Arrow::new(&sub, o, w.clone())?;
        Ok((sub, iso))
    }
}
