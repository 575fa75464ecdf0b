//! Completion under subobjects (projection triples) and finite direct sums
//! (matrices of arrows).

use super::{Arrow, Category, Obj};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

fn projection_defect(p: &Arrow) -> f64 {
    let m = p.mat();
    linalg::rel_diff(&(m * m), m).max(linalg::rel_diff(&m.adjoint(), m))
}

/// An arrow `(ρ, E) → (σ, F)` of the subobject completion: `T ∈ (ρ, σ)`
/// with `T∘E = T = F∘T`.
#[derive(Clone, Debug)]
pub struct SubobjectTriple {
    pub f: Arrow,
    pub t: Arrow,
    pub e: Arrow,
}

impl SubobjectTriple {
    pub fn new(f: Arrow, t: Arrow, e: Arrow, tol: f64) -> Result<SubobjectTriple> {
        if f.src() != f.dst() || e.src() != e.dst() || t.src() != e.src() || t.dst() != f.src() {
            return Err(Error::Endpoint("triple endpoints must be (σ,σ), (ρ,σ), (ρ,ρ)".into()));
        }
        for (name, p) in [("F", &f), ("E", &e)] {
            let d = projection_defect(p);
            if d > tol {
                return Err(Error::Invalid(format!("{name} is not a projection (defect {d:e})")));
            }
        }
        let d = t.after(&e)?.rel_diff(&t).max(f.after(&t)?.rel_diff(&t));
        if d > tol {
            return Err(Error::Invalid(format!("T∘E = T = F∘T fails (defect {d:e})")));
        }
        Ok(SubobjectTriple { f, t, e })
    }

    /// The identity `(E, E, E)` of the object `(ρ, E)`.
    pub fn identity(e: &Arrow) -> SubobjectTriple {
        SubobjectTriple { f: e.clone(), t: e.clone(), e: e.clone() }
    }

    /// `self ∘ other`, defined iff `other.f = self.e`.
    pub fn compose(&self, other: &SubobjectTriple, tol: f64) -> Result<SubobjectTriple> {
        if self.e.src() != other.f.src() || self.e.rel_diff(&other.f) > tol {
            return Err(Error::Endpoint("composition needs F' = E".into()));
        }
        Ok(SubobjectTriple { f: self.f.clone(), t: self.t.after(&other.t)?, e: other.e.clone() })
    }

    pub fn tensor(&self, other: &SubobjectTriple) -> Result<SubobjectTriple> {
        Ok(SubobjectTriple { f: self.f.tensor(&other.f)?, t: self.t.tensor(&other.t)?, e: self.e.tensor(&other.e)? })
    }

    /// `(F, T, E)* = (E, T*, F)`.
    pub fn adjoint(&self) -> SubobjectTriple {
        SubobjectTriple { f: self.e.clone(), t: self.t.adjoint(), e: self.f.clone() }
    }

    pub fn norm(&self) -> f64 {
        self.t.norm()
    }

    pub fn rel_diff(&self, other: &SubobjectTriple) -> f64 {
        self.f.rel_diff(&other.f).max(self.t.rel_diff(&other.t)).max(self.e.rel_diff(&other.e))
    }
}

/// The subobject completion of a category.
pub struct SubobjectCompletion<'a> {
    pub cat: &'a Category,
}

pub fn complete_subobjects(cat: &Category) -> SubobjectCompletion<'_> {
    SubobjectCompletion { cat }
}

impl SubobjectCompletion<'_> {
    /// Embeds a plain arrow as `(1, T, 1)`.
    pub fn embed(&self, t: &Arrow) -> SubobjectTriple {
        SubobjectTriple { f: Arrow::identity(t.dst()), t: t.clone(), e: Arrow::identity(t.src()) }
    }

    /// Splitting of a projection `E ∈ (ρ, ρ)`: an isometry `V` from `(ρ, E)`
    /// to `(ρ, 1)` with `V*∘V = 1_{(ρ,E)}` and `V∘V* = E`.
    pub fn split(&self, e: &Arrow, tol: f64) -> Result<(SubobjectTriple, SubobjectTriple)> {
        let one = Arrow::identity(e.src());
        let v = SubobjectTriple::new(one.clone(), e.clone(), e.clone(), tol)?;
        let vs = SubobjectTriple::new(e.clone(), e.clone(), one, tol)?;
        Ok((v, vs))
    }

    /// Basis of the arrow space `((ρ,E), (σ,F))`: `F X E` over a basis of `(ρ,σ)`.
    pub fn hom_basis(&self, e: &Arrow, f: &Arrow) -> Result<Vec<SubobjectTriple>> {
        let raw = self.cat.hom_basis(e.src(), f.src())?;
        let mats: Vec<CMat> = raw.iter().map(|x| f.mat() * x.mat() * e.mat()).collect();
        linalg::orthonormalize_mats(&mats, 1e-10)
            .into_iter()
            .map(|m| {
                Ok(SubobjectTriple { f: f.clone(), t: Arrow::new(e.src(), f.src(), m)?, e: e.clone() })
            })
            .collect()
    }
}

/// An arrow between formal direct sums: `blocks[i][j] ∈ (cols[j], rows[i])`.
#[derive(Clone, Debug)]
pub struct MatrixArrow {
    pub rows: Vec<Obj>,
    pub cols: Vec<Obj>,
    pub blocks: Vec<Vec<Arrow>>,
}

impl MatrixArrow {
    pub fn new(rows: Vec<Obj>, cols: Vec<Obj>, blocks: Vec<Vec<Arrow>>) -> Result<MatrixArrow> {
        if blocks.len() != rows.len() || blocks.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::Shape("block matrix shape does not match object lists".into()));
        }
        for (i, row) in blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if b.src() != &cols[j] || b.dst() != &rows[i] {
                    return Err(Error::Endpoint(format!("block ({i},{j}) has wrong endpoints")));
                }
            }
        }
        Ok(MatrixArrow { rows, cols, blocks })
    }

    pub fn zero(rows: &[Obj], cols: &[Obj]) -> MatrixArrow {
        let blocks = rows.iter().map(|r| cols.iter().map(|c| Arrow::zero(c, r)).collect()).collect();
        MatrixArrow { rows: rows.to_vec(), cols: cols.to_vec(), blocks }
    }

    pub fn identity(objs: &[Obj]) -> MatrixArrow {
        let mut m = Self::zero(objs, objs);
        for (i, o) in objs.iter().enumerate() {
            m.blocks[i][i] = Arrow::identity(o);
        }
        m
    }

    /// Matrix multiplication `self ∘ other`.
    pub fn compose(&self, other: &MatrixArrow) -> Result<MatrixArrow> {
        if self.cols != other.rows {
            return Err(Error::Endpoint("inner object lists differ".into()));
        }
        let mut out = Self::zero(&self.rows, &other.cols);
        for i in 0..self.rows.len() {
            for j in 0..other.cols.len() {
                let mut acc = Arrow::zero(&other.cols[j], &self.rows[i]);
                for k in 0..self.cols.len() {
                    acc = acc.try_add(&self.blocks[i][k].after(&other.blocks[k][j])?)?;
                }
                out.blocks[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// Tensor product with lexicographically ordered summands.
    pub fn tensor(&self, other: &MatrixArrow) -> Result<MatrixArrow> {
        let prod = |a: &[Obj], b: &[Obj]| -> Vec<Obj> { a.iter().flat_map(|x| b.iter().map(move |y| x.tensor(y))).collect() };
        let rows = prod(&self.rows, &other.rows);
        let cols = prod(&self.cols, &other.cols);
        let mut blocks = Vec::with_capacity(rows.len());
        for i in 0..self.rows.len() {
            for ii in 0..other.rows.len() {
                let mut row = Vec::with_capacity(cols.len());
                for j in 0..self.cols.len() {
                    for jj in 0..other.cols.len() {
                        row.push(self.blocks[i][j].tensor(&other.blocks[ii][jj])?);
                    }
                }
                blocks.push(row);
            }
        }
        Ok(MatrixArrow { rows, cols, blocks })
    }

    pub fn adjoint(&self) -> MatrixArrow {
        let blocks = (0..self.cols.len())
            .map(|j| (0..self.rows.len()).map(|i| self.blocks[i][j].adjoint()).collect())
            .collect();
        MatrixArrow { rows: self.cols.clone(), cols: self.rows.clone(), blocks }
    }

    /// The block matrix acting on the direct sum of Hilbert spaces.
    pub fn assemble(&self) -> CMat {
        let rd: usize = self.rows.iter().map(Obj::dim).sum();
        let cd: usize = self.cols.iter().map(Obj::dim).sum();
        let mut m = CMat::zeros(rd, cd);
        let mut r0 = 0;
        for (i, ro) in self.rows.iter().enumerate() {
            let mut c0 = 0;
            for (j, co) in self.cols.iter().enumerate() {
                m.view_mut((r0, c0), (ro.dim(), co.dim())).copy_from(self.blocks[i][j].mat());
                c0 += co.dim();
            }
            r0 += ro.dim();
        }
        m
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.assemble())
    }

    pub fn rel_diff(&self, other: &MatrixArrow) -> f64 {
        linalg::rel_diff(&self.assemble(), &other.assemble())
    }
}

/// The direct-sum completion of a category.
pub struct DirectSumCompletion<'a> {
    pub cat: &'a Category,
}

pub fn complete_direct_sums(cat: &Category) -> DirectSumCompletion<'_> {
    DirectSumCompletion { cat }
}

impl DirectSumCompletion<'_> {
    /// `dim (⊕cols, ⊕rows)`.
    pub fn hom_dim(&self, cols: &[Obj], rows: &[Obj]) -> Result<usize> {
        let mut n = 0;
        for r in rows {
            for c in cols {
                n += self.cat.hom_dim(c, r)?;
            }
        }
        Ok(n)
    }

    /// Basis of `(⊕cols, ⊕rows)`: one nonzero block at a time.
    pub fn hom_basis(&self, cols: &[Obj], rows: &[Obj]) -> Result<Vec<MatrixArrow>> {
        let mut out = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                for b in self.cat.hom_basis(c, r)? {
                    let mut m = MatrixArrow::zero(rows, cols);
                    m.blocks[i][j] = b;
                    out.push(m);
                }
            }
        }
        Ok(out)
    }

    /// The canonical isometries of the formal sum `⊕objs`.
    pub fn injections(&self, objs: &[Obj]) -> Vec<MatrixArrow> {
        (0..objs.len())
            .map(|i| {
                let mut m = MatrixArrow::zero(objs, &objs[i..=i]);
                m.blocks[i][0] = Arrow::identity(&objs[i]);
                m
            })
            .collect()
    }
}
