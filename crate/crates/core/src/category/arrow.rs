use std::ops::{Add, Mul, Neg, Sub};

use super::Obj;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

/// An arrow `src → dst` with its matrix (`dim(dst) × dim(src)`).
#[derive(Clone, Debug)]
pub struct Arrow {
    src: Obj,
    dst: Obj,
    mat: CMat,
}

impl Arrow {
    pub fn new(src: &Obj, dst: &Obj, mat: CMat) -> Result<Arrow> {
        if src.cat != dst.cat {
            return Err(Error::BackendMismatch);
        }
        if mat.shape() != (dst.dim(), src.dim()) {
            return Err(Error::Shape(format!(
                "arrow {} → {} needs a {}×{} matrix, got {:?}",
                src,
                dst,
                dst.dim(),
                src.dim(),
                mat.shape()
            )));
        }
        Ok(Arrow { src: src.clone(), dst: dst.clone(), mat })
    }

    pub fn identity(o: &Obj) -> Arrow {
        Arrow { src: o.clone(), dst: o.clone(), mat: linalg::identity(o.dim()) }
    }

    pub fn zero(src: &Obj, dst: &Obj) -> Arrow {
        Arrow { src: src.clone(), dst: dst.clone(), mat: linalg::zeros(dst.dim(), src.dim()) }
    }

    pub fn src(&self) -> &Obj {
        &self.src
    }

    pub fn dst(&self) -> &Obj {
        &self.dst
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &Arrow) -> Result<Arrow> {
        if self.src != f.dst {
            return Err(Error::Endpoint(format!("cannot compose {} → {} after {} → {}", self.src, self.dst, f.src, f.dst)));
        }
        Ok(Arrow { src: f.src.clone(), dst: self.dst.clone(), mat: &self.mat * &f.mat })
    }

    /// `self ⊗ g` (Kronecker product; endpoints concatenate).
    pub fn tensor(&self, g: &Arrow) -> Result<Arrow> {
        if self.src.cat != g.src.cat {
            return Err(Error::BackendMismatch);
        }
        Ok(Arrow {
            src: self.src.tensor(&g.src),
            dst: self.dst.tensor(&g.dst),
            mat: linalg::kron(&self.mat, &g.mat),
        })
    }

    /// `1_o ⊗ self`.
    pub fn left_id(&self, o: &Obj) -> Arrow {
        Arrow::identity(o).tensor(self).expect("same category")
    }

    /// `self ⊗ 1_o`.
    pub fn right_id(&self, o: &Obj) -> Arrow {
        self.tensor(&Arrow::identity(o)).expect("same category")
    }

    pub fn adjoint(&self) -> Arrow {
        Arrow { src: self.dst.clone(), dst: self.src.clone(), mat: self.mat.adjoint() }
    }

    pub fn scale(&self, s: C64) -> Arrow {
        Arrow { src: self.src.clone(), dst: self.dst.clone(), mat: self.mat.map(|z| z * s) }
    }

    pub fn scale_re(&self, s: f64) -> Arrow {
        self.scale(linalg::r(s))
    }

    pub fn try_add(&self, other: &Arrow) -> Result<Arrow> {
        self.same_endpoints(other)?;
        Ok(Arrow { src: self.src.clone(), dst: self.dst.clone(), mat: &self.mat + &other.mat })
    }

    pub fn try_sub(&self, other: &Arrow) -> Result<Arrow> {
        self.same_endpoints(other)?;
        Ok(Arrow { src: self.src.clone(), dst: self.dst.clone(), mat: &self.mat - &other.mat })
    }

    fn same_endpoints(&self, other: &Arrow) -> Result<()> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::Endpoint(format!(
                "({}, {}) vs ({}, {})",
                self.src, self.dst, other.src, other.dst
            )));
        }
        Ok(())
    }

    /// Operator norm.
    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.mat)
    }

    /// The scalar of an arrow in `(ι, ι)` or any 1×1 arrow.
    pub fn scalar(&self) -> Option<C64> {
        (self.mat.shape() == (1, 1)).then(|| self.mat[(0, 0)])
    }

    /// Same matrix with new endpoints of equal dimensions.
    pub fn retype(&self, src: &Obj, dst: &Obj) -> Result<Arrow> {
        Arrow::new(src, dst, self.mat.clone())
    }

    pub fn rel_diff(&self, other: &Arrow) -> f64 {
        linalg::rel_diff(&self.mat, &other.mat)
    }
}

/// `g ∘ f`.
pub fn compose(g: &Arrow, f: &Arrow) -> Result<Arrow> {
    g.after(f)
}

/// `f ⊗ g`.
pub fn tensor(f: &Arrow, g: &Arrow) -> Result<Arrow> {
    f.tensor(g)
}

impl Mul<&Arrow> for &Arrow {
    type Output = Arrow;
    /// Composition; panics on endpoint mismatch.
    fn mul(self, f: &Arrow) -> Arrow {
        self.after(f).expect("composable arrows")
    }
}

impl Mul<&Arrow> for Arrow {
    type Output = Arrow;
    fn mul(self, f: &Arrow) -> Arrow {
        &self * f
    }
}

impl Add<&Arrow> for &Arrow {
    type Output = Arrow;
    fn add(self, o: &Arrow) -> Arrow {
        self.try_add(o).expect("arrows with equal endpoints")
    }
}

impl Sub<&Arrow> for &Arrow {
    type Output = Arrow;
    fn sub(self, o: &Arrow) -> Arrow {
        self.try_sub(o).expect("arrows with equal endpoints")
    }
}

impl Neg for &Arrow {
    type Output = Arrow;
    fn neg(self) -> Arrow {
        self.scale_re(-1.0)
    }
}
