//! Finite group data for the representation backend.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

const MAX_ORDER: usize = 200_000;

/// A finite group presented by generators, enumerated through a faithful
/// representation of the registered objects.
#[derive(Debug)]
pub struct GroupData {
    n_generators: usize,
    relations: Vec<Vec<(usize, i64)>>,
    /// `tree[k] = (parent, generator)` with element `k = gen · parent`;
    /// element 0 is the identity.
    tree: Vec<(usize, usize)>,
}

fn word_value(mats: &[CMat], word: &[(usize, i64)], dim: usize) -> Result<CMat> {
    let mut acc = linalg::identity(dim);
    for &(g, e) in word {
        let m = mats.get(g).ok_or_else(|| Error::Invalid(format!("relation uses unknown generator {g}")))?;
        let base = if e < 0 { m.adjoint() } else { m.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
    }
    Ok(acc)
}

pub(super) fn check_representation(label: &str, dim: usize, mats: &[CMat], relations: &[Vec<(usize, i64)>]) -> Result<()> {
    for (k, m) in mats.iter().enumerate() {
        if m.shape() != (dim, dim) {
            return Err(Error::Shape(format!("object {label}: generator {k} has shape {:?}, expected {dim}×{dim}", m.shape())));
        }
        let defect = linalg::rel_diff(&(m.adjoint() * m), &linalg::identity(dim));
        if defect > 1e-9 {
            return Err(Error::Invalid(format!("object {label}: generator {k} is not unitary (defect {defect:e})")));
        }
    }
    for (k, w) in relations.iter().enumerate() {
        let v = word_value(mats, w, dim)?;
        let defect = linalg::rel_diff(&v, &linalg::identity(dim));
        if defect > 1e-9 {
            return Err(Error::Invalid(format!("object {label}: relation {k} fails (defect {defect:e})")));
        }
    }
    Ok(())
}

fn key(mats: &[CMat]) -> Vec<i64> {
    mats.iter()
        .flat_map(|m| m.iter().flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64]))
        .collect()
}

impl GroupData {
    /// Breadth-first enumeration of the group generated by the joint images
    /// of the generators in all given representations.
    pub(super) fn enumerate(n_generators: usize, relations: Vec<Vec<(usize, i64)>>, reps: &[&Vec<CMat>]) -> Result<GroupData> {
        let gens: Vec<Vec<CMat>> = (0..n_generators).map(|k| reps.iter().map(|r| r[k].clone()).collect()).collect();
        let id: Vec<CMat> = reps.iter().map(|r| linalg::identity(r.first().map(|m| m.nrows()).unwrap_or(1))).collect();
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        seen.insert(key(&id), 0);
        let mut elems = vec![id];
        let mut tree = vec![(0, 0)];
        let mut head = 0;
        while head < elems.len() {
            for (g, gm) in gens.iter().enumerate() {
                let next: Vec<CMat> = gm.iter().zip(&elems[head]).map(|(a, b)| a * b).collect();
                let k = key(&next);
                if !seen.contains_key(&k) {
                    seen.insert(k, elems.len());
                    elems.push(next);
                    tree.push((head, g));
                    if elems.len() > MAX_ORDER {
                        return Err(Error::CapExceeded { required: elems.len(), cap: MAX_ORDER });
                    }
                }
            }
            head += 1;
        }
        Ok(GroupData { n_generators, relations, tree })
    }

    pub fn n_generators(&self) -> usize {
        self.n_generators
    }

    pub fn relations(&self) -> &[Vec<(usize, i64)>] {
        &self.relations
    }

    pub fn order(&self) -> usize {
        self.tree.len()
    }

    /// All group element matrices in a representation given by generator images.
    pub fn elements(&self, gens: &[CMat]) -> Vec<CMat> {
        let dim = gens.first().map(|m| m.nrows()).unwrap_or(1);
        let mut out: Vec<CMat> = Vec::with_capacity(self.tree.len());
        out.push(linalg::identity(dim));
        for &(parent, g) in &self.tree[1..] {
            let m = &gens[g] * &out[parent];
            out.push(m);
        }
        out
    }

    /// `dim (ρ, σ)` from characters.
    pub fn hom_dimension(&self, a: &[CMat], b: &[CMat]) -> usize {
        let ea = self.elements(a);
        let eb = self.elements(b);
        let s: f64 = ea.iter().zip(&eb).map(|(x, y)| (linalg::trace(x).conj() * linalg::trace(y)).re).sum();
        (s / self.order() as f64).round().max(0.0) as usize
    }

    /// Orthonormal basis of intertwiners `X` with `X a(g) = b(g) X`, by
    /// averaging matrix units over the group.
    pub fn intertwiners(&self, a: &[CMat], b: &[CMat]) -> Vec<CMat> {
        let ea = self.elements(a);
        let eb = self.elements(b);
        let order = self.order() as f64;
        let s: f64 = ea.iter().zip(&eb).map(|(x, y)| (linalg::trace(x).conj() * linalg::trace(y)).re).sum();
        let dim = (s / order).round().max(0.0) as usize;
        let n = ea[0].nrows();
        let m = eb[0].nrows();
        let mut basis: Vec<linalg::CVec> = Vec::new();
        if dim == 0 {
            return Vec::new();
        }
        'outer: for i in 0..m {
            for j in 0..n {
                // (1/|G|) Σ b(g) E_ij a(g)*: column i of b(g) times row j of a(g)*
                let mut p = CMat::zeros(m, n);
                for (x, y) in ea.iter().zip(&eb) {
                    for c in 0..n {
                        let ac = x[(c, j)].conj();
                        for r in 0..m {
                            p[(r, c)] += y[(r, i)] * ac;
                        }
                    }
                }
                let p = p.unscale(order);
                if linalg::fro_norm(&p) < 1e-10 {
                    continue;
                }
                let v = linalg::vec_of(&p);
                let before = basis.len();
                let mut cand = basis.clone();
                cand.push(v);
                let ortho = linalg::gram_schmidt(&cand, 1e-8);
                if ortho.len() > before {
                    basis = ortho;
                }
                if basis.len() == dim {
                    break 'outer;
                }
            }
        }
        basis.iter().map(|v| linalg::unvec(v, m, n)).collect()
    }
}
