//! Splitting objects into irreducibles.

use super::{Arrow, BackendKind, Category, Obj};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::random::{self, Rng64};

/// One irreducible summand: `isometry ∈ (object, ρ)`.
#[derive(Clone, Debug)]
pub struct Piece {
    /// Equivalence-class label; pieces of the same class share `object`.
    pub class: String,
    pub object: Obj,
    pub isometry: Arrow,
}

const MAX_SPLIT_TRIES: usize = 32;

impl Category {
    /// Decomposes `o` into irreducible subobjects, `Σ W_i W_i* = 1`.
    ///
    /// Splits along eigenspaces of random Hermitian elements of the
    /// endomorphism algebra until every block is irreducible. Summands
    /// equivalent to a named irreducible object are realized on that object.
    pub fn decompose(&self, o: &Obj, seed: u64) -> Result<Vec<Piece>> {
        if o.dim() == 0 {
            return Ok(Vec::new());
        }
        match self.kind() {
            BackendKind::Free => {
                if o.is_unit() || self.is_irreducible(o)? {
                    return Ok(vec![Piece { class: o.label(), object: o.clone(), isometry: Arrow::identity(o) }]);
                }
                Err(Error::Unsupported(format!("decomposition of reducible `{o}` in a free category")))
            }
            BackendKind::Hilb => {
                let one = self.hilb_space(1)?;
                Ok((0..o.dim())
                    .map(|i| Piece {
                        class: "C1".into(),
                        object: one.clone(),
                        isometry: Arrow::new(&one, o, linalg::from_columns(o.dim(), &[linalg::basis_vec(o.dim(), i)]))
                            .expect("shape"),
                    })
                    .collect())
            }
            BackendKind::RepFiniteGroup => self.decompose_rep(o, seed),
        }
    }

    fn decompose_rep(&self, o: &Obj, seed: u64) -> Result<Vec<Piece>> {
        let mut rng = random::rng(seed);
        let mut leaves: Vec<CMat> = Vec::new();
        self.split(o, linalg::identity(o.dim()), &mut rng, &mut leaves)?;
        // Class representatives: named irreducibles first, then new classes.
        let mut reps: Vec<(String, Obj)> = Vec::new();
        for named in self.named_objects() {
            if self.is_irreducible(&named)? {
                reps.push((named.label(), named));
            }
        }
        let mut pieces = Vec::new();
        for (k, v) in leaves.into_iter().enumerate() {
            let (leaf, iso) = self.subobject(o, &v, &format!("{}[{k}]", o.label()))?;
            let mut found = None;
            for (label, rep) in &reps {
                if rep.dim() == leaf.dim() {
                    let h = self.hom_basis(rep, &leaf)?;
                    if let Some(u) = h.first() {
                        found = Some((label.clone(), rep.clone(), u.scale_re((leaf.dim() as f64).sqrt())));
                        break;
                    }
                }
            }
            match found {
                Some((class, rep, u)) => {
                    // u ∈ (rep, leaf) unitary, so iso ∘ u is an isometry rep → o
                    pieces.push(Piece { class, object: rep, isometry: iso.after(&u)? });
                }
                None => {
                    let class = leaf.label();
                    reps.push((class.clone(), leaf.clone()));
                    pieces.push(Piece { class, object: leaf, isometry: iso });
                }
            }
        }
        Ok(pieces)
    }

    fn split(&self, o: &Obj, v: CMat, rng: &mut Rng64, leaves: &mut Vec<CMat>) -> Result<()> {
        let (sub, _) = self.subobject(o, &v, "block")?;
        let basis = self.hom_basis(&sub, &sub)?;
        if basis.len() <= 1 {
            leaves.push(v);
            return Ok(());
        }
        for _ in 0..MAX_SPLIT_TRIES {
            let mut h = CMat::zeros(sub.dim(), sub.dim());
            for b in &basis {
                let c = random::gaussian_complex(rng);
                h += b.mat() * c + b.mat().adjoint() * c.conj();
            }
            let eig = linalg::herm_eigen(&h);
            let spread = eig.values.last().unwrap() - eig.values.first().unwrap();
            let clusters = linalg::cluster_sorted(&eig.values, 1e-6 * spread.max(1e-300));
            if clusters.len() < 2 {
                continue;
            }
            for c in clusters {
                let u = linalg::columns(&eig.vectors, c);
                self.split(o, &v * u, rng, leaves)?;
            }
            return Ok(());
        }
        Err(Error::NoConvergence { iterations: MAX_SPLIT_TRIES, change: 0.0 })
    }

    /// Multiplicity of each irreducible class in `o`.
    pub fn multiplicities(&self, o: &Obj, seed: u64) -> Result<Vec<(String, Obj, usize)>> {
        let mut out: Vec<(String, Obj, usize)> = Vec::new();
        for p in self.decompose(o, seed)? {
            match out.iter_mut().find(|(c, _, _)| *c == p.class) {
                Some(e) => e.2 += 1,
                None => out.push((p.class, p.object, 1)),
            }
        }
        Ok(out)
    }
}
