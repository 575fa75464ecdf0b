//! JSON category files. Complex entries are `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use super::{Category, FreeData};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};

/// A matrix as rows of `[re, im]` pairs, or a column vector as a flat list.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixJson {
    Rows(Vec<Vec<[f64; 2]>>),
    Column(Vec<[f64; 2]>),
}

impl MatrixJson {
    pub fn from_mat(m: &CMat) -> MatrixJson {
        MatrixJson::Rows((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }

    pub fn to_mat(&self) -> Result<CMat> {
        match self {
            MatrixJson::Column(v) => Ok(CMat::from_fn(v.len(), 1, |i, _| c(v[i][0], v[i][1]))),
            MatrixJson::Rows(rows) => {
                let n = rows.len();
                let m = rows.first().map(Vec::len).unwrap_or(0);
                if rows.iter().any(|r| r.len() != m) {
                    return Err(Error::Shape("ragged matrix rows".into()));
                }
                let mat = CMat::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1]));
                if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Invalid("non-finite matrix entry".into()));
                }
                Ok(mat)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HilbObjectSpec {
    pub id: String,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSpec {
    pub generators: usize,
    /// Words of `[generator, exponent]` pairs equal to the identity.
    #[serde(default)]
    pub relations: Vec<Vec<(usize, i64)>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepObjectSpec {
    pub id: String,
    pub dim: usize,
    pub generator_matrices: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeObjectSpec {
    pub id: String,
    pub dim: usize,
    pub irreducible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_sign: Option<i8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomSpec {
    pub src: String,
    pub dst: String,
    pub basis: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeSolutionSpec {
    pub object: String,
    #[serde(rename = "R")]
    pub r: MatrixJson,
    #[serde(rename = "R_bar")]
    pub r_bar: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BraidingSpec {
    pub left: String,
    pub right: String,
    pub matrix: MatrixJson,
}

/// Braiding data: a list of generator pairs, or a table keyed `"(a,b)"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BraidingBlock {
    List(Vec<BraidingSpec>),
    Table {
        epsilon: std::collections::BTreeMap<String, MatrixJson>,
        #[serde(default)]
        unitary: Option<bool>,
    },
}

impl Default for BraidingBlock {
    fn default() -> Self {
        BraidingBlock::List(Vec::new())
    }
}

impl BraidingBlock {
    pub fn entries(&self) -> Result<Vec<(String, String, CMat)>> {
        match self {
            BraidingBlock::List(v) => v.iter().map(|b| Ok((b.left.clone(), b.right.clone(), b.matrix.to_mat()?))).collect(),
            BraidingBlock::Table { epsilon, .. } => epsilon
                .iter()
                .map(|(k, m)| {
                    let inner = k.trim().trim_start_matches('(').trim_end_matches(')');
                    let (a, b) = inner
                        .split_once(',')
                        .ok_or_else(|| Error::Invalid(format!("braiding key `{k}` is not of the form (a,b)")))?;
                    Ok((a.trim().to_string(), b.trim().to_string(), m.to_mat()?))
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CategoryFile {
    Hilb {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        objects: Vec<HilbObjectSpec>,
    },
    RepFiniteGroup {
        #[serde(default)]
        name: Option<String>,
        group: GroupSpec,
        objects: Vec<RepObjectSpec>,
    },
    Free {
        #[serde(default)]
        name: Option<String>,
        objects: Vec<FreeObjectSpec>,
        #[serde(default)]
        homs: Vec<HomSpec>,
        #[serde(default)]
        solutions: Vec<FreeSolutionSpec>,
        #[serde(default)]
        braiding: BraidingBlock,
    },
}

impl CategoryFile {
    pub fn parse(text: &str) -> Result<CategoryFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<Category> {
        match self {
            CategoryFile::Hilb { name, objects } => {
                let objs: Vec<(&str, usize)> = objects.iter().map(|o| (o.id.as_str(), o.dim)).collect();
                let mut cat = Category::hilb_with(&objs);
                cat.name = name.clone().unwrap_or_else(|| "Hilb".into());
                Ok(cat)
            }
            CategoryFile::RepFiniteGroup { name, group, objects } => {
                let mut objs = Vec::new();
                for o in objects {
                    let mats = o.generator_matrices.iter().map(MatrixJson::to_mat).collect::<Result<Vec<_>>>()?;
                    if mats.iter().any(|m| m.nrows() != o.dim) {
                        return Err(Error::Shape(format!("object {}: matrices do not have dim {}", o.id, o.dim)));
                    }
                    objs.push((o.id.clone(), mats, o.irreducible));
                }
                Category::rep_finite_group(
                    name.as_deref().unwrap_or("Rep(G)"),
                    group.generators,
                    group.relations.clone(),
                    objs,
                )
            }
            CategoryFile::Free { name, objects, homs, solutions, braiding } => {
                let mut data = FreeData::default();
                for o in objects {
                    if let Some(cj) = &o.conjugate {
                        data.conj.insert(o.id.clone(), cj.clone());
                    }
                    if let Some(s) = o.real_sign {
                        data.real_signs.insert(o.id.clone(), s);
                    }
                }
                for h in homs {
                    let mats = h.basis.iter().map(MatrixJson::to_mat).collect::<Result<Vec<_>>>()?;
                    data.homs.insert((h.src.clone(), h.dst.clone()), mats);
                }
                for s in solutions {
                    data.solutions.insert(s.object.clone(), (s.r.to_mat()?, s.r_bar.to_mat()?));
                }
                for (a, b, m) in braiding.entries()? {
                    data.braiding.insert((a, b), m);
                }
                let objs = objects.iter().map(|o| (o.id.clone(), o.dim, o.irreducible)).collect();
                Category::free(name.as_deref().unwrap_or("Free"), objs, data)
            }
        }
    }
}

/// Loads a category from JSON text.
pub fn category_from_json(text: &str) -> Result<Category> {
    CategoryFile::parse(text)?.build()
}

/// Serializes the named objects of a group category back to a file.
pub fn rep_category_file(cat: &Category) -> Result<CategoryFile> {
    let g = cat.group().ok_or_else(|| Error::Unsupported("not a group category".into()))?;
    let objects = cat
        .named_objects()
        .iter()
        .map(|o| {
            let mats = cat.rep_matrices(o)?;
            Ok(RepObjectSpec {
                id: o.label(),
                dim: o.dim(),
                generator_matrices: mats.iter().map(MatrixJson::from_mat).collect(),
                irreducible: o.factors()[0].irreducible,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CategoryFile::RepFiniteGroup {
        name: Some(cat.name().to_string()),
        group: GroupSpec { generators: g.n_generators(), relations: g.relations().to_vec() },
        objects,
    })
}

