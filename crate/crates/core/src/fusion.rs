//! Skeletal fusion rings: structure constants, fusion matrices and the
//! spectral data derived from them.
//!
//! Finite rings store `N^k_{ij}` as a dense integer table. The SU(2)-type
//! ladders `a_infinity(d)` follow the Clebsch-Gordan rule on labels
//! `0, 1, 2, ...` and materialize labels on demand.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::RwLock;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::category::{BackendKind, Category, Obj};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tol;

pub const FIBONACCI_JSON: &str = include_str!("../data/fibonacci.json");
pub const ISING_JSON: &str = include_str!("../data/ising.json");
pub const REP_S3_FUSION_JSON: &str = include_str!("../data/rep_s3_fusion.json");

/// Largest ladder depth any query may materialize.
pub const MAX_LADDER_DEPTH: usize = 100_000;

pub type IntMat = DMatrix<u64>;

#[derive(Debug)]
enum Rule {
    Table { n: usize, consts: Vec<u64> },
    /// Clebsch-Gordan ladder, truncated at `level` when given.
    Ladder { level: Option<usize>, depth: RwLock<usize> },
}

/// Labels, conjugation and structure constants `N^k_{ij}` (the
/// multiplicity of `k` in `i ⊗ j`).
#[derive(Debug)]
pub struct FusionRing {
    name: String,
    labels: Vec<String>,
    conj: Vec<usize>,
    fs_sign: Vec<Option<i8>>,
    rule: Rule,
    /// Dimension used by amenability checks when the ring is infinite.
    ladder_dimension: Option<f64>,
}

/// Nonnegative integer multiplicities over the labels of a ring. Entries
/// past the end are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectVec(pub Vec<u64>);

impl ObjectVec {
    pub fn label(i: usize) -> ObjectVec {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        ObjectVec(v)
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().enumerate().filter(|(_, m)| **m > 0).map(|(i, m)| (i, *m))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|m| *m == 0)
    }

    /// Largest label with nonzero multiplicity.
    pub fn top(&self) -> Option<usize> {
        self.0.iter().rposition(|m| *m > 0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn sum(&self, other: &ObjectVec) -> ObjectVec {
        let n = self.0.len().max(other.0.len());
        ObjectVec((0..n).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// `2*sigma+psi` style, `0` for the zero object.
    pub fn display(&self, ring: &FusionRing) -> String {
        let terms: Vec<String> =
            self.support().map(|(i, m)| if m == 1 { ring.label_name(i) } else { format!("{m}*{}", ring.label_name(i)) }).collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Entries of a fusion file may name labels or give their index.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FusionFile {
    #[serde(default)]
    pub name: Option<String>,
    pub labels: Vec<String>,
    pub unit: LabelRef,
    #[serde(default)]
    pub conj: BTreeMap<String, String>,
    #[serde(rename = "N")]
    pub n: Vec<(LabelRef, LabelRef, LabelRef, u64)>,
    #[serde(default)]
    pub fs_sign: BTreeMap<String, i8>,
}

impl FusionRing {
    /// Builds and validates a finite ring. `n[(i * len + j) * len + k]` is
    /// `N^k_{ij}`; label 0 must be the unit.
    pub fn finite(name: &str, labels: Vec<String>, conj: Vec<usize>, consts: Vec<u64>, fs_sign: Vec<Option<i8>>) -> Result<FusionRing> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Invalid("a fusion ring needs at least the unit label".into()));
        }
        if conj.len() != n || fs_sign.len() != n || consts.len() != n * n * n {
            return Err(Error::Shape("fusion ring tables do not match the label count".into()));
        }
        let ring = FusionRing {
            name: name.to_string(),
            labels,
            conj,
            fs_sign,
            rule: Rule::Table { n, consts },
            ladder_dimension: None,
        };
        ring.validate()?;
        Ok(ring)
    }

    /// The SU(2)-type ladder with labels `0, 1, 2, ...` and
    /// `N^k_{ij} = 1` iff `|i-j| ≤ k ≤ i+j` with `i+j+k` even. `d` is the
    /// dimension assigned to label 1.
    pub fn a_infinity(d: f64) -> Result<FusionRing> {
        if !(d.is_finite() && d >= 2.0) {
            return Err(Error::Invalid(format!("a_infinity needs d ≥ 2, got {d}")));
        }
        Ok(FusionRing {
            name: format!("a_infinity({d})"),
            labels: Vec::new(),
            conj: Vec::new(),
            fs_sign: Vec::new(),
            rule: Rule::Ladder { level: None, depth: RwLock::new(0) },
            ladder_dimension: Some(d),
        })
    }

    /// SU(2) at level `k`: labels `0..=k`, truncated Clebsch-Gordan rule.
    pub fn su2_level_k(k: usize) -> Result<FusionRing> {
        let n = k + 1;
        let mut consts = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    consts[(i * n + j) * n + l] = cg(i, j, l, Some(k));
                }
            }
        }
        let sign = |i: usize| Some(if i % 2 == 0 { 1 } else { -1 });
        FusionRing::finite(
            &format!("su2_level_{k}"),
            (0..n).map(|i| i.to_string()).collect(),
            (0..n).collect(),
            consts,
            (0..n).map(sign).collect(),
        )
    }

    /// Characters of Z_n with `χ_a ⊗ χ_b = χ_{a+b}`.
    pub fn rep_z_n(n: usize) -> Result<FusionRing> {
        if n == 0 {
            return Err(Error::Invalid("Z_n needs n ≥ 1".into()));
        }
        let mut consts = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                consts[(i * n + j) * n + (i + j) % n] = 1;
            }
        }
        let fs = (0..n).map(|i| if (2 * i) % n == 0 { Some(1) } else { Some(0) }).collect();
        FusionRing::finite(
            &format!("rep_z_{n}"),
            (0..n).map(|i| format!("chi{i}")).collect(),
            (0..n).map(|i| (n - i) % n).collect(),
            consts,
            fs,
        )
    }

    pub fn from_json(text: &str) -> Result<FusionRing> {
        let file: FusionFile = serde_json::from_str(text)?;
        FusionRing::from_file(&file)
    }

    pub fn from_file(file: &FusionFile) -> Result<FusionRing> {
        let index: HashMap<&str, usize> = file.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if index.len() != file.labels.len() {
            return Err(Error::Invalid("duplicate fusion labels".into()));
        }
        let resolve = |r: &LabelRef| -> Result<usize> {
            match r {
                LabelRef::Index(i) if *i < file.labels.len() => Ok(*i),
                LabelRef::Index(i) => Err(Error::UnknownObject(format!("label index {i}"))),
                LabelRef::Name(s) => index.get(s.as_str()).copied().ok_or_else(|| Error::UnknownObject(s.clone())),
            }
        };
        let unit = resolve(&file.unit)?;
        // move the unit to position 0
        let mut order: Vec<usize> = vec![unit];
        order.extend((0..file.labels.len()).filter(|i| *i != unit));
        let mut pos = vec![0; order.len()];
        for (p, i) in order.iter().enumerate() {
            pos[*i] = p;
        }
        let n = order.len();
        let labels: Vec<String> = order.iter().map(|i| file.labels[*i].clone()).collect();
        let mut conj: Vec<usize> = (0..n).collect();
        for (a, b) in &file.conj {
            let ia = pos[resolve(&LabelRef::Name(a.clone()))?];
            let ib = pos[resolve(&LabelRef::Name(b.clone()))?];
            conj[ia] = ib;
        }
        let mut consts = vec![0; n * n * n];
        for (i, j, k, v) in &file.n {
            let (i, j, k) = (pos[resolve(i)?], pos[resolve(j)?], pos[resolve(k)?]);
            consts[(i * n + j) * n + k] = *v;
        }
        let mut fs = vec![None; n];
        for (l, s) in &file.fs_sign {
            if ![-1, 0, 1].contains(s) {
                return Err(Error::Invalid(format!("fs_sign of {l} must be -1, 0 or 1")));
            }
            fs[pos[resolve(&LabelRef::Name(l.clone()))?]] = Some(*s);
        }
        FusionRing::finite(file.name.as_deref().unwrap_or("fusion"), labels, conj, consts, fs)
    }

    /// Ring of irreducibles of a Hilb or Rep category. `labels` must list
    /// pairwise inequivalent irreducibles closed under tensor products, the
    /// unit first.
    pub fn from_category(cat: &Category, labels: &[Obj]) -> Result<FusionRing> {
        if !matches!(cat.kind(), BackendKind::Hilb | BackendKind::RepFiniteGroup) {
            return Err(Error::Unsupported("fusion rings are extracted from Hilb or Rep categories".into()));
        }
        if labels.is_empty() || !labels[0].is_unit() && cat.hom_dim(&labels[0], &cat.unit())? != 1 {
            return Err(Error::Invalid("the first label must be the unit".into()));
        }
        let n = labels.len();
        for (a, x) in labels.iter().enumerate() {
            for (b, y) in labels.iter().enumerate() {
                let h = cat.hom_dim(x, y)?;
                if h != usize::from(a == b) {
                    return Err(Error::Invalid(format!("labels {x} and {y} are not distinct irreducibles")));
                }
            }
        }
        let mut consts = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = labels[i].tensor(&labels[j]);
                let mut total = 0;
                for k in 0..n {
                    let m = cat.hom_dim(&labels[k], &prod)?;
                    consts[(i * n + j) * n + k] = m as u64;
                    total += m * labels[k].dim();
                }
                if total != prod.dim() {
                    return Err(Error::Invalid(format!("{prod} is not a sum of the given labels")));
                }
            }
        }
        let mut conj = vec![0; n];
        let mut fs = vec![None; n];
        for i in 0..n {
            let bar = cat.conjugate_object(&labels[i])?;
            conj[i] = (0..n)
                .find(|k| cat.hom_dim(&labels[*k], &bar).map(|h| h == 1).unwrap_or(false))
                .ok_or_else(|| Error::Invalid(format!("conjugate of {} is not among the labels", labels[i])))?;
            fs[i] = if conj[i] == i {
                Some(crate::conjugation::real_sign(cat, &labels[i])? as i8)
            } else {
                Some(0)
            };
        }
        FusionRing::finite(cat.name(), labels.iter().map(|o| o.label()).collect(), conj, consts, fs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.rule, Rule::Table { .. })
    }

    /// Number of labels currently materialized.
    pub fn size(&self) -> usize {
        match &self.rule {
            Rule::Table { n, .. } => *n,
            Rule::Ladder { depth, .. } => *depth.read().expect("ladder lock poisoned"),
        }
    }

    /// Makes at least `n` labels available. Finite rings only check the bound.
    pub fn ensure_size(&self, n: usize) -> Result<()> {
        match &self.rule {
            Rule::Table { n: size, .. } => {
                if n > *size {
                    return Err(Error::Invalid(format!("{} has only {size} labels", self.name)));
                }
                Ok(())
            }
            Rule::Ladder { level, depth } => {
                let cap = level.map(|k| k + 1).unwrap_or(MAX_LADDER_DEPTH);
                if n > cap {
                    return Err(Error::CapExceeded { required: n, cap });
                }
                let mut d = depth.write().expect("ladder lock poisoned");
                *d = (*d).max(n);
                Ok(())
            }
        }
    }

    pub fn label_name(&self, i: usize) -> String {
        match &self.rule {
            Rule::Table { .. } => self.labels[i].clone(),
            Rule::Ladder { .. } => i.to_string(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.size()).map(|i| self.label_name(i)).collect()
    }

    pub fn label_index(&self, name: &str) -> Result<usize> {
        match &self.rule {
            Rule::Table { .. } => {
                self.labels.iter().position(|l| l == name).ok_or_else(|| Error::UnknownObject(name.to_string()))
            }
            Rule::Ladder { .. } => {
                let i: usize = name.parse().map_err(|_| Error::UnknownObject(name.to_string()))?;
                self.ensure_size(i + 1)?;
                Ok(i)
            }
        }
    }

    /// Parses `"tau"`, `"2*sigma+psi"`, `"1+1"` into an object vector.
    pub fn parse_object(&self, text: &str) -> Result<ObjectVec> {
        let mut v = ObjectVec::default();
        for term in text.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let (m, l) = match term.split_once('*') {
                Some((m, l)) => (m.trim().parse::<u64>().map_err(|_| Error::Invalid(format!("bad multiplicity in `{term}`")))?, l.trim()),
                None => (1, term),
            };
            let i = self.label_index(l)?;
            if v.0.len() <= i {
                v.0.resize(i + 1, 0);
            }
            v.0[i] += m;
        }
        Ok(v)
    }

    pub fn conj(&self, i: usize) -> usize {
        match &self.rule {
            Rule::Table { .. } => self.conj[i],
            Rule::Ladder { .. } => i,
        }
    }

    pub fn fs_sign(&self, i: usize) -> Option<i8> {
        match &self.rule {
            Rule::Table { .. } => self.fs_sign[i],
            Rule::Ladder { .. } => Some(1),
        }
    }

    /// `N^k_{ij}`.
    pub fn n(&self, i: usize, j: usize, k: usize) -> u64 {
        match &self.rule {
            Rule::Table { n, consts } => {
                if i >= *n || j >= *n || k >= *n {
                    0
                } else {
                    consts[(i * n + j) * n + k]
                }
            }
            Rule::Ladder { level, .. } => cg(i, j, k, *level),
        }
    }

    /// Labels `k` with `N^k_{ij} > 0`.
    fn products(&self, i: usize, j: usize) -> Vec<(usize, u64)> {
        match &self.rule {
            Rule::Table { n, .. } => (0..*n).map(|k| (k, self.n(i, j, k))).filter(|(_, m)| *m > 0).collect(),
            Rule::Ladder { level, .. } => {
                let lo = i.abs_diff(j);
                let hi = match level {
                    Some(l) => (i + j).min(2 * l - i - j),
                    None => i + j,
                };
                (lo..=hi).step_by(2).map(|k| (k, 1)).collect()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.size();
        let bad = |m: String| Err(Error::Invalid(format!("{}: {m}", self.name)));
        for i in 0..n {
            if self.conj(i) >= n || self.conj(self.conj(i)) != i {
                return bad(format!("conjugation is not an involution at {}", self.label_name(i)));
            }
            match self.fs_sign(i) {
                Some(s) if s != 0 && self.conj(i) != i => {
                    return bad(format!("fs_sign {s} on non-self-conjugate {}", self.label_name(i)));
                }
                Some(0) if self.conj(i) == i => return bad(format!("fs_sign 0 on self-conjugate {}", self.label_name(i))),
                _ => {}
            }
            for k in 0..n {
                let d = u64::from(i == k);
                if self.n(i, 0, k) != d || self.n(0, i, k) != d {
                    return bad(format!("label 0 is not a unit for {}", self.label_name(i)));
                }
            }
            for j in 0..n {
                if self.n(i, j, 0) != u64::from(j == self.conj(i)) {
                    return bad(format!("N^ι_({},{}) violates duality", self.label_name(i), self.label_name(j)));
                }
            }
        }
        if self.conj(0) != 0 {
            return bad("the unit is not self-conjugate".into());
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs: u64 = (0..n).map(|m| self.n(i, j, m) * self.n(m, k, l)).sum();
                        let rhs: u64 = (0..n).map(|m| self.n(i, m, l) * self.n(j, k, m)).sum();
                        if lhs != rhs {
                            return bad(format!(
                                "associativity fails at ({},{},{};{})",
                                self.label_name(i),
                                self.label_name(j),
                                self.label_name(k),
                                self.label_name(l)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Highest label touched by fusing labels up to `i` with `rho`.
    fn reach(&self, rho: &ObjectVec, i: usize) -> usize {
        i + rho.top().unwrap_or(0)
    }

    fn check_object(&self, rho: &ObjectVec) -> Result<()> {
        if let Some(t) = rho.top() {
            self.ensure_size(t + 1)?;
        }
        Ok(())
    }

    pub fn tensor(&self, a: &ObjectVec, b: &ObjectVec) -> Result<ObjectVec> {
        self.check_object(a)?;
        self.check_object(b)?;
        let mut out: Vec<u64> = Vec::new();
        for (i, x) in a.support() {
            for (j, y) in b.support() {
                for (k, m) in self.products(i, j) {
                    if out.len() <= k {
                        out.resize(k + 1, 0);
                    }
                    out[k] += x * y * m;
                }
            }
        }
        if let Some(t) = out.iter().rposition(|m| *m > 0) {
            self.ensure_size(t + 1)?;
        }
        Ok(ObjectVec(out))
    }

    pub fn conjugate(&self, a: &ObjectVec) -> ObjectVec {
        let mut out = vec![0; a.0.len()];
        for (i, m) in a.support() {
            let c = self.conj(i);
            if out.len() <= c {
                out.resize(c + 1, 0);
            }
            out[c] += m;
        }
        ObjectVec(out)
    }

    /// `dim(a, b) = Σ_k a_k b_k`.
    pub fn hom_dim(&self, a: &ObjectVec, b: &ObjectVec) -> u64 {
        a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum()
    }
}

fn cg(i: usize, j: usize, k: usize, level: Option<usize>) -> u64 {
    let lo = i.abs_diff(j);
    let hi = match level {
        Some(l) if i + j <= 2 * l => (i + j).min(2 * l - i - j),
        Some(_) => return 0,
        None => i + j,
    };
    u64::from(k >= lo && k <= hi && (i + j + k) % 2 == 0 && level.is_none_or(|l| k <= l))
}

/// `m^ρ_{ij} = Σ_k ρ_k N^j_{ki}` on the first `size` labels.
pub fn fusion_matrix_truncated(ring: &FusionRing, rho: &ObjectVec, size: usize) -> Result<IntMat> {
    ring.check_object(rho)?;
    ring.ensure_size(size)?;
    let mut m = IntMat::zeros(size, size);
    for i in 0..size {
        for (k, x) in rho.support() {
            for (j, mult) in ring.products(k, i) {
                if j < size {
                    m[(i, j)] += x * mult;
                }
            }
        }
    }
    Ok(m)
}

/// The fusion matrix on all materialized labels.
pub fn fusion_matrix(ring: &FusionRing, rho: &ObjectVec) -> Result<IntMat> {
    ring.check_object(rho)?;
    fusion_matrix_truncated(ring, rho, ring.size())
}

pub fn to_real(m: &IntMat) -> DMatrix<f64> {
    m.map(|x| x as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct PfDimension {
    pub value: f64,
    /// Normalized so that the unit entry is 1; zero off the reachable set.
    pub vector: Vec<f64>,
    /// Labels that fusion with ρ never reaches from ι. They do not enter the
    /// eigenvalue.
    pub unreachable: Vec<String>,
}

/// Labels reachable from ι by repeatedly fusing with ρ.
pub fn reachable(ring: &FusionRing, rho: &ObjectVec) -> Result<Vec<usize>> {
    let m = fusion_matrix(ring, rho)?;
    let n = m.nrows();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if m[(i, j)] > 0 && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok((0..n).filter(|i| seen[*i]).collect())
}

/// Perron-Frobenius eigenvalue of `m^ρ` on the labels reachable from ι.
/// That set is invariant under `m^ρ`, so the eigenvalue is `d(ρ)` whenever
/// the ring has a positive dimension vector.
pub fn pf_dimension(ring: &FusionRing, rho: &ObjectVec) -> Result<PfDimension> {
    if !ring.is_finite() {
        return Err(Error::Unsupported(format!(
            "{} has infinitely many labels; use amenability_gap for a bracket",
            ring.name()
        )));
    }
    if rho.is_zero() {
        return Ok(PfDimension { value: 0.0, vector: vec![0.0; ring.size()], unreachable: Vec::new() });
    }
    let m = to_real(&fusion_matrix(ring, rho)?);
    let keep = reachable(ring, rho)?;
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |a, b| m[(keep[a], keep[b])]);
    let pf = linalg::pf_eigen(&sub)?;
    let mut vector = vec![0.0; ring.size()];
    let v0 = pf.vector[0];
    if v0 <= 0.0 {
        return Err(Error::Disconnected(vec![ring.label_name(0)]));
    }
    for (a, i) in keep.iter().enumerate() {
        vector[*i] = pf.vector[a] / v0;
    }
    let unreachable = (0..ring.size()).filter(|i| !keep.contains(i)).map(|i| ring.label_name(i)).collect();
    Ok(PfDimension { value: pf.value, vector, unreachable })
}

/// Dimension vector of a finite ring: the PF eigenvector of the sum of all
/// fusion matrices, normalized at ι.
pub fn global_dimensions(ring: &FusionRing) -> Result<Vec<f64>> {
    if !ring.is_finite() {
        return Err(Error::Unsupported(format!("{} has infinitely many labels", ring.name())));
    }
    let all = ObjectVec(vec![1; ring.size()]);
    let pf = pf_dimension(ring, &all)?;
    // The sum of all labels reaches everything, so the eigenvector is
    // positive; each label's dimension is its PF eigenvalue.
    (0..ring.size()).map(|i| Ok(pf_dimension(ring, &ObjectVec::label(i))?.value)).collect::<Result<Vec<_>>>().map(|d| {
        debug_assert!(pf.unreachable.is_empty());
        d
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AmenabilityReport {
    /// Lower end of the bracket for `‖m^ρ‖` (spectral norm of a truncation).
    pub m_norm_lower: f64,
    /// Upper end of the bracket (Schur row/column sum bound).
    pub m_norm_upper: f64,
    pub m_norm: f64,
    pub d: f64,
    pub gap: f64,
    pub amenable: bool,
    pub depth: usize,
}

/// Compares `d(ρ)` with `‖m^ρ‖` on ℓ²(labels). For finite rings the norm
/// is exact; for ladders it is bracketed using the truncation to `depth`
/// labels and the Schur bound, which holds for every depth.
pub fn amenability_gap(ring: &FusionRing, rho: &ObjectVec, d: Option<f64>, depth: Option<usize>) -> Result<AmenabilityReport> {
    let tol = tol::spectral();
    if ring.is_finite() {
        let m = to_real(&fusion_matrix(ring, rho)?);
        let norm = m.clone().singular_values().max();
        let d = match d {
            Some(d) => d,
            None => dimension_of(ring, rho)?,
        };
        let gap = (d - norm).abs();
        return Ok(AmenabilityReport {
            m_norm_lower: norm,
            m_norm_upper: norm,
            m_norm: norm,
            d,
            gap,
            amenable: gap < tol * d.max(1.0),
            depth: ring.size(),
        });
    }
    let depth = depth.unwrap_or(64).max(rho.top().unwrap_or(0) + 1);
    let m = to_real(&fusion_matrix_truncated(ring, rho, depth)?);
    let lower = if depth == 0 { 0.0 } else { m.clone().singular_values().max() };
    let upper = schur_bound(ring, rho)?;
    let d = match d.or(ring.ladder_dimension.map(|d1| ladder_dimension(d1, rho))) {
        Some(d) => d,
        None => return Err(Error::Invalid("a dimension is needed for an infinite ring".into())),
    };
    // amenable needs d within the bracket; d above the upper end certifies
    // the opposite
    let amenable = d <= upper + tol * d.max(1.0);
    Ok(AmenabilityReport {
        m_norm_lower: lower,
        m_norm_upper: upper,
        m_norm: upper,
        d,
        gap: (d - upper).max(0.0),
        amenable,
        depth,
    })
}

/// `sqrt(max row sum · max column sum)` of the infinite ladder matrix.
/// Label `k` fuses any `i` into at most `k+1` labels, and the rule is
/// symmetric in `i, j`.
fn schur_bound(ring: &FusionRing, rho: &ObjectVec) -> Result<f64> {
    match &ring.rule {
        Rule::Ladder { .. } => Ok(rho.support().map(|(k, m)| (m * (k as u64 + 1)) as f64).sum()),
        Rule::Table { .. } => {
            let m = to_real(&fusion_matrix(ring, rho)?);
            let row = m.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
            let col = m.column_iter().map(|c| c.sum()).fold(0.0, f64::max);
            Ok((row * col).sqrt())
        }
    }
}

/// Chebyshev recursion `d_{n+1} = d_1 d_n - d_{n-1}` for ladder labels.
pub fn ladder_label_dimension(d1: f64, n: usize) -> f64 {
    let (mut a, mut b) = (1.0, d1);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let c = d1 * b - a;
        a = b;
        b = c;
    }
    b
}

fn ladder_dimension(d1: f64, rho: &ObjectVec) -> f64 {
    rho.support().map(|(k, m)| m as f64 * ladder_label_dimension(d1, k)).sum()
}

/// Dimension of an object vector from the ring's own data: PF dimensions
/// for finite rings, the Chebyshev recursion on ladders.
pub fn dimension_of(ring: &FusionRing, rho: &ObjectVec) -> Result<f64> {
    if let Some(d1) = ring.ladder_dimension {
        return Ok(ladder_dimension(d1, rho));
    }
    if let Rule::Ladder { .. } = ring.rule {
        return Err(Error::Invalid("ladder without a dimension".into()));
    }
    let dims = global_dimensions(ring)?;
    Ok(rho.support().map(|(i, m)| m as f64 * dims[i]).sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthTerm {
    pub n: usize,
    /// `dim(ρⁿ, ρⁿ)` as a decimal integer.
    pub dim: String,
    /// `dim(ρⁿ,ρⁿ)^{1/2n}`.
    pub root: f64,
    #[serde(skip)]
    pub exact: BigUint,
}

/// `dim(ρⁿ,ρⁿ) = ‖ρⁿ‖²` in exact arithmetic for `n = 1..=n_max`.
pub fn growth_sequence(ring: &FusionRing, rho: &ObjectVec, n_max: usize) -> Result<Vec<GrowthTerm>> {
    ring.check_object(rho)?;
    if !ring.is_finite() {
        ring.ensure_size(ring.reach(rho, 0) * n_max + 1)?;
    }
    let rho_big: Vec<(usize, BigUint)> = rho.support().map(|(k, m)| (k, BigUint::from(m))).collect();
    let mut v: BTreeMap<usize, BigUint> = BTreeMap::from([(0usize, BigUint::from(1u32))]);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut next: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (i, x) in &v {
            for (k, y) in &rho_big {
                for (j, mult) in ring.products(*k, *i) {
                    *next.entry(j).or_insert_with(BigUint::zero) += x * y * mult;
                }
            }
        }
        next.retain(|_, x| !x.is_zero());
        v = next;
        let dim: BigUint = v.values().map(|x| x * x).sum();
        let root = big_root(&dim, 2 * n);
        out.push(GrowthTerm { n, dim: dim.to_string(), root, exact: dim });
    }
    Ok(out)
}

fn big_root(x: &BigUint, k: usize) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    let ln = if bits < 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    };
    (ln / k as f64).exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionFunctionReport {
    pub unit_defect: f64,
    pub conjugation_defect: f64,
    /// Largest relative violation of `f(a) f(i) = Σ_j N^j_{ai} f(j)`.
    pub product_defect: f64,
    pub max_violation: f64,
    pub positive: bool,
    pub ok: bool,
    /// Number of `(a, i)` pairs checked.
    pub checked: usize,
}

/// Checks `f(ι)=1`, `f(ī)=f(i)` and multiplicativity on the labels covered
/// by `f`. On ladders only pairs whose products stay inside `f` are checked.
pub fn validate_dimension_function(ring: &FusionRing, f: &[f64]) -> Result<DimensionFunctionReport> {
    if f.is_empty() {
        return Err(Error::Invalid("empty dimension function".into()));
    }
    if ring.is_finite() && f.len() != ring.size() {
        return Err(Error::Shape(format!("{} labels but {} values", ring.size(), f.len())));
    }
    ring.ensure_size(f.len())?;
    let n = f.len();
    let unit_defect = (f[0] - 1.0).abs();
    let conjugation_defect = (0..n).map(|i| (f[i] - f[ring.conj(i)]).abs() / f[i].abs().max(1.0)).fold(0.0, f64::max);
    let mut product_defect: f64 = 0.0;
    let mut checked = 0;
    for a in 0..n {
        for i in 0..n {
            let prods = ring.products(a, i);
            if prods.iter().any(|(j, _)| *j >= n) {
                continue;
            }
            let lhs = f[a] * f[i];
            let rhs: f64 = prods.iter().map(|(j, m)| *m as f64 * f[*j]).sum();
            product_defect = product_defect.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
            checked += 1;
        }
    }
    let positive = f.iter().all(|x| *x > 0.0);
    let max_violation = unit_defect.max(conjugation_defect).max(product_defect);
    Ok(DimensionFunctionReport {
        unit_defect,
        conjugation_defect,
        product_defect,
        max_violation,
        positive,
        ok: positive && max_violation < tol::residual(),
        checked,
    })
}

/// Reality at the level of multiplicities: `ρ_σ = ρ_σ̄` for every label and
/// `ρ_σ` even whenever σ is pseudoreal.
pub fn fusion_real_check(ring: &FusionRing, rho: &ObjectVec) -> Result<bool> {
    ring.check_object(rho)?;
    let mut real = true;
    for (i, m) in rho.support() {
        let c = ring.conj(i);
        if c != i {
            real &= rho.get(c) == m;
            continue;
        }
        match ring.fs_sign(i) {
            Some(1) => {}
            Some(-1) => real &= m % 2 == 0,
            _ => return Err(Error::Invalid(format!("no Frobenius-Schur sign for {}", ring.label_name(i)))),
        }
    }
    Ok(real)
}

/// Resolves `fibonacci`, `ising`, `rep_s3`, `su2_level_k:3` (or
/// `su2_level_3`), `a_infinity:2.5` (or `a_infinity(2.5)`), `rep_z_n:5`.
pub fn ring_by_name(name: &str) -> Result<FusionRing> {
    let name = name.trim();
    let (head, arg) = if let Some((h, a)) = name.split_once(':') {
        (h.to_string(), Some(a.trim().to_string()))
    } else if let Some((h, a)) = name.strip_suffix(')').and_then(|s| s.split_once('(')) {
        (h.to_string(), Some(a.trim().to_string()))
    } else if let Some(k) = name.strip_prefix("su2_level_").filter(|k| k.parse::<usize>().is_ok()) {
        ("su2_level_k".to_string(), Some(k.to_string()))
    } else {
        (name.to_string(), None)
    };
    let num = |key: &str| -> Result<f64> {
        let a = arg.as_deref().ok_or_else(|| Error::Invalid(format!("`{head}` needs a parameter")))?;
        let v = a.strip_prefix(key).map(|s| s.trim_start_matches('=')).unwrap_or(a);
        v.parse::<f64>().map_err(|_| Error::Invalid(format!("bad parameter `{a}`")))
    };
    let count = |key: &str| -> Result<usize> {
        let x = num(key)?;
        if x < 0.0 || x.fract() != 0.0 {
            return Err(Error::Invalid(format!("`{head}` needs a nonnegative integer")));
        }
        Ok(x as usize)
    };
    match head.as_str() {
        "fibonacci" => FusionRing::from_json(FIBONACCI_JSON),
        "ising" => FusionRing::from_json(ISING_JSON),
        "rep_s3" => FusionRing::from_json(REP_S3_FUSION_JSON),
        "su2_level_k" | "su2_level" => FusionRing::su2_level_k(count("k")?),
        "a_infinity" if arg.is_none() => FusionRing::a_infinity(2.0),
        "a_infinity" => FusionRing::a_infinity(num("d")?),
        "su2_fund" => FusionRing::a_infinity(2.0),
        "rep_z_n" | "rep_z" => FusionRing::rep_z_n(count("n")?),
        _ => Err(Error::Invalid(format!("unknown built-in fusion ring `{name}`"))),
    }
}

pub const RING_NAMES: &[(&str, &str)] = &[
    ("fibonacci", "τ² = 1 + τ"),
    ("ising", "σ² = 1 + ψ, ψ² = 1"),
    ("rep_s3", "irreducible representations of S3"),
    ("su2_level_k:k", "SU(2) at level k, labels 0..k"),
    ("a_infinity:d", "Clebsch-Gordan ladder with d(1) = d (default 2)"),
    ("su2_fund", "SU(2) fusion rules, the ladder with d(1) = 2"),
    ("rep_z_n:n", "characters of Z_n"),
];
