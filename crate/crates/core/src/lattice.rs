//! Intersection form on the curve basis and exact divisor-class arithmetic.
//!
//! The curves of a tree form a basis of the ambient Picard group, so a
//! divisor class is just an exact-rational coefficient vector over vertex
//! ids. The intersection form has the tracked self-intersections on the
//! diagonal and a 1 for every edge. Everything here is exact; no floating
//! point is used anywhere, since the sign of a determinant label is a
//! search filter.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::{CurveTree, VertexId};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("divisor class has a coefficient on unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("divisor class is not integral at {0:?}")]
    NonIntegral(Vec<VertexId>),
    #[error("bad rational literal {0:?}")]
    BadRational(String),
}

/// Sparse exact-rational coefficient vector over the curve basis.
/// Zero coefficients are not stored, so `==` is support-insensitive.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "DivisorRepr", try_from = "DivisorRepr")]
pub struct DivisorClass {
    coeffs: BTreeMap<VertexId, BigRational>,
}

impl DivisorClass {
    pub fn zero() -> Self {
        DivisorClass::default()
    }

    pub fn unit(v: VertexId) -> Self {
        let mut d = DivisorClass::zero();
        d.set(v, BigRational::one());
        d
    }

    pub fn from_integers<I: IntoIterator<Item = (VertexId, i64)>>(it: I) -> Self {
        let mut d = DivisorClass::zero();
        for (v, c) in it {
            d.set(v, BigRational::from(BigInt::from(c)));
        }
        d
    }

    pub fn set(&mut self, v: VertexId, c: BigRational) {
        if c.is_zero() {
            self.coeffs.remove(&v);
        } else {
            self.coeffs.insert(v, c);
        }
    }

    pub fn coeff(&self, v: VertexId) -> BigRational {
        self.coeffs.get(&v).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (VertexId, &BigRational)> {
        self.coeffs.iter().map(|(&v, c)| (v, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn non_integral_vertices(&self) -> Vec<VertexId> {
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_integer())
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn scaled_add(&mut self, factor: &BigRational, other: &DivisorClass) {
        for (v, c) in other.support() {
            let cur = self.coeff(v) + factor * c;
            self.set(v, cur);
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (v, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{}*E{}", rational_to_string(c), v)?;
            first = false;
        }
        Ok(())
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_string(s: &str) -> Result<BigRational, LatticeError> {
    let bad = || LatticeError::BadRational(s.to_string());
    match s.trim().split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(BigRational::from(n))
        }
    }
}

/// Wire form: `{"coeffs": {"<id>": "num/den"}}`.
#[derive(Serialize, Deserialize)]
pub struct DivisorRepr {
    coeffs: BTreeMap<String, String>,
}

impl From<DivisorClass> for DivisorRepr {
    fn from(d: DivisorClass) -> Self {
        DivisorRepr {
            coeffs: d
                .coeffs
                .iter()
                .map(|(v, c)| (v.to_string(), rational_to_string(c)))
                .collect(),
        }
    }
}

impl TryFrom<DivisorRepr> for DivisorClass {
    type Error = LatticeError;

    fn try_from(r: DivisorRepr) -> Result<Self, Self::Error> {
        let mut d = DivisorClass::zero();
        for (k, v) in r.coeffs {
            let id: u32 = k
                .parse()
                .map_err(|_| LatticeError::BadRational(format!("vertex id {k:?}")))?;
            d.set(VertexId(id), rational_from_string(&v)?);
        }
        Ok(d)
    }
}

/// Dense symmetric intersection matrix of a tree: self-intersections on the
/// diagonal, 1 for each edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    n: usize,
    entries: Vec<Vec<i64>>,
}

impl IntersectionForm {
    pub fn new(t: &CurveTree) -> Self {
        let n = t.len();
        let mut entries = vec![vec![0i64; n]; n];
        for v in t.vertices() {
            entries[v.id.index()][v.id.index()] = v.self_int;
        }
        for &(a, b) in t.edges() {
            entries[a as usize][b as usize] = 1;
            entries[b as usize][a as usize] = 1;
        }
        IntersectionForm { n, entries }
    }

    pub fn entry(&self, i: VertexId, j: VertexId) -> i64 {
        self.entries[i.index()][j.index()]
    }

    /// Minus the intersection matrix with `v`'s row and column removed,
    /// over big integers.
    pub fn negated_minor(&self, v: VertexId) -> Vec<Vec<BigInt>> {
        let mut rows = Vec::with_capacity(self.n.saturating_sub(1));
        for i in 0..self.n {
            if i == v.index() {
                continue;
            }
            let mut row = Vec::with_capacity(self.n - 1);
            for j in 0..self.n {
                if j == v.index() {
                    continue;
                }
                row.push(BigInt::from(-self.entries[i][j]));
            }
            rows.push(row);
        }
        rows
    }
}

fn validate_support(t: &CurveTree, d: &DivisorClass) -> Result<(), LatticeError> {
    for (v, _) in d.support() {
        if v.index() >= t.len() {
            return Err(LatticeError::UnknownVertex(v));
        }
    }
    Ok(())
}

/// The intersection pairing `d1 . d2` on the tree's Picard basis.
pub fn pair(t: &CurveTree, d1: &DivisorClass, d2: &DivisorClass) -> Result<BigRational, LatticeError> {
    validate_support(t, d1)?;
    validate_support(t, d2)?;
    let mut acc = BigRational::zero();
    for (v, c1) in d1.support() {
        let mut row = BigRational::from(BigInt::from(t.self_int(v))) * d2.coeff(v);
        for u in t.neighbors(v) {
            row += d2.coeff(u);
        }
        acc += c1 * row;
    }
    Ok(acc)
}

/// Pairing of a divisor class with a single basis curve.
pub fn pair_with_vertex(t: &CurveTree, d: &DivisorClass, v: VertexId) -> Result<BigRational, LatticeError> {
    pair(t, d, &DivisorClass::unit(v))
}

/// The augmented canonical class: coefficient `kbar` at every vertex.
pub fn kbar_class(t: &CurveTree) -> DivisorClass {
    DivisorClass::from_integers(t.vertices().iter().map(|v| (v.id, v.kbar)))
}

/// The canonical class: `kbar - 1` at every vertex.
pub fn canonical_class(t: &CurveTree) -> DivisorClass {
    DivisorClass::from_integers(t.vertices().iter().map(|v| (v.id, v.kbar - 1)))
}

/// The determinant label of `v`: the determinant of minus the intersection
/// matrix with `v`'s row and column removed. Invariant under any further
/// blowups of the tree; the empty matrix has determinant 1.
pub fn determinant_label(t: &CurveTree, v: VertexId) -> Result<BigInt, LatticeError> {
    if v.index() >= t.len() {
        return Err(LatticeError::UnknownVertex(v));
    }
    let form = IntersectionForm::new(t);
    Ok(linalg::bareiss_det(form.negated_minor(v)))
}

/// Determinant labels for every vertex at once.
pub fn determinant_labels(t: &CurveTree) -> Vec<BigInt> {
    let form = IntersectionForm::new(t);
    t.ids()
        .map(|v| linalg::bareiss_det(form.negated_minor(v)))
        .collect()
}

/// Determinant of the full negated intersection matrix. The curve classes
/// of a realizable tree are a unimodular basis of a rank-(1, n) lattice,
/// so this is exactly -1 there; other values expose a tree that no blowup
/// sequence produces.
pub fn anti_intersection_determinant(t: &CurveTree) -> BigInt {
    let form = IntersectionForm::new(t);
    let n = t.len();
    let full: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    BigInt::from(-form.entry(VertexId(i as u32), VertexId(j as u32)))
                })
                .collect()
        })
        .collect();
    linalg::bareiss_det(full)
}

/// Lower bound `L(L-K)/2 + 1` for the dimension of the space of sections
/// of an integral class `L`.
pub fn rr_lower_bound(t: &CurveTree, l: &DivisorClass) -> Result<BigRational, LatticeError> {
    if !l.is_integral() {
        return Err(LatticeError::NonIntegral(l.non_integral_vertices()));
    }
    let k = canonical_class(t);
    let ll = pair(t, l, l)?;
    let lk = pair(t, l, &k)?;
    let two = BigRational::from(BigInt::from(2));
    Ok((ll - lk) / two + BigRational::one())
}
