//! The labeled curve-tree data model and the two blowup moves.
//!
//! A [`CurveTree`] starts as the single curve at infinity on the plane
//! (`kbar = -2`, `self_int = +1`) and grows by two moves: blowing up a point
//! on one curve, or blowing up the intersection point of two adjacent
//! curves. The `kbar` label of a new curve is determined by its neighbors
//! at creation time and never changes afterwards; self-intersections drop
//! by one on every curve passing through the blown-up point.
//!
//! Both moves are invertible. [`CurveTree::contract`] undoes a blowup, and
//! [`CurveTree::realizable`] certifies, by backtracking over contractions,
//! that an arbitrary labeled tree is reachable from the initial one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::canon;

/// Index of a curve in its tree, assigned in creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One exceptional curve: its augmented-canonical-class coefficient and
/// its self-intersection. `is_origin` marks the strict transform of the
/// line at infinity, the curve everything else is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: VertexId,
    pub kbar: i64,
    pub self_int: i64,
    pub is_origin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("vertices {0} and {1} are not joined by an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("vertex {v} is not contractible: {reason}")]
    NotContractible { v: VertexId, reason: String },
    #[error("tree is not realizable")]
    Unrealizable,
    #[error("label arithmetic overflowed machine width")]
    LabelOverflow,
}

/// A violated label invariant, reported by [`CurveTree::check_invariants`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Adjacent labels must be coprime.
    GcdNotOne { a: VertexId, b: VertexId, gcd: i64 },
    /// The vertices with negative labels must induce a connected subgraph.
    NegativeSubgraphDisconnected { components: usize },
    /// A zero-labeled vertex may only neighbor labels -1 and +1.
    ZeroLabelBadNeighbor { zero: VertexId, neighbor: VertexId, neighbor_kbar: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GcdNotOne { a, b, gcd } => {
                write!(f, "gcd rule: edge {{{a},{b}}} has gcd {gcd} != 1")
            }
            Violation::NegativeSubgraphDisconnected { components } => {
                write!(f, "negative-label subgraph splits into {components} components")
            }
            Violation::ZeroLabelBadNeighbor { zero, neighbor, neighbor_kbar } => {
                write!(
                    f,
                    "zero-adjacency rule: vertex {zero} (label 0) neighbors {neighbor} (label {neighbor_kbar})"
                )
            }
        }
    }
}

fn checked(v: Option<i64>) -> Result<i64, GraphError> {
    v.ok_or(GraphError::LabelOverflow)
}

/// A tree of exceptional curves. Vertices are stored in creation order and
/// edges as normalized `(lo, hi)` pairs kept sorted, so structural equality
/// is plain `==`. Isomorphism-insensitive comparison goes through
/// [`crate::search::canonical_key`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "TreeRepr", try_from = "TreeRepr")]
pub struct CurveTree {
    vertices: Vec<Vertex>,
    edges: Vec<(u32, u32)>,
}

impl CurveTree {
    /// The single curve at infinity on the plane: label -2, self-intersection +1.
    pub fn initial() -> Self {
        CurveTree {
            vertices: vec![Vertex {
                id: VertexId(0),
                kbar: -2,
                self_int: 1,
                is_origin: true,
            }],
            edges: Vec::new(),
        }
    }

    /// Assembles a tree from explicit parts, validating shape only (ids
    /// contiguous, edges form a tree, exactly one origin). Label invariants
    /// are *not* enforced here; use [`CurveTree::check_invariants`].
    pub fn from_parts(vertices: Vec<Vertex>, edges: Vec<(u32, u32)>) -> Result<Self, TreeShapeError> {
        let n = vertices.len();
        if n == 0 {
            return Err(TreeShapeError::Empty);
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.id.index() != i {
                return Err(TreeShapeError::NonContiguousIds);
            }
        }
        let origins = vertices.iter().filter(|v| v.is_origin).count();
        if origins != 1 {
            return Err(TreeShapeError::OriginCount(origins));
        }
        let mut norm: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a as usize >= n || b as usize >= n {
                return Err(TreeShapeError::UnknownEndpoint(a.max(b)));
            }
            if a == b {
                return Err(TreeShapeError::SelfLoop(a));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(TreeShapeError::DuplicateEdge);
        }
        if norm.len() != n - 1 {
            return Err(TreeShapeError::NotATree);
        }
        let t = CurveTree { vertices, edges: norm };
        if !t.is_connected() {
            return Err(TreeShapeError::NotATree);
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex, GraphError> {
        self.vertices.get(v.index()).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn origin(&self) -> VertexId {
        self.vertices
            .iter()
            .find(|v| v.is_origin)
            .map(|v| v.id)
            .expect("tree invariant: exactly one origin")
    }

    pub fn kbar(&self, v: VertexId) -> i64 {
        self.vertices[v.index()].kbar
    }

    pub fn self_int(&self, v: VertexId) -> i64 {
        self.vertices[v.index()].self_int
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        let (lo, hi) = (a.0.min(b.0), a.0.max(b.0));
        self.edges.binary_search(&(lo, hi)).is_ok()
    }

    /// Adjacency lists indexed by vertex id.
    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a as usize].push(VertexId(b));
            adj[b as usize].push(VertexId(a));
        }
        adj
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v.0 || b == v.0).count()
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == v.0 {
                out.push(VertexId(b));
            } else if b == v.0 {
                out.push(VertexId(a));
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    count += 1;
                    stack.push(w.index());
                }
            }
        }
        count == self.vertices.len()
    }

    /// Blows up a point on curve `v`: a new leaf labeled `kbar(v) + 1`
    /// appears next to `v`, and `v` loses one from its self-intersection.
    pub fn blowup_point(&self, v: VertexId) -> Result<CurveTree, GraphError> {
        let base = *self.vertex(v)?;
        let mut t = self.clone();
        let new_id = VertexId(t.vertices.len() as u32);
        t.vertices.push(Vertex {
            id: new_id,
            kbar: checked(base.kbar.checked_add(1))?,
            self_int: -1,
            is_origin: false,
        });
        t.vertices[v.index()].self_int = checked(base.self_int.checked_sub(1))?;
        t.edges.push((v.0.min(new_id.0), v.0.max(new_id.0)));
        t.edges.sort_unstable();
        Ok(t)
    }

    /// Blows up the intersection point of adjacent curves `i` and `j`: the
    /// edge breaks in two around a new curve labeled `kbar(i) + kbar(j)`,
    /// and both old curves lose one from their self-intersections.
    pub fn blowup_edge(&self, i: VertexId, j: VertexId) -> Result<CurveTree, GraphError> {
        self.vertex(i)?;
        self.vertex(j)?;
        if !self.has_edge(i, j) {
            return Err(GraphError::NotAnEdge(i, j));
        }
        let mut t = self.clone();
        let new_id = VertexId(t.vertices.len() as u32);
        let kbar = checked(self.kbar(i).checked_add(self.kbar(j)))?;
        t.vertices.push(Vertex { id: new_id, kbar, self_int: -1, is_origin: false });
        t.vertices[i.index()].self_int = checked(self.self_int(i).checked_sub(1))?;
        t.vertices[j.index()].self_int = checked(self.self_int(j).checked_sub(1))?;
        let pair = (i.0.min(j.0), i.0.max(j.0));
        t.edges.retain(|e| *e != pair);
        t.edges.push((i.0.min(new_id.0), i.0.max(new_id.0)));
        t.edges.push((j.0.min(new_id.0), j.0.max(new_id.0)));
        t.edges.sort_unstable();
        Ok(t)
    }

    /// Checks the three label invariants every legally built tree satisfies:
    /// coprime labels across each edge, a connected negative-label subgraph,
    /// and zero-labeled vertices neighboring only -1/+1.
    pub fn check_invariants(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            let (ka, kb) = (self.vertices[a as usize].kbar, self.vertices[b as usize].kbar);
            let g = num_integer::gcd(ka, kb);
            if g != 1 {
                out.push(Violation::GcdNotOne { a: VertexId(a), b: VertexId(b), gcd: g });
            }
        }
        let negative: Vec<usize> = self
            .vertices
            .iter()
            .filter(|v| v.kbar < 0)
            .map(|v| v.id.index())
            .collect();
        if negative.len() > 1 {
            let adj = self.adjacency();
            let in_set = |u: usize| self.vertices[u].kbar < 0;
            let mut seen = vec![false; self.vertices.len()];
            let mut stack = vec![negative[0]];
            seen[negative[0]] = true;
            let mut reached = 1;
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if in_set(w.index()) && !seen[w.index()] {
                        seen[w.index()] = true;
                        reached += 1;
                        stack.push(w.index());
                    }
                }
            }
            if reached != negative.len() {
                // count components for the report
                let mut comp = 0;
                let mut seen = vec![false; self.vertices.len()];
                for &start in &negative {
                    if seen[start] {
                        continue;
                    }
                    comp += 1;
                    let mut stack = vec![start];
                    seen[start] = true;
                    while let Some(u) = stack.pop() {
                        for &w in &adj[u] {
                            if in_set(w.index()) && !seen[w.index()] {
                                seen[w.index()] = true;
                                stack.push(w.index());
                            }
                        }
                    }
                }
                out.push(Violation::NegativeSubgraphDisconnected { components: comp });
            }
        }
        for &(a, b) in &self.edges {
            for (z, n) in [(a, b), (b, a)] {
                let (zk, nk) = (self.vertices[z as usize].kbar, self.vertices[n as usize].kbar);
                if zk == 0 && nk != -1 && nk != 1 {
                    out.push(Violation::ZeroLabelBadNeighbor {
                        zero: VertexId(z),
                        neighbor: VertexId(n),
                        neighbor_kbar: nk,
                    });
                }
            }
        }
        out
    }

    /// Recovers `self_int(v)` from the labels alone via adjunction:
    /// `kbar(v) * E^2 + sum of neighbor labels = -2 + deg(v)`. Returns
    /// `None` when `kbar(v) = 0` (the formula degenerates there; only the
    /// eagerly tracked value disambiguates those curves).
    pub fn adjunction_self_int(&self, v: VertexId) -> Result<Option<BigRational>, GraphError> {
        let vert = self.vertex(v)?;
        if vert.kbar == 0 {
            return Ok(None);
        }
        let nbrs = self.neighbors(v);
        let mut num = BigInt::from(-2 + nbrs.len() as i64);
        for &u in &nbrs {
            num -= BigInt::from(self.kbar(u));
        }
        Ok(Some(BigRational::new(num, BigInt::from(vert.kbar))))
    }

    /// How `v` could be contracted, if at all. The origin is never
    /// contractible.
    pub fn contract_kind(&self, v: VertexId) -> Option<ContractKind> {
        let vert = self.vertices.get(v.index())?;
        if vert.is_origin || vert.self_int != -1 {
            return None;
        }
        let nbrs = self.neighbors(v);
        match nbrs.as_slice() {
            [p] => (vert.kbar == self.kbar(*p).checked_add(1)?).then_some(ContractKind::Leaf(*p)),
            [a, b] => {
                let sum = self.kbar(*a).checked_add(self.kbar(*b))?;
                (vert.kbar == sum).then_some(ContractKind::Interior(*a, *b))
            }
            _ => None,
        }
    }

    /// Undoes the blowup that created `v`: for a leaf, the parent regains
    /// one of self-intersection; for an interior curve, its two neighbors
    /// are re-joined and each regains one. Remaining vertices are
    /// renumbered to stay contiguous, so the result is isomorphic (not
    /// identical) to the pre-blowup tree unless `v` was created last.
    pub fn contract(&self, v: VertexId) -> Result<CurveTree, GraphError> {
        self.vertex(v)?;
        if self.vertices[v.index()].is_origin {
            return Err(GraphError::NotContractible { v, reason: "origin curve".into() });
        }
        let kind = self.contract_kind(v).ok_or_else(|| GraphError::NotContractible {
            v,
            reason: "self-intersection or label condition fails".into(),
        })?;
        let remap = |u: u32| if u > v.0 { u - 1 } else { u };
        let mut vertices = Vec::with_capacity(self.vertices.len() - 1);
        for vert in &self.vertices {
            if vert.id == v {
                continue;
            }
            let mut copy = *vert;
            copy.id = VertexId(remap(vert.id.0));
            vertices.push(copy);
        }
        let mut edges: Vec<(u32, u32)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v.0 && b != v.0)
            .map(|&(a, b)| (remap(a), remap(b)))
            .collect();
        match kind {
            ContractKind::Leaf(p) => {
                let p = remap(p.0) as usize;
                vertices[p].self_int = checked(vertices[p].self_int.checked_add(1))?;
            }
            ContractKind::Interior(a, b) => {
                let (a, b) = (remap(a.0), remap(b.0));
                vertices[a as usize].self_int =
                    checked(vertices[a as usize].self_int.checked_add(1))?;
                vertices[b as usize].self_int =
                    checked(vertices[b as usize].self_int.checked_add(1))?;
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        Ok(CurveTree { vertices, edges })
    }

    fn is_initial(&self) -> bool {
        self.vertices.len() == 1 && {
            let v = &self.vertices[0];
            v.kbar == -2 && v.self_int == 1 && v.is_origin
        }
    }

    /// Whether some sequence of contractions reduces this tree to the
    /// initial one. Backtracks over contractible vertices, memoized on the
    /// canonical form of intermediate trees.
    pub fn realizable(&self) -> bool {
        let mut memo = HashMap::new();
        self.realizable_memo(&mut memo)
    }

    pub(crate) fn realizable_memo(&self, memo: &mut HashMap<Vec<u8>, bool>) -> bool {
        if self.vertices.len() == 1 {
            return self.is_initial();
        }
        let key = canon::canonical_code(self);
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let mut ok = false;
        for v in self.ids() {
            if self.vertices[v.index()].is_origin {
                continue;
            }
            if self.contract_kind(v).is_some() {
                let smaller = self.contract(v).expect("contract_kind vetted");
                if smaller.realizable_memo(memo) {
                    ok = true;
                    break;
                }
            }
        }
        memo.insert(key, ok);
        ok
    }

    /// The curves that can be blown up last in some construction order:
    /// exactly those whose contraction leaves a realizable tree. Label
    /// shortcuts decide most candidates without backtracking; the
    /// definition decides the rest. Errors on unrealizable input.
    pub fn final_curves(&self) -> Result<BTreeSet<VertexId>, GraphError> {
        let mut memo = HashMap::new();
        if !self.realizable_memo(&mut memo) {
            return Err(GraphError::Unrealizable);
        }
        let mut out = BTreeSet::new();
        for v in self.ids() {
            if self.vertices[v.index()].is_origin {
                continue;
            }
            let is_final = match self.final_shortcut(v) {
                Some(d) => d,
                None => self.final_by_definition(v, &mut memo),
            };
            if is_final {
                out.insert(v);
            }
        }
        Ok(out)
    }

    /// Pure definition path, no shortcuts. Exposed so the shortcuts can be
    /// cross-checked against it.
    pub fn final_curves_unaccelerated(&self) -> Result<BTreeSet<VertexId>, GraphError> {
        let mut memo = HashMap::new();
        if !self.realizable_memo(&mut memo) {
            return Err(GraphError::Unrealizable);
        }
        let mut out = BTreeSet::new();
        for v in self.ids() {
            if self.vertices[v.index()].is_origin {
                continue;
            }
            if self.final_by_definition(v, &mut memo) {
                out.insert(v);
            }
        }
        Ok(out)
    }

    fn final_by_definition(&self, v: VertexId, memo: &mut HashMap<Vec<u8>, bool>) -> bool {
        self.contract_kind(v).is_some()
            && self.contract(v).expect("contract_kind vetted").realizable_memo(memo)
    }

    /// Label-level finality shortcuts, valid on realizable trees. A label-1
    /// curve is final iff its neighbor labels are exactly {0} or {0, 1}; a
    /// curve whose label is >= 2 and maximal among its neighbors is final.
    /// `None` means the shortcut does not decide.
    pub fn final_shortcut(&self, v: VertexId) -> Option<bool> {
        let k = self.kbar(v);
        if k == 1 {
            let mut nbr: Vec<i64> = self.neighbors(v).iter().map(|&u| self.kbar(u)).collect();
            nbr.sort_unstable();
            return Some(nbr == [0] || nbr == [0, 1]);
        }
        if k >= 2 && self.neighbors(v).iter().all(|&u| self.kbar(u) <= k) {
            return Some(true);
        }
        None
    }
}

/// Which of the two inverse moves applies to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractKind {
    /// A leaf labeled one more than its parent (inverse point blowup).
    Leaf(VertexId),
    /// A degree-2 curve labeled the sum of its neighbors (inverse edge blowup).
    Interior(VertexId, VertexId),
}

/// Structural problems in an externally supplied tree description.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeShapeError {
    #[error("tree must have at least one vertex")]
    Empty,
    #[error("vertex ids must be contiguous from 0 in order")]
    NonContiguousIds,
    #[error("expected exactly one origin vertex, found {0}")]
    OriginCount(usize),
    #[error("edge endpoint {0} does not name a vertex")]
    UnknownEndpoint(u32),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge")]
    DuplicateEdge,
    #[error("edge set does not form a tree")]
    NotATree,
}

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    id: u32,
    kbar: i64,
    self_int: i64,
    origin: bool,
}

/// Wire form: `{"vertices":[{"id":..,"kbar":..,"self_int":..,"origin":..}],"edges":[[a,b]]}`.
#[derive(Serialize, Deserialize)]
pub struct TreeRepr {
    vertices: Vec<VertexRepr>,
    edges: Vec<[u32; 2]>,
}

impl From<CurveTree> for TreeRepr {
    fn from(t: CurveTree) -> Self {
        TreeRepr {
            vertices: t
                .vertices
                .iter()
                .map(|v| VertexRepr {
                    id: v.id.0,
                    kbar: v.kbar,
                    self_int: v.self_int,
                    origin: v.is_origin,
                })
                .collect(),
            edges: t.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<TreeRepr> for CurveTree {
    type Error = TreeShapeError;

    fn try_from(r: TreeRepr) -> Result<Self, Self::Error> {
        let mut vertices: Vec<VertexRepr> = r.vertices;
        vertices.sort_by_key(|v| v.id);
        let n = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if v.id as usize != i {
                return Err(TreeShapeError::NonContiguousIds);
            }
        }
        let verts = vertices
            .into_iter()
            .map(|v| Vertex {
                id: VertexId(v.id),
                kbar: v.kbar,
                self_int: v.self_int,
                is_origin: v.origin,
            })
            .collect();
        let edges = r.edges.iter().map(|&[a, b]| (a, b)).collect();
        let _ = n;
        CurveTree::from_parts(verts, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::{BlowupScript, Step};

    fn section2_tree() -> CurveTree {
        BlowupScript::section2_example().replay().unwrap()
    }

    #[test]
    fn initial_tree_shape() {
        let t = CurveTree::initial();
        assert_eq!(t.len(), 1);
        let v = t.vertices()[0];
        assert_eq!((v.kbar, v.self_int, v.is_origin), (-2, 1, true));
        assert!(t.edges().is_empty());
        assert!(t.realizable());
        assert!(t.final_curves().unwrap().is_empty());
    }

    #[test]
    fn point_blowup_first_step() {
        let t = CurveTree::initial().blowup_point(VertexId(0)).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.kbar(VertexId(1)), -1);
        assert_eq!(t.self_int(VertexId(1)), -1);
        assert_eq!(t.self_int(VertexId(0)), 0);
        assert!(t.has_edge(VertexId(0), VertexId(1)));
    }

    #[test]
    fn point_blowup_unknown_vertex() {
        let err = CurveTree::initial().blowup_point(VertexId(7)).unwrap_err();
        assert_eq!(err, GraphError::UnknownVertex(VertexId(7)));
    }

    #[test]
    fn edge_blowup_requires_edge() {
        let t = CurveTree::initial().blowup_point(VertexId(0)).unwrap();
        let t = t.blowup_point(VertexId(0)).unwrap();
        let err = t.blowup_edge(VertexId(1), VertexId(2)).unwrap_err();
        assert_eq!(err, GraphError::NotAnEdge(VertexId(1), VertexId(2)));
    }

    #[test]
    fn edge_blowup_sums_labels() {
        // chain (-1)-(-2); blowing the edge inserts a (-3)
        let t = CurveTree::initial().blowup_point(VertexId(0)).unwrap();
        let t = t.blowup_edge(VertexId(0), VertexId(1)).unwrap();
        assert_eq!(t.kbar(VertexId(2)), -3);
        assert!(!t.has_edge(VertexId(0), VertexId(1)));
        assert!(t.has_edge(VertexId(0), VertexId(2)));
        assert!(t.has_edge(VertexId(2), VertexId(1)));
        assert_eq!(t.self_int(VertexId(0)), -1);
        assert_eq!(t.self_int(VertexId(1)), -2);
    }

    #[test]
    fn golden_chain_and_self_intersections() {
        let t = section2_tree();
        assert_eq!(t.len(), 11);
        // spine between the two zero-labeled vertices
        let kbars: Vec<i64> = [6u32, 1, 0, 2, 5, 4, 3]
            .iter()
            .map(|&i| t.kbar(VertexId(i)))
            .collect();
        assert_eq!(kbars, vec![0, -1, -2, -1, -2, -1, 0]);
        for (a, b) in [(6u32, 1u32), (1, 0), (0, 2), (2, 5), (5, 4), (4, 3)] {
            assert!(t.has_edge(VertexId(a), VertexId(b)));
        }
        // four label-1 leaves, two on each zero vertex
        for (leaf, parent) in [(7u32, 6u32), (8, 6), (9, 3), (10, 3)] {
            assert_eq!(t.kbar(VertexId(leaf)), 1);
            assert_eq!(t.degree(VertexId(leaf)), 1);
            assert!(t.has_edge(VertexId(leaf), VertexId(parent)));
        }
        // the asymmetry the labels alone cannot see
        assert_eq!(t.self_int(VertexId(6)), -3);
        assert_eq!(t.self_int(VertexId(3)), -4);
        assert!(t.check_invariants().is_empty());
    }

    #[test]
    fn double_point_blowup_reaches_minus_three() {
        // a label-0 vertex starting at -1 hit by two point blowups
        let t = section2_tree();
        assert_eq!(t.kbar(VertexId(6)), 0);
        assert_eq!(t.self_int(VertexId(6)), -3);
    }

    #[test]
    fn invariant_violations_reported() {
        // adjacent labels -2, -2
        let t = CurveTree::from_parts(
            vec![
                Vertex { id: VertexId(0), kbar: -2, self_int: 1, is_origin: true },
                Vertex { id: VertexId(1), kbar: -2, self_int: -1, is_origin: false },
            ],
            vec![(0, 1)],
        )
        .unwrap();
        let v = t.check_invariants();
        assert!(v.iter().any(|x| matches!(x, Violation::GcdNotOne { gcd: 2, .. })));

        // zero label adjacent to -2
        let t = CurveTree::from_parts(
            vec![
                Vertex { id: VertexId(0), kbar: -2, self_int: 1, is_origin: true },
                Vertex { id: VertexId(1), kbar: 0, self_int: -1, is_origin: false },
            ],
            vec![(0, 1)],
        )
        .unwrap();
        let v = t.check_invariants();
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::ZeroLabelBadNeighbor { neighbor_kbar: -2, .. })));

        // negative labels split by a positive one
        let t = CurveTree::from_parts(
            vec![
                Vertex { id: VertexId(0), kbar: -2, self_int: 1, is_origin: true },
                Vertex { id: VertexId(1), kbar: 3, self_int: -1, is_origin: false },
                Vertex { id: VertexId(2), kbar: -2, self_int: -1, is_origin: false },
            ],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let v = t.check_invariants();
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::NegativeSubgraphDisconnected { components: 2 })));
    }

    #[test]
    fn adjunction_matches_tracked() {
        let t = section2_tree();
        // interior -2 vertex with two -1 neighbors
        let got = t.adjunction_self_int(VertexId(5)).unwrap().unwrap();
        assert_eq!(got, BigRational::from(BigInt::from(-1)));
        assert_eq!(t.self_int(VertexId(5)), -1);
        // zero-labeled vertices are undetermined
        assert!(t.adjunction_self_int(VertexId(6)).unwrap().is_none());
        assert!(t.adjunction_self_int(VertexId(3)).unwrap().is_none());
        // every nonzero label agrees with the tracked value
        for v in t.ids() {
            if t.kbar(v) != 0 {
                let adj = t.adjunction_self_int(v).unwrap().unwrap();
                assert_eq!(adj, BigRational::from(BigInt::from(t.self_int(v))), "vertex {v}");
            }
        }
        // origin of the initial tree
        let got = CurveTree::initial().adjunction_self_int(VertexId(0)).unwrap().unwrap();
        assert_eq!(got, BigRational::from(BigInt::from(1)));
    }

    #[test]
    fn contract_inverts_both_moves() {
        let t = section2_tree();
        let after_point = t.blowup_point(VertexId(4)).unwrap();
        assert_eq!(after_point.contract(VertexId(11)).unwrap(), t);
        let after_edge = t.blowup_edge(VertexId(0), VertexId(2)).unwrap();
        assert_eq!(after_edge.contract(VertexId(11)).unwrap(), t);
    }

    #[test]
    fn contract_rejects_bad_candidates() {
        let t = section2_tree();
        // interior -2 with self-intersection -1 and neighbor sum -2: legal
        assert!(t.contract(VertexId(5)).is_ok());
        // the -1 / self-intersection -4 vertex: not contractible
        assert_eq!(t.kbar(VertexId(2)), -1);
        assert_eq!(t.self_int(VertexId(2)), -4);
        assert!(matches!(
            t.contract(VertexId(2)),
            Err(GraphError::NotContractible { .. })
        ));
        // the origin is never contractible even when labels line up
        let two = CurveTree::initial().blowup_point(VertexId(0)).unwrap();
        assert!(matches!(
            two.contract(VertexId(0)),
            Err(GraphError::NotContractible { .. })
        ));
    }

    #[test]
    fn realizability_answers() {
        assert!(section2_tree().realizable());
        // one label flipped from 1 to 2 breaks it
        let t = section2_tree();
        let mut vertices: Vec<Vertex> = t.vertices().to_vec();
        vertices[10].kbar = 2;
        let broken =
            CurveTree::from_parts(vertices, t.edges().to_vec()).unwrap();
        assert!(!broken.realizable());
        // first blowup of the worked example: origin drops to 0
        let two = CurveTree::initial().blowup_point(VertexId(0)).unwrap();
        assert_eq!(two.self_int(VertexId(0)), 0);
        assert!(two.realizable());
        // same labels but origin self-intersection left at +1: unreachable
        let fake = CurveTree::from_parts(
            vec![
                Vertex { id: VertexId(0), kbar: -2, self_int: 1, is_origin: true },
                Vertex { id: VertexId(1), kbar: -1, self_int: -1, is_origin: false },
            ],
            vec![(0, 1)],
        )
        .unwrap();
        assert!(!fake.realizable());
    }

    #[test]
    fn final_curves_of_golden_tree() {
        let t = section2_tree();
        let finals = t.final_curves().unwrap();
        let expect: BTreeSet<VertexId> =
            [5u32, 7, 8, 9, 10].into_iter().map(VertexId).collect();
        assert_eq!(finals, expect);
        assert_eq!(t.final_curves_unaccelerated().unwrap(), expect);
    }

    #[test]
    fn label_max_shortcut_accepts() {
        // a label >= 2 exceeding all neighbors is final
        let s = BlowupScript {
            steps: vec![
                Step::Point(VertexId(0)),
                Step::Point(VertexId(1)),
                Step::Point(VertexId(2)),
                Step::Point(VertexId(3)),
            ],
        };
        let t = s.replay().unwrap();
        assert_eq!(t.kbar(VertexId(4)), 2);
        assert_eq!(t.final_shortcut(VertexId(4)), Some(true));
        assert!(t.final_curves().unwrap().contains(&VertexId(4)));
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let t = section2_tree();
        let s = serde_json::to_string(&t).unwrap();
        let back: CurveTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);

        let bad = r#"{"vertices":[{"id":0,"kbar":-2,"self_int":1,"origin":true},
                      {"id":1,"kbar":-1,"self_int":-1,"origin":false}],"edges":[]}"#;
        assert!(serde_json::from_str::<CurveTree>(bad).is_err());

        let two_origins = r#"{"vertices":[{"id":0,"kbar":-2,"self_int":1,"origin":true},
                      {"id":1,"kbar":-1,"self_int":-1,"origin":true}],"edges":[[0,1]]}"#;
        assert!(serde_json::from_str::<CurveTree>(two_origins).is_err());
    }
}
