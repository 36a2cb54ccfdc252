//! Curve types and the structural constraints a valid typing must satisfy.
//!
//! Each curve behaves in one of four ways under the hypothetical
//! counterexample map: type 1 maps onto the target line at infinity, type 2
//! to a point on it, type 3 onto some other curve, type 4 to a point off
//! the line. The graph alone pins the possibilities down hard; the
//! constraints C1-C11 below encode everything the structure forces, and
//! [`admissible_assignments`] enumerates exactly the total assignments that
//! satisfy them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{CurveTree, GraphError, VertexId};

/// Behavior of a curve under the counterexample map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveType {
    /// Maps onto the line at infinity.
    Type1,
    /// Maps to a point on the line at infinity.
    Type2,
    /// Maps onto a curve other than the line at infinity.
    Type3,
    /// Maps to a point off the line at infinity.
    Type4,
}

impl CurveType {
    pub fn as_u8(self) -> u8 {
        match self {
            CurveType::Type1 => 1,
            CurveType::Type2 => 2,
            CurveType::Type3 => 3,
            CurveType::Type4 => 4,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(CurveType::Type1),
            2 => Some(CurveType::Type2),
            3 => Some(CurveType::Type3),
            4 => Some(CurveType::Type4),
            _ => None,
        }
    }

    pub const ALL: [CurveType; 4] =
        [CurveType::Type1, CurveType::Type2, CurveType::Type3, CurveType::Type4];
}

impl fmt::Display for CurveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// A total map from vertices to curve types.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "TypesRepr", try_from = "TypesRepr")]
pub struct TypeAssignment {
    types: BTreeMap<VertexId, CurveType>,
}

impl TypeAssignment {
    pub fn new(types: BTreeMap<VertexId, CurveType>) -> Self {
        TypeAssignment { types }
    }

    pub fn get(&self, v: VertexId) -> Option<CurveType> {
        self.types.get(&v).copied()
    }

    pub fn set(&mut self, v: VertexId, t: CurveType) {
        self.types.insert(v, t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, CurveType)> + '_ {
        self.types.iter().map(|(&v, &t)| (v, t))
    }

    pub fn vertices_of(&self, t: CurveType) -> Vec<VertexId> {
        self.types.iter().filter(|&(_, &x)| x == t).map(|(&v, _)| v).collect()
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// The ramification index carried by a type-1 curve: minus half its
    /// label. `None` when `v` is not typed 1 or the label is not negative
    /// even.
    pub fn ramification(&self, t: &CurveTree, v: VertexId) -> Option<i64> {
        if self.get(v)? != CurveType::Type1 {
            return None;
        }
        let k = t.kbar(v);
        (k < 0 && k % 2 == 0).then_some(-k / 2)
    }
}

/// Wire form: `{"types": {"<id>": 1|2|3|4}}`.
#[derive(Serialize, Deserialize)]
pub struct TypesRepr {
    types: BTreeMap<String, u8>,
}

impl From<TypeAssignment> for TypesRepr {
    fn from(a: TypeAssignment) -> Self {
        TypesRepr {
            types: a.types.iter().map(|(v, t)| (v.to_string(), t.as_u8())).collect(),
        }
    }
}

impl TryFrom<TypesRepr> for TypeAssignment {
    type Error = String;

    fn try_from(r: TypesRepr) -> Result<Self, Self::Error> {
        let mut types = BTreeMap::new();
        for (k, v) in r.types {
            let id: u32 = k.parse().map_err(|_| format!("bad vertex id {k:?}"))?;
            let t = CurveType::from_u8(v).ok_or_else(|| format!("bad curve type {v}"))?;
            types.insert(VertexId(id), t);
        }
        Ok(TypeAssignment { types })
    }
}

/// Identifier of a structural typing constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConstraintId {
    /// The origin curve is type 2.
    C1,
    /// Type-1 curves carry a negative even label.
    C2,
    /// Type-3 curves carry a positive label.
    C3,
    /// Types 1 and 2 induce a connected subgraph containing the origin and
    /// every negative-label vertex.
    C4,
    /// No two type-1 curves are adjacent.
    C5,
    /// A type-3 curve has exactly one type-2 neighbor and the rest of the
    /// tree beyond it is a simple chain of type-4 curves.
    C6,
    /// Type-4 curves occur only inside such chains and never touch types 1
    /// or 2.
    C7,
    /// Every final curve is type 1 or type 3.
    C8,
    /// Every type-1 curve is a leaf.
    C9,
    /// At least one type-3 curve exists.
    C10,
    /// At least one type-1 curve exists (engine-level requirement, can be
    /// switched off for exploration).
    C11,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeViolation {
    pub constraint: ConstraintId,
    pub vertices: Vec<VertexId>,
    pub detail: String,
}

impl fmt::Display for TypeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypingError {
    #[error("assignment is partial: vertex {0} has no type")]
    PartialAssignment(VertexId),
    #[error("assignment types unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy)]
pub struct TypingOptions {
    /// Enforce C11. On by default; `--allow-no-type1` turns it off.
    pub require_type1: bool,
}

impl Default for TypingOptions {
    fn default() -> Self {
        TypingOptions { require_type1: true }
    }
}

/// Validates a total assignment against C1-C10 (and C11 unless disabled).
/// Computes the final curves itself, which requires a realizable tree.
pub fn check_assignment(
    t: &CurveTree,
    ta: &TypeAssignment,
    opts: &TypingOptions,
) -> Result<Vec<TypeViolation>, TypingError> {
    validate_total(t, ta)?;
    let finals = t.final_curves()?;
    Ok(check_with_finals(t, ta, &finals, opts))
}

fn validate_total(t: &CurveTree, ta: &TypeAssignment) -> Result<(), TypingError> {
    for (v, _) in ta.iter() {
        if v.index() >= t.len() {
            return Err(TypingError::UnknownVertex(v));
        }
    }
    for v in t.ids() {
        if ta.get(v).is_none() {
            return Err(TypingError::PartialAssignment(v));
        }
    }
    Ok(())
}

/// Constraint check against precomputed final curves; assumes totality.
pub fn check_with_finals(
    t: &CurveTree,
    ta: &TypeAssignment,
    finals: &BTreeSet<VertexId>,
    opts: &TypingOptions,
) -> Vec<TypeViolation> {
    let mut out = Vec::new();
    let adj = t.adjacency();
    let ty = |v: VertexId| ta.get(v).expect("assignment is total");

    // C1
    let origin = t.origin();
    if ty(origin) != CurveType::Type2 {
        out.push(TypeViolation {
            constraint: ConstraintId::C1,
            vertices: vec![origin],
            detail: format!("origin {origin} is typed {}, must be 2", ty(origin)),
        });
    }

    // C2, C3, C9 per vertex
    for v in t.ids() {
        match ty(v) {
            CurveType::Type1 => {
                let k = t.kbar(v);
                if !(k < 0 && k % 2 == 0) {
                    out.push(TypeViolation {
                        constraint: ConstraintId::C2,
                        vertices: vec![v],
                        detail: format!("type-1 vertex {v} has label {k}, need negative even"),
                    });
                }
                if adj[v.index()].len() != 1 {
                    out.push(TypeViolation {
                        constraint: ConstraintId::C9,
                        vertices: vec![v],
                        detail: format!(
                            "type-1 vertex {v} has degree {}, must be a leaf",
                            adj[v.index()].len()
                        ),
                    });
                }
            }
            CurveType::Type3 if t.kbar(v) <= 0 => {
                out.push(TypeViolation {
                    constraint: ConstraintId::C3,
                    vertices: vec![v],
                    detail: format!("type-3 vertex {v} has label {}, need positive", t.kbar(v)),
                });
            }
            _ => {}
        }
    }

    // C4: types {1,2} connected, containing origin and all negatives
    let core: Vec<VertexId> = t
        .ids()
        .filter(|&v| matches!(ty(v), CurveType::Type1 | CurveType::Type2))
        .collect();
    if !core.contains(&origin) {
        // already reported via C1; connectivity is checked from any member
    }
    if let Some(&start) = core.first() {
        let in_core = |v: VertexId| matches!(ty(v), CurveType::Type1 | CurveType::Type2);
        let mut seen = vec![false; t.len()];
        let mut stack = vec![start];
        seen[start.index()] = true;
        let mut reached = 1usize;
        while let Some(u) = stack.pop() {
            for &w in &adj[u.index()] {
                if in_core(w) && !seen[w.index()] {
                    seen[w.index()] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != core.len() {
            out.push(TypeViolation {
                constraint: ConstraintId::C4,
                vertices: core.clone(),
                detail: "type-1/2 subgraph is disconnected".into(),
            });
        }
    }
    for v in t.ids() {
        if t.kbar(v) < 0 && !matches!(ty(v), CurveType::Type1 | CurveType::Type2) {
            out.push(TypeViolation {
                constraint: ConstraintId::C4,
                vertices: vec![v],
                detail: format!(
                    "negative-label vertex {v} is typed {}, must lie in the type-1/2 subtree",
                    ty(v)
                ),
            });
        }
    }

    // C5
    for &(a, b) in t.edges() {
        let (a, b) = (VertexId(a), VertexId(b));
        if ty(a) == CurveType::Type1 && ty(b) == CurveType::Type1 {
            out.push(TypeViolation {
                constraint: ConstraintId::C5,
                vertices: vec![a, b],
                detail: format!("adjacent type-1 vertices {a} and {b}"),
            });
        }
    }

    // C6 per type-3 vertex, collecting legal chain members for C7
    let mut chained: BTreeSet<VertexId> = BTreeSet::new();
    for v in t.ids() {
        if ty(v) != CurveType::Type3 {
            continue;
        }
        let nbrs = &adj[v.index()];
        let type2_nbrs: Vec<VertexId> =
            nbrs.iter().copied().filter(|&u| ty(u) == CurveType::Type2).collect();
        if type2_nbrs.len() != 1 {
            out.push(TypeViolation {
                constraint: ConstraintId::C6,
                vertices: vec![v],
                detail: format!(
                    "type-3 vertex {v} has {} type-2 neighbors, need exactly one",
                    type2_nbrs.len()
                ),
            });
            continue;
        }
        let others: Vec<VertexId> =
            nbrs.iter().copied().filter(|&u| u != type2_nbrs[0]).collect();
        match others.as_slice() {
            [] => {}
            [w] => match chain_behind(&adj, v, *w) {
                Some(path) => {
                    let mut ok = true;
                    for &c in &path {
                        if ty(c) != CurveType::Type4 {
                            out.push(TypeViolation {
                                constraint: ConstraintId::C6,
                                vertices: vec![v, c],
                                detail: format!(
                                    "vertex {c} behind type-3 vertex {v} is typed {}, must be 4",
                                    ty(c)
                                ),
                            });
                            ok = false;
                        }
                    }
                    if ok {
                        chained.extend(path);
                    }
                }
                None => {
                    out.push(TypeViolation {
                        constraint: ConstraintId::C6,
                        vertices: vec![v, *w],
                        detail: format!("subtree behind type-3 vertex {v} is not a simple chain"),
                    });
                }
            },
            _ => {
                out.push(TypeViolation {
                    constraint: ConstraintId::C6,
                    vertices: vec![v],
                    detail: format!("type-3 vertex {v} has degree {} > 2", nbrs.len()),
                });
            }
        }
    }

    // C7
    for v in t.ids() {
        if ty(v) != CurveType::Type4 {
            continue;
        }
        for &u in &adj[v.index()] {
            if matches!(ty(u), CurveType::Type1 | CurveType::Type2) {
                out.push(TypeViolation {
                    constraint: ConstraintId::C7,
                    vertices: vec![v, u],
                    detail: format!("type-4 vertex {v} touches type-{} vertex {u}", ty(u)),
                });
            }
        }
        if !chained.contains(&v) {
            out.push(TypeViolation {
                constraint: ConstraintId::C7,
                vertices: vec![v],
                detail: format!("type-4 vertex {v} lies in no chain behind a type-3 vertex"),
            });
        }
    }

    // C8
    for &f in finals {
        if !matches!(ty(f), CurveType::Type1 | CurveType::Type3) {
            out.push(TypeViolation {
                constraint: ConstraintId::C8,
                vertices: vec![f],
                detail: format!("final curve {f} is typed {}, must be 1 or 3", ty(f)),
            });
        }
    }

    // C10
    if !t.ids().any(|v| ty(v) == CurveType::Type3) {
        out.push(TypeViolation {
            constraint: ConstraintId::C10,
            vertices: vec![],
            detail: "no type-3 vertex".into(),
        });
    }

    // C11
    if opts.require_type1 && !t.ids().any(|v| ty(v) == CurveType::Type1) {
        out.push(TypeViolation {
            constraint: ConstraintId::C11,
            vertices: vec![],
            detail: "no type-1 vertex".into(),
        });
    }

    out
}

/// The vertices strictly behind `v` through neighbor `w`, provided they
/// form a simple chain ending in a leaf. `None` if the subtree branches.
fn chain_behind(
    adj: &[Vec<VertexId>],
    v: VertexId,
    w: VertexId,
) -> Option<Vec<VertexId>> {
    let mut path = Vec::new();
    let mut prev = v;
    let mut cur = w;
    loop {
        path.push(cur);
        let next: Vec<VertexId> =
            adj[cur.index()].iter().copied().filter(|&u| u != prev).collect();
        match next.as_slice() {
            [] => return Some(path),
            [only] => {
                prev = cur;
                cur = *only;
            }
            _ => return None,
        }
    }
}

/// Enumerates every total assignment passing [`check_assignment`],
/// deduplicated and in deterministic order. Final curves are typed by the
/// sign of their label (negative even gives 1, positive gives 3; anything
/// else rejects the tree). Non-final vertices default to type 2, with
/// optional type-3 placements on positive vertices, type-4 chains behind
/// them, and optional type-1 placements on negative-even leaves.
pub fn admissible_assignments(
    t: &CurveTree,
    opts: &TypingOptions,
) -> Result<Vec<TypeAssignment>, TypingError> {
    let finals = t.final_curves()?;
    Ok(admissible_with_finals(t, &finals, opts))
}

/// Same enumeration against precomputed finals.
pub fn admissible_with_finals(
    t: &CurveTree,
    finals: &BTreeSet<VertexId>,
    opts: &TypingOptions,
) -> Vec<TypeAssignment> {
    let adj = t.adjacency();
    let origin = t.origin();

    let mut forced1: Vec<VertexId> = Vec::new();
    let mut forced3: Vec<VertexId> = Vec::new();
    for &f in finals {
        let k = t.kbar(f);
        if k < 0 && k % 2 == 0 {
            // must be type 1, so must be a leaf
            if adj[f.index()].len() != 1 {
                return Vec::new();
            }
            forced1.push(f);
        } else if k > 0 {
            // must be type 3, so can have at most two neighbors
            if adj[f.index()].len() > 2 {
                return Vec::new();
            }
            forced3.push(f);
        } else {
            // neither negative-even nor positive: untypeable final curve
            return Vec::new();
        }
    }

    let extra3: Vec<VertexId> = t
        .ids()
        .filter(|&v| {
            !finals.contains(&v)
                && v != origin
                && t.kbar(v) > 0
                && adj[v.index()].len() <= 2
        })
        .collect();
    let extra1: Vec<VertexId> = t
        .ids()
        .filter(|&v| {
            !finals.contains(&v)
                && v != origin
                && t.kbar(v) < 0
                && t.kbar(v) % 2 == 0
                && adj[v.index()].len() == 1
        })
        .collect();

    let mut results: BTreeSet<TypeAssignment> = BTreeSet::new();

    // subsets of optional type-3 placements
    for mask3 in 0u64..(1u64 << extra3.len()) {
        let mut type3: Vec<VertexId> = forced3.clone();
        for (i, &v) in extra3.iter().enumerate() {
            if mask3 & (1 << i) != 0 {
                type3.push(v);
            }
        }
        // orientation choice per degree-2 type-3 vertex: which neighbor
        // starts the type-4 chain (the other one must end up type 2)
        let deg2: Vec<VertexId> =
            type3.iter().copied().filter(|&v| adj[v.index()].len() == 2).collect();
        'orient: for orient in 0u64..(1u64 << deg2.len()) {
            let mut claimed: BTreeMap<VertexId, CurveType> = BTreeMap::new();
            for &v in &type3 {
                claimed.insert(v, CurveType::Type3);
            }
            for (i, &v) in deg2.iter().enumerate() {
                let side = ((orient >> i) & 1) as usize;
                let w = adj[v.index()][side];
                let Some(chain) = chain_behind(&adj, v, w) else {
                    continue 'orient;
                };
                for c in chain {
                    if c == origin || finals.contains(&c) || claimed.contains_key(&c) {
                        continue 'orient;
                    }
                    claimed.insert(c, CurveType::Type4);
                }
            }
            // optional type-1 placements on the remaining candidates
            let free1: Vec<VertexId> =
                extra1.iter().copied().filter(|v| !claimed.contains_key(v)).collect();
            for mask1 in 0u64..(1u64 << free1.len()) {
                let mut types: BTreeMap<VertexId, CurveType> = BTreeMap::new();
                for v in t.ids() {
                    types.insert(v, CurveType::Type2);
                }
                for (&v, &ty) in &claimed {
                    types.insert(v, ty);
                }
                for &v in &forced1 {
                    types.insert(v, CurveType::Type1);
                }
                for (i, &v) in free1.iter().enumerate() {
                    if mask1 & (1 << i) != 0 {
                        types.insert(v, CurveType::Type1);
                    }
                }
                let ta = TypeAssignment::new(types);
                if check_with_finals(t, &ta, finals, opts).is_empty() {
                    results.insert(ta);
                }
            }
        }
    }

    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CurveTree;
    use crate::script::{BlowupScript, Step};

    fn golden() -> CurveTree {
        BlowupScript::section2_example().replay().unwrap()
    }

    fn assign_all(t: &CurveTree, default: CurveType, overrides: &[(u32, CurveType)]) -> TypeAssignment {
        let mut types = BTreeMap::new();
        for v in t.ids() {
            types.insert(v, default);
        }
        for &(v, ty) in overrides {
            types.insert(VertexId(v), ty);
        }
        TypeAssignment::new(types)
    }

    #[test]
    fn golden_tree_forced_typing_fails_on_leaf_rule() {
        let t = golden();
        // the interior final -2 vertex forced to type 1; label-1 finals to 3
        let ta = assign_all(
            &t,
            CurveType::Type2,
            &[
                (5, CurveType::Type1),
                (7, CurveType::Type3),
                (8, CurveType::Type3),
                (9, CurveType::Type3),
                (10, CurveType::Type3),
            ],
        );
        let violations = check_assignment(&t, &ta, &TypingOptions::default()).unwrap();
        assert!(
            violations
                .iter()
                .any(|v| v.constraint == ConstraintId::C9 && v.vertices == vec![VertexId(5)]),
            "expected a C9 violation on vertex 5, got {violations:?}"
        );
    }

    #[test]
    fn initial_tree_needs_a_type3() {
        let t = CurveTree::initial();
        let ta = assign_all(&t, CurveType::Type2, &[]);
        let violations = check_assignment(&t, &ta, &TypingOptions::default()).unwrap();
        assert!(violations.iter().any(|v| v.constraint == ConstraintId::C10));
    }

    #[test]
    fn odd_label_cannot_be_type1() {
        let t = CurveTree::initial().blowup_point(VertexId(0)).unwrap();
        let ta = assign_all(&t, CurveType::Type2, &[(1, CurveType::Type1)]);
        let violations = check_assignment(&t, &ta, &TypingOptions::default()).unwrap();
        assert!(violations.iter().any(|v| v.constraint == ConstraintId::C2));
    }

    #[test]
    fn partial_assignment_is_an_error() {
        let t = golden();
        let mut types = BTreeMap::new();
        types.insert(VertexId(0), CurveType::Type2);
        let err = check_assignment(&t, &TypeAssignment::new(types), &TypingOptions::default())
            .unwrap_err();
        assert!(matches!(err, TypingError::PartialAssignment(_)));
    }

    #[test]
    fn golden_tree_has_no_admissible_assignment() {
        let t = golden();
        let got = admissible_assignments(&t, &TypingOptions::default()).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn zero_label_final_rejects_tree() {
        // P 0, P 1 makes the label-0 vertex final
        let s = BlowupScript::new(vec![Step::Point(VertexId(0)), Step::Point(VertexId(1))]);
        let t = s.replay().unwrap();
        assert!(t.final_curves().unwrap().contains(&VertexId(2)));
        assert_eq!(t.kbar(VertexId(2)), 0);
        let got = admissible_assignments(&t, &TypingOptions::default()).unwrap();
        assert!(got.is_empty());
    }

    /// The tree used in several solver tests: finals are one -2 leaf and
    /// one +1 leaf.
    pub(crate) fn two_final_tree() -> CurveTree {
        use Step::*;
        BlowupScript::new(vec![
            Point(VertexId(0)),
            Edge(VertexId(0), VertexId(1)),
            Point(VertexId(2)),
            Point(VertexId(1)),
            Point(VertexId(4)),
        ])
        .replay()
        .unwrap()
    }

    #[test]
    fn two_final_tree_has_unique_assignment() {
        let t = two_final_tree();
        let finals = t.final_curves().unwrap();
        let expect: BTreeSet<VertexId> = [VertexId(3), VertexId(5)].into_iter().collect();
        assert_eq!(finals, expect);
        assert_eq!(t.kbar(VertexId(3)), -2);
        assert_eq!(t.kbar(VertexId(5)), 1);

        let got = admissible_assignments(&t, &TypingOptions::default()).unwrap();
        assert_eq!(got.len(), 1);
        let ta = &got[0];
        assert_eq!(ta.get(VertexId(3)), Some(CurveType::Type1));
        assert_eq!(ta.get(VertexId(5)), Some(CurveType::Type3));
        for v in [0u32, 1, 2, 4] {
            assert_eq!(ta.get(VertexId(v)), Some(CurveType::Type2));
        }
        assert_eq!(ta.ramification(&t, VertexId(3)), Some(1));
    }

    #[test]
    fn type4_chain_is_recognized() {
        // chain v0(-2) v1(-1) v2(0) v4(1) v3(1); the final curve v4 goes
        // type 3 with v3 as its chain
        use Step::*;
        let t = BlowupScript::new(vec![
            Point(VertexId(0)),
            Point(VertexId(1)),
            Point(VertexId(2)),
            Edge(VertexId(2), VertexId(3)),
        ])
        .replay()
        .unwrap();
        let finals = t.final_curves().unwrap();
        assert_eq!(finals, [VertexId(4)].into_iter().collect());
        let no_c11 = TypingOptions { require_type1: false };

        let good = assign_all(
            &t,
            CurveType::Type2,
            &[(4, CurveType::Type3), (3, CurveType::Type4)],
        );
        let v = check_with_finals(&t, &good, &finals, &no_c11);
        assert!(v.is_empty(), "expected clean chain typing, got {v:?}");

        // chain pointed the wrong way: vertex 1 sits behind the type-3
        // vertex but stays type 2
        let bad = assign_all(
            &t,
            CurveType::Type2,
            &[(4, CurveType::Type3), (2, CurveType::Type4)],
        );
        let v = check_with_finals(&t, &bad, &finals, &no_c11);
        assert!(v.iter().any(|x| x.constraint == ConstraintId::C6));

        // a stray type 4 touching type 2 with no type-3 anchor
        let stray = assign_all(&t, CurveType::Type2, &[(3, CurveType::Type4)]);
        let v = check_with_finals(&t, &stray, &finals, &no_c11);
        assert!(v.iter().any(|x| x.constraint == ConstraintId::C7));
    }
}
