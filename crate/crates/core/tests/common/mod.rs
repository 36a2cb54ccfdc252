//! Shared oracles and generators for the integration and acceptance suites.
//! Everything here recomputes results independently of the library's fast
//! paths: pairwise isomorphism instead of canonical keys, matrix inversion
//! instead of fraction-free elimination, box enumeration instead of the
//! pruned search.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use jsieve_core::graph::{CurveTree, VertexId};
use jsieve_core::script::{BlowupScript, Step};
use jsieve_core::typing::{check_with_finals, CurveType, TypeAssignment, TypingOptions};

// ---- random scripts -------------------------------------------------------

/// A random legal script of at most `max_len` steps. Every step targets an
/// existing vertex or edge, so replay never fails.
pub fn random_script<R: Rng>(rng: &mut R, max_len: usize) -> BlowupScript {
    let len = rng.gen_range(0..=max_len);
    let mut steps = Vec::with_capacity(len);
    let mut tree = CurveTree::initial();
    for _ in 0..len {
        let n = tree.len() as u32;
        let edges = tree.edges().len();
        let use_edge = edges > 0 && rng.gen_bool(0.4);
        let step = if use_edge {
            let &(a, b) = &tree.edges()[rng.gen_range(0..edges)];
            Step::Edge(VertexId(a), VertexId(b))
        } else {
            Step::Point(VertexId(rng.gen_range(0..n)))
        };
        tree = match step {
            Step::Point(v) => tree.blowup_point(v).unwrap(),
            Step::Edge(a, b) => tree.blowup_edge(a, b).unwrap(),
        };
        steps.push(step);
    }
    BlowupScript::new(steps)
}

// ---- pairwise rooted isomorphism ------------------------------------------

/// Label-preserving rooted isomorphism by direct backtracking over child
/// matchings; deliberately ignorant of the canonical-code machinery.
pub fn rooted_isomorphic(a: &CurveTree, b: &CurveTree) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let adj_a = a.adjacency();
    let adj_b = b.adjacency();
    iso_rec(a, &adj_a, a.origin(), None, b, &adj_b, b.origin(), None)
}

#[allow(clippy::too_many_arguments)]
fn iso_rec(
    a: &CurveTree,
    adj_a: &[Vec<VertexId>],
    va: VertexId,
    pa: Option<VertexId>,
    b: &CurveTree,
    adj_b: &[Vec<VertexId>],
    vb: VertexId,
    pb: Option<VertexId>,
) -> bool {
    if a.kbar(va) != b.kbar(vb) || a.self_int(va) != b.self_int(vb) {
        return false;
    }
    let ca: Vec<VertexId> = adj_a[va.index()].iter().copied().filter(|&u| Some(u) != pa).collect();
    let cb: Vec<VertexId> = adj_b[vb.index()].iter().copied().filter(|&u| Some(u) != pb).collect();
    if ca.len() != cb.len() {
        return false;
    }
    let mut used = vec![false; cb.len()];
    match_children(a, adj_a, va, &ca, 0, b, adj_b, vb, &cb, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn match_children(
    a: &CurveTree,
    adj_a: &[Vec<VertexId>],
    va: VertexId,
    ca: &[VertexId],
    i: usize,
    b: &CurveTree,
    adj_b: &[Vec<VertexId>],
    vb: VertexId,
    cb: &[VertexId],
    used: &mut [bool],
) -> bool {
    if i == ca.len() {
        return true;
    }
    for j in 0..cb.len() {
        if used[j] {
            continue;
        }
        if iso_rec(a, adj_a, ca[i], Some(va), b, adj_b, cb[j], Some(vb)) {
            used[j] = true;
            if match_children(a, adj_a, va, ca, i + 1, b, adj_b, vb, cb, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// Every tree reachable in exactly `depth` moves, one per script, no
/// deduplication. Grows as the double factorial of `2*depth - 1`.
pub fn all_trees_exact_depth(depth: usize) -> Vec<CurveTree> {
    let mut level = vec![CurveTree::initial()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &level {
            for v in t.ids() {
                next.push(t.blowup_point(v).unwrap());
            }
            for &(a, b) in t.edges() {
                next.push(t.blowup_edge(VertexId(a), VertexId(b)).unwrap());
            }
        }
        level = next;
    }
    level
}

/// Class count at exact depth by pairwise-isomorphism deduplication,
/// with a cheap invariant bucketing to keep the quadratic part small.
pub fn naive_class_count(depth: usize) -> usize {
    let trees = all_trees_exact_depth(depth);
    let mut buckets: BTreeMap<Vec<(i64, i64, usize)>, Vec<&CurveTree>> = BTreeMap::new();
    for t in &trees {
        let mut sig: Vec<(i64, i64, usize)> = t
            .ids()
            .map(|v| (t.kbar(v), t.self_int(v), t.degree(v)))
            .collect();
        sig.sort_unstable();
        buckets.entry(sig).or_default().push(t);
    }
    let mut classes = 0usize;
    for group in buckets.values() {
        let mut reps: Vec<&CurveTree> = Vec::new();
        for t in group {
            if !reps.iter().any(|r| rooted_isomorphic(r, t)) {
                reps.push(t);
            }
        }
        classes += reps.len();
    }
    classes
}

// ---- brute-force typing oracle ---------------------------------------------

/// Per-vertex type candidates implied by the unary constraints alone
/// (C1, C2, C3, C8, C9). Every map skipped by this filter fails
/// `check_assignment` outright.
fn unary_domain(t: &CurveTree, finals: &BTreeSet<VertexId>, v: VertexId) -> Vec<CurveType> {
    let mut out = Vec::new();
    let is_final = finals.contains(&v);
    let leaf = t.degree(v) == 1;
    let k = t.kbar(v);
    for ty in CurveType::ALL {
        let ok = match ty {
            CurveType::Type1 => k < 0 && k % 2 == 0 && leaf,
            CurveType::Type2 => true,
            CurveType::Type3 => k > 0,
            CurveType::Type4 => true,
        };
        let ok = ok && (!is_final || matches!(ty, CurveType::Type1 | CurveType::Type3));
        let ok = ok && (!t.vertex(v).unwrap().is_origin || ty == CurveType::Type2);
        if ok {
            out.push(ty);
        }
    }
    out
}

/// All total maps passing `check_assignment`, enumerated by product over
/// unary-feasible domains.
pub fn typing_oracle(
    t: &CurveTree,
    finals: &BTreeSet<VertexId>,
    opts: &TypingOptions,
) -> BTreeSet<TypeAssignment> {
    let domains: Vec<Vec<CurveType>> =
        t.ids().map(|v| unary_domain(t, finals, v)).collect();
    let mut out = BTreeSet::new();
    let mut current: Vec<CurveType> = Vec::with_capacity(t.len());
    oracle_rec(t, finals, opts, &domains, &mut current, &mut out);
    out
}

fn oracle_rec(
    t: &CurveTree,
    finals: &BTreeSet<VertexId>,
    opts: &TypingOptions,
    domains: &[Vec<CurveType>],
    current: &mut Vec<CurveType>,
    out: &mut BTreeSet<TypeAssignment>,
) {
    if current.len() == domains.len() {
        let ta = TypeAssignment::new(
            current
                .iter()
                .enumerate()
                .map(|(i, &ty)| (VertexId(i as u32), ty))
                .collect(),
        );
        if check_with_finals(t, &ta, finals, opts).is_empty() {
            out.insert(ta);
        }
        return;
    }
    for &ty in &domains[current.len()] {
        current.push(ty);
        oracle_rec(t, finals, opts, domains, current, out);
        current.pop();
    }
}

/// The literal 4^n sweep, for cross-checking the pruned oracle on small
/// trees.
pub fn typing_oracle_literal(
    t: &CurveTree,
    finals: &BTreeSet<VertexId>,
    opts: &TypingOptions,
) -> BTreeSet<TypeAssignment> {
    let n = t.len();
    assert!(n <= 8, "literal sweep is for small trees");
    let mut out = BTreeSet::new();
    for code in 0u64..(4u64.pow(n as u32)) {
        let mut types = BTreeMap::new();
        let mut rem = code;
        for v in t.ids() {
            let ty = CurveType::from_u8((rem % 4) as u8 + 1).unwrap();
            rem /= 4;
            types.insert(v, ty);
        }
        let ta = TypeAssignment::new(types);
        if check_with_finals(t, &ta, finals, opts).is_empty() {
            out.insert(ta);
        }
    }
    out
}

// ---- naive exact linear algebra ---------------------------------------------

/// Gauss-Jordan inverse over exact rationals; `None` when singular.
#[allow(clippy::needless_range_loop)]
pub fn invert_rational(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for x in aug[col].iter_mut() {
            *x /= p.clone();
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in 0..2 * n {
                    let delta = factor.clone() * aug[col][c].clone();
                    aug[r][c] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// The type-2 linear system of an assignment, built here from scratch:
/// matrix rows/columns over the sorted type-2 vertices, right-hand side
/// from the pinned type-1 coefficients.
pub fn build_l_system(
    t: &CurveTree,
    ta: &TypeAssignment,
) -> (Vec<VertexId>, Vec<Vec<BigRational>>, Vec<BigRational>) {
    let mut vars = ta.vertices_of(CurveType::Type2);
    vars.sort_unstable();
    let col: BTreeMap<VertexId, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut mat = vec![vec![BigRational::zero(); vars.len()]; vars.len()];
    let mut rhs = vec![BigRational::zero(); vars.len()];
    for (r, &e) in vars.iter().enumerate() {
        mat[r][col[&e]] = BigRational::from(BigInt::from(t.self_int(e)));
        for u in t.neighbors(e) {
            match col.get(&u) {
                Some(&c) => mat[r][c] += BigRational::one(),
                None => {
                    if ta.get(u) == Some(CurveType::Type1) {
                        let fixed = BigRational::from(BigInt::from(-t.kbar(u)))
                            / BigRational::from(BigInt::from(2));
                        rhs[r] -= fixed;
                    }
                }
            }
        }
    }
    (vars, mat, rhs)
}

/// Matrix-inverse route for the unique case: `x = M^-1 rhs`.
pub fn naive_l_solution(
    t: &CurveTree,
    ta: &TypeAssignment,
) -> Option<BTreeMap<VertexId, BigRational>> {
    let (vars, mat, rhs) = build_l_system(t, ta);
    let inv = invert_rational(&mat)?;
    let mut out = BTreeMap::new();
    for (i, &v) in vars.iter().enumerate() {
        let mut acc = BigRational::zero();
        for (j, r) in rhs.iter().enumerate() {
            acc += inv[i][j].clone() * r.clone();
        }
        out.insert(v, acc);
    }
    Some(out)
}

// ---- Delta box oracle ---------------------------------------------------------

/// Exhaustive enumeration of `{1..cap}^k` filtered by the four conditions
/// and the slope rule, with all pairings computed inline.
pub fn delta_box_oracle(
    t: &CurveTree,
    ta: &TypeAssignment,
    l: &jsieve_core::DivisorClass,
    cap: i64,
) -> Vec<BTreeMap<VertexId, i64>> {
    let mut vars = ta.vertices_of(CurveType::Type2);
    vars.sort_unstable();
    let k = vars.len();
    let idx: BTreeMap<VertexId, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let type1 = ta.vertices_of(CurveType::Type1);
    let type3 = ta.vertices_of(CurveType::Type3);

    let pair_delta = |vals: &[i64], e: VertexId| -> i64 {
        let own = idx.get(&e).map(|&i| t.self_int(e) * vals[i]).unwrap_or(0);
        own + t
            .neighbors(e)
            .iter()
            .filter_map(|u| idx.get(u).map(|&i| vals[i]))
            .sum::<i64>()
    };
    let pair_l = |e: VertexId| -> BigRational {
        let mut acc = BigRational::from(BigInt::from(t.self_int(e))) * l.coeff(e);
        for u in t.neighbors(e) {
            acc += l.coeff(u);
        }
        acc
    };

    let mut out = Vec::new();
    let total = (cap as u64).pow(k as u32);
    'next: for code in 0..total {
        let mut vals = vec![0i64; k];
        let mut rem = code;
        for v in vals.iter_mut() {
            *v = (rem % cap as u64) as i64 + 1;
            rem /= cap as u64;
        }
        for &e in &vars {
            if pair_delta(&vals, e) > 0 {
                continue 'next;
            }
        }
        for &e in &type1 {
            if pair_delta(&vals, e) != 1 {
                continue 'next;
            }
        }
        for &e in &type3 {
            let pd = BigRational::from(BigInt::from(pair_delta(&vals, e)));
            if pd > pair_l(e) {
                continue 'next;
            }
        }
        // slope: strict local minimum on type-2 vertices with defined ratio
        let ratio = |v: VertexId| -> Option<BigRational> {
            let lv = l.coeff(v);
            if lv.is_zero() {
                None
            } else {
                Some(BigRational::from(BigInt::from(vals[idx[&v]])) / lv)
            }
        };
        for &v in &vars {
            let Some(rv) = ratio(v) else { continue };
            let nbr: Vec<BigRational> = t
                .neighbors(v)
                .iter()
                .filter(|u| idx.contains_key(u))
                .filter_map(|&u| ratio(u))
                .collect();
            if !nbr.is_empty() && nbr.iter().all(|ru| rv < *ru) {
                continue 'next;
            }
        }
        out.push(vars.iter().enumerate().map(|(i, &v)| (v, vals[i])).collect());
    }
    out
}

/// Signed big-integer helper for determinant cross-checks.
pub fn is_negative(x: &BigInt) -> bool {
    x.is_negative()
}
