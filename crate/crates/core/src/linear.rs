//! Exact solvers for the two divisor classes a candidate configuration
//! must carry.
//!
//! `L` plays the role of the pullback of a generic line: its coefficient is
//! pinned on type-1 curves (minus half the label), zero on type-3/4 curves,
//! and the type-2 coefficients are the unique solution of the exact linear
//! system demanding zero intersection with every type-2 curve. `Delta` is
//! the type-2-supported correction making `L - Delta` the pullback of a
//! line through the image of the curve at infinity; its coefficients are
//! found by bounded depth-first search with constraint propagation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::graph::{CurveTree, VertexId};
use crate::lattice::{pair_with_vertex, DivisorClass};
use crate::linalg::{self, LinearOutcome};
use crate::typing::{check_assignment, CurveType, TypeAssignment, TypingError, TypingOptions};

/// Stable reason codes for `L` failures (part of the report schema).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum LFailureCode {
    SingularNoSolution,
    Underdetermined,
    NonIntegral,
    Condition2Failed,
    NegativeCoefficient,
}

impl fmt::Display for LFailureCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LSolveError {
    #[error("assignment fails validation: {0:?}")]
    InvalidAssignment(Vec<crate::typing::TypeViolation>),
    #[error(transparent)]
    Typing(#[from] TypingError),
    #[error("no solution: the type-2 system is inconsistent")]
    SingularNoSolution,
    #[error("type-2 system is underdetermined ({} kernel vectors)", kernel.len())]
    Underdetermined { particular: DivisorClass, kernel: Vec<DivisorClass> },
    #[error("solved coefficients are not integral at {offenders:?}")]
    NonIntegral { offenders: Vec<VertexId>, candidate: DivisorClass },
    #[error("unit-intersection condition fails at {} type-1 vertices", failing.len())]
    Condition2Failed { failing: Vec<(VertexId, BigRational)>, candidate: DivisorClass },
    #[error("negative coefficients at {offenders:?}")]
    NegativeCoefficient { offenders: Vec<VertexId>, candidate: DivisorClass },
}

impl LSolveError {
    /// The schema reason code, when the failure is a solve failure rather
    /// than a precondition error.
    pub fn code(&self) -> Option<LFailureCode> {
        match self {
            LSolveError::SingularNoSolution => Some(LFailureCode::SingularNoSolution),
            LSolveError::Underdetermined { .. } => Some(LFailureCode::Underdetermined),
            LSolveError::NonIntegral { .. } => Some(LFailureCode::NonIntegral),
            LSolveError::Condition2Failed { .. } => Some(LFailureCode::Condition2Failed),
            LSolveError::NegativeCoefficient { .. } => Some(LFailureCode::NegativeCoefficient),
            _ => None,
        }
    }
}

/// A solved `L` with its per-condition residuals. Construction re-validates
/// every invariant, so holding a value of this type is the certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct LSolution {
    pub class: DivisorClass,
    /// `pair(L, E)` for every type-1 vertex (all exactly 1).
    pub type1_pairings: BTreeMap<VertexId, BigRational>,
    /// `pair(L, E)` for every type-2 vertex (all exactly 0).
    pub type2_pairings: BTreeMap<VertexId, BigRational>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LOptions {
    /// Permit negative coefficients (off by default; `--allow-negative-L`).
    pub allow_negative: bool,
}

/// Solves for `L` after validating the assignment against the typing
/// constraints.
pub fn solve_l(
    t: &CurveTree,
    ta: &TypeAssignment,
    topts: &TypingOptions,
    opts: &LOptions,
) -> Result<LSolution, LSolveError> {
    let violations = check_assignment(t, ta, topts)?;
    if !violations.is_empty() {
        return Err(LSolveError::InvalidAssignment(violations));
    }
    solve_l_unchecked(t, ta, opts)
}

/// Solves for `L` assuming the assignment has already been validated.
pub fn solve_l_unchecked(
    t: &CurveTree,
    ta: &TypeAssignment,
    opts: &LOptions,
) -> Result<LSolution, LSolveError> {
    let mut fixed = DivisorClass::zero();
    for (v, ty) in ta.iter() {
        match ty {
            CurveType::Type1 => {
                // negative even label; coefficient is minus half of it
                fixed.set(v, BigRational::from(BigInt::from(-t.kbar(v))) / BigRational::from(BigInt::from(2)));
            }
            CurveType::Type3 | CurveType::Type4 => {} // coefficient zero
            CurveType::Type2 => {}
        }
    }
    let unknowns: Vec<VertexId> = {
        let mut u = ta.vertices_of(CurveType::Type2);
        u.sort_unstable();
        u
    };
    let col_of: BTreeMap<VertexId, usize> =
        unknowns.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // one equation per type-2 vertex: self_int * x_v + sum of adjacent
    // type-2 unknowns = -(contribution of fixed type-1 coefficients)
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(unknowns.len());
    let mut b: Vec<BigInt> = Vec::with_capacity(unknowns.len());
    for &e in &unknowns {
        let mut row = vec![BigInt::zero(); unknowns.len()];
        row[col_of[&e]] = BigInt::from(t.self_int(e));
        let mut rhs = BigRational::zero();
        for u in t.neighbors(e) {
            if let Some(&c) = col_of.get(&u) {
                row[c] += BigInt::one();
            } else {
                rhs -= fixed.coeff(u);
            }
        }
        debug_assert!(rhs.is_integer(), "half-label contributions are integral");
        a.push(row);
        b.push(rhs.to_integer());
    }

    let solved = match linalg::solve_exact(a, b) {
        LinearOutcome::Unique(x) => x,
        LinearOutcome::Inconsistent => return Err(LSolveError::SingularNoSolution),
        LinearOutcome::Underdetermined { particular, kernel } => {
            let mut part = fixed.clone();
            for (i, v) in particular.iter().enumerate() {
                part.set(unknowns[i], v.clone());
            }
            let kernel = kernel
                .iter()
                .map(|k| {
                    // kernel vectors live on the type-2 coordinates only
                    let prim = linalg::to_primitive_integer(k);
                    let mut d = DivisorClass::zero();
                    for (i, v) in prim.iter().enumerate() {
                        d.set(unknowns[i], BigRational::from(v.clone()));
                    }
                    d
                })
                .collect();
            return Err(LSolveError::Underdetermined { particular: part, kernel });
        }
    };

    let mut class = fixed;
    for (i, v) in solved.iter().enumerate() {
        class.set(unknowns[i], v.clone());
    }
    finish_l(t, ta, class, opts)
}

/// Validates a fully determined candidate `L` (integrality, unit pairing on
/// type-1 curves, optional nonnegativity) and packages the solution.
pub fn finish_l(
    t: &CurveTree,
    ta: &TypeAssignment,
    class: DivisorClass,
    opts: &LOptions,
) -> Result<LSolution, LSolveError> {
    if !class.is_integral() {
        return Err(LSolveError::NonIntegral {
            offenders: class.non_integral_vertices(),
            candidate: class,
        });
    }
    let mut type1_pairings = BTreeMap::new();
    let mut failing = Vec::new();
    for v in ta.vertices_of(CurveType::Type1) {
        let p = pair_with_vertex(t, &class, v).expect("support checked");
        if p != BigRational::one() {
            failing.push((v, p.clone()));
        }
        type1_pairings.insert(v, p);
    }
    if !failing.is_empty() {
        return Err(LSolveError::Condition2Failed { failing, candidate: class });
    }
    if !opts.allow_negative {
        let offenders: Vec<VertexId> = class
            .support()
            .filter(|(_, c)| c.is_negative())
            .map(|(v, _)| v)
            .collect();
        if !offenders.is_empty() {
            return Err(LSolveError::NegativeCoefficient { offenders, candidate: class });
        }
    }
    let mut type2_pairings = BTreeMap::new();
    for v in ta.vertices_of(CurveType::Type2) {
        let p = pair_with_vertex(t, &class, v).expect("support checked");
        debug_assert!(p.is_zero());
        type2_pairings.insert(v, p);
    }
    Ok(LSolution { class, type1_pairings, type2_pairings })
}

/// One feasible `Delta` together with the slope (ratio of its coefficient
/// to `L`'s) at every type-2 vertex; `None` where `L` vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSolution {
    pub class: DivisorClass,
    pub slope: BTreeMap<VertexId, Option<BigRational>>,
}

/// Search result: every feasible vector found, plus whether the result cap
/// truncated the search. Truncation is never silent.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaOutcome {
    pub solutions: Vec<DeltaSolution>,
    pub cap_exhausted: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaOptions {
    /// Upper bound for each coefficient (inclusive).
    pub coeff_cap: i64,
    /// Stop after this many solutions and flag the truncation.
    pub result_cap: usize,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions { coeff_cap: 64, result_cap: 128 }
    }
}

/// Enumerates the feasible `Delta` classes: positive integer coefficients
/// on type-2 vertices (zero elsewhere), nonpositive intersection with every
/// type-2 curve, unit intersection with every type-1 curve, intersection
/// with every type-3 curve at most that of `L`, and no strict local minimum
/// of the slope on type-2 vertices. Solutions come out in lexicographic
/// order of the coefficient vector over ascending vertex id.
pub fn solve_delta(
    t: &CurveTree,
    ta: &TypeAssignment,
    l: &DivisorClass,
    opts: &DeltaOptions,
) -> DeltaOutcome {
    assert!(opts.coeff_cap >= 1, "coefficient cap must be at least 1");
    assert!(opts.result_cap >= 1, "result cap must be at least 1");
    for (v, _) in l.support() {
        assert!(v.index() < t.len(), "L names unknown vertex {v}");
    }

    let mut vars: Vec<VertexId> = ta.vertices_of(CurveType::Type2);
    vars.sort_unstable();
    let idx_of: BTreeMap<VertexId, usize> =
        vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = vars.len();

    // per-variable domains [lo, hi], shrunk by propagation
    let mut lo = vec![1i64; n];
    let mut hi = vec![opts.coeff_cap; n];

    // unit intersection with a type-1 curve pins its type-2 neighbors:
    // the pairing is the plain sum of their coefficients
    for v in ta.vertices_of(CurveType::Type1) {
        let n2: Vec<usize> = t
            .neighbors(v)
            .iter()
            .filter_map(|u| idx_of.get(u).copied())
            .collect();
        match n2.as_slice() {
            [] => return DeltaOutcome { solutions: Vec::new(), cap_exhausted: false },
            [only] => {
                lo[*only] = lo[*only].max(1);
                hi[*only] = hi[*only].min(1);
            }
            _ => {
                // each coefficient is a positive integer, so a sum of two or
                // more can never be 1
                return DeltaOutcome { solutions: Vec::new(), cap_exhausted: false };
            }
        }
    }

    // intersection with a type-3 curve bounded by that of L
    for v in ta.vertices_of(CurveType::Type3) {
        let n2: Vec<usize> = t
            .neighbors(v)
            .iter()
            .filter_map(|u| idx_of.get(u).copied())
            .collect();
        if n2.is_empty() {
            continue;
        }
        let bound = pair_with_vertex(t, l, v).expect("support checked");
        if !bound.is_integer() {
            // L is integral in every caller; a fractional bound still
            // compares exactly below, this just skips the cheap propagation
            continue;
        }
        let bound = match i64::try_from(bound.to_integer()) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let others = n2.len() as i64 - 1;
        for &i in &n2 {
            hi[i] = hi[i].min(bound - others);
        }
    }

    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return DeltaOutcome { solutions: Vec::new(), cap_exhausted: false };
    }

    // adjacency among the variables and per-constraint views
    let var_neighbors: Vec<Vec<usize>> = vars
        .iter()
        .map(|&v| t.neighbors(v).iter().filter_map(|u| idx_of.get(u).copied()).collect())
        .collect();
    let self_ints: Vec<i64> = vars.iter().map(|&v| t.self_int(v)).collect();

    struct Search<'a> {
        t: &'a CurveTree,
        ta: &'a TypeAssignment,
        l: &'a DivisorClass,
        vars: &'a [VertexId],
        lo: &'a [i64],
        hi: &'a [i64],
        var_neighbors: &'a [Vec<usize>],
        self_ints: &'a [i64],
        n: usize,
        vals: Vec<i64>,
        solutions: Vec<DeltaSolution>,
        result_cap: usize,
        cap_exhausted: bool,
    }

    impl Search<'_> {
        /// Smallest possible `pair(Delta, vars[i])` given current bounds:
        /// assigned variables exact, unassigned ones at a sign-aware
        /// extreme. Wide arithmetic so extreme hand inputs cannot wrap.
        fn min_pair(&self, i: usize, assigned: usize) -> i128 {
            let term = |j: usize, coef: i64| -> i128 {
                let val = if j < assigned {
                    self.vals[j]
                } else if coef >= 0 {
                    self.lo[j]
                } else {
                    self.hi[j]
                };
                coef as i128 * val as i128
            };
            let mut acc = term(i, self.self_ints[i]);
            for &u in &self.var_neighbors[i] {
                acc += term(u, 1);
            }
            acc
        }

        fn descend(&mut self, depth: usize) {
            if self.solutions.len() >= self.result_cap {
                self.cap_exhausted = true;
                return;
            }
            if depth == self.n {
                self.try_record();
                return;
            }
            for value in self.lo[depth]..=self.hi[depth] {
                self.vals.push(value);
                // prune: any type-2 constraint whose minimum exceeds zero
                // can no longer be satisfied
                let feasible = (0..self.vars.len())
                    .all(|i| self.min_pair(i, self.vals.len()) <= 0);
                if feasible {
                    self.descend(depth + 1);
                }
                self.vals.pop();
                if self.cap_exhausted {
                    return;
                }
            }
        }

        fn try_record(&mut self) {
            let mut class = DivisorClass::zero();
            for (i, &v) in self.vars.iter().enumerate() {
                class.set(v, BigRational::from(BigInt::from(self.vals[i])));
            }
            // exact final checks over the full class
            for &v in self.vars {
                let p = pair_with_vertex(self.t, &class, v).expect("support checked");
                if p.is_positive() {
                    return;
                }
            }
            for v in self.ta.vertices_of(CurveType::Type1) {
                let p = pair_with_vertex(self.t, &class, v).expect("support checked");
                if p != BigRational::one() {
                    return;
                }
            }
            for v in self.ta.vertices_of(CurveType::Type3) {
                let pd = pair_with_vertex(self.t, &class, v).expect("support checked");
                let pl = pair_with_vertex(self.t, self.l, v).expect("support checked");
                if pd > pl {
                    return;
                }
            }
            if has_slope_local_minimum(self.t, self.ta, self.l, &class) {
                return;
            }
            let slope = slope_map(self.ta, self.l, &class);
            self.solutions.push(DeltaSolution { class, slope });
        }
    }

    let mut search = Search {
        t,
        ta,
        l,
        vars: &vars,
        lo: &lo,
        hi: &hi,
        var_neighbors: &var_neighbors,
        self_ints: &self_ints,
        n,
        vals: Vec::with_capacity(n),
        solutions: Vec::new(),
        result_cap: opts.result_cap,
        cap_exhausted: false,
    };
    search.descend(0);
    DeltaOutcome { solutions: search.solutions, cap_exhausted: search.cap_exhausted }
}

/// Slope at each type-2 vertex: `Delta`-coefficient over `L`-coefficient,
/// undefined where `L` vanishes.
pub fn slope_map(
    ta: &TypeAssignment,
    l: &DivisorClass,
    delta: &DivisorClass,
) -> BTreeMap<VertexId, Option<BigRational>> {
    let mut out = BTreeMap::new();
    for v in ta.vertices_of(CurveType::Type2) {
        let lv = l.coeff(v);
        if lv.is_zero() {
            out.insert(v, None);
        } else {
            out.insert(v, Some(delta.coeff(v) / lv));
        }
    }
    out
}

/// The forbidden pattern: a type-2 vertex with defined slope strictly below
/// every type-2 neighbor with defined slope (and at least one such
/// neighbor). Plateaus are allowed; undefined slopes never participate.
pub fn has_slope_local_minimum(
    t: &CurveTree,
    ta: &TypeAssignment,
    l: &DivisorClass,
    delta: &DivisorClass,
) -> bool {
    let slope = slope_map(ta, l, delta);
    for (&v, s) in &slope {
        let Some(sv) = s else { continue };
        let mut any = false;
        let mut strictly_below_all = true;
        for u in t.neighbors(v) {
            if let Some(Some(su)) = slope.get(&u) {
                any = true;
                if sv >= su {
                    strictly_below_all = false;
                    break;
                }
            }
        }
        if any && strictly_below_all {
            return true;
        }
    }
    false
}
