//! Layer-by-layer validation: typing rules C1-C11, the four `L` conditions,
//! the four `Delta` conditions and the slope rule, one pass/fail line each.

use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use jsieve_core::lattice::{pair_with_vertex, rational_to_string};
use jsieve_core::linear::has_slope_local_minimum;
use jsieve_core::typing::{check_assignment, ConstraintId, CurveType, TypingError, TypingOptions};
use jsieve_core::{CurveTree, DivisorClass, TypeAssignment};

use crate::{load_divisor, load_tree, load_types, CmdResult, Failure, EXIT_VIOLATIONS};

pub fn run(
    tree: &Path,
    types: &Path,
    l: Option<&Path>,
    delta: Option<&Path>,
    allow_no_type1: bool,
) -> CmdResult {
    let t = load_tree(tree)?;
    let ta = load_types(types)?;
    let opts = TypingOptions { require_type1: !allow_no_type1 };

    let violations = match check_assignment(&t, &ta, &opts) {
        Ok(v) => v,
        Err(TypingError::Graph(e)) => {
            return Err(Failure::input(format!("audit needs a realizable tree: {e}")))
        }
        Err(e) => return Err(Failure::input(e.to_string())),
    };

    let mut all_pass = true;
    let mut emit = |id: &str, name: &str, fails: Vec<String>| {
        if fails.is_empty() {
            println!("{id} {name}: pass");
        } else {
            all_pass = false;
            println!("{id} {name}: FAIL - {}", fails.join("; "));
        }
    };

    let mut constraints = vec![
        (ConstraintId::C1, "origin-is-type-2"),
        (ConstraintId::C2, "type1-labels-negative-even"),
        (ConstraintId::C3, "type3-labels-positive"),
        (ConstraintId::C4, "type1-2-subtree-connected"),
        (ConstraintId::C5, "no-adjacent-type1"),
        (ConstraintId::C6, "type3-chain-shape"),
        (ConstraintId::C7, "type4-only-in-chains"),
        (ConstraintId::C8, "finals-are-type-1-or-3"),
        (ConstraintId::C9, "type1-are-leaves"),
        (ConstraintId::C10, "type3-exists"),
    ];
    if !allow_no_type1 {
        constraints.push((ConstraintId::C11, "type1-exists"));
    }
    for (id, name) in constraints {
        let fails: Vec<String> = violations
            .iter()
            .filter(|v| v.constraint == id)
            .map(|v| v.detail.clone())
            .collect();
        emit(&id.to_string(), name, fails);
    }

    let l_class = match l {
        Some(path) => {
            let class = load_divisor(path)?;
            audit_l(&t, &ta, &class, &mut emit)?;
            Some(class)
        }
        None => None,
    };

    if let Some(path) = delta {
        let l_class = l_class
            .as_ref()
            .expect("clap enforces that Delta comes with L");
        let d = load_divisor(path)?;
        audit_delta(&t, &ta, l_class, &d, &mut emit)?;
    }

    if all_pass {
        Ok(0)
    } else {
        Ok(EXIT_VIOLATIONS)
    }
}

fn pair_or_input(
    t: &CurveTree,
    d: &DivisorClass,
    v: jsieve_core::VertexId,
) -> Result<BigRational, Failure> {
    pair_with_vertex(t, d, v).map_err(|e| Failure::input(e.to_string()))
}

fn audit_l(
    t: &CurveTree,
    ta: &TypeAssignment,
    l: &DivisorClass,
    emit: &mut impl FnMut(&str, &str, Vec<String>),
) -> Result<(), Failure> {
    for (v, _) in l.support() {
        if v.index() >= t.len() {
            return Err(Failure::input(format!("L names unknown vertex {v}")));
        }
    }
    let mut integral = Vec::new();
    for v in l.non_integral_vertices() {
        integral.push(format!("vertex {v}: {}", rational_to_string(&l.coeff(v))));
    }
    emit("L0", "coefficients-integral", integral);

    let mut c1 = Vec::new();
    for v in ta.vertices_of(CurveType::Type1) {
        let want = BigRational::from_integer((-t.kbar(v)).into()) / BigRational::from_integer(2.into());
        let got = l.coeff(v);
        if got != want {
            c1.push(format!(
                "vertex {v}: got {}, want {}",
                rational_to_string(&got),
                rational_to_string(&want)
            ));
        }
    }
    emit("L1", "type1-coefficients-half-label", c1);

    let mut c2 = Vec::new();
    for v in ta.vertices_of(CurveType::Type1) {
        let p = pair_or_input(t, l, v)?;
        if !p.is_one() {
            c2.push(format!("vertex {v}: pairing {}", rational_to_string(&p)));
        }
    }
    emit("L2", "unit-pairing-on-type1", c2);

    let mut c3 = Vec::new();
    for v in t.ids() {
        if matches!(ta.get(v), Some(CurveType::Type3) | Some(CurveType::Type4))
            && !l.coeff(v).is_zero()
        {
            c3.push(format!("vertex {v}: {}", rational_to_string(&l.coeff(v))));
        }
    }
    emit("L3", "zero-on-type3-and-type4", c3);

    let mut c4 = Vec::new();
    for v in ta.vertices_of(CurveType::Type2) {
        let p = pair_or_input(t, l, v)?;
        if !p.is_zero() {
            c4.push(format!("vertex {v}: pairing {}", rational_to_string(&p)));
        }
    }
    emit("L4", "zero-pairing-on-type2", c4);
    Ok(())
}

fn audit_delta(
    t: &CurveTree,
    ta: &TypeAssignment,
    l: &DivisorClass,
    d: &DivisorClass,
    emit: &mut impl FnMut(&str, &str, Vec<String>),
) -> Result<(), Failure> {
    for (v, _) in d.support() {
        if v.index() >= t.len() {
            return Err(Failure::input(format!("Delta names unknown vertex {v}")));
        }
    }
    let mut c1 = Vec::new();
    for v in t.ids() {
        let coeff = d.coeff(v);
        match ta.get(v) {
            Some(CurveType::Type2) => {
                if !(coeff.is_integer() && coeff.is_positive()) {
                    c1.push(format!(
                        "vertex {v}: {} is not a positive integer",
                        rational_to_string(&coeff)
                    ));
                }
            }
            _ => {
                if !coeff.is_zero() {
                    c1.push(format!("vertex {v}: nonzero off type 2"));
                }
            }
        }
    }
    emit("D1", "positive-integers-on-type2-only", c1);

    let mut c2 = Vec::new();
    for v in ta.vertices_of(CurveType::Type2) {
        let p = pair_or_input(t, d, v)?;
        if p.is_positive() {
            c2.push(format!("vertex {v}: pairing {}", rational_to_string(&p)));
        }
    }
    emit("D2", "nonpositive-pairing-on-type2", c2);

    let mut c3 = Vec::new();
    for v in ta.vertices_of(CurveType::Type1) {
        let p = pair_or_input(t, d, v)?;
        if !p.is_one() {
            c3.push(format!("vertex {v}: pairing {}", rational_to_string(&p)));
        }
    }
    emit("D3", "unit-pairing-on-type1", c3);

    let mut c4 = Vec::new();
    for v in ta.vertices_of(CurveType::Type3) {
        let pd = pair_or_input(t, d, v)?;
        let pl = pair_or_input(t, l, v)?;
        if pd > pl {
            c4.push(format!(
                "vertex {v}: {} exceeds {}",
                rational_to_string(&pd),
                rational_to_string(&pl)
            ));
        }
    }
    emit("D4", "pairing-at-most-L-on-type3", c4);

    let slope_fail = if has_slope_local_minimum(t, ta, l, d) {
        vec!["a type-2 vertex is a strict local minimum of the slope".to_string()]
    } else {
        Vec::new()
    };
    emit("SLOPE", "no-local-minimum", slope_fail);
    Ok(())
}
