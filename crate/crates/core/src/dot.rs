//! Graphviz DOT rendering of trees and solved candidates.
//!
//! Vertex labels read `id: kbar/self_int` with the curve type appended when
//! a typing is supplied; `L` and `Delta` coefficients appear as secondary
//! label lines when present.

use std::fmt::Write;

use crate::graph::CurveTree;
use crate::lattice::{rational_to_string, DivisorClass};
use crate::typing::TypeAssignment;

pub fn tree_to_dot(
    t: &CurveTree,
    types: Option<&TypeAssignment>,
    l: Option<&DivisorClass>,
    delta: Option<&DivisorClass>,
) -> String {
    let mut out = String::from("graph curvetree {\n  node [shape=circle];\n");
    for v in t.vertices() {
        let mut label = format!("{}: {}/{}", v.id, v.kbar, v.self_int);
        if let Some(ta) = types {
            if let Some(ty) = ta.get(v.id) {
                write!(label, "/{ty}").unwrap();
            }
        }
        let mut extras = Vec::new();
        if let Some(l) = l {
            extras.push(format!("L={}", rational_to_string(&l.coeff(v.id))));
        }
        if let Some(d) = delta {
            extras.push(format!("d={}", rational_to_string(&d.coeff(v.id))));
        }
        if !extras.is_empty() {
            write!(label, "\\n{}", extras.join(" ")).unwrap();
        }
        let shape = if v.is_origin { " penwidth=2" } else { "" };
        writeln!(out, "  v{} [label=\"{}\"{}];", v.id, label, shape).unwrap();
    }
    for &(a, b) in t.edges() {
        writeln!(out, "  v{a} -- v{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;
    use crate::script::BlowupScript;

    #[test]
    fn renders_tree_and_layers() {
        let t = BlowupScript::section2_example().replay().unwrap();
        let dot = tree_to_dot(&t, None, None, None);
        assert!(dot.starts_with("graph curvetree {"));
        assert!(dot.contains("v0 [label=\"0: -2/-1\" penwidth=2];"));
        assert!(dot.contains("v1 [label=\"1: -1/-2\"];"));
        assert!(dot.contains("v0 -- v1;"));
        assert!(dot.ends_with("}\n"));
        assert_eq!(dot.matches(" -- ").count(), t.edges().len());

        let l = DivisorClass::from_integers([(VertexId(0), 3)]);
        let dot = tree_to_dot(&t, None, Some(&l), None);
        assert!(dot.contains("L=3"));
        assert!(dot.contains("L=0"));
    }
}
