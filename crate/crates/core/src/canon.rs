//! Canonical byte codes for rooted labeled trees.
//!
//! The code of a tree is the code of its origin: `(kbar self_int` followed
//! by the codes of the children sorted as byte strings, then `)`. Two trees
//! get equal codes exactly when a label- and root-preserving isomorphism
//! exists between them, so the code doubles as a hash key for memoization
//! and as the deduplication key of the search.
//!
//! Codes are assembled bottom-up in a single byte arena (children carry
//! smaller BFS indices than their parents when visited in reverse), so a
//! key costs a handful of allocations rather than one per vertex. The
//! enumeration computes one key per generated child, which makes this the
//! hottest path of a deep search.

use std::io::Write;

use crate::graph::{CurveTree, VertexId};

/// Isomorphism-invariant encoding of `t`, rooted at its origin.
pub fn canonical_code(t: &CurveTree) -> Vec<u8> {
    let n = t.len();
    // flat adjacency
    let mut degree = vec![0u32; n];
    for &(a, b) in t.edges() {
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }
    let mut offset = vec![0u32; n + 1];
    for i in 0..n {
        offset[i + 1] = offset[i] + degree[i];
    }
    let mut flat = vec![0u32; offset[n] as usize];
    let mut cursor = offset.clone();
    for &(a, b) in t.edges() {
        flat[cursor[a as usize] as usize] = b;
        cursor[a as usize] += 1;
        flat[cursor[b as usize] as usize] = a;
        cursor[b as usize] += 1;
    }

    // BFS from the origin; children always appear after their parent
    let root = t.origin().0;
    const NONE: u32 = u32::MAX;
    let mut parent = vec![NONE; n];
    let mut order = Vec::with_capacity(n);
    order.push(root);
    parent[root as usize] = root;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in &flat[offset[u as usize] as usize..offset[u as usize + 1] as usize] {
            if parent[w as usize] == NONE {
                parent[w as usize] = u;
                order.push(w);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "tree is connected");

    // assemble codes children-first; spans index into one arena
    let mut arena: Vec<u8> = Vec::with_capacity(n * 16);
    let mut span = vec![(0u32, 0u32); n];
    let mut kids: Vec<u32> = Vec::new();
    for &v in order.iter().rev() {
        kids.clear();
        kids.extend(
            flat[offset[v as usize] as usize..offset[v as usize + 1] as usize]
                .iter()
                .copied()
                .filter(|&w| parent[w as usize] == v && w != v),
        );
        kids.sort_unstable_by(|&a, &b| {
            let (sa, la) = span[a as usize];
            let (sb, lb) = span[b as usize];
            arena[sa as usize..(sa + la) as usize].cmp(&arena[sb as usize..(sb + lb) as usize])
        });
        let start = arena.len();
        arena.push(b'(');
        write!(arena, "{} {}", t.kbar(VertexId(v)), t.self_int(VertexId(v))).expect("vec write");
        for &w in &kids {
            let (s, l) = span[w as usize];
            arena.extend_from_within(s as usize..(s + l) as usize);
        }
        arena.push(b')');
        span[v as usize] = (start as u32, (arena.len() - start) as u32);
    }

    let (s, l) = span[root as usize];
    arena[s as usize..(s + l) as usize].to_vec()
}
