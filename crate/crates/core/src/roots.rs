//! Composite roots: generation, edge classification and interaction
//! exponents.
//!
//! A rooted dissection is handled here as a tree of faces. Each node has
//! one slot per non-parent edge, in counterclockwise boundary order; an
//! empty slot is an outer edge. The tree and the chord-list form are in
//! bijection and both preserve literal (mirror-distinguishing) equality.

use crate::dissection::{glue, Dissection};
use crate::occurrence::occurrence_vector;
use crate::pattern::PatternSet;
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use thiserror::Error;

pub const DEFAULT_H_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("largest pattern has {0} vertices, above the generation cap {1}")]
    CapExceeded(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Full,
    Avoiding,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceTree {
    pub size: usize,
    pub children: Vec<Option<FaceTree>>,
}

impl FaceTree {
    pub fn polygon(size: usize) -> Self {
        FaceTree { size, children: vec![None; size - 1] }
    }

    pub fn face_count(&self) -> usize {
        1 + self.children.iter().flatten().map(FaceTree::face_count).sum::<usize>()
    }

    /// Vertices strictly between the endpoints of the parent edge.
    fn interior(&self) -> usize {
        self.size - 2 + self.children.iter().flatten().map(FaceTree::interior).sum::<usize>()
    }

    pub fn vertex_count(&self) -> usize {
        self.interior() + 2
    }

    pub fn to_dissection(&self) -> Dissection {
        fn expand(t: &FaceTree, x: usize, y: usize, mut lab: usize, chords: &mut Vec<(usize, usize)>) {
            let mut prev = x;
            let k = t.size;
            for i in 0..k - 1 {
                let inner = t.children[i].as_ref().map_or(0, FaceTree::interior);
                let next = if i == k - 2 { y } else { lab + inner };
                if let Some(c) = &t.children[i] {
                    chords.push((prev.min(next), prev.max(next)));
                    expand(c, prev, next, lab, chords);
                }
                lab += inner;
                if i != k - 2 {
                    lab += 1;
                }
                prev = next;
            }
        }
        let mut chords = Vec::new();
        expand(self, 2, 1, 3, &mut chords);
        chords.sort_unstable();
        Dissection::from_sorted_unchecked(self.vertex_count(), chords)
    }

    /// Face tree of a dissection with `n ≥ 3`.
    pub fn from_dissection(d: &Dissection) -> FaceTree {
        let fs = d.faces();
        let n = d.n();
        let order = |v: usize| if v == 1 { n + 1 } else { v };
        fn build(
            fs: &crate::dissection::FaceStructure,
            f: usize,
            parent: Option<usize>,
            order: &dyn Fn(usize) -> usize,
        ) -> FaceTree {
            let mut vs = fs.faces[f].vertices.clone();
            vs.sort_by_key(|&v| order(v));
            let children = vs
                .windows(2)
                .map(|w| {
                    let e = (w[0].min(w[1]), w[0].max(w[1]));
                    fs.neighbors(f)
                        .iter()
                        .find(|&&(g, c)| c == e && Some(g) != parent)
                        .map(|&(g, _)| build(fs, g, Some(f), order))
                })
                .collect();
            FaceTree { size: vs.len(), children }
        }
        build(&fs, fs.root, None, &order)
    }

    /// Preorder size sequence with 0 for empty slots.
    pub fn encoding(&self) -> Vec<u8> {
        let mut out = vec![self.size as u8];
        for c in &self.children {
            match c {
                Some(t) => out.extend(t.encoding()),
                None => out.push(0),
            }
        }
        out
    }

    fn face_sizes(&self, out: &mut Vec<usize>) {
        out.push(self.size);
        for c in self.children.iter().flatten() {
            c.face_sizes(out);
        }
    }

    /// Empty slots in boundary order, each with the path of child indices
    /// to its node.
    pub fn slots(&self) -> Vec<Slot> {
        fn walk(t: &FaceTree, path: &mut Vec<usize>, pc: usize, sizes: &mut Vec<usize>, out: &mut Vec<Slot>) {
            sizes.push(t.size);
            for (i, c) in t.children.iter().enumerate() {
                match c {
                    Some(ch) => {
                        path.push(i);
                        walk(ch, path, pc + ch.size - 2, sizes, out);
                        path.pop();
                    }
                    None => out.push(Slot {
                        node_path: path.clone(),
                        slot: i,
                        face_size: t.size,
                        path_count: pc,
                        path_sizes: sizes.clone(),
                    }),
                }
            }
            sizes.pop();
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), self.size, &mut Vec::new(), &mut out);
        out
    }

    fn node_mut(&mut self, path: &[usize]) -> &mut FaceTree {
        let mut t = self;
        for &i in path {
            t = t.children[i].as_mut().expect("path follows existing children");
        }
        t
    }

    pub fn with_attached(&self, slot: &Slot, sub: FaceTree) -> FaceTree {
        let mut t = self.clone();
        let node = t.node_mut(&slot.node_path);
        debug_assert!(node.children[slot.slot].is_none());
        node.children[slot.slot] = Some(sub);
        t
    }

    /// Composite-root test on the tree form: small faces only, and every
    /// face with children is reached from the root by a face path of fewer
    /// than `h` vertices.
    pub fn is_composite(&self, h: usize) -> bool {
        fn ok(t: &FaceTree, pc: usize, h: usize) -> bool {
            if t.size > h {
                return false;
            }
            let has_children = t.children.iter().any(Option::is_some);
            if has_children && pc >= h {
                return false;
            }
            t.children.iter().flatten().all(|c| ok(c, pc + c.size - 2, h))
        }
        ok(self, self.size, h)
    }

    /// Faces whose root path has at most `limit` vertices; `None` when the
    /// root face alone exceeds it.
    pub fn truncate(&self, limit: usize) -> Option<FaceTree> {
        fn cut(t: &FaceTree, pc: usize, limit: usize) -> FaceTree {
            let children = t
                .children
                .iter()
                .map(|c| {
                    c.as_ref()
                        .filter(|c| pc + c.size - 2 <= limit)
                        .map(|c| cut(c, pc + c.size - 2, limit))
                })
                .collect();
            FaceTree { size: t.size, children }
        }
        (self.size <= limit).then(|| cut(self, self.size, limit))
    }

    /// Maximal composite root contained in this tree, or `None` when the
    /// root face is big.
    pub fn maximal_root(&self, h: usize) -> Option<FaceTree> {
        fn cut(t: &FaceTree, pc: usize, h: usize) -> FaceTree {
            let children = t
                .children
                .iter()
                .map(|c| {
                    c.as_ref()
                        .filter(|c| pc < h && c.size <= h)
                        .map(|c| cut(c, pc + c.size - 2, h))
                })
                .collect();
            FaceTree { size: t.size, children }
        }
        (self.size <= h).then(|| cut(self, self.size, h))
    }

    /// True when `self` is obtained from `base` by filling empty slots.
    pub fn extends(&self, base: &FaceTree) -> bool {
        self.size == base.size
            && self.children.iter().zip(&base.children).all(|(a, b)| match (a, b) {
                (_, None) => true,
                (Some(x), Some(y)) => x.extends(y),
                (None, Some(_)) => false,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub node_path: Vec<usize>,
    pub slot: usize,
    /// Size of the face holding this outer edge.
    pub face_size: usize,
    /// Vertex count of the face path from the root to that face.
    pub path_count: usize,
    path_sizes: Vec<usize>,
}

impl Slot {
    /// Vertex count of the union of faces on the dual path between the
    /// faces of two slots.
    pub fn path_count_between(&self, other: &Slot) -> usize {
        let common = self
            .node_path
            .iter()
            .zip(&other.node_path)
            .take_while(|(a, b)| a == b)
            .count();
        // faces from the common ancestor down to each slot face
        let a = &self.path_sizes[common..];
        let b = &other.path_sizes[common + 1..];
        let faces: Vec<usize> = a.iter().chain(b).copied().collect();
        faces.iter().sum::<usize>() - 2 * (faces.len() - 1)
    }
}

/// Literal composite-root predicate on a dissection: all faces have at
/// most `h` vertices, and for every face touching the outer face and every
/// chord on it, the face path from the root face to the chord's near-side
/// face has fewer than `h` vertices.
pub fn is_composite_root(d: &Dissection, h: usize) -> bool {
    if d.n() < 3 {
        return false;
    }
    let fs = d.faces();
    if fs.faces.iter().any(|f| f.size() > h) {
        return false;
    }
    let parent = fs.parents();
    let depth_count: Vec<usize> = (0..fs.faces.len()).map(|f| fs.path_vertex_count(f)).collect();
    let sides: HashSet<(usize, usize)> = d.edges().into_iter().filter(|e| !d.chords().contains(e)).collect();
    for (f, face) in fs.faces.iter().enumerate() {
        if !face.edges().any(|e| sides.contains(&e)) {
            continue;
        }
        for &(g, _) in fs.neighbors(f) {
            let near = if parent[g] == Some(f) { f } else { g };
            if depth_count[near] >= h {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeClass {
    Free,
    Restricted,
}

#[derive(Debug, Clone)]
pub struct CompositeRootInfo {
    pub tree: FaceTree,
    pub root: Dissection,
    /// (root polygon size, 1-based ordinal among roots of that size).
    pub index: (usize, usize),
    pub outer_edges: Vec<(usize, usize)>,
    pub slots: Vec<Slot>,
    pub edge_class: Vec<EdgeClass>,
    pub maximal: bool,
    pub base_occurrences: Vec<u32>,
}

impl CompositeRootInfo {
    pub fn label(&self) -> String {
        format!("{}[{}]", self.index.0, self.index.1)
    }

    pub fn free_slots(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&i| self.edge_class[i] == EdgeClass::Free).collect()
    }

    pub fn restricted_count(&self) -> usize {
        self.edge_class.iter().filter(|&&c| c == EdgeClass::Restricted).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "index": self.label(),
            "n": self.root.n(),
            "chords": self.root.chords(),
            "outer_edges": self.outer_edges,
            "edge_classes": self.edge_class,
            "maximal": self.maximal,
            "base_occurrences": self.base_occurrences,
        })
    }
}

/// Restricted iff some small polygon glued at the edge keeps the composite
/// root property.
pub fn classify_edges(root: &Dissection, h: usize) -> Vec<EdgeClass> {
    root.outer_edges()
        .into_iter()
        .map(|e| {
            let grows = (3..=h).any(|k| {
                let g = glue(root, e, &Dissection::polygon(k)).expect("outer edge");
                is_composite_root(&g, h)
            });
            if grows {
                EdgeClass::Restricted
            } else {
                EdgeClass::Free
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RootCatalog {
    pub patterns: PatternSet,
    pub mode: Mode,
    pub h: usize,
    pub roots: Vec<CompositeRootInfo>,
}

impl RootCatalog {
    pub fn position(&self, tree: &FaceTree) -> Option<usize> {
        self.roots.iter().position(|r| &r.tree == tree)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "patterns": self.patterns.label(),
            "mode": self.mode,
            "h": self.h,
            "roots": self.roots.iter().map(CompositeRootInfo::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Breadth-first generation of all composite roots. Roots are ordered by
/// root polygon size, then largest non-root face, then face count, then
/// by the number of faces of that largest size (descending) and finally by
/// preorder encoding.
pub fn generate_composite_roots(set: &PatternSet, mode: Mode, cap: usize) -> Result<RootCatalog, RootError> {
    let h = set.h();
    if h > cap {
        return Err(RootError::CapExceeded(h, cap));
    }
    let mut seen: HashSet<FaceTree> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut found = Vec::new();
    for k in 3..=h {
        let t = FaceTree::polygon(k);
        seen.insert(t.clone());
        queue.push_back(t);
    }
    while let Some(t) = queue.pop_front() {
        let occ = occurrence_vector(&t.to_dissection(), set);
        if mode == Mode::Avoiding && occ.iter().any(|&c| c > 0) {
            continue;
        }
        for s in t.slots() {
            if s.path_count >= h {
                continue;
            }
            for k in 3..=h {
                let next = t.with_attached(&s, FaceTree::polygon(k));
                if next.is_composite(h) && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        found.push((t, occ));
    }
    let key = |t: &FaceTree| {
        let mut sizes = Vec::new();
        t.face_sizes(&mut sizes);
        let rest = &sizes[1..];
        let big = rest.iter().copied().max().unwrap_or(0);
        let nbig = rest.iter().filter(|&&s| s == big).count();
        (t.size, big, sizes.len(), std::cmp::Reverse(nbig), t.encoding())
    };
    found.sort_by_key(|(t, _)| key(t));
    let mut roots = Vec::with_capacity(found.len());
    let mut ordinal = 0;
    let mut last_size = 0;
    for (tree, occ) in found {
        if tree.size != last_size {
            last_size = tree.size;
            ordinal = 0;
        }
        ordinal += 1;
        let root = tree.to_dissection();
        let slots = tree.slots();
        let edge_class = classify_edges(&root, h);
        let maximal = edge_class.iter().all(|&c| c == EdgeClass::Free);
        roots.push(CompositeRootInfo {
            outer_edges: root.outer_edges(),
            index: (tree.size, ordinal),
            tree,
            root,
            slots,
            edge_class,
            maximal,
            base_occurrences: occ,
        });
    }
    Ok(RootCatalog { patterns: set.clone(), mode, h, roots })
}

/// What is glued onto an outer edge of a composite root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attach {
    Circ,
    Root(usize),
}

/// Exponents `p_i = count(assembled, δ_i) − Σ_t χ_i(rep_t)` for arbitrary
/// attachments on any outer edges of root `j`; unlisted edges stay bare.
pub fn exponents_with(catalog: &RootCatalog, j: usize, attach: &[(usize, &FaceTree)]) -> Vec<i64> {
    let nu = &catalog.roots[j];
    let mut t = nu.tree.clone();
    let mut sub = vec![0i64; catalog.patterns.len()];
    // fill from the last slot so earlier slot paths stay valid
    let mut order: Vec<_> = attach.to_vec();
    order.sort_by_key(|&(s, _)| std::cmp::Reverse(s));
    for (s, rep) in order {
        t = t.with_attached(&nu.slots[s], rep.clone());
        for (i, c) in occurrence_vector(&rep.to_dissection(), &catalog.patterns).into_iter().enumerate() {
            sub[i] += c as i64;
        }
    }
    let total = occurrence_vector(&t.to_dissection(), &catalog.patterns);
    total.iter().zip(sub).map(|(&a, b)| a as i64 - b).collect()
}

/// Exponents for an assignment of classes to the Free edges of root `j`
/// (in boundary order), using the bare roots as representatives.
pub fn interaction_exponents(catalog: &RootCatalog, j: usize, assignment: &[Attach]) -> Vec<i64> {
    let free = catalog.roots[j].free_slots();
    assert_eq!(free.len(), assignment.len(), "one class per Free edge");
    let attach: Vec<(usize, &FaceTree)> = free
        .iter()
        .zip(assignment)
        .filter_map(|(&s, a)| match a {
            Attach::Circ => None,
            Attach::Root(k) => Some((s, &catalog.roots[*k].tree)),
        })
        .collect();
    exponents_with(catalog, j, &attach)
}

/// Möbius terms of the exponent over subsets of the attached edges: each
/// entry is (slot indices, term). Subsets larger than `h − 2` carry no
/// interaction and are omitted.
pub fn interaction_decomposition(
    catalog: &RootCatalog,
    j: usize,
    attach: &[(usize, &FaceTree)],
) -> Vec<(Vec<usize>, Vec<i64>)> {
    let m = attach.len();
    let max = catalog.h.saturating_sub(2);
    let mut f = std::collections::HashMap::new();
    let subsets: Vec<u64> = (0u64..(1 << m)).filter(|s| s.count_ones() as usize <= max).collect();
    for &s in &subsets {
        let part: Vec<_> = (0..m).filter(|i| s >> i & 1 == 1).map(|i| attach[i]).collect();
        f.insert(s, exponents_with(catalog, j, &part));
    }
    let mut out = Vec::new();
    for &s in &subsets {
        let mut term = vec![0i64; catalog.patterns.len()];
        let mut t = s;
        loop {
            let sign = if (s & !t).count_ones() % 2 == 0 { 1 } else { -1 };
            for (x, y) in term.iter_mut().zip(&f[&t]) {
                *x += sign * y;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        let edges = (0..m).filter(|i| s >> i & 1 == 1).map(|i| attach[i].0).collect();
        out.push((edges, term));
    }
    out
}

/// Classifies a rooted dissection by its maximal composite root: `None`
/// for the big-root class, otherwise the index into the catalog.
pub fn classify_dissection(catalog: &RootCatalog, d: &Dissection) -> Option<usize> {
    if d.n() < 3 {
        return None;
    }
    let t = FaceTree::from_dissection(d);
    let nu = t.maximal_root(catalog.h)?;
    Some(catalog.position(&nu).expect("maximal root is generated"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissection::enumerate_dissections;

    fn set(names: &[&str]) -> PatternSet {
        PatternSet::from_names(names).unwrap()
    }

    #[test]
    fn tree_roundtrip() {
        for n in 3..=8 {
            for d in enumerate_dissections(n) {
                let t = FaceTree::from_dissection(&d);
                assert_eq!(t.to_dissection(), d);
                assert_eq!(t.face_count(), d.face_count());
            }
        }
    }

    #[test]
    fn predicate_examples() {
        let tri = Dissection::polygon(3);
        assert!(is_composite_root(&tri, 4));
        assert!(is_composite_root(&Dissection::new(4, &[(1, 3)]).unwrap(), 4));
        assert!(!is_composite_root(&Dissection::new(5, &[(1, 3), (1, 4)]).unwrap(), 4));
        let sq_tri = glue(&Dissection::polygon(4), (2, 3), &tri).unwrap();
        assert!(!is_composite_root(&sq_tri, 4));
        assert!(is_composite_root(&Dissection::polygon(4), 4));
    }

    #[test]
    fn tree_predicate_matches_literal() {
        for h in 3..=6 {
            for n in 3..=9 {
                for d in enumerate_dissections(n) {
                    let t = FaceTree::from_dissection(&d);
                    assert_eq!(t.is_composite(h), is_composite_root(&d, h), "{d} h={h}");
                }
            }
        }
    }

    #[test]
    fn root_counts() {
        let c4 = generate_composite_roots(&set(&["C4"]), Mode::Full, 6).unwrap();
        assert_eq!(c4.roots.len(), 10);
        assert_eq!(c4.roots.iter().filter(|r| r.index.0 == 3).count(), 9);
        let c5 = generate_composite_roots(&set(&["C5"]), Mode::Avoiding, 6).unwrap();
        assert_eq!(c5.roots.len(), 11);
        let c3 = generate_composite_roots(&set(&["C3"]), Mode::Full, 6).unwrap();
        assert_eq!(c3.roots.len(), 1);
        assert_eq!(
            generate_composite_roots(&set(&["C7"]), Mode::Full, 6).unwrap_err(),
            RootError::CapExceeded(7, 6)
        );
    }

    #[test]
    fn edge_classes() {
        let c4 = generate_composite_roots(&set(&["C4"]), Mode::Full, 6).unwrap();
        let r31 = &c4.roots[0];
        assert_eq!(r31.label(), "3[1]");
        assert_eq!(r31.edge_class, vec![EdgeClass::Restricted; 2]);
        let r41 = c4.roots.iter().find(|r| r.label() == "4[1]").unwrap();
        assert_eq!(r41.edge_class, vec![EdgeClass::Free; 3]);
        let c6 = generate_composite_roots(&set(&["C6"]), Mode::Avoiding, 6).unwrap();
        let ts = c6
            .roots
            .iter()
            .find(|r| r.tree.size == 3 && r.tree.face_count() == 2 && r.tree.children[1].as_ref().is_some_and(|c| c.size == 4))
            .unwrap();
        // the square is reached by a 5-vertex path, so a glued polygon keeps
        // the root composite and all four edges are Restricted
        assert_eq!(ts.restricted_count(), 4);
        let c4 = generate_composite_roots(&set(&["C4"]), Mode::Full, 6).unwrap();
        let ts = c4.roots.iter().find(|r| r.label() == "3[5]").unwrap();
        let free = ts.edge_class.iter().filter(|&&c| c == EdgeClass::Free).count();
        assert_eq!((free, ts.restricted_count()), (3, 1));
    }

    #[test]
    fn maximality_is_non_extendability() {
        for names in [["C4"], ["C5"], ["patternI"]] {
            for mode in [Mode::Full, Mode::Avoiding] {
                let cat = generate_composite_roots(&set(&names), mode, 6).unwrap();
                for a in &cat.roots {
                    let extended = cat.roots.iter().any(|b| b.tree != a.tree && b.tree.extends(&a.tree));
                    if mode == Mode::Full {
                        assert_eq!(a.maximal, !extended, "{}", a.label());
                    } else if !a.maximal {
                        // in avoiding mode extensions may be pruned, but never the reverse
                        assert!(a.restricted_count() > 0);
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_examples() {
        let c3 = generate_composite_roots(&set(&["C3"]), Mode::Full, 6).unwrap();
        assert_eq!(interaction_exponents(&c3, 0, &[Attach::Circ, Attach::Circ]), vec![1]);
        let c4 = generate_composite_roots(&set(&["C4"]), Mode::Full, 6).unwrap();
        assert_eq!(interaction_exponents(&c4, 0, &[]), vec![0]);
        let c5 = generate_composite_roots(&set(&["C5"]), Mode::Full, 6).unwrap();
        let tri = &c5.roots[0].tree;
        assert_eq!(exponents_with(&c5, 0, &[(0, tri), (1, tri)]), vec![1]);
        let dec = interaction_decomposition(&c5, 0, &[(0, tri), (1, tri)]);
        let pair = dec.iter().find(|(e, _)| e.len() == 2).unwrap();
        assert_eq!(pair.1, vec![1]);
        assert!(dec.iter().filter(|(e, _)| e.len() == 1).all(|(_, t)| t == &vec![0]));
        assert_eq!(dec.iter().find(|(e, _)| e.is_empty()).unwrap().1, vec![0]);
    }

    #[test]
    fn partition_by_maximal_root() {
        for name in ["C3", "C4"] {
            let cat = generate_composite_roots(&set(&[name]), Mode::Full, 6).unwrap();
            for n in 3..=8 {
                for d in enumerate_dissections(n) {
                    if let Some(j) = classify_dissection(&cat, &d) {
                        assert!(FaceTree::from_dissection(&d).extends(&cat.roots[j].tree));
                    }
                }
            }
        }
    }
}
