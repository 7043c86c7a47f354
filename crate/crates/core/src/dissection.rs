//! Rooted polygon dissections: validation, faces and the dual tree,
//! exhaustive generation and gluing.
//!
//! Vertices are labelled `1..=n` counterclockwise and the root edge is
//! always `{1, 2}`. A single edge (`n = 2`) is a valid object with no faces.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DissectionError {
    #[error("vertex count {0} is below 2")]
    TooSmall(usize),
    #[error("pair ({0},{1}) is out of range or is a polygon side")]
    OutOfRange(usize, usize),
    #[error("chord ({0},{1}) is listed twice")]
    DuplicateChord(usize, usize),
    #[error("chords ({0},{1}) and ({2},{3}) cross")]
    CrossingChords(usize, usize, usize, usize),
    #[error("edge ({0},{1}) is not an outer edge")]
    NotOuterEdge(usize, usize),
    #[error("cannot glue onto the root edge")]
    RootEdgeGlue,
}

/// A rooted dissection. Chords are stored normalized `(a, b)` with `a < b`
/// and sorted lexicographically, so derived equality is literal equality of
/// rooted objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dissection {
    n: usize,
    chords: Vec<(usize, usize)>,
}

fn crosses(a: (usize, usize), b: (usize, usize)) -> bool {
    let (p, q) = if a < b { (a, b) } else { (b, a) };
    p.0 < q.0 && q.0 < p.1 && p.1 < q.1
}

impl Dissection {
    pub fn new(n: usize, chords: &[(usize, usize)]) -> Result<Self, DissectionError> {
        if n < 2 {
            return Err(DissectionError::TooSmall(n));
        }
        let mut norm = Vec::with_capacity(chords.len());
        for &(x, y) in chords {
            let (a, b) = if x < y { (x, y) } else { (y, x) };
            if a < 1 || b > n || b - a < 2 || (a == 1 && b == n) {
                return Err(DissectionError::OutOfRange(x, y));
            }
            norm.push((a, b));
        }
        norm.sort_unstable();
        for w in norm.windows(2) {
            if w[0] == w[1] {
                return Err(DissectionError::DuplicateChord(w[0].0, w[0].1));
            }
        }
        for i in 0..norm.len() {
            for j in i + 1..norm.len() {
                if crosses(norm[i], norm[j]) {
                    let (a, b) = (norm[i], norm[j]);
                    return Err(DissectionError::CrossingChords(a.0, a.1, b.0, b.1));
                }
            }
        }
        Ok(Dissection { n, chords: norm })
    }

    /// Builds without validation; callers guarantee a sorted, valid chord set.
    pub(crate) fn from_sorted_unchecked(n: usize, chords: Vec<(usize, usize)>) -> Self {
        debug_assert!(Dissection::new(n, &chords).is_ok());
        Dissection { n, chords }
    }

    pub fn polygon(n: usize) -> Self {
        assert!(n >= 2);
        Dissection { n, chords: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chords(&self) -> &[(usize, usize)] {
        &self.chords
    }

    /// Size in the rooted series, which omits one root vertex.
    pub fn series_size(&self) -> usize {
        self.n - 1
    }

    pub fn face_count(&self) -> usize {
        if self.n < 3 {
            0
        } else {
            self.chords.len() + 1
        }
    }

    /// Outer edges other than the root, in boundary order
    /// `(2,3), (3,4), ..., (n-1,n), (n,1)`.
    pub fn outer_edges(&self) -> Vec<(usize, usize)> {
        if self.n < 3 {
            return Vec::new();
        }
        let mut e: Vec<_> = (2..self.n).map(|i| (i, i + 1)).collect();
        e.push((self.n, 1));
        e
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if b - a == 1 || (a == 1 && b == self.n) {
            return b <= self.n && a >= 1;
        }
        self.chords.binary_search(&(a, b)).is_ok()
    }

    /// All edges (sides and chords) as normalized pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = (1..self.n).map(|i| (i, i + 1)).collect();
        if self.n >= 3 {
            e.push((1, self.n));
        }
        e.extend_from_slice(&self.chords);
        e
    }

    pub fn faces(&self) -> FaceStructure {
        FaceStructure::of(self)
    }

    /// Relabels vertices by `v -> ((v - 1 + shift) mod n) + 1`, optionally
    /// reflected first. The result is a new rooted object.
    pub fn relabel(&self, shift: usize, reflect: bool) -> Dissection {
        let n = self.n;
        let map = |v: usize| {
            let base = if reflect { (n - (v - 1)) % n } else { v - 1 };
            (base + shift) % n + 1
        };
        let chords: Vec<_> = self.chords.iter().map(|&(a, b)| (map(a), map(b))).collect();
        Dissection::new(n, &chords).expect("relabelling preserves validity")
    }
}

impl fmt::Display for Dissection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, [", self.n)?;
        for (i, (a, b)) in self.chords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "])")
    }
}

/// An internal face; vertices are increasing, which is also their cyclic
/// counterclockwise order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Face {
    pub vertices: Vec<usize>,
}

impl Face {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % k];
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    pub chord: (usize, usize),
}

/// Faces plus the dual tree. `root` is the face holding the root edge.
#[derive(Debug, Clone)]
pub struct FaceStructure {
    pub faces: Vec<Face>,
    pub dual: Vec<DualEdge>,
    pub root: usize,
    adj: Vec<Vec<(usize, (usize, usize))>>,
}

impl FaceStructure {
    fn of(d: &Dissection) -> Self {
        let mut faces = Vec::new();
        if d.n >= 3 {
            let mut stack = vec![(1..=d.n).collect::<Vec<_>>()];
            while let Some(poly) = stack.pop() {
                let pos = |v: usize| poly.binary_search(&v).ok();
                let split = d.chords.iter().find_map(|&(a, b)| match (pos(a), pos(b)) {
                    (Some(i), Some(j)) if j - i >= 2 && !(i == 0 && j == poly.len() - 1) => {
                        Some((i, j))
                    }
                    _ => None,
                });
                match split {
                    Some((i, j)) => {
                        let inner = poly[i..=j].to_vec();
                        let mut outer = poly[..=i].to_vec();
                        outer.extend_from_slice(&poly[j..]);
                        stack.push(outer);
                        stack.push(inner);
                    }
                    None => faces.push(Face { vertices: poly }),
                }
            }
            faces.sort_by(|x, y| x.vertices.cmp(&y.vertices));
        }
        let mut dual = Vec::new();
        let mut adj = vec![Vec::new(); faces.len()];
        for &c in &d.chords {
            let inc: Vec<usize> = (0..faces.len())
                .filter(|&f| faces[f].edges().any(|e| e == c))
                .collect();
            debug_assert_eq!(inc.len(), 2);
            adj[inc[0]].push((inc[1], c));
            adj[inc[1]].push((inc[0], c));
            dual.push(DualEdge { a: inc[0], b: inc[1], chord: c });
        }
        let root = faces
            .iter()
            .position(|f| f.vertices[0] == 1 && f.vertices[1] == 2)
            .unwrap_or(0);
        FaceStructure { faces, dual, root, adj }
    }

    pub fn neighbors(&self, f: usize) -> &[(usize, (usize, usize))] {
        &self.adj[f]
    }

    /// Parent of every face when the dual tree is rooted at the root face.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.faces.len()];
        if self.faces.is_empty() {
            return parent;
        }
        let mut seen = vec![false; self.faces.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(f) = stack.pop() {
            for &(g, _) in &self.adj[f] {
                if !seen[g] {
                    seen[g] = true;
                    parent[g] = Some(f);
                    stack.push(g);
                }
            }
        }
        parent
    }

    /// Vertex count of the union of faces on the dual path from the root
    /// face to `f` (both included).
    pub fn path_vertex_count(&self, f: usize) -> usize {
        let parent = self.parents();
        let mut total = self.faces[f].size();
        let mut cur = f;
        while let Some(p) = parent[cur] {
            total += self.faces[p].size() - 2;
            cur = p;
        }
        total
    }

    pub fn is_tree(&self) -> bool {
        if self.faces.is_empty() {
            return true;
        }
        if self.dual.len() + 1 != self.faces.len() {
            return false;
        }
        self.parents().iter().filter(|p| p.is_none()).count() == 1
    }
}

/// Calls `f` on every dissection of the `n`-gon exactly once, in a fixed
/// order: the root face is chosen first, then the polygons cut off by it
/// are filled recursively.
pub fn for_each_dissection<F: FnMut(&Dissection)>(n: usize, mut f: F) {
    assert!(n >= 2);
    if n == 2 {
        f(&Dissection::polygon(2));
        return;
    }
    let mut boundary: Vec<usize> = (2..=n).collect();
    boundary.push(1);
    let mut pending = vec![boundary];
    let mut chords = Vec::new();
    fill(n, &mut pending, &mut chords, &mut f);
}

/// The top-level root-face choices; each shard enumerates a disjoint part
/// of the dissections of the `n`-gon.
pub fn shards(n: usize) -> Vec<Vec<usize>> {
    if n < 3 {
        return vec![Vec::new()];
    }
    let inner = n - 2;
    (1u64..(1 << inner))
        .map(|mask| (0..inner).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Enumerates the dissections whose root face uses the given interior
/// positions of the boundary sequence `2, 3, ..., n, 1`.
pub fn for_each_in_shard<F: FnMut(&Dissection)>(n: usize, shard: &[usize], mut f: F) {
    if n < 3 {
        f(&Dissection::polygon(n.max(2)));
        return;
    }
    let mut boundary: Vec<usize> = (2..=n).collect();
    boundary.push(1);
    let mut pending = Vec::new();
    let mut chords = Vec::new();
    let chosen: Vec<usize> = std::iter::once(0)
        .chain(shard.iter().map(|&i| i + 1))
        .chain(std::iter::once(boundary.len() - 1))
        .collect();
    open_gaps(&boundary, &chosen, &mut pending, &mut chords);
    fill(n, &mut pending, &mut chords, &mut f);
}

fn open_gaps(
    poly: &[usize],
    chosen: &[usize],
    pending: &mut Vec<Vec<usize>>,
    chords: &mut Vec<(usize, usize)>,
) {
    for w in chosen.windows(2).rev() {
        if w[1] - w[0] >= 2 {
            let (a, b) = (poly[w[0]], poly[w[1]]);
            chords.push((a.min(b), a.max(b)));
            pending.push(poly[w[0]..=w[1]].to_vec());
        }
    }
}

fn fill<F: FnMut(&Dissection)>(
    n: usize,
    pending: &mut Vec<Vec<usize>>,
    chords: &mut Vec<(usize, usize)>,
    f: &mut F,
) {
    let Some(poly) = pending.pop() else {
        let mut sorted = chords.clone();
        sorted.sort_unstable();
        f(&Dissection::from_sorted_unchecked(n, sorted));
        return;
    };
    let inner = poly.len() - 2;
    for mask in 1u64..(1 << inner) {
        let chosen: Vec<usize> = std::iter::once(0)
            .chain((0..inner).filter(|i| mask >> i & 1 == 1).map(|i| i + 1))
            .chain(std::iter::once(poly.len() - 1))
            .collect();
        let (p0, c0) = (pending.len(), chords.len());
        open_gaps(&poly, &chosen, pending, chords);
        fill(n, pending, chords, f);
        pending.truncate(p0);
        chords.truncate(c0);
    }
    pending.push(poly);
}

pub fn enumerate_dissections(n: usize) -> Vec<Dissection> {
    let mut out = Vec::new();
    for_each_dissection(n, |d| out.push(d.clone()));
    out
}

/// Little Schröder numbers: dissections of the `n`-gon, from the closed form
/// recurrence `(m+1) s_{m+1} = 3(2m-1) s_m - (m-2) s_{m-1}` on the
/// super-Catalan sequence.
pub fn dissection_count(n: usize) -> u128 {
    assert!(n >= 2);
    // s(2)=s(3)=1; index m = n-1
    let mut s = vec![0u128, 1, 1];
    let mut m = 2usize;
    while s.len() < n {
        let next = (3 * (2 * m as u128 - 1) * s[m] - (m as u128 - 2) * s[m - 1]) / (m as u128 + 1);
        s.push(next);
        m += 1;
    }
    s[n - 1]
}

/// Glues `attachment` (rooted at its edge `{1,2}`) onto the outer edge
/// `edge` of `host`. Host vertex labels before the glued edge are kept; the
/// attachment's non-root vertices are inserted along the glued edge.
pub fn glue(
    host: &Dissection,
    edge: (usize, usize),
    attachment: &Dissection,
) -> Result<Dissection, DissectionError> {
    let n = host.n;
    if n < 3 {
        return Err(DissectionError::NotOuterEdge(edge.0, edge.1));
    }
    let (a, b) = (edge.0.min(edge.1), edge.0.max(edge.1));
    if (a, b) == (1, 2) {
        return Err(DissectionError::RootEdgeGlue);
    }
    // position i such that the edge runs from host vertex i to i+1 (mod n)
    let i = if b == a + 1 {
        a
    } else if (a, b) == (1, n) {
        n
    } else {
        return Err(DissectionError::NotOuterEdge(edge.0, edge.1));
    };
    let m = attachment.n;
    if m == 2 {
        return Ok(host.clone());
    }
    let extra = m - 2;
    let host_map = |v: usize| if v <= i { v } else { v + extra };
    // attachment vertex 2 sits on host i, vertex 1 on host i+1, 3..m inserted between
    let att_map = |v: usize| match v {
        1 => {
            if i == n {
                1
            } else {
                i + 1 + extra
            }
        }
        2 => i,
        k => i + k - 2,
    };
    let mut chords: Vec<(usize, usize)> =
        host.chords.iter().map(|&(x, y)| (host_map(x), host_map(y))).collect();
    chords.extend(attachment.chords.iter().map(|&(x, y)| {
        let (p, q) = (att_map(x), att_map(y));
        (p.min(q), p.max(q))
    }));
    let (p, q) = (att_map(1), att_map(2));
    chords.push((p.min(q), p.max(q)));
    chords.sort_unstable();
    Ok(Dissection::from_sorted_unchecked(n + extra, chords))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize, c: &[(usize, usize)]) -> Dissection {
        Dissection::new(n, c).unwrap()
    }

    #[test]
    fn validation_errors_name_the_pair() {
        assert_eq!(
            Dissection::new(5, &[(1, 3), (2, 4)]),
            Err(DissectionError::CrossingChords(1, 3, 2, 4))
        );
        assert_eq!(Dissection::new(5, &[(1, 3), (3, 1)]), Err(DissectionError::DuplicateChord(1, 3)));
        assert_eq!(Dissection::new(5, &[(1, 5)]), Err(DissectionError::OutOfRange(1, 5)));
        assert_eq!(Dissection::new(5, &[(2, 7)]), Err(DissectionError::OutOfRange(2, 7)));
        assert!(Dissection::new(3, &[]).is_ok());
    }

    #[test]
    fn fan_faces() {
        let fs = d(5, &[(1, 3), (1, 4)]).faces();
        let v: Vec<_> = fs.faces.iter().map(|f| f.vertices.clone()).collect();
        assert_eq!(v, vec![vec![1, 2, 3], vec![1, 3, 4], vec![1, 4, 5]]);
        assert!(fs.is_tree());
        let deg: Vec<_> = (0..3).map(|f| fs.neighbors(f).len()).collect();
        assert_eq!(deg, vec![1, 2, 1]);
    }

    #[test]
    fn star_dual() {
        let fs = d(6, &[(1, 3), (3, 5), (1, 5)]).faces();
        assert_eq!(fs.faces.len(), 4);
        let centre = fs.faces.iter().position(|f| f.vertices == vec![1, 3, 5]).unwrap();
        assert_eq!(fs.neighbors(centre).len(), 3);
    }

    #[test]
    fn counts_match_little_schroeder() {
        for n in 2..=11 {
            let mut c = 0u128;
            for_each_dissection(n, |_| c += 1);
            assert_eq!(c, dissection_count(n), "n={n}");
        }
        assert_eq!(enumerate_dissections(4).len(), 3);
        assert_eq!(enumerate_dissections(5).len(), 11);
        assert_eq!(enumerate_dissections(2).len(), 1);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_shardable() {
        let all = enumerate_dissections(8);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        let mut by_shard = Vec::new();
        for s in shards(8) {
            for_each_in_shard(8, &s, |d| by_shard.push(d.clone()));
        }
        assert_eq!(by_shard, all);
    }

    #[test]
    fn glue_examples() {
        let t = Dissection::polygon(3);
        assert_eq!(glue(&t, (2, 3), &t).unwrap(), d(4, &[(2, 4)]));
        assert_eq!(glue(&t, (3, 1), &t).unwrap(), d(4, &[(1, 3)]));
        let g = glue(&t, (3, 1), &Dissection::polygon(4)).unwrap();
        let mut sizes: Vec<_> = g.faces().faces.iter().map(|f| f.size()).collect();
        sizes.sort();
        assert_eq!((g.n(), sizes), (5, vec![3, 4]));
        let e = Dissection::polygon(2);
        assert!(matches!(glue(&e, (1, 2), &t), Err(DissectionError::NotOuterEdge(..))));
        assert_eq!(glue(&t, (1, 2), &t), Err(DissectionError::RootEdgeGlue));
        assert!(matches!(glue(&d(4, &[(1, 3)]), (1, 3), &t), Err(DissectionError::NotOuterEdge(..))));
    }

    #[test]
    fn glue_preserves_root_face() {
        let host = d(5, &[(1, 3)]);
        let att = d(4, &[(1, 3)]);
        for e in host.outer_edges() {
            let g = glue(&host, e, &att).unwrap();
            let fs = g.faces();
            let root = &fs.faces[fs.root].vertices;
            assert_eq!((root.len(), root[0], root[1]), (3, 1, 2));
            assert_eq!(fs.faces.len(), 4);
        }
    }
}
