//! Pattern occurrences in dissections and the exhaustive census.
//!
//! Every cycle of a dissection bounds a connected set of faces, so cycles
//! are enumerated as connected subtrees of the dual tree. A copy of a
//! 2-connected pattern is a cycle plus a subset of the chords inside it.

use crate::dissection::{for_each_in_shard, shards, Dissection};
use crate::pattern::{Pattern, PatternSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Largest vertex count the census accepts unless forced.
pub const DEFAULT_ORACLE_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("census size {0} exceeds the oracle limit {1}")]
    OracleLimitExceeded(usize, usize),
}

/// A cycle of a dissection with the chords lying inside it, both in
/// positions `0..len` along the cycle.
#[derive(Debug, Clone)]
pub struct InnerCycle {
    pub len: usize,
    pub chords: Vec<(usize, usize)>,
}

/// Calls `f` for every cycle of `d` of length at most `max_len`.
pub fn for_each_cycle<F: FnMut(&InnerCycle)>(d: &Dissection, max_len: usize, mut f: F) {
    if d.n() < 3 {
        return;
    }
    let fs = d.faces();
    let parent = fs.parents();
    let nf = fs.faces.len();
    let mut children = vec![Vec::new(); nf];
    for g in 0..nf {
        if let Some(p) = parent[g] {
            let chord = fs.neighbors(g).iter().find(|x| x.0 == p).unwrap().1;
            children[p].push((g, chord));
        }
    }
    let sizes: Vec<usize> = fs.faces.iter().map(|f| f.size()).collect();
    let mut members = Vec::new();
    let mut inner = Vec::new();
    let mut cands: Vec<(usize, (usize, usize))> = Vec::new();
    for top in 0..nf {
        if sizes[top] > max_len {
            continue;
        }
        members.clear();
        members.push(top);
        cands.clear();
        cands.extend(children[top].iter().copied());
        grow(
            &fs.faces, &sizes, &children, max_len, sizes[top], 0, &mut members, &mut inner,
            &mut cands, &mut f,
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn grow<F: FnMut(&InnerCycle)>(
    faces: &[crate::dissection::Face],
    sizes: &[usize],
    children: &[Vec<(usize, (usize, usize))>],
    max_len: usize,
    boundary: usize,
    start: usize,
    members: &mut Vec<usize>,
    inner: &mut Vec<(usize, usize)>,
    cands: &mut Vec<(usize, (usize, usize))>,
    f: &mut F,
) {
    emit(faces, members, inner, boundary, f);
    for i in start..cands.len() {
        let (g, chord) = cands[i];
        let nb = boundary + sizes[g] - 2;
        if nb > max_len {
            continue;
        }
        members.push(g);
        inner.push(chord);
        let c0 = cands.len();
        cands.extend(children[g].iter().copied());
        grow(faces, sizes, children, max_len, nb, i + 1, members, inner, cands, f);
        cands.truncate(c0);
        inner.pop();
        members.pop();
    }
}

fn emit<F: FnMut(&InnerCycle)>(
    faces: &[crate::dissection::Face],
    members: &[usize],
    inner: &[(usize, usize)],
    boundary: usize,
    f: &mut F,
) {
    let mut verts: Vec<usize> = members.iter().flat_map(|&m| faces[m].vertices.iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    debug_assert_eq!(verts.len(), boundary);
    let pos = |v: usize| verts.binary_search(&v).unwrap();
    let chords = inner.iter().map(|&(a, b)| (pos(a), pos(b))).collect();
    f(&InnerCycle { len: boundary, chords });
}

/// Number of copies of `p` inside the given cycle that use the whole cycle
/// as their Hamilton cycle.
fn copies_on_cycle(c: &InnerCycle, p: &Pattern) -> u64 {
    if c.len != p.size() || c.chords.len() < p.chord_count() {
        return 0;
    }
    let want = p.chord_count();
    if want == 0 {
        return 1;
    }
    let mut count = 0;
    let mut pick = Vec::with_capacity(want);
    subsets(&c.chords, 0, want, &mut pick, &mut |s| {
        let mut s = s.to_vec();
        s.sort_unstable();
        if p.matches(&s) {
            count += 1;
        }
    });
    count
}

fn subsets<T: Copy, F: FnMut(&[T])>(items: &[T], from: usize, k: usize, acc: &mut Vec<T>, f: &mut F) {
    if acc.len() == k {
        f(acc);
        return;
    }
    for i in from..items.len() {
        if items.len() - i < k - acc.len() {
            break;
        }
        acc.push(items[i]);
        subsets(items, i + 1, k, acc, f);
        acc.pop();
    }
}

pub fn count_occurrences(d: &Dissection, p: &Pattern) -> u64 {
    let mut total = 0;
    for_each_cycle(d, p.size(), |c| total += copies_on_cycle(c, p));
    total
}

/// Occurrence counts of every pattern of the set, in set order.
pub fn occurrence_vector(d: &Dissection, set: &PatternSet) -> Vec<u32> {
    let mut v = vec![0u32; set.len()];
    for_each_cycle(d, set.h(), |c| {
        for (i, p) in set.patterns().iter().enumerate() {
            v[i] += copies_on_cycle(c, p) as u32;
        }
    });
    v
}

/// Map from occurrence vector to the number of dissections of the `n`-gon
/// having it.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Census {
    pub n: usize,
    pub counts: BTreeMap<Vec<u32>, u64>,
}

impl Census {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let counts: Vec<_> = self
            .counts
            .iter()
            .map(|(v, c)| serde_json::json!({ "vector": v, "count": c }))
            .collect();
        serde_json::json!({ "n": self.n, "counts": counts })
    }
}

pub fn occurrence_vector_census(set: &PatternSet, n: usize, limit: usize) -> Result<Census, CensusError> {
    if n > limit {
        return Err(CensusError::OracleLimitExceeded(n, limit));
    }
    let parts: Vec<BTreeMap<Vec<u32>, u64>> = shards(n)
        .into_par_iter()
        .map(|s| {
            let mut m = BTreeMap::new();
            for_each_in_shard(n, &s, |d| *m.entry(occurrence_vector(d, set)).or_insert(0) += 1);
            m
        })
        .collect();
    let mut counts = BTreeMap::new();
    for m in parts {
        for (k, v) in m {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    Ok(Census { n, counts })
}

/// Subgraph count by brute force over injective vertex maps, divided by
/// the number of graph automorphisms of the pattern. Independent of the
/// cycle machinery; only usable for small inputs.
pub fn brute_force_count(d: &Dissection, p: &Pattern) -> u64 {
    let pe = p.shape().edges();
    let k = p.size();
    let n = d.n();
    let mut adj = vec![vec![false; n + 1]; n + 1];
    for (a, b) in d.edges() {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut padj = vec![vec![false; k + 1]; k + 1];
    for &(a, b) in &pe {
        padj[a][b] = true;
        padj[b][a] = true;
    }
    let maps_into = |adj: &Vec<Vec<bool>>, m: usize| {
        let mut count = 0u64;
        let mut img = vec![0usize; k + 1];
        let mut used = vec![false; m + 1];
        fn rec(
            i: usize,
            k: usize,
            m: usize,
            pe: &[(usize, usize)],
            adj: &Vec<Vec<bool>>,
            img: &mut Vec<usize>,
            used: &mut Vec<bool>,
            count: &mut u64,
        ) {
            if i > k {
                *count += 1;
                return;
            }
            for v in 1..=m {
                if used[v] {
                    continue;
                }
                img[i] = v;
                let ok = pe
                    .iter()
                    .filter(|&&(a, b)| a.max(b) == i)
                    .all(|&(a, b)| adj[img[a]][img[b]]);
                if ok {
                    used[v] = true;
                    rec(i + 1, k, m, pe, adj, img, used, count);
                    used[v] = false;
                }
            }
        }
        rec(1, k, m, &pe, adj, &mut img, &mut used, &mut count);
        count
    };
    let embeddings = maps_into(&adj, n);
    let auts = maps_into(&padj, k);
    embeddings / auts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissection::enumerate_dissections;

    fn d(n: usize, c: &[(usize, usize)]) -> Dissection {
        Dissection::new(n, c).unwrap()
    }

    fn p(name: &str) -> Pattern {
        Pattern::by_name(name).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_occurrences(&Dissection::polygon(3), &p("C3")), 1);
        let sq = d(4, &[(1, 3)]);
        assert_eq!(count_occurrences(&sq, &p("C4")), 1);
        assert_eq!(count_occurrences(&sq, &p("C3")), 2);
        let fan = d(5, &[(1, 3), (1, 4)]);
        assert_eq!(count_occurrences(&fan, &p("C5")), 1);
        assert_eq!(count_occurrences(&fan, &p("C4")), 2);
        assert_eq!(count_occurrences(&fan, &p("patternI")), 2);
        assert_eq!(count_occurrences(&fan, &p("patternII")), 2);
    }

    #[test]
    fn agrees_with_brute_force() {
        let pats = ["C3", "C4", "C5", "patternI", "patternII"];
        for n in 3..=8 {
            for x in enumerate_dissections(n) {
                for name in pats {
                    let q = p(name);
                    assert_eq!(count_occurrences(&x, &q), brute_force_count(&x, &q), "{x} {name}");
                }
            }
        }
    }

    #[test]
    fn census_examples() {
        let c3 = PatternSet::from_names(&["C3"]).unwrap();
        let c = occurrence_vector_census(&c3, 3, 14).unwrap();
        assert_eq!(c.counts, BTreeMap::from([(vec![1], 1)]));
        let c = occurrence_vector_census(&c3, 5, 14).unwrap();
        assert_eq!((c.total(), c.counts[&vec![0]]), (11, 1));
        let c4 = PatternSet::from_names(&["C4"]).unwrap();
        let c = occurrence_vector_census(&c4, 6, 14).unwrap();
        assert_eq!((c.total(), c.counts[&vec![0]]), (45, 7));
        assert_eq!(
            occurrence_vector_census(&c4, 15, 14),
            Err(CensusError::OracleLimitExceeded(15, 14))
        );
    }
}
