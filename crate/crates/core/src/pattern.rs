//! 2-connected patterns and validated pattern sets.

use crate::dissection::{Dissection, DissectionError};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error(transparent)]
    Dissection(#[from] DissectionError),
    #[error("a pattern needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("unknown pattern name `{0}`")]
    UnknownName(String),
    #[error("pattern set is empty")]
    Empty,
    #[error("pattern `{0}` is listed twice (up to isomorphism)")]
    Duplicate(String),
    #[error("cannot read pattern file {0}: {1}")]
    File(String, String),
}

/// An element of the dihedral group of the `n`-cycle acting on positions
/// `0..n` by `i -> (shift + sign*i) mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dihedral {
    pub shift: usize,
    pub reflect: bool,
}

impl Dihedral {
    pub fn apply(&self, i: usize, n: usize) -> usize {
        if self.reflect {
            (self.shift + n - i % n) % n
        } else {
            (self.shift + i) % n
        }
    }

    pub fn compose(&self, other: &Dihedral, n: usize) -> Dihedral {
        // self after other
        let s = self.apply(other.apply(0, n), n);
        Dihedral { shift: s, reflect: self.reflect != other.reflect }
    }

    pub fn all(n: usize) -> impl Iterator<Item = Dihedral> {
        (0..n).flat_map(|s| [false, true].map(|r| Dihedral { shift: s, reflect: r }))
    }
}

/// Chord set of a cycle with positions `0..k`, as sorted normalized pairs.
pub type PositionChords = Vec<(usize, usize)>;

pub fn transform_chords(ch: &[(usize, usize)], g: Dihedral, k: usize) -> PositionChords {
    let mut out: Vec<_> = ch
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (g.apply(a, k), g.apply(b, k));
            (x.min(y), x.max(y))
        })
        .collect();
    out.sort_unstable();
    out
}

/// Lexicographically smallest image of a chord set under the dihedral group.
pub fn canonical_chords(ch: &[(usize, usize)], k: usize) -> PositionChords {
    Dihedral::all(k).map(|g| transform_chords(ch, g, k)).min().unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    name: String,
    shape: Dissection,
    positions: PositionChords,
    canonical: PositionChords,
    symmetries: Vec<Dihedral>,
}

impl Pattern {
    pub fn from_shape(name: impl Into<String>, shape: Dissection) -> Result<Self, PatternError> {
        let k = shape.n();
        if k < 3 {
            return Err(PatternError::TooSmall(k));
        }
        let positions: PositionChords =
            shape.chords().iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        let canonical = canonical_chords(&positions, k);
        let symmetries = Dihedral::all(k)
            .filter(|&g| transform_chords(&positions, g, k) == positions)
            .collect();
        Ok(Pattern { name: name.into(), shape, positions, canonical, symmetries })
    }

    pub fn cycle(k: usize) -> Self {
        Pattern::from_shape(format!("C{k}"), Dissection::polygon(k)).expect("k >= 3")
    }

    /// Named patterns: `C3`..`C8` (or any `Ck`, k ≥ 3), `patternI` (two
    /// triangles sharing an edge) and `patternII` (a triangle and a
    /// quadrilateral sharing an edge).
    pub fn by_name(name: &str) -> Result<Self, PatternError> {
        match name {
            "patternI" => Pattern::from_shape(name, Dissection::new(4, &[(1, 3)])?),
            "patternII" => Pattern::from_shape(name, Dissection::new(5, &[(1, 3)])?),
            _ => {
                let k = name
                    .strip_prefix('C')
                    .and_then(|r| r.parse::<usize>().ok())
                    .filter(|&k| k >= 3)
                    .ok_or_else(|| PatternError::UnknownName(name.to_string()))?;
                Ok(Pattern::cycle(k))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &Dissection {
        &self.shape
    }

    pub fn size(&self) -> usize {
        self.shape.n()
    }

    pub fn chord_count(&self) -> usize {
        self.positions.len()
    }

    pub fn canonical(&self) -> &PositionChords {
        &self.canonical
    }

    pub fn symmetries(&self) -> &[Dihedral] {
        &self.symmetries
    }

    /// True when the cycle of length `size()` with the given chords (as
    /// cycle positions) is isomorphic to this pattern.
    pub fn matches(&self, chords: &[(usize, usize)]) -> bool {
        let k = self.size();
        chords.len() == self.positions.len()
            && Dihedral::all(k).any(|g| transform_chords(chords, g, k) == self.positions)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Pattern file contents: either a name or an explicit shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternSpec {
    Named { name: String },
    Shape { n: usize, chords: Vec<(usize, usize)> },
}

impl PatternSpec {
    pub fn resolve(&self, fallback_name: &str) -> Result<Pattern, PatternError> {
        match self {
            PatternSpec::Named { name } => Pattern::by_name(name),
            PatternSpec::Shape { n, chords } => {
                Pattern::from_shape(fallback_name, Dissection::new(*n, chords)?)
            }
        }
    }
}

/// A nonempty list of pairwise non-isomorphic patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
}

impl PatternSet {
    pub fn new(patterns: Vec<Pattern>) -> Result<Self, PatternError> {
        if patterns.is_empty() {
            return Err(PatternError::Empty);
        }
        for i in 0..patterns.len() {
            for j in 0..i {
                if patterns[i].size() == patterns[j].size()
                    && patterns[i].canonical == patterns[j].canonical
                {
                    return Err(PatternError::Duplicate(patterns[i].name.clone()));
                }
            }
        }
        Ok(PatternSet { patterns })
    }

    pub fn from_names(names: &[&str]) -> Result<Self, PatternError> {
        PatternSet::new(names.iter().map(|n| Pattern::by_name(n)).collect::<Result<_, _>>()?)
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Largest pattern vertex count; faces up to this size are small.
    pub fn h(&self) -> usize {
        self.patterns.iter().map(Pattern::size).max().unwrap_or(0)
    }

    pub fn label(&self) -> String {
        self.patterns.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join(",")
    }
}

pub fn h_delta(set: &PatternSet) -> usize {
    set.h()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_values() {
        assert_eq!(PatternSet::from_names(&["C3"]).unwrap().h(), 3);
        assert_eq!(PatternSet::from_names(&["C4"]).unwrap().h(), 4);
        assert_eq!(PatternSet::from_names(&["C3", "patternII"]).unwrap().h(), 5);
    }

    #[test]
    fn symmetry_groups() {
        assert_eq!(Pattern::cycle(5).symmetries().len(), 10);
        assert_eq!(Pattern::by_name("patternI").unwrap().symmetries().len(), 4);
        assert_eq!(Pattern::by_name("patternII").unwrap().symmetries().len(), 2);
        for p in ["C4", "patternI", "patternII"] {
            let p = Pattern::by_name(p).unwrap();
            let k = p.size();
            let syms = p.symmetries();
            assert!(syms.contains(&Dihedral { shift: 0, reflect: false }));
            for a in syms {
                for b in syms {
                    assert!(syms.contains(&a.compose(b, k)));
                }
            }
        }
    }

    #[test]
    fn set_validation() {
        assert_eq!(PatternSet::new(vec![]), Err(PatternError::Empty));
        let p = Pattern::from_shape("x", Dissection::new(5, &[(2, 4)]).unwrap()).unwrap();
        let q = Pattern::by_name("patternII").unwrap();
        assert!(matches!(PatternSet::new(vec![q, p]), Err(PatternError::Duplicate(_))));
        assert!(matches!(Pattern::by_name("K4"), Err(PatternError::UnknownName(_))));
    }

    #[test]
    fn pattern_file_specs() {
        let a: PatternSpec = serde_json::from_str(r#"{"name":"C5"}"#).unwrap();
        assert_eq!(a.resolve("f").unwrap().size(), 5);
        let b: PatternSpec = serde_json::from_str(r#"{"n":5,"chords":[[1,3],[2,4]]}"#).unwrap();
        assert!(matches!(b.resolve("f"), Err(PatternError::Dissection(_))));
    }
}
