//! Pattern-restricted polygon dissections.
//!
//! The crate builds the composite-root decomposition of rooted dissections
//! for a set of 2-connected patterns, emits the resulting polynomial
//! generating-function system, solves it exactly as truncated power series
//! and extracts asymptotic constants numerically, both for dissections and
//! for labelled outerplanar graphs.

pub mod analytic;
pub mod coeff;
pub mod dissection;
pub mod fixtures;
pub mod occurrence;
pub mod pattern;
pub mod roots;
pub mod series;
pub mod solve;
pub mod system;
pub mod verify;

pub use dissection::{enumerate_dissections, glue, Dissection, DissectionError};
pub use occurrence::{count_occurrences, occurrence_vector_census, Census};
pub use pattern::{h_delta, Pattern, PatternSet};
