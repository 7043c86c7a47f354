//! Brute-force occurrence census of 3-cycles in small dissections.

use polydiss::{enumerate_dissections, occurrence_vector_census, PatternSet};

fn main() {
    for n in 3..=8 {
        println!("{n}-gon: {} dissections", enumerate_dissections(n).len());
    }
    let set = PatternSet::from_names(&["C3"]).unwrap();
    let census = occurrence_vector_census(&set, 7, 14).unwrap();
    for (vec, count) in &census.counts {
        println!("  {vec:?} triangles: {count}");
    }
}
