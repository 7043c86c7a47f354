//! Exact series: avoiding counts and the triangle-marked bivariate series.

use polydiss::roots::{Mode, DEFAULT_H_CAP};
use polydiss::solve::{solve_at, solve_marked};
use polydiss::system::{build_system, TOTAL};
use polydiss::PatternSet;

fn main() {
    let set = PatternSet::from_names(&["C4"]).unwrap();
    let avoid = build_system(&set, Mode::Avoiding, DEFAULT_H_CAP).unwrap().group_classes();
    let s = solve_at(&avoid, 19, &[]).unwrap();
    println!("square-free dissections, n = 2..20:");
    for n in 2..=20 {
        println!("  {n:>2} {}", s[TOTAL].coeff(n - 1));
    }
    let full = build_system(&PatternSet::from_names(&["C3"]).unwrap(), Mode::Full, DEFAULT_H_CAP).unwrap();
    let m = solve_marked(&full, 7).unwrap();
    println!("dissections by number of triangles (u marks a triangle):");
    for n in 2..=8 {
        println!("  {n} {}", m[TOTAL].coeff(n - 1));
    }
}
