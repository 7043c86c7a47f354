//! Dominant singularity, square-root expansion and growth constants.

use polydiss::analytic::{find_singularity, growth_constants, Branch};
use polydiss::roots::{Mode, DEFAULT_H_CAP};
use polydiss::system::{build_system, TOTAL};
use polydiss::PatternSet;

fn main() {
    let full = build_system(&PatternSet::from_names(&["C3"]).unwrap(), Mode::Full, DEFAULT_H_CAP).unwrap().group_classes();
    let e = find_singularity(&Branch::new(&full, &[1.0]).unwrap()).unwrap();
    println!("unrestricted r = {:.15} (3 - 2 sqrt 2 = {:.15})", e.rho, 3.0 - 2.0 * 2f64.sqrt());
    println!("  Dbar ~ {:.6} - {:.6} sqrt(1 - z/r)", e.y0[TOTAL], e.h[TOTAL]);
    for names in [&["C3"][..], &["C6"], &["patternI", "patternII"]] {
        let sys = build_system(&PatternSet::from_names(names).unwrap(), Mode::Avoiding, DEFAULT_H_CAP).unwrap().group_classes();
        let g = growth_constants(&sys, &[]).unwrap();
        println!("{names:?}: r = {:.6}, 1/r = {:.5}, alpha = {:.6}", g.r, g.r_inv, g.alpha);
    }
}
