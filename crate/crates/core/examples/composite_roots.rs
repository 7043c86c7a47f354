//! Maximal composite roots for 5-cycle avoidance, with edge classes.

use polydiss::roots::{generate_composite_roots, Mode, DEFAULT_H_CAP};
use polydiss::PatternSet;

fn main() {
    let set = PatternSet::from_names(&["C5"]).unwrap();
    let cat = generate_composite_roots(&set, Mode::Avoiding, DEFAULT_H_CAP).unwrap();
    println!("{} roots, H = {}", cat.roots.len(), cat.h);
    for r in &cat.roots {
        println!("{:6} chords {:?} restricted edges {}", r.label(), r.root.chords(), r.restricted_count());
    }
}
