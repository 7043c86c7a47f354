//! Builds, groups and prints class systems.

use polydiss::roots::{Mode, DEFAULT_H_CAP};
use polydiss::system::build_system;
use polydiss::PatternSet;

fn main() {
    for (names, mode) in [(&["C3"][..], Mode::Full), (&["C4"], Mode::Full), (&["C5"], Mode::Avoiding)] {
        let sys = build_system(&PatternSet::from_names(names).unwrap(), mode, DEFAULT_H_CAP).unwrap();
        let g = sys.group_classes();
        println!("{names:?} {mode:?}: {} variables, {} after grouping", sys.vars.len(), g.vars.len());
        println!("{g}");
    }
}
