//! Compares the marked series of C3 and C4 jointly against the census.

use polydiss::occurrence::DEFAULT_ORACLE_LIMIT;
use polydiss::solve::census_crosscheck;
use polydiss::PatternSet;

fn main() {
    let set = PatternSet::from_names(&["C3", "C4"]).unwrap();
    match census_crosscheck(&set, 10, DEFAULT_ORACLE_LIMIT) {
        Ok(k) => println!("joint occurrence vectors agree for {k} sizes"),
        Err(e) => println!("mismatch: {e}"),
    }
}
