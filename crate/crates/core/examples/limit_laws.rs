//! Mean and variance constants of pattern counts, and their covariance.

use polydiss::analytic::{covariance_matrix, limit_law_constants};
use polydiss::roots::{Mode, DEFAULT_H_CAP};
use polydiss::system::build_system;
use polydiss::PatternSet;

fn main() {
    for p in ["C3", "C4"] {
        let sys = build_system(&PatternSet::from_names(&[p]).unwrap(), Mode::Full, DEFAULT_H_CAP).unwrap().group_classes();
        let l = limit_law_constants(&sys, 0).unwrap();
        println!("{p}: mu = {:.8}, sigma^2 = {:.8}", l.mu, l.sigma2);
    }
    let both = build_system(&PatternSet::from_names(&["C3", "C4"]).unwrap(), Mode::Full, DEFAULT_H_CAP).unwrap().group_classes();
    let c = covariance_matrix(&both).unwrap();
    println!("joint mu = {:.6?}", c.mu);
    for row in &c.sigma {
        println!("  {row:.6?}");
    }
}
