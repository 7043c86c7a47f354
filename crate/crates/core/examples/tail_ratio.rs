//! Actual coefficients against the predicted asymptotics, including a
//! deliberately wrong singularity.

use polydiss::analytic::growth_constants;
use polydiss::analytic::report::tail_ratios;
use polydiss::roots::{Mode, DEFAULT_H_CAP};
use polydiss::system::build_system;
use polydiss::PatternSet;

fn main() {
    let sys = build_system(&PatternSet::from_names(&["C3"]).unwrap(), Mode::Avoiding, DEFAULT_H_CAP).unwrap().group_classes();
    let g = growth_constants(&sys, &[]).unwrap();
    let good = tail_ratios(&sys, &[], g.r, g.alpha, 700, 100).unwrap();
    let bad = tail_ratios(&sys, &[], g.r * 1.01, g.alpha, 700, 100).unwrap();
    for (a, b) in good.iter().zip(&bad).step_by(100) {
        println!("n = {:3}: ratio {:.6}, with r off by 1%: {:.3e}", a.0, a.1, b.1);
    }
}
