//! Residuals of the shipped defining polynomials on the marked series.

use polydiss::coeff::Coeff;
use polydiss::fixtures::polynomial;
use polydiss::roots::{Mode, DEFAULT_H_CAP};
use polydiss::solve::solve_marked;
use polydiss::system::{build_system, TOTAL};
use polydiss::PatternSet;

fn main() {
    for (pat, name, n) in [("C3", "p3", 50), ("C4", "p4", 30)] {
        let sys = build_system(&PatternSet::from_names(&[pat]).unwrap(), Mode::Full, DEFAULT_H_CAP).unwrap().group_classes();
        let d = solve_marked(&sys, n).unwrap()[TOTAL].shift_up();
        let p = polynomial(name).unwrap();
        let zero = p.residual(&d, n).coeffs().iter().all(Coeff::is_zero);
        println!("{name} ({} terms) annihilates the {pat} series through z^{n}: {zero}", p.terms.len());
    }
}
