//! Outerplanar graphs: tau, rho, the g variants and marked limit laws.

use polydiss::analytic::{outerplanar_law, outerplanar_point, truncated_outerplanar};
use polydiss::roots::{Mode, DEFAULT_H_CAP};
use polydiss::system::build_system;
use polydiss::PatternSet;

fn main() {
    let c3 = build_system(&PatternSet::from_names(&["C3"]).unwrap(), Mode::Full, DEFAULT_H_CAP).unwrap().group_classes();
    let p = outerplanar_point(&c3, &[1.0], &[1.0]).unwrap();
    println!("all outerplanar graphs: tau = {:.10}, rho = {:.10}, D(tau) = {:.10}", p.tau, p.rho, p.d_tau);
    let l = outerplanar_law(&c3, 0).unwrap();
    println!("triangles: tau' = {:.10}, rho' = {:.10}, rho'' = {:.10}", l.tau_derivatives.first.extrapolated, l.law.rho_prime, l.law.rho_second);
    println!("           mu = {:.6}, sigma^2 = {:.6}", l.law.mu, l.law.sigma2);
    let c4 = build_system(&PatternSet::from_names(&["C4"]).unwrap(), Mode::Avoiding, DEFAULT_H_CAP).unwrap().group_classes();
    let t = truncated_outerplanar(&c4, 700).unwrap();
    println!("square-free: rho = {:.6}, g variants {:?}", t.rho, t.g.named());
}
