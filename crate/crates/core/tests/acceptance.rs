//! One PASS/FAIL line per acceptance criterion. Checks listed in
//! `KNOWN_DEVIATIONS` are reported but do not fail the run; every other
//! check must pass. Runs without the libtest harness so the lines always
//! show up in `cargo test` output.

use polydiss::verify::{run_criterion, CRITERIA, KNOWN_DEVIATIONS};

fn main() {
    let mut unexpected = Vec::new();
    for (id, _) in CRITERIA {
        let r = run_criterion(id).expect("known criterion");
        println!("{} [{:.1}s]", r.line(), r.seconds);
        for c in r.failures() {
            println!("    {}: {}", c.name, c.detail);
            if !KNOWN_DEVIATIONS.contains(&c.name.as_str()) {
                unexpected.push(format!("criterion {id}: {}", c.name));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
