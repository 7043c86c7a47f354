//! Replays every acceptance criterion and prints one line each.

use polydiss::verify::run_all;

fn main() {
    for r in run_all() {
        println!("{}", r.line());
    }
}
