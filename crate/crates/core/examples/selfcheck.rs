//! Every invariant suite with default tolerances.

use dirac_timeop::config::Tolerances;
use dirac_timeop::selfcheck::run_selfcheck;

fn main() {
    let report = run_selfcheck(&Tolerances::default());
    print!("{}", report.table());
    if !report.all_passed() {
        std::process::exit(3);
    }
}
