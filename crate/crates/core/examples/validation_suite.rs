//! The self-check suite that `ftr-secrecy validate` runs.
use ftr_secrecy::experiment::{validate, ValidateOptions};

fn main() {
    let report = validate(&ValidateOptions::default());
    println!("{report}");
    std::process::exit(if report.passed() { 0 } else { 1 });
}
