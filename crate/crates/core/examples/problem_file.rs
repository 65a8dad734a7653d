//! Drive the command line front end in-process from a problem file.
//!
//! ```text
//! cargo run --example problem_file -- tests/fixtures/t3.json
//! ```

use greensign::cli::run_args;

fn main() {
    let file = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/t4_running.json").to_string());
    for cmd in ["check", "interval", "necessary"] {
        let out = run_args(["greensign", cmd, &file]);
        println!("== {cmd} (exit {})", out.code);
        print!("{}", out.stdout);
        eprint!("{}", out.stderr);
    }
}
