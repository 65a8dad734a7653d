//! Wronskians of the canonical fundamental system: where they stay positive
//! the operator factors into first order pieces.

use greensign::expr::Expr;
use greensign::ode::{integrate_fundamental, markov_decomposition};
use greensign::problem::{IndexSet, ProblemSpec};

fn main() -> greensign::Result<()> {
    for m in [0.0, 1.0, 25.0, 60.0] {
        let spec = ProblemSpec::new(
            0.0,
            1.0,
            vec![Expr::constant(0.0); 2],
            m,
            IndexSet::new(vec![0]),
            IndexSet::new(vec![0]),
        )?;
        let md = markov_decomposition(&integrate_fundamental(&spec, m, 4096)?);
        match md.failure {
            None => println!("u'' + {m} u: Wronskians positive on [0, 1]"),
            Some((k, t)) => println!(
                "u'' + {m} u: W{k} fails at t = {t:.5}, window [{}, {:.5})",
                md.window.0, md.window.1
            ),
        }
        let mid = md.t.len() / 2;
        let v: Vec<String> = md.v.iter().map(|v| format!("{:.6}", v[mid])).collect();
        println!("    v at t = {:.3}: {}", md.t[mid], v.join(", "));
    }
    Ok(())
}
