//! Integrate the fundamental matrix and compare its Wronskian with Liouville's
//! formula.

use greensign::expr::parse_expr;
use greensign::ode::integrate_fundamental;
use greensign::problem::{IndexSet, ProblemSpec};

fn main() -> greensign::Result<()> {
    let p = ["exp(2*t)*sin(2*t)", "0", "0", "0"]
        .iter()
        .map(|c| parse_expr(c))
        .collect::<greensign::Result<Vec<_>>>()?;
    let spec = ProblemSpec::new(0.0, 1.0, p, 0.0, IndexSet::new(vec![0, 2]), IndexSet::new(vec![1, 2]))?;
    let fs = integrate_fundamental(&spec, 0.0, 4096)?;

    println!("{:>6} {:>22} {:>22}", "t", "W(t)", "exp(-int p1)");
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        let w = *fs.wronskians(t)?.last().unwrap();
        let int_p1 = ((2.0 * t).exp() * ((2.0 * t).sin() - (2.0 * t).cos()) + 1.0) / 4.0;
        println!("{t:>6.2} {w:>22.15} {:>22.15}", (-int_p1).exp());
    }
    Ok(())
}
