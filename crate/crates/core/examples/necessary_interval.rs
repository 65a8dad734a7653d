//! Where the opposite sign could still occur: a necessary interval, for a
//! constant and a variable coefficient operator.

use greensign::characterize::{necessary_interval, TdMode};
use greensign::expr::parse_expr;
use greensign::problem::{IndexSet, ProblemSpec};
use greensign::spectral::SearchConfig;

fn main() -> greensign::Result<()> {
    for p1 in ["0", "exp(2*t)*sin(2*t)"] {
        let p = [p1, "0", "0", "0"].iter().map(|c| parse_expr(c)).collect::<greensign::Result<Vec<_>>>()?;
        let spec = ProblemSpec::new(0.0, 1.0, p, 0.0, IndexSet::new(vec![0, 2]), IndexSet::new(vec![1, 2]))?;
        match necessary_interval(&spec, &SearchConfig::for_spec(&spec), TdMode::Check)? {
            Some(r) => println!(
                "p1 = {p1}: {} only if M in [{:.4} ({:.5}^4), {:.4} ({:.5}^4))",
                r.classification.short(),
                r.lower.value,
                (-r.lower.value).powf(0.25),
                r.upper.value,
                (-r.upper.value).powf(0.25),
            ),
            None => println!("p1 = {p1}: the opposite sign never occurs"),
        }
    }
    Ok(())
}
