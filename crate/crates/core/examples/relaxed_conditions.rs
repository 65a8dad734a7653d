//! Intervals when some boundary conditions are relaxed to sign conditions
//! on the data, u^(σ_j)(a) and u^(ε_i)(b).

use greensign::characterize::{nonhomogeneous_interval, TdMode};
use greensign::expr::parse_expr;
use greensign::problem::{IndexSet, ProblemSpec};
use greensign::spectral::SearchConfig;

fn run(p: &[&str], sigma: &[usize], eps: &[usize], subsets: &[(&[usize], &[usize])]) -> greensign::Result<()> {
    let coeffs = p.iter().map(|c| parse_expr(c)).collect::<greensign::Result<Vec<_>>>()?;
    let spec = ProblemSpec::new(
        0.0,
        1.0,
        coeffs,
        0.0,
        IndexSet::new(sigma.to_vec()),
        IndexSet::new(eps.to_vec()),
    )?;
    let cfg = SearchConfig::for_spec(&spec);
    println!("p = {p:?}, space {}", spec.base_space());
    for (s, e) in subsets {
        let (s, e) = (IndexSet::new(s.to_vec()), IndexSet::new(e.to_vec()));
        let r = nonhomogeneous_interval(&spec, &s, &e, &cfg, TdMode::Check)?;
        println!(
            "    relax {s} at a, {e} at b: {} for M in {}{:.6}, {:.6}{}",
            r.classification.short(),
            if r.lower.closed { '[' } else { '(' },
            r.lower.value,
            r.upper.value,
            if r.upper.closed { ']' } else { ')' },
        );
    }
    Ok(())
}

fn main() -> greensign::Result<()> {
    run(&["0"; 4], &[0, 2], &[1, 3], &[(&[2], &[3]), (&[0, 2], &[1, 3])])?;
    run(&["0"; 6], &[0, 2, 4], &[0, 2, 4], &[(&[4], &[4]), (&[2, 4], &[2, 4]), (&[0, 2, 4], &[0, 2, 4])])?;
    run(
        &["exp(2*t)*sin(2*t)", "0", "0", "0"],
        &[0, 2],
        &[1, 2],
        &[(&[2], &[2]), (&[0, 2], &[2]), (&[0, 2], &[1, 2])],
    )
}
