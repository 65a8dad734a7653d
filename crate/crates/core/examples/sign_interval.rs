//! Exact interval of M on which the Green's function keeps its sign, for a
//! few classical boundary sets.

use greensign::characterize::{constant_sign_interval, nonexistence_check, TdMode};
use greensign::expr::Expr;
use greensign::problem::{IndexSet, ProblemSpec};
use greensign::spectral::SearchConfig;

fn main() -> greensign::Result<()> {
    let cases: [(usize, &[usize], &[usize]); 4] = [
        (2, &[0], &[0]),
        (3, &[1, 2], &[0]),
        (4, &[0, 2], &[1, 2]),
        (6, &[0, 2, 4], &[0, 2, 4]),
    ];
    for (n, sigma, eps) in cases {
        let spec = ProblemSpec::new(
            0.0,
            1.0,
            vec![Expr::constant(0.0); n],
            0.0,
            IndexSet::new(sigma.to_vec()),
            IndexSet::new(eps.to_vec()),
        )?;
        let r = constant_sign_interval(&spec, &SearchConfig::for_spec(&spec), TdMode::Check)?;
        println!(
            "n = {n} {}: {} for M in {}{:.6}, {:.6}{}   ({})",
            spec.base_space(),
            r.classification.short(),
            if r.lower.closed { '[' } else { '(' },
            r.lower.value,
            r.upper.value,
            if r.upper.closed { ']' } else { ')' },
            r.hypothesis.name(),
        );
        for (label, ev) in &r.eigenvalues {
            println!("    {label:<11} = {:>16.6} in {}", ev.lambda, ev.space.as_ref().unwrap());
        }
        let flags = nonexistence_check(&spec);
        if flags.no_inverse_negative {
            println!("    never strongly inverse negative");
        }
        if flags.no_inverse_positive {
            println!("    never strongly inverse positive");
        }
    }
    Ok(())
}
