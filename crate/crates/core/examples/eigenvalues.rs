//! Closest-to-zero eigenvalues of the fourth order operator in the spaces
//! that bound its constant-sign interval.

use greensign::expr::Expr;
use greensign::problem::{build_space, IndexSet, ProblemSpec, SpaceVariant};
use greensign::spectral::{eigenfunction, find_eigenvalue, Direction, SearchConfig};

fn main() -> greensign::Result<()> {
    let spec = ProblemSpec::new(
        0.0,
        1.0,
        vec![Expr::constant(0.0); 4],
        0.0,
        IndexSet::new(vec![0, 2]),
        IndexSet::new(vec![1, 2]),
    )?;
    let cfg = SearchConfig::for_spec(&spec);
    let jobs = [
        (SpaceVariant::Base, Direction::LeastPositive),
        (SpaceVariant::DropSigmaKAddBeta, Direction::BiggestNegative),
        (SpaceVariant::AddAlphaDropEpsLast, Direction::BiggestNegative),
        (SpaceVariant::DropSigmaKAddAlpha, Direction::LeastPositive),
        (SpaceVariant::DropEpsLastAddBeta, Direction::LeastPositive),
    ];
    for (variant, dir) in jobs {
        let space = build_space(&spec, &variant)?;
        let ev = find_eigenvalue(&spec, &space, dir, &cfg)?;
        let ef = eigenfunction(&spec, &space, ev.lambda, 201)?;
        println!(
            "{:<14} {:<22} lambda = {:>14.6}  m = {:.6}  one-signed eigenfunction: {}",
            space.to_string(),
            variant.name(),
            ev.lambda,
            ev.lambda.abs().powf(0.25),
            ef.has_constant_sign_inside(1e-9),
        );
    }
    Ok(())
}
