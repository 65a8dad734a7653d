//! Property (N_a), the derived indices and the adjoint boundary conditions
//! of a boundary set.

use greensign::expr::Expr;
use greensign::problem::{adjoint_boundary_conditions, derive_indices, Endpoint, IndexSet, ProblemSpec};

fn main() -> greensign::Result<()> {
    let spec = ProblemSpec::new(
        0.0,
        1.0,
        vec![Expr::constant(0.0); 4],
        0.0,
        IndexSet::new(vec![0, 2]),
        IndexSet::new(vec![1, 2]),
    )?;
    println!("space {}  (N_a): {}", spec.base_space(), spec.na());

    let d = derive_indices(&spec);
    println!("alpha = {}, beta = {}, eta = {}, gamma = {}", d.alpha, d.beta, d.eta, d.gamma);
    println!("tau = {}, delta = {}, mu = {}", d.tau, d.delta, d.mu);

    for f in adjoint_boundary_conditions(&spec)? {
        let at = if f.endpoint == Endpoint::A { "a" } else { "b" };
        println!("adjoint condition at {at}: {:?}", f.coefficients);
    }

    // Neumann conditions fail (N_a): M = 0 is an eigenvalue
    let neumann = ProblemSpec::new(
        0.0,
        1.0,
        vec![Expr::constant(0.0); 2],
        0.0,
        IndexSet::new(vec![1]),
        IndexSet::new(vec![1]),
    )?;
    println!("space {}  (N_a): {}", neumann.base_space(), neumann.na());
    Ok(())
}
