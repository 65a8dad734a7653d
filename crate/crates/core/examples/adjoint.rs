//! The formal adjoint operator, and the Green's function of the adjoint
//! problem as the transpose of the original one.

use greensign::expr::parse_expr;
use greensign::green::{adjoint_green, build_green};
use greensign::problem::{adjoint_operator, IndexSet, ProblemSpec};

fn main() -> greensign::Result<()> {
    let p = ["1 + t", "0", "0", "0"].iter().map(|c| parse_expr(c)).collect::<greensign::Result<Vec<_>>>()?;
    let spec = ProblemSpec::new(0.0, 1.0, p, 0.0, IndexSet::new(vec![0, 2]), IndexSet::new(vec![1, 2]))?;
    for (j, q) in adjoint_operator(&spec).iter().enumerate() {
        println!("q{} = {q}", j + 1);
    }

    let g = build_green(&spec, 0.0, 41, 41)?;
    let h = adjoint_green(&spec, 0.0, 41, 41)?;
    let mut err: f64 = 0.0;
    for i in 0..41 {
        for j in 0..41 {
            err = err.max((h.value(i, j) - g.value(j, i)).abs());
        }
    }
    println!("max |g*(t,s) - g(s,t)| = {err:.3e} (max |g| = {:.3e})", g.max_abs());
    Ok(())
}
