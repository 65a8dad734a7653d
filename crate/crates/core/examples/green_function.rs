//! Sample the Green's function of u'''' + M u, classify its sign and print
//! the envelope k1(s) <= g(t,s)/phi(t) <= k2(s).

use greensign::expr::Expr;
use greensign::green::{build_green, classify_sign, pg_ng_bounds};
use greensign::problem::{derive_indices, IndexSet, ProblemSpec};

fn main() -> greensign::Result<()> {
    let spec = ProblemSpec::new(
        0.0,
        1.0,
        vec![Expr::constant(0.0); 4],
        0.0,
        IndexSet::new(vec![0, 2]),
        IndexSet::new(vec![1, 2]),
    )?;
    let ind = derive_indices(&spec);
    for m in [0.0, 200.0, 400.0, -40.0] {
        let gf = build_green(&spec, m, 101, 101)?;
        let r = classify_sign(&gf, &ind);
        println!(
            "M = {m:>6}: {:<13} max|g| = {:.6e}, jump residual {:.1e}",
            r.classification.short(),
            gf.max_abs(),
            gf.max_jump_residual
        );
    }

    let gf = build_green(&spec, 0.0, 101, 11)?;
    let (k1, k2) = pg_ng_bounds(&gf);
    println!("{:>5} {:>12} {:>12}", "s", "k1", "k2");
    for (j, s) in gf.s_grid.iter().enumerate() {
        println!("{s:>5.2} {:>12.8} {:>12.8}", k1[j], k2[j]);
    }
    Ok(())
}
