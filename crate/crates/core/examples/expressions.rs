//! Parse a coefficient, differentiate it symbolically and evaluate it.
//!
//! ```text
//! cargo run --example expressions -- "exp(2*t)*sin(2*t)"
//! ```

use greensign::expr::parse_expr;

fn main() -> greensign::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "exp(2*t)*sin(2*t)".to_string());
    let mut e = parse_expr(&text)?;
    for order in 0..4 {
        println!("d^{order}: {e}");
        println!("    at t = 0.5: {:.12}", e.eval(0.5)?);
        e = e.differentiate();
    }

    match parse_expr("sin(t") {
        Err(err) => println!("rejected: {err}"),
        Ok(e) => println!("unexpectedly parsed {e}"),
    }
    Ok(())
}
