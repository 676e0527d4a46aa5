//! Under uniform deletion the extended update collapses to the plain
//! state-transition coefficients `(n-k-1)/(n-1)` and `(k+1)/(n-1)`. This
//! expands the update symbolically for one state and then sweeps all of
//! them.

use espr::verify::symbolic::uniform_deletion_update;
use espr::verify::verify_theorem2;
use espr::Weight;

fn main() -> espr::Result<()> {
    let (n, k) = (5, 1);
    let update = uniform_deletion_update(n, k);
    println!("update of P({},{k}) has degree {}", n - 1, update.degree());
    let coeffs = update.reduce_on_simplex(n).expect("quadratic part factors");
    for (j, c) in coeffs.iter().enumerate() {
        println!("  coefficient of P({n},{j}) = {}", c.render());
    }

    let n_max = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let report = verify_theorem2(n_max)?;
    println!("{} states up to n = {n_max}: pass = {}", report.checks, report.pass);
    Ok(())
}
