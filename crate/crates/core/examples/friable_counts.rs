//! Friable-rough counts by sieve, with and without a progression.

use gausslab::friable::{psi_count, theta_count, FriableQuery};

fn main() -> gausslab::Result<()> {
    let x = 1_000_000;
    for (y, z) in [(100u64, 1u64), (100, 10), (1000, 10), (1000, 30)] {
        let all = theta_count(&FriableQuery::new(x, y, z))?;
        let ap = theta_count(&FriableQuery::new(x, y, z).in_progression(7, 3))?;
        println!("Theta({x}, {y}, {z}) = {all}, in 3 mod 7: {ap}");
    }
    println!("Psi({x}, 100) = {}", psi_count(x, 100)?);
    Ok(())
}
