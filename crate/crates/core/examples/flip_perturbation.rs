//! Flipping the Legendre symbol at a few primes: deficits stay below 8d.

use gausslab::cli::flip_trials;

fn main() -> gausslab::Result<()> {
    let n = 100_003;
    println!("flip set, distance d, max deficit off the set, 8d");
    for t in flip_trials(n, 0.25, 12, 7)? {
        println!(
            "{:?}, {}, {}, {}",
            t.flip_set,
            t.distance,
            t.max_deficit_off_set,
            8 * t.distance
        );
        assert!(t.max_deficit_off_set <= 8.0 * t.distance as f64);
    }
    Ok(())
}
