//! Distances between Liouville and the real characters.

use gausslab::arith::{mf_table, MultiplicativeFunctionSpec};
use gausslab::proximity::{best_real_character, mean_value, prime_distance, DistanceReport, ProximityConfig};

fn main() -> gausslab::Result<()> {
    println!("{}", DistanceReport::CSV_HEADER);
    for n in [101u64, 1009, 10_007, 100_003] {
        let lam = mf_table(&MultiplicativeFunctionSpec::Liouville, n)?;
        let chi = mf_table(&MultiplicativeFunctionSpec::Legendre(n), n)?;
        let r = prime_distance(&lam, &chi, &ProximityConfig::default())?;
        println!("{}", r.csv_row("liouville", "legendre"));
        let (best, corr) = best_real_character(&lam)?;
        let m = mean_value(&lam);
        eprintln!("N = {n}: closest real character {best:?} ({corr:.4}), mean of lambda {:.4}", m.value);
    }
    Ok(())
}
