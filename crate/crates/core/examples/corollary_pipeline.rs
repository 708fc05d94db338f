//! Liouville against the Legendre symbol across many moduli.

use gausslab::arith::sieve_primes;
use gausslab::cli::{check_identities, Outcome};
use gausslab::lfunc::{corollary_row, CorollaryRow};

fn main() -> gausslab::Result<()> {
    let mut checks = Outcome::default();
    println!("{}", CorollaryRow::CSV_HEADER);
    for &n in sieve_primes(1200).in_range(1000, 1200) {
        println!("{}", corollary_row(n, 0.5)?.csv_row());
        check_identities(n, &mut checks)?;
    }
    eprintln!("identity violations: {}", checks.violations.len());
    Ok(())
}
