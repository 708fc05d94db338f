//! Dilation law for the Legendre symbol and the sign of the Gauss sum.

use gausslab::arith::{mf_table, MultiplicativeFunctionSpec};
use gausslab::expsum::dft_fast;
use gausslab::rigidity::{scan_table, DeficitBackend, GMode};

fn main() -> gausslab::Result<()> {
    for n in [1009u64, 1013, 10_007, 65_537] {
        let chi = mf_table(&MultiplicativeFunctionSpec::Legendre(n), n)?;
        let table = dft_fast(&chi)?;
        let u = table.at(1) / (n as f64).sqrt();
        let report = scan_table(&chi, 0.3, GMode::Match, DeficitBackend::Spectral)?;
        println!(
            "N = {n:>6} (N mod 4 = {}): S(1)/sqrt(N) = {:+.12} {:+.12}i, max deficit over {} primes = {:.2e}",
            n % 4,
            u.re,
            u.im,
            report.records.len(),
            report.max_deficit
        );
    }
    Ok(())
}
