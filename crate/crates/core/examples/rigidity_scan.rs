//! Deficits of the Liouville function against both choices of g.

use gausslab::arith::MultiplicativeFunctionSpec;
use gausslab::rigidity::{rigidity_scan, DeficitBackend, GMode};

fn main() -> gausslab::Result<()> {
    let n = 10_007;
    for g in [GMode::Match, GMode::Legendre, GMode::Best] {
        let r = rigidity_scan(&MultiplicativeFunctionSpec::Liouville, n, 0.4, g, DeficitBackend::Correlation)?;
        println!(
            "{g:?}: max D/N = {:.4} at p = {:?}, sign changes = {}, inferred M = {}",
            r.max_deficit / n as f64,
            r.argmax,
            r.sign_changes,
            r.inferred_m_label()
        );
    }
    let r = rigidity_scan(&MultiplicativeFunctionSpec::Liouville, n, 0.3, GMode::Best, DeficitBackend::Spectral)?;
    print!("{}", r.to_csv());
    Ok(())
}
