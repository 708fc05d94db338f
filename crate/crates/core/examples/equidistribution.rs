//! Friable-rough integers across residue classes.

use gausslab::friable::equidistribution_report;

fn main() -> gausslab::Result<()> {
    for q in [101u64, 997, 1009] {
        let r = equidistribution_report(10_000_000, 1000, 10, q)?;
        println!(
            "q = {q}: Theta = {}, multiples of q = {}, min = {}, max = {}, spread = {:.4}, partition ok = {}",
            r.total, r.counts[0], r.min, r.max, r.relative_spread, r.partition_holds
        );
    }
    Ok(())
}
