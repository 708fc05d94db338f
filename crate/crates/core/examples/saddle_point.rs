//! The saddle point alpha and the comparison against the exact count.

use gausslab::friable::{saias_compare, SaddleSolver, SaiasComparison};

fn main() -> gausslab::Result<()> {
    let y = 1_000_000u64;
    let solver = SaddleSolver::new(y, 10)?;
    for u in [2.0f64, 5.0, 10.0, 20.0] {
        let log_x = u * (y as f64).ln();
        let s = solver.solve_log(log_x)?;
        let gap = (1.0 - s.alpha) * (y as f64).ln() - (u * u.ln()).ln();
        println!("u = {u:>4}: alpha = {:.10}, residual = {:.1e}, (1-alpha)log y - log(u log u) = {gap:.4}", s.alpha, s.residual);
    }

    println!("{}", SaiasComparison::CSV_HEADER);
    for (x, y, z) in [(1_000_000u64, 100u64, 10u64), (10_000_000, 1000, 10), (10_000_000, 1000, 30)] {
        println!("{}", saias_compare(x, y, z)?.csv_row());
    }
    Ok(())
}
