//! L(s, chi) on the real axis, character sums and a zero scan.

use gausslab::lfunc::{char_partial_sums, chi_prime_sum, real_zero_scan, LFunction};

fn main() -> gausslab::Result<()> {
    let l3 = LFunction::new(3)?;
    println!("L(1, chi_3) = {:.15}, pi/(3 sqrt 3) = {:.15}", l3.value(1.0)?, std::f64::consts::PI / 27f64.sqrt());

    for n in [5u64, 13, 163, 1009] {
        let l = LFunction::new(n)?;
        let sums = char_partial_sums(n, 0.1)?;
        let c = chi_prime_sum(n)?;
        let zeros = real_zero_scan(n, 0.5)?;
        println!(
            "N = {n}: L(1/2) = {:.6}, L(1) = {:.6}, Euler product = {:.6}, max |T| = {}, prime sum = {:.4}, real zeros = {}",
            l.value(0.5)?,
            c.direct_l1,
            c.euler_l1,
            sums.max_abs,
            c.sum,
            zeros.len()
        );
    }
    Ok(())
}
