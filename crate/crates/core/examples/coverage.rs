//! Products of small primes covering the unit group, with witnesses.

use gausslab::cover::{find_representative, freiman_check, product_levels};

fn main() -> gausslab::Result<()> {
    let q = 1009;
    let x = (q as f64).powf(0.75).ceil() as u64;
    let state = product_levels(q, x, 8)?;
    print!("{}", state.to_csv());
    state.validate_witnesses()?;
    println!("minimal K = {:?}", state.minimal_cover_k());
    for b in [2u64, 500, 1008] {
        println!("witness for {b}: {:?}", state.witness(b));
    }

    println!("b,P_b,factorization");
    for b in [1u64, 2, 3, 7, 1008] {
        println!("{}", find_representative(b, q, x, 4, 4)?.csv_line());
    }

    println!("{:?}", freiman_check(101, &[1, 5, 17, 40])?);
    println!("{:?}", freiman_check(100, &[0, 10, 20, 30])?);
    Ok(())
}
