use gausslab::cover::{freiman_check, freiman_check_units, FreimanOutcome};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_subsets_near_ten_thousand() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [0usize; 3];
    for m in [9_973u64, 10_000, 10_007, 12_288] {
        for _ in 0..12 {
            let size = match rng.gen_range(0..3) {
                0 => rng.gen_range(2..50),
                1 => rng.gen_range(m as usize / 3..m as usize / 2),
                _ => rng.gen_range(m as usize * 3 / 5..m as usize),
            };
            let set: Vec<u64> = sample(&mut rng, m as usize, size).into_iter().map(|i| i as u64).collect();
            let outcome = freiman_check(m, &set).unwrap();
            seen[outcome as usize] += 1;
        }
    }
    assert!(seen[FreimanOutcome::Grows as usize] > 0);
    assert!(seen[FreimanOutcome::Covers as usize] > 0);
}

#[test]
fn subgroup_cosets_fail_the_precondition() {
    let m = 10_000;
    let coset: Vec<u64> = (0..2_500).map(|i| 3 + 4 * i).collect();
    assert_eq!(freiman_check(m, &coset).unwrap(), FreimanOutcome::PreconditionFailed);
    let q = 10_007;
    let squares: Vec<u64> = (1..q).map(|n| n * n % q).collect();
    assert_eq!(freiman_check_units(q, &squares).unwrap(), FreimanOutcome::PreconditionFailed);
}
