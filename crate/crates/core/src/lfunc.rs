//! Real-axis diagnostics for `L(s, chi)`, `chi` the Legendre symbol modulo a
//! prime `N`.
//!
//! `L(s, chi)` is split at a multiple `X0` of `N`: the head
//! `sum_{n <= X0} chi(n) n^-s` is summed directly and the tail is regrouped
//! by residue class, `sum_a chi(a) sum_{m >= 0} (X0 + a + mN)^-s`, with each
//! inner sum evaluated by Euler-Maclaurin. Because `sum_a chi(a) = 0` the
//! divergent leading terms cancel, so the same formula holds for every
//! `s > 0`, including `s < 1` and `s = 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, jacobi, mf_table, sieve_primes, MultiplicativeFunctionSpec};
use crate::error::{Error, Result};
use crate::proximity::inner_product;

/// Largest modulus accepted by the table-based routines.
pub const MODULUS_LIMIT: u64 = 10_000_000;

/// `B_2, B_4, ..., B_24`.
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

fn check_modulus(n: u64) -> Result<()> {
    if n % 2 == 0 || !is_prime(n) {
        return Err(Error::NotOddPrime(n));
    }
    if n > MODULUS_LIMIT {
        return Err(Error::TooLarge {
            what: "modulus",
            value: n,
            limit: MODULUS_LIMIT,
        });
    }
    Ok(())
}

fn chi_table(n: u64) -> Vec<i8> {
    (0..n).map(|a| jacobi(a as i64, n)).collect()
}

/// Partial sums `T(X) = sum_{n <= X} chi(n)` for `X = 1..N-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharSumTable {
    pub modulus: u64,
    /// `partial[X-1] = T(X)`.
    pub partial: Vec<i64>,
    pub max_abs: i64,
    /// `max_{X >= N^(1/4 + delta)} |T(X)| / (X N^(-delta^2/2))`.
    pub burgess_ratio: Option<f64>,
}

pub fn char_partial_sums(n: u64, delta: f64) -> Result<CharSumTable> {
    check_modulus(n)?;
    let mut partial = Vec::with_capacity(n as usize - 1);
    let mut t = 0i64;
    for x in 1..n {
        t += jacobi(x as i64, n) as i64;
        partial.push(t);
    }
    let max_abs = partial.iter().map(|v| v.abs()).max().unwrap_or(0);
    let nf = n as f64;
    let start = nf.powf(0.25 + delta).ceil().max(1.0) as u64;
    let scale = nf.powf(-delta * delta / 2.0);
    let burgess_ratio = (start..n)
        .map(|x| partial[x as usize - 1].abs() as f64 / (x as f64 * scale))
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    Ok(CharSumTable {
        modulus: n,
        partial,
        max_abs,
        burgess_ratio,
    })
}

/// Parameters of an `L(s, chi)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValueQuery {
    pub modulus: u64,
    pub s: f64,
    /// The head runs over `X0 = N * periods` terms (at least 64 terms).
    pub periods: u64,
    /// Euler-Maclaurin correction terms (at most 12).
    pub em_terms: usize,
}

impl LValueQuery {
    pub fn new(modulus: u64, s: f64) -> Self {
        LValueQuery {
            modulus,
            s,
            periods: 8,
            em_terms: 10,
        }
    }
}

/// Reusable evaluator for one modulus.
#[derive(Debug, Clone)]
pub struct LFunction {
    modulus: u64,
    chi: Vec<i8>,
}

impl LFunction {
    pub fn new(modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(LFunction {
            modulus,
            chi: chi_table(modulus),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `L(s, chi)` with the default truncation.
    pub fn value(&self, s: f64) -> Result<f64> {
        self.value_with(s, 8, 10)
    }

    pub fn value_with(&self, s: f64, periods: u64, em_terms: usize) -> Result<f64> {
        if !(s > 0.05) {
            return Err(Error::Domain(format!("s = {s} must exceed 0.05")));
        }
        if em_terms > BERNOULLI.len() {
            return Err(Error::Domain(format!("at most {} correction terms", BERNOULLI.len())));
        }
        let n = self.modulus;
        let periods = periods.max(1).max(64u64.div_ceil(n));
        let x0 = n * periods;

        let mut head = 0.0;
        for m in 1..=x0 {
            let c = self.chi[(m % n) as usize];
            if c != 0 {
                head += c as f64 * (-s * (m as f64).ln()).exp();
            }
        }

        let nf = n as f64;
        let x0f = x0 as f64;
        let mut tail = 0.0;
        for a in 1..n {
            let c = self.chi[a as usize] as f64;
            let big_a = x0f + a as f64;
            // integral term, with the common X0^(1-s)/((s-1)N) removed (sum chi = 0)
            let l = (big_a / x0f).ln();
            let t = (1.0 - s) * l;
            let ratio = if t.abs() < 1e-12 { 1.0 } else { t.exp_m1() / t };
            let integral = -x0f.powf(1.0 - s) * l * ratio / nf;
            let a_pow = big_a.powf(-s);
            let mut sum = integral + 0.5 * a_pow;
            // B_2k / (2k)! * (s)_{2k-1} * N^{2k-1} * A^{-s-2k+1}
            let mut rising = s; // (s)_{1}
            let mut fact = 2.0; // (2k)!
            let mut scale = nf / big_a;
            for k in 1..=em_terms {
                sum += BERNOULLI[k - 1] / fact * rising * scale * a_pow;
                let j = 2 * k as u32;
                rising *= (s + j as f64 - 1.0) * (s + j as f64);
                fact *= (j + 1) as f64 * (j + 2) as f64;
                scale *= (nf / big_a) * (nf / big_a);
            }
            tail += c * sum;
        }
        Ok(head + tail)
    }
}

/// `L(s, chi)` for the Legendre character modulo `q.modulus`.
pub fn l_value(query: &LValueQuery) -> Result<f64> {
    LFunction::new(query.modulus)?.value_with(query.s, query.periods, query.em_terms)
}

/// A real zero located by a sign change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealZero {
    pub beta: f64,
    /// `(1 - beta) log N`.
    pub scaled_gap: f64,
}

/// Grid step of the zero scan.
pub const SCAN_STEP: f64 = 1e-3;

/// Sign changes of `s -> L(s, chi)` on `[sigma_min, 1]`, refined to width `1e-8`.
pub fn real_zero_scan(n: u64, sigma_min: f64) -> Result<Vec<RealZero>> {
    if !(0.5..1.0).contains(&sigma_min) {
        return Err(Error::Domain(format!("sigma_min = {sigma_min} must lie in [0.5, 1)")));
    }
    let l = LFunction::new(n)?;
    let steps = ((1.0 - sigma_min) / SCAN_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (sigma_min + i as f64 * SCAN_STEP).min(1.0))
        .collect();
    let values = grid
        .par_iter()
        .map(|&s| l.value(s))
        .collect::<Result<Vec<f64>>>()?;
    let log_n = (n as f64).ln();
    let mut zeros = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            zeros.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && values[i].signum() != values[i + 1].signum() {
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            let lo_sign = values[i].signum();
            while hi - lo > 1e-8 {
                let mid = 0.5 * (lo + hi);
                if l.value(mid)?.signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
    }
    zeros.dedup();
    Ok(zeros
        .into_iter()
        .map(|beta| RealZero {
            beta,
            scaled_gap: (1.0 - beta) * log_n,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiPrimeSum {
    /// `sum_{p<N} chi(p)/p`.
    pub sum: f64,
    /// `prod_{p<N} (1 - chi(p)/p)^-1`.
    pub euler_l1: f64,
    /// `L(1, chi)`.
    pub direct_l1: f64,
}

pub fn chi_prime_sum(n: u64) -> Result<ChiPrimeSum> {
    check_modulus(n)?;
    let mut sum = 0.0;
    let mut log_euler = 0.0;
    for &p in sieve_primes(n - 1).primes.iter() {
        let c = jacobi(p as i64, n) as f64;
        sum += c / p as f64;
        log_euler -= (-c / p as f64).ln_1p();
    }
    Ok(ChiPrimeSum {
        sum,
        euler_l1: log_euler.exp(),
        direct_l1: LFunction::new(n)?.value(1.0)?,
    })
}

/// One row of the Liouville-versus-character pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRow {
    pub modulus: u64,
    /// `(1/N) sum_{n<N} lambda(n) chi(n)`.
    pub lambda_chi_mean: f64,
    pub chi_prime_sum: f64,
    pub l1_direct: f64,
    pub l1_euler: f64,
    pub num_real_zeros: usize,
    /// Smallest `(1 - beta) log N` among the zeros found.
    pub min_scaled_gap: Option<f64>,
}

impl CorollaryRow {
    pub const CSV_HEADER: &'static str =
        "N,lambda_chi_mean,chi_prime_sum,L1_direct,L1_euler,num_real_zeros,min_one_minus_beta_log_N";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.modulus,
            self.lambda_chi_mean,
            self.chi_prime_sum,
            self.l1_direct,
            self.l1_euler,
            self.num_real_zeros,
            self.min_scaled_gap.map_or(String::new(), |g| g.to_string())
        )
    }
}

pub fn corollary_row(n: u64, sigma_min: f64) -> Result<CorollaryRow> {
    let lam = mf_table(&MultiplicativeFunctionSpec::Liouville, n)?;
    let chi = mf_table(&MultiplicativeFunctionSpec::Legendre(n), n)?;
    let mean = inner_product(&lam, &chi)? as f64 / n as f64;
    let sums = chi_prime_sum(n)?;
    let zeros = real_zero_scan(n, sigma_min)?;
    Ok(CorollaryRow {
        modulus: n,
        lambda_chi_mean: mean,
        chi_prime_sum: sums.sum,
        l1_direct: sums.direct_l1,
        l1_euler: sums.euler_l1,
        num_real_zeros: zeros.len(),
        min_scaled_gap: zeros.iter().map(|z| z.scaled_gap).reduce(f64::min),
    })
}
