//! Closeness of two ±1 multiplicative functions on `[1, N-1]`.

use serde::{Deserialize, Serialize};

use crate::arith::{mf_table, sieve_primes, MultiplicativeFunctionSpec, ValueTable};
use crate::error::{Error, Result};

/// Mean values below this are flagged (informational only).
pub const DELTA1_THRESHOLD: f64 = -2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityConfig {
    /// Constant in the Hall-Tenenbaum functional. Placeholder value; it only
    /// scales a reported number.
    pub kappa: f64,
    pub delta1_threshold: f64,
}

impl Default for ProximityConfig {
    fn default() -> Self {
        ProximityConfig {
            kappa: 0.1,
            delta1_threshold: DELTA1_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub modulus: u64,
    /// `#{n < N : f(n) != psi(n)}`.
    pub distance: u64,
    /// `(1/(N-1)) sum_{n<N} f(n) psi(n)`.
    pub mean: f64,
    /// `sum_{p<N, f(p) != psi(p)} 1/p`.
    pub prime_distance: f64,
    /// `N exp(-kappa sum_{p<N} (1 - f(p) psi(p))/p)`.
    pub ht_bound: f64,
}

impl DistanceReport {
    pub const CSV_HEADER: &'static str = "N,function,psi,distance,mean,prime_distance,ht_bound";

    pub fn csv_row(&self, function: &str, psi: &str) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.modulus, function, psi, self.distance, self.mean, self.prime_distance, self.ht_bound
        )
    }
}

fn same_modulus(f: &ValueTable, g: &ValueTable) -> Result<()> {
    if f.modulus != g.modulus {
        return Err(Error::Usage(format!(
            "tables have different moduli {} and {}",
            f.modulus, g.modulus
        )));
    }
    Ok(())
}

/// Exact count of `n in [1, N-1]` where the two functions differ.
pub fn distance_count(f: &ValueTable, psi: &ValueTable) -> Result<u64> {
    same_modulus(f, psi)?;
    Ok(f.values
        .iter()
        .zip(&psi.values)
        .filter(|(a, b)| a != b)
        .count() as u64)
}

/// `sum_{n<N} f(n) psi(n)`.
pub fn inner_product(f: &ValueTable, psi: &ValueTable) -> Result<i64> {
    same_modulus(f, psi)?;
    Ok(f.values
        .iter()
        .zip(&psi.values)
        .map(|(&a, &b)| (a * b) as i64)
        .sum())
}

pub fn prime_distance(f: &ValueTable, psi: &ValueTable, cfg: &ProximityConfig) -> Result<DistanceReport> {
    same_modulus(f, psi)?;
    if cfg.kappa <= 0.0 {
        return Err(Error::Domain(format!("kappa = {} must be positive", cfg.kappa)));
    }
    let n = f.modulus;
    let distance = distance_count(f, psi)?;
    let mean = inner_product(f, psi)? as f64 / (n - 1) as f64;
    let mut prime_distance = 0.0;
    let mut ht_sum = 0.0;
    // ascending p
    for &p in sieve_primes(n - 1).primes.iter() {
        let agree = f.get(p) * psi.get(p);
        if agree != 1 {
            prime_distance += 1.0 / p as f64;
        }
        ht_sum += (1 - agree) as f64 / p as f64;
    }
    Ok(DistanceReport {
        modulus: n,
        distance,
        mean,
        prime_distance,
        ht_bound: n as f64 * (-cfg.kappa * ht_sum).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub value: f64,
    /// Set when the value falls below the configured threshold.
    pub below_threshold: bool,
}

/// `(1/N) sum_{n<N} f(n)`, flagged against [`DELTA1_THRESHOLD`].
pub fn mean_value(f: &ValueTable) -> MeanValue {
    mean_value_with(f, DELTA1_THRESHOLD)
}

pub fn mean_value_with(f: &ValueTable, threshold: f64) -> MeanValue {
    let sum: i64 = f.values.iter().map(|&v| v as i64).sum();
    let value = sum as f64 / f.modulus as f64;
    MeanValue {
        value,
        below_threshold: value < threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealCharacter {
    Principal,
    Legendre,
}

impl RealCharacter {
    pub fn spec(self, modulus: u64) -> MultiplicativeFunctionSpec {
        match self {
            RealCharacter::Principal => MultiplicativeFunctionSpec::Principal,
            RealCharacter::Legendre => MultiplicativeFunctionSpec::Legendre(modulus),
        }
    }
}

/// The real character modulo the prime `N` maximising `(1/N) sum f psi`.
/// Ties go to the principal character.
pub fn best_real_character(f: &ValueTable) -> Result<(RealCharacter, f64)> {
    let n = f.modulus;
    if n == 2 {
        let v = inner_product(f, &mf_table(&MultiplicativeFunctionSpec::Principal, 2)?)?;
        return Ok((RealCharacter::Principal, v as f64 / 2.0));
    }
    let mut best = None;
    for ch in [RealCharacter::Principal, RealCharacter::Legendre] {
        let psi = mf_table(&ch.spec(n), n)?;
        let v = inner_product(f, &psi)? as f64 / n as f64;
        match best {
            Some((_, b)) if b >= v => {}
            _ => best = Some((ch, v)),
        }
    }
    Ok(best.expect("two candidates"))
}
