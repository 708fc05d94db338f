//! Integers whose prime factors all lie in `(z, y]`.
//!
//! `Theta(x, y, z; q, a)` counts `n <= x`, `n = a (mod q)`, with every prime
//! factor in `(z, y]` (and optionally in a prescribed prime set). `n = 1`
//! always counts. The exact counts come from a segmented sieve; the
//! saddle point `alpha(x, y, z)` solves
//! `sum_{z<p<=y} log p / (p^alpha - 1) = log x` and feeds the estimate
//! `x^alpha zeta(alpha, y, z) / sqrt(log x log y)`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, sieve_primes};
use crate::error::{Error, Result};

/// Largest `x` the sieve accepts.
pub const SIEVE_LIMIT: u64 = 100_000_000;

const SEGMENT: u64 = 1 << 16;

/// Extra condition a prime factor must satisfy.
pub type PrimeFilter = Arc<dyn Fn(u64) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct FriableQuery {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    /// `(q, a)`: restrict to `n = a (mod q)`.
    pub progression: Option<(u64, u64)>,
    pub allowed: Option<PrimeFilter>,
}

impl fmt::Debug for FriableQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FriableQuery")
            .field("x", &self.x)
            .field("y", &self.y)
            .field("z", &self.z)
            .field("progression", &self.progression)
            .field("allowed", &self.allowed.as_ref().map(|_| "<filter>"))
            .finish()
    }
}

impl FriableQuery {
    pub fn new(x: u64, y: u64, z: u64) -> Self {
        FriableQuery {
            x,
            y,
            z,
            progression: None,
            allowed: None,
        }
    }

    pub fn in_progression(mut self, q: u64, a: u64) -> Self {
        self.progression = Some((q, a));
        self
    }

    pub fn restricted_to(mut self, filter: PrimeFilter) -> Self {
        self.allowed = Some(filter);
        self
    }

    /// `log x / log y`.
    pub fn u(&self) -> f64 {
        (self.x as f64).ln() / (self.y as f64).ln()
    }

    /// `log x / log z`.
    pub fn v(&self) -> f64 {
        (self.x as f64).ln() / (self.z as f64).ln()
    }

    /// `log x / log q`, when a modulus is present.
    pub fn w(&self) -> Option<f64> {
        self.progression
            .map(|(q, _)| (self.x as f64).ln() / (q as f64).ln())
    }

    fn validate(&self) -> Result<()> {
        if self.x > SIEVE_LIMIT {
            return Err(Error::TooLarge {
                what: "x",
                value: self.x,
                limit: SIEVE_LIMIT,
            });
        }
        if !(1 <= self.z && self.z <= self.y) {
            return Err(Error::Domain(format!(
                "need 1 <= z <= y, got x={}, y={}, z={}",
                self.x, self.y, self.z
            )));
        }
        if let Some((q, a)) = self.progression {
            if q == 0 || (q > 1 && !(1..q).contains(&a)) {
                return Err(Error::Domain(format!("residue {a} must lie in [1, {q})")));
            }
        }
        Ok(())
    }
}

/// Counts of qualifying `n <= x` by residue modulo `q` (`q = 1` gives the total).
fn sieve_residue_counts(x: u64, y: u64, z: u64, allowed: Option<&PrimeFilter>, q: u64) -> Vec<u64> {
    let ok_prime = |p: u64| p > z && p <= y && allowed.map_or(true, |f| f(p));
    let root = (x as f64).sqrt() as u64 + 1;
    let small: Vec<(u64, bool)> = sieve_primes(root)
        .primes
        .into_iter()
        .map(|p| (p, ok_prime(p)))
        .collect();
    let segments: Vec<u64> = (0..x.div_ceil(SEGMENT)).collect();
    segments
        .par_iter()
        .fold(
            || vec![0u64; q as usize],
            |mut counts, &s| {
                let lo = 1 + s * SEGMENT;
                let hi = (lo + SEGMENT).min(x + 1);
                let len = (hi - lo) as usize;
                let mut rem: Vec<u32> = (lo..hi).map(|n| n as u32).collect();
                let mut good = vec![true; len];
                for &(p, allowed_p) in &small {
                    if p * p >= hi {
                        break;
                    }
                    let first = lo.div_ceil(p) * p;
                    let mut m = first;
                    while m < hi {
                        let i = (m - lo) as usize;
                        if allowed_p {
                            let pp = p as u32;
                            while rem[i] % pp == 0 {
                                rem[i] /= pp;
                            }
                        } else {
                            good[i] = false;
                        }
                        m += p;
                    }
                }
                for i in 0..len {
                    if !good[i] {
                        continue;
                    }
                    let r = rem[i] as u64;
                    if r > 1 && !ok_prime(r) {
                        continue;
                    }
                    let n = lo + i as u64;
                    counts[(n % q) as usize] += 1;
                }
                counts
            },
        )
        .reduce(
            || vec![0u64; q as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Exact `Theta(x, y, z; q, a)`, optionally restricted to allowed primes.
pub fn theta_count(query: &FriableQuery) -> Result<u64> {
    query.validate()?;
    if query.x == 0 {
        return Ok(0);
    }
    let (q, a) = query.progression.unwrap_or((1, 0));
    let counts = sieve_residue_counts(query.x, query.y, query.z, query.allowed.as_ref(), q);
    Ok(counts[(a % q) as usize])
}

/// `Psi(x, y)`, the number of `y`-friable `n <= x`.
pub fn psi_count(x: u64, y: u64) -> Result<u64> {
    theta_count(&FriableQuery::new(x, y.max(1), 1))
}

/// Solution of `sum_{z<p<=y} log p / (p^alpha - 1) = log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddlePoint {
    pub alpha: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Primes of `(z, y]` prepared for repeated saddle-point solves.
#[derive(Debug, Clone)]
pub struct SaddleSolver {
    logs: Vec<f64>,
}

impl SaddleSolver {
    pub fn new(y: u64, z: u64) -> Result<Self> {
        let table = sieve_primes(y);
        let logs: Vec<f64> = table
            .in_range(z, y)
            .iter()
            .map(|&p| (p as f64).ln())
            .collect();
        if logs.is_empty() {
            return Err(Error::Domain(format!("no prime in ({z}, {y}]")));
        }
        Ok(SaddleSolver { logs })
    }

    /// `sum log p / (p^sigma - 1)`, strictly decreasing in `sigma`.
    pub fn h(&self, sigma: f64) -> f64 {
        self.logs.iter().map(|&l| l / (sigma * l).exp_m1()).sum()
    }

    fn dh(&self, sigma: f64) -> f64 {
        self.logs
            .iter()
            .map(|&l| {
                let e = (sigma * l).exp_m1();
                -l * l * (e + 1.0) / (e * e)
            })
            .sum()
    }

    pub fn solve_log(&self, log_x: f64) -> Result<SaddlePoint> {
        if !(log_x > 0.0) {
            return Err(Error::Domain(format!("log x = {log_x} must be positive")));
        }
        let (mut lo, mut hi) = (0.05f64, 1.5f64);
        while self.h(lo) < log_x {
            lo /= 2.0;
            if lo < 1e-300 {
                return Err(Error::Domain("saddle point below representable range".into()));
            }
        }
        while self.h(hi) > log_x {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::Domain("saddle point above representable range".into()));
            }
        }
        let mut iterations = 0;
        while hi - lo > 1e-6 * hi {
            let mid = 0.5 * (lo + hi);
            if self.h(mid) > log_x {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        let mut sigma = 0.5 * (lo + hi);
        for _ in 0..100 {
            iterations += 1;
            let step = (self.h(sigma) - log_x) / self.dh(sigma);
            let mut next = sigma - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if self.h(next) > log_x {
                lo = next;
            } else {
                hi = next;
            }
            let done = (next - sigma).abs() <= 1e-12 * next.abs();
            sigma = next;
            if done {
                break;
            }
        }
        Ok(SaddlePoint {
            alpha: sigma,
            residual: (self.h(sigma) - log_x).abs(),
            iterations,
        })
    }
}

/// `alpha(x, y, z)`.
pub fn solve_alpha(x: f64, y: u64, z: u64) -> Result<SaddlePoint> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("x = {x} must exceed 1")));
    }
    SaddleSolver::new(y, z)?.solve_log(x.ln())
}

/// `zeta(sigma, y, z) = prod_{z<p<=y} (1 - p^-sigma)^-1`.
pub fn zeta_partial(sigma: f64, y: u64, z: u64) -> Result<f64> {
    Ok(log_zeta_partial(sigma, y, z)?.exp())
}

fn log_zeta_partial(sigma: f64, y: u64, z: u64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
    }
    if z >= y {
        return Ok(0.0);
    }
    Ok(sieve_primes(y)
        .in_range(z, y)
        .iter()
        .map(|&p| -(-(-sigma * (p as f64).ln()).exp()).ln_1p())
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaiasComparison {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    /// Absent when `(z, y]` holds no prime.
    pub saddle: Option<SaddlePoint>,
    pub brute: u64,
    pub estimate: f64,
    pub ratio: f64,
}

impl SaiasComparison {
    pub const CSV_HEADER: &'static str = "x,y,z,alpha,residual,brute,estimate,ratio";

    pub fn csv_row(&self) -> String {
        let (alpha, residual) = self
            .saddle
            .map_or((f64::NAN, f64::NAN), |s| (s.alpha, s.residual));
        format!(
            "{},{},{},{},{},{},{},{}",
            self.x, self.y, self.z, alpha, residual, self.brute, self.estimate, self.ratio
        )
    }
}

/// Exact `Theta(x, y, z)` against `x^alpha zeta(alpha, y, z) / sqrt(log x log y)`.
///
/// With no prime in `(z, y]` the saddle point does not exist; the estimate is
/// then evaluated at `alpha = 0`, where the Euler product is empty.
pub fn saias_compare(x: u64, y: u64, z: u64) -> Result<SaiasComparison> {
    let brute = theta_count(&FriableQuery::new(x, y, z))?;
    let log_x = (x as f64).ln();
    let norm = 0.5 * (log_x * (y as f64).ln()).ln();
    let saddle = match SaddleSolver::new(y, z) {
        Ok(solver) => Some(solver.solve_log(log_x)?),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    let log_estimate = match saddle {
        Some(s) => s.alpha * log_x + log_zeta_partial(s.alpha, y, z)? - norm,
        None => -norm,
    };
    let estimate = log_estimate.exp();
    Ok(SaiasComparison {
        x,
        y,
        z,
        saddle,
        brute,
        estimate,
        ratio: brute as f64 / estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionReport {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub q: u64,
    /// `counts[a]` for `a = 0..q`; index 0 holds the multiples of `q`.
    pub counts: Vec<u64>,
    pub total: u64,
    pub min: u64,
    pub max: u64,
    /// Mean over the unit residues `1..q`.
    pub mean: f64,
    /// `(max - min) / mean` over the unit residues.
    pub relative_spread: f64,
    /// `q <= y`: multiples of `q` can qualify and land in the zero bucket.
    pub zero_bucket_needed: bool,
    /// `x / q < 1000`.
    pub sparse: bool,
    /// `sum_a counts[a] == total`, checked against an independent sieve pass.
    pub partition_holds: bool,
}

impl EquidistributionReport {
    pub const CSV_HEADER: &'static str = "a,count";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let start = if self.zero_bucket_needed { 0 } else { 1 };
        for a in start..self.q as usize {
            out.push_str(&format!("{},{}\n", a, self.counts[a]));
        }
        out
    }
}

/// Per-residue `Theta(x, y, z; q, a)` for every `a mod q`.
pub fn equidistribution_report(x: u64, y: u64, z: u64, q: u64) -> Result<EquidistributionReport> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let query = FriableQuery::new(x, y, z).in_progression(q, 1);
    query.validate()?;
    let counts = sieve_residue_counts(x, y, z, None, q);
    let total = theta_count(&FriableQuery::new(x, y, z))?;
    let units = &counts[1..];
    let min = units.iter().copied().min().unwrap_or(0);
    let max = units.iter().copied().max().unwrap_or(0);
    let mean = units.iter().sum::<u64>() as f64 / units.len().max(1) as f64;
    let relative_spread = if mean > 0.0 { (max - min) as f64 / mean } else { f64::NAN };
    Ok(EquidistributionReport {
        x,
        y,
        z,
        q,
        partition_holds: counts.iter().sum::<u64>() == total,
        counts,
        total,
        min,
        max,
        mean,
        relative_spread,
        zero_bucket_needed: q <= y,
        sparse: x / q < 1000,
    })
}
