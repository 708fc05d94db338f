//! The dilation deficit
//!
//! `D_f(p; g) = (1/N) sum_{a mod N} |S_f(ap) - g S_f(a)|^2`
//!
//! and scans of it over the primes `p <= N^c`.
//!
//! Substituting `a -> a p^{-1}` and expanding with Plancherel gives the exact
//! identity `D = 2(N-1) - 2 g C_f(p)`, where `C_f(p) = sum_m f(m) f(mp mod N)`
//! is an integer correlation. The correlation route is `O(N)` per prime and
//! exact; the spectral route sums the table directly and serves as its
//! cross-check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, jacobi, mf_table, sieve_primes, MultiplicativeFunctionSpec, ValueTable};
use crate::error::{Error, Result};
use crate::expsum::{dft_fast, ExpSumTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeficitBackend {
    /// Sum over the `S_f` table.
    Spectral,
    /// `2(N-1) - 2 g C_f(p)`.
    Correlation,
}

/// How the sign `g(p)` is chosen during a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GMode {
    /// `g(p) = f(p)`.
    Match,
    /// `g(p) = (p/N)`.
    Legendre,
    /// `g(p) = sign C_f(p)`, the minimiser of the deficit.
    Best,
}

impl std::str::FromStr for GMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "match" | "match_f" => Ok(GMode::Match),
            "legendre" => Ok(GMode::Legendre),
            "best" => Ok(GMode::Best),
            other => Err(Error::Usage(format!("unknown g mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeficitQuery {
    pub modulus: u64,
    pub p: u64,
    pub gp: i8,
    pub backend: DeficitBackend,
}

/// The data a deficit is computed from.
#[derive(Debug, Clone, Copy)]
pub enum DeficitData<'a> {
    Spectral(&'a ExpSumTable),
    Correlation(&'a ValueTable),
}

/// `C_f(p) = sum_{m=1}^{N-1} f(m) f(mp mod N)`, exactly.
pub fn correlation(values: &ValueTable, p: u64) -> Result<i64> {
    let n = values.modulus;
    let step = p % n;
    if step == 0 {
        return Err(Error::Domain(format!("{p} is divisible by the modulus {n}")));
    }
    let mut r = 0u64;
    let mut acc = 0i64;
    for m in 1..n {
        r += step;
        if r >= n {
            r -= n;
        }
        acc += (values.get(m) * values.get(r)) as i64;
    }
    Ok(acc)
}

/// `D_f(p; g)` by the requested backend, including the `a = 0` term.
pub fn deficit(query: &DeficitQuery, data: DeficitData<'_>) -> Result<f64> {
    let n = query.modulus;
    if query.p % n == 0 {
        return Err(Error::Domain(format!("{} is divisible by the modulus {n}", query.p)));
    }
    if query.gp != 1 && query.gp != -1 {
        return Err(Error::Usage(format!("g(p) = {} is not ±1", query.gp)));
    }
    match (query.backend, data) {
        (DeficitBackend::Spectral, DeficitData::Spectral(table)) => {
            check_modulus(n, table.modulus)?;
            Ok(spectral_deficit(table, query.p, query.gp))
        }
        (DeficitBackend::Correlation, DeficitData::Correlation(values)) => {
            check_modulus(n, values.modulus)?;
            let c = correlation(values, query.p)?;
            Ok(deficit_from_correlation(n, c, query.gp))
        }
        _ => Err(Error::Usage(
            "deficit backend does not match the supplied data".into(),
        )),
    }
}

fn check_modulus(expected: u64, found: u64) -> Result<()> {
    if expected != found {
        return Err(Error::ModulusMismatch { expected, found });
    }
    Ok(())
}

/// `2(N-1) - 2 g C`.
pub fn deficit_from_correlation(modulus: u64, c: i64, gp: i8) -> f64 {
    (2 * (modulus as i64 - 1) - 2 * gp as i64 * c) as f64
}

fn spectral_deficit(table: &ExpSumTable, p: u64, gp: i8) -> f64 {
    let n = table.modulus;
    let step = p % n;
    let g = gp as f64;
    let mut r = 0u64; // a * p mod n
    let mut acc = 0.0;
    for a in 0..n as usize {
        acc += (table.entries[r as usize] - table.entries[a] * g).norm_sqr();
        r += step;
        if r >= n {
            r -= n;
        }
    }
    acc / n as f64
}

/// One prime of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub correlation: i64,
    pub deficit: f64,
    pub g: i8,
    pub f_at_p: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub modulus: u64,
    pub c: f64,
    pub g_mode: GMode,
    pub backend: DeficitBackend,
    pub records: Vec<PrimeRecord>,
    pub max_deficit: f64,
    /// Prime attaining the maximum, if any prime was scanned.
    pub argmax: Option<u64>,
    /// `N / max_deficit`, absent (reported as ">= N") when the maximum is below 1.
    pub inferred_m: Option<f64>,
    pub sign_changes: usize,
}

impl RigidityReport {
    pub const CSV_HEADER: &'static str = "p,C,deficit,g,deficit_over_N";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.p,
                r.correlation,
                r.deficit,
                r.g,
                r.deficit / self.modulus as f64
            ));
        }
        out
    }

    pub fn inferred_m_label(&self) -> String {
        match self.inferred_m {
            Some(m) => format!("{m}"),
            None => format!(">={}", self.modulus),
        }
    }
}

/// Largest integer `b` with `b <= N^c`.
pub fn prime_bound(modulus: u64, c: f64) -> u64 {
    let target = (modulus as f64).powf(c);
    let mut b = target.floor() as u64;
    while (b as f64) > target {
        b -= 1;
    }
    while ((b + 1) as f64) <= target {
        b += 1;
    }
    b
}

/// Scans `D_f(p; g(p))` over all primes `p <= N^c`.
pub fn rigidity_scan(
    spec: &MultiplicativeFunctionSpec,
    modulus: u64,
    c: f64,
    g_mode: GMode,
    backend: DeficitBackend,
) -> Result<RigidityReport> {
    let values = mf_table(spec, modulus)?;
    scan_table(&values, c, g_mode, backend)
}

/// [`rigidity_scan`] on an already tabulated function.
pub fn scan_table(
    values: &ValueTable,
    c: f64,
    g_mode: GMode,
    backend: DeficitBackend,
) -> Result<RigidityReport> {
    let n = values.modulus;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("exponent c = {c} must lie in (0, 1)")));
    }
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if g_mode == GMode::Legendre && n == 2 {
        return Err(Error::NotOddPrime(2));
    }
    let primes = sieve_primes(prime_bound(n, c)).primes;
    let spectrum = match backend {
        DeficitBackend::Spectral => Some(dft_fast(values)?),
        DeficitBackend::Correlation => None,
    };
    let records = primes
        .par_iter()
        .map(|&p| {
            let corr = correlation(values, p)?;
            let f_at_p = values.get(p);
            let g = match g_mode {
                GMode::Match => f_at_p,
                GMode::Legendre => jacobi(p as i64, n),
                GMode::Best => {
                    if corr >= 0 {
                        1
                    } else {
                        -1
                    }
                }
            };
            let deficit = match &spectrum {
                Some(table) => spectral_deficit(table, p, g),
                None => deficit_from_correlation(n, corr, g),
            };
            Ok(PrimeRecord {
                p,
                correlation: corr,
                deficit,
                g,
                f_at_p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_deficit, argmax) = records
        .iter()
        .fold((0.0f64, None), |(best, arg), r| {
            if arg.is_none() || r.deficit > best {
                (r.deficit, Some(r.p))
            } else {
                (best, arg)
            }
        });
    let inferred_m = (max_deficit >= 1.0).then(|| n as f64 / max_deficit);
    let sign_changes = records.iter().filter(|r| r.g != r.f_at_p).count();
    Ok(RigidityReport {
        modulus: n,
        c,
        g_mode,
        backend,
        records,
        max_deficit,
        argmax,
        inferred_m,
        sign_changes,
    })
}
