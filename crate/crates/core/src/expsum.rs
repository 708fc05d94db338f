//! Twisted exponential sums `S_f(a) = sum_{1 <= n < N} f(n) e(an/N)` for
//! every residue `a mod N`.
//!
//! Two backends produce the same table: a direct quadratic summation that
//! serves as the reference, and an exact-length FFT (rustfft plans prime
//! lengths through Rader or Bluestein internally, without padding the
//! transform itself).

use std::f64::consts::TAU;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arith::ValueTable;
use crate::error::{Error, Result};

/// Largest modulus accepted by the quadratic backend.
pub const NAIVE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Naive,
    Fft,
}

/// `S_f(0), ..., S_f(N-1)` together with where they came from.
#[derive(Debug, Clone)]
pub struct ExpSumTable {
    pub modulus: u64,
    pub entries: Vec<Complex64>,
    pub backend: Backend,
    pub source: String,
}

impl ExpSumTable {
    /// `S_f(a)` for any integer residue.
    #[inline]
    pub fn at(&self, a: u64) -> Complex64 {
        self.entries[(a % self.modulus) as usize]
    }

    /// `sum_a S_f(a)`, which vanishes because `f` lives on `[1, N-1]`.
    pub fn total(&self) -> Complex64 {
        self.entries.iter().sum()
    }

    /// `sum_a |S_f(a)|^2`; equals `N (N-1)` for ±1 functions.
    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `(1/N) sum_a S_f(a) conj(S_g(a))`, which recovers `sum_n f(n) g(n)`.
    pub fn cross_energy(&self, other: &ExpSumTable) -> Result<f64> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                expected: self.modulus,
                found: other.modulus,
            });
        }
        let s: Complex64 = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x * y.conj())
            .sum();
        Ok(s.re / self.modulus as f64)
    }

    /// Little-endian dump: `u64` modulus, then `N` pairs of `f64` (re, im).
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.modulus.to_le_bytes())?;
        for z in &self.entries {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the format written by [`ExpSumTable::write_binary`].
    pub fn read_binary<R: Read>(mut r: R, source: &str) -> Result<Self> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let modulus = u64::from_le_bytes(word);
        let mut entries = Vec::with_capacity(modulus as usize);
        for _ in 0..modulus {
            r.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            let im = f64::from_le_bytes(word);
            entries.push(Complex64::new(re, im));
        }
        Ok(ExpSumTable {
            modulus,
            entries,
            backend: Backend::Fft,
            source: source.to_string(),
        })
    }
}

/// Direct `O(N^2)` summation with an exact twiddle table.
pub fn dft_naive(values: &ValueTable) -> Result<ExpSumTable> {
    let n = values.modulus;
    if n > NAIVE_LIMIT {
        return Err(Error::TooLarge {
            what: "modulus for naive DFT",
            value: n,
            limit: NAIVE_LIMIT,
        });
    }
    let twiddle = twiddles(n);
    let entries = (0..n)
        .map(|a| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = a % n; // a * m mod n, for m = 1
            for m in 1..n {
                acc += twiddle[idx as usize] * values.get(m) as f64;
                idx += a;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect();
    Ok(ExpSumTable {
        modulus: n,
        entries,
        backend: Backend::Naive,
        source: String::new(),
    })
}

/// Exact-length-`N` FFT evaluation of the same table.
pub fn dft_fast(values: &ValueTable) -> Result<ExpSumTable> {
    let n = values.modulus as usize;
    let mut buf: Vec<Complex64> = Vec::with_capacity(n);
    buf.push(Complex64::new(0.0, 0.0));
    buf.extend(values.values.iter().map(|&v| Complex64::new(v as f64, 0.0)));
    // e(+an/N) is the unnormalised inverse transform
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    fft.process(&mut buf);
    Ok(ExpSumTable {
        modulus: values.modulus,
        entries: buf,
        backend: Backend::Fft,
        source: String::new(),
    })
}

/// Dispatches on [`Backend`].
pub fn expsum(values: &ValueTable, backend: Backend) -> Result<ExpSumTable> {
    match backend {
        Backend::Naive => dft_naive(values),
        Backend::Fft => dft_fast(values),
    }
}

/// `e(k/N)` for `k = 0..N`.
fn twiddles(n: u64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect()
}

/// Single value `S_f(a)` by direct summation, `O(N)`.
pub fn single_sum(values: &ValueTable, a: u64) -> Complex64 {
    let n = values.modulus;
    let twiddle = twiddles(n);
    (1..n)
        .map(|m| twiddle[((a as u128 * m as u128) % n as u128) as usize] * values.get(m) as f64)
        .sum()
}
