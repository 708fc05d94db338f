//! Primes, smallest-prime-factor tables, the Legendre symbol and ±1-valued
//! completely multiplicative functions.
//!
//! A completely multiplicative `f: N -> {-1,+1}` is determined by its values
//! on primes. [`MultiplicativeFunctionSpec`] is that rule; [`mf_table`]
//! extends it to `[1, N-1]` in linear time through the smallest-prime-factor
//! recursion `f(n) = f(spf(n)) * f(n / spf(n))`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `p` with `lo < p <= hi` (clamped to the table).
    pub fn in_range(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p <= lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        &self.primes[start..end.max(start)]
    }

    /// Primes strictly below `bound`.
    pub fn below(&self, bound: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p < bound);
        &self.primes[..end]
    }
}

/// Sieve of Eratosthenes over odd numbers.
pub fn sieve_primes(limit: u64) -> PrimeTable {
    let mut primes = Vec::new();
    if limit >= 2 {
        primes.push(2);
    }
    if limit >= 3 {
        // index i represents 2i + 1
        let half = (limit as usize - 1) / 2 + 1;
        let mut composite = vec![false; half];
        let mut i = 1;
        while (2 * i + 1) * (2 * i + 1) <= limit as usize {
            if !composite[i] {
                let p = 2 * i + 1;
                let mut j = (p * p - 1) / 2;
                while j < half {
                    composite[j] = true;
                    j += p;
                }
            }
            i += 1;
        }
        primes.extend(
            (1..half)
                .filter(|&i| !composite[i])
                .map(|i| (2 * i + 1) as u64),
        );
    }
    PrimeTable { limit, primes }
}

/// Smallest-prime-factor table built by the linear sieve.
#[derive(Debug, Clone)]
pub struct FactorTable {
    pub limit: u64,
    spf: Vec<u32>,
}

impl FactorTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        if n >= 1 {
            spf[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        FactorTable { limit, spf }
    }

    /// Smallest prime factor of `n` (1 for `n = 1`).
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.spf
    }
}

/// Prime factorization of `n` as ascending `(prime, exponent)` pairs.
pub fn factorize(n: u64, table: &FactorTable) -> Result<Vec<(u64, u32)>> {
    if n == 0 || n > table.limit {
        return Err(Error::OutOfRange {
            n,
            limit: table.limit,
        });
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    while m > 1 {
        let p = table.spf(m);
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
        m /= p;
    }
    Ok(out)
}

/// Total number of prime factors counted with multiplicity.
pub fn big_omega(factors: &[(u64, u32)]) -> u32 {
    factors.iter().map(|&(_, e)| e).sum()
}

/// Largest prime factor, with `P+(1) = 1`.
pub fn largest_prime_factor(factors: &[(u64, u32)]) -> u64 {
    factors.last().map_or(1, |&(p, _)| p)
}

/// Smallest prime factor, with `P-(1) = 1`.
pub fn smallest_prime_factor(factors: &[(u64, u32)]) -> u64 {
    factors.first().map_or(1, |&(p, _)| p)
}

/// Factorization by trial division, for values beyond any table.
pub fn factorize_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p` (Fermat).
pub fn inv_mod_prime(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Jacobi symbol `(a / m)` for odd `m`, via quadratic reciprocity.
pub fn jacobi(a: i64, m: u64) -> i8 {
    debug_assert!(m % 2 == 1);
    let mut a = a.rem_euclid(m as i64) as u64;
    let mut m = m;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Legendre symbol `(n / modulus)`; `modulus` must be an odd prime.
pub fn legendre_symbol(n: i64, modulus: u64) -> Result<i8> {
    if modulus % 2 == 0 || !is_prime(modulus) {
        return Err(Error::NotOddPrime(modulus));
    }
    Ok(jacobi(n, modulus))
}

/// Rule fixing a ±1-valued completely multiplicative function by its values
/// on primes.
///
/// Legendre characters are modelled as non-vanishing: the prime equal to the
/// modulus is assigned `+1`, which never matters on `[1, N-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultiplicativeFunctionSpec {
    /// `lambda(p) = -1` for every prime.
    Liouville,
    /// The quadratic character modulo the given odd prime.
    Legendre(u64),
    /// The constant function 1.
    Principal,
    /// `base` with the sign flipped at each prime of the set.
    Flip {
        base: Box<MultiplicativeFunctionSpec>,
        primes: BTreeSet<u64>,
    },
    /// Explicit values on consecutive primes 2, 3, 5, ...
    Table(Vec<i8>),
}

impl MultiplicativeFunctionSpec {
    pub fn flip(base: MultiplicativeFunctionSpec, primes: impl IntoIterator<Item = u64>) -> Self {
        MultiplicativeFunctionSpec::Flip {
            base: Box::new(base),
            primes: primes.into_iter().collect(),
        }
    }

    /// Parses the compact grammar `liouville | legendre | principal |
    /// flip:p1,p2,... | file:<path>`. `modulus` resolves `legendre` and the
    /// base of `flip`.
    pub fn parse(text: &str, modulus: u64) -> Result<Self> {
        let text = text.trim();
        match text {
            "liouville" => return Ok(Self::Liouville),
            "legendre" => return Ok(Self::Legendre(modulus)),
            "principal" => return Ok(Self::Principal),
            _ => {}
        }
        if let Some(list) = text.strip_prefix("flip:") {
            let mut primes = BTreeSet::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let p: u64 = item.parse().map_err(|_| Error::Parse(text.to_string()))?;
                if !is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                primes.insert(p);
            }
            return Ok(Self::Flip {
                base: Box::new(Self::Legendre(modulus)),
                primes,
            });
        }
        if let Some(path) = text.strip_prefix("file:") {
            return Self::from_file(path);
        }
        Err(Error::Parse(text.to_string()))
    }

    /// Reads one `±1` per line, assigned to consecutive primes starting at 2.
    /// Blank lines and `#` comments are skipped.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let body = std::fs::read_to_string(path.as_ref())?;
        Self::from_lines(&body)
    }

    pub fn from_lines(body: &str) -> Result<Self> {
        let mut values = Vec::new();
        for line in body.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: i8 = match line {
                "1" | "+1" => 1,
                "-1" => -1,
                _ => return Err(Error::Parse(line.to_string())),
            };
            values.push(v);
        }
        Ok(Self::Table(values))
    }

    /// Value at the prime `p`.
    pub fn prime_value(&self, p: u64) -> Result<i8> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let index = if self.needs_prime_index() {
            sieve_primes(p).len() - 1
        } else {
            0
        };
        self.prime_value_at(p, index)
    }

    /// Value at the prime `p`, given its zero-based position among the primes.
    pub(crate) fn prime_value_at(&self, p: u64, index: usize) -> Result<i8> {
        Ok(match self {
            Self::Liouville => -1,
            Self::Principal => 1,
            Self::Legendre(m) => match jacobi(p as i64, *m) {
                0 => 1,
                s => s,
            },
            Self::Flip { base, primes } => {
                let v = base.prime_value_at(p, index)?;
                if primes.contains(&p) {
                    -v
                } else {
                    v
                }
            }
            Self::Table(values) => *values.get(index).ok_or(Error::MissingPrimeValue(p))?,
        })
    }

    fn needs_prime_index(&self) -> bool {
        match self {
            Self::Table(_) => true,
            Self::Flip { base, .. } => base.needs_prime_index(),
            _ => false,
        }
    }

    /// Value at any positive integer, by trial-division factorization.
    pub fn eval(&self, n: u64) -> Result<i8> {
        let mut v = 1i8;
        for (p, e) in factorize_trial(n) {
            if e % 2 == 1 {
                v *= self.prime_value(p)?;
            }
        }
        Ok(v)
    }

    /// Short identifier used in reports and CSV rows.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MultiplicativeFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Liouville => write!(f, "liouville"),
            Self::Legendre(m) => write!(f, "legendre({m})"),
            Self::Principal => write!(f, "principal"),
            Self::Flip { base, primes } => {
                let list: Vec<String> = primes.iter().map(u64::to_string).collect();
                write!(f, "flip({base};{})", list.join(","))
            }
            Self::Table(values) => write!(f, "table[{}]", values.len()),
        }
    }
}

/// Values `f(1), ..., f(N-1)` of a ±1 function at a prime modulus `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTable {
    pub modulus: u64,
    pub values: Vec<i8>,
}

impl ValueTable {
    /// Wraps raw values `f(1..N)`; checks length and the ±1 range.
    pub fn from_values(modulus: u64, values: Vec<i8>) -> Result<Self> {
        if modulus < 2 || values.len() as u64 != modulus - 1 {
            return Err(Error::Usage(format!(
                "value table for modulus {modulus} needs {} entries, got {}",
                modulus.saturating_sub(1),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::Usage(format!("table value {bad} is not ±1")));
        }
        Ok(ValueTable { modulus, values })
    }

    /// `f(n)` for `1 <= n < N`.
    #[inline]
    pub fn get(&self, n: u64) -> i8 {
        self.values[n as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The pointwise negation `-f`.
    pub fn negated(&self) -> Self {
        ValueTable {
            modulus: self.modulus,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Tabulates `spec` on `[1, N-1]` by the smallest-prime-factor recursion.
pub fn mf_table(spec: &MultiplicativeFunctionSpec, modulus: u64) -> Result<ValueTable> {
    if !is_prime(modulus) {
        return Err(Error::NotPrime(modulus));
    }
    check_modulus(spec, modulus)?;
    let n = modulus as usize;
    let mut values = vec![0i8; n.max(1)]; // values[k] = f(k), k < N
    let mut primes: Vec<usize> = Vec::new();
    let mut spf = vec![0u32; n];
    if n > 1 {
        values[1] = 1;
    }
    for i in 2..n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i);
            values[i] = spec.prime_value_at(i as u64, primes.len() - 1)?;
        }
        let si = spf[i] as usize;
        for &p in &primes {
            let m = i * p;
            if p > si || m >= n {
                break;
            }
            spf[m] = p as u32;
            values[m] = values[p] * values[i];
        }
    }
    values.remove(0);
    Ok(ValueTable { modulus, values })
}

fn check_modulus(spec: &MultiplicativeFunctionSpec, modulus: u64) -> Result<()> {
    match spec {
        MultiplicativeFunctionSpec::Legendre(m) => {
            if *m != modulus {
                return Err(Error::ModulusMismatch {
                    expected: modulus,
                    found: *m,
                });
            }
            if *m == 2 {
                return Err(Error::NotOddPrime(2));
            }
            Ok(())
        }
        MultiplicativeFunctionSpec::Flip { base, .. } => check_modulus(base, modulus),
        _ => Ok(()),
    }
}

/// Number of prime factors of `n` (with multiplicity) lying in `set`.
pub fn omega_in(n: u64, set: &BTreeSet<u64>) -> u32 {
    factorize_trial(n)
        .into_iter()
        .filter(|(p, _)| set.contains(p))
        .map(|(_, e)| e)
        .sum()
}
