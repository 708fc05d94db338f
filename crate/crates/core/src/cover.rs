//! Covering `(Z/qZ)^*` by products of small primes.
//!
//! `P^(k)` is the set of residues `p_1 ... p_k mod q` with every `p_i < X`.
//! Levels are grown by pulling: `r` belongs to `P^(k+1)` iff `r p^{-1}`
//! belongs to `P^(k)` for some prime `p < X`. Scanning primes in ascending
//! order makes the recorded witness of each residue independent of the
//! thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize_trial, inv_mod_prime, is_prime, jacobi, mul_mod, pow_mod, sieve_primes};
use crate::error::{Error, Result};

/// Residue sets are bitsets over `0..q`; this caps their size.
pub const MAX_MODULUS: u64 = 1 << 26;

const NO_PRED: u32 = u32::MAX;

/// Fixed-size bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    len: usize,
    words: Vec<u64>,
}

impl ResidueSet {
    pub fn new(len: usize) -> Self {
        ResidueSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    pub fn contains(&self, r: u64) -> bool {
        let r = r as usize;
        r < self.len && self.words[r / 64] >> (r % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, r: u64) -> bool {
        let r = r as usize;
        let mask = 1u64 << (r % 64);
        let fresh = self.words[r / 64] & mask == 0;
        self.words[r / 64] |= mask;
        fresh
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &ResidueSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(i as u64 * 64 + b)
            })
        })
    }
}

/// Exact-`k` product levels, their running union and one witness product
/// per covered residue.
#[derive(Debug, Clone)]
pub struct CoverState {
    pub q: u64,
    pub x_bound: u64,
    /// Primes `p < X` that are units modulo `q`.
    pub primes: Vec<u64>,
    /// `levels[k-1] = P^(k)`.
    pub levels: Vec<ResidueSet>,
    /// `cumulative[k-1] = P^(1) u ... u P^(k)`.
    pub cumulative: Vec<ResidueSet>,
    /// Set when no prime below `X` is available, so every level is empty.
    pub no_primes: bool,
    pred: Vec<u32>,
    via: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub k: usize,
    pub level_size: usize,
    pub cumulative_size: usize,
    pub coverage_fraction: f64,
}

impl CoverState {
    pub const CSV_HEADER: &'static str = "k,level_size,cumulative_size,coverage_fraction";

    pub fn group_order(&self) -> usize {
        self.q as usize - 1
    }

    /// Least `k` at which the running union is all of `(Z/qZ)^*`.
    pub fn minimal_cover_k(&self) -> Option<usize> {
        let full = self.group_order();
        self.cumulative.iter().position(|c| c.count() == full).map(|i| i + 1)
    }

    pub fn coverage_rows(&self) -> Vec<CoverageRow> {
        let full = self.group_order() as f64;
        self.levels
            .iter()
            .zip(&self.cumulative)
            .enumerate()
            .map(|(i, (l, c))| CoverageRow {
                k: i + 1,
                level_size: l.count(),
                cumulative_size: c.count(),
                coverage_fraction: c.count() as f64 / full,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in self.coverage_rows() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.k, r.level_size, r.cumulative_size, r.coverage_fraction
            ));
        }
        out
    }

    /// Primes (ascending) whose product is congruent to `r`, of the
    /// smallest length at which `r` was first covered.
    pub fn witness(&self, r: u64) -> Option<Vec<u64>> {
        let last = self.cumulative.last()?;
        if !last.contains(r) {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = r as usize;
        loop {
            out.push(self.via[cur] as u64);
            let p = self.pred[cur];
            if p == NO_PRED {
                break;
            }
            cur = p as usize;
        }
        out.sort_unstable();
        Some(out)
    }

    /// Re-multiplies every witness and checks the residue, the prime bound
    /// and the length bound.
    pub fn validate_witnesses(&self) -> Result<()> {
        let Some(last) = self.cumulative.last() else {
            return Ok(());
        };
        for r in last.iter() {
            let w = self.witness(r).ok_or_else(|| Error::Invariant(format!("no witness for {r}")))?;
            let k = self
                .cumulative
                .iter()
                .position(|c| c.contains(r))
                .expect("covered")
                + 1;
            let prod = w.iter().fold(1u64, |acc, &p| mul_mod(acc, p, self.q));
            if prod != r || w.len() > k || w.iter().any(|&p| p >= self.x_bound || !is_prime(p)) {
                return Err(Error::Invariant(format!(
                    "witness {w:?} for residue {r} mod {} is invalid",
                    self.q
                )));
            }
        }
        Ok(())
    }
}

/// Builds `P^(1), ..., P^(kmax)` modulo the prime `q` from the primes below `x_bound`.
pub fn product_levels(q: u64, x_bound: u64, kmax: usize) -> Result<CoverState> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q > MAX_MODULUS {
        return Err(Error::TooLarge {
            what: "cover modulus",
            value: q,
            limit: MAX_MODULUS,
        });
    }
    if x_bound < 2 {
        return Err(Error::Domain(format!("prime bound X = {x_bound} must be at least 2")));
    }
    if kmax == 0 {
        return Err(Error::Domain("kmax must be at least 1".into()));
    }
    let primes: Vec<u64> = sieve_primes(x_bound - 1)
        .primes
        .into_iter()
        .filter(|&p| p % q != 0)
        .collect();
    // distinct unit residues, keyed by their smallest prime
    let mut gens: Vec<(u64, u64)> = Vec::new(); // (prime, residue)
    let mut seen = ResidueSet::new(q as usize);
    for &p in &primes {
        if seen.insert(p % q) {
            gens.push((p, p % q));
        }
    }
    let inv: Vec<u64> = gens.iter().map(|&(_, r)| inv_mod_prime(r, q)).collect();

    let n = q as usize;
    let mut pred = vec![NO_PRED; n];
    let mut via = vec![0u32; n];
    let mut levels = Vec::with_capacity(kmax);
    let mut cumulative: Vec<ResidueSet> = Vec::with_capacity(kmax);

    let mut first = ResidueSet::new(n);
    for &(p, r) in &gens {
        first.insert(r);
        via[r as usize] = p as u32;
    }
    let mut cum = first.clone();
    levels.push(first);
    cumulative.push(cum.clone());

    for _ in 1..kmax {
        let prev = levels.last().expect("level 1 exists");
        if prev.count() == n - 1 {
            levels.push(prev.clone());
            cumulative.push(cum.clone());
            continue;
        }
        let words = n.div_ceil(64);
        let chunks: Vec<(u64, Vec<(u32, u32, u32)>)> = (0..words)
            .into_par_iter()
            .map(|w| {
                let mut bits = 0u64;
                let mut fresh = Vec::new();
                for b in 0..64 {
                    let r = (w * 64 + b) as u64;
                    if r == 0 || r >= q {
                        continue;
                    }
                    for (g, &ip) in gens.iter().zip(&inv) {
                        let s = mul_mod(r, ip, q);
                        if prev.contains(s) {
                            bits |= 1 << b;
                            if !cum.contains(r) {
                                fresh.push((r as u32, s as u32, g.0 as u32));
                            }
                            break;
                        }
                    }
                }
                (bits, fresh)
            })
            .collect();
        let mut level = ResidueSet::new(n);
        for (w, (bits, fresh)) in chunks.into_iter().enumerate() {
            level.words[w] = bits;
            for (r, s, p) in fresh {
                pred[r as usize] = s;
                via[r as usize] = p;
            }
        }
        cum.union_with(&level);
        levels.push(level);
        cumulative.push(cum.clone());
    }

    Ok(CoverState {
        q,
        x_bound,
        no_primes: gens.is_empty(),
        primes: gens.iter().map(|&(p, _)| p).collect(),
        levels,
        cumulative,
        pred,
        via,
    })
}

/// Least `K <= kmax` with `P^(1) u ... u P^(K) = (Z/qZ)^*`.
pub fn minimal_cover_k(q: u64, x_bound: u64, kmax: usize) -> Result<Option<usize>> {
    Ok(product_levels(q, x_bound, kmax)?.minimal_cover_k())
}

/// Which side of the doubling dichotomy a set falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreimanOutcome {
    /// `|S^(2)| >= 3|S|/2`.
    Grows,
    /// `S^(4)` is the whole group.
    Covers,
    /// `S` lies in a coset of a proper subgroup.
    PreconditionFailed,
}

/// Doubling dichotomy in the cyclic group `Z/mZ`, written additively.
/// `set` holds exponents (elements of `Z/mZ`).
pub fn freiman_check(m: u64, set: &[u64]) -> Result<FreimanOutcome> {
    if m == 0 {
        return Err(Error::Domain("group order must be positive".into()));
    }
    if m > 100_000 {
        return Err(Error::TooLarge {
            what: "group order",
            value: m,
            limit: 100_000,
        });
    }
    let mut elems: Vec<u64> = set.iter().map(|&s| s % m).collect();
    elems.sort_unstable();
    elems.dedup();
    let Some(&s0) = elems.first() else {
        return Ok(FreimanOutcome::PreconditionFailed);
    };
    // S - s0 generates the subgroup of index gcd(m, diffs)
    let g = elems.iter().fold(m, |acc, &s| gcd(acc, (s + m - s0) % m));
    if g != 1 {
        return Ok(FreimanOutcome::PreconditionFailed);
    }
    let double = sumset(m, &elems, &elems);
    if 2 * double.len() >= 3 * elems.len() {
        return Ok(FreimanOutcome::Grows);
    }
    let quad = sumset(m, &double, &double);
    if quad.len() as u64 == m {
        return Ok(FreimanOutcome::Covers);
    }
    Err(Error::Invariant(format!(
        "doubling dichotomy fails for a set of size {} in Z/{m}",
        elems.len()
    )))
}

/// [`freiman_check`] for a subset of `(Z/qZ)^*`, through discrete logarithms.
pub fn freiman_check_units(q: u64, residues: &[u64]) -> Result<FreimanOutcome> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q > 100_001 {
        return Err(Error::TooLarge {
            what: "modulus",
            value: q,
            limit: 100_001,
        });
    }
    let g = primitive_root(q);
    let mut log = vec![u64::MAX; q as usize];
    let mut x = 1u64;
    for k in 0..q - 1 {
        log[x as usize] = k;
        x = mul_mod(x, g, q);
    }
    let mut exps = Vec::with_capacity(residues.len());
    for &r in residues {
        let r = r % q;
        if r == 0 {
            return Err(Error::Domain(format!("0 is not a unit modulo {q}")));
        }
        exps.push(log[r as usize]);
    }
    freiman_check(q - 1, &exps)
}

fn sumset(m: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut hit = vec![false; m as usize];
    let mut count = 0u64;
    'outer: for &x in a {
        for &y in b {
            let s = ((x + y) % m) as usize;
            if !hit[s] {
                hit[s] = true;
                count += 1;
                if count == m {
                    break 'outer;
                }
            }
        }
    }
    (0..m).filter(|&s| hit[s as usize]).collect()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let factors = factorize_trial(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&(f, _)| pow_mod(g, (q - 1) / f, q) != 1))
        .expect("a prime has a primitive root")
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod(b: u64, q: u64) -> Option<u64> {
    let b = b % q;
    if b == 0 {
        return Some(0);
    }
    if jacobi(b as i64, q) != 1 {
        return None;
    }
    if q % 4 == 3 {
        return Some(pow_mod(b, (q + 1) / 4, q));
    }
    let mut s = 0;
    let mut d = q - 1;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let z = (2..q).find(|&z| jacobi(z as i64, q) == -1)?;
    let mut m = s;
    let mut c = pow_mod(z, d, q);
    let mut t = pow_mod(b, d, q);
    let mut r = pow_mod(b, (d + 1) / 2, q);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, q);
            i += 1;
        }
        let bb = pow_mod(c, 1 << (m - i - 1), q);
        m = i;
        c = mul_mod(bb, bb, q);
        t = mul_mod(t, c, q);
        r = mul_mod(r, bb, q);
    }
    Some(r)
}

/// A positive integer `P_b = b mod q` built from primes below `X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representative {
    pub b: u64,
    pub value: u128,
    /// Ascending `(prime, exponent)` pairs.
    pub factorization: Vec<(u64, u32)>,
    /// `P_b` is a perfect square built as `n_a^2` with `a^2 = b`.
    pub is_square_witness: bool,
}

impl Representative {
    pub fn omega(&self) -> u32 {
        self.factorization.iter().map(|&(_, e)| e).sum()
    }

    /// `2^2*3` style rendering (`1` for the empty product).
    pub fn factorization_label(&self) -> String {
        if self.factorization.is_empty() {
            return "1".into();
        }
        self.factorization
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// `b,P_b,factorization`.
    pub fn csv_line(&self) -> String {
        format!("{},{},{}", self.b, self.value, self.factorization_label())
    }
}

/// Breadth-first distances from residue 1 under multiplication by primes
/// below `X`, up to `depth`. Returns (depth, predecessor, prime) per residue.
struct Bfs {
    dist: Vec<u8>,
    pred: Vec<u32>,
    via: Vec<u32>,
}

const UNSEEN: u8 = u8::MAX;

fn bfs_from_one(q: u64, x_bound: u64, depth: usize) -> Bfs {
    let n = q as usize;
    let mut gens: Vec<(u64, u64)> = Vec::new();
    let mut seen = ResidueSet::new(n);
    for p in sieve_primes(x_bound.saturating_sub(1)).primes {
        if p % q != 0 && seen.insert(p % q) {
            gens.push((p, p % q));
        }
    }
    let mut dist = vec![UNSEEN; n];
    let mut pred = vec![NO_PRED; n];
    let mut via = vec![0u32; n];
    dist[1] = 0;
    let mut frontier = vec![1u64];
    for d in 1..=depth.min(254) {
        let mut next = Vec::new();
        for &s in &frontier {
            for &(p, r) in &gens {
                let t = mul_mod(s, r, q);
                if dist[t as usize] == UNSEEN {
                    dist[t as usize] = d as u8;
                    pred[t as usize] = s as u32;
                    via[t as usize] = p as u32;
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Bfs { dist, pred, via }
}

impl Bfs {
    fn product(&self, r: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut cur = r as usize;
        while self.dist[cur] != 0 {
            out.push(self.via[cur] as u64);
            cur = self.pred[cur] as usize;
        }
        out.sort_unstable();
        out
    }

    fn reached(&self) -> usize {
        self.dist.iter().skip(1).filter(|&&d| d != UNSEEN).count()
    }
}

/// Finds `P_b = b (mod q)` with every prime factor below `x_bound`,
/// `Omega(P_b) <= 2 k2` and `P_b < q^(2 k1)`. Quadratic residues get a
/// perfect square `n_a^2` with `a^2 = b`, so every completely multiplicative
/// ±1 function takes the value `+1` there.
pub fn find_representative(b: u64, q: u64, x_bound: u64, k1: u32, k2: usize) -> Result<Representative> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q > MAX_MODULUS {
        return Err(Error::TooLarge {
            what: "cover modulus",
            value: q,
            limit: MAX_MODULUS,
        });
    }
    if b == 0 || b >= q {
        return Err(Error::Domain(format!("residue {b} must lie in [1, {q})")));
    }
    let bfs = bfs_from_one(q, x_bound, k2);
    let not_found = || Error::NotReachable {
        b,
        depth: k2,
        covered: bfs.reached(),
        group_order: q as usize - 1,
    };
    let is_qr = q == 2 || jacobi(b as i64, q) == 1;
    let (primes, square) = if is_qr {
        let a = if q == 2 { 1 } else { sqrt_mod(b, q).expect("residue has a root") };
        let roots = [a.min(q - a), a.max(q - a)];
        let best = roots
            .into_iter()
            .filter(|&r| bfs.dist[r as usize] != UNSEEN)
            .min_by_key(|&r| (bfs.dist[r as usize], r))
            .ok_or_else(not_found)?;
        let base = bfs.product(best);
        let mut doubled: Vec<u64> = base.iter().flat_map(|&p| [p, p]).collect();
        doubled.sort_unstable();
        (doubled, true)
    } else {
        if bfs.dist[b as usize] == UNSEEN {
            return Err(not_found());
        }
        (bfs.product(b), false)
    };
    let mut value: u128 = 1;
    for &p in &primes {
        value = value
            .checked_mul(p as u128)
            .ok_or_else(|| Error::Domain(format!("representative of {b} overflows 128 bits")))?;
    }
    let cap = (q as f64).powi(2 * k1 as i32);
    if value as f64 >= cap {
        return Err(Error::Domain(format!(
            "representative {value} of {b} is not below q^(2*{k1})"
        )));
    }
    let mut factorization: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factorization.last_mut() {
            Some((r, e)) if *r == p => *e += 1,
            _ => factorization.push((p, 1)),
        }
    }
    Ok(Representative {
        b,
        value,
        factorization,
        is_square_witness: square,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MultiplicativeFunctionSpec;
    use proptest::prelude::*;

    fn set(s: &ResidueSet) -> Vec<u64> {
        s.iter().collect()
    }

    #[test]
    fn level_examples() {
        let st = product_levels(7, 4, 3).unwrap();
        assert_eq!(set(&st.levels[0]), vec![2, 3]);
        assert_eq!(set(&st.levels[1]), vec![2, 4, 6]);
        assert_eq!(set(&st.levels[2]), vec![1, 4, 5, 6]);
        assert_eq!(st.minimal_cover_k(), Some(3));

        let st = product_levels(7, 2, 3).unwrap();
        assert!(st.no_primes);
        assert!(st.levels.iter().all(|l| l.count() == 0));
        assert_eq!(st.minimal_cover_k(), None);

        let st = product_levels(5, 3, 6).unwrap();
        let got: Vec<Vec<u64>> = st.levels.iter().map(set).collect();
        assert_eq!(got, vec![vec![2], vec![4], vec![3], vec![1], vec![2], vec![4]]);
        assert_eq!(st.minimal_cover_k(), Some(4));
    }

    #[test]
    fn minimal_k_examples() {
        assert_eq!(minimal_cover_k(7, 4, 5).unwrap(), Some(3));
        assert_eq!(minimal_cover_k(5, 3, 5).unwrap(), Some(4));
        assert_eq!(minimal_cover_k(5, 3, 3).unwrap(), None);
        assert_eq!(minimal_cover_k(7, 2, 5).unwrap(), None);
    }

    #[test]
    fn precondition_errors() {
        assert!(matches!(product_levels(8, 4, 2), Err(Error::NotPrime(8))));
        assert!(matches!(product_levels(7, 1, 2), Err(Error::Domain(_))));
        assert!(matches!(product_levels(7, 4, 0), Err(Error::Domain(_))));
        assert!(matches!(product_levels(67_108_879, 4, 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn bound_above_modulus_skips_zero_residue() {
        let st = product_levels(5, 12, 2).unwrap();
        assert!(!st.levels[0].contains(0));
        assert_eq!(set(&st.levels[0]), vec![1, 2, 3]);
        st.validate_witnesses().unwrap();
    }

    #[test]
    fn level_recurrence_against_exhaustive_products() {
        for &q in sieve_primes(400).primes.iter().skip(2).step_by(5) {
            for x in [3u64, 8, 20, 50] {
                let st = product_levels(q, x, 6).unwrap();
                let primes = sieve_primes(x - 1).primes;
                let mut prev: Vec<u64> = vec![1];
                for level in &st.levels {
                    let mut next: Vec<u64> = prev
                        .iter()
                        .flat_map(|&s| primes.iter().filter(|&&p| p % q != 0).map(move |&p| s * p % q))
                        .collect();
                    next.sort_unstable();
                    next.dedup();
                    assert_eq!(set(level), next, "q={q} x={x}");
                    prev = next;
                }
                for w in st.cumulative.windows(2) {
                    assert!(w[0].is_subset(&w[1]));
                }
                st.validate_witnesses().unwrap();
            }
        }
    }

    #[test]
    fn witnesses_are_deterministic_across_thread_counts() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| product_levels(1009, 40, 4).unwrap());
        let b = many.install(|| product_levels(1009, 40, 4).unwrap());
        for r in 1..1009 {
            assert_eq!(a.witness(r), b.witness(r));
        }
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn coverage_csv() {
        let st = product_levels(7, 4, 5).unwrap();
        let csv = st.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CoverState::CSV_HEADER);
        assert_eq!(lines[3], "3,4,6,1");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn freiman_examples() {
        assert_eq!(freiman_check_units(7, &[1, 3]).unwrap(), FreimanOutcome::Grows);
        assert_eq!(freiman_check_units(7, &[3]).unwrap(), FreimanOutcome::PreconditionFailed);
        assert_eq!(
            freiman_check_units(7, &[1, 2, 3, 4, 5, 6]).unwrap(),
            FreimanOutcome::Covers
        );
        // {1, 2, 4} is the subgroup of squares
        assert_eq!(freiman_check_units(7, &[1, 2, 4]).unwrap(), FreimanOutcome::PreconditionFailed);
        assert_eq!(freiman_check(6, &[]).unwrap(), FreimanOutcome::PreconditionFailed);
    }

    #[test]
    fn freiman_dichotomy_exhaustive_small_groups() {
        for m in 1u64..=12 {
            for mask in 1u32..(1 << m) {
                let s: Vec<u64> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                freiman_check(m, &s).unwrap_or_else(|e| panic!("m={m} S={s:?}: {e}"));
            }
        }
    }

    #[test]
    fn sqrt_mod_roundtrip() {
        for &q in sieve_primes(2000).primes.iter().skip(1) {
            for b in 1..q.min(200) {
                match sqrt_mod(b, q) {
                    Some(a) => assert_eq!(a * a % q, b),
                    None => assert_eq!(jacobi(b as i64, q), -1),
                }
            }
        }
    }

    #[test]
    fn representative_examples() {
        let r = find_representative(3, 7, 4, 4, 4).unwrap();
        assert_eq!(r.value, 3);
        assert_eq!(r.factorization, vec![(3, 1)]);
        assert!(!r.is_square_witness);

        let r = find_representative(2, 7, 4, 4, 4).unwrap();
        assert_eq!(r.value, 9);
        assert!(r.is_square_witness);
        assert_eq!(r.csv_line(), "2,9,3^2");

        for q in [7u64, 101, 1009] {
            let r = find_representative(1, q, 10, 1, 1).unwrap();
            assert_eq!(r.value, 1);
            assert_eq!(r.omega(), 0);
            assert_eq!(r.factorization_label(), "1");
        }
    }

    #[test]
    fn representative_errors() {
        // only the prime 2 below X = 3: depth 2 reaches {1, 2, 4}, and 3 sits at depth 3
        let e = find_representative(3, 5, 3, 10, 2).unwrap_err();
        assert!(matches!(e, Error::NotReachable { b: 3, depth: 2, covered: 3, group_order: 4 }));
        assert!(matches!(find_representative(0, 7, 4, 4, 4), Err(Error::Domain(_))));
        assert!(matches!(find_representative(3, 9, 4, 4, 4), Err(Error::NotPrime(9))));
        // value cap q^(2 k1) = 7^2 = 49 rejects nothing here but k1 = 0 caps at 1
        assert!(matches!(find_representative(3, 7, 4, 0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn square_witnesses_are_killed_by_every_sign_function() {
        let q = 1009;
        let specs = [
            MultiplicativeFunctionSpec::Liouville,
            MultiplicativeFunctionSpec::Legendre(q),
            MultiplicativeFunctionSpec::flip(MultiplicativeFunctionSpec::Legendre(q), [2, 5, 31]),
            MultiplicativeFunctionSpec::flip(MultiplicativeFunctionSpec::Liouville, [3]),
        ];
        let x = (q as f64).powf(0.75).ceil() as u64;
        for b in 1..q {
            let r = find_representative(b, q, x, 8, 6).unwrap();
            assert_eq!(r.value % q as u128, b as u128);
            assert!(r.factorization.iter().all(|&(p, _)| p < x));
            assert!(r.omega() <= 12);
            if jacobi(b as i64, q) == 1 {
                assert!(r.is_square_witness);
                let root = (r.value as f64).sqrt().round() as u128;
                assert_eq!(root * root, r.value);
                for s in &specs {
                    assert_eq!(s.eval(r.value as u64).unwrap(), 1);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn freiman_dichotomy_random(m in 13u64..2_000, density in 1u32..100, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<u64> = (0..m).filter(|_| rng.gen_range(0..100) < density).collect();
            prop_assert!(freiman_check(m, &s).is_ok());
        }

        #[test]
        fn coverage_is_monotone(idx in 0usize..60, x in 3u64..60) {
            let q = sieve_primes(2000).primes[100 + idx];
            let st = product_levels(q, x, 5).unwrap();
            for w in st.cumulative.windows(2) {
                prop_assert!(w[0].is_subset(&w[1]));
            }
            if let Some(k) = st.minimal_cover_k() {
                for c in &st.cumulative[k - 1..] {
                    prop_assert_eq!(c.count(), q as usize - 1);
                }
            }
        }
    }
}
