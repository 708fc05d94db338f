//! Command-line front end.
//!
//! Every subcommand produces named artifacts (CSV, JSON or SVG text). The
//! binary writes them to `--out` or stdout and maps errors onto exit codes:
//! 1 for usage errors, 2 for precondition violations, 3 when an exact
//! invariant fails.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{is_prime, mf_table, sieve_primes, MultiplicativeFunctionSpec, ValueTable};
use crate::cover::{find_representative, product_levels, CoverState};
use crate::error::{Error, Result};
use crate::expsum::{expsum, Backend};
use crate::friable::{equidistribution_report, saias_compare, EquidistributionReport, SaddleSolver, SaiasComparison};
use crate::lfunc::{corollary_row, CorollaryRow};
use crate::proximity::{distance_count, inner_product, prime_distance, DistanceReport, ProximityConfig};
use crate::rigidity::{scan_table, DeficitBackend, GMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Naive,
    Fft,
    Corr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GArg {
    Match,
    Legendre,
    Best,
}

impl From<GArg> for GMode {
    fn from(g: GArg) -> Self {
        match g {
            GArg::Match => GMode::Match,
            GArg::Legendre => GMode::Legendre,
            GArg::Best => GMode::Best,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetName {
    GaussIdentity,
    Thm1Flip,
    CorollaryLiouville,
    WalkerCover,
    FriableAp,
}

#[derive(Debug, Parser)]
#[command(name = "gausslab", version, about = "Dilation rigidity of quadratic Gauss sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Prime modulus N.
    #[arg(long = "n", global = true)]
    pub n: Option<u64>,
    /// Exponent c: primes p <= N^c are scanned.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// liouville | legendre | principal | flip:p1,p2,... | file:<path>
    #[arg(long, global = true)]
    pub function: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub g: Option<GArg>,
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (directory for presets); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of S_f(a) for all a mod N.
    Expsum {
        /// Also write the little-endian binary dump here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Dilation deficits over primes p <= N^c.
    Rigidity,
    /// Distance between f and a second function.
    Distance {
        #[arg(long, default_value = "legendre")]
        psi: String,
        #[arg(long, default_value_t = 0.1)]
        kappa: f64,
    },
    /// Coverage of (Z/qZ)^* by products of primes below X.
    Cover {
        #[arg(long)]
        q: u64,
        #[arg(long = "x-bound")]
        x_bound: u64,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        /// Write `b,P_b,factorization` lines for every residue here.
        #[arg(long)]
        witnesses: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        k1: u32,
        #[arg(long, default_value_t = 8)]
        k2: usize,
    },
    /// Friable-rough counts: per-residue counts with --q, else the saddle-point comparison.
    Friable {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        z: u64,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Saddle point alpha(x, y, z).
    Alpha {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        z: u64,
    },
    /// L-function pipeline rows for a list of prime moduli.
    Lfunc {
        /// Comma-separated moduli; defaults to --n.
        #[arg(long, value_delimiter = ',')]
        moduli: Vec<u64>,
        #[arg(long = "sigma-min", default_value_t = 0.5)]
        sigma_min: f64,
    },
    /// Run a shipped experiment.
    Preset {
        #[arg(value_enum)]
        name: PresetName,
    },
}

/// A named text artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Artifact {
            name: name.into(),
            contents: contents.into(),
        }
    }
}

/// Artifacts plus any invariant that failed while producing them.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub violations: Vec<String>,
}

impl Outcome {
    fn single(a: Artifact) -> Self {
        Outcome {
            artifacts: vec![a],
            violations: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(what());
        }
    }
}

/// Parses `args`, runs, writes artifacts and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = run(&cli).and_then(|outcome| {
        emit(&cli, &outcome.artifacts)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) if outcome.violations.is_empty() => EXIT_OK,
        Ok(outcome) => {
            for v in &outcome.violations {
                eprintln!("invariant violated: {v}");
            }
            EXIT_INVARIANT
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) => EXIT_USAGE,
                e if e.is_precondition() => EXIT_PRECONDITION,
                _ => EXIT_INVARIANT,
            }
        }
    }
}

fn emit(cli: &Cli, artifacts: &[Artifact]) -> Result<()> {
    match (&cli.out, &cli.command) {
        (Some(dir), Command::Preset { .. }) => {
            std::fs::create_dir_all(dir)?;
            for a in artifacts {
                std::fs::write(dir.join(&a.name), &a.contents)?;
            }
        }
        (Some(path), _) => {
            let mut body = String::new();
            for a in artifacts {
                body.push_str(&a.contents);
            }
            std::fs::write(path, body)?;
        }
        (None, _) => {
            for a in artifacts {
                print!("{}", a.contents);
            }
        }
    }
    Ok(())
}

/// Runs the parsed command inside a pool sized by `--threads`.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Usage(format!("cannot build thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn require_n(cli: &Cli) -> Result<u64> {
    let n = cli.n.ok_or_else(|| Error::Usage("--n is required".into()))?;
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    Ok(n)
}

fn function(cli: &Cli, n: u64) -> Result<MultiplicativeFunctionSpec> {
    MultiplicativeFunctionSpec::parse(cli.function.as_deref().unwrap_or("legendre"), n)
}

fn json_or_csv<T: Serialize>(cli: &Cli, name: &str, value: &T, csv: String) -> Result<Artifact> {
    Ok(match cli.format {
        Format::Csv => Artifact::new(format!("{name}.csv"), csv),
        Format::Json => Artifact::new(format!("{name}.json"), serde_json::to_string_pretty(value)? + "\n"),
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Expsum { dump } => cmd_expsum(cli, dump.as_deref()),
        Command::Rigidity => cmd_rigidity(cli),
        Command::Distance { psi, kappa } => cmd_distance(cli, psi, *kappa),
        Command::Cover {
            q,
            x_bound,
            kmax,
            witnesses,
            k1,
            k2,
        } => cmd_cover(cli, *q, *x_bound, *kmax, witnesses.as_deref(), *k1, *k2),
        Command::Friable { x, y, z, q } => cmd_friable(cli, *x, *y, *z, *q),
        Command::Alpha { x, y, z } => cmd_alpha(cli, *x, *y, *z),
        Command::Lfunc { moduli, sigma_min } => cmd_lfunc(cli, moduli, *sigma_min),
        Command::Preset { name } => run_preset(&ExperimentPreset::from_cli(*name, cli)),
    }
}

#[derive(Serialize)]
struct ExpSumRow {
    a: u64,
    re: f64,
    im: f64,
}

fn cmd_expsum(cli: &Cli, dump: Option<&Path>) -> Result<Outcome> {
    let n = require_n(cli)?;
    let spec = function(cli, n)?;
    let values = mf_table(&spec, n)?;
    let backend = match cli.backend.unwrap_or(BackendArg::Fft) {
        BackendArg::Naive => Backend::Naive,
        BackendArg::Fft => Backend::Fft,
        BackendArg::Corr => return Err(Error::Usage("expsum supports --backend naive|fft".into())),
    };
    let mut table = expsum(&values, backend)?;
    table.source = spec.label();
    if let Some(path) = dump {
        table.write_binary(std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    let rows: Vec<ExpSumRow> = table
        .entries
        .iter()
        .enumerate()
        .map(|(a, z)| ExpSumRow {
            a: a as u64,
            re: z.re,
            im: z.im,
        })
        .collect();
    let mut csv = String::from("a,re,im\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", r.a, r.re, r.im);
    }
    let mut out = Outcome::single(json_or_csv(cli, "expsum", &rows, csv)?);
    let nf = n as f64;
    let total = table.total().norm();
    out.check(total <= 1e-6 * nf, || format!("sum_a S_f(a) = {total}"));
    let energy = table.energy();
    let expected = nf * (nf - 1.0);
    out.check((energy - expected).abs() <= 1e-9 * expected, || {
        format!("Plancherel energy {energy} != {expected}")
    });
    Ok(out)
}

fn cmd_rigidity(cli: &Cli) -> Result<Outcome> {
    let n = require_n(cli)?;
    let spec = function(cli, n)?;
    let values = mf_table(&spec, n)?;
    let c = cli.c.ok_or_else(|| Error::Usage("--c is required".into()))?;
    let g: GMode = cli.g.unwrap_or(GArg::Best).into();
    let backend = match cli.backend.unwrap_or(BackendArg::Corr) {
        BackendArg::Corr => DeficitBackend::Correlation,
        _ => DeficitBackend::Spectral,
    };
    let report = scan_table(&values, c, g, backend)?;
    let mut out = Outcome::single(json_or_csv(cli, "rigidity", &report, report.to_csv())?);
    let hi = 4.0 * (n - 1) as f64 + 1e-6 * n as f64;
    for r in &report.records {
        out.check((-1e-6 * n as f64..=hi).contains(&r.deficit), || {
            format!("deficit {} at p = {} outside [0, 4(N-1)]", r.deficit, r.p)
        });
    }
    if matches!(spec, MultiplicativeFunctionSpec::Legendre(_)) && g != GMode::Best {
        out.check(report.max_deficit <= 1e-6 * n as f64, || {
            format!("Legendre deficit {} is not zero", report.max_deficit)
        });
    }
    Ok(out)
}

fn cmd_distance(cli: &Cli, psi: &str, kappa: f64) -> Result<Outcome> {
    let n = require_n(cli)?;
    let spec = function(cli, n)?;
    let psi_spec = MultiplicativeFunctionSpec::parse(psi, n)?;
    let f = mf_table(&spec, n)?;
    let g = mf_table(&psi_spec, n)?;
    let cfg = ProximityConfig {
        kappa,
        ..ProximityConfig::default()
    };
    let report = prime_distance(&f, &g, &cfg)?;
    let csv = format!(
        "{}\n{}\n",
        DistanceReport::CSV_HEADER,
        report.csv_row(&spec.label(), &psi_spec.label())
    );
    let mut out = Outcome::single(json_or_csv(cli, "distance", &report, csv)?);
    let ip = inner_product(&f, &g)?;
    out.check(ip == (n as i64 - 1) - 2 * report.distance as i64, || {
        format!("indicator identity fails: {ip} vs distance {}", report.distance)
    });
    Ok(out)
}

fn cmd_cover(
    cli: &Cli,
    q: u64,
    x_bound: u64,
    kmax: usize,
    witnesses: Option<&Path>,
    k1: u32,
    k2: usize,
) -> Result<Outcome> {
    let state = product_levels(q, x_bound, kmax)?;
    let rows = state.coverage_rows();
    let mut out = Outcome::single(json_or_csv(cli, "cover", &rows, state.to_csv())?);
    if let Err(e) = state.validate_witnesses() {
        out.violations.push(e.to_string());
    }
    check_monotone(&state, &mut out);
    if let Some(path) = witnesses {
        let mut body = String::from("b,P_b,factorization\n");
        for b in 1..q {
            let r = find_representative(b, q, x_bound, k1, k2)?;
            out.check(r.value % q as u128 == b as u128, || format!("P_{b} = {} is not {b} mod {q}", r.value));
            body.push_str(&r.csv_line());
            body.push('\n');
        }
        std::fs::write(path, body)?;
    }
    Ok(out)
}

fn check_monotone(state: &CoverState, out: &mut Outcome) {
    for (k, w) in state.cumulative.windows(2).enumerate() {
        out.check(w[0].is_subset(&w[1]), || format!("coverage shrinks at k = {}", k + 2));
    }
}

fn cmd_friable(cli: &Cli, x: u64, y: u64, z: u64, q: Option<u64>) -> Result<Outcome> {
    match q {
        Some(q) => {
            let report = equidistribution_report(x, y, z, q)?;
            let mut out = Outcome::single(json_or_csv(cli, "friable", &report, report.to_csv())?);
            out.check(report.partition_holds, || "per-residue counts do not sum to Theta".into());
            Ok(out)
        }
        None => {
            let cmp = saias_compare(x, y, z)?;
            let csv = format!("{}\n{}\n", SaiasComparison::CSV_HEADER, cmp.csv_row());
            Ok(Outcome::single(json_or_csv(cli, "friable", &cmp, csv)?))
        }
    }
}

#[derive(Serialize)]
struct AlphaRow {
    x: f64,
    y: u64,
    z: u64,
    u: f64,
    alpha: f64,
    residual: f64,
    iterations: usize,
}

fn cmd_alpha(cli: &Cli, x: f64, y: u64, z: u64) -> Result<Outcome> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("x = {x} must exceed 1")));
    }
    let s = SaddleSolver::new(y, z)?.solve_log(x.ln())?;
    let row = AlphaRow {
        x,
        y,
        z,
        u: x.ln() / (y as f64).ln(),
        alpha: s.alpha,
        residual: s.residual,
        iterations: s.iterations,
    };
    let csv = format!(
        "x,y,z,u,alpha,residual,iterations\n{},{},{},{},{},{},{}\n",
        row.x, row.y, row.z, row.u, row.alpha, row.residual, row.iterations
    );
    let mut out = Outcome::single(json_or_csv(cli, "alpha", &row, csv)?);
    out.check(s.residual <= 1e-10 * x.ln(), || format!("residual {} too large", s.residual));
    Ok(out)
}

fn cmd_lfunc(cli: &Cli, moduli: &[u64], sigma_min: f64) -> Result<Outcome> {
    let moduli: Vec<u64> = if moduli.is_empty() {
        vec![require_n(cli)?]
    } else {
        moduli.to_vec()
    };
    let rows = corollary_rows(&moduli, sigma_min)?;
    let mut out = Outcome::single(json_or_csv(cli, "lfunc", &rows, corollary_csv(&rows))?);
    for &n in &moduli {
        check_identities(n, &mut out)?;
    }
    Ok(out)
}

fn corollary_rows(moduli: &[u64], sigma_min: f64) -> Result<Vec<CorollaryRow>> {
    use rayon::prelude::*;
    moduli.par_iter().map(|&n| corollary_row(n, sigma_min)).collect()
}

fn corollary_csv(rows: &[CorollaryRow]) -> String {
    let mut csv = String::from(CorollaryRow::CSV_HEADER);
    csv.push('\n');
    for r in rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    csv
}

/// Exact identities for `lambda` against `chi` at modulus `n`: zero sum,
/// Plancherel, cross-Plancherel and the indicator identity.
pub fn check_identities(n: u64, out: &mut Outcome) -> Result<()> {
    let lam = mf_table(&MultiplicativeFunctionSpec::Liouville, n)?;
    let chi = mf_table(&MultiplicativeFunctionSpec::Legendre(n), n)?;
    for v in identity_violations(&lam, &chi)? {
        out.violations.push(format!("N = {n}: {v}"));
    }
    Ok(())
}

/// Failed identities, as messages (empty when all hold).
pub fn identity_violations(f: &ValueTable, psi: &ValueTable) -> Result<Vec<String>> {
    let n = f.modulus;
    let nf = n as f64;
    let sf = expsum(f, Backend::Fft)?;
    let sp = expsum(psi, Backend::Fft)?;
    let mut bad = Vec::new();
    for (name, s) in [("f", &sf), ("psi", &sp)] {
        let total = s.total().norm();
        if total > 1e-6 * nf {
            bad.push(format!("sum_a S_{name}(a) = {total}"));
        }
        let e = s.energy();
        if (e - nf * (nf - 1.0)).abs() > 1e-9 * nf * (nf - 1.0) {
            bad.push(format!("Plancherel energy of {name} is {e}"));
        }
    }
    let ip = inner_product(f, psi)?;
    let d = distance_count(f, psi)? as i64;
    if ip != (n as i64 - 1) - 2 * d {
        bad.push(format!("indicator identity: {ip} vs {}", (n as i64 - 1) - 2 * d));
    }
    let cross = sf.cross_energy(&sp)?;
    if (cross - ip as f64).abs() > 1e-6 * nf {
        bad.push(format!("cross Plancherel {cross} vs {ip}"));
    }
    Ok(bad)
}

/// Parameter bindings of a shipped experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: PresetName,
    pub moduli: Vec<u64>,
    pub c: f64,
    pub seed: u64,
    pub trials: usize,
    pub friable: (u64, u64, u64),
    pub cover_exponents: Vec<f64>,
}

impl ExperimentPreset {
    pub fn new(name: PresetName) -> Self {
        let primes_from = |start: u64, count: usize, step: usize| -> Vec<u64> {
            sieve_primes(start * 4)
                .primes
                .into_iter()
                .filter(|&p| p >= start)
                .step_by(step)
                .take(count)
                .collect()
        };
        let (moduli, c) = match name {
            PresetName::GaussIdentity => (primes_from(1000, 20, 97), 0.3),
            PresetName::Thm1Flip => (vec![10_007], 0.25),
            PresetName::CorollaryLiouville => (primes_from(1000, 50, 1), 0.25),
            PresetName::WalkerCover => (vec![1009, 2003, 5003, 10_007], 0.25),
            PresetName::FriableAp => (vec![101, 1009, 1999], 0.25),
        };
        ExperimentPreset {
            name,
            moduli,
            c,
            seed: 0,
            trials: 24,
            friable: (1_000_000, 1000, 10),
            cover_exponents: vec![0.5, 0.6, 0.75],
        }
    }

    /// Applies `--n`, `--c` and `--seed` overrides.
    pub fn from_cli(name: PresetName, cli: &Cli) -> Self {
        let mut p = Self::new(name);
        if let Some(n) = cli.n {
            p.moduli = vec![n];
        }
        if let Some(c) = cli.c {
            p.c = c;
        }
        p.seed = cli.seed;
        p
    }
}

pub fn run_preset(preset: &ExperimentPreset) -> Result<Outcome> {
    for &n in &preset.moduli {
        if !is_prime(n) {
            return Err(Error::NotPrime(n));
        }
    }
    match preset.name {
        PresetName::GaussIdentity => preset_gauss(preset),
        PresetName::Thm1Flip => preset_flip(preset),
        PresetName::CorollaryLiouville => preset_corollary(preset),
        PresetName::WalkerCover => preset_cover(preset),
        PresetName::FriableAp => preset_friable(preset),
    }
}

fn preset_gauss(p: &ExperimentPreset) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut csv = String::from("N,max_deficit,u_re,u_im,quarter_error\n");
    for &n in &p.moduli {
        let chi = mf_table(&MultiplicativeFunctionSpec::Legendre(n), n)?;
        let report = scan_table(&chi, p.c, GMode::Match, DeficitBackend::Spectral)?;
        let s = expsum(&chi, Backend::Fft)?;
        let u = s.at(1) / (n as f64).sqrt();
        let target = if n % 4 == 1 {
            num_complex::Complex64::new(1.0, 0.0)
        } else {
            num_complex::Complex64::new(0.0, 1.0)
        };
        let err = (u - target).norm();
        let _ = writeln!(csv, "{},{},{},{},{}", n, report.max_deficit, u.re, u.im, err);
        out.check(report.max_deficit <= 1e-6 * n as f64, || {
            format!("N = {n}: Legendre deficit {}", report.max_deficit)
        });
        out.check(err <= 1e-8, || format!("N = {n}: S(1)/sqrt(N) off by {err}"));
    }
    out.artifacts.push(Artifact::new("gauss_identity.csv", csv));
    Ok(out)
}

/// One random flip of the Legendre character.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlipTrial {
    pub flip_set: Vec<u64>,
    pub distance: u64,
    pub prime_distance: f64,
    /// Max of `D(p; f(p))` over primes `p <= N^c` outside the flip set.
    pub max_deficit_off_set: f64,
    pub max_deficit: f64,
}

/// Random flip sets of one to four primes below `N^(1/2)`, drawn from `seed`.
pub fn flip_trials(n: u64, c: f64, trials: usize, seed: u64) -> Result<Vec<FlipTrial>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = sieve_primes((n as f64).sqrt() as u64).primes;
    if pool.is_empty() {
        return Err(Error::Domain(format!("no primes below sqrt({n})")));
    }
    let chi = mf_table(&MultiplicativeFunctionSpec::Legendre(n), n)?;
    let cfg = ProximityConfig::default();
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let size = 1 + t % 4.min(pool.len());
        let set: BTreeSet<u64> = pool.choose_multiple(&mut rng, size).copied().collect();
        let spec = MultiplicativeFunctionSpec::flip(MultiplicativeFunctionSpec::Legendre(n), set.iter().copied());
        let f = mf_table(&spec, n)?;
        let report = scan_table(&f, c, GMode::Match, DeficitBackend::Correlation)?;
        let dist = prime_distance(&f, &chi, &cfg)?;
        let max_off = report
            .records
            .iter()
            .filter(|r| !set.contains(&r.p))
            .map(|r| r.deficit)
            .fold(0.0, f64::max);
        out.push(FlipTrial {
            flip_set: set.into_iter().collect(),
            distance: dist.distance,
            prime_distance: dist.prime_distance,
            max_deficit_off_set: max_off,
            max_deficit: report.max_deficit,
        });
    }
    Ok(out)
}

fn preset_flip(p: &ExperimentPreset) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut csv = String::from("N,trial,flip_set,distance,prime_distance,max_deficit_off_set,bound_8d,max_deficit\n");
    let mut points = Vec::new();
    for &n in &p.moduli {
        for (i, t) in flip_trials(n, p.c, p.trials, p.seed)?.iter().enumerate() {
            let set: Vec<String> = t.flip_set.iter().map(u64::to_string).collect();
            let bound = 8 * t.distance;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                n,
                i,
                set.join(" "),
                t.distance,
                t.prime_distance,
                t.max_deficit_off_set,
                bound,
                t.max_deficit
            );
            out.check(t.max_deficit_off_set <= bound as f64, || {
                format!("N = {n}, B = {:?}: deficit {} exceeds 8d = {bound}", t.flip_set, t.max_deficit_off_set)
            });
            points.push((t.distance as f64, t.max_deficit));
        }
    }
    out.artifacts.push(Artifact::new("thm1_flip.csv", csv));
    out.artifacts.push(Artifact::new(
        "thm1_flip.svg",
        svg::scatter("max deficit vs distance", "distance", "max deficit", &[("trials", &points)]),
    ));
    Ok(out)
}

fn preset_corollary(p: &ExperimentPreset) -> Result<Outcome> {
    let rows = corollary_rows(&p.moduli, 0.5)?;
    let mut out = Outcome::default();
    for &n in &p.moduli {
        check_identities(n, &mut out)?;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.modulus as f64, r.chi_prime_sum + (r.modulus as f64).ln().ln()))
        .collect();
    out.artifacts.push(Artifact::new("corollary_liouville.csv", corollary_csv(&rows)));
    out.artifacts.push(Artifact::new(
        "corollary_liouville.svg",
        svg::scatter("prime sum + log log N", "N", "value", &[("N", &pts)]),
    ));
    Ok(out)
}

fn preset_cover(p: &ExperimentPreset) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut csv = String::from("q,x_bound,k,level_size,cumulative_size,coverage_fraction\n");
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for &q in &p.moduli {
        for &theta in &p.cover_exponents {
            let x = (q as f64).powf(theta).ceil() as u64;
            let state = product_levels(q, x.max(2), 8)?;
            if let Err(e) = state.validate_witnesses() {
                out.violations.push(e.to_string());
            }
            check_monotone(&state, &mut out);
            let mut pts = Vec::new();
            for r in state.coverage_rows() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    q, x, r.k, r.level_size, r.cumulative_size, r.coverage_fraction
                );
                pts.push((r.k as f64, r.coverage_fraction));
            }
            series.push((format!("q={q} X={x}"), pts));
        }
    }
    let refs: Vec<(&str, &[(f64, f64)])> = series.iter().map(|(n, p)| (n.as_str(), p.as_slice())).collect();
    out.artifacts.push(Artifact::new("walker_cover.csv", csv));
    out.artifacts.push(Artifact::new(
        "walker_cover.svg",
        svg::lines("coverage by k", "k", "fraction covered", &refs),
    ));
    Ok(out)
}

fn preset_friable(p: &ExperimentPreset) -> Result<Outcome> {
    let (x, y, z) = p.friable;
    let mut out = Outcome::default();
    let mut csv = String::from("q,total,min,max,mean,relative_spread,zero_bucket,partition_holds\n");
    let mut reports: Vec<EquidistributionReport> = Vec::new();
    for &q in &p.moduli {
        let r = equidistribution_report(x, y, z, q)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            q, r.total, r.min, r.max, r.mean, r.relative_spread, r.counts[0], r.partition_holds
        );
        out.check(r.partition_holds, || format!("q = {q}: partition identity fails"));
        reports.push(r);
    }
    out.artifacts.push(Artifact::new("friable_ap.csv", csv));
    for r in &reports {
        out.artifacts.push(Artifact::new(format!("friable_ap_q{}.csv", r.q), r.to_csv()));
    }
    let cmp = saias_compare(x, y, z)?;
    out.artifacts.push(Artifact::new(
        "friable_saias.csv",
        format!("{}\n{}\n", SaiasComparison::CSV_HEADER, cmp.csv_row()),
    ));
    Ok(out)
}

/// Minimal SVG plots with no external dependency.
pub mod svg {
    use std::fmt::Write as _;

    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

    fn frame(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, &[(f64, f64)])]) -> (String, impl Fn(f64, f64) -> (f64, f64)) {
        let all = series.iter().flat_map(|(_, p)| p.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, W / 2.0);
        let _ = writeln!(
            s,
            r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
            H - PAD,
            W - PAD
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 10.0);
        let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{ylabel}</text>"#, H / 2.0, H / 2.0);
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}" text-anchor="middle">{x0:.3}</text>"#, H - PAD + 15.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x1:.3}</text>"#, W - PAD, H - PAD + 15.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y0:.3}</text>"#, PAD - 4.0, H - PAD);
        let _ = writeln!(s, r#"<text x="{}" y="{PAD}" text-anchor="end">{y1:.3}</text>"#, PAD - 4.0);
        let map = move |x: f64, y: f64| {
            (
                PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD),
                H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD),
            )
        };
        (s, map)
    }

    fn legend(s: &mut String, series: &[(&str, &[(f64, f64)])]) {
        for (i, (name, _)) in series.iter().enumerate() {
            let c = COLORS[i % COLORS.len()];
            let y = PAD + 14.0 * i as f64;
            let _ = writeln!(s, r#"<text x="{}" y="{y}" fill="{c}">{name}</text>"#, W - PAD - 120.0);
        }
    }

    pub fn scatter(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, &[(f64, f64)])]) -> String {
        let (mut s, map) = frame(title, xlabel, ylabel, series);
        for (i, (_, pts)) in series.iter().enumerate() {
            let c = COLORS[i % COLORS.len()];
            for &(x, y) in pts.iter() {
                let (px, py) = map(x, y);
                let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{c}"/>"#);
            }
        }
        legend(&mut s, series);
        s.push_str("</svg>\n");
        s
    }

    pub fn lines(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, &[(f64, f64)])]) -> String {
        let (mut s, map) = frame(title, xlabel, ylabel, series);
        for (i, (_, pts)) in series.iter().enumerate() {
            let c = COLORS[i % COLORS.len()];
            let path: Vec<String> = pts
                .iter()
                .enumerate()
                .map(|(j, &(x, y))| {
                    let (px, py) = map(x, y);
                    format!("{}{px:.2} {py:.2}", if j == 0 { "M" } else { "L" })
                })
                .collect();
            let _ = writeln!(s, r#"<path d="{}" stroke="{c}" fill="none"/>"#, path.join(" "));
        }
        legend(&mut s, series);
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidity::RigidityReport;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gausslab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn rigidity_legendre_is_flat() {
        let cli = parse(&["rigidity", "--n", "101", "--c", "0.3", "--function", "legendre", "--g", "match"]);
        let out = run(&cli).unwrap();
        assert!(out.violations.is_empty());
        let csv = &out.artifacts[0].contents;
        assert!(csv.starts_with(RigidityReport::CSV_HEADER));
        for line in csv.lines().skip(1) {
            let d: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
            assert!(d <= 1e-6 * 101.0);
        }
    }

    #[test]
    fn cover_csv_reaches_full_coverage_at_three() {
        let cli = parse(&["cover", "--q", "7", "--x-bound", "4", "--kmax", "5"]);
        let out = run(&cli).unwrap();
        let csv = &out.artifacts[0].contents;
        assert!(csv.starts_with(CoverState::CSV_HEADER));
        let third = csv.lines().nth(3).unwrap();
        assert!(third.starts_with("3,") && third.ends_with(",1"));
    }

    #[test]
    fn friable_small_modulus_keeps_zero_bucket() {
        let cli = parse(&["friable", "--x", "100", "--y", "10", "--z", "3", "--q", "3"]);
        let out = run(&cli).unwrap();
        let csv = &out.artifacts[0].contents;
        let total: u64 = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 6);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with_args(["gausslab", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with_args(["gausslab", "rigidity", "--bogus"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["gausslab", "rigidity", "--n", "100", "--c", "0.3", "--out", "/dev/null"]),
            EXIT_PRECONDITION
        );
        assert_eq!(
            main_with_args(["gausslab", "rigidity", "--n", "101", "--c", "1.5", "--out", "/dev/null"]),
            EXIT_PRECONDITION
        );
        assert_eq!(
            main_with_args(["gausslab", "rigidity", "--n", "101", "--c", "0.3", "--out", "/dev/null"]),
            EXIT_OK
        );
    }

    #[test]
    fn json_mirrors_report() {
        let cli = parse(&["rigidity", "--n", "101", "--c", "0.3", "--function", "liouville", "--format", "json"]);
        let out = run(&cli).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.artifacts[0].contents).unwrap();
        assert_eq!(v["modulus"], 101);
        assert_eq!(v["records"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn flip_preset_is_deterministic() {
        let mut p = ExperimentPreset::new(PresetName::Thm1Flip);
        p.moduli = vec![1009];
        p.trials = 6;
        p.seed = 42;
        let a = run_preset(&p).unwrap();
        let b = run_preset(&p).unwrap();
        assert_eq!(a.artifacts, b.artifacts);
        assert!(a.violations.is_empty());
        p.seed = 43;
        let c = run_preset(&p).unwrap();
        assert_ne!(a.artifacts[0], c.artifacts[0]);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let pts = [(0.0, 1.0), (1.0, 2.0)];
        let s = svg::scatter("t", "x", "y", &[("a", &pts)]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<circle").count(), 2);
        let l = svg::lines("t", "x", "y", &[("a", &pts), ("b", &[])]);
        assert_eq!(l.matches("<path").count(), 3);
    }
}
