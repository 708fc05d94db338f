//! A computational laboratory for the dilation rigidity of quadratic Gauss
//! sums.
//!
//! For a prime `N` and a completely multiplicative `f: N -> {-1,+1}` the
//! library tabulates `S_f(a) = sum_{1 <= n < N} f(n) e(an/N)`, measures how far
//! `S_f` is from obeying the Gauss-sum law `S(ap) = g(p) S(a)`, and compares
//! `f` with the real characters modulo `N`. Supporting machinery covers
//! residue classes by products of small primes, counts friable-rough integers
//! in progressions with their saddle-point estimate, and evaluates Dirichlet
//! L-values of the Legendre character on the real axis.
//!
//! Modules:
//! - [`arith`]: primes, factor tables, Legendre symbol, multiplicative functions
//! - [`expsum`]: the table `S_f(a)` by direct summation or FFT
//! - [`rigidity`]: the dilation deficit and scans over primes
//! - [`proximity`]: distances between ±1 functions and real-character fits
//! - [`cover`]: product-set coverage of `(Z/qZ)^*` and witness products
//! - [`friable`]: friable-rough counts, the saddle point, equidistribution
//! - [`lfunc`]: character sums, `L(s, chi)` and real-zero scans
//! - [`cli`]: subcommands, presets and CSV/JSON/SVG emission

pub mod arith;
pub mod cli;
pub mod cover;
pub mod error;
pub mod expsum;
pub mod friable;
pub mod lfunc;
pub mod proximity;
pub mod rigidity;

pub use error::{Error, Result};
