//! Exact calculator and statistical verifier for word measures on
//! generalized symmetric groups.
//!
//! A word `w` in the free group `F_r` induces, for each `N`, a push-forward
//! of Haar measure on `G^r` under `(g_1..g_r) -> w(g_1..g_r)`.  For the
//! groups handled here — `S_N`, the wreath products `C_m wr S_N`, and
//! `S^1 wr S_N` — the expected trace of a `w`-random element is a rational
//! function of `N`, and this crate computes it exactly:
//!
//! * [`words`] — free-group words, two text syntaxes, reduction.
//! * [`stallings`] — folded core graphs of subgroups, membership, bases.
//! * [`fringe`] — the finite set of subgroups covered by `<w>`, and the
//!   subsets `Q_m` selected by a trace modulus.
//! * [`poly`] / [`ratfun`] — dense polynomials and rational functions in
//!   `N` over a generic coefficient field, with validity thresholds and
//!   Laurent expansion at infinity.
//! * [`measures`] — expected traces, the Euler-characteristic-like
//!   invariants `chi_m`, primitivity rank, word-length bounds, and the
//!   surface-word consistency tests.
//! * [`sampler`] — seeded Monte Carlo on `U(N)`/`O(N)` and the finite
//!   families, plus exhaustive small-group oracles.
//!
//! The exact path never touches floating point.  Floating point appears
//! only in the Monte Carlo sampler and in the generic numeric
//! instantiations of the polynomial core.

pub mod words;
pub mod stallings;
pub mod fringe;
pub mod poly;
pub mod ratfun;
pub mod measures;
pub mod sampler;

use std::fmt;

/// Exact scalar used on the exact path: arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer backing [`Rational`].
pub type Int = num_bigint::BigInt;

/// Exact polynomial in `N`.
pub type Poly = poly::Polynomial<Rational>;
/// Exact rational function of `N` with validity threshold.
pub type RatFn = ratfun::RationalFunction<Rational>;
/// Exact truncated Laurent expansion at `N = infinity`.
pub type Laurent = ratfun::LaurentPrefix<Rational>;

/// Trace modulus: `Finite(1)` is plain `S_N`, `Finite(m)` is `C_m wr S_N`,
/// `Infinity` is `S^1 wr S_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modulus {
    Finite(u32),
    Infinity,
}

impl Modulus {
    /// Finite modulus, checked: `m >= 1`.
    pub fn finite(m: u32) -> Result<Self> {
        if m == 0 {
            Err(Error::InvalidModulus("modulus must be >= 1".into()))
        } else {
            Ok(Modulus::Finite(m))
        }
    }

    /// True when a signed traversal count `c` is killed by this modulus,
    /// i.e. contributes phase expectation 1 rather than 0.
    pub fn annihilates(&self, c: i64) -> bool {
        match *self {
            Modulus::Finite(m) => c.rem_euclid(m as i64) == 0,
            Modulus::Infinity => c == 0,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Finite(m) => write!(f, "{m}"),
            Modulus::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Modulus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(Modulus::Infinity);
        }
        let m: u32 = s
            .parse()
            .map_err(|_| Error::InvalidModulus(format!("expected a positive integer or \"inf\", got {s:?}")))?;
        Modulus::finite(m)
    }
}

/// Crate-wide error type.  `is_resource_limit` separates "you asked for too
/// much" (CLI exit 3) from malformed input (CLI exit 2).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unexpected character {ch:?} at position {at} in word text")]
    UnknownToken { ch: char, at: usize },
    #[error("malformed numbered generator at position {at}: {why}")]
    MalformedNumbered { at: usize, why: String },
    #[error("word text mixes single-letter and numbered generator syntax")]
    MixedSyntax,
    #[error("generator index {index} exceeds ambient rank {rank}")]
    GeneratorOutOfRange { index: u32, rank: u32 },
    #[error("ambient rank must be >= 1")]
    ZeroRank,
    #[error("operation requires a nonempty word")]
    EmptyWord,
    #[error("operation requires a cyclically reduced word, got {word}")]
    NotCyclicallyReduced { word: String },
    #[error("subgroup generators reduce to the trivial subgroup")]
    TrivialSubgroup,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("word of length {len} exceeds the enumeration cap {cap} (raise the cap to proceed)")]
    FringeCapExceeded { len: usize, cap: usize },
    #[error("exhaustive oracle would evaluate ~{work:e} words, over the cap {cap:e}")]
    OracleCapExceeded { work: f64, cap: f64 },
    #[error("evaluation at N = {n} is below the validity threshold n_min = {n_min}")]
    BelowValidity { n: u64, n_min: u64 },
    #[error("exhaustive modulus must be finite (use the exact formula for m = inf)")]
    InfiniteModulusOracle,
    #[error("character expectation supports at most 6 generators, word uses {rank}")]
    TooManyGenerators { rank: u32 },
    #[error("invalid group spec: {0}")]
    InvalidGroupSpec(String),
    #[error("dimension must be >= 1")]
    ZeroDimension,
    #[error("sample count must be >= 1")]
    ZeroSamples,
    #[error("genus must be >= 1")]
    ZeroGenus,
    #[error("chi is defined for modulus >= 2 or inf; for m = 1 use the primitivity rank")]
    ChiAtModulusOne,
}

impl Error {
    /// True for errors that mean "the requested computation is too large",
    /// as opposed to malformed input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::FringeCapExceeded { .. } | Error::OracleCapExceeded { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
