//! Statistical and exhaustive cross-checks for the exact formulas.
//!
//! Two independent kinds of evidence: seeded Monte Carlo over Haar
//! measure on `S_N`, `C_m wr S_N`, `S^1 wr S_N`, `U(N)`, `O(N)`, and
//! exact exhaustive averages over all homomorphism tuples for tiny `N`.
//! The exhaustive wreath oracle integrates the root-of-unity phases
//! analytically per walk (a phase monomial averages to 1 when every
//! variable's exponent is a multiple of m, else 0), so its work grows
//! with `N!^r`, not `(m^N N!)^r`.

use crate::words::Word;
use crate::{Error, Int, Modulus, Rational, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Work cap for the exhaustive oracles, measured in group-order units
/// `(m^N N!)^r`.
pub const DEFAULT_ORACLE_CAP: f64 = 1e8;

/// Which compact group to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupFamily {
    /// Permutation matrices.
    Symmetric,
    /// Permutation matrices with independent m-th-root-of-unity entries.
    Wreath(u32),
    /// Permutation matrices with independent unit-circle entries.
    CircleWreath,
    Unitary,
    Orthogonal,
}

/// A group family together with its matrix dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    family: GroupFamily,
    dimension: u32,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, dimension: u32) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::ZeroDimension);
        }
        if let GroupFamily::Wreath(m) = family {
            if m < 2 {
                return Err(Error::InvalidGroupSpec(
                    "wreath phase order must be >= 2 (use sym:N for m = 1)".into(),
                ));
            }
        }
        Ok(GroupSpec { family, dimension })
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }
}

impl std::fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            GroupFamily::Symmetric => write!(f, "sym:{}", self.dimension),
            GroupFamily::Wreath(m) => write!(f, "wreath:{}:{}", m, self.dimension),
            GroupFamily::CircleWreath => write!(f, "circle:{}", self.dimension),
            GroupFamily::Unitary => write!(f, "u:{}", self.dimension),
            GroupFamily::Orthogonal => write!(f, "o:{}", self.dimension),
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = Error;

    /// `sym:N`, `wreath:M:N`, `circle:N`, `u:N`, `o:N`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGroupSpec(format!("unrecognized group spec {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<u32>().map_err(|_| bad());
        match parts.as_slice() {
            ["sym", n] => GroupSpec::new(GroupFamily::Symmetric, num(n)?),
            ["wreath", m, n] => GroupSpec::new(GroupFamily::Wreath(num(m)?), num(n)?),
            ["circle", n] => GroupSpec::new(GroupFamily::CircleWreath, num(n)?),
            ["u", n] => GroupSpec::new(GroupFamily::Unitary, num(n)?),
            ["o", n] => GroupSpec::new(GroupFamily::Orthogonal, num(n)?),
            _ => Err(bad()),
        }
    }
}

/// Monte-Carlo trace estimate with componentwise standard errors.
#[derive(Clone, Copy, Debug)]
pub struct TraceEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: u64,
    pub seed: u64,
}

/// One Haar-distributed element of the group as an `N x N` complex matrix.
pub fn haar_element(spec: GroupSpec, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let n = spec.dimension as usize;
    match spec.family {
        GroupFamily::Symmetric => permutation_matrix(n, rng, |_| Complex64::new(1.0, 0.0)),
        GroupFamily::Wreath(m) => permutation_matrix(n, rng, |rng| {
            let k = rng.gen_range(0..m);
            Complex64::from_polar(1.0, TAU * k as f64 / m as f64)
        }),
        GroupFamily::CircleWreath => {
            permutation_matrix(n, rng, |rng| Complex64::from_polar(1.0, TAU * rng.gen::<f64>()))
        }
        GroupFamily::Unitary => {
            let z = DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let qr = z.qr();
            let r = qr.r();
            let mut q = qr.q();
            // Multiplying column j by the phase of r_jj makes the map
            // Gaussian -> Q measurable and its distribution Haar.
            for j in 0..n {
                let d = r[(j, j)];
                let lambda = if d.norm() > 0.0 {
                    d / d.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                };
                for i in 0..n {
                    q[(i, j)] *= lambda;
                }
            }
            q
        }
        GroupFamily::Orthogonal => {
            let z = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let qr = z.qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                let sign = if r[(j, j)] < 0.0 { -1.0 } else { 1.0 };
                for i in 0..n {
                    q[(i, j)] *= sign;
                }
            }
            q.map(|x| Complex64::new(x, 0.0))
        }
    }
}

/// Uniform permutation with per-row diagonal part: entry `(sigma(j), j)`
/// is `phase(sigma(j))`.
fn permutation_matrix(
    n: usize,
    rng: &mut impl Rng,
    mut phase: impl FnMut(&mut dyn rand::RngCore) -> Complex64,
) -> DMatrix<Complex64> {
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    let diag: Vec<Complex64> = (0..n).map(|_| phase(rng)).collect();
    let mut m = DMatrix::zeros(n, n);
    for (j, &sj) in sigma.iter().enumerate() {
        m[(sj, j)] = diag[sj];
    }
    m
}

/// Evaluate the word at a tuple of group elements; inverse letters use the
/// adjoint (all five families are unitary).
pub fn word_image(w: &Word, gens: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let n = gens.first().map_or(1, |g| g.nrows());
    let mut acc = DMatrix::identity(n, n);
    for l in w.letters() {
        let a = &gens[(l.gen() - 1) as usize];
        if l.is_positive() {
            acc *= a;
        } else {
            acc *= a.adjoint();
        }
    }
    acc
}

/// Seeded Monte-Carlo estimate of the expected trace of `w(g_1..g_r)`.
/// Deterministic given `(seed, samples)`; see [`estimate_trace_chained`]
/// for the parallel-friendly splitting rule.
pub fn estimate_trace(
    w: &Word,
    spec: GroupSpec,
    samples: u64,
    seed: u64,
) -> Result<TraceEstimate> {
    estimate_trace_chained(w, spec, samples, seed, 1)
}

/// Like [`estimate_trace`] but with the sample budget split over
/// `chains` independent generator streams (stream c of the seeded
/// generator), reduced in chain order.  Results are bit-identical given
/// `(seed, samples, chains)` regardless of how chains are scheduled.
pub fn estimate_trace_chained(
    w: &Word,
    spec: GroupSpec,
    samples: u64,
    seed: u64,
    chains: u64,
) -> Result<TraceEstimate> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let chains = chains.max(1).min(samples);
    let r = w.ambient_rank() as usize;
    let (mut sum_re, mut sum_im, mut sq_re, mut sq_im) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in 0..chains {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let quota = samples / chains + u64::from(c < samples % chains);
        for _ in 0..quota {
            let gens: Vec<DMatrix<Complex64>> =
                (0..r).map(|_| haar_element(spec, &mut rng)).collect();
            let t = word_image(w, &gens).trace();
            sum_re += t.re;
            sum_im += t.im;
            sq_re += t.re * t.re;
            sq_im += t.im * t.im;
        }
    }
    let n = samples as f64;
    let mean = Complex64::new(sum_re / n, sum_im / n);
    let stderr = |sum: f64, sq: f64, mean: f64| {
        if samples < 2 {
            return 0.0;
        }
        let var = ((sq - sum * mean).max(0.0)) / (n - 1.0);
        (var / n).sqrt()
    };
    Ok(TraceEstimate {
        mean,
        stderr_re: stderr(sum_re, sq_re, mean.re),
        stderr_im: stderr(sum_im, sq_im, mean.im),
        samples,
        seed,
    })
}

/// Guard for the exhaustive oracles: group-order work estimate
/// `(m^N N!)^r` against the cap.
fn check_cap(m: u32, n: u32, r: u32, cap: f64) -> Result<()> {
    let mut order = 1.0f64;
    for k in 1..=n {
        order *= k as f64;
    }
    order *= (m as f64).powi(n as i32);
    let work = order.powi(r as i32);
    if !(work <= cap) {
        return Err(Error::OracleCapExceeded { work, cap });
    }
    Ok(())
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// Advance a mixed-radix odometer; false when it wraps around to zeros.
fn next_tuple(ix: &mut [usize], base: usize) -> bool {
    for slot in ix.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Exact expected trace of `w` over ALL of `(C_m wr S_N)^r`, phases
/// integrated analytically.  `m = 1` is plain `S_N` (expected fixed
/// points of `w(sigma_1..sigma_r)`).
pub fn exhaustive_trace(w: &Word, m: Modulus, n: u32, cap: f64) -> Result<Rational> {
    let m = match m {
        Modulus::Finite(m) => m,
        Modulus::Infinity => return Err(Error::InfiniteModulusOracle),
    };
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let r = w.ambient_rank();
    check_cap(m, n, r, cap)?;
    let n = n as usize;
    let r = r as usize;
    let perms = all_permutations(n);
    let inverses: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0usize; n];
            for (j, &pj) in p.iter().enumerate() {
                inv[pj] = j;
            }
            inv
        })
        .collect();

    let mut hits: u64 = 0;
    let mut ix = vec![0usize; r];
    let mut expo = vec![0i64; r * n];
    loop {
        for start in 0..n {
            expo.fill(0);
            let mut pos = start;
            // Apply the word right-to-left, as a matrix product does.
            for l in w.letters().iter().rev() {
                let g = (l.gen() - 1) as usize;
                if l.is_positive() {
                    pos = perms[ix[g]][pos];
                    expo[g * n + pos] += 1;
                } else {
                    expo[g * n + pos] -= 1;
                    pos = inverses[ix[g]][pos];
                }
            }
            if pos == start && expo.iter().all(|&e| e.rem_euclid(m as i64) == 0) {
                hits += 1;
            }
        }
        if !next_tuple(&mut ix, perms.len()) {
            break;
        }
    }
    let tuples = Int::from(perms.len()).pow(r as u32);
    Ok(Rational::new(hits.into(), tuples))
}

/// Exact expected number of points of `{1..N}` fixed by the image of
/// every generator, averaged over all homomorphism tuples into `S_N`.
pub fn exhaustive_common_fixed_points(gens: &[Word], n: u32, cap: f64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let r = gens.iter().map(|g| g.ambient_rank()).max().unwrap_or(0);
    if r == 0 || gens.iter().all(|g| g.is_empty()) {
        return Err(Error::TrivialSubgroup);
    }
    check_cap(1, n, r, cap)?;
    let n = n as usize;
    let r = r as usize;
    let perms = all_permutations(n);
    let inverses: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0usize; n];
            for (j, &pj) in p.iter().enumerate() {
                inv[pj] = j;
            }
            inv
        })
        .collect();

    let mut hits: u64 = 0;
    let mut ix = vec![0usize; r];
    loop {
        for start in 0..n {
            let fixed_by_all = gens.iter().all(|gen| {
                let mut pos = start;
                for l in gen.letters().iter().rev() {
                    let g = (l.gen() - 1) as usize;
                    pos = if l.is_positive() {
                        perms[ix[g]][pos]
                    } else {
                        inverses[ix[g]][pos]
                    };
                }
                pos == start
            });
            if fixed_by_all {
                hits += 1;
            }
        }
        if !next_tuple(&mut ix, perms.len()) {
            break;
        }
    }
    let tuples = Int::from(perms.len()).pow(r as u32);
    Ok(Rational::new(hits.into(), tuples))
}

/// Exact distribution of the image permutation of `w` over all tuples:
/// one-line notation of `w(sigma_1..sigma_r)` mapped to its multiplicity.
pub fn exhaustive_image_distribution(
    w: &Word,
    n: u32,
    cap: f64,
) -> Result<BTreeMap<Vec<u32>, u64>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let r = w.ambient_rank();
    check_cap(1, n, r, cap)?;
    let n = n as usize;
    let r = r as usize;
    let perms = all_permutations(n);
    let inverses: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0usize; n];
            for (j, &pj) in p.iter().enumerate() {
                inv[pj] = j;
            }
            inv
        })
        .collect();

    let mut dist: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let mut ix = vec![0usize; r];
    loop {
        let image: Vec<u32> = (0..n)
            .map(|start| {
                let mut pos = start;
                for l in w.letters().iter().rev() {
                    let g = (l.gen() - 1) as usize;
                    pos = if l.is_positive() {
                        perms[ix[g]][pos]
                    } else {
                        inverses[ix[g]][pos]
                    };
                }
                pos as u32
            })
            .collect();
        *dist.entry(image).or_insert(0) += 1;
        if !next_tuple(&mut ix, perms.len()) {
            break;
        }
    }
    Ok(dist)
}

/// The three irreducible characters of `S_3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S3Irrep {
    Trivial,
    Sign,
    Standard2,
}

impl S3Irrep {
    /// Character value from the fixed-point count of a permutation of 3
    /// points (3 = identity, 1 = transposition, 0 = 3-cycle).
    fn value(self, fixed_points: usize) -> i64 {
        match (self, fixed_points) {
            (S3Irrep::Trivial, _) => 1,
            (S3Irrep::Sign, 3) | (S3Irrep::Sign, 0) => 1,
            (S3Irrep::Sign, _) => -1,
            (S3Irrep::Standard2, 3) => 2,
            (S3Irrep::Standard2, 1) => 0,
            (S3Irrep::Standard2, _) => -1,
        }
    }
}

/// Exact expectation of an irreducible `S_3` character under the
/// `w`-measure, by exhausting all `6^r` tuples.
pub fn s3_character_expectation(w: &Word, irrep: S3Irrep) -> Result<Rational> {
    let r = w.ambient_rank();
    if r > 6 {
        return Err(Error::TooManyGenerators { rank: r });
    }
    let r = r as usize;
    let perms = all_permutations(3);
    let inverses: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0usize; 3];
            for (j, &pj) in p.iter().enumerate() {
                inv[pj] = j;
            }
            inv
        })
        .collect();

    let mut sum: i64 = 0;
    let mut ix = vec![0usize; r];
    loop {
        let fixed = (0..3)
            .filter(|&start| {
                let mut pos = start;
                for l in w.letters().iter().rev() {
                    let g = (l.gen() - 1) as usize;
                    pos = if l.is_positive() {
                        perms[ix[g]][pos]
                    } else {
                        inverses[ix[g]][pos]
                    };
                }
                pos == start
            })
            .count();
        sum += irrep.value(fixed);
        if !next_tuple(&mut ix, perms.len()) {
            break;
        }
    }
    let tuples = Int::from(6).pow(r as u32);
    Ok(Rational::new(sum.into(), tuples))
}
