//! Expected traces and the invariants read off from them.
//!
//! The expected trace of `w(g_1..g_r)` under Haar measure on any of the
//! handled families is the sum, over the sub-fringe `Q_m(w)`, of
//! falling-factorial terms — an exact rational function of `N`.  Its
//! leading Laurent behaviour encodes an Euler-characteristic-like
//! invariant `chi_m` together with a witness count, and those in turn
//! bound how `w` can be written as a product of commutators and squares.
//! Everything here is exact; Monte Carlo appears only as an optional
//! corroboration inside [`surface_test`].

use crate::fringe::{enumerate_fringe, enumerate_quotients, FringeConfig, FringeElement};
use crate::ratfun::l_term;
use crate::sampler::{estimate_trace, GroupFamily, GroupSpec};
use crate::stallings::core_graph_of_subgroup;
use crate::words::{Letter, Word};
use crate::{Error, Modulus, Poly, RatFn, Rational, Result};
use num_traits::{One, Signed, ToPrimitive};
use std::fmt;

/// `chi_m`-type value: an integer, or minus infinity when the witness
/// set is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chi {
    Finite(i64),
    MinusInfinity,
}

impl Chi {
    pub fn finite(self) -> Option<i64> {
        match self {
            Chi::Finite(v) => Some(v),
            Chi::MinusInfinity => None,
        }
    }
}

impl PartialOrd for Chi {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Chi {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Chi::Finite(a), Chi::Finite(b)) => a.cmp(b),
            (Chi::Finite(_), Chi::MinusInfinity) => std::cmp::Ordering::Greater,
            (Chi::MinusInfinity, Chi::Finite(_)) => std::cmp::Ordering::Less,
            (Chi::MinusInfinity, Chi::MinusInfinity) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Chi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chi::Finite(v) => write!(f, "{v}"),
            Chi::MinusInfinity => write!(f, "-inf"),
        }
    }
}

/// Primitivity-rank value: an integer, or infinity for words whose
/// `S_N` trace is identically 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pi {
    Finite(i64),
    Infinity,
}

impl fmt::Display for Pi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pi::Finite(v) => write!(f, "{v}"),
            Pi::Infinity => write!(f, "inf"),
        }
    }
}

/// A lower bound that may instead assert that no finite value exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    AtLeast(i64),
    Infinite,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtLeast(v) => write!(f, "{v}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

/// A minimal-rank element of `Q_m(w)`, reported through a free basis of
/// the subgroup it stands for.
#[derive(Clone, Debug)]
pub struct Witness {
    pub basis: Vec<Word>,
    pub rank: usize,
}

/// Everything the trace formula says about `(w, m)` at leading and
/// second order.
#[derive(Clone, Debug)]
pub struct ChiReport {
    pub modulus: Modulus,
    pub chi: Chi,
    /// Leading coefficient of the trace = number of witnesses.
    pub leading_coefficient: u64,
    pub witnesses: Vec<Witness>,
    /// Exponent of the second nonzero Laurent term (equals `chi` when
    /// the witness is not unique).
    pub chi2: Chi,
    pub c2: u64,
    /// True exactly when the trace is the pure power `N^chi`.
    pub unique_ae: bool,
    pub trace: RatFn,
}

/// Lower bounds on commutator-style lengths of `w` derived from `chi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LengthBounds {
    /// `cl(w) >= cl_lower`; `Infinite` means `w` is not a product of
    /// commutators at all.
    pub cl_lower: Bound,
    /// `min(sql(w), 2 cl(w)) >= mixed_lower`; `Infinite` means `w` is
    /// not a product of squares and commutators.
    pub mixed_lower: Bound,
}

/// The monomial `N^e` as an exact rational function.
pub fn n_power(e: i64) -> RatFn {
    if e >= 0 {
        RatFn::from_poly(Poly::monomial(e as usize, Rational::one()), 1)
    } else {
        RatFn::new(
            Poly::one(),
            Poly::monomial((-e) as usize, Rational::one()),
            1,
        )
    }
}

/// Sum the trace contributions of the fringe elements selected by `m`.
pub fn trace_from_fringe(fringe: &[FringeElement], m: Modulus) -> RatFn {
    fringe
        .iter()
        .filter(|el| el.profile.annihilated_by(m))
        .fold(RatFn::zero(), |acc, el| acc.add(&l_term(&el.graph)))
}

/// Exact expected trace of a `w`-random element: `S_N` for `m = 1`,
/// `C_m wr S_N` for finite `m >= 2`, `S^1 wr S_N` for `m = inf`.
pub fn trace_rational(w: &Word, m: Modulus, cfg: &FringeConfig) -> Result<RatFn> {
    if w.is_empty() {
        // The identity has trace N under every family.
        return Ok(RatFn::from_poly(Poly::variable(), 1));
    }
    let (core, _) = w.cyclic_reduce();
    let fringe = enumerate_fringe(&core, cfg)?;
    Ok(trace_from_fringe(&fringe, m))
}

/// [`chi_report`] on a precomputed fringe of the cyclically reduced
/// `core`, for callers sweeping several moduli over one word.
pub fn chi_report_from_fringe(
    core: &Word,
    m: Modulus,
    fringe: &[FringeElement],
) -> Result<ChiReport> {
    if m == Modulus::Finite(1) {
        return Err(Error::ChiAtModulusOne);
    }
    let trace = trace_from_fringe(fringe, m);
    let selected: Vec<&FringeElement> = fringe
        .iter()
        .filter(|el| el.profile.annihilated_by(m))
        .collect();

    if selected.is_empty() {
        assert!(trace.is_zero(), "empty Q_m must give the zero trace");
        return Ok(ChiReport {
            modulus: m,
            chi: Chi::MinusInfinity,
            leading_coefficient: 0,
            witnesses: Vec::new(),
            chi2: Chi::MinusInfinity,
            c2: 0,
            unique_ae: false,
            trace,
        });
    }

    let min_rank = selected.iter().map(|el| el.graph.rank()).min().unwrap();
    let witnesses: Vec<Witness> = selected
        .iter()
        .filter(|el| el.graph.rank() == min_rank)
        .map(|el| Witness {
            basis: el.graph.spanning_tree_basis(),
            rank: min_rank,
        })
        .collect();
    let c = witnesses.len() as u64;
    let chi = 1 - min_rank as i64;

    // The same pair (chi, C) must fall out of the Laurent expansion of
    // the trace; a mismatch means the pipeline is broken, so fail hard.
    let expansion = trace.laurent_prefix(2);
    let (lead_exp, lead_coeff) = expansion
        .leading()
        .expect("nonempty Q_m cannot give the zero trace");
    assert!(
        lead_exp == chi && *lead_coeff == Rational::from_integer(c.into()),
        "internal error: combinatorial (chi, C) = ({chi}, {c}) but the trace of {core} \
         at modulus {m} expands as {lead_coeff} * N^{lead_exp} + ...",
    );

    let unique_ae = trace == n_power(chi);
    let (chi2, c2) = if c >= 2 {
        (Chi::Finite(chi), c - 1)
    } else {
        match expansion.terms().get(1) {
            // Expansion terminated after one term: trace = N^chi exactly.
            None => (Chi::MinusInfinity, 0),
            Some((e2, coeff2)) => {
                assert!(
                    *e2 < chi && coeff2.is_integer() && coeff2.is_positive(),
                    "internal error: second trace term {coeff2} * N^{e2} of {core} at \
                     modulus {m} is not a lower-order positive integer term",
                );
                let c2 = coeff2
                    .to_integer()
                    .to_u64()
                    .expect("witness counts fit in u64 at desk scale");
                (Chi::Finite(*e2), c2)
            }
        }
    };
    debug_assert_eq!(unique_ae, c == 1 && chi2 == Chi::MinusInfinity);

    Ok(ChiReport {
        modulus: m,
        chi: Chi::Finite(chi),
        leading_coefficient: c,
        witnesses,
        chi2,
        c2,
        unique_ae,
        trace,
    })
}

/// Minimal rank over `Q_m(w)` (as `chi = 1 - rank`), witness subgroups,
/// second-order Laurent data, and the exact trace.  `m = 1` is rejected:
/// the `S_N` invariant is the primitivity rank, see [`primitivity_rank`].
pub fn chi_report(w: &Word, m: Modulus, cfg: &FringeConfig) -> Result<ChiReport> {
    if m == Modulus::Finite(1) {
        return Err(Error::ChiAtModulusOne);
    }
    if w.is_empty() {
        // The trivial word lies in the trivial subgroup, the unique
        // rank-0 element of its fringe; its trace is N for every family.
        return Ok(ChiReport {
            modulus: m,
            chi: Chi::Finite(1),
            leading_coefficient: 1,
            witnesses: vec![Witness {
                basis: Vec::new(),
                rank: 0,
            }],
            chi2: Chi::MinusInfinity,
            c2: 0,
            unique_ae: true,
            trace: RatFn::from_poly(Poly::variable(), 1),
        });
    }
    let (core, _) = w.cyclic_reduce();
    let fringe = enumerate_fringe(&core, cfg)?;
    chi_report_from_fringe(&core, m, &fringe)
}

/// Primitivity rank of a nonempty word and its witness count, read from
/// the `S_N` trace: `tr - 1` either vanishes identically (pi = inf) or
/// leads with `C * N^(1-pi)`.
pub fn primitivity_rank(w: &Word, cfg: &FringeConfig) -> Result<(Pi, u64)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let trace = trace_rational(w, Modulus::Finite(1), cfg)?;
    let remainder = trace.sub(&RatFn::from_poly(Poly::one(), 1));
    if remainder.is_zero() {
        return Ok((Pi::Infinity, 0));
    }
    let expansion = remainder.laurent_prefix(1);
    let (exp, coeff) = expansion.leading().expect("nonzero remainder");
    assert!(
        coeff.is_integer() && coeff.is_positive(),
        "internal error: S_N trace of {w} has non-integral remainder lead {coeff} * N^{exp}",
    );
    let c = coeff
        .to_integer()
        .to_u64()
        .expect("witness counts fit in u64 at desk scale");
    Ok((Pi::Finite(1 - exp), c))
}

/// Exact expected number of points fixed simultaneously by the images of
/// all generators under a uniform homomorphism tuple into `S_N`.
pub fn expected_fixed_points_subgroup(gens: &[Word], cfg: &FringeConfig) -> Result<RatFn> {
    let base = core_graph_of_subgroup(gens)?;
    let quotients = enumerate_quotients(&base, cfg)?;
    Ok(quotients
        .iter()
        .fold(RatFn::zero(), |acc, g| acc.add(&l_term(g))))
}

/// Lower bounds on the commutator length and on the mixed
/// commutator/square length of `w`, derived from `chi_inf` and `chi_2`.
pub fn length_bounds(w: &Word, cfg: &FringeConfig) -> Result<LengthBounds> {
    let (core, _) = w.cyclic_reduce();
    let fringe = if core.is_empty() {
        Vec::new()
    } else {
        enumerate_fringe(&core, cfg)?
    };
    let report = |m: Modulus| -> Result<Chi> {
        if core.is_empty() {
            Ok(Chi::Finite(1))
        } else {
            Ok(chi_report_from_fringe(&core, m, &fringe)?.chi)
        }
    };
    let cl_lower = match report(Modulus::Infinity)? {
        // cl >= (1 - chi_inf) / 2, rounded up.
        Chi::Finite(chi) => Bound::AtLeast((2 - chi) / 2),
        Chi::MinusInfinity => Bound::Infinite,
    };
    let mixed_lower = match report(Modulus::Finite(2))? {
        Chi::Finite(chi) => Bound::AtLeast(1 - chi),
        Chi::MinusInfinity => Bound::Infinite,
    };
    Ok(LengthBounds {
        cl_lower,
        mixed_lower,
    })
}

/// Which kind of surface group relator to test against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Orientable,
    NonOrientable,
}

/// Optional Monte-Carlo corroboration for [`surface_test`].
#[derive(Clone, Copy, Debug)]
pub struct McCheck {
    pub dimension: u32,
    pub samples: u64,
    pub seed: u64,
    /// Acceptance band in standard errors.
    pub band: f64,
}

/// One named necessary condition with its outcome.
#[derive(Clone, Debug)]
pub struct SurfaceCheck {
    pub name: &'static str,
    pub passed: bool,
    pub evidence: String,
}

/// Outcome of the surface-word consistency battery.  `consistent` means
/// every necessary condition checkable here holds; it is NOT a proof of
/// equivalence to the standard surface relator.
#[derive(Clone, Debug)]
pub struct SurfaceVerdict {
    pub orientation: Orientation,
    pub genus: u32,
    pub checks: Vec<SurfaceCheck>,
    pub consistent: bool,
}

/// `[x_1,y_1]...[x_g,y_g]`, the orientable genus-`g` relator in `F_2g`.
pub fn orientable_surface_word(genus: u32) -> Result<Word> {
    if genus == 0 {
        return Err(Error::ZeroGenus);
    }
    let mut letters = Vec::new();
    for k in 0..genus {
        let (a, b) = (2 * k + 1, 2 * k + 2);
        letters.push(Letter::new(a, true));
        letters.push(Letter::new(b, true));
        letters.push(Letter::new(a, false));
        letters.push(Letter::new(b, false));
    }
    Word::from_letters(letters, 2 * genus)
}

/// `x_1^2 ... x_g^2`, the non-orientable genus-`g` relator in `F_g`.
pub fn nonorientable_surface_word(genus: u32) -> Result<Word> {
    if genus == 0 {
        return Err(Error::ZeroGenus);
    }
    let letters = (1..=genus).flat_map(|g| [Letter::new(g, true), Letter::new(g, true)]);
    Word::from_letters(letters, genus)
}

/// Run the battery of necessary conditions for `w` to behave like the
/// genus-`g` surface relator of the given orientation.
pub fn surface_test(
    w: &Word,
    genus: u32,
    orientation: Orientation,
    mc: Option<&McCheck>,
    cfg: &FringeConfig,
) -> Result<SurfaceVerdict> {
    if genus == 0 {
        return Err(Error::ZeroGenus);
    }
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let g = genus as i64;
    let (core, _) = w.cyclic_reduce();
    let fringe = enumerate_fringe(&core, cfg)?;
    let exponents = w.exponent_vector();
    let mut checks = Vec::new();

    match orientation {
        Orientation::Orientable => {
            let balanced = exponents.iter().all(|&e| e == 0);
            checks.push(SurfaceCheck {
                name: "exponent_vector_is_zero",
                passed: balanced,
                evidence: format!("exponent vector {exponents:?}"),
            });

            let trace = trace_from_fringe(&fringe, Modulus::Infinity);
            let target = n_power(1 - 2 * g);
            checks.push(SurfaceCheck {
                name: "circle_wreath_trace_is_exact_power",
                passed: trace == target,
                evidence: format!("trace {trace}, target N^{}", 1 - 2 * g),
            });

            checks.push(witness_check(
                &core,
                &fringe,
                Modulus::Infinity,
                (2 * g) as usize,
                "witness_of_rank_2g_certifies_commutator_membership",
            ));

            if let Some(mc) = mc {
                checks.push(mc_check(w, GroupFamily::Unitary, 1 - 2 * g, mc)?);
            }
        }
        Orientation::NonOrientable => {
            let even = exponents.iter().all(|&e| e % 2 == 0);
            let nonzero = exponents.iter().any(|&e| e != 0);
            checks.push(SurfaceCheck {
                name: "exponent_vector_is_even_and_nonzero",
                passed: even && nonzero,
                evidence: format!("exponent vector {exponents:?}"),
            });

            let trace_inf = trace_from_fringe(&fringe, Modulus::Infinity);
            checks.push(SurfaceCheck {
                name: "circle_wreath_trace_vanishes",
                passed: trace_inf.is_zero(),
                evidence: format!("trace {trace_inf}"),
            });

            let trace2 = trace_from_fringe(&fringe, Modulus::Finite(2));
            let target = n_power(1 - g);
            checks.push(SurfaceCheck {
                name: "signed_permutation_trace_is_exact_power",
                passed: trace2 == target,
                evidence: format!("trace {trace2}, target N^{}", 1 - g),
            });

            checks.push(witness_check(
                &core,
                &fringe,
                Modulus::Finite(2),
                genus as usize,
                "witness_of_rank_g_certifies_even_rewrite",
            ));

            if let Some(mc) = mc {
                checks.push(mc_check(w, GroupFamily::Orthogonal, 1 - g, mc)?);
            }
        }
    }

    let consistent = checks.iter().all(|c| c.passed);
    Ok(SurfaceVerdict {
        orientation,
        genus,
        checks,
        consistent,
    })
}

/// Find a rank-`target_rank` element of `Q_m(core)` whose rewrite of the
/// word in the subgroup's own basis has every exponent killed by `m` —
/// the algebraic certificate behind the trace value.
fn witness_check(
    core: &Word,
    fringe: &[FringeElement],
    m: Modulus,
    target_rank: usize,
    name: &'static str,
) -> SurfaceCheck {
    for el in fringe {
        if !el.profile.annihilated_by(m) || el.graph.rank() != target_rank {
            continue;
        }
        let rewritten = el
            .graph
            .rewrite_in_basis(core)
            .expect("fringe elements contain the word");
        if rewritten.ambient_km_member(m) {
            let basis: Vec<String> = el
                .graph
                .spanning_tree_basis()
                .iter()
                .map(Word::to_string)
                .collect();
            return SurfaceCheck {
                name,
                passed: true,
                evidence: format!(
                    "subgroup with basis {{{}}}, word rewrites to {rewritten}",
                    basis.join(", ")
                ),
            };
        }
    }
    SurfaceCheck {
        name,
        passed: false,
        evidence: format!("no rank-{target_rank} element of Q_{m} certifies the word"),
    }
}

fn mc_check(
    w: &Word,
    family: GroupFamily,
    target_exp: i64,
    mc: &McCheck,
) -> Result<SurfaceCheck> {
    let spec = GroupSpec::new(family, mc.dimension)?;
    let est = estimate_trace(w, spec, mc.samples, mc.seed)?;
    let target = (mc.dimension as f64).powi(target_exp as i32);
    // Guard against a zero-variance estimate reported with stderr 0.
    let floor = 1e-9;
    let ok_re = (est.mean.re - target).abs() <= mc.band * est.stderr_re.max(floor);
    let ok_im = est.mean.im.abs() <= mc.band * est.stderr_im.max(floor);
    Ok(SurfaceCheck {
        name: "monte_carlo_trace_within_band",
        passed: ok_re && ok_im,
        evidence: format!(
            "estimate {:.6}{:+.6}i (se {:.2e}/{:.2e}, {} samples, seed {}) vs target {:.6} on {}",
            est.mean.re, est.mean.im, est.stderr_re, est.stderr_im, est.samples, est.seed,
            target, spec,
        ),
    })
}
