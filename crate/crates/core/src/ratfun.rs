//! Rational functions of `N` with validity thresholds, and their Laurent
//! expansions at `N = infinity`.
//!
//! A [`RationalFunction`] is stored normalized — numerator and denominator
//! coprime, denominator monic — together with `n_min`, the smallest
//! integer at which the function is claimed to agree with whatever it was
//! computed from.  Normalization can cancel factors that vanish at small
//! `N` (e.g. `N(N-1)/(N(N-1))` normalizes to `1`, which is wrong at
//! `N = 1`), so evaluation below `n_min` is an error rather than a number.

use crate::poly::{Coeff, Polynomial};
use crate::stallings::CoreGraph;
use crate::{Error, Result};
use num_traits::{FromPrimitive, Signed};
use std::fmt;

#[derive(Clone, Debug)]
pub struct RationalFunction<T> {
    num: Polynomial<T>,
    den: Polynomial<T>,
    n_min: u64,
}

impl<T: Coeff> RationalFunction<T> {
    /// Normalizing constructor; panics on a zero denominator (internal
    /// misuse — public entry points never produce one).
    pub fn new(num: Polynomial<T>, den: Polynomial<T>, n_min: u64) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Polynomial::one(),
                n_min,
            };
        }
        let g = num.gcd(&den);
        let (num, _) = num.divrem(&g);
        let (den, _) = den.divrem(&g);
        let lead_inv = T::one() / den.leading().expect("nonzero").clone();
        RationalFunction {
            num: num.scale(&lead_inv),
            den: den.monic(),
            n_min,
        }
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
            n_min: 1,
        }
    }

    pub fn from_poly(num: Polynomial<T>, n_min: u64) -> Self {
        RationalFunction {
            num,
            den: Polynomial::one(),
            n_min,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    /// Smallest `N` at which the represented identity is claimed valid.
    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    /// Same function with a different claimed threshold.
    pub fn with_n_min(mut self, n_min: u64) -> Self {
        self.n_min = n_min;
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        let den = &self.den * &other.den;
        RationalFunction::new(num, den, self.n_min.max(other.n_min))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let num = &(&self.num * &other.den) - &(&other.num * &self.den);
        let den = &self.den * &other.den;
        RationalFunction::new(num, den, self.n_min.max(other.n_min))
    }

    /// True when the function is exactly `c * N^e`.
    pub fn is_monomial(&self) -> Option<(i64, T)> {
        if self.is_zero() {
            return None;
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let num_monomial = self.num.coeffs().iter().take(dn).all(|c| c.is_zero());
        let den_monomial = self.den.coeffs().iter().take(dd).all(|c| c.is_zero());
        (num_monomial && den_monomial)
            .then(|| (dn as i64 - dd as i64, self.num.leading().unwrap().clone()))
    }

    /// Exact evaluation at integer `N >= n_min`.
    pub fn evaluate_at(&self, n: u64) -> Result<T>
    where
        T: FromPrimitive,
    {
        if n < self.n_min {
            return Err(Error::BelowValidity {
                n,
                n_min: self.n_min,
            });
        }
        let x = T::from_u64(n).expect("N fits the coefficient type");
        let den = self.den.eval(&x);
        assert!(
            !den.is_zero(),
            "denominator vanished at N >= n_min; n_min tracking is broken"
        );
        Ok(self.num.eval(&x) / den)
    }

    /// First `depth` nonzero terms of the expansion in falling powers of
    /// `N`; fewer if the expansion terminates.
    pub fn laurent_prefix(&self, depth: usize) -> LaurentPrefix<T> {
        let mut terms = Vec::new();
        if self.is_zero() || depth == 0 {
            return LaurentPrefix { terms };
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let lead_exp = dn as i64 - dd as i64;
        // Substitute N = 1/t: the function becomes t^(dd-dn) * a(t)/b(t)
        // with a, b the coefficient-reversed polynomials; b(0) != 0.  Long
        // division of a by b in ascending powers of t yields the expansion.
        let a: Vec<T> = self.num.coeffs().iter().rev().cloned().collect();
        let b: Vec<T> = self.den.coeffs().iter().rev().cloned().collect();
        let mut rem = a;
        let mut k = 0usize;
        while terms.len() < depth {
            if rem.iter().all(|c| c.is_zero()) {
                break; // terminating expansion
            }
            if k >= rem.len() {
                rem.resize(k + 1, T::zero());
            }
            let c = rem[k].clone() / b[0].clone();
            if !c.is_zero() {
                // rem -= c * t^k * b
                if rem.len() < k + b.len() {
                    rem.resize(k + b.len(), T::zero());
                }
                for (j, bj) in b.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * bj.clone();
                }
                terms.push((lead_exp - k as i64, c));
            }
            k += 1;
        }
        LaurentPrefix { terms }
    }

    /// Coefficient-wise conversion that preserves the normalized shape and
    /// `n_min` verbatim; `f` must be a ring homomorphism up to rounding
    /// (e.g. exact rational -> f64).
    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> RationalFunction<U> {
        RationalFunction {
            num: Polynomial::from_coeffs(self.num.coeffs().iter().map(&f).collect()),
            den: Polynomial::from_coeffs(self.den.coeffs().iter().map(&f).collect()),
            n_min: self.n_min,
        }
    }
}

/// Equality of normalized forms; `n_min` is bookkeeping, not part of the
/// function, and is deliberately ignored.
impl<T: Coeff> PartialEq for RationalFunction<T> {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl<T: Coeff + Signed + fmt::Display> fmt::Display for RationalFunction<T> {
    /// `num / den`, numerator parenthesized when the denominator is
    /// nontrivial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) || self.den.is_zero() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// A truncated Laurent expansion at infinity: finitely many terms
/// `(exponent, coefficient)`, exponents strictly decreasing, coefficients
/// nonzero.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentPrefix<T> {
    terms: Vec<(i64, T)>,
}

impl<T: Coeff> LaurentPrefix<T> {
    pub fn terms(&self) -> &[(i64, T)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest-order term, if any.
    pub fn leading(&self) -> Option<(i64, &T)> {
        self.terms.first().map(|(e, c)| (*e, c))
    }

    /// Numeric evaluation of the truncated series.
    pub fn evaluate_at(&self, x: &T) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut pw = T::one();
            for _ in 0..e.unsigned_abs() {
                pw = pw * x.clone();
            }
            let term = if *e >= 0 {
                c.clone() * pw
            } else {
                c.clone() / pw
            };
            acc = acc + term;
        }
        acc
    }
}

/// Contribution of one core graph to an expected trace:
///
/// ```text
///          N (N-1) .. (N - #V + 1)
///   ---------------------------------------
///   prod_i  N (N-1) .. (N - #E_i + 1)
/// ```
///
/// with `n_min = max_i #E_i` (all denominator factors positive there).
/// The leading term of its expansion is `N^(1 - rank)`.
pub fn l_term<T: Coeff + FromPrimitive>(g: &CoreGraph) -> RationalFunction<T> {
    let num = Polynomial::falling_factorial(g.num_vertices() as u64);
    let mut den = Polynomial::one();
    let counts = g.edge_counts();
    for &e in &counts {
        den = &den * &Polynomial::falling_factorial(e);
    }
    let n_min = counts.iter().copied().max().unwrap_or(0).max(1);
    RationalFunction::new(num, den, n_min)
}
