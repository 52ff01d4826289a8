//! Dense univariate polynomials in `N` over a generic coefficient field.
//!
//! The exact path instantiates these with arbitrary-precision rationals
//! (see the crate-root aliases); the same code runs over `f64` for purely
//! numeric work.  Coefficients are stored in ascending degree with no
//! trailing zeros, so the zero polynomial is the empty vector.

use num_traits::{FromPrimitive, Num, Signed};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficient bound: a field with negation.  Satisfied by `BigRational`,
/// `f64`, `f32`.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Num + Neg<Output = Self> {}
impl<T> Coeff for T where T: Clone + PartialEq + fmt::Debug + Num + Neg<Output = Self> {}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial {
            coeffs: vec![T::one()],
        }
    }

    pub fn constant(c: T) -> Self {
        Polynomial { coeffs: vec![c] }.trimmed()
    }

    /// The variable `N`.
    pub fn variable() -> Self {
        Polynomial {
            coeffs: vec![T::zero(), T::one()],
        }
    }

    pub fn monomial(degree: usize, c: T) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![T::zero(); degree + 1];
        coeffs[degree] = c;
        Polynomial { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        Polynomial { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == T::one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> T {
        self.coeffs.get(degree).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
        .trimmed()
    }

    /// Divide by the leading coefficient.  No-op on zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Polynomial::zero(),
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division; panics on a zero divisor (internal misuse).
    pub fn divrem(&self, den: &Self) -> (Self, Self) {
        assert!(!den.is_zero(), "polynomial division by zero");
        let dd = den.degree().unwrap();
        let lead = den.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c.clone();
            for (j, d) in den.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = rem[idx].clone() - c.clone() * d.clone();
            }
        }
        (
            Polynomial { coeffs: quot }.trimmed(),
            Polynomial { coeffs: rem }.trimmed(),
        )
    }

    /// Monic greatest common divisor (Euclid).  gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `N (N-1) .. (N-k+1)`; the empty product (k = 0) is 1.
    pub fn falling_factorial(k: u64) -> Self
    where
        T: FromPrimitive,
    {
        let mut p = Polynomial::one();
        for j in 0..k {
            let shift = Polynomial::from_coeffs(vec![
                -T::from_u64(j).expect("small integer fits the coefficient type"),
                T::one(),
            ]);
            p = &p * &shift;
        }
        p
    }
}

impl<T: Coeff> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Polynomial { coeffs }.trimmed()
    }
}

impl<T: Coeff> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Polynomial { coeffs }.trimmed()
    }
}

impl<T: Coeff> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial { coeffs }.trimmed()
    }
}

impl<T: Coeff> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<T: Coeff + Signed + fmt::Display> fmt::Display for Polynomial<T> {
    /// Conventional descending form, e.g. `3N^2 - 4N + 1`.  Fractional
    /// coefficients are parenthesized: `(3/2)N`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag_str = mag.to_string();
            let coeff_part = if mag.is_one() && deg > 0 {
                String::new()
            } else if mag_str.contains('/') && deg > 0 {
                format!("({mag_str})")
            } else {
                mag_str
            };
            match deg {
                0 => write!(f, "{coeff_part}")?,
                1 => write!(f, "{coeff_part}N")?,
                _ => write!(f, "{coeff_part}N^{deg}")?,
            }
        }
        Ok(())
    }
}
