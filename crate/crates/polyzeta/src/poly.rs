//! Exact multivariate Laurent polynomials over the Gaussian rationals.
//!
//! Terms are stored in a `BTreeMap` keyed by exponent vector, so iteration
//! order (and hence printing and JSON output) is deterministic. No zero
//! coefficient is ever stored.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::gauss::GaussianRational;

/// Integer exponent vector of fixed length `n`.
///
/// Polynomial supports have nonnegative entries; monomial transforms may
/// produce negative ones.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn to_bigint(&self) -> Vec<BigInt> {
        self.0.iter().map(|&e| BigInt::from(e)).collect()
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.0
            .iter()
            .map(|&e| BigRational::from_integer(BigInt::from(e)))
            .collect()
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the zero polynomial has no Newton polyhedron")]
    ZeroPolynomial,
    #[error("exact evaluation requires nonzero coordinates for negative exponents")]
    NegativePower,
}

/// A rational polyhedral region used by [`LaurentPolynomial::restrict`]:
/// an intersection of half-spaces `a·x >= b` and hyperplanes `a·x = b`.
#[derive(Clone, Debug)]
pub struct Region {
    n: usize,
    constraints: Vec<(Vec<BigRational>, BigRational, ConstraintKind)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    Eq,
    Ge,
}

impl Region {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            constraints: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn with_halfspace(mut self, a: Vec<BigRational>, b: BigRational) -> Self {
        assert_eq!(a.len(), self.n);
        self.constraints.push((a, b, ConstraintKind::Ge));
        self
    }

    pub fn with_hyperplane(mut self, a: Vec<BigRational>, b: BigRational) -> Self {
        assert_eq!(a.len(), self.n);
        self.constraints.push((a, b, ConstraintKind::Eq));
        self
    }

    /// Integer-coefficient convenience constructors.
    pub fn with_halfspace_int(self, a: &[i64], b: i64) -> Self {
        self.with_halfspace(
            a.iter().map(|&x| rat(x)).collect(),
            rat(b),
        )
    }

    pub fn with_hyperplane_int(self, a: &[i64], b: i64) -> Self {
        self.with_hyperplane(
            a.iter().map(|&x| rat(x)).collect(),
            rat(b),
        )
    }

    pub fn contains(&self, point: &ExponentVector) -> bool {
        let p = point.to_rational();
        self.constraints.iter().all(|(a, b, kind)| {
            let dot: BigRational = a.iter().zip(&p).map(|(ai, pi)| ai * pi).sum();
            match kind {
                ConstraintKind::Eq => dot == *b,
                ConstraintKind::Ge => dot >= *b,
            }
        })
    }
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Sparse exact Laurent polynomial in `x1..xn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolynomial {
    n: usize,
    terms: BTreeMap<ExponentVector, GaussianRational>,
}

impl LaurentPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(ExponentVector::zero(n), c);
        p
    }

    /// Single variable `x_{idx}` (1-based index).
    pub fn variable(n: usize, idx: usize) -> Self {
        assert!(idx >= 1 && idx <= n);
        let mut exp = vec![0i64; n];
        exp[idx - 1] = 1;
        Self::monomial(ExponentVector(exp), GaussianRational::one())
    }

    pub fn monomial(exp: ExponentVector, coef: GaussianRational) -> Self {
        let n = exp.len();
        let mut p = Self::zero(n);
        p.add_term(exp, coef);
        p
    }

    pub fn from_terms<I>(n: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, GaussianRational)>,
    {
        let mut p = Self::zero(n);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &ExponentVector) -> GaussianRational {
        self.terms
            .get(exp)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Constant term; `f(0)` when all exponents are nonnegative.
    pub fn constant_term(&self) -> GaussianRational {
        self.coefficient(&ExponentVector::zero(self.n))
    }

    /// Adds a term, combining with an existing one and dropping zeros.
    pub fn add_term(&mut self, exp: ExponentVector, coef: GaussianRational) {
        assert_eq!(exp.len(), self.n, "exponent vector length mismatch");
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// The support `eps(f)`: exponents with nonzero coefficient.
    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    /// Sum of the terms of `f` whose exponent lies in `region` (`f|_F`).
    pub fn restrict(&self, region: &Region) -> Result<Self, PolyError> {
        if region.dimension() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: region.dimension(),
            });
        }
        Ok(Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| region.contains(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        })
    }

    /// Keeps exactly the terms whose exponent is in `keep`.
    pub fn restrict_to_support(&self, keep: &[ExponentVector]) -> Self {
        let set: std::collections::BTreeSet<_> = keep.iter().collect();
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| set.contains(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.n, GaussianRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiplies by the (Laurent) monomial `x^shift`.
    pub fn shift(&self, shift: &ExponentVector) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(shift), c.clone()))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to `x_{idx}` (1-based).
    pub fn partial(&self, idx: usize) -> Self {
        assert!(idx >= 1 && idx <= self.n);
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let k = e.0[idx - 1];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[idx - 1] = k - 1;
            out.add_term(e2, c.mul(&GaussianRational::from_int(k)));
        }
        out
    }

    /// The formal gradient `(df/dx1, ..., df/dxn)`.
    pub fn gradient(&self) -> Vec<Self> {
        (1..=self.n).map(|i| self.partial(i)).collect()
    }

    /// Exact evaluation at a Gaussian-rational point. Coordinates hit by a
    /// negative exponent must be nonzero.
    pub fn evaluate_exact(
        &self,
        point: &[GaussianRational],
    ) -> Result<GaussianRational, PolyError> {
        if point.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k == 0 {
                    continue;
                }
                let base = if k > 0 {
                    x.clone()
                } else {
                    if x.is_zero() {
                        return Err(PolyError::NegativePower);
                    }
                    x.inv()
                };
                for _ in 0..k.unsigned_abs() {
                    term = (&term).mul(&base);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Floating-point evaluation at a complex point.
    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = c.to_complex64();
            for (x, &k) in point.iter().zip(&e.0) {
                if k != 0 {
                    term *= x.powi(k as i32);
                }
            }
            acc += term;
        }
        acc
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let is_const = e.0.iter().all(|&k| k == 0);
            let coef_str = c.to_string();
            let (sign, mag) = if let Some(stripped) = coef_str.strip_prefix('-') {
                ("-", stripped.to_string())
            } else {
                ("+", coef_str)
            };
            if idx == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mut wrote_coef = false;
            if is_const || mag != "1" {
                write!(f, "{mag}")?;
                wrote_coef = true;
            }
            let mut first_var = !wrote_coef;
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first_var || wrote_coef {
                    write!(f, "*")?;
                }
                first_var = false;
                write!(f, "x{}", i + 1)?;
                if k != 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}
