//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so the map order
//! is lexicographic with `x1 > x2 > …`; that order is a monomial order and is
//! what exact division uses. The canonical *printed* order is by weighted
//! degree first, then with larger powers of earlier variables first.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::algebra::{Coeff, MultiIndex};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zeros(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_{var+1}` (0-based `var`).
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(MultiIndex::unit(nvars, var), Rational::one())
    }

    pub fn monomial(alpha: MultiIndex, c: Rational) -> Self {
        let nvars = alpha.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        Poly { nvars, terms }
    }

    /// Builds from `(exponents, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Poly::zero(nvars);
        for (a, c) in terms {
            if a.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: a.len() });
            }
            p.add_term(a, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zeros(self.nvars))
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign_poly(other);
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = Poly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        Ok(out)
    }

    /// `self += other`; panics on a dimension mismatch.
    pub fn add_assign_poly(&mut self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomial dimension mismatch");
        for (a, c) in &other.terms {
            self.add_term(a.clone(), c.clone());
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (a, v) in &other.terms {
            self.add_term(a.clone(), c * v);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to the 0-based variable `var`.
    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (a, c) in &self.terms {
            let e = a.get(var);
            if e > 0 {
                let mut b = a.clone();
                b.set(var, e - 1);
                out.add_term(b, c * rational::int(e as i64));
            }
        }
        out
    }

    /// Antiderivative in `var` vanishing on `x_var = 0`.
    pub fn antiderivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (a, c) in &self.terms {
            let e = a.get(var);
            let mut b = a.clone();
            b.set(var, e + 1);
            out.add_term(b, c / rational::int(e as i64 + 1));
        }
        out
    }

    /// Sets the listed variables to zero.
    pub fn restrict_zero(&self, vars: impl Fn(usize) -> bool) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| (0..self.nvars).all(|i| a.get(i) == 0 || !vars(i)))
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let mut sum = Rational::zero();
        for (a, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in a.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(x[i].clone(), e as usize);
                }
            }
            sum += t;
        }
        Ok(sum)
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        Ok(self.compile().eval(x))
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(a, c)| {
                    let powers = a
                        .exponents()
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| (i, e as i32))
                        .collect();
                    (rational::to_f64(c), powers)
                })
                .collect(),
        }
    }

    /// Weighted degree `max d(α)`; `None` stands for the degree of zero.
    pub fn weighted_degree(&self, weights: &[i32]) -> Option<i64> {
        self.terms.keys().map(|a| a.weighted_degree(weights)).max()
    }

    pub fn is_homogeneous(&self, weights: &[i32]) -> bool {
        let mut it = self.terms.keys().map(|a| a.weighted_degree(weights));
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Leading term in the lexicographic order of the term map.
    pub fn leading_term(&self) -> Option<(&MultiIndex, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`; errors when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly> {
        self.check(divisor)?;
        let (lm, lc) = divisor
            .leading_term()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            let q = m.checked_sub(&lm).ok_or_else(|| {
                Error::Structural("polynomial division is not exact".into())
            })?;
            let qc = c / &lc;
            for (a, v) in &divisor.terms {
                rem.add_term(a.add(&q), -(&qc * v));
            }
            quot.add_term(q, qc);
        }
        Ok(quot)
    }

    /// Terms in canonical order: weighted degree, then earlier variables first.
    pub fn canonical_terms(&self, weights: &[i32]) -> Vec<(&MultiIndex, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_key(|(a, _)| (a.weighted_degree(weights), Reverse((*a).clone())));
        v
    }

    /// Canonical text: `-1/2*x1^2 + x1*x3 - 2*x5`, or `0`.
    pub fn to_canonical_string(&self, weights: &[i32]) -> String {
        let terms = self.canonical_terms(weights);
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (a, c)) in terms.into_iter().enumerate() {
            let t = format_term(a, c);
            if k == 0 {
                out.push_str(&t);
            } else if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&t);
            }
        }
        out
    }
}

pub fn format_monomial(a: &MultiIndex) -> String {
    a.exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
        .collect::<Vec<_>>()
        .join("*")
}

fn format_term(a: &MultiIndex, c: &Rational) -> String {
    let m = format_monomial(a);
    if m.is_empty() {
        rational::format(c)
    } else if c.is_one() {
        m
    } else if (-c).is_one() {
        format!("-{m}")
    } else {
        format!("{}*{}", rational::format(c), m)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = vec![1; self.nvars];
        write!(f, "Poly({})", self.to_canonical_string(&w))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = vec![1; self.nvars];
        f.write_str(&self.to_canonical_string(&w))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_poly(rhs);
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), rhs);
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial dimension mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Coeff for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.nvars)
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        self.add_assign_poly(other);
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        Poly::scale(self, c)
    }
}

/// Floating-point evaluator for a polynomial.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A polynomial vector field `Σ_ℓ coeffs[ℓ] ∂/∂x_{ℓ+1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyVectorField {
    pub coeffs: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(coeffs: Vec<Poly>) -> Result<Self> {
        let n = coeffs.len();
        if let Some(p) = coeffs.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
        }
        Ok(PolyVectorField { coeffs })
    }

    /// The coordinate field `∂/∂x_{var+1}`.
    pub fn coordinate(n: usize, var: usize) -> Self {
        let coeffs = (0..n)
            .map(|l| if l == var { Poly::one(n) } else { Poly::zero(n) })
            .collect();
        PolyVectorField { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Derivation action `Σ_ℓ V_ℓ ∂p/∂x_ℓ`.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        if p.nvars() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.nvars() });
        }
        let mut out = Poly::zero(self.dim());
        for (l, v) in self.coeffs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let d = p.derivative(l);
            if !d.is_zero() {
                out.add_assign_poly(&(v * &d));
            }
        }
        Ok(out)
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(l, p)| (l, p.compile()))
                .collect(),
        }
    }
}

/// Floating-point evaluator for a vector field; only nonzero components are stored.
#[derive(Clone, Debug)]
pub struct CompiledField {
    coeffs: Vec<(usize, CompiledPoly)>,
}

impl CompiledField {
    /// `out += scale * V(x)`.
    pub fn accumulate(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        if scale == 0.0 {
            return;
        }
        for (l, p) in &self.coeffs {
            out[*l] += scale * p.eval(x);
        }
    }
}

/// Largest absolute coefficient, used for quick size reports.
pub fn max_abs_coeff(p: &Poly) -> Rational {
    p.terms().map(|(_, c)| c.abs()).max().unwrap_or_else(Rational::zero)
}
