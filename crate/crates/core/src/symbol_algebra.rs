//! Polynomial Weyl symbols in one degree of freedom and their star algebra.
//!
//! A symbol is a finite sum `Σ c_ab q^a p^b` with complex coefficients. The
//! star product of two polynomials is the bidifferential series
//!
//! ```text
//! A ⋆ B = Σ_n (iħ/2)^n / n! · Σ_k C(n,k) (-1)^k (∂_q^{n-k} ∂_p^k A)(∂_p^{n-k} ∂_q^k B)
//! ```
//!
//! which terminates at `n = min(deg A, deg B)`, so every operation here is
//! exact up to floating point rounding of the coefficients. `ħ` is owned by
//! [`StarAlgebra`], never by individual symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Coefficients with magnitude below this are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-30;

/// Exponent pair `(a, b)` of the monomial `q^a p^b`.
pub type Exponents = (u32, u32);

/// A point of the system phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint<T> {
    pub q: T,
    pub p: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(q: T, p: T) -> Self {
        Self { q, p }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }
}

/// Sparse polynomial in `(q, p)` with complex coefficients, kept in
/// canonical form: no stored coefficient is (numerically) zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    terms: BTreeMap<Exponents, Complex<T>>,
}

impl<T: Real> Default for Poly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> Poly<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::one())
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn real_constant(c: T) -> Self {
        Self::constant(Complex::new(c, T::zero()))
    }

    /// `c · q^a p^b`.
    pub fn monomial(a: u32, b: u32, c: Complex<T>) -> Self {
        let mut terms = BTreeMap::new();
        if !negligible(c) {
            terms.insert((a, b), c);
        }
        Self { terms }
    }

    pub fn real_monomial(a: u32, b: u32, c: T) -> Self {
        Self::monomial(a, b, Complex::new(c, T::zero()))
    }

    /// The position coordinate `q`.
    pub fn q() -> Self {
        Self::real_monomial(1, 0, T::one())
    }

    /// The momentum coordinate `p`.
    pub fn p() -> Self {
        Self::real_monomial(0, 1, T::one())
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Complex<T>)>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out.prune();
        out
    }

    pub fn from_real_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, T)>,
    {
        Self::from_terms(terms.into_iter().map(|(e, c)| (e, Complex::new(c, T::zero()))))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, Complex<T>)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, a: u32, b: u32) -> Complex<T> {
        self.terms.get(&(a, b)).copied().unwrap_or_else(Complex::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    /// Largest coefficient magnitude, 0 for the zero polynomial.
    pub fn max_abs_coeff(&self) -> T {
        self.terms.values().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Largest imaginary part in magnitude.
    pub fn max_abs_imag(&self) -> T {
        self.terms.values().map(|c| c.im.abs()).fold(T::zero(), T::max)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut out = Self {
            terms: self.terms.iter().map(|(&e, &v)| (e, v * c)).collect(),
        };
        out.prune();
        out
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    /// `∂_q^k ∂_p^l` applied to the polynomial.
    pub fn derivative(&self, k: u32, l: u32) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &c) in &self.terms {
            if a < k || b < l {
                continue;
            }
            let f = falling::<T>(a, k) * falling::<T>(b, l);
            out.add_term((a - k, b - l), c * f);
        }
        out.prune();
        out
    }

    /// Pointwise value at `z`.
    pub fn evaluate(&self, z: PhasePoint<T>) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::zero(), |acc, (&(a, b), &c)| {
                acc + c * (powu(z.q, a) * powu(z.p, b))
            })
    }

    /// Real part of [`Poly::evaluate`]; used for real-coefficient symbols.
    pub fn evaluate_real(&self, z: PhasePoint<T>) -> T {
        self.evaluate(z).re
    }

    /// Maximum coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self - other).max_abs_coeff()
    }

    fn add_term(&mut self, e: Exponents, c: Complex<T>) {
        let slot = self.terms.entry(e).or_insert_with(Complex::zero);
        *slot = *slot + c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !negligible(*c));
    }
}

fn negligible<T: Real>(c: Complex<T>) -> bool {
    c.norm() < T::lit(PRUNE_THRESHOLD)
}

fn powu<T: Real>(x: T, n: u32) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x)
}

/// Falling factorial `a (a-1) ... (a-k+1)`.
fn falling<T: Real>(a: u32, k: u32) -> T {
    (0..k).fold(T::one(), |acc, i| acc * T::from_count((a - i) as usize))
}

fn binomial<T: Real>(n: u32, k: u32) -> T {
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| {
        acc * T::from_count((n - i) as usize) / T::from_count((i + 1) as usize)
    })
}

fn factorial<T: Real>(n: u32) -> T {
    falling(n, n)
}

impl<T: Real> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = self.clone();
        for (&e, &c) in &rhs.terms {
            out.add_term(e, c);
        }
        out.prune();
        out
    }
}

impl<T: Real> Add for Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Poly<T>) -> Poly<T> {
        &self + &rhs
    }
}

impl<T: Real> AddAssign<&Poly<T>> for Poly<T> {
    fn add_assign(&mut self, rhs: &Poly<T>) {
        for (&e, &c) in &rhs.terms {
            self.add_term(e, c);
        }
        self.prune();
    }
}

impl<T: Real> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly {
            terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect(),
        }
    }
}

impl<T: Real> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Sub for Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Poly<T>) -> Poly<T> {
        &self - &rhs
    }
}

/// Commutative pointwise product (not the star product).
impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = Poly::zero();
        for (&(a, b), &c) in &self.terms {
            for (&(x, y), &d) in &rhs.terms {
                out.add_term((a + x, b + y), c * d);
            }
        }
        out.prune();
        out
    }
}

impl<T: Real> Mul for Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Poly<T>) -> Poly<T> {
        &self * &rhs
    }
}

impl<T: Real> fmt::Display for Poly<T> {
    /// Renders as `c * q^a p^b + ...`, `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im == T::zero() {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            write!(f, " * q^{a} p^{b}")?;
        }
        Ok(())
    }
}

/// Star-product context. All symbols combined through one context share its `ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarAlgebra<T> {
    hbar: T,
}

impl<T: Real> StarAlgebra<T> {
    /// Panics unless `hbar` is finite and positive.
    pub fn new(hbar: T) -> Self {
        assert!(hbar > T::zero() && hbar.is_finite(), "hbar must be finite and positive");
        Self { hbar }
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// `A ⋆ B`.
    pub fn star_product(&self, a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
        let half = Complex::new(T::zero(), self.hbar / T::lit(2.0));
        let order = a.degree().min(b.degree());
        let mut weights = Vec::with_capacity(order as usize + 1);
        let mut w = Complex::one();
        for n in 0..=order {
            weights.push(w / factorial::<T>(n));
            w = w * half;
        }
        bidifferential(a, b, &weights)
    }

    /// `(A ⋆ B − B ⋆ A) / (iħ)`.
    ///
    /// Summed directly over the odd orders of the bidifferential series, so
    /// no cancellation occurs between the two star products and real
    /// symbols give real brackets.
    pub fn moyal_bracket(&self, a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
        let half = self.hbar / T::lit(2.0);
        let order = a.degree().min(b.degree());
        let weights: Vec<Complex<T>> = (0..=order)
            .map(|n| {
                if n % 2 == 0 {
                    return Complex::zero();
                }
                let sign = if (n / 2) % 2 == 0 { T::one() } else { -T::one() };
                Complex::new(sign * powu(half, n - 1) / factorial::<T>(n), T::zero())
            })
            .collect();
        bidifferential(a, b, &weights)
    }

    /// Commutator route to the Moyal bracket, kept for cross-checking
    /// [`StarAlgebra::moyal_bracket`].
    pub fn moyal_bracket_by_commutator(&self, a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
        let comm = &self.star_product(a, b) - &self.star_product(b, a);
        comm.scale(Complex::new(T::zero(), -T::one() / self.hbar))
    }

    pub fn poisson_bracket(&self, a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
        poisson_bracket(a, b)
    }
}

/// `∂_q A ∂_p B − ∂_p A ∂_q B`.
pub fn poisson_bracket<T: Real>(a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
    &(&a.derivative(1, 0) * &b.derivative(0, 1)) - &(&a.derivative(0, 1) * &b.derivative(1, 0))
}

/// `Σ_n weight[n] Σ_k C(n,k)(-1)^k (∂_q^{n-k}∂_p^k A)(∂_p^{n-k}∂_q^k B)`.
fn bidifferential<T: Real>(a: &Poly<T>, b: &Poly<T>, weights: &[Complex<T>]) -> Poly<T> {
    let mut out = Poly::zero();
    for (&(qa, pa), &ca) in &a.terms {
        for (&(qb, pb), &cb) in &b.terms {
            let cc = ca * cb;
            for (n, &w) in weights.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                let n = n as u32;
                for k in 0..=n {
                    // A is hit by ∂_q^{n-k} ∂_p^k, B by ∂_p^{n-k} ∂_q^k.
                    let j = n - k;
                    if j > qa || k > pa || j > pb || k > qb {
                        continue;
                    }
                    let mut f = binomial::<T>(n, k)
                        * falling::<T>(qa, j)
                        * falling::<T>(pa, k)
                        * falling::<T>(pb, j)
                        * falling::<T>(qb, k);
                    if k % 2 == 1 {
                        f = -f;
                    }
                    out.add_term((qa - j + qb - k, pa - k + pb - j), cc * w * f);
                }
            }
        }
    }
    out.prune();
    out
}
