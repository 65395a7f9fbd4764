//! Truncated log-Laurent series Σ c_{k,l} xᵏ (log x)ˡ.
//!
//! A series carries an accuracy order `N`: it agrees with the quantity it
//! represents up to an error of size O(x^{N+1} |log x|^p). Arithmetic keeps
//! track of this order, so a product of two series is only trusted as far as
//! both factors allow.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{NahmError, Result};
use crate::frame_algebra::{max_abs, Mat3};

/// Coefficient types a series may carry.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    /// Max-entry norm.
    fn norm(&self) -> f64;
}

/// Coefficients with an associative product and a unit.
pub trait Algebra: Coefficient + Mul<Output = Self> {
    fn one() -> Self;
    fn inverse(&self) -> Option<Self>;
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Algebra for f64 {
    fn one() -> Self {
        1.0
    }
    fn inverse(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
}

impl Coefficient for Mat3 {
    fn zero() -> Self {
        Mat3::zeros()
    }
    fn norm(&self) -> f64 {
        max_abs(self)
    }
}

impl Algebra for Mat3 {
    fn one() -> Self {
        Mat3::identity()
    }
    fn inverse(&self) -> Option<Self> {
        self.try_inverse()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLaurentSeries<T> {
    k_min: i32,
    order: i32,
    coeffs: BTreeMap<(i32, u32), T>,
}

pub type ScalarSeries = LogLaurentSeries<f64>;
pub type MatSeries = LogLaurentSeries<Mat3>;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl<T: Coefficient> LogLaurentSeries<T> {
    /// The zero series known through `order`.
    pub fn new(k_min: i32, order: i32) -> Self {
        Self {
            k_min,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(k_min: i32, order: i32, terms: impl IntoIterator<Item = ((i32, u32), T)>) -> Self {
        let mut s = Self::new(k_min, order);
        for ((k, l), c) in terms {
            s.add_to(k, l, c);
        }
        s
    }

    /// `c` as a series starting at x⁰.
    pub fn constant(c: T, order: i32) -> Self {
        Self::from_terms(0, order, [((0, 0), c)])
    }

    pub fn monomial(c: T, k: i32, l: u32, order: i32) -> Self {
        Self::from_terms(k.min(order), order, [((k, l), c)])
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Coefficient of xᵏ(log x)ˡ, zero when absent.
    pub fn get(&self, k: i32, l: u32) -> T {
        self.coeffs.get(&(k, l)).cloned().unwrap_or_else(T::zero)
    }

    /// Overwrite a coefficient. Terms beyond the order are dropped.
    pub fn set(&mut self, k: i32, l: u32, c: T) {
        if k > self.order {
            return;
        }
        assert!(k >= self.k_min, "term x^{k} below k_min {}", self.k_min);
        self.coeffs.insert((k, l), c);
    }

    pub fn add_to(&mut self, k: i32, l: u32, c: T) {
        if k > self.order {
            return;
        }
        assert!(k >= self.k_min, "term x^{k} below k_min {}", self.k_min);
        let entry = self.coeffs.entry((k, l)).or_insert_with(T::zero);
        *entry = entry.clone() + c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, u32), &T)> {
        self.coeffs.iter()
    }

    /// Largest log power among coefficients above `tol`.
    pub fn max_log_power(&self, tol: f64) -> Option<u32> {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(&(_, l), _)| l)
            .max()
    }

    /// Largest coefficient norm over all terms with k ≤ `k_max`.
    pub fn max_norm_through(&self, k_max: i32) -> f64 {
        self.coeffs
            .iter()
            .filter(|(&(k, _), _)| k <= k_max)
            .fold(0.0_f64, |acc, (_, c)| acc.max(c.norm()))
    }

    /// Lowest power carrying a coefficient of norm above `tol`.
    pub fn leading_power(&self, tol: f64) -> Option<i32> {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(&(k, _), _)| k)
            .min()
    }

    /// Lower the accuracy order, discarding terms above it.
    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        Self {
            k_min: self.k_min.min(order),
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(k, _), _)| k <= order)
                .map(|(key, c)| (*key, c.clone()))
                .collect(),
        }
    }

    /// Declare a larger accuracy order. Only meaningful for series that are
    /// exact polynomials in x and log x.
    pub fn with_order(mut self, order: i32) -> Self {
        self.coeffs.retain(|&(k, _), _| k <= order);
        self.order = order;
        self.k_min = self.k_min.min(order);
        self
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> LogLaurentSeries<U> {
        LogLaurentSeries {
            k_min: self.k_min,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(key, c)| (*key, f(c))).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.clone() * s)
    }

    /// Convolution product with an arbitrary bilinear coefficient product.
    pub fn mul_with<U: Coefficient, V: Coefficient>(
        &self,
        other: &LogLaurentSeries<U>,
        product: impl Fn(&T, &U) -> V,
    ) -> LogLaurentSeries<V> {
        let order = (self.order + other.k_min).min(other.order + self.k_min);
        let k_min = (self.k_min + other.k_min).min(order);
        let mut out = LogLaurentSeries::new(k_min, order);
        for (&(k1, l1), a) in &self.coeffs {
            for (&(k2, l2), b) in &other.coeffs {
                if k1 + k2 <= order {
                    out.add_to(k1 + k2, l1 + l2, product(a, b));
                }
            }
        }
        out
    }

    /// Termwise d/dx.
    pub fn d_dx(&self) -> Self {
        let mut out = Self::new(self.k_min - 1, self.order - 1);
        for (&(k, l), c) in &self.coeffs {
            if k != 0 {
                out.add_to(k - 1, l, c.clone() * f64::from(k));
            }
            if l > 0 {
                out.add_to(k - 1, l - 1, c.clone() * f64::from(l));
            }
        }
        out
    }

    /// Substitute x ↦ λx.
    pub fn rescale(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0, "rescale needs a positive factor");
        let ll = lambda.ln();
        let mut out = Self::new(self.k_min, self.order);
        for (&(k, l), c) in &self.coeffs {
            let pk = lambda.powi(k);
            for j in 0..=l {
                let w = pk * binomial(l, j) * ll.powi((l - j) as i32);
                out.add_to(k, j, c.clone() * w);
            }
        }
        out
    }

    pub fn evaluate(&self, x: f64) -> T {
        let lx = x.ln();
        self.coeffs.iter().fold(T::zero(), |acc, (&(k, l), c)| {
            acc + c.clone() * (x.powi(k) * lx.powi(l as i32))
        })
    }

    /// Termwise d/dx evaluated at `x`.
    pub fn evaluate_derivative(&self, x: f64) -> T {
        self.d_dx().evaluate(x)
    }
}

impl<T: Coefficient> Add for &LogLaurentSeries<T> {
    type Output = LogLaurentSeries<T>;
    fn add(self, rhs: Self) -> LogLaurentSeries<T> {
        let order = self.order.min(rhs.order);
        let mut out = LogLaurentSeries::new(self.k_min.min(rhs.k_min).min(order), order);
        for (&(k, l), c) in self.coeffs.iter().chain(rhs.coeffs.iter()) {
            out.add_to(k, l, c.clone());
        }
        out
    }
}

impl<T: Coefficient> Sub for &LogLaurentSeries<T> {
    type Output = LogLaurentSeries<T>;
    fn sub(self, rhs: Self) -> LogLaurentSeries<T> {
        self + &(-rhs)
    }
}

impl<T: Coefficient> Neg for &LogLaurentSeries<T> {
    type Output = LogLaurentSeries<T>;
    fn neg(self) -> LogLaurentSeries<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Algebra> Mul for &LogLaurentSeries<T> {
    type Output = LogLaurentSeries<T>;
    fn mul(self, rhs: Self) -> LogLaurentSeries<T> {
        self.mul_with(rhs, |a, b| a.clone() * b.clone())
    }
}

impl<T: Algebra> LogLaurentSeries<T> {
    pub fn one(order: i32) -> Self {
        Self::constant(T::one(), order)
    }

    /// Multiplicative inverse. The leading term must be a pure power with an
    /// invertible coefficient.
    pub fn invert(&self) -> Result<Self> {
        let k0 = self.leading_power(0.0).ok_or(NahmError::NotInvertible)?;
        if self.coeffs.iter().any(|(&(k, l), c)| k == k0 && l > 0 && c.norm() > 0.0) {
            return Err(NahmError::NotInvertible);
        }
        let c0 = self.get(k0, 0);
        let c0_inv = c0.inverse().ok_or(NahmError::NotInvertible)?;
        let rel = self.order - k0;
        // self = x^{k0} c0 (1 + u) with u of positive order
        let mut u = LogLaurentSeries::new(0, rel);
        for (&(k, l), c) in &self.coeffs {
            if (k, l) != (k0, 0) {
                u.add_to(k - k0, l, c0_inv.clone() * c.clone());
            }
        }
        let mut sum = Self::one(rel);
        let mut power = Self::one(rel);
        let neg_u = -&u;
        for _ in 0..rel.max(0) {
            power = (&power * &neg_u).truncate(rel);
            sum = &sum + &power;
        }
        let mut out = Self::new(-k0, rel - k0);
        for (&(k, l), c) in &sum.coeffs {
            out.add_to(k - k0, l, c.clone() * c0_inv.clone());
        }
        Ok(out)
    }

    /// Square root of a series with leading term exactly 1 at x⁰, by Newton
    /// iteration y ↦ ½(y + a/y).
    pub fn sqrt(&self) -> Result<Self> {
        if self.k_min < 0 && self.coeffs.iter().any(|(&(k, _), c)| k < 0 && c.norm() > 0.0) {
            return Err(NahmError::NotInvertible);
        }
        if self.get(0, 0) != T::one()
            || self.coeffs.iter().any(|(&(k, l), c)| k == 0 && l > 0 && c.norm() > 0.0)
        {
            return Err(NahmError::NotInvertible);
        }
        let order = self.order;
        let mut y = Self::one(order);
        let mut correct = 1;
        while correct <= order.max(0) {
            let q = &self.truncate(order) * &y.invert()?;
            y = (&y + &q).scale(0.5).truncate(order);
            correct *= 2;
        }
        // one more pass in case the loop exited early on tiny orders
        let q = &self.truncate(order) * &y.invert()?;
        Ok((&y + &q).scale(0.5).truncate(order))
    }

    /// Exponential of a series without terms below x¹.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs.iter().any(|(&(k, _), c)| k < 1 && c.norm() > 0.0) {
            return Err(NahmError::InvalidInput("exp needs a series vanishing at x = 0".into()));
        }
        let order = self.order;
        let x = self.clone().with_k_min(1.min(order));
        let mut sum = Self::one(order);
        let mut power = Self::one(order);
        for n in 1..=order.max(0) {
            power = (&power * &x).scale(1.0 / f64::from(n)).truncate(order);
            sum = &sum + &power;
        }
        Ok(sum)
    }

    fn with_k_min(mut self, k_min: i32) -> Self {
        debug_assert!(self.coeffs.keys().all(|&(k, _)| k >= k_min));
        self.k_min = k_min;
        self
    }
}

impl MatSeries {
    pub fn transpose(&self) -> Self {
        self.map(|m| m.transpose())
    }

    pub fn trace(&self) -> ScalarSeries {
        self.map(|m| m.trace())
    }

    pub fn entry(&self, i: usize, j: usize) -> ScalarSeries {
        self.map(|m| m[(i, j)])
    }

    pub fn scalar_mul(&self, s: &ScalarSeries) -> Self {
        self.mul_with(s, |m, a| m * *a)
    }

    /// Determinant as a scalar series.
    pub fn det3(&self) -> ScalarSeries {
        let e = |i, j| self.entry(i, j);
        let mut det = ScalarSeries::new(3 * self.k_min, self.order + 2 * self.k_min);
        for (i, j, k, sgn) in [
            (0, 1, 2, 1.0),
            (1, 2, 0, 1.0),
            (2, 0, 1, 1.0),
            (0, 2, 1, -1.0),
            (2, 1, 0, -1.0),
            (1, 0, 2, -1.0),
        ] {
            let term = &(&e(0, i) * &e(1, j)) * &e(2, k);
            det = &det + &term.scale(sgn);
        }
        det
    }
}

impl ScalarSeries {
    /// Promote to a matrix series s(x)·M.
    pub fn times_matrix(&self, m: &Mat3) -> MatSeries {
        self.map(|a| m * *a)
    }
}
