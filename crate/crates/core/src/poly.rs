//! Univariate polynomials over a generic coefficient field, with resultants
//! and discriminants computed by fraction-free elimination on the Sylvester
//! matrix. The exact path (rational coefficients) is deterministic and
//! blow-up free; the numeric path shares the same code with magnitude pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{rat_to_complex, Field, Rat};

/// Dense univariate polynomial, coefficients stored lowest degree first.
/// The zero polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> Polynomial<F> {
    /// Builds a polynomial from coefficients (lowest degree first),
    /// trimming exactly-zero leading coefficients.
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Self::new(vec![F::zero(), F::one()])
    }

    /// c0 + c1 x for the given pair.
    pub fn linear(c0: F, c1: F) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn monic_from_roots(roots: &[F]) -> Self {
        let mut p = Self::constant(F::one());
        for r in roots {
            p = p.mul(&Self::linear(r.clone().neg(), F::one()));
        }
        p
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * F::from_i64(k as i64))
            .collect();
        Self::new(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone().neg()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero_poly() || other.is_zero_poly() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d = divisor
            .degree()
            .ok_or_else(|| Error::invalid("division by the zero polynomial"))?;
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![F::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            let q = rem[k].clone() / lead.clone();
            quot[k - d] = q.clone();
            for j in 0..=d {
                rem[k - d + j] = rem[k - d + j].clone() - q.clone() * divisor.coeffs[j].clone();
            }
        }
        rem.truncate(d);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divrem(divisor)?.1)
    }

    /// self(other(x)), by Horner over polynomials.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Divides through by the leading coefficient.
    pub fn into_monic(self) -> Self {
        match self.leading() {
            None => self,
            Some(l) if l.is_one() => self,
            Some(l) => {
                let l = l.clone();
                Self::new(self.coeffs.into_iter().map(|c| c / l.clone()).collect())
            }
        }
    }

    /// Power sums p_0..p_k of the roots of a monic polynomial, via Newton's
    /// identities (no root extraction).
    pub fn power_sums(&self, up_to: usize) -> Result<Vec<F>> {
        let n = self.degree().ok_or_else(|| Error::invalid("zero polynomial"))?;
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        // e_k = (-1)^k * coeff(n - k)
        let e = |k: usize| -> F {
            if k > n {
                return F::zero();
            }
            let c = self.coeff(n - k);
            if k % 2 == 0 {
                c
            } else {
                c.neg()
            }
        };
        let mut p: Vec<F> = Vec::with_capacity(up_to + 1);
        p.push(F::from_i64(n as i64));
        for k in 1..=up_to {
            // p_k = sum_{i=1}^{min(k,n)} (-1)^{i-1} e_i p_{k-i}  (+ correction k*e_k*(-1)^{k-1} when k <= n)
            let mut acc = F::zero();
            for i in 1..=k.min(n) {
                let term = e(i) * p[k - i].clone();
                acc = if i % 2 == 1 { acc + term } else { acc - term };
            }
            if k <= n {
                // Newton: p_k = e_1 p_{k-1} - e_2 p_{k-2} + ... + (-1)^{k-1} k e_k,
                // and the loop above already added e_k * p_0 = n e_k with sign;
                // adjust so the final term carries factor k instead of n.
                let sign_term = e(k) * F::from_i64(k as i64 - n as i64);
                acc = if k % 2 == 1 {
                    acc + sign_term
                } else {
                    acc - sign_term
                };
            }
            p.push(acc);
        }
        Ok(p)
    }
}

impl Polynomial<Rat> {
    pub fn to_complex(&self) -> Polynomial<Complex64> {
        Polynomial::new(self.coeffs.iter().map(rat_to_complex).collect())
    }
}

impl Polynomial<Complex64> {
    /// Largest coefficient magnitude; 0 for the zero polynomial.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Trims leading coefficients that are numerically zero relative to the
    /// largest coefficient.
    pub fn trim_relative(mut self, rel_tol: f64) -> Self {
        let scale = self.max_coeff_norm();
        if scale == 0.0 {
            return Self::zero();
        }
        while self
            .coeffs
            .last()
            .is_some_and(|c| c.norm() <= rel_tol * scale)
        {
            self.coeffs.pop();
        }
        Polynomial { coeffs: self.coeffs }
    }
}

/// Integer-coefficient convenience constructor used all over the tests.
pub fn rat_poly(coeffs: &[i64]) -> Polynomial<Rat> {
    Polynomial::new(coeffs.iter().map(|&c| Rat::from_i64(c)).collect())
}

/// Complex convenience constructor from real integer coefficients.
pub fn complex_poly(coeffs: &[f64]) -> Polynomial<Complex64> {
    Polynomial::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
}

/// Sylvester matrix of f (degree m) and g (degree n), size (m+n)^2.
fn sylvester<F: Field>(f: &Polynomial<F>, g: &Polynomial<F>) -> Vec<Vec<F>> {
    let m = f.degree().unwrap_or(0);
    let n = g.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![F::zero(); size];
        for k in 0..=m {
            row[shift + k] = f.coeff(m - k);
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![F::zero(); size];
        for k in 0..=n {
            row[shift + k] = g.coeff(n - k);
        }
        rows.push(row);
    }
    rows
}

/// Determinant by Bareiss fraction-free elimination. Exact over the rationals;
/// over complex doubles the pivot is selected by magnitude.
fn det_bareiss<F: Field>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    if n == 0 {
        return F::one();
    }
    let mut sign_flip = false;
    let mut prev_pivot = F::one();
    for k in 0..n - 1 {
        // pivot: best weight among rows k..
        let (best, weight) = (k..n)
            .map(|i| (i, m[i][k].pivot_weight()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if weight == 0.0 {
            return F::zero();
        }
        if best != k {
            m.swap(best, k);
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].clone() * m[i][j].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = num / prev_pivot.clone();
            }
            m[i][k] = F::zero();
        }
        prev_pivot = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign_flip {
        det.neg()
    } else {
        det
    }
}

/// Resultant of f and g as the Sylvester determinant.
///
/// Conventions: res(f, g) = lc(f)^deg(g) * prod g(alpha_i) over the roots of f.
/// Both inputs zero is an error; one zero input gives 0.
pub fn resultant<F: Field>(f: &Polynomial<F>, g: &Polynomial<F>) -> Result<F> {
    if f.is_zero_poly() && g.is_zero_poly() {
        return Err(Error::UndefinedResultant);
    }
    if f.is_zero_poly() || g.is_zero_poly() {
        return Ok(F::zero());
    }
    let (m, n) = (f.degree().unwrap(), g.degree().unwrap());
    if m == 0 {
        // res(c, g) = c^deg(g)
        let mut acc = F::one();
        for _ in 0..n {
            acc = acc * f.coeff(0);
        }
        return Ok(acc);
    }
    if n == 0 {
        let mut acc = F::one();
        for _ in 0..m {
            acc = acc * g.coeff(0);
        }
        return Ok(acc);
    }
    Ok(det_bareiss(sylvester(f, g)))
}

/// Discriminant: (-1)^(n(n-1)/2) res(f, f') / lc(f). Requires degree >= 2.
pub fn discriminant<F: Field>(f: &Polynomial<F>) -> Result<F> {
    let n = f.degree().unwrap_or(0);
    if n < 2 {
        return Err(Error::DegreeTooSmall { min: 2, got: n });
    }
    let res = resultant(f, &f.derivative())?;
    let lead = f.leading().unwrap().clone();
    let d = res / lead;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { d.neg() } else { d })
}

/// Newton divided-difference interpolation through the given nodes.
/// Exact over the rationals when the nodes are rational.
pub fn interpolate<F: Field>(points: &[(F, F)]) -> Polynomial<F> {
    let n = points.len();
    if n == 0 {
        return Polynomial::zero();
    }
    // divided-difference table
    let mut coef: Vec<F> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let dx = points[i].0.clone() - points[i - level].0.clone();
            coef[i] = (coef[i].clone() - coef[i - 1].clone()) / dx;
        }
    }
    // Horner expansion of the Newton form
    let mut poly = Polynomial::zero();
    for i in (0..n).rev() {
        let node = Polynomial::linear(points[i].0.clone().neg(), F::one());
        poly = poly.mul(&node).add(&Polynomial::constant(coef[i].clone()));
    }
    poly
}
