//! Dense complex polynomials with ascending coefficient storage.
//!
//! Index `j` of the coefficient vector holds the coefficient of `z^j`. The
//! representation is kept trimmed: the highest stored coefficient is nonzero
//! unless the polynomial is identically zero, in which case the vector is
//! empty.

mod cohn;
mod roots;

pub use cohn::{closed_disk_zero_count, cohn_step, lemma1_family, BOUNDARY_GUARD};
pub use roots::{RootSet, MAX_ROOT_DEGREE};

use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// `c * z^k`
    pub fn monomial(k: usize, c: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// Monic-times-`leading` polynomial with the given roots.
    pub fn from_roots(roots: &[C64], leading: C64) -> Self {
        let mut p = Self::constant(leading);
        for &r in roots {
            p = &p * &Self::new(vec![-r, C64::new(1.0, 0.0)]);
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `z^j`, zero beyond the stored range.
    pub fn coeff(&self, j: usize) -> C64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    /// Coefficients conjugated in place, i.e. the polynomial `conj(p(conj z))`.
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Synthetic division by `(z - root)`: returns the quotient and remainder `p(root)`.
    pub fn deflate(&self, root: C64) -> (Self, C64) {
        let n = self.coeffs.len();
        if n == 0 {
            return (Self::zero(), C64::new(0.0, 0.0));
        }
        let mut quotient = vec![C64::new(0.0, 0.0); n - 1];
        let mut carry = C64::new(0.0, 0.0);
        for j in (0..n).rev() {
            let value = self.coeffs[j] + carry * root;
            if j == 0 {
                return (Self::new(quotient), value);
            }
            quotient[j - 1] = value;
            carry = value;
        }
        unreachable!()
    }

    /// Coefficients of `t -> p(center + t)`, so index `k` holds `p^{(k)}(center) / k!`.
    pub fn taylor_shift(&self, center: C64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let hi = c[j + 1];
                c[j] += center * hi;
            }
        }
        Self::new(c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients smaller than `rel_tol` times the largest coefficient.
    pub fn trim_relative(&self, rel_tol: f64) -> Self {
        let scale = self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= rel_tol * scale) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ComplexPoly {
            type Output = ComplexPoly;
            fn $m(self, rhs: ComplexPoly) -> ComplexPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn horner_examples() {
        let p = ComplexPoly::from_real(&[2.0, 2.0, 2.0, 1.0]);
        assert_eq!(p.eval(c(0.0, 0.0)), c(2.0, 0.0));
        assert_eq!(p.eval(c(1.0, 0.0)), c(7.0, 0.0));
        let q = ComplexPoly::from_real(&[1.0, -1.0]);
        assert_eq!(q.eval(c(0.0, 1.0)), c(1.0, -1.0));
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = ComplexPoly::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert!(ComplexPoly::from_real(&[0.0, 0.0]).is_zero());
        assert_eq!(ComplexPoly::zero().degree(), None);
    }

    #[test]
    fn deflation_recovers_quotient() {
        let p = ComplexPoly::from_roots(&[c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.5)], c(2.0, 0.0));
        let (q, r) = p.deflate(c(0.0, 2.0));
        assert!(r.norm() < 1e-14);
        let back = &q * &ComplexPoly::new(vec![c(0.0, -2.0), c(1.0, 0.0)]);
        for j in 0..4 {
            assert_abs_diff_eq!((back.coeff(j) - p.coeff(j)).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn taylor_shift_gives_scaled_derivatives() {
        let p = ComplexPoly::from_real(&[1.0, -3.0, 0.5, 2.0]);
        let w = c(0.3, -0.7);
        let t = p.taylor_shift(w);
        assert!((t.coeff(0) - p.eval(w)).norm() < 1e-14);
        assert!((t.coeff(1) - p.derivative().eval(w)).norm() < 1e-14);
        assert!((t.coeff(2) * 2.0 - p.derivative().derivative().eval(w)).norm() < 1e-13);
    }
}
