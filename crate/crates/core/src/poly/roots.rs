use nalgebra::{linalg::Schur, DMatrix};

use super::ComplexPoly;
use crate::{Error, Result, C64};

/// Largest degree accepted by the companion-matrix root finder.
pub const MAX_ROOT_DEGREE: usize = 64;

/// All roots of a polynomial, repeated according to multiplicity.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<C64>,
    /// Max over roots of `|p(r)| / sum_j |a_j| |r|^j` (relative backward error).
    pub residual: f64,
}

impl RootSet {
    pub fn is_reliable(&self, tol: f64) -> bool {
        self.residual < tol
    }

    pub fn min_modulus(&self) -> f64 {
        self.roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min)
    }
}

impl ComplexPoly {
    /// Roots via eigenvalues of the (unscaled) companion matrix, followed by
    /// two Newton polishing steps on the original coefficients.
    pub fn roots(&self) -> Result<RootSet> {
        let n = self.degree().ok_or(Error::ZeroPolynomial)?;
        if n == 0 {
            return Err(Error::DegreeZero);
        }
        if n > MAX_ROOT_DEGREE {
            return Err(Error::DegreeTooLarge(n));
        }
        let lead = self.leading();
        let mut roots = if n == 1 {
            vec![-self.coeff(0) / lead]
        } else {
            let mut companion = DMatrix::<C64>::zeros(n, n);
            for i in 1..n {
                companion[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            for i in 0..n {
                companion[(i, n - 1)] = -self.coeff(i) / lead;
            }
            match Schur::try_new(companion, f64::EPSILON, 10_000) {
                Some(schur) => {
                    let (_, t) = schur.unpack();
                    (0..n).map(|i| t[(i, i)]).collect::<Vec<_>>()
                }
                // the unbalanced QR iteration can stall on root sets symmetric under z -> -z
                None => self.aberth()?,
            }
        };

        let dp = self.derivative();
        for r in roots.iter_mut() {
            for _ in 0..2 {
                let d = dp.eval(*r);
                if d.norm() == 0.0 {
                    break;
                }
                let step = self.eval(*r) / d;
                let candidate = *r - step;
                if self.eval(candidate).norm() <= self.eval(*r).norm() {
                    *r = candidate;
                } else {
                    break;
                }
            }
        }

        let residual = roots
            .iter()
            .map(|&r| {
                let scale: f64 = self
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(0.0, |acc, c| acc * r.norm() + c.norm());
                self.eval(r).norm() / scale.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
        Ok(RootSet { roots, residual })
    }
}

impl ComplexPoly {
    /// Simultaneous Aberth-Ehrlich iteration from points on the Cauchy radius.
    fn aberth(&self) -> Result<Vec<C64>> {
        let n = self.degree().ok_or(Error::ZeroPolynomial)?;
        let dp = self.derivative();
        let radius = (self.coeff(0).norm() / self.leading().norm())
            .powf(1.0 / n as f64)
            .max(1e-3);
        let mut z: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
            .collect();
        for _ in 0..1000 {
            let mut largest = 0.0f64;
            for k in 0..n {
                let pk = self.eval(z[k]);
                if pk.norm() == 0.0 {
                    continue;
                }
                let ratio = pk / dp.eval(z[k]);
                let repulsion: C64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| C64::new(1.0, 0.0) / (z[k] - z[j]))
                    .sum();
                let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[k] -= step;
                    largest = largest.max(step.norm() / z[k].norm().max(1.0));
                }
            }
            if largest < 1e-15 {
                return Ok(z);
            }
        }
        if z.iter().all(|r| r.is_finite()) {
            return Ok(z);
        }
        Err(Error::Numerical("root iteration did not converge".into()))
    }
}
