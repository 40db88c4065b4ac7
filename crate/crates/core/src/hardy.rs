//! Truncated Fourier representations on the circle, Toeplitz matrices, the
//! Riesz projection and model-space bases.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix};
use rustfft::{Fft, FftPlanner};

use crate::blaschke::{BlaschkeProduct, RationalFn};
use crate::poly::{closed_disk_zero_count, ComplexPoly, BOUNDARY_GUARD};
use crate::{Error, Result, C64};

/// Largest admissible `|f^(N)|` for a truncation to count as converged.
pub const TAIL_BOUND: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// indices `0..=N`
    Analytic,
    /// indices `-N..=N`
    Bilateral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierTruncation {
    order: usize,
    kind: Kind,
    coeffs: Vec<C64>,
}

impl FourierTruncation {
    pub fn analytic(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "analytic truncation needs at least one coefficient");
        FourierTruncation {
            order: coeffs.len() - 1,
            kind: Kind::Analytic,
            coeffs,
        }
    }

    pub fn zeros(order: usize) -> Self {
        Self::analytic(vec![C64::new(0.0, 0.0); order + 1])
    }

    /// `coeffs[k]` is the coefficient of index `k - order`.
    pub fn bilateral(order: usize, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), 2 * order + 1);
        FourierTruncation {
            order,
            kind: Kind::Bilateral,
            coeffs,
        }
    }

    pub fn from_poly(p: &ComplexPoly, order: usize) -> Self {
        Self::analytic((0..=order).map(|j| p.coeff(j)).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of index `j`, zero outside the stored range.
    pub fn get(&self, j: isize) -> C64 {
        let idx = match self.kind {
            Kind::Analytic => j,
            Kind::Bilateral => j + self.order as isize,
        };
        if idx < 0 {
            return C64::new(0.0, 0.0);
        }
        self.coeffs.get(idx as usize).copied().unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Evaluates the (analytic part of the) series at an interior point.
    pub fn eval(&self, z: C64) -> C64 {
        (0..=self.order as isize)
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, j| acc * z + self.get(j))
    }

    pub fn scale(&self, s: C64) -> Self {
        FourierTruncation {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
            ..self.clone()
        }
    }

    /// Multiplication by `z` on an analytic truncation; the top coefficient drops out.
    pub fn shift(&self) -> Self {
        assert_eq!(self.kind, Kind::Analytic);
        let mut coeffs = vec![C64::new(0.0, 0.0)];
        coeffs.extend_from_slice(&self.coeffs[..self.order]);
        Self::analytic(coeffs)
    }

    /// Largest coefficient magnitude at the extreme index (or indices).
    pub fn tail(&self) -> f64 {
        match self.kind {
            Kind::Analytic => self.coeffs[self.order].norm(),
            Kind::Bilateral => self.coeffs[0].norm().max(self.coeffs[2 * self.order].norm()),
        }
    }

    pub fn axpy(&self, s: C64, other: &FourierTruncation) -> Result<Self> {
        check_same(self, other)?;
        Ok(FourierTruncation {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + s * b).collect(),
            ..self.clone()
        })
    }
}

fn check_same(f: &FourierTruncation, g: &FourierTruncation) -> Result<()> {
    if f.order != g.order || f.kind != g.kind {
        return Err(Error::OrderMismatch {
            left: f.order,
            right: g.order,
        });
    }
    Ok(())
}

/// A function with well-defined values on the unit circle.
pub trait BoundaryFunction: Sync {
    fn eval_at(&self, z: C64) -> C64;

    /// Fails with [`Error::PoleOnCircle`] when the function is singular near `|z| = 1`.
    fn check_poles(&self) -> Result<()> {
        Ok(())
    }
}

impl BoundaryFunction for RationalFn {
    fn eval_at(&self, z: C64) -> C64 {
        self.eval(z)
    }

    fn check_poles(&self) -> Result<()> {
        let Some(d) = self.den.degree() else {
            return Err(Error::ZeroPolynomial);
        };
        if d == 0 {
            return Ok(());
        }
        let rs = self.den.roots()?;
        if rs.roots.iter().any(|r| (r.norm() - 1.0).abs() <= 1e-6) {
            return Err(Error::PoleOnCircle);
        }
        Ok(())
    }
}

impl BoundaryFunction for BlaschkeProduct {
    fn eval_at(&self, z: C64) -> C64 {
        self.eval(z)
    }
}

impl BoundaryFunction for ComplexPoly {
    fn eval_at(&self, z: C64) -> C64 {
        self.eval(z)
    }
}

/// Boundary values `conj(f(zeta))`, i.e. the symbol `f-bar`.
pub struct Conjugate<'a, F: ?Sized>(pub &'a F);

impl<F: BoundaryFunction + ?Sized> BoundaryFunction for Conjugate<'_, F> {
    fn eval_at(&self, z: C64) -> C64 {
        self.0.eval_at(z).conj()
    }

    fn check_poles(&self) -> Result<()> {
        self.0.check_poles()
    }
}

/// Wraps a closure as a boundary function; the caller vouches for regularity.
pub struct FnBoundary<F>(pub F);

impl<F: Fn(C64) -> C64 + Sync> BoundaryFunction for FnBoundary<F> {
    fn eval_at(&self, z: C64) -> C64 {
        (self.0)(z)
    }
}

/// Uniform samples on the circle and their DFT.
pub struct BoundaryGrid {
    points: Vec<C64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl BoundaryGrid {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        BoundaryGrid {
            points: crate::blaschke::boundary_grid(size).collect(),
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn sample<F: BoundaryFunction + ?Sized>(&self, f: &F) -> Vec<C64> {
        self.points.iter().map(|&z| f.eval_at(z)).collect()
    }

    /// Fourier coefficients (index `j mod M`) from samples.
    pub fn coefficients(&self, mut samples: Vec<C64>) -> Vec<C64> {
        self.forward.process(&mut samples);
        let m = self.size() as f64;
        samples.iter_mut().for_each(|c| *c /= m);
        samples
    }

    /// Samples from Fourier coefficients stored at `j mod M`.
    pub fn synthesize(&self, mut coeffs: Vec<C64>) -> Vec<C64> {
        self.inverse.process(&mut coeffs);
        coeffs
    }

    /// Coefficients `-order..=order` or `0..=order` of sampled data.
    pub fn truncate(&self, coeffs: &[C64], order: usize, kind: Kind) -> FourierTruncation {
        let m = coeffs.len() as isize;
        let at = |j: isize| coeffs[j.rem_euclid(m) as usize];
        match kind {
            Kind::Analytic => FourierTruncation::analytic((0..=order as isize).map(at).collect()),
            Kind::Bilateral => FourierTruncation::bilateral(
                order,
                (-(order as isize)..=order as isize).map(at).collect(),
            ),
        }
    }

    /// Samples of the Riesz projection of sampled data (nonnegative
    /// frequencies below `M/2` kept).
    pub fn riesz_samples(&self, samples: Vec<C64>) -> Vec<C64> {
        let mut c = self.coefficients(samples);
        let m = c.len();
        for (j, v) in c.iter_mut().enumerate() {
            if j >= m / 2 {
                *v = C64::new(0.0, 0.0);
            }
        }
        self.synthesize(c)
    }
}

/// Number of DFT samples used for truncation order `order`.
pub fn sample_count(order: usize) -> usize {
    (4 * order).max(64)
}

/// Fourier coefficients of boundary values by oversampled DFT.
pub fn boundary_to_fourier<F: BoundaryFunction + ?Sized>(
    f: &F,
    order: usize,
    kind: Kind,
) -> Result<FourierTruncation> {
    f.check_poles()?;
    let grid = BoundaryGrid::new(sample_count(order));
    let coeffs = grid.coefficients(grid.sample(f));
    let t = grid.truncate(&coeffs, order, kind);
    let tail = t.tail();
    if tail > TAIL_BOUND {
        return Err(Error::TailTooLarge { tail });
    }
    Ok(t)
}

/// Dense `(N+1) x (N+1)` section of `T_phi`, entry `(j, k) = phi^(j - k)`.
#[derive(Clone, Debug)]
pub struct ToeplitzMatrix {
    symbol: FourierTruncation,
    matrix: DMatrix<C64>,
}

impl ToeplitzMatrix {
    pub fn new(symbol: FourierTruncation) -> Self {
        let n = symbol.order();
        let matrix = DMatrix::from_fn(n + 1, n + 1, |j, k| symbol.get(j as isize - k as isize));
        ToeplitzMatrix { symbol, matrix }
    }

    pub fn from_symbol<F: BoundaryFunction + ?Sized>(f: &F, order: usize) -> Result<Self> {
        Ok(Self::new(boundary_to_fourier(f, order, Kind::Bilateral)?))
    }

    pub fn order(&self) -> usize {
        self.symbol.order()
    }

    pub fn symbol(&self) -> &FourierTruncation {
        &self.symbol
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Truncation of `P(phi f)`.
    pub fn apply(&self, f: &FourierTruncation) -> Result<FourierTruncation> {
        if f.kind() != Kind::Analytic || f.order() != self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: f.order(),
            });
        }
        let n = self.order() + 1;
        let out = (0..n)
            .map(|j| (0..n).map(|k| self.matrix[(j, k)] * f.coeffs()[k]).sum())
            .collect();
        Ok(FourierTruncation::analytic(out))
    }

    /// Matrix of `T_{conj phi}` built from the conjugated symbol.
    pub fn adjoint_symbol(&self) -> ToeplitzMatrix {
        let n = self.order() as isize;
        let coeffs = (-n..=n).map(|j| self.symbol.get(-j).conj()).collect();
        ToeplitzMatrix::new(FourierTruncation::bilateral(self.order(), coeffs))
    }
}

/// Drops the negative-index coefficients.
pub fn riesz_project(f: &FourierTruncation) -> FourierTruncation {
    match f.kind() {
        Kind::Analytic => f.clone(),
        Kind::Bilateral => {
            FourierTruncation::analytic((0..=f.order() as isize).map(|j| f.get(j)).collect())
        }
    }
}

/// `sum f^(j) conj(g^(j))`
pub fn h2_inner(f: &FourierTruncation, g: &FourierTruncation) -> Result<C64> {
    check_same(f, g)?;
    Ok(f.coeffs().iter().zip(g.coeffs()).map(|(a, b)| a * b.conj()).sum())
}

/// Orthonormal basis of `K_I = H^2 - I H^2` for a finite Blaschke product.
#[derive(Clone, Debug)]
pub struct ModelSpaceBasis {
    pub inner: BlaschkeProduct,
    pub vectors: Vec<FourierTruncation>,
    /// The same vectors as `p / prod (1 - conj(a_i) z)` with `deg p < deg I`.
    pub rationals: Vec<RationalFn>,
}

impl ModelSpaceBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Szego kernels at distinct zeros and derivative kernels
/// `k! z^k / (1 - conj(a) z)^{k+1}` at repeated ones, orthonormalised through
/// the Cholesky factor of their Gram matrix.
pub fn model_space_basis(inner: &BlaschkeProduct, order: usize) -> Result<ModelSpaceBasis> {
    let d = inner.degree();
    if d == 0 {
        return Err(Error::BadParameters("model space of a constant inner function".into()));
    }
    if order < 8 * d {
        return Err(Error::BadParameters(format!(
            "truncation order {order} below 8 * deg I = {}",
            8 * d
        )));
    }

    // group zeros by value, preserving first-seen order
    let mut groups: Vec<(C64, usize)> = Vec::new();
    for &a in inner.zeros() {
        match groups.iter_mut().find(|(g, _)| (*g - a).norm() < 1e-14) {
            Some((_, m)) => *m += 1,
            None => groups.push((a, 1)),
        }
    }
    let denominator = inner.denominator();
    let factor = |a: C64| ComplexPoly::new(vec![C64::new(1.0, 0.0), -a.conj()]);
    let mut raw_nums = Vec::with_capacity(d);
    for (gi, &(a, mult)) in groups.iter().enumerate() {
        let others = groups
            .iter()
            .enumerate()
            .filter(|(gj, _)| *gj != gi)
            .fold(ComplexPoly::one(), |acc, (_, &(b, m))| &acc * &factor(b).pow(m));
        let mut kfact = 1.0;
        for k in 0..mult {
            if k > 0 {
                kfact *= k as f64;
            }
            let num = &(&ComplexPoly::monomial(k, C64::new(kfact, 0.0)) * &factor(a).pow(mult - k - 1))
                * &others;
            raw_nums.push(num);
        }
    }

    let raw: Vec<FourierTruncation> = raw_nums
        .iter()
        .map(|p| {
            let f = RationalFn::new(p.clone(), denominator.clone())?;
            Ok(FourierTruncation::analytic(f.taylor(order)))
        })
        .collect::<Result<_>>()?;
    let gram = DMatrix::from_fn(d, d, |i, j| h2_inner(&raw[j], &raw[i]).unwrap());
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let ratio = lo / hi;
    if ratio < 1e-13 {
        return Err(Error::DegenerateGram { ratio });
    }
    let chol = Cholesky::new(gram).ok_or(Error::DegenerateGram { ratio })?;
    // columns of L^{-H} give the orthonormal combinations
    let l = chol.l();
    let transform = l
        .adjoint()
        .try_inverse()
        .ok_or(Error::DegenerateGram { ratio })?;

    let mut vectors = Vec::with_capacity(d);
    let mut rationals = Vec::with_capacity(d);
    for k in 0..d {
        let mut v = FourierTruncation::zeros(order);
        let mut num = ComplexPoly::zero();
        for i in 0..d {
            let c = transform[(i, k)];
            v = v.axpy(c, &raw[i])?;
            num = &num + &raw_nums[i].scale(c);
        }
        vectors.push(v);
        rationals.push(RationalFn::new(num, denominator.clone())?);
    }
    Ok(ModelSpaceBasis {
        inner: inner.clone(),
        vectors,
        rationals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OuterMode {
    /// no zeros of numerator or denominator in the closed disk
    #[default]
    Strict,
    /// numerator zeros allowed on the circle, none in the open disk
    Lenient,
}

/// Outerness of a rational function.
///
/// Strict mode propagates [`Error::Borderline`] for zeros on the circle.
pub fn outer_check(f: &RationalFn, mode: OuterMode) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if closed_disk_zero_count(&f.den)? != 0 {
        return Ok(false);
    }
    match mode {
        OuterMode::Strict => Ok(closed_disk_zero_count(&f.num)? == 0),
        OuterMode::Lenient => {
            if f.num.degree() == Some(0) {
                return Ok(true);
            }
            let rs = f.num.roots()?;
            Ok(rs.roots.iter().all(|r| r.norm() >= 1.0 - BOUNDARY_GUARD))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::boundary_grid;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rat(num: &[f64], den: &[f64]) -> RationalFn {
        RationalFn::new(ComplexPoly::from_real(num), ComplexPoly::from_real(den)).unwrap()
    }

    #[test]
    fn fourier_of_polynomial() {
        let f = rat(&[0.5, -0.5], &[1.0]);
        let t = boundary_to_fourier(&f, 16, Kind::Analytic).unwrap();
        assert!((t.get(0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((t.get(1) - c(-0.5, 0.0)).norm() < 1e-15);
        assert!(t.coeffs()[2..].iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn fourier_of_geometric_series() {
        let f = rat(&[1.0], &[2.0, 1.0]);
        let t = boundary_to_fourier(&f, 64, Kind::Analytic).unwrap();
        for j in 0..=64 {
            let expect = (-1.0f64).powi(j) / 2.0f64.powi(j + 1);
            assert!((t.get(j as isize) - c(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn conjugation_flips_index() {
        let b = rat(&[0.5, 0.5], &[1.0]);
        let t = boundary_to_fourier(&Conjugate(&b), 8, Kind::Bilateral).unwrap();
        assert!((t.get(0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((t.get(-1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(t.get(1).norm() < 1e-15);
    }

    #[test]
    fn pole_on_circle_and_slow_tail_are_rejected() {
        let f = rat(&[1.0], &[1.0, -1.0]);
        assert_eq!(boundary_to_fourier(&f, 16, Kind::Analytic).unwrap_err(), Error::PoleOnCircle);
        let g = rat(&[1.0], &[1.0, -0.9]);
        assert!(matches!(
            boundary_to_fourier(&g, 16, Kind::Analytic),
            Err(Error::TailTooLarge { .. })
        ));
    }

    #[test]
    fn toeplitz_examples() {
        let zbar = FnBoundary(|z: C64| z.conj());
        let t = ToeplitzMatrix::from_symbol(&zbar, 8).unwrap();
        let one = FourierTruncation::from_poly(&ComplexPoly::one(), 8);
        assert!(t.apply(&one).unwrap().norm() < 1e-15);
        let z = FourierTruncation::from_poly(&ComplexPoly::from_real(&[0.0, 1.0]), 8);
        let out = t.apply(&z).unwrap();
        assert!((out.get(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(out.coeffs()[1..].iter().all(|v| v.norm() < 1e-15));

        let b = rat(&[0.5, 0.5], &[1.0]);
        let tb = ToeplitzMatrix::from_symbol(&Conjugate(&b), 8).unwrap();
        let f = FourierTruncation::from_poly(&ComplexPoly::from_real(&[1.0, 1.0]), 8);
        let out = tb.apply(&f).unwrap();
        assert!((out.get(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((out.get(1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(out.coeffs()[2..].iter().all(|v| v.norm() < 1e-15));

        let wrong = FourierTruncation::zeros(4);
        assert!(matches!(tb.apply(&wrong), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn toeplitz_structure_and_adjoint() {
        let phi = FnBoundary(|z: C64| {
            (z + c(0.3, 0.2)) / (C64::new(2.0, 0.0) - z) + z.conj() * z.conj() * c(0.1, -0.4)
        });
        let t = ToeplitzMatrix::from_symbol(&phi, 48).unwrap();
        let m = t.matrix();
        for j in 1..49 {
            for k in 1..49 {
                assert_eq!(m[(j, k)], m[(j - 1, k - 1)]);
            }
        }
        let adj = ToeplitzMatrix::from_symbol(&Conjugate(&phi), 48).unwrap();
        assert!((adj.matrix() - m.adjoint()).norm() < 1e-14);
        assert_eq!(t.adjoint_symbol().matrix(), &m.adjoint());
    }

    #[test]
    fn riesz_examples() {
        let f = FourierTruncation::bilateral(1, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let p = riesz_project(&f);
        assert_eq!(p.coeffs(), &[c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(riesz_project(&p), p);
    }

    #[test]
    fn inner_product_examples() {
        let one = FourierTruncation::from_poly(&ComplexPoly::one(), 4);
        let z = FourierTruncation::from_poly(&ComplexPoly::from_real(&[0.0, 1.0]), 4);
        assert_eq!(h2_inner(&one, &one).unwrap(), c(1.0, 0.0));
        assert_eq!(h2_inner(&z, &one).unwrap(), c(0.0, 0.0));
        let g = boundary_to_fourier(&rat(&[1.0], &[2.0, 1.0]), 64, Kind::Analytic).unwrap();
        assert!((h2_inner(&g, &g).unwrap().re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn model_space_examples() {
        let b1 = model_space_basis(&BlaschkeProduct::monomial(1), 16).unwrap();
        assert_eq!(b1.dimension(), 1);
        assert!((b1.vectors[0].get(0).norm() - 1.0).abs() < 1e-15);
        let b2 = model_space_basis(&BlaschkeProduct::monomial(2), 16).unwrap();
        assert_eq!(b2.dimension(), 2);
        for v in &b2.vectors {
            assert!(v.coeffs()[2..].iter().all(|c| c.norm() < 1e-15));
        }

        let half = BlaschkeProduct::new(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let basis = model_space_basis(&half, 64).unwrap();
        let v = &basis.vectors[0];
        // normalised 1/(1 - z/2): coefficients sqrt(3/4) 2^-j
        for j in 0..10 {
            assert!((v.get(j).norm() - 0.75f64.sqrt() * 0.5f64.powi(j as i32)).abs() < 1e-14);
        }
        for j in 0..=20 {
            let izj = FnBoundary(|z: C64| half.eval(z) * z.powu(j));
            let t = boundary_to_fourier(&izj, 64, Kind::Analytic);
            if let Ok(t) = t {
                assert!(h2_inner(v, &t).unwrap().norm() < 1e-8);
            }
        }
    }

    #[test]
    fn model_space_gram_and_completeness() {
        let inner = BlaschkeProduct::new(
            vec![c(0.0, 0.0), c(0.4, 0.0), c(0.4, 0.0), c(-0.2, 0.5)],
            c(0.0, 1.0),
        )
        .unwrap();
        let order = 96;
        let basis = model_space_basis(&inner, order).unwrap();
        assert_eq!(basis.dimension(), 4);
        for (i, u) in basis.vectors.iter().enumerate() {
            for (j, v) in basis.vectors.iter().enumerate() {
                let g = h2_inner(u, v).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(expect, 0.0)).norm() < 1e-10);
            }
            // rational form agrees with the truncation
            let t = FourierTruncation::analytic(basis.rationals[i].taylor(order));
            assert!(t.axpy(c(-1.0, 0.0), u).unwrap().norm() < 1e-12);
        }
        // orthogonal to I z^j
        for j in 0..(order - 4) {
            let izj = FnBoundary(|z: C64| inner.eval(z) * z.powu(j as u32));
            let t = boundary_to_fourier(&izj, order, Kind::Analytic).unwrap_or_else(|_| {
                let grid = BoundaryGrid::new(sample_count(order));
                grid.truncate(&grid.coefficients(grid.sample(&izj)), order, Kind::Analytic)
            });
            for v in &basis.vectors {
                assert!(h2_inner(v, &t).unwrap().norm() < 1e-8);
            }
        }
        // Szego kernel splits as P_{K_I} k_w + I h
        let w = c(0.5, -0.55);
        let kw = boundary_to_fourier(
            &FnBoundary(|z: C64| C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - w.conj() * z)),
            order,
            Kind::Analytic,
        )
        .unwrap();
        let mut rem = kw.clone();
        for v in &basis.vectors {
            rem = rem.axpy(-h2_inner(&kw, v).unwrap(), v).unwrap();
        }
        // rem / I must be analytic: rem(a_i) = 0 at each zero of I
        let grid = BoundaryGrid::new(4096);
        let quotient = grid.sample(&FnBoundary(|z: C64| rem.eval(z) / inner.eval(z)));
        let coeffs = grid.coefficients(quotient);
        let negative: f64 = coeffs[2048..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(negative < 1e-6);
    }

    #[test]
    fn model_space_rejects_clustered_zeros() {
        let inner =
            BlaschkeProduct::new(vec![c(0.5, 0.0), c(0.5 + 1e-9, 0.0)], c(1.0, 0.0)).unwrap();
        assert!(matches!(
            model_space_basis(&inner, 64),
            Err(Error::DegenerateGram { .. })
        ));
    }

    #[test]
    fn outer_examples() {
        assert!(outer_check(&rat(&[2.0, 1.0], &[1.0]), OuterMode::Strict).unwrap());
        assert!(!outer_check(&rat(&[0.0, 1.0], &[1.0]), OuterMode::Strict).unwrap());
        let a = rat(&[0.5, -0.5], &[1.0]);
        assert!(matches!(
            outer_check(&a, OuterMode::Strict),
            Err(Error::Borderline { .. })
        ));
        assert!(outer_check(&a, OuterMode::Lenient).unwrap());
        assert!(!outer_check(&rat(&[-0.5, 1.0], &[1.0]), OuterMode::Lenient).unwrap());
    }

    #[test]
    fn aliasing_of_products() {
        let f = rat(&[1.0, 0.3], &[1.0, -0.4]);
        let g = rat(&[0.5, 0.0, -0.2], &[2.0, 1.0]);
        let order = 64;
        let tf = boundary_to_fourier(&f, order, Kind::Analytic).unwrap();
        let tg = boundary_to_fourier(&g, order, Kind::Analytic).unwrap();
        let tfg = boundary_to_fourier(&f.mul(&g), order, Kind::Analytic).unwrap();
        for j in 0..=order {
            let conv: C64 = (0..=j).map(|i| tf.coeffs()[i] * tg.coeffs()[j - i]).sum();
            assert!((conv - tfg.coeffs()[j]).norm() < 1e-10);
        }
        let _ = boundary_grid(4).count();
    }

    proptest! {
        #[test]
        fn riesz_is_idempotent_and_contractive(
            re in prop::collection::vec(-1.0f64..1.0, 11),
            im in prop::collection::vec(-1.0f64..1.0, 11),
        ) {
            let f = FourierTruncation::bilateral(5, re.iter().zip(&im).map(|(&a, &b)| c(a, b)).collect());
            let p = riesz_project(&f);
            prop_assert_eq!(riesz_project(&p), p.clone());
            prop_assert!(p.norm() <= f.norm() + 1e-15);
        }
    }
}
