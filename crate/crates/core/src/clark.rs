//! Clark measures of finite Blaschke products and the Lebesgue decomposition
//! of the Herglotz measure `mu` of `(1 + b) / (1 - b)` for both pair families.

use std::f64::consts::PI;

use serde::Serialize;

use crate::blaschke::{
    boundary_grid, compose_with_inner, family1_multiplier, make_pair, BlaschkeProduct, Family,
    PairSpec, RationalFn,
};
use crate::poly::{closed_disk_zero_count, ComplexPoly};
use crate::{Error, Result, C64};

/// Trapezoid points for the absolutely continuous part of Herglotz integrals.
pub const QUAD_POINTS: usize = 512;
/// Largest `|z|` at which Herglotz transforms are evaluated.
pub const MAX_INTERIOR_RADIUS: f64 = 0.95;

const ON_CIRCLE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub point: C64,
    pub mass: f64,
}

/// Finite positive combination of point masses on the circle.
#[derive(Clone, Debug, PartialEq, Default, Serialize)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if (a.point.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::RootOffCircle {
                    modulus: a.point.norm(),
                });
            }
            if a.mass.is_nan() || a.mass <= 0.0 {
                return Err(Error::BadParameters(format!("atom mass {} is not positive", a.mass)));
            }
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn scaled(&self, c: f64) -> AtomicMeasure {
        AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { point: a.point, mass: a.mass * c })
                .collect(),
        }
    }

    /// `sum w_k (zeta_k + z) / (zeta_k - z)`
    pub fn herglotz(&self, z: C64) -> C64 {
        self.atoms
            .iter()
            .map(|a| (a.point + z) / (a.point - z) * a.mass)
            .sum()
    }

    /// `sum w_k (1 - |z|^2) / |zeta_k - z|^2`
    pub fn poisson(&self, z: C64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass * (1.0 - z.norm_sqr()) / (a.point - z).norm_sqr())
            .sum()
    }
}

fn arg_key(z: C64) -> f64 {
    z.arg().rem_euclid(2.0 * PI)
}

/// Clark measure `sigma_lambda` of `I`: atoms at the solutions of
/// `I(zeta) = lambda`, masses `1 / |I'(zeta)|`, sorted by argument in `[0, 2 pi)`.
pub fn clark_atoms(inner: &BlaschkeProduct, lambda: C64) -> Result<AtomicMeasure> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::BadParameters(format!("lambda = {lambda} is not unimodular")));
    }
    if inner.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let p = &inner.numerator() - &inner.denominator().scale(lambda);
    let roots = p.roots()?;
    let mut atoms = Vec::with_capacity(roots.roots.len());
    for r in roots.roots {
        if (r.norm() - 1.0).abs() > ON_CIRCLE_TOL {
            return Err(Error::RootOffCircle { modulus: r.norm() });
        }
        let zeta = r / r.norm();
        let deriv = inner.boundary_derivative_modulus(zeta);
        if deriv < 1e-12 {
            return Err(Error::DegenerateDerivative(deriv));
        }
        atoms.push(Atom { point: zeta, mass: 1.0 / deriv });
    }
    atoms.sort_by(|a, b| arg_key(a.point).total_cmp(&arg_key(b.point)));
    AtomicMeasure::new(atoms)
}

/// `int (zeta + z) / (zeta - z) d nu` for `nu = atoms + density dm`, the
/// density part by a `QUAD_POINTS`-point trapezoid rule.
pub fn herglotz_transform(
    atoms: &AtomicMeasure,
    density: Option<&dyn Fn(C64) -> f64>,
    z: C64,
) -> Result<C64> {
    herglotz_transform_with(atoms, density, z, QUAD_POINTS)
}

pub fn herglotz_transform_with(
    atoms: &AtomicMeasure,
    density: Option<&dyn Fn(C64) -> f64>,
    z: C64,
    quad_points: usize,
) -> Result<C64> {
    if z.norm() > MAX_INTERIOR_RADIUS {
        return Err(Error::TooCloseToBoundary(z.norm()));
    }
    let mut out = atoms.herglotz(z);
    if let Some(h) = density {
        let sum: C64 = boundary_grid(quad_points)
            .map(|zeta| (zeta + z) / (zeta - z) * h(zeta))
            .sum();
        out += sum / quad_points as f64;
    }
    Ok(out)
}

/// The origin plus 8 equispaced points on each of the radii 0.3, 0.6, 0.9.
pub fn interior_grid() -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    for (i, r) in [0.3, 0.6, 0.9].into_iter().enumerate() {
        // stagger the rings so no point shares an argument with its neighbour ring
        let offset = (i as f64) * PI / 24.0 + PI / 16.0;
        pts.extend((0..8).map(|k| C64::from_polar(r, offset + 2.0 * PI * k as f64 / 8.0)));
    }
    pts
}

/// Max over `grid` of `|(1 - |I|^2) / |1 - I|^2 - P[sigma_I](z)|`.
pub fn verify_poisson_identity(inner: &BlaschkeProduct, grid: &[C64]) -> Result<f64> {
    let sigma = clark_atoms(inner, C64::new(1.0, 0.0))?;
    Ok(grid
        .iter()
        .map(|&z| {
            let i = inner.eval(z);
            let lhs = (1.0 - i.norm_sqr()) / (C64::new(1.0, 0.0) - i).norm_sqr();
            (lhs - sigma.poisson(z)).abs()
        })
        .fold(0.0, f64::max))
}

/// `d mu = |F|^2 dm + c d sigma_I` with `F~ = (1 + b)/(1 - b) - c (1 + I)/(1 - I)`.
#[derive(Clone, Debug)]
pub struct MeasureDecomposition {
    pub spec: PairSpec,
    /// `F`, the outer square root of the a.c. density.
    pub density: RationalFn,
    pub singular_coeff: f64,
    /// `c` as an exact fraction `(numerator, denominator)`.
    pub singular_coeff_fraction: (u64, u64),
    /// `sigma_I`, unscaled.
    pub singular: AtomicMeasure,
    pub htilde: RationalFn,
    /// Max of `|Re F~ - |F|^2|` on the 512-point grid.
    pub boundary_defect: f64,
}

impl MeasureDecomposition {
    /// `c sigma_I`
    pub fn singular_part(&self) -> AtomicMeasure {
        self.singular.scaled(self.singular_coeff)
    }

    pub fn density_at(&self, zeta: C64) -> f64 {
        self.density.eval(zeta).norm_sqr()
    }

    /// Smallest modulus among the poles of `F`, infinity when `F` is a polynomial.
    pub fn density_pole_radius(&self) -> Result<f64> {
        match self.density.den.degree() {
            None => Err(Error::ZeroPolynomial),
            Some(0) => Ok(f64::INFINITY),
            Some(_) => Ok(self.density.den.roots()?.min_modulus()),
        }
    }

    /// Trapezoid size whose aliasing error `rho^-M` for the density is below 1e-16.
    pub fn quadrature_points(&self) -> Result<usize> {
        let rho = self.density_pole_radius()?;
        if rho.is_infinite() {
            return Ok(QUAD_POINTS);
        }
        let needed = (37.0 / rho.ln()).ceil() as usize;
        Ok(needed.next_power_of_two().clamp(QUAD_POINTS, 1 << 16))
    }
}

/// Builds `F`, `c`, `sigma_I` and `F~` from the closed forms and checks
/// `F~ in H^inf` and `Re F~ = |F|^2` on the boundary.
pub fn decompose_mu(spec: &PairSpec) -> Result<MeasureDecomposition> {
    spec.validate()?;
    let inner = &spec.inner;
    let (density, htilde, frac) = match spec.family {
        Family::One if spec.n == 0 => {
            let pair = make_pair(spec)?;
            let one_minus_b = RationalFn::constant(C64::new(1.0, 0.0)).sub(&pair.b);
            let f = RationalFn::new(
                &pair.a.num * &one_minus_b.den,
                &pair.a.den * &one_minus_b.num,
            )?
            .reduce(1e-8)?;
            // the general closed form collapses to F~ = 1
            (f, RationalFn::constant(C64::new(1.0, 0.0)), (2, 1))
        }
        Family::One => {
            let n = spec.n;
            let m = family1_multiplier(n);
            let f = compose_with_inner(&ComplexPoly::one(), &m, inner)?;
            let mut num = vec![C64::new(0.0, 0.0); n + 1];
            num[n] = C64::new(-(2.0 * n as f64 - 1.0), 0.0);
            for (j, c) in num.iter_mut().enumerate().take(n) {
                *c = C64::new(4.0 * n as f64 - 2.0 - 8.0 * j as f64, 0.0);
            }
            let den = m.scale(C64::new(2.0 * n as f64 + 1.0, 0.0));
            let ht = compose_with_inner(&ComplexPoly::new(num), &den, inner)?;
            (f, ht, (2, 2 * n as u64 + 1))
        }
        Family::Two => {
            let den = ComplexPoly::from_real(&[2.0, 1.0, 1.0]);
            let f = compose_with_inner(&ComplexPoly::from_real(&[1.0, 1.0]), &den, inner)?;
            // (2 - I)(1 + I) = 2 + I - I^2
            let ht = compose_with_inner(
                &ComplexPoly::from_real(&[2.0, 1.0, -1.0]),
                &den.scale(C64::new(2.0, 0.0)),
                inner,
            )?;
            (f, ht, (1, 2))
        }
    };

    if closed_disk_zero_count(&htilde.den)? != 0 {
        return Err(Error::InvariantViolation {
            what: "F~ must be bounded on the disk".into(),
            at: "denominator".into(),
            defect: 0.0,
        });
    }
    let mut boundary_defect = 0.0f64;
    for zeta in boundary_grid(512) {
        let defect = (htilde.eval(zeta).re - density.eval(zeta).norm_sqr()).abs();
        if defect > 1e-10 {
            return Err(Error::InvariantViolation {
                what: "Re F~ = |F|^2 on the circle".into(),
                at: format!("{zeta}"),
                defect,
            });
        }
        boundary_defect = boundary_defect.max(defect);
    }
    let singular = clark_atoms(inner, C64::new(1.0, 0.0))?;
    Ok(MeasureDecomposition {
        spec: spec.clone(),
        density,
        singular_coeff: frac.0 as f64 / frac.1 as f64,
        singular_coeff_fraction: frac,
        singular,
        htilde,
        boundary_defect,
    })
}

/// Max over [`interior_grid`] of `|(1 + b)/(1 - b) - H[mu](z) - i kappa|` with
/// `kappa` fitted at the origin. `quad_points` defaults to
/// [`MeasureDecomposition::quadrature_points`].
pub fn herglotz_consistency(dec: &MeasureDecomposition, quad_points: Option<usize>) -> Result<f64> {
    let m = match quad_points {
        Some(m) => m,
        None => dec.quadrature_points()?,
    };
    let singular = dec.singular_part();
    let density = |zeta: C64| dec.density_at(zeta);
    let one = C64::new(1.0, 0.0);
    let gap = |z: C64| -> Result<C64> {
        let b = dec.spec.eval_b(z);
        Ok((one + b) / (one - b) - herglotz_transform_with(&singular, Some(&density), z, m)?)
    };
    let kappa = gap(C64::new(0.0, 0.0))?.im;
    let mut worst = 0.0f64;
    for z in interior_grid() {
        worst = worst.max((gap(z)? - C64::new(0.0, kappa)).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cubic() -> BlaschkeProduct {
        BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.4, 0.0), c(0.0, -0.3)], c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn atoms_of_monomials() {
        let s = clark_atoms(&BlaschkeProduct::monomial(1), c(1.0, 0.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.atoms()[0].point - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.atoms()[0].mass - 1.0).abs() < 1e-15);

        let s = clark_atoms(&BlaschkeProduct::monomial(2), c(1.0, 0.0)).unwrap();
        let pts: Vec<C64> = s.atoms().iter().map(|a| a.point).collect();
        assert!((pts[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((pts[1] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(s.atoms().iter().all(|a| (a.mass - 0.5).abs() < 1e-12));

        let s = clark_atoms(&BlaschkeProduct::monomial(2), c(-1.0, 0.0)).unwrap();
        assert!((s.atoms()[0].point - c(0.0, 1.0)).norm() < 1e-12);
        assert!((s.atoms()[1].point - c(0.0, -1.0)).norm() < 1e-12);
        assert!(s.atoms().iter().all(|a| (a.mass - 0.5).abs() < 1e-12));
    }

    #[test]
    fn atoms_solve_the_level_equation() {
        let inner = BlaschkeProduct::new(
            vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.0, 0.7)],
            C64::from_polar(1.0, 0.4),
        )
        .unwrap();
        for lambda in [c(1.0, 0.0), C64::from_polar(1.0, 2.0), c(0.0, -1.0)] {
            let s = clark_atoms(&inner, lambda).unwrap();
            assert_eq!(s.len(), 3);
            for a in s.atoms() {
                assert!((inner.eval(a.point) - lambda).norm() < 1e-9);
            }
            // total mass of sigma_lambda is the Poisson integral at 0
            let i0 = inner.eval(c(0.0, 0.0));
            let expect = (1.0 - i0.norm_sqr()) / (lambda - i0).norm_sqr();
            assert!((s.total_mass() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn total_mass_is_one_when_inner_vanishes_at_origin() {
        let s = clark_atoms(&cubic(), c(1.0, 0.0)).unwrap();
        assert!((s.total_mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn herglotz_examples() {
        let unit = AtomicMeasure::new(vec![Atom { point: c(1.0, 0.0), mass: 1.0 }]).unwrap();
        assert!((herglotz_transform(&unit, None, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let lebesgue = |_: C64| 1.0;
        let v = herglotz_transform(&AtomicMeasure::default(), Some(&lebesgue), c(0.3, 0.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);

        let s = clark_atoms(&BlaschkeProduct::monomial(2), c(1.0, 0.0)).unwrap();
        let v = herglotz_transform(&s, None, c(0.5, 0.0)).unwrap();
        assert!((v - c(5.0 / 3.0, 0.0)).norm() < 1e-14);

        assert!(matches!(
            herglotz_transform(&s, None, c(0.96, 0.0)),
            Err(Error::TooCloseToBoundary(_))
        ));
    }

    #[test]
    fn poisson_identity() {
        assert_eq!(
            verify_poisson_identity(&BlaschkeProduct::monomial(1), &[c(0.0, 0.0)]).unwrap(),
            0.0
        );
        let grid = interior_grid();
        assert_eq!(grid.len(), 25);
        assert!(grid.iter().all(|z| z.norm() <= 0.9 + 1e-15));
        assert!(verify_poisson_identity(&BlaschkeProduct::monomial(2), &grid).unwrap() < 1e-8);
        assert!(verify_poisson_identity(&cubic(), &grid).unwrap() < 1e-8);
    }

    #[test]
    fn decomposition_baseline() {
        let spec = PairSpec::family1(BlaschkeProduct::monomial(1), 0);
        let d = decompose_mu(&spec).unwrap();
        assert!(d.density.num.degree() == Some(0) && d.density.den.degree() == Some(0));
        assert!((d.density.eval(c(0.3, 0.2)) - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(d.singular_coeff, 2.0);
        assert!(herglotz_consistency(&d, None).unwrap() < 1e-7);
    }

    #[test]
    fn decomposition_family1_n1() {
        let spec = PairSpec::family1(BlaschkeProduct::monomial(1), 1);
        let d = decompose_mu(&spec).unwrap();
        assert_eq!(d.singular_coeff_fraction, (2, 3));
        for z in [c(0.0, 0.0), c(0.5, -0.2), c(-0.7, 0.1)] {
            let expect = c(1.0, 0.0) / (z + c(2.0, 0.0));
            assert!((d.density.eval(z) - expect).norm() < 1e-14);
        }
        assert!(d.boundary_defect < 1e-12);
        assert!(herglotz_consistency(&d, None).unwrap() < 1e-7);
    }

    #[test]
    fn decomposition_family2() {
        let d = decompose_mu(&PairSpec::family2(BlaschkeProduct::monomial(1))).unwrap();
        assert_eq!(d.singular_coeff, 0.5);
        assert!((d.htilde.eval(c(0.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        let z = c(0.2, 0.6);
        let expect = (z + 1.0) / (z * z + z + 2.0);
        assert!((d.density.eval(z) - expect).norm() < 1e-14);
        assert!(herglotz_consistency(&d, None).unwrap() < 1e-7);
        // mu is a probability measure when b(0) = 0
        let mass = d.singular_part().total_mass()
            + boundary_grid(4096).map(|z| d.density_at(z)).sum::<f64>() / 4096.0;
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_near_circle_poles_needs_finer_quadrature() {
        let spec = PairSpec::family1(cubic(), 3);
        let d = decompose_mu(&spec).unwrap();
        assert!(d.density_pole_radius().unwrap() < 1.05);
        assert!(d.quadrature_points().unwrap() > QUAD_POINTS);
        assert!(herglotz_consistency(&d, None).unwrap() < 1e-7);
    }

    #[test]
    fn family2_requires_zero_at_origin() {
        let inner = BlaschkeProduct::new(vec![c(0.4, 0.0)], c(1.0, 0.0)).unwrap();
        assert_eq!(
            decompose_mu(&PairSpec::family2(inner)).unwrap_err(),
            Error::RequiresIZeroAtOrigin
        );
    }
}
