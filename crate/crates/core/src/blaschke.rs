//! Finite Blaschke products, rational boundary functions and the two
//! families of `(b, a)` pairs built from an inner function `I`:
//!
//! * family 1: `b = I^n (1 + I) / 2`, `a = (1 - I) / 2`
//! * family 2: `b = I (1 + I^2) / 2`, `a = (1 - I^2) / 2`, with `I(0) = 0`

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::poly::{closed_disk_zero_count, ComplexPoly, BOUNDARY_GUARD};
use crate::{Error, Result, C64};

const ZERO_MARGIN: f64 = 1e-12;
const ROTATION_TOL: f64 = 1e-14;

/// `rotation * prod (z - a_i) / (1 - conj(a_i) z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
    rotation: C64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<C64>, rotation: C64) -> Result<Self> {
        if let Some(a) = zeros.iter().find(|a| a.norm() >= 1.0 - ZERO_MARGIN) {
            return Err(Error::BadParameters(format!(
                "Blaschke zero {a} is not inside the open unit disk"
            )));
        }
        if (rotation.norm() - 1.0).abs() > ROTATION_TOL {
            return Err(Error::BadParameters(format!(
                "rotation {rotation} is not unimodular"
            )));
        }
        Ok(BlaschkeProduct { zeros, rotation })
    }

    /// `I(z) = z^d`.
    pub fn monomial(d: usize) -> Self {
        BlaschkeProduct {
            zeros: vec![C64::new(0.0, 0.0); d],
            rotation: C64::new(1.0, 0.0),
        }
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn rotation(&self) -> C64 {
        self.rotation
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn vanishes_at_origin(&self) -> bool {
        self.zeros.iter().any(|a| a.norm() == 0.0)
    }

    /// Evaluation for `|z| <= 1`.
    pub fn eval(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.rotation, |acc, &a| acc * (z - a) / (C64::new(1.0, 0.0) - a.conj() * z))
    }

    /// Evaluation with a guard against hitting a factor's pole.
    pub fn try_eval(&self, z: C64) -> Result<C64> {
        let mut acc = self.rotation;
        for &a in &self.zeros {
            let den = C64::new(1.0, 0.0) - a.conj() * z;
            if den.norm() < 1e-14 {
                return Err(Error::PoleHit);
            }
            acc *= (z - a) / den;
        }
        Ok(acc)
    }

    /// `|I'(zeta)| = sum (1 - |a_i|^2) / |zeta - a_i|^2` for `|zeta| = 1`.
    pub fn boundary_derivative_modulus(&self, zeta: C64) -> f64 {
        self.zeros
            .iter()
            .map(|&a| (1.0 - a.norm_sqr()) / (zeta - a).norm_sqr())
            .sum()
    }

    /// `I^n`, kept as a repeated zero list.
    pub fn power(&self, n: usize) -> Self {
        let zeros = (0..n).flat_map(|_| self.zeros.iter().copied()).collect();
        BlaschkeProduct {
            zeros,
            rotation: self.rotation.powu(n as u32),
        }
    }

    /// `rotation * prod (z - a_i)`
    pub fn numerator(&self) -> ComplexPoly {
        ComplexPoly::from_roots(&self.zeros, self.rotation)
    }

    /// `prod (1 - conj(a_i) z)`; never vanishes on the closed disk.
    pub fn denominator(&self) -> ComplexPoly {
        self.zeros.iter().fold(ComplexPoly::one(), |acc, &a| {
            &acc * &ComplexPoly::new(vec![C64::new(1.0, 0.0), -a.conj()])
        })
    }

    pub fn to_rational(&self) -> RationalFn {
        RationalFn {
            num: self.numerator(),
            den: self.denominator(),
        }
    }

    /// Max of `||I(zeta)| - 1|` on an equispaced boundary grid.
    pub fn unimodularity_defect(&self, points: usize) -> f64 {
        boundary_grid(points)
            .map(|z| (self.eval(z).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `points` equispaced points `exp(2 pi i k / points)`.
pub fn boundary_grid(points: usize) -> impl Iterator<Item = C64> {
    (0..points).map(move |k| C64::from_polar(1.0, 2.0 * PI * k as f64 / points as f64))
}

/// Quotient of two polynomials, with `den(0) != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn {
    pub num: ComplexPoly,
    pub den: ComplexPoly,
}

impl RationalFn {
    pub fn new(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if den.coeff(0).norm() == 0.0 {
            return Err(Error::BadParameters("denominator vanishes at the origin".into()));
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: ComplexPoly) -> Self {
        RationalFn {
            num: p,
            den: ComplexPoly::one(),
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_poly(ComplexPoly::constant(c))
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, rhs: &RationalFn) -> RationalFn {
        RationalFn {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }

    pub fn mul_poly(&self, p: &ComplexPoly) -> RationalFn {
        RationalFn {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    pub fn add(&self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
        }
        RationalFn {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }

    pub fn sub(&self, rhs: &RationalFn) -> RationalFn {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> RationalFn {
        RationalFn {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn square(&self) -> RationalFn {
        self.mul(self)
    }

    /// Power series coefficients at the origin up to `z^order`.
    pub fn taylor(&self, order: usize) -> Vec<C64> {
        series_divide(self.num.coeffs(), self.den.coeffs(), order)
    }

    /// `[f(w), f'(w), ..., f^{(k)}(w)]`.
    pub fn derivatives_at(&self, w: C64, k: usize) -> Vec<C64> {
        let num = self.num.taylor_shift(w);
        let den = self.den.taylor_shift(w);
        let mut out = series_divide(num.coeffs(), den.coeffs(), k);
        let mut factorial = 1.0;
        for (m, c) in out.iter_mut().enumerate() {
            if m > 0 {
                factorial *= m as f64;
            }
            *c *= factorial;
        }
        out
    }

    /// True when the denominator has no zeros in the closed disk (the
    /// function is then bounded and analytic on a neighbourhood of it).
    pub fn is_hinf(&self) -> Result<bool> {
        Ok(closed_disk_zero_count(&self.den)? == 0)
    }

    /// Cancels numerator/denominator root pairs that agree within `tol`.
    pub fn reduce(&self, tol: f64) -> Result<RationalFn> {
        let (Some(dn), Some(dd)) = (self.num.degree(), self.den.degree()) else {
            return Ok(self.clone());
        };
        if dn == 0 || dd == 0 {
            return Ok(self.clone());
        }
        let num_roots = self.num.roots()?.roots;
        let mut den_roots = self.den.roots()?.roots;
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for r in num_roots {
            if let Some(pos) = den_roots.iter().position(|d| (d - r).norm() < tol) {
                let shared = (r + den_roots[pos]) * 0.5;
                den_roots.swap_remove(pos);
                num = num.deflate(shared).0;
                den = den.deflate(shared).0;
            }
        }
        RationalFn::new(num, den)
    }
}

/// Coefficients of `num / den` as a power series, truncated at `order`.
/// Requires `den[0] != 0`.
pub fn series_divide(num: &[C64], den: &[C64], order: usize) -> Vec<C64> {
    let d0 = den[0];
    let mut out = vec![C64::new(0.0, 0.0); order + 1];
    for j in 0..=order {
        let mut acc = num.get(j).copied().unwrap_or_default();
        for i in 1..den.len().min(j + 1) {
            acc -= den[i] * out[j - i];
        }
        out[j] = acc / d0;
    }
    out
}

/// `P(I) / Q(I)` for polynomials `P`, `Q` in `w`, as a rational function of
/// `z`. Both sides are homogenised to the same power of the Blaschke
/// denominator so that it cancels.
pub fn compose_with_inner(p: &ComplexPoly, q: &ComplexPoly, inner: &BlaschkeProduct) -> Result<RationalFn> {
    let d = p.degree().unwrap_or(0).max(q.degree().ok_or(Error::ZeroPolynomial)?);
    let num_i = inner.numerator();
    let den_i = inner.denominator();
    let num_pows: Vec<ComplexPoly> = (0..=d).scan(ComplexPoly::one(), |acc, _| {
        let cur = acc.clone();
        *acc = &*acc * &num_i;
        Some(cur)
    }).collect();
    let den_pows: Vec<ComplexPoly> = (0..=d).scan(ComplexPoly::one(), |acc, _| {
        let cur = acc.clone();
        *acc = &*acc * &den_i;
        Some(cur)
    }).collect();
    let homogenise = |w: &ComplexPoly| {
        (0..=d).fold(ComplexPoly::zero(), |acc, j| {
            let c = w.coeff(j);
            if c == C64::new(0.0, 0.0) {
                acc
            } else {
                &acc + &(&num_pows[j] * &den_pows[d - j]).scale(c)
            }
        })
    };
    RationalFn::new(homogenise(p), homogenise(q))
}

/// Which of the two `(b, a)` constructions to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `b = I^n (1 + I) / 2`
    #[serde(rename = "1", alias = "family1")]
    One,
    /// `b = I (1 + I^2) / 2`
    #[serde(rename = "2", alias = "family2")]
    Two,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    pub family: Family,
    pub inner: BlaschkeProduct,
    /// Power of `I` in family 1; ignored for family 2.
    pub n: usize,
}

impl PairSpec {
    pub fn family1(inner: BlaschkeProduct, n: usize) -> Self {
        PairSpec { family: Family::One, inner, n }
    }

    pub fn family2(inner: BlaschkeProduct) -> Self {
        PairSpec { family: Family::Two, inner, n: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner.degree() == 0 {
            return Err(Error::BadParameters("inner function must be nonconstant".into()));
        }
        if self.family == Family::Two && !self.inner.vanishes_at_origin() {
            return Err(Error::RequiresIZeroAtOrigin);
        }
        Ok(())
    }

    /// `b` as a polynomial in `w = I`.
    pub fn b_in_inner(&self) -> ComplexPoly {
        match self.family {
            Family::One => {
                let mut c = vec![C64::new(0.0, 0.0); self.n + 2];
                c[self.n] = C64::new(0.5, 0.0);
                c[self.n + 1] = C64::new(0.5, 0.0);
                ComplexPoly::new(c)
            }
            Family::Two => ComplexPoly::from_real(&[0.0, 0.5, 0.0, 0.5]),
        }
    }

    /// `a` as a polynomial in `w = I`.
    pub fn a_in_inner(&self) -> ComplexPoly {
        match self.family {
            Family::One => ComplexPoly::from_real(&[0.5, -0.5]),
            Family::Two => ComplexPoly::from_real(&[0.5, 0.0, -0.5]),
        }
    }

    /// `b(z)` evaluated through `I(z)`, avoiding expanded coefficients.
    pub fn eval_b(&self, z: C64) -> C64 {
        self.b_in_inner().eval(self.inner.eval(z))
    }

    pub fn eval_a(&self, z: C64) -> C64 {
        self.a_in_inner().eval(self.inner.eval(z))
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::One => format!("family1(deg I = {}, n = {})", self.inner.degree(), self.n),
            Family::Two => format!("family2(deg I = {})", self.inner.degree()),
        }
    }
}

/// `m_n(w) = w^n + 2 w^{n-1} + ... + 2`, the family-1 multiplier of `K_I`.
pub fn family1_multiplier(n: usize) -> ComplexPoly {
    let mut c = vec![C64::new(2.0, 0.0); n];
    c.push(C64::new(1.0, 0.0));
    ComplexPoly::new(c)
}

#[derive(Clone, Debug)]
pub struct Pair {
    pub b: RationalFn,
    pub a: RationalFn,
    /// Max of `|a(z) - a_rat(z)| + |b(z) - b_rat(z)|` on the grid, with `a`, `b`
    /// evaluated through `I` and `a_rat`, `b_rat` the expanded rational forms.
    pub rational_defect: f64,
}

pub const PAIR_TOL: f64 = 1e-10;
/// Expanded rational forms lose digits when the zeros of `I` approach the
/// circle; beyond this they are considered wrong rather than inaccurate.
pub const RATIONAL_FORM_TOL: f64 = 1e-6;

/// Builds `(b, a)` and checks `|a|^2 + |b|^2 = 1` on a 512-point grid, that the
/// rational forms agree with evaluation through `I`, and that `a` has no zeros
/// in the open disk.
pub fn make_pair(spec: &PairSpec) -> Result<Pair> {
    spec.validate()?;
    let one = ComplexPoly::one();
    let b = compose_with_inner(&spec.b_in_inner(), &one, &spec.inner)?;
    let a = compose_with_inner(&spec.a_in_inner(), &one, &spec.inner)?;
    let (mut max_defect, mut rational_defect) = (0.0f64, 0.0f64);
    for z in boundary_grid(512) {
        let (bz, az) = (spec.eval_b(z), spec.eval_a(z));
        max_defect = max_defect.max((az.norm_sqr() + bz.norm_sqr() - 1.0).abs());
        rational_defect = rational_defect.max((a.eval(z) - az).norm() + (b.eval(z) - bz).norm());
    }
    if max_defect > PAIR_TOL {
        return Err(Error::NotAPair { max_defect });
    }
    if rational_defect > RATIONAL_FORM_TOL {
        return Err(Error::InvariantViolation {
            what: "rational form of the pair".into(),
            at: "boundary grid".into(),
            defect: rational_defect,
        });
    }
    if a.num.degree().unwrap_or(0) > 0 {
        let rs = a.num.roots()?;
        if let Some(r) = rs.roots.iter().find(|r| r.norm() < 1.0 - BOUNDARY_GUARD) {
            return Err(Error::InvariantViolation {
                what: "a must be outer".into(),
                at: format!("{r}"),
                defect: 1.0 - r.norm(),
            });
        }
    }
    if !a.is_hinf()? || !b.is_hinf()? {
        return Err(Error::InvariantViolation {
            what: "pair denominators must be zero-free on the closed disk".into(),
            at: "denominator".into(),
            defect: 0.0,
        });
    }
    Ok(Pair { b, a, rational_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let z = BlaschkeProduct::monomial(1);
        assert!((z.eval(c(0.0, 1.0)) - c(0.0, 1.0)).norm() < 1e-15);
        let z2 = BlaschkeProduct::monomial(2);
        let e = C64::from_polar(1.0, PI / 4.0);
        assert!((z2.eval(e) - c(0.0, 1.0)).norm() < 1e-15);
        let half = BlaschkeProduct::new(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        assert!((half.eval(c(1.0, 0.0)).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_zeros_and_rotation() {
        assert!(BlaschkeProduct::new(vec![c(1.0, 0.0)], c(1.0, 0.0)).is_err());
        assert!(BlaschkeProduct::new(vec![c(0.2, 0.0)], c(1.1, 0.0)).is_err());
    }

    #[test]
    fn boundary_derivative_examples() {
        let z = BlaschkeProduct::monomial(1);
        assert!((z.boundary_derivative_modulus(c(0.0, 1.0)) - 1.0).abs() < 1e-15);
        let z2 = BlaschkeProduct::monomial(2);
        assert!((z2.boundary_derivative_modulus(c(1.0, 0.0)) - 2.0).abs() < 1e-15);
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        assert!((b.boundary_derivative_modulus(c(1.0, 0.0)) - 4.0).abs() < 1e-14);
        // numerical differentiation oracle
        let h = 1e-6;
        let one = c(1.0, 0.0);
        let fd = (b.eval(one * C64::from_polar(1.0, h)) - b.eval(one * C64::from_polar(1.0, -h))).norm()
            / (2.0 * h);
        assert!((fd - 4.0).abs() < 1e-6);
    }

    #[test]
    fn unimodular_on_boundary() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.4, 0.0), c(0.0, -0.3)], c(0.0, 1.0)).unwrap();
        assert!(b.unimodularity_defect(256) < 1e-10);
        let r = b.to_rational();
        for z in boundary_grid(64) {
            assert!((r.eval(z) - b.eval(z)).norm() < 1e-13);
        }
    }

    #[test]
    fn power_repeats_zeros() {
        let b = BlaschkeProduct::new(vec![c(0.3, 0.1)], c(0.0, 1.0)).unwrap();
        let b3 = b.power(3);
        assert_eq!(b3.degree(), 3);
        let z = c(0.2, -0.5);
        assert!((b3.eval(z) - b.eval(z).powu(3)).norm() < 1e-15);
        assert_eq!(b.power(0).degree(), 0);
    }

    #[test]
    fn pair_examples() {
        let z = BlaschkeProduct::monomial(1);
        let p0 = make_pair(&PairSpec::family1(z.clone(), 0)).unwrap();
        assert_eq!(p0.b.eval(c(0.3, 0.0)), c(0.65, 0.0));
        assert_eq!(p0.a.eval(c(0.3, 0.0)), c(0.35, 0.0));
        let p1 = make_pair(&PairSpec::family1(z.clone(), 1)).unwrap();
        let w = c(0.2, 0.4);
        assert!((p1.b.eval(w) - w * (c(1.0, 0.0) + w) * 0.5).norm() < 1e-15);
        let p2 = make_pair(&PairSpec::family2(z)).unwrap();
        assert!((p2.b.eval(w) - w * (c(1.0, 0.0) + w * w) * 0.5).norm() < 1e-15);
        assert!((p2.a.eval(w) - (c(1.0, 0.0) - w * w) * 0.5).norm() < 1e-15);
    }

    #[test]
    fn family2_requires_zero_at_origin() {
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        assert_eq!(make_pair(&PairSpec::family2(b)).unwrap_err(), Error::RequiresIZeroAtOrigin);
    }

    #[test]
    fn family1_baseline_has_positive_a0_for_real_inner_value() {
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0), c(0.0, 0.0)], c(1.0, 0.0)).unwrap();
        let spec = PairSpec::family1(b, 2);
        let a0 = spec.eval_a(c(0.0, 0.0));
        assert!(a0.im.abs() < 1e-15 && a0.re > 0.0);
    }

    #[test]
    fn composed_rational_matches_inner_evaluation() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let spec = PairSpec::family1(b, 3);
        let pair = make_pair(&spec).unwrap();
        for z in boundary_grid(97) {
            assert!((pair.b.eval(z) - spec.eval_b(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn reduce_cancels_common_factor() {
        let num = ComplexPoly::from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)], c(1.0, 0.0));
        let den = ComplexPoly::from_roots(&[c(1.0, 0.0), c(3.0, 0.0)], c(1.0, 0.0));
        let r = RationalFn::new(num, den).unwrap().reduce(1e-8).unwrap();
        assert_eq!(r.num.degree(), Some(1));
        assert!((r.eval(c(0.0, 0.0)) - c(-2.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivatives_at_point() {
        // f = 1 / (2 + z): f' = -1/(2+z)^2, f'' = 2/(2+z)^3
        let f = RationalFn::new(ComplexPoly::one(), ComplexPoly::from_real(&[2.0, 1.0])).unwrap();
        let w = c(0.5, 0.0);
        let d = f.derivatives_at(w, 2);
        assert!((d[0] - c(0.4, 0.0)).norm() < 1e-15);
        assert!((d[1] + c(0.16, 0.0)).norm() < 1e-15);
        assert!((d[2] - c(2.0 / 15.625, 0.0)).norm() < 1e-15);
    }
}
