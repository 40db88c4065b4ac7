//! The space `H(b)` for a pair `(b, a)`: Sarason companions, the Clark
//! isometry `V_b`, reproducing kernels and derivative kernels.
//!
//! A vector `f` lies in `H(b)` iff `T_conj(b) f = T_conj(a) f+` has a
//! solution `f+` in `H^2`; then `||f||_b^2 = ||f||^2 + ||f+||^2`.

use crate::blaschke::{make_pair, Pair, PairSpec, RationalFn};
use crate::clark::{decompose_mu, MeasureDecomposition};
use crate::hardy::{
    h2_inner, BoundaryFunction, BoundaryGrid, FnBoundary, FourierTruncation, Kind, ToeplitzMatrix,
    TAIL_BOUND,
};
use crate::poly::ComplexPoly;
use crate::{Error, Result, C64};

/// Companion residual above which a vector is rejected (relative to `||f||`).
pub const ACCEPT_RESIDUAL: f64 = 1e-5;
/// Largest `|w|` for interior kernels.
pub const MAX_KERNEL_RADIUS: f64 = 0.95;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// An element of `H(b)` with its Sarason companion.
#[derive(Clone, Debug, PartialEq)]
pub struct HbVector {
    pub f: FourierTruncation,
    pub fplus: FourierTruncation,
    /// Max of the triangular-solve defect and the companion mass on the top
    /// eighth of the index range.
    pub residual: f64,
}

impl HbVector {
    pub fn h2_norm(&self) -> f64 {
        self.f.norm()
    }
}

/// `k_w^b` or `upsilon^k_{b,w}`, as a rational function and as an element of `H(b)`.
#[derive(Clone, Debug)]
pub struct KernelFunction {
    pub w: C64,
    pub k: usize,
    pub boundary: bool,
    pub rational: RationalFn,
    pub vector: HbVector,
}

/// A pair, its measure decomposition and the discretisation at order `N`.
pub struct HbContext {
    spec: PairSpec,
    pair: Pair,
    decomposition: MeasureDecomposition,
    order: usize,
    tb_bar: ToeplitzMatrix,
    ta_bar: ToeplitzMatrix,
    fine: BoundaryGrid,
    one_minus_b: Vec<C64>,
    density: Vec<f64>,
}

impl HbContext {
    /// Smallest admissible truncation order, `32 * deg(numerator of b)`.
    pub fn min_order(spec: &PairSpec) -> usize {
        let d = spec.inner.degree();
        let deg = match spec.family {
            crate::blaschke::Family::One => d * (spec.n + 1),
            crate::blaschke::Family::Two => 3 * d,
        };
        32 * deg
    }

    /// Power of two above [`Self::min_order`] at which the decay of the
    /// density's Cauchy transform falls below `1e-13`.
    pub fn recommended_order(spec: &PairSpec) -> Result<usize> {
        let dec = decompose_mu(spec)?;
        let rho = dec.density_pole_radius()?;
        let needed = if rho.is_infinite() {
            0
        } else {
            (30.0 / rho.ln()).ceil() as usize
        };
        Ok(needed.max(Self::min_order(spec)).max(64).next_power_of_two())
    }

    pub fn new(spec: &PairSpec, order: usize) -> Result<Self> {
        let min = Self::min_order(spec);
        if order < min {
            return Err(Error::BadParameters(format!(
                "truncation order {order} below 32 * deg b = {min}"
            )));
        }
        let pair = make_pair(spec)?;
        let decomposition = decompose_mu(spec)?;
        let conj_b = FnBoundary(|z: C64| spec.eval_b(z).conj());
        let conj_a = FnBoundary(|z: C64| spec.eval_a(z).conj());
        let tb_bar = ToeplitzMatrix::from_symbol(&conj_b, order)?;
        let ta_bar = ToeplitzMatrix::from_symbol(&conj_a, order)?;
        let fine = BoundaryGrid::new((16 * order).max(4096));
        let one_minus_b = fine.points().iter().map(|&z| ONE - spec.eval_b(z)).collect();
        let density = fine
            .points()
            .iter()
            .map(|&z| decomposition.density_at(z))
            .collect();
        Ok(HbContext {
            spec: spec.clone(),
            pair,
            decomposition,
            order,
            tb_bar,
            ta_bar,
            fine,
            one_minus_b,
            density,
        })
    }

    pub fn spec(&self) -> &PairSpec {
        &self.spec
    }

    pub fn pair(&self) -> &Pair {
        &self.pair
    }

    pub fn decomposition(&self) -> &MeasureDecomposition {
        &self.decomposition
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tb_bar(&self) -> &ToeplitzMatrix {
        &self.tb_bar
    }

    pub fn ta_bar(&self) -> &ToeplitzMatrix {
        &self.ta_bar
    }

    /// Solves `T_conj(a) x = T_conj(b) f` on the truncated system. The matrix is
    /// upper triangular with diagonal `conj(a(0)) != 0`, so back substitution
    /// gives the least-squares solution exactly.
    pub fn companion(&self, f: &FourierTruncation) -> Result<(FourierTruncation, f64)> {
        let y = self.tb_bar.apply(f)?;
        let t = self.ta_bar.matrix();
        let n = self.order + 1;
        let diag = t[(0, 0)];
        let mut x = vec![ZERO; n];
        for j in (0..n).rev() {
            let mut acc = y.coeffs()[j];
            for k in j + 1..n {
                acc -= t[(j, k)] * x[k];
            }
            x[j] = acc / diag;
        }
        let x = FourierTruncation::analytic(x);
        let defect = self.ta_bar.apply(&x)?.axpy(-ONE, &y)?.norm();
        let guard_start = n - n / 8;
        let guard = x.coeffs()[guard_start..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        Ok((x, defect.max(guard)))
    }

    /// Companion and residual without the acceptance test.
    pub fn vector_unchecked(&self, f: FourierTruncation) -> Result<HbVector> {
        let (fplus, residual) = self.companion(&f)?;
        Ok(HbVector { f, fplus, residual })
    }

    /// Fails with [`Error::NotInHb`] when the residual exceeds `1e-5 ||f||`.
    pub fn vector(&self, f: FourierTruncation) -> Result<HbVector> {
        let v = self.vector_unchecked(f)?;
        if v.residual > ACCEPT_RESIDUAL * v.f.norm() {
            return Err(Error::NotInHb { residual: v.residual });
        }
        Ok(v)
    }

    pub fn poly_vector(&self, p: &ComplexPoly) -> Result<HbVector> {
        if p.degree().unwrap_or(0) > self.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: p.degree().unwrap_or(0),
            });
        }
        self.vector(FourierTruncation::from_poly(p, self.order))
    }

    /// Taylor coefficients of a rational function analytic on the closed disk.
    pub fn rational_truncation(&self, r: &RationalFn) -> Result<FourierTruncation> {
        let t = FourierTruncation::analytic(r.taylor(self.order));
        check_tail(&t)?;
        Ok(t)
    }

    pub fn rational_vector(&self, r: &RationalFn) -> Result<HbVector> {
        self.vector(self.rational_truncation(r)?)
    }

    /// Oversampled DFT of boundary values.
    pub fn boundary_vector<F: BoundaryFunction + ?Sized>(&self, f: &F) -> Result<HbVector> {
        self.vector(crate::hardy::boundary_to_fourier(f, self.order, Kind::Analytic)?)
    }

    /// `<f, g>_H2 + <f+, g+>_H2`
    pub fn hb_inner_sarason(&self, f: &HbVector, g: &HbVector) -> Result<C64> {
        Ok(h2_inner(&f.f, &g.f)? + h2_inner(&f.fplus, &g.fplus)?)
    }

    pub fn hb_norm(&self, f: &HbVector) -> f64 {
        (f.f.norm().powi(2) + f.fplus.norm().powi(2)).sqrt()
    }

    /// `V_b q = (1 - b) K_mu q`, the a.c. part through the Riesz projection of
    /// `q |F|^2` on the fine grid, the atoms in closed form.
    pub fn vb_embed(&self, q: &ComplexPoly) -> Result<HbVector> {
        let deg = q.degree().unwrap_or(0);
        if deg > self.order / 4 {
            return Err(Error::BadParameters(format!(
                "deg q = {deg} exceeds N/4 = {}",
                self.order / 4
            )));
        }
        if q.is_zero() {
            return self.vector(FourierTruncation::zeros(self.order));
        }
        let samples = self
            .fine
            .points()
            .iter()
            .zip(&self.density)
            .map(|(&z, &h)| q.eval(z) * h)
            .collect();
        let cauchy = self.fine.riesz_samples(samples);
        let product = cauchy
            .iter()
            .zip(&self.one_minus_b)
            .map(|(&h, &m)| h * m)
            .collect();
        let coeffs = self.fine.coefficients(product);
        let ac = self.fine.truncate(&coeffs, self.order, Kind::Analytic);

        let values: Vec<C64> = self
            .decomposition
            .singular
            .atoms()
            .iter()
            .map(|a| q.eval(a.point))
            .collect();
        let f = ac.axpy(ONE, &self.atomic_image(&values))?;
        check_tail(&f)?;
        self.vector(f)
    }

    /// `V_b` of the indicator of the `k`-th atom of `sigma_I`.
    pub fn vb_atom(&self, k: usize) -> Result<HbVector> {
        let count = self.decomposition.singular.len();
        if k >= count {
            return Err(Error::BadParameters(format!("atom index {k} out of range 0..{count}")));
        }
        let mut values = vec![ZERO; count];
        values[k] = ONE;
        self.vector(self.atomic_image(&values))
    }

    /// `sum c w_k h_k (1 - b) / (1 - conj(zeta_k) z) = -sum c w_k h_k zeta_k S_k / Q_b`
    /// with `S_k = (Q_b - P_b) / (z - zeta_k)`, exact since `b(zeta_k) = 1`.
    fn atomic_image(&self, values: &[C64]) -> FourierTruncation {
        let b = &self.pair.b;
        let gap = &b.den - &b.num;
        let c = self.decomposition.singular_coeff;
        let mut num = ComplexPoly::zero();
        for (atom, &h) in self.decomposition.singular.atoms().iter().zip(values) {
            let (s, _) = gap.deflate(atom.point);
            num = &num + &s.scale(-atom.point * h * (c * atom.mass));
        }
        FourierTruncation::analytic(crate::blaschke::series_divide(
            num.coeffs(),
            b.den.coeffs(),
            self.order,
        ))
    }

    /// `int q1 conj(q2) d mu`: trapezoid rule for `|F|^2 dm`, exact atom sum.
    pub fn hb_inner_clark(&self, q1: &ComplexPoly, q2: &ComplexPoly) -> C64 {
        let m = self.fine.size() as f64;
        let ac: C64 = self
            .fine
            .points()
            .iter()
            .zip(&self.density)
            .map(|(&z, &h)| q1.eval(z) * q2.eval(z).conj() * h)
            .sum::<C64>()
            / m;
        let c = self.decomposition.singular_coeff;
        let sing: C64 = self
            .decomposition
            .singular
            .atoms()
            .iter()
            .map(|a| q1.eval(a.point) * q2.eval(a.point).conj() * (c * a.mass))
            .sum();
        ac + sing
    }

    pub fn l2mu_norm(&self, q: &ComplexPoly) -> f64 {
        self.hb_inner_clark(q, q).re.max(0.0).sqrt()
    }

    /// `k_w^b(z) = (1 - conj(b(w)) b(z)) / (1 - conj(w) z)`, checked against
    /// the probe `1 + z`.
    pub fn kernel_at(&self, w: C64) -> Result<KernelFunction> {
        if w.norm() > MAX_KERNEL_RADIUS {
            return Err(Error::TooCloseToBoundary(w.norm()));
        }
        let kf = self.derivative_kernel(w, 0)?;
        let probe = self.poly_vector(&ComplexPoly::from_real(&[1.0, 1.0]))?;
        let got = self.hb_inner_sarason(&probe, &kf.vector)?;
        let defect = (got - (ONE + w)).norm();
        if defect > 1e-6 {
            return Err(Error::InvariantViolation {
                what: "reproducing property of k_w^b".into(),
                at: format!("{w}"),
                defect,
            });
        }
        Ok(kf)
    }

    /// `d^k / d conj(w)^k` of `k_w^b`, or its limit at a boundary point.
    pub fn derivative_kernel(&self, w: C64, k: usize) -> Result<KernelFunction> {
        let r = w.norm();
        let boundary = r > 1.0 - 1e-12;
        if boundary && (r - 1.0).abs() > 1e-12 {
            return Err(Error::BadParameters(format!("|w| = {r} outside the closed disk")));
        }
        if !boundary && r > MAX_KERNEL_RADIUS {
            return Err(Error::TooCloseToBoundary(r));
        }
        let w = if boundary { w / r } else { w };
        if boundary && k > 0 {
            // For rational nonextreme b, f -> f^(k)(zeta) is bounded iff
            // int |log|b|| / |zeta - e^{it}|^(2k+2) dt < oo, i.e. iff a
            // vanishes at zeta to order at least k + 1.
            let order = vanishing_order(&self.pair.a.num, w, k + 1);
            if order < k + 1 {
                return Err(Error::UnboundedEvaluation { k, order });
            }
        }
        let rational = derivative_kernel_rational(&self.pair.b, w, k, boundary)?;
        let vector = self.rational_vector(&rational)?;
        Ok(KernelFunction { w, k, boundary, rational, vector })
    }

    /// Multiplication by `z` with a fresh companion.
    pub fn shift_apply(&self, f: &HbVector) -> Result<HbVector> {
        self.vector(f.f.shift())
    }
}

fn check_tail(t: &FourierTruncation) -> Result<()> {
    let tail = t.tail();
    if tail > TAIL_BOUND * t.norm().max(1.0) {
        return Err(Error::TailTooLarge { tail });
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `sum_m C(k,m) (k-m)! [delta_m0 - conj(b^(m)(w)) b(z)] z^(k-m) / (1 - conj(w) z)^(k-m+1)`
/// over the common denominator `Q_b (1 - conj(w) z)^(k+1)`. At a boundary
/// point the factor `(z - w)^(k+1)` is divided out, which succeeds exactly when
/// the limit kernel has no pole at `w`.
/// Multiplicity of `w` as a root of `p`, counted up to `cap`.
fn vanishing_order(p: &ComplexPoly, w: C64, cap: usize) -> usize {
    let scale = p.max_abs_coeff().max(f64::MIN_POSITIVE);
    let mut p = p.clone();
    for m in 0..cap {
        let (q, rem) = p.deflate(w);
        if rem.norm() > 1e-9 * scale {
            return m;
        }
        p = q;
    }
    cap
}

fn derivative_kernel_rational(b: &RationalFn, w: C64, k: usize, boundary: bool) -> Result<RationalFn> {
    let derivs = b.derivatives_at(w, k);
    let lin = ComplexPoly::new(vec![ONE, -w.conj()]);
    let mut num = ComplexPoly::zero();
    for (m, dm) in derivs.iter().enumerate() {
        let mut bracket = b.num.scale(-dm.conj());
        if m == 0 {
            bracket = &bracket + &b.den;
        }
        let term = &(&bracket * &ComplexPoly::monomial(k - m, ONE)) * &lin.pow(m);
        num = &num + &term.scale(C64::new(binomial(k, m) * factorial(k - m), 0.0));
    }
    if !boundary {
        return RationalFn::new(num, &b.den * &lin.pow(k + 1));
    }
    // (1 - conj(w) z)^(k+1) = (-conj(w))^(k+1) (z - w)^(k+1)
    let scale = num.max_abs_coeff().max(f64::MIN_POSITIVE);
    for _ in 0..=k {
        let (q, rem) = num.deflate(w);
        if rem.norm() > 1e-9 * scale {
            return Err(Error::PoleAtPoint);
        }
        num = q;
    }
    let den = b.den.scale((-w.conj()).powu(k as u32 + 1));
    RationalFn::new(num, den)
}
