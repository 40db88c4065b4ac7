//! Finite-sample checks of the orthogonal decompositions of `H(b)`, the
//! Hayashi kernel identities of the family-2 proof, and set equalities.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blaschke::{boundary_grid, compose_with_inner, family1_multiplier, BlaschkeProduct, PairSpec, RationalFn};
use crate::hardy::{model_space_basis, BoundaryGrid, FourierTruncation, Kind};
use crate::hb::{HbContext, HbVector};
use crate::poly::{closed_disk_zero_count, ComplexPoly};
use crate::{Error, Result, C64};

pub const ORTHOGONALITY_TOL: f64 = 1e-6;
pub const COMPLETENESS_TOL: f64 = 1e-4;
/// Allowed growth of a completeness residual when the order doubles.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Probes `z^0 ..= z^PROBE_DEGREE`.
pub const PROBE_DEGREE: usize = 12;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub scenario: String,
    pub summands: Vec<String>,
    pub order: usize,
    /// `J`: the `(1 - I) z^j`-type samples use `j <= J`.
    pub samples: usize,
    /// Max of `|<u, v>_b| / (||u||_b ||v||_b)` over cross pairs.
    pub max_cross_orthogonality: f64,
    /// Relative b-norm residual of each probe's projection.
    pub completeness: Vec<f64>,
    pub refined_order: Option<usize>,
    pub refined_completeness: Option<Vec<f64>>,
    pub monotone: Option<bool>,
    pub pass: bool,
}

impl DecompositionReport {
    pub fn max_completeness(&self) -> f64 {
        self.completeness.iter().copied().fold(0.0, f64::max)
    }

    fn finish(mut self) -> Self {
        self.pass = self.max_cross_orthogonality < ORTHOGONALITY_TOL
            && self.completeness.iter().all(|&r| r < COMPLETENESS_TOL)
            && self.monotone != Some(false);
        self
    }
}

/// Normalised cross Gram maximum between two families.
pub fn max_cross(ctx: &HbContext, us: &[HbVector], vs: &[HbVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for u in us {
        let nu = ctx.hb_norm(u);
        for v in vs {
            let ip = ctx.hb_inner_sarason(u, v)?;
            worst = worst.max(ip.norm() / (nu * ctx.hb_norm(v)));
        }
    }
    Ok(worst)
}

fn stacked(v: &HbVector) -> Vec<C64> {
    v.f.coeffs().iter().chain(v.fplus.coeffs()).copied().collect()
}

/// `||p - P p||_b / ||p||_b` for the b-orthogonal projection onto the span,
/// by least squares on the stacked `[f; f+]` coordinates.
pub fn projection_residuals(ctx: &HbContext, span: &[HbVector], probes: &[HbVector]) -> Result<Vec<f64>> {
    if span.is_empty() {
        return Err(Error::BadParameters("empty spanning family".into()));
    }
    let rows = 2 * (ctx.order() + 1);
    let mut a = DMatrix::<C64>::zeros(rows, span.len());
    for (j, v) in span.iter().enumerate() {
        let col = stacked(v);
        let norm = ctx.hb_norm(v);
        for (i, c) in col.into_iter().enumerate() {
            a[(i, j)] = c / norm;
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let mut out = Vec::with_capacity(probes.len());
    for p in probes {
        let y = DVector::from_vec(stacked(p));
        let x = svd
            .solve(&y, 1e-13 * smax)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let r = (&a * x - &y).norm();
        out.push(r / y.norm());
    }
    Ok(out)
}

/// `J = max(N/8, 2 * PROBE_DEGREE)`.
pub fn sample_count(order: usize) -> usize {
    (order / 8).max(2 * PROBE_DEGREE)
}

fn monomial_probes(ctx: &HbContext) -> Result<Vec<HbVector>> {
    (0..=PROBE_DEGREE)
        .map(|j| ctx.poly_vector(&ComplexPoly::monomial(j, ONE)))
        .collect()
}

/// `w(I) z^j` for `j <= J`.
fn multiplier_samples(ctx: &HbContext, w: &ComplexPoly, inner: &BlaschkeProduct, samples: usize) -> Result<Vec<HbVector>> {
    let base = compose_with_inner(w, &ComplexPoly::one(), inner)?;
    (0..=samples)
        .map(|j| ctx.rational_vector(&base.mul_poly(&ComplexPoly::monomial(j, ONE))))
        .collect()
}

/// `w(I) e_k` over an orthonormal basis of `K_I`.
fn model_samples(ctx: &HbContext, w: &ComplexPoly, inner: &BlaschkeProduct) -> Result<Vec<HbVector>> {
    let basis = model_space_basis(inner, ctx.order())?;
    let mult = compose_with_inner(w, &ComplexPoly::one(), inner)?;
    basis
        .rationals
        .iter()
        .map(|e| ctx.rational_vector(&mult.mul(e)))
        .collect()
}

struct Summands {
    names: Vec<String>,
    families: Vec<Vec<HbVector>>,
}

fn run_decomposition<B>(
    scenario: String,
    spec: &PairSpec,
    order: usize,
    build: B,
) -> Result<DecompositionReport>
where
    B: Fn(&HbContext, usize) -> Result<Summands>,
{
    let check = |order: usize| -> Result<(f64, Vec<f64>, Vec<String>, usize)> {
        let ctx = HbContext::new(spec, order)?;
        let samples = sample_count(order);
        let s = build(&ctx, samples)?;
        let mut cross = 0.0f64;
        for i in 0..s.families.len() {
            for j in i + 1..s.families.len() {
                cross = cross.max(max_cross(&ctx, &s.families[i], &s.families[j])?);
            }
        }
        let span: Vec<HbVector> = s.families.into_iter().flatten().collect();
        let residuals = projection_residuals(&ctx, &span, &monomial_probes(&ctx)?)?;
        Ok((cross, residuals, s.names, samples))
    };
    let (cross, completeness, summands, samples) = check(order)?;
    let (_, refined, _, _) = check(2 * order)?;
    let monotone = completeness
        .iter()
        .zip(&refined)
        .all(|(coarse, fine)| *fine <= coarse + MONOTONE_SLACK);
    Ok(DecompositionReport {
        scenario,
        summands,
        order,
        samples,
        max_cross_orthogonality: cross,
        completeness,
        refined_order: Some(2 * order),
        refined_completeness: Some(refined),
        monotone: Some(monotone),
        pass: false,
    }
    .finish())
}

/// `H(b) = (1 - I) H^2 (+)_b m_n(I) K_I` for `b = I^n (1 + I) / 2`, with
/// `m_n(w) = w^n + 2 w^{n-1} + ... + 2`.
pub fn verify_theorem1(inner: &BlaschkeProduct, n: usize, order: usize) -> Result<DecompositionReport> {
    let spec = PairSpec::family1(inner.clone(), n);
    let m = family1_multiplier(n);
    run_decomposition(format!("thm1 {}", spec.label()), &spec, order, |ctx, samples| {
        Ok(Summands {
            names: vec!["(1 - I) H^2".into(), format!("m_{n}(I) K_I")],
            families: vec![
                multiplier_samples(ctx, &ComplexPoly::from_real(&[1.0, -1.0]), inner, samples)?,
                model_samples(ctx, &m, inner)?,
            ],
        })
    })
}

/// `H(b) = (1 - I^2) H^2 (+)_b (2 - I)(1 - I) K_I (+)_b (2 + I + I^2) K_I` for
/// `b = I (1 + I^2) / 2`, `I(0) = 0`.
pub fn verify_theorem3(inner: &BlaschkeProduct, order: usize) -> Result<DecompositionReport> {
    let spec = PairSpec::family2(inner.clone());
    spec.validate()?;
    run_decomposition(format!("thm3 {}", spec.label()), &spec, order, |ctx, samples| {
        Ok(Summands {
            names: vec![
                "(1 - I^2) H^2".into(),
                "(2 - I)(1 - I) K_I".into(),
                "(2 + I + I^2) K_I".into(),
            ],
            families: vec![
                multiplier_samples(ctx, &ComplexPoly::from_real(&[1.0, 0.0, -1.0]), inner, samples)?,
                // (2 - I)(1 - I) = 2 - 3I + I^2
                model_samples(ctx, &ComplexPoly::from_real(&[2.0, -3.0, 1.0]), inner)?,
                model_samples(ctx, &ComplexPoly::from_real(&[2.0, 1.0, 1.0]), inner)?,
            ],
        })
    })
}

/// For `b = b1 b2` with `b1 = I^n` inner and `b2 = (1 + I)/2`, samples of
/// `K_{I^n}` against `I^n z^j` (elements of `I^n H(b2)`).
pub fn verify_product_decomposition(inner: &BlaschkeProduct, n: usize, order: usize) -> Result<DecompositionReport> {
    if n == 0 {
        return Err(Error::BadParameters("product decomposition needs n >= 1".into()));
    }
    let spec = PairSpec::family1(inner.clone(), n);
    let ctx = HbContext::new(&spec, order)?;
    let power = inner.power(n);
    let samples = sample_count(order);
    let model = model_samples(&ctx, &ComplexPoly::one(), &power)?;
    let shifted = multiplier_samples(&ctx, &ComplexPoly::monomial(1, ONE), &power, samples)?;
    let cross = max_cross(&ctx, &model, &shifted)?;
    let span: Vec<HbVector> = model.into_iter().chain(shifted).collect();
    let completeness = projection_residuals(&ctx, &span, &monomial_probes(&ctx)?)?;
    Ok(DecompositionReport {
        scenario: format!("product {}", spec.label()),
        summands: vec!["K_{I^n}".into(), "I^n H((1 + I)/2)".into()],
        order,
        samples,
        max_cross_orthogonality: cross,
        completeness,
        refined_order: None,
        refined_completeness: None,
        monotone: None,
        pass: false,
    }
    .finish())
}

/// Sufficient rigidity certificate for a rational `f`: `f` and `1/f` both
/// bounded analytic on the closed disk. `false` means inconclusive.
pub fn rigidity_check(f2: &RationalFn) -> Result<bool> {
    if f2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(closed_disk_zero_count(&f2.num)? == 0 && closed_disk_zero_count(&f2.den)? == 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct HayashiReport {
    pub scenario: String,
    /// `|Re((6 - I - 3I^2)/(2 + I + I^2)) - 8 |f1|^2|` on the grid.
    pub real_part_defect: f64,
    pub f1_norm_sq: f64,
    pub f1_norm_defect: f64,
    /// `||a0|^2 + |b0|^2 - 1|` on the grid.
    pub pair_defect: f64,
    /// `|f - a0 / (1 - I b0)|` on the grid.
    pub representation_defect: f64,
    /// `|f0^2 - (3/2)/(I + 2)^2|` on the grid.
    pub f0_squared_defect: f64,
    pub f0_squared_rigid: bool,
    /// `|conj(F)/F - conj(I) conj(f1)/f1|` on a grid avoiding the zeros of `F`.
    pub symbol_defect: f64,
    /// `||T_{conj(F)/F}(f e_k)|| / ||f e_k||`, max over `k`.
    pub kernel_membership: f64,
    /// Relative distance of `T_conj(F)(f e_k)` from `span{(2 - I) f e_j}`, max over `k`.
    pub image_identity: f64,
    /// `s_min / s_max` of the induced map on `K_I`; positive means the image is all of `(2 - I) f K_I`.
    pub image_map_conditioning: f64,
    pub pass: bool,
}

pub const HAYASHI_GRID_TOL: f64 = 1e-10;
pub const HAYASHI_NORM_TOL: f64 = 1e-8;
pub const HAYASHI_OPERATOR_TOL: f64 = 1e-6;

/// Checks the identities behind `ker T_{conj(F)/F} = f K_I` for
/// `F = (1 + I)/(2 + I + I^2)`, `f1 = 1/(2 + I + I^2)`, `f = sqrt(8/3) f1`.
pub fn verify_hayashi_identities(inner: &BlaschkeProduct, order: usize) -> Result<HayashiReport> {
    let spec = PairSpec::family2(inner.clone());
    spec.validate()?;
    if order < 8 * inner.degree() {
        return Err(Error::BadParameters(format!("order {order} below 8 deg I")));
    }
    let scale = (8.0f64 / 3.0).sqrt();
    let iz = |z: C64| inner.eval(z);
    let f1 = |z: C64| ONE / (iz(z) * iz(z) + iz(z) + 2.0);
    let f = |z: C64| f1(z) * scale;
    let big_f = |z: C64| (iz(z) + 1.0) * f1(z);
    let a0 = |z: C64| C64::new(2.0 * 6f64.sqrt(), 0.0) / (iz(z) + 6.0);
    let b0 = |z: C64| -(iz(z) * 3.0 + 2.0) / (iz(z) + 6.0);

    let mut real_part_defect = 0.0f64;
    let mut pair_defect = 0.0f64;
    let mut representation_defect = 0.0f64;
    let mut f0_squared_defect = 0.0f64;
    for z in boundary_grid(512) {
        let i = iz(z);
        let lhs = ((-3.0 * i * i - i + 6.0) / (i * i + i + 2.0)).re;
        real_part_defect = real_part_defect.max((lhs - 8.0 * f1(z).norm_sqr()).abs());
        pair_defect = pair_defect.max((a0(z).norm_sqr() + b0(z).norm_sqr() - 1.0).abs());
        representation_defect =
            representation_defect.max((f(z) - a0(z) / (ONE - i * b0(z))).norm());
        let f0 = a0(z) / (ONE - b0(z));
        f0_squared_defect = f0_squared_defect.max((f0 * f0 - 1.5 / ((i + 2.0) * (i + 2.0))).norm());
    }

    let f1_rat = compose_with_inner(&ComplexPoly::one(), &ComplexPoly::from_real(&[2.0, 1.0, 1.0]), inner)?;
    let f1_norm_sq = f1_rat.taylor(order).iter().map(|c| c.norm_sqr()).sum::<f64>();
    let f1_norm_defect = (f1_norm_sq - 0.375).abs();

    let f0_sq = compose_with_inner(
        &ComplexPoly::from_real(&[1.5]),
        &ComplexPoly::from_real(&[4.0, 4.0, 1.0]),
        inner,
    )?;
    let f0_squared_rigid = rigidity_check(&f0_sq)?;

    // evaluate the symbol identity between grid points, away from I = -1
    let m = 512;
    let symbol_defect = (0..m)
        .map(|k| C64::from_polar(1.0, std::f64::consts::PI * (2 * k + 1) as f64 / m as f64))
        .filter(|&z| (iz(z) + 1.0).norm() > 1e-3)
        .map(|z| {
            let lhs = big_f(z).conj() / big_f(z);
            let rhs = iz(z).conj() * f1(z).conj() / f1(z);
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max);

    let basis = model_space_basis(inner, order)?;
    let grid = BoundaryGrid::new((16 * order).max(4096));
    let project = |samples: Vec<C64>| -> FourierTruncation {
        grid.truncate(&grid.coefficients(samples), order, Kind::Analytic)
    };
    let mut kernel_membership = 0.0f64;
    let mut images = Vec::with_capacity(basis.dimension());
    let mut targets = Vec::with_capacity(basis.dimension());
    for e in &basis.rationals {
        let fe: Vec<C64> = grid.points().iter().map(|&z| f(z) * e.eval(z)).collect();
        let fe_norm = project(fe.clone()).norm();
        // conj(F)/F = conj(I) conj(f1)/f1 on the circle; the right side has no 0/0
        let ker = project(
            grid.points()
                .iter()
                .zip(&fe)
                .map(|(&z, &v)| iz(z).conj() * f1(z).conj() / f1(z) * v)
                .collect(),
        );
        kernel_membership = kernel_membership.max(ker.norm() / fe_norm);
        images.push(project(
            grid.points()
                .iter()
                .zip(&fe)
                .map(|(&z, &v)| big_f(z).conj() * v)
                .collect(),
        ));
        targets.push(project(
            grid.points()
                .iter()
                .zip(&fe)
                .map(|(&z, &v)| (2.0 - iz(z)) * v)
                .collect(),
        ));
    }
    // T_conj(F) maps f K_I onto (2 - I) f K_I: each image lies in the target
    // span, and the induced d x d coefficient matrix is invertible
    let d = basis.dimension();
    let target_matrix = DMatrix::from_fn(order + 1, d, |i, j| targets[j].coeffs()[i]);
    let svd = target_matrix.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let mut coefficients = DMatrix::<C64>::zeros(d, d);
    let mut image_identity = 0.0f64;
    for (k, img) in images.iter().enumerate() {
        let y = DVector::from_column_slice(img.coeffs());
        let x = svd
            .solve(&y, 1e-13 * smax)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        image_identity = image_identity.max((&target_matrix * &x - &y).norm() / y.norm());
        coefficients.set_column(k, &x);
    }
    let sv = coefficients.singular_values();
    let image_map_conditioning = sv.min() / sv.max();

    let pass = real_part_defect < HAYASHI_GRID_TOL
        && f1_norm_defect < HAYASHI_NORM_TOL
        && pair_defect < HAYASHI_GRID_TOL
        && representation_defect < HAYASHI_GRID_TOL
        && f0_squared_defect < HAYASHI_GRID_TOL
        && f0_squared_rigid
        && symbol_defect < HAYASHI_GRID_TOL
        && kernel_membership < HAYASHI_OPERATOR_TOL
        && image_identity < HAYASHI_OPERATOR_TOL
        && image_map_conditioning > 1e-8;
    Ok(HayashiReport {
        scenario: format!("hayashi {}", spec.label()),
        real_part_defect,
        f1_norm_sq,
        f1_norm_defect,
        pair_defect,
        representation_defect,
        f0_squared_defect,
        f0_squared_rigid,
        symbol_defect,
        kernel_membership,
        image_identity,
        image_map_conditioning,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SetEqualityReport {
    pub scenario: String,
    pub order: usize,
    pub seed: u64,
    pub probes: usize,
    /// Probes rejected by either space.
    pub rejected: usize,
    /// `||p||_{b_A} / ||p||_{b_B}` for accepted probes.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

pub const SET_EQ_PROBE_DEGREE: usize = 10;

/// Norm ratios of seeded random polynomials (degree <= 10) in two spaces.
pub fn verify_set_equality(
    spec_a: &PairSpec,
    spec_b: &PairSpec,
    probes: usize,
    seed: u64,
    order: usize,
) -> Result<SetEqualityReport> {
    let order = order
        .max(HbContext::min_order(spec_a))
        .max(HbContext::min_order(spec_b));
    let ctx_a = HbContext::new(spec_a, order)?;
    let ctx_b = HbContext::new(spec_b, order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(probes);
    let mut rejected = 0;
    for _ in 0..probes {
        let p = ComplexPoly::new(
            (0..=SET_EQ_PROBE_DEGREE)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
        match (ctx_a.poly_vector(&p), ctx_b.poly_vector(&p)) {
            (Ok(va), Ok(vb)) => ratios.push(ctx_a.hb_norm(&va) / ctx_b.hb_norm(&vb)),
            (Err(Error::NotInHb { .. }), _) | (_, Err(Error::NotInHb { .. })) => rejected += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(SetEqualityReport {
        scenario: format!("set-eq {} vs {}", spec_a.label(), spec_b.label()),
        order,
        seed,
        probes,
        rejected,
        pass: rejected == 0 && !ratios.is_empty() && min_ratio > 0.0 && max_ratio.is_finite(),
        ratios,
        min_ratio,
        max_ratio,
    })
}
