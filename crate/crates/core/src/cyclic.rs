//! Cyclic vectors: the atom criterion, the polynomial-density oracle
//! `min ||1 - p f||_b`, and boundary kernel functions at the atoms.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;

use crate::blaschke::{Family, PairSpec, RationalFn};
use crate::clark::{clark_atoms, AtomicMeasure};
use crate::hardy::{outer_check, OuterMode};
use crate::hb::{HbContext, HbVector, KernelFunction};
use crate::poly::ComplexPoly;
use crate::{Error, Result, C64};

/// `|f(zeta)|` above this counts as nonvanishing.
pub const NONVANISHING: f64 = 1e-6;
/// `|f(zeta)|` in `[BORDERLINE_LOW, NONVANISHING]` is not classified.
pub const BORDERLINE_LOW: f64 = 1e-9;
pub const ORACLE_CYCLIC: f64 = 0.01;
pub const ORACLE_NONCYCLIC: f64 = 0.1;
pub const ORACLE_DEGREE: usize = 40;
pub const RIDGE: f64 = 1e-12;
pub const MAX_CONDITION: f64 = 1e12;
pub const MONOTONE_SLACK: f64 = 1e-12;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// The measure whose atoms decide cyclicity: `sigma_I` for family 1,
/// `sigma_{I^2}` for family 2.
pub fn criterion_atoms(spec: &PairSpec) -> Result<AtomicMeasure> {
    match spec.family {
        Family::One => clark_atoms(&spec.inner, ONE),
        Family::Two => clark_atoms(&spec.inner.power(2), ONE),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomValue {
    pub atom: C64,
    pub abs_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub mode: OuterMode,
    pub values: Vec<AtomValue>,
    pub min_abs: f64,
    pub cyclic: bool,
}

/// Outer `f` in `H(b)` is cyclic iff it does not vanish at any criterion atom.
pub fn cyclic_criterion(ctx: &HbContext, f: &RationalFn, mode: OuterMode) -> Result<CriterionResult> {
    if !outer_check(f, mode)? {
        return Err(Error::NotOuter);
    }
    ctx.rational_vector(f)?;
    let atoms = criterion_atoms(ctx.spec())?;
    let values: Vec<AtomValue> = atoms
        .atoms()
        .iter()
        .map(|a| AtomValue {
            atom: a.point,
            abs_value: f.eval(a.point).norm(),
        })
        .collect();
    let min_abs = values.iter().map(|v| v.abs_value).fold(f64::INFINITY, f64::min);
    if (BORDERLINE_LOW..=NONVANISHING).contains(&min_abs) {
        return Err(Error::Borderline { modulus: min_abs });
    }
    Ok(CriterionResult {
        mode,
        values,
        min_abs,
        cyclic: min_abs > NONVANISHING,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    /// `r_K` for `K = 0 ..= last K reached`.
    pub residuals: Vec<f64>,
    /// Gram condition number at each `K`.
    pub conditions: Vec<f64>,
    /// Set when the Gram matrix became ill conditioned; the sequence stops before it.
    pub ill_conditioned_at: Option<usize>,
    pub monotone: bool,
}

impl OracleResult {
    pub fn last(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }
}

fn stacked(v: &HbVector) -> DVector<C64> {
    DVector::from_iterator(
        v.f.coeffs().len() + v.fplus.coeffs().len(),
        v.f.coeffs().iter().chain(v.fplus.coeffs()).copied(),
    )
}

/// `r_K = min_{deg p <= K} ||1 - p f||_b` from ridge-regularised normal
/// equations on the b-Gram matrix of `{z^j f}`; the residual itself is
/// evaluated directly on the stacked `[g; g+]` coordinates.
pub fn density_oracle(ctx: &HbContext, f: &RationalFn, kmax: usize) -> Result<OracleResult> {
    let columns: Vec<DVector<C64>> = (0..=kmax)
        .map(|j| Ok(stacked(&ctx.rational_vector(&f.mul_poly(&ComplexPoly::monomial(j, ONE)))?)))
        .collect::<Result<_>>()?;
    let target = stacked(&ctx.poly_vector(&ComplexPoly::one())?);
    let m = kmax + 1;
    // G[i][j] = <v_j, v_i>_b, rhs[i] = <1, v_i>_b
    let gram = DMatrix::from_fn(m, m, |i, j| columns[i].dotc(&columns[j]));
    let rhs = DVector::from_fn(m, |i, _| columns[i].dotc(&target));

    let mut residuals = Vec::with_capacity(m);
    let mut conditions = Vec::with_capacity(m);
    let mut ill_conditioned_at = None;
    for k in 0..m {
        let g = gram.view((0, 0), (k + 1, k + 1)).into_owned();
        let eig = g.clone().symmetric_eigenvalues();
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        let cond = hi / lo.max(f64::MIN_POSITIVE);
        if cond > MAX_CONDITION {
            ill_conditioned_at = Some(k);
            break;
        }
        conditions.push(cond);
        let regularised = &g + DMatrix::<C64>::identity(k + 1, k + 1) * C64::new(RIDGE, 0.0);
        let chol = Cholesky::new(regularised)
            .ok_or_else(|| Error::Numerical(format!("Gram matrix not positive at K = {k}")))?;
        let c = chol.solve(&rhs.rows(0, k + 1).into_owned());
        let mut r = target.clone();
        for (j, cj) in c.iter().enumerate() {
            r.axpy(-*cj, &columns[j], ONE);
        }
        residuals.push(r.norm());
    }
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    Ok(OracleResult {
        residuals,
        conditions,
        ill_conditioned_at,
        monotone,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclicityVerdict {
    pub label: String,
    pub criterion: CriterionResult,
    pub oracle: OracleResult,
    pub oracle_degree: usize,
    pub final_residual: f64,
    /// `r` in `[0.01, 0.1]`: neither verdict.
    pub dead_band: bool,
    pub agreement: bool,
}

/// Runs both tests; agreement means `criterion cyclic <=> r_40 < 0.01`.
pub fn cyclicity_verdict(
    ctx: &HbContext,
    f: &RationalFn,
    mode: OuterMode,
    label: impl Into<String>,
) -> Result<CyclicityVerdict> {
    let criterion = cyclic_criterion(ctx, f, mode)?;
    let oracle = density_oracle(ctx, f, ORACLE_DEGREE)?;
    let final_residual = oracle.last();
    let oracle_degree = oracle.residuals.len().saturating_sub(1);
    let dead_band = (ORACLE_CYCLIC..=ORACLE_NONCYCLIC).contains(&final_residual);
    let agreement = criterion.cyclic == (final_residual < ORACLE_CYCLIC);
    Ok(CyclicityVerdict {
        label: label.into(),
        criterion,
        oracle,
        oracle_degree,
        final_residual,
        dead_band,
        agreement,
    })
}

#[derive(Clone, Debug)]
pub struct H0Basis {
    pub kernels: Vec<KernelFunction>,
    /// Rank of the normalised Gram matrix at relative tolerance `1e-8`.
    pub gram_rank: usize,
    /// Max of `|<u, a z^j>_b| / (||u||_b ||a z^j||_b)`.
    pub max_orthogonality_to_ma: f64,
}

/// `upsilon^0_{b, zeta}` at every criterion atom.
pub fn h0_basis(ctx: &HbContext, samples: usize) -> Result<H0Basis> {
    let atoms = criterion_atoms(ctx.spec())?;
    let kernels: Vec<KernelFunction> = atoms
        .atoms()
        .iter()
        .map(|a| ctx.derivative_kernel(a.point, 0))
        .collect::<Result<_>>()?;
    let d = kernels.len();
    let gram = DMatrix::from_fn(d, d, |i, j| {
        let u = &kernels[i].vector;
        let v = &kernels[j].vector;
        ctx.hb_inner_sarason(v, u).unwrap() / (ctx.hb_norm(u) * ctx.hb_norm(v))
    });
    let eig = gram.symmetric_eigenvalues();
    let top = eig.max();
    let gram_rank = eig.iter().filter(|&&e| e > 1e-8 * top).count();

    let a = &ctx.pair().a;
    let mut worst = 0.0f64;
    for j in 0..=samples {
        let v = ctx.rational_vector(&a.mul_poly(&ComplexPoly::monomial(j, ONE)))?;
        for k in &kernels {
            let ip = ctx.hb_inner_sarason(&k.vector, &v)?;
            worst = worst.max(ip.norm() / (ctx.hb_norm(&k.vector) * ctx.hb_norm(&v)));
        }
    }
    Ok(H0Basis {
        kernels,
        gram_rank,
        max_orthogonality_to_ma: worst,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Section4Report {
    pub atoms: Vec<C64>,
    /// `<f, upsilon^0_{z_j}>_b`
    pub evaluations: Vec<C64>,
    /// `f(z_j)`
    pub expected: Vec<C64>,
    pub max_evaluation_defect: f64,
    /// `|<p_i, upsilon_j>_b|` for `i != j`, relative to the diagonal, where
    /// `p_i = prod_{l != i} (z - z_l) f`.
    pub max_offdiagonal: f64,
    /// `|<p_i, upsilon_i>_b - p_i(z_i)|`
    pub max_diagonal_defect: f64,
    pub pass: bool,
}

pub const EVALUATION_TOL: f64 = 1e-6;

/// The evaluation identity at simple atoms and the elimination structure of
/// the localized probes. Only for family 1 with `n = 0`.
pub fn section4_orthogonality_check(ctx: &HbContext, f: &RationalFn) -> Result<Section4Report> {
    let spec = ctx.spec();
    if spec.family != Family::One || spec.n != 0 {
        return Err(Error::BadParameters(
            "the atom-kernel elimination check is restricted to b = (1 + I)/2".into(),
        ));
    }
    let atoms: Vec<C64> = criterion_atoms(spec)?.atoms().iter().map(|a| a.point).collect();
    let kernels: Vec<KernelFunction> = atoms
        .iter()
        .map(|&z| ctx.derivative_kernel(z, 0))
        .collect::<Result<_>>()?;
    let fv = ctx.rational_vector(f)?;
    let mut evaluations = Vec::with_capacity(atoms.len());
    let mut expected = Vec::with_capacity(atoms.len());
    let mut max_evaluation_defect = 0.0f64;
    for (z, k) in atoms.iter().zip(&kernels) {
        let got = ctx.hb_inner_sarason(&fv, &k.vector)?;
        let want = f.eval(*z);
        max_evaluation_defect = max_evaluation_defect.max((got - want).norm());
        evaluations.push(got);
        expected.push(want);
    }

    let mut max_offdiagonal = 0.0f64;
    let mut max_diagonal_defect = 0.0f64;
    for i in 0..atoms.len() {
        let local = atoms
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != i)
            .fold(ComplexPoly::one(), |acc, (_, &z)| &acc * &ComplexPoly::new(vec![-z, ONE]));
        let p = f.mul_poly(&local);
        let pv = ctx.rational_vector(&p)?;
        let diag_expected = p.eval(atoms[i]);
        let diag = ctx.hb_inner_sarason(&pv, &kernels[i].vector)?;
        max_diagonal_defect = max_diagonal_defect.max((diag - diag_expected).norm());
        for (j, k) in kernels.iter().enumerate() {
            if j != i {
                let off = ctx.hb_inner_sarason(&pv, &k.vector)?;
                max_offdiagonal = max_offdiagonal.max(off.norm() / diag.norm().max(f64::MIN_POSITIVE));
            }
        }
    }
    let pass = max_evaluation_defect < EVALUATION_TOL
        && max_diagonal_defect < EVALUATION_TOL
        && max_offdiagonal < EVALUATION_TOL;
    Ok(Section4Report {
        atoms,
        evaluations,
        expected,
        max_evaluation_defect,
        max_offdiagonal,
        max_diagonal_defect,
        pass,
    })
}
