//! Cohn's rule for counting zeros in the closed unit disk.
//!
//! For `r(z) = a_n z^n + ... + a_0` with `|a_n| < |a_0|`, the polynomial
//! `conj(a_0) r - a_n r*` (with `r*` the conjugate-reversed polynomial) has
//! strictly smaller degree and the same number of zeros in the closed disk.
//! Iterating down to a constant gives the count without locating any root.

use super::ComplexPoly;
use crate::{Error, Result, C64};

/// Roots whose modulus lies within this distance of 1 cannot be classified.
pub const BOUNDARY_GUARD: f64 = 1e-9;

impl ComplexPoly {
    /// `r*(z) = conj(a_0) z^n + ... + conj(a_n)` at formal degree `n`
    /// (defaults to the actual degree).
    pub fn reciprocal_conjugate(&self, n: Option<usize>) -> Result<ComplexPoly> {
        let deg = self.degree().ok_or(Error::ZeroPolynomial)?;
        let n = n.unwrap_or(deg);
        if n < deg {
            return Err(Error::BadParameters(format!(
                "formal degree {n} below actual degree {deg}"
            )));
        }
        Ok(ComplexPoly::new(
            (0..=n).map(|j| self.coeff(n - j).conj()).collect(),
        ))
    }
}

/// One Cohn reduction `conj(a_0) p - a_n p*`.
pub fn cohn_step(p: &ComplexPoly) -> Result<ComplexPoly> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    let leading = p.leading();
    let constant = p.coeff(0);
    if leading.norm() >= constant.norm() {
        return Err(Error::CohnInapplicable {
            leading: leading.norm(),
            constant: constant.norm(),
        });
    }
    let star = p.reciprocal_conjugate(Some(n))?;
    let mut coeffs: Vec<C64> = (0..n)
        .map(|j| constant.conj() * p.coeff(j) - leading * star.coeff(j))
        .collect();
    // the z^n terms cancel identically
    coeffs.truncate(n);
    Ok(ComplexPoly::new(coeffs))
}

/// Number of zeros of `p` in the closed unit disk, with multiplicity.
///
/// Cohn reductions are applied while `|a_n| < |a_0|`; otherwise the current
/// polynomial's roots are censused directly. Any root of `p` within
/// [`BOUNDARY_GUARD`] of the circle yields [`Error::Borderline`].
pub fn closed_disk_zero_count(p: &ComplexPoly) -> Result<usize> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(0);
    }
    guard_band(p)?;

    let mut cur = p.clone();
    loop {
        match cur.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(0) => return Ok(0),
            Some(_) => {}
        }
        match cohn_step(&cur) {
            Ok(next) => {
                // rescale to keep coefficients O(1) across repeated products
                let s = next.max_abs_coeff();
                if s == 0.0 {
                    return Err(Error::ZeroPolynomial);
                }
                cur = next.scale(C64::new(1.0 / s, 0.0));
            }
            Err(Error::CohnInapplicable { .. }) => {
                guard_band(&cur)?;
                let rs = cur.roots()?;
                return Ok(rs.roots.iter().filter(|r| r.norm() <= 1.0).count());
            }
            Err(e) => return Err(e),
        }
    }
}

fn guard_band(p: &ComplexPoly) -> Result<()> {
    let rs = p.roots()?;
    if let Some(r) = rs
        .roots
        .iter()
        .find(|r| (r.norm() - 1.0).abs() < BOUNDARY_GUARD)
    {
        return Err(Error::Borderline { modulus: r.norm() });
    }
    Ok(())
}

/// `a_n z^n + a_0 (1 + z + ... + z^{n-1})` with `a_0 > a_n > 0`.
pub fn lemma1_family(n: usize, a0: f64, an: f64) -> Result<ComplexPoly> {
    if n == 0 || !(an > 0.0 && a0 > an) || !a0.is_finite() {
        return Err(Error::BadParameters(format!(
            "need n >= 1 and a0 > an > 0 (got n={n}, a0={a0}, an={an})"
        )));
    }
    let mut coeffs = vec![C64::new(a0, 0.0); n];
    coeffs.push(C64::new(an, 0.0));
    Ok(ComplexPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real(p: &[f64]) -> ComplexPoly {
        ComplexPoly::from_real(p)
    }

    fn census(p: &ComplexPoly) -> usize {
        p.roots()
            .unwrap()
            .roots
            .iter()
            .filter(|r| r.norm() <= 1.0)
            .count()
    }

    #[test]
    fn reciprocal_conjugate_examples() {
        assert_eq!(
            real(&[2.0, 2.0, 2.0, 1.0]).reciprocal_conjugate(Some(3)).unwrap(),
            real(&[1.0, 2.0, 2.0, 2.0])
        );
        assert_eq!(
            real(&[1.0, 2.0, 1.0]).reciprocal_conjugate(None).unwrap(),
            real(&[1.0, 2.0, 1.0])
        );
        let p = ComplexPoly::new(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(
            p.reciprocal_conjugate(Some(2)).unwrap(),
            ComplexPoly::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, -1.0)])
        );
        assert_eq!(
            ComplexPoly::zero().reciprocal_conjugate(None).unwrap_err(),
            Error::ZeroPolynomial
        );
    }

    #[test]
    fn cohn_step_matches_hand_reduction() {
        // (a0 - an) a0 = 2, (a0 - an)(a0 + an) = 3 for a0 = 2, an = 1
        assert_eq!(cohn_step(&real(&[2.0, 2.0, 2.0, 1.0])).unwrap(), real(&[3.0, 2.0, 2.0]));
        let p0 = cohn_step(&real(&[3.0, 2.0])).unwrap();
        assert_eq!(p0, real(&[5.0]));
        // a_n = 0 case is excluded by the trimmed representation; a tiny leading
        // coefficient behaves like a scaled copy
        let p = real(&[4.0, 1.0, 0.5]);
        let q = cohn_step(&p).unwrap();
        assert_eq!(q.degree(), Some(1));
    }

    #[test]
    fn cohn_inapplicable_is_reported() {
        assert!(matches!(
            cohn_step(&real(&[1.0, 0.0, 2.0])),
            Err(Error::CohnInapplicable { .. })
        ));
    }

    #[test]
    fn zero_count_examples() {
        assert_eq!(closed_disk_zero_count(&real(&[2.0, 2.0, 2.0, 1.0])).unwrap(), 0);
        assert_eq!(closed_disk_zero_count(&real(&[0.0, 1.0])).unwrap(), 1);
        assert_eq!(closed_disk_zero_count(&real(&[0.25, 0.0, 1.0])).unwrap(), 2);
        assert!(matches!(
            closed_disk_zero_count(&real(&[1.0, -1.0])),
            Err(Error::Borderline { .. })
        ));
    }

    #[test]
    fn lemma1_examples() {
        let p = lemma1_family(3, 2.0, 1.0).unwrap();
        assert_eq!(p, real(&[2.0, 2.0, 2.0, 1.0]));
        assert_eq!(closed_disk_zero_count(&p).unwrap(), 0);
        let p1 = lemma1_family(1, 2.0, 1.0).unwrap();
        let rs = p1.roots().unwrap();
        assert!((rs.roots[0] + C64::new(2.0, 0.0)).norm() < 1e-14);
        let p5 = lemma1_family(5, 1.01, 1.0).unwrap();
        assert_eq!(closed_disk_zero_count(&p5).unwrap(), 0);
        assert!(p5.roots().unwrap().min_modulus() > 1.0);
    }

    #[test]
    fn lemma1_rejects_bad_parameters() {
        assert!(lemma1_family(3, 1.0, 1.0).is_err());
        assert!(lemma1_family(3, 1.0, 2.0).is_err());
        assert!(lemma1_family(3, 1.0, 0.0).is_err());
        assert!(lemma1_family(0, 2.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn reciprocal_conjugate_is_an_involution(
            re in prop::collection::vec(-2.0f64..2.0, 1..8),
            im in prop::collection::vec(-2.0f64..2.0, 8),
            extra in 0usize..3,
        ) {
            let p = ComplexPoly::new(re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect());
            prop_assume!(!p.is_zero());
            let n = p.degree().unwrap() + extra;
            let once = p.reciprocal_conjugate(Some(n)).unwrap();
            let twice = once.reciprocal_conjugate(Some(n)).unwrap();
            prop_assert_eq!(twice, p);
        }

        #[test]
        fn lemma1_has_no_closed_disk_zeros(n in 1usize..=8, an in 0.01f64..5.0, gap in 0.01f64..5.0) {
            let p = lemma1_family(n, an + gap, an).unwrap();
            prop_assert_eq!(closed_disk_zero_count(&p).unwrap(), 0);
            prop_assert!(p.roots().unwrap().min_modulus() > 1.0);
        }

        #[test]
        fn cohn_step_preserves_count(
            re in prop::collection::vec(-1.0f64..1.0, 2..10),
            im in prop::collection::vec(-1.0f64..1.0, 10),
            a0 in 1.0f64..3.0,
        ) {
            let mut coeffs: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
            coeffs[0] = C64::new(a0, 0.5);
            let p = ComplexPoly::new(coeffs);
            prop_assume!(p.degree().unwrap_or(0) >= 1 && p.leading().norm() < p.coeff(0).norm());
            let rs = p.roots().unwrap();
            prop_assume!(rs.roots.iter().all(|r| (r.norm() - 1.0).abs() > 1e-6));
            let q = cohn_step(&p).unwrap();
            let expected = census(&p);
            let got = if q.degree().unwrap_or(0) == 0 { 0 } else { census(&q) };
            prop_assert_eq!(got, expected);
        }
    }
}
