//! Cross-ratios, cross-ratio distortion and the minimum principle check.
//!
//! For a bounded interval `T` and a subinterval `J` whose closure lies in the
//! interior of `T`, write `L` and `R` for the left and right components of
//! `T \ J`.  The cross-ratio used throughout is
//!
//! ```text
//! D(T, J) = |T|·|J| / (|L|·|R|)
//! ```
//!
//! and the distortion of a diffeomorphism `f` of `T` onto its image is
//! `B(f, T, J) = D(f(T), f(J)) / D(T, J)`.  Möbius maps leave `D` invariant,
//! so `B` measures the failure of `f` to be Möbius.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::Map;
use crate::num::Real;

/// The cross-ratio `D(T, J) = |T||J|/(|L||R|)`.
///
/// Errors when `J` is not strictly inside `T` or when any of the four
/// intervals involved is degenerate (the ratio would be `0/0` or `∞`).
pub fn cross_ratio<R: Real>(t: &Interval<R>, j: &Interval<R>) -> Result<R> {
    if !t.strictly_contains(j) {
        return Err(Error::Degenerate(format!(
            "inner interval [{}, {}] must lie strictly inside [{}, {}]",
            j.lo().approx_f64(),
            j.hi().approx_f64(),
            t.lo().approx_f64(),
            t.hi().approx_f64()
        )));
    }
    if j.is_degenerate() {
        return Err(Error::Degenerate(
            "inner interval is a single point".into(),
        ));
    }
    let (l, r) = t.flanks(j)?;
    Ok(t.length() * j.length() / (l.length() * r.length()))
}

/// Cross-ratio of the image configuration from the four endpoint images
/// `f(T.lo) = a`, `f(J.lo) = b`, `f(J.hi) = c`, `f(T.hi) = d` of a map that
/// is monotone on `T` (either orientation).
fn cross_ratio_of_images<R: Real>(a: R, b: R, c: R, d: R) -> Result<R> {
    let whole = (d - a).abs();
    let inner = (c - b).abs();
    let left = (b - a).abs();
    let right = (d - c).abs();
    if inner == R::zero() || left == R::zero() || right == R::zero() {
        return Err(Error::Degenerate(
            "image configuration collapsed to a degenerate cross-ratio".into(),
        ));
    }
    Ok(whole * inner / (left * right))
}

/// Cross-ratio distortion `B(f, T, J) = D(f(T), f(J)) / D(T, J)`.
///
/// Errors when `f` is not a diffeomorphism on `T` or the configuration is
/// degenerate.
pub fn distortion<R: Real>(f: &Map<R>, t: &Interval<R>, j: &Interval<R>) -> Result<R> {
    let d = cross_ratio(t, j)?;
    if !f.is_diffeo_on(t)? {
        return Err(Error::NotDiffeo {
            lo: t.lo().approx_f64(),
            hi: t.hi().approx_f64(),
        });
    }
    let a = f.eval(t.lo())?;
    let b = f.eval(j.lo())?;
    let c = f.eval(j.hi())?;
    let e = f.eval(t.hi())?;
    let df = cross_ratio_of_images(a, b, c, e)?;
    Ok(df / d)
}

/// Outcome of [`minimum_principle_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinimumPrincipleReport<R> {
    /// `Dfⁿ` at the two endpoints of `T` (exact, via jets).
    pub endpoint_derivatives: (R, R),
    /// Whether both endpoint derivatives exceed `1 + 2ρ`.
    pub endpoints_ok: bool,
    /// Smallest sampled `B(f, T*, J*)³` over nested pairs `J* ⊂ T* ⊂ T`.
    pub min_b_cubed: R,
    /// The threshold `(1 + ρ)/(1 + 2ρ)` the cubes are compared against.
    pub b_threshold: R,
    /// Whether every sampled cube clears the threshold.
    pub b_hypothesis_ok: bool,
    /// Smallest sampled interior derivative.
    pub min_interior_derivative: R,
    /// Location of the smallest sampled interior derivative.
    pub min_derivative_at: R,
    /// Whether the sampled derivative stays above `1 + ρ` everywhere.
    pub conclusion_ok: bool,
    /// `true` unless the hypotheses hold while the conclusion fails — a
    /// sampled violation of the principle itself.
    pub consistent: bool,
}

/// Sampled check of the minimum principle for `f` on `T`:
///
/// if `Dfⁿ > 1 + 2ρ` at both endpoints and `B(f, T*, J*)³ > (1+ρ)/(1+2ρ)`
/// for all nested `J* ⊂ T* ⊂ T`, then `Dfⁿ > 1 + ρ` on all of `T`.
///
/// Nested pairs are enumerated as endpoint quadruples on a uniform grid in
/// `T`, with the grid size chosen so roughly `samples²` quadruples are
/// visited.  `f` is usually an iterate.
pub fn minimum_principle_check<R: Real>(
    f: &Map<R>,
    t: &Interval<R>,
    rho: R,
    samples: usize,
) -> Result<MinimumPrincipleReport<R>> {
    if rho <= R::zero() {
        return Err(Error::Parameter(format!(
            "rho must be positive, got {}",
            rho.approx_f64()
        )));
    }
    if samples < 2 {
        return Err(Error::Parameter("samples must be at least 2".into()));
    }
    if !f.is_diffeo_on(t)? {
        return Err(Error::NotDiffeo {
            lo: t.lo().approx_f64(),
            hi: t.hi().approx_f64(),
        });
    }

    // Smallest grid whose quadruple count reaches samples².
    let budget = (samples as u64).saturating_mul(samples as u64);
    let mut m = 5usize;
    while quadruples(m) < budget && m < 2048 {
        m += 1;
    }

    let xs: Vec<R> = (0..m)
        .map(|k| t.lerp(R::of(k as f64) / R::of((m - 1) as f64)))
        .collect();
    let values: Vec<R> = xs
        .iter()
        .map(|&x| f.eval(x))
        .collect::<Result<_>>()?;

    let threshold = (R::one() + rho) / (R::one() + R::of(2.0) * rho);
    let mut min_b_cubed = R::infinity();
    for p in 0..m {
        for q in (p + 1)..m {
            for r in (q + 1)..m {
                for s in (r + 1)..m {
                    let d = cross_ratio_of_images(xs[p], xs[q], xs[r], xs[s])?;
                    let df =
                        cross_ratio_of_images(values[p], values[q], values[r], values[s])?;
                    let b = df / d;
                    let b3 = b * b * b;
                    if b3 < min_b_cubed {
                        min_b_cubed = b3;
                    }
                }
            }
        }
    }

    let d_lo = f.jet(t.lo())?.d1.abs();
    let d_hi = f.jet(t.hi())?.d1.abs();
    let endpoints_ok =
        d_lo > R::one() + R::of(2.0) * rho && d_hi > R::one() + R::of(2.0) * rho;

    // Interior derivative scan on a finer grid.
    let fine = (4 * m).max(257);
    let mut min_d = R::infinity();
    let mut min_at = t.lo();
    for k in 0..=fine {
        let x = t.lerp(R::of(k as f64) / R::of(fine as f64));
        let d = f.jet(x)?.d1.abs();
        if d < min_d {
            min_d = d;
            min_at = x;
        }
    }
    let conclusion_ok = min_d > R::one() + rho;

    Ok(MinimumPrincipleReport {
        endpoint_derivatives: (d_lo, d_hi),
        endpoints_ok,
        min_b_cubed,
        b_threshold: threshold,
        b_hypothesis_ok: min_b_cubed > threshold,
        min_interior_derivative: min_d,
        min_derivative_at: min_at,
        conclusion_ok,
        consistent: !(endpoints_ok && min_b_cubed > threshold) || conclusion_ok,
    })
}

/// Number of strictly increasing endpoint quadruples on an `m`-point grid.
fn quadruples(m: usize) -> u64 {
    if m < 4 {
        return 0;
    }
    let m = m as u64;
    m * (m - 1) * (m - 2) * (m - 3) / 24
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Domain;
    use crate::map::Expr;
    use approx::assert_relative_eq;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    fn on(lo: f64, hi: f64, expr: Expr<f64>) -> Map<f64> {
        Map::new(expr, Domain::interval(lo, hi).unwrap())
    }

    #[test]
    fn cross_ratio_of_centred_configuration() {
        // |T| = 4, |J| = 2, |L| = |R| = 1.
        let d = cross_ratio(&iv(0.0, 4.0), &iv(1.0, 3.0)).unwrap();
        assert_relative_eq!(d, 8.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_configurations_error() {
        let t = iv(0.0, 4.0);
        assert!(cross_ratio(&t, &iv(0.0, 2.0)).is_err()); // L degenerate
        assert!(cross_ratio(&t, &iv(2.0, 4.0)).is_err()); // R degenerate
        assert!(cross_ratio(&t, &t).is_err()); // J = T
        assert!(cross_ratio(&t, &iv(2.0, 2.0)).is_err()); // J a point
        assert!(cross_ratio(&iv(1.0, 2.0), &iv(0.0, 3.0)).is_err()); // J ⊃ T
    }

    #[test]
    fn affine_distortion_is_one() {
        let f = on(-10.0, 10.0, Expr::affine(-3.0, 2.0).unwrap());
        let b = distortion(&f, &iv(0.0, 4.0), &iv(1.0, 2.5)).unwrap();
        assert_relative_eq!(b, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn squaring_map_distortion_closed_form() {
        // f(x) = x², T = [1, 2], J = [1.25, 1.75]: B = 16/15.
        let f = on(0.5, 3.0, Expr::poly_f64(&[0.0, 0.0, 1.0]));
        let b = distortion(&f, &iv(1.0, 2.0), &iv(1.25, 1.75)).unwrap();
        assert_relative_eq!(b, 16.0 / 15.0, epsilon = 1e-13);
    }

    #[test]
    fn mobius_distortion_is_one() {
        let f = on(0.0, 1.0, Expr::mobius(2.0, 1.0, -0.5, 3.0).unwrap());
        for &(tlo, thi, jlo, jhi) in &[
            (0.0, 1.0, 0.25, 0.5),
            (0.1, 0.9, 0.2, 0.80001),
            (0.0, 0.5, 0.125, 0.4),
        ] {
            let b = distortion(&f, &iv(tlo, thi), &iv(jlo, jhi)).unwrap();
            assert_relative_eq!(b, 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn non_diffeo_is_rejected() {
        let f = Map::logistic(4.0_f64);
        let err = distortion(&f, &iv(0.0, 1.0), &iv(0.25, 0.75)).unwrap_err();
        assert!(matches!(err, Error::NotDiffeo { .. }));
    }

    #[test]
    fn composition_multiplies_distortion() {
        // B(f∘g, T, J) = B(f, g(T), g(J)) · B(g, T, J) for increasing g.
        let g = on(0.0, 1.0, Expr::poly_f64(&[0.0, 0.5, 0.0, 0.5]));
        let t = iv(0.1, 0.9);
        let j = iv(0.3, 0.6);
        let f_expr = Expr::poly_f64(&[0.0, 0.0, 1.0]); // x² on positive axis
        let gt = g.image_interval(&t).unwrap();
        let gj = g.image_interval(&j).unwrap();
        let f = on(0.0, 1.0, f_expr.clone());
        let comp = on(0.0, 1.0, Expr::compose(f_expr, Expr::poly_f64(&[0.0, 0.5, 0.0, 0.5])));
        let lhs = distortion(&comp, &t, &j).unwrap();
        let rhs = distortion(&f, &gt, &gj).unwrap() * distortion(&g, &t, &j).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn negative_schwarzian_map_expands_cross_ratios() {
        // x³ − 1.2x is a diffeomorphism on [0.7, 1.2] with negative
        // Schwarzian there; its distortion must exceed 1.
        let f = on(0.0, 2.0, Expr::cubic(-1.2));
        let b = distortion(&f, &iv(0.7, 1.2), &iv(0.8, 1.0)).unwrap();
        assert!(b > 1.0, "B = {b}");
    }

    #[test]
    fn minimum_principle_on_expanding_affine() {
        let f = on(-1.0, 1.0, Expr::affine(2.0, 0.0).unwrap());
        let t = iv(-0.5, 0.5);
        let rep = minimum_principle_check(&f, &t, 0.4, 16).unwrap();
        assert!(rep.endpoints_ok);
        assert!(rep.b_hypothesis_ok);
        // Affine: every B is exactly 1.
        assert_relative_eq!(rep.min_b_cubed, 1.0, epsilon = 1e-12);
        assert!(rep.conclusion_ok);
        assert!(rep.consistent);
        assert_relative_eq!(rep.b_threshold, 1.4 / 1.8, epsilon = 1e-15);
    }

    #[test]
    fn minimum_principle_vacuous_when_endpoints_contract() {
        // Logistic near its turning point: endpoint derivative below 1+2ρ,
        // so the principle asserts nothing and the report stays consistent.
        let f = Map::logistic(4.0_f64);
        let t = iv(0.35, 0.45);
        let rep = minimum_principle_check(&f, &t, 0.4, 12).unwrap();
        assert!(!rep.endpoints_ok);
        assert!(rep.consistent);
        assert!(!rep.conclusion_ok);
    }

    #[test]
    fn minimum_principle_rejects_bad_arguments() {
        let f = Map::logistic(4.0_f64);
        assert!(minimum_principle_check(&f, &iv(0.0, 0.4), 0.0, 8).is_err());
        assert!(minimum_principle_check(&f, &iv(0.0, 0.4), 0.3, 1).is_err());
        assert!(matches!(
            minimum_principle_check(&f, &iv(0.2, 0.8), 0.3, 8),
            Err(Error::NotDiffeo { .. })
        ));
    }

    #[test]
    fn quadruple_budget_matches_samples() {
        assert_eq!(quadruples(4), 1);
        assert_eq!(quadruples(5), 5);
        assert_eq!(quadruples(37), 66045);
        // 37 grid points give ≈ 256² quadruples.
        assert!(quadruples(36) < 256 * 256 && quadruples(37) >= 256 * 256);
    }
}
