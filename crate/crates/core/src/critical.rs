//! Critical intervals of polynomial maps and the distortion estimates that
//! control how little cross-ratio distortion survives near degenerate
//! critical points.
//!
//! For a polynomial `f`, every non-real root `a + ib` (b > 0) of `Df`
//! contributes a *critical interval* `E = [a−2b, a+2b]`.  Outside all
//! critical intervals the Schwarzian derivative is strictly negative;
//! inside, it is bounded above by `2·d_E/b²` where `d_E` is the number of
//! critical intervals and `b` belongs to a minimal-length interval
//! containing the point.  Two verified consequences:
//!
//! * **part 1**: for families `{(T_i, J_i)}` with intersection multiplicity
//!   `≤ N`, each `T_i` meeting every `E_j` in less than `κ|E_j|`,
//!   `∏ B(f, T_i, J_i) > exp(−16·κ·N·d_E²)`;
//! * **part 2**: for a single pair `T = (1+2δ)J` close to a critical point
//!   or to a critical interval (quantified through a zoom factor `λ > 1`),
//!   `B(f, T, J) > 1 + (1/12)·(16/(17(1+λ)²) − 32κ²d_E/λ²)/(1+2δ)²`.

use crate::chains::Chain;
use crate::crossratio::distortion;
use crate::error::{Error, Result};
use crate::interval::{intersection_multiplicity, Interval};
use crate::map::Map;
use crate::num::Real;
use crate::schwarzian::schwarzian_sup;

/// One critical interval, recording the non-real root of `Df` it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalInterval<R> {
    a: R,
    b: R,
    e: Interval<R>,
}

impl<R: Real> CriticalInterval<R> {
    fn new(a: R, b: R) -> Result<Self> {
        if b <= R::zero() {
            return Err(Error::Parameter(format!(
                "imaginary part must be positive, got {}",
                b.approx_f64()
            )));
        }
        Ok(Self {
            a,
            b,
            e: Interval::new(a - R::of(2.0) * b, a + R::of(2.0) * b)?,
        })
    }

    /// Real part of the generating root of `Df`.
    pub fn a(&self) -> R {
        self.a
    }

    /// Imaginary part of the generating root (positive).
    pub fn b(&self) -> R {
        self.b
    }

    /// The interval `E = [a−2b, a+2b]`; its length is `4b`.
    pub fn interval(&self) -> &Interval<R> {
        &self.e
    }

    /// The doubled interval `2E = [a−4b, a+4b]`.
    pub fn doubled(&self) -> Interval<R> {
        self.e.scaled(R::of(2.0)).expect("factor is positive")
    }
}

/// All critical intervals of a polynomial, sorted by length ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalIntervalSet<R> {
    intervals: Vec<CriticalInterval<R>>,
}

impl<R: Real> CriticalIntervalSet<R> {
    /// The intervals, shortest first.
    pub fn intervals(&self) -> &[CriticalInterval<R>] {
        &self.intervals
    }

    /// Number of critical intervals `d_E` (non-real root pairs of `Df`,
    /// counted with multiplicity); always at most `(deg f − 1)/2`.
    pub fn d_e(&self) -> usize {
        self.intervals.len()
    }

    /// The shortest critical interval containing `x`, if any.
    pub fn minimal_containing(&self, x: R) -> Option<&CriticalInterval<R>> {
        self.intervals.iter().find(|ci| ci.e.contains(x))
    }

    /// Admissibility ceiling `1/(4√d_E)` for the part-1 overlap parameter κ;
    /// infinite when there are no critical intervals.
    pub fn kappa_limit_part1(&self) -> R {
        if self.intervals.is_empty() {
            R::infinity()
        } else {
            R::one() / (R::of(4.0) * R::of(self.d_e() as f64).sqrt())
        }
    }

    /// Admissibility ceiling `1/(13√d_E)` for the part-2 overlap parameter κ;
    /// infinite when there are no critical intervals.
    pub fn kappa_limit_part2(&self) -> R {
        if self.intervals.is_empty() {
            R::infinity()
        } else {
            R::one() / (R::of(13.0) * R::of(self.d_e() as f64).sqrt())
        }
    }
}

/// Critical intervals of a polynomial map: one per non-real conjugate root
/// pair of `Df`, counted with multiplicity, real roots excluded.
///
/// Roots whose imaginary part is within the solver's relative snap band of
/// the real axis are treated as real and excluded; near-degenerate
/// perturbations sit exactly at that boundary, which is why the band is a
/// documented constant of the root solver.
pub fn compute_critical_intervals<R: Real>(f: &Map<R>) -> Result<CriticalIntervalSet<R>> {
    let poly = f.as_polynomial().ok_or_else(|| {
        Error::Precondition("critical intervals require a polynomial map".into())
    })?;
    let degree = poly.degree();
    if degree < 2 {
        return Err(Error::Precondition(format!(
            "critical intervals require degree ≥ 2, got {degree}"
        )));
    }
    let mut intervals = Vec::new();
    for root in poly.derivative().complex_roots()? {
        if root.z.im > R::zero() {
            for _ in 0..root.multiplicity {
                intervals.push(CriticalInterval::new(root.z.re, root.z.im)?);
            }
        }
    }
    intervals.sort_by(|p, q| p.b.partial_cmp(&q.b).expect("finite roots"));
    debug_assert!(2 * intervals.len() <= degree - 1);
    Ok(CriticalIntervalSet { intervals })
}

/// Pointwise upper bound for the Schwarzian: `0` when `x` lies in no
/// critical interval (the Schwarzian is then strictly negative), otherwise
/// `2·d_E/b²` for a minimal-length critical interval containing `x`.
///
/// `x` must be a regular (non-critical) point for the bound to mean
/// anything; the value itself needs no map evaluation.
pub fn schwarzian_upper_bound<R: Real>(x: R, set: &CriticalIntervalSet<R>) -> R {
    match set.minimal_containing(x) {
        None => R::zero(),
        Some(ci) => R::of(2.0) * R::of(set.d_e() as f64) / (ci.b * ci.b),
    }
}

/// The part-1 lower bound `exp(−16·κ·N·d_E²)` for the distortion product.
pub fn excep_part1_bound<R: Real>(d_e: usize, kappa: R, n: usize) -> R {
    (-R::of(16.0) * kappa * R::of(n as f64) * R::of((d_e * d_e) as f64)).exp()
}

/// The part-2 lower bound
/// `1 + (1/12)·(16/(17(1+λ)²) − 32κ²d_E/λ²)/(1+2δ)²`.
pub fn excep_part2_bound<R: Real>(d_e: usize, lambda: R, kappa: R, delta: R) -> R {
    let opl = R::one() + lambda;
    let opd = R::one() + R::of(2.0) * delta;
    let positive = R::of(16.0) / (R::of(17.0) * opl * opl);
    let negative = R::of(32.0) * kappa * kappa * R::of(d_e as f64) / (lambda * lambda);
    R::one() + (positive - negative) / (R::of(12.0) * opd * opd)
}

/// Outcome of the part-1 verification.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcepPart1Report<R> {
    /// Measured `∏ B(f, T_i, J_i)`.
    pub product_b: R,
    /// The bound `exp(−16·κ·N·d_E²)`.
    pub bound: R,
    /// `product_b − bound`.
    pub margin: R,
    /// Computed intersection multiplicity of the `T_i`.
    pub multiplicity: usize,
    /// Number of critical intervals of the map.
    pub d_e: usize,
    /// Whether every hypothesis held.
    pub hypotheses_ok: bool,
    /// Itemized hypothesis failures.
    pub violations: Vec<String>,
}

/// Verifies the part-1 product bound for a family of nested pairs
/// `(T_i, J_i)`: measures `∏ B(f, T_i, J_i)` and compares it against
/// `exp(−16·κ·N·d_E²)`.
///
/// Hypothesis failures — κ out of range, a non-diffeomorphic restriction,
/// an oversized overlap `|T_i ∩ E_j| ≥ κ|E_j|`, or an intersection
/// multiplicity above `N` — are reported in `violations`, not thrown;
/// geometric errors (degenerate pairs, evaluation failures) are thrown.
pub fn verify_excep_part1<R: Real>(
    f: &Map<R>,
    configs: &[(Interval<R>, Interval<R>)],
    kappa: R,
    n: usize,
) -> Result<ExcepPart1Report<R>> {
    let set = compute_critical_intervals(f)?;
    let mut violations = Vec::new();

    let limit = set.kappa_limit_part1();
    if kappa <= R::zero() || kappa >= limit {
        violations.push(format!(
            "κ = {} outside (0, {})",
            kappa.approx_f64(),
            limit.approx_f64()
        ));
    }
    for (i, (t, _)) in configs.iter().enumerate() {
        if !f.is_diffeo_on(t)? {
            violations.push(format!("map is not a diffeomorphism on T[{i}]"));
        }
        for (j, ci) in set.intervals().iter().enumerate() {
            let overlap = t.intersection_length(ci.interval());
            if overlap >= kappa * ci.interval().length() {
                violations.push(format!(
                    "|T[{i}] ∩ E[{j}]| = {} is not below κ|E[{j}]| = {}",
                    overlap.approx_f64(),
                    (kappa * ci.interval().length()).approx_f64()
                ));
            }
        }
    }
    let ts: Vec<Interval<R>> = configs.iter().map(|(t, _)| *t).collect();
    let multiplicity = intersection_multiplicity(&ts);
    if multiplicity > n {
        violations.push(format!(
            "intersection multiplicity {multiplicity} exceeds N = {n}"
        ));
    }

    let mut product_b = R::one();
    for (t, j) in configs {
        product_b *= distortion(f, t, j)?;
    }
    let bound = excep_part1_bound(set.d_e(), kappa, n);
    Ok(ExcepPart1Report {
        product_b,
        bound,
        margin: product_b - bound,
        multiplicity,
        d_e: set.d_e(),
        hypotheses_ok: violations.is_empty(),
        violations,
    })
}

/// Which hypothesis case of the part-2 bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part2Case {
    /// A critical point of the map lies in `λT`.
    CriticalPointInside,
    /// Some `E_j` meets `λT` while `T` is not swallowed by `2E_j`.
    MeetsCriticalInterval,
    /// Neither case holds; the bound is not asserted.
    NotApplicable,
}

/// Outcome of the part-2 verification.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcepPart2Report<R> {
    /// Measured `B(f, T, J)`.
    pub b: R,
    /// The explicit part-2 lower bound.
    pub bound: R,
    /// `b − bound`.
    pub margin: R,
    /// Which hypothesis case triggered.
    pub case: Part2Case,
    /// Number of critical intervals of the map.
    pub d_e: usize,
    /// Whether the overlap hypotheses held and a case applies.
    pub hypotheses_ok: bool,
    /// Itemized hypothesis failures.
    pub violations: Vec<String>,
}

/// Verifies the part-2 single-pair bound near a critical point or critical
/// interval.
///
/// Requires `λ > 1`, `κ ∈ (0, 1/(13√d_E))` (hard preconditions), and
/// `T = (1+2δ)J` up to a tiny relative slack.  Overlap failures
/// `|T ∩ E_j| ≥ κ|E_j|/λ` are reported; if neither hypothesis case applies
/// the report carries [`Part2Case::NotApplicable`] and `hypotheses_ok` is
/// false.
pub fn verify_excep_part2<R: Real>(
    f: &Map<R>,
    t: &Interval<R>,
    j: &Interval<R>,
    lambda: R,
    kappa: R,
    delta: R,
) -> Result<ExcepPart2Report<R>> {
    if lambda <= R::one() {
        return Err(Error::Parameter(format!(
            "the zoom factor λ must exceed 1, got {}",
            lambda.approx_f64()
        )));
    }
    if delta <= R::zero() {
        return Err(Error::Parameter(format!(
            "delta must be positive, got {}",
            delta.approx_f64()
        )));
    }
    let set = compute_critical_intervals(f)?;
    let limit = set.kappa_limit_part2();
    if kappa <= R::zero() || kappa >= limit {
        return Err(Error::Precondition(format!(
            "κ = {} outside (0, {})",
            kappa.approx_f64(),
            limit.approx_f64()
        )));
    }
    let expected = j.scaled_neighborhood(delta)?;
    let slack = R::of(1e-9) * (R::one() + t.length());
    if (t.lo() - expected.lo()).abs() > slack || (t.hi() - expected.hi()).abs() > slack {
        return Err(Error::Precondition(format!(
            "T = [{}, {}] is not the (1+2δ)-neighborhood [{}, {}] of J",
            t.lo().approx_f64(),
            t.hi().approx_f64(),
            expected.lo().approx_f64(),
            expected.hi().approx_f64()
        )));
    }

    let mut violations = Vec::new();
    for (jdx, ci) in set.intervals().iter().enumerate() {
        let overlap = t.intersection_length(ci.interval());
        if overlap >= kappa * ci.interval().length() / lambda {
            violations.push(format!(
                "|T ∩ E[{jdx}]| = {} is not below κ|E[{jdx}]|/λ = {}",
                overlap.approx_f64(),
                (kappa * ci.interval().length() / lambda).approx_f64()
            ));
        }
    }

    let zoomed = t.scaled(lambda)?;
    let case = if !f.critical_points(&zoomed)?.is_empty() {
        Part2Case::CriticalPointInside
    } else if set.intervals().iter().any(|ci| {
        !ci.doubled().contains_interval(t)
            && zoomed.intersection_length(ci.interval()) > R::zero()
    }) {
        Part2Case::MeetsCriticalInterval
    } else {
        Part2Case::NotApplicable
    };

    let b = distortion(f, t, j)?;
    let bound = excep_part2_bound(set.d_e(), lambda, kappa, delta);
    Ok(ExcepPart2Report {
        b,
        bound,
        margin: b - bound,
        case,
        d_e: set.d_e(),
        hypotheses_ok: violations.is_empty() && case != Part2Case::NotApplicable,
        violations,
    })
}

/// One step of the composed-map distortion ledger.
#[derive(Debug, Clone)]
pub struct ComposedAccountingStep<R> {
    /// Step index `k`.
    pub k: usize,
    /// Forward image `gᵏ(T)` of the chain head.
    pub t: Interval<R>,
    /// Forward image `gᵏ(J)` of the inner interval.
    pub j: Interval<R>,
    /// Measured `log B(g, gᵏ(T), gᵏ(J))`.
    pub log_b: R,
    /// Whether `gᵏ(T)` meets a critical interval.
    pub inside_critical: bool,
    /// For outside steps: the cosine-rule floor `log cos²(√(C/2)·|gᵏ(T)|)`
    /// with `C` just above the measured Schwarzian supremum, when the
    /// angle-cap hypothesis holds.
    pub lower_bound: Option<R>,
    /// κ-smallness failures at this step.
    pub violations: Vec<String>,
}

/// Outcome of [`composed_distortion_accounting`].
#[derive(Debug, Clone)]
pub struct ComposedAccountingReport<R> {
    /// Ledger total `Σₖ log B(g, gᵏ(T), gᵏ(J))`.
    pub log_b_total: R,
    /// Directly measured `log B(gᵐ, T, J)`; equals the ledger total up to
    /// rounding by multiplicativity of the cross-ratio distortion.
    pub log_b_direct: R,
    /// Sum of the ledger over steps outside every critical interval.
    pub outside_sum: R,
    /// Sum of the ledger over steps meeting a critical interval.
    pub inside_sum: R,
    /// Closed-form floor `−C·Σ_outside |gᵏ(T)|² − 16·κ·N·d_E²`, with `C`
    /// half the largest positive Schwarzian supremum seen outside (the
    /// quadratic cosine coefficient) and `N` the chain multiplicity.
    /// Meaningful in the κ-small regime.
    pub negative_contribution_bound: R,
    /// Intersection multiplicity `N` of the chain.
    pub multiplicity: usize,
    /// Number of critical intervals of the map.
    pub d_e: usize,
    /// Whether every per-step κ-smallness condition held.
    pub hypotheses_ok: bool,
    /// The per-step ledger.
    pub steps: Vec<ComposedAccountingStep<R>>,
}

/// Splits the cross-ratio distortion of `gᵐ` on a chain head into its
/// per-step ledger and compares it against the one-shot measurement.
///
/// `chain` supplies the head `T`, the step count `m` and the multiplicity
/// `N`; `j ⊂ T` is the inner interval.  The `m`-th iterate must be a
/// diffeomorphism on `T` (`NotDiffeo` otherwise) and `g` must be polynomial
/// so its critical intervals can be computed (maps of degree < 2 have none).
/// Steps are classified by whether `gᵏ(T)` meets a critical interval;
/// outside steps additionally record a cosine-rule floor from the measured
/// Schwarzian supremum.  κ-smallness failures (`|gᵏ(T)| ≥ κ` or
/// `|gᵏ(T) ∩ E_j| ≥ κ|E_j|`) are itemized per step, never thrown.
pub fn composed_distortion_accounting<R: Real>(
    g: &Map<R>,
    chain: &Chain<R>,
    j: &Interval<R>,
    kappa: R,
) -> Result<ComposedAccountingReport<R>> {
    if kappa <= R::zero() {
        return Err(Error::Parameter(format!(
            "κ must be positive, got {}",
            kappa.approx_f64()
        )));
    }
    let m = chain.len() - 1;
    let t0 = *chain.head();
    let gm = g.iterate(m as u32);
    if m > 0 && !gm.is_diffeo_on(&t0)? {
        return Err(Error::NotDiffeo {
            lo: t0.lo().approx_f64(),
            hi: t0.hi().approx_f64(),
        });
    }
    let poly = g.as_polynomial().ok_or_else(|| {
        Error::Precondition("the accounting requires a polynomial map".into())
    })?;
    let set = if poly.degree() < 2 {
        CriticalIntervalSet {
            intervals: Vec::new(),
        }
    } else {
        compute_critical_intervals(g)?
    };
    let multiplicity = chain.multiplicity();
    let d_e = set.d_e();

    let mut steps = Vec::with_capacity(m);
    let mut log_b_total = R::zero();
    let mut outside_sum = R::zero();
    let mut inside_sum = R::zero();
    let mut outside_sumsq = R::zero();
    let mut c_quad = R::zero();
    let mut hypotheses_ok = true;
    for k in 0..m {
        let gk = g.iterate(k as u32);
        let t = gk.image_interval(&t0)?;
        let jk = gk.image_interval(j)?;
        let log_b = distortion(g, &t, &jk)?.ln();
        log_b_total += log_b;
        let inside_critical = set
            .intervals()
            .iter()
            .any(|ci| t.intersect(ci.interval()).is_some());
        let mut violations = Vec::new();
        if t.length() >= kappa {
            violations.push(format!(
                "|g^{k}(T)| = {} is not below κ = {}",
                t.length().approx_f64(),
                kappa.approx_f64()
            ));
        }
        for (jdx, ci) in set.intervals().iter().enumerate() {
            let overlap = t.intersection_length(ci.interval());
            if overlap >= kappa * ci.interval().length() {
                violations.push(format!(
                    "|g^{k}(T) ∩ E[{jdx}]| = {} is not below κ|E[{jdx}]| = {}",
                    overlap.approx_f64(),
                    (kappa * ci.interval().length()).approx_f64()
                ));
            }
        }
        let lower_bound = if inside_critical {
            inside_sum += log_b;
            None
        } else {
            outside_sum += log_b;
            outside_sumsq += t.length() * t.length();
            let sup = schwarzian_sup(g, &t)?;
            let c = sup.max(R::zero()) * (R::one() + R::of(1e-12));
            c_quad = c_quad.max(c / R::of(2.0));
            let angle_sq = c / R::of(2.0) * t.length() * t.length();
            if angle_sq < R::FRAC_PI_2() * R::FRAC_PI_2() {
                Some(crate::schwarzian::cos_lower_bound(c, t.length()).ln())
            } else {
                None
            }
        };
        hypotheses_ok &= violations.is_empty();
        steps.push(ComposedAccountingStep {
            k,
            t,
            j: jk,
            log_b,
            inside_critical,
            lower_bound,
            violations,
        });
    }
    let log_b_direct = distortion(&gm, &t0, j)?.ln();
    let negative_contribution_bound = -c_quad * outside_sumsq
        - R::of(16.0) * kappa * R::of(multiplicity as f64) * R::of((d_e * d_e) as f64);
    Ok(ComposedAccountingReport {
        log_b_total,
        log_b_direct,
        outside_sum,
        inside_sum,
        negative_contribution_bound,
        multiplicity,
        d_e,
        hypotheses_ok,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Domain;
    use crate::map::Expr;
    use crate::schwarzian::schwarzian_at;
    use approx::assert_relative_eq;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    fn poly_map(coeffs: &[f64], lo: f64, hi: f64) -> Map<f64> {
        Map::new(Expr::poly_f64(coeffs), Domain::interval(lo, hi).unwrap())
    }

    #[test]
    fn cubic_with_positive_linear_term() {
        // Df = 3x²+1 has roots ±i/√3: one interval around the origin.
        let f = poly_map(&[0.0, 1.0, 0.0, 1.0], -3.0, 3.0);
        let set = compute_critical_intervals(&f).unwrap();
        assert_eq!(set.d_e(), 1);
        let ci = &set.intervals()[0];
        assert!(ci.a().abs() < 1e-12);
        assert_relative_eq!(ci.b(), 1.0 / 3.0f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(ci.interval().lo(), -1.1547005383792515, max_relative = 1e-12);
        assert_relative_eq!(ci.interval().hi(), 1.1547005383792515, max_relative = 1e-12);
        assert_relative_eq!(ci.interval().length(), 4.0 * ci.b(), max_relative = 1e-12);
        assert_relative_eq!(ci.doubled().hi(), 2.3094010767585030, max_relative = 1e-12);
    }

    #[test]
    fn cubic_with_real_critical_points_has_none() {
        // Df = 3x²−1 has real roots ±1/√3.
        let f = poly_map(&[0.0, -1.0, 0.0, 1.0], -3.0, 3.0);
        let set = compute_critical_intervals(&f).unwrap();
        assert_eq!(set.d_e(), 0);
        assert_eq!(set.kappa_limit_part1(), f64::INFINITY);
    }

    #[test]
    fn quartic_excludes_real_root() {
        // Df = 4x³+2x = 2x(2x²+1): real root 0 excluded, pair ±i/√2 kept.
        let f = poly_map(&[0.0, 0.0, 1.0, 0.0, 1.0], -3.0, 3.0);
        let set = compute_critical_intervals(&f).unwrap();
        assert_eq!(set.d_e(), 1);
        let ci = &set.intervals()[0];
        assert!(ci.a().abs() < 1e-12);
        assert_relative_eq!(ci.b(), std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(ci.interval().hi(), 2.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn quintic_count_saturates_degree_bound() {
        // Df = 5x⁴+1: four non-real roots, two conjugate pairs: d_E = 2 =
        // (5−1)/2 exactly.
        let f = poly_map(&[0.0, 1.0, 0.0, 0.0, 0.0, 1.0], -2.0, 2.0);
        let set = compute_critical_intervals(&f).unwrap();
        assert_eq!(set.d_e(), 2);
        let r = 0.2f64.powf(0.25) / 2.0f64.sqrt();
        for ci in set.intervals() {
            assert_relative_eq!(ci.a().abs(), r, max_relative = 1e-10);
            assert_relative_eq!(ci.b(), r, max_relative = 1e-10);
        }
    }

    #[test]
    fn negative_schwarzian_quintic_has_no_intervals() {
        // All four roots of Df are real for this bimodal-family quintic.
        let f = poly_map(&[0.0, 2.0, 0.0, -1.9531, 0.0, 0.6104], -2.0, 2.0);
        let set = compute_critical_intervals(&f).unwrap();
        assert_eq!(set.d_e(), 0);
        for k in 0..40 {
            let x = -1.2 + 2.4 * k as f64 / 40.0;
            if f.d1(x).unwrap().abs() > 1e-3 {
                assert!(schwarzian_at(&f, x).unwrap() < 0.0, "x = {x}");
            }
        }
    }

    #[test]
    fn rejects_non_polynomial_and_low_degree() {
        let m = Map::new(
            Expr::mobius(1.0, 0.0, 1.0, 3.0).unwrap(),
            Domain::interval(-1.0, 1.0).unwrap(),
        );
        assert!(compute_critical_intervals(&m).is_err());
        let lin = poly_map(&[0.5, 2.0], -1.0, 1.0);
        assert!(compute_critical_intervals(&lin).is_err());
    }

    #[test]
    fn upper_bound_equality_at_degenerate_point() {
        // For x³+λx at 0: bound = 2·1/b² with b² = λ/3, i.e. 6/λ, and the
        // Schwarzian equals it exactly.
        for &lambda in &[0.7, 0.1, 2.0] {
            let f = poly_map(&[0.0, lambda, 0.0, 1.0], -3.0, 3.0);
            let set = compute_critical_intervals(&f).unwrap();
            let bound = schwarzian_upper_bound(0.0, &set);
            assert_relative_eq!(bound, 6.0 / lambda, max_relative = 1e-10);
            assert_relative_eq!(
                schwarzian_at(&f, 0.0).unwrap(),
                bound,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn upper_bound_vanishes_outside_and_schwarzian_is_negative() {
        let f = poly_map(&[0.0, 1.0, 0.0, 1.0], -3.0, 3.0);
        let set = compute_critical_intervals(&f).unwrap();
        assert_eq!(schwarzian_upper_bound(2.0, &set), 0.0);
        assert!(schwarzian_at(&f, 2.0).unwrap() < 0.0);
    }

    #[test]
    fn pointwise_domination_on_sample_grid() {
        let f = poly_map(&[0.0, 0.3, 0.0, 1.0], -4.0, 4.0);
        let set = compute_critical_intervals(&f).unwrap();
        for k in 0..=400 {
            let x = -3.0 + 6.0 * k as f64 / 400.0;
            let s = schwarzian_at(&f, x).unwrap();
            let bound = schwarzian_upper_bound(x, &set);
            assert!(s <= bound + 1e-9, "x = {x}: S = {s}, bound = {bound}");
            if set.minimal_containing(x).is_none() {
                assert!(s < 0.0, "x = {x} outside all E_j but S = {s}");
            }
        }
    }

    #[test]
    fn part1_bound_arithmetic() {
        assert_relative_eq!(
            excep_part1_bound(1, 0.05, 1),
            (-0.8f64).exp(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            excep_part1_bound(1, 0.05, 1),
            0.4493289641172216,
            epsilon = 1e-15
        );
        // d_E = 0 makes the bound trivial.
        assert_eq!(excep_part1_bound(0, 0.3, 5), 1.0);
    }

    #[test]
    fn part1_admissible_family() {
        // E ≈ [−0.1155, 0.1155]; both pairs live far outside it.
        let f = poly_map(&[0.0, 0.01, 0.0, 1.0], -3.0, 3.0);
        let configs = vec![
            (iv(0.3, 0.5), iv(0.35, 0.45)),
            (iv(-0.5, -0.3), iv(-0.45, -0.35)),
        ];
        let rep = verify_excep_part1(&f, &configs, 0.05, 1).unwrap();
        assert!(rep.hypotheses_ok, "violations: {:?}", rep.violations);
        assert_eq!(rep.multiplicity, 1);
        assert_eq!(rep.d_e, 1);
        assert!(rep.product_b > 1.0);
        assert!(rep.margin >= -1e-9);
    }

    #[test]
    fn part1_reports_violations() {
        let f = poly_map(&[0.0, 0.01, 0.0, 1.0], -3.0, 3.0);
        // T overlapping the critical interval by far more than κ|E|, and a
        // duplicated T pushing the multiplicity above N = 1.
        let configs = vec![
            (iv(-0.05, 0.3), iv(0.0, 0.25)),
            (iv(-0.05, 0.3), iv(0.0, 0.25)),
        ];
        let rep = verify_excep_part1(&f, &configs, 0.05, 1).unwrap();
        assert!(!rep.hypotheses_ok);
        assert_eq!(rep.multiplicity, 2);
        assert!(rep.violations.iter().any(|v| v.contains("multiplicity")));
        assert!(rep.violations.iter().any(|v| v.contains("κ|E")));
        // κ itself out of range is also reported, not thrown.
        let rep = verify_excep_part1(&f, &configs[..1], 0.5, 1).unwrap();
        assert!(rep.violations.iter().any(|v| v.contains("outside")));
    }

    #[test]
    fn part2_bound_arithmetic() {
        let bound = excep_part2_bound(1, 2.0, 0.01, 1.0);
        assert_relative_eq!(bound, 1.0009608811425805, epsilon = 1e-12);
        let by_hand = 1.0 + (16.0 / 153.0 - 32.0 * 0.0001 / 4.0) / (12.0 * 9.0);
        assert_relative_eq!(bound, by_hand, epsilon = 1e-15);
    }

    #[test]
    fn part2_interval_case() {
        // T = [1.5, 2.5] sticks out of 2E ≈ [−2.31, 2.31] while λT = [1, 3]
        // still meets E ≈ [−1.15, 1.15].
        let f = poly_map(&[0.0, 1.0, 0.0, 1.0], -4.0, 4.0);
        let t = iv(1.5, 2.5);
        let j = iv(1.5 + 1.0 / 3.0, 2.5 - 1.0 / 3.0);
        let rep = verify_excep_part2(&f, &t, &j, 2.0, 0.01, 1.0).unwrap();
        assert_eq!(rep.case, Part2Case::MeetsCriticalInterval);
        assert!(rep.hypotheses_ok, "violations: {:?}", rep.violations);
        assert!(rep.margin >= -1e-9, "B = {}, bound = {}", rep.b, rep.bound);
    }

    #[test]
    fn part2_critical_point_case() {
        // x³−x/2 has real critical points ±1/√6 ≈ ±0.408; λT = [0.4, 0.8]
        // captures one while f stays a diffeomorphism on T = [0.5, 0.7].
        let f = poly_map(&[0.0, -0.5, 0.0, 1.0], -3.0, 3.0);
        let t = iv(0.5, 0.7);
        let j = iv(0.5 + 0.2 / 3.0, 0.7 - 0.2 / 3.0);
        let rep = verify_excep_part2(&f, &t, &j, 2.0, 0.01, 1.0).unwrap();
        assert_eq!(rep.case, Part2Case::CriticalPointInside);
        assert_eq!(rep.d_e, 0);
        assert!(rep.hypotheses_ok);
        assert!(rep.margin >= -1e-9, "B = {}, bound = {}", rep.b, rep.bound);
    }

    #[test]
    fn part2_not_applicable_and_preconditions() {
        let f = poly_map(&[0.0, 1.0, 0.0, 1.0], -8.0, 8.0);
        let t = iv(5.0, 6.0);
        let j = iv(5.0 + 1.0 / 3.0, 6.0 - 1.0 / 3.0);
        let rep = verify_excep_part2(&f, &t, &j, 2.0, 0.01, 1.0).unwrap();
        assert_eq!(rep.case, Part2Case::NotApplicable);
        assert!(!rep.hypotheses_ok);
        // κ at or above 1/(13√1) is a hard precondition error.
        assert!(verify_excep_part2(&f, &t, &j, 2.0, 0.08, 1.0).is_err());
        // λ must exceed 1; T must really be the (1+2δ)-neighborhood of J.
        assert!(verify_excep_part2(&f, &t, &j, 1.0, 0.01, 1.0).is_err());
        assert!(verify_excep_part2(&f, &t, &j, 2.0, 0.01, 0.7).is_err());
    }

    #[test]
    fn accounting_trivial_affine_step() {
        // Affine maps do not distort cross-ratios: the ledger is zero.
        let g = Map::new(
            Expr::affine(0.5, 0.25).unwrap(),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let chain =
            crate::chains::pull_back_chain(&g, &iv(0.4, 0.6), &[0.5, 0.5]).unwrap();
        // The head is [0.3, 0.7]; take an off-center inner interval.
        let rep =
            composed_distortion_accounting(&g, &chain, &iv(0.4, 0.55), 1.0).unwrap();
        assert!(rep.log_b_total.abs() < 1e-12);
        assert!(rep.log_b_direct.abs() < 1e-12);
        assert_eq!(rep.d_e, 0);
        assert!(rep.hypotheses_ok);
        assert_eq!(rep.steps.len(), 1);
        assert!(!rep.steps[0].inside_critical);
    }

    #[test]
    fn accounting_ledger_matches_direct_distortion() {
        // Ten monotone pullback steps of a tiny interval along the orbit of
        // 0.1 under the full logistic map.
        let g = Map::logistic(4.0);
        let mut anchor = vec![0.1];
        for k in 0..10 {
            anchor.push(g.eval(anchor[k]).unwrap());
        }
        let tail = iv(anchor[10] - 0.005, anchor[10] + 0.005);
        let chain = crate::chains::pull_back_chain(&g, &tail, &anchor).unwrap();
        assert_eq!(chain.order(), 0);
        let t0 = *chain.head();
        let j = t0.scaled(0.5).unwrap();
        let kappa = 0.02;
        let rep = composed_distortion_accounting(&g, &chain, &j, kappa).unwrap();
        assert_eq!(rep.steps.len(), 10);
        // Multiplicativity: the ledger total reproduces the one-shot log B.
        assert!(
            (rep.log_b_total - rep.log_b_direct).abs() < 1e-9,
            "ledger {} vs direct {}",
            rep.log_b_total,
            rep.log_b_direct
        );
        assert!(rep.hypotheses_ok);
        // The quadratic has no critical intervals: every step is outside and
        // has negative Schwarzian, so each floor is 0 and the ledger is
        // positive while the closed-form floor vanishes.
        assert_eq!(rep.d_e, 0);
        assert_eq!(rep.inside_sum, 0.0);
        assert_eq!(rep.negative_contribution_bound, 0.0);
        assert!(rep.log_b_total > 0.0);
        assert!(rep.log_b_total >= rep.negative_contribution_bound);
        for s in &rep.steps {
            assert!(!s.inside_critical);
            assert_eq!(s.lower_bound, Some(0.0));
            assert!(s.log_b >= s.lower_bound.unwrap() - 1e-12);
            assert!(s.violations.is_empty());
        }
    }

    #[test]
    fn accounting_itemizes_kappa_failures() {
        let g = Map::logistic(4.0);
        let anchor = [0.1, g.eval(0.1).unwrap()];
        let chain = crate::chains::pull_back_chain(&g, &iv(0.0, 0.5), &anchor).unwrap();
        // The head has length ≈ 0.1464 ≥ κ = 0.1: step 0 must be flagged.
        let rep = composed_distortion_accounting(
            &g,
            &chain,
            &iv(0.02, 0.10),
            0.1,
        )
        .unwrap();
        assert!(!rep.hypotheses_ok);
        assert_eq!(rep.steps[0].violations.len(), 1);
        assert!(rep.steps[0].violations[0].contains("κ"));
        // A cubic with a genuine critical interval classifies steps as inside.
        let c = Map::cubic(0.01, -1.5, 1.5).unwrap();
        let tail = iv(-0.004, 0.004);
        let cchain = crate::chains::pull_back_chain(&c, &tail, &[0.0, 0.0]).unwrap();
        let crep = composed_distortion_accounting(
            &c,
            &cchain,
            &cchain.head().scaled(0.5).unwrap(),
            0.5,
        )
        .unwrap();
        assert_eq!(crep.d_e, 1);
        assert!(crep.steps[0].inside_critical);
        assert!(crep.steps[0].lower_bound.is_none());
        assert!((crep.log_b_total - crep.log_b_direct).abs() < 1e-9);
    }
}
