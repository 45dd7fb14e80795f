//! Dense real polynomials with a simultaneous complex root solver.
//!
//! Roots are found with the Aberth–Ehrlich iteration, which converges on all
//! roots at once, then Newton-polished.  Multiple roots come out of the
//! iteration as tight clusters of simple approximations; the solver merges
//! such clusters into a single root carrying a multiplicity, which also
//! restores the real axis for even-order real roots (a cluster of two
//! conjugate approximations has a real centroid).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::num::Real;

/// Maximum Aberth–Ehrlich sweeps before giving up.
const MAX_ABERTH_ITERS: usize = 400;

/// Relative cluster radius used to merge root approximations into one
/// multiple root.
const CLUSTER_RADIUS: f64 = 1e-5;

/// Relative half-width of the band around the real axis inside which a merged
/// root is declared real.
const REAL_BAND: f64 = 1e-10;

/// A root of a polynomial together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyRoot<R> {
    /// Root location.
    pub z: Complex<R>,
    /// Algebraic multiplicity (cluster size).
    pub multiplicity: usize,
}

/// Dense polynomial `a_0 + a_1 x + … + a_n x^n` in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<R> {
    coeffs: Vec<R>,
}

impl<R: Real> Polynomial<R> {
    /// Builds a polynomial from ascending coefficients.  Exactly-zero leading
    /// coefficients are trimmed; the zero polynomial is kept as `[0]`.
    pub fn new(coeffs: Vec<R>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&R::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(R::zero());
        }
        Self { coeffs }
    }

    /// Convenience constructor from `f64` literals.
    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| R::of(c)).collect())
    }

    /// The constant polynomial.
    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// `a·x + b`.
    pub fn linear(a: R, b: R) -> Self {
        Self::new(vec![b, a])
    }

    /// Ascending coefficients (leading zeros trimmed).
    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Whether all coefficients are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == R::zero())
    }

    /// Largest coefficient magnitude; a natural scale for tolerances.
    pub fn coeff_scale(&self) -> R {
        self.coeffs
            .iter()
            .fold(R::zero(), |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: R) -> R {
        let mut acc = R::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation over the complex numbers.
    pub fn eval_complex(&self, z: Complex<R>) -> Complex<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + Complex::new(c, R::zero());
        }
        acc
    }

    /// Value scale of `p` at `x`: `Σ |a_k| |x|^k`, used for backward-error
    /// residual tests.
    pub fn value_scale(&self, x: R) -> R {
        let ax = x.abs();
        let mut acc = R::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * ax + c.abs();
        }
        acc
    }

    /// First derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(R::zero());
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * R::of(k as f64))
            .collect();
        Self::new(coeffs)
    }

    /// Evaluates `p, p', …, p^(order)` at `x`.
    pub fn derivatives_at(&self, x: R, order: usize) -> Vec<R> {
        let mut out = Vec::with_capacity(order + 1);
        let mut p = self.clone();
        out.push(p.eval(x));
        for _ in 0..order {
            p = p.derivative();
            out.push(p.eval(x));
        }
        out
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![R::zero(); n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let a = self.coeffs.get(k).copied().unwrap_or_else(R::zero);
            let b = other.coeffs.get(k).copied().unwrap_or_else(R::zero);
            *c = a + b;
        }
        Self::new(coeffs)
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: R) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::constant(R::zero());
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Self::constant(c));
        }
        acc
    }

    /// Monic polynomial with the given real roots.
    pub fn from_real_roots(roots: &[R]) -> Self {
        let mut acc = Self::constant(R::one());
        for &r in roots {
            acc = acc.mul(&Self::linear(R::one(), -r));
        }
        acc
    }

    /// All complex roots with multiplicities, via Aberth–Ehrlich followed by
    /// cluster merging and Newton polish.
    ///
    /// Fails for the zero polynomial and when the iteration stalls.
    pub fn complex_roots(&self) -> Result<Vec<PolyRoot<R>>> {
        if self.is_zero() {
            return Err(Error::Precondition(
                "the zero polynomial has no well-defined roots".into(),
            ));
        }
        // Split off exact roots at the origin so the initial circle of
        // guesses is well conditioned.
        let mut low = 0usize;
        while low < self.coeffs.len() - 1 && self.coeffs[low] == R::zero() {
            low += 1;
        }
        let reduced: Vec<R> = self.coeffs[low..].to_vec();
        let deg = reduced.len() - 1;

        let mut roots: Vec<PolyRoot<R>> = Vec::new();
        if low > 0 {
            roots.push(PolyRoot {
                z: Complex::new(R::zero(), R::zero()),
                multiplicity: low,
            });
        }
        if deg == 0 {
            return Ok(roots);
        }

        let p = Polynomial::new(reduced);

        // Balance the variable: substituting x = s·y with
        // s = (|a₀|/|a_d|)^(1/d) equalizes the extreme coefficients, so the
        // scaled roots have magnitude near one.  Without this, compositions
        // of maps produce coefficient ratios of many orders of magnitude,
        // a Cauchy radius wildly above the actual root moduli, and an
        // iteration that starts far from every root.
        let ratio = (p.coeffs[0].abs() / p.coeffs[deg].abs()).abs();
        let mut s = ratio.powf(R::one() / R::of(deg as f64));
        if !s.is_finite() || s < R::of(1e-8) || s > R::of(1e8) {
            s = R::one();
        }
        let mut scaled: Vec<R> = Vec::with_capacity(deg + 1);
        let mut pw = R::one();
        for &c in &p.coeffs {
            scaled.push(c * pw);
            pw *= s;
        }
        let norm = scaled.iter().fold(R::zero(), |m, c| m.max(c.abs()));
        for c in &mut scaled {
            *c /= norm;
        }
        let q = Polynomial::new(scaled);
        let dq = q.derivative();
        let radius = q.cauchy_radius();

        // Initial guesses on a circle, with an offset angle so no guess is
        // real (real guesses can get stuck on symmetric polynomials).
        let r0 = radius * R::of(0.7);
        let mut zs: Vec<Complex<R>> = (0..deg)
            .map(|j| {
                let theta =
                    R::of(2.0) * R::PI() * R::of(j as f64) / R::of(deg as f64) + R::of(0.437);
                Complex::new(r0 * theta.cos(), r0 * theta.sin())
            })
            .collect();

        // Loose stopping tolerance: the polish pass below restores full
        // precision for simple roots, so the sweep only needs to place every
        // approximation well inside its cluster.
        let tol = R::epsilon() * R::of(1e4);
        let mut converged = false;
        for _ in 0..MAX_ABERTH_ITERS {
            let mut max_step = R::zero();
            for j in 0..deg {
                let z = zs[j];
                let pv = q.eval_complex(z);
                if pv.norm() == R::zero() {
                    continue;
                }
                let mut dv = dq.eval_complex(z);
                if dv.norm() == R::zero() {
                    // Nudge off an exact saddle of p'.
                    dv = Complex::new(R::epsilon(), R::epsilon());
                }
                let newton = pv / dv;
                let mut sum = Complex::new(R::zero(), R::zero());
                for (k, &zk) in zs.iter().enumerate() {
                    if k != j {
                        let d = z - zk;
                        if d.norm() > R::zero() {
                            sum += Complex::new(R::one(), R::zero()) / d;
                        }
                    }
                }
                let denom = Complex::new(R::one(), R::zero()) - newton * sum;
                let step = if denom.norm() > R::zero() {
                    newton / denom
                } else {
                    newton
                };
                zs[j] = z - step;
                let rel = step.norm() / (R::one() + zs[j].norm());
                max_step = max_step.max(rel);
            }
            if max_step < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric(format!(
                "root iteration stalled for degree {deg} polynomial"
            )));
        }

        // Merge clusters of approximations into multiple roots.  The merge
        // radius follows each approximation's own magnitude, not the global
        // root bound, so well-separated roots of badly scaled polynomials
        // are never glued together.
        let cluster_tol =
            |a: Complex<R>, b: Complex<R>| R::of(CLUSTER_RADIUS) * (R::one() + a.norm().max(b.norm()));
        let mut assigned = vec![false; deg];
        for j in 0..deg {
            if assigned[j] {
                continue;
            }
            // Greedy transitive clustering.
            let mut members = vec![j];
            assigned[j] = true;
            let mut grew = true;
            while grew {
                grew = false;
                for k in 0..deg {
                    if assigned[k] {
                        continue;
                    }
                    if members
                        .iter()
                        .any(|&m| (zs[k] - zs[m]).norm() < cluster_tol(zs[k], zs[m]))
                    {
                        members.push(k);
                        assigned[k] = true;
                        grew = true;
                    }
                }
            }
            let mut centroid = Complex::new(R::zero(), R::zero());
            for &m in &members {
                centroid += zs[m];
            }
            centroid = centroid / Complex::new(R::of(members.len() as f64), R::zero());
            roots.push(PolyRoot {
                z: centroid,
                multiplicity: members.len(),
            });
        }

        // Undo the balancing, snap near-real roots onto the axis, and polish
        // simple roots against the original polynomial.
        let dp = p.derivative();
        let band = |z: Complex<R>| R::of(REAL_BAND) * (R::one() + z.norm());
        for root in roots.iter_mut().skip(if low > 0 { 1 } else { 0 }) {
            root.z *= s;
            if root.z.im.abs() < band(root.z) {
                root.z.im = R::zero();
            }
            if root.multiplicity == 1 {
                // Two Newton steps; keep the better iterate.
                for _ in 0..2 {
                    let pv = p.eval_complex(root.z);
                    let dv = dp.eval_complex(root.z);
                    if dv.norm() == R::zero() {
                        break;
                    }
                    let next = root.z - pv / dv;
                    if p.eval_complex(next).norm() <= pv.norm() {
                        root.z = next;
                    } else {
                        break;
                    }
                }
                if root.z.im.abs() < band(root.z) {
                    root.z.im = R::zero();
                }
            }
        }

        roots.sort_by(|a, b| {
            (a.z.re, a.z.im)
                .partial_cmp(&(b.z.re, b.z.im))
                .expect("finite roots")
        });
        Ok(roots)
    }

    /// Real roots inside `region` (closed), with multiplicities, sorted.
    ///
    /// Roots within a small relative slack of the region boundary are clamped
    /// onto it rather than dropped.
    pub fn real_roots_in(&self, region: &Interval<R>) -> Result<Vec<(R, usize)>> {
        let roots = self.complex_roots()?;
        let dp = self.derivative();
        let mut out: Vec<(R, usize)> = Vec::new();
        for root in roots {
            if root.z.im != R::zero() {
                continue;
            }
            let mut x = root.z.re;
            if root.multiplicity == 1 {
                x = self.polish_real_root(x, &dp);
            }
            let slack = R::of(1e-12) * (R::one() + x.abs());
            if region.distance_to(x) <= slack {
                let clamped = x.clamp_to(region.lo(), region.hi());
                // Accept only candidates that truly annihilate the polynomial
                // relative to its value scale.
                let residual = self.eval(clamped).abs();
                let scale = self.value_scale(clamped) + self.coeff_scale();
                if residual <= R::of(1e-8) * (R::one() + scale) {
                    out.push((clamped, root.multiplicity));
                }
            }
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite roots"));
        Ok(out)
    }

    /// One-plus-Cauchy root radius bound.
    fn cauchy_radius(&self) -> R {
        let lead = self.coeffs.last().copied().unwrap_or_else(R::one).abs();
        let mut m = R::zero();
        for &c in &self.coeffs[..self.coeffs.len() - 1] {
            m = m.max(c.abs() / lead);
        }
        R::one() + m
    }

    /// Real Newton polish with a bisection fallback when a sign-change
    /// bracket is available around `x0`.
    fn polish_real_root(&self, x0: R, dp: &Self) -> R {
        let mut x = x0;
        for _ in 0..3 {
            let f = self.eval(x);
            let d = dp.eval(x);
            if d == R::zero() {
                break;
            }
            let next = x - f / d;
            if !next.is_finite() || self.eval(next).abs() > f.abs() {
                break;
            }
            x = next;
        }
        // Bracketed bisection fallback if Newton left a sign change nearby.
        let h = R::of(1e-7) * (R::one() + x.abs());
        let (mut a, mut b) = (x - h, x + h);
        let (fa, fb) = (self.eval(a), self.eval(b));
        if (fa < R::zero()) != (fb < R::zero()) && fa != R::zero() && fb != R::zero() {
            for _ in 0..80 {
                let mid = (a + b) / R::of(2.0);
                let fm = self.eval(mid);
                if fm == R::zero() {
                    return mid;
                }
                if (fm < R::zero()) == (fa < R::zero()) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return (a + b) / R::of(2.0);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p64(coeffs: &[f64]) -> Polynomial<f64> {
        Polynomial::from_f64(coeffs)
    }

    #[test]
    fn eval_and_derivatives() {
        // p(x) = x^3 + x, p(1) = 2, p'(1) = 4, p''(1) = 6, p'''(1) = 6.
        let p = p64(&[0.0, 1.0, 0.0, 1.0]);
        let d = p.derivatives_at(1.0, 3);
        assert_eq!(d, vec![2.0, 4.0, 6.0, 6.0]);
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn arithmetic() {
        let a = p64(&[1.0, 2.0]); // 1 + 2x
        let b = p64(&[0.0, 1.0, 1.0]); // x + x^2
        assert_eq!(a.add(&b), p64(&[1.0, 3.0, 1.0]));
        assert_eq!(a.mul(&b), p64(&[0.0, 1.0, 3.0, 2.0]));
        // (1 + 2x) ∘ (x + x^2) = 1 + 2x + 2x^2
        assert_eq!(a.compose(&b), p64(&[1.0, 2.0, 2.0]));
        assert_eq!(a.scale(3.0), p64(&[3.0, 6.0]));
    }

    #[test]
    fn trims_leading_zeros() {
        let p = p64(&[1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 0);
        assert!(!p.is_zero());
        assert!(p64(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn simple_real_roots() {
        // (x - 1)(x + 2)(x - 0.5)
        let p = Polynomial::<f64>::from_real_roots(&[1.0, -2.0, 0.5]);
        let region = Interval::new(-3.0, 3.0).unwrap();
        let roots = p.real_roots_in(&region).unwrap();
        assert_eq!(roots.len(), 3);
        let xs: Vec<f64> = roots.iter().map(|r| r.0).collect();
        assert_relative_eq!(xs[0], -2.0, epsilon = 1e-12);
        assert_relative_eq!(xs[1], 0.5, epsilon = 1e-12);
        assert_relative_eq!(xs[2], 1.0, epsilon = 1e-12);
        assert!(roots.iter().all(|r| r.1 == 1));
    }

    #[test]
    fn double_root_cluster_merges_onto_axis() {
        // p(x) = 3x^2, the derivative of x^3: double real root at 0.
        let p = p64(&[0.0, 0.0, 3.0]);
        let roots = p.complex_roots().unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert_eq!(roots[0].z.im, 0.0);
        assert!(roots[0].z.re.abs() < 1e-10);
    }

    #[test]
    fn conjugate_pair_stays_complex() {
        // p(x) = x^2 + 1: roots ±i.
        let p = p64(&[1.0, 0.0, 1.0]);
        let roots = p.complex_roots().unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_relative_eq!(r.z.im.abs(), 1.0, epsilon = 1e-12);
            assert!(r.z.re.abs() < 1e-12);
        }
        let region = Interval::new(-10.0, 10.0).unwrap();
        assert!(p.real_roots_in(&region).unwrap().is_empty());
    }

    #[test]
    fn origin_roots_and_mixed_factors() {
        // p(x) = 4x^3 + 2x = 2x(2x^2 + 1): simple root at 0, conjugate pair.
        let p = p64(&[0.0, 2.0, 0.0, 4.0]);
        let roots = p.complex_roots().unwrap();
        assert_eq!(roots.len(), 3);
        let real: Vec<_> = roots.iter().filter(|r| r.z.im == 0.0).collect();
        assert_eq!(real.len(), 1);
        assert_eq!(real[0].z.re, 0.0);
        let b = (0.5f64).sqrt();
        let mut imags: Vec<f64> = roots
            .iter()
            .filter(|r| r.z.im != 0.0)
            .map(|r| r.z.im)
            .collect();
        imags.sort_by(f64::total_cmp);
        assert_relative_eq!(imags[0], -b, epsilon = 1e-12);
        assert_relative_eq!(imags[1], b, epsilon = 1e-12);
    }

    #[test]
    fn quartic_derivative_of_degenerate_family() {
        // Derivative of x^4 + x^2 is 4x^3 + 2x — same shape as above but
        // through the generic path with multiplicities from clustering.
        let p = p64(&[0.0, 2.0, 0.0, 4.0]);
        let region = Interval::new(-2.0, 2.0).unwrap();
        let roots = p.real_roots_in(&region).unwrap();
        assert_eq!(roots, vec![(0.0, 1)]);
    }

    #[test]
    fn high_degree_wilkinson_fragment() {
        // (x-1)(x-2)…(x-6): ill conditioned enough to exercise the polish.
        let roots_in: Vec<f64> = (1..=6).map(|k| k as f64).collect();
        let p = Polynomial::<f64>::from_real_roots(&roots_in);
        let region = Interval::new(0.0, 7.0).unwrap();
        let roots = p.real_roots_in(&region).unwrap();
        assert_eq!(roots.len(), 6);
        for (found, expect) in roots.iter().zip(roots_in.iter()) {
            assert_relative_eq!(found.0, *expect, epsilon = 1e-8);
        }
    }

    #[test]
    fn boundary_roots_are_clamped() {
        let p = Polynomial::<f64>::from_real_roots(&[1.0]);
        let region = Interval::new(0.0, 1.0).unwrap();
        let roots = p.real_roots_in(&region).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].0, 1.0);
    }

    #[test]
    fn zero_polynomial_rejected() {
        let p = p64(&[0.0]);
        assert!(p.complex_roots().is_err());
    }

    #[test]
    fn value_scale_matches_magnitudes() {
        let p = p64(&[1.0, -2.0, 3.0]);
        assert_eq!(p.value_scale(2.0), 1.0 + 4.0 + 12.0);
    }
}
