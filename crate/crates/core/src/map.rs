//! Interval maps as expression trees with exact derivatives up to order three.
//!
//! A [`Map`] is an expression tree over polynomial, affine, Möbius,
//! composition and iterate nodes, together with the [`Domain`] it acts on.
//! Derivatives are propagated through the tree as order-3 jets using the
//! chain rule, so they are exact up to rounding — no finite differencing
//! anywhere.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::{Domain, Interval};
use crate::num::Real;
use crate::poly::Polynomial;

/// Trees are flattened to a single polynomial only below this degree; larger
/// products fall back to structural evaluation.
const MAX_FLATTEN_DEGREE: usize = 64;

/// Samples used by the generic critical-point scan.
const SCAN_SAMPLES: usize = 4096;

/// Value, first, second and third derivative of a map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<R> {
    /// Value.
    pub f: R,
    /// First derivative.
    pub d1: R,
    /// Second derivative.
    pub d2: R,
    /// Third derivative.
    pub d3: R,
}

impl<R: Real> Jet<R> {
    /// Jet of the identity at `x`.
    pub fn identity(x: R) -> Self {
        Jet {
            f: x,
            d1: R::one(),
            d2: R::zero(),
            d3: R::zero(),
        }
    }

    /// Chain rule: jet of `outer ∘ inner`, given the jet of `outer` at
    /// `inner.f` and the jet of `inner` at the base point.
    pub fn chain(outer: &Self, inner: &Self) -> Self {
        let three = R::of(3.0);
        Jet {
            f: outer.f,
            d1: outer.d1 * inner.d1,
            d2: outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2,
            d3: outer.d3 * inner.d1 * inner.d1 * inner.d1
                + three * outer.d2 * inner.d1 * inner.d2
                + outer.d1 * inner.d3,
        }
    }

    /// Derivatives as a `[f, f', f'', f''']` vector truncated to `order`.
    pub fn to_vec(&self, order: usize) -> Vec<R> {
        [self.f, self.d1, self.d2, self.d3][..=order.min(3)].to_vec()
    }
}

/// A critical point together with the order of vanishing of the derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint<R> {
    /// Location.
    pub x: R,
    /// Order of vanishing of `Df` at `x` (1 = quadratic turning point).
    pub multiplicity: usize,
}

/// Expression tree node for an interval map.
#[derive(Debug, Clone)]
pub enum Expr<R> {
    /// Dense polynomial.
    Poly(Polynomial<R>),
    /// `a·x + b` with `a ≠ 0`.
    Affine {
        /// Slope.
        a: R,
        /// Offset.
        b: R,
    },
    /// `(a·x + b)/(c·x + d)` with `a·d − b·c ≠ 0`.
    Mobius {
        /// Numerator slope.
        a: R,
        /// Numerator offset.
        b: R,
        /// Denominator slope.
        c: R,
        /// Denominator offset.
        d: R,
    },
    /// `outer ∘ inner`.
    Compose(Arc<Expr<R>>, Arc<Expr<R>>),
    /// `n`-fold self-composition.
    Iterate(Arc<Expr<R>>, u32),
}

impl<R: Real> Expr<R> {
    /// Polynomial node from ascending coefficients.
    pub fn poly(coeffs: &[R]) -> Self {
        Expr::Poly(Polynomial::new(coeffs.to_vec()))
    }

    /// Polynomial node from `f64` literals.
    pub fn poly_f64(coeffs: &[f64]) -> Self {
        Expr::Poly(Polynomial::from_f64(coeffs))
    }

    /// Affine node `a·x + b`; fails when `a = 0`.
    pub fn affine(a: R, b: R) -> Result<Self> {
        if a == R::zero() {
            return Err(Error::Parameter(
                "affine map must have non-zero slope".into(),
            ));
        }
        Ok(Expr::Affine { a, b })
    }

    /// Möbius node `(a·x + b)/(c·x + d)`; fails when `a·d − b·c = 0`.
    pub fn mobius(a: R, b: R, c: R, d: R) -> Result<Self> {
        if a * d - b * c == R::zero() {
            return Err(Error::Parameter(
                "Möbius map must have non-zero determinant".into(),
            ));
        }
        Ok(Expr::Mobius { a, b, c, d })
    }

    /// The logistic family `x ↦ a·x·(1 − x)`.
    pub fn logistic(a: R) -> Self {
        Expr::Poly(Polynomial::new(vec![R::zero(), a, -a]))
    }

    /// The cubic family `x ↦ x³ + λ·x` (no real critical points for `λ > 0`,
    /// a degenerate inflection at the origin as `λ → 0⁺`, and two quadratic
    /// critical points for `λ < 0`).  Also known here as `μ·x + x³`.
    pub fn cubic(lambda: R) -> Self {
        Expr::Poly(Polynomial::new(vec![
            R::zero(),
            lambda,
            R::zero(),
            R::one(),
        ]))
    }

    /// Composition `outer ∘ inner`.
    pub fn compose(outer: Expr<R>, inner: Expr<R>) -> Self {
        Expr::Compose(Arc::new(outer), Arc::new(inner))
    }

    /// `n`-fold iterate.
    pub fn iterate(inner: Expr<R>, n: u32) -> Self {
        Expr::Iterate(Arc::new(inner), n)
    }

    /// Jet of the expression at `x`.
    fn jet(&self, x: R) -> Result<Jet<R>> {
        match self {
            Expr::Poly(p) => {
                let d = p.derivatives_at(x, 3);
                Ok(Jet {
                    f: d[0],
                    d1: d[1],
                    d2: d[2],
                    d3: d[3],
                })
            }
            Expr::Affine { a, b } => Ok(Jet {
                f: *a * x + *b,
                d1: *a,
                d2: R::zero(),
                d3: R::zero(),
            }),
            Expr::Mobius { a, b, c, d } => {
                let q = *c * x + *d;
                if q == R::zero() {
                    return Err(Error::Pole { x: x.approx_f64() });
                }
                let det = *a * *d - *b * *c;
                let q2 = q * q;
                Ok(Jet {
                    f: (*a * x + *b) / q,
                    d1: det / q2,
                    d2: -R::of(2.0) * *c * det / (q2 * q),
                    d3: R::of(6.0) * *c * *c * det / (q2 * q2),
                })
            }
            Expr::Compose(outer, inner) => {
                let ji = inner.jet(x)?;
                let jo = outer.jet(ji.f)?;
                Ok(Jet::chain(&jo, &ji))
            }
            Expr::Iterate(e, n) => {
                let mut acc = Jet::identity(x);
                for _ in 0..*n {
                    let step = e.jet(acc.f)?;
                    acc = Jet::chain(&step, &acc);
                }
                Ok(acc)
            }
        }
    }

    /// Value of the expression at `x` (cheaper than a full jet).
    fn value(&self, x: R) -> Result<R> {
        match self {
            Expr::Poly(p) => Ok(p.eval(x)),
            Expr::Affine { a, b } => Ok(*a * x + *b),
            Expr::Mobius { a, b, c, d } => {
                let q = *c * x + *d;
                if q == R::zero() {
                    return Err(Error::Pole { x: x.approx_f64() });
                }
                Ok((*a * x + *b) / q)
            }
            Expr::Compose(outer, inner) => outer.value(inner.value(x)?),
            Expr::Iterate(e, n) => {
                let mut v = x;
                for _ in 0..*n {
                    v = e.value(v)?;
                }
                Ok(v)
            }
        }
    }

    /// Flattens the tree to a single polynomial when the degree stays below
    /// `cap`.  Möbius nodes flatten only when their denominator is constant.
    fn flatten(&self, cap: usize) -> Option<Polynomial<R>> {
        match self {
            Expr::Poly(p) => (p.degree() <= cap).then(|| p.clone()),
            Expr::Affine { a, b } => Some(Polynomial::linear(*a, *b)),
            Expr::Mobius { a, b, c, d } => {
                if *c == R::zero() {
                    Some(Polynomial::linear(*a / *d, *b / *d))
                } else {
                    None
                }
            }
            Expr::Compose(outer, inner) => {
                let po = outer.flatten(cap)?;
                let pi = inner.flatten(cap)?;
                if po.degree().saturating_mul(pi.degree().max(1)) > cap {
                    return None;
                }
                Some(po.compose(&pi))
            }
            Expr::Iterate(e, n) => {
                let p = e.flatten(cap)?;
                let mut acc = Polynomial::linear(R::one(), R::zero());
                for _ in 0..*n {
                    if p.degree().saturating_mul(acc.degree().max(1)) > cap {
                        return None;
                    }
                    acc = p.compose(&acc);
                }
                Some(acc)
            }
        }
    }

    /// Poles of Möbius nodes, found structurally.  For nested trees this
    /// reports only poles of the outermost coordinate (sufficient for the
    /// shallow trees this crate builds).
    fn direct_poles(&self) -> Vec<R> {
        match self {
            Expr::Mobius { c, d, .. } if *c != R::zero() => vec![-*d / *c],
            _ => Vec::new(),
        }
    }
}

/// An interval map: an expression tree plus its phase space.
#[derive(Debug, Clone)]
pub struct Map<R> {
    expr: Expr<R>,
    domain: Domain<R>,
}

impl<R: Real> Map<R> {
    /// Builds a map from an expression and a domain.
    pub fn new(expr: Expr<R>, domain: Domain<R>) -> Self {
        Self { expr, domain }
    }

    /// Logistic map `a·x(1−x)` on `[0, 1]`.
    pub fn logistic(a: R) -> Self {
        Self {
            expr: Expr::logistic(a),
            domain: Domain::interval(R::zero(), R::one()).expect("unit interval"),
        }
    }

    /// Cubic map `x³ + λ·x` on `[lo, hi]`.
    pub fn cubic(lambda: R, lo: R, hi: R) -> Result<Self> {
        Ok(Self {
            expr: Expr::cubic(lambda),
            domain: Domain::interval(lo, hi)?,
        })
    }

    /// The expression tree.
    pub fn expr(&self) -> &Expr<R> {
        &self.expr
    }

    /// The domain.
    pub fn domain(&self) -> &Domain<R> {
        &self.domain
    }

    /// The same expression on a different domain.
    pub fn with_domain(&self, domain: Domain<R>) -> Self {
        Self {
            expr: self.expr.clone(),
            domain,
        }
    }

    /// The same expression on the domain enlarged by `factor` about its
    /// midpoint.
    pub fn with_extended_domain(&self, factor: R) -> Result<Self> {
        Ok(Self {
            expr: self.expr.clone(),
            domain: self.domain.extended(factor)?,
        })
    }

    /// The `n`-fold iterate on the same domain.
    pub fn iterate(&self, n: u32) -> Self {
        Self {
            expr: Expr::Iterate(Arc::new(self.expr.clone()), n),
            domain: self.domain,
        }
    }

    /// Whether `x` is inside the domain, up to a tiny rounding slack.
    fn domain_check(&self, x: R) -> Result<()> {
        if let Domain::Interval(i) = &self.domain {
            let slack = R::epsilon()
                * R::of(64.0)
                * (R::one() + i.length() + x.abs());
            if i.distance_to(x) > slack {
                return Err(Error::OutOfDomain { x: x.approx_f64() });
            }
        }
        Ok(())
    }

    /// Value at `x`.  Errors: out-of-domain, pole.
    pub fn eval(&self, x: R) -> Result<R> {
        self.domain_check(x)?;
        self.expr.value(x)
    }

    /// Order-3 jet at `x`.  Errors: out-of-domain, pole.
    pub fn jet(&self, x: R) -> Result<Jet<R>> {
        self.domain_check(x)?;
        self.expr.jet(x)
    }

    /// `[f(x), f'(x), …]` up to `order ≤ 3`.
    pub fn eval_derivatives(&self, x: R, order: usize) -> Result<Vec<R>> {
        if order > 3 {
            return Err(Error::Parameter(format!(
                "derivative order {order} exceeds the jet order 3"
            )));
        }
        Ok(self.jet(x)?.to_vec(order))
    }

    /// First derivative at `x`.
    pub fn d1(&self, x: R) -> Result<R> {
        Ok(self.jet(x)?.d1)
    }

    /// Flattens to a polynomial when the tree is polynomial and small.
    pub fn as_polynomial(&self) -> Option<Polynomial<R>> {
        self.expr.flatten(MAX_FLATTEN_DEGREE)
    }

    /// Critical points inside the closed `region`, sorted, with
    /// multiplicities.
    ///
    /// Errors: a flat piece (derivative vanishing on a whole subinterval)
    /// and, for non-polynomial trees, a multiplicity beyond the jet order.
    pub fn critical_points(&self, region: &Interval<R>) -> Result<Vec<CriticalPoint<R>>> {
        if let Some(p) = self.as_polynomial() {
            let dp = p.derivative();
            if dp.is_zero() {
                return Err(Error::FlatPiece {
                    lo: region.lo().approx_f64(),
                    hi: region.hi().approx_f64(),
                });
            }
            let roots = dp.real_roots_in(region)?;
            return Ok(roots
                .into_iter()
                .map(|(x, m)| CriticalPoint { x, multiplicity: m })
                .collect());
        }
        self.scan_critical_points(region)
    }

    /// Sampling-based critical-point detection for non-polynomial trees.
    fn scan_critical_points(&self, region: &Interval<R>) -> Result<Vec<CriticalPoint<R>>> {
        let n = SCAN_SAMPLES;
        let mut xs = Vec::with_capacity(n + 1);
        let mut d1s: Vec<Option<R>> = Vec::with_capacity(n + 1);
        let mut scale = R::zero();
        for k in 0..=n {
            let t = R::of(k as f64) / R::of(n as f64);
            let x = region.lerp(t);
            let j = self.expr.jet(x).ok();
            if let Some(j) = &j {
                scale = scale.max(j.d1.abs());
            }
            xs.push(x);
            d1s.push(j.map(|j| j.d1));
        }
        if scale == R::zero() {
            return Err(Error::FlatPiece {
                lo: region.lo().approx_f64(),
                hi: region.hi().approx_f64(),
            });
        }
        let flat_tol = scale * R::of(1e-12);

        // A long run of numerically-zero derivatives means the derivative is
        // not isolated-zero: refuse to enumerate critical points.
        let mut run = 0usize;
        for d in &d1s {
            match d {
                Some(v) if v.abs() < flat_tol => {
                    run += 1;
                    if run >= 8 {
                        return Err(Error::FlatPiece {
                            lo: region.lo().approx_f64(),
                            hi: region.hi().approx_f64(),
                        });
                    }
                }
                _ => run = 0,
            }
        }

        let mut found: Vec<R> = Vec::new();
        // Sign changes of Df.
        for k in 0..n {
            if let (Some(a), Some(b)) = (d1s[k], d1s[k + 1]) {
                if a == R::zero() {
                    found.push(xs[k]);
                } else if (a < R::zero()) != (b < R::zero()) {
                    found.push(self.bisect_derivative_zero(xs[k], xs[k + 1], a));
                }
            }
        }
        if let Some(Some(last)) = d1s.last().map(|d| *d) {
            if last == R::zero() {
                found.push(*xs.last().expect("non-empty grid"));
            }
        }
        // Tangential touches: local minima of |Df| that dip far below scale.
        let touch_tol = scale * R::of(1e-5);
        for k in 1..n {
            if let (Some(a), Some(b), Some(c)) = (d1s[k - 1], d1s[k], d1s[k + 1]) {
                if b.abs() < touch_tol
                    && b.abs() <= a.abs()
                    && b.abs() <= c.abs()
                    && (a < R::zero()) == (c < R::zero())
                {
                    if let Some(x) = self.refine_tangency(xs[k - 1], xs[k + 1], flat_tol) {
                        found.push(x);
                    }
                }
            }
        }

        // Deduplicate and attach multiplicities from the jet.
        found.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        let mut out: Vec<CriticalPoint<R>> = Vec::new();
        for x in found {
            if let Some(prev) = out.last() {
                if (x - prev.x).abs() < R::of(1e-9) * (R::one() + x.abs()) {
                    continue;
                }
            }
            let j = self.expr.jet(x)?;
            let jet_scale = R::one() + scale;
            let mult = if j.d2.abs() > R::of(1e-8) * jet_scale {
                1
            } else if j.d3.abs() > R::of(1e-8) * jet_scale {
                2
            } else {
                return Err(Error::Numeric(format!(
                    "critical point at x = {} has multiplicity beyond the jet order",
                    x.approx_f64()
                )));
            };
            out.push(CriticalPoint {
                x,
                multiplicity: mult,
            });
        }
        Ok(out)
    }

    /// Bisection for a sign change of `Df` on `[a, b]`, followed by Newton on
    /// `Df` using `D²f`.
    fn bisect_derivative_zero(&self, mut a: R, mut b: R, da: R) -> R {
        let neg = da < R::zero();
        for _ in 0..80 {
            let mid = (a + b) / R::of(2.0);
            match self.expr.jet(mid) {
                Ok(j) => {
                    if j.d1 == R::zero() {
                        return mid;
                    }
                    if (j.d1 < R::zero()) == neg {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                Err(_) => b = mid,
            }
        }
        let mut x = (a + b) / R::of(2.0);
        for _ in 0..2 {
            if let Ok(j) = self.expr.jet(x) {
                if j.d2 != R::zero() {
                    let next = x - j.d1 / j.d2;
                    if next.is_finite() {
                        x = next;
                    }
                }
            }
        }
        x
    }

    /// Newton refinement of a tangential critical point: finds the zero of
    /// `D²f` and accepts it when `Df` nearly vanishes there too.
    fn refine_tangency(&self, a: R, b: R, flat_tol: R) -> Option<R> {
        let mut x = (a + b) / R::of(2.0);
        for _ in 0..60 {
            let j = self.expr.jet(x).ok()?;
            if j.d3 == R::zero() {
                break;
            }
            let next = x - j.d2 / j.d3;
            if !next.is_finite() || next < a || next > b {
                break;
            }
            if (next - x).abs() < R::epsilon() * (R::one() + x.abs()) {
                x = next;
                break;
            }
            x = next;
        }
        let j = self.expr.jet(x).ok()?;
        (j.d1.abs() <= flat_tol * R::of(100.0)).then_some(x)
    }

    /// Image of `T` under the map: `[min f, max f]` over `T`.
    ///
    /// Composition and iterate nodes are handled stage by stage — the image
    /// of a composition is the outer image of the inner image — so deeply
    /// composed maps never require root-finding on their expanded
    /// polynomial form.
    ///
    /// Errors: pole inside `T`, flat piece.
    pub fn image_interval(&self, t: &Interval<R>) -> Result<Interval<R>> {
        match &self.expr {
            Expr::Compose(outer, inner) => {
                let inner_map = Map {
                    expr: (**inner).clone(),
                    domain: self.domain,
                };
                let mid = inner_map.image_interval(t)?;
                let outer_map = Map {
                    expr: (**outer).clone(),
                    domain: self.domain,
                };
                outer_map.image_interval(&mid)
            }
            Expr::Iterate(e, n) => {
                let step = Map {
                    expr: (**e).clone(),
                    domain: self.domain,
                };
                let mut cur = *t;
                for _ in 0..*n {
                    cur = step.image_interval(&cur)?;
                }
                Ok(cur)
            }
            _ => {
                for pole in self.expr.direct_poles() {
                    if t.contains(pole) {
                        return Err(Error::Pole {
                            x: pole.approx_f64(),
                        });
                    }
                }
                let mut lo = self.expr.value(t.lo())?;
                let mut hi = lo;
                let mut push = |v: R| {
                    lo = lo.min(v);
                    hi = hi.max(v);
                };
                push(self.expr.value(t.hi())?);
                if !t.is_degenerate() {
                    for c in self.critical_points(t)? {
                        push(self.expr.value(c.x)?);
                    }
                }
                Interval::new(lo, hi)
            }
        }
    }

    /// Whether the map restricted to `T` is a diffeomorphism onto its image.
    ///
    /// Checked structurally: composition and iterate nodes verify each stage
    /// on the successive images, so no critical point of any stage may meet
    /// the corresponding interval, and no Möbius pole may sit inside it.
    pub fn is_diffeo_on(&self, t: &Interval<R>) -> Result<bool> {
        self.expr_is_diffeo(&self.expr, t)
    }

    fn expr_is_diffeo(&self, expr: &Expr<R>, t: &Interval<R>) -> Result<bool> {
        match expr {
            Expr::Mobius { c, d, .. } => {
                if *c != R::zero() && t.contains(-*d / *c) {
                    return Ok(false);
                }
                Ok(true)
            }
            Expr::Affine { .. } => Ok(true),
            Expr::Poly(_) => {
                let sub = Map {
                    expr: expr.clone(),
                    domain: self.domain,
                };
                Ok(sub.critical_points(t)?.is_empty())
            }
            Expr::Compose(outer, inner) => {
                if !self.expr_is_diffeo(inner, t)? {
                    return Ok(false);
                }
                let sub = Map {
                    expr: (**inner).clone(),
                    domain: self.domain,
                };
                let image = sub.image_interval(t)?;
                self.expr_is_diffeo(outer, &image)
            }
            Expr::Iterate(e, n) => {
                let mut cur = *t;
                let sub = Map {
                    expr: (**e).clone(),
                    domain: self.domain,
                };
                for _ in 0..*n {
                    if !self.expr_is_diffeo(e, &cur)? {
                        return Ok(false);
                    }
                    cur = sub.image_interval(&cur)?;
                }
                Ok(true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    fn on(lo: f64, hi: f64, expr: Expr<f64>) -> Map<f64> {
        Map::new(expr, Domain::interval(lo, hi).unwrap())
    }

    /// Central finite differences of orders 1–3 with O(h²) error.
    fn fd_derivatives(f: impl Fn(f64) -> f64, x: f64, h: f64) -> [f64; 3] {
        let (f2m, f1m, f1p, f2p) = (f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h));
        let f0 = f(x);
        [
            (f1p - f1m) / (2.0 * h),
            (f1p - 2.0 * f0 + f1m) / (h * h),
            (f2p - 2.0 * f1p + 2.0 * f1m - f2m) / (2.0 * h * h * h),
        ]
    }

    #[test]
    fn poly_jets_match_closed_form() {
        let m = on(-2.0, 2.0, Expr::poly_f64(&[0.0, 1.0, 0.0, 1.0]));
        let d = m.eval_derivatives(1.0, 3).unwrap();
        assert_eq!(d, vec![2.0, 4.0, 6.0, 6.0]);
    }

    #[test]
    fn mobius_jets_match_finite_differences() {
        let m = on(0.0, 1.0, Expr::mobius(2.0, 1.0, 1.0, 3.0).unwrap());
        let x = 0.4;
        let j = m.jet(x).unwrap();
        let fd = fd_derivatives(|x| (2.0 * x + 1.0) / (x + 3.0), x, 1e-4);
        assert_relative_eq!(j.d1, fd[0], max_relative = 1e-7);
        assert_relative_eq!(j.d2, fd[1], max_relative = 1e-6);
        assert_relative_eq!(j.d3, fd[2], max_relative = 1e-4);
    }

    #[test]
    fn composition_jets_match_flattened_polynomial() {
        // (x² + 1) ∘ (x³ + x): flatten and compare jets at several points.
        let inner = Expr::poly_f64(&[0.0, 1.0, 0.0, 1.0]);
        let outer = Expr::poly_f64(&[1.0, 0.0, 1.0]);
        let m = on(-1.5, 1.5, Expr::compose(outer, inner));
        let p = m.as_polynomial().unwrap();
        assert_eq!(p.degree(), 6);
        for k in 0..7 {
            let x = -1.2 + 0.4 * k as f64;
            let j = m.jet(x).unwrap();
            let d = p.derivatives_at(x, 3);
            assert_relative_eq!(j.f, d[0], max_relative = 1e-12);
            assert_relative_eq!(j.d1, d[1], max_relative = 1e-12);
            assert_relative_eq!(j.d2, d[2], max_relative = 1e-12);
            assert_relative_eq!(j.d3, d[3], max_relative = 1e-12);
        }
    }

    #[test]
    fn composed_mobius_jets_match_finite_differences() {
        // Möbius ∘ cubic: exercises the chain rule on a non-flattenable tree.
        let tree = Expr::compose(
            Expr::mobius(1.0, 0.0, 0.5, 2.0).unwrap(),
            Expr::cubic(0.7),
        );
        let m = on(-1.0, 1.0, tree);
        let f = |x: f64| {
            let y = x * x * x + 0.7 * x;
            y / (0.5 * y + 2.0)
        };
        for &x in &[-0.8, -0.3, 0.1, 0.6, 0.9] {
            let j = m.jet(x).unwrap();
            // h = 1e-4 balances truncation against roundoff in the third
            // difference (roundoff grows like ε/h³).
            let fd = fd_derivatives(f, x, 1e-4);
            assert_relative_eq!(j.f, f(x), max_relative = 1e-12);
            assert_relative_eq!(j.d1, fd[0], max_relative = 1e-6);
            assert_relative_eq!(j.d2, fd[1], epsilon = 1e-4, max_relative = 1e-5);
            assert_relative_eq!(j.d3, fd[2], epsilon = 1e-2, max_relative = 1e-3);
        }
    }

    #[test]
    fn iterate_matches_manual_composition() {
        let m = Map::logistic(4.0_f64);
        let m2 = m.iterate(2);
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            let manual = m.eval(m.eval(x).unwrap()).unwrap();
            assert_relative_eq!(m2.eval(x).unwrap(), manual, epsilon = 1e-15);
        }
        // Derivative of g² at x: Dg(g(x))·Dg(x).
        let x = 0.3;
        let expect = m.d1(m.eval(x).unwrap()).unwrap() * m.d1(x).unwrap();
        assert_relative_eq!(m2.d1(x).unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn pole_and_domain_errors() {
        let m = on(-5.0, 5.0, Expr::mobius(1.0, 0.0, 1.0, -2.0).unwrap());
        assert_eq!(m.eval(2.0), Err(Error::Pole { x: 2.0 }));
        let m = Map::logistic(4.0_f64);
        assert!(matches!(m.eval(1.5), Err(Error::OutOfDomain { .. })));
        // A hair outside the domain is tolerated (rounding slack).
        assert!(m.eval(1.0 + 1e-16).is_ok());
    }

    #[test]
    fn constructor_validation() {
        assert!(Expr::affine(0.0, 1.0).is_err());
        assert!(Expr::mobius(1.0, 2.0, 2.0, 4.0).is_err());
    }

    #[test]
    fn logistic_critical_point() {
        let m = Map::logistic(4.0_f64);
        let crits = m.critical_points(&iv(0.0, 1.0)).unwrap();
        assert_eq!(crits.len(), 1);
        assert_relative_eq!(crits[0].x, 0.5, epsilon = 1e-12);
        assert_eq!(crits[0].multiplicity, 1);
    }

    #[test]
    fn pure_cubic_has_degenerate_critical_point() {
        let m = on(-1.0, 1.0, Expr::cubic(0.0));
        let crits = m.critical_points(&iv(-1.0, 1.0)).unwrap();
        assert_eq!(crits.len(), 1);
        assert!(crits[0].x.abs() < 1e-10);
        assert_eq!(crits[0].multiplicity, 2);
    }

    #[test]
    fn quartic_critical_points() {
        // x⁴ + x²: only real critical point is a simple one at 0.
        let m = on(-2.0, 2.0, Expr::poly_f64(&[0.0, 0.0, 1.0, 0.0, 1.0]));
        let crits = m.critical_points(&iv(-2.0, 2.0)).unwrap();
        assert_eq!(crits.len(), 1);
        assert_eq!(crits[0].x, 0.0);
        assert_eq!(crits[0].multiplicity, 1);
    }

    #[test]
    fn negative_lambda_cubic_critical_points() {
        // x³ − 1.2x: critical points at ±√0.4.
        let m = on(-2.0, 2.0, Expr::cubic(-1.2));
        let crits = m.critical_points(&iv(-2.0, 2.0)).unwrap();
        assert_eq!(crits.len(), 2);
        let c = (0.4f64).sqrt();
        assert_relative_eq!(crits[0].x, -c, epsilon = 1e-12);
        assert_relative_eq!(crits[1].x, c, epsilon = 1e-12);
    }

    #[test]
    fn scan_path_without_flattening_finds_turning_point() {
        // Möbius ∘ logistic cannot flatten; its critical point is still 0.5.
        let tree = Expr::compose(
            Expr::mobius(1.0, 0.0, 0.2, 1.0).unwrap(),
            Expr::logistic(3.5),
        );
        let m = on(0.0, 1.0, tree);
        assert!(m.as_polynomial().is_none());
        let crits = m.critical_points(&iv(0.0, 1.0)).unwrap();
        assert_eq!(crits.len(), 1);
        assert_relative_eq!(crits[0].x, 0.5, epsilon = 1e-9);
        assert_eq!(crits[0].multiplicity, 1);
    }

    #[test]
    fn image_interval_spans_critical_values() {
        // x² on [−1, 2] has image [0, 4].
        let m = on(-1.0, 2.0, Expr::poly_f64(&[0.0, 0.0, 1.0]));
        let img = m.image_interval(&iv(-1.0, 2.0)).unwrap();
        assert_relative_eq!(img.lo(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(img.hi(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn diffeo_checks() {
        let m = Map::logistic(4.0_f64);
        assert!(m.is_diffeo_on(&iv(0.0, 0.4)).unwrap());
        assert!(!m.is_diffeo_on(&iv(0.0, 0.6)).unwrap());
        // Iterate: g² fails on [0.1, 0.2] because g([0.1, 0.2]) = [0.36, 0.64]
        // contains the turning point 0.5, while g itself is fine there.
        let m2 = m.iterate(2);
        assert!(m.is_diffeo_on(&iv(0.1, 0.2)).unwrap());
        assert!(!m2.is_diffeo_on(&iv(0.1, 0.2)).unwrap());
        assert!(m2.is_diffeo_on(&iv(0.05, 0.1)).unwrap());
        // Möbius with a pole inside is not a diffeomorphism of the interval.
        let mob = on(-5.0, 5.0, Expr::mobius(1.0, 0.0, 1.0, -2.0).unwrap());
        assert!(!mob.is_diffeo_on(&iv(0.0, 3.0)).unwrap());
        assert!(mob.is_diffeo_on(&iv(0.0, 1.0)).unwrap());
    }

    #[test]
    fn constant_polynomial_is_flat() {
        let m = on(0.0, 1.0, Expr::poly_f64(&[2.0]));
        assert!(matches!(
            m.critical_points(&iv(0.0, 1.0)),
            Err(Error::FlatPiece { .. })
        ));
    }

    #[test]
    fn derivative_order_capped() {
        let m = Map::logistic(2.0_f64);
        assert!(m.eval_derivatives(0.5, 4).is_err());
        assert_eq!(m.eval_derivatives(0.5, 0).unwrap().len(), 1);
    }
}
