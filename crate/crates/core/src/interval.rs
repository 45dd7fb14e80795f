//! Closed intervals and map domains.

use crate::error::{Error, Result};
use crate::num::Real;

/// A closed interval `[lo, hi]` with `lo <= hi`.
///
/// Degenerate (single-point) intervals are allowed; several constructions in
/// [`crate::orbits`] produce them on purpose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<R> {
    lo: R,
    hi: R,
}

impl<R: Real> Interval<R> {
    /// Creates `[lo, hi]`.  Fails unless `lo <= hi` and both ends are finite.
    pub fn new(lo: R, hi: R) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Parameter(format!(
                "interval ends must be finite, got [{}, {}]",
                lo.approx_f64(),
                hi.approx_f64()
            )));
        }
        if lo > hi {
            return Err(Error::Parameter(format!(
                "interval ends out of order: [{}, {}]",
                lo.approx_f64(),
                hi.approx_f64()
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Creates `[a, b]` from unordered ends.
    pub fn from_unordered(a: R, b: R) -> Result<Self> {
        if a <= b {
            Self::new(a, b)
        } else {
            Self::new(b, a)
        }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: R) -> Result<Self> {
        Self::new(x, x)
    }

    /// Lower end.
    pub fn lo(&self) -> R {
        self.lo
    }

    /// Upper end.
    pub fn hi(&self) -> R {
        self.hi
    }

    /// Length `hi - lo` (zero for degenerate intervals).
    pub fn length(&self) -> R {
        self.hi - self.lo
    }

    /// Midpoint.
    pub fn midpoint(&self) -> R {
        (self.lo + self.hi) / R::of(2.0)
    }

    /// Whether the interval is a single point.
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Whether `x` lies in the closed interval.
    pub fn contains(&self, x: R) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Whether `x` lies in the open interior.
    pub fn contains_interior(&self, x: R) -> bool {
        self.lo < x && x < self.hi
    }

    /// Whether `other` is contained in `self` (closed inclusion).
    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Whether `other` is contained in the open interior of `self`, i.e. both
    /// gaps are strictly positive.
    pub fn strictly_contains(&self, other: &Self) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    /// Length of the intersection (zero when disjoint).
    pub fn intersection_length(&self, other: &Self) -> R {
        self.intersect(other)
            .map_or_else(R::zero, |i| i.length())
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// The interval with the same midpoint and `factor` times the length.
    ///
    /// `factor` must be non-negative.  `scaled(3)` is the usual `3I`.
    pub fn scaled(&self, factor: R) -> Result<Self> {
        if factor < R::zero() {
            return Err(Error::Parameter(format!(
                "scale factor must be non-negative, got {}",
                factor.approx_f64()
            )));
        }
        let mid = self.midpoint();
        let half = self.length() / R::of(2.0) * factor;
        Self::new(mid - half, mid + half)
    }

    /// The `(1 + 2δ)`-scaled neighborhood of `self`: same midpoint, each side
    /// extended by `δ` times the length.
    pub fn scaled_neighborhood(&self, delta: R) -> Result<Self> {
        if delta < R::zero() {
            return Err(Error::Parameter(format!(
                "delta must be non-negative, got {}",
                delta.approx_f64()
            )));
        }
        self.scaled(R::one() + R::of(2.0) * delta)
    }

    /// Left and right components of `self` minus the open interior of `inner`.
    ///
    /// Fails unless `inner ⊆ self`.
    pub fn flanks(&self, inner: &Self) -> Result<(Self, Self)> {
        if !self.contains_interval(inner) {
            return Err(Error::Precondition(format!(
                "[{}, {}] is not contained in [{}, {}]",
                inner.lo.approx_f64(),
                inner.hi.approx_f64(),
                self.lo.approx_f64(),
                self.hi.approx_f64()
            )));
        }
        Ok((
            Self {
                lo: self.lo,
                hi: inner.lo,
            },
            Self {
                lo: inner.hi,
                hi: self.hi,
            },
        ))
    }

    /// Point at parameter `t ∈ [0, 1]` along the interval.
    pub fn lerp(&self, t: R) -> R {
        self.lo + self.length() * t
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance_to(&self, x: R) -> R {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            R::zero()
        }
    }

    /// Largest `δ ≥ 0` with `inner.scaled_neighborhood(δ) ⊆ self`, or `None`
    /// when `inner` is degenerate or not contained in `self`.
    pub fn scaled_gap(&self, inner: &Self) -> Option<R> {
        if inner.is_degenerate() || !self.contains_interval(inner) {
            return None;
        }
        let left = inner.lo - self.lo;
        let right = self.hi - inner.hi;
        Some(left.min(right) / inner.length())
    }
}

/// Largest number of the given closed intervals sharing a common point.
///
/// Computed by an endpoint sweep; touching endpoints count as overlap.
/// Returns 0 for an empty slice.
pub fn intersection_multiplicity<R: Real>(intervals: &[Interval<R>]) -> usize {
    // +1 events sort before −1 events at equal coordinates so closed
    // intervals meeting only at an endpoint still register as overlapping.
    let mut events: Vec<(R, i32)> = Vec::with_capacity(2 * intervals.len());
    for iv in intervals {
        events.push((iv.lo(), 1));
        events.push((iv.hi(), -1));
    }
    events.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite endpoints")
            .then(b.1.cmp(&a.1))
    });
    let mut depth = 0i32;
    let mut best = 0i32;
    for (_, delta) in events {
        depth += delta;
        best = best.max(depth);
    }
    best.max(0) as usize
}

/// The phase space a map acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain<R> {
    /// A compact interval.
    Interval(Interval<R>),
    /// The circle `ℝ/(period·ℤ)`, represented by lifts.
    Circle {
        /// Length of the fundamental domain.
        period: R,
    },
}

impl<R: Real> Domain<R> {
    /// Interval domain helper.
    pub fn interval(lo: R, hi: R) -> Result<Self> {
        Ok(Domain::Interval(Interval::new(lo, hi)?))
    }

    /// Whether `x` belongs to the domain.  Always true on the circle.
    pub fn contains(&self, x: R) -> bool {
        match self {
            Domain::Interval(i) => i.contains(x),
            Domain::Circle { .. } => true,
        }
    }

    /// Length of an interval domain, or the period of the circle.
    pub fn extent(&self) -> R {
        match self {
            Domain::Interval(i) => i.length(),
            Domain::Circle { period } => *period,
        }
    }

    /// The domain enlarged about its midpoint by `factor`.  The circle is
    /// already maximal and is returned unchanged.
    pub fn extended(&self, factor: R) -> Result<Self> {
        match self {
            Domain::Interval(i) => Ok(Domain::Interval(i.scaled(factor)?)),
            Domain::Circle { period } => Ok(Domain::Circle { period: *period }),
        }
    }

    /// The working interval: the interval itself, or one fundamental domain
    /// `[0, period]` of the circle.
    pub fn as_interval(&self) -> Result<Interval<R>> {
        match self {
            Domain::Interval(i) => Ok(*i),
            Domain::Circle { period } => Interval::new(R::zero(), *period),
        }
    }
}
