//! Pullback chains and the interval sequences controlling their overlap.
//!
//! A *chain* for a map `f` is a finite sequence of intervals `T_0, …, T_m`
//! in which each `T_k` is a connected component of `f⁻¹(T_{k+1})`.  Chains
//! are how cross-ratio estimates for a single application of `f` are
//! propagated along an orbit: the head `T_0` is a pullback of the tail `T_m`
//! along an anchor orbit, and the quality of the resulting composition
//! bounds is governed by two integers — the chain's *intersection
//! multiplicity* (how many of the `T_k` can pile up over a single point) and
//! its *order* (how many pullback steps cross a critical point).
//!
//! The module provides:
//!
//! * [`pull_back_chain`] / [`Chain`] — construct a chain from its tail
//!   interval and an anchor orbit, solving each component boundary by
//!   bisection between adjacent critical points;
//! * [`preimage_component`] / [`preimage_components`] — one anchored
//!   component of `f⁻¹(J)`, or all of them in order;
//! * [`t_p_interval`] / [`minimal_t_p`] — the largest interval around an
//!   orbit point with at most one other orbit point on each side, and the
//!   orbit point minimizing it;
//! * [`build_u_sequence`] / [`USequence`] — a backward sequence of one-sided
//!   intervals along a periodic orbit, each maximal subject to five
//!   structural conditions, together with its *cutting times* (the steps
//!   where a constraint other than the pullback bites) and their kinds;
//! * [`check_multiplicity_44`] — the pullback chain of `3T_p` along a
//!   periodic orbit, whose intersection multiplicity stays bounded by 44;
//! * [`verify_pullback_cr`] — cross-ratio data along a diffeomorphic chain:
//!   inner intervals are pulled back through the chain and the head and tail
//!   cross-ratios (plus scaled-neighborhood gaps) are reported;
//! * [`estimate_rho`] — monotone envelopes of head-vs-tail samples grouped
//!   by multiplicity, the empirical form of the contraction function `ρ`.

use std::collections::BTreeMap;

use crate::critical::CriticalIntervalSet;
use crate::error::{Error, Result};
use crate::interval::{intersection_multiplicity, Interval};
use crate::map::Map;
use crate::num::Real;

/// Bisection depth for component-boundary and monotone-inverse solves.
const BISECT_ITERS: usize = 80;

/// Relative slack used when re-checking chain and sequence invariants.
const CHECK_SLACK: f64 = 1e-10;

/// Relative slack for the anchor-orbit precondition of [`pull_back_chain`].
const ANCHOR_SLACK: f64 = 1e-7;

/// Relative enlargement used by the maximality probes.
const ENLARGE: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Monotone solves
// ---------------------------------------------------------------------------

/// Solves `f(y) = target` for `y` between `inside` and `outside` by
/// bisection, assuming `f` is monotone on the bracket and the values
/// `f(inside)`, `f(outside)` straddle `target`.
fn bisect_to_value<R: Real>(f: &Map<R>, inside: R, outside: R, target: R) -> Result<R> {
    let hi_side = {
        let vi = f.eval(inside)? - target;
        if vi == R::zero() {
            return Ok(inside);
        }
        vi > R::zero()
    };
    let vo = f.eval(outside)? - target;
    if vo == R::zero() {
        return Ok(outside);
    }
    if (vo > R::zero()) == hi_side {
        return Err(Error::Numeric(format!(
            "bisection bracket [{}, {}] does not straddle the target value {}",
            inside.approx_f64(),
            outside.approx_f64(),
            target.approx_f64()
        )));
    }
    let mut a = inside;
    let mut b = outside;
    for _ in 0..BISECT_ITERS {
        let mid = (a + b) / R::of(2.0);
        if mid == a || mid == b {
            break;
        }
        let vm = f.eval(mid)? - target;
        if vm == R::zero() {
            return Ok(mid);
        }
        if (vm > R::zero()) == hi_side {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) / R::of(2.0))
}

// ---------------------------------------------------------------------------
// Preimage components and chains
// ---------------------------------------------------------------------------

/// The connected component of `f⁻¹(target)` containing `x`.
///
/// The component may span critical points of `f` (where the preimage folds);
/// its ends are either solutions of `f(y) ∈ ∂target`, found by bisection on
/// the monotone lap between adjacent critical points, or ends of the domain.
///
/// Errors: `x` outside the domain, `f(x)` outside `target` (precondition),
/// and the usual evaluation failures.
pub fn preimage_component<R: Real>(
    f: &Map<R>,
    target: &Interval<R>,
    x: R,
) -> Result<Interval<R>> {
    let dom = f.domain().as_interval()?;
    if !dom.contains(x) {
        return Err(Error::OutOfDomain { x: x.approx_f64() });
    }
    let fx = f.eval(x)?;
    let scale = R::one() + target.lo().abs() + target.hi().abs();
    if target.distance_to(fx) > R::of(ANCHOR_SLACK) * scale {
        return Err(Error::Precondition(format!(
            "f({}) = {} lies outside the target interval [{}, {}]",
            x.approx_f64(),
            fx.approx_f64(),
            target.lo().approx_f64(),
            target.hi().approx_f64()
        )));
    }
    let crits: Vec<R> = f
        .critical_points(&dom)?
        .into_iter()
        .map(|c| c.x)
        .collect();
    let hi = component_end(f, target, x, &crits, &dom, true)?;
    let lo = component_end(f, target, x, &crits, &dom, false)?;
    Interval::new(lo.min(x), hi.max(x))
}

/// Walks from `x` in one direction until `f` leaves `target`, crossing
/// critical points whose values stay inside, and returns the component end.
fn component_end<R: Real>(
    f: &Map<R>,
    target: &Interval<R>,
    x: R,
    crits: &[R],
    dom: &Interval<R>,
    rightward: bool,
) -> Result<R> {
    let scale = R::one() + target.lo().abs() + target.hi().abs();
    let slack = R::epsilon() * R::of(64.0) * scale;
    let mut cur = x;
    // Each pass either returns or crosses one critical point, so the walk
    // terminates after at most one pass per critical point plus one.
    for _ in 0..=crits.len() + 1 {
        let stop = if rightward {
            crits
                .iter()
                .copied()
                .filter(|c| *c > cur)
                .fold(dom.hi(), R::min)
        } else {
            crits
                .iter()
                .copied()
                .filter(|c| *c < cur)
                .fold(dom.lo(), R::max)
        };
        let v = f.eval(stop)?;
        let inside = v >= target.lo() - slack && v <= target.hi() + slack;
        if inside {
            let at_domain_end = if rightward {
                stop >= dom.hi()
            } else {
                stop <= dom.lo()
            };
            if at_domain_end {
                return Ok(stop);
            }
            cur = stop;
            continue;
        }
        // f is monotone between cur and stop and exits through one side.
        let boundary = if v > target.hi() {
            target.hi()
        } else {
            target.lo()
        };
        return bisect_to_value(f, cur, stop, boundary);
    }
    Err(Error::Numeric(
        "component walk failed to terminate".into(),
    ))
}

/// All connected components of `f⁻¹(target)`, in increasing order.
///
/// The domain splits into monotone laps at the critical points of `f`; on
/// each lap the points mapping into `target` form one (possibly degenerate)
/// subinterval whose free ends solve `f(y) ∈ ∂target` by bisection.  Pieces
/// from adjacent laps meeting at the shared critical point — where the
/// preimage folds without leaving `target` — are merged into one component.
/// Returns an empty vector when `target` misses the range of `f`.
pub fn preimage_components<R: Real>(
    f: &Map<R>,
    target: &Interval<R>,
) -> Result<Vec<Interval<R>>> {
    let dom = f.domain().as_interval()?;
    let mut edges: Vec<R> = vec![dom.lo()];
    for c in f.critical_points(&dom)? {
        if c.x > dom.lo() && c.x < dom.hi() {
            edges.push(c.x);
        }
    }
    edges.push(dom.hi());
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite lap edges"));
    let merge_tol =
        R::epsilon() * R::of(64.0) * (R::one() + dom.lo().abs() + dom.hi().abs());
    let mut components: Vec<Interval<R>> = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let va = f.eval(a)?;
        let vb = f.eval(b)?;
        let (vlo, vhi) = if va <= vb { (va, vb) } else { (vb, va) };
        if vhi < target.lo() || vlo > target.hi() {
            continue;
        }
        // Clip the target to the lap's value range, then invert both ends.
        let lo_val = if target.lo() > vlo { target.lo() } else { vlo };
        let hi_val = if target.hi() < vhi { target.hi() } else { vhi };
        let x_at = |v: R| -> Result<R> {
            if v == va {
                Ok(a)
            } else if v == vb {
                Ok(b)
            } else {
                bisect_to_value(f, a, b, v)
            }
        };
        let piece = Interval::from_unordered(x_at(lo_val)?, x_at(hi_val)?)?;
        match components.last_mut() {
            Some(prev) if piece.lo() - prev.hi() <= merge_tol => {
                *prev = prev.hull(&piece);
            }
            _ => components.push(piece),
        }
    }
    Ok(components)
}

/// A pullback chain `T_0, …, T_m` with its anchor orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain<R> {
    intervals: Vec<Interval<R>>,
    anchor: Vec<R>,
    multiplicity: usize,
    order: usize,
}

impl<R: Real> Chain<R> {
    /// The intervals `T_0, …, T_m` in orbit order.
    pub fn intervals(&self) -> &[Interval<R>] {
        &self.intervals
    }

    /// The anchor orbit `x_0, …, x_m` with `f(x_k) = x_{k+1}` and
    /// `x_k ∈ T_k`.
    pub fn anchor(&self) -> &[R] {
        &self.anchor
    }

    /// Largest number of chain intervals sharing a common point.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// Number of pullback steps whose source interval contains a critical
    /// point (the final interval imposes no step and is not counted).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of intervals, `m + 1`.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Whether the chain is empty (never true for constructed chains).
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// The head `T_0`.
    pub fn head(&self) -> &Interval<R> {
        &self.intervals[0]
    }

    /// The tail `T_m`.
    pub fn tail(&self) -> &Interval<R> {
        self.intervals.last().expect("chains are non-empty")
    }

    /// Re-checks the defining properties and returns the violations found.
    ///
    /// For every step: the anchor point lies in its interval, the image of
    /// `T_k` stays inside `T_{k+1}`, and each end of `T_k` not resting on
    /// the domain boundary maps onto an end of `T_{k+1}`, all within a small
    /// relative slack.
    pub fn validate(&self, f: &Map<R>) -> Result<Vec<String>> {
        let mut violations = Vec::new();
        let dom = f.domain().as_interval()?;
        for (k, window) in self.intervals.windows(2).enumerate() {
            let (t, next) = (&window[0], &window[1]);
            let scale = R::one() + next.lo().abs() + next.hi().abs();
            let slack = R::of(CHECK_SLACK) * scale;
            if t.distance_to(self.anchor[k]) > slack {
                violations.push(format!(
                    "step {k}: anchor point {} escapes its interval",
                    self.anchor[k].approx_f64()
                ));
            }
            let img = f.image_interval(t)?;
            if img.lo() < next.lo() - slack || img.hi() > next.hi() + slack {
                violations.push(format!(
                    "step {k}: image [{}, {}] escapes [{}, {}]",
                    img.lo().approx_f64(),
                    img.hi().approx_f64(),
                    next.lo().approx_f64(),
                    next.hi().approx_f64()
                ));
            }
            for end in [t.lo(), t.hi()] {
                let on_domain_edge =
                    (end - dom.lo()).abs() <= slack || (dom.hi() - end).abs() <= slack;
                if on_domain_edge {
                    continue;
                }
                let fe = f.eval(end)?;
                if (fe - next.lo()).abs() > slack && (fe - next.hi()).abs() > slack {
                    violations.push(format!(
                        "step {k}: end {} maps to the interior point {}",
                        end.approx_f64(),
                        fe.approx_f64()
                    ));
                }
            }
        }
        Ok(violations)
    }
}

/// Pulls the interval `t_m` back along the anchor orbit
/// `x_0 ↦ x_1 ↦ … ↦ x_m`, producing the chain with `T_m = t_m` and `T_k`
/// the component of `f⁻¹(T_{k+1})` containing `x_k`.
///
/// Preconditions: the anchor is a genuine orbit segment (`f(x_k) = x_{k+1}`
/// up to a small relative slack) and `x_m ∈ t_m`.
pub fn pull_back_chain<R: Real>(
    f: &Map<R>,
    t_m: &Interval<R>,
    anchor: &[R],
) -> Result<Chain<R>> {
    if anchor.is_empty() {
        return Err(Error::Parameter("anchor orbit must be non-empty".into()));
    }
    let m = anchor.len() - 1;
    for k in 0..m {
        let image = f.eval(anchor[k])?;
        let slack = R::of(ANCHOR_SLACK) * (R::one() + anchor[k + 1].abs());
        if (image - anchor[k + 1]).abs() > slack {
            return Err(Error::Precondition(format!(
                "anchor is not an orbit segment: f(x_{k}) = {} but x_{} = {}",
                image.approx_f64(),
                k + 1,
                anchor[k + 1].approx_f64()
            )));
        }
    }
    let tail_scale = R::one() + anchor[m].abs();
    if t_m.distance_to(anchor[m]) > R::of(ANCHOR_SLACK) * tail_scale {
        return Err(Error::Precondition(format!(
            "anchor end {} lies outside the tail interval [{}, {}]",
            anchor[m].approx_f64(),
            t_m.lo().approx_f64(),
            t_m.hi().approx_f64()
        )));
    }
    let mut intervals = vec![*t_m; m + 1];
    for k in (0..m).rev() {
        intervals[k] = preimage_component(f, &intervals[k + 1].clone(), anchor[k])?;
    }
    let dom = f.domain().as_interval()?;
    let crits = f.critical_points(&dom)?;
    let order = intervals[..m]
        .iter()
        .filter(|t| crits.iter().any(|c| t.contains(c.x)))
        .count();
    let multiplicity = intersection_multiplicity(&intervals);
    Ok(Chain {
        intervals,
        anchor: anchor.to_vec(),
        multiplicity,
        order,
    })
}

// ---------------------------------------------------------------------------
// T_p intervals
// ---------------------------------------------------------------------------

/// The maximal interval around the orbit point `p` containing at most one
/// other orbit point strictly on each side, clipped to `ambient`.
///
/// Each end sits on the second orbit point away from `p` on that side, or on
/// the ambient boundary when fewer than two points exist there.
pub fn t_p_interval<R: Real>(
    orbit: &[R],
    p: R,
    ambient: &Interval<R>,
) -> Result<Interval<R>> {
    if orbit.is_empty() {
        return Err(Error::Parameter("orbit must be non-empty".into()));
    }
    if !ambient.contains(p) {
        return Err(Error::Precondition(format!(
            "base point {} lies outside the ambient interval",
            p.approx_f64()
        )));
    }
    let tol = R::of(1e-12) * (R::one() + p.abs() + ambient.length());
    if !orbit.iter().any(|q| (*q - p).abs() <= tol) {
        return Err(Error::Precondition(format!(
            "base point {} is not an orbit point",
            p.approx_f64()
        )));
    }
    let mut left: Vec<R> = orbit.iter().copied().filter(|q| *q < p - tol).collect();
    let mut right: Vec<R> = orbit.iter().copied().filter(|q| *q > p + tol).collect();
    left.sort_by(|a, b| b.partial_cmp(a).expect("finite orbit points"));
    right.sort_by(|a, b| a.partial_cmp(b).expect("finite orbit points"));
    left.dedup_by(|a, b| (*a - *b).abs() <= tol);
    right.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let lo = if left.len() >= 2 { left[1] } else { ambient.lo() };
    let hi = if right.len() >= 2 { right[1] } else { ambient.hi() };
    Interval::new(lo.max(ambient.lo()), hi.min(ambient.hi()))
}

/// The orbit point whose [`t_p_interval`] is shortest, with that interval.
/// Ties resolve to the smallest such point.
pub fn minimal_t_p<R: Real>(orbit: &[R], ambient: &Interval<R>) -> Result<(R, Interval<R>)> {
    if orbit.is_empty() {
        return Err(Error::Parameter("orbit must be non-empty".into()));
    }
    let mut points: Vec<R> = orbit.to_vec();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite orbit points"));
    let tol = R::of(1e-12) * (R::one() + ambient.length());
    points.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let mut best: Option<(R, Interval<R>)> = None;
    for &p in &points {
        let t = t_p_interval(orbit, p, ambient)?;
        let better = match &best {
            None => true,
            Some((_, cur)) => t.length() < cur.length(),
        };
        if better {
            best = Some((p, t));
        }
    }
    Ok(best.expect("orbit is non-empty"))
}

// ---------------------------------------------------------------------------
// U-sequences
// ---------------------------------------------------------------------------

/// Side of a one-sided interval relative to its orbit point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The interval extends to the left of the orbit point.
    Left,
    /// The interval extends to the right of the orbit point.
    Right,
}

impl Side {
    fn sign<R: Real>(self) -> R {
        match self {
            Side::Left => -R::one(),
            Side::Right => R::one(),
        }
    }

    fn flipped(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Why a backward step could not pull back the full next interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CuttingKind {
    /// A critical point of the map sits on the boundary of the interval.
    Critical,
    /// A boundary point of a critical interval `E_j` (with the orbit point
    /// outside `2E_j`) sits on the boundary of the interval.
    Boundary,
    /// One of the length caps (`κ/2`, or `κ|E_j|/2` when the orbit point
    /// lies in `2E_j`) is attained.
    Internal,
}

/// A cutting time: step `k` of one family where `g(U_k) ⊊ U_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutting {
    /// The step index.
    pub k: usize,
    /// Which of the two one-sided families was cut.
    pub family: Side,
    /// The constraint responsible.
    pub kind: CuttingKind,
}

/// Which structural cap bound a backward step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cap {
    /// Full pullback of the next interval (not a cutting).
    Pullback,
    /// Critical point of the map reached.
    LapCritical,
    /// Domain end reached.
    DomainEdge,
    /// Plain length cap `κ/2`.
    Length,
    /// Length cap `κ|E_j|/2` with the orbit point inside `2E_j`.
    LengthCrit,
    /// Touching a critical interval the orbit point must stay clear of.
    DisjointCrit,
}

/// One-sided interval sequences along a periodic orbit.
///
/// `right[k]` and `left[k]` are the intervals attached to the `k`-th orbit
/// point; the names follow the seed sides at step `n`, so the geometric side
/// of `right[k]` at earlier steps alternates with the orientation of the map
/// along the orbit and is recorded separately.
#[derive(Debug, Clone)]
pub struct USequence<R> {
    orbit: Vec<R>,
    kappa: R,
    t_p: Interval<R>,
    u_n: Interval<R>,
    right: Vec<Interval<R>>,
    left: Vec<Interval<R>>,
    sides_right: Vec<Side>,
    sides_left: Vec<Side>,
    cuttings: Vec<Cutting>,
    notes: Vec<String>,
}

impl<R: Real> USequence<R> {
    /// The orbit `p, g(p), …, gⁿ(p)` (the last entry returns to `p` up to
    /// the closing tolerance).
    pub fn orbit(&self) -> &[R] {
        &self.orbit
    }

    /// The length cap parameter `κ`.
    pub fn kappa(&self) -> R {
        self.kappa
    }

    /// The base interval `T_p` of the seed.
    pub fn t_p(&self) -> &Interval<R> {
        &self.t_p
    }

    /// The seed interval `U_n = 3·T_p` (clipped to the domain).
    pub fn u_n(&self) -> &Interval<R> {
        &self.u_n
    }

    /// The family seeded on the right of `p`.
    pub fn right(&self) -> &[Interval<R>] {
        &self.right
    }

    /// The family seeded on the left of `p`.
    pub fn left(&self) -> &[Interval<R>] {
        &self.left
    }

    /// Geometric side of `right()[k]` at its orbit point.
    pub fn sides_right(&self) -> &[Side] {
        &self.sides_right
    }

    /// Geometric side of `left()[k]` at its orbit point.
    pub fn sides_left(&self) -> &[Side] {
        &self.sides_left
    }

    /// All cutting times with their kinds.
    pub fn cutting_times(&self) -> &[Cutting] {
        &self.cuttings
    }

    /// Diagnostics gathered during construction (domain clipping and the
    /// like).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// The two-sided interval `U_k`: hull of the `k`-th members of both
    /// families (they share the orbit point).
    pub fn u_k(&self, k: usize) -> Interval<R> {
        self.right[k].hull(&self.left[k])
    }

    /// Re-checks every defining condition of both families and the
    /// maximality of each interval, returning the violations found.
    ///
    /// For each step `k < n`: the orbit point is an end of its interval;
    /// `g(U_k) ⊆ U_{k+1}`; `g` is injective on `U_k` (no critical point in
    /// the open interior); `|U_k| ≤ κ/2`; `|U_k| ≤ κ|E_j|/2` whenever the
    /// orbit point lies in `2E_j`; `U_k` misses every `E_j` whose doubled
    /// interval misses the orbit point.  Maximality: enlarging `U_k` beyond
    /// its free end must break one of these (steps clipped by the domain are
    /// skipped and noted in [`USequence::notes`]).
    pub fn validate(&self, g: &Map<R>, set: &CriticalIntervalSet<R>) -> Result<Vec<String>> {
        let mut violations = Vec::new();
        let dom = g.domain().as_interval()?;
        let crits: Vec<R> = g
            .critical_points(&dom)?
            .into_iter()
            .map(|c| c.x)
            .collect();
        let n = self.orbit.len() - 1;
        for (family, intervals, sides) in [
            (Side::Right, &self.right, &self.sides_right),
            (Side::Left, &self.left, &self.sides_left),
        ] {
            for k in 0..n {
                let x = self.orbit[k];
                let iv = &intervals[k];
                let next = &intervals[k + 1];
                let label = format!("{family:?} family, step {k}");
                let scale = R::one() + iv.lo().abs() + iv.hi().abs();
                let slack = R::of(CHECK_SLACK) * scale;
                let corner_ok = (x - iv.lo()).abs() <= slack || (x - iv.hi()).abs() <= slack;
                if !corner_ok {
                    violations.push(format!("{label}: orbit point is not a boundary point"));
                }
                for v in condition_violations(g, set, self.kappa, x, iv, next, &crits, slack)? {
                    violations.push(format!("{label}: {v}"));
                }
                // Maximality: push the free end outward and expect a failure.
                let dir: R = sides[k].sign();
                let eps = R::of(ENLARGE) * (R::one() + iv.length());
                let free_end = if sides[k] == Side::Right {
                    iv.hi()
                } else {
                    iv.lo()
                };
                let pushed = free_end + dir * eps;
                if pushed > dom.hi() || pushed < dom.lo() {
                    continue; // clipped by the domain; noted at build time
                }
                let enlarged = Interval::from_unordered(x, pushed)?;
                let broken =
                    condition_violations(g, set, self.kappa, x, &enlarged, next, &crits, slack)?;
                if broken.is_empty() {
                    violations.push(format!("{label}: interval is not maximal"));
                }
            }
        }
        Ok(violations)
    }
}

/// Violated conditions for one candidate one-sided interval, as messages.
#[allow(clippy::too_many_arguments)]
fn condition_violations<R: Real>(
    g: &Map<R>,
    set: &CriticalIntervalSet<R>,
    kappa: R,
    x: R,
    iv: &Interval<R>,
    next: &Interval<R>,
    crits: &[R],
    slack: R,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    // Injectivity first: the image test below relies on endpoint monotonicity.
    if crits.iter().any(|c| iv.contains_interior(*c)) {
        out.push("a critical point lies in the interior".to_string());
    } else {
        match (g.eval(iv.lo()), g.eval(iv.hi())) {
            (Ok(a), Ok(b)) => {
                let img = Interval::from_unordered(a, b)?;
                if img.lo() < next.lo() - slack || img.hi() > next.hi() + slack {
                    out.push(format!(
                        "image [{}, {}] escapes [{}, {}]",
                        img.lo().approx_f64(),
                        img.hi().approx_f64(),
                        next.lo().approx_f64(),
                        next.hi().approx_f64()
                    ));
                }
            }
            _ => out.push("map undefined on the interval".to_string()),
        }
    }
    if iv.length() > kappa / R::of(2.0) + slack {
        out.push(format!(
            "length {} exceeds κ/2 = {}",
            iv.length().approx_f64(),
            (kappa / R::of(2.0)).approx_f64()
        ));
    }
    for ci in set.intervals() {
        if ci.doubled().contains(x) {
            let cap = kappa * ci.interval().length() / R::of(2.0);
            if iv.length() > cap + slack {
                out.push(format!(
                    "length {} exceeds κ|E|/2 = {} for the critical interval at {}",
                    iv.length().approx_f64(),
                    cap.approx_f64(),
                    ci.a().approx_f64()
                ));
            }
        } else if iv.intersection_length(ci.interval()) > slack {
            out.push(format!(
                "interval meets the critical interval at {} it must avoid",
                ci.a().approx_f64()
            ));
        }
    }
    Ok(out)
}

/// Builds the one-sided interval sequences `U_k` of both families along the
/// periodic orbit of `p`.
///
/// `p` must be periodic of period `n` with orientation-preserving return
/// (the derivative of `gⁿ` along the orbit is positive; for an
/// orientation-reversing point pass the doubled period).  The seed is
/// `U_n = 3·T_p` clipped to the domain; each earlier interval is the maximal
/// one-sided interval at its orbit point subject to the five structural
/// conditions listed in [`USequence::validate`].  Steps where a condition
/// other than the full pullback binds are the *cutting times*; ties between
/// kinds resolve in the order critical > boundary > internal.
pub fn build_u_sequence<R: Real>(
    g: &Map<R>,
    p: R,
    n: usize,
    kappa: R,
    set: &CriticalIntervalSet<R>,
) -> Result<USequence<R>> {
    if n == 0 {
        return Err(Error::Parameter("period must be positive".into()));
    }
    if kappa <= R::zero() {
        return Err(Error::Parameter(format!(
            "κ must be positive, got {}",
            kappa.approx_f64()
        )));
    }
    let dom = g.domain().as_interval()?;
    let mut orbit = Vec::with_capacity(n + 1);
    orbit.push(p);
    for k in 0..n {
        orbit.push(g.eval(orbit[k])?);
    }
    let closing = (orbit[n] - p).abs();
    if closing > R::of(1e-6) * (R::one() + p.abs()) {
        return Err(Error::Precondition(format!(
            "base point is not periodic of period {n}: gap {}",
            closing.approx_f64()
        )));
    }
    let mut orientation = R::one();
    for &x in orbit.iter().take(n) {
        let d = g.d1(x)?;
        if d == R::zero() {
            return Err(Error::CriticalPoint { x: x.approx_f64() });
        }
        orientation *= d.signum();
    }
    if orientation < R::zero() {
        return Err(Error::Precondition(
            "orbit return is orientation-reversing: use the doubled period".into(),
        ));
    }
    let t_p = t_p_interval(&orbit[..n], p, &dom)?;
    let u_n = t_p
        .scaled(R::of(3.0))?
        .intersect(&dom)
        .ok_or_else(|| Error::Numeric("seed interval escapes the domain".into()))?;
    let crits: Vec<R> = g
        .critical_points(&dom)?
        .into_iter()
        .map(|c| c.x)
        .collect();
    let mut notes = Vec::new();
    let (right, sides_right, mut cuttings) = build_family(
        g, &orbit, kappa, set, &u_n, Side::Right, &dom, &crits, &mut notes,
    )?;
    let (left, sides_left, cuts_left) = build_family(
        g, &orbit, kappa, set, &u_n, Side::Left, &dom, &crits, &mut notes,
    )?;
    cuttings.extend(cuts_left);
    cuttings.sort_by_key(|c| (c.k, c.family == Side::Left));
    Ok(USequence {
        orbit,
        kappa,
        t_p,
        u_n,
        right,
        left,
        sides_right,
        sides_left,
        cuttings,
        notes,
    })
}

/// Builds one family (seeded on `seed_side` of the last orbit point) by
/// backward induction, returning the intervals, their geometric sides and
/// the cutting times.
#[allow(clippy::too_many_arguments)]
fn build_family<R: Real>(
    g: &Map<R>,
    orbit: &[R],
    kappa: R,
    set: &CriticalIntervalSet<R>,
    u_n: &Interval<R>,
    seed_side: Side,
    dom: &Interval<R>,
    crits: &[R],
    notes: &mut Vec<String>,
) -> Result<(Vec<Interval<R>>, Vec<Side>, Vec<Cutting>)> {
    let n = orbit.len() - 1;
    let mut sides = vec![seed_side; n + 1];
    for k in (0..n).rev() {
        let d = g.d1(orbit[k])?;
        sides[k] = if d > R::zero() {
            sides[k + 1]
        } else {
            sides[k + 1].flipped()
        };
    }
    let seed_end = match seed_side {
        Side::Right => u_n.hi(),
        Side::Left => u_n.lo(),
    };
    let seed = Interval::from_unordered(orbit[n], seed_end)?;
    if seed.is_degenerate() {
        return Err(Error::Precondition(format!(
            "the {seed_side:?} seed at {} is degenerate (orbit point on the domain boundary)",
            orbit[n].approx_f64()
        )));
    }
    let mut intervals = vec![seed; n + 1];
    let mut bindings: Vec<Vec<Cap>> = vec![Vec::new(); n + 1];
    for k in (0..n).rev() {
        let x = orbit[k];
        let side = sides[k];
        let dir: R = side.sign();
        let next = intervals[k + 1];
        let far_next = match sides[k + 1] {
            Side::Right => next.hi(),
            Side::Left => next.lo(),
        };
        let mut caps: Vec<(R, Cap)> = Vec::new();
        // Geometric reach: nearest critical point, then the domain end.
        let e_crit = crits
            .iter()
            .copied()
            .filter(|c| (*c - x) * dir > R::zero())
            .map(|c| (c - x).abs())
            .fold(None::<R>, |acc, e| {
                Some(acc.map_or(e, |a| a.min(e)))
            });
        let e_dom = if side == Side::Right {
            dom.hi() - x
        } else {
            x - dom.lo()
        };
        if e_dom <= R::zero() {
            return Err(Error::Precondition(format!(
                "orbit point {} sits on the domain boundary",
                x.approx_f64()
            )));
        }
        if let Some(e) = e_crit {
            caps.push((e, Cap::LapCritical));
        }
        caps.push((e_dom, Cap::DomainEdge));
        // Pullback of the next interval within the reachable lap.
        let e_reach = e_crit.map_or(e_dom, |e| e.min(e_dom));
        let y_full = x + dir * e_reach;
        let v_full = g.eval(y_full)?;
        let img_dir = (far_next - orbit[k + 1]).signum();
        if (v_full - far_next) * img_dir >= R::zero() {
            let y_star = bisect_to_value(g, x, y_full, far_next)?;
            caps.push(((y_star - x).abs(), Cap::Pullback));
        }
        // Length caps.
        caps.push((kappa / R::of(2.0), Cap::Length));
        for ci in set.intervals() {
            if ci.doubled().contains(x) {
                caps.push((kappa * ci.interval().length() / R::of(2.0), Cap::LengthCrit));
            } else {
                let e = ci.interval();
                if side == Side::Right && e.lo() >= x {
                    caps.push((e.lo() - x, Cap::DisjointCrit));
                } else if side == Side::Left && e.hi() <= x {
                    caps.push((x - e.hi(), Cap::DisjointCrit));
                }
            }
        }
        let e_max = caps
            .iter()
            .map(|(e, _)| *e)
            .fold(R::infinity(), R::min);
        if !e_max.is_finite() || e_max <= R::zero() {
            return Err(Error::Numeric(format!(
                "degenerate step at orbit point {}",
                x.approx_f64()
            )));
        }
        let tie = R::of(1e-9) * (R::one() + e_max);
        bindings[k] = caps
            .iter()
            .filter(|(e, _)| *e <= e_max + tie)
            .map(|(_, c)| *c)
            .collect();
        if bindings[k].contains(&Cap::DomainEdge) {
            notes.push(format!(
                "{seed_side:?} family, step {k}: interval clipped by the domain"
            ));
        }
        intervals[k] = Interval::from_unordered(x, x + dir * e_max)?;
    }
    // Cutting times: steps whose image does not fill the next interval.
    let mut cuttings = Vec::new();
    for k in 0..n {
        let far = match sides[k] {
            Side::Right => intervals[k].hi(),
            Side::Left => intervals[k].lo(),
        };
        let far_next = match sides[k + 1] {
            Side::Right => intervals[k + 1].hi(),
            Side::Left => intervals[k + 1].lo(),
        };
        let img = g.eval(far)?;
        let slack = R::of(CHECK_SLACK) * (R::one() + far_next.abs());
        if (img - far_next).abs() <= slack {
            continue;
        }
        let kind = if bindings[k].contains(&Cap::LapCritical) {
            CuttingKind::Critical
        } else if bindings[k].contains(&Cap::DisjointCrit) {
            CuttingKind::Boundary
        } else if bindings[k].contains(&Cap::Length) || bindings[k].contains(&Cap::LengthCrit) {
            CuttingKind::Internal
        } else {
            notes.push(format!(
                "{seed_side:?} family, step {k}: cutting limited by the domain"
            ));
            CuttingKind::Internal
        };
        cuttings.push(Cutting {
            k,
            family: seed_side,
            kind,
        });
    }
    Ok((intervals, sides, cuttings))
}

// ---------------------------------------------------------------------------
// Multiplicity of the 3T_p pullback chain
// ---------------------------------------------------------------------------

/// Result of [`check_multiplicity_44`].
#[derive(Debug, Clone)]
pub struct Multiplicity44Report<R> {
    /// The pullback chain of `u_n` along one period of the orbit.
    pub chain: Chain<R>,
    /// Its intersection multiplicity.
    pub multiplicity: usize,
    /// The universal ceiling the multiplicity is compared against.
    pub bound: usize,
    /// Whether `multiplicity ≤ bound`.
    pub ok: bool,
    /// The base point minimizing `|T_p|`.
    pub base_point: R,
    /// Its `T_p` interval.
    pub t_p: Interval<R>,
    /// The chain tail `U_n = 3·T_p` clipped to the domain.
    pub u_n: Interval<R>,
    /// Distinct orbit points in the open interior of `u_n`.
    pub interior_orbit_points: usize,
}

/// Pulls `3·T_p` back along one period of a periodic orbit and checks that
/// the resulting chain's intersection multiplicity stays within the
/// universal ceiling 44.
///
/// `orbit` lists one period `x_0, …, x_{n−1}` of a cycle of `g` (in orbit
/// order); the base point is chosen to minimize `|T_p|`.
pub fn check_multiplicity_44<R: Real>(
    g: &Map<R>,
    orbit: &[R],
) -> Result<Multiplicity44Report<R>> {
    let n = orbit.len();
    if n == 0 {
        return Err(Error::Parameter("orbit must be non-empty".into()));
    }
    for k in 0..n {
        let img = g.eval(orbit[k])?;
        let expect = orbit[(k + 1) % n];
        if (img - expect).abs() > R::of(ANCHOR_SLACK) * (R::one() + expect.abs()) {
            return Err(Error::Precondition(format!(
                "points do not form a cycle: g(x_{k}) = {} but x_{} = {}",
                img.approx_f64(),
                (k + 1) % n,
                expect.approx_f64()
            )));
        }
    }
    let dom = g.domain().as_interval()?;
    let (base_point, t_p) = minimal_t_p(orbit, &dom)?;
    let u_n = t_p
        .scaled(R::of(3.0))?
        .intersect(&dom)
        .ok_or_else(|| Error::Numeric("seed interval escapes the domain".into()))?;
    let scale = R::one() + dom.length();
    let start = orbit
        .iter()
        .position(|q| (*q - base_point).abs() <= R::of(1e-12) * scale)
        .expect("base point comes from the orbit");
    let anchor: Vec<R> = (0..=n).map(|k| orbit[(start + k) % n]).collect();
    let chain = pull_back_chain(g, &u_n, &anchor)?;
    let multiplicity = chain.multiplicity();
    let tol = R::of(1e-12) * scale;
    let mut points: Vec<R> = orbit.to_vec();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite orbit points"));
    points.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let interior_orbit_points = points
        .iter()
        .filter(|q| u_n.contains_interior(**q))
        .count();
    Ok(Multiplicity44Report {
        chain,
        multiplicity,
        bound: 44,
        ok: multiplicity <= 44,
        base_point,
        t_p,
        u_n,
        interior_orbit_points,
    })
}

// ---------------------------------------------------------------------------
// Cross-ratios along a chain
// ---------------------------------------------------------------------------

/// One step of [`verify_pullback_cr`]: the chain interval, the pulled-back
/// inner interval and their cross-ratio.
#[derive(Debug, Clone, Copy)]
pub struct PullbackCrStep<R> {
    /// Chain interval `T_k`.
    pub t: Interval<R>,
    /// Inner interval `J_k = g^k(J_0)`.
    pub j: Interval<R>,
    /// Cross-ratio `D(T_k, J_k)`.
    pub cross_ratio: R,
}

/// Result of [`verify_pullback_cr`].
#[derive(Debug, Clone)]
pub struct PullbackCrReport<R> {
    /// `D(T_0, J_0)` at the head of the chain.
    pub d_head: R,
    /// `D(T_m, J_m)` at the tail.
    pub d_tail: R,
    /// Largest `δ` with `(1+2δ)J_0 ⊆ T_0`.
    pub eps_head: R,
    /// Largest `δ` with `(1+2δ)J_m ⊆ T_m`.
    pub eps_tail: R,
    /// The chain's intersection multiplicity.
    pub multiplicity: usize,
    /// Per-step intervals and cross-ratios.
    pub steps: Vec<PullbackCrStep<R>>,
}

/// Pulls an inner interval back through a diffeomorphic chain and reports
/// the cross-ratios at every step.
///
/// `j_m` must lie strictly inside the chain tail, and the `m`-th iterate of
/// `g` must be a diffeomorphism on the chain head (errors with `NotDiffeo`
/// otherwise).  `J_0` is found by solving `g^m(y) = ∂j_m` on the head with
/// bisection; the intermediate `J_k` are its forward images.  Each
/// `(d_tail, d_head)` or `(eps_tail, eps_head)` pair is one sample for
/// [`estimate_rho`].
pub fn verify_pullback_cr<R: Real>(
    g: &Map<R>,
    chain: &Chain<R>,
    j_m: &Interval<R>,
) -> Result<PullbackCrReport<R>> {
    let m = chain.len() - 1;
    let t0 = *chain.head();
    let tm = *chain.tail();
    let d_tail = crate::crossratio::cross_ratio(&tm, j_m)?;
    let gm = g.iterate(m as u32);
    if m > 0 && !gm.is_diffeo_on(&t0)? {
        return Err(Error::NotDiffeo {
            lo: t0.lo().approx_f64(),
            hi: t0.hi().approx_f64(),
        });
    }
    let j0 = if m == 0 {
        *j_m
    } else {
        let a = gm.eval(t0.lo())?;
        let b = gm.eval(t0.hi())?;
        let increasing = b >= a;
        let (target_lo, target_hi) = if increasing {
            (j_m.lo(), j_m.hi())
        } else {
            (j_m.hi(), j_m.lo())
        };
        let lo = bisect_to_value(&gm, t0.lo(), t0.hi(), target_lo)?;
        let hi = bisect_to_value(&gm, t0.lo(), t0.hi(), target_hi)?;
        Interval::from_unordered(lo, hi)?
    };
    let mut steps = Vec::with_capacity(m + 1);
    for (k, t) in chain.intervals().iter().enumerate() {
        let j = if k == 0 {
            j0
        } else {
            g.iterate(k as u32).image_interval(&j0)?
        };
        let cross_ratio = crate::crossratio::cross_ratio(t, &j)?;
        steps.push(PullbackCrStep {
            t: *t,
            j,
            cross_ratio,
        });
    }
    let d_head = steps[0].cross_ratio;
    let eps_head = t0.scaled_gap(&steps[0].j).ok_or_else(|| {
        Error::Degenerate("head inner interval escapes the head".into())
    })?;
    let eps_tail = tm
        .scaled_gap(j_m)
        .ok_or_else(|| Error::Degenerate("tail inner interval escapes the tail".into()))?;
    Ok(PullbackCrReport {
        d_head,
        d_tail,
        eps_head,
        eps_tail,
        multiplicity: chain.multiplicity(),
        steps,
    })
}

// ---------------------------------------------------------------------------
// Empirical contraction envelopes
// ---------------------------------------------------------------------------

/// One head/tail observation from a chain, grouped by multiplicity.
#[derive(Debug, Clone, Copy)]
pub struct RhoSample<R> {
    /// Tail-side quantity (input of the contraction function).
    pub input: R,
    /// Head-side quantity (output of the contraction function).
    pub output: R,
    /// Intersection multiplicity of the chain the sample came from.
    pub multiplicity: usize,
}

/// Monotone envelope of the samples of one multiplicity class.
#[derive(Debug, Clone)]
pub struct RhoEnvelope<R> {
    /// The multiplicity class.
    pub multiplicity: usize,
    /// `(input, envelope)` pairs, nondecreasing in both coordinates.
    pub points: Vec<(R, R)>,
}

/// Monotone (isotonic) envelopes of output vs. input per multiplicity.
///
/// With `upper = false` the result is the largest nondecreasing function
/// lying below the data (suffix minima after sorting by input) — the shape
/// of an empirical lower contraction bound.  With `upper = true` it is the
/// smallest nondecreasing function above the data (prefix maxima).  Both
/// constructions commute with log-log rescaling, so the envelopes can be
/// plotted on either scale.  Samples with non-positive or non-finite
/// coordinates are ignored.
pub fn estimate_rho<R: Real>(samples: &[RhoSample<R>], upper: bool) -> Vec<RhoEnvelope<R>> {
    let mut groups: BTreeMap<usize, Vec<(R, R)>> = BTreeMap::new();
    for s in samples {
        let usable = s.input.is_finite()
            && s.output.is_finite()
            && s.input > R::zero()
            && s.output > R::zero();
        if usable {
            groups
                .entry(s.multiplicity)
                .or_default()
                .push((s.input, s.output));
        }
    }
    let mut envelopes = Vec::with_capacity(groups.len());
    for (multiplicity, mut pts) in groups {
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite samples"));
        // Collapse duplicate inputs onto the envelope-relevant output.
        let mut collapsed: Vec<(R, R)> = Vec::with_capacity(pts.len());
        for (x, y) in pts {
            match collapsed.last_mut() {
                Some((px, py)) if *px == x => {
                    *py = if upper { py.max(y) } else { py.min(y) };
                }
                _ => collapsed.push((x, y)),
            }
        }
        if upper {
            let mut run = R::neg_infinity();
            for p in collapsed.iter_mut() {
                run = run.max(p.1);
                p.1 = run;
            }
        } else {
            let mut run = R::infinity();
            for p in collapsed.iter_mut().rev() {
                run = run.min(p.1);
                p.1 = run;
            }
        }
        envelopes.push(RhoEnvelope {
            multiplicity,
            points: collapsed,
        });
    }
    envelopes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::compute_critical_intervals;
    use crate::interval::Domain;
    use crate::map::{Expr, Map};
    use approx::assert_relative_eq;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    /// Test-local monotone solve, independent of the module's bisection.
    fn solve<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, target: f64) -> f64 {
        let sa = f(a) - target;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(m) - target) * sa > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn pull_back_logistic_half_interval() {
        let f = Map::logistic(4.0);
        let x0 = 0.1;
        let anchor = [x0, f.eval(x0).unwrap()];
        let chain = pull_back_chain(&f, &iv(0.0, 0.5), &anchor).unwrap();
        assert_eq!(chain.len(), 2);
        let head = chain.head();
        assert_relative_eq!(head.lo(), 0.0, epsilon = 1e-12);
        // The right end solves 4x(1−x) = 1/2, i.e. x = (1−√½)/2.
        assert_relative_eq!(
            head.hi(),
            (1.0 - 0.5f64.sqrt()) / 2.0,
            epsilon = 1e-10
        );
        assert_eq!(chain.order(), 0);
        assert_eq!(chain.multiplicity(), 2);
        assert!(chain.validate(&f).unwrap().is_empty());
    }

    #[test]
    fn identity_chain_repeats_the_interval() {
        let f = Map::new(
            Expr::affine(1.0, 0.0).unwrap(),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let t = iv(0.2, 0.6);
        let chain = pull_back_chain(&f, &t, &[0.3, 0.3, 0.3]).unwrap();
        assert_eq!(chain.len(), 3);
        for k in 0..3 {
            assert_eq!(chain.intervals()[k], t);
        }
        assert_eq!(chain.multiplicity(), 3);
        assert_eq!(chain.order(), 0);
        assert!(chain.validate(&f).unwrap().is_empty());
    }

    #[test]
    fn anchor_mismatch_is_rejected() {
        let f = Map::logistic(4.0);
        // 0.9 is not the image of 0.1.
        let err = pull_back_chain(&f, &iv(0.0, 1.0), &[0.1, 0.9]).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        // Anchor end outside the tail interval.
        let err = pull_back_chain(&f, &iv(0.0, 0.2), &[0.1, 0.36]).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        // Preimage component demands f(x) inside the target.
        let err = preimage_component(&f, &iv(0.0, 0.2), 0.1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn preimage_components_examples() {
        // Affine halving: one piece, or none when the target misses the
        // range [0, 1/2].
        let f = Map::new(
            Expr::affine(0.5, 0.0).unwrap(),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let pieces = preimage_components(&f, &iv(0.3, 0.4)).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_relative_eq!(pieces[0].lo(), 0.6, epsilon = 1e-12);
        assert_relative_eq!(pieces[0].hi(), 0.8, epsilon = 1e-12);
        assert!(preimage_components(&f, &iv(0.6, 0.8)).unwrap().is_empty());

        // Logistic at a = 4: a target straddling the critical value folds
        // into one component: 4x(1−x) ≥ 0.84 exactly on [0.3, 0.7].
        let g = Map::logistic(4.0);
        let pieces = preimage_components(&g, &iv(0.84, 1.0)).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_relative_eq!(pieces[0].lo(), 0.3, epsilon = 1e-10);
        assert_relative_eq!(pieces[0].hi(), 0.7, epsilon = 1e-10);

        // A target below the critical value has one component per branch:
        // 4x(1−x) ∈ [0.5, 0.64] on [(1−√½)/2, 0.2] ∪ [0.8, (1+√½)/2].
        let pieces = preimage_components(&g, &iv(0.5, 0.64)).unwrap();
        assert_eq!(pieces.len(), 2);
        assert_relative_eq!(
            pieces[0].lo(),
            (1.0 - 0.5f64.sqrt()) / 2.0,
            epsilon = 1e-10
        );
        assert_relative_eq!(pieces[0].hi(), 0.2, epsilon = 1e-10);
        assert_relative_eq!(pieces[1].lo(), 0.8, epsilon = 1e-10);
        assert_relative_eq!(
            pieces[1].hi(),
            (1.0 + 0.5f64.sqrt()) / 2.0,
            epsilon = 1e-10
        );

        // A target touching the range only at the maximum collapses to the
        // critical point itself.
        let pieces = preimage_components(&g, &iv(1.0, 1.25)).unwrap();
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].is_degenerate());
        assert_relative_eq!(pieces[0].lo(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn component_spans_a_critical_point() {
        let f = Map::logistic(4.0);
        let t1 = iv(0.4, 1.0);
        let x0 = 0.3;
        let chain = pull_back_chain(&f, &t1, &[x0, f.eval(x0).unwrap()]).unwrap();
        let head = chain.head();
        // Both ends solve 4x(1−x) = 0.4: x = (1 ∓ √0.6)/2, with the fold at 1/2
        // inside.
        assert_relative_eq!(head.lo(), (1.0 - 0.6f64.sqrt()) / 2.0, epsilon = 1e-10);
        assert_relative_eq!(head.hi(), (1.0 + 0.6f64.sqrt()) / 2.0, epsilon = 1e-10);
        assert_eq!(chain.order(), 1);
        assert!(chain.validate(&f).unwrap().is_empty());
        // The folded component is not a diffeomorphic pullback.
        let err = verify_pullback_cr(&f, &chain, &iv(0.5, 0.9)).unwrap_err();
        assert!(matches!(err, Error::NotDiffeo { .. }));
    }

    #[test]
    fn multi_step_chain_is_valid() {
        let f = Map::logistic(4.0);
        let mut anchor = vec![0.1];
        for k in 0..3 {
            anchor.push(f.eval(anchor[k]).unwrap());
        }
        let t3 = iv(0.28, 0.30);
        let chain = pull_back_chain(&f, &t3, &anchor).unwrap();
        assert_eq!(chain.len(), 4);
        // One step back: the branch of f through x₂ ≈ 0.9216 is decreasing, so
        // the ends solve 4x(1−x) = 0.30 and 0.28 on [1/2, 1].
        let t2 = &chain.intervals()[2];
        assert_relative_eq!(t2.lo(), (1.0 + 0.70f64.sqrt()) / 2.0, epsilon = 1e-10);
        assert_relative_eq!(t2.hi(), (1.0 + 0.72f64.sqrt()) / 2.0, epsilon = 1e-10);
        assert_eq!(chain.order(), 0);
        assert_eq!(chain.multiplicity(), 1);
        assert!(chain.validate(&f).unwrap().is_empty());

        // Cross-ratio transport along the diffeomorphic chain.
        let j3 = iv(0.285, 0.295);
        let report = verify_pullback_cr(&f, &chain, &j3).unwrap();
        assert_eq!(report.steps.len(), 4);
        assert_eq!(report.multiplicity, 1);
        assert!(report.d_head > 1.0 && report.d_tail > 1.0);
        assert!(report.eps_head > 0.0 && report.eps_tail > 0.0);
        // Independent check of the head: invert g³ on the head by bisection.
        let g3 = |x: f64| {
            let mut y = x;
            for _ in 0..3 {
                y = 4.0 * y * (1.0 - y);
            }
            y
        };
        let t0 = chain.head();
        let lo = solve(g3, t0.lo(), t0.hi(), j3.lo());
        let hi = solve(g3, t0.lo(), t0.hi(), j3.hi());
        let j0 = Interval::from_unordered(lo, hi).unwrap();
        let d_oracle = crate::crossratio::cross_ratio(t0, &j0).unwrap();
        assert_relative_eq!(report.d_head, d_oracle, max_relative = 1e-9);
    }

    #[test]
    fn t_p_examples() {
        let ambient = iv(-1.0, 2.0);
        // Five points, base in the middle: ends on the second point per side.
        let t = t_p_interval(&[0.1, 0.3, 0.5, 0.7, 0.9], 0.5, &ambient).unwrap();
        assert_eq!(t, iv(0.1, 0.9));
        // A fixed point alone: clipped by the ambient interval.
        let t = t_p_interval(&[0.4], 0.4, &ambient).unwrap();
        assert_eq!(t, ambient);
        // Base at the left end of the orbit: left side runs to the ambient end.
        let t = t_p_interval(&[0.2, 0.4, 0.6], 0.2, &ambient).unwrap();
        assert_eq!(t, iv(-1.0, 0.6));
        // The base point must belong to the orbit and the ambient interval.
        assert!(t_p_interval(&[0.2, 0.4], 0.3, &ambient).is_err());
        assert!(t_p_interval(&[0.2], 5.0, &ambient).is_err());
    }

    #[test]
    fn minimal_t_p_picks_the_shortest() {
        let ambient = iv(0.0, 1.0);
        let orbit = [0.2337, 0.686, 0.9347];
        let (p, t) = minimal_t_p(&orbit, &ambient).unwrap();
        assert_eq!(p, 0.9347);
        assert_eq!(t, iv(0.2337, 1.0));
    }

    #[test]
    fn u_sequence_cubic_internal_cut() {
        // g(x) = x³ − 1.2x fixes 0 with g'(0) = −1.2: the return after two
        // steps preserves orientation.
        let g = Map::cubic(-1.2, -1.5, 1.5).unwrap();
        let set = compute_critical_intervals(&g).unwrap();
        assert_eq!(set.d_e(), 0);
        let seq = build_u_sequence(&g, 0.0, 2, 0.1, &set).unwrap();
        assert_eq!(seq.sides_right(), &[Side::Right, Side::Left, Side::Right]);
        assert_eq!(seq.right()[2], iv(0.0, 1.5));
        // κ/2 bites one step back...
        assert_eq!(seq.right()[1], iv(-0.05, 0.0));
        // ...and the full pullback of it bites at the head: the end solves
        // g(y) = −0.05 on [0, √0.4].
        let y = solve(|x| x * x * x - 1.2 * x, 0.0, 0.63, -0.05);
        assert_relative_eq!(seq.right()[0].hi(), y, epsilon = 1e-9);
        assert_eq!(seq.right()[0].lo(), 0.0);
        // The map is odd, so the left family mirrors the right one.
        assert_relative_eq!(seq.left()[0].lo(), -y, epsilon = 1e-9);
        assert_eq!(seq.left()[1], iv(0.0, 0.05));
        // Exactly one cutting per family, at step 1, of internal kind.
        let cuts = seq.cutting_times();
        assert_eq!(cuts.len(), 2);
        for c in cuts {
            assert_eq!(c.k, 1);
            assert_eq!(c.kind, CuttingKind::Internal);
        }
        assert!(seq.validate(&g, &set).unwrap().is_empty());
    }

    #[test]
    fn u_sequence_logistic_critical_cut() {
        // Orientation-preserving two-cycle of the logistic map at a = 3.2.
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let set = compute_critical_intervals(&g).unwrap();
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        let p_minus = (a + 1.0 - s) / (2.0 * a);
        let p_plus = (a + 1.0 + s) / (2.0 * a);
        assert_relative_eq!(g.eval(p_minus).unwrap(), p_plus, max_relative = 1e-12);
        let seq = build_u_sequence(&g, p_minus, 2, 2.0, &set).unwrap();
        // With κ huge and no critical intervals, the only obstructions are the
        // fold of g and the pullback itself.
        assert_eq!(seq.u_n(), &iv(0.0, 1.0));
        assert_relative_eq!(seq.right()[1].lo(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(seq.right()[1].hi(), p_plus, epsilon = 1e-12);
        assert_relative_eq!(seq.right()[0].lo(), p_minus, epsilon = 1e-12);
        assert_relative_eq!(
            seq.right()[0].hi(),
            (1.0 + 0.375f64.sqrt()) / 2.0,
            epsilon = 1e-9
        );
        assert_relative_eq!(seq.left()[0].lo(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(seq.left()[0].hi(), p_minus, epsilon = 1e-12);
        let cuts = seq.cutting_times();
        assert_eq!(cuts.len(), 2);
        assert!(cuts.contains(&Cutting {
            k: 0,
            family: Side::Left,
            kind: CuttingKind::Critical
        }));
        assert!(cuts.contains(&Cutting {
            k: 1,
            family: Side::Right,
            kind: CuttingKind::Critical
        }));
        assert!(seq.validate(&g, &set).unwrap().is_empty());
    }

    #[test]
    fn u_sequence_with_critical_interval_caps() {
        // g(x) = x³ + 0.01x: Dg has roots ±i·b with b = √(0.01/3), so one
        // critical interval E of length 4b straddles the fixed point 0.
        let g = Map::cubic(0.01, -1.5, 1.5).unwrap();
        let set = compute_critical_intervals(&g).unwrap();
        assert_eq!(set.d_e(), 1);
        let b = (0.01f64 / 3.0).sqrt();
        let kappa = 0.05;
        let seq = build_u_sequence(&g, 0.0, 1, kappa, &set).unwrap();
        // 0 ∈ 2E, so the κ|E|/2 cap binds on both sides.
        let cap = kappa * 4.0 * b / 2.0;
        assert_relative_eq!(seq.right()[0].hi(), cap, max_relative = 1e-12);
        assert_relative_eq!(seq.left()[0].lo(), -cap, max_relative = 1e-12);
        let cuts = seq.cutting_times();
        assert_eq!(cuts.len(), 2);
        for c in cuts {
            assert_eq!(c.k, 0);
            assert_eq!(c.kind, CuttingKind::Internal);
        }
        assert!(seq.validate(&g, &set).unwrap().is_empty());
    }

    #[test]
    fn u_sequence_boundary_cut() {
        // Same map, but based at the fixed point √0.99, far from the critical
        // interval: walking left, the sequence must stop where E begins.
        let g = Map::cubic(0.01, -1.5, 1.5).unwrap();
        let set = compute_critical_intervals(&g).unwrap();
        let b = (0.01f64 / 3.0).sqrt();
        let p = 0.99f64.sqrt();
        let seq = build_u_sequence(&g, p, 1, 2.0, &set).unwrap();
        // Left family: capped by the right end of E = [−2b, 2b].
        assert_relative_eq!(seq.left()[0].lo(), 2.0 * b, max_relative = 1e-10);
        assert_relative_eq!(seq.left()[0].hi(), p, epsilon = 1e-12);
        // Right family: the full pullback binds (g(y) = 1.5), so no cutting.
        let y = solve(|x| x * x * x + 0.01 * x, p, 1.5, 1.5);
        assert_relative_eq!(seq.right()[0].hi(), y, epsilon = 1e-9);
        let cuts = seq.cutting_times();
        assert_eq!(cuts.len(), 1);
        assert_eq!(
            cuts[0],
            Cutting {
                k: 0,
                family: Side::Left,
                kind: CuttingKind::Boundary
            }
        );
        assert!(seq.validate(&g, &set).unwrap().is_empty());
    }

    #[test]
    fn u_sequence_rejects_bad_inputs() {
        let g = Map::logistic(2.8);
        let set = compute_critical_intervals(&g).unwrap();
        let fixed = 1.0 - 1.0 / 2.8;
        assert!(matches!(
            build_u_sequence(&g, fixed, 0, 0.1, &set).unwrap_err(),
            Error::Parameter(_)
        ));
        assert!(matches!(
            build_u_sequence(&g, fixed, 2, -0.1, &set).unwrap_err(),
            Error::Parameter(_)
        ));
        // Not periodic at all.
        assert!(matches!(
            build_u_sequence(&g, 0.123, 1, 0.1, &set).unwrap_err(),
            Error::Precondition(_)
        ));
        // g'(fixed) = −0.8 < 0: period 1 reverses orientation...
        let err = build_u_sequence(&g, fixed, 1, 0.1, &set).unwrap_err();
        match err {
            Error::Precondition(msg) => assert!(msg.contains("doubled")),
            other => panic!("unexpected error {other:?}"),
        }
        // ...while the doubled period works.
        let seq = build_u_sequence(&g, fixed, 2, 0.2, &set).unwrap();
        assert!(seq.validate(&g, &set).unwrap().is_empty());
        assert_relative_eq!(seq.right()[1].length(), 0.1, max_relative = 1e-12);
    }

    #[test]
    fn multiplicity_check_fixed_point() {
        let g = Map::logistic(2.5);
        let report = check_multiplicity_44(&g, &[0.6]).unwrap();
        assert!(report.ok);
        assert_eq!(report.multiplicity, 2);
        assert_eq!(report.base_point, 0.6);
        assert_eq!(report.t_p, iv(0.0, 1.0));
        assert_eq!(report.u_n, iv(0.0, 1.0));
        assert_eq!(report.interior_orbit_points, 1);
        assert!(report.chain.validate(&g).unwrap().is_empty());
    }

    #[test]
    fn multiplicity_check_two_cycle() {
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        let cycle = [(a + 1.0 - s) / (2.0 * a), (a + 1.0 + s) / (2.0 * a)];
        let report = check_multiplicity_44(&g, &cycle).unwrap();
        assert!(report.ok);
        assert_eq!(report.multiplicity, 3);
        assert_eq!(report.interior_orbit_points, 2);
        // An out-of-order "cycle" is rejected.
        assert!(check_multiplicity_44(&g, &[cycle[0], 0.3]).is_err());
    }

    #[test]
    fn multiplicity_check_three_cycle() {
        // Attracting three-cycle inside the period-3 window.
        let g = Map::logistic(3.83);
        let mut x = 0.5_f64;
        for _ in 0..6000 {
            x = g.eval(x).unwrap();
        }
        let orbit = [x, g.eval(x).unwrap(), g.iterate(2).eval(x).unwrap()];
        assert!((g.iterate(3).eval(x).unwrap() - x).abs() < 1e-10);
        let report = check_multiplicity_44(&g, &orbit).unwrap();
        assert!(report.ok);
        assert_eq!(report.multiplicity, 4);
        assert_eq!(report.interior_orbit_points, 3);
    }

    #[test]
    fn pullback_cr_single_interval() {
        let f = Map::logistic(4.0);
        let chain = pull_back_chain(&f, &iv(0.3, 0.45), &[0.4]).unwrap();
        let report = verify_pullback_cr(&f, &chain, &iv(0.35, 0.40)).unwrap();
        assert_eq!(report.d_head, report.d_tail);
        assert_eq!(report.eps_head, report.eps_tail);
        assert_eq!(report.steps.len(), 1);
    }

    #[test]
    fn pullback_cr_affine_chain() {
        // Affine maps preserve cross-ratios exactly.
        let f = Map::new(
            Expr::affine(0.5, 0.25).unwrap(),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let chain = pull_back_chain(&f, &iv(0.4, 0.6), &[0.5, 0.5, 0.5]).unwrap();
        assert_relative_eq!(chain.intervals()[0].lo(), 0.1, epsilon = 1e-12);
        assert_relative_eq!(chain.intervals()[0].hi(), 0.9, epsilon = 1e-12);
        assert_relative_eq!(chain.intervals()[1].lo(), 0.3, epsilon = 1e-12);
        assert_relative_eq!(chain.intervals()[1].hi(), 0.7, epsilon = 1e-12);
        let report = verify_pullback_cr(&f, &chain, &iv(0.45, 0.55)).unwrap();
        assert_relative_eq!(report.d_head, 8.0, max_relative = 1e-12);
        assert_relative_eq!(report.d_tail, 8.0, max_relative = 1e-12);
        assert_relative_eq!(report.eps_head, report.eps_tail, max_relative = 1e-12);
        assert_relative_eq!(report.eps_tail, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn rho_envelopes() {
        let samples: Vec<RhoSample<f64>> = vec![
            RhoSample { input: 0.1, output: 0.20, multiplicity: 1 },
            RhoSample { input: 0.2, output: 0.15, multiplicity: 1 },
            RhoSample { input: 0.3, output: 0.30, multiplicity: 1 },
            RhoSample { input: 0.2, output: 0.40, multiplicity: 2 },
            RhoSample { input: 0.2, output: 0.35, multiplicity: 2 },
            // Ignored: not in the positive quadrant.
            RhoSample { input: -1.0, output: 0.1, multiplicity: 1 },
            RhoSample { input: 0.1, output: 0.0, multiplicity: 1 },
        ];
        let lower = estimate_rho(&samples, false);
        assert_eq!(lower.len(), 2);
        assert_eq!(lower[0].multiplicity, 1);
        assert_eq!(
            lower[0].points,
            vec![(0.1, 0.15), (0.2, 0.15), (0.3, 0.30)]
        );
        // Duplicate inputs collapse to the smaller output for the lower
        // envelope, the larger one for the upper envelope.
        assert_eq!(lower[1].points, vec![(0.2, 0.35)]);
        let upper = estimate_rho(&samples, true);
        assert_eq!(
            upper[0].points,
            vec![(0.1, 0.20), (0.2, 0.20), (0.3, 0.30)]
        );
        assert_eq!(upper[1].points, vec![(0.2, 0.40)]);
        // Envelopes are monotone and sit on the correct side of the data.
        for env in lower.iter() {
            for w in env.points.windows(2) {
                assert!(w[0].1 <= w[1].1);
            }
        }
    }
}
