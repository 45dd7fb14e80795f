//! Periodic orbits, multipliers, periodic intervals and packs.
//!
//! A periodic point `p` of (minimal) period `n` for a map `g` carries a
//! *multiplier* `Dgⁿ(p)`.  Its *orientation-preserving period* is `n` when
//! the multiplier is non-negative and `2n` otherwise.  A closed interval `I`
//! is *periodic* with period `n` when `gⁿ(I) = I` and `gⁿ` restricted to `I`
//! is a bijection; such an interval can only contain periodic points of
//! periods `n`, `2n` and `n/2`.  A *pack* is a maximal collection of
//! periodic points sharing one periodic interval (possibly degenerate) —
//! the natural grouping in which whole families of attractors are created
//! and destroyed together — and all points of a pack share one
//! orientation-preserving period.
//!
//! The module provides:
//!
//! * [`find_periodic_orbits`] — all period-`n` orbits inside a region, by a
//!   sign-change scan of `gⁿ(x) − x` with safeguarded Newton polishing;
//!   cycles are deduplicated, orbits of divisor periods are excluded, and
//!   suspected tangential roots (multiplier ≈ +1) are flagged, not dropped;
//! * [`classify_orbit`] — attracting / repelling-expansive / neutral-band
//!   classification of a multiplier against an expansion threshold `ρ`;
//! * [`group_into_packs`] — greedy interval growth between adjacent
//!   periodic points: the spanned interval joins two orbits exactly when
//!   the return map fixes its endpoints and is monotone on it, and the
//!   resulting equivalence classes become [`PeriodicPack`]s.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::Map;
use crate::num::Real;

/// Default number of scan cells used by [`find_periodic_orbits`].
pub const DEFAULT_SCAN_CELLS: usize = 1 << 20;

/// Width of the band `| |Dgⁿ(p)| − 1 | < NEUTRAL_BAND` that is declared
/// neutral: the attracting/repelling dichotomy is exact in theory, numerics
/// need a stated cutoff.
pub const NEUTRAL_BAND: f64 = 1e-6;

/// Iteration budget for the Newton/bisection polishing loops.
const POLISH_ITERS: usize = 80;

/// Interior samples used by the bijectivity test of a return map.
const MONOTONE_SAMPLES: usize = 64;

// ---------------------------------------------------------------------------
// Orbit iteration helpers
// ---------------------------------------------------------------------------

/// `gⁿ(x)`, or `None` when an iterate leaves the domain or stops being
/// finite.
fn iterate_opt<R: Real>(g: &Map<R>, x: R, n: usize) -> Option<R> {
    let mut y = x;
    for _ in 0..n {
        y = g.eval(y).ok()?;
        if !y.is_finite() {
            return None;
        }
    }
    Some(y)
}

/// `(gⁿ(x), Dgⁿ(x))` by the chain rule, or `None` on escape.
fn iterate_jet1<R: Real>(g: &Map<R>, x: R, n: usize) -> Option<(R, R)> {
    let mut y = x;
    let mut d = R::one();
    for _ in 0..n {
        let j = g.jet(y).ok()?;
        d = d * j.d1;
        y = j.f;
        if !y.is_finite() || !d.is_finite() {
            return None;
        }
    }
    Some((y, d))
}

/// `(Dgⁿ(x) − 1, D²gⁿ(x))`, or `None` on escape.
fn dh_d2h<R: Real>(g: &Map<R>, x: R, n: usize) -> Option<(R, R)> {
    let mut y = x;
    let mut d = R::one();
    let mut s = R::zero();
    for _ in 0..n {
        let j = g.jet(y).ok()?;
        s = j.d2 * d * d + j.d1 * s;
        d = j.d1 * d;
        y = j.f;
        if !y.is_finite() || !d.is_finite() || !s.is_finite() {
            return None;
        }
    }
    Some((d - R::one(), s))
}

/// Proper divisors of `n` (all divisors except `n` itself), ascending.
fn proper_divisors(n: usize) -> Vec<usize> {
    (1..n).filter(|m| n % m == 0).collect()
}

/// All divisors of `n`, ascending.
fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|m| n % m == 0).collect()
}

// ---------------------------------------------------------------------------
// Periodic orbits
// ---------------------------------------------------------------------------

/// One periodic cycle of a map: the points of the cycle in orbit order
/// (starting from the smallest), the multiplier, and a tangency flag.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit<R> {
    points: Vec<R>,
    multiplier: R,
    tangential: bool,
}

impl<R: Real> PeriodicOrbit<R> {
    /// Builds an orbit from one cycle of points, validating that they form
    /// a cycle of `g` of minimal period `points.len()`.
    ///
    /// The points are rotated so the cycle starts at its smallest point,
    /// and the multiplier is the chain-rule product of `Dg` over the cycle.
    pub fn new(g: &Map<R>, points: Vec<R>) -> Result<Self> {
        Self::assemble(g, points, false)
    }

    fn assemble(g: &Map<R>, mut points: Vec<R>, tangential_hint: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("an orbit needs at least one point".into()));
        }
        let n = points.len();
        let scale = points
            .iter()
            .fold(R::one(), |m, p| m.max(p.abs()))
            + R::one();
        let tol = R::of(1e-6) * scale;
        for k in 0..n {
            let img = g.eval(points[k])?;
            let next = points[(k + 1) % n];
            if (img - next).abs() > tol {
                return Err(Error::Precondition(format!(
                    "not a cycle: g({}) = {} but the next point is {}",
                    points[k].approx_f64(),
                    img.approx_f64(),
                    next.approx_f64()
                )));
            }
        }
        for m in proper_divisors(n) {
            let repeats = (0..n)
                .all(|k| (points[(k + m) % n] - points[k]).abs() <= tol);
            if repeats {
                return Err(Error::Precondition(format!(
                    "period {n} is not minimal: the cycle repeats with period {m}"
                )));
            }
        }
        let i0 = (0..n)
            .min_by(|&i, &j| points[i].partial_cmp(&points[j]).expect("finite points"))
            .expect("non-empty");
        points.rotate_left(i0);
        let mut multiplier = R::one();
        for p in &points {
            multiplier = multiplier * g.jet(*p)?.d1;
        }
        let tangential =
            tangential_hint || (multiplier - R::one()).abs() < R::of(NEUTRAL_BAND);
        Ok(Self {
            points,
            multiplier,
            tangential,
        })
    }

    /// The cycle, in orbit order starting from the smallest point.
    pub fn points(&self) -> &[R] {
        &self.points
    }

    /// The (minimal) period.
    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// The multiplier `Dgⁿ(p)`, identical from every point of the cycle.
    pub fn multiplier(&self) -> R {
        self.multiplier
    }

    /// `n` when the multiplier is non-negative, `2n` otherwise.
    pub fn orientation_preserving_period(&self) -> usize {
        if self.multiplier >= R::zero() {
            self.period()
        } else {
            2 * self.period()
        }
    }

    /// Whether the orbit was detected as (or has the multiplier of) a
    /// tangency, `Dgⁿ(p) ≈ +1`.
    pub fn tangential(&self) -> bool {
        self.tangential
    }

    /// The smallest point of the cycle.
    pub fn min_point(&self) -> R {
        self.points[0]
    }

    /// Distance from `x` to the nearest point of the cycle.
    pub fn distance_to(&self, x: R) -> R {
        self.points
            .iter()
            .fold(R::infinity(), |m, p| m.min((x - *p).abs()))
    }

    /// Re-checks the orbit invariants against `g` and returns the list of
    /// violations (empty when everything holds):
    ///
    /// * each point maps to the next one around the cycle;
    /// * the multiplier computed from any starting point of the cycle
    ///   agrees with the stored one to 1e−8 relative;
    /// * the derivative of the return map at the orientation-preserving
    ///   period is non-negative at every point.
    pub fn validate(&self, g: &Map<R>) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let n = self.period();
        let scale = self.points.iter().fold(R::one(), |m, p| m.max(p.abs())) + R::one();
        let tol = R::of(1e-7) * scale;
        for k in 0..n {
            let img = g.eval(self.points[k])?;
            let next = self.points[(k + 1) % n];
            if (img - next).abs() > tol {
                out.push(format!(
                    "point {k}: g({}) = {} misses the next point {}",
                    self.points[k].approx_f64(),
                    img.approx_f64(),
                    next.approx_f64()
                ));
            }
        }
        for start in 0..n {
            let mut m = R::one();
            for k in 0..n {
                m = m * g.jet(self.points[(start + k) % n])?.d1;
            }
            let denom = R::one().max(self.multiplier.abs());
            if (m - self.multiplier).abs() > R::of(1e-8) * denom {
                out.push(format!(
                    "multiplier from point {start} is {} instead of {}",
                    m.approx_f64(),
                    self.multiplier.approx_f64()
                ));
            }
        }
        let opp = self.orientation_preserving_period();
        for (k, p) in self.points.iter().enumerate() {
            if let Some((_, d)) = iterate_jet1(g, *p, opp) {
                if d < -R::of(1e-9) * (R::one() + d.abs()) {
                    out.push(format!(
                        "derivative of the order-{opp} return map is negative ({}) at point {k}",
                        d.approx_f64()
                    ));
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Attractor classification of a periodic orbit at expansion threshold `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    /// `|Dgⁿ(p)| < 1` beyond the neutral band.
    Attracting,
    /// `|Dgⁿ(p)| > 1 + ρ`.
    RepellingExpansive,
    /// Inside the neutral band, or repelling without clearing `1 + ρ`.
    NeutralBand,
}

impl std::fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OrbitClass::Attracting => "attracting",
            OrbitClass::RepellingExpansive => "repelling-expansive",
            OrbitClass::NeutralBand => "neutral-band",
        })
    }
}

/// Classifies a bare multiplier against the expansion threshold `ρ`.
///
/// A multiplier within [`NEUTRAL_BAND`] of absolute value 1 is neutral;
/// otherwise `|m| < 1` is attracting, `|m| > 1 + ρ` is repelling-expansive,
/// and the remaining gap `1 ≤ |m| ≤ 1 + ρ` is reported as neutral-band.
pub fn classify_multiplier<R: Real>(multiplier: R, rho: R) -> OrbitClass {
    let am = multiplier.abs();
    let band = R::of(NEUTRAL_BAND);
    if (am - R::one()).abs() < band {
        OrbitClass::NeutralBand
    } else if am < R::one() {
        OrbitClass::Attracting
    } else if am > R::one() + rho {
        OrbitClass::RepellingExpansive
    } else {
        OrbitClass::NeutralBand
    }
}

/// Classifies an orbit by its multiplier; see [`classify_multiplier`].
pub fn classify_orbit<R: Real>(orbit: &PeriodicOrbit<R>, rho: R) -> OrbitClass {
    classify_multiplier(orbit.multiplier(), rho)
}

// ---------------------------------------------------------------------------
// Orbit detection
// ---------------------------------------------------------------------------

/// All periodic orbits of minimal period exactly `n` inside `region`, using
/// the default resolution of [`DEFAULT_SCAN_CELLS`] cells.
///
/// See [`find_periodic_orbits_with_resolution`].
pub fn find_periodic_orbits<R: Real>(
    g: &Map<R>,
    n: usize,
    region: &Interval<R>,
) -> Result<Vec<PeriodicOrbit<R>>> {
    find_periodic_orbits_with_resolution(g, n, region, DEFAULT_SCAN_CELLS)
}

/// All periodic orbits of minimal period exactly `n` inside `region`.
///
/// The scan evaluates `h(x) = gⁿ(x) − x` on a grid of `cells` cells, takes
/// every exact zero and sign change as a root bracket, polishes each root by
/// safeguarded Newton iteration, and additionally probes local minima of
/// `|h|` compatible with a tangency (a double root of `h`, multiplier ≈ +1)
/// by Newton on `Dgⁿ − 1`; such roots are flagged tangential rather than
/// dropped.  Roots are clustered, points whose minimal period is a proper
/// divisor of `n` are excluded, and the survivors are grouped into cycles.
///
/// Errors: `n = 0` or a degenerate scan setup (`Parameter`), a region that
/// leaves no orbit inside the domain (`Precondition`), and a continuum of
/// period-`n` points such as the identity map (`Degenerate`).
pub fn find_periodic_orbits_with_resolution<R: Real>(
    g: &Map<R>,
    n: usize,
    region: &Interval<R>,
    cells: usize,
) -> Result<Vec<PeriodicOrbit<R>>> {
    if n == 0 {
        return Err(Error::Parameter("the period must be at least 1".into()));
    }
    if cells < 16 {
        return Err(Error::Parameter(format!(
            "the scan needs at least 16 cells, got {cells}"
        )));
    }
    let dom = g.domain().as_interval()?;
    let lo = region.lo().max(dom.lo());
    let hi = region.hi().min(dom.hi());
    if !(hi > lo) {
        return Err(Error::Parameter(
            "the scan region does not overlap the map domain".into(),
        ));
    }
    let scan = Interval::new(lo, hi)?;
    let scale = R::one() + lo.abs().max(hi.abs());
    let cell = scan.length() / R::of(cells as f64);

    // Grid values of h(x) = gⁿ(x) − x; None marks escaped orbits.
    let mut xs = Vec::with_capacity(cells + 1);
    let mut hs: Vec<Option<R>> = Vec::with_capacity(cells + 1);
    for k in 0..=cells {
        let x = scan.lerp(R::of(k as f64) / R::of(cells as f64));
        xs.push(x);
        hs.push(iterate_opt(g, x, n).map(|v| v - x));
    }
    let valid = hs.iter().flatten().count();
    if valid == 0 {
        return Err(Error::Precondition(
            "every sampled orbit escapes the domain before the full period".into(),
        ));
    }
    // A continuum of roots (e.g. the identity) is not a discrete orbit list.
    let tiny = R::of(1e-11) * scale;
    let zeroish = hs
        .iter()
        .flatten()
        .filter(|h| h.abs() < tiny)
        .count();
    if 4 * zeroish > valid {
        return Err(Error::Degenerate(format!(
            "the period-{n} displacement vanishes on {zeroish} of {valid} sample cells — \
             a continuum of periodic points"
        )));
    }

    // Candidate roots: exact grid zeros, sign-change brackets, tangencies.
    let mut cands: Vec<(R, bool)> = Vec::new();
    for k in 0..=cells {
        if hs[k] == Some(R::zero()) {
            cands.push((xs[k], false));
        }
    }
    for k in 0..cells {
        if let (Some(a), Some(b)) = (hs[k], hs[k + 1]) {
            if (a < R::zero()) != (b < R::zero()) && a != R::zero() && b != R::zero() {
                let x = polish_bracketed(g, n, xs[k], xs[k + 1], a > R::zero());
                cands.push((x, false));
            }
        }
    }
    for k in 1..cells {
        if let (Some(a), Some(b), Some(c)) = (hs[k - 1], hs[k], hs[k + 1]) {
            if b == R::zero() || (a < R::zero()) != (c < R::zero()) {
                continue;
            }
            let local_min = b.abs() <= a.abs() && b.abs() <= c.abs();
            // Under a quadratic model h ≈ ½κ(x−r)², a grid point next to a
            // tangency satisfies |h| ≤ |second difference|.
            let curv = (a - b - b + c).abs();
            if local_min && b.abs() <= curv.max(tiny) {
                if let Some(z) = polish_tangent(g, n, xs[k], cell, &scan) {
                    cands.push((z, true));
                }
            }
        }
    }

    // Cluster nearby candidates, keeping the smallest residual.
    cands.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite candidates"));
    let cluster_tol = (cell * R::of(2.0)).max(R::of(1e-9) * scale);
    let mut roots: Vec<(R, bool)> = Vec::new();
    for (x, tang) in cands {
        if let Some((last, lt)) = roots.last_mut() {
            if x - *last <= cluster_tol {
                let hl = iterate_opt(g, *last, n).map(|v| (v - *last).abs());
                let hx = iterate_opt(g, x, n).map(|v| (v - x).abs());
                if let (Some(hl), Some(hx)) = (hl, hx) {
                    if hx < hl {
                        *last = x;
                    }
                }
                *lt = *lt || tang;
                continue;
            }
        }
        roots.push((x, tang));
    }

    // Divisor-period exclusion, cycle grouping, per-point polishing.
    let match_tol = R::of(1e-6) * scale;
    let mut orbits: Vec<PeriodicOrbit<R>> = Vec::new();
    let mut taken: Vec<R> = Vec::new();
    'root: for (x, tang) in roots {
        for m in proper_divisors(n) {
            if let Some(v) = iterate_opt(g, x, m) {
                if (v - x).abs() <= match_tol {
                    continue 'root;
                }
            }
        }
        if taken.iter().any(|t| (x - *t).abs() <= cluster_tol) {
            continue;
        }
        let mut pts = Vec::with_capacity(n);
        let mut y = x;
        for _ in 0..n {
            pts.push(y);
            y = match g.eval(y) {
                Ok(v) => v,
                Err(_) => continue 'root,
            };
            y = polish_near(g, n, y, cluster_tol).unwrap_or(y);
        }
        if (y - x).abs() > match_tol {
            continue;
        }
        taken.extend(pts.iter().copied());
        orbits.push(PeriodicOrbit::assemble(g, pts, tang)?);
    }
    orbits.sort_by(|a, b| {
        a.min_point()
            .partial_cmp(&b.min_point())
            .expect("finite orbits")
    });
    Ok(orbits)
}

/// Safeguarded Newton inside a sign-change bracket of `h = gⁿ − id`.
fn polish_bracketed<R: Real>(g: &Map<R>, n: usize, mut a: R, mut b: R, hi_at_a: bool) -> R {
    let mut x = (a + b) / R::of(2.0);
    for _ in 0..POLISH_ITERS {
        let Some((v, d)) = iterate_jet1(g, x, n) else {
            // An escaped midpoint inside a bracket means rounding at the
            // domain edge; shrink towards the known-good side.
            x = (x + a) / R::of(2.0);
            continue;
        };
        let h = v - x;
        if h == R::zero() {
            return x;
        }
        if (h > R::zero()) == hi_at_a {
            a = x;
        } else {
            b = x;
        }
        let dh = d - R::one();
        let newton = if dh != R::zero() { x - h / dh } else { R::nan() };
        let inside = newton.is_finite() && newton > a.min(b) && newton < a.max(b);
        x = if inside {
            newton
        } else {
            (a + b) / R::of(2.0)
        };
        if (b - a).abs() <= R::epsilon() * (R::one() + a.abs() + b.abs()) {
            break;
        }
    }
    x
}

/// Newton on `Dgⁿ − 1` towards the extremum of `h`; accepts the point only
/// when `h` itself nearly vanishes there (a genuine tangency).
fn polish_tangent<R: Real>(
    g: &Map<R>,
    n: usize,
    x0: R,
    cell: R,
    scan: &Interval<R>,
) -> Option<R> {
    let scale = R::one() + x0.abs();
    let clamp = cell * R::of(4.0);
    let mut x = x0;
    for _ in 0..POLISH_ITERS {
        let (dh, d2h) = dh_d2h(g, x, n)?;
        if d2h == R::zero() {
            break;
        }
        let step = (dh / d2h).max(-clamp).min(clamp);
        let nx = (x - step).max(scan.lo()).min(scan.hi());
        if (nx - x).abs() <= R::epsilon() * scale {
            x = nx;
            break;
        }
        x = nx;
    }
    let h = iterate_opt(g, x, n)? - x;
    if h.abs() <= R::of(1e-10) * scale {
        Some(x)
    } else {
        None
    }
}

/// Plain damped Newton on `h = gⁿ − id` from a nearby guess, keeping the
/// best residual seen; the step is capped so the iteration cannot leave the
/// basin of the intended root.
fn polish_near<R: Real>(g: &Map<R>, n: usize, x0: R, cap: R) -> Option<R> {
    let mut x = x0;
    let mut best = x0;
    let mut best_h = (iterate_opt(g, x0, n)? - x0).abs();
    for _ in 0..40 {
        let (v, d) = iterate_jet1(g, x, n)?;
        let h = v - x;
        if h.abs() < best_h {
            best = x;
            best_h = h.abs();
        }
        let dh = d - R::one();
        if dh == R::zero() || h == R::zero() {
            break;
        }
        let step = (h / dh).max(-cap).min(cap);
        let nx = x - step;
        if (nx - x).abs() <= R::epsilon() * (R::one() + x.abs()) {
            break;
        }
        x = nx;
    }
    if let Some(v) = iterate_opt(g, x, n) {
        if (v - x).abs() < best_h {
            best = x;
        }
    }
    Some(best)
}

// ---------------------------------------------------------------------------
// Periodic intervals
// ---------------------------------------------------------------------------

/// A closed interval `I` with `gⁿ(I) = I` and `gⁿ` a bijection of `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicInterval<R> {
    interval: Interval<R>,
    period: usize,
}

impl<R: Real> PeriodicInterval<R> {
    /// Wraps an interval with its period (the invariance itself is checked
    /// by [`PeriodicInterval::validate`]).
    pub fn new(interval: Interval<R>, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::Parameter("the period must be at least 1".into()));
        }
        Ok(Self { interval, period })
    }

    /// The underlying interval.
    pub fn interval(&self) -> &Interval<R> {
        &self.interval
    }

    /// The period `n` of the invariance `gⁿ(I) = I`.
    pub fn period(&self) -> usize {
        self.period
    }

    /// Whether the interval is a single point.
    pub fn is_degenerate(&self) -> bool {
        self.interval.is_degenerate()
    }

    /// Re-checks the invariance: the return map must fix or swap the
    /// endpoints (to 1e−9 relative) and be strictly monotone inside.
    /// Returns the list of violations, empty when the interval is periodic.
    pub fn validate(&self, g: &Map<R>) -> Result<Vec<String>> {
        let mut out = Vec::new();
        match bijective_on(g, &self.interval, self.period)? {
            Invariance::No { reason } => out.push(reason),
            Invariance::Bijective { flagged, .. } => {
                if flagged {
                    out.push(
                        "the derivative of the return map nearly vanishes inside the interval"
                            .into(),
                    );
                }
            }
        }
        Ok(out)
    }
}

/// Outcome of the bijective-invariance test of `gᵐ` on an interval.
enum Invariance {
    /// Not invariant, or not a bijection; carries the reason.
    No { reason: String },
    /// `gᵐ` maps the interval onto itself bijectively.
    Bijective {
        /// `true` when the endpoints are fixed (orientation preserved),
        /// `false` when they are swapped.
        preserves: bool,
        /// The derivative came within rounding of zero somewhere, so the
        /// monotonicity evidence is thin (near-tangency).
        flagged: bool,
    },
}

/// Tests whether `gᵐ` maps `iv` onto itself bijectively: the endpoints must
/// be fixed (monotone increasing inside) or swapped (monotone decreasing),
/// with monotonicity sampled at [`MONOTONE_SAMPLES`] interior points both
/// through the chain-rule derivative and through the sampled values.
fn bijective_on<R: Real>(g: &Map<R>, iv: &Interval<R>, m: usize) -> Result<Invariance> {
    let scale = R::one() + iv.lo().abs().max(iv.hi().abs());
    if iv.is_degenerate() {
        let p = iv.lo();
        return Ok(match iterate_opt(g, p, m) {
            Some(v) if (v - p).abs() <= R::of(1e-7) * scale => Invariance::Bijective {
                preserves: true,
                flagged: false,
            },
            _ => Invariance::No {
                reason: format!("the point {} is not fixed by the return map", p.approx_f64()),
            },
        });
    }
    let n = MONOTONE_SAMPLES;
    let mut ys = Vec::with_capacity(n + 1);
    let mut lambda = R::zero();
    let mut d_min = R::infinity();
    let mut d_max = -R::infinity();
    for k in 0..=n {
        let x = iv.lerp(R::of(k as f64) / R::of(n as f64));
        let Some((y, d)) = iterate_jet1(g, x, m) else {
            return Ok(Invariance::No {
                reason: "an orbit of the interval escapes the domain".into(),
            });
        };
        ys.push(y);
        lambda = lambda.max(d.abs());
        d_min = d_min.min(d);
        d_max = d_max.max(d);
    }
    let tol_end = scale * (R::of(1e-9) + R::of(1e-13) * lambda);
    let fixed = (ys[0] - iv.lo()).abs() <= tol_end && (ys[n] - iv.hi()).abs() <= tol_end;
    let swapped = (ys[0] - iv.hi()).abs() <= tol_end && (ys[n] - iv.lo()).abs() <= tol_end;
    if !fixed && !swapped {
        return Ok(Invariance::No {
            reason: format!(
                "the return map moves the endpoints: images ({}, {}) of ({}, {})",
                ys[0].approx_f64(),
                ys[n].approx_f64(),
                iv.lo().approx_f64(),
                iv.hi().approx_f64()
            ),
        });
    }
    let floor = R::of(1e-9) * (R::one() + d_max.abs().max(d_min.abs()));
    let rising = d_min > floor;
    let falling = d_max < -floor;
    let mixed = d_min < -floor && d_max > floor;
    if mixed {
        return Ok(Invariance::No {
            reason: "the return map folds inside the interval".into(),
        });
    }
    // The sampled values must also move monotonically (a narrow fold can
    // slip between derivative samples).
    let val_tol = R::of(1e-10) * scale * (R::one() + lambda);
    let increasing_vals = ys.windows(2).all(|w| w[1] >= w[0] - val_tol);
    let decreasing_vals = ys.windows(2).all(|w| w[1] <= w[0] + val_tol);
    if fixed && rising && increasing_vals {
        return Ok(Invariance::Bijective {
            preserves: true,
            flagged: false,
        });
    }
    if swapped && falling && decreasing_vals {
        return Ok(Invariance::Bijective {
            preserves: false,
            flagged: false,
        });
    }
    // Derivative within rounding of zero somewhere: inconclusive but
    // consistent — report a flagged bijection.
    if fixed && increasing_vals && d_min > -floor {
        return Ok(Invariance::Bijective {
            preserves: true,
            flagged: true,
        });
    }
    if swapped && decreasing_vals && d_max < floor {
        return Ok(Invariance::Bijective {
            preserves: false,
            flagged: true,
        });
    }
    Ok(Invariance::No {
        reason: "the return map is not monotone on the interval".into(),
    })
}

// ---------------------------------------------------------------------------
// Packs
// ---------------------------------------------------------------------------

/// A pack: periodic orbits sharing a (possibly degenerate) periodic
/// interval, all with the same orientation-preserving period.
#[derive(Debug, Clone)]
pub struct PeriodicPack<R> {
    carrier: PeriodicInterval<R>,
    members: Vec<PeriodicOrbit<R>>,
    flagged: bool,
}

impl<R: Real> PeriodicPack<R> {
    /// The periodic interval carrying the pack.
    pub fn carrier(&self) -> &PeriodicInterval<R> {
        &self.carrier
    }

    /// The member orbits, sorted by smallest point.
    pub fn members(&self) -> &[PeriodicOrbit<R>] {
        &self.members
    }

    /// Whether some bijectivity test along the construction was
    /// inconclusive (near-tangency).
    pub fn flagged(&self) -> bool {
        self.flagged
    }

    /// The orientation-preserving period shared by every member.
    pub fn orientation_preserving_period(&self) -> usize {
        self.members[0].orientation_preserving_period()
    }

    /// Whether some member is attracting (beyond the neutral band).
    pub fn has_attracting_member(&self) -> bool {
        self.members
            .iter()
            .any(|o| classify_orbit(o, R::zero()) == OrbitClass::Attracting)
    }

    /// Whether some member fails to be repelling-expansive at threshold
    /// `ρ` — the operational notion of an exceptional pack.
    pub fn is_exceptional(&self, rho: R) -> bool {
        self.members
            .iter()
            .any(|o| classify_orbit(o, rho) != OrbitClass::RepellingExpansive)
    }

    /// Distance from `x` to the pack: the nearer of the carrier interval
    /// and the member orbit points.
    pub fn distance_to(&self, x: R) -> R {
        let mut d = self.carrier.interval().distance_to(x);
        for o in &self.members {
            d = d.min(o.distance_to(x));
        }
        d
    }

    /// Re-checks pack soundness and returns the violations (empty when
    /// sound):
    ///
    /// * the carrier is a periodic interval of its stated period;
    /// * all members share one orientation-preserving period;
    /// * every member period is `n`, `2n` or `n/2` for the carrier period
    ///   `n`;
    /// * every member orbit touches the carrier.
    pub fn validate(&self, g: &Map<R>) -> Result<Vec<String>> {
        let mut out = self.carrier.validate(g)?;
        if self.members.is_empty() {
            out.push("a pack needs at least one member orbit".into());
            return Ok(out);
        }
        let opp = self.members[0].orientation_preserving_period();
        for o in &self.members {
            if o.orientation_preserving_period() != opp {
                out.push(format!(
                    "orientation-preserving periods differ: {} vs {}",
                    o.orientation_preserving_period(),
                    opp
                ));
            }
        }
        let n = self.carrier.period();
        for o in &self.members {
            let p = o.period();
            let admissible = p == n || p == 2 * n || (n % 2 == 0 && p == n / 2);
            if !admissible {
                out.push(format!(
                    "member period {p} is not among {{{n}, {}, {}}}",
                    2 * n,
                    if n % 2 == 0 {
                        (n / 2).to_string()
                    } else {
                        "—".into()
                    }
                ));
            }
        }
        let scale = R::one()
            + self
                .carrier
                .interval()
                .lo()
                .abs()
                .max(self.carrier.interval().hi().abs());
        let tol = R::of(1e-7) * scale;
        for o in &self.members {
            let near = o
                .points()
                .iter()
                .any(|p| self.carrier.interval().distance_to(*p) <= tol);
            if !near {
                out.push(format!(
                    "the orbit through {} never touches the carrier",
                    o.min_point().approx_f64()
                ));
            }
        }
        Ok(out)
    }
}

/// Groups detected orbits into packs by greedy interval growth.
///
/// The points of all orbits are sorted; for every pair of adjacent points
/// whose orbits share an orientation-preserving period `N`, the interval
/// they span is tested for bijective `gᴺ`-invariance (endpoints fixed,
/// return map monotone increasing).  Invariant spans join their orbits, the
/// relation is closed transitively, and each resulting class becomes a pack
/// whose carrier is the longest verified run of joined spans (degenerate
/// when no span joined).  An inconclusive bijectivity test near a tangency
/// joins the orbits but flags the pack.
pub fn group_into_packs<R: Real>(
    orbits: &[PeriodicOrbit<R>],
    g: &Map<R>,
) -> Result<Vec<PeriodicPack<R>>> {
    if orbits.is_empty() {
        return Ok(Vec::new());
    }
    let mut pts: Vec<(R, usize)> = Vec::new();
    for (i, o) in orbits.iter().enumerate() {
        for p in o.points() {
            pts.push((*p, i));
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite points"));
    let scale = R::one() + pts[0].0.abs().max(pts[pts.len() - 1].0.abs());
    for w in pts.windows(2) {
        if w[0].1 != w[1].1 && (w[1].0 - w[0].0).abs() <= R::of(1e-12) * scale {
            return Err(Error::Precondition(format!(
                "two orbits share the point {} — deduplicate before grouping",
                w[0].0.approx_f64()
            )));
        }
    }

    // Union-find over orbit indices.
    let mut parent: Vec<usize> = (0..orbits.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut flags = vec![false; orbits.len()];

    // Adjacent-span tests.
    let mut linked = vec![false; pts.len().saturating_sub(1)];
    for i in 0..pts.len().saturating_sub(1) {
        let (x, oi) = pts[i];
        let (y, oj) = pts[i + 1];
        let na = orbits[oi].orientation_preserving_period();
        if na != orbits[oj].orientation_preserving_period() {
            continue;
        }
        let span = Interval::new(x, y)?;
        match bijective_on(g, &span, na)? {
            Invariance::Bijective {
                preserves: true,
                flagged,
            } => {
                linked[i] = true;
                let (ri, rj) = (find(&mut parent, oi), find(&mut parent, oj));
                parent[ri] = rj;
                if flagged {
                    flags[oi] = true;
                    flags[oj] = true;
                }
            }
            _ => {}
        }
    }

    // Maximal runs of joined spans: candidate carriers.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    for (i, l) in linked.iter().enumerate() {
        if *l {
            if open.is_none() {
                open = Some(i);
            }
        } else if let Some(s) = open.take() {
            runs.push((s, i));
        }
    }
    if let Some(s) = open.take() {
        runs.push((s, linked.len()));
    }

    // Assemble one pack per union-find class.
    let mut classes: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..orbits.len() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    let mut packs = Vec::with_capacity(classes.len());
    for (_, mut members_idx) in classes {
        members_idx.sort_by(|&a, &b| {
            orbits[a]
                .min_point()
                .partial_cmp(&orbits[b].min_point())
                .expect("finite orbits")
        });
        let root = find(&mut parent, members_idx[0]);
        let opp = orbits[members_idx[0]].orientation_preserving_period();
        for &i in &members_idx {
            if orbits[i].orientation_preserving_period() != opp {
                return Err(Error::Numeric(
                    "joined orbits with different orientation-preserving periods".into(),
                ));
            }
        }
        // Longest run belonging to this class.
        let mut best: Option<Interval<R>> = None;
        for &(s, e) in &runs {
            if find(&mut parent, pts[s].1) != root {
                continue;
            }
            let span = Interval::new(pts[s].0, pts[e].0)?;
            if best
                .as_ref()
                .map(|b| span.length() > b.length())
                .unwrap_or(true)
            {
                best = Some(span);
            }
        }
        let mut flagged = members_idx.iter().any(|&i| flags[i]);
        let carrier = match best {
            Some(span) => {
                // Minimal period of the carrier: smallest divisor of the
                // shared orientation-preserving period that maps the span
                // onto itself bijectively.
                let mut period = opp;
                let mut found = false;
                for m in divisors(opp) {
                    match bijective_on(g, &span, m)? {
                        Invariance::Bijective { flagged: f, .. } => {
                            period = m;
                            flagged = flagged || f;
                            found = true;
                            break;
                        }
                        Invariance::No { .. } => {}
                    }
                }
                if !found {
                    flagged = true;
                }
                PeriodicInterval::new(span, period)?
            }
            None => {
                let o = &orbits[members_idx[0]];
                PeriodicInterval::new(Interval::point(o.min_point())?, o.period())?
            }
        };
        packs.push(PeriodicPack {
            carrier,
            members: members_idx.iter().map(|&i| orbits[i].clone()).collect(),
            flagged,
        });
    }
    packs.sort_by(|a, b| {
        a.members[0]
            .min_point()
            .partial_cmp(&b.members[0].min_point())
            .expect("finite packs")
    });
    Ok(packs)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Domain;
    use crate::map::Expr;
    use approx::assert_relative_eq;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    fn unit() -> Interval<f64> {
        iv(0.0, 1.0)
    }

    #[test]
    fn logistic_fixed_points_at_default_resolution() {
        // a = 4: fixed points 0 and 3/4 with Df = 4 − 8x, so multipliers
        // 4 and −2.
        let g = Map::logistic(4.0_f64);
        let orbits = find_periodic_orbits(&g, 1, &unit()).unwrap();
        assert_eq!(orbits.len(), 2);
        assert_relative_eq!(orbits[0].points()[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(orbits[0].multiplier(), 4.0, epsilon = 1e-9);
        assert_eq!(orbits[0].orientation_preserving_period(), 1);
        assert_relative_eq!(orbits[1].points()[0], 0.75, epsilon = 1e-12);
        assert_relative_eq!(orbits[1].multiplier(), -2.0, epsilon = 1e-9);
        assert_eq!(orbits[1].orientation_preserving_period(), 2);
        for o in &orbits {
            assert!(!o.tangential());
            assert!(o.validate(&g).unwrap().is_empty());
        }
    }

    #[test]
    fn logistic_two_cycle_and_divisor_exclusion() {
        // a = 3.2: the 2-cycle is {(a+1 ± √((a+1)(a−3)))/(2a)} with
        // multiplier −a² + 2a + 4 = 0.16; the fixed points 0 and 1 − 1/a
        // solve the period-2 equation too but must be excluded.
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let orbits =
            find_periodic_orbits_with_resolution(&g, 2, &unit(), 1 << 15).unwrap();
        assert_eq!(orbits.len(), 1);
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        let p_minus = (a + 1.0 - s) / (2.0 * a);
        let p_plus = (a + 1.0 + s) / (2.0 * a);
        assert_eq!(orbits[0].period(), 2);
        assert_relative_eq!(orbits[0].points()[0], p_minus, epsilon = 1e-9);
        assert_relative_eq!(orbits[0].points()[1], p_plus, epsilon = 1e-9);
        assert_relative_eq!(orbits[0].multiplier(), -a * a + 2.0 * a + 4.0, epsilon = 1e-9);
        assert_eq!(orbits[0].orientation_preserving_period(), 2);
        assert!(orbits[0].validate(&g).unwrap().is_empty());

        // No genuine 4-cycle exists at a = 3.2; the period-4 scan must
        // exclude the fixed points and the 2-cycle and return nothing.
        let quad =
            find_periodic_orbits_with_resolution(&g, 4, &unit(), 1 << 15).unwrap();
        assert!(quad.is_empty());
    }

    #[test]
    fn identity_map_reports_a_continuum() {
        let g = Map::new(
            Expr::poly_f64(&[0.0, 1.0]),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let err = find_periodic_orbits_with_resolution(&g, 1, &unit(), 1 << 12)
            .unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn tangential_fixed_point_is_flagged_not_dropped() {
        // g(x) = x + (x − ½)² has a double fixed point at ½ (h = (x−½)²
        // touches zero without a sign change) with multiplier exactly 1.
        let g = Map::new(
            Expr::poly_f64(&[0.25, 0.0, 1.0]),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let orbits =
            find_periodic_orbits_with_resolution(&g, 1, &unit(), 1 << 12).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_relative_eq!(orbits[0].points()[0], 0.5, epsilon = 1e-5);
        assert!(orbits[0].tangential());
        assert_relative_eq!(orbits[0].multiplier(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn orbit_constructor_checks_cycles() {
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        let p_minus = (a + 1.0 - s) / (2.0 * a);
        let p_plus = (a + 1.0 + s) / (2.0 * a);

        let o = PeriodicOrbit::new(&g, vec![p_plus, p_minus]).unwrap();
        assert_relative_eq!(o.min_point(), p_minus, epsilon = 1e-15);
        assert_relative_eq!(o.multiplier(), 0.16, epsilon = 1e-9);

        assert!(matches!(
            PeriodicOrbit::new(&g, vec![0.3, 0.4]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            PeriodicOrbit::new(&g, vec![p_minus, p_plus, p_minus, p_plus]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            PeriodicOrbit::new(&g, Vec::new()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn classification_thresholds() {
        use OrbitClass::*;
        assert_eq!(classify_multiplier(0.16_f64, 0.1), Attracting);
        assert_eq!(classify_multiplier(-2.0_f64, 0.5), RepellingExpansive);
        assert_eq!(classify_multiplier(1.0_f64, 0.1), NeutralBand);
        // Repelling but below the expansion threshold: still neutral-band.
        assert_eq!(classify_multiplier(1.02_f64, 0.05), NeutralBand);
        assert_eq!(classify_multiplier(-1.02_f64, 0.05), NeutralBand);
        // Inside the declared neutral band on either side.
        assert_eq!(classify_multiplier(1.0_f64 - 1e-9, 0.05), NeutralBand);
        assert_eq!(classify_multiplier(-(1.0_f64 + 1e-9), 0.05), NeutralBand);
        // Just beyond the band.
        assert_eq!(classify_multiplier(1.0_f64 - 1e-5, 0.05), Attracting);
        assert_eq!(classify_multiplier(1.07_f64, 0.05), RepellingExpansive);

        let g = Map::logistic(3.2_f64);
        let orbits =
            find_periodic_orbits_with_resolution(&g, 2, &unit(), 1 << 14).unwrap();
        assert_eq!(classify_orbit(&orbits[0], 0.1), Attracting);
    }

    #[test]
    fn odd_cubic_pack_merges_fixed_point_and_two_cycle() {
        // g(x) = x³ − 1.2x: fixed point 0 (multiplier −1.2) and 2-cycle
        // ±√0.2 (multiplier (3·0.2 − 1.2)² = 0.36), all with
        // orientation-preserving period 2; g is decreasing on the span, so
        // every adjacent span is invariant under g² and one pack results.
        let g = Map::cubic(-1.2_f64, -1.3, 1.3).unwrap();
        let region = iv(-1.3, 1.3);
        let mut orbits =
            find_periodic_orbits_with_resolution(&g, 1, &region, 1 << 14).unwrap();
        orbits.extend(find_periodic_orbits_with_resolution(&g, 2, &region, 1 << 14).unwrap());
        assert_eq!(orbits.len(), 2);

        let packs = group_into_packs(&orbits, &g).unwrap();
        assert_eq!(packs.len(), 1);
        let pack = &packs[0];
        let r = 0.2_f64.sqrt();
        assert_relative_eq!(pack.carrier().interval().lo(), -r, epsilon = 1e-7);
        assert_relative_eq!(pack.carrier().interval().hi(), r, epsilon = 1e-7);
        // g itself already maps the carrier onto itself (endpoints swap).
        assert_eq!(pack.carrier().period(), 1);
        assert_eq!(pack.members().len(), 2);
        assert_eq!(pack.orientation_preserving_period(), 2);
        assert!(!pack.flagged());
        assert!(pack.validate(&g).unwrap().is_empty());
    }

    #[test]
    fn separated_attractors_stay_in_singleton_packs() {
        // g(x) = 1.75x − 0.75x³: fixed points −1, 0, 1 with multipliers
        // −0.5, 1.75, −0.5.  The spans (−1, 0) and (0, 1) each contain a
        // critical point ±√(7/9) of g, so neither is bijectively invariant
        // and the pack test must keep all three fixed points separate.
        let g = Map::new(
            Expr::poly_f64(&[0.0, 1.75, 0.0, -0.75]),
            Domain::interval(-1.35, 1.35).unwrap(),
        );
        let region = iv(-1.35, 1.35);
        let orbits =
            find_periodic_orbits_with_resolution(&g, 1, &region, 1 << 14).unwrap();
        assert_eq!(orbits.len(), 3);
        assert_relative_eq!(orbits[0].multiplier(), -0.5, epsilon = 1e-9);
        assert_relative_eq!(orbits[1].multiplier(), 1.75, epsilon = 1e-9);
        assert_relative_eq!(orbits[2].multiplier(), -0.5, epsilon = 1e-9);

        let packs = group_into_packs(&orbits, &g).unwrap();
        assert_eq!(packs.len(), 3);
        for pack in &packs {
            assert_eq!(pack.members().len(), 1);
            assert!(pack.carrier().is_degenerate());
            assert!(pack.validate(&g).unwrap().is_empty());
        }
    }

    #[test]
    fn logistic_pack_joins_repeller_and_attracting_cycle() {
        // a = 3.2: the repelling fixed point 1 − 1/a = 0.6875 sits between
        // the 2-cycle points and the whole span is invariant under g (the
        // endpoints swap), so the fixed point and the cycle share a pack.
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let mut orbits =
            find_periodic_orbits_with_resolution(&g, 1, &unit(), 1 << 14).unwrap();
        orbits.extend(find_periodic_orbits_with_resolution(&g, 2, &unit(), 1 << 14).unwrap());
        assert_eq!(orbits.len(), 3);

        let packs = group_into_packs(&orbits, &g).unwrap();
        assert_eq!(packs.len(), 2);
        assert_eq!(packs[0].members().len(), 1);
        assert_relative_eq!(packs[0].members()[0].min_point(), 0.0, epsilon = 1e-9);
        assert!(!packs[0].is_exceptional(0.05));

        let pack = &packs[1];
        assert_eq!(pack.members().len(), 2);
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        let p_minus = (a + 1.0 - s) / (2.0 * a);
        let p_plus = (a + 1.0 + s) / (2.0 * a);
        assert_relative_eq!(pack.carrier().interval().lo(), p_minus, epsilon = 1e-7);
        assert_relative_eq!(pack.carrier().interval().hi(), p_plus, epsilon = 1e-7);
        assert_eq!(pack.carrier().period(), 1);
        assert_eq!(pack.orientation_preserving_period(), 2);
        assert!(pack.is_exceptional(0.05));
        assert!(pack.has_attracting_member());
        assert!(pack.validate(&g).unwrap().is_empty());
        assert!(pack.distance_to(0.6875) <= 1e-12);
        assert_relative_eq!(pack.distance_to(0.2), p_minus - 0.2, epsilon = 1e-7);
    }

    #[test]
    fn monotone_map_collects_all_fixed_points_in_one_pack() {
        // g(x) = x + x(x − ½)(x − 1) is an increasing bijection of [0, 1]
        // with fixed points 0, ½, 1; every span between adjacent fixed
        // points is invariant, so all three orbits form a single pack with
        // carrier [0, 1].
        let g = Map::new(
            Expr::poly_f64(&[0.0, 1.5, -1.5, 1.0]),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let orbits =
            find_periodic_orbits_with_resolution(&g, 1, &unit(), 1 << 14).unwrap();
        assert_eq!(orbits.len(), 3);
        assert_relative_eq!(orbits[1].multiplier(), 0.75, epsilon = 1e-9);

        let packs = group_into_packs(&orbits, &g).unwrap();
        assert_eq!(packs.len(), 1);
        let pack = &packs[0];
        assert_eq!(pack.members().len(), 3);
        assert_relative_eq!(pack.carrier().interval().lo(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(pack.carrier().interval().hi(), 1.0, epsilon = 1e-9);
        assert_eq!(pack.carrier().period(), 1);
        assert_eq!(pack.orientation_preserving_period(), 1);
        assert!(pack.validate(&g).unwrap().is_empty());
    }

    #[test]
    fn periodic_interval_validation() {
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        let p_minus = (a + 1.0 - s) / (2.0 * a);
        let p_plus = (a + 1.0 + s) / (2.0 * a);

        let good = PeriodicInterval::new(iv(p_minus, p_plus), 1).unwrap();
        assert!(good.validate(&g).unwrap().is_empty());
        assert!(!good.is_degenerate());

        // The doubled period is also a valid invariance (the return map of
        // period 2 fixes the endpoints and is increasing)…
        let doubled = PeriodicInterval::new(iv(p_minus, p_plus), 2).unwrap();
        assert!(doubled.validate(&g).unwrap().is_empty());
        // …but an arbitrary interval is not invariant at all:
        let bad = PeriodicInterval::new(iv(0.1, 0.4), 1).unwrap();
        assert!(!bad.validate(&g).unwrap().is_empty());

        assert!(matches!(
            PeriodicInterval::new(iv(0.1, 0.4), 0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn pullback_reaches_the_packmate_repeller() {
        // a = 3.2 again: pulling the left flank of the attracting 2-cycle
        // point back along the cycle expands it towards the repelling
        // fixed point 0.6875.  The flank end contracts onto the repeller
        // at rate 1/Dg^2(0.6875) = 1/1.44 per return trip, so after 40
        // return trips the head has an endpoint within 1e-6 of it.
        //
        // The end anchored on the cycle is backward-unstable: each return
        // trip amplifies its rounding error by 1/|multiplier| = 6.25, and
        // once the drift exceeds 1 - g(p_plus) ~ 5e-4 the target covers
        // the critical value and the components legitimately widen to the
        // repeller's own preimages.  Either way the head accumulates on
        // the repeller from the cycle side, which is what we assert; only
        // containment (not equality) is checked on the anchored end.
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        let p_minus = (a + 1.0 - s) / (2.0 * a);
        let p_plus = (a + 1.0 + s) / (2.0 * a);
        let fixed = 1.0 - 1.0 / a;

        let steps = 80;
        let mut anchor = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            anchor.push(if k % 2 == 0 { p_plus } else { p_minus });
        }
        let tail = iv(0.78, p_plus);
        let chain = crate::chains::pull_back_chain(&g, &tail, &anchor).unwrap();
        assert!(chain.validate(&g).unwrap().is_empty());
        let head = *chain.head();
        assert!(head.hi() >= p_plus - 1e-9);
        assert!(head.lo() > fixed - 1e-10);
        assert!(head.lo() - fixed < 1e-6);

        // The engulfed repeller shares the pack of the cycle.
        let mut orbits =
            find_periodic_orbits_with_resolution(&g, 1, &unit(), 1 << 14).unwrap();
        orbits.extend(find_periodic_orbits_with_resolution(&g, 2, &unit(), 1 << 14).unwrap());
        let packs = group_into_packs(&orbits, &g).unwrap();
        let cycle_pack = packs
            .iter()
            .find(|p| p.distance_to(p_plus) <= 1e-9)
            .expect("pack of the cycle");
        assert!(cycle_pack.distance_to(fixed) <= 1e-9);
        assert!(cycle_pack
            .members()
            .iter()
            .any(|o| (o.min_point() - fixed).abs() <= 1e-9));
    }
}
