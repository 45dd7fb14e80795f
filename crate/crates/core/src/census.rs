//! Attractor census of a single map and the verification scans built on it.
//!
//! The module drives the orbit and pack machinery of [`crate::orbits`] at
//! census scale and adds the dynamical checks that need whole-map context:
//!
//! * [`census_single`] — all orbits up to a period cap, their classes, the
//!   packs they group into, which packs are exceptional at a threshold `ρ`,
//!   and which attracting packs capture a critical point or a
//!   critical-interval boundary point;
//! * [`basin_membership`] — finite-iteration membership of a point in the
//!   basin of a pack's attracting orbits, with an escape flag;
//! * [`first_entry_schwarzian_check`] — the sign of `S(gⁿ⁺¹)` at sample
//!   points whose first entry into a target interval happens at time `n`,
//!   accumulated by the Schwarzian composition rule;
//! * [`quadratic_schwarzian_bound_check`] — the bound
//!   `Sg(x) < −B²/(A²(x−c)²)` near a quadratic critical point, with
//!   `B = |D²g(c)|` and `A = sup|D²g|`;
//! * [`uniform_contraction_scan`] — pullback components of small windows
//!   kept away from attracting packs, and the largest window size `δ̂`
//!   keeping every component below a given `ε`.

use crate::chains::preimage_components;
use crate::critical::compute_critical_intervals;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::Map;
use crate::num::Real;
use crate::orbits::{
    classify_orbit, find_periodic_orbits_with_resolution, group_into_packs, OrbitClass,
    PeriodicOrbit, PeriodicPack,
};
use crate::schwarzian::schwarzian_at;

/// Periods scanned when a precondition needs a quick neutral-orbit check.
const PRECHECK_PERIODS: usize = 6;

/// Scan cells used by precondition checks (coarser than a full census).
const PRECHECK_CELLS: usize = 1 << 12;

/// Most pullback components tracked per window before the scan gives up.
const COMPONENT_CAP: usize = 4096;

// ---------------------------------------------------------------------------
// Census of one map
// ---------------------------------------------------------------------------

/// Tuning knobs of [`census_single`].
#[derive(Debug, Clone, Copy)]
pub struct CensusOptions<R> {
    /// Largest minimal period scanned.
    pub n_max: usize,
    /// Expansion threshold: an orbit with `|multiplier| > 1 + rho` is
    /// repelling-expansive, and a pack is exceptional when some member
    /// fails that test.
    pub rho: R,
    /// Grid cells per period scan.
    pub scan_cells: usize,
    /// Iteration budget of the basin-membership checks.
    pub basin_iters: usize,
    /// Distance tolerance of the basin-membership checks.
    pub basin_tol: R,
}

impl<R: Real> Default for CensusOptions<R> {
    fn default() -> Self {
        CensusOptions {
            n_max: 12,
            rho: R::of(0.05),
            scan_cells: 1 << 14,
            basin_iters: 10_000,
            basin_tol: R::of(1e-8),
        }
    }
}

/// Where a basin seed point comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedKind {
    /// A critical point of the map.
    CriticalPoint,
    /// A boundary point of a critical interval.
    CriticalIntervalBoundary,
}

/// A seed point captured by the basin of an attracting pack.
#[derive(Debug, Clone, Copy)]
pub struct BasinHit<R> {
    /// Index into [`CensusReport::packs`].
    pub pack: usize,
    /// The iterated seed point.
    pub seed: R,
    /// What the seed is.
    pub kind: SeedKind,
}

/// Census of one map: orbits, classes, packs, exceptions and basin seeds.
#[derive(Debug, Clone)]
pub struct CensusReport<R> {
    /// All orbits of minimal period up to the cap, sorted by period then by
    /// smallest point.
    pub orbits: Vec<PeriodicOrbit<R>>,
    /// Class of each orbit at the census threshold, parallel to `orbits`.
    pub classes: Vec<OrbitClass>,
    /// The packs the orbits group into, sorted by smallest member point.
    pub packs: Vec<PeriodicPack<R>>,
    /// Indices of packs with a member that is not repelling-expansive.
    pub exceptional: Vec<usize>,
    /// Seeds captured by attracting packs (at most one hit per seed).
    pub basin_hits: Vec<BasinHit<R>>,
    /// Per-period detection failures and other diagnostics.
    pub notes: Vec<String>,
}

/// Runs the census of one map.
///
/// Orbits of every minimal period up to `opts.n_max` are detected on a grid
/// of `opts.scan_cells` cells and grouped into packs; packs with a member
/// that is not repelling-expansive at `opts.rho` are marked exceptional.
/// Every critical point and critical-interval boundary point is then
/// iterated, and a [`BasinHit`] records the first attracting pack whose
/// basin captures it.  A period whose scan reports a continuum of periodic
/// points is recorded in `notes` and skipped.
pub fn census_single<R: Real>(g: &Map<R>, opts: &CensusOptions<R>) -> Result<CensusReport<R>> {
    if opts.n_max == 0 {
        return Err(Error::Parameter("the period cap must be at least 1".into()));
    }
    if !(opts.rho >= R::zero()) {
        return Err(Error::Parameter(format!(
            "the expansion threshold must be non-negative, got {}",
            opts.rho.approx_f64()
        )));
    }
    let dom = g.domain().as_interval()?;
    let mut orbits: Vec<PeriodicOrbit<R>> = Vec::new();
    let mut notes = Vec::new();
    for n in 1..=opts.n_max {
        match find_periodic_orbits_with_resolution(g, n, &dom, opts.scan_cells) {
            Ok(found) => orbits.extend(found),
            Err(Error::Degenerate(msg)) => notes.push(format!("period {n}: {msg}")),
            Err(e) => return Err(e),
        }
    }
    orbits.sort_by(|a, b| {
        a.period().cmp(&b.period()).then(
            a.min_point()
                .partial_cmp(&b.min_point())
                .expect("finite orbit points"),
        )
    });
    let classes: Vec<OrbitClass> = orbits.iter().map(|o| classify_orbit(o, opts.rho)).collect();
    let packs = group_into_packs(&orbits, g)?;
    let exceptional: Vec<usize> = packs
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_exceptional(opts.rho))
        .map(|(i, _)| i)
        .collect();

    let mut seeds: Vec<(R, SeedKind)> = g
        .critical_points(&dom)?
        .into_iter()
        .map(|c| (c.x, SeedKind::CriticalPoint))
        .collect();
    match compute_critical_intervals(g) {
        Ok(set) => {
            for ci in set.intervals() {
                for end in [ci.interval().lo(), ci.interval().hi()] {
                    if dom.contains(end) {
                        seeds.push((end, SeedKind::CriticalIntervalBoundary));
                    }
                }
            }
        }
        Err(e) => notes.push(format!("critical intervals unavailable: {e}")),
    }
    let mut basin_hits = Vec::new();
    for (seed, kind) in seeds {
        for (i, pack) in packs.iter().enumerate() {
            if !pack.has_attracting_member() {
                continue;
            }
            let check = basin_membership(g, seed, pack, opts.basin_iters, opts.basin_tol)?;
            if check.in_basin {
                basin_hits.push(BasinHit {
                    pack: i,
                    seed,
                    kind,
                });
                break;
            }
        }
    }
    Ok(CensusReport {
        orbits,
        classes,
        packs,
        exceptional,
        basin_hits,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Basin membership
// ---------------------------------------------------------------------------

/// Outcome of [`basin_membership`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasinCheck {
    /// Whether the whole tail of the iteration stayed near the pack's
    /// attracting orbits.
    pub in_basin: bool,
    /// Whether the orbit left the domain (or blew up) first.
    pub escaped: bool,
}

/// Whether iterates of `x0` converge to the attracting orbits of `pack`.
///
/// The point is iterated `max_iters` times; membership requires every
/// iterate of the final 10% to lie within `tol` of an attracting member
/// orbit's points.  Leaving the domain (or producing a non-finite value)
/// returns `escaped` instead.  A point sitting exactly on a repelling
/// member stays there and is correctly reported outside the basin.
///
/// Errors: the pack has no attracting member (`Precondition`) or
/// `max_iters < 10` (`Parameter`).
pub fn basin_membership<R: Real>(
    g: &Map<R>,
    x0: R,
    pack: &PeriodicPack<R>,
    max_iters: usize,
    tol: R,
) -> Result<BasinCheck> {
    if max_iters < 10 {
        return Err(Error::Parameter(
            "the iteration budget must be at least 10".into(),
        ));
    }
    let targets: Vec<R> = pack
        .members()
        .iter()
        .filter(|o| classify_orbit(*o, R::zero()) == OrbitClass::Attracting)
        .flat_map(|o| o.points().iter().copied())
        .collect();
    if targets.is_empty() {
        return Err(Error::Precondition(
            "the pack has no attracting member".into(),
        ));
    }
    let dom = g.domain().as_interval()?;
    if !dom.contains(x0) {
        return Ok(BasinCheck {
            in_basin: false,
            escaped: true,
        });
    }
    let tail_start = max_iters - max_iters / 10;
    let mut x = x0;
    for k in 0..max_iters {
        x = match g.eval(x) {
            Ok(y) if y.is_finite() => y,
            Ok(_) | Err(Error::OutOfDomain { .. }) => {
                return Ok(BasinCheck {
                    in_basin: false,
                    escaped: true,
                })
            }
            Err(e) => return Err(e),
        };
        if k + 1 >= tail_start {
            let dist = targets
                .iter()
                .map(|t| (x - *t).abs())
                .fold(R::infinity(), R::min);
            if dist > tol {
                return Ok(BasinCheck {
                    in_basin: false,
                    escaped: false,
                });
            }
        }
    }
    Ok(BasinCheck {
        in_basin: true,
        escaped: false,
    })
}

// ---------------------------------------------------------------------------
// First-entry Schwarzian check
// ---------------------------------------------------------------------------

/// One sampled first entry of [`first_entry_schwarzian_check`].
#[derive(Debug, Clone, Copy)]
pub struct FirstEntrySample<R> {
    /// The starting point.
    pub x: R,
    /// Its first-entry time: the least `n ≥ 0` with `gⁿ(x)` in the target.
    pub n: usize,
    /// `S(gⁿ⁺¹)(x)`, accumulated with the composition rule
    /// `Σₖ Sg(gᵏx)·(Dgᵏ(x))²`.
    pub schwarzian: R,
}

/// Report of [`first_entry_schwarzian_check`].
#[derive(Debug, Clone)]
pub struct FirstEntryReport<R> {
    /// Samples that entered the target within the horizon.
    pub samples: Vec<FirstEntrySample<R>>,
    /// How many of them have `S(gⁿ⁺¹)(x) ≥ 0`.
    pub violations: usize,
    /// Samples skipped because a derivative vanished along the orbit.
    pub skipped: usize,
    /// Samples that never entered (including orbits leaving the domain).
    pub no_entry: usize,
}

/// Signs of `S(gⁿ⁺¹)` at first entries into `j`.
///
/// Every sample `x` is iterated until some `gⁿ(x)` lands in `j` (with
/// `n ≤ n_max`; `n = 0` means `x` starts inside).  The accumulated
/// Schwarzian of the composition `gⁿ⁺¹` is recorded and its sign counted:
/// `violations` is the number of non-negative values.  A vanishing
/// derivative along an orbit skips that sample; a sample whose orbit never
/// enters (or leaves the domain) counts as `no_entry`.
///
/// Precondition: `j` carries no neutral-band periodic point (scanned up to
/// period 6 at coarse resolution); a continuum of periodic points inside
/// `j` also rejects.
pub fn first_entry_schwarzian_check<R: Real>(
    g: &Map<R>,
    j: &Interval<R>,
    samples: &[R],
    n_max: usize,
) -> Result<FirstEntryReport<R>> {
    let dom = g.domain().as_interval()?;
    if j.intersect(&dom).is_none() {
        return Err(Error::Precondition(
            "the target interval misses the domain".into(),
        ));
    }
    for n in 1..=PRECHECK_PERIODS {
        match find_periodic_orbits_with_resolution(g, n, j, PRECHECK_CELLS) {
            Ok(found) => {
                for o in &found {
                    if classify_orbit(o, R::zero()) == OrbitClass::NeutralBand {
                        return Err(Error::Precondition(format!(
                            "the target holds a neutral period-{} point at {}",
                            o.period(),
                            o.min_point().approx_f64()
                        )));
                    }
                }
            }
            Err(Error::Degenerate(msg)) => {
                return Err(Error::Precondition(format!(
                    "the target holds a continuum of periodic points: {msg}"
                )))
            }
            Err(Error::Parameter(_)) => break, // region misses the domain
            Err(e) => return Err(e),
        }
    }

    let mut out = FirstEntryReport {
        samples: Vec::new(),
        violations: 0,
        skipped: 0,
        no_entry: 0,
    };
    'sample: for &x0 in samples {
        if !dom.contains(x0) {
            out.no_entry += 1;
            continue;
        }
        let mut y = x0;
        let mut d = R::one();
        let mut total = R::zero();
        for k in 0..=n_max {
            let s = match schwarzian_at(g, y) {
                Ok(s) => s,
                Err(Error::CriticalPoint { .. }) => {
                    out.skipped += 1;
                    continue 'sample;
                }
                Err(e) => return Err(e),
            };
            total = total + s * d * d;
            if j.contains(y) {
                if total >= R::zero() {
                    out.violations += 1;
                }
                out.samples.push(FirstEntrySample {
                    x: x0,
                    n: k,
                    schwarzian: total,
                });
                continue 'sample;
            }
            d = d * g.d1(y)?;
            y = match g.eval(y) {
                Ok(v) if v.is_finite() && dom.contains(v) => v,
                Ok(_) | Err(Error::OutOfDomain { .. }) => {
                    out.no_entry += 1;
                    continue 'sample;
                }
                Err(e) => return Err(e),
            };
        }
        out.no_entry += 1;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Quadratic Schwarzian bound near a critical point
// ---------------------------------------------------------------------------

/// Report of [`quadratic_schwarzian_bound_check`].
#[derive(Debug, Clone, Copy)]
pub struct QuadraticBoundReport<R> {
    /// Sampled `sup |D²g|` over the test interval.
    pub a: R,
    /// `|D²g(c)|` at the critical point.
    pub b: R,
    /// Samples actually evaluated.
    pub samples: usize,
    /// Samples skipped (too close to the critical point).
    pub skipped: usize,
    /// Samples where `Sg(x) < −B²/(A²(x−c)²)` fails.
    pub violations: usize,
    /// Largest observed `Sg(x)·(x−c)²·(A/B)²`; the bound asks `< −1`.
    pub worst_ratio: R,
}

/// Checks `Sg(x) < −B²/(A²(x−c)²)` around a quadratic critical point `c`.
///
/// `B = |D²g(c)|`, `A` is the sampled sup of `|D²g|` over `t`, and the
/// inequality is tested at `samples` midpoint-grid points of `t`.  The
/// normalized ratio `Sg(x)·(x−c)²·(A/B)²` is recorded; values `≥ −1` are
/// violations.
///
/// Preconditions: `c` is a critical point of multiplicity 1 (quadratic),
/// `t` lies inside the domain, contains `c` and no other critical point.
pub fn quadratic_schwarzian_bound_check<R: Real>(
    g: &Map<R>,
    c: R,
    t: &Interval<R>,
    samples: usize,
) -> Result<QuadraticBoundReport<R>> {
    if samples < 2 {
        return Err(Error::Parameter("need at least 2 samples".into()));
    }
    let dom = g.domain().as_interval()?;
    if !dom.contains_interval(t) {
        return Err(Error::Precondition(
            "the test interval leaves the domain".into(),
        ));
    }
    let scale = R::one() + c.abs();
    let tol = R::of(1e-9) * scale;
    let crits = g.critical_points(&dom)?;
    let me = crits
        .iter()
        .find(|cp| (cp.x - c).abs() <= tol)
        .ok_or_else(|| {
            Error::Precondition(format!("{} is not a critical point", c.approx_f64()))
        })?;
    if me.multiplicity != 1 {
        return Err(Error::Precondition(format!(
            "the critical point at {} is not quadratic (multiplicity {})",
            me.x.approx_f64(),
            me.multiplicity
        )));
    }
    let c = me.x;
    if !t.contains(c) {
        return Err(Error::Precondition(
            "the test interval misses the critical point".into(),
        ));
    }
    for cp in &crits {
        if (cp.x - c).abs() > tol && t.contains(cp.x) {
            return Err(Error::Precondition(format!(
                "the test interval holds another critical point at {}",
                cp.x.approx_f64()
            )));
        }
    }
    let b = g.jet(c)?.d2.abs();
    let mut a = b;
    for i in 0..=samples {
        let x = t.lerp(R::of(i as f64) / R::of(samples as f64));
        a = a.max(g.jet(x)?.d2.abs());
    }
    let mut report = QuadraticBoundReport {
        a,
        b,
        samples: 0,
        skipped: 0,
        violations: 0,
        worst_ratio: R::neg_infinity(),
    };
    for i in 0..samples {
        let x = t.lerp((R::of(i as f64) + R::of(0.5)) / R::of(samples as f64));
        let d = x - c;
        if d.abs() <= tol {
            report.skipped += 1;
            continue;
        }
        match schwarzian_at(g, x) {
            Ok(s) => {
                let ratio = s * d * d * (a / b) * (a / b);
                report.samples += 1;
                report.worst_ratio = report.worst_ratio.max(ratio);
                if ratio >= -R::one() {
                    report.violations += 1;
                }
            }
            Err(Error::CriticalPoint { .. }) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Uniform-contraction scan
// ---------------------------------------------------------------------------

/// One rung of the size ladder of [`uniform_contraction_scan`].
#[derive(Debug, Clone, Copy)]
pub struct ContractionRung<R> {
    /// Window length tested.
    pub size: R,
    /// Largest pullback-component length observed over all windows and
    /// depths at this size.
    pub worst: R,
    /// Whether every component stayed below `ε`.
    pub passed: bool,
}

/// Report of [`uniform_contraction_scan`].
#[derive(Debug, Clone)]
pub struct ContractionReport<R> {
    /// The component-length budget `ε`.
    pub epsilon: R,
    /// Largest window length whose rung passed; zero when none did.
    pub delta_hat: R,
    /// Rungs evaluated, largest size first, ending at the first pass.
    pub ladder: Vec<ContractionRung<R>>,
    /// Window positions per rung (before exclusions).
    pub windows: usize,
    /// Whether a neutral-band orbit was detected: the contraction
    /// hypothesis fails, but the scan still runs to show the collapse.
    pub flagged: bool,
    /// Diagnostics: exclusions, caps, detection failures.
    pub notes: Vec<String>,
}

/// Scans window sizes for the largest `δ̂` at which every pullback
/// component of every admissible window stays shorter than `epsilon`.
///
/// Windows are centred on a uniform grid of `interval_samples` midpoints;
/// windows meeting a padded neighborhood of an attracting pack are
/// excluded (backward orbits there leave the scope of the contraction
/// principle).  Each kept window is pulled back through all preimage
/// components to depth `n_max`.  The size ladder runs `|domain|·2⁻ᵏ` for
/// `k = 2, …, 16`, stopping at the first size that passes; since smaller
/// windows at the same midpoints are nested in larger ones, that size is
/// the largest passing one.
pub fn uniform_contraction_scan<R: Real>(
    g: &Map<R>,
    epsilon: R,
    interval_samples: usize,
    n_max: usize,
) -> Result<ContractionReport<R>> {
    if !(epsilon > R::zero()) {
        return Err(Error::Parameter(format!(
            "ε must be positive, got {}",
            epsilon.approx_f64()
        )));
    }
    if interval_samples == 0 {
        return Err(Error::Parameter("need at least one window".into()));
    }
    if n_max == 0 {
        return Err(Error::Parameter("the pullback depth must be at least 1".into()));
    }
    let dom = g.domain().as_interval()?;
    let mut notes = Vec::new();

    // Quick census: neutral orbits flag the scan, attracting packs carve
    // out exclusion zones around themselves.
    let pre_opts = CensusOptions {
        n_max: 4,
        rho: R::of(0.05),
        scan_cells: PRECHECK_CELLS,
        basin_iters: 2_000,
        basin_tol: R::of(1e-6),
    };
    let pre = census_single(g, &pre_opts)?;
    let flagged = pre
        .classes
        .iter()
        .any(|cl| *cl == OrbitClass::NeutralBand)
        || pre.packs.iter().any(|p| p.flagged());
    if flagged {
        notes.push("neutral-band orbit detected: contraction hypothesis fails".into());
    }
    let pad = R::of(0.02) * dom.length();
    let proxies: Vec<(R, R)> = pre
        .packs
        .iter()
        .filter(|p| p.has_attracting_member())
        .map(|p| {
            let iv = p.carrier().interval();
            (iv.lo() - pad, iv.hi() + pad)
        })
        .collect();
    if !proxies.is_empty() {
        notes.push(format!(
            "{} attracting pack(s) excluded from window placement",
            proxies.len()
        ));
    }

    let w = R::of(interval_samples as f64);
    let mut ladder = Vec::new();
    let mut delta_hat = R::zero();
    for k in 2..=16u32 {
        let size = dom.length() * R::of(0.5).powi(k as i32);
        let mut worst = R::zero();
        let mut tested = 0usize;
        'windows: for i in 0..interval_samples {
            let mid = dom.lo() + (R::of(i as f64) + R::of(0.5)) / w * dom.length();
            let half = size / R::of(2.0);
            let window = match Interval::new(
                (mid - half).max(dom.lo()),
                (mid + half).min(dom.hi()),
            ) {
                Ok(win) if !win.is_degenerate() => win,
                _ => continue,
            };
            if proxies
                .iter()
                .any(|(lo, hi)| window.lo() <= *hi && *lo <= window.hi())
            {
                continue;
            }
            tested += 1;
            let mut current = vec![window];
            for _ in 0..n_max {
                let mut next = Vec::new();
                for comp in &current {
                    next.extend(preimage_components(g, comp)?);
                }
                if next.len() > COMPONENT_CAP {
                    notes.push(format!(
                        "component cap reached at size {}",
                        size.approx_f64()
                    ));
                    next.truncate(COMPONENT_CAP);
                }
                if next.is_empty() {
                    break;
                }
                for comp in &next {
                    worst = worst.max(comp.length());
                }
                if worst >= epsilon {
                    break 'windows;
                }
                current = next;
            }
        }
        if tested == 0 {
            notes.push(format!(
                "no admissible window at size {}",
                size.approx_f64()
            ));
        }
        let passed = tested > 0 && worst < epsilon;
        ladder.push(ContractionRung {
            size,
            worst,
            passed,
        });
        if passed {
            delta_hat = size;
            break;
        }
    }
    if delta_hat == R::zero() {
        notes.push("no window size passed".into());
    }
    Ok(ContractionReport {
        epsilon,
        delta_hat,
        ladder,
        windows: interval_samples,
        flagged,
        notes,
    })
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

    fn small_census() -> CensusOptions<f64> {
        CensusOptions {
            n_max: 4,
            scan_cells: 1 << 14,
            ..CensusOptions::default()
        }
    }

    #[test]
    fn census_logistic_with_attracting_cycle() {
        // a = 3.2: fixed points 0 and 1 − 1/a = 0.6875, one attracting
        // 2-cycle, nothing at periods 3 and 4.  The 2-cycle and the inner
        // repeller share a pack; that pack is the only exceptional one and
        // captures the critical point.
        let a = 3.2_f64;
        let g = Map::logistic(a);
        let report = census_single(&g, &small_census()).unwrap();

        assert_eq!(report.orbits.len(), 3);
        assert_eq!(report.orbits[0].period(), 1);
        assert_relative_eq!(report.orbits[0].min_point(), 0.0, epsilon = 1e-9);
        assert_eq!(report.orbits[1].period(), 1);
        assert_relative_eq!(report.orbits[1].min_point(), 0.6875, epsilon = 1e-9);
        assert_eq!(report.orbits[2].period(), 2);
        let s = ((a + 1.0) * (a - 3.0)).sqrt();
        assert_relative_eq!(
            report.orbits[2].min_point(),
            (a + 1.0 - s) / (2.0 * a),
            epsilon = 1e-9
        );
        assert_relative_eq!(report.orbits[2].multiplier(), 0.16, epsilon = 1e-8);
        assert_eq!(
            report.classes,
            vec![
                OrbitClass::RepellingExpansive,
                OrbitClass::RepellingExpansive,
                OrbitClass::Attracting
            ]
        );

        assert_eq!(report.packs.len(), 2);
        assert_eq!(report.packs[0].members().len(), 1);
        assert_eq!(report.packs[1].members().len(), 2);
        assert_eq!(report.exceptional, vec![1]);

        assert_eq!(report.basin_hits.len(), 1);
        let hit = &report.basin_hits[0];
        assert_eq!(hit.pack, 1);
        assert_eq!(hit.seed, 0.5);
        assert_eq!(hit.kind, SeedKind::CriticalPoint);
        assert!(report.notes.is_empty());
    }

    #[test]
    fn census_fully_repelling_logistic() {
        // a = 4: orbit counts per period are 2, 1, 2, 3 and every
        // multiplier has magnitude ≥ 2, so nothing is exceptional and no
        // seed converges anywhere.
        let g = Map::logistic(4.0);
        let report = census_single(&g, &small_census()).unwrap();
        assert_eq!(report.orbits.len(), 8);
        let counts: Vec<usize> = (1..=4)
            .map(|n| report.orbits.iter().filter(|o| o.period() == n).count())
            .collect();
        assert_eq!(counts, vec![2, 1, 2, 3]);
        assert!(report
            .classes
            .iter()
            .all(|c| *c == OrbitClass::RepellingExpansive));
        for o in &report.orbits {
            assert!(o.multiplier().abs() >= 2.0 - 1e-6);
        }
        assert!(report.exceptional.is_empty());
        assert!(report.basin_hits.is_empty());
    }

    #[test]
    fn census_tracks_cubic_fixed_point_merger() {
        // x³ + λx: for λ < 1 three fixed points (0 attracting, ±√(1−λ)
        // repelling) in one pack because the map is increasing; past λ = 1
        // only the expansive origin remains.  No real critical points, and
        // the critical-interval boundary seeds escape, so no basin hits on
        // either side.
        let g = Map::cubic(0.9, -1.5, 1.5).unwrap();
        let report = census_single(&g, &small_census()).unwrap();
        assert_eq!(report.orbits.len(), 3);
        let r = 0.1f64.sqrt();
        assert_relative_eq!(report.orbits[0].min_point(), -r, epsilon = 1e-9);
        assert_relative_eq!(report.orbits[1].min_point(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(report.orbits[2].min_point(), r, epsilon = 1e-9);
        assert_eq!(report.packs.len(), 1);
        assert_eq!(report.packs[0].members().len(), 3);
        let carrier = report.packs[0].carrier().interval();
        assert_relative_eq!(carrier.lo(), -r, epsilon = 1e-9);
        assert_relative_eq!(carrier.hi(), r, epsilon = 1e-9);
        assert_eq!(report.exceptional, vec![0]);
        assert!(report.basin_hits.is_empty());

        let g = Map::cubic(1.1, -1.5, 1.5).unwrap();
        let report = census_single(&g, &small_census()).unwrap();
        assert_eq!(report.orbits.len(), 1);
        assert_relative_eq!(report.orbits[0].multiplier(), 1.1, epsilon = 1e-9);
        assert_eq!(report.packs.len(), 1);
        assert!(report.exceptional.is_empty());
    }

    #[test]
    fn basin_membership_examples() {
        // x³ − 1.2x: the pack joins the repelling origin with the
        // attracting 2-cycle ±√0.2.  A generic point converges; the exact
        // repeller stays put forever (0 maps to 0 exactly) and is outside
        // the basin.
        let g = Map::cubic(-1.2, -1.3, 1.3).unwrap();
        let orbits = {
            let mut os =
                find_periodic_orbits_with_resolution(&g, 1, &iv(-1.3, 1.3), 1 << 14).unwrap();
            os.extend(
                find_periodic_orbits_with_resolution(&g, 2, &iv(-1.3, 1.3), 1 << 14).unwrap(),
            );
            os
        };
        let packs = group_into_packs(&orbits, &g).unwrap();
        assert_eq!(packs.len(), 1);
        let pack = &packs[0];

        let check = basin_membership(&g, 0.3, pack, 10_000, 1e-8).unwrap();
        assert!(check.in_basin && !check.escaped);
        let check = basin_membership(&g, 0.0, pack, 10_000, 1e-8).unwrap();
        assert!(!check.in_basin && !check.escaped);
        // Starting outside the domain is an escape.
        let check = basin_membership(&g, 2.0, pack, 10_000, 1e-8).unwrap();
        assert!(!check.in_basin && check.escaped);

        // x³ + 0.9x: iterates of 1.2 blow past the domain edge mid-run.
        let g = Map::cubic(0.9, -1.5, 1.5).unwrap();
        let orbits =
            find_periodic_orbits_with_resolution(&g, 1, &iv(-1.5, 1.5), 1 << 14).unwrap();
        let packs = group_into_packs(&orbits, &g).unwrap();
        let pack = &packs[0];
        let check = basin_membership(&g, 0.2, pack, 10_000, 1e-8).unwrap();
        assert!(check.in_basin && !check.escaped);
        let check = basin_membership(&g, 1.2, pack, 10_000, 1e-8).unwrap();
        assert!(!check.in_basin && check.escaped);

        // A pack without an attracting member rejects the question.
        let g = Map::logistic(4.0);
        let orbits =
            find_periodic_orbits_with_resolution(&g, 1, &iv(0.0, 1.0), 1 << 14).unwrap();
        let packs = group_into_packs(&orbits, &g).unwrap();
        assert!(matches!(
            basin_membership(&g, 0.3, &packs[0], 10_000, 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn first_entry_negative_everywhere() {
        // Logistic a = 4 has Sg < 0 away from the critical point, so every
        // accumulated first-entry Schwarzian is negative.
        let g = Map::logistic(4.0);
        let j = iv(0.45, 0.55);
        let samples: Vec<f64> = (0..200).map(|i| 0.01 + 0.98 * (i as f64) / 199.0).collect();
        let report = first_entry_schwarzian_check(&g, &j, &samples, 50).unwrap();
        assert_eq!(report.violations, 0);
        assert!(!report.samples.is_empty());
        assert_eq!(
            report.samples.len() + report.skipped + report.no_entry,
            samples.len()
        );
        for s in &report.samples {
            assert!(s.schwarzian < 0.0);
        }

        // Worked instance: 0.3 → 0.84 → 0.5376 enters at n = 2, and the
        // composition rule gives Sg(0.3) + Sg(0.84)·Dg(0.3)²
        // + Sg(0.5376)·(Dg(0.3)·Dg(0.84))² with Sg(x) = −6/(1−2x)².
        let report = first_entry_schwarzian_check(&g, &j, &[0.3], 50).unwrap();
        assert_eq!(report.samples.len(), 1);
        assert_eq!(report.samples[0].n, 2);
        let sg = |x: f64| -6.0 / (1.0 - 2.0 * x).powi(2);
        let dg = |x: f64| 4.0 - 8.0 * x;
        let oracle = sg(0.3) + sg(0.84) * dg(0.3).powi(2)
            + sg(0.5376) * (dg(0.3) * dg(0.84)).powi(2);
        assert_relative_eq!(report.samples[0].schwarzian, oracle, max_relative = 1e-9);

        // A sample starting on the critical point is skipped, not counted.
        let report = first_entry_schwarzian_check(&g, &j, &[0.5], 50).unwrap();
        assert_eq!(report.skipped, 1);
        assert!(report.samples.is_empty());
    }

    #[test]
    fn first_entry_flags_positive_schwarzian_region() {
        // x³ + 0.9x has S > 0 near the origin: direct entries at n = 0
        // report positive values as violations.
        let g = Map::cubic(0.9, -1.5, 1.5).unwrap();
        let j = iv(-0.1, 0.1);
        let samples = [-0.09, -0.05, 0.05, 0.09, 0.3];
        let report = first_entry_schwarzian_check(&g, &j, &samples, 100).unwrap();
        assert!(report.violations >= 4);
        for s in &report.samples {
            if s.n == 0 {
                // S(g)(x) = 6(λ − 6x²)/(λ + 3x²)² with λ = 0.9.
                let x = s.x;
                let oracle =
                    6.0 * (0.9 - 6.0 * x * x) / (0.9 + 3.0 * x * x).powi(2);
                assert_relative_eq!(s.schwarzian, oracle, max_relative = 1e-9);
                assert!(s.schwarzian > 0.0);
            }
        }
    }

    #[test]
    fn first_entry_counts_escaping_orbits_as_no_entry() {
        // Orbits of x³ + 0.9x starting beyond the outer fixed point √0.1
        // grow monotonically and leave [−1.5, 1.5]: they must land in
        // `no_entry`, never surface as an out-of-domain error.
        let g = Map::cubic(0.9, -1.5, 1.5).unwrap();
        let j = iv(-0.1, 0.1);
        let report = first_entry_schwarzian_check(&g, &j, &[0.4, 1.2, -0.9], 60).unwrap();
        assert_eq!(report.no_entry, 3);
        assert!(report.samples.is_empty());
    }

    #[test]
    fn first_entry_rejects_neutral_target() {
        // x² + 1/4 has a tangential fixed point at 1/2 (multiplier 1):
        // a target containing it fails the precondition.
        let g = Map::new(
            Expr::poly_f64(&[0.25, 0.0, 1.0]),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let err = first_entry_schwarzian_check(&g, &iv(0.4, 0.6), &[0.1], 10).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn quadratic_bound_oracles() {
        // 1 − 2x²: D²g ≡ −4 so A = B = 4 and Sg(x)·x² = −3/2 exactly.
        let g = Map::new(
            Expr::poly_f64(&[1.0, 0.0, -2.0]),
            Domain::interval(-1.0, 1.0).unwrap(),
        );
        let report = quadratic_schwarzian_bound_check(&g, 0.0, &iv(-0.5, 0.5), 1000).unwrap();
        assert_relative_eq!(report.a, 4.0, epsilon = 1e-12);
        assert_relative_eq!(report.b, 4.0, epsilon = 1e-12);
        assert_eq!(report.violations, 0);
        assert_relative_eq!(report.worst_ratio, -1.5, max_relative = 1e-9);
        assert_eq!(report.samples + report.skipped, 1000);

        // Logistic a = 4: D²g ≡ −8, same ratio −3/2.
        let g = Map::logistic(4.0);
        let report =
            quadratic_schwarzian_bound_check(&g, 0.5, &iv(0.25, 0.75), 2000).unwrap();
        assert_relative_eq!(report.a, 8.0, epsilon = 1e-12);
        assert_relative_eq!(report.b, 8.0, epsilon = 1e-12);
        assert_eq!(report.violations, 0);
        assert_relative_eq!(report.worst_ratio, -1.5, max_relative = 1e-9);
    }

    #[test]
    fn quadratic_bound_preconditions() {
        // x³ at 0: the critical point is not quadratic.
        let g = Map::new(
            Expr::poly_f64(&[0.0, 0.0, 0.0, 1.0]),
            Domain::interval(-1.0, 1.0).unwrap(),
        );
        assert!(matches!(
            quadratic_schwarzian_bound_check(&g, 0.0, &iv(-0.5, 0.5), 100),
            Err(Error::Precondition(_))
        ));

        // Not a critical point at all.
        let g = Map::logistic(4.0);
        assert!(matches!(
            quadratic_schwarzian_bound_check(&g, 0.3, &iv(0.2, 0.4), 100),
            Err(Error::Precondition(_))
        ));

        // A test interval holding a second critical point.
        let g = Map::cubic(-1.2, -1.5, 1.5).unwrap();
        let c = (0.4f64).sqrt();
        assert!(matches!(
            quadratic_schwarzian_bound_check(&g, c, &iv(-1.0, 1.0), 100),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn contraction_scan_affine_growth() {
        // x/2 doubles windows backwards.  The deepest surviving chain
        // starts at the window around 1/16; its third pullback straddles
        // 1/2 and the fourth is clipped by the domain edge at 1, so the
        // worst component has length 8·s and ε = 0.2 is first met at
        // s = |dom|·2⁻⁶ with worst 1/8.
        let g = Map::new(
            Expr::affine(0.5, 0.0).unwrap(),
            Domain::interval(0.0, 1.0).unwrap(),
        );
        let report = uniform_contraction_scan(&g, 0.2, 8, 4).unwrap();
        assert!(!report.flagged);
        assert_relative_eq!(report.delta_hat, 0.015625, epsilon = 1e-12);
        assert_eq!(report.ladder.len(), 5);
        for rung in &report.ladder[..4] {
            assert!(!rung.passed);
        }
        let last = report.ladder.last().unwrap();
        assert!(last.passed);
        assert_relative_eq!(last.worst, 0.125, epsilon = 1e-9);
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("attracting pack")));
    }

    #[test]
    fn contraction_scan_expanding_logistic() {
        // Logistic a = 4: no attractor, preimages fold near the critical
        // point with square-root inflation, so sizes down to |dom|·2⁻⁵
        // pass with ε = 0.1.
        let g = Map::logistic(4.0);
        let report = uniform_contraction_scan(&g, 0.1, 16, 4).unwrap();
        assert!(!report.flagged);
        assert_relative_eq!(report.delta_hat, 0.03125, epsilon = 1e-12);
        assert_eq!(report.ladder.len(), 4);
        assert!(report.ladder[..3].iter().all(|r| !r.passed));
        assert!(report.ladder[3].passed);
        assert!(report.ladder[3].worst < 0.1);
    }

    #[test]
    fn contraction_scan_flags_neutral_parameter() {
        // a = 3: the fixed point 2/3 has multiplier exactly −1.
        let g = Map::logistic(3.0);
        let report = uniform_contraction_scan(&g, 0.5, 4, 2).unwrap();
        assert!(report.flagged);
        assert!(report.delta_hat > 0.0);
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("neutral-band")));
    }
}
