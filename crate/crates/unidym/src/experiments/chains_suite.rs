//! Chain and pullback experiments: explicit pullback chains, the
//! intersection-multiplicity ceiling, maximal one-sided interval sequences,
//! contraction envelopes, and first-entry Schwarzian signs.

use unidym_core::census::first_entry_schwarzian_check;
use unidym_core::chains::{
    build_u_sequence, check_multiplicity_44, pull_back_chain, verify_pullback_cr, RhoSample,
};
use unidym_core::critical::compute_critical_intervals;
use unidym_core::orbits::find_periodic_orbits;
use unidym_core::{Interval64, Map64};

use super::iv;
use crate::config::Config;
use crate::error::Result;
use crate::record::ResultRecord;

/// Fixed pullback chains of the logistic map at `a = 4`: the closed-form
/// head endpoint, chain validity, and backward cross-ratio contraction.
pub(super) fn chain_pullback(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "chain-pullback";
    let _ = cfg;
    let g = Map64::logistic(4.0);
    let mut out = Vec::new();

    // One-step chain: the component of g⁻¹([0, 1/2]) containing 0.1 is
    // [0, (1−√½)/2].
    let t1 = iv(0.0, 0.5)?;
    let chain1 = pull_back_chain(&g, &t1, &[0.1, 0.36])?;
    let head = *chain1.head();
    let expect_hi = (1.0 - 0.5f64.sqrt()) / 2.0;
    let err_hi = (head.hi() - expect_hi).abs();
    out.push(
        ResultRecord::new(ID, "endpoint")
            .with_s("which", "right")
            .values(head.hi(), expect_hi, 1e-10 - err_hi)
            .check(err_hi < 1e-10),
    );
    let err_lo = head.lo().abs();
    out.push(
        ResultRecord::new(ID, "endpoint")
            .with_s("which", "left")
            .values(head.lo(), 0.0, 1e-10 - err_lo)
            .check(err_lo < 1e-10),
    );

    // Five-step chain along a generic orbit, kept clear of the critical
    // point at every level.
    let mut anchor = vec![0.13];
    for k in 0..5 {
        anchor.push(g.eval(anchor[k])?);
    }
    let end = anchor[5];
    let t5 = iv(end - 0.02, end + 0.02)?;
    let chain5 = pull_back_chain(&g, &t5, &anchor)?;
    let violations = chain5.validate(&g)?;
    out.push(
        ResultRecord::new(ID, "validate")
            .with_i("steps", 5)
            .values(violations.len() as f64, 0.0, -(violations.len() as f64))
            .check(violations.is_empty()),
    );
    let tail = *chain5.tail();
    let j = iv(
        tail.lo() + 0.25 * tail.length(),
        tail.hi() - 0.25 * tail.length(),
    )?;
    let cr = verify_pullback_cr(&g, &chain5, &j)?;
    out.push(
        ResultRecord::new(ID, "cross-ratio")
            .with_i("steps", 5)
            .values(cr.d_head, cr.d_tail, cr.d_tail - cr.d_head)
            .check(cr.d_head <= cr.d_tail * (1.0 + 1e-9)),
    );
    out.push(
        ResultRecord::new(ID, "multiplicity")
            .with_i("steps", 5)
            .values(cr.multiplicity as f64, 1.0, 0.0)
            .check(cr.multiplicity >= 1),
    );
    Ok(out)
}

/// Intersection multiplicity of the periodic pullback chains `U_n → U_0`
/// across logistic parameters and periods, against the universal ceiling.
pub(super) fn multiplicity_44(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "multiplicity-44";
    let params = cfg.f64_list_or("mult.parameters", &[3.2, 3.5, 3.83, 4.0])?;
    let n_max = cfg.usize_or("mult.n-max", 8)?.max(1);
    let mut out = Vec::new();
    for &a in &params {
        let g = Map64::logistic(a);
        let dom = g.domain().as_interval()?;
        let mut max_mult = 0usize;
        let mut checked = 0usize;
        let mut flagged = 0usize;
        let mut all_ok = true;
        for n in 1..=n_max {
            let orbits = match find_periodic_orbits(&g, n, &dom) {
                Ok(o) => o,
                Err(_) => {
                    flagged += 1;
                    continue;
                }
            };
            for orbit in &orbits {
                if orbit.tangential() {
                    flagged += 1;
                    continue;
                }
                match check_multiplicity_44(&g, orbit.points()) {
                    Ok(rep) => {
                        checked += 1;
                        max_mult = max_mult.max(rep.multiplicity);
                        all_ok &= rep.ok;
                    }
                    Err(_) => flagged += 1,
                }
            }
        }
        out.push(
            ResultRecord::new(ID, "max-multiplicity")
                .with_f("a", a)
                .with_i("orbits-checked", checked as i64)
                .with_i("orbits-flagged", flagged as i64)
                .values(max_mult as f64, 44.0, 44.0 - max_mult as f64)
                .check(all_ok && max_mult <= 44),
        );
    }
    Ok(out)
}

/// Maximal one-sided interval sequences around three periodic points:
/// self-validation, cutting-time budget, and critical-point avoidance in
/// the interiors.
pub(super) fn u_sequence(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "u-sequence";
    let _ = cfg;
    let mut out = Vec::new();
    let cases: Vec<(&str, Map64, usize, usize, f64)> = vec![
        // (label, map, orbit period to search, sequence length, kappa)
        ("logistic-3.2", Map64::logistic(3.2), 2, 2, 0.05),
        // At a = 3.46 the quartet's return derivative is +0.79, so the
        // orientation-preserving period equals the period itself.
        ("logistic-3.46", Map64::logistic(3.46), 4, 4, 0.05),
        ("cubic-fixed", Map64::cubic(0.9, -1.5, 1.5)?, 1, 2, 0.1),
    ];
    for (label, g, period, n, kappa) in cases {
        let dom = g.domain().as_interval()?;
        let orbits = find_periodic_orbits(&g, period, &dom)?;
        let p = match orbits.first() {
            Some(o) => o.min_point(),
            None => {
                out.push(
                    ResultRecord::new(ID, "validate")
                        .with_s("case", label)
                        .flagged("no periodic orbit found"),
                );
                continue;
            }
        };
        let set = compute_critical_intervals(&g)?;
        let useq = match build_u_sequence(&g, p, n, kappa, &set) {
            Ok(u) => u,
            Err(e) => {
                out.push(
                    ResultRecord::new(ID, "validate")
                        .with_s("case", label)
                        .flagged(&format!("construction failed: {e}")),
                );
                continue;
            }
        };
        let violations = useq.validate(&g, &set)?;
        out.push(
            ResultRecord::new(ID, "validate")
                .with_s("case", label)
                .with_i("n", n as i64)
                .with_f("kappa", kappa)
                .values(violations.len() as f64, 0.0, -(violations.len() as f64))
                .check(violations.is_empty()),
        );
        let cuts = useq.cutting_times().len();
        out.push(
            ResultRecord::new(ID, "cuttings")
                .with_s("case", label)
                .with_i("n", n as i64)
                .values(cuts as f64, 2.0 * n as f64, 2.0 * n as f64 - cuts as f64)
                .check(cuts <= 2 * n),
        );
        // Every interval before the seed must be injective, hence free of
        // critical points in its interior; the seed hull itself is exempt.
        let crits = g.critical_points(&dom)?;
        let mut interior = 0usize;
        for fam in [useq.right(), useq.left()] {
            for i in &fam[..fam.len().saturating_sub(1)] {
                for c in &crits {
                    if c.x > i.lo() + 1e-12 && c.x < i.hi() - 1e-12 {
                        interior += 1;
                    }
                }
            }
        }
        out.push(
            ResultRecord::new(ID, "critical-avoidance")
                .with_s("case", label)
                .values(interior as f64, 0.0, -(interior as f64))
                .check(interior == 0),
        );
    }
    Ok(out)
}

/// Head-space vs. tail-space contraction envelopes over chain samples from
/// a logistic parameter ramp, per multiplicity class.
pub(super) fn rho_envelope(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "rho-envelope";
    let grid = cfg.usize_or("rho.grid", 12)?.max(2);
    let n_cap = cfg.usize_or("rho.n-max", 3)?.max(1);
    // Chains with a fold inside the head are not diffeomorphic pullbacks,
    // so anchors come from free orbits with small tail windows; attempts
    // whose pullback crosses the fold are skipped, not errors.
    let mut samples: Vec<RhoSample<f64>> = Vec::new();
    for i in 0..grid {
        let a = 3.6 + 0.4 * i as f64 / (grid - 1) as f64;
        let g = Map64::logistic(a);
        let dom = g.domain().as_interval()?;
        for &x0 in &[0.11, 0.17, 0.23, 0.29] {
            for m in 1..=n_cap {
                let mut anchor = vec![x0];
                let mut alive = true;
                for k in 0..m {
                    match g.eval(anchor[k]) {
                        Ok(v) if dom.contains(v) => anchor.push(v),
                        _ => {
                            alive = false;
                            break;
                        }
                    }
                }
                if !alive {
                    continue;
                }
                for &w in &[0.008f64, 0.02] {
                    let end = anchor[m];
                    let lo = (end - w).max(dom.lo());
                    let hi = (end + w).min(dom.hi());
                    let t_m = match Interval64::new(lo, hi) {
                        Ok(t) if t.length() > 1e-6 => t,
                        _ => continue,
                    };
                    let chain = match pull_back_chain(&g, &t_m, &anchor) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    let j = match Interval64::new(
                        t_m.lo() + 0.3 * t_m.length(),
                        t_m.hi() - 0.3 * t_m.length(),
                    ) {
                        Ok(j) => j,
                        Err(_) => continue,
                    };
                    let cr = match verify_pullback_cr(&g, &chain, &j) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    samples.push(RhoSample {
                        input: cr.eps_tail,
                        output: cr.eps_head,
                        multiplicity: cr.multiplicity,
                    });
                }
            }
        }
    }
    let mut out = Vec::new();
    out.push(
        ResultRecord::new(ID, "samples")
            .with_i("count", samples.len() as i64)
            .values(samples.len() as f64, 1.0, samples.len() as f64 - 1.0)
            .check(!samples.is_empty()),
    );
    if samples.is_empty() {
        return Ok(out);
    }
    let lower = unidym_core::chains::estimate_rho(&samples, false);
    for env in &lower {
        for &(input, output) in &env.points {
            out.push(
                ResultRecord::new(ID, "rho-envelope")
                    .with_i("n", env.multiplicity as i64)
                    .with_f("input", input)
                    .values(output, 0.0, output)
                    .check(output > 0.0),
            );
        }
        let mono = env
            .points
            .windows(2)
            .all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        out.push(
            ResultRecord::new(ID, "monotone")
                .with_i("n", env.multiplicity as i64)
                .values(env.points.len() as f64, 1.0, env.points.len() as f64 - 1.0)
                .check(mono && !env.points.is_empty()),
        );
    }
    for env in unidym_core::chains::estimate_rho(&samples, true) {
        let mono = env
            .points
            .windows(2)
            .all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        out.push(
            ResultRecord::new(ID, "monotone-upper")
                .with_i("n", env.multiplicity as i64)
                .values(env.points.len() as f64, 1.0, env.points.len() as f64 - 1.0)
                .check(mono && !env.points.is_empty()),
        );
    }
    Ok(out)
}

/// Sign of the accumulated Schwarzian at first entries: never non-negative
/// for the negative-Schwarzian logistic map, and detectably positive for
/// the cubic family near its small-Schwarzian core.
pub(super) fn first_entry_schwarzian(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "first-entry-schwarzian";
    let total = cfg.usize_or("entry.samples", 1000)?.max(10);
    let horizon = cfg.usize_or("entry.n-max", 50)?.max(1);
    let mut out = Vec::new();

    let g = Map64::logistic(4.0);
    let j = iv(0.45, 0.55)?;
    let xs: Vec<f64> = (0..total)
        .map(|k| 0.01 + 0.98 * k as f64 / (total - 1) as f64)
        .collect();
    let rep = first_entry_schwarzian_check(&g, &j, &xs, horizon)?;
    out.push(
        ResultRecord::new(ID, "violations")
            .with_s("map", "logistic-4")
            .with_i("n-max", horizon as i64)
            .values(rep.violations as f64, 0.0, -(rep.violations as f64))
            .check(rep.violations == 0),
    );
    out.push(
        ResultRecord::new(ID, "coverage")
            .with_s("map", "logistic-4")
            .with_i("entered", rep.samples.len() as i64)
            .with_i("skipped", rep.skipped as i64)
            .with_i("no-entry", rep.no_entry as i64)
            .values(rep.samples.len() as f64, 1.0, rep.samples.len() as f64 - 1.0)
            .check(!rep.samples.is_empty()),
    );

    let g2 = Map64::cubic(0.9, -1.5, 1.5)?;
    let j2 = iv(-0.1, 0.1)?;
    let mut xs2: Vec<f64> = (0..41).map(|k| -0.09 + 0.18 * k as f64 / 40.0).collect();
    xs2.extend((0..10).map(|k| 0.2 + 0.25 * k as f64 / 9.0));
    let rep2 = first_entry_schwarzian_check(&g2, &j2, &xs2, horizon)?;
    out.push(
        ResultRecord::new(ID, "detects-positive")
            .with_s("map", "cubic-0.9")
            .with_i("samples", xs2.len() as i64)
            .values(rep2.violations as f64, 1.0, rep2.violations as f64 - 1.0)
            .check(rep2.violations >= 1),
    );
    Ok(out)
}
