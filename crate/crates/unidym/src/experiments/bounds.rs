//! Hyperbolic-side bounds and chain ledgers: the sinh-rule sweep, the Sturm
//! comparison oracle, and the composed-map distortion accounting.

use unidym_core::chains::pull_back_chain;
use unidym_core::critical::composed_distortion_accounting;
use unidym_core::schwarzian::{
    ode_comparison_oracle, schwarzian_sup, sinh_lower_bounds, verify_sinh_bound, BoundSide,
};
use unidym_core::{Interval64, Map64};

use super::{iv, uniform};
use crate::config::Config;
use crate::error::Result;
use crate::record::ResultRecord;
use crate::rng::stream;

/// Sinh-rule lower bounds on logistic windows kept clear of the critical
/// point, plus the pinned primary/secondary pair at `C = 2`, `|T| = 1`,
/// `δ = 1/2`.
pub(super) fn sinh_bound_sweep(cfg: &Config, seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "sinh-bound-sweep";
    let cases = cfg.usize_or("sinh.cases", 500)?;
    let mut rng = stream(seed, 2);
    let mut out = Vec::with_capacity(2 * cases + 1);

    let (primary, secondary) = sinh_lower_bounds::<f64>(2.0, 1.0, 0.5);
    let pinned_ok = primary >= secondary
        && (primary - 1.042190).abs() < 1e-6
        && (secondary - 1.041667).abs() < 1e-6;
    out.push(
        ResultRecord::new(ID, "pinned")
            .with_f("c", 2.0)
            .with_f("t-length", 1.0)
            .with_f("delta", 0.5)
            .values(primary, secondary, primary - secondary)
            .check(pinned_ok),
    );

    for i in 0..cases {
        let a = uniform(&mut rng, 3.2, 4.0);
        let f = Map64::logistic(a);
        let delta = uniform(&mut rng, 0.1, 0.8);
        // Keep T = (1+2δ)J inside (0.02, 0.98) and strictly off 0.5.
        let right = uniform(&mut rng, 0.0, 1.0) < 0.5;
        let center = if right {
            uniform(&mut rng, 0.60, 0.90)
        } else {
            uniform(&mut rng, 0.10, 0.40)
        };
        let room = if right {
            (center - 0.52).min(0.97 - center)
        } else {
            (center - 0.03).min(0.48 - center)
        };
        let half = uniform(&mut rng, 0.02, 0.1).min(0.95 * room / (1.0 + 2.0 * delta));
        if half <= 1e-4 {
            out.push(
                ResultRecord::new(ID, "case")
                    .with_i("index", i as i64)
                    .flagged("window placement failed"),
            );
            continue;
        }
        let j = iv(center - half, center + half)?;
        let t = j.scaled_neighborhood(delta)?;
        let sup = schwarzian_sup(&f, &t)?;
        let c = -0.9 * sup;
        if !(c > 0.0) {
            out.push(
                ResultRecord::new(ID, "case")
                    .with_i("index", i as i64)
                    .flagged("non-negative Schwarzian supremum"),
            );
            continue;
        }
        let rep = verify_sinh_bound(&f, &j, delta, c)?;
        let rec = ResultRecord::new(ID, "case")
            .with_i("index", i as i64)
            .with_f("a", a)
            .with_f("delta", delta)
            .with_f("c", c)
            .values(rep.measured, rep.bound, rep.margin);
        if rep.hypothesis_ok {
            let sec = rep.secondary_bound.unwrap_or(f64::NEG_INFINITY);
            let chained_margin = rep.measured - sec;
            out.push(rec.check(rep.margin >= -1e-9 && chained_margin >= -1e-9));
            out.push(
                ResultRecord::new(ID, "dominance")
                    .with_i("index", i as i64)
                    .values(rep.bound, sec, rep.bound - sec)
                    .check(rep.bound >= sec - 1e-12),
            );
        } else {
            out.push(rec.flagged(&rep.notes.join("; ")));
        }
    }
    Ok(out)
}

/// Sturm comparison of `φ = |Df|^{-1/2}` against constant-coefficient
/// solutions on four fixed windows, both hyperbolic and trigonometric.
pub(super) fn ode_comparison(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "ode-comparison";
    let residual_tol = cfg.pos_f64_or("ode.residual-tol", 1e-6)?;
    let quintic = Map64::new(
        unidym_core::map::Expr::poly_f64(&[0.0, 1.0, 0.0, 0.5, 0.0, 0.1]),
        unidym_core::interval::Domain::interval(-1.1, 1.1)?,
    );
    let configs: Vec<(&str, Map64, Interval64, f64, f64, Option<f64>, BoundSide)> = vec![
        (
            "logistic-4",
            Map64::logistic(4.0),
            Interval64::new(0.1, 0.4)?,
            0.15,
            0.35,
            Some(5.0),
            BoundSide::Cosh,
        ),
        (
            "logistic-3.6",
            Map64::logistic(3.6),
            Interval64::new(0.55, 0.8)?,
            0.6,
            0.75,
            Some(4.0),
            BoundSide::Cosh,
        ),
        (
            "quintic",
            quintic,
            Interval64::new(-0.8, 0.8)?,
            -0.6,
            0.6,
            None,
            BoundSide::Cos,
        ),
        (
            "cubic-up",
            Map64::cubic(0.5, -1.0, 1.0)?,
            Interval64::new(-0.6, 0.6)?,
            -0.45,
            0.45,
            None,
            BoundSide::Cos,
        ),
    ];
    let mut out = Vec::new();
    for (label, f, t, u1, u2, fixed_c, side) in configs {
        let c = match fixed_c {
            Some(v) => v,
            None => 1.1 * schwarzian_sup(&f, &t)?.max(0.0) + 0.2,
        };
        let rep = ode_comparison_oracle(&f, &t, u1, u2, c, side)?;
        out.push(
            ResultRecord::new(ID, "ordering")
                .with_s("map", label)
                .with_f("c", c)
                .values(rep.max_violation, 0.0, -rep.max_violation)
                .check(rep.ordering_ok),
        );
        out.push(
            ResultRecord::new(ID, "residual")
                .with_s("map", label)
                .values(
                    rep.integration_residual,
                    residual_tol,
                    residual_tol - rep.integration_residual,
                )
                .check(rep.integration_residual < residual_tol),
        );
        out.push(
            ResultRecord::new(ID, "psi-valid")
                .with_s("map", label)
                .values(if rep.psi_valid { 1.0 } else { 0.0 }, 1.0, 0.0)
                .check(rep.psi_valid),
        );
    }
    Ok(out)
}

/// Distortion ledger of `gᵐ` along anchored pullback chains: the one-shot
/// `log B` must match the per-step sum, and in the κ-small regime it must
/// clear the closed-form negative-contribution floor.
pub(super) fn composed_accounting(cfg: &Config, seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "composed-accounting";
    let cases = cfg.usize_or("accounting.cases", 40)?;
    let kappa = cfg.pos_f64_or("accounting.kappa", 0.4)?;
    let mut rng = stream(seed, 5);
    let mut out = Vec::new();
    let mut emitted = 0usize;
    let mut attempts = 0usize;
    while emitted < cases && attempts < cases * 40 + 200 {
        attempts += 1;
        let pick_cubic = emitted % 2 == 1;
        let (label, g, x0) = if pick_cubic {
            let lam = uniform(&mut rng, 0.7, 0.88);
            (
                "cubic-up",
                Map64::cubic(lam, -1.5, 1.5)?,
                uniform(&mut rng, -0.3, 0.3),
            )
        } else {
            let a = uniform(&mut rng, 3.6, 4.0);
            ("logistic", Map64::logistic(a), uniform(&mut rng, 0.05, 0.45))
        };
        let m = 2 + (uniform(&mut rng, 0.0, 4.0) as usize).min(3);
        let mut anchor = vec![x0];
        let mut orbit_ok = true;
        for k in 0..m {
            match g.eval(anchor[k]) {
                Ok(y) => anchor.push(y),
                Err(_) => {
                    orbit_ok = false;
                    break;
                }
            }
        }
        if !orbit_ok {
            continue;
        }
        let dom = g.domain().as_interval()?;
        let end = anchor[m];
        let w = uniform(&mut rng, 0.01, 0.03);
        let lo = (end - w).max(dom.lo() + 1e-6);
        let hi = (end + w).min(dom.hi() - 1e-6);
        if !(hi - lo > 5e-3) {
            continue;
        }
        let t_m = iv(lo, hi)?;
        let chain = match pull_back_chain(&g, &t_m, &anchor) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let head = *chain.head();
        let j = iv(
            head.lo() + 0.3 * head.length(),
            head.hi() - 0.3 * head.length(),
        )?;
        let rep = match composed_distortion_accounting(&g, &chain, &j, kappa) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let split_err = (rep.log_b_total - (rep.outside_sum + rep.inside_sum)).abs();
        let diff = (rep.log_b_direct - rep.log_b_total).abs().max(split_err);
        let tol = 1e-8 * (1.0 + rep.log_b_direct.abs());
        out.push(
            ResultRecord::new(ID, "ledger")
                .with_i("index", emitted as i64)
                .with_s("family", label)
                .with_i("m", m as i64)
                .values(rep.log_b_direct, rep.log_b_total, tol - diff)
                .check(diff <= tol),
        );
        let floor = ResultRecord::new(ID, "floor")
            .with_i("index", emitted as i64)
            .with_s("family", label)
            .with_i("multiplicity", rep.multiplicity as i64)
            .values(
                rep.log_b_direct,
                rep.negative_contribution_bound,
                rep.log_b_direct - rep.negative_contribution_bound,
            );
        out.push(if rep.hypotheses_ok {
            floor.check(rep.log_b_direct >= rep.negative_contribution_bound - 1e-9)
        } else {
            floor.flagged("per-step smallness hypotheses failed")
        });
        emitted += 1;
    }
    if emitted < cases {
        out.push(
            ResultRecord::new(ID, "summary")
                .with_i("emitted", emitted as i64)
                .flagged("admissible-configuration shortfall"),
        );
    }
    Ok(out)
}
