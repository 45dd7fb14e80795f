//! Schwarzian and cross-ratio experiments: the blow-up family, Möbius
//! neutrality, the cosine-rule sweep, the small-distortion witness, and the
//! derivative minimum principle.

use std::f64::consts::PI;

use unidym_core::crossratio::{distortion, minimum_principle_check};
use unidym_core::interval::Domain;
use unidym_core::map::{Expr, Map};
use unidym_core::schwarzian::{
    schwarzian_at, schwarzian_sup, small_distortion_witness, verify_cos_bound,
};
use unidym_core::{Interval64, Map64};

use super::{iv, uniform};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::record::ResultRecord;
use crate::rng::stream;

/// Closed form of `S(x³+λx)` used as the independent reference.
fn cubic_schwarzian_reference(lambda: f64, x: f64) -> f64 {
    let den = lambda + 3.0 * x * x;
    6.0 * (lambda - 6.0 * x * x) / (den * den)
}

/// `S(x³+λx)(0) = 6/λ` against exact jets, plus a grid comparison with the
/// closed form across the whole domain.
pub(super) fn schwarzian_blowup(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "schwarzian-blowup";
    let lambdas = cfg.f64_list_or("blowup.lambdas", &[1.0, 0.1, 0.01, 0.001])?;
    let grid = cfg.usize_or("blowup.grid", 801)?.max(3);
    let mut out = Vec::new();
    for &lambda in &lambdas {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(HarnessError::Usage(format!(
                "blowup.lambdas entries must be positive, got {lambda}"
            )));
        }
        let f = Map64::cubic(lambda, -1.0, 1.0)?;
        let s0 = schwarzian_at(&f, 0.0)?;
        let expect = 6.0 / lambda;
        let rel = ((s0 - expect) / expect).abs();
        out.push(
            ResultRecord::new(ID, "s-at-zero")
                .with_f("lambda", lambda)
                .values(s0, expect, 1e-12 - rel)
                .check(rel < 1e-12),
        );
        let mut worst = 0.0f64;
        for k in 0..grid {
            let x = -1.0 + 2.0 * k as f64 / (grid - 1) as f64;
            let s = schwarzian_at(&f, x)?;
            let cf = cubic_schwarzian_reference(lambda, x);
            let err = (s - cf).abs() / cf.abs().max(1.0);
            worst = worst.max(err);
        }
        out.push(
            ResultRecord::new(ID, "grid-sup")
                .with_f("lambda", lambda)
                .with_i("grid", grid as i64)
                .values(worst, 1e-10, 1e-10 - worst)
                .check(worst < 1e-10),
        );
    }
    Ok(out)
}

/// Random Möbius maps on `[0, 1]`: their cross-ratio distortion is 1 and
/// their Schwarzian vanishes, both to rounding error.
pub(super) fn mobius_neutrality(cfg: &Config, seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "mobius-neutrality";
    let cases = cfg.usize_or("mobius.cases", 1000)?;
    let points = cfg.usize_or("mobius.points", 100)?.max(2);
    let mut rng = stream(seed, 0);
    let mut out = Vec::with_capacity(cases + 1);
    let mut worst_overall = 0.0f64;
    for i in 0..cases {
        // Pole −d/c stays far outside [0, 1] because |d| ≥ 2.5 ≥ 2.5|c|.
        let c = uniform(&mut rng, -1.0, 1.0);
        let mag = uniform(&mut rng, 2.5, 4.0);
        let d = if uniform(&mut rng, 0.0, 1.0) < 0.5 { mag } else { -mag };
        let mut a = 0.0;
        let mut b = 0.0;
        let mut det = 0.0;
        for _ in 0..128 {
            a = uniform(&mut rng, -2.0, 2.0);
            b = uniform(&mut rng, -2.0, 2.0);
            det = a * d - b * c;
            if det.abs() > 0.3 {
                break;
            }
        }
        if det.abs() <= 0.3 {
            out.push(
                ResultRecord::new(ID, "case")
                    .with_i("index", i as i64)
                    .flagged("could not draw a well-conditioned determinant"),
            );
            continue;
        }
        let f = Map::new(Expr::mobius(a, b, c, d)?, Domain::interval(0.0, 1.0)?);
        let x0 = uniform(&mut rng, 0.0, 0.05);
        let g1 = uniform(&mut rng, 0.05, 0.3);
        let g2 = uniform(&mut rng, 0.15, 0.3);
        let g3 = uniform(&mut rng, 0.05, 0.3);
        let scale = uniform(&mut rng, 0.5, 0.98) * (1.0 - x0) / (g1 + g2 + g3);
        let t = iv(x0, x0 + scale * (g1 + g2 + g3))?;
        let j = iv(x0 + scale * g1, x0 + scale * (g1 + g2))?;
        let b_val = distortion(&f, &t, &j)?;
        let mut case_worst = (b_val - 1.0).abs();
        for k in 0..points {
            let x = t.lo() + t.length() * k as f64 / (points - 1) as f64;
            case_worst = case_worst.max(schwarzian_at(&f, x)?.abs());
        }
        worst_overall = worst_overall.max(case_worst);
        out.push(
            ResultRecord::new(ID, "case")
                .with_i("index", i as i64)
                .with_f("det", det)
                .values(case_worst, 1e-10, 1e-10 - case_worst)
                .check(case_worst < 1e-10),
        );
    }
    out.push(
        ResultRecord::new(ID, "summary")
            .with_i("cases", cases as i64)
            .values(worst_overall, 1e-10, 1e-10 - worst_overall)
            .check(worst_overall < 1e-10),
    );
    Ok(out)
}

/// Cosine-rule lower bound over random increasing quintics, with the window
/// shrunk until the angle hypothesis holds.
pub(super) fn cos_bound_sweep(cfg: &Config, seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "cos-bound-sweep";
    let cases = cfg.usize_or("cos.cases", 500)?;
    let mut rng = stream(seed, 1);
    let mut out = Vec::with_capacity(cases);
    let target = 0.98 * PI * PI / 2.0;
    for i in 0..cases {
        let alpha = uniform(&mut rng, 0.0, 0.8);
        let beta = uniform(&mut rng, 0.0, 0.4);
        let f = Map::new(
            Expr::poly_f64(&[0.0, 1.0, 0.0, alpha, 0.0, beta]),
            Domain::interval(-1.1, 1.1)?,
        );
        let center = uniform(&mut rng, -0.6, 0.6);
        let mut half = uniform(&mut rng, 0.2, 0.9).min(1.0 - center.abs());
        let mut t = iv(center - half, center + half)?;
        let mut c = 1.1 * schwarzian_sup(&f, &t)?.max(0.0) + 0.3;
        let mut guard = 0;
        while c * t.length() * t.length() >= target && guard < 200 {
            half *= 0.8;
            t = iv(center - half, center + half)?;
            c = 1.1 * schwarzian_sup(&f, &t)?.max(0.0) + 0.3;
            guard += 1;
        }
        let m1 = 0.03 + 0.44 * uniform(&mut rng, 0.0, 1.0);
        let m2 = 0.03 + 0.44 * uniform(&mut rng, 0.0, 1.0);
        let len = t.length();
        let j = iv(t.lo() + m1 * len, t.hi() - m2 * len)?;
        let rep = verify_cos_bound(&f, &t, &j, c)?;
        let rec = ResultRecord::new(ID, "case")
            .with_i("index", i as i64)
            .with_f("c", c)
            .with_f("t-length", len)
            .values(rep.measured, rep.bound, rep.margin);
        out.push(if rep.hypothesis_ok {
            rec.check(rep.margin >= -1e-9)
        } else {
            rec.flagged(&rep.notes.join("; "))
        });
    }
    Ok(out)
}

/// Iterated-cubic witness: Schwarzian size stays below `2π²` while the
/// distortion of the fixed inner window drops below `0.05`, and every stage
/// respects the disconjugacy floor `(sin c / c)²` with `c = √(size/2)`.
pub(super) fn cos_sharpness(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "cos-sharpness";
    let stages = cfg.usize_or("sharpness.stages", 5)?;
    if stages == 0 || stages > 8 {
        return Err(HarnessError::Usage(format!(
            "sharpness.stages must be between 1 and 8, got {stages}"
        )));
    }
    let two_pi2 = 2.0 * PI * PI;
    let mut out = Vec::new();
    for s in 1..=stages {
        let (f, t, j): (Map64, Interval64, Interval64) = small_distortion_witness(s as u32)?;
        let b = distortion(&f, &t, &j)?;
        let sup = schwarzian_sup(&f, &t)?;
        let size = sup * t.length() * t.length();
        out.push(
            ResultRecord::new(ID, "schwarzian-size")
                .with_i("stage", s as i64)
                .values(size, two_pi2, two_pi2 - size)
                .check(size < two_pi2),
        );
        let carc = (size.max(0.0) / 2.0).sqrt();
        let floor = if carc <= 0.0 {
            1.0
        } else if carc >= PI {
            0.0
        } else {
            let r = carc.sin() / carc;
            r * r
        };
        out.push(
            ResultRecord::new(ID, "floor")
                .with_i("stage", s as i64)
                .with_f("c", carc)
                .values(b, floor, b - floor)
                .check(b >= floor),
        );
        let diffeo = f.is_diffeo_on(&t)?;
        out.push(
            ResultRecord::new(ID, "diffeo")
                .with_i("stage", s as i64)
                .values(if diffeo { 1.0 } else { 0.0 }, 1.0, 0.0)
                .check(diffeo),
        );
        if s == stages {
            out.push(
                ResultRecord::new(ID, "witness")
                    .with_i("stage", s as i64)
                    .values(b, 0.05, 0.05 - b)
                    .check(b < 0.05),
            );
        }
    }
    Ok(out)
}

/// Derivative minimum principle on three fixed expanding windows: endpoint
/// expansion plus controlled cross-ratio cubes force interior expansion.
pub(super) fn minimum_principle(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "minimum-principle";
    let samples = cfg.usize_or("minimum.samples", 64)?.max(8);
    let cases: Vec<(&str, Map64, Interval64, f64)> = vec![
        ("logistic-4", Map64::logistic(4.0), Interval64::new(0.05, 0.15)?, 0.5),
        (
            "logistic-4-squared",
            Map64::logistic(4.0).iterate(2),
            Interval64::new(0.06, 0.08)?,
            0.5,
        ),
        (
            "cubic-tail",
            Map64::cubic(-1.2, -1.3, 1.3)?,
            Interval64::new(1.1, 1.25)?,
            0.5,
        ),
    ];
    let mut out = Vec::new();
    for (label, f, t, rho) in cases {
        let rep = minimum_principle_check(&f, &t, rho, samples)?;
        out.push(
            ResultRecord::new(ID, "conclusion")
                .with_s("map", label)
                .with_f("rho", rho)
                .values(
                    rep.min_interior_derivative,
                    1.0 + rho,
                    rep.min_interior_derivative - (1.0 + rho),
                )
                .check(rep.conclusion_ok),
        );
        let (e0, e1) = rep.endpoint_derivatives;
        let emin = e0.min(e1);
        out.push(
            ResultRecord::new(ID, "endpoints")
                .with_s("map", label)
                .with_f("rho", rho)
                .values(emin, 1.0 + 2.0 * rho, emin - (1.0 + 2.0 * rho))
                .check(rep.endpoints_ok),
        );
        out.push(
            ResultRecord::new(ID, "b-hypothesis")
                .with_s("map", label)
                .with_f("rho", rho)
                .values(
                    rep.min_b_cubed,
                    rep.b_threshold,
                    rep.min_b_cubed - rep.b_threshold,
                )
                .check(rep.b_hypothesis_ok),
        );
    }
    Ok(out)
}
