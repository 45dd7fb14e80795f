//! Census experiments: the fixed-map orbit censuses, the logistic
//! parameter ramp, and the uniform pullback-contraction scan.

use rayon::prelude::*;
use unidym_core::census::{census_single, uniform_contraction_scan, CensusOptions};
use unidym_core::interval::Domain;
use unidym_core::map::Expr;
use unidym_core::Map64;

use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::record::ResultRecord;

/// Orbits, multipliers and packs of two fixed maps with closed-form
/// periodic structure.
pub(super) fn orbit_census(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "orbit-census";
    let _ = cfg;
    let mut out = Vec::new();

    // Logistic a = 3.2: fixed points 0 and 1 − 1/a = 0.6875, and an
    // attracting 2-cycle with multiplier 4 + 2a − a² = 0.16.
    let g = Map64::logistic(3.2);
    let opts = CensusOptions {
        n_max: 4,
        rho: 0.05,
        scan_cells: 1 << 14,
        basin_iters: 10_000,
        basin_tol: 1e-8,
    };
    let rep = census_single(&g, &opts)?;
    let fixed: Vec<f64> = rep
        .orbits
        .iter()
        .filter(|o| o.period() == 1)
        .map(|o| o.min_point())
        .collect();
    out.push(
        ResultRecord::new(ID, "fixed-count")
            .with_f("a", 3.2)
            .values(fixed.len() as f64, 2.0, 0.0)
            .check(fixed.len() == 2),
    );
    for target in [0.0, 0.6875] {
        let (best, diff) = fixed
            .iter()
            .map(|&p| (p, (p - target).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap_or((f64::NAN, f64::INFINITY));
        out.push(
            ResultRecord::new(ID, "fixed-point")
                .with_f("target", target)
                .values(best, target, 1e-9 - diff)
                .check(diff < 1e-9),
        );
    }
    let two: Vec<_> = rep.orbits.iter().filter(|o| o.period() == 2).collect();
    out.push(
        ResultRecord::new(ID, "two-cycle-count")
            .with_f("a", 3.2)
            .values(two.len() as f64, 1.0, 0.0)
            .check(two.len() == 1),
    );
    if let Some(o) = two.first() {
        let diff = (o.multiplier() - 0.16).abs();
        out.push(
            ResultRecord::new(ID, "two-cycle-multiplier")
                .with_f("a", 3.2)
                .values(o.multiplier(), 0.16, 1e-8 - diff)
                .check(diff < 1e-8),
        );
    }
    out.push(
        ResultRecord::new(ID, "exceptional-count")
            .with_f("a", 3.2)
            .values(rep.exceptional.len() as f64, 1.0, 0.0)
            .check(rep.exceptional.len() == 1),
    );
    let basin_hit = rep
        .basin_hits
        .iter()
        .any(|h| rep.exceptional.contains(&h.pack));
    out.push(
        ResultRecord::new(ID, "basin")
            .with_f("a", 3.2)
            .with_i("hits", rep.basin_hits.len() as i64)
            .values(if basin_hit { 1.0 } else { 0.0 }, 1.0, 0.0)
            .check(basin_hit),
    );

    // Cubic x³ − 1.2x on [−1.3, 1.3]: the fixed point 0 and the 2-cycle
    // ±√0.2 share one pack with carrier [−√0.2, √0.2] and shared
    // orientation-preserving period 2.
    let g2 = Map64::cubic(-1.2, -1.3, 1.3)?;
    let opts2 = CensusOptions {
        n_max: 2,
        rho: 0.05,
        scan_cells: 1 << 14,
        basin_iters: 4000,
        basin_tol: 1e-8,
    };
    let rep2 = census_single(&g2, &opts2)?;
    let s = 0.2f64.sqrt();
    out.push(
        ResultRecord::new(ID, "cubic-pack-count")
            .values(rep2.packs.len() as f64, 1.0, 0.0)
            .check(rep2.packs.len() == 1),
    );
    if let Some(pack) = rep2.packs.first() {
        let carrier = pack.carrier().interval();
        let err = (carrier.lo() + s).abs().max((carrier.hi() - s).abs());
        out.push(
            ResultRecord::new(ID, "cubic-carrier")
                .values(err, 1e-9, 1e-9 - err)
                .check(err < 1e-9),
        );
        let member_points: usize = pack.members().iter().map(|o| o.points().len()).sum();
        out.push(
            ResultRecord::new(ID, "cubic-members")
                .values(member_points as f64, 3.0, 0.0)
                .check(member_points == 3),
        );
        let opp = pack.orientation_preserving_period();
        out.push(
            ResultRecord::new(ID, "cubic-orientation-preserving")
                .values(opp as f64, 2.0, 0.0)
                .check(opp == 2),
        );
        // The carrier interval is exchanged with itself in a single
        // orientation-reversing step, so its period as an interval is 1
        // while the shared orientation-preserving period is 2.
        out.push(
            ResultRecord::new(ID, "cubic-carrier-period")
                .values(pack.carrier().period() as f64, 1.0, 0.0)
                .check(pack.carrier().period() == 1),
        );
    }
    Ok(out)
}

/// Pack census across a logistic parameter ramp: at most two exceptional
/// packs per parameter, and strict expansion for every orbit outside them.
pub(super) fn census_sweep(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "census-sweep";
    let grid = cfg.usize_or("census.grid", 200)?;
    if grid == 0 {
        return Ok(Vec::new());
    }
    let a_lo = cfg.f64_or("census.a-lo", 2.8)?;
    let a_hi = cfg.f64_or("census.a-hi", 3.57)?;
    if !(a_hi >= a_lo && a_lo.is_finite() && a_hi.is_finite()) {
        return Err(HarnessError::Usage(format!(
            "census.a-lo ≤ census.a-hi required, got {a_lo} and {a_hi}"
        )));
    }
    let rho = cfg.pos_f64_or("census.rho", 0.05)?;
    let n_max = cfg.usize_or("census.n-max", 8)?.max(1);
    let cells = cfg.usize_or("census.scan-cells", 1 << 13)?.max(1 << 8);
    let mut per: Vec<(usize, Vec<ResultRecord>)> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let a = if grid == 1 {
                a_lo
            } else {
                a_lo + (a_hi - a_lo) * i as f64 / (grid - 1) as f64
            };
            let g = Map64::logistic(a);
            let opts = CensusOptions {
                n_max,
                rho,
                scan_cells: cells,
                basin_iters: 2000,
                basin_tol: 1e-8,
            };
            let mut rows = Vec::new();
            match census_single(&g, &opts) {
                Err(e) => rows.push(
                    ResultRecord::new(ID, "exceptional-packs")
                        .with_f("a", a)
                        .flagged(&format!("census failed: {e}")),
                ),
                Ok(rep) => {
                    let exc = rep.exceptional.len();
                    rows.push(
                        ResultRecord::new(ID, "exceptional-packs")
                            .with_f("a", a)
                            .values(exc as f64, 2.0, 2.0 - exc as f64)
                            .check(exc <= 2),
                    );
                    rows.push(
                        ResultRecord::new(ID, "pack-count")
                            .with_f("a", a)
                            .values(rep.packs.len() as f64, 0.0, rep.packs.len() as f64)
                            .check(true),
                    );
                    for (pi, pack) in rep.packs.iter().enumerate() {
                        if rep.exceptional.contains(&pi) {
                            continue;
                        }
                        for o in pack.members() {
                            let m = o.multiplier().abs();
                            rows.push(
                                ResultRecord::new(ID, "orbit-multiplier")
                                    .with_f("a", a)
                                    .with_i("period", o.period() as i64)
                                    .values(m, 1.0 + rho, m - (1.0 + rho))
                                    .check(m > 1.0 + rho),
                            );
                        }
                    }
                }
            }
            (i, rows)
        })
        .collect();
    per.sort_by_key(|&(i, _)| i);
    Ok(per.into_iter().flat_map(|(_, rows)| rows).collect())
}

/// Largest window size whose pullback components stay uniformly small, on
/// three maps with pinned ladder outcomes.
pub(super) fn uniform_contraction(cfg: &Config, _seed: u64) -> Result<Vec<ResultRecord>> {
    const ID: &str = "uniform-contraction";
    let _ = cfg;
    let configs: Vec<(&str, Map64, f64, usize, usize, Option<f64>, bool)> = vec![
        ("logistic-4", Map64::logistic(4.0), 0.1, 16, 4, Some(0.03125), false),
        (
            "affine-half",
            Map64::new(Expr::affine(0.5, 0.0)?, Domain::interval(0.0, 1.0)?),
            0.2,
            8,
            4,
            Some(0.015625),
            false,
        ),
        ("logistic-3", Map64::logistic(3.0), 0.5, 4, 2, None, true),
    ];
    let mut out = Vec::new();
    for (label, g, eps, windows, n_max, pinned, expect_flag) in configs {
        let rep = uniform_contraction_scan(&g, eps, windows, n_max)?;
        if let Some(expect) = pinned {
            let err = (rep.delta_hat - expect).abs();
            out.push(
                ResultRecord::new(ID, "delta-hat")
                    .with_s("map", label)
                    .with_f("epsilon", eps)
                    .values(rep.delta_hat, expect, 1e-12 - err)
                    .check(err < 1e-12),
            );
        } else {
            out.push(
                ResultRecord::new(ID, "delta-hat")
                    .with_s("map", label)
                    .with_f("epsilon", eps)
                    .values(rep.delta_hat, 0.0, rep.delta_hat)
                    .check(rep.delta_hat > 0.0),
            );
        }
        out.push(
            ResultRecord::new(ID, "neutral-flag")
                .with_s("map", label)
                .values(
                    if rep.flagged { 1.0 } else { 0.0 },
                    if expect_flag { 1.0 } else { 0.0 },
                    0.0,
                )
                .check(rep.flagged == expect_flag),
        );
    }
    Ok(out)
}
