//! Experiment registry.
//!
//! Every experiment is a pure function from a configuration and a seed to a
//! list of [`ResultRecord`]s.  Randomized sweeps draw from counter-based
//! streams ([`crate::rng::stream`]), so reruns with the same seed reproduce
//! the records exactly.

mod bounds;
mod census_suite;
mod chains_suite;
mod critical_suite;
mod schwarz;

use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::Result;
use crate::record::ResultRecord;

/// A named experiment.
pub struct Experiment {
    /// Stable identifier used on the command line.
    pub id: &'static str,
    /// One-line description for `unidym list`.
    pub about: &'static str,
    /// Entry point.
    pub run: fn(&Config, u64) -> Result<Vec<ResultRecord>>,
}

/// All registered experiments, in display order.
pub fn registry() -> &'static [Experiment] {
    &[
        Experiment {
            id: "schwarzian-blowup",
            about: "Schwarzian of x³+λx at the origin against the closed form 6/λ",
            run: schwarz::schwarzian_blowup,
        },
        Experiment {
            id: "mobius-neutrality",
            about: "random Möbius maps: B = 1 and Sf = 0 to rounding error",
            run: schwarz::mobius_neutrality,
        },
        Experiment {
            id: "cos-bound-sweep",
            about: "cosine-rule lower bound on B over random quintic configurations",
            run: schwarz::cos_bound_sweep,
        },
        Experiment {
            id: "cos-sharpness",
            about: "iterated-cubic witness driving B below 0.05 at bounded Schwarzian size",
            run: schwarz::cos_sharpness,
        },
        Experiment {
            id: "minimum-principle",
            about: "derivative minimum principle on fixed expanding windows",
            run: schwarz::minimum_principle,
        },
        Experiment {
            id: "sinh-bound-sweep",
            about: "sinh-rule lower bounds (primary and chained) on logistic windows",
            run: bounds::sinh_bound_sweep,
        },
        Experiment {
            id: "ode-comparison",
            about: "Sturm comparison of φ = Df^{-1/2} against constant-coefficient solutions",
            run: bounds::ode_comparison,
        },
        Experiment {
            id: "composed-accounting",
            about: "distortion ledger of composed maps along pullback chains",
            run: bounds::composed_accounting,
        },
        Experiment {
            id: "critical-intervals",
            about: "critical intervals of x³+λx: endpoints, count, Schwarzian equality",
            run: critical_suite::critical_intervals,
        },
        Experiment {
            id: "excep-part1-sweep",
            about: "product lower bound ∏B > exp(−16κNd²) over three polynomial families",
            run: critical_suite::excep_part1_sweep,
        },
        Experiment {
            id: "excep-part2-sweep",
            about: "zoomed-configuration lower bound on B over three polynomial families",
            run: critical_suite::excep_part2_sweep,
        },
        Experiment {
            id: "quadratic-bound",
            about: "Sg < −B²/(A²(x−c)²) around quadratic critical points",
            run: critical_suite::quadratic_bound,
        },
        Experiment {
            id: "chain-pullback",
            about: "pullback chains of the logistic map: endpoints, validity, cross-ratios",
            run: chains_suite::chain_pullback,
        },
        Experiment {
            id: "multiplicity-44",
            about: "intersection multiplicity of periodic pullback chains against the ceiling 44",
            run: chains_suite::multiplicity_44,
        },
        Experiment {
            id: "u-sequence",
            about: "maximal one-sided interval sequences and their cutting times",
            run: chains_suite::u_sequence,
        },
        Experiment {
            id: "rho-envelope",
            about: "monotone envelopes of head vs. tail space over chain samples",
            run: chains_suite::rho_envelope,
        },
        Experiment {
            id: "first-entry-schwarzian",
            about: "sign of the accumulated Schwarzian at first entries into a window",
            run: chains_suite::first_entry_schwarzian,
        },
        Experiment {
            id: "orbit-census",
            about: "periodic orbits, multipliers and packs of two fixed maps",
            run: census_suite::orbit_census,
        },
        Experiment {
            id: "census-sweep",
            about: "pack census across a logistic parameter ramp",
            run: census_suite::census_sweep,
        },
        Experiment {
            id: "uniform-contraction",
            about: "largest window size with uniformly small pullback components",
            run: census_suite::uniform_contraction,
        },
    ]
}

/// Looks an experiment up by identifier.
pub fn find(id: &str) -> Option<&'static Experiment> {
    registry().iter().find(|e| e.id == id)
}

/// Uniform draw from `[lo, hi)`.
pub(crate) fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Interval constructor with harness error conversion.
pub(crate) fn iv(lo: f64, hi: f64) -> Result<unidym_core::Interval64> {
    Ok(unidym_core::Interval64::new(lo, hi)?)
}
