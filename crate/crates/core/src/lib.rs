//! Numerical kernels for the distortion calculus of one-dimensional real maps.
//!
//! The crate provides, layer by layer:
//!
//! * [`num`] — the [`num::Real`] scalar abstraction every kernel is generic over;
//! * [`interval`] — closed intervals and map domains;
//! * [`poly`] — dense real polynomials with a simultaneous complex root solver;
//! * [`map`] — expression trees for interval maps with exact derivatives up to
//!   order three (jets);
//! * [`crossratio`] — cross-ratios, cross-ratio distortion and the minimum
//!   principle check;
//! * [`schwarzian`] — the Schwarzian derivative, the cosine / hyperbolic-sine
//!   distortion bounds and a Sturm-type ODE comparison oracle;
//! * [`critical`] — critical intervals of polynomial maps and the distortion
//!   estimates attached to them;
//! * [`chains`] — pullback chains, intersection multiplicity and the interval
//!   sequences used to bound it;
//! * [`orbits`] — periodic orbit detection, classification and packs;
//! * [`census`] — attractor census, basin tests, first-entry Schwarzian scans
//!   and contraction scans.
//!
//! Concrete `f64` aliases for the main types live at the crate root.

pub mod census;
pub mod chains;
pub mod critical;
pub mod crossratio;
pub mod error;
pub mod interval;
pub mod map;
pub mod num;
pub mod orbits;
pub mod poly;
pub mod schwarzian;

pub use error::{Error, Result};

/// `f64` interval.
pub type Interval64 = interval::Interval<f64>;
/// `f64` map domain.
pub type Domain64 = interval::Domain<f64>;
/// `f64` dense polynomial.
pub type Polynomial64 = poly::Polynomial<f64>;
/// `f64` interval map.
pub type Map64 = map::Map<f64>;
/// `f64` order-3 jet.
pub type Jet64 = map::Jet<f64>;
/// `f64` pullback chain.
pub type Chain64 = chains::Chain<f64>;
/// `f64` periodic orbit.
pub type PeriodicOrbit64 = orbits::PeriodicOrbit<f64>;
/// `f64` periodic pack.
pub type PeriodicPack64 = orbits::PeriodicPack<f64>;
/// `f64` census report.
pub type CensusReport64 = census::CensusReport<f64>;
/// `f64` census options.
pub type CensusOptions64 = census::CensusOptions<f64>;
