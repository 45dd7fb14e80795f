//! Experiment harness for the one-dimensional dynamics kernel.
//!
//! The binary runs named experiments from [`experiments::registry`], each a
//! pure function from a flat key-value [`config::Config`] and a 64-bit seed
//! to a list of [`record::ResultRecord`]s.  Records are emitted as CSV
//! (with a single metadata comment line) or JSON lines, and can be rendered
//! into self-contained SVG plots.  All randomness flows through
//! counter-based streams seeded from the single run seed, so reruns are
//! byte-identical apart from the metadata timestamp.

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod record;
pub mod rng;
