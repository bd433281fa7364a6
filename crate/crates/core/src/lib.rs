//! Freezing totalistic cellular automata on triangular and square tori.
//!
//! The crate provides exact simulation ([`engine`]), fast stability deciders
//! for the rule classes that admit them ([`deciders`]), the graph routines
//! they rely on ([`graphkit`]) and a compiler from Boolean circuits to
//! configurations of the Turing-universal square rules 2 and 24
//! ([`circuits`]).

pub mod circuits;
pub mod config;
pub mod deciders;
pub mod engine;
pub mod graphkit;
pub mod grid;
pub mod rules;

pub use config::{Configuration, PaddedConfiguration, ParseError, Parsed};
pub use deciders::{decide, Method, StabilityVerdict};
pub use engine::{oracle_stable, run_to_fixed_point, step, Trajectory};
pub use grid::{Cell, GridKind, Region, Topology};
pub use rules::{Rule, RuleClass};
