//! Exact dynamics: synchronous steps, runs to the fixed point with
//! activation times, and the simulation oracle for the stability problem.

use thiserror::Error;

use crate::config::Configuration;
use crate::deciders::{Method, StabilityVerdict};
use crate::grid::{Cell, GridKind, Topology};
use crate::rules::Rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("rule is for a {rule} grid but the configuration is {topology}")]
    GridMismatch { rule: GridKind, topology: GridKind },
    #[error("cell {0} is initially active")]
    CellInitiallyActive(Cell),
}

pub(crate) fn check_grid(rule: Rule, topology: Topology) -> Result<(), EngineError> {
    if rule.grid() != topology.kind() {
        return Err(EngineError::GridMismatch {
            rule: rule.grid(),
            topology: topology.kind(),
        });
    }
    Ok(())
}

/// One synchronous application of the rule to every cell.
pub fn step(rule: Rule, c: &Configuration) -> Result<Configuration, EngineError> {
    check_grid(rule, c.topology())?;
    let mut next = c.clone();
    for i in 0..c.topology().cell_count() {
        if !c.get_index(i) && rule.activates(c.neighbor_sum(i)) {
            next.set_index(i, true);
        }
    }
    Ok(next)
}

/// Marker for cells that never activate.
const NEVER: u32 = u32::MAX;

/// A complete run: first-activation time of every cell and the final state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub rule: Rule,
    pub initial: Configuration,
    activation: Vec<u32>,
    pub fixed_point: Configuration,
    /// Number of steps that changed the configuration.
    pub steps_to_fix: usize,
    /// False when a step budget stopped the run before the fixed point.
    pub reached_fixed_point: bool,
}

impl Trajectory {
    /// First time the cell is active (`Some(0)` for initially active cells).
    pub fn activation_time(&self, c: Cell) -> Option<usize> {
        self.activation_time_index(self.initial.topology().index(c))
    }

    pub fn activation_time_index(&self, i: usize) -> Option<usize> {
        match self.activation[i] {
            NEVER => None,
            t => Some(t as usize),
        }
    }

    /// The configuration at time `t` (clamped to the end of the run).
    pub fn state_at(&self, t: usize) -> Configuration {
        let topology = self.initial.topology();
        Configuration::from_fn(topology, |c| {
            self.activation_time(c).is_some_and(|a| a <= t)
        })
    }

    /// Number of active cells at time `t`.
    pub fn active_count_at(&self, t: usize) -> usize {
        self.activation
            .iter()
            .filter(|&&a| a != NEVER && a as usize <= t)
            .count()
    }

    /// Oracle verdict for an inactive cell, read from the run.
    pub fn verdict(&self, c: Cell) -> Result<StabilityVerdict, EngineError> {
        debug_assert!(self.reached_fixed_point);
        match self.activation_time(c) {
            Some(0) => Err(EngineError::CellInitiallyActive(c)),
            Some(t) => Ok(StabilityVerdict::not_stable(t, Method::Oracle)),
            None => Ok(StabilityVerdict::stable(Method::Oracle)),
        }
    }
}

/// Iterate until two consecutive configurations agree.
pub fn run_to_fixed_point(rule: Rule, c: &Configuration) -> Result<Trajectory, EngineError> {
    run(rule, c, None)
}

/// Iterate at most `max_steps` steps (or to the fixed point when `None`).
///
/// After the first full sweep only cells next to freshly activated cells are
/// re-examined: any other inactive cell sees the same neighbor sum as in the
/// previous step and therefore stays inactive.
pub fn run(
    rule: Rule,
    c: &Configuration,
    max_steps: Option<usize>,
) -> Result<Trajectory, EngineError> {
    let topology = c.topology();
    check_grid(rule, topology)?;
    let n = topology.cell_count();
    let mut state = c.clone();
    let mut activation = vec![NEVER; n];
    for i in c.active_indices() {
        activation[i] = 0;
    }
    let mut fresh: Vec<usize> = (0..n)
        .filter(|&i| !state.get_index(i) && rule.activates(state.neighbor_sum(i)))
        .collect();
    let mut stamp = vec![0u32; n];
    let mut t: u32 = 0;
    let budget = max_steps.unwrap_or(usize::MAX);
    let mut candidates = Vec::new();
    while !fresh.is_empty() && (t as usize) < budget {
        t += 1;
        for &i in &fresh {
            state.set_index(i, true);
            activation[i] = t;
        }
        candidates.clear();
        for &i in &fresh {
            for &j in topology.neighbor_indices(i).as_slice() {
                if !state.get_index(j) && stamp[j] != t {
                    stamp[j] = t;
                    candidates.push(j);
                }
            }
        }
        fresh.clear();
        fresh.extend(
            candidates
                .iter()
                .copied()
                .filter(|&j| rule.activates(state.neighbor_sum(j))),
        );
    }
    Ok(Trajectory {
        rule,
        initial: c.clone(),
        activation,
        fixed_point: state,
        steps_to_fix: t as usize,
        reached_fixed_point: fresh.is_empty(),
    })
}

/// Ground-truth stability by simulation.
pub fn oracle_stable(
    rule: Rule,
    c: &Configuration,
    u: Cell,
) -> Result<StabilityVerdict, EngineError> {
    check_grid(rule, c.topology())?;
    if c.get(u) {
        return Err(EngineError::CellInitiallyActive(u));
    }
    run_to_fixed_point(rule, c)?.verdict(u)
}
