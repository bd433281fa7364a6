//! Fast stability deciders, one per rule class, and the dispatcher.
//!
//! Every decider returns the verdict of the simulation oracle together with
//! the exact activation time for unstable cells. Whenever a geometric guard
//! fails, or the torus is so small that a cell lists the same neighbor twice,
//! the decider hands the question to the oracle and tags the verdict with
//! [`Method::Oracle`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Configuration;
use crate::engine::{self, check_grid, EngineError, Trajectory};
use crate::graphkit::{self, Branch, InducedGraph};
use crate::grid::{Cell, GridKind, Topology};
use crate::rules::{Rule, RuleClass};

/// The procedure that produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Oracle,
    Trivial,
    TwoCore,
    TreeDepth,
    ThreeCore,
    SemiPlane,
    DiagonalOr,
    Corridor124,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Answer to the stability question for one inactive cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// First time the cell is active; `None` exactly when it is stable.
    pub activation_time: Option<usize>,
    pub method: Method,
}

impl StabilityVerdict {
    pub fn stable(method: Method) -> Self {
        StabilityVerdict {
            stable: true,
            activation_time: None,
            method,
        }
    }

    pub fn not_stable(time: usize, method: Method) -> Self {
        StabilityVerdict {
            stable: false,
            activation_time: Some(time),
            method,
        }
    }

    /// Same answer and time, whatever the method.
    pub fn agrees_with(&self, other: &StabilityVerdict) -> bool {
        self.stable == other.stable && self.activation_time == other.activation_time
    }
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.activation_time {
            None => write!(f, "Stable ({})", self.method),
            Some(t) => write!(f, "NotStable(t={t}) ({})", self.method),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("decider does not handle rule {0:?}")]
    UnsupportedRule(Rule),
}

fn check_query(rule: Rule, c: &Configuration, u: Cell) -> Result<(), DecideError> {
    check_grid(rule, c.topology())?;
    if c.get(u) {
        return Err(EngineError::CellInitiallyActive(u).into());
    }
    Ok(())
}

fn oracle(rule: Rule, c: &Configuration, u: Cell) -> Result<StabilityVerdict, DecideError> {
    Ok(engine::oracle_stable(rule, c, u)?)
}

/// Route a query to the decider of the rule's class.
pub fn decide(rule: Rule, c: &Configuration, u: Cell) -> Result<StabilityVerdict, DecideError> {
    check_query(rule, c, u)?;
    match rule.classify() {
        RuleClass::Trivial => decide_trivial(rule, c, u),
        RuleClass::Topological => match (rule.grid(), rule.name().as_str()) {
            (GridKind::Triangular, "23") | (GridKind::Square, "34") => {
                decide_topological_majority(rule, c, u)
            }
            (GridKind::Triangular, "2") | (GridKind::Square, "3") => {
                decide_topological_treedepth(rule, c, u)
            }
            _ => decide_topological_234(rule, c, u),
        },
        RuleClass::Algebraic => match rule.grid() {
            GridKind::Triangular => decide_algebraic_12_tri(rule, c, u),
            GridKind::Square => decide_algebraic_sq(rule, c, u),
        },
        RuleClass::TuringUniversal
        | RuleClass::FractalGrowing
        | RuleClass::NonQuiescent
        | RuleClass::Unclassified => oracle(rule, c, u),
    }
}

fn expect_rule(rule: Rule, allowed: &[(GridKind, &str)]) -> Result<(), DecideError> {
    let name = rule.name();
    if allowed.iter().any(|&(g, n)| g == rule.grid() && n == name) {
        Ok(())
    } else {
        Err(DecideError::UnsupportedRule(rule))
    }
}

/// Rules φ, 123/1234 and 3/4.
///
/// φ never activates anything. For 123 and 1234 every inactive cell next to
/// an active one activates, so activity spreads one step per unit of
/// distance. For 3 and 4 a cell activates only when all its neighbors are
/// active, and a neighbor that becomes active later would itself need the
/// query cell to be active, so the dynamics stop after one step.
pub fn decide_trivial(
    rule: Rule,
    c: &Configuration,
    u: Cell,
) -> Result<StabilityVerdict, DecideError> {
    use GridKind::*;
    check_query(rule, c, u)?;
    expect_rule(
        rule,
        &[
            (Triangular, "phi"),
            (Square, "phi"),
            (Triangular, "123"),
            (Square, "1234"),
            (Triangular, "3"),
            (Square, "4"),
        ],
    )?;
    let t = c.topology();
    let verdict = match rule.name().as_str() {
        "phi" => StabilityVerdict::stable(Method::Trivial),
        "123" | "1234" => match nearest_active_distance(c, u) {
            None => StabilityVerdict::stable(Method::Trivial),
            Some(d) => StabilityVerdict::not_stable(d, Method::Trivial),
        },
        _ => {
            if rule.activates(c.neighbor_sum(t.index(u))) {
                StabilityVerdict::not_stable(1, Method::Trivial)
            } else {
                StabilityVerdict::stable(Method::Trivial)
            }
        }
    };
    Ok(verdict)
}

/// BFS from `u` to the closest active cell.
fn nearest_active_distance(c: &Configuration, u: Cell) -> Option<usize> {
    let t = c.topology();
    let start = t.index(u);
    let mut dist = HashMap::from([(start, 0usize)]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        if c.get_index(i) {
            return Some(dist[&i]);
        }
        let d = dist[&i];
        for &j in t.neighbor_indices(i).as_slice() {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(j) {
                e.insert(d + 1);
                queue.push_back(j);
            }
        }
    }
    None
}

/// Rules 23 (triangular) and 34 (square): a cell activates once at most one
/// of its neighbors is inactive, so the dynamics peel `G[0]` down to its
/// 2-core one synchronous round per step. Stable cells are exactly the
/// 2-core: cycles of inactive cells and paths joining them.
pub fn decide_topological_majority(
    rule: Rule,
    c: &Configuration,
    u: Cell,
) -> Result<StabilityVerdict, DecideError> {
    check_query(rule, c, u)?;
    expect_rule(
        rule,
        &[(GridKind::Triangular, "23"), (GridKind::Square, "34")],
    )?;
    Ok(peeling_verdict(c, u, 2, Method::TwoCore))
}

/// Rule 234 (square): a cell activates once at most two neighbors are
/// inactive; the stable cells are the inactive 3-core.
pub fn decide_topological_234(
    rule: Rule,
    c: &Configuration,
    u: Cell,
) -> Result<StabilityVerdict, DecideError> {
    check_query(rule, c, u)?;
    expect_rule(rule, &[(GridKind::Square, "234")])?;
    Ok(peeling_verdict(c, u, 3, Method::ThreeCore))
}

fn peeling_verdict(c: &Configuration, u: Cell, k: usize, method: Method) -> StabilityVerdict {
    let g = InducedGraph::inactive(c);
    let rounds = graphkit::peeling_rounds(&g, k);
    peeling_to_verdict(rounds[c.topology().index(u)], method)
}

fn peeling_to_verdict(round: Option<u32>, method: Method) -> StabilityVerdict {
    match round {
        None => StabilityVerdict::stable(method),
        Some(t) => StabilityVerdict::not_stable(t as usize, method),
    }
}

/// Rules 2 (triangular) and 3 (square): a cell activates when exactly all
/// but one of its neighbors are active.
///
/// Cells of the inactive 2-core are stable (they are stable for the
/// majority rule). Otherwise each neighbor slot of `u` carries an arrival
/// time: 0 for an initially active neighbor, `h + 1` for the root of an
/// inactive tree of height `h` (a tree vertex activates one step after its
/// last child), and never for the single branch leading to a cycle, whose
/// cells wait for `u`. `u` activates one step after the second-latest
/// arrival unless the two latest arrivals coincide, in which case its sum
/// jumps over the activating value and it is stable.
pub fn decide_topological_treedepth(
    rule: Rule,
    c: &Configuration,
    u: Cell,
) -> Result<StabilityVerdict, DecideError> {
    check_query(rule, c, u)?;
    expect_rule(
        rule,
        &[(GridKind::Triangular, "2"), (GridKind::Square, "3")],
    )?;
    if c.topology().is_degenerate() {
        return oracle(rule, c, u);
    }
    let g = InducedGraph::inactive(c);
    let core = graphkit::k_core_mask(&g, 2);
    Ok(treedepth_verdict(&g, &core, c.topology(), u))
}

fn treedepth_verdict(g: &InducedGraph, core: &[bool], t: Topology, u: Cell) -> StabilityVerdict {
    if core[t.index(u)] {
        return StabilityVerdict::stable(Method::TreeDepth);
    }
    let branches = graphkit::branches(g, u).expect("u is inactive");
    let mut arrivals: Vec<Option<usize>> = branches
        .iter()
        .map(|b| match b {
            Branch::Absent => Some(0),
            Branch::Tree(h) => Some(h + 1),
            Branch::Cyclic => None,
        })
        .collect();
    // `None` (never) sorts last.
    arrivals.sort_by_key(|a| a.unwrap_or(usize::MAX));
    let d = arrivals.len();
    match (arrivals[d - 2], arrivals[d - 1]) {
        (Some(a), Some(b)) if a == b => StabilityVerdict::stable(Method::TreeDepth),
        (Some(a), _) => StabilityVerdict::not_stable(a + 1, Method::TreeDepth),
        (None, _) => StabilityVerdict::stable(Method::TreeDepth),
    }
}

/// Rule 12 (triangular).
///
/// Let `τ` be the distance from `u` to the nearest active cell. A neighbor
/// `v` of `u` is active at time `τ - 1` exactly when the arc of the
/// distance-`τ` disc on `v`'s side of the shared edge holds an active cell:
/// inside that arc the activity front reaches each cell through at most two
/// outward neighbors, so it propagates as a plain disjunction. `u` then sees
/// a sum of 1 or 2 and activates at `τ`, or a sum of 3 and never activates.
pub fn decide_algebraic_12_tri(
    rule: Rule,
    c: &Configuration,
    u: Cell,
) -> Result<StabilityVerdict, DecideError> {
    check_query(rule, c, u)?;
    expect_rule(rule, &[(GridKind::Triangular, "12")])?;
    let Some(tau) = nearest_active_distance(c, u) else {
        return Ok(StabilityVerdict::stable(Method::SemiPlane));
    };
    semi_plane_verdict(rule, c, u, tau)
}

fn semi_plane_verdict(
    rule: Rule,
    c: &Configuration,
    u: Cell,
    tau: usize,
) -> Result<StabilityVerdict, DecideError> {
    let t = c.topology();
    let mut marked = 0;
    for v in t.neighbors(u) {
        match t.semi_plane_arc(u, v, tau) {
            Ok(arc) => {
                if arc.iter().any(|w| c.get(w)) {
                    marked += 1;
                }
            }
            Err(_) => return oracle(rule, c, u),
        }
    }
    Ok(if marked == 3 {
        StabilityVerdict::stable(Method::SemiPlane)
    } else {
        StabilityVerdict::not_stable(tau, Method::SemiPlane)
    })
}

/// Rotation of `u`-centered offsets by `q` quarter turns counterclockwise.
fn rotate(q: usize, x: i64, y: i64) -> (i64, i64) {
    match q % 4 {
        0 => (x, y),
        1 => (-y, x),
        2 => (-x, -y),
        _ => (y, -x),
    }
}

/// The fold along one axis corridor of the distance-`τ` disc of a square
/// cell, in a frame where the corridor runs north from `u`.
///
/// The corridor cell at distance `i` is reached by the activity front through
/// three outward neighbors: the next corridor cell and the two diagonal
/// cells beside it, whose front states are the disjunctions `east[i]` and
/// `west[i]` of the disc cells in their cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorridorAnalysis {
    pub tau: usize,
    /// Quarter turns taking the north corridor onto this one.
    pub direction: usize,
    /// State of the disc cell at the end of the corridor.
    pub seed: bool,
    /// `east[i - 1]`: front state at time `τ - i - 1` of the cell east of
    /// corridor cell `i`, for `i = 1..τ`.
    pub east: Vec<bool>,
    pub west: Vec<bool>,
    /// Smallest corridor index whose two side cells disagree, or `τ` when
    /// they agree everywhere.
    pub i_star: usize,
    /// The indices `1..i_star` below the last asymmetric index.
    pub i_star_set: Vec<usize>,
    /// Number of indices in `i_star_set` whose two side cells are both
    /// active: each of them flips the corridor value.
    pub z: usize,
    /// Front states of the corridor cells, `values[i - 1]` for cell `i` at
    /// time `τ - i`.
    pub values: Vec<bool>,
}

impl CorridorAnalysis {
    fn compute(rule: Rule, c: &Configuration, u: Cell, direction: usize, tau: usize) -> Self {
        let t = c.topology();
        let at = |x: i64, y: i64| {
            let (rx, ry) = rotate(direction, x, y);
            c.get(t.offset(u, rx, ry))
        };
        let tt = tau as i64;
        // Disc cells beside the corridor: (±(τ - j), j) for j = 1..τ-1;
        // cone of the side cell at height i = disc cells with j >= i.
        let mut east = vec![false; tau];
        let mut west = vec![false; tau];
        let mut acc_e = false;
        let mut acc_w = false;
        for j in (1..tau).rev() {
            acc_e |= at(tt - j as i64, j as i64);
            acc_w |= at(-(tt - j as i64), j as i64);
            east[j - 1] = acc_e;
            west[j - 1] = acc_w;
        }
        let seed = at(0, tt);
        let mut values = vec![false; tau];
        values[tau - 1] = seed;
        for i in (1..tau).rev() {
            let sum = values[i] as usize + east[i - 1] as usize + west[i - 1] as usize;
            values[i - 1] = rule.activates(sum);
        }
        let i_star = (1..tau)
            .find(|&i| east[i - 1] != west[i - 1])
            .unwrap_or(tau);
        let i_star_set: Vec<usize> = (1..i_star).collect();
        let z = i_star_set
            .iter()
            .filter(|&&i| east[i - 1] && west[i - 1])
            .count();
        CorridorAnalysis {
            tau,
            direction,
            seed,
            east,
            west,
            i_star,
            i_star_set,
            z,
            values,
        }
    }

    /// Corridor endpoint (the neighbor of `u`) at time `τ - 1` by the parity
    /// rule for rules 12 and 124: an asymmetric side pair resets the value
    /// to active, every doubly active pair below it flips the value.
    pub fn parity_endpoint(&self) -> bool {
        let start = if self.i_star < self.tau {
            true
        } else {
            self.seed
        };
        start ^ (self.z % 2 == 1)
    }

    /// Corridor endpoint for rule 123: the disjunction of the whole
    /// directional arc of the disc.
    pub fn or_endpoint(&self) -> bool {
        self.seed
            || self.east.first().copied().unwrap_or(false)
            || self.west.first().copied().unwrap_or(false)
    }

    /// Endpoint from the explicit fold.
    pub fn endpoint(&self) -> bool {
        self.values[0]
    }

    /// Front state of the corridor cell at distance `i` (time `τ - i`).
    pub fn value(&self, i: usize) -> bool {
        self.values[i - 1]
    }
}

/// Exact state of any cell at any time near `u`, computed lazily over the
/// backward light cone. Cells at distance `d` from `u` cannot be active
/// before time `τ - d`, which cuts the recursion down to a thin shell.
pub struct LightCone<'a> {
    rule: Rule,
    c: &'a Configuration,
    u: Cell,
    tau: usize,
    memo: HashMap<(i64, i64, usize), bool>,
}

impl<'a> LightCone<'a> {
    pub fn new(rule: Rule, c: &'a Configuration, u: Cell, tau: usize) -> Self {
        assert_eq!(c.topology().kind(), GridKind::Square);
        LightCone {
            rule,
            c,
            u,
            tau,
            memo: HashMap::new(),
        }
    }

    /// State of the cell at offset `(x, y)` at time `t`.
    pub fn state(&mut self, x: i64, y: i64, t: i64) -> bool {
        if t < 0 {
            return false;
        }
        let d = x.abs() + y.abs();
        if t < self.tau as i64 - d {
            return false;
        }
        if t == 0 {
            return self.c.get(self.c.topology().offset(self.u, x, y));
        }
        let key = (x, y, t as usize);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.state(x, y, t - 1) || {
            let sum = [(0, 1), (0, -1), (1, 0), (-1, 0)]
                .iter()
                .filter(|&&(dx, dy)| self.state(x + dx, y + dy, t - 1))
                .count();
            self.rule.activates(sum)
        };
        self.memo.insert(key, v);
        v
    }
}

/// Rules 12, 123 and 124 (square).
///
/// With `τ` the distance from `u` to the nearest active cell, the front
/// states of `u`'s four neighbors at time `τ - 1` come from the corridor
/// folds. Rule 123: `u` activates at `τ` unless all four neighbors are active
/// at `τ - 1`. Rule 12: `u` activates at `τ` when one or two neighbors are
/// active, otherwise never. Rule 124 adds the cascade of
/// [`rule_124_cascade`] when exactly three neighbors are active.
pub fn decide_algebraic_sq(
    rule: Rule,
    c: &Configuration,
    u: Cell,
) -> Result<StabilityVerdict, DecideError> {
    check_query(rule, c, u)?;
    expect_rule(
        rule,
        &[
            (GridKind::Square, "12"),
            (GridKind::Square, "123"),
            (GridKind::Square, "124"),
        ],
    )?;
    let method = if rule.name() == "124" {
        Method::Corridor124
    } else {
        Method::DiagonalOr
    };
    let Some(tau) = nearest_active_distance(c, u) else {
        return Ok(StabilityVerdict::stable(method));
    };
    square_algebraic_verdict(rule, c, u, tau)
}

fn square_algebraic_verdict(
    rule: Rule,
    c: &Configuration,
    u: Cell,
    tau: usize,
) -> Result<StabilityVerdict, DecideError> {
    let t = c.topology();
    if 2 * tau + 6 > t.rows().min(t.cols()) {
        return oracle(rule, c, u);
    }
    let corridors: Vec<CorridorAnalysis> = (0..4)
        .map(|q| CorridorAnalysis::compute(rule, c, u, q, tau))
        .collect();
    let name = rule.name();
    let neighbor_active: Vec<bool> = corridors
        .iter()
        .map(|a| match name.as_str() {
            "123" => a.or_endpoint(),
            _ => a.parity_endpoint(),
        })
        .collect();
    let sum = neighbor_active.iter().filter(|&&b| b).count();
    let verdict = match name.as_str() {
        "123" | "12" => {
            if rule.activates(sum) {
                StabilityVerdict::not_stable(tau, Method::DiagonalOr)
            } else {
                StabilityVerdict::stable(Method::DiagonalOr)
            }
        }
        _ => {
            if rule.activates(sum) {
                StabilityVerdict::not_stable(tau, Method::Corridor124)
            } else if sum == 3 {
                let lagging = neighbor_active
                    .iter()
                    .position(|&b| !b)
                    .expect("one inactive");
                match rule_124_cascade(rule, c, u, tau, &corridors[lagging]) {
                    Some(v) => v,
                    None => return oracle(rule, c, u),
                }
            } else {
                // Sum 0: every neighbor's front was blocked; the ring of
                // eight cells around u fills and shields it for good.
                StabilityVerdict::stable(Method::Corridor124)
            }
        }
    };
    Ok(verdict)
}

/// Rule 124 with exactly three neighbors of `u` active at time `τ - 1`.
///
/// Call `s` the lagging neighbor and `f, g, h` its other neighbors (the
/// next corridor cell and the two diagonal ring cells). `u` sees sum 3 and
/// waits; it activates one step after `s` does, and `s` activates when its
/// own sum first lands in {1, 2} while `u` is still inactive.
///
/// Phase 1: if `f, g, h` are all active at `τ - 2`, `s` sees 3 from then on
/// and both cells are frozen inactive. Phase 2: the states of `f, g, h` at
/// `τ - 1` give `s`'s sum at `τ - 1`; 1 or 2 activate `s` at `τ` and `u` at
/// `τ + 1`, 3 freezes both. Phase 3: with all three still inactive, their
/// states at `τ` decide between `u` activating at `τ + 2` and stability;
/// if they are still all inactive, the plus formed by `s` and its four
/// neighbors is frozen once the eight cells around it are active. Returns
/// `None` if the cascade does not settle within these phases.
pub fn rule_124_cascade(
    rule: Rule,
    c: &Configuration,
    u: Cell,
    tau: usize,
    lagging: &CorridorAnalysis,
) -> Option<StabilityVerdict> {
    let tt = tau as i64;
    let q = lagging.direction;
    // f, g, h in the corridor frame: next corridor cell, east and west ring cells.
    let trio = [(0i64, 2i64), (1, 1), (-1, 1)];
    let phase1 = if tau >= 2 {
        let f = if tau == 2 {
            lagging.seed
        } else {
            lagging.value(2)
        };
        [f, lagging.east[0], lagging.west[0]]
    } else {
        [false; 3]
    };
    if phase1.iter().all(|&b| b) {
        return Some(StabilityVerdict::stable(Method::Corridor124));
    }
    let mut cone = LightCone::new(rule, c, u, tau);
    let sum_at = |time: i64, cone: &mut LightCone| {
        trio.iter()
            .filter(|&&(x, y)| {
                let (rx, ry) = rotate(q, x, y);
                cone.state(rx, ry, time)
            })
            .count()
    };
    let sum1 = sum_at(tt - 1, &mut cone);
    match sum1 {
        1 | 2 => return Some(StabilityVerdict::not_stable(tau + 1, Method::Corridor124)),
        3 => return Some(StabilityVerdict::stable(Method::Corridor124)),
        _ => {}
    }
    let sum2 = sum_at(tt, &mut cone);
    match sum2 {
        1 | 2 => Some(StabilityVerdict::not_stable(tau + 2, Method::Corridor124)),
        3 => Some(StabilityVerdict::stable(Method::Corridor124)),
        _ => {
            // u, f, g and h form a plus around s. When the eight cells
            // bordering the plus are active at τ, each arm sees sum 3 and s
            // sees 0 for as long as the plus stays inactive, i.e. forever.
            let ring = [
                (1, 0),
                (-1, 0),
                (0, -1),
                (2, 1),
                (-2, 1),
                (1, 2),
                (-1, 2),
                (0, 3),
            ];
            let sealed = ring.iter().all(|&(x, y)| {
                let (rx, ry) = rotate(q, x, y);
                cone.state(rx, ry, tt)
            });
            sealed.then(|| StabilityVerdict::stable(Method::Corridor124))
        }
    }
}

/// Decide every cell of a configuration at once, sharing the work that
/// does not depend on the query cell. Entries for active cells are `None`.
pub fn decide_all(
    rule: Rule,
    c: &Configuration,
) -> Result<Vec<Option<StabilityVerdict>>, DecideError> {
    check_grid(rule, c.topology())?;
    let t = c.topology();
    let n = t.cell_count();
    let name = rule.name();
    if let (RuleClass::Topological, GridKind::Triangular, "23")
    | (RuleClass::Topological, GridKind::Square, "34")
    | (RuleClass::Topological, GridKind::Square, "234") =
        (rule.classify(), t.kind(), name.as_str())
    {
        let (k, method) = if name == "234" {
            (3, Method::ThreeCore)
        } else {
            (2, Method::TwoCore)
        };
        let rounds = graphkit::peeling_rounds(&InducedGraph::inactive(c), k);
        return Ok(rounds
            .into_iter()
            .enumerate()
            .map(|(i, r)| (!c.get_index(i)).then(|| peeling_to_verdict(r, method)))
            .collect());
    }
    let inactive: Vec<usize> = (0..n).filter(|&i| !c.get_index(i)).collect();
    let mut out = vec![None; n];
    match (rule.classify(), t.kind(), name.as_str()) {
        (RuleClass::Topological, _, _) if !t.is_degenerate() => {
            let g = InducedGraph::inactive(c);
            let core = graphkit::k_core_mask(&g, 2);
            for &i in &inactive {
                out[i] = Some(treedepth_verdict(&g, &core, t, t.cell(i)));
            }
        }
        (RuleClass::Algebraic, _, _) | (RuleClass::Trivial, _, _) if c.active_count() > 0 => {
            let dist = graphkit::distance_field_indices(t, c.active_indices())
                .expect("at least one active cell");
            for &i in &inactive {
                let u = t.cell(i);
                let tau = dist[i] as usize;
                out[i] = Some(match (rule.classify(), t.kind()) {
                    (RuleClass::Algebraic, GridKind::Triangular) => {
                        semi_plane_verdict(rule, c, u, tau)?
                    }
                    (RuleClass::Algebraic, GridKind::Square) => {
                        square_algebraic_verdict(rule, c, u, tau)?
                    }
                    _ => decide_trivial(rule, c, u)?,
                });
            }
        }
        (RuleClass::Topological, _, _)
        | (RuleClass::TuringUniversal, _, _)
        | (RuleClass::FractalGrowing, _, _)
        | (RuleClass::NonQuiescent, _, _)
        | (RuleClass::Unclassified, _, _) => {
            let traj = engine::run_to_fixed_point(rule, c)?;
            for &i in &inactive {
                out[i] = Some(traj.verdict(t.cell(i))?);
            }
        }
        _ => {
            for &i in &inactive {
                out[i] = Some(decide(rule, c, t.cell(i))?);
            }
        }
    }
    Ok(out)
}

/// A disagreement found by [`crosscheck`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub cell: Cell,
    pub fast: StabilityVerdict,
    pub oracle: StabilityVerdict,
}

/// Result of comparing the fast deciders against one oracle run.
#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub cells_checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub fast_verdicts: Vec<Option<StabilityVerdict>>,
    pub trajectory: Trajectory,
}

/// Run the oracle once and the fast decider on every inactive cell.
pub fn crosscheck(rule: Rule, c: &Configuration) -> Result<CrosscheckReport, DecideError> {
    let trajectory = engine::run_to_fixed_point(rule, c)?;
    let fast_verdicts = decide_all(rule, c)?;
    let t = c.topology();
    let mut mismatches = Vec::new();
    let mut cells_checked = 0;
    for (i, fast) in fast_verdicts.iter().enumerate() {
        let Some(fast) = fast else { continue };
        cells_checked += 1;
        let oracle = trajectory.verdict(t.cell(i))?;
        if !fast.agrees_with(&oracle) {
            mismatches.push(Mismatch {
                cell: t.cell(i),
                fast: *fast,
                oracle,
            });
        }
    }
    Ok(CrosscheckReport {
        cells_checked,
        mismatches,
        fast_verdicts,
        trajectory,
    })
}
