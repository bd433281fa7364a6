//! Circuits for the Turing-universal square rules 2 and 24: gadget stamps, a
//! simulation-based gadget verifier, a reference Boolean evaluator and a
//! compiler from netlists to configurations.
//!
//! Gadget coordinates use `x` growing east and `y` growing north, both
//! starting at 1 in the lower-left corner of the stamp. A signal is an
//! activation front running along a dark track next to an active wall; a `1`
//! on an input port is an active seed cell on the port, a `0` leaves it dark.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Configuration;
use crate::engine::{self, EngineError, Trajectory};
use crate::grid::{Cell, GridKind, Topology};
use crate::rules::Rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("gadget stamp line {line}: {reason}")]
    BadGadget { line: usize, reason: String },
    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),
    #[error("netlist has a cycle through gate {0:?}")]
    NetlistCycle(String),
    #[error("netlist does not fit the layout bounds: {0}")]
    UnroutableNetlist(String),
    #[error("no value assigned to input {0:?}")]
    MissingAssignment(String),
    #[error("expected {expected} input bits, found {found:?}")]
    BadInputBits { expected: usize, found: String },
    #[error("circuits need a square rule, got {0:?}")]
    WrongRule(Rule),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Boolean behavior of a gadget, from its input ports to its output ports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    Identity,
    Copy,
    And,
    Or,
    Xor,
}

impl Truth {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "identity" => Truth::Identity,
            "copy" => Truth::Copy,
            "and" => Truth::And,
            "or" => Truth::Or,
            "xor" => Truth::Xor,
            _ => return None,
        })
    }

    fn arity(self) -> (usize, usize) {
        match self {
            Truth::Identity => (1, 1),
            Truth::Copy => (1, 2),
            Truth::And | Truth::Or | Truth::Xor => (2, 1),
        }
    }

    pub fn eval(self, inputs: &[bool]) -> Vec<bool> {
        match self {
            Truth::Identity => vec![inputs[0]],
            Truth::Copy => vec![inputs[0], inputs[0]],
            Truth::And => vec![inputs[0] && inputs[1]],
            Truth::Or => vec![inputs[0] || inputs[1]],
            Truth::Xor => vec![inputs[0] != inputs[1]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortDirection {
    In,
    Out,
}

/// A port cell on the boundary of a stamp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub direction: PortDirection,
    pub x: i64,
    pub y: i64,
}

impl Port {
    /// Side of the stamp the port lies on.
    pub fn side(&self, width: i64, height: i64) -> &'static str {
        if self.x == 1 {
            "west"
        } else if self.x == width {
            "east"
        } else if self.y == 1 {
            "south"
        } else if self.y == height {
            "north"
        } else {
            "inside"
        }
    }
}

/// A stampable pattern of active cells with ports.
///
/// Port cells are dark in the stamp: an input port is lit by the incoming
/// signal (or an ignition seed), an output port is the last track cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub name: String,
    pub truth: Truth,
    /// Steps from the ignition of the inputs to the activation of an output.
    pub delay: usize,
    pub width: i64,
    pub height: i64,
    /// Active cells as `(x, y)`.
    pub cells: Vec<(i64, i64)>,
    pub ports: Vec<Port>,
}

const STAMP_SOURCES: [(&str, &str); 8] = [
    ("wire", include_str!("../gadgets/wire.txt")),
    ("turning_wire", include_str!("../gadgets/turning_wire.txt")),
    ("duplicator", include_str!("../gadgets/duplicator.txt")),
    ("and", include_str!("../gadgets/and.txt")),
    ("or", include_str!("../gadgets/or.txt")),
    ("xor", include_str!("../gadgets/xor.txt")),
    ("shift_down", include_str!("../gadgets/shift_down.txt")),
    ("shift_up", include_str!("../gadgets/shift_up.txt")),
];

/// Names of the standard gadget set.
pub const STANDARD_GADGETS: [&str; 6] = ["wire", "turning_wire", "duplicator", "and", "or", "xor"];

impl Gadget {
    /// Parse a stamp: `key: value` header lines, a `---` separator, then rows
    /// of `.`/`#` from north to south.
    pub fn parse(text: &str) -> Result<Gadget, CircuitError> {
        let bad = |line: usize, reason: &str| CircuitError::BadGadget {
            line,
            reason: reason.to_string(),
        };
        let mut name = None;
        let mut truth = None;
        let mut delay = None;
        let mut ports = Vec::new();
        let mut lines = text.lines().enumerate();
        for (k, line) in lines.by_ref() {
            let line_no = k + 1;
            if line == "---" {
                break;
            }
            let (key, value) = line
                .split_once(": ")
                .ok_or_else(|| bad(line_no, "expected `key: value`"))?;
            match key {
                "name" => name = Some(value.to_string()),
                "truth" => {
                    truth = Some(Truth::parse(value).ok_or_else(|| bad(line_no, "unknown truth"))?)
                }
                "delay" => {
                    delay = Some(value.parse().map_err(|_| bad(line_no, "bad delay"))?);
                }
                "port" => {
                    let f: Vec<&str> = value.split(' ').collect();
                    let [dir, pname, x, y] = f[..] else {
                        return Err(bad(line_no, "port needs `in|out NAME X Y`"));
                    };
                    let direction = match dir {
                        "in" => PortDirection::In,
                        "out" => PortDirection::Out,
                        _ => return Err(bad(line_no, "port direction is `in` or `out`")),
                    };
                    let coord = |s: &str| {
                        s.parse::<i64>()
                            .map_err(|_| bad(line_no, "bad port coordinate"))
                    };
                    ports.push(Port {
                        name: pname.to_string(),
                        direction,
                        x: coord(x)?,
                        y: coord(y)?,
                    });
                }
                _ => return Err(bad(line_no, "unknown header key")),
            }
        }
        let mut rows: Vec<(usize, &str)> = Vec::new();
        for (k, line) in lines {
            rows.push((k + 1, line));
        }
        let first_row = rows.first().map_or(1, |r| r.0);
        let width = rows.first().map_or(0, |r| r.1.len()) as i64;
        let height = rows.len() as i64;
        if width == 0 {
            return Err(bad(first_row, "empty stamp"));
        }
        let mut cells = Vec::new();
        for (i, (line_no, row)) in rows.iter().enumerate() {
            if row.len() as i64 != width {
                return Err(bad(*line_no, "rows must have equal width"));
            }
            for (x, ch) in row.chars().enumerate() {
                match ch {
                    '#' => cells.push((x as i64 + 1, height - i as i64)),
                    '.' => {}
                    _ => return Err(bad(*line_no, "stamp symbols are `.` and `#`")),
                }
            }
        }
        cells.sort_unstable();
        let truth = truth.ok_or_else(|| bad(1, "missing `truth`"))?;
        let gadget = Gadget {
            name: name.ok_or_else(|| bad(1, "missing `name`"))?,
            truth,
            delay: delay.ok_or_else(|| bad(1, "missing `delay`"))?,
            width,
            height,
            cells,
            ports,
        };
        let (ins, outs) = truth.arity();
        if gadget.inputs().count() != ins || gadget.outputs().count() != outs {
            return Err(bad(1, "port count does not match the truth function"));
        }
        for p in &gadget.ports {
            if p.x < 1 || p.x > width || p.y < 1 || p.y > height {
                return Err(bad(1, "port outside the stamp"));
            }
            if gadget.cells.binary_search(&(p.x, p.y)).is_ok() {
                return Err(bad(1, "port cells must be dark"));
            }
        }
        Ok(gadget)
    }

    /// A bundled stamp by name.
    pub fn builtin(name: &str) -> Option<Gadget> {
        STAMP_SOURCES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, src)| Gadget::parse(src).expect("bundled stamps are valid"))
    }

    /// The standard gadget set, parsed from the built-in stamps.
    pub fn standard_gadgets() -> Vec<Gadget> {
        STANDARD_GADGETS
            .iter()
            .map(|n| Gadget::builtin(n).expect("bundled"))
            .collect()
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Port> {
        self.ports
            .iter()
            .filter(|p| p.direction == PortDirection::In)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Port> {
        self.ports
            .iter()
            .filter(|p| p.direction == PortDirection::Out)
    }

    /// Largest number of active stamp neighbors of any dark cell.
    pub fn max_dark_neighbor_sum(&self) -> usize {
        let set: HashSet<(i64, i64)> = self.cells.iter().copied().collect();
        let mut counts: HashMap<(i64, i64), usize> = HashMap::new();
        for &(x, y) in &self.cells {
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let c = (x + dx, y + dy);
                if !set.contains(&c) {
                    *counts.entry(c).or_default() += 1;
                }
            }
        }
        counts.values().copied().max().unwrap_or(0)
    }
}

/// Outcome of one input assignment in [`verify_gadget`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetCase {
    pub inputs: Vec<bool>,
    pub expected: Vec<bool>,
    pub observed: Vec<bool>,
    /// Activation time of each output port, if it activates.
    pub output_times: Vec<Option<usize>>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetReport {
    pub gadget: String,
    pub rule: String,
    /// The stamp alone is a fixed point of the rule.
    pub quiescent: bool,
    pub cases: Vec<GadgetCase>,
    pub pass: bool,
}

impl GadgetReport {
    pub fn failures(&self) -> impl Iterator<Item = &GadgetCase> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

/// Empty border around a stamp when it is verified on a torus.
const VERIFY_MARGIN: i64 = 4;

/// Stamp the gadget into a quiescent torus, ignite the `1` inputs, run the
/// rule and compare the output ports with the truth function. A case passes
/// when the outputs match and every active output fires exactly `delay` steps
/// after ignition.
pub fn verify_gadget(g: &Gadget, rule: Rule) -> Result<GadgetReport, CircuitError> {
    if rule.grid() != GridKind::Square {
        return Err(CircuitError::WrongRule(rule));
    }
    let rows = (g.height + 2 * VERIFY_MARGIN) as usize;
    let cols = (g.width + 2 * VERIFY_MARGIN) as usize;
    let topology = Topology::new(GridKind::Square, rows, cols).expect("positive dimensions");
    let at = |x: i64, y: i64| {
        Cell::new(
            (VERIFY_MARGIN + g.height - y) as usize,
            (VERIFY_MARGIN + x - 1) as usize,
        )
    };
    let mut base = Configuration::zeros(topology);
    for &(x, y) in &g.cells {
        base.set(at(x, y), true);
    }
    let budget = 4 * (rows + cols) * 2;
    let quiescent = engine::step(rule, &base)? == base;
    let inputs: Vec<&Port> = g.inputs().collect();
    let outputs: Vec<&Port> = g.outputs().collect();
    let mut cases = Vec::new();
    for bits in 0..1u32 << inputs.len() {
        let assignment: Vec<bool> = (0..inputs.len()).map(|i| bits >> i & 1 == 1).collect();
        let mut c = base.clone();
        for (p, &on) in inputs.iter().zip(&assignment) {
            if on {
                c.set(at(p.x, p.y), true);
            }
        }
        let traj = engine::run(rule, &c, Some(budget))?;
        let output_times: Vec<Option<usize>> = outputs
            .iter()
            .map(|p| traj.activation_time(at(p.x, p.y)))
            .collect();
        let observed: Vec<bool> = output_times.iter().map(Option::is_some).collect();
        let expected = g.truth.eval(&assignment);
        let on_time = output_times.iter().flatten().all(|&t| t == g.delay);
        cases.push(GadgetCase {
            pass: observed == expected && on_time && quiescent,
            inputs: assignment,
            expected,
            observed,
            output_times,
        });
    }
    let pass = quiescent && cases.iter().all(|c| c.pass);
    Ok(GadgetReport {
        gadget: g.name.clone(),
        rule: rule.name(),
        quiescent,
        cases,
        pass,
    })
}

/// Gate kinds of a netlist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Input,
    And,
    Or,
    Xor,
    Fanout,
    Output,
}

impl GateKind {
    fn arity(self) -> usize {
        match self {
            GateKind::Input => 0,
            GateKind::Fanout | GateKind::Output => 1,
            GateKind::And | GateKind::Or | GateKind::Xor => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    #[serde(default)]
    pub inputs: Vec<String>,
}

/// A Boolean circuit. `inputs` fixes the order of the INPUT gates, which is
/// the order of bit strings given to [`Netlist::assignment_from_bits`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Netlist {
    pub gates: Vec<Gate>,
    pub inputs: Vec<String>,
}

/// Value assignment to INPUT gates (or values of OUTPUT gates).
pub type Assignment = BTreeMap<String, bool>;

impl Netlist {
    pub fn from_json(text: &str) -> Result<Netlist, CircuitError> {
        serde_json::from_str(text).map_err(|e| CircuitError::InvalidNetlist(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("netlists serialize")
    }

    /// Check ids, arities and the input list; return the gates in
    /// topological order.
    pub fn validate(&self) -> Result<Vec<usize>, CircuitError> {
        let invalid = |s: String| Err(CircuitError::InvalidNetlist(s));
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, g) in self.gates.iter().enumerate() {
            if index.insert(&g.id, i).is_some() {
                return invalid(format!("duplicate gate id {:?}", g.id));
            }
        }
        let mut consumers = vec![0usize; self.gates.len()];
        for g in &self.gates {
            if g.inputs.len() != g.kind.arity() {
                return invalid(format!(
                    "gate {:?} ({:?}) needs {} inputs, has {}",
                    g.id,
                    g.kind,
                    g.kind.arity(),
                    g.inputs.len()
                ));
            }
            for src in &g.inputs {
                let Some(&j) = index.get(src.as_str()) else {
                    return invalid(format!("gate {:?} reads unknown gate {src:?}", g.id));
                };
                if self.gates[j].kind == GateKind::Output {
                    return invalid(format!("gate {:?} reads OUTPUT {src:?}", g.id));
                }
                consumers[j] += 1;
            }
        }
        for (g, &k) in self.gates.iter().zip(&consumers) {
            if g.kind == GateKind::Fanout && k > 2 {
                return invalid(format!("FANOUT {:?} feeds {k} gates, at most 2", g.id));
            }
        }
        let declared: Vec<&str> = self
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::Input)
            .map(|g| g.id.as_str())
            .collect();
        let mut listed: Vec<&str> = self.inputs.iter().map(String::as_str).collect();
        listed.sort_unstable();
        let mut sorted = declared.clone();
        sorted.sort_unstable();
        if listed != sorted {
            return invalid("`inputs` must list every INPUT gate exactly once".into());
        }
        let mut pending: Vec<usize> = self.gates.iter().map(|g| g.inputs.len()).collect();
        let mut readers: Vec<Vec<usize>> = vec![Vec::new(); self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            for src in &g.inputs {
                readers[index[src.as_str()]].push(i);
            }
        }
        let mut order = Vec::with_capacity(self.gates.len());
        let mut ready: Vec<usize> = (0..self.gates.len())
            .filter(|&i| pending[i] == 0)
            .rev()
            .collect();
        while let Some(i) = ready.pop() {
            order.push(i);
            for &r in readers[i].iter().rev() {
                pending[r] -= 1;
                if pending[r] == 0 {
                    ready.push(r);
                }
            }
        }
        if order.len() < self.gates.len() {
            let stuck = (0..self.gates.len())
                .find(|&i| pending[i] > 0)
                .expect("some gate is stuck");
            return Err(CircuitError::NetlistCycle(self.gates[stuck].id.clone()));
        }
        Ok(order)
    }

    /// Ids of the OUTPUT gates in declaration order.
    pub fn outputs(&self) -> Vec<&str> {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::Output)
            .map(|g| g.id.as_str())
            .collect()
    }

    /// Read a string such as `"110"`, one bit per entry of `inputs`.
    pub fn assignment_from_bits(&self, bits: &str) -> Result<Assignment, CircuitError> {
        let bad = || CircuitError::BadInputBits {
            expected: self.inputs.len(),
            found: bits.to_string(),
        };
        if bits.chars().count() != self.inputs.len() {
            return Err(bad());
        }
        self.inputs
            .iter()
            .zip(bits.chars())
            .map(|(id, ch)| match ch {
                '0' => Ok((id.clone(), false)),
                '1' => Ok((id.clone(), true)),
                _ => Err(bad()),
            })
            .collect()
    }

    /// Every assignment of the inputs, in binary counting order over
    /// `inputs` (first input is the most significant bit).
    pub fn all_assignments(&self) -> Vec<Assignment> {
        let k = self.inputs.len();
        (0..1u64 << k)
            .map(|m| {
                self.inputs
                    .iter()
                    .enumerate()
                    .map(|(i, id)| (id.clone(), m >> (k - 1 - i) & 1 == 1))
                    .collect()
            })
            .collect()
    }
}

/// Reference evaluation in topological order.
pub fn evaluate_netlist(n: &Netlist, assignment: &Assignment) -> Result<Assignment, CircuitError> {
    let order = n.validate()?;
    let mut value: HashMap<&str, bool> = HashMap::new();
    let mut outputs = Assignment::new();
    for i in order {
        let g = &n.gates[i];
        let arg = |k: usize| value[g.inputs[k].as_str()];
        let v = match g.kind {
            GateKind::Input => *assignment
                .get(&g.id)
                .ok_or_else(|| CircuitError::MissingAssignment(g.id.clone()))?,
            GateKind::And => arg(0) && arg(1),
            GateKind::Or => arg(0) || arg(1),
            GateKind::Xor => arg(0) != arg(1),
            GateKind::Fanout => arg(0),
            GateKind::Output => {
                outputs.insert(g.id.clone(), arg(0));
                arg(0)
            }
        };
        value.insert(&g.id, v);
    }
    Ok(outputs)
}

/// Horizontal period of the layout: every tile is one gadget wide.
const COLUMN_WIDTH: i64 = 28;
/// Vertical distance between adjacent lanes; ports of a tile sit one lane
/// above or below its center.
const LANE_PITCH: i64 = 11;
/// Lanes between the home lanes of consecutive signals in the pack.
const SLOT: i64 = 8;
/// Empty border around a compiled layout.
const LAYOUT_MARGIN: i64 = 4;
/// Largest torus a compiled layout may occupy.
pub const MAX_LAYOUT_CELLS: usize = 1 << 25;

/// Tiles of the compiled layout. Every tile takes one column and delays its
/// signal by 40 steps, so all signals stay in lockstep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum TileKind {
    ShiftUp,
    ShiftDown,
    Dup,
    And,
    Or,
    Xor,
}

impl TileKind {
    const ALL: [TileKind; 6] = [
        TileKind::ShiftUp,
        TileKind::ShiftDown,
        TileKind::Dup,
        TileKind::And,
        TileKind::Or,
        TileKind::Xor,
    ];

    fn gadget(self) -> &'static str {
        match self {
            TileKind::ShiftUp => "shift_up",
            TileKind::ShiftDown => "shift_down",
            TileKind::Dup => "duplicator",
            TileKind::And => "and",
            TileKind::Or => "or",
            TileKind::Xor => "xor",
        }
    }
}

/// A gadget placed in lane coordinates: `base` is the stamp row of the
/// tile's center lane.
struct TileShape {
    cells: Vec<(i64, i64)>,
    base: i64,
    inputs: Vec<(i64, i64)>,
}

fn tile_shape(kind: TileKind) -> &'static TileShape {
    static SHAPES: std::sync::OnceLock<Vec<TileShape>> = std::sync::OnceLock::new();
    let shapes = SHAPES.get_or_init(|| {
        TileKind::ALL
            .iter()
            .map(|k| {
                let g = Gadget::builtin(k.gadget()).expect("bundled");
                let anchor = if *k == TileKind::Dup {
                    g.inputs().next()
                } else {
                    g.outputs().next()
                };
                TileShape {
                    cells: g.cells.clone(),
                    base: anchor.expect("tiles have ports").y,
                    inputs: g.inputs().map(|p| (p.x, p.y)).collect(),
                }
            })
            .collect()
    });
    &shapes[TileKind::ALL
        .iter()
        .position(|k| *k == kind)
        .expect("listed")]
}

/// Column-by-column placement of tiles. Every live signal advances one
/// column per step of the machine and moves one lane up or down; a signal
/// with no explicit move heads for its home lane and then alternates
/// between `home` and `home + 1`.
#[derive(Default)]
struct Machine {
    tiles: Vec<(TileKind, usize, i64)>,
    /// Tokens feeding each two-input tile, parallel to the two-input
    /// entries of `tiles`.
    feeds: Vec<[usize; 2]>,
    column: usize,
    lane: BTreeMap<usize, i64>,
    home: BTreeMap<usize, i64>,
    sources: Vec<Source>,
}

/// How the value of a token is produced.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Source {
    Input(String),
    Copy(usize),
    Gate(TileKind, usize, usize),
}

impl Machine {
    fn spawn(&mut self, lane: i64, home: i64, source: Source) -> usize {
        let t = self.sources.len();
        self.sources.push(source);
        self.lane.insert(t, lane);
        self.home.insert(t, home);
        t
    }

    fn kill(&mut self, t: usize) {
        self.lane.remove(&t);
        self.home.remove(&t);
    }

    fn place(&mut self, kind: TileKind, center: i64) {
        self.tiles.push((kind, self.column, center));
    }

    fn shift(&mut self, from: i64, to: i64) {
        debug_assert_eq!((from - to).abs(), 1);
        let kind = if to < from {
            TileKind::ShiftDown
        } else {
            TileKind::ShiftUp
        };
        self.place(kind, to);
    }

    /// Finish a column: tokens in `explicit` were handled by the caller
    /// (`None` ends the token), all others take one step toward home.
    fn finish_column(&mut self, explicit: &[(usize, Option<i64>)]) {
        let idle: Vec<(usize, i64)> = self
            .lane
            .iter()
            .filter(|(t, _)| !explicit.iter().any(|(e, _)| e == *t))
            .map(|(&t, &l)| (t, l))
            .collect();
        for (t, l) in idle {
            let h = self.home[&t];
            let to = if l == h {
                l + 1
            } else if l > h {
                l - 1
            } else {
                l + 1
            };
            self.shift(l, to);
            self.lane.insert(t, to);
        }
        for &(t, l) in explicit {
            match l {
                Some(l) => {
                    self.lane.insert(t, l);
                }
                None => self.kill(t),
            }
        }
        self.column += 1;
    }

    /// Run idle columns until every token has reached home again.
    fn settle(&mut self) {
        let d = self
            .lane
            .iter()
            .map(|(t, l)| (l - self.home[t]).abs())
            .max()
            .unwrap_or(0);
        debug_assert!(d % 2 == 0, "tokens must be an even distance from home");
        for _ in 0..d {
            self.finish_column(&[]);
        }
    }

    fn at_home(&self, t: usize) -> i64 {
        let l = self.lane[&t];
        debug_assert_eq!(l, self.home[&t], "token must be at home");
        l
    }

    /// Copy each token at lane `L` to a new token at `L + 4` (6 columns).
    fn fanouts(&mut self, xs: &[usize]) -> Vec<usize> {
        let bases: Vec<i64> = xs.iter().map(|&x| self.at_home(x)).collect();
        let copies: Vec<usize> = xs
            .iter()
            .zip(&bases)
            .map(|(&x, &l)| self.spawn(l, l + 4, Source::Copy(x)))
            .collect();
        let mut explicit = Vec::new();
        for (i, &l) in bases.iter().enumerate() {
            self.place(TileKind::Dup, l);
            explicit.push((xs[i], Some(l)));
            explicit.push((copies[i], Some(l)));
        }
        self.finish_column(&explicit);
        const PATH: [(i64, i64, i64, i64); 5] = [
            (-1, 0, 1, 2),
            (0, 1, 2, 3),
            (1, 0, 3, 4),
            (0, 1, 4, 5),
            (1, 0, 5, 4),
        ];
        for (f1, t1, f2, t2) in PATH {
            let mut explicit = Vec::new();
            for (i, &l) in bases.iter().enumerate() {
                self.shift(l + f1, l + t1);
                self.shift(l + f2, l + t2);
                explicit.push((xs[i], Some(l + t1)));
                explicit.push((copies[i], Some(l + t2)));
            }
            self.finish_column(&explicit);
        }
        copies
    }

    /// Combine token `x` at home `L` with token `y` at lane `L + 4` into a
    /// new token at `L` (6 columns). Each input first passes a duplicator
    /// and an AND of its two copies, which lets signals through forward but
    /// never backward into the other input's wire.
    fn gates(&mut self, gs: &[(TileKind, usize, usize)]) -> Vec<usize> {
        let bases: Vec<i64> = gs.iter().map(|&(_, x, _)| self.at_home(x)).collect();
        for (&(_, _, y), &l) in gs.iter().zip(&bases) {
            debug_assert_eq!(self.lane[&y], l + 4);
        }
        let pair = |f: &dyn Fn(i64) -> (i64, i64)| -> Vec<(usize, Option<i64>)> {
            gs.iter()
                .zip(&bases)
                .flat_map(|(&(_, x, y), &l)| {
                    let (a, b) = f(l);
                    [(x, Some(a)), (y, Some(b))]
                })
                .collect()
        };
        for &l in &bases {
            self.place(TileKind::Dup, l);
            self.place(TileKind::Dup, l + 4);
        }
        self.finish_column(&pair(&|l| (l, l + 4)));
        for (&(_, x, y), &l) in gs.iter().zip(&bases) {
            self.place(TileKind::And, l);
            self.place(TileKind::And, l + 4);
            self.feeds.push([x, x]);
            self.feeds.push([y, y]);
        }
        self.finish_column(&pair(&|l| (l, l + 4)));
        for &l in &bases {
            self.shift(l, l + 1);
            self.shift(l + 4, l + 3);
        }
        self.finish_column(&pair(&|l| (l + 1, l + 3)));
        let mut outs = Vec::new();
        let mut explicit = Vec::new();
        for (&(kind, x, y), &l) in gs.iter().zip(&bases) {
            self.place(kind, l + 2);
            self.feeds.push([y, x]);
            let o = self.spawn(l + 2, l, Source::Gate(kind, x, y));
            outs.push(o);
            explicit.extend([(x, None), (y, None), (o, Some(l + 2))]);
        }
        self.finish_column(&explicit);
        for step in [1, 0] {
            let mut explicit = Vec::new();
            for (&o, &l) in outs.iter().zip(&bases) {
                self.shift(l + step + 1, l + step);
                explicit.push((o, Some(l + step)));
            }
            self.finish_column(&explicit);
        }
        outs
    }

    /// Exchange the values of `x` at home `L` and `y` at home `L + 8` with
    /// three XOR gates (24 columns). Returns the new tokens at `L` and
    /// `L + 8`.
    fn swap(&mut self, x: usize, y: usize) -> (usize, usize) {
        let c = self.fanouts(&[x, y]);
        let (x2, y2) = (c[0], c[1]);
        let m = self.gates(&[(TileKind::Xor, x2, y)])[0];
        let m2 = self.fanouts(&[m])[0];
        let out = self.gates(&[(TileKind::Xor, x, m), (TileKind::Xor, m2, y2)]);
        (out[0], out[1])
    }
}

/// Logical content of a token in the pack.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Carried {
    /// Value of a netlist gate (index into `gates`).
    Signal(usize),
    /// Claimed by an OUTPUT gate.
    Output(String),
}

/// Ordered signals of the lane machine; entry `i` has home lane `8 i`.
struct Pack {
    m: Machine,
    slots: Vec<(usize, Carried)>,
    swaps: usize,
}

impl Pack {
    fn rehome(&mut self, from: usize, delta: i64) {
        for i in from..self.slots.len() {
            let t = self.slots[i].0;
            *self.m.home.get_mut(&t).expect("live token") += delta;
        }
    }

    /// Insert a copy of slot `i` at slot `i + 1`.
    fn copy(&mut self, i: usize) {
        self.rehome(i + 1, SLOT / 2);
        self.m.settle();
        let copy = self.m.fanouts(&[self.slots[i].0])[0];
        self.rehome(i + 1, SLOT / 2);
        *self.m.home.get_mut(&copy).expect("live") += SLOT / 2;
        self.m.settle();
        let carried = self.slots[i].1.clone();
        self.slots.insert(i + 1, (copy, carried));
    }

    /// Exchange slots `i` and `i + 1`.
    fn swap(&mut self, i: usize) {
        let (a, b) = self.m.swap(self.slots[i].0, self.slots[i + 1].0);
        let (ca, cb) = (self.slots[i].1.clone(), self.slots[i + 1].1.clone());
        self.slots[i] = (a, cb);
        self.slots[i + 1] = (b, ca);
        self.swaps += 1;
    }

    /// Replace slots `i` and `i + 1` by `kind` of both.
    fn gate(&mut self, i: usize, kind: TileKind, result: Carried) {
        self.rehome(i + 1, -SLOT / 2);
        self.m.settle();
        let (x, y) = (self.slots[i].0, self.slots[i + 1].0);
        let o = self.m.gates(&[(kind, x, y)])[0];
        self.slots[i] = (o, result);
        self.slots.remove(i + 1);
        self.rehome(i + 1, -SLOT / 2);
        self.m.settle();
    }

    /// End slot `i` and close the gap.
    fn drop_slot(&mut self, i: usize) {
        self.m.kill(self.slots[i].0);
        self.slots.remove(i);
        self.rehome(i, -SLOT);
        self.m.settle();
    }

    fn find(&self, sig: usize, skip: Option<usize>) -> usize {
        (0..self.slots.len())
            .find(|&i| Some(i) != skip && self.slots[i].1 == Carried::Signal(sig))
            .expect("operand is live")
    }
}

/// Input port cells of one two-input tile (north port first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateInputs {
    pub column: usize,
    pub cells: [Cell; 2],
    /// Tokens whose signals reach the two ports.
    tokens: [usize; 2],
}

/// A netlist laid out for rules 2 and 24.
#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    /// The layout with the `1` inputs ignited.
    pub configuration: Configuration,
    /// Seed cell of every input; active exactly when the input is `1`.
    pub input_ignition_cells: BTreeMap<String, Cell>,
    /// Output cell of every OUTPUT gate.
    pub probe: BTreeMap<String, Cell>,
    /// Step budget for simulation: four times the layout perimeter.
    pub time_budget: usize,
    pub assignment: Assignment,
    /// Arrival cells of every two-input tile, for delay-balance checks.
    pub gate_inputs: Vec<GateInputs>,
    pub columns: usize,
    pub tiles: usize,
    /// Number of crossings realized by the XOR swap.
    pub crossings: usize,
    /// Steps a signal needs to cross one column: the tile delay plus one
    /// step to enter the next tile.
    pub column_delay: usize,
    sources: Vec<Source>,
}

/// Result of simulating a compiled circuit.
#[derive(Clone, Debug)]
pub struct CircuitRun {
    pub outputs: Assignment,
    pub probe_times: BTreeMap<String, Option<usize>>,
    pub trajectory: Trajectory,
}

impl CompiledCircuit {
    /// The same layout with other input values.
    pub fn with_assignment(
        &self,
        assignment: &Assignment,
    ) -> Result<CompiledCircuit, CircuitError> {
        let mut c = self.clone();
        for (id, &cell) in &self.input_ignition_cells {
            let on = *assignment
                .get(id)
                .ok_or_else(|| CircuitError::MissingAssignment(id.clone()))?;
            c.configuration.set(cell, on);
        }
        c.assignment = self
            .input_ignition_cells
            .keys()
            .map(|id| (id.clone(), assignment[id]))
            .collect();
        Ok(c)
    }

    /// Simulate under `rule` for the time budget and read the probes.
    pub fn simulate(&self, rule: Rule) -> Result<CircuitRun, CircuitError> {
        if rule.grid() != GridKind::Square {
            return Err(CircuitError::WrongRule(rule));
        }
        let trajectory = engine::run(rule, &self.configuration, Some(self.time_budget))?;
        let probe_times: BTreeMap<String, Option<usize>> = self
            .probe
            .iter()
            .map(|(id, &c)| (id.clone(), trajectory.activation_time(c)))
            .collect();
        let outputs = probe_times
            .iter()
            .map(|(id, t)| (id.clone(), t.is_some()))
            .collect();
        Ok(CircuitRun {
            outputs,
            probe_times,
            trajectory,
        })
    }

    /// Value carried by every token of the layout under the current
    /// assignment.
    fn token_values(&self) -> Vec<bool> {
        let mut v = Vec::with_capacity(self.sources.len());
        for src in &self.sources {
            let value = match src {
                Source::Input(id) => self.assignment[id],
                Source::Copy(t) => v[*t],
                Source::Gate(kind, x, y) => {
                    let (a, b): (bool, bool) = (v[*x], v[*y]);
                    match kind {
                        TileKind::And => a && b,
                        TileKind::Or => a || b,
                        TileKind::Xor => a != b,
                        _ => unreachable!("gates combine with AND, OR or XOR"),
                    }
                }
            };
            v.push(value);
        }
        v
    }

    /// Step at which signals reach the input ports of a tile in `column`.
    pub fn arrival_time(&self, column: usize) -> usize {
        column * self.column_delay
    }

    /// Two-input tiles where a port that carries a `1` is not reached at
    /// the scheduled step. With no violation both inputs of every gate that
    /// receives two signals arrive together.
    pub fn delay_violations(&self, run: &CircuitRun) -> Vec<GateInputs> {
        let values = self.token_values();
        self.gate_inputs
            .iter()
            .filter(|g| {
                let due = self.arrival_time(g.column);
                (0..2).any(|k| {
                    values[g.tokens[k]] && run.trajectory.activation_time(g.cells[k]) != Some(due)
                })
            })
            .cloned()
            .collect()
    }
}

/// Comparison of the same initial configuration under two rules.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuleAgreement {
    /// Cells that fire under one rule only and had four active neighbors
    /// when they fired. Such a cell changes no other cell's future.
    pub filled_holes: usize,
    /// Cells whose activation time differs in any other way.
    pub violations: Vec<Cell>,
}

impl RuleAgreement {
    pub fn agree(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compare two runs from the same start. Rules 2 and 24 differ only on
/// cells with four active neighbors, so outside of such holes the runs must
/// coincide step by step.
pub fn compare_runs(a: &Trajectory, b: &Trajectory) -> RuleAgreement {
    let topology = a.initial.topology();
    let mut report = RuleAgreement::default();
    for i in 0..topology.cell_count() {
        let (ta, tb) = (a.activation_time_index(i), b.activation_time_index(i));
        if ta == tb {
            continue;
        }
        let (only, t) = match (ta, tb) {
            (Some(t), None) => (a, t),
            (None, Some(t)) => (b, t),
            _ => {
                report.violations.push(topology.cell(i));
                continue;
            }
        };
        let surrounded = topology
            .neighbor_indices(i)
            .as_slice()
            .iter()
            .all(|&j| only.activation_time_index(j).is_some_and(|s| s < t));
        if surrounded {
            report.filled_holes += 1;
        } else {
            report.violations.push(topology.cell(i));
        }
    }
    report
}

/// Lay out a netlist with every input dark.
pub fn compile_layout(n: &Netlist) -> Result<CompiledCircuit, CircuitError> {
    let order = n.validate()?;
    let index: HashMap<&str, usize> = n
        .gates
        .iter()
        .enumerate()
        .map(|(i, g)| (g.id.as_str(), i))
        .collect();
    let resolve = |mut g: usize| {
        while n.gates[g].kind == GateKind::Fanout {
            g = index[n.gates[g].inputs[0].as_str()];
        }
        g
    };
    let mut live = vec![false; n.gates.len()];
    for &g in order.iter().rev() {
        if n.gates[g].kind == GateKind::Output {
            live[g] = true;
        }
        if live[g] {
            for src in &n.gates[g].inputs {
                live[index[src.as_str()]] = true;
            }
        }
    }
    let mut uses = vec![0usize; n.gates.len()];
    for g in n
        .gates
        .iter()
        .zip(&live)
        .filter(|(_, &l)| l)
        .map(|(g, _)| g)
    {
        if g.kind != GateKind::Fanout {
            for src in &g.inputs {
                uses[resolve(index[src.as_str()])] += 1;
            }
        }
    }
    let mut pack = Pack {
        m: Machine::default(),
        slots: Vec::new(),
        swaps: 0,
    };
    let mut ignition_lanes = BTreeMap::new();
    for (k, id) in n.inputs.iter().enumerate() {
        let home = SLOT * k as i64;
        let t = pack.m.spawn(home, home, Source::Input(id.clone()));
        pack.slots.push((t, Carried::Signal(index[id.as_str()])));
        ignition_lanes.insert(id.clone(), home);
    }
    while let Some(i) = (0..pack.slots.len())
        .rev()
        .find(|&i| matches!(pack.slots[i].1, Carried::Signal(s) if uses[s] == 0))
    {
        pack.drop_slot(i);
    }
    for &g in order.iter().filter(|&&g| live[g]) {
        let gate = &n.gates[g];
        let operand = |k: usize| resolve(index[gate.inputs[k].as_str()]);
        match gate.kind {
            GateKind::Input | GateKind::Fanout => {}
            GateKind::Output => {
                let s = operand(0);
                let mut i = pack.find(s, None);
                if uses[s] > 1 {
                    pack.copy(i);
                    i += 1;
                }
                uses[s] -= 1;
                pack.slots[i].1 = Carried::Output(gate.id.clone());
            }
            GateKind::And | GateKind::Or | GateKind::Xor => {
                let kind = match gate.kind {
                    GateKind::And => TileKind::And,
                    GateKind::Or => TileKind::Or,
                    _ => TileKind::Xor,
                };
                let (a, b) = (operand(0), operand(1));
                let mut pa = pack.find(a, None);
                if uses[a] > 1 {
                    pack.copy(pa);
                    pa += 1;
                }
                uses[a] -= 1;
                let mut pb = pack.find(b, Some(pa));
                if uses[b] > 1 {
                    pack.copy(pb);
                    if pb < pa {
                        pa += 1;
                    }
                    pb += 1;
                }
                uses[b] -= 1;
                let (lo, mut hi) = (pa.min(pb), pa.max(pb));
                while hi > lo + 1 {
                    pack.swap(hi - 1);
                    hi -= 1;
                }
                pack.gate(lo, kind, Carried::Signal(g));
            }
        }
        check_size(&pack)?;
    }
    if pack.m.column < 2 {
        pack.m.finish_column(&[]);
        pack.m.finish_column(&[]);
    }
    build_layout(n, pack, ignition_lanes)
}

fn layout_extent(pack: &Pack) -> (i64, i64, i64) {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &(kind, _, center) in &pack.m.tiles {
        let s = tile_shape(kind);
        for &(_, y) in s.cells.iter().chain(&s.inputs) {
            let wy = y - s.base + LANE_PITCH * center;
            lo = lo.min(wy);
            hi = hi.max(wy);
        }
    }
    let width = COLUMN_WIDTH * pack.m.column as i64;
    (lo.min(0), hi.max(0), width)
}

fn check_size(pack: &Pack) -> Result<(), CircuitError> {
    let lanes = pack.slots.len() as i64 * SLOT + SLOT;
    let rows = lanes * LANE_PITCH + 2 * LAYOUT_MARGIN;
    let cols = COLUMN_WIDTH * pack.m.column as i64 + 2 * LAYOUT_MARGIN;
    if (rows * cols) as usize > MAX_LAYOUT_CELLS {
        return Err(CircuitError::UnroutableNetlist(format!(
            "{} columns and {} live signals exceed {} cells",
            pack.m.column,
            pack.slots.len(),
            MAX_LAYOUT_CELLS
        )));
    }
    Ok(())
}

fn build_layout(
    n: &Netlist,
    pack: Pack,
    ignition_lanes: BTreeMap<String, i64>,
) -> Result<CompiledCircuit, CircuitError> {
    let (lo, hi, width) = layout_extent(&pack);
    let rows = (hi - lo + 1 + 2 * LAYOUT_MARGIN) as usize;
    let cols = (width + 2 * LAYOUT_MARGIN) as usize;
    if rows * cols > MAX_LAYOUT_CELLS {
        return Err(CircuitError::UnroutableNetlist(format!(
            "layout of {rows} x {cols} cells exceeds {MAX_LAYOUT_CELLS}"
        )));
    }
    let topology = Topology::new(GridKind::Square, rows, cols).expect("positive dimensions");
    let at = |x: i64, y: i64| {
        Cell::new(
            (LAYOUT_MARGIN + hi - y) as usize,
            (LAYOUT_MARGIN + x) as usize,
        )
    };
    let mut configuration = Configuration::zeros(topology);
    let mut gate_inputs = Vec::new();
    let mut feeds = pack.m.feeds.iter();
    for &(kind, column, center) in &pack.m.tiles {
        let s = tile_shape(kind);
        let world = |(fx, fy): (i64, i64)| {
            at(
                COLUMN_WIDTH * column as i64 + fx - 1,
                fy - s.base + LANE_PITCH * center,
            )
        };
        for &p in &s.cells {
            let c = world(p);
            debug_assert!(!configuration.get(c), "tiles overlap");
            configuration.set(c, true);
        }
        if s.inputs.len() == 2 {
            gate_inputs.push(GateInputs {
                column,
                cells: [world(s.inputs[0]), world(s.inputs[1])],
                tokens: *feeds.next().expect("one feed per two-input tile"),
            });
        }
    }
    let input_ignition_cells = ignition_lanes
        .into_iter()
        .map(|(id, lane)| (id, at(0, LANE_PITCH * lane)))
        .collect();
    let last_x = width - 1;
    let probe: BTreeMap<String, Cell> = pack
        .slots
        .iter()
        .filter_map(|(t, carried)| match carried {
            Carried::Output(id) => Some((id.clone(), at(last_x, LANE_PITCH * pack.m.lane[t]))),
            Carried::Signal(_) => None,
        })
        .collect();
    debug_assert_eq!(probe.len(), n.outputs().len());
    let tiles = pack.m.tiles.len();
    Ok(CompiledCircuit {
        configuration,
        input_ignition_cells,
        probe,
        time_budget: 4 * 2 * (rows + cols),
        assignment: n.inputs.iter().map(|id| (id.clone(), false)).collect(),
        gate_inputs,
        columns: pack.m.column,
        tiles,
        crossings: pack.swaps,
        column_delay: Gadget::builtin("or").expect("bundled").delay + 1,
        sources: pack.m.sources,
    })
}

/// Lay out a netlist and ignite the inputs that are `1`.
pub fn compile(n: &Netlist, assignment: &Assignment) -> Result<CompiledCircuit, CircuitError> {
    compile_layout(n)?.with_assignment(assignment)
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Input => "INPUT",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
            GateKind::Fanout => "FANOUT",
            GateKind::Output => "OUTPUT",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(id: &str, kind: GateKind, inputs: &[&str]) -> Gate {
        Gate {
            id: id.into(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn two_input(kind: GateKind) -> Netlist {
        Netlist {
            gates: vec![
                gate("a", GateKind::Input, &[]),
                gate("b", GateKind::Input, &[]),
                gate("g", kind, &["a", "b"]),
                gate("y", GateKind::Output, &["g"]),
            ],
            inputs: vec!["a".into(), "b".into()],
        }
    }

    fn eval(n: &Netlist, bits: &str) -> bool {
        evaluate_netlist(n, &n.assignment_from_bits(bits).unwrap()).unwrap()["y"]
    }

    #[test]
    fn reference_evaluator() {
        assert!(eval(&two_input(GateKind::And), "11"));
        assert!(!eval(&two_input(GateKind::And), "10"));
        assert!(!eval(&two_input(GateKind::Xor), "11"));
        assert!(eval(&two_input(GateKind::Or), "01"));
    }

    #[test]
    fn json_round_trip() {
        let n = two_input(GateKind::Xor);
        assert_eq!(Netlist::from_json(&n.to_json()).unwrap(), n);
        let text = r#"{"gates":[{"id":"a","kind":"INPUT"},{"id":"y","kind":"OUTPUT","inputs":["a"]}],"inputs":["a"]}"#;
        assert_eq!(Netlist::from_json(text).unwrap().outputs(), vec!["y"]);
        assert!(matches!(
            Netlist::from_json(r#"{"gates":[],"inputs":[],"extra":1}"#),
            Err(CircuitError::InvalidNetlist(_))
        ));
    }

    #[test]
    fn cycles_are_rejected() {
        let n = Netlist {
            gates: vec![
                gate("a", GateKind::Input, &[]),
                gate("p", GateKind::And, &["a", "q"]),
                gate("q", GateKind::Or, &["a", "p"]),
                gate("y", GateKind::Output, &["q"]),
            ],
            inputs: vec!["a".into()],
        };
        assert!(matches!(n.validate(), Err(CircuitError::NetlistCycle(_))));
        let assignment = n.assignment_from_bits("1").unwrap();
        assert!(matches!(
            evaluate_netlist(&n, &assignment),
            Err(CircuitError::NetlistCycle(_))
        ));
        assert!(matches!(
            compile_layout(&n),
            Err(CircuitError::NetlistCycle(_))
        ));
    }

    #[test]
    fn malformed_netlists() {
        let mut n = two_input(GateKind::And);
        n.gates[2].inputs.pop();
        assert!(matches!(n.validate(), Err(CircuitError::InvalidNetlist(_))));
        let mut n = two_input(GateKind::And);
        n.inputs.pop();
        assert!(matches!(n.validate(), Err(CircuitError::InvalidNetlist(_))));
        let mut n = two_input(GateKind::And);
        n.gates[2].inputs[0] = "nope".into();
        assert!(matches!(n.validate(), Err(CircuitError::InvalidNetlist(_))));
        let mut n = two_input(GateKind::And);
        n.gates[3].id = "a".into();
        assert!(matches!(n.validate(), Err(CircuitError::InvalidNetlist(_))));
        let n = two_input(GateKind::And);
        assert!(matches!(
            n.assignment_from_bits("1"),
            Err(CircuitError::BadInputBits { .. })
        ));
    }

    #[test]
    fn stamps_parse_and_reject_garbage() {
        for g in Gadget::standard_gadgets() {
            assert_eq!((g.width, g.height), (28, 29));
            assert!(g.inputs().all(|p| p.side(g.width, g.height) == "west"));
            assert!(g.outputs().all(|p| p.side(g.width, g.height) == "east"));
        }
        assert!(Gadget::parse("name: x\ntruth: and\ndelay: 1\n---\n#.\n").is_err());
        assert!(Gadget::parse(
            "name: x\ntruth: identity\ndelay: 1\nport: in a 1 1\nport: out y 2 1\n---\n#x\n"
        )
        .is_err());
        assert!(Gadget::parse(
            "name: x\ntruth: identity\ndelay: 1\nport: in a 1 1\nport: out y 2 1\n---\n#.\n"
        )
        .is_err());
        assert!(Gadget::parse(
            "name: x\ntruth: identity\ndelay: 1\nport: in a 1 1\nport: out y 2 1\n---\n..\n"
        )
        .is_ok());
    }

    #[test]
    fn token_values_follow_the_netlist() {
        let n = two_input(GateKind::Xor);
        let layout = compile_layout(&n).unwrap();
        for a in n.all_assignments() {
            let c = layout.with_assignment(&a).unwrap();
            let values = c.token_values();
            let last = *values.last().unwrap();
            assert_eq!(last, evaluate_netlist(&n, &a).unwrap()["y"]);
        }
    }
}
