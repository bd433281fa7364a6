//! Sequential graph algorithms on induced subgraphs of a torus grid.
//!
//! Degrees and edge counts follow the neighbor multiset of the topology, so a
//! cell listed twice as a neighbor contributes two edges. This keeps k-cores
//! consistent with the periodic plane on very small tori.

use std::collections::VecDeque;

use thiserror::Error;

use crate::config::Configuration;
use crate::grid::{Cell, GridKind, Region, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cell {0} is not a vertex of the graph")]
    NotInGraph(Cell),
    #[error("the component of {0} is not a tree")]
    NotATree(Cell),
    #[error("distance field needs at least one source")]
    EmptySources,
}

/// `G[S]`: the subgraph of the grid induced by a vertex set `S`.
#[derive(Clone, Debug)]
pub struct InducedGraph {
    topology: Topology,
    member: Vec<bool>,
}

impl InducedGraph {
    pub fn new(topology: Topology, vertices: impl IntoIterator<Item = Cell>) -> Self {
        let mut member = vec![false; topology.cell_count()];
        for c in vertices {
            member[topology.index(c)] = true;
        }
        InducedGraph { topology, member }
    }

    /// `G[0]`: the graph induced by the inactive cells.
    pub fn inactive(c: &Configuration) -> Self {
        let topology = c.topology();
        let member = (0..topology.cell_count())
            .map(|i| !c.get_index(i))
            .collect();
        InducedGraph { topology, member }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.member[self.topology.index(c)]
    }

    #[inline]
    pub fn contains_index(&self, i: usize) -> bool {
        self.member[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn vertices(&self) -> Region {
        Region::from_indices(
            self.topology,
            (0..self.member.len()).filter(|&i| self.member[i]).collect(),
        )
    }

    /// Degree of vertex `i` counted with neighbor multiplicity.
    pub fn degree_index(&self, i: usize) -> usize {
        self.topology
            .neighbor_indices(i)
            .as_slice()
            .iter()
            .filter(|&&j| self.member[j])
            .count()
    }

    /// Degrees of all cells (0 for non-vertices), computed row by row
    /// without per-cell index arithmetic.
    fn degrees(&self) -> Vec<u8> {
        let t = self.topology;
        let (rows, cols) = (t.rows(), t.cols());
        let m = &self.member;
        let mut out = vec![0u8; m.len()];
        for r in 0..rows {
            let up = if r == 0 { rows - 1 } else { r - 1 } * cols;
            let down = if r + 1 == rows { 0 } else { r + 1 } * cols;
            let base = r * cols;
            for c in 0..cols {
                let i = base + c;
                if !m[i] {
                    continue;
                }
                let left = base + if c == 0 { cols - 1 } else { c - 1 };
                let right = base + if c + 1 == cols { 0 } else { c + 1 };
                let side = m[left] as u8 + m[right] as u8;
                out[i] = match t.kind() {
                    GridKind::Square => side + m[up + c] as u8 + m[down + c] as u8,
                    GridKind::Triangular => {
                        let v = if (r + c) % 2 == 0 { down } else { up };
                        side + m[v + c] as u8
                    }
                };
            }
        }
        out
    }

    fn component_indices(&self, start: usize, blocked: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.member.len()];
        seen[start] = true;
        if let Some(b) = blocked {
            seen[b] = true;
        }
        let mut order = vec![start];
        let mut k = 0;
        while k < order.len() {
            let i = order[k];
            k += 1;
            for &j in self.topology.neighbor_indices(i).as_slice() {
                if self.member[j] && !seen[j] {
                    seen[j] = true;
                    order.push(j);
                }
            }
        }
        order
    }

    /// Number of edges inside a vertex set, counted with multiplicity.
    fn edge_count(&self, vertices: &[usize], excluded: Option<usize>) -> usize {
        let mut inside = vec![false; self.member.len()];
        for &i in vertices {
            inside[i] = true;
        }
        if let Some(e) = excluded {
            inside[e] = false;
        }
        let ends: usize = vertices
            .iter()
            .filter(|&&i| inside[i])
            .map(|&i| {
                self.topology
                    .neighbor_indices(i)
                    .as_slice()
                    .iter()
                    .filter(|&&j| inside[j])
                    .count()
            })
            .sum();
        ends / 2
    }
}

/// Maximal connected vertex set containing `u`.
pub fn connected_component_of(g: &InducedGraph, u: Cell) -> Result<Region, GraphError> {
    if !g.contains(u) {
        return Err(GraphError::NotInGraph(u));
    }
    let start = g.topology.index(u);
    Ok(Region::from_indices(
        g.topology,
        g.component_indices(start, None),
    ))
}

/// Whether a connected vertex set contains a cycle, i.e. has at least as
/// many induced edges as vertices. Cycles closing through the torus seam
/// count.
pub fn has_cycle(g: &InducedGraph, component: &Region) -> bool {
    let vertices = component.indices();
    g.edge_count(&vertices, None) >= vertices.len()
}

/// Membership mask of the k-core: the largest vertex subset whose induced
/// subgraph has minimum degree `k`, found by repeatedly deleting vertices of
/// smaller degree.
pub fn k_core_mask(g: &InducedGraph, k: usize) -> Vec<bool> {
    let n = g.member.len();
    let mut alive = g.member.clone();
    let mut degree = g.degrees();
    let mut queue: Vec<usize> = (0..n)
        .filter(|&i| alive[i] && (degree[i] as usize) < k)
        .collect();
    for &i in &queue {
        alive[i] = false;
    }
    while let Some(i) = queue.pop() {
        for &j in g.topology.neighbor_indices(i).as_slice() {
            if alive[j] {
                degree[j] -= 1;
                if (degree[j] as usize) < k {
                    alive[j] = false;
                    queue.push(j);
                }
            }
        }
    }
    alive
}

/// Synchronous peeling: in round `t` every surviving vertex of degree below
/// `k` is removed at once. Returns the removal round of each vertex (`None`
/// for k-core members and non-vertices).
///
/// For threshold rules that activate a cell once at most `deg - k` of its
/// neighbors are inactive, the removal round is exactly the activation time.
pub fn peeling_rounds(g: &InducedGraph, k: usize) -> Vec<Option<u32>> {
    let mut round = vec![None; g.member.len()];
    if (1..=4).contains(&k) && !g.topology.is_degenerate() {
        let mut bits = BitPeel::new(g);
        if let Some(t) = bits.run(k, &mut round) {
            let rest = InducedGraph {
                topology: g.topology,
                member: bits.to_mask(),
            };
            let degree = rest.degrees();
            queue_rounds(g.topology, rest.member, degree, k, t, &mut round);
        }
    } else {
        queue_rounds(g.topology, g.member.clone(), g.degrees(), k, 0, &mut round);
    }
    round
}

/// Round-synchronous peeling driven by a queue of the vertices that drop
/// below degree `k`, continuing after round `t`.
fn queue_rounds(
    topology: Topology,
    mut alive: Vec<bool>,
    mut degree: Vec<u8>,
    k: usize,
    mut t: u32,
    round: &mut [Option<u32>],
) {
    let mut current: Vec<usize> = (0..alive.len())
        .filter(|&i| alive[i] && (degree[i] as usize) < k)
        .collect();
    let mut next = Vec::new();
    while !current.is_empty() {
        t += 1;
        for &i in &current {
            alive[i] = false;
            round[i] = Some(t);
        }
        for &i in &current {
            for &j in topology.neighbor_indices(i).as_slice() {
                if alive[j] {
                    degree[j] -= 1;
                    if degree[j] as usize + 1 == k {
                        next.push(j);
                    }
                }
            }
        }
        std::mem::swap(&mut current, &mut next);
        next.clear();
    }
}

/// Bit-parallel synchronous peeling: each torus row is a run of 64-bit
/// words and one round updates all cells with a few word operations.
struct BitPeel {
    topology: Topology,
    words: usize,
    alive: Vec<u64>,
    /// Per row parity: bit `c` set when the vertical neighbor of `(r, c)`
    /// lies below (triangular grids only).
    below: [Vec<u64>; 2],
}

impl BitPeel {
    fn new(g: &InducedGraph) -> Self {
        let t = g.topology;
        let (rows, cols) = (t.rows(), t.cols());
        let words = cols.div_ceil(64);
        let mut alive = vec![0u64; rows * words];
        for (i, _) in g.member.iter().enumerate().filter(|(_, &m)| m) {
            let (r, c) = (i / cols, i % cols);
            alive[r * words + c / 64] |= 1 << (c % 64);
        }
        let parity = |p: usize| {
            let mut v = vec![0u64; words];
            for c in (0..cols).filter(|c| (p + c).is_multiple_of(2)) {
                v[c / 64] |= 1 << (c % 64);
            }
            v
        };
        BitPeel {
            topology: t,
            words,
            alive,
            below: [parity(0), parity(1)],
        }
    }

    /// `out[c] = row[c - 1]`, wrapping around the row.
    fn pull_left(&self, row: &[u64], out: &mut [u64]) {
        let cols = self.topology.cols();
        let mut carry = 0;
        for (o, &w) in out.iter_mut().zip(row) {
            *o = (w << 1) | carry;
            carry = w >> 63;
        }
        self.trim(out);
        out[0] |= (row[(cols - 1) / 64] >> ((cols - 1) % 64)) & 1;
    }

    /// `out[c] = row[c + 1]`, wrapping around the row.
    fn pull_right(&self, row: &[u64], out: &mut [u64]) {
        let cols = self.topology.cols();
        let n = row.len();
        for i in 0..n {
            let next = if i + 1 < n { row[i + 1] << 63 } else { 0 };
            out[i] = (row[i] >> 1) | next;
        }
        out[(cols - 1) / 64] |= (row[0] & 1) << ((cols - 1) % 64);
    }

    fn trim(&self, row: &mut [u64]) {
        let rem = self.topology.cols() % 64;
        if rem != 0 {
            row[self.words - 1] &= (1u64 << rem) - 1;
        }
    }

    /// Peel whole rounds while they remove many vertices and record the
    /// removal rounds. Returns the last completed round if peeling stopped
    /// early, `None` once the k-core is reached.
    fn run(&mut self, k: usize, round: &mut [Option<u32>]) -> Option<u32> {
        let t = self.topology;
        let (rows, cols, w) = (t.rows(), t.cols(), self.words);
        let cutoff = (t.cell_count() / 256).max(1);
        let mut removed = vec![0u64; rows * w];
        let (mut left, mut right, mut vert) = (vec![0; w], vec![0; w], vec![0; w]);
        let mut t_done = 0;
        loop {
            let mut count = 0;
            for r in 0..rows {
                let up = &self.alive[(if r == 0 { rows - 1 } else { r - 1 }) * w..][..w];
                let down = &self.alive[(if r + 1 == rows { 0 } else { r + 1 }) * w..][..w];
                let row = &self.alive[r * w..][..w];
                self.pull_left(row, &mut left);
                self.pull_right(row, &mut right);
                let square = t.kind() == GridKind::Square;
                if !square {
                    let below = &self.below[r % 2];
                    for i in 0..w {
                        vert[i] = (down[i] & below[i]) | (up[i] & !below[i]);
                    }
                }
                for i in 0..w {
                    let (a, b) = (left[i], right[i]);
                    let (c, d) = if square {
                        (up[i], down[i])
                    } else {
                        (vert[i], 0)
                    };
                    let keep = match k {
                        1 => a | b | c | d,
                        2 => ((a | b) & (c | d)) | (a & b) | (c & d),
                        3 => (a & b & (c | d)) | (c & d & (a | b)),
                        _ => a & b & c & d,
                    };
                    let gone = row[i] & !keep;
                    removed[r * w + i] = gone;
                    count += gone.count_ones() as usize;
                }
            }
            if count == 0 {
                return None;
            }
            t_done += 1;
            for (r, chunk) in removed.chunks(w).enumerate() {
                for (i, &word) in chunk.iter().enumerate() {
                    let mut bitsleft = word;
                    while bitsleft != 0 {
                        let b = bitsleft.trailing_zeros() as usize;
                        bitsleft &= bitsleft - 1;
                        round[r * cols + i * 64 + b] = Some(t_done);
                    }
                    self.alive[r * w + i] &= !word;
                }
            }
            if count < cutoff {
                return Some(t_done);
            }
        }
    }

    fn to_mask(&self) -> Vec<bool> {
        let (rows, cols, w) = (self.topology.rows(), self.topology.cols(), self.words);
        let mut out = vec![false; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                out[r * cols + c] = (self.alive[r * w + c / 64] >> (c % 64)) & 1 == 1;
            }
        }
        out
    }
}

pub fn k_core(g: &InducedGraph, k: usize) -> Region {
    let mask = k_core_mask(g, k);
    Region::from_indices(g.topology, (0..mask.len()).filter(|&i| mask[i]).collect())
}

/// What hangs off one neighbor slot of a root vertex once the root is
/// removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// The neighbor is not a vertex of the graph.
    Absent,
    /// The neighbor roots a finite tree of the given height.
    Tree(usize),
    /// The neighbor's side contains a cycle or reaches the root again.
    Cyclic,
}

/// Classify the branch behind each neighbor slot of `root`, in the
/// topology's neighbor order.
pub fn branches(g: &InducedGraph, root: Cell) -> Result<Vec<Branch>, GraphError> {
    if !g.contains(root) {
        return Err(GraphError::NotInGraph(root));
    }
    let t = g.topology;
    let r = t.index(root);
    let slots = t.neighbor_indices(r);
    let slots = slots.as_slice();
    let mut out = vec![Branch::Absent; slots.len()];
    let mut side_of = vec![usize::MAX; slots.len()];
    let mut owner = std::collections::HashMap::new();
    for (k, &v) in slots.iter().enumerate() {
        if !g.member[v] || v == r {
            continue;
        }
        if let Some(&first) = owner.get(&v) {
            side_of[k] = first;
            continue;
        }
        let side = g.component_indices(v, Some(r));
        for &w in &side {
            owner.entry(w).or_insert(k);
        }
        side_of[k] = k;
        out[k] = if g.edge_count(&side, Some(r)) >= side.len() {
            Branch::Cyclic
        } else {
            Branch::Tree(bfs_height(g, v, r))
        };
    }
    for k in 0..slots.len() {
        if side_of[k] == usize::MAX {
            continue;
        }
        let shared = (0..slots.len()).any(|j| j != k && side_of[j] == side_of[k]);
        if shared {
            out[k] = Branch::Cyclic;
        }
    }
    // A self-loop at the root (degenerate tori) closes a cycle through it.
    for (k, &v) in slots.iter().enumerate() {
        if v == r {
            out[k] = Branch::Cyclic;
        }
    }
    Ok(out)
}

fn bfs_height(g: &InducedGraph, start: usize, blocked: usize) -> usize {
    let mut dist = std::collections::HashMap::from([(start, 0usize), (blocked, 0)]);
    let mut queue = VecDeque::from([start]);
    let mut height = 0;
    while let Some(i) = queue.pop_front() {
        let d = dist[&i];
        height = height.max(d);
        for &j in g.topology.neighbor_indices(i).as_slice() {
            if g.member[j] && !dist.contains_key(&j) {
                dist.insert(j, d + 1);
                queue.push_back(j);
            }
        }
    }
    height
}

/// Subtree depths below each neighbor of the root of a tree component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTreeDepths {
    pub root: Cell,
    /// One entry per neighbor slot of the root: the height of the subtree
    /// hanging from that neighbor, or `None` when the neighbor is not a
    /// vertex.
    pub child_subtree_depth: Vec<(Cell, Option<usize>)>,
}

impl RootedTreeDepths {
    /// Present depths, largest first.
    pub fn sorted_desc(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .child_subtree_depth
            .iter()
            .filter_map(|&(_, d)| d)
            .collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

pub fn subtree_depths(g: &InducedGraph, root: Cell) -> Result<RootedTreeDepths, GraphError> {
    let t = g.topology;
    let neighbors = t.neighbors(root);
    let child_subtree_depth = branches(g, root)?
        .into_iter()
        .zip(neighbors)
        .map(|(b, c)| match b {
            Branch::Absent => Ok((c, None)),
            Branch::Tree(h) => Ok((c, Some(h))),
            Branch::Cyclic => Err(GraphError::NotATree(root)),
        })
        .collect::<Result<_, _>>()?;
    Ok(RootedTreeDepths {
        root,
        child_subtree_depth,
    })
}

/// Multi-source BFS distances over the whole torus.
pub fn distance_field(t: Topology, sources: &Region) -> Result<Vec<u32>, GraphError> {
    distance_field_indices(t, sources.indices())
}

pub fn distance_field_indices(
    t: Topology,
    sources: impl IntoIterator<Item = usize>,
) -> Result<Vec<u32>, GraphError> {
    let mut dist = vec![u32::MAX; t.cell_count()];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    if queue.is_empty() {
        return Err(GraphError::EmptySources);
    }
    while let Some(i) = queue.pop_front() {
        for &j in t.neighbor_indices(i).as_slice() {
            if dist[j] == u32::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    Ok(dist)
}
