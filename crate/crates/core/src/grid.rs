//! Torus topologies, von Neumann neighborhoods, distances and the geometric
//! regions used by the algebraic deciders.
//!
//! Triangular grids store triangles in a `rows x cols` array. The triangle at
//! `(row, col)` points up when `row + col` is even and down otherwise; rows
//! grow downward. An up triangle touches its left and right neighbors and the
//! triangle below it, a down triangle touches its left and right neighbors and
//! the triangle above it. Both dimensions must be even so that orientation is
//! consistent across the torus seams.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lattice kind of a topology or a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridKind {
    Triangular,
    Square,
}

impl GridKind {
    /// Number of von Neumann neighbors of every cell.
    pub fn degree(self) -> usize {
        match self {
            GridKind::Triangular => 3,
            GridKind::Square => 4,
        }
    }

    /// Short name used by the text format and the command line.
    pub fn tag(self) -> &'static str {
        match self {
            GridKind::Triangular => "TRI",
            GridKind::Square => "SQ",
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridKind::Triangular => "triangular",
            GridKind::Square => "square",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("invalid {kind} torus {rows}x{cols}: {reason}")]
    InvalidDimensions {
        kind: GridKind,
        rows: usize,
        cols: usize,
        reason: &'static str,
    },
    #[error("torus too small: construction needs extent {required}, torus offers {available}")]
    TorusTooSmall { required: usize, available: usize },
    #[error("cell {0} is not a neighbor of {1}")]
    NotANeighbor(Cell, Cell),
    #[error("operation requires a {expected} grid")]
    WrongKind { expected: GridKind },
}

/// A canonical cell of a torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Neighbor indices of one cell, stored inline.
#[derive(Clone, Copy, Debug)]
pub struct Neighborhood {
    cells: [usize; 4],
    len: usize,
}

impl Neighborhood {
    pub fn as_slice(&self) -> &[usize] {
        &self.cells[..self.len]
    }
}

/// Shape of the fundamental domain of a periodic configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    kind: GridKind,
    rows: usize,
    cols: usize,
}

impl Topology {
    pub fn new(kind: GridKind, rows: usize, cols: usize) -> Result<Self, GridError> {
        let invalid = |reason| GridError::InvalidDimensions {
            kind,
            rows,
            cols,
            reason,
        };
        match kind {
            GridKind::Square => {
                if rows == 0 || cols == 0 {
                    return Err(invalid("square tori need positive rows and cols"));
                }
            }
            GridKind::Triangular => {
                if rows == 0 || cols == 0 || !rows.is_multiple_of(2) || !cols.is_multiple_of(2) {
                    return Err(invalid("triangular tori need positive even rows and cols"));
                }
            }
        }
        Ok(Topology { kind, rows, cols })
    }

    /// The `n x n` square torus.
    pub fn square(n: usize) -> Result<Self, GridError> {
        Self::new(GridKind::Square, n, n)
    }

    /// The triangular torus of `n` rows and `2n` columns (`2n^2` triangles).
    pub fn triangular(n: usize) -> Result<Self, GridError> {
        Self::new(GridKind::Triangular, n, 2 * n)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree(&self) -> usize {
        self.kind.degree()
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    /// True when some cell lists the same neighbor twice. Such tori are valid
    /// (the neighbor multiset still describes the periodic plane) but graph
    /// arguments about simple graphs do not apply to them directly.
    pub fn is_degenerate(&self) -> bool {
        match self.kind {
            GridKind::Square => self.rows.min(self.cols) < 3,
            GridKind::Triangular => self.cols < 4,
        }
    }

    pub fn index(&self, c: Cell) -> usize {
        debug_assert!(self.contains(c));
        c.row * self.cols + c.col
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index / self.cols, index % self.cols)
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    /// Canonical cell for arbitrary (possibly negative) coordinates.
    pub fn wrap(&self, row: i64, col: i64) -> Cell {
        Cell::new(
            row.rem_euclid(self.rows as i64) as usize,
            col.rem_euclid(self.cols as i64) as usize,
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cell_count()).map(move |i| self.cell(i))
    }

    /// Orientation of a triangular cell; always false on square grids.
    pub fn is_up(&self, c: Cell) -> bool {
        self.kind == GridKind::Triangular && (c.row + c.col).is_multiple_of(2)
    }

    /// Von Neumann neighbors with torus wrap, in a fixed order: square cells
    /// list north, south, west, east; triangular cells list west, east, then
    /// the vertical neighbor.
    pub fn neighbors(&self, c: Cell) -> Vec<Cell> {
        self.neighbor_indices(self.index(c))
            .as_slice()
            .iter()
            .map(|&i| self.cell(i))
            .collect()
    }

    pub fn neighbor_indices(&self, index: usize) -> Neighborhood {
        let (r, c) = (index / self.cols, index % self.cols);
        let up = if r == 0 { self.rows - 1 } else { r - 1 };
        let down = if r + 1 == self.rows { 0 } else { r + 1 };
        let left = if c == 0 { self.cols - 1 } else { c - 1 };
        let right = if c + 1 == self.cols { 0 } else { c + 1 };
        let at = |row: usize, col: usize| row * self.cols + col;
        match self.kind {
            GridKind::Square => Neighborhood {
                cells: [at(up, c), at(down, c), at(r, left), at(r, right)],
                len: 4,
            },
            GridKind::Triangular => {
                let vertical = if (r + c) % 2 == 0 { down } else { up };
                Neighborhood {
                    cells: [at(r, left), at(r, right), at(vertical, c), 0],
                    len: 3,
                }
            }
        }
    }

    /// Length of a shortest path between two cells on the torus.
    pub fn graph_distance(&self, a: Cell, b: Cell) -> usize {
        match self.kind {
            GridKind::Square => {
                let dr = a.row.abs_diff(b.row);
                let dc = a.col.abs_diff(b.col);
                dr.min(self.rows - dr) + dc.min(self.cols - dc)
            }
            GridKind::Triangular => {
                let target = self.index(b);
                let mut seen = vec![usize::MAX; self.cell_count()];
                let start = self.index(a);
                seen[start] = 0;
                let mut queue = VecDeque::from([start]);
                while let Some(i) = queue.pop_front() {
                    if i == target {
                        return seen[i];
                    }
                    for &j in self.neighbor_indices(i).as_slice() {
                        if seen[j] == usize::MAX {
                            seen[j] = seen[i] + 1;
                            queue.push_back(j);
                        }
                    }
                }
                unreachable!("torus graphs are connected")
            }
        }
    }

    /// Cells at distance exactly `r` from `u` (the disc `D_r(u)`).
    pub fn disc(&self, u: Cell, r: usize) -> Region {
        let levels = self.bfs_levels(u, r);
        Region::from_indices(*self, levels.into_iter().nth(r).unwrap_or_default())
    }

    /// Cells at distance at most `r` from `u` (the ball `B_r(u)`).
    pub fn ball(&self, u: Cell, r: usize) -> Region {
        let levels = self.bfs_levels(u, r);
        Region::from_indices(*self, levels.into_iter().flatten().collect())
    }

    fn bfs_levels(&self, u: Cell, r: usize) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.cell_count()];
        let start = self.index(u);
        seen[start] = true;
        let mut levels = vec![vec![start]];
        while levels.len() <= r {
            let mut next = Vec::new();
            for &i in levels.last().unwrap() {
                for &j in self.neighbor_indices(i).as_slice() {
                    if !seen[j] {
                        seen[j] = true;
                        next.push(j);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        levels
    }

    /// `S_v ∩ D_r(u)`: the cells of the distance-`r` disc around the
    /// triangle `u` lying strictly on `v`'s side of the line through the edge
    /// shared by `u` and `v`.
    ///
    /// The construction works in the unwrapped plane, so the torus must hold
    /// the whole disc without overlap: `2r + 2` may not exceed either
    /// dimension.
    pub fn semi_plane_arc(&self, u: Cell, v: Cell, r: usize) -> Result<Region, GridError> {
        if self.kind != GridKind::Triangular {
            return Err(GridError::WrongKind {
                expected: GridKind::Triangular,
            });
        }
        let required = 2 * r + 2;
        let available = self.rows.min(self.cols);
        if required > available {
            return Err(GridError::TorusTooSmall {
                required,
                available,
            });
        }
        let (ur, uc) = (u.row as i64, u.col as i64);
        let planar_v = planar_tri_neighbors(ur, uc)
            .into_iter()
            .find(|&(pr, pc)| self.wrap(pr, pc) == v)
            .ok_or(GridError::NotANeighbor(v, u))?;
        let line = shared_edge(ur, uc, planar_v.0, planar_v.1);
        let v_side = line.side(planar_v.0, planar_v.1);
        let members = planar_tri_disc(ur, uc, r)
            .into_iter()
            .filter(|&(pr, pc)| line.side(pr, pc) * v_side > 0)
            .map(|(pr, pc)| self.wrap(pr, pc));
        Ok(Region::new(*self, members))
    }

    /// Diagonal arcs, axis corridors and quadrant triangles around the square
    /// cell `u`, described in `u`-centered coordinates `(x, y)` with `x`
    /// growing east (columns) and `y` growing north (decreasing rows).
    ///
    /// Quadrants are half-open so that they partition every disc:
    /// I = {x > 0, y >= 0}, II = {x <= 0, y > 0}, III = {x < 0, y <= 0},
    /// IV = {x >= 0, y < 0}. `diagonals[q][k - 1]` is quadrant `q`'s part of
    /// `D_k(u)` and has exactly `k` cells. Corridors are ordered north, west,
    /// south, east and hold the axis cells at distance `1..=tau`. Triangles
    /// hold the cells strictly between two axes at distance at most `tau`.
    pub fn square_regions(&self, u: Cell, tau: usize) -> Result<SquareRegions, GridError> {
        if self.kind != GridKind::Square {
            return Err(GridError::WrongKind {
                expected: GridKind::Square,
            });
        }
        let required = 2 * tau + 4;
        let available = self.rows.min(self.cols);
        if required > available {
            return Err(GridError::TorusTooSmall {
                required,
                available,
            });
        }
        let t = tau as i64;
        let at = |x: i64, y: i64| self.offset(u, x, y);
        let rotate = |q: usize, x: i64, y: i64| -> (i64, i64) {
            match q {
                0 => (x, y),
                1 => (-y, x),
                2 => (-x, -y),
                _ => (y, -x),
            }
        };
        let diagonals = std::array::from_fn(|q| {
            (1..=t)
                .map(|k| {
                    let cells = (0..k).map(|j| {
                        let (x, y) = rotate(q, k - j, j);
                        at(x, y)
                    });
                    Region::new(*self, cells)
                })
                .collect()
        });
        let corridors = std::array::from_fn(|q| {
            Region::new(
                *self,
                (1..=t).map(|k| {
                    let (x, y) = rotate(q, 0, k);
                    at(x, y)
                }),
            )
        });
        let triangles = std::array::from_fn(|q| {
            let cells = (1..t).flat_map(|i| {
                (1..=t - i).map(move |j| {
                    let (x, y) = rotate(q, i, j);
                    (x, y)
                })
            });
            Region::new(*self, cells.map(|(x, y)| at(x, y)))
        });
        Ok(SquareRegions {
            diagonals,
            corridors,
            triangles,
        })
    }

    /// The cell at `u`-centered offset `(x, y)` on a square torus (`x` east,
    /// `y` north).
    pub fn offset(&self, u: Cell, x: i64, y: i64) -> Cell {
        self.wrap(u.row as i64 - y, u.col as i64 + x)
    }
}

/// Regions produced by [`Topology::square_regions`].
#[derive(Clone, Debug)]
pub struct SquareRegions {
    pub diagonals: [Vec<Region>; 4],
    pub corridors: [Region; 4],
    pub triangles: [Region; 4],
}

/// A set of canonical cells of one topology, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    topology: Topology,
    members: Vec<Cell>,
}

impl Region {
    pub fn new(topology: Topology, cells: impl IntoIterator<Item = Cell>) -> Self {
        let mut members: Vec<Cell> = cells.into_iter().collect();
        debug_assert!(members.iter().all(|&c| topology.contains(c)));
        members.sort_unstable();
        members.dedup();
        Region { topology, members }
    }

    pub fn from_indices(topology: Topology, indices: Vec<usize>) -> Self {
        Self::new(topology, indices.into_iter().map(|i| topology.cell(i)))
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn members(&self) -> &[Cell] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.members.binary_search(&c).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.members.iter().copied()
    }

    /// Member indices in the topology's cell array.
    pub fn indices(&self) -> Vec<usize> {
        self.members
            .iter()
            .map(|&c| self.topology.index(c))
            .collect()
    }
}

/// Neighbors of a triangle in the unwrapped plane.
pub(crate) fn planar_tri_neighbors(r: i64, c: i64) -> [(i64, i64); 3] {
    let vertical = if (r + c).rem_euclid(2) == 0 {
        r + 1
    } else {
        r - 1
    };
    [(r, c - 1), (r, c + 1), (vertical, c)]
}

/// Planar triangles at distance exactly `radius` from `(r, c)`.
pub(crate) fn planar_tri_disc(r: i64, c: i64, radius: usize) -> Vec<(i64, i64)> {
    let mut seen = std::collections::HashSet::from([(r, c)]);
    let mut level = vec![(r, c)];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &(pr, pc) in &level {
            for q in planar_tri_neighbors(pr, pc) {
                if seen.insert(q) {
                    next.push(q);
                }
            }
        }
        level = next;
    }
    level
}

/// Triangle vertices in sheared lattice units: `x` counts half edges along a
/// row, `y` counts rows. The map to the Euclidean lattice is affine, so side
/// tests against lines are unaffected.
fn tri_vertices(r: i64, c: i64) -> [(i64, i64); 3] {
    if (r + c).rem_euclid(2) == 0 {
        [(c + 1, r), (c, r + 1), (c + 2, r + 1)]
    } else {
        [(c, r), (c + 2, r), (c + 1, r + 1)]
    }
}

struct Line {
    p: (i64, i64),
    q: (i64, i64),
}

impl Line {
    /// Signed side of the triangle centroid; coordinates are scaled by 3 so
    /// the centroid stays integral.
    fn side(&self, r: i64, c: i64) -> i64 {
        let v = tri_vertices(r, c);
        let cx = v.iter().map(|p| p.0).sum::<i64>();
        let cy = v.iter().map(|p| p.1).sum::<i64>();
        let (px, py) = (3 * self.p.0, 3 * self.p.1);
        let (qx, qy) = (3 * self.q.0, 3 * self.q.1);
        ((qx - px) * (cy - py) - (qy - py) * (cx - px)).signum()
    }
}

fn shared_edge(ur: i64, uc: i64, vr: i64, vc: i64) -> Line {
    let vu = tri_vertices(ur, uc);
    let vv = tri_vertices(vr, vc);
    let shared: Vec<(i64, i64)> = vu.iter().copied().filter(|p| vv.contains(p)).collect();
    debug_assert_eq!(shared.len(), 2);
    Line {
        p: shared[0],
        q: shared[1],
    }
}
