//! Finite configurations on a torus, their text format, seeded random
//! generation and the padded construction `D(x)`.
//!
//! Text format: a header line `SQ n` or `TRI n`, then `n` rows of exactly `n`
//! (square) or `2n` (triangular) characters from `{0,1}`, each terminated by a
//! line feed. Other widths use the header `SQ rows cols` or `TRI rows cols`
//! (triangular widths are even). Trailing whitespace is rejected. A triangular
//! input with an odd row count is stacked on top of itself, which describes
//! the same periodic configuration on an orientation-consistent torus.
//!
//! Random configurations draw one `gen_bool(density)` per cell in row-major
//! order from a ChaCha8 stream seeded with `seed_from_u64(seed)`; the stream
//! is fully specified and identical on every platform.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{Cell, GridKind, Region, Topology};

/// A 0/1 state for every cell of a torus, one bit per cell.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    topology: Topology,
    words: Vec<u64>,
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Configuration {
    pub fn zeros(topology: Topology) -> Self {
        Configuration {
            topology,
            words: vec![0; topology.cell_count().div_ceil(64)],
        }
    }

    pub fn ones(topology: Topology) -> Self {
        Self::from_fn(topology, |_| true)
    }

    pub fn from_fn(topology: Topology, mut f: impl FnMut(Cell) -> bool) -> Self {
        let mut x = Self::zeros(topology);
        for i in 0..topology.cell_count() {
            if f(topology.cell(i)) {
                x.set_index(i, true);
            }
        }
        x
    }

    /// Each cell independently active with probability `density`.
    pub fn random(topology: Topology, density: f64, seed: u64) -> Self {
        assert!(
            (0.0..=1.0).contains(&density),
            "density must lie in [0, 1], got {density}"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(topology, |_| rng.gen_bool(density))
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn get(&self, c: Cell) -> bool {
        self.get_index(self.topology.index(c))
    }

    #[inline]
    pub fn get_index(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn set(&mut self, c: Cell, value: bool) {
        let i = self.topology.index(c);
        self.set_index(i, value);
    }

    #[inline]
    pub fn set_index(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    pub fn active_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + bit)
            })
        })
    }

    /// Sum of the states of the neighbors of cell `i`.
    #[inline]
    pub fn neighbor_sum(&self, i: usize) -> usize {
        self.topology
            .neighbor_indices(i)
            .as_slice()
            .iter()
            .filter(|&&j| self.get_index(j))
            .count()
    }

    /// Pointwise `self <= other`.
    pub fn is_below(&self, other: &Configuration) -> bool {
        self.topology == other.topology
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// The configuration shifted by `(dr, dc)`: the state of `(r, c)` moves to
    /// `(r + dr, c + dc)`. On triangular tori `dr + dc` must be even so the
    /// shift maps triangles onto triangles of the same orientation.
    pub fn translate(&self, dr: i64, dc: i64) -> Configuration {
        if self.topology.kind() == GridKind::Triangular {
            assert!(
                (dr + dc).rem_euclid(2) == 0,
                "triangular translations must preserve orientation"
            );
        }
        let t = self.topology;
        let mut out = Configuration::zeros(t);
        for i in self.active_indices() {
            let c = t.cell(i);
            out.set(t.wrap(c.row as i64 + dr, c.col as i64 + dc), true);
        }
        out
    }

    /// Serialize in the text format.
    pub fn to_text(&self) -> String {
        let t = self.topology;
        let default_cols = match t.kind() {
            GridKind::Square => t.rows(),
            GridKind::Triangular => 2 * t.rows(),
        };
        let mut s = if t.cols() != default_cols {
            format!("{} {} {}\n", t.kind().tag(), t.rows(), t.cols())
        } else {
            format!("{} {}\n", t.kind().tag(), t.rows())
        };
        for r in 0..t.rows() {
            for c in 0..t.cols() {
                s.push(if self.get(Cell::new(r, c)) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Portable bitmap (plain `P1`), one pixel per cell, active cells black.
    /// Triangles map to the pixels of their `rows x cols` array.
    pub fn to_pbm(&self) -> String {
        let t = self.topology;
        let mut s = format!("P1\n{} {}\n", t.cols(), t.rows());
        for r in 0..t.rows() {
            let row: Vec<&str> = (0..t.cols())
                .map(|c| if self.get(Cell::new(r, c)) { "1" } else { "0" })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// One character per cell (or triangle): `#` active, `.` inactive.
    pub fn to_ascii(&self) -> String {
        let t = self.topology;
        let mut s = String::with_capacity(t.rows() * (t.cols() + 1));
        for r in 0..t.rows() {
            for c in 0..t.cols() {
                s.push(if self.get(Cell::new(r, c)) { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }

    /// Parse the text format.
    pub fn parse(text: &str) -> Result<Parsed, ParseError> {
        let mut lines = text.split_inclusive('\n');
        let header = lines.next().ok_or(ParseError::BadHeader {
            line: 1,
            found: String::new(),
        })?;
        let header_body = strip_newline(header);
        let bad_header = || ParseError::BadHeader {
            line: 1,
            found: header_body.to_string(),
        };
        let mut parts = header_body.split(' ');
        let kind = match parts.next() {
            Some("SQ") => GridKind::Square,
            Some("TRI") => GridKind::Triangular,
            _ => return Err(bad_header()),
        };
        let n: usize = parts
            .next()
            .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .filter(|&n| n > 0)
            .ok_or_else(bad_header)?;
        let second: Option<usize> = match parts.next() {
            None => None,
            Some(s) => Some(
                Some(s)
                    .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|s| s.parse().ok())
                    .filter(|&m| m > 0)
                    .ok_or_else(bad_header)?,
            ),
        };
        if parts.next().is_some() || !header.ends_with('\n') {
            return Err(bad_header());
        }
        let width = match kind {
            GridKind::Square => second.unwrap_or(n),
            GridKind::Triangular => second.unwrap_or(2 * n),
        };
        if kind == GridKind::Triangular && width % 2 == 1 {
            return Err(bad_header());
        }
        let mut bits = Vec::with_capacity(n * width);
        let mut row_count = 0;
        for (k, line) in lines.enumerate() {
            let line_no = k + 2;
            if !line.ends_with('\n') {
                return Err(ParseError::BadDimensions {
                    line: line_no,
                    reason: "missing line feed".into(),
                });
            }
            let body = strip_newline(line);
            if row_count == n {
                return Err(ParseError::BadDimensions {
                    line: line_no,
                    reason: format!("more than {n} rows"),
                });
            }
            for (col, ch) in body.chars().enumerate() {
                match ch {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    _ => {
                        return Err(ParseError::BadSymbol {
                            line: line_no,
                            col: col + 1,
                            symbol: ch,
                        })
                    }
                }
            }
            if body.chars().count() != width {
                return Err(ParseError::BadDimensions {
                    line: line_no,
                    reason: format!("expected {width} cells, found {}", body.chars().count()),
                });
            }
            row_count += 1;
        }
        if row_count != n {
            return Err(ParseError::BadDimensions {
                line: row_count + 2,
                reason: format!("expected {n} rows, found {row_count}"),
            });
        }
        let rows_doubled = kind == GridKind::Triangular && n % 2 == 1;
        let rows = if rows_doubled { 2 * n } else { n };
        let topology = Topology::new(kind, rows, width).expect("dimensions validated above");
        let configuration = Configuration::from_fn(topology, |c| bits[(c.row % n) * width + c.col]);
        Ok(Parsed {
            configuration,
            rows_doubled,
        })
    }

    /// The padded configuration `D(x)` for a square `x` and a query cell `u`.
    pub fn build_padded(&self, u: Cell) -> PaddedConfiguration {
        assert_eq!(
            self.topology.kind(),
            GridKind::Square,
            "D(x) is defined for square configurations"
        );
        assert_eq!(
            self.topology.rows(),
            self.topology.cols(),
            "D(x) is defined for n x n configurations"
        );
        let n = self.topology.rows();
        let m = 2 * n * n + 3 * n;
        let copies = (2 * n + 1) * n;
        let topology = Topology::square(m).expect("m is positive");
        let padded = Configuration::from_fn(topology, |c| {
            let inside = |p: usize| p >= n && p < n + copies;
            inside(c.row) && inside(c.col) && self.get(Cell::new((c.row - n) % n, (c.col - n) % n))
        });
        PaddedConfiguration {
            base: self.clone(),
            padded,
            origin_offset: (n * n + n, n * n + n),
            border_width: n,
            query: u,
        }
    }
}

fn strip_newline(line: &str) -> &str {
    line.strip_suffix('\n').unwrap_or(line)
}

/// Result of [`Configuration::parse`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub configuration: Configuration,
    /// Set when an odd-row triangular input was stacked twice.
    pub rows_doubled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: bad header {found:?}, expected `SQ n` or `TRI n`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: bad dimensions: {reason}")]
    BadDimensions { line: usize, reason: String },
    #[error("line {line}, column {col}: bad symbol {symbol:?}")]
    BadSymbol {
        line: usize,
        col: usize,
        symbol: char,
    },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::BadHeader { line, .. }
            | ParseError::BadDimensions { line, .. }
            | ParseError::BadSymbol { line, .. } => *line,
        }
    }
}

/// `D(x)`: an `m x m` configuration (`m = 2n^2 + 3n`) holding `(2n+1) x (2n+1)`
/// copies of `x` surrounded by an inactive border of width `n`.
#[derive(Clone, Debug)]
pub struct PaddedConfiguration {
    pub base: Configuration,
    pub padded: Configuration,
    /// Position of the copy of `x` that contains the image of the query cell.
    pub origin_offset: (usize, usize),
    pub border_width: usize,
    query: Cell,
}

impl PaddedConfiguration {
    /// Image of a base cell inside the central copy.
    pub fn image(&self, c: Cell) -> Cell {
        Cell::new(c.row + self.origin_offset.0, c.col + self.origin_offset.1)
    }

    /// Image of the query cell the padding was built for.
    pub fn query_image(&self) -> Cell {
        self.image(self.query)
    }

    /// The all-inactive perimeter of width `border_width`.
    pub fn border(&self) -> Region {
        let t = self.padded.topology();
        let m = t.rows();
        let w = self.border_width;
        let on_border = |p: usize| p < w || p >= m - w;
        Region::new(
            t,
            t.cells().filter(|c| on_border(c.row) || on_border(c.col)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders() {
        let p = Configuration::parse("SQ 2\n10\n01\n")
            .unwrap()
            .configuration;
        assert_eq!(p.to_pbm(), "P1\n2 2\n1 0\n0 1\n");
        assert_eq!(p.to_ascii(), "#.\n.#\n");
    }

    #[test]
    fn rectangular_square_header() {
        let p = Configuration::parse("SQ 2 3\n100\n001\n").unwrap();
        let t = p.configuration.topology();
        assert_eq!((t.rows(), t.cols()), (2, 3));
        assert_eq!(p.configuration.to_text(), "SQ 2 3\n100\n001\n");
        assert!(Configuration::parse("TRI 2 3\n000\n000\n").is_err());
        let p = Configuration::parse("TRI 2 6\n000001\n100000\n").unwrap();
        assert_eq!(p.configuration.to_text(), "TRI 2 6\n000001\n100000\n");
        assert!(Configuration::parse("SQ 2 0\n\n\n").is_err());
    }

    #[test]
    fn parses_square_example() {
        let p = Configuration::parse("SQ 2\n10\n01\n").unwrap();
        let x = p.configuration;
        assert!(!p.rows_doubled);
        assert!(x.get(Cell::new(0, 0)) && x.get(Cell::new(1, 1)));
        assert!(!x.get(Cell::new(0, 1)) && !x.get(Cell::new(1, 0)));
    }

    #[test]
    fn parses_triangular_example() {
        let x = Configuration::parse("TRI 2\n0110\n0000\n")
            .unwrap()
            .configuration;
        assert_eq!((x.topology().rows(), x.topology().cols()), (2, 4));
        assert_eq!(x.active_count(), 2);
    }

    #[test]
    fn odd_triangular_rows_are_doubled() {
        let p = Configuration::parse("TRI 1\n10\n").unwrap();
        assert!(p.rows_doubled);
        let x = p.configuration;
        assert_eq!((x.topology().rows(), x.topology().cols()), (2, 2));
        assert!(x.get(Cell::new(0, 0)) && x.get(Cell::new(1, 0)));
    }

    #[test]
    fn rejects_malformed_inputs() {
        let err = |s: &str| Configuration::parse(s).unwrap_err();
        assert!(matches!(err("SQ\n"), ParseError::BadHeader { .. }));
        assert!(matches!(err("HEX 2\n"), ParseError::BadHeader { .. }));
        assert!(matches!(
            err("SQ 2 \n10\n01\n"),
            ParseError::BadHeader { .. }
        ));
        assert!(matches!(
            err("SQ 2\n10 \n01\n"),
            ParseError::BadSymbol { line: 2, .. }
        ));
        assert!(matches!(
            err("SQ 2\n1x\n01\n"),
            ParseError::BadSymbol {
                line: 2,
                col: 2,
                ..
            }
        ));
        assert!(matches!(
            err("SQ 2\n100\n01\n"),
            ParseError::BadDimensions { line: 2, .. }
        ));
        assert!(matches!(
            err("SQ 2\n10\n"),
            ParseError::BadDimensions { .. }
        ));
        assert!(matches!(
            err("SQ 2\n10\n01"),
            ParseError::BadDimensions { line: 3, .. }
        ));
        assert!(matches!(
            err("SQ 2\n10\r\n01\n"),
            ParseError::BadSymbol { .. }
        ));
        assert!(matches!(
            err("SQ 2\n10\n01\n00\n"),
            ParseError::BadDimensions { line: 4, .. }
        ));
    }

    #[test]
    fn random_extremes() {
        let t = Topology::square(16).unwrap();
        assert_eq!(Configuration::random(t, 0.0, 7).active_count(), 0);
        assert_eq!(Configuration::random(t, 1.0, 7).active_count(), 256);
        assert_eq!(
            Configuration::random(t, 0.4, 7),
            Configuration::random(t, 0.4, 7)
        );
    }

    #[test]
    fn padded_dimensions() {
        let t = Topology::square(2).unwrap();
        let x = Configuration::ones(t);
        let d = x.build_padded(Cell::new(0, 0));
        assert_eq!(d.padded.topology().rows(), 14);
        assert_eq!(d.padded.active_count(), 10 * 10);
        assert!(d.border().iter().all(|c| !d.padded.get(c)));
    }
}
