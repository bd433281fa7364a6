//! Freezing totalistic rules, named by their activating sums, and their
//! complexity classes.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::GridKind;

/// A freezing totalistic rule: an inactive cell becomes active when the sum
/// of its neighbors lies in `activating_sums`; active cells stay active.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    grid: GridKind,
    mask: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("bad rule name {name:?} for a {grid} grid: {reason}")]
    BadRuleName {
        name: String,
        grid: GridKind,
        reason: &'static str,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleClass {
    Trivial,
    Topological,
    Algebraic,
    TuringUniversal,
    FractalGrowing,
    NonQuiescent,
    /// Quiescent rules absent from the published classification (square 23).
    Unclassified,
}

impl Rule {
    /// Build a rule from a set of sums; sums above the grid degree are
    /// rejected.
    pub fn new(grid: GridKind, sums: &[usize]) -> Result<Self, RuleError> {
        let mut mask = 0u8;
        for &s in sums {
            if s > grid.degree() {
                return Err(RuleError::BadRuleName {
                    name: format!("{sums:?}"),
                    grid,
                    reason: "sum exceeds the neighborhood size",
                });
            }
            mask |= 1 << s;
        }
        Ok(Rule { grid, mask })
    }

    /// Parse `"phi"` or a strictly increasing digit string such as `"24"`.
    pub fn parse(name: &str, grid: GridKind) -> Result<Self, RuleError> {
        let bad = |reason| RuleError::BadRuleName {
            name: name.to_string(),
            grid,
            reason,
        };
        if name == "phi" {
            return Ok(Rule { grid, mask: 0 });
        }
        if name.is_empty() {
            return Err(bad("empty name"));
        }
        let mut mask = 0u8;
        let mut last: Option<u32> = None;
        for ch in name.chars() {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| bad("names are digits or `phi`"))?;
            if d as usize > grid.degree() {
                return Err(bad("digit exceeds the neighborhood size"));
            }
            if last.is_some_and(|l| d <= l) {
                return Err(bad("digits must be strictly increasing"));
            }
            last = Some(d);
            mask |= 1 << d;
        }
        Ok(Rule { grid, mask })
    }

    pub fn grid(&self) -> GridKind {
        self.grid
    }

    #[inline]
    pub fn activates(&self, sum: usize) -> bool {
        sum < 8 && (self.mask >> sum) & 1 == 1
    }

    pub fn activating_sums(&self) -> Vec<usize> {
        (0..=self.grid.degree())
            .filter(|&s| self.activates(s))
            .collect()
    }

    /// Bit mask of the activating sums (bit `s` set when `s` activates).
    pub fn mask(&self) -> u8 {
        self.mask
    }

    pub fn is_quiescent(&self) -> bool {
        !self.activates(0)
    }

    /// Upward-closed sum sets give monotone dynamics.
    pub fn is_monotone(&self) -> bool {
        let d = self.grid.degree();
        (0..d).all(|s| !self.activates(s) || self.activates(s + 1))
    }

    /// The name used in the literature: digits in increasing order or `phi`.
    pub fn name(&self) -> String {
        if self.mask == 0 {
            return "phi".to_string();
        }
        self.activating_sums()
            .iter()
            .map(|s| char::from(b'0' + *s as u8))
            .collect()
    }

    pub fn classify(&self) -> RuleClass {
        if !self.is_quiescent() {
            return RuleClass::NonQuiescent;
        }
        let name = self.name();
        match self.grid {
            GridKind::Triangular => match name.as_str() {
                "phi" | "123" | "3" => RuleClass::Trivial,
                "2" | "23" => RuleClass::Topological,
                "12" => RuleClass::Algebraic,
                "1" | "13" => RuleClass::FractalGrowing,
                _ => unreachable!("every quiescent triangular rule is listed"),
            },
            GridKind::Square => match name.as_str() {
                "phi" | "1234" | "4" => RuleClass::Trivial,
                "234" | "3" | "34" => RuleClass::Topological,
                "12" | "123" | "124" => RuleClass::Algebraic,
                "2" | "24" => RuleClass::TuringUniversal,
                "1" | "13" | "14" | "134" => RuleClass::FractalGrowing,
                "23" => RuleClass::Unclassified,
                _ => unreachable!("every quiescent square rule is listed"),
            },
        }
    }

    /// Every rule of a grid kind (16 triangular, 32 square).
    pub fn all(grid: GridKind) -> impl Iterator<Item = Rule> {
        let count = 1u16 << (grid.degree() + 1);
        (0..count).map(move |mask| Rule {
            grid,
            mask: mask as u8,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule({} {})", self.grid.tag(), self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GridKind::*;

    #[test]
    fn parse_names() {
        assert_eq!(
            Rule::parse("23", Triangular).unwrap().activating_sums(),
            vec![2, 3]
        );
        assert!(Rule::parse("phi", Square)
            .unwrap()
            .activating_sums()
            .is_empty());
        assert!(Rule::parse("32", Square).is_err());
        assert!(Rule::parse("", Square).is_err());
        assert!(Rule::parse("4", Triangular).is_err());
        assert!(Rule::parse("22", Square).is_err());
        assert!(Rule::parse("2a", Square).is_err());
    }

    #[test]
    fn classes() {
        let class = |n: &str, g| Rule::parse(n, g).unwrap().classify();
        assert_eq!(class("24", Square), RuleClass::TuringUniversal);
        assert_eq!(class("12", Triangular), RuleClass::Algebraic);
        assert_eq!(class("02", Square), RuleClass::NonQuiescent);
        assert_eq!(class("234", Square), RuleClass::Topological);
        assert_eq!(class("phi", Triangular), RuleClass::Trivial);
        assert_eq!(class("23", Square), RuleClass::Unclassified);
    }

    #[test]
    fn classification_is_total() {
        assert_eq!(Rule::all(Triangular).count(), 16);
        assert_eq!(Rule::all(Square).count(), 32);
        for g in [Triangular, Square] {
            for r in Rule::all(g) {
                let _ = r.classify();
                assert_eq!(Rule::parse(&r.name(), g).unwrap(), r);
            }
        }
    }

    #[test]
    fn monotone_sets() {
        assert!(Rule::parse("234", Square).unwrap().is_monotone());
        assert!(Rule::parse("4", Square).unwrap().is_monotone());
        assert!(!Rule::parse("12", Square).unwrap().is_monotone());
        assert!(Rule::parse("phi", Square).unwrap().is_monotone());
    }
}
