//! Fast deciders against the simulation oracle on seeded random corpora.

use ftca::deciders::crosscheck;
use ftca::{Configuration, GridKind, Rule, Topology};

fn sweep(grid: GridKind, rule: &str, sizes: &[usize], densities: &[f64], seeds: u64) {
    let rule = Rule::parse(rule, grid).unwrap();
    for &n in sizes {
        let t = match grid {
            GridKind::Square => Topology::square(n).unwrap(),
            GridKind::Triangular => Topology::new(grid, n, 2 * n).unwrap(),
        };
        for &d in densities {
            for seed in 0..seeds {
                let c = Configuration::random(t, d, seed * 7919 + n as u64);
                let report = crosscheck(rule, &c).unwrap();
                assert!(
                    report.mismatches.is_empty(),
                    "rule {rule:?} n={n} d={d} seed={seed}: {:?}\n{}",
                    &report.mismatches[..report.mismatches.len().min(5)],
                    c.to_text()
                );
            }
        }
    }
}

const DENSITIES: [f64; 5] = [0.05, 0.1, 0.3, 0.5, 0.8];

#[test]
fn trivial_rules() {
    for r in ["phi", "123", "3"] {
        sweep(GridKind::Triangular, r, &[2, 4, 8], &DENSITIES, 10);
    }
    for r in ["phi", "1234", "4"] {
        sweep(GridKind::Square, r, &[1, 2, 4, 8, 12], &DENSITIES, 10);
    }
}

#[test]
fn majority_rules() {
    sweep(GridKind::Triangular, "23", &[2, 4, 8, 16], &DENSITIES, 20);
    sweep(
        GridKind::Square,
        "34",
        &[1, 2, 4, 6, 12, 16],
        &DENSITIES,
        20,
    );
    sweep(
        GridKind::Square,
        "234",
        &[1, 2, 4, 6, 12, 16],
        &DENSITIES,
        20,
    );
}

#[test]
fn tree_depth_rules() {
    sweep(GridKind::Triangular, "2", &[2, 4, 8, 16], &DENSITIES, 20);
    sweep(GridKind::Square, "3", &[1, 2, 4, 6, 12, 16], &DENSITIES, 20);
}

#[test]
fn algebraic_rules() {
    let sparse = [0.02, 0.05, 0.1, 0.3, 0.5];
    sweep(GridKind::Triangular, "12", &[4, 8, 16], &sparse, 20);
    for r in ["12", "123", "124"] {
        sweep(GridKind::Square, r, &[4, 8, 12, 16, 24], &sparse, 20);
    }
}
