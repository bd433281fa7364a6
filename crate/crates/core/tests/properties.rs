//! Property tests against brute-force reference implementations.

use std::collections::VecDeque;

use ftca::engine::{run_to_fixed_point, step};
use ftca::graphkit::{self, InducedGraph};
use ftca::{Cell, Configuration, GridKind, Rule, Topology};
use proptest::prelude::*;

fn topology() -> impl Strategy<Value = Topology> {
    prop_oneof![
        (1usize..12, 1usize..12).prop_map(|(r, c)| Topology::new(GridKind::Square, r, c).unwrap()),
        (1usize..6, 2usize..7)
            .prop_map(|(r, c)| Topology::new(GridKind::Triangular, 2 * r, 2 * c).unwrap()),
    ]
}

fn configuration() -> impl Strategy<Value = Configuration> {
    (topology(), 0.0f64..1.0, any::<u64>())
        .prop_map(|(t, d, seed)| Configuration::random(t, d, seed))
}

fn rule_for(kind: GridKind, mask: u8) -> Rule {
    let digits: String = (1..=kind.degree())
        .filter(|&k| mask & (1 << (k - 1)) != 0)
        .map(|k| char::from(b'0' + k as u8))
        .collect();
    let name = if digits.is_empty() {
        "phi".to_string()
    } else {
        digits
    };
    Rule::parse(&name, kind).unwrap()
}

fn bfs(t: Topology, from: usize, allowed: impl Fn(usize) -> bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; t.cell_count()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(i) = queue.pop_front() {
        for &j in t.neighbor_indices(i).as_slice() {
            if dist[j].is_none() && allowed(j) {
                dist[j] = Some(dist[i].unwrap() + 1);
                queue.push_back(j);
            }
        }
    }
    dist
}

/// Synchronous peeling by repeated full scans.
fn naive_rounds(member: &[bool], t: Topology, k: usize) -> Vec<Option<u32>> {
    let mut alive = member.to_vec();
    let mut round = vec![None; alive.len()];
    for r in 1.. {
        let gone: Vec<usize> = (0..alive.len())
            .filter(|&i| {
                alive[i]
                    && t.neighbor_indices(i)
                        .as_slice()
                        .iter()
                        .filter(|&&j| alive[j])
                        .count()
                        < k
            })
            .collect();
        if gone.is_empty() {
            break;
        }
        for i in gone {
            alive[i] = false;
            round[i] = Some(r);
        }
    }
    round
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighborhoods_are_symmetric(t in topology()) {
        for i in 0..t.cell_count() {
            let n = t.neighbor_indices(i);
            prop_assert_eq!(n.as_slice().len(), t.degree());
            for &j in n.as_slice() {
                let there = t.neighbor_indices(j).as_slice().iter().filter(|&&x| x == i).count();
                let here = n.as_slice().iter().filter(|&&x| x == j).count();
                prop_assert_eq!(there, here);
            }
        }
    }

    #[test]
    fn square_distances_match_closed_form(rows in 1usize..14, cols in 1usize..14, seed in any::<u64>()) {
        let t = Topology::new(GridKind::Square, rows, cols).unwrap();
        let src = (seed % t.cell_count() as u64) as usize;
        let field = graphkit::distance_field_indices(t, [src]).unwrap();
        let a = t.cell(src);
        for (i, &d) in field.iter().enumerate() {
            let b = t.cell(i);
            let dr = a.row.abs_diff(b.row);
            let dc = a.col.abs_diff(b.col);
            let closed = dr.min(rows - dr) + dc.min(cols - dc);
            prop_assert_eq!(d as usize, closed);
            prop_assert_eq!(t.graph_distance(a, b), closed);
        }
    }

    #[test]
    fn distance_fields_match_reference_bfs(c in configuration()) {
        let t = c.topology();
        prop_assume!(c.active_count() > 0);
        let field = graphkit::distance_field_indices(t, c.active_indices()).unwrap();
        let per_source: Vec<Vec<Option<usize>>> =
            c.active_indices().map(|s| bfs(t, s, |_| true)).collect();
        for i in 0..t.cell_count() {
            let best = per_source.iter().filter_map(|d| d[i]).min().unwrap();
            prop_assert_eq!(field[i] as usize, best);
        }
    }

    #[test]
    fn text_format_round_trips(c in configuration()) {
        let parsed = Configuration::parse(&c.to_text()).unwrap();
        prop_assert!(!parsed.rows_doubled);
        prop_assert_eq!(parsed.configuration, c);
    }

    #[test]
    fn dynamics_only_add_active_cells(c in configuration(), mask in 0u8..16) {
        let rule = rule_for(c.topology().kind(), mask);
        let next = step(rule, &c).unwrap();
        prop_assert!(c.is_below(&next));
        let traj = run_to_fixed_point(rule, &c).unwrap();
        prop_assert!(traj.reached_fixed_point);
        prop_assert_eq!(step(rule, &traj.fixed_point).unwrap(), traj.fixed_point.clone());
        for t in 0..traj.steps_to_fix {
            prop_assert!(traj.state_at(t).is_below(&traj.state_at(t + 1)));
        }
    }

    #[test]
    fn steps_commute_with_translations(c in configuration(), mask in 0u8..16, dr in -9i64..9, dc in -9i64..9) {
        let rule = rule_for(c.topology().kind(), mask);
        let dc = if c.topology().kind() == GridKind::Triangular && (dr + dc) % 2 != 0 { dc + 1 } else { dc };
        prop_assert_eq!(
            step(rule, &c.translate(dr, dc)).unwrap(),
            step(rule, &c).unwrap().translate(dr, dc)
        );
    }

    #[test]
    fn frontier_run_matches_repeated_full_steps(c in configuration(), mask in 0u8..16) {
        let rule = rule_for(c.topology().kind(), mask);
        let traj = run_to_fixed_point(rule, &c).unwrap();
        let mut state = c.clone();
        let mut t = 0;
        loop {
            prop_assert_eq!(traj.state_at(t), state.clone());
            let next = step(rule, &state).unwrap();
            if next == state {
                break;
            }
            state = next;
            t += 1;
        }
        prop_assert_eq!(t, traj.steps_to_fix);
        prop_assert_eq!(state, traj.fixed_point);
    }

    #[test]
    fn k_cores_are_maximal_and_match_peeling(c in configuration(), k in 1usize..5) {
        let t = c.topology();
        let g = InducedGraph::inactive(&c);
        let core = graphkit::k_core_mask(&g, k);
        let rounds = graphkit::peeling_rounds(&g, k);
        let member: Vec<bool> = (0..t.cell_count()).map(|i| g.contains_index(i)).collect();
        prop_assert_eq!(&rounds, &naive_rounds(&member, t, k));
        for i in 0..t.cell_count() {
            prop_assert_eq!(core[i], member[i] && rounds[i].is_none());
            if core[i] {
                let deg = t.neighbor_indices(i).as_slice().iter().filter(|&&j| core[j]).count();
                prop_assert!(deg >= k);
            }
        }
    }

    #[test]
    fn wide_tori_peel_like_the_naive_scan(
        wide in prop_oneof![60usize..70, 120usize..136, 190usize..200],
        rows in 3usize..7,
        square in any::<bool>(),
        density in 0.0f64..0.6,
        seed in any::<u64>(),
        k in 1usize..5,
    ) {
        let t = if square {
            Topology::new(GridKind::Square, rows, wide).unwrap()
        } else {
            Topology::new(GridKind::Triangular, 2 * rows, 2 * (wide / 2)).unwrap()
        };
        let c = Configuration::random(t, density, seed);
        let g = InducedGraph::inactive(&c);
        let member: Vec<bool> = (0..t.cell_count()).map(|i| g.contains_index(i)).collect();
        prop_assert_eq!(graphkit::peeling_rounds(&g, k), naive_rounds(&member, t, k));
    }

    #[test]
    fn subtree_depths_match_brute_force(
        n in 3usize..9,
        density in 0.3f64..0.8,
        seed in any::<u64>(),
        pick in any::<usize>(),
        tri in any::<bool>(),
    ) {
        let t = if tri {
            Topology::new(GridKind::Triangular, 2 * (n / 2 + 1), 2 * n).unwrap()
        } else {
            Topology::square(n).unwrap()
        };
        prop_assume!(!t.is_degenerate());
        let mut c = Configuration::random(t, density, seed);
        let u = pick % t.cell_count();
        c.set_index(u, false);
        let g = InducedGraph::inactive(&c);
        let root = t.cell(u);
        let result = graphkit::subtree_depths(&g, root);
        let mut any_cyclic = false;
        let mut expected = Vec::new();
        for &v in t.neighbor_indices(u).as_slice() {
            if !g.contains_index(v) {
                expected.push((t.cell(v), None));
                continue;
            }
            let dist = bfs(t, v, |j| j != u && g.contains_index(j));
            let comp: Vec<usize> = (0..t.cell_count()).filter(|&j| dist[j].is_some()).collect();
            let degree_sum: usize = comp
                .iter()
                .map(|&j| t.neighbor_indices(j).as_slice().iter().filter(|&&x| x != u && g.contains_index(x)).count())
                .sum();
            let to_root: usize = comp
                .iter()
                .map(|&j| t.neighbor_indices(j).as_slice().iter().filter(|&&x| x == u).count())
                .sum();
            if degree_sum / 2 + 1 == comp.len() && to_root == 1 {
                expected.push((t.cell(v), comp.iter().map(|&j| dist[j].unwrap()).max()));
            } else {
                any_cyclic = true;
            }
        }
        match result {
            Ok(depths) => {
                prop_assert!(!any_cyclic);
                prop_assert_eq!(depths.child_subtree_depth, expected);
            }
            Err(_) => prop_assert!(any_cyclic),
        }
    }
}

#[test]
fn square_neighbors_are_the_four_axis_cells() {
    let t = Topology::square(5).unwrap();
    let n = t.neighbors(Cell::new(0, 0));
    for c in [
        Cell::new(4, 0),
        Cell::new(1, 0),
        Cell::new(0, 4),
        Cell::new(0, 1),
    ] {
        assert!(n.contains(&c));
    }
}
