//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use ftca::circuits::{compile_layout, evaluate_netlist, verify_gadget, Gadget, Netlist};
use ftca::deciders::{crosscheck, decide, decide_all};
use ftca::engine::{oracle_stable, run_to_fixed_point, step};
use ftca::graphkit::distance_field_indices;
use ftca::{Cell, Configuration, GridKind, Method, Rule, Topology};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rule(name: &str, grid: GridKind) -> Rule {
    Rule::parse(name, grid).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn topology(grid: GridKind, n: usize) -> Topology {
    match grid {
        GridKind::Square => Topology::square(n).unwrap(),
        GridKind::Triangular => Topology::triangular(n).unwrap(),
    }
}

/// Crosscheck all inactive cells, plus the single-cell decider on a few.
fn oracle_equivalence(
    grid: GridKind,
    name: &str,
    n: usize,
    d: f64,
    seed: u64,
) -> Result<usize, String> {
    let r = rule(name, grid);
    let c = Configuration::random(topology(grid, n), d, seed);
    let report = crosscheck(r, &c).map_err(|e| e.to_string())?;
    ensure(report.mismatches.is_empty(), || {
        format!(
            "rule {name} n={n} d={d} seed={seed}: {:?}\n{}",
            report.mismatches[0],
            c.to_text()
        )
    })?;
    let t = c.topology();
    for i in (0..t.cell_count()).step_by(t.cell_count() / 5 + 1) {
        let u = t.cell(i);
        if c.get(u) {
            continue;
        }
        let fast = decide(r, &c, u).map_err(|e| e.to_string())?;
        let oracle = report.trajectory.verdict(u).map_err(|e| e.to_string())?;
        ensure(fast.agrees_with(&oracle), || {
            format!(
                "rule {name} cell {u}: decide {fast:?} vs oracle {oracle:?}\n{}",
                c.to_text()
            )
        })?;
    }
    Ok(report.cells_checked)
}

fn topological_rules() -> Outcome {
    let densities = [0.1, 0.3, 0.5, 0.8];
    let cases = [
        (GridKind::Triangular, "23", &[8usize, 16][..]),
        (GridKind::Triangular, "2", &[8, 16]),
        (GridKind::Square, "34", &[6, 10, 16]),
        (GridKind::Square, "3", &[6, 10, 16]),
        (GridKind::Square, "234", &[6, 10, 16]),
    ];
    let mut cells = 0;
    for (grid, name, sizes) in cases {
        for k in 0..200u64 {
            let n = sizes[k as usize % sizes.len()];
            let d = densities[(k as usize / sizes.len()) % densities.len()];
            cells += oracle_equivalence(grid, name, n, d, 1000 + k)?;
        }
    }
    Ok(format!(
        "5 rules x 200 configurations, {cells} cells, 0 mismatches"
    ))
}

fn algebraic_rules() -> Outcome {
    let densities = [0.02, 0.05, 0.1, 0.5];
    let cases = [
        (GridKind::Triangular, "12", 16),
        (GridKind::Square, "12", 24),
        (GridKind::Square, "123", 24),
        (GridKind::Square, "124", 24),
    ];
    let (mut cells, mut deep, mut fallback) = (0, 0, 0);
    for (grid, name, n) in cases {
        let r = rule(name, grid);
        for k in 0..300u64 {
            let d = densities[k as usize % densities.len()];
            let c = Configuration::random(topology(grid, n), d, 5000 + k);
            if c.active_count() == 0 {
                continue;
            }
            let report = crosscheck(r, &c).map_err(|e| e.to_string())?;
            ensure(report.mismatches.is_empty(), || {
                format!(
                    "rule {name} seed {}: {:?}\n{}",
                    5000 + k,
                    report.mismatches[0],
                    c.to_text()
                )
            })?;
            cells += report.cells_checked;
            let dist = distance_field_indices(c.topology(), c.active_indices()).unwrap();
            for (i, v) in report.fast_verdicts.iter().enumerate() {
                let Some(v) = v else { continue };
                let tau = dist[i] as usize;
                deep += usize::from(tau >= 3);
                if v.method == Method::Oracle {
                    fallback += 1;
                    continue;
                }
                if let Some(time) = v.activation_time {
                    let ok = if name == "124" {
                        (tau..=tau + 2).contains(&time)
                    } else {
                        time == tau
                    };
                    ensure(ok, || {
                        format!("rule {name}: activation {time} with tau {tau}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "4 rules x 300 configurations, {cells} cells ({deep} with tau >= 3, {fallback} oracle fallbacks), time windows hold"
    ))
}

fn trivial_rules() -> Outcome {
    let tri = GridKind::Triangular;
    for k in 0..100u64 {
        let n = [2, 4, 8][k as usize % 3];
        let c = Configuration::random(topology(tri, n), 0.05 + 0.009 * k as f64, 7000 + k);
        if c.active_count() > 0 {
            let verdicts = decide_all(rule("123", tri), &c).map_err(|e| e.to_string())?;
            ensure(verdicts.iter().flatten().all(|v| !v.stable), || {
                format!("rule 123 left a stable cell\n{}", c.to_text())
            })?;
            let fp = run_to_fixed_point(rule("123", tri), &c)
                .unwrap()
                .fixed_point;
            ensure(fp.active_count() == fp.topology().cell_count(), || {
                "123 fixed point not full".into()
            })?;
        }
        let three = run_to_fixed_point(rule("3", tri), &c).unwrap();
        ensure(three.steps_to_fix <= 1, || {
            format!("rule 3 took {} steps", three.steps_to_fix)
        })?;
        for grid in [GridKind::Triangular, GridKind::Square] {
            let phi = run_to_fixed_point(rule("phi", grid), &c_for(grid, &c, k)).unwrap();
            ensure(phi.steps_to_fix == 0, || {
                "rule phi changed a configuration".into()
            })?;
        }
    }
    Ok(
        "123: no stable cell; 3: fixed within 1 step; phi: fixed at step 0 (100 configurations)"
            .into(),
    )
}

fn c_for(grid: GridKind, c: &Configuration, k: u64) -> Configuration {
    match grid {
        GridKind::Triangular => c.clone(),
        GridKind::Square => Configuration::random(topology(grid, 7), 0.3, 7500 + k),
    }
}

fn freezing_invariants() -> Outcome {
    let mut runs = 0;
    for grid in [GridKind::Triangular, GridKind::Square] {
        let digits: Vec<u8> = (1..=grid.degree() as u8).collect();
        for mask in 0u32..(1 << digits.len()) {
            let name: String = digits
                .iter()
                .filter(|&&d| mask & (1 << (d - 1)) != 0)
                .map(|&d| char::from(b'0' + d))
                .collect();
            let r = rule(if name.is_empty() { "phi" } else { &name }, grid);
            for k in 0..12u64 {
                let n = [4, 6, 8][k as usize % 3];
                let c = Configuration::random(topology(grid, n), 0.05 * (k + 1) as f64, 9000 + k);
                let traj = run_to_fixed_point(r, &c).unwrap();
                ensure(traj.steps_to_fix <= c.topology().cell_count(), || {
                    "slow fixed point".into()
                })?;
                let mut prev = c.clone();
                for t in 1..=traj.steps_to_fix {
                    let next = traj.state_at(t);
                    ensure(prev.is_below(&next), || {
                        format!("rule {r} shrank at step {t}")
                    })?;
                    prev = next;
                }
                let (dr, dc) = (k as i64 % 5, 2 * (k as i64 % 3) + k as i64 % 5);
                ensure(
                    step(r, &c.translate(dr, dc)).unwrap()
                        == step(r, &c).unwrap().translate(dr, dc),
                    || format!("rule {r} does not commute with ({dr}, {dc})"),
                )?;
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{runs} trajectories: monotone, fixed within cell count, translation-equivariant"
    ))
}

fn padded_equivalence() -> Outcome {
    let r = rule("234", GridKind::Square);
    let mut stable = 0;
    for k in 0..50u64 {
        let n = 2 + k as usize % 5;
        let c = Configuration::random(
            topology(GridKind::Square, n),
            0.1 + 0.015 * k as f64,
            11000 + k,
        );
        let inactive: Vec<usize> = (0..n * n).filter(|&i| !c.get_index(i)).collect();
        let Some(&i) = inactive.get(k as usize % inactive.len().max(1)) else {
            continue;
        };
        let u = c.topology().cell(i);
        let d = c.build_padded(u);
        let m = 2 * n * n + 3 * n;
        let dt = d.padded.topology();
        ensure((dt.rows(), dt.cols()) == (m, m), || {
            format!("D(x) is not {m} x {m}")
        })?;
        let here = oracle_stable(r, &c, u).unwrap();
        let there = oracle_stable(r, &d.padded, d.query_image()).unwrap();
        ensure(here.stable == there.stable, || {
            format!(
                "cell {u}: {} in x, {} in D(x)\n{}",
                here.stable,
                there.stable,
                c.to_text()
            )
        })?;
        stable += usize::from(here.stable);
    }
    Ok(format!(
        "50 configurations (n <= 6), {stable} stable queries, verdicts preserved"
    ))
}

fn gadget_tables() -> Outcome {
    let mut lines = Vec::new();
    for g in Gadget::standard_gadgets() {
        for name in ["2", "24"] {
            let report =
                verify_gadget(&g, rule(name, GridKind::Square)).map_err(|e| e.to_string())?;
            ensure(report.pass, || {
                format!(
                    "{} fails under {name}: {:?}",
                    g.name,
                    report.failures().collect::<Vec<_>>()
                )
            })?;
        }
        let bad = verify_gadget(&g, rule("02", GridKind::Square)).map_err(|e| e.to_string())?;
        ensure(!bad.pass, || {
            format!("{} unexpectedly passes under 02", g.name)
        })?;
        lines.push(format!("{}({})", g.name, g.delay));
    }
    Ok(format!(
        "pass under 2 and 24, fail under 02: {}",
        lines.join(" ")
    ))
}

fn compiled_circuits() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/netlists");
    let mut parts = Vec::new();
    for file in ["and2", "or_xor", "maj3", "cross"] {
        let text = std::fs::read_to_string(dir.join(format!("{file}.json"))).unwrap();
        let netlist = Netlist::from_json(&text).map_err(|e| e.to_string())?;
        let layout = compile_layout(&netlist).map_err(|e| e.to_string())?;
        let assignments = netlist.all_assignments();
        for a in &assignments {
            let expected = evaluate_netlist(&netlist, a).unwrap();
            let compiled = layout.with_assignment(a).unwrap();
            for name in ["2", "24"] {
                let run = compiled
                    .simulate(rule(name, GridKind::Square))
                    .map_err(|e| e.to_string())?;
                for (id, t) in &run.probe_times {
                    ensure(t.is_some() == expected[id], || {
                        format!(
                            "{file} under {name}, {a:?}: probe {id} fired {t:?}, expected {}",
                            expected[id]
                        )
                    })?;
                }
            }
        }
        parts.push(format!(
            "{file}[{} assignments, {} crossings]",
            assignments.len(),
            layout.crossings
        ));
    }
    ensure(parts.iter().any(|p| !p.ends_with("0 crossings]")), || {
        "no crossing exercised".into()
    })?;
    Ok(parts.join(" "))
}

fn best_of(runs: usize, mut f: impl FnMut()) -> Duration {
    (0..runs)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed()
        })
        .min()
        .unwrap()
}

fn performance() -> Outcome {
    let r = rule("234", GridKind::Square);
    let c = Configuration::random(topology(GridKind::Square, 512), 0.3, 2024);
    let sim = best_of(5, || {
        run_to_fixed_point(r, &c).unwrap();
    });
    let fast = best_of(5, || {
        decide_all(r, &c).unwrap();
    });
    let ratio = sim.as_secs_f64() / fast.as_secs_f64();
    ensure(fast < sim, || {
        format!("decider {fast:?} not faster than simulation {sim:?}")
    })?;
    Ok(format!(
        "simulation {sim:?}, 3-core decider {fast:?}, ratio {ratio:.2}x"
    ))
}

/// Plain re-simulation from neighbor lists, independent of the engine.
fn naive_counts(t: Topology, seed: Cell, rule: &[usize], checkpoints: &[usize]) -> Vec<usize> {
    let mut state = vec![false; t.cell_count()];
    state[t.index(seed)] = true;
    let mut out = Vec::new();
    for step in 1..=*checkpoints.last().unwrap() {
        let prev = state.clone();
        for c in t.cells() {
            let sum = t.neighbors(c).iter().filter(|&&v| prev[t.index(v)]).count();
            if !prev[t.index(c)] && rule.contains(&sum) {
                state[t.index(c)] = true;
            }
        }
        if checkpoints.contains(&step) {
            out.push(state.iter().filter(|&&b| b).count());
        }
    }
    out
}

fn pbm_active(pbm: &str) -> usize {
    pbm.lines()
        .skip(2)
        .flat_map(|l| l.split(' '))
        .filter(|&p| p == "1")
        .count()
}

fn fractal_smoke() -> Outcome {
    let checkpoints = [8, 16, 32];
    let mut parts = Vec::new();
    for (grid, n) in [(GridKind::Square, 80), (GridKind::Triangular, 40)] {
        let t = topology(grid, n);
        let seed = Cell::new(t.rows() / 2, t.cols() / 2);
        let c = Configuration::from_fn(t, |x| x == seed);
        let traj = ftca::engine::run(rule("1", grid), &c, Some(32)).unwrap();
        let counts: Vec<usize> = checkpoints
            .iter()
            .map(|&s| pbm_active(&traj.state_at(s).to_pbm()))
            .collect();
        let naive = naive_counts(t, seed, &[1], &checkpoints);
        ensure(counts == naive, || {
            format!("{grid}: renders {counts:?}, re-simulation {naive:?}")
        })?;
        parts.push(format!("{}{counts:?}", grid.tag()));
    }
    Ok(format!(
        "active cells at steps 8/16/32: {}",
        parts.join(" ")
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence, topological rules", topological_rules),
        ("oracle equivalence, algebraic rules", algebraic_rules),
        ("trivial-rule facts", trivial_rules),
        ("freezing invariants", freezing_invariants),
        ("padded configuration equivalence", padded_equivalence),
        ("gadget truth tables", gadget_tables),
        ("compiled circuits end to end", compiled_circuits),
        ("3-core decider faster than simulation", performance),
        ("fractal growth renders", fractal_smoke),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s): {detail}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
