//! `ftca`: simulate freezing totalistic automata, decide stability, compare
//! the fast deciders with simulation, build circuits and run benchmarks.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verdict mismatch, 3 parse
//! error, 4 gadget verification failure, 5 query cell initially active.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ftca::circuits::{self, Gadget, Netlist};
use ftca::deciders::{self, DecideError};
use ftca::engine::{self, EngineError};
use ftca::{Cell, Configuration, GridKind, Rule, StabilityVerdict, Topology};

#[derive(Parser)]
#[command(
    name = "ftca",
    version,
    about = "Freezing totalistic cellular automata toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the automaton and write the final (and intermediate) states.
    Simulate(SimulateArgs),
    /// Decide whether one inactive cell is stable.
    Decide(DecideArgs),
    /// Compare the fast deciders with simulation on random configurations.
    Crosscheck(CrosscheckArgs),
    /// Verify gadgets or compile a netlist for rules 2 and 24.
    #[command(subcommand)]
    Circuits(CircuitsCommand),
    /// Time simulation against the fast deciders.
    Bench(BenchArgs),
    /// Render a configuration file as a portable bitmap.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Tri,
    Sq,
}

impl From<GridArg> for GridKind {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Tri => GridKind::Triangular,
            GridArg::Sq => GridKind::Square,
        }
    }
}

/// Where the initial configuration comes from.
#[derive(Args)]
struct Source {
    /// Configuration file in the `SQ n` / `TRI n` text format.
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Generate a random configuration of this size instead.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    grid: GridArg,
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    source: Source,
    /// Stop after this many steps.
    #[arg(long, conflicts_with = "to_fixed_point")]
    steps: Option<usize>,
    /// Run until the configuration stops changing (the default).
    #[arg(long)]
    to_fixed_point: bool,
    /// Also render every K-th step.
    #[arg(long, requires = "out")]
    render_every: Option<usize>,
    /// Directory for the final state and renders.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Fast,
    Oracle,
    Both,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long, value_enum)]
    grid: GridArg,
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    source: Source,
    /// Query cell as `row,col`.
    #[arg(long)]
    cell: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
    method: MethodArg,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long, value_enum)]
    grid: GridArg,
    #[arg(long)]
    rule: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Torus sizes (square side, or triangular rows).
    #[arg(long, value_delimiter = ',', default_value = "6,10,16")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.8")]
    densities: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print one record per trial.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum CircuitsCommand {
    /// Check every gadget's truth table by simulation.
    VerifyGadgets {
        /// `2`, `24`, `both`, or any other square rule name.
        #[arg(long, default_value = "both")]
        rule: String,
    },
    /// Lay out a netlist and optionally simulate it.
    Compile {
        #[arg(long)]
        netlist: PathBuf,
        /// One bit per entry of the netlist's `inputs`, e.g. `110`.
        #[arg(long)]
        inputs: String,
        #[arg(long)]
        simulate: bool,
        /// Rule used with `--simulate`.
        #[arg(long, default_value = "2")]
        rule: String,
        /// Directory for the configuration and probe coordinates.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    grid: GridArg,
    #[arg(long)]
    rule: String,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// An error carrying its exit status.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn exit(code: u8, message: impl Into<String>) -> anyhow::Error {
    Exit {
        code,
        message: message.into(),
    }
    .into()
}

const MISMATCH: u8 = 2;
const PARSE: u8 = 3;
const GADGET_FAILURE: u8 = 4;
const CELL_ACTIVE: u8 = 5;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let started = Instant::now();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Decide(a) => decide(a),
        Command::Crosscheck(a) => crosscheck(a),
        Command::Circuits(c) => circuits_cmd(c),
        Command::Bench(a) => bench(a),
        Command::Render(a) => render(a),
    };
    match result {
        Ok(()) => {
            println!("wall_ms={}", started.elapsed().as_millis());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.downcast_ref::<Exit>().map_or(1, |x| x.code);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn parse_rule(name: &str, grid: GridKind) -> Result<Rule> {
    Rule::parse(name, grid).map_err(|e| exit(1, e.to_string()))
}

fn load(source: &Source, grid: GridKind) -> Result<Configuration> {
    let c = match (&source.input, source.random) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let parsed = Configuration::parse(&text)
                .map_err(|e| exit(PARSE, format!("{}: {e}", path.display())))?;
            if parsed.rows_doubled {
                println!("note=odd triangular row count, pattern stacked twice");
            }
            parsed.configuration
        }
        (None, Some(n)) => {
            if !(0.0..=1.0).contains(&source.density) {
                return Err(exit(1, "density must lie in [0, 1]"));
            }
            Configuration::random(topology(grid, n)?, source.density, source.seed)
        }
        (None, None) => return Err(exit(1, "give --input FILE or --random SIZE")),
    };
    if c.topology().kind() != grid {
        return Err(exit(
            1,
            format!("file holds a {} grid", c.topology().kind()),
        ));
    }
    Ok(c)
}

fn topology(grid: GridKind, n: usize) -> Result<Topology> {
    match grid {
        GridKind::Square => Topology::square(n),
        GridKind::Triangular => Topology::triangular(n),
    }
    .map_err(|e| exit(1, e.to_string()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote={}", path.display());
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let grid = a.grid.into();
    let rule = parse_rule(&a.rule, grid)?;
    let c = load(&a.source, grid)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let started = Instant::now();
    let traj = engine::run(rule, &c, a.steps)?;
    println!(
        "command=simulate grid={} rule={} seed={} rows={} cols={}",
        grid.tag(),
        rule,
        a.source.seed,
        c.topology().rows(),
        c.topology().cols()
    );
    println!(
        "steps_to_fix={} reached_fixed_point={} active_cells={} simulate_ms={}",
        traj.steps_to_fix,
        traj.reached_fixed_point,
        traj.fixed_point.active_count(),
        started.elapsed().as_millis()
    );
    if let Some(dir) = &a.out {
        if let Some(k) = a.render_every {
            let k = k.max(1);
            let last = a.steps.unwrap_or(traj.steps_to_fix);
            for t in (0..=last).step_by(k) {
                let state = traj.state_at(t);
                println!("step={t} active_cells={}", state.active_count());
                render_files(dir, &format!("step_{t:05}"), &state)?;
            }
        }
        write(&dir.join("final.txt"), &traj.fixed_point.to_text())?;
        render_files(dir, "final", &traj.fixed_point)?;
    }
    Ok(())
}

fn render_files(dir: &Path, stem: &str, c: &Configuration) -> Result<()> {
    write(&dir.join(format!("{stem}.pbm")), &c.to_pbm())?;
    if c.topology().kind() == GridKind::Triangular {
        write(&dir.join(format!("{stem}.ascii")), &c.to_ascii())?;
    }
    Ok(())
}

fn parse_cell(s: &str, t: Topology) -> Result<Cell> {
    let bad = || {
        exit(
            1,
            format!("--cell expects `row,col` inside the torus, got {s:?}"),
        )
    };
    let (r, c) = s.split_once(',').ok_or_else(bad)?;
    let cell = Cell::new(
        r.trim().parse().map_err(|_| bad())?,
        c.trim().parse().map_err(|_| bad())?,
    );
    if !t.contains(cell) {
        return Err(bad());
    }
    Ok(cell)
}

fn decide_error(e: DecideError) -> anyhow::Error {
    match e {
        DecideError::Engine(EngineError::CellInitiallyActive(c)) => {
            exit(CELL_ACTIVE, format!("cell {c} is initially active"))
        }
        other => exit(1, other.to_string()),
    }
}

fn print_verdict(label: &str, v: &StabilityVerdict) {
    println!(
        "{label}verdict={} method={} activation_time={}",
        if v.stable { "Stable" } else { "NotStable" },
        v.method,
        v.activation_time
            .map_or("none".to_string(), |t| t.to_string())
    );
}

fn decide(a: DecideArgs) -> Result<()> {
    let grid = a.grid.into();
    let rule = parse_rule(&a.rule, grid)?;
    let c = load(&a.source, grid)?;
    let u = parse_cell(&a.cell, c.topology())?;
    println!(
        "command=decide grid={} rule={} class={:?} cell={},{}",
        grid.tag(),
        rule,
        rule.classify(),
        u.row,
        u.col
    );
    let fast = || deciders::decide(rule, &c, u).map_err(decide_error);
    let oracle =
        || engine::oracle_stable(rule, &c, u).map_err(|e| decide_error(DecideError::Engine(e)));
    match a.method {
        MethodArg::Fast => print_verdict("", &fast()?),
        MethodArg::Oracle => print_verdict("", &oracle()?),
        MethodArg::Both => {
            let (f, o) = (fast()?, oracle()?);
            print_verdict("fast_", &f);
            print_verdict("oracle_", &o);
            println!("agree={}", f.agrees_with(&o));
            if !f.agrees_with(&o) {
                return Err(exit(MISMATCH, "fast decider disagrees with the oracle"));
            }
        }
    }
    Ok(())
}

/// Outcome of one crosscheck trial.
struct Trial {
    size: usize,
    density: f64,
    seed: u64,
    cells: usize,
    mismatches: Vec<deciders::Mismatch>,
    config: Configuration,
    millis: u128,
}

fn crosscheck(a: CrosscheckArgs) -> Result<()> {
    let grid: GridKind = a.grid.into();
    let rule = parse_rule(&a.rule, grid)?;
    if a.sizes.is_empty() || a.densities.is_empty() {
        return Err(exit(1, "--sizes and --densities must not be empty"));
    }
    for &n in &a.sizes {
        topology(grid, n)?;
    }
    let plan: Vec<(usize, f64, u64)> = (0..a.trials)
        .map(|k| {
            let size = a.sizes[k % a.sizes.len()];
            let density = a.densities[(k / a.sizes.len()) % a.densities.len()];
            (size, density, a.seed.wrapping_add(k as u64))
        })
        .collect();
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(plan.len().max(1));
    let run_trial = |&(size, density, seed): &(usize, f64, u64)| -> Result<Trial, DecideError> {
        let started = Instant::now();
        let config = Configuration::random(topology(grid, size).expect("checked"), density, seed);
        let report = deciders::crosscheck(rule, &config)?;
        Ok(Trial {
            size,
            density,
            seed,
            cells: report.cells_checked,
            mismatches: report.mismatches,
            config,
            millis: started.elapsed().as_millis(),
        })
    };
    let mut trials: Vec<Option<Result<Trial, DecideError>>> =
        (0..plan.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunk = plan.len().div_ceil(workers).max(1);
        for (plan_part, out_part) in plan.chunks(chunk).zip(trials.chunks_mut(chunk)) {
            s.spawn(move || {
                for (p, o) in plan_part.iter().zip(out_part.iter_mut()) {
                    *o = Some(run_trial(p));
                }
            });
        }
    });
    println!(
        "command=crosscheck grid={} rule={} trials={} seed={}",
        grid.tag(),
        rule,
        a.trials,
        a.seed
    );
    let mut cells = 0;
    let mut mismatches = 0;
    for (k, t) in trials.into_iter().enumerate() {
        let t = t
            .expect("every trial ran")
            .map_err(|e| exit(1, e.to_string()))?;
        cells += t.cells;
        mismatches += t.mismatches.len();
        if a.verbose || !t.mismatches.is_empty() {
            println!(
                "trial={k} size={} density={} seed={} cells={} mismatches={} trial_ms={}",
                t.size,
                t.density,
                t.seed,
                t.cells,
                t.mismatches.len(),
                t.millis
            );
        }
        for m in &t.mismatches {
            println!(
                "mismatch trial={k} cell={},{} fast={} oracle={}",
                m.cell.row, m.cell.col, m.fast, m.oracle
            );
        }
        if !t.mismatches.is_empty() {
            print!("{}", t.config.to_text());
        }
    }
    println!("cells_checked={cells} mismatches={mismatches}");
    if mismatches > 0 {
        return Err(exit(MISMATCH, format!("{mismatches} verdict mismatches")));
    }
    Ok(())
}

fn circuits_cmd(c: CircuitsCommand) -> Result<()> {
    match c {
        CircuitsCommand::VerifyGadgets { rule } => verify_gadgets(&rule),
        CircuitsCommand::Compile {
            netlist,
            inputs,
            simulate,
            rule,
            out,
        } => compile(&netlist, &inputs, simulate, &rule, out.as_deref()),
    }
}

fn verify_gadgets(rule: &str) -> Result<()> {
    let names: Vec<&str> = if rule == "both" {
        vec!["2", "24"]
    } else {
        vec![rule]
    };
    let rules = names
        .iter()
        .map(|n| parse_rule(n, GridKind::Square))
        .collect::<Result<Vec<_>>>()?;
    println!("command=verify-gadgets rule={rule}");
    let gadgets = Gadget::standard_gadgets();
    let mut failures = 0;
    for r in &rules {
        for g in &gadgets {
            let report = circuits::verify_gadget(g, *r)?;
            let times: Vec<String> = report
                .cases
                .iter()
                .map(|c| {
                    let bits: String = c
                        .inputs
                        .iter()
                        .map(|&b| if b { '1' } else { '0' })
                        .collect();
                    let outs: Vec<String> = c
                        .output_times
                        .iter()
                        .map(|t| t.map_or("-".into(), |t| t.to_string()))
                        .collect();
                    format!("{bits}:{}", outs.join("/"))
                })
                .collect();
            println!(
                "gadget={} rule={} pass={} quiescent={} delay={} traces={}",
                g.name,
                r,
                report.pass,
                report.quiescent,
                g.delay,
                times.join(",")
            );
            for f in report.failures() {
                println!(
                    "failure gadget={} rule={} inputs={:?} expected={:?} observed={:?}",
                    g.name, r, f.inputs, f.expected, f.observed
                );
            }
            failures += usize::from(!report.pass);
        }
    }
    println!("failures={failures}");
    if failures > 0 {
        return Err(exit(
            GADGET_FAILURE,
            format!("{failures} gadget verifications failed"),
        ));
    }
    Ok(())
}

fn compile(path: &Path, bits: &str, simulate: bool, rule: &str, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let netlist =
        Netlist::from_json(&text).map_err(|e| exit(PARSE, format!("{}: {e}", path.display())))?;
    let assignment = netlist
        .assignment_from_bits(bits)
        .map_err(|e| exit(1, e.to_string()))?;
    let compiled = circuits::compile(&netlist, &assignment)?;
    let t = compiled.configuration.topology();
    println!(
        "command=compile netlist={} inputs={bits} rows={} cols={} columns={} tiles={} crossings={} time_budget={}",
        path.display(),
        t.rows(),
        t.cols(),
        compiled.columns,
        compiled.tiles,
        compiled.crossings,
        compiled.time_budget
    );
    let mut ports = String::new();
    for (id, c) in &compiled.input_ignition_cells {
        ports.push_str(&format!(
            "input={id} row={} col={} value={}\n",
            c.row,
            c.col,
            u8::from(assignment[id])
        ));
    }
    for (id, c) in &compiled.probe {
        ports.push_str(&format!("probe={id} row={} col={}\n", c.row, c.col));
    }
    print!("{ports}");
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write(&dir.join("circuit.txt"), &compiled.configuration.to_text())?;
        write(&dir.join("ports.txt"), &ports)?;
    }
    if simulate {
        let rule = parse_rule(rule, GridKind::Square)?;
        let run = compiled.simulate(rule)?;
        let expected = circuits::evaluate_netlist(&netlist, &assignment)?;
        for (id, t) in &run.probe_times {
            println!(
                "output={id} probe_stable={} probe_time={} value={} expected={}",
                t.is_none(),
                t.map_or("none".into(), |t| t.to_string()),
                u8::from(t.is_some()),
                u8::from(expected[id])
            );
        }
        let violations = compiled.delay_violations(&run).len();
        println!("rule={rule} delay_violations={violations}");
        if run.outputs != expected || violations > 0 {
            return Err(exit(
                MISMATCH,
                "compiled circuit disagrees with the netlist",
            ));
        }
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let grid: GridKind = a.grid.into();
    let rule = parse_rule(&a.rule, grid)?;
    if !(0.0..=1.0).contains(&a.density) {
        return Err(exit(1, "density must lie in [0, 1]"));
    }
    println!(
        "command=bench grid={} rule={} density={} seed={}",
        grid.tag(),
        rule,
        a.density,
        a.seed
    );
    for &n in &a.sizes {
        let c = Configuration::random(topology(grid, n)?, a.density, a.seed);
        let t = c.topology();
        let started = Instant::now();
        let traj = engine::run_to_fixed_point(rule, &c)?;
        let oracle = started.elapsed();
        let center = Cell::new(t.rows() / 2, t.cols() / 2);
        let query = (0..t.cell_count())
            .map(|i| t.cell((t.index(center) + i) % t.cell_count()))
            .find(|&u| !c.get(u));
        let single = query
            .map(|u| {
                let started = Instant::now();
                deciders::decide(rule, &c, u).map(|v| (started.elapsed(), v))
            })
            .transpose()?;
        let started = Instant::now();
        let all = deciders::decide_all(rule, &c)?;
        let all_time = started.elapsed();
        let agree = all.iter().enumerate().all(|(i, v)| {
            v.is_none_or(|v| traj.verdict(t.cell(i)).is_ok_and(|o| o.agrees_with(&v)))
        });
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        println!(
            "size={n} cells={} oracle_ms={:.3} single_ms={} all_ms={:.3} speedup_all={:.2} method={} agree={agree}",
            t.cell_count(),
            ms(oracle),
            single.map_or("none".into(), |(d, _)| format!("{:.3}", ms(d))),
            ms(all_time),
            ms(oracle) / ms(all_time).max(1e-9),
            single.map_or("none".into(), |(_, v)| v.method.to_string()),
        );
        if !agree {
            return Err(exit(MISMATCH, "fast verdicts disagree with simulation"));
        }
    }
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let text =
        fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let c = Configuration::parse(&text)
        .map_err(|e| exit(PARSE, format!("{}: {e}", a.input.display())))?
        .configuration;
    write(&a.out, &c.to_pbm())
}
