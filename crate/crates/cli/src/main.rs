use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use schelling::counterexamples::{build_opt_not_stable, verify_scripted_cycle};
use schelling::dynamics::parse_trace_csv;
use schelling::graph::{ring_union, write_edge_list, Connectivity};
use schelling::model::write_placement_file;
use schelling::optimal::{brute_force_optimal, describe, two_type_2regular_optimal, OptimalError};
use schelling::potential::{check_monotone, jsg_edge_potential, ssg_potential, EdgeWeightScheme};
use schelling::*;
use schelling_cli::experiment::{self, ExperimentSpec, Topology};
use schelling_cli::instance::{self, GraphSpec, Instance};
use schelling_cli::plot;

#[derive(Parser)]
#[command(name = "schelling", version, about = "Schelling games on graphs: dynamics, cycles and optimal placements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run improving response dynamics once.
    Simulate(SimulateArgs),
    /// Batch convergence experiment, one CSV row per trial.
    Experiment(ExperimentArgs),
    /// Check a scripted cycle construction or the potential along a trace.
    Verify(VerifyArgs),
    /// Minimum number of discontent agents.
    Optimal(OptimalArgs),
    /// SVG scatter of moves against m from an experiment CSV.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Swap,
    Jump,
}

impl From<ModeArg> for MoveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Swap => MoveMode::Swap,
            ModeArg::Jump => MoveMode::Jump,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AggArg {
    All,
    One,
}

impl From<AggArg> for Aggregation {
    fn from(a: AggArg) -> Self {
        match a {
            AggArg::All => Aggregation::OneVsAll,
            AggArg::One => Aggregation::OneVsOne,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Random,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum PotentialArg {
    Ssg,
    Jsg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Moore,
    RandomRegular,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::Moore => Topology::MooreTorus,
            TopologyArg::RandomRegular => Topology::RandomRegular,
        }
    }
}

fn parse_tau(s: &str) -> Result<Tau, String> {
    s.parse().map_err(|e: ModelError| e.to_string())
}

fn parse_ratio(s: &str) -> Result<Rational, String> {
    let (n, d) = s.split_once('/').ok_or_else(|| format!("expected num/den, got {s:?}"))?;
    let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: i64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if d == 0 {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(n, d))
}

#[derive(Args)]
struct GameArgs {
    /// Intolerance threshold as num/den.
    #[arg(long, value_parser = parse_tau)]
    tau: Option<Tau>,
    /// Move type; defaults to swap, or to the construction's own mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "all")]
    aggregation: AggArg,
}

/// Where the graph and starting placement come from.
#[derive(Args)]
struct InstanceArgs {
    /// Named cycle construction.
    #[arg(long, conflicts_with_all = ["graph", "topology"])]
    counterexample: Option<String>,
    /// Size parameter of the construction.
    #[arg(long)]
    x: Option<usize>,
    /// Degree for jsg-regular.
    #[arg(long)]
    delta: Option<usize>,
    /// Edge list file.
    #[arg(long, requires = "placement", conflicts_with = "topology")]
    graph: Option<PathBuf>,
    /// Placement file.
    #[arg(long, requires = "graph")]
    placement: Option<PathBuf>,
    /// Random graph family.
    #[arg(long, value_enum)]
    topology: Option<TopologyArg>,
    #[arg(long, default_value_t = 20)]
    rows: usize,
    #[arg(long, default_value_t = 20)]
    cols: usize,
    #[arg(long, default_value_t = 400)]
    nodes: usize,
    #[arg(long, default_value_t = 8)]
    degree: usize,
    /// Number of agent types in random instances.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Fraction of empty nodes in random jump instances.
    #[arg(long, default_value_t = 0.06)]
    vacancy: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "random")]
    schedule: ScheduleArg,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Adds a potential column to the trace.
    #[arg(long, value_enum)]
    potential: Option<PotentialArg>,
    /// Weight of half-empty edges for the jsg potential, num/den.
    #[arg(long, value_parser = parse_ratio)]
    c: Option<Rational>,
    /// Trace CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final placement output.
    #[arg(long)]
    final_placement: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Construction to check: one of the cycle constructions or opt-not-stable.
    #[arg(long, conflicts_with_all = ["potential", "trace"])]
    construction: Option<String>,
    /// Potential to check along a trace.
    #[arg(long, value_enum, requires = "trace")]
    potential: Option<PotentialArg>,
    /// Trace CSV as written by simulate.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_parser = parse_ratio)]
    c: Option<Rational>,
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Per-step report CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Writes PREFIX.edges and PREFIX.placement for the construction.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Args)]
struct OptimalArgs {
    /// Ring sizes of a two-type 2-regular instance.
    #[arg(long, value_delimiter = ',', conflicts_with = "graph")]
    rings: Vec<usize>,
    /// Agents of type 0 on the rings.
    #[arg(long)]
    n1: Option<usize>,
    /// Agents of type 1; defaults to filling the rings.
    #[arg(long)]
    n2: Option<usize>,
    /// Also run brute force and compare.
    #[arg(long)]
    cross_check: bool,
    #[arg(long, requires = "placement")]
    graph: Option<PathBuf>,
    /// Placement file; only its type assignment is used.
    #[arg(long)]
    placement: Option<PathBuf>,
    /// Visit a placement and its colour flip once when two types have equal counts.
    #[arg(long)]
    symmetry: bool,
    #[command(flatten)]
    game: GameArgs,
    /// Optimal placement output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "moore")]
    topology: Vec<TopologyArg>,
    /// Side lengths; a size s gives s*s nodes.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    degree: usize,
    #[arg(long, value_parser = parse_tau)]
    tau: Tau,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "swap")]
    mode: Vec<ModeArg>,
    #[arg(long, value_enum, default_value = "all")]
    aggregation: AggArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of empty nodes in jump mode, rounded to the nearest node count.
    #[arg(long, default_value_t = 0.06)]
    vacancy: f64,
    #[arg(long)]
    max_steps: Option<usize>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot output.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Experiment CSV.
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ArgumentConflict, msg).exit()
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn require_tau(tau: Option<Tau>) -> Tau {
    tau.unwrap_or_else(|| Cli::command().error(ErrorKind::MissingRequiredArgument, "--tau is required").exit())
}

fn load_instance(game: &GameArgs, args: &InstanceArgs) -> Result<Instance> {
    if let Some(name) = &args.counterexample {
        let inst: Instance = instance::build_construction(name, game.tau, args.x, args.delta)?.into();
        if let Some(m) = game.mode {
            if MoveMode::from(m) != inst.config.mode {
                usage_error(format!("construction {name} has fixed mode"));
            }
        }
        return Ok(inst);
    }
    let mode = game.mode.map_or(MoveMode::Swap, MoveMode::from);
    let config = GameConfig::new(require_tau(game.tau), mode, game.aggregation.into());
    if let (Some(g), Some(p)) = (&args.graph, &args.placement) {
        return instance::from_files(g, p, config);
    }
    let spec = match args.topology {
        Some(TopologyArg::Moore) => GraphSpec::Torus { rows: args.rows, cols: args.cols },
        Some(TopologyArg::RandomRegular) => GraphSpec::RandomRegular { nodes: args.nodes, degree: args.degree },
        None => usage_error("give --counterexample, --graph with --placement, or --topology"),
    };
    instance::random_instance(spec, args.k, args.vacancy, args.seed, config)
}

fn scheme_for(c: Option<Rational>, graph: &Graph) -> Result<EdgeWeightScheme> {
    let delta = graph.max_degree();
    Ok(match c {
        Some(c) => EdgeWeightScheme::new(c, delta)?,
        None => EdgeWeightScheme::default_for(delta),
    })
}

type PotentialFn<'a> = Box<dyn Fn(&Placement) -> Result<Rational> + 'a>;

/// The potential and the least drop it must show per move.
fn potential_fn(which: PotentialArg, inst: &Instance, c: Option<Rational>) -> Result<(PotentialFn<'_>, Rational)> {
    Ok(match which {
        PotentialArg::Ssg => {
            (Box::new(|p: &Placement| Ok(ssg_potential(&inst.graph, &inst.types, p)?)), Rational::from_integer(1))
        }
        PotentialArg::Jsg => {
            let scheme = scheme_for(c, &inst.graph)?;
            (
                Box::new(move |p: &Placement| Ok(jsg_edge_potential(&inst.graph, &inst.types, p, scheme)?)),
                scheme.min_jump_decrement(),
            )
        }
    })
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.game, &args.instance)?;
    let game = inst.game();
    let schedule = match args.schedule {
        ScheduleArg::Random => Schedule::RandomFirstImprovement,
        ScheduleArg::Canonical => Schedule::CanonicalFirst,
    };
    let trace = run_ird(&game, &inst.initial, args.instance.seed, args.max_steps, &schedule)?;
    println!("verdict {}", trace.verdict);
    if let Verdict::CycleDetected { first_repeat_index } = trace.verdict {
        println!("first repeat after {first_repeat_index} moves");
    }
    println!("steps {}", trace.steps());
    println!("rounds {}", trace.rounds);
    println!("initial cost {}", game.placement_cost(&inst.initial));
    println!("final cost {}", game.placement_cost(&trace.final_placement));
    if let Some(out) = &args.out {
        let values = match args.potential {
            Some(which) => {
                let (f, _) = potential_fn(which, &inst, args.c)?;
                Some(trace.map_states(|p| f(p))?.into_iter().collect::<Result<Vec<_>>>()?)
            }
            None => None,
        };
        write(out, &trace.to_csv(values.as_deref()))?;
    }
    if let Some(out) = &args.final_placement {
        write(out, &write_placement_file(&inst.types, &trace.final_placement))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    if let Some(name) = &args.construction {
        if name == "opt-not-stable" {
            return verify_opt_not_stable(&args);
        }
        let inst = instance::build_construction(name, args.game.tau, args.instance.x, args.instance.delta)?;
        if let Some(prefix) = &args.export {
            let (edges, placement) = inst.export();
            write(&prefix.with_extension("edges"), &edges)?;
            write(&prefix.with_extension("placement"), &placement)?;
        }
        let report = verify_scripted_cycle(&inst);
        print!("{}", report.to_text());
        if let Some(out) = &args.out {
            write(out, &report.to_csv())?;
        }
        return Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }
    let (Some(which), Some(trace_path)) = (args.potential, &args.trace) else {
        usage_error("give --construction, or --potential with --trace");
    };
    let inst = load_instance(&args.game, &args.instance)?;
    let text = fs::read_to_string(trace_path).with_context(|| format!("reading {}", trace_path.display()))?;
    let script = parse_trace_csv(&text)?;
    let trace = run_ird(&inst.game(), &inst.initial, 0, None, &Schedule::Scripted(script))?;
    let (f, bound) = potential_fn(which, &inst, args.c)?;
    let mut failure = None;
    let report = check_monotone(&trace, |p| {
        f(p).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            Rational::from_integer(0)
        })
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let min = report.min_decrement.map_or("none".to_string(), |d| d.to_string());
    println!("moves {}", trace.steps());
    println!("monotone {}", report.monotone);
    if let Some(step) = report.violation_step {
        println!("violation at move {step}");
    }
    println!("min decrement {min} (bound {bound})");
    let ok = report.monotone && report.min_decrement.is_none_or(|d| d >= bound);
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn verify_opt_not_stable(args: &VerifyArgs) -> Result<ExitCode> {
    let inst = build_opt_not_stable();
    if let Some(prefix) = &args.export {
        write(&prefix.with_extension("edges"), &write_edge_list(&inst.graph))?;
        write(&prefix.with_extension("placement"), &write_placement_file(&inst.types, &inst.optimal))?;
    }
    let game = inst.game();
    let opt = brute_force_optimal(&inst.graph, &inst.types, inst.config, false)?;
    let swap = MoveKind::Swap(inst.a, inst.b);
    let improving = improving_swaps(&game, &opt.placement).iter().any(|m| m.kind == swap)
        && improving_swaps(&game, &inst.optimal).iter().any(|m| m.kind == swap);
    let checks = [
        ("brute-force optimum is 7", opt.cost == 7),
        ("constructed placement costs 7", game.placement_cost(&inst.optimal) == 7),
        ("after the swap the cost is 8", game.placement_cost(&inst.after_swap) == 8),
        ("optimum is not stable", !is_stable(&game, &opt.placement)),
        ("the swap of a and b is improving", improving),
    ];
    for (what, ok) in checks {
        println!("{} {what}", if ok { "ok  " } else { "FAIL" });
    }
    let ok = checks.iter().all(|c| c.1);
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn optimal(args: OptimalArgs) -> Result<ExitCode> {
    let tau = require_tau(args.game.tau);
    let mode = args.game.mode.map_or(MoveMode::Swap, MoveMode::from);
    let config = GameConfig::new(tau, mode, args.game.aggregation.into());
    let (result, graph, types) = if !args.rings.is_empty() {
        let total: usize = args.rings.iter().sum();
        let Some(n1) = args.n1 else { usage_error("--rings needs --n1") };
        let n2 = args.n2.unwrap_or(total.saturating_sub(n1));
        let result = two_type_2regular_optimal(&args.rings, n1, n2, tau)?;
        let graph = ring_union(&args.rings)?;
        let types = TypeAssignment::from_counts(&[n1, n2])?;
        (result, graph, types)
    } else if let (Some(g), Some(p)) = (&args.graph, &args.placement) {
        let graph = instance::read_graph(g, Connectivity::Allowed)?;
        let types = instance::read_types(p)?;
        let result = brute_force_optimal(&graph, &types, config, args.symmetry)?;
        (result, graph, types)
    } else {
        usage_error("give --rings with --n1, or --graph with --placement");
    };
    print!("{}", describe(&result));
    let mut ok = true;
    if args.cross_check {
        // rings: the subset-sum result against brute force; files: brute
        // force with the symmetry reduction toggled
        let (config, symmetry) = if args.rings.is_empty() {
            (config, !args.symmetry)
        } else {
            (GameConfig::new(tau, MoveMode::Swap, Aggregation::OneVsAll), args.symmetry)
        };
        let other = brute_force_optimal(&graph, &types, config, symmetry)?;
        ok = other.cost == result.cost;
        println!("cross-check {} {}", other.summary(), if ok { "agrees" } else { "DISAGREES" });
    }
    if let Some(out) = &args.out {
        write(out, &write_placement_file(&types, &result.placement))?;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run_experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let mut rows = Vec::new();
    for &topology in &args.topology {
        for &mode in &args.mode {
            let mode = MoveMode::from(mode);
            let spec = ExperimentSpec {
                topology: topology.into(),
                sides: args.sizes.clone(),
                degree: args.degree,
                tau: args.tau,
                k: args.k,
                mode,
                aggregation: args.aggregation.into(),
                trials: args.trials,
                base_seed: args.seed,
                vacancy: if mode == MoveMode::Jump { args.vacancy } else { 0.0 },
                max_steps: args.max_steps,
            };
            rows.extend(experiment::run_experiment(&spec)?);
        }
    }
    experiment::sort_rows(&mut rows);
    let csv = experiment::rows_to_csv(&rows);
    let summary = experiment::summary_text(&rows);
    match &args.out {
        Some(out) => {
            write(out, &csv)?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    if let Some(svg) = &args.plot {
        write(svg, &plot::render_svg(&rows)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_plot(args: PlotArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.csv).with_context(|| format!("reading {}", args.csv.display()))?;
    let rows = experiment::parse_rows_csv(&text)?;
    write(&args.out, &plot::render_svg(&rows)?)?;
    for s in plot::series(&rows) {
        match s.fit {
            Some((slope, icept)) => {
                println!("{}: {} points, moves = {slope:.4} * m + {icept:.2}", s.label, s.points.len())
            }
            None => println!("{}: {} points, no fit", s.label, s.points.len()),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Experiment(a) => run_experiment(a),
        Command::Verify(a) => verify(a),
        Command::Optimal(a) => optimal(a),
        Command::Plot(a) => run_plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<OptimalError>() {
                Some(OptimalError::TooLarge { .. }) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
