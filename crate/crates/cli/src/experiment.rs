//! Batch convergence experiments over families of graphs.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use schelling::graph::{moore_torus, random_regular};
use schelling::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Topology {
    MooreTorus,
    RandomRegular,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::MooreTorus => "moore_torus",
            Topology::RandomRegular => "random_regular",
        }
    }

    /// Graph with `side * side` nodes. Random-regular graphs use a seed
    /// derived from `seed` and `side`, so every trial of a config shares one
    /// graph.
    pub fn graph(self, side: usize, degree: usize, seed: u64) -> Result<Graph> {
        Ok(match self {
            Topology::MooreTorus => {
                if degree != 8 {
                    bail!("moore torus is 8-regular, got degree {degree}");
                }
                moore_torus(side, side)?
            }
            Topology::RandomRegular => random_regular(side * side, degree, graph_seed(seed, side))?,
        })
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "moore" | "moore_torus" | "torus" => Ok(Topology::MooreTorus),
            "random-regular" | "random_regular" => Ok(Topology::RandomRegular),
            _ => Err(format!("unknown topology {s:?}")),
        }
    }
}

fn graph_seed(seed: u64, side: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (side as u64).wrapping_add(0xD1B5_4A32_D192_ED03)
}

pub fn mode_name(mode: MoveMode) -> &'static str {
    match mode {
        MoveMode::Swap => "swap",
        MoveMode::Jump => "jump",
    }
}

pub fn aggregation_name(agg: Aggregation) -> &'static str {
    match agg {
        Aggregation::OneVsAll => "all",
        Aggregation::OneVsOne => "one",
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub topology: Topology,
    /// Side lengths; each graph has `side * side` nodes.
    pub sides: Vec<usize>,
    pub degree: usize,
    pub tau: Tau,
    pub k: usize,
    pub mode: MoveMode,
    pub aggregation: Aggregation,
    pub trials: usize,
    pub base_seed: u64,
    /// Fraction of empty nodes, jump mode only.
    pub vacancy: f64,
    pub max_steps: Option<usize>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.sides.is_empty() {
            bail!("no sizes given");
        }
        if self.k == 0 {
            bail!("k must be at least 1");
        }
        match self.mode {
            MoveMode::Jump if !(self.vacancy > 0.0 && self.vacancy < 1.0) => {
                bail!("jump mode needs a vacancy fraction in (0,1), got {}", self.vacancy)
            }
            MoveMode::Swap if self.vacancy != 0.0 => bail!("swap mode takes no vacancies"),
            _ => Ok(()),
        }
    }
}

/// Number of empty nodes among `n`, rounded to nearest.
pub fn vacancies(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

/// `agents` split into `k` near-equal counts, remainder to the lowest types.
pub fn equal_split(agents: usize, k: usize) -> Vec<usize> {
    (0..k).map(|t| agents / k + usize::from(t < agents % k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRow {
    pub topology: Topology,
    pub n: usize,
    pub m: usize,
    pub tau: Tau,
    pub k: usize,
    pub mode: MoveMode,
    pub aggregation: Aggregation,
    pub seed: u64,
    pub moves: usize,
    pub rounds: usize,
    pub verdict: String,
}

pub const CSV_HEADER: &str = "topology,n,m,tau,k,mode,aggregation,seed,moves,rounds,verdict";

impl ExperimentRow {
    fn sort_key(&self) -> (Topology, &'static str, usize, u64) {
        (self.topology, mode_name(self.mode), self.n, self.seed)
    }

    pub fn converged(&self) -> bool {
        self.verdict == "CONVERGED"
    }
}

/// One seeded run: random initial placement on `g`, then IRD with the
/// random first-improvement schedule.
pub fn run_trial(
    g: &Graph,
    types: &TypeAssignment,
    config: GameConfig,
    seed: u64,
    max_steps: Option<usize>,
) -> Result<RunTrace> {
    let p0 = Placement::random(types.agent_count(), g.node_count(), seed)?;
    let game = Game::new(g, types, config);
    Ok(run_ird(&game, &p0, seed, max_steps, &Schedule::RandomFirstImprovement)?)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    let config = GameConfig::new(spec.tau, spec.mode, spec.aggregation);
    let mut rows = Vec::new();
    for &side in &spec.sides {
        let g = spec.topology.graph(side, spec.degree, spec.base_seed)?;
        let n = g.node_count();
        let agents = match spec.mode {
            MoveMode::Swap => n,
            MoveMode::Jump => n - vacancies(n, spec.vacancy),
        };
        let types = TypeAssignment::from_counts(&equal_split(agents, spec.k))?;
        let batch: Vec<ExperimentRow> = (0..spec.trials as u64)
            .into_par_iter()
            .map(|i| {
                let seed = spec.base_seed.wrapping_add(i);
                let trace = run_trial(&g, &types, config, seed, spec.max_steps)?;
                Ok(ExperimentRow {
                    topology: spec.topology,
                    n,
                    m: g.edge_count(),
                    tau: spec.tau,
                    k: spec.k,
                    mode: spec.mode,
                    aggregation: spec.aggregation,
                    seed,
                    moves: trace.steps(),
                    rounds: trace.rounds,
                    verdict: trace.verdict.to_string(),
                })
            })
            .collect::<Result<_>>()?;
        rows.extend(batch);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

pub fn sort_rows(rows: &mut [ExperimentRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.topology,
            r.n,
            r.m,
            r.tau,
            r.k,
            mode_name(r.mode),
            aggregation_name(r.aggregation),
            r.seed,
            r.moves,
            r.rounds,
            r.verdict
        ));
    }
    out
}

pub fn parse_rows_csv(text: &str) -> Result<Vec<ExperimentRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((_, h)) => bail!("unexpected header {h:?}"),
        None => return Ok(Vec::new()),
    }
    lines.map(|(i, line)| parse_row(line).with_context(|| format!("line {}", i + 1))).collect()
}

fn parse_row(line: &str) -> Result<ExperimentRow> {
    let f: Vec<&str> = line.trim().split(',').collect();
    if f.len() != 11 {
        bail!("expected 11 fields, got {}", f.len());
    }
    let mode = match f[5] {
        "swap" => MoveMode::Swap,
        "jump" => MoveMode::Jump,
        other => bail!("unknown mode {other:?}"),
    };
    let aggregation = match f[6] {
        "all" => Aggregation::OneVsAll,
        "one" => Aggregation::OneVsOne,
        other => bail!("unknown aggregation {other:?}"),
    };
    Ok(ExperimentRow {
        topology: f[0].parse().map_err(anyhow::Error::msg)?,
        n: f[1].parse()?,
        m: f[2].parse()?,
        tau: f[3].parse()?,
        k: f[4].parse()?,
        mode,
        aggregation,
        seed: f[7].parse()?,
        moves: f[8].parse()?,
        rounds: f[9].parse()?,
        verdict: f[10].to_string(),
    })
}

/// Aggregate over the trials of one (topology, mode, size) config.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSummary {
    pub topology: Topology,
    pub mode: MoveMode,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub converged: usize,
    pub mean_moves: f64,
    pub max_moves: usize,
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<ConfigSummary> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut out: Vec<ConfigSummary> = Vec::new();
    for r in &sorted {
        match out.last_mut() {
            Some(s) if (s.topology, s.mode, s.n) == (r.topology, r.mode, r.n) => {
                s.trials += 1;
                s.converged += usize::from(r.converged());
                s.mean_moves += r.moves as f64;
                s.max_moves = s.max_moves.max(r.moves);
            }
            _ => out.push(ConfigSummary {
                topology: r.topology,
                mode: r.mode,
                n: r.n,
                m: r.m,
                trials: 1,
                converged: usize::from(r.converged()),
                mean_moves: r.moves as f64,
                max_moves: r.moves,
            }),
        }
    }
    for s in &mut out {
        s.mean_moves /= s.trials as f64;
    }
    out
}

/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl LinearFit {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares; `None` with fewer than two distinct x values.
pub fn fit_line(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept, r2 })
}

/// Fit of mean moves against m for each (topology, mode) series.
pub fn fit_series(summaries: &[ConfigSummary]) -> Vec<((Topology, MoveMode), Option<LinearFit>)> {
    let mut keys: Vec<(Topology, MoveMode)> = summaries.iter().map(|s| (s.topology, s.mode)).collect();
    keys.dedup();
    keys.into_iter()
        .map(|key| {
            let pts: Vec<(f64, f64)> =
                summaries.iter().filter(|s| (s.topology, s.mode) == key).map(|s| (s.m as f64, s.mean_moves)).collect();
            (key, fit_line(&pts))
        })
        .collect()
}

/// Per mode, the sizes where both topologies were run, with whether the
/// random-regular mean lies below the torus mean.
pub fn regular_below_torus(summaries: &[ConfigSummary]) -> Vec<(MoveMode, usize, bool)> {
    let mut out = Vec::new();
    for s in summaries.iter().filter(|s| s.topology == Topology::RandomRegular) {
        if let Some(t) = summaries.iter().find(|t| t.topology == Topology::MooreTorus && t.mode == s.mode && t.m == s.m)
        {
            out.push((s.mode, s.m, s.mean_moves < t.mean_moves));
        }
    }
    out
}

pub fn summary_text(rows: &[ExperimentRow]) -> String {
    let summaries = summarize(rows);
    let mut out = String::from("topology,mode,n,m,trials,converged,mean_moves,max_moves\n");
    for s in &summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.2},{}\n",
            s.topology,
            mode_name(s.mode),
            s.n,
            s.m,
            s.trials,
            s.converged,
            s.mean_moves,
            s.max_moves
        ));
    }
    for ((topology, mode), fit) in fit_series(&summaries) {
        match fit {
            Some(f) => out.push_str(&format!(
                "fit {topology} {}: moves = {:.4} * m + {:.2}, R^2 = {:.4}\n",
                mode_name(mode),
                f.slope,
                f.intercept,
                f.r2
            )),
            None => out.push_str(&format!("fit {topology} {}: not enough sizes\n", mode_name(mode))),
        }
    }
    for (mode, m, below) in regular_below_torus(&summaries) {
        out.push_str(&format!(
            "m = {m} {}: random_regular mean {} torus mean\n",
            mode_name(mode),
            if below { "below" } else { "not below" }
        ));
    }
    out
}
