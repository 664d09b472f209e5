//! Building game instances from named constructions, files or random draws.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use schelling::counterexamples::*;
use schelling::graph::{moore_torus, parse_edge_list, random_regular, Connectivity};
use schelling::model::parse_placement_file;
use schelling::*;

use crate::experiment::{equal_split, vacancies};

/// Named scripted-cycle constructions.
pub const CONSTRUCTIONS: [&str; 6] = ["ssg-k2", "ssg-1k", "ssg-11", "ssg-11-regular", "jsg-regular", "jsg-arbitrary"];

pub const DEFAULT_DELTA: usize = 3;

/// A value of tau inside the construction's admissible range.
pub fn default_tau(name: &str) -> Option<Tau> {
    let (n, d) = match name {
        "ssg-k2" => (3, 5),
        "ssg-1k" | "ssg-11" | "ssg-11-regular" | "jsg-arbitrary" => (1, 2),
        "jsg-regular" => (7, 10),
        _ => return None,
    };
    Tau::from_fraction(n, d).ok()
}

pub fn build_construction(
    name: &str,
    tau: Option<Tau>,
    x: Option<usize>,
    delta: Option<usize>,
) -> Result<ScriptedInstance> {
    let tau = match tau.or_else(|| default_tau(name)) {
        Some(t) => t,
        None => bail!("unknown construction {name:?}; expected one of {}", CONSTRUCTIONS.join(", ")),
    };
    if delta.is_some() && name != "jsg-regular" {
        bail!("--delta only applies to jsg-regular");
    }
    let inst = match name {
        "ssg-k2" => build_ssg_k2_irc(tau, x),
        "ssg-1k" => build_1k_ssg_irc(tau, x),
        "ssg-11" => build_11_ssg_irc(tau, x),
        "ssg-11-regular" => build_11_ssg_regular_irc(tau, x),
        "jsg-arbitrary" => build_jsg_arbitrary_irc(tau, x),
        "jsg-regular" => {
            if x.is_some() {
                bail!("jsg-regular takes --delta, not --x");
            }
            build_jsg_regular_irc(delta.unwrap_or(DEFAULT_DELTA), tau)
        }
        _ => unreachable!("default_tau covers the names"),
    };
    Ok(inst?)
}

/// Graph, types and a starting placement under one game configuration.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub types: TypeAssignment,
    pub initial: Placement,
    pub config: GameConfig,
}

impl Instance {
    pub fn game(&self) -> Game<'_> {
        Game::new(&self.graph, &self.types, self.config)
    }
}

impl From<ScriptedInstance> for Instance {
    fn from(s: ScriptedInstance) -> Self {
        Instance { graph: s.graph, types: s.types, initial: s.initial, config: s.config }
    }
}

pub fn read_graph(path: &Path, connectivity: Connectivity) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_edge_list(&text, connectivity).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_types(path: &Path) -> Result<TypeAssignment> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_placement_file(&text).with_context(|| format!("parsing {}", path.display()))?.types)
}

pub fn from_files(graph: &Path, placement: &Path, config: GameConfig) -> Result<Instance> {
    let g = read_graph(graph, Connectivity::Required)?;
    let text = fs::read_to_string(placement).with_context(|| format!("reading {}", placement.display()))?;
    let (types, initial) = parse_placement_file(&text)
        .and_then(|pf| pf.into_placement(g.node_count()))
        .with_context(|| format!("parsing {}", placement.display()))?;
    initial.validate(&g, &types, config.mode)?;
    Ok(Instance { graph: g, types, initial, config })
}

/// How to draw a random graph for a single run.
#[derive(Debug, Clone, Copy)]
pub enum GraphSpec {
    Torus { rows: usize, cols: usize },
    RandomRegular { nodes: usize, degree: usize },
}

impl GraphSpec {
    pub fn build(self, seed: u64) -> Result<Graph> {
        Ok(match self {
            GraphSpec::Torus { rows, cols } => moore_torus(rows, cols)?,
            GraphSpec::RandomRegular { nodes, degree } => random_regular(nodes, degree, seed)?,
        })
    }
}

/// Random instance: `k` near-equal types, and in jump mode `vacancy` of the
/// nodes left empty (at least one).
pub fn random_instance(spec: GraphSpec, k: usize, vacancy: f64, seed: u64, config: GameConfig) -> Result<Instance> {
    let graph = spec.build(seed)?;
    let n = graph.node_count();
    let agents = match config.mode {
        MoveMode::Swap => n,
        MoveMode::Jump => {
            if !(vacancy > 0.0 && vacancy < 1.0) {
                bail!("jump mode needs a vacancy fraction in (0,1)");
            }
            n - vacancies(n, vacancy).max(1)
        }
    };
    let types = TypeAssignment::from_counts(&equal_split(agents, k))?;
    let initial = Placement::random(agents, n, seed)?;
    Ok(Instance { graph, types, initial, config })
}
