//! Static semantics of the game: agent types, placements and the cost
//! function. All contentment decisions are made with exact rationals.

use std::cmp::Ordering;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

pub type AgentId = usize;
pub type TypeId = usize;
pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("tau must be a fraction strictly between 0 and 1, got {0}")]
    InvalidTau(String),
    #[error("type {0} has no agents")]
    EmptyType(TypeId),
    #[error("no agents")]
    NoAgents,
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("agents {0} and {1} share node {2}")]
    NotInjective(AgentId, AgentId, NodeId),
    #[error("swap games need every node occupied ({agents} agents on {nodes} nodes)")]
    SwapNeedsFullOccupancy { agents: usize, nodes: usize },
    #[error("jump games need at least one empty node ({agents} agents on {nodes} nodes)")]
    JumpNeedsVacancy { agents: usize, nodes: usize },
    #[error("placement has {placed} agents but the type assignment has {expected}")]
    AgentCountMismatch { placed: usize, expected: usize },
    #[error("agent {0} is not placed")]
    Unplaced(AgentId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Intolerance threshold, an exact fraction in the open unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tau(Rational);

impl Tau {
    pub fn new(value: Rational) -> Result<Self, ModelError> {
        if value > Rational::zero() && value < Rational::one() {
            Ok(Tau(value))
        } else {
            Err(ModelError::InvalidTau(value.to_string()))
        }
    }

    pub fn from_fraction(num: i64, den: i64) -> Result<Self, ModelError> {
        if den == 0 {
            return Err(ModelError::InvalidTau(format!("{num}/{den}")));
        }
        Self::new(Rational::new(num, den))
    }

    pub fn value(self) -> Rational {
        self.0
    }
}

impl FromStr for Tau {
    type Err = ModelError;

    /// Accepts `num/den` only, so no float ever enters a contentment test.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidTau(s.to_string());
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        Self::from_fraction(n, d)
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveMode {
    Swap,
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    OneVsAll,
    OneVsOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameConfig {
    pub tau: Tau,
    pub mode: MoveMode,
    pub aggregation: Aggregation,
}

impl GameConfig {
    pub fn new(tau: Tau, mode: MoveMode, aggregation: Aggregation) -> Self {
        Self { tau, mode, aggregation }
    }
}

/// Partition of agents `0..n` into non-empty types `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeAssignment {
    type_of: Vec<TypeId>,
    counts: Vec<usize>,
}

impl TypeAssignment {
    pub fn new(type_of: Vec<TypeId>) -> Result<Self, ModelError> {
        let k = type_of.iter().max().map(|&t| t + 1).ok_or(ModelError::NoAgents)?;
        let mut counts = vec![0; k];
        for &t in &type_of {
            counts[t] += 1;
        }
        if let Some(t) = counts.iter().position(|&c| c == 0) {
            return Err(ModelError::EmptyType(t));
        }
        Ok(Self { type_of, counts })
    }

    /// Agents numbered consecutively, type by type.
    pub fn from_counts(counts: &[usize]) -> Result<Self, ModelError> {
        Self::new(counts.iter().enumerate().flat_map(|(t, &c)| std::iter::repeat_n(t, c)).collect())
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn agent_count(&self) -> usize {
        self.type_of.len()
    }

    pub fn type_of(&self, a: AgentId) -> TypeId {
        self.type_of[a]
    }

    pub fn types(&self) -> &[TypeId] {
        &self.type_of
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
}

/// Injective agent-to-node map with its inverse kept in sync.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    node_of: Vec<NodeId>,
    occupant: Vec<Option<AgentId>>,
}

impl Placement {
    pub fn new(node_of: Vec<NodeId>, node_count: usize) -> Result<Self, ModelError> {
        let mut occupant = vec![None; node_count];
        for (a, &v) in node_of.iter().enumerate() {
            if v >= node_count {
                return Err(ModelError::NodeOutOfRange { node: v, n: node_count });
            }
            if let Some(b) = occupant[v] {
                return Err(ModelError::NotInjective(b, a, v));
            }
            occupant[v] = Some(a);
        }
        Ok(Self { node_of, occupant })
    }

    pub fn agent_count(&self) -> usize {
        self.node_of.len()
    }

    pub fn node_count(&self) -> usize {
        self.occupant.len()
    }

    pub fn node_of(&self, a: AgentId) -> NodeId {
        self.node_of[a]
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.node_of
    }

    pub fn occupant(&self, v: NodeId) -> Option<AgentId> {
        self.occupant[v]
    }

    pub fn is_empty(&self, v: NodeId) -> bool {
        self.occupant[v].is_none()
    }

    pub fn vacancy_count(&self) -> usize {
        self.node_count() - self.agent_count()
    }

    pub fn empty_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.occupant.iter().enumerate().filter(|(_, o)| o.is_none()).map(|(v, _)| v)
    }

    /// Checks this placement against the game it is meant for.
    pub fn validate(&self, graph: &Graph, types: &TypeAssignment, mode: MoveMode) -> Result<(), ModelError> {
        let (agents, nodes) = (self.agent_count(), graph.node_count());
        if agents != types.agent_count() {
            return Err(ModelError::AgentCountMismatch { placed: agents, expected: types.agent_count() });
        }
        if self.node_count() != nodes {
            return Err(ModelError::NodeOutOfRange { node: self.node_count(), n: nodes });
        }
        match mode {
            MoveMode::Swap if agents != nodes => Err(ModelError::SwapNeedsFullOccupancy { agents, nodes }),
            MoveMode::Jump if agents >= nodes => Err(ModelError::JumpNeedsVacancy { agents, nodes }),
            _ => Ok(()),
        }
    }

    /// Uniformly random placement of `agents` agents on `node_count` nodes.
    /// Uses a different ChaCha stream from the dynamics, so one seed can
    /// drive both.
    pub fn random(agents: usize, node_count: usize, seed: u64) -> Result<Self, ModelError> {
        if agents > node_count {
            return Err(ModelError::JumpNeedsVacancy { agents, nodes: node_count });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let mut nodes: Vec<NodeId> = (0..node_count).collect();
        nodes.shuffle(&mut rng);
        nodes.truncate(agents);
        Self::new(nodes, node_count)
    }

    pub(crate) fn swap_agents(&mut self, a: AgentId, b: AgentId) {
        let (va, vb) = (self.node_of[a], self.node_of[b]);
        self.node_of.swap(a, b);
        self.occupant[va] = Some(b);
        self.occupant[vb] = Some(a);
    }

    pub(crate) fn relocate(&mut self, a: AgentId, target: NodeId) {
        let old = self.node_of[a];
        self.occupant[old] = None;
        self.occupant[target] = Some(a);
        self.node_of[a] = target;
    }
}

/// Neighbourhood composition seen from one node by an agent of one type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tally {
    pub own: u32,
    pub others_total: u32,
    pub others_max: u32,
}

impl Tally {
    pub fn negative(&self, aggregation: Aggregation) -> u32 {
        match aggregation {
            Aggregation::OneVsAll => self.others_total,
            Aggregation::OneVsOne => self.others_max,
        }
    }

    /// `None` when the agent would be isolated.
    pub fn pnr(&self, aggregation: Aggregation) -> Option<Rational> {
        let den = self.own + self.negative(aggregation);
        (den > 0).then(|| Rational::new(self.own as i64, den as i64))
    }

    pub(crate) fn standing(&self, aggregation: Aggregation, tau: Tau) -> Standing {
        let den = self.own + self.negative(aggregation);
        let tau = tau.value();
        let (tn, td) = (*tau.numer(), *tau.denom());
        if den == 0 {
            return Standing { num: 0, den: 1 };
        }
        let (n, d) = (self.own as i64, den as i64);
        if n * td >= tn * d {
            Standing { num: tn, den: td }
        } else {
            Standing { num: n, den: d }
        }
    }
}

/// `min(pnr, tau)` with isolation counted as zero. Cost is `tau - standing`,
/// so a move strictly improves exactly when the standing strictly rises.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Standing {
    num: i64,
    den: i64,
}

impl Standing {
    pub(crate) fn cost(self, tau: Tau) -> Rational {
        tau.value() - Rational::new(self.num, self.den)
    }

    pub(crate) fn is_content(self, tau: Tau) -> bool {
        let t = tau.value();
        self.num * *t.denom() == *t.numer() * self.den
    }
}

impl PartialEq for Standing {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Standing {}

impl PartialOrd for Standing {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Standing {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Counts the neighbourhood of `node` for an agent of type `own`, where
/// `occ` reports which type (if any) sits on each node.
pub(crate) fn tally_with<F>(graph: &Graph, k: usize, node: NodeId, own: TypeId, occ: F) -> Tally
where
    F: Fn(NodeId) -> Option<TypeId>,
{
    let mut t = Tally { own: 0, others_total: 0, others_max: 0 };
    const SMALL_K: usize = 16;
    if k <= SMALL_K {
        let mut per = [0u32; SMALL_K];
        for &w in graph.neighbors(node) {
            if let Some(ty) = occ(w) {
                per[ty] += 1;
            }
        }
        for (ty, &c) in per.iter().enumerate().take(k) {
            if ty == own {
                t.own = c;
            } else {
                t.others_total += c;
                t.others_max = t.others_max.max(c);
            }
        }
    } else {
        let mut seen: Vec<TypeId> = graph.neighbors(node).iter().filter_map(|&w| occ(w)).collect();
        seen.sort_unstable();
        for run in seen.chunk_by(|a, b| a == b) {
            let c = run.len() as u32;
            if run[0] == own {
                t.own = c;
            } else {
                t.others_total += c;
                t.others_max = t.others_max.max(c);
            }
        }
    }
    t
}

/// A graph, a type partition and a configuration: everything needed to
/// evaluate costs for any placement.
#[derive(Debug, Clone, Copy)]
pub struct Game<'a> {
    pub graph: &'a Graph,
    pub types: &'a TypeAssignment,
    pub config: GameConfig,
}

impl<'a> Game<'a> {
    pub fn new(graph: &'a Graph, types: &'a TypeAssignment, config: GameConfig) -> Self {
        Self { graph, types, config }
    }

    pub fn tau(&self) -> Tau {
        self.config.tau
    }

    pub fn tally(&self, p: &Placement, a: AgentId) -> Tally {
        let node = p.node_of(a);
        tally_with(self.graph, self.types.k(), node, self.types.type_of(a), |w| {
            p.occupant(w).map(|b| self.types.type_of(b))
        })
    }

    pub fn positive_neighbors(&self, p: &Placement, a: AgentId) -> usize {
        self.tally(p, a).own as usize
    }

    pub fn negative_neighbors(&self, p: &Placement, a: AgentId) -> usize {
        self.tally(p, a).negative(self.config.aggregation) as usize
    }

    pub fn pnr(&self, p: &Placement, a: AgentId) -> Option<Rational> {
        self.tally(p, a).pnr(self.config.aggregation)
    }

    pub(crate) fn standing(&self, p: &Placement, a: AgentId) -> Standing {
        self.tally(p, a).standing(self.config.aggregation, self.config.tau)
    }

    /// `max(0, tau - pnr)`, or `tau` for an isolated agent.
    pub fn agent_cost(&self, p: &Placement, a: AgentId) -> Rational {
        self.standing(p, a).cost(self.config.tau)
    }

    pub fn is_content(&self, p: &Placement, a: AgentId) -> bool {
        self.standing(p, a).is_content(self.config.tau)
    }

    /// Number of discontent agents.
    pub fn placement_cost(&self, p: &Placement) -> usize {
        (0..p.agent_count()).filter(|&a| !self.is_content(p, a)).count()
    }

    pub fn social_cost(&self, p: &Placement) -> Rational {
        (0..p.agent_count()).map(|a| self.agent_cost(p, a)).sum()
    }

    pub fn discontent_agents(&self, p: &Placement) -> Vec<AgentId> {
        (0..p.agent_count()).filter(|&a| !self.is_content(p, a)).collect()
    }
}

/// Contents of a placement/type file. Node entries are `None` for agents
/// written as `-`, which only partial states may contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementFile {
    pub types: TypeAssignment,
    pub nodes: Vec<Option<NodeId>>,
}

impl PlacementFile {
    pub fn into_placement(self, node_count: usize) -> Result<(TypeAssignment, Placement), ModelError> {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(a, v)| v.ok_or(ModelError::Unplaced(a)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((self.types, Placement::new(nodes, node_count)?))
    }
}

/// Parses `agents k` followed by one `agent_id type_id node_id` line per agent.
pub fn parse_placement_file(text: &str) -> Result<PlacementFile, ModelError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let perr = |line: usize, msg: String| ModelError::Parse { line, msg };
    let (h, header) = lines.next().ok_or_else(|| perr(1, "missing header".into()))?;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse().map_err(|_| perr(h + 1, format!("bad header field {f:?}"))))
        .collect::<Result<_, _>>()?;
    let [agents, k] = head[..] else {
        return Err(perr(h + 1, "header must be `agents k`".into()));
    };
    let mut type_of = vec![None; agents];
    let mut nodes = vec![None; agents];
    for (i, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(perr(i + 1, format!("expected `agent type node`, got {line:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| perr(i + 1, format!("not an integer: {s:?}")));
        let a = num(f[0])?;
        let t = num(f[1])?;
        if a >= agents || t >= k {
            return Err(perr(i + 1, format!("agent {a} or type {t} out of range")));
        }
        if type_of[a].is_some() {
            return Err(perr(i + 1, format!("agent {a} listed twice")));
        }
        type_of[a] = Some(t);
        nodes[a] = if f[2] == "-" { None } else { Some(num(f[2])?) };
    }
    let type_of = type_of
        .into_iter()
        .enumerate()
        .map(|(a, t)| t.ok_or_else(|| perr(0, format!("agent {a} missing"))))
        .collect::<Result<Vec<_>, _>>()?;
    let types = TypeAssignment::new(type_of)?;
    if types.k() != k {
        return Err(perr(h + 1, format!("header declares {k} types, found {}", types.k())));
    }
    Ok(PlacementFile { types, nodes })
}

pub fn write_placement_file(types: &TypeAssignment, p: &Placement) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", types.agent_count(), types.k()).unwrap();
    for a in 0..types.agent_count() {
        writeln!(out, "{a} {} {}", types.type_of(a), p.node_of(a)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ring_union, Connectivity, Graph};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn cfg(tau: Rational, agg: Aggregation) -> GameConfig {
        GameConfig::new(Tau::new(tau).unwrap(), MoveMode::Swap, agg)
    }

    /// Star: centre 0 with nine leaves. Centre type 0; leaves 4x type 0,
    /// 3x type 2, 2x type 1.
    fn star_instance() -> (Graph, TypeAssignment, Placement) {
        let g = Graph::from_edges(10, (1..10).map(|v| (0, v)), Connectivity::Required).unwrap();
        let types = TypeAssignment::new(vec![0, 0, 0, 0, 0, 2, 2, 2, 1, 1]).unwrap();
        let p = Placement::new((0..10).collect(), 10).unwrap();
        (g, types, p)
    }

    #[test]
    fn negative_neighbourhood_by_aggregation() {
        let (g, types, p) = star_instance();
        let all = Game::new(&g, &types, cfg(r(1, 2), Aggregation::OneVsAll));
        let one = Game::new(&g, &types, cfg(r(1, 2), Aggregation::OneVsOne));
        assert_eq!(all.positive_neighbors(&p, 0), 4);
        assert_eq!(all.negative_neighbors(&p, 0), 5);
        assert_eq!(one.negative_neighbors(&p, 0), 3);
        assert_eq!(one.pnr(&p, 0), Some(r(4, 7)));
        assert_eq!(all.pnr(&p, 0), Some(r(4, 9)));
    }

    #[test]
    fn isolated_agent() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)], Connectivity::Required).unwrap();
        let types = TypeAssignment::new(vec![0, 1]).unwrap();
        let p = Placement::new(vec![0, 2], 3).unwrap();
        for agg in [Aggregation::OneVsAll, Aggregation::OneVsOne] {
            let game = Game::new(&g, &types, GameConfig::new(Tau::from_fraction(3, 10).unwrap(), MoveMode::Jump, agg));
            assert_eq!(game.positive_neighbors(&p, 0), 0);
            assert_eq!(game.negative_neighbors(&p, 0), 0);
            assert_eq!(game.pnr(&p, 0), None);
            assert_eq!(game.agent_cost(&p, 0), r(3, 10));
        }
    }

    #[test]
    fn triangle_same_type_neighbours() {
        let g = ring_union(&[3]).unwrap();
        let types = TypeAssignment::new(vec![0, 0, 0]).unwrap();
        let p = Placement::new(vec![0, 1, 2], 3).unwrap();
        let game = Game::new(&g, &types, cfg(r(1, 2), Aggregation::OneVsAll));
        assert_eq!(game.positive_neighbors(&p, 0), 2);
        assert_eq!(game.placement_cost(&p), 0);
        assert_eq!(game.social_cost(&p), Rational::zero());
    }

    #[test]
    fn costs_on_four_cycle() {
        let g = ring_union(&[4]).unwrap();
        let types = TypeAssignment::new(vec![0, 0, 1, 1]).unwrap();
        // types around the ring: 0 1 0 1 -> every pnr 0
        let alt = Placement::new(vec![0, 2, 1, 3], 4).unwrap();
        // 0 0 1 1 -> every pnr 1/2
        let blocks = Placement::new(vec![0, 1, 2, 3], 4).unwrap();
        let game = Game::new(&g, &types, cfg(r(1, 2), Aggregation::OneVsAll));
        assert_eq!(game.pnr(&blocks, 0), Some(r(1, 2)));
        assert_eq!(game.agent_cost(&blocks, 0), Rational::zero());
        assert_eq!(game.agent_cost(&alt, 0), r(1, 2));
        assert_eq!(game.placement_cost(&alt), 4);
    }

    #[test]
    fn social_cost_six_ring_blocks() {
        let g = ring_union(&[6]).unwrap();
        let types = TypeAssignment::from_counts(&[3, 3]).unwrap();
        let p = Placement::new((0..6).collect(), 6).unwrap();
        let game = Game::new(&g, &types, cfg(r(3, 5), Aggregation::OneVsAll));
        assert_eq!(game.social_cost(&p), r(2, 5));
        assert_eq!(game.placement_cost(&p), 4);
    }

    #[test]
    fn social_cost_single_isolated() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)], Connectivity::Required).unwrap();
        let types = TypeAssignment::new(vec![0, 0, 1]).unwrap();
        // agents 0,1 adjacent; agent 2 on node 3 with node 2 empty
        let p = Placement::new(vec![0, 1, 3], 4).unwrap();
        let game = Game::new(
            &g,
            &types,
            GameConfig::new(Tau::from_fraction(1, 2).unwrap(), MoveMode::Jump, Aggregation::OneVsAll),
        );
        assert_eq!(game.social_cost(&p), r(1, 2));
    }

    #[test]
    fn tau_parsing() {
        assert_eq!("1/4".parse::<Tau>().unwrap().value(), r(1, 4));
        assert_eq!("2/8".parse::<Tau>().unwrap().to_string(), "1/4");
        for bad in ["0.25", "1/1", "0/3", "3/2", "1/0", "x/2"] {
            assert!(bad.parse::<Tau>().is_err(), "{bad}");
        }
    }

    #[test]
    fn type_assignment_rejects_empty_type() {
        assert_eq!(TypeAssignment::new(vec![0, 2]), Err(ModelError::EmptyType(1)));
        let t = TypeAssignment::from_counts(&[2, 3]).unwrap();
        assert_eq!(t.counts(), &[2, 3]);
        assert_eq!(t.type_of(2), 1);
    }

    #[test]
    fn placement_validation() {
        assert_eq!(Placement::new(vec![0, 0], 2), Err(ModelError::NotInjective(0, 1, 0)));
        assert!(matches!(Placement::new(vec![5], 2), Err(ModelError::NodeOutOfRange { .. })));
        let g = ring_union(&[3]).unwrap();
        let t = TypeAssignment::from_counts(&[1, 1]).unwrap();
        let p = Placement::new(vec![0, 1], 3).unwrap();
        assert!(p.validate(&g, &t, MoveMode::Jump).is_ok());
        assert!(matches!(p.validate(&g, &t, MoveMode::Swap), Err(ModelError::SwapNeedsFullOccupancy { .. })));
    }

    #[test]
    fn random_placement_is_seeded() {
        let p = Placement::random(7, 10, 5).unwrap();
        assert_eq!(p, Placement::random(7, 10, 5).unwrap());
        assert_ne!(p, Placement::random(7, 10, 6).unwrap());
        assert_eq!(p.vacancy_count(), 3);
        assert!(Placement::random(11, 10, 5).is_err());
    }

    #[test]
    fn placement_file_round_trip_and_partial() {
        let types = TypeAssignment::from_counts(&[2, 1]).unwrap();
        let p = Placement::new(vec![2, 0, 3], 4).unwrap();
        let text = write_placement_file(&types, &p);
        let parsed = parse_placement_file(&text).unwrap();
        assert_eq!(parsed.clone().into_placement(4).unwrap(), (types.clone(), p));

        let partial = parse_placement_file("2 2\n0 0 -\n1 1 3\n").unwrap();
        assert_eq!(partial.nodes, vec![None, Some(3)]);
        assert_eq!(partial.into_placement(4).unwrap_err(), ModelError::Unplaced(0));
        assert!(parse_placement_file("2 2\n0 0 1\n").is_err());
        assert!(parse_placement_file("1 2\n0 0 1\n").is_err());
    }
}
