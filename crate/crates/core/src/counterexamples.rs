//! Improving response cycles and other special instances, each built with a
//! script of moves and the exact costs those moves are expected to produce.
//!
//! Node and agent numbering: the agents named in a script come first (ids
//! 0..), and sit on the first nodes. Filler cliques follow in type order.

use std::fmt;
use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::dynamics::{
    evaluate_move, improving_moves, run_ird, state_key, DynamicsError, MoveKind, RunTrace, Schedule,
};
use crate::graph::{write_edge_list, Connectivity, Graph, GraphBuilder, GraphError, NodeId};
use crate::model::{
    write_placement_file, AgentId, Aggregation, Game, GameConfig, ModelError, MoveMode, Placement, Rational, Tau,
    TypeAssignment, TypeId,
};

const ORANGE: TypeId = 0;
const BLUE: TypeId = 1;
const GRAY: TypeId = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterexampleError {
    #[error("tau = {tau} is outside {range}")]
    TauOutOfRange { tau: Tau, range: TauRange },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot pad to a {0}-regular graph")]
    Padding(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// An interval of admissible thresholds with open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TauRange {
    pub lo: Rational,
    pub lo_closed: bool,
    pub hi: Rational,
    pub hi_closed: bool,
}

impl TauRange {
    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self { lo, lo_closed: false, hi, hi_closed: false }
    }

    pub fn contains(&self, tau: Tau) -> bool {
        let t = tau.value();
        (t > self.lo || (self.lo_closed && t == self.lo)) && (t < self.hi || (self.hi_closed && t == self.hi))
    }

    /// `count` evenly spaced interior points; a closed upper end replaces the last one.
    pub fn sample(&self, count: usize) -> Vec<Tau> {
        let step = (self.hi - self.lo) / Rational::from_integer(count as i64 + 1);
        let mut out: Vec<Tau> = (1..=count as i64)
            .map(|i| Tau::new(self.lo + step * i).expect("interior of a sub-interval of (0,1)"))
            .collect();
        if self.hi_closed && count > 0 {
            out[count - 1] = Tau::new(self.hi).expect("closed end inside (0,1)");
        }
        out
    }
}

impl fmt::Display for TauRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = (if self.lo_closed { '[' } else { '(' }, if self.hi_closed { ']' } else { ')' });
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Cost of one agent before and after a scripted move. `before` is left
/// open where no value is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedCost {
    pub agent: AgentId,
    pub before: Option<Rational>,
    pub after: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptStep {
    pub kind: MoveKind,
    pub expected: Vec<ExpectedCost>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedInstance {
    pub name: &'static str,
    pub graph: Graph,
    pub types: TypeAssignment,
    pub initial: Placement,
    pub config: GameConfig,
    pub script: Vec<ScriptStep>,
    pub uniqueness_claimed: bool,
    pub tau_range: TauRange,
    /// The clique-size parameter `x`, or the degree for the regular jump cycle.
    pub parameter: usize,
}

impl ScriptedInstance {
    pub fn game(&self) -> Game<'_> {
        Game::new(&self.graph, &self.types, self.config)
    }

    pub fn moves(&self) -> Vec<MoveKind> {
        self.script.iter().map(|s| s.kind).collect()
    }

    pub fn run_script(&self) -> Result<RunTrace, DynamicsError> {
        run_ird(&self.game(), &self.initial, 0, None, &Schedule::Scripted(self.moves()))
    }

    /// Edge list and placement file contents.
    pub fn export(&self) -> (String, String) {
        (write_edge_list(&self.graph), write_placement_file(&self.types, &self.initial))
    }
}

/// Graph under construction together with its agents.
struct Draft {
    g: GraphBuilder,
    type_of: Vec<TypeId>,
    node_of: Vec<NodeId>,
}

impl Draft {
    fn new(specials: usize) -> Self {
        Self { g: GraphBuilder::with_nodes(specials), type_of: Vec::new(), node_of: Vec::new() }
    }

    fn place(&mut self, t: TypeId, v: NodeId) -> AgentId {
        self.type_of.push(t);
        self.node_of.push(v);
        self.type_of.len() - 1
    }

    fn clique(&mut self, size: usize) -> Vec<NodeId> {
        let nodes = self.g.add_nodes(size);
        self.g.add_clique(&nodes);
        nodes
    }

    /// One filler clique per type in `reqs` (node, type, count): member `i`
    /// of the type's clique is joined to the `i`-th requested attachment.
    fn attach_cliques(&mut self, reqs: &[(NodeId, TypeId, usize)], min_size: usize) {
        let mut ts: Vec<TypeId> = reqs.iter().map(|r| r.1).collect();
        ts.sort_unstable();
        ts.dedup();
        for t in ts {
            let hubs: Vec<NodeId> =
                reqs.iter().filter(|r| r.1 == t).flat_map(|&(v, _, c)| std::iter::repeat_n(v, c)).collect();
            let members = self.clique(hubs.len().max(min_size));
            for (&m, &h) in members.iter().zip(&hubs) {
                self.g.add_edge(m, h);
            }
            for &m in &members {
                self.place(t, m);
            }
        }
    }

    /// Adds filler nodes until every node has degree `delta` and returns them.
    fn pad_regular(&mut self, delta: usize) -> Result<Vec<NodeId>, CounterexampleError> {
        let n0 = self.g.node_count();
        if (0..n0).any(|v| self.g.degree(v) > delta) {
            return Err(CounterexampleError::Padding(delta));
        }
        let need: Vec<(NodeId, usize)> =
            (0..n0).map(|v| (v, delta - self.g.degree(v))).filter(|&(_, d)| d > 0).collect();
        let total: usize = need.iter().map(|n| n.1).sum();
        if total == 0 {
            return Ok(Vec::new());
        }
        let widest = need.iter().map(|n| n.1).max().unwrap_or(0);
        let mut pads = widest.max(delta + 1);
        while pads <= 4 * (total + delta) + 8 {
            if total <= pads * delta && (pads * delta - total).is_multiple_of(2) {
                if let Some((assign, edges)) = pad_plan(&need, pads, delta) {
                    let new = self.g.add_nodes(pads);
                    for (v, i) in assign {
                        self.g.add_edge(v, new[i]);
                    }
                    for (i, j) in edges {
                        self.g.add_edge(new[i], new[j]);
                    }
                    return Ok(new);
                }
            }
            pads += 1;
        }
        Err(CounterexampleError::Padding(delta))
    }

    fn finish(self) -> Result<(Graph, TypeAssignment, Placement), CounterexampleError> {
        let graph = self.g.build(Connectivity::Required)?;
        let types = TypeAssignment::new(self.type_of)?;
        let p = Placement::new(self.node_of, graph.node_count())?;
        Ok((graph, types, p))
    }
}

/// Stubs of deficient nodes go round-robin over `pads` new nodes; the
/// remaining pad degrees are realised among the pads by Havel-Hakimi.
#[allow(clippy::type_complexity)]
fn pad_plan(
    need: &[(NodeId, usize)],
    pads: usize,
    delta: usize,
) -> Option<(Vec<(NodeId, usize)>, Vec<(usize, usize)>)> {
    let mut load = vec![0usize; pads];
    let mut assign = Vec::new();
    let mut cur = 0;
    for &(v, d) in need {
        for i in 0..d {
            let p = (cur + i) % pads;
            assign.push((v, p));
            load[p] += 1;
        }
        cur = (cur + d) % pads;
    }
    if load.iter().any(|&l| l > delta) {
        return None;
    }
    let mut rem: Vec<usize> = load.iter().map(|l| delta - l).collect();
    if rem.iter().any(|&r| r > pads - 1) {
        return None;
    }
    let mut edges = Vec::new();
    loop {
        let mut order: Vec<usize> = (0..pads).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(rem[i]), i));
        let i = order[0];
        let k = rem[i];
        if k == 0 {
            return Some((assign, edges));
        }
        rem[i] = 0;
        let targets = &order[1..(1 + k).min(pads)];
        if targets.len() < k || targets.iter().any(|&j| rem[j] == 0) {
            return None;
        }
        for &j in targets {
            rem[j] -= 1;
            edges.push((i, j));
        }
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn nonneg(v: Rational) -> Rational {
    v.max(Rational::zero())
}

fn cost(agent: AgentId, before: Rational, after: Rational) -> ExpectedCost {
    ExpectedCost { agent, before: Some(before), after }
}

fn cost_after(agent: AgentId, after: Rational) -> ExpectedCost {
    ExpectedCost { agent, before: None, after }
}

fn step(kind: MoveKind, expected: Vec<ExpectedCost>) -> ScriptStep {
    ScriptStep { kind, expected }
}

fn check_tau(tau: Tau, range: TauRange) -> Result<(), CounterexampleError> {
    if range.contains(tau) {
        Ok(())
    } else {
        Err(CounterexampleError::TauOutOfRange { tau, range })
    }
}

fn check_x(x: usize) -> Result<usize, CounterexampleError> {
    if x == 0 {
        Err(CounterexampleError::InvalidParameter("x must be at least 1".into()))
    } else {
        Ok(x)
    }
}

fn floor_plus_one(v: Rational) -> usize {
    (v.floor().to_integer() + 1) as usize
}

const A: AgentId = 0;
const B: AgentId = 1;
const C: AgentId = 2;
const D: AgentId = 3;

pub fn ssg_k2_range() -> TauRange {
    TauRange::open(r(1, 2), r(1, 1))
}

/// Smallest clique parameter for the two-type swap cycle.
pub fn ssg_k2_default_x(tau: Tau) -> usize {
    let t = tau.value();
    let one = Rational::from_integer(1);
    let x = (one / (t - r(1, 2))).ceil().max((one / (r(2, 1) - t * 2)).ceil()).to_integer() as usize;
    // At tau = 5/6 both bounds give 3, where d's first swap is a tie.
    if t > r(2, 3) {
        x.max(4)
    } else {
        x
    }
}

/// Two-type swap cycle for `tau` in (1/2, 1), one-vs-all.
pub fn build_ssg_k2_irc(tau: Tau, x: Option<usize>) -> Result<ScriptedInstance, CounterexampleError> {
    let range = ssg_k2_range();
    check_tau(tau, range)?;
    let x = check_x(x.unwrap_or_else(|| ssg_k2_default_x(tau)))?;
    let mut d = Draft::new(4);
    d.g.add_edge(0, 2);
    d.g.add_edge(1, 2);
    for (t, v) in [(BLUE, 0), (BLUE, 1), (ORANGE, 2), (ORANGE, 3)] {
        d.place(t, v);
    }
    d.attach_cliques(
        &[
            (0, ORANGE, 1),
            (0, BLUE, 1),
            (1, BLUE, x),
            (1, ORANGE, x - 1),
            (2, ORANGE, 2 * x),
            (2, BLUE, 2 * x - 2),
            (3, ORANGE, x + 1),
            (3, BLUE, x - 1),
        ],
        1,
    );
    let (graph, types, initial) = d.finish()?;
    let t = tau.value();
    let xi = x as i64;
    let lo = t - r(xi - 1, 2 * xi);
    let hi = t - r(xi + 1, 2 * xi);
    let third = t - r(1, 3);
    let script = vec![
        step(MoveKind::Swap(A, D), vec![cost(A, third, lo), cost(D, hi, nonneg(t - r(2, 3)))]),
        step(
            MoveKind::Swap(A, C),
            vec![cost(A, lo, t - r(2 * xi - 1, 4 * xi)), cost(C, t - r(2 * xi + 1, 4 * xi), hi)],
        ),
        step(MoveKind::Swap(B, D), vec![cost(B, hi, nonneg(t - r(2, 3))), cost(D, third, lo)]),
        step(MoveKind::Swap(A, D), vec![cost(A, t - r(2 * xi - 1, 4 * xi), t - r(1, 2)), cost(D, lo, t - r(1, 2))]),
    ];
    Ok(ScriptedInstance {
        name: "ssg-k2",
        graph,
        types,
        initial,
        config: GameConfig::new(tau, MoveMode::Swap, Aggregation::OneVsAll),
        script,
        uniqueness_claimed: true,
        tau_range: range,
        parameter: x,
    })
}

pub fn ssg_1k_range() -> TauRange {
    TauRange { lo: Rational::zero(), lo_closed: false, hi: r(1, 2), hi_closed: true }
}

pub fn ssg_1k_default_x(tau: Tau) -> usize {
    floor_plus_one(r(3, 4) / tau.value() - Rational::from_integer(1))
}

/// Three-type swap cycle for `tau` in (0, 1/2], one-vs-all.
pub fn build_1k_ssg_irc(tau: Tau, x: Option<usize>) -> Result<ScriptedInstance, CounterexampleError> {
    let range = ssg_1k_range();
    check_tau(tau, range)?;
    let x = check_x(x.unwrap_or_else(|| ssg_1k_default_x(tau)))?;
    let mut d = Draft::new(4);
    d.g.add_edge(0, 2);
    d.g.add_edge(1, 2);
    for (t, v) in [(BLUE, 0), (BLUE, 1), (ORANGE, 2), (ORANGE, 3)] {
        d.place(t, v);
    }
    d.attach_cliques(
        &[
            (0, GRAY, 1),
            (1, ORANGE, 1),
            (1, BLUE, 2),
            (1, GRAY, 4 * x),
            (2, ORANGE, 4),
            (2, BLUE, 2),
            (2, GRAY, 8 * x),
            (3, BLUE, 1),
            (3, ORANGE, 3),
            (3, GRAY, 4 * x),
        ],
        2,
    );
    let (graph, types, initial) = d.finish()?;
    let t = tau.value();
    let q = r(1, x as i64 + 1);
    let zero = Rational::zero();
    let script = vec![
        step(MoveKind::Swap(A, D), vec![cost(A, t, t - q / 4), cost_after(D, zero)]),
        step(
            MoveKind::Swap(A, C),
            vec![cost(A, t - q / 4, t - q * r(3, 8)), cost(C, t - q * r(5, 8), t - q * r(3, 4))],
        ),
        step(MoveKind::Swap(D, B), vec![cost(D, t, t - q / 4), cost_after(B, zero)]),
        step(MoveKind::Swap(A, D), vec![cost(D, t - q / 4, t - q / 2), cost(A, t - q * r(3, 8), t - q / 2)]),
    ];
    Ok(ScriptedInstance {
        name: "ssg-1k",
        graph,
        types,
        initial,
        config: GameConfig::new(tau, MoveMode::Swap, Aggregation::OneVsAll),
        script,
        uniqueness_claimed: true,
        tau_range: range,
        parameter: x,
    })
}

pub fn open_unit() -> TauRange {
    TauRange::open(Rational::zero(), Rational::from_integer(1))
}

pub fn ssg_11_default_x(tau: Tau) -> usize {
    let t = tau.value();
    let one = Rational::from_integer(1);
    floor_plus_one(((one - t) * 5 / (t * 6)).max(t / (one - t)))
}

fn ssg_11_script(tau: Tau, x: usize, regular: bool) -> Vec<ScriptStep> {
    let t = tau.value();
    let xi = x as i64;
    // In the padded variant the two partners that end up content stop at max(0, tau - 1/2).
    let settled = if regular { nonneg(t - r(1, 2)) } else { Rational::zero() };
    vec![
        step(MoveKind::Swap(A, D), vec![cost(A, t, t - r(1, 3 * xi + 1)), cost_after(D, settled)]),
        step(
            MoveKind::Swap(A, C),
            vec![
                cost(A, t - r(1, 3 * xi + 1), t - r(2, 4 * xi + 2)),
                cost(C, t - r(2, 4 * xi + 2), t - r(2, 3 * xi + 2)),
            ],
        ),
        step(MoveKind::Swap(D, B), vec![cost(D, t, t - r(1, 6 * xi + 1)), cost_after(B, settled)]),
        step(
            MoveKind::Swap(A, D),
            vec![
                cost(D, t - r(1, 6 * xi + 1), t - r(1, 4 * xi + 1)),
                cost(A, t - r(3, 4 * xi + 3), t - r(5, 6 * xi + 5)),
            ],
        ),
    ]
}

fn ssg_11_core(x: usize) -> Draft {
    let mut d = Draft::new(4);
    d.g.add_edge(0, 2);
    for (t, v) in [(BLUE, 0), (BLUE, 1), (ORANGE, 2), (ORANGE, 3)] {
        d.place(t, v);
    }
    d.attach_cliques(
        &[(1, ORANGE, 1), (1, BLUE, 5), (2, ORANGE, 1), (2, BLUE, 2), (3, ORANGE, 2), (3, BLUE, 1)],
        x + 1,
    );
    d
}

/// Three-type swap cycle for any `tau`, one-vs-one.
pub fn build_11_ssg_irc(tau: Tau, x: Option<usize>) -> Result<ScriptedInstance, CounterexampleError> {
    let range = open_unit();
    check_tau(tau, range)?;
    let x = check_x(x.unwrap_or_else(|| ssg_11_default_x(tau)))?;
    let mut d = ssg_11_core(x);
    d.attach_cliques(&[(1, GRAY, 6 * x), (2, GRAY, 4 * x), (3, GRAY, 3 * x)], x + 1);
    let (graph, types, initial) = d.finish()?;
    Ok(ScriptedInstance {
        name: "ssg-11",
        graph,
        types,
        initial,
        config: GameConfig::new(tau, MoveMode::Swap, Aggregation::OneVsOne),
        script: ssg_11_script(tau, x, false),
        uniqueness_claimed: true,
        tau_range: range,
        parameter: x,
    })
}

pub fn ssg_11_regular_default_x(tau: Tau) -> usize {
    let t = tau.value();
    floor_plus_one((Rational::from_integer(1) - t) * 5 / (t * 6))
}

/// The one-vs-one swap cycle on a `6(x+1)`-regular graph: gray cliques are
/// kept apart and filler nodes, each holding the only agent of its own
/// type, bring every degree up to `6(x+1)`.
pub fn build_11_ssg_regular_irc(tau: Tau, x: Option<usize>) -> Result<ScriptedInstance, CounterexampleError> {
    let range = open_unit();
    check_tau(tau, range)?;
    let x = check_x(x.unwrap_or_else(|| ssg_11_regular_default_x(tau)))?;
    let mut d = ssg_11_core(x);
    for (v, c) in [(1, 6 * x), (2, 4 * x), (3, 3 * x)] {
        d.attach_cliques(&[(v, GRAY, c)], 1);
    }
    let delta = 6 * (x + 1);
    let pads = d.pad_regular(delta)?;
    for (i, v) in pads.into_iter().enumerate() {
        d.place(GRAY + 1 + i, v);
    }
    let (graph, types, initial) = d.finish()?;
    debug_assert_eq!(graph.regular_degree(), Some(delta));
    Ok(ScriptedInstance {
        name: "ssg-11-regular",
        graph,
        types,
        initial,
        config: GameConfig::new(tau, MoveMode::Swap, Aggregation::OneVsOne),
        script: ssg_11_script(tau, x, true),
        uniqueness_claimed: false,
        tau_range: range,
        parameter: x,
    })
}

pub fn jsg_regular_range(delta: usize) -> TauRange {
    TauRange::open(r(2, delta.max(1) as i64), Rational::from_integer(1))
}

/// Jump cycle on a `delta`-regular graph for `tau > 2/delta`, one-vs-all.
pub fn build_jsg_regular_irc(delta: usize, tau: Tau) -> Result<ScriptedInstance, CounterexampleError> {
    if delta < 3 {
        return Err(CounterexampleError::InvalidParameter(format!("degree must be at least 3, got {delta}")));
    }
    let range = jsg_regular_range(delta);
    check_tau(tau, range)?;
    let (a0, b0, c0, e) = (0, 1, 2, 3);
    let mut d = Draft::new(4);
    d.g.add_edge(a0, b0);
    d.g.add_edge(c0, e);
    for hub in [b0, e] {
        for v in d.g.add_nodes(delta - 1) {
            d.g.add_edge(hub, v);
        }
    }
    for v in [a0, b0, c0] {
        d.place(ORANGE, v);
    }
    for hub in [a0, c0] {
        let v = d.g.add_node();
        d.g.add_edge(v, hub);
        d.place(ORANGE, v);
    }
    let ka = d.clique(delta - 2);
    let kc = d.clique(delta - 2);
    for (k, hub) in [(&ka, a0), (&kc, c0)] {
        for &v in k.iter() {
            d.g.add_edge(v, hub);
            d.place(BLUE, v);
        }
    }
    for (&u, &v) in ka.iter().zip(&kc) {
        d.g.add_edge(u, v);
    }
    for v in d.pad_regular(delta)? {
        d.place(BLUE, v);
    }
    let (graph, types, initial) = d.finish()?;
    debug_assert_eq!(graph.regular_degree(), Some(delta));
    let t = tau.value();
    let di = delta as i64;
    let zero = Rational::zero();
    let script = vec![
        step(MoveKind::Jump(A, e), vec![cost(A, t - r(2, di), zero)]),
        step(MoveKind::Jump(B, a0), vec![cost(B, t, t - r(1, di - 1))]),
        step(MoveKind::Jump(C, b0), vec![cost(C, t - r(2, di), zero)]),
        step(MoveKind::Jump(A, c0), vec![cost(A, t, t - r(1, di - 1))]),
    ];
    Ok(ScriptedInstance {
        name: "jsg-regular",
        graph,
        types,
        initial,
        config: GameConfig::new(tau, MoveMode::Jump, Aggregation::OneVsAll),
        script,
        uniqueness_claimed: false,
        tau_range: range,
        parameter: delta,
    })
}

pub fn jsg_arbitrary_default_x(tau: Tau) -> usize {
    let t = tau.value();
    let one = Rational::from_integer(1);
    floor_plus_one((Rational::from_integer(2) / t).max(one / (one - t)))
}

/// Two-type jump cycle on a non-regular graph for any `tau`, one-vs-all.
pub fn build_jsg_arbitrary_irc(tau: Tau, x: Option<usize>) -> Result<ScriptedInstance, CounterexampleError> {
    let range = open_unit();
    check_tau(tau, range)?;
    let x = check_x(x.unwrap_or_else(|| jsg_arbitrary_default_x(tau)))?;
    let (pa, e0, pb, pc, pd) = (0, 1, 2, 3, 4);
    let mut d = Draft::new(5);
    for (u, v) in [(pa, e0), (pc, pb), (pd, e0), (pd, pb)] {
        d.g.add_edge(u, v);
    }
    for v in [pa, pb, pc, pd] {
        d.place(ORANGE, v);
    }
    let blue = d.clique(2 * x + 1);
    for i in 0..x {
        d.g.add_edge(blue[i], e0);
        d.g.add_edge(blue[x + i], pb);
    }
    let f = blue[2 * x];
    d.g.add_edge(f, pa);
    d.g.add_edge(f, pc);
    for &v in &blue {
        d.place(BLUE, v);
    }
    let (graph, types, initial) = d.finish()?;
    let t = tau.value();
    let xi = x as i64;
    let settled = nonneg(t - r(1, 2));
    let script = vec![
        step(MoveKind::Jump(A, e0), vec![cost(A, t, t - r(1, xi + 1))]),
        step(MoveKind::Jump(B, pa), vec![cost(B, t - r(2, xi + 2), settled)]),
        step(MoveKind::Jump(C, pb), vec![cost(C, t, t - r(1, xi + 1))]),
        step(MoveKind::Jump(A, pc), vec![cost(A, t - r(2, xi + 2), settled)]),
    ];
    Ok(ScriptedInstance {
        name: "jsg-arbitrary",
        graph,
        types,
        initial,
        config: GameConfig::new(tau, MoveMode::Jump, Aggregation::OneVsAll),
        script,
        uniqueness_claimed: true,
        tau_range: range,
        parameter: x,
    })
}

/// Instance where every cost-optimal swap placement admits an improving swap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptNotStable {
    pub graph: Graph,
    pub types: TypeAssignment,
    pub config: GameConfig,
    /// The optimal placement, cost 7.
    pub optimal: Placement,
    /// `optimal` after the swap of `a` and `b`, cost 8.
    pub after_swap: Placement,
    pub a: AgentId,
    pub b: AgentId,
}

impl OptNotStable {
    pub fn game(&self) -> Game<'_> {
        Game::new(&self.graph, &self.types, self.config)
    }
}

/// Two 10-cliques U (orange) and V (blue) plus two hubs: alpha holds the
/// orange agent `a` and touches one U node and two V nodes, beta holds the
/// blue agent `b` and touches three U nodes and five V nodes. `tau = 91/100`.
pub fn build_opt_not_stable() -> OptNotStable {
    let (alpha, beta) = (0, 1);
    let mut d = Draft::new(2);
    d.place(ORANGE, alpha);
    d.place(BLUE, beta);
    let u = d.clique(10);
    let v = d.clique(10);
    d.g.add_edge(alpha, u[0]);
    d.g.add_edge(alpha, v[0]);
    d.g.add_edge(alpha, v[1]);
    for &w in u[1..4].iter().chain(&v[2..7]) {
        d.g.add_edge(beta, w);
    }
    for &w in &u {
        d.place(ORANGE, w);
    }
    for &w in &v {
        d.place(BLUE, w);
    }
    let (graph, types, optimal) = d.finish().expect("fixed instance is valid");
    let mut after_swap = optimal.clone();
    after_swap.swap_agents(A, B);
    let tau = Tau::from_fraction(91, 100).expect("inside (0,1)");
    OptNotStable {
        graph,
        types,
        config: GameConfig::new(tau, MoveMode::Swap, Aggregation::OneVsAll),
        optimal,
        after_swap,
        a: A,
        b: B,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCheck {
    pub step: usize,
    pub kind: MoveKind,
    pub improving: bool,
    /// Number of improving moves available in the state before this step.
    pub improving_moves: usize,
    /// `None` when uniqueness is not claimed.
    pub unique: Option<bool>,
    pub mismatches: Vec<String>,
}

impl StepCheck {
    pub fn passed(&self) -> bool {
        self.improving && self.unique != Some(false) && self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub name: &'static str,
    pub tau: Tau,
    pub parameter: usize,
    pub steps: Vec<StepCheck>,
    pub closes: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.closes && self.steps.iter().all(StepCheck::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} tau={} parameter={}", self.name, self.tau, self.parameter).unwrap();
        for s in &self.steps {
            let unique = match s.unique {
                Some(true) => "unique",
                Some(false) => "NOT unique",
                None => "uniqueness not claimed",
            };
            let improving = if s.improving { "improving" } else { "NOT improving" };
            writeln!(
                out,
                "  step {} {}: {improving}, {} improving moves, {unique}",
                s.step + 1,
                s.kind,
                s.improving_moves
            )
            .unwrap();
            for m in &s.mismatches {
                writeln!(out, "    mismatch: {m}").unwrap();
            }
        }
        writeln!(out, "  closure: {}", if self.closes { "state repeats" } else { "NO repeat" }).unwrap();
        writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,move,improving,improving_moves,unique,costs_match\n");
        for s in &self.steps {
            let unique = s.unique.map_or("n/a".to_string(), |u| u.to_string());
            writeln!(
                out,
                "{},{},{},{},{unique},{}",
                s.step + 1,
                s.kind,
                s.improving,
                s.improving_moves,
                s.mismatches.is_empty()
            )
            .unwrap();
        }
        writeln!(out, "closure,,{},,,", self.closes).unwrap();
        out
    }
}

fn normalise(kind: MoveKind) -> MoveKind {
    match kind {
        MoveKind::Swap(a, b) => MoveKind::Swap(a.min(b), a.max(b)),
        jump => jump,
    }
}

/// Replays the script, checking at every step that the move improves, that
/// it is the only improving move where claimed, and that the recomputed
/// costs equal the expected ones; finally checks that the state repeats.
pub fn verify_scripted_cycle(inst: &ScriptedInstance) -> VerificationReport {
    let game = inst.game();
    let mut p = inst.initial.clone();
    let mut steps = Vec::new();
    for (i, s) in inst.script.iter().enumerate() {
        let available: Vec<MoveKind> = improving_moves(&game, &p).iter().map(|m| normalise(m.kind)).collect();
        let unique = inst.uniqueness_claimed.then(|| available == [normalise(s.kind)]);
        let mut mismatches = Vec::new();
        let evaluated = match evaluate_move(&game, &p, s.kind) {
            Ok(m) => m,
            Err(e) => {
                mismatches.push(e.to_string());
                steps.push(StepCheck {
                    step: i,
                    kind: s.kind,
                    improving: false,
                    improving_moves: available.len(),
                    unique,
                    mismatches,
                });
                break;
            }
        };
        let mut actual = vec![(s.kind.agent(), evaluated.cost_before_a, evaluated.cost_after_a)];
        if let (MoveKind::Swap(_, b), Some((before, after))) = (s.kind, evaluated.partner_costs) {
            actual.push((b, before, after));
        }
        for e in &s.expected {
            match actual.iter().find(|c| c.0 == e.agent) {
                None => mismatches.push(format!("agent {} is not part of {}", e.agent, s.kind)),
                Some(&(_, before, after)) => {
                    if let Some(eb) = e.before {
                        if eb != before {
                            mismatches.push(format!("agent {} cost before: expected {eb}, got {before}", e.agent));
                        }
                    }
                    if e.after != after {
                        mismatches.push(format!("agent {} cost after: expected {}, got {after}", e.agent, e.after));
                    }
                }
            }
        }
        steps.push(StepCheck {
            step: i,
            kind: s.kind,
            improving: evaluated.is_improving(),
            improving_moves: available.len(),
            unique,
            mismatches,
        });
        crate::dynamics::apply_in_place(&mut p, s.kind).expect("evaluated move applies");
    }
    let closes =
        steps.len() == inst.script.len() && state_key(&inst.types, &p) == state_key(&inst.types, &inst.initial);
    VerificationReport { name: inst.name, tau: inst.config.tau, parameter: inst.parameter, steps, closes }
}
