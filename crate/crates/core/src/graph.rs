//! Undirected simple graphs modelling the residential area.
//!
//! A [`Graph`] is immutable once built. Every constructor validates symmetry,
//! simplicity and (unless explicitly waived) connectivity, so downstream code
//! can rely on those invariants without re-checking.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type NodeId = usize;

/// Upper bound on full restarts of the random regular generator.
pub const REGULAR_RETRY_CAP: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("no {delta}-regular graph on {n} nodes exists (n*delta must be even and delta < n)")]
    Parity { n: usize, delta: usize },
    #[error("random regular generation failed after {0} attempts")]
    GenerationFailed(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("node id {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("header declares {declared} edges but {found} were given")]
    EdgeCountMismatch { declared: usize, found: usize },
}

/// Whether a constructor must reject graphs with more than one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Required,
    Allowed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, parallel edges and
    /// out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I, connectivity: Connectivity) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut builder = GraphBuilder::with_nodes(n);
        for (u, v) in edges {
            builder.try_add_edge(u, v)?;
        }
        builder.build(connectivity)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Some(d)` when every node has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = self.adjacency.first()?.len();
        self.adjacency.iter().all(|a| a.len() == first).then_some(first)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, adj)| adj.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Component id per node, numbered in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |c| c + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }
}

/// Mutable adjacency used while assembling a graph.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    adjacency: Vec<Vec<NodeId>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes(n: usize) -> Self {
        Self { adjacency: vec![Vec::new(); n] }
    }

    pub fn add_node(&mut self) -> NodeId {
        self.adjacency.push(Vec::new());
        self.adjacency.len() - 1
    }

    pub fn add_nodes(&mut self, count: usize) -> Vec<NodeId> {
        (0..count).map(|_| self.add_node()).collect()
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].contains(&v)
    }

    pub fn try_add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        let n = self.adjacency.len();
        for node in [u, v] {
            if node >= n {
                return Err(GraphError::NodeOutOfRange { node, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        Ok(())
    }

    /// Adds an edge the caller knows to be new; panics otherwise.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) {
        self.try_add_edge(u, v).expect("construction added an invalid edge");
    }

    /// Connects every pair in `nodes`.
    pub fn add_clique(&mut self, nodes: &[NodeId]) {
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &nodes[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    pub fn build(mut self, connectivity: Connectivity) -> Result<Graph, GraphError> {
        let mut edge_count = 0;
        for adj in &mut self.adjacency {
            adj.sort_unstable();
            edge_count += adj.len();
        }
        let graph = Graph { adjacency: self.adjacency, edge_count: edge_count / 2 };
        if connectivity == Connectivity::Required {
            let c = graph.component_count();
            if c > 1 {
                return Err(GraphError::Disconnected(c));
            }
        }
        Ok(graph)
    }
}

/// Toroidal grid where each cell is adjacent to its eight king-move
/// neighbours. Node id is `row * cols + col`.
pub fn moore_torus(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    if rows < 3 || cols < 3 {
        return Err(GraphError::InvalidDimension(format!("Moore torus needs at least 3x3 cells, got {rows}x{cols}")));
    }
    let mut b = GraphBuilder::with_nodes(rows * cols);
    // Half of the king moves; the other half arrive from the neighbour's side.
    const FORWARD: [(isize, isize); 4] = [(0, 1), (1, -1), (1, 0), (1, 1)];
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            for (dr, dc) in FORWARD {
                let rr = (r as isize + dr).rem_euclid(rows as isize) as usize;
                let cc = (c as isize + dc).rem_euclid(cols as isize) as usize;
                let v = rr * cols + cc;
                // 3-wide dimensions fold some offsets onto the same cell.
                if !b.has_edge(u, v) {
                    b.add_edge(u, v);
                }
            }
        }
    }
    b.build(Connectivity::Required)
}

/// Uniform-ish random simple connected `delta`-regular graph.
///
/// Stubs are paired one edge at a time, rejecting pairs that would create a
/// loop or a parallel edge; a dead end or a disconnected result restarts the
/// whole pairing.
pub fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Graph, GraphError> {
    if delta >= n || !(n * delta).is_multiple_of(2) {
        return Err(GraphError::Parity { n, delta });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REGULAR_RETRY_CAP {
        if let Some(b) = pair_stubs(n, delta, &mut rng) {
            let g = b.build(Connectivity::Allowed)?;
            if g.is_connected() {
                return Ok(g);
            }
        }
    }
    Err(GraphError::GenerationFailed(REGULAR_RETRY_CAP))
}

fn pair_stubs(n: usize, delta: usize, rng: &mut ChaCha8Rng) -> Option<GraphBuilder> {
    let mut b = GraphBuilder::with_nodes(n);
    let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, delta)).collect();
    stubs.shuffle(rng);
    while !stubs.is_empty() {
        let len = stubs.len();
        let mut paired = false;
        for _ in 0..(8 * len).max(64) {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            let (u, v) = (stubs[i], stubs[j]);
            if i != j && u != v && !b.has_edge(u, v) {
                b.add_edge(u, v);
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                paired = true;
                break;
            }
        }
        if !paired {
            let stuck =
                stubs.iter().enumerate().all(|(i, &u)| stubs[i + 1..].iter().all(|&v| u == v || b.has_edge(u, v)));
            if stuck {
                return None;
            }
        }
    }
    Some(b)
}

/// Disjoint union of cycles with the given sizes; ids run ring by ring.
/// The result is usually disconnected, which only the optimal-placement
/// solvers accept.
pub fn ring_union(ring_sizes: &[usize]) -> Result<Graph, GraphError> {
    if let Some(&bad) = ring_sizes.iter().find(|&&r| r < 3) {
        return Err(GraphError::InvalidDimension(format!("ring size {bad} is below 3")));
    }
    let mut b = GraphBuilder::new();
    for &r in ring_sizes {
        let nodes = b.add_nodes(r);
        for i in 0..r {
            b.add_edge(nodes[i], nodes[(i + 1) % r]);
        }
    }
    b.build(Connectivity::Allowed)
}

/// Parses the `n m` header plus `u v` edge lines format.
pub fn parse_edge_list(text: &str, connectivity: Connectivity) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
    let [n, m] = parse_pair(header, hline + 1)?;
    let mut b = GraphBuilder::with_nodes(n);
    let mut found = 0;
    for (i, line) in lines {
        let [u, v] = parse_pair(line, i + 1)?;
        b.try_add_edge(u, v)?;
        found += 1;
    }
    if found != m {
        return Err(GraphError::EdgeCountMismatch { declared: m, found });
    }
    b.build(connectivity)
}

fn parse_pair(line: &str, lineno: usize) -> Result<[usize; 2], GraphError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(GraphError::Parse { line: lineno, msg: format!("expected two integers, got {line:?}") });
    }
    let mut out = [0; 2];
    for (slot, f) in out.iter_mut().zip(&fields) {
        *slot = f
            .parse()
            .map_err(|_| GraphError::Parse { line: lineno, msg: format!("not a non-negative integer: {f:?}") })?;
    }
    Ok(out)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.node_count(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
