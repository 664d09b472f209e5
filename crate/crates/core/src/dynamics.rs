//! Improving response dynamics: move enumeration, execution, schedules and
//! cycle detection.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::NodeId;
use crate::model::{tally_with, AgentId, Game, ModelError, MoveMode, Placement, Rational, Standing, TypeAssignment};

/// Type id written for empty nodes in a state key.
pub const EMPTY: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("invalid move {0}: {1}")]
    InvalidMove(MoveKind, String),
    #[error("script step {step}: {kind} is not improving ({detail})")]
    ScriptViolation { step: usize, kind: MoveKind, detail: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("trace line {line}: {msg}")]
    TraceParse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Swap(AgentId, AgentId),
    Jump(AgentId, NodeId),
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveKind::Swap(a, b) => write!(f, "swap({a},{b})"),
            MoveKind::Jump(a, v) => write!(f, "jump({a}->{v})"),
        }
    }
}

impl MoveKind {
    pub fn agent(&self) -> AgentId {
        match *self {
            MoveKind::Swap(a, _) | MoveKind::Jump(a, _) => a,
        }
    }

    pub fn agents(&self) -> Vec<AgentId> {
        match *self {
            MoveKind::Swap(a, b) => vec![a, b],
            MoveKind::Jump(a, _) => vec![a],
        }
    }
}

/// A move together with the exact cost of each involved agent before and after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub cost_before_a: Rational,
    pub cost_after_a: Rational,
    /// Costs of the swap partner; `None` for jumps.
    pub partner_costs: Option<(Rational, Rational)>,
}

impl Move {
    pub fn is_improving(&self) -> bool {
        self.cost_after_a < self.cost_before_a && self.partner_costs.is_none_or(|(before, after)| after < before)
    }
}

fn swap_standings(game: &Game, p: &Placement, a: AgentId, b: AgentId) -> (Standing, Standing) {
    let (va, vb) = (p.node_of(a), p.node_of(b));
    let types = game.types;
    let (ta, tb) = (types.type_of(a), types.type_of(b));
    let k = types.k();
    let occ = |w: NodeId| p.occupant(w).map(|c| types.type_of(c));
    let at_b = tally_with(game.graph, k, vb, ta, |w| if w == va { Some(tb) } else { occ(w) });
    let at_a = tally_with(game.graph, k, va, tb, |w| if w == vb { Some(ta) } else { occ(w) });
    let (agg, tau) = (game.config.aggregation, game.config.tau);
    (at_b.standing(agg, tau), at_a.standing(agg, tau))
}

fn jump_standing(game: &Game, p: &Placement, a: AgentId, target: NodeId) -> Standing {
    let from = p.node_of(a);
    let types = game.types;
    let t = tally_with(game.graph, types.k(), target, types.type_of(a), |w| {
        if w == from {
            None
        } else {
            p.occupant(w).map(|c| types.type_of(c))
        }
    });
    t.standing(game.config.aggregation, game.config.tau)
}

fn check_move(game: &Game, p: &Placement, kind: MoveKind) -> Result<(), DynamicsError> {
    let bad = |msg: &str| Err(DynamicsError::InvalidMove(kind, msg.to_string()));
    let n = p.agent_count();
    match (kind, game.config.mode) {
        (MoveKind::Swap(a, b), MoveMode::Swap) => {
            if a >= n || b >= n {
                bad("agent out of range")
            } else if a == b {
                bad("agent swapped with itself")
            } else {
                Ok(())
            }
        }
        (MoveKind::Jump(a, v), MoveMode::Jump) => {
            if a >= n {
                bad("agent out of range")
            } else if v >= p.node_count() {
                bad("target out of range")
            } else if !p.is_empty(v) {
                bad("target occupied")
            } else {
                Ok(())
            }
        }
        _ => bad("move kind does not match the game mode"),
    }
}

/// Exact before/after costs of `kind` in `p`.
pub fn evaluate_move(game: &Game, p: &Placement, kind: MoveKind) -> Result<Move, DynamicsError> {
    check_move(game, p, kind)?;
    let tau = game.config.tau;
    Ok(match kind {
        MoveKind::Swap(a, b) => {
            let (sa, sb) = swap_standings(game, p, a, b);
            Move {
                kind,
                cost_before_a: game.agent_cost(p, a),
                cost_after_a: sa.cost(tau),
                partner_costs: Some((game.agent_cost(p, b), sb.cost(tau))),
            }
        }
        MoveKind::Jump(a, v) => Move {
            kind,
            cost_before_a: game.agent_cost(p, a),
            cost_after_a: jump_standing(game, p, a, v).cost(tau),
            partner_costs: None,
        },
    })
}

fn swap_improves(game: &Game, p: &Placement, a: AgentId, b: AgentId) -> bool {
    if game.types.type_of(a) == game.types.type_of(b) {
        return false;
    }
    let (sa, sb) = swap_standings(game, p, a, b);
    sa > game.standing(p, a) && sb > game.standing(p, b)
}

/// Every strictly improving swap, ordered by `(a, b)` with `a < b`.
pub fn improving_swaps(game: &Game, p: &Placement) -> Vec<Move> {
    let discontent = game.discontent_agents(p);
    let mut out = Vec::new();
    for (i, &a) in discontent.iter().enumerate() {
        for &b in &discontent[i + 1..] {
            if swap_improves(game, p, a, b) {
                out.push(evaluate_move(game, p, MoveKind::Swap(a, b)).expect("enumerated swap is valid"));
            }
        }
    }
    out
}

/// Every strictly improving jump, ordered by agent then target node.
pub fn improving_jumps(game: &Game, p: &Placement) -> Vec<Move> {
    let empty: Vec<NodeId> = p.empty_nodes().collect();
    let mut out = Vec::new();
    for a in game.discontent_agents(p) {
        let now = game.standing(p, a);
        for &v in &empty {
            if jump_standing(game, p, a, v) > now {
                out.push(evaluate_move(game, p, MoveKind::Jump(a, v)).expect("enumerated jump is valid"));
            }
        }
    }
    out
}

pub fn improving_moves(game: &Game, p: &Placement) -> Vec<Move> {
    match game.config.mode {
        MoveMode::Swap => improving_swaps(game, p),
        MoveMode::Jump => improving_jumps(game, p),
    }
}

pub fn is_stable(game: &Game, p: &Placement) -> bool {
    first_canonical(game, p, &game.discontent_agents(p)).is_none()
}

fn first_canonical(game: &Game, p: &Placement, discontent: &[AgentId]) -> Option<MoveKind> {
    match game.config.mode {
        MoveMode::Swap => discontent.iter().enumerate().find_map(|(i, &a)| {
            discontent[i + 1..].iter().find(|&&b| swap_improves(game, p, a, b)).map(|&b| MoveKind::Swap(a, b))
        }),
        MoveMode::Jump => {
            let empty: Vec<NodeId> = p.empty_nodes().collect();
            discontent.iter().find_map(|&a| {
                let now = game.standing(p, a);
                empty.iter().find(|&&v| jump_standing(game, p, a, v) > now).map(|&v| MoveKind::Jump(a, v))
            })
        }
    }
}

/// Executes a move without checking whether it improves anything.
pub fn apply_move(p: &Placement, kind: MoveKind) -> Result<Placement, DynamicsError> {
    let mut q = p.clone();
    apply_in_place(&mut q, kind)?;
    Ok(q)
}

pub fn apply_in_place(p: &mut Placement, kind: MoveKind) -> Result<(), DynamicsError> {
    let n = p.agent_count();
    let bad = |msg: &str| Err(DynamicsError::InvalidMove(kind, msg.to_string()));
    match kind {
        MoveKind::Swap(a, b) if a < n && b < n && a != b => p.swap_agents(a, b),
        MoveKind::Swap(..) => return bad("agents out of range or equal"),
        MoveKind::Jump(a, v) if a < n && v < p.node_count() && p.is_empty(v) => p.relocate(a, v),
        MoveKind::Jump(..) => return bad("agent out of range or target not empty"),
    }
    Ok(())
}

/// Node-to-type pattern; agents of one type are interchangeable.
pub fn state_key(types: &TypeAssignment, p: &Placement) -> Vec<u32> {
    (0..p.node_count()).map(|v| p.occupant(v).map_or(EMPTY, |a| types.type_of(a) as u32)).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn zobrist(v: NodeId, t: usize) -> u64 {
    splitmix64(((v as u64) << 24) ^ t as u64)
}

fn key_hash(types: &TypeAssignment, p: &Placement) -> u64 {
    p.nodes().iter().enumerate().fold(0, |h, (a, &v)| h ^ zobrist(v, types.type_of(a)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// Discontent agents in random order, each taking the first improving
    /// option found in a random scan.
    RandomFirstImprovement,
    /// Always the lowest improving move: by agent ids, then partner or target.
    CanonicalFirst,
    Scripted(Vec<MoveKind>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `rounds` counts activation rounds that executed at least one move.
    Converged {
        steps: usize,
        rounds: usize,
    },
    /// The state after the last move has the same key as the state after
    /// `first_repeat_index` moves.
    CycleDetected {
        first_repeat_index: usize,
    },
    StepCapReached,
    /// A scripted run used up its moves without revisiting a state.
    ScriptExhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converged { .. } => "CONVERGED",
            Verdict::CycleDetected { .. } => "CYCLE_DETECTED",
            Verdict::StepCapReached => "STEP_CAP_REACHED",
            Verdict::ScriptExhausted => "SCRIPT_EXHAUSTED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub initial: Placement,
    pub moves: Vec<Move>,
    pub verdict: Verdict,
    pub seed: u64,
    pub rounds: usize,
    pub final_placement: Placement,
}

impl RunTrace {
    pub fn steps(&self) -> usize {
        self.moves.len()
    }

    pub fn converged(&self) -> bool {
        matches!(self.verdict, Verdict::Converged { .. })
    }

    pub fn replay(&self) -> Result<Placement, DynamicsError> {
        let mut p = self.initial.clone();
        for m in &self.moves {
            apply_in_place(&mut p, m.kind)?;
        }
        Ok(p)
    }

    /// Replays the trace and returns `f` of every state, initial state first.
    pub fn map_states<T>(&self, mut f: impl FnMut(&Placement) -> T) -> Result<Vec<T>, DynamicsError> {
        let mut p = self.initial.clone();
        let mut out = vec![f(&p)];
        for m in &self.moves {
            apply_in_place(&mut p, m.kind)?;
            out.push(f(&p));
        }
        Ok(out)
    }

    /// One row per move. `potential`, if given, holds the value after each move.
    pub fn to_csv(&self, potential: Option<&[Rational]>) -> String {
        let mut out =
            String::from("step,kind,agent_a,agent_b_or_target,cost_before_a,cost_after_a,cost_before_b,cost_after_b");
        if potential.is_some() {
            out.push_str(",potential_value");
        }
        out.push('\n');
        for (i, m) in self.moves.iter().enumerate() {
            let (kind, a, other) = match m.kind {
                MoveKind::Swap(a, b) => ("swap", a, b),
                MoveKind::Jump(a, v) => ("jump", a, v),
            };
            let (bb, ba) =
                m.partner_costs.map_or((String::new(), String::new()), |(x, y)| (x.to_string(), y.to_string()));
            write!(out, "{},{kind},{a},{other},{},{},{bb},{ba}", i + 1, m.cost_before_a, m.cost_after_a).unwrap();
            if let Some(values) = potential {
                write!(out, ",{}", values[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Reads the move column of a trace CSV back.
pub fn parse_trace_csv(text: &str) -> Result<Vec<MoveKind>, DynamicsError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: &str| DynamicsError::TraceParse { line: i + 1, msg: msg.to_string() };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 4 {
            return Err(err("too few columns"));
        }
        let a: usize = f[2].parse().map_err(|_| err("bad agent_a"))?;
        let b: usize = f[3].parse().map_err(|_| err("bad agent_b_or_target"))?;
        out.push(match f[1] {
            "swap" => MoveKind::Swap(a, b),
            "jump" => MoveKind::Jump(a, b),
            _ => return Err(err("kind must be swap or jump")),
        });
    }
    Ok(out)
}

pub fn default_max_steps(game: &Game) -> usize {
    10 * game.graph.edge_count()
}

/// Mutable run state with cached contentment and a vacancy index.
struct Runner<'g, 'a> {
    game: &'g Game<'a>,
    p: Placement,
    discontent: Vec<bool>,
    vacant: Vec<NodeId>,
    vacant_pos: Vec<usize>,
    hash: u64,
    seen: HashMap<u64, Vec<usize>>,
    initial: Placement,
    moves: Vec<Move>,
}

impl<'g, 'a> Runner<'g, 'a> {
    fn new(game: &'g Game<'a>, p0: &Placement) -> Self {
        let discontent = (0..p0.agent_count()).map(|a| !game.is_content(p0, a)).collect();
        let vacant: Vec<NodeId> = p0.empty_nodes().collect();
        let mut vacant_pos = vec![usize::MAX; p0.node_count()];
        for (i, &v) in vacant.iter().enumerate() {
            vacant_pos[v] = i;
        }
        let hash = key_hash(game.types, p0);
        let seen = HashMap::from([(hash, vec![0])]);
        Self { game, p: p0.clone(), discontent, vacant, vacant_pos, hash, seen, initial: p0.clone(), moves: Vec::new() }
    }

    fn discontent_list(&self) -> Vec<AgentId> {
        (0..self.discontent.len()).filter(|&a| self.discontent[a]).collect()
    }

    fn refresh_around(&mut self, v: NodeId) {
        let game = self.game;
        for &w in std::iter::once(&v).chain(game.graph.neighbors(v)) {
            if let Some(c) = self.p.occupant(w) {
                self.discontent[c] = !game.is_content(&self.p, c);
            }
        }
    }

    /// Executes `m` (already evaluated) and returns the cycle verdict, if any.
    fn execute(&mut self, m: Move) -> Option<Verdict> {
        let types = self.game.types;
        let touched = match m.kind {
            MoveKind::Swap(a, b) => {
                let (va, vb) = (self.p.node_of(a), self.p.node_of(b));
                let (ta, tb) = (types.type_of(a), types.type_of(b));
                self.hash ^= zobrist(va, ta) ^ zobrist(vb, tb) ^ zobrist(va, tb) ^ zobrist(vb, ta);
                self.p.swap_agents(a, b);
                [va, vb]
            }
            MoveKind::Jump(a, target) => {
                let from = self.p.node_of(a);
                let t = types.type_of(a);
                self.hash ^= zobrist(from, t) ^ zobrist(target, t);
                self.p.relocate(a, target);
                let i = self.vacant_pos[target];
                self.vacant[i] = from;
                self.vacant_pos[from] = i;
                self.vacant_pos[target] = usize::MAX;
                [from, target]
            }
        };
        for v in touched {
            self.refresh_around(v);
        }
        self.moves.push(m);
        let step = self.moves.len();
        let earlier = self.seen.entry(self.hash).or_default();
        let candidates = earlier.clone();
        earlier.push(step);
        if candidates.is_empty() {
            return None;
        }
        // Hash hit: confirm on the exact type pattern.
        let key = state_key(types, &self.p);
        let mut q = self.initial.clone();
        let mut at = 0;
        for &i in &candidates {
            while at < i {
                apply_in_place(&mut q, self.moves[at].kind).expect("recorded move replays");
                at += 1;
            }
            if state_key(types, &q) == key {
                return Some(Verdict::CycleDetected { first_repeat_index: i });
            }
        }
        None
    }

    fn evaluate(&self, kind: MoveKind) -> Move {
        evaluate_move(self.game, &self.p, kind).expect("engine only proposes valid moves")
    }

    fn finish(self, verdict: Verdict, seed: u64, rounds: usize) -> RunTrace {
        RunTrace { initial: self.initial, moves: self.moves, verdict, seed, rounds, final_placement: self.p }
    }

    /// First improving option for `a` in a uniformly random scan.
    fn random_option(&self, a: AgentId, order: &mut [usize], rng: &mut ChaCha8Rng) -> Option<MoveKind> {
        let game = self.game;
        let n = order.len();
        match game.config.mode {
            MoveMode::Swap => {
                let ta = game.types.type_of(a);
                for i in 0..n {
                    let j = rng.gen_range(i..n);
                    order.swap(i, j);
                    let b = order[i];
                    if b != a && self.discontent[b] && game.types.type_of(b) != ta && swap_improves(game, &self.p, a, b)
                    {
                        return Some(MoveKind::Swap(a, b));
                    }
                }
                None
            }
            MoveMode::Jump => {
                let now = game.standing(&self.p, a);
                let n = self.vacant.len();
                for i in 0..n {
                    let j = rng.gen_range(i..n);
                    order.swap(i, j);
                    let v = self.vacant[order[i]];
                    if jump_standing(game, &self.p, a, v) > now {
                        return Some(MoveKind::Jump(a, v));
                    }
                }
                None
            }
        }
    }
}

/// Runs improving response dynamics from `p0` until the placement is stable,
/// a state repeats, the step cap is hit or the script ends. `max_steps`
/// defaults to ten times the edge count.
pub fn run_ird(
    game: &Game,
    p0: &Placement,
    seed: u64,
    max_steps: Option<usize>,
    schedule: &Schedule,
) -> Result<RunTrace, DynamicsError> {
    p0.validate(game.graph, game.types, game.config.mode)?;
    let cap = max_steps.unwrap_or_else(|| default_max_steps(game));
    let mut run = Runner::new(game, p0);
    match schedule {
        Schedule::Scripted(script) => {
            for (step, &kind) in script.iter().enumerate() {
                let m = evaluate_move(game, &run.p, kind).map_err(|e| DynamicsError::ScriptViolation {
                    step,
                    kind,
                    detail: e.to_string(),
                })?;
                if !m.is_improving() {
                    let detail = match m.partner_costs {
                        Some((bb, ba)) => format!("costs {} -> {} and {bb} -> {ba}", m.cost_before_a, m.cost_after_a),
                        None => format!("cost {} -> {}", m.cost_before_a, m.cost_after_a),
                    };
                    return Err(DynamicsError::ScriptViolation { step, kind, detail });
                }
                if let Some(v) = run.execute(m) {
                    return Ok(run.finish(v, seed, 0));
                }
            }
            Ok(run.finish(Verdict::ScriptExhausted, seed, 0))
        }
        Schedule::CanonicalFirst => loop {
            let next = first_canonical(game, &run.p, &run.discontent_list());
            let Some(kind) = next else {
                let steps = run.moves.len();
                return Ok(run.finish(Verdict::Converged { steps, rounds: steps }, seed, steps));
            };
            if run.moves.len() >= cap {
                let steps = run.moves.len();
                return Ok(run.finish(Verdict::StepCapReached, seed, steps));
            }
            let m = run.evaluate(kind);
            if let Some(v) = run.execute(m) {
                let steps = run.moves.len();
                return Ok(run.finish(v, seed, steps));
            }
        },
        Schedule::RandomFirstImprovement => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = Vec::new();
            let mut rounds = 0;
            loop {
                let mut active = run.discontent_list();
                active.shuffle(&mut rng);
                let before = run.moves.len();
                for a in active {
                    if !run.discontent[a] {
                        continue;
                    }
                    if run.moves.len() >= cap {
                        let verdict = if is_stable(game, &run.p) {
                            let steps = run.moves.len();
                            Verdict::Converged { steps, rounds: rounds + usize::from(steps > before) }
                        } else {
                            Verdict::StepCapReached
                        };
                        return Ok(run.finish(verdict, seed, rounds));
                    }
                    let pool = match game.config.mode {
                        MoveMode::Swap => run.p.agent_count(),
                        MoveMode::Jump => run.vacant.len(),
                    };
                    if order.len() != pool {
                        order = (0..pool).collect();
                    }
                    if let Some(kind) = run.random_option(a, &mut order, &mut rng) {
                        let m = run.evaluate(kind);
                        if let Some(v) = run.execute(m) {
                            return Ok(run.finish(v, seed, rounds + 1));
                        }
                    }
                }
                if run.moves.len() == before {
                    let steps = run.moves.len();
                    return Ok(run.finish(Verdict::Converged { steps, rounds }, seed, rounds));
                }
                rounds += 1;
            }
        }
    }
}
