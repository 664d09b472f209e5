//! Exact optimal placements: exhaustive search over type patterns, and the
//! subset-sum algorithm for two types on disjoint rings.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::EMPTY;
use crate::graph::{ring_union, Graph, NodeId};
use crate::model::{
    tally_with, Aggregation, Game, GameConfig, ModelError, MoveMode, Placement, Rational, Tau, TypeAssignment, TypeId,
};

/// Largest number of candidate patterns the exhaustive search will visit.
pub const BRUTE_FORCE_CAP: u128 = 10_000_000;

/// Memo entries allowed while counting patterns before giving up.
const COUNT_MEMO_LIMIT: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OptimalError {
    #[error("search space too large: more than {cap} patterns")]
    TooLarge { cap: u128 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BruteForce,
    SubsetSumDp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::BruteForce => "BRUTE_FORCE",
            Method::SubsetSumDp => "SUBSET_SUM_DP",
        })
    }
}

/// How the ring algorithm reached its placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingCase {
    /// Selected rings hold exactly the smaller type.
    Segregated,
    /// Selected rings hold one more node than the smaller type; one of them
    /// goes to the larger type.
    Intruder,
    /// Selected rings hold one node fewer; the spare agent of the smaller
    /// type goes into an unselected ring.
    Outlier,
    /// No witness: rings are filled in order with consecutive agents.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingCertificate {
    /// The smaller type, whose count was the subset-sum target.
    pub targeted_type: TypeId,
    pub target: usize,
    pub case: RingCase,
    /// Indices into the ring list.
    pub selected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalResult {
    /// Node-to-type pattern; `EMPTY` marks vacancies.
    pub pattern: Vec<u32>,
    pub placement: Placement,
    pub cost: usize,
    pub method: Method,
    pub certificate: Option<RingCertificate>,
}

impl OptimalResult {
    pub fn summary(&self) -> String {
        format!("{} {}", self.method, self.cost)
    }
}

/// Placement realising `pattern`: each type's agents, in id order, go to
/// that type's nodes in node order.
pub fn placement_from_pattern(types: &TypeAssignment, pattern: &[u32]) -> Result<Placement, ModelError> {
    let mut slots: Vec<Vec<NodeId>> = vec![Vec::new(); types.k()];
    for (v, &l) in pattern.iter().enumerate() {
        if l != EMPTY {
            slots[l as usize].push(v);
        }
    }
    let mut next = vec![0; types.k()];
    let mut node_of = Vec::with_capacity(types.agent_count());
    for a in 0..types.agent_count() {
        let t = types.type_of(a);
        let v = *slots[t].get(next[t]).ok_or(ModelError::Unplaced(a))?;
        next[t] += 1;
        node_of.push(v);
    }
    Placement::new(node_of, pattern.len())
}

fn pattern_cost(g: &Graph, k: usize, pattern: &[u32], aggregation: Aggregation, tau: Tau) -> usize {
    (0..pattern.len())
        .filter(|&v| pattern[v] != EMPTY)
        .filter(|&v| {
            let t = tally_with(g, k, v, pattern[v] as usize, |w| (pattern[w] != EMPTY).then(|| pattern[w] as usize));
            !t.standing(aggregation, tau).is_content(tau)
        })
        .count()
}

/// Groups nodes into twin classes: first equal closed neighbourhoods, then
/// equal open neighbourhoods among what is left. Any permutation inside a
/// class is an automorphism.
pub fn twin_classes(g: &Graph) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    let mut by_closed: HashMap<Vec<NodeId>, Vec<NodeId>> = HashMap::new();
    for v in 0..n {
        let mut key = g.neighbors(v).to_vec();
        key.push(v);
        key.sort_unstable();
        by_closed.entry(key).or_default().push(v);
    }
    let mut classes: Vec<Vec<NodeId>> = Vec::new();
    let mut singles = Vec::new();
    for c in by_closed.into_values() {
        if c.len() > 1 {
            classes.push(c);
        } else {
            singles.push(c[0]);
        }
    }
    let mut by_open: HashMap<&[NodeId], Vec<NodeId>> = HashMap::new();
    for &v in &singles {
        by_open.entry(g.neighbors(v)).or_default().push(v);
    }
    classes.extend(by_open.into_values());
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort();
    classes
}

/// All vectors with entries `<= bounds[i]` summing to `size`.
fn compositions(size: usize, bounds: &[usize]) -> Vec<Vec<usize>> {
    fn go(i: usize, left: usize, bounds: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == bounds.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let room: usize = bounds[i + 1..].iter().sum();
        let lo = left.saturating_sub(room);
        for c in lo..=bounds[i].min(left) {
            cur.push(c);
            go(i + 1, left - c, bounds, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, size, bounds, &mut Vec::new(), &mut out);
    out
}

fn count_patterns(classes: &[Vec<NodeId>], labels: &[usize]) -> Option<u128> {
    fn go(
        ci: usize,
        rem: &[usize],
        classes: &[Vec<NodeId>],
        memo: &mut HashMap<(usize, Vec<usize>), u128>,
    ) -> Option<u128> {
        if ci == classes.len() {
            return Some(1);
        }
        if let Some(&c) = memo.get(&(ci, rem.to_vec())) {
            return Some(c);
        }
        if memo.len() > COUNT_MEMO_LIMIT {
            return None;
        }
        let mut total: u128 = 0;
        for c in compositions(classes[ci].len(), rem) {
            let next: Vec<usize> = rem.iter().zip(&c).map(|(r, x)| r - x).collect();
            total = total.saturating_add(go(ci + 1, &next, classes, memo)?);
        }
        memo.insert((ci, rem.to_vec()), total);
        Some(total)
    }
    go(0, labels, classes, &mut HashMap::new())
}

struct Search<'a> {
    g: &'a Graph,
    classes: Vec<Vec<NodeId>>,
    k: usize,
    aggregation: Aggregation,
    tau: Tau,
    /// Skip choices whose type-0/type-1 flip comes earlier.
    flip_symmetric: bool,
}

type Best = Option<(usize, Vec<u32>)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(if (y.0, &y.1) < (x.0, &x.1) { y } else { x }),
    }
}

impl Search<'_> {
    fn fill(&self, ci: usize, c: &[usize], pattern: &mut [u32]) {
        let mut nodes = self.classes[ci].iter();
        for (label, &cnt) in c.iter().enumerate() {
            let l = if label == self.k { EMPTY } else { label as u32 };
            for &v in nodes.by_ref().take(cnt) {
                pattern[v] = l;
            }
        }
    }

    fn flipped_is_smaller(chosen: &[Vec<usize>]) -> bool {
        for c in chosen {
            let mut f = c.clone();
            f.swap(0, 1);
            match f.cmp(c) {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
        }
        false
    }

    fn dfs(
        &self,
        ci: usize,
        rem: &mut Vec<usize>,
        pattern: &mut Vec<u32>,
        chosen: &mut Vec<Vec<usize>>,
        best: &mut Best,
    ) {
        if ci == self.classes.len() {
            if self.flip_symmetric && Self::flipped_is_smaller(chosen) {
                return;
            }
            let cost = pattern_cost(self.g, self.k, pattern, self.aggregation, self.tau);
            if best.as_ref().is_none_or(|b| (cost, pattern.as_slice()) < (b.0, b.1.as_slice())) {
                *best = Some((cost, pattern.clone()));
            }
            return;
        }
        for c in compositions(self.classes[ci].len(), rem) {
            for (r, x) in rem.iter_mut().zip(&c) {
                *r -= x;
            }
            self.fill(ci, &c, pattern);
            chosen.push(c);
            self.dfs(ci + 1, rem, pattern, chosen, best);
            let c = chosen.pop().expect("pushed above");
            for (r, x) in rem.iter_mut().zip(&c) {
                *r += x;
            }
        }
    }
}

/// Minimum number of discontent agents over all placements of `types` on
/// `g`. Only type patterns up to twin symmetry are enumerated; with
/// `symmetry` and two equally sized types, a pattern and its colour flip
/// are visited once. Ties go to the lexicographically smallest pattern.
pub fn brute_force_optimal(
    g: &Graph,
    types: &TypeAssignment,
    config: GameConfig,
    symmetry: bool,
) -> Result<OptimalResult, OptimalError> {
    let (n, agents) = (g.node_count(), types.agent_count());
    match config.mode {
        MoveMode::Swap if agents != n => return Err(ModelError::SwapNeedsFullOccupancy { agents, nodes: n }.into()),
        MoveMode::Jump if agents >= n => return Err(ModelError::JumpNeedsVacancy { agents, nodes: n }.into()),
        _ => {}
    }
    let k = types.k();
    let mut labels = types.counts().to_vec();
    if config.mode == MoveMode::Jump {
        labels.push(n - agents);
    }
    let flip_symmetric = symmetry && k >= 2 && labels[0] == labels[1];
    let search =
        Search { g, classes: twin_classes(g), k, aggregation: config.aggregation, tau: config.tau, flip_symmetric };
    let total = count_patterns(&search.classes, &labels).ok_or(OptimalError::TooLarge { cap: BRUTE_FORCE_CAP })?;
    let effective = if flip_symmetric { total.div_ceil(2) } else { total };
    if effective > BRUTE_FORCE_CAP {
        return Err(OptimalError::TooLarge { cap: BRUTE_FORCE_CAP });
    }
    let best = if search.classes.is_empty() {
        Some((0, Vec::new()))
    } else {
        compositions(search.classes[0].len(), &labels)
            .into_par_iter()
            .map(|c| {
                let mut rem: Vec<usize> = labels.iter().zip(&c).map(|(r, x)| r - x).collect();
                let mut pattern = vec![EMPTY; n];
                search.fill(0, &c, &mut pattern);
                let mut best = None;
                search.dfs(1, &mut rem, &mut pattern, &mut vec![c], &mut best);
                best
            })
            .reduce(|| None, better)
    };
    let (cost, pattern) = best.ok_or_else(|| OptimalError::InvalidInstance("no placement exists".into()))?;
    let placement = placement_from_pattern(types, &pattern)?;
    debug_assert_eq!(Game::new(g, types, config).placement_cost(&placement), cost);
    Ok(OptimalResult { pattern, placement, cost, method: Method::BruteForce, certificate: None })
}

/// One subset of `values` (as indices) summing to `target`, if any.
pub fn subset_sum(values: &[usize], target: usize) -> Option<Vec<usize>> {
    // from[s] = (item, previous sum) for the first way sum s was reached.
    let mut from: Vec<Option<(usize, usize)>> = vec![None; target + 1];
    let mut reached = vec![false; target + 1];
    reached[0] = true;
    for (i, &v) in values.iter().enumerate() {
        if v > target {
            continue;
        }
        for s in (0..=target - v).rev() {
            if reached[s] && !reached[s + v] {
                reached[s + v] = true;
                from[s + v] = Some((i, s));
            }
        }
    }
    if !reached[target] {
        return None;
    }
    let mut picked = Vec::new();
    let mut s = target;
    while let Some((i, prev)) = from[s] {
        picked.push(i);
        s = prev;
    }
    picked.sort_unstable();
    Some(picked)
}

/// Optimal two-type swap placement on disjoint rings for `tau > 1/2`, where
/// an agent is content exactly when both ring neighbours share her type.
pub fn two_type_2regular_optimal(
    ring_sizes: &[usize],
    n1: usize,
    n2: usize,
    tau: Tau,
) -> Result<OptimalResult, OptimalError> {
    let n: usize = ring_sizes.iter().sum();
    if n != n1 + n2 {
        return Err(OptimalError::InvalidInstance(format!("rings hold {n} nodes but n1 + n2 = {}", n1 + n2)));
    }
    if ring_sizes.iter().any(|&r| r < 3) {
        return Err(OptimalError::InvalidInstance("every ring needs at least 3 nodes".into()));
    }
    if tau.value() <= Rational::new(1, 2) {
        return Err(OptimalError::InvalidInstance(format!("tau must exceed 1/2, got {tau}")));
    }
    let (small, large): (u32, u32) = if n1 <= n2 { (0, 1) } else { (1, 0) };
    let t = n1.min(n2);
    let starts: Vec<usize> = ring_sizes
        .iter()
        .scan(0, |acc, &r| {
            let s = *acc;
            *acc += r;
            Some(s)
        })
        .collect();
    let mut pattern = vec![large; n];
    let fill = |pattern: &mut Vec<u32>, rings: &[usize]| {
        for &i in rings {
            pattern[starts[i]..starts[i] + ring_sizes[i]].fill(small);
        }
    };
    let (case, selected) = if let Some(sel) = subset_sum(ring_sizes, t) {
        fill(&mut pattern, &sel);
        (RingCase::Segregated, sel)
    } else if let Some(sel) = subset_sum(ring_sizes, t + 1) {
        fill(&mut pattern, &sel);
        pattern[starts[sel[0]]] = large;
        (RingCase::Intruder, sel)
    } else if let Some(sel) = t.checked_sub(1).and_then(|s| subset_sum(ring_sizes, s)) {
        fill(&mut pattern, &sel);
        let spare = (0..ring_sizes.len()).find(|i| !sel.contains(i)).expect("selected rings hold fewer than t nodes");
        pattern[starts[spare]] = small;
        (RingCase::Outlier, sel)
    } else {
        let mut left = t;
        let mut sel = Vec::new();
        for (i, &r) in ring_sizes.iter().enumerate() {
            if left == 0 {
                break;
            }
            let take = r.min(left);
            pattern[starts[i]..starts[i] + take].fill(small);
            left -= take;
            sel.push(i);
        }
        (RingCase::Greedy, sel)
    };
    let g = ring_union(ring_sizes).map_err(|e| OptimalError::InvalidInstance(e.to_string()))?;
    let types = TypeAssignment::from_counts(&[n1, n2])?;
    let config = GameConfig::new(tau, MoveMode::Swap, Aggregation::OneVsAll);
    let placement = placement_from_pattern(&types, &pattern)?;
    let cost = Game::new(&g, &types, config).placement_cost(&placement);
    Ok(OptimalResult {
        pattern,
        placement,
        cost,
        method: Method::SubsetSumDp,
        certificate: Some(RingCertificate { targeted_type: small as TypeId, target: t, case, selected }),
    })
}

/// Text block describing a result: summary line, then certificate if any.
pub fn describe(result: &OptimalResult) -> String {
    let mut out = result.summary();
    out.push('\n');
    if let Some(c) = &result.certificate {
        writeln!(
            out,
            "targeted type {} (count {}), case {:?}, rings {:?}",
            c.targeted_type, c.target, c.case, c.selected
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::moore_torus;

    fn tau(n: i64, d: i64) -> Tau {
        Tau::from_fraction(n, d).unwrap()
    }

    fn swap(t: Tau) -> GameConfig {
        GameConfig::new(t, MoveMode::Swap, Aggregation::OneVsAll)
    }

    #[test]
    fn subset_sum_examples() {
        assert_eq!(subset_sum(&[3, 4, 5], 8), Some(vec![0, 2]));
        assert_eq!(subset_sum(&[4, 5], 3), None);
        assert_eq!(subset_sum(&[3, 3, 4], 6), Some(vec![0, 1]));
        assert_eq!(subset_sum(&[3, 3, 4], 0), Some(vec![]));
    }

    #[test]
    fn six_ring_blocks() {
        let g = ring_union(&[6]).unwrap();
        let t = TypeAssignment::from_counts(&[3, 3]).unwrap();
        for sym in [false, true] {
            assert_eq!(brute_force_optimal(&g, &t, swap(tau(3, 5)), sym).unwrap().cost, 4);
        }
        let g = ring_union(&[3, 3]).unwrap();
        assert_eq!(brute_force_optimal(&g, &t, swap(tau(3, 5)), false).unwrap().cost, 0);
    }

    #[test]
    fn ring_algorithm_examples() {
        let r = two_type_2regular_optimal(&[3, 3, 4], 6, 4, tau(3, 5)).unwrap();
        assert_eq!(r.cost, 0);
        let c = r.certificate.unwrap();
        assert_eq!(c.targeted_type, 1);
        assert_eq!(c.selected, vec![2]);

        let r = two_type_2regular_optimal(&[4, 5], 3, 6, tau(3, 5)).unwrap();
        assert_eq!((r.cost, r.certificate.unwrap().case), (3, RingCase::Intruder));
        let r = two_type_2regular_optimal(&[5, 5], 3, 7, tau(3, 5)).unwrap();
        assert_eq!((r.cost, r.certificate.unwrap().case), (4, RingCase::Greedy));
        let r = two_type_2regular_optimal(&[3, 4], 5, 2, tau(3, 5)).unwrap();
        assert_eq!(r.cost, 3);
        assert!(two_type_2regular_optimal(&[3, 4], 3, 3, tau(3, 5)).is_err());
        assert!(two_type_2regular_optimal(&[3, 4], 3, 4, tau(1, 2)).is_err());
    }

    #[test]
    fn outlier_case_beats_greedy() {
        // Rings 3,4,4 with five agents of one type: no subset sums to 5 or 6,
        // but 4 does, and one spare agent costs three discontent agents.
        let r = two_type_2regular_optimal(&[3, 4, 4], 5, 6, tau(3, 5)).unwrap();
        assert_eq!((r.cost, r.certificate.unwrap().case), (3, RingCase::Outlier));
        let g = ring_union(&[3, 4, 4]).unwrap();
        let t = TypeAssignment::from_counts(&[5, 6]).unwrap();
        assert_eq!(brute_force_optimal(&g, &t, swap(tau(3, 5)), false).unwrap().cost, 3);
    }

    #[test]
    fn twin_classes_on_small_graphs() {
        let g = ring_union(&[4]).unwrap();
        assert_eq!(twin_classes(&g), vec![vec![0, 2], vec![1, 3]]);
        let g = ring_union(&[3]).unwrap();
        assert_eq!(twin_classes(&g), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn jump_mode_counts_vacancies() {
        let g = ring_union(&[4]).unwrap();
        let t = TypeAssignment::from_counts(&[1, 1]).unwrap();
        let cfg = GameConfig::new(tau(1, 2), MoveMode::Jump, Aggregation::OneVsAll);
        let r = brute_force_optimal(&g, &t, cfg, false).unwrap();
        // On a 4-cycle two agents are either adjacent (pnr 0) or opposite
        // (isolated): both discontent either way.
        assert_eq!(r.cost, 2);
        assert_eq!(r.pattern.iter().filter(|&&l| l == EMPTY).count(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let g = moore_torus(10, 10).unwrap();
        let t = TypeAssignment::from_counts(&[50, 50]).unwrap();
        assert_eq!(
            brute_force_optimal(&g, &t, swap(tau(1, 4)), true),
            Err(OptimalError::TooLarge { cap: BRUTE_FORCE_CAP })
        );
    }

    #[test]
    fn pattern_round_trip() {
        let t = TypeAssignment::new(vec![1, 0, 1]).unwrap();
        let p = placement_from_pattern(&t, &[1, EMPTY, 0, 1]).unwrap();
        assert_eq!(p.nodes(), &[0, 2, 3]);
    }
}
