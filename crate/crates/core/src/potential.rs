//! Ordinal potentials for the one-vs-all games and a monotonicity monitor.

use num_traits::Zero;
use thiserror::Error;

use crate::dynamics::{DynamicsError, RunTrace};
use crate::graph::Graph;
use crate::model::{Placement, Rational, TypeAssignment};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PotentialError {
    #[error("the swap potential needs a fully occupied graph ({0} empty nodes)")]
    Vacancies(usize),
    #[error("edge weight c = {c} is outside (1/2 - 1/(2*{delta}), 1/2)")]
    CoefficientOutOfRange { c: Rational, delta: usize },
}

/// Number of edges whose endpoints hold agents of different types, i.e.
/// half the summed one-vs-all negative neighbourhoods.
pub fn ssg_potential(g: &Graph, t: &TypeAssignment, p: &Placement) -> Result<Rational, PotentialError> {
    if p.vacancy_count() > 0 {
        return Err(PotentialError::Vacancies(p.vacancy_count()));
    }
    let kind = |v| t.type_of(p.occupant(v).expect("fully occupied"));
    let count = g.edges().filter(|&(u, v)| kind(u) != kind(v)).count();
    Ok(Rational::from_integer(count as i64))
}

/// Weight `c` given to edges with exactly one empty endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeWeightScheme {
    c: Rational,
}

impl EdgeWeightScheme {
    pub fn new(c: Rational, delta: usize) -> Result<Self, PotentialError> {
        let s = Self { c };
        if s.admits(delta) {
            Ok(s)
        } else {
            Err(PotentialError::CoefficientOutOfRange { c, delta })
        }
    }

    /// Midpoint of the admissible interval: `1/2 - 1/(4 delta)`.
    pub fn default_for(delta: usize) -> Self {
        Self { c: Rational::new(1, 2) - Rational::new(1, 4 * delta.max(1) as i64) }
    }

    pub fn c(&self) -> Rational {
        self.c
    }

    pub fn admits(&self, delta: usize) -> bool {
        let half = Rational::new(1, 2);
        delta > 0 && self.c < half && self.c > half - Rational::new(1, 2 * delta as i64)
    }

    /// Guaranteed per-jump decrease under the convergence regime.
    pub fn min_jump_decrement(&self) -> Rational {
        Rational::from_integer(1) - self.c * 2
    }
}

/// Sum of edge weights: 1 for occupied edges joining different types, `c`
/// for edges with exactly one empty endpoint, 0 otherwise.
pub fn jsg_edge_potential(
    g: &Graph,
    t: &TypeAssignment,
    p: &Placement,
    scheme: EdgeWeightScheme,
) -> Result<Rational, PotentialError> {
    let delta = g.max_degree();
    if !scheme.admits(delta) {
        return Err(PotentialError::CoefficientOutOfRange { c: scheme.c, delta });
    }
    let kind = |v| p.occupant(v).map(|a| t.type_of(a));
    let (mut bichromatic, mut half_empty) = (0i64, 0i64);
    for (u, v) in g.edges() {
        match (kind(u), kind(v)) {
            (Some(x), Some(y)) if x != y => bichromatic += 1,
            (Some(_), None) | (None, Some(_)) => half_empty += 1,
            _ => {}
        }
    }
    Ok(Rational::from_integer(bichromatic) + scheme.c * half_empty)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneReport {
    pub monotone: bool,
    /// Smallest `value_before - value_after` over all moves; `None` for an empty trace.
    pub min_decrement: Option<Rational>,
    /// 1-based index of the first move that did not strictly decrease the potential.
    pub violation_step: Option<usize>,
    /// Potential of the initial state followed by the value after each move.
    pub values: Vec<Rational>,
}

/// Replays `trace` and checks that `potential` strictly drops at every move.
pub fn check_monotone<F>(trace: &RunTrace, potential: F) -> Result<MonotoneReport, DynamicsError>
where
    F: FnMut(&Placement) -> Rational,
{
    let values = trace.map_states(potential)?;
    let mut min_decrement: Option<Rational> = None;
    let mut violation_step = None;
    for (i, w) in values.windows(2).enumerate() {
        let d = w[0] - w[1];
        if d <= Rational::zero() && violation_step.is_none() {
            violation_step = Some(i + 1);
        }
        min_decrement = Some(min_decrement.map_or(d, |m| m.min(d)));
    }
    Ok(MonotoneReport { monotone: violation_step.is_none(), min_decrement, violation_step, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ring_union, Connectivity};

    #[test]
    fn ssg_potential_small_cases() {
        let g = ring_union(&[4]).unwrap();
        let t = TypeAssignment::new(vec![0, 1, 0, 1]).unwrap();
        let p = Placement::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(ssg_potential(&g, &t, &p).unwrap(), Rational::from_integer(4));
        let mono = TypeAssignment::new(vec![0, 0, 0, 0]).unwrap();
        assert_eq!(ssg_potential(&g, &mono, &p).unwrap(), Rational::zero());
        let partial = Placement::new(vec![0, 1], 4).unwrap();
        assert_eq!(
            ssg_potential(&g, &TypeAssignment::new(vec![0, 1]).unwrap(), &partial),
            Err(PotentialError::Vacancies(2))
        );
    }

    #[test]
    fn jsg_potential_small_cases() {
        let g = Graph::from_edges(2, [(0, 1)], Connectivity::Required).unwrap();
        let t = TypeAssignment::new(vec![0]).unwrap();
        let p = Placement::new(vec![0], 2).unwrap();
        let s = EdgeWeightScheme::default_for(1);
        assert_eq!(s.c(), Rational::new(1, 4));
        assert_eq!(jsg_edge_potential(&g, &t, &p, s).unwrap(), Rational::new(1, 4));

        let ring = ring_union(&[5]).unwrap();
        let one = TypeAssignment::new(vec![0; 5]).unwrap();
        let full = Placement::new((0..5).collect(), 5).unwrap();
        assert_eq!(jsg_edge_potential(&ring, &one, &full, EdgeWeightScheme::default_for(2)).unwrap(), Rational::zero());
    }

    #[test]
    fn edge_weight_interval() {
        let r = Rational::new;
        assert_eq!(EdgeWeightScheme::default_for(8).c(), r(15, 32));
        assert!(EdgeWeightScheme::new(r(15, 32), 8).is_ok());
        assert!(EdgeWeightScheme::new(r(7, 16), 8).is_err());
        assert!(EdgeWeightScheme::new(r(1, 2), 8).is_err());
        assert_eq!(EdgeWeightScheme::default_for(8).min_jump_decrement(), r(1, 16));
        let g = ring_union(&[4]).unwrap();
        let t = TypeAssignment::new(vec![0]).unwrap();
        let p = Placement::new(vec![0], 4).unwrap();
        let narrow = EdgeWeightScheme::new(r(1, 5), 1).unwrap();
        assert!(matches!(jsg_edge_potential(&g, &t, &p, narrow), Err(PotentialError::CoefficientOutOfRange { .. })));
    }
}
