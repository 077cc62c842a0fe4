//! Cliques and stable sets from anticomplete splits.
//!
//! [`eh_recursion`] repeatedly takes a sparse (or co-sparse) set `X`, and
//! either hands `G[X]` to a base solver when it is coherent or recurses into
//! an anticomplete pair of `G[X]`. Stable sets of the two halves are combined
//! by disjoint union and the larger clique is kept; on the complement side the
//! roles of cliques and stable sets swap.
//!
//! The sparse set comes from [`rodl_split_heuristic`], a verified heuristic.
//! Nothing guarantees it is large, so the size bound is reported through
//! [`EhResult::claim`] rather than assumed.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::coherence::{check_coherence, heuristic_heavy_pair, exact_heavy_pair, CoherenceConfig, Verdict, Violation};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::{clique_and_stable_exact, BruteOutcome, CliqueStable};
use crate::{MassedGraph, Rational, VertexSet};

/// Which of `G[X]`, `Ḡ[X]` is sparse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Direct,
    Complement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub set: VertexSet,
    pub side: Side,
}

/// True when every vertex of `X` has at most `ε|X|` neighbours in `X` on the
/// given side.
pub fn split_holds(g: &Graph, x: &VertexSet, side: Side, eps: &Rational) -> bool {
    let bound = eps * Rational::from_integer(BigInt::from(x.len()));
    x.iter().all(|v| Rational::from_integer(BigInt::from(side_degree(g, x, v, side))) <= bound)
}

fn side_degree(g: &Graph, x: &VertexSet, v: usize, side: Side) -> usize {
    let d = g.neighbours(v).intersection(x).len();
    match side {
        Side::Direct => d,
        Side::Complement => x.len() - 1 - d,
    }
}

/// Looks for a large `X` such that in `G[X]` or `Ḡ[X]` every vertex has
/// degree at most `ε|X|`.
///
/// For each side: peel a maximum-degree vertex until the condition holds,
/// then add back outside vertices while it keeps holding, for at most
/// `effort` passes. The larger side wins, `Direct` on ties. Returns `None`
/// when only singletons qualify.
pub fn rodl_split_heuristic(g: &Graph, eps: &Rational, effort: usize) -> Option<Split> {
    let mut best: Option<Split> = None;
    for side in [Side::Direct, Side::Complement] {
        let x = grow(g, peel(g, side, eps), side, eps, effort);
        if x.len() >= 2 && best.as_ref().is_none_or(|b| x.len() > b.set.len()) {
            best = Some(Split { set: x, side });
        }
    }
    let split = best?;
    assert!(split_holds(g, &split.set, split.side, eps), "split failed its degree scan");
    Some(split)
}

fn peel(g: &Graph, side: Side, eps: &Rational) -> VertexSet {
    let mut x = g.vertices();
    while !x.is_empty() && !split_holds(g, &x, side, eps) {
        let worst = x
            .iter()
            .max_by_key(|&v| (side_degree(g, &x, v, side), std::cmp::Reverse(v)))
            .expect("nonempty");
        x.remove(worst);
    }
    x
}

fn grow(g: &Graph, mut x: VertexSet, side: Side, eps: &Rational, effort: usize) -> VertexSet {
    for _ in 0..effort {
        let mut changed = false;
        for v in 0..g.n() {
            if x.contains(v) {
                continue;
            }
            x.insert(v);
            if split_holds(g, &x, side, eps) {
                changed = true;
            } else {
                x.remove(v);
            }
        }
        if !changed {
            break;
        }
    }
    x
}

/// How a node of the recursion was resolved. Vertex ids are those of the
/// input graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// Solved exactly below the base threshold.
    Exact,
    /// `G[X]` (on `side`) was coherent and the base solver answered.
    CoherentBase { side: Side, x: Vec<usize>, heuristic: bool },
    /// `G[X]` (on `side`) had an anticomplete pair `A`, `B`; the children
    /// are the recursions on `A` and on `B`.
    Pair { side: Side, x: Vec<usize>, a: Vec<usize>, b: Vec<usize> },
    /// Nothing applied; greedy clique and stable set.
    Fallback { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub vertices: Vec<usize>,
    #[serde(flatten)]
    pub event: Event,
    pub clique: Vec<usize>,
    pub stable: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    /// True when some node below (or at) this one fell back.
    pub fn has_fallback(&self) -> bool {
        matches!(self.event, Event::Fallback { .. }) || self.children.iter().any(TraceNode::has_fallback)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EhResult {
    pub clique: Vec<usize>,
    pub stable: Vec<usize>,
    /// The exponent `c` that was asked for, as text.
    pub c: String,
    /// Set when every node was resolved by an exact solve, a coherent base or
    /// a split, and `|clique|·|stable| ≥ |G|^c` was checked exactly.
    pub claim: bool,
    pub trace: TraceNode,
}

#[derive(Clone, Debug)]
pub struct EhConfig {
    /// Graphs with at most this many vertices are solved exactly.
    pub n0: usize,
    /// Node budget for each exact clique and stable set search.
    pub node_budget: u64,
    pub coherence: CoherenceConfig,
}

impl Default for EhConfig {
    fn default() -> Self {
        EhConfig { n0: 40, node_budget: 1 << 22, coherence: CoherenceConfig::default() }
    }
}

/// Base solver for a coherent sparse side: gets `G[X]` (complemented on the
/// complement side) and returns a clique and a stable set in its own ids.
pub type BaseSolver<'a> = &'a (dyn Fn(&Graph) -> Option<CliqueStable> + Sync);
/// Splitter: `(G, ε) ↦ X`.
pub type Splitter<'a> = &'a (dyn Fn(&Graph, &Rational) -> Option<Split> + Sync);

/// Base solver that solves exactly when `G` has at most 60 vertices.
pub fn exact_base(node_budget: u64) -> impl Fn(&Graph) -> Option<CliqueStable> + Sync {
    move |g: &Graph| match clique_and_stable_exact(g, node_budget) {
        Ok(BruteOutcome::Found { value }) => Some(value),
        _ => None,
    }
}

/// Runs the recursion on `g` and checks `|clique|·|stable| ≥ |G|^c`.
pub fn eh_recursion(
    g: &Graph,
    eps: &Rational,
    c: &Rational,
    base: BaseSolver<'_>,
    splitter: Splitter<'_>,
    cfg: &EhConfig,
) -> Result<EhResult> {
    if !c.is_positive() || *c > Rational::one() {
        return Err(Error::Precondition(format!("c must lie in (0, 1], got {c}")));
    }
    if !eps.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let rec = Rec { g, eps, base, splitter, cfg };
    let trace = rec.solve(&all)?;
    verify_clique_stable(g, &trace.clique, &trace.stable)?;
    let claim = !trace.has_fallback() && product_bound_holds(trace.clique.len(), trace.stable.len(), g.n(), c);
    Ok(EhResult { clique: trace.clique.clone(), stable: trace.stable.clone(), c: c.to_string(), claim, trace })
}

/// Edge scan of both witnesses.
pub fn verify_clique_stable(g: &Graph, clique: &[usize], stable: &[usize]) -> Result<()> {
    for (i, &u) in clique.iter().enumerate() {
        for &v in &clique[i + 1..] {
            if u == v || !g.has_edge(u, v) {
                return Err(Error::Invalid(format!("clique vertices {u} and {v} are not adjacent")));
            }
        }
    }
    for (i, &u) in stable.iter().enumerate() {
        for &v in &stable[i + 1..] {
            if u == v || g.has_edge(u, v) {
                return Err(Error::Invalid(format!("stable vertices {u} and {v} are adjacent")));
            }
        }
    }
    Ok(())
}

/// `(ω·α)^q ≥ n^p` for `c = p/q`, in integers.
pub fn product_bound_holds(omega: usize, alpha: usize, n: usize, c: &Rational) -> bool {
    if n <= 1 {
        return omega * alpha >= n;
    }
    let (Some(p), Some(q)) = (c.numer().to_u32(), c.denom().to_u32()) else {
        return false;
    };
    let lhs = num_traits::pow(BigInt::from(omega * alpha), q as usize);
    let rhs = num_traits::pow(BigInt::from(n), p as usize);
    lhs >= rhs
}

struct Rec<'a> {
    g: &'a Graph,
    eps: &'a Rational,
    base: BaseSolver<'a>,
    splitter: Splitter<'a>,
    cfg: &'a EhConfig,
}

impl Rec<'_> {
    fn solve(&self, verts: &[usize]) -> Result<TraceNode> {
        let node = |event, clique: Vec<usize>, stable: Vec<usize>, children| TraceNode {
            vertices: verts.to_vec(),
            event,
            clique,
            stable,
            children,
        };
        if verts.is_empty() {
            return Ok(node(Event::Exact, vec![], vec![], vec![]));
        }
        let (local, back) = self.g.induced_subgraph(&self.g.set_of(verts.iter().copied()))?;
        let lift = |ids: &[usize]| -> Vec<usize> {
            let mut out: Vec<usize> = ids.iter().map(|&i| back[i]).collect();
            out.sort_unstable();
            out
        };
        if local.n() <= self.cfg.n0 {
            return Ok(match clique_and_stable_exact(&local, self.cfg.node_budget)? {
                BruteOutcome::Found { value } => node(Event::Exact, lift(&value.clique), lift(&value.stable), vec![]),
                _ => {
                    let (k, s) = greedy(&local);
                    node(Event::Fallback { reason: "exact budget exhausted".into() }, lift(&k), lift(&s), vec![])
                }
            });
        }
        let Some(split) = (self.splitter)(&local, self.eps) else {
            let (k, s) = greedy(&local);
            return Ok(node(Event::Fallback { reason: "no split".into() }, lift(&k), lift(&s), vec![]));
        };
        // Work in the sparse orientation; cliques and stable sets swap back
        // on the complement side.
        let sparse = match split.side {
            Side::Direct => local.clone(),
            Side::Complement => local.complement(),
        };
        let (hx, xback) = sparse.induced_subgraph(&split.set)?;
        let x_ids = lift(&split.set.to_vec());
        let to_local = |ids: &[usize]| -> Vec<usize> { ids.iter().map(|&i| xback[i]).collect() };
        let orient = |k: Vec<usize>, s: Vec<usize>| match split.side {
            Side::Direct => (k, s),
            Side::Complement => (s, k),
        };
        let mg = MassedGraph::<Rational>::uniform(hx.clone());
        let verdict = check_coherence(&mg, self.eps, None, &self.cfg.coherence)?;
        let pair = match &verdict {
            Verdict::Violated(Violation::AnticompletePair { a, b, .. }) => Some((a.clone(), b.clone())),
            Verdict::Violated(_) => self.pair_only(&mg),
            Verdict::Coherent { .. } => None,
        };
        if let Some((a, b)) = pair {
            let a_ids = lift(&to_local(&a.to_vec()));
            let b_ids = lift(&to_local(&b.to_vec()));
            let (ta, tb) = rayon::join(|| self.solve(&a_ids), || self.solve(&b_ids));
            let (ta, tb) = (ta?, tb?);
            // In the sparse orientation A and B are anticomplete: stable sets
            // add up and the larger clique survives.
            let (ka, sa) = orient(ta.clique.clone(), ta.stable.clone());
            let (kb, sb) = orient(tb.clique.clone(), tb.stable.clone());
            let k = if ka.len() >= kb.len() { ka } else { kb };
            let mut s = sa;
            s.extend(sb);
            s.sort_unstable();
            let (clique, stable) = orient(k, s);
            let event = Event::Pair { side: split.side, x: x_ids, a: a_ids, b: b_ids };
            return Ok(node(event, clique, stable, vec![ta, tb]));
        }
        if let Verdict::Coherent { heuristic } = verdict {
            if let Some(cs) = (self.base)(&hx) {
                verify_clique_stable(&hx, &cs.clique, &cs.stable)?;
                let (k, s) = orient(lift(&to_local(&cs.clique)), lift(&to_local(&cs.stable)));
                return Ok(node(Event::CoherentBase { side: split.side, x: x_ids, heuristic }, k, s, vec![]));
            }
        }
        let (k, s) = greedy(&local);
        Ok(node(Event::Fallback { reason: "no pair and no base".into() }, lift(&k), lift(&s), vec![]))
    }

    /// Pair search when a local bullet already failed.
    fn pair_only(&self, mg: &MassedGraph<Rational>) -> Option<(VertexSet, VertexSet)> {
        if mg.n() <= self.cfg.coherence.exact_pair_limit {
            exact_heavy_pair(mg, self.eps)
        } else {
            heuristic_heavy_pair(mg, self.eps, &self.cfg.coherence)
        }
    }
}

/// Greedy clique (highest degree first) and greedy stable set (lowest first).
fn greedy(g: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut clique: Vec<usize> = Vec::new();
    for &v in &order {
        if clique.iter().all(|&u| g.has_edge(u, v)) {
            clique.push(v);
        }
    }
    let mut stable: Vec<usize> = Vec::new();
    for &v in order.iter().rev() {
        if stable.iter().all(|&u| !g.has_edge(u, v)) {
            stable.push(v);
        }
    }
    clique.sort_unstable();
    stable.sort_unstable();
    (clique, stable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn product_bound_is_exact_at_c_one() {
        assert!(product_bound_holds(1, 7, 7, &Rational::one()));
        assert!(!product_bound_holds(1, 6, 7, &Rational::one()));
        assert!(product_bound_holds(2, 2, 5, &q(1, 2)));
        assert!(!q(0, 1).is_positive());
    }

    #[test]
    fn greedy_is_valid() {
        let g = named::cycle(9);
        let (k, s) = greedy(&g);
        verify_clique_stable(&g, &k, &s).unwrap();
        assert_eq!(k.len(), 2);
        assert_eq!(s.len(), 4);
    }
}
