//! Coherence predicates and their violations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mass::MassedGraph;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

/// A concrete reason a massed graph is not coherent at some threshold.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation<S: Scalar> {
    /// `μ({v}) ≥ ε`.
    HeavyVertex { v: usize, mass: S },
    /// `μ(N(v)) ≥ ε`.
    HeavyNeighbourhood { v: usize, mass: S },
    /// `μ(N^r[v]) ≥ ε`.
    HeavyBall { v: usize, r: usize, mass: S },
    /// Disjoint anticomplete `A`, `B` with `min(μ(A), μ(B)) ≥ ε`.
    AnticompletePair { a: VertexSet, b: VertexSet, mass_a: S, mass_b: S },
}

impl<S: Scalar> Violation<S> {
    pub fn heavy_vertex(mg: &MassedGraph<S>, v: usize) -> Self {
        Violation::HeavyVertex { v, mass: mg.mu_vertex(v) }
    }

    pub fn heavy_neighbourhood(mg: &MassedGraph<S>, v: usize) -> Self {
        Violation::HeavyNeighbourhood { v, mass: mg.mu_neighbourhood(v) }
    }

    pub fn heavy_ball(mg: &MassedGraph<S>, v: usize, r: usize) -> Self {
        Violation::HeavyBall { v, r, mass: mg.mu(&mg.graph.ball(v, r)) }
    }

    pub fn pair(mg: &MassedGraph<S>, a: VertexSet, b: VertexSet) -> Self {
        let (mass_a, mass_b) = (mg.mu(&a), mg.mu(&b));
        Violation::AnticompletePair { a, b, mass_a, mass_b }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Violation::HeavyVertex { .. } => "heavy-vertex",
            Violation::HeavyNeighbourhood { .. } => "heavy-neighbourhood",
            Violation::HeavyBall { .. } => "heavy-ball",
            Violation::AnticompletePair { .. } => "anticomplete-pair",
        }
    }

    /// The mass that is compared against `ε` (the smaller one for pairs).
    pub fn witness_mass(&self) -> S {
        match self {
            Violation::HeavyVertex { mass, .. }
            | Violation::HeavyNeighbourhood { mass, .. }
            | Violation::HeavyBall { mass, .. } => mass.clone(),
            Violation::AnticompletePair { mass_a, mass_b, .. } => S::min_of(mass_a, mass_b),
        }
    }

    /// Recomputes the stored masses from `mg` and checks the structure;
    /// used by the engine before it hands a violation out.
    pub fn holds(&self, mg: &MassedGraph<S>, eps: &S) -> bool {
        let g = &mg.graph;
        match self {
            Violation::HeavyVertex { v, mass } => {
                *v < mg.n() && mg.mu_vertex(*v) == *mass && *mass >= *eps
            }
            Violation::HeavyNeighbourhood { v, mass } => {
                *v < mg.n() && mg.mu_neighbourhood(*v) == *mass && *mass >= *eps
            }
            Violation::HeavyBall { v, r, mass } => {
                *v < mg.n() && mg.mu(&g.ball(*v, *r)) == *mass && *mass >= *eps
            }
            Violation::AnticompletePair { a, b, mass_a, mass_b } => {
                a.is_disjoint(b)
                    && g.anticomplete_unchecked(a, b)
                    && mg.mu(a) == *mass_a
                    && mg.mu(b) == *mass_b
                    && *mass_a >= *eps
                    && *mass_b >= *eps
            }
        }
    }

    /// Rewrites vertex ids through `back` (inner id to outer id) into a host
    /// with `n` vertices, recomputing masses in `outer`.
    pub fn lift(&self, back: &[usize], outer: &MassedGraph<S>) -> Self {
        let lift_set = |x: &VertexSet| VertexSet::from_iter_in(outer.n(), x.iter().map(|v| back[v]));
        match self {
            Violation::HeavyVertex { v, .. } => Violation::heavy_vertex(outer, back[*v]),
            Violation::HeavyNeighbourhood { v, .. } => Violation::heavy_neighbourhood(outer, back[*v]),
            Violation::HeavyBall { v, r, .. } => Violation::heavy_ball(outer, back[*v], *r),
            Violation::AnticompletePair { a, b, .. } => Violation::pair(outer, lift_set(a), lift_set(b)),
        }
    }
}

/// Outcome of a coherence check.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<S: Scalar> {
    /// No violation found. `heuristic` is set when the pair bullet was only
    /// searched heuristically.
    Coherent { heuristic: bool },
    Violated(Violation<S>),
}

impl<S: Scalar> Verdict<S> {
    pub fn violation(&self) -> Option<&Violation<S>> {
        match self {
            Verdict::Violated(v) => Some(v),
            Verdict::Coherent { .. } => None,
        }
    }

    pub fn is_coherent(&self) -> bool {
        matches!(self, Verdict::Coherent { .. })
    }
}

#[derive(Clone, Debug)]
pub struct CoherenceConfig {
    /// Largest `n` for which the pair bullet is decided exactly.
    pub exact_pair_limit: usize,
    pub seed: u64,
    /// Number of random restarts for the local search above the limit.
    pub restarts: usize,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        CoherenceConfig { exact_pair_limit: 15, seed: 0, restarts: 32 }
    }
}

/// Checks `ε`-coherence (`radius = None`) or `(ε, r)`-coherence.
pub fn check_coherence<S: Scalar>(
    mg: &MassedGraph<S>,
    eps: &S,
    radius: Option<usize>,
    cfg: &CoherenceConfig,
) -> Result<Verdict<S>> {
    if *eps <= S::zero() {
        return Err(Error::NonPositiveEpsilon);
    }
    if let Some(v) = find_heavy_local(mg, eps, radius) {
        return Ok(Verdict::Violated(v));
    }
    if mg.n() <= cfg.exact_pair_limit {
        return Ok(match exact_heavy_pair(mg, eps) {
            Some((a, b)) => Verdict::Violated(Violation::pair(mg, a, b)),
            None => Verdict::Coherent { heuristic: false },
        });
    }
    Ok(match heuristic_heavy_pair(mg, eps, cfg) {
        Some((a, b)) => Verdict::Violated(Violation::pair(mg, a, b)),
        None => Verdict::Coherent { heuristic: true },
    })
}

/// The vertex and neighbourhood bullets (or the ball bullet), lowest id first.
pub fn find_heavy_local<S: Scalar>(mg: &MassedGraph<S>, eps: &S, radius: Option<usize>) -> Option<Violation<S>> {
    for v in 0..mg.n() {
        match radius {
            None => {
                if mg.mu_vertex(v) >= *eps {
                    return Some(Violation::heavy_vertex(mg, v));
                }
                if mg.mu_neighbourhood(v) >= *eps {
                    return Some(Violation::heavy_neighbourhood(mg, v));
                }
            }
            Some(r) => {
                if mg.mu(&mg.graph.ball(v, r)) >= *eps {
                    return Some(Violation::heavy_ball(mg, v, r));
                }
            }
        }
    }
    None
}

/// Exhaustive pair search. For every `A`, the largest set anticomplete to it
/// is `V ∖ N[A]`, so trying every `A` decides the bullet.
pub fn exact_heavy_pair<S: Scalar>(mg: &MassedGraph<S>, eps: &S) -> Option<(VertexSet, VertexSet)> {
    let n = mg.n();
    assert!(n <= 24, "exact pair search is limited to small graphs");
    let closed: Vec<u32> = (0..n)
        .map(|v| mg.graph.neighbours(v).iter().fold(1u32 << v, |m, w| m | (1 << w)))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut mass = vec![S::zero(); 1usize << n];
    for m in 1..(1usize << n) {
        let low = m.trailing_zeros() as usize;
        mass[m] = mass[m & (m - 1)].clone() + mg.mu_vertex(low);
    }
    let to_set = |m: u32| VertexSet::from_iter_in(n, (0..n).filter(|&v| m & (1 << v) != 0));
    for a in 1..=full {
        if mass[a as usize] < *eps {
            continue;
        }
        let mut reach = 0u32;
        let mut rest = a;
        while rest != 0 {
            reach |= closed[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        let b = full & !reach;
        if mass[b as usize] >= *eps {
            return Some((to_set(a), to_set(b)));
        }
    }
    None
}

/// Tries split families that often expose heavy anticomplete pairs: unions of
/// components, ball/complement splits, separator splits, and a seeded greedy
/// growth. Anything returned is a genuine pair; `None` proves nothing.
pub fn heuristic_heavy_pair<S: Scalar>(
    mg: &MassedGraph<S>,
    eps: &S,
    cfg: &CoherenceConfig,
) -> Option<(VertexSet, VertexSet)> {
    let g = &mg.graph;
    let all = g.vertices();
    if let Some(p) = split_components(mg, &all, eps) {
        return Some(p);
    }
    for v in 0..mg.n() {
        let dist = g.distances_from(&[v], None);
        let ecc = dist.iter().copied().filter(|&d| d != crate::graph::UNREACHED).max().unwrap_or(0);
        for rho in 0..ecc {
            let a = g.set_of((0..mg.n()).filter(|&w| dist[w] <= rho));
            if mg.mu(&a) < *eps {
                continue;
            }
            let b = g.set_of((0..mg.n()).filter(|&w| dist[w] > rho + 1));
            if mg.mu(&b) >= *eps {
                return Some((a, b));
            }
            break;
        }
        // Components left after deleting the neighbourhood of v.
        let rest = all.difference(&g.closed_neighbourhood(&VertexSet::singleton(mg.n(), v)));
        if let Some(p) = split_components(mg, &rest, eps) {
            return Some(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..mg.n()).collect();
    for _ in 0..cfg.restarts {
        order.shuffle(&mut rng);
        let start = order[0];
        let mut a = VertexSet::singleton(mg.n(), start);
        let mut b = all.difference(&g.closed_neighbourhood(&a));
        while mg.mu(&a) < *eps {
            // Grow A by the boundary vertex whose own neighbourhood costs B least.
            let cand = g.boundary(&a);
            let mut best: Option<(S, usize)> = None;
            for w in cand.iter() {
                let loss = mg.mu(&g.neighbours(w).intersection(&b));
                if best.as_ref().is_none_or(|(l, _)| loss < *l) {
                    best = Some((loss, w));
                }
            }
            let pick = match best {
                Some((_, w)) => w,
                None => match b.iter().nth(rng.gen_range(0..b.len().max(1))) {
                    Some(w) => w,
                    None => break,
                },
            };
            a.insert(pick);
            b.remove(pick);
            b.difference_with(g.neighbours(pick));
        }
        if mg.mu(&a) >= *eps && mg.mu(&b) >= *eps {
            return Some((a, b));
        }
    }
    None
}

/// Heaviest-first union of components of `G[X]` reaching `ε`, against the rest.
fn split_components<S: Scalar>(mg: &MassedGraph<S>, x: &VertexSet, eps: &S) -> Option<(VertexSet, VertexSet)> {
    let comps = mg.graph.components(x);
    if comps.len() < 2 {
        return None;
    }
    let mut weighted: Vec<(S, VertexSet)> = comps.into_iter().map(|c| (mg.mu(&c), c)).collect();
    weighted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut a = VertexSet::new(mg.n());
    let mut b = x.clone();
    for (_, c) in weighted.iter() {
        a.union_with(c);
        b.difference_with(c);
        if mg.mu(&a) >= *eps {
            break;
        }
    }
    (mg.mu(&a) >= *eps && mg.mu(&b) >= *eps).then_some((a, b))
}

/// `μ(X ∪ N(X)) ≥ δ`.
pub fn is_dominant<S: Scalar>(mg: &MassedGraph<S>, x: &VertexSet, delta: &S) -> bool {
    mg.mu(&mg.graph.closed_neighbourhood(x)) >= *delta
}
