//! Masses on vertex sets and massed graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

/// A set function on the vertices of a graph with `n` vertices.
pub trait SetMass<S: Scalar> {
    fn vertex_count(&self) -> usize;
    fn mass_of(&self, x: &VertexSet) -> S;
}

/// Additive masses: uniform `|X|/n`, or a per-vertex weight vector summing to one.
#[derive(Clone, Debug, PartialEq)]
pub enum Mass<S: Scalar> {
    Uniform { n: usize },
    Weighted(Vec<S>),
}

impl<S: Scalar> Mass<S> {
    /// Weighted mass; weights must be nonnegative and sum to exactly one.
    pub fn weighted(weights: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| w.is_negative_value()) {
            return Err(Error::InvalidMass("negative weight".into()));
        }
        let total = weights.iter().cloned().fold(S::zero(), |a, b| a + b);
        if weights.is_empty() || total != S::one() {
            return Err(Error::InvalidMass(format!("weights sum to {total}, not 1")));
        }
        Ok(Mass::Weighted(weights))
    }

    /// Scales arbitrary nonnegative weights so they sum to one.
    pub fn normalized(weights: Vec<S>) -> Result<Self> {
        let total = weights.iter().cloned().fold(S::zero(), |a, b| a + b);
        if total <= S::zero() {
            return Err(Error::InvalidMass("weights sum to zero".into()));
        }
        Self::weighted(weights.into_iter().map(|w| w / total.clone()).collect())
    }

    pub fn weight(&self, v: usize) -> S {
        match self {
            Mass::Uniform { n } => S::from_ratio(1, *n as i64),
            Mass::Weighted(w) => w[v].clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Mass::Uniform { n } => *n,
            Mass::Weighted(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn measure(&self, x: &VertexSet) -> S {
        match self {
            Mass::Uniform { n } => S::from_ratio(x.len() as i64, *n as i64),
            Mass::Weighted(w) => x.iter().fold(S::zero(), |acc, v| acc + w[v].clone()),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, Mass::Uniform { .. })
    }
}

/// A graph with a mass on its vertex subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct MassedGraph<S: Scalar> {
    pub graph: Graph,
    pub mass: Mass<S>,
}

impl<S: Scalar> MassedGraph<S> {
    pub fn new(graph: Graph, mass: Mass<S>) -> Result<Self> {
        if mass.len() != graph.n() {
            return Err(Error::InvalidMass(format!(
                "{} weights for {} vertices",
                mass.len(),
                graph.n()
            )));
        }
        if graph.n() == 0 {
            return Err(Error::InvalidMass("a mass needs at least one vertex".into()));
        }
        Ok(MassedGraph { graph, mass })
    }

    pub fn uniform(graph: Graph) -> Self {
        let n = graph.n();
        assert!(n > 0, "uniform mass on the empty graph");
        MassedGraph { graph, mass: Mass::Uniform { n } }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn mu(&self, x: &VertexSet) -> S {
        self.mass.measure(x)
    }

    pub fn mu_vertex(&self, v: usize) -> S {
        self.mass.weight(v)
    }

    /// `μ(N(v))`.
    pub fn mu_neighbourhood(&self, v: usize) -> S {
        self.mu(self.graph.neighbours(v))
    }

    /// `(G[Z], μ/μ(Z))` with the map from new ids to old ids.
    pub fn normalized_restriction(&self, z: &VertexSet) -> Result<(MassedGraph<S>, Vec<usize>)> {
        let total = self.mu(z);
        if total <= S::zero() {
            return Err(Error::InvalidMass("restriction to a set of zero mass".into()));
        }
        let (g, back) = self.graph.induced_subgraph(z)?;
        let weights = back.iter().map(|&v| self.mu_vertex(v) / total.clone()).collect();
        Ok((MassedGraph { graph: g, mass: Mass::Weighted(weights) }, back))
    }
}

impl<S: Scalar> SetMass<S> for MassedGraph<S> {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn mass_of(&self, x: &VertexSet) -> S {
        self.mu(x)
    }
}

/// Which mass axiom an instance breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MassAxiom {
    EmptyIsZero,
    WholeIsOne,
    Monotone,
    Subadditive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassBreach {
    pub axiom: MassAxiom,
    pub x: VertexSet,
    pub y: VertexSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassReport {
    pub exhaustive: bool,
    pub checked: usize,
    pub breach: Option<MassBreach>,
}

impl MassReport {
    pub fn passed(&self) -> bool {
        self.breach.is_none()
    }
}

/// Checks the mass axioms: every instance when `n <= exhaustive_limit`,
/// otherwise `samples` random instances drawn from `seed`.
pub fn validate_mass<S: Scalar, M: SetMass<S>>(
    m: &M,
    exhaustive_limit: usize,
    samples: usize,
    seed: u64,
) -> MassReport {
    let n = m.vertex_count();
    let empty = VertexSet::new(n);
    let full = VertexSet::full(n);
    let breach = |axiom, x: &VertexSet, y: &VertexSet| MassBreach { axiom, x: x.clone(), y: y.clone() };
    if m.mass_of(&empty) != S::zero() {
        return MassReport { exhaustive: false, checked: 1, breach: Some(breach(MassAxiom::EmptyIsZero, &empty, &empty)) };
    }
    let whole = m.mass_of(&full);
    let off = if whole > S::one() { whole - S::one() } else { S::one() - whole };
    if off > (if S::EXACT { S::zero() } else { S::from_ratio(1, 1_000_000_000) }) {
        return MassReport { exhaustive: false, checked: 2, breach: Some(breach(MassAxiom::WholeIsOne, &full, &full)) };
    }
    let mut checked = 2;
    // Inexact scalars get a rounding allowance; exact ones get none.
    let slack = if S::EXACT { S::zero() } else { S::from_ratio(1, 1_000_000_000) };
    // Each pair is encoded by a ternary digit per vertex: 0 = neither, 1 = X only, 2 = Y only.
    let mut check_pair = |x: &VertexSet, y: &VertexSet| -> Option<MassBreach> {
        checked += 1;
        let mx = m.mass_of(x);
        let my = m.mass_of(y);
        let xy = x.union(y);
        let mxy = m.mass_of(&xy);
        if mxy.clone() > mx.clone() + my + slack.clone() {
            return Some(breach(MassAxiom::Subadditive, x, y));
        }
        if mx > mxy + slack.clone() {
            return Some(breach(MassAxiom::Monotone, x, &xy));
        }
        None
    };
    if n <= exhaustive_limit {
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let (mut x, mut y) = (VertexSet::new(n), VertexSet::new(n));
            let mut c = code;
            for v in 0..n {
                match c % 3 {
                    1 => {
                        x.insert(v);
                    }
                    2 => {
                        y.insert(v);
                    }
                    _ => {}
                }
                c /= 3;
            }
            if let Some(b) = check_pair(&x, &y) {
                return MassReport { exhaustive: true, checked, breach: Some(b) };
            }
        }
        return MassReport { exhaustive: true, checked, breach: None };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (mut x, mut y) = (VertexSet::new(n), VertexSet::new(n));
        for v in 0..n {
            match rng.gen_range(0..3) {
                1 => {
                    x.insert(v);
                }
                2 => {
                    y.insert(v);
                }
                _ => {}
            }
        }
        if let Some(b) = check_pair(&x, &y) {
            return MassReport { exhaustive: false, checked, breach: Some(b) };
        }
    }
    MassReport { exhaustive: false, checked, breach: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn uniform_and_weighted_masses() {
        let mg = MassedGraph::<Rational>::uniform(named::cycle(6));
        assert_eq!(mg.mu(&mg.graph.set_of([0, 1])), q(1, 3));
        assert_eq!(mg.mu_neighbourhood(0), q(1, 3));
        let w = Mass::weighted(vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        assert_eq!(w.measure(&VertexSet::from_iter_in(3, [0, 2])), q(3, 4));
        assert!(Mass::weighted(vec![q(1, 2), q(1, 4)]).is_err());
        assert!(Mass::weighted(vec![q(3, 2), q(-1, 2)]).is_err());
    }

    #[test]
    fn normalized_restriction_rescales() {
        let mg = MassedGraph::<Rational>::uniform(named::path(4));
        let (sub, back) = mg.normalized_restriction(&mg.graph.set_of([1, 2])).unwrap();
        assert_eq!(back, vec![1, 2]);
        assert_eq!(sub.mu_vertex(0), q(1, 2));
        assert!(sub.graph.has_edge(0, 1));
    }

    #[test]
    fn valid_masses_pass() {
        for n in 1..=8 {
            let mg = MassedGraph::<Rational>::uniform(named::cycle(n));
            assert!(validate_mass(&mg, 10, 0, 0).passed());
        }
        let mg = MassedGraph::new(
            named::path(3),
            Mass::weighted(vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap(),
        )
        .unwrap();
        let rep = validate_mass(&mg, 10, 0, 0);
        assert!(rep.passed() && rep.exhaustive);
        assert!(validate_mass(&MassedGraph::<f64>::uniform(named::path(30)), 10, 500, 3).passed());
    }

    struct Shrunk(usize);

    impl SetMass<Rational> for Shrunk {
        fn vertex_count(&self) -> usize {
            self.0
        }
        fn mass_of(&self, x: &VertexSet) -> Rational {
            q(9 * x.len() as i64, 10 * self.0 as i64)
        }
    }

    struct Squared(usize);

    impl SetMass<Rational> for Squared {
        fn vertex_count(&self) -> usize {
            self.0
        }
        fn mass_of(&self, x: &VertexSet) -> Rational {
            let k = x.len() as i64;
            let n = self.0 as i64;
            q(k * k, n * n)
        }
    }

    #[test]
    fn broken_masses_are_reported_with_witness() {
        let rep = validate_mass(&Shrunk(4), 10, 0, 0);
        let b = rep.breach.unwrap();
        assert_eq!(b.axiom, MassAxiom::WholeIsOne);
        assert_eq!(b.x.len(), 4);
        let b = validate_mass(&Squared(4), 10, 0, 0).breach.unwrap();
        assert_eq!(b.axiom, MassAxiom::Subadditive);
        assert!(q(b.x.union(&b.y).len() as i64, 1) > q(1, 1));
    }
}
