//! Patterns `(H, P)`, their Hamilton-path form, the caterpillar they induce,
//! pairings, and verifiers for filletings and feasibility.

mod caterpillar;
mod verify;

pub use caterpillar::{ancestors, derive_caterpillar, Ancestor, CaterpillarSpec, RootedCaterpillar};
pub use verify::{
    assemble_filleting, verify_feasibility, verify_filleting, FeasibilityWitness, FilletingMap, TCopy,
};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A graph `H` with a path `P`, listed in order.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub h: Graph,
    pub path: Vec<usize>,
}

impl Pattern {
    pub fn new(h: Graph, path: Vec<usize>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::InvalidPath("the path needs at least one vertex".into()));
        }
        let mut seen = vec![false; h.n()];
        for &v in &path {
            if v >= h.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPath(format!("vertex {v} repeats")));
            }
        }
        if let Some(w) = path.windows(2).find(|w| !h.has_edge(w[0], w[1])) {
            return Err(Error::InvalidPath(format!("{} and {} are not adjacent", w[0], w[1])));
        }
        Ok(Pattern { h, path })
    }

    /// The pattern `(H, P)` with `P` a Hamilton path of `H` given in order.
    pub fn hamiltonian(h: Graph) -> Result<Self> {
        let n = h.n();
        Pattern::new(h, (0..n).collect())
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.path.len() == self.h.n()
    }

    /// Whether `uv` is an edge of `P`.
    pub fn is_path_edge(&self, u: usize, v: usize) -> bool {
        self.path.windows(2).any(|w| (w[0] == u && w[1] == v) || (w[0] == v && w[1] == u))
    }

    /// Edges of `H` not in `P`, sorted.
    pub fn non_path_edges(&self) -> Vec<(usize, usize)> {
        self.h.edges().into_iter().filter(|&(u, v)| !self.is_path_edge(u, v)).collect()
    }
}

/// A Hamiltonian pattern `(H', P')` built from `(H, P)`, remembering which
/// vertices were added.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonized {
    pub pattern: Pattern,
    /// Number of vertices of the original `H`; these keep their ids.
    pub original_n: usize,
    /// Ids of the added vertices `u_i` in `H'`.
    pub detours: Vec<usize>,
}

/// Adds a vertex `u_i` adjacent to `v_{i-1}` and `v_i` for each vertex `v_i`
/// off the path, with the off-path vertices taken in increasing id order.
/// Deleting the `u_i` from a `P'`-filleting of `H'` leaves an induced
/// `P`-filleting of `H`.
pub fn hamiltonize(pat: &Pattern) -> Hamiltonized {
    let n = pat.h.n();
    if pat.is_hamiltonian() {
        return Hamiltonized { pattern: pat.clone(), original_n: n, detours: vec![] };
    }
    let mut on_path = vec![false; n];
    for &v in &pat.path {
        on_path[v] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| !on_path[v]).collect();
    let mut h2 = Graph::new(n + rest.len());
    for (u, v) in pat.h.edges() {
        h2.ensure_edge(u, v);
    }
    let mut path = pat.path.clone();
    let mut detours = Vec::new();
    let mut prev = *pat.path.last().expect("nonempty path");
    for (i, &v) in rest.iter().enumerate() {
        let u = n + i;
        h2.ensure_edge(prev, u);
        h2.ensure_edge(u, v);
        path.push(u);
        path.push(v);
        detours.push(u);
        prev = v;
    }
    let pattern = Pattern { h: h2, path };
    Hamiltonized { pattern, original_n: n, detours }
}

/// A pairing: disjoint blocks of one or two vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    blocks: Vec<Vec<usize>>,
}

impl Pairing {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() || b.len() > 2 {
                return Err(Error::Invalid(format!("pairing block of size {}", b.len())));
            }
            b.sort_unstable();
            for &v in &b {
                if !seen.insert(v) {
                    return Err(Error::Overlap(v));
                }
            }
            out.push(b);
        }
        out.sort();
        Ok(Pairing { blocks: out })
    }

    pub fn singletons(vs: &[usize]) -> Self {
        Pairing::new(vs.iter().map(|&v| vec![v]).collect()).expect("distinct vertices")
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `V(Π)`, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.blocks.iter().filter(|b| b.len() == 2).map(|b| (b[0], b[1]))
    }

    pub fn map(&self, f: impl Fn(usize) -> usize) -> Pairing {
        Pairing::new(self.blocks.iter().map(|b| b.iter().map(|&v| f(v)).collect()).collect())
            .expect("an injective map keeps blocks disjoint")
    }
}

/// Every pairing of `xs`, in a fixed order.
pub fn all_pairings(xs: &[usize]) -> Vec<Pairing> {
    fn go(rest: &[usize], acc: &mut Vec<Vec<usize>>, out: &mut Vec<Pairing>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(Pairing::new(acc.clone()).expect("disjoint by construction"));
            return;
        };
        acc.push(vec![first]);
        go(tail, acc, out);
        acc.pop();
        for i in 0..tail.len() {
            acc.push(vec![first, tail[i]]);
            let remaining: Vec<usize> = tail.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            go(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(xs, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    #[test]
    fn pattern_validation() {
        assert!(Pattern::new(named::cycle(4), vec![0, 1, 2, 3]).is_ok());
        assert!(Pattern::new(named::cycle(4), vec![0, 2]).is_err());
        assert!(Pattern::new(named::cycle(4), vec![0, 1, 0]).is_err());
        assert!(Pattern::new(named::cycle(4), vec![]).is_err());
    }

    #[test]
    fn hamiltonize_k4_edge() {
        let pat = Pattern::new(named::complete(4), vec![0, 1]).unwrap();
        let hz = hamiltonize(&pat);
        assert_eq!(hz.pattern.h.n(), 6);
        assert_eq!(hz.pattern.path, vec![0, 1, 4, 2, 5, 3]);
        assert!(hz.pattern.is_hamiltonian());
        assert!(Pattern::new(hz.pattern.h.clone(), hz.pattern.path.clone()).is_ok());
        assert_eq!(hz.detours, vec![4, 5]);
    }

    #[test]
    fn hamiltonize_keeps_hamiltonian_input() {
        let pat = Pattern::hamiltonian(named::cycle(4)).unwrap();
        assert_eq!(hamiltonize(&pat).pattern, pat);
        let p = Pattern::hamiltonian(named::path(5)).unwrap();
        assert_eq!(hamiltonize(&p).pattern, p);
    }

    #[test]
    fn pairing_counts() {
        // Involution numbers.
        let counts: Vec<usize> = (0..=6).map(|n| all_pairings(&(0..n).collect::<Vec<_>>()).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 10, 26, 76]);
        assert!(Pairing::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(Pairing::new(vec![vec![0, 1, 2]]).is_err());
    }
}
