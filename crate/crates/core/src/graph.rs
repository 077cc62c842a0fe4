//! Finite simple graphs on vertex ids `0..n`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

/// Undirected graph without loops or parallel edges.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<VertexSet>,
    edges: usize,
}

/// Marker for an unreachable vertex in distance arrays.
pub const UNREACHED: usize = usize::MAX;

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|_| VertexSet::new(n)).collect(),
            edges: 0,
        }
    }

    /// Builds a graph, rejecting loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.adj[u].contains(v) {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edges += 1;
        Ok(())
    }

    /// Adds the edge unless present; loops are ignored.
    pub fn ensure_edge(&mut self, u: usize, v: usize) {
        if u != v && !self.adj[u].contains(v) {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
            self.edges += 1;
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if self.adj[u].remove(v) {
            self.adj[v].remove(u);
            self.edges -= 1;
            true
        } else {
            false
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for u in 0..self.n() {
            for v in self.adj[u].iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::new(self.n())
    }

    pub fn set_of<I: IntoIterator<Item = usize>>(&self, ids: I) -> VertexSet {
        VertexSet::from_iter_in(self.n(), ids)
    }

    pub fn check_set(&self, x: &VertexSet) -> Result<()> {
        if x.universe() != self.n() {
            if let Some(v) = x.iter().find(|&v| v >= self.n()) {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
            }
        }
        Ok(())
    }

    /// `G[X]`, together with the map from new ids to old ids. New ids follow
    /// the ascending order of `X`.
    pub fn induced_subgraph(&self, x: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        self.check_set(x)?;
        let back: Vec<usize> = x.iter().collect();
        let mut fwd = vec![UNREACHED; self.n()];
        for (i, &v) in back.iter().enumerate() {
            fwd[v] = i;
        }
        let mut g = Graph::new(back.len());
        for (i, &v) in back.iter().enumerate() {
            for w in self.adj[v].iter() {
                let j = fwd[w];
                if j != UNREACHED && j > i {
                    g.ensure_edge(i, j);
                }
            }
        }
        Ok((g, back))
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    g.ensure_edge(u, v);
                }
            }
        }
        g
    }

    /// The union of `N(x)` over `x` in `X`, including members of `X` that
    /// are adjacent to other members.
    pub fn open_neighbourhood(&self, x: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        for v in x {
            out.union_with(&self.adj[v]);
        }
        out
    }

    /// `X` together with every vertex having a neighbour in `X`; these are
    /// the vertices that touch `X`.
    pub fn closed_neighbourhood(&self, x: &VertexSet) -> VertexSet {
        let mut out = self.open_neighbourhood(x);
        out.union_with(x);
        out
    }

    /// Vertices outside `X` with a neighbour in `X`.
    pub fn boundary(&self, x: &VertexSet) -> VertexSet {
        let mut out = self.open_neighbourhood(x);
        out.difference_with(x);
        out
    }

    /// BFS distances from `sources`, moving only through `within` when given.
    /// Sources outside `within` are still used as starting points.
    pub fn distances_from(&self, sources: &[usize], within: Option<&VertexSet>) -> Vec<usize> {
        let mut dist = vec![UNREACHED; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == UNREACHED {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for w in self.adj[u].iter() {
                if dist[w] == UNREACHED && within.is_none_or(|s| s.contains(w)) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `N^r[v]`: vertices at distance at most `r` from `v`.
    pub fn ball(&self, v: usize, r: usize) -> VertexSet {
        self.ball_within(v, r, None)
    }

    /// `N^r_{G[Z]}[v]` when `within = Some(Z)`.
    pub fn ball_within(&self, v: usize, r: usize, within: Option<&VertexSet>) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        out.insert(v);
        let mut frontier = vec![v];
        for _ in 0..r {
            let mut next = Vec::new();
            for &u in &frontier {
                for w in self.adj[u].iter() {
                    if within.is_none_or(|s| s.contains(w)) && out.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }

    /// Vertices within distance `r` of some vertex of `X`.
    pub fn ball_of_set(&self, x: &VertexSet, r: usize) -> VertexSet {
        let src: Vec<usize> = x.to_vec();
        let dist = self.distances_from(&src, None);
        self.set_of((0..self.n()).filter(|&v| dist[v] <= r))
    }

    /// Connected components of `G[X]`, each listed once, ordered by their
    /// lowest vertex.
    pub fn components(&self, x: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new(self.n());
        let mut out = Vec::new();
        for s in x.iter() {
            if seen.contains(s) {
                continue;
            }
            let comp = self.component_of(s, x);
            seen.union_with(&comp);
            out.push(comp);
        }
        out
    }

    /// Vertex set of the component of `G[X]` containing `v`.
    pub fn component_of(&self, v: usize, x: &VertexSet) -> VertexSet {
        let mut comp = VertexSet::new(self.n());
        comp.insert(v);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for w in self.adj[u].iter() {
                if x.contains(w) && comp.insert(w) {
                    stack.push(w);
                }
            }
        }
        comp
    }

    /// Whether `G[X]` is connected. The empty set counts as connected.
    pub fn is_connected_set(&self, x: &VertexSet) -> bool {
        match x.first() {
            None => true,
            Some(v) => self.component_of(v, x).len() == x.len(),
        }
    }

    /// Cut vertices of `G[X]`: vertices whose removal increases the number
    /// of components.
    pub fn articulation_points(&self, x: &VertexSet) -> VertexSet {
        let n = self.n();
        let mut disc = vec![UNREACHED; n];
        let mut low = vec![0; n];
        let mut cut = VertexSet::new(n);
        let mut time = 0;
        for root in x.iter() {
            if disc[root] != UNREACHED {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            // (vertex, parent, remaining neighbours in X)
            let mut stack: Vec<(usize, usize, Vec<usize>)> =
                vec![(root, UNREACHED, self.adj[root].intersection(x).to_vec())];
            while let Some((v, parent, rest)) = stack.last_mut() {
                let (v, parent) = (*v, *parent);
                if let Some(w) = rest.pop() {
                    if disc[w] == UNREACHED {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        if v == root {
                            root_children += 1;
                        }
                        stack.push((w, v, self.adj[w].intersection(x).to_vec()));
                    } else if w != parent {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != UNREACHED {
                        low[parent] = low[parent].min(low[v]);
                        if parent != root && low[v] >= disc[parent] {
                            cut.insert(parent);
                        }
                    }
                }
            }
            if root_children > 1 {
                cut.insert(root);
            }
        }
        cut
    }

    /// A shortest path from `s` to `t` in `G[X ∪ {s, t}]`, endpoints included.
    /// Shortest paths are induced.
    pub fn shortest_path_within(&self, s: usize, t: usize, x: &VertexSet) -> Option<Vec<usize>> {
        if s == t {
            return Some(vec![s]);
        }
        let mut parent = vec![UNREACHED; self.n()];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for w in self.adj[u].iter() {
                if parent[w] != UNREACHED || !(w == t || x.contains(w)) {
                    continue;
                }
                parent[w] = u;
                if w == t {
                    let mut path = vec![t];
                    let mut cur = t;
                    while cur != s {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(w);
            }
        }
        None
    }

    pub fn is_anticomplete(&self, a: &VertexSet, b: &VertexSet) -> Result<bool> {
        if let Some(v) = a.intersection(b).first() {
            return Err(Error::Overlap(v));
        }
        Ok(self.anticomplete_unchecked(a, b))
    }

    /// No edge between `A` and `B` (overlap is not checked).
    pub fn anticomplete_unchecked(&self, a: &VertexSet, b: &VertexSet) -> bool {
        a.iter().all(|v| self.adj[v].is_disjoint(b))
    }

    /// Every vertex of `B` has a neighbour in `A`.
    pub fn covers(&self, a: &VertexSet, b: &VertexSet) -> Result<bool> {
        if let Some(v) = a.intersection(b).first() {
            return Err(Error::Overlap(v));
        }
        Ok(self.covers_unchecked(a, b))
    }

    pub fn covers_unchecked(&self, a: &VertexSet, b: &VertexSet) -> bool {
        b.iter().all(|v| self.adj[v].intersects(a))
    }

    /// Vertices of `B` with at least one neighbour in `A`.
    pub fn covered_part(&self, a: &VertexSet, b: &VertexSet) -> VertexSet {
        let mut out = self.open_neighbourhood(a);
        out.intersect_with(b);
        out
    }

    /// True when every vertex of `X` is within `G[X]`-distance `r` of `v`.
    pub fn has_r_centre(&self, x: &VertexSet, v: usize, r: usize) -> Result<bool> {
        if !x.contains(v) {
            return Err(Error::Precondition(format!("centre {v} is not in the set")));
        }
        Ok(self.ball_within(v, r, Some(x)).len() == x.len())
    }

    /// Whether consecutive entries are adjacent, entries are distinct, and no
    /// other pair is adjacent.
    pub fn is_induced_path(&self, path: &[usize]) -> bool {
        for (i, &u) in path.iter().enumerate() {
            if u >= self.n() {
                return false;
            }
            for (j, &v) in path.iter().enumerate().skip(i + 1) {
                if u == v || self.has_edge(u, v) != (j == i + 1) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

/// Small named graphs.
pub mod named {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.ensure_edge(i - 1, i);
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = path(n);
        if n >= 3 {
            g.ensure_edge(n - 1, 0);
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.ensure_edge(u, v);
            }
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::new(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.ensure_edge(u, v);
            }
        }
        g
    }

    /// Centre 0 with leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Graph {
        complete_bipartite(1, leaves)
    }

    /// Disjoint union of `k` cliques of the given size.
    pub fn cliques_union(k: usize, size: usize) -> Graph {
        let mut g = Graph::new(k * size);
        for c in 0..k {
            for u in 0..size {
                for v in u + 1..size {
                    g.ensure_edge(c * size + u, c * size + v);
                }
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn induced_subgraph_of_c5_is_p3() {
        let g = cycle(5);
        let (h, map) = g.induced_subgraph(&g.set_of([0, 1, 2])).unwrap();
        assert_eq!(map, vec![0, 1, 2]);
        assert_eq!(h.edges(), vec![(0, 1), (1, 2)]);
        let (all, _) = g.induced_subgraph(&g.vertices()).unwrap();
        assert_eq!(all, g);
        let (empty, _) = g.induced_subgraph(&g.empty_set()).unwrap();
        assert_eq!(empty.n(), 0);
    }

    #[test]
    fn induced_subgraph_rejects_foreign_ids() {
        let g = cycle(5);
        let x = VertexSet::from_iter_in(9, [1, 7]);
        assert!(matches!(g.induced_subgraph(&x), Err(Error::VertexOutOfRange { vertex: 7, .. })));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complete(3).complement().edge_count(), 0);
        let c5 = cycle(5).complement();
        // 0-2-4-1-3-0 is again a 5-cycle.
        assert_eq!(c5.edges(), vec![(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]);
        for (u, v) in [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)] {
            assert!(c5.has_edge(u, v));
        }
    }

    #[test]
    fn balls() {
        let p = path(4);
        assert_eq!(p.ball(0, 2).to_vec(), vec![0, 1, 2]);
        assert_eq!(p.ball(2, 0).to_vec(), vec![2]);
        assert_eq!(cycle(6).ball(0, 2).to_vec(), vec![0, 1, 2, 4, 5]);
    }

    #[test]
    fn anticomplete_and_covers() {
        let p = path(3);
        assert!(p.is_anticomplete(&p.set_of([0]), &p.set_of([2])).unwrap());
        assert!(!p.is_anticomplete(&p.set_of([0]), &p.set_of([1])).unwrap());
        assert!(p.is_anticomplete(&p.set_of([0]), &p.set_of([0, 2])).is_err());
        let c5 = cycle(5);
        assert!(c5.is_anticomplete(&c5.set_of([0, 1]), &c5.set_of([3])).unwrap());

        let s = star(4);
        assert!(s.covers(&s.set_of([0]), &s.set_of([1, 2, 3, 4])).unwrap());
        assert!(s.covers(&s.set_of([1]), &s.empty_set()).unwrap());
        let c4 = cycle(4);
        assert!(c4.covers(&c4.set_of([0]), &c4.set_of([1, 3])).unwrap());
        assert!(!c4.covers(&c4.set_of([0]), &c4.set_of([2])).unwrap());
    }

    #[test]
    fn r_centres() {
        let p = path(5);
        let all = p.vertices();
        assert!(p.has_r_centre(&all, 2, 2).unwrap());
        assert!(!p.has_r_centre(&all, 2, 1).unwrap());
        assert!(p.has_r_centre(&p.set_of([3]), 3, 0).unwrap());
        let c6 = cycle(6);
        assert!((0..6).all(|v| c6.has_r_centre(&c6.vertices(), v, 3).unwrap()));
        assert!(p.has_r_centre(&p.set_of([0, 1]), 4, 1).is_err());
    }

    #[test]
    fn add_edge_errors() {
        let mut g = Graph::new(3);
        assert_eq!(g.add_edge(0, 0), Err(Error::SelfLoop(0)));
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.add_edge(1, 0), Err(Error::DuplicateEdge(0, 1)));
        assert!(matches!(g.add_edge(0, 3), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn shortest_paths_are_induced() {
        let g = cycle(8);
        let x = g.set_of([1, 2, 3, 5, 6, 7]);
        let p = g.shortest_path_within(0, 4, &x).unwrap();
        assert_eq!(p.len(), 5);
        assert!(g.is_induced_path(&p));
    }

    use proptest::prelude::*;

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut g = Graph::new(n);
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[k] {
                            g.ensure_edge(u, v);
                        }
                        k += 1;
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn complement_is_involution(g in arb_graph(8)) {
            prop_assert_eq!(g.complement().complement(), g);
        }

        #[test]
        fn balls_are_nested_and_reach_component(g in arb_graph(10), seed in 0usize..10, r in 0usize..5) {
            let v = seed % g.n();
            prop_assert!(g.ball(v, r).is_subset(&g.ball(v, r + 1)));
            let n = g.n();
            prop_assert_eq!(g.ball(v, n.saturating_sub(1)), g.component_of(v, &g.vertices()));
        }

        #[test]
        fn anticomplete_matches_edge_scan(g in arb_graph(9), mask in 0u32..(1 << 18)) {
            let n = g.n();
            let a = g.set_of((0..n).filter(|&v| mask >> (2 * v) & 3 == 1));
            let b = g.set_of((0..n).filter(|&v| mask >> (2 * v) & 3 == 2));
            let crossing = g.edges().iter()
                .filter(|&&(u, v)| (a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u)))
                .count();
            prop_assert_eq!(g.is_anticomplete(&a, &b).unwrap(), crossing == 0);
        }
    }
}
