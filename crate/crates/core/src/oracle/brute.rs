use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{FilletingMap, Pattern};

/// Outcome of a budgeted exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BruteOutcome<T> {
    Found { value: T },
    /// The whole space was searched.
    None,
    /// The node budget ran out first.
    Exhausted { nodes: u64 },
}

/// An induced filleting found by [`search_filleting_bruteforce`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundFilleting {
    pub vertices: Vec<usize>,
    pub map: FilletingMap,
}

/// Exhaustive search for an induced `P`-filleting of `H` in `g`.
///
/// Branch images are tried in every injective way, adjacent exactly on the
/// edges of `P`. Each edge of `H` off the path is then routed by an induced
/// path with at least one interior vertex; an interior vertex may only see
/// its predecessor and, as the last interior vertex, the far end. Every
/// assignment or path extension costs one node.
pub fn search_filleting_bruteforce(g: &Graph, pat: &Pattern, node_budget: u64) -> BruteOutcome<FoundFilleting> {
    let h = &pat.h;
    let mut on_path = vec![vec![false; h.n()]; h.n()];
    for w in pat.path.windows(2) {
        on_path[w[0]][w[1]] = true;
        on_path[w[1]][w[0]] = true;
    }
    let mut extra = Vec::new();
    for u in 0..h.n() {
        for v in u + 1..h.n() {
            if h.has_edge(u, v) && !on_path[u][v] {
                extra.push((u, v));
            }
        }
    }
    let mut s = Brute {
        g,
        hn: h.n(),
        on_path,
        extra,
        image: vec![usize::MAX; h.n()],
        in_j: vec![false; g.n()],
        routes: Vec::new(),
        nodes: 0,
        budget: node_budget,
    };
    match s.branch(0) {
        Ok(true) => {
            let mut vertices: Vec<usize> = (0..g.n()).filter(|&v| s.in_j[v]).collect();
            vertices.sort_unstable();
            let subdivided = s.extra.iter().copied().zip(s.routes.iter().cloned()).collect();
            BruteOutcome::Found { value: FoundFilleting { vertices, map: FilletingMap { branch: s.image, subdivided } } }
        }
        Ok(false) => BruteOutcome::None,
        Err(()) => BruteOutcome::Exhausted { nodes: s.nodes },
    }
}

struct Brute<'a> {
    g: &'a Graph,
    hn: usize,
    on_path: Vec<Vec<bool>>,
    extra: Vec<(usize, usize)>,
    image: Vec<usize>,
    in_j: Vec<bool>,
    /// Interior vertices of the routed extra edges, in order.
    routes: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl Brute<'_> {
    fn tick(&mut self) -> std::result::Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(())
        } else {
            Ok(())
        }
    }

    fn branch(&mut self, u: usize) -> std::result::Result<bool, ()> {
        if u == self.hn {
            return self.route(0);
        }
        for x in 0..self.g.n() {
            if self.in_j[x] {
                continue;
            }
            let fits = (0..u).all(|w| self.g.has_edge(x, self.image[w]) == self.on_path[u][w]);
            if !fits {
                continue;
            }
            self.tick()?;
            self.image[u] = x;
            self.in_j[x] = true;
            if self.branch(u + 1)? {
                return Ok(true);
            }
            self.in_j[x] = false;
            self.image[u] = usize::MAX;
        }
        Ok(false)
    }

    fn route(&mut self, e: usize) -> std::result::Result<bool, ()> {
        if e == self.extra.len() {
            return Ok(true);
        }
        let (a, b) = self.extra[e];
        let (from, to) = (self.image[a], self.image[b]);
        let mut inner = Vec::new();
        if self.extend(e, from, to, &mut inner)? {
            return Ok(true);
        }
        Ok(false)
    }

    /// Grows the interior of route `e` from its current end `last`.
    fn extend(&mut self, e: usize, last: usize, to: usize, inner: &mut Vec<usize>) -> std::result::Result<bool, ()> {
        for x in 0..self.g.n() {
            if self.in_j[x] || !self.g.has_edge(last, x) {
                continue;
            }
            // Neighbours of x inside J, other than `last` and `to`.
            let stray = (0..self.g.n()).any(|y| self.in_j[y] && y != last && y != to && self.g.has_edge(x, y));
            if stray {
                continue;
            }
            self.tick()?;
            self.in_j[x] = true;
            inner.push(x);
            let done = if self.g.has_edge(x, to) {
                self.routes.push(inner.clone());
                let ok = self.route(e + 1)?;
                if !ok {
                    self.routes.pop();
                }
                ok
            } else {
                self.extend(e, x, to, inner)?
            };
            if done {
                return Ok(true);
            }
            inner.pop();
            self.in_j[x] = false;
        }
        Ok(false)
    }
}

/// Disjoint anticomplete `A`, `B` maximizing `min(|A|, |B|)`, or `None`
/// when no two nonempty anticomplete sets exist.
///
/// Every `A` is enumerated; for a fixed `A` the best `B` is everything
/// outside `A` with no neighbour in `A`, so this covers all
/// `3^n` assignments to {in A, in B, out}.
pub fn max_anticomplete_pair_exact(g: &Graph) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = g.n();
    if n > 15 {
        return Err(Error::Precondition(format!("exact pair search needs n ≤ 15, got {n}")));
    }
    let adj = masks(g);
    let full = (1u64 << n) - 1;
    let mut best: Option<(u64, u64)> = None;
    let mut best_min = 0;
    for a in 1..=full {
        let mut touched = a;
        for v in bits(a) {
            touched |= adj[v];
        }
        let b = full & !touched;
        let m = a.count_ones().min(b.count_ones());
        if m > best_min {
            best_min = m;
            best = Some((a, b));
        }
    }
    Ok(best.map(|(a, b)| (bits(a).collect(), bits(b).collect())))
}

/// A maximum clique and a maximum stable set of `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueStable {
    pub clique: Vec<usize>,
    pub stable: Vec<usize>,
}

/// Exact maximum clique and stable set by branch and bound with a greedy
/// colouring bound. Needs `n ≤ 60`; `node_budget` bounds each of the two
/// searches.
pub fn clique_and_stable_exact(g: &Graph, node_budget: u64) -> Result<BruteOutcome<CliqueStable>> {
    let n = g.n();
    if n > 60 {
        return Err(Error::Precondition(format!("exact clique search needs n ≤ 60, got {n}")));
    }
    if n == 0 {
        return Ok(BruteOutcome::Found { value: CliqueStable { clique: vec![], stable: vec![] } });
    }
    let adj = masks(g);
    let full = (1u64 << n) - 1;
    let co: Vec<u64> = (0..n).map(|v| full & !adj[v] & !(1u64 << v)).collect();
    let (clique, c_nodes) = max_clique(&adj, full, node_budget);
    let (stable, s_nodes) = max_clique(&co, full, node_budget);
    match (clique, stable) {
        (Some(c), Some(s)) => Ok(BruteOutcome::Found { value: CliqueStable { clique: bits(c).collect(), stable: bits(s).collect() } }),
        _ => Ok(BruteOutcome::Exhausted { nodes: c_nodes + s_nodes }),
    }
}

fn masks(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| (0..g.n()).filter(|&w| g.has_edge(v, w)).fold(0u64, |m, w| m | (1u64 << w)))
        .collect()
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

fn max_clique(adj: &[u64], cand: u64, budget: u64) -> (Option<u64>, u64) {
    let mut st = CliqueSearch { adj, best: 0, nodes: 0, budget, out: false };
    st.expand(0, cand);
    (if st.out { None } else { Some(st.best) }, st.nodes)
}

struct CliqueSearch<'a> {
    adj: &'a [u64],
    best: u64,
    nodes: u64,
    budget: u64,
    out: bool,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, cur: u64, mut cand: u64) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.out = true;
            return;
        }
        if cand == 0 {
            if cur.count_ones() > self.best.count_ones() {
                self.best = cur;
            }
            return;
        }
        // Greedy colouring: vertices in colour classes 1..c, highest last.
        let mut order = Vec::new();
        let mut uncoloured = cand;
        let mut colour = 0;
        while uncoloured != 0 {
            colour += 1;
            let mut avail = uncoloured;
            while avail != 0 {
                let v = avail.trailing_zeros() as usize;
                avail &= !(1u64 << v) & !self.adj[v];
                uncoloured &= !(1u64 << v);
                order.push((v, colour));
            }
        }
        for &(v, c) in order.iter().rev() {
            if cur.count_ones() + c <= self.best.count_ones() {
                return;
            }
            self.expand(cur | (1u64 << v), cand & self.adj[v]);
            if self.out {
                return;
            }
            cand &= !(1u64 << v);
        }
    }
}
