use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

use super::{CaterpillarSpec, Pairing, Pattern, RootedCaterpillar};

/// An induced copy of a tree in a host graph: `map[t]` is the host vertex
/// playing tree vertex `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TCopy {
    pub map: Vec<usize>,
}

impl TCopy {
    /// Whether the map is injective into `g` and induces exactly the tree.
    pub fn is_induced_copy(&self, g: &Graph, tree: &Graph) -> bool {
        if self.map.len() != tree.n() || self.map.iter().any(|&v| v >= g.n()) {
            return false;
        }
        for a in 0..tree.n() {
            for b in a + 1..tree.n() {
                if self.map[a] == self.map[b] || g.has_edge(self.map[a], self.map[b]) != tree.has_edge(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// One path per block of a pairing, in block order; a singleton block has
/// the one-vertex path.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityWitness {
    pub paths: Vec<Vec<usize>>,
}

/// Checks that `pi` (in host ids) is feasible relative to the copy of `t`,
/// with the paths of `w`. On failure, names the first clause that breaks.
pub fn verify_feasibility(
    g: &Graph,
    t: &RootedCaterpillar,
    copy: &TCopy,
    pi: &Pairing,
    w: &FeasibilityWitness,
) -> Result<(), String> {
    if !copy.is_induced_copy(g, &t.tree) {
        return Err("copy is not an induced copy of the caterpillar".into());
    }
    let mut leaf_images: Vec<usize> = t.leaves.iter().map(|l| copy.map[l]).collect();
    leaf_images.sort_unstable();
    if pi.support() != leaf_images {
        return Err("pairing does not cover exactly the leaves".into());
    }
    if w.paths.len() != pi.blocks().len() {
        return Err("one path per block is required".into());
    }
    let in_t = g.set_of(copy.map.iter().copied());
    let in_pi = g.set_of(pi.support());
    let spine_part = in_t.difference(&in_pi);
    // X: vertices outside T with no neighbour in V(T) ∖ V(Π).
    let allowed = |v: usize| in_pi.contains(v) || (!in_t.contains(v) && g.neighbours(v).is_disjoint(&spine_part));
    for (block, path) in pi.blocks().iter().zip(&w.paths) {
        let ends_ok = match block.as_slice() {
            [a] => path.as_slice() == [*a],
            [a, b] => {
                path.len() >= 2
                    && ((path[0] == *a && path[path.len() - 1] == *b) || (path[0] == *b && path[path.len() - 1] == *a))
            }
            _ => false,
        };
        if !ends_ok {
            return Err(format!("path for block {block:?} does not join its members"));
        }
        if !g.is_induced_path(path) {
            return Err(format!("path for block {block:?} is not an induced path"));
        }
        if let Some(&v) = path.iter().find(|&&v| !allowed(v)) {
            return Err(format!("path for block {block:?} uses vertex {v} outside the allowed set"));
        }
    }
    for i in 0..w.paths.len() {
        let a = g.set_of(w.paths[i].iter().copied());
        for j in i + 1..w.paths.len() {
            let b = g.set_of(w.paths[j].iter().copied());
            if a.intersects(&b) || !g.anticomplete_unchecked(&a, &b) {
                return Err(format!("paths {i} and {j} are not anticomplete"));
            }
        }
    }
    Ok(())
}

/// How `J` arises from `H`: branch images and, for each edge off the path,
/// the interior vertices of its subdivided path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilletingMap {
    pub branch: Vec<usize>,
    pub subdivided: Vec<((usize, usize), Vec<usize>)>,
}

/// Decides whether `J` is a `P`-filleting of `H` and returns the map if so.
///
/// Branch vertices are assigned by backtracking over vertices of equal
/// degree, highest degree first; branch images must be adjacent exactly on
/// the edges of `P`. The rest of `J` must then split into degree-2 chains,
/// one for each edge off `P`.
pub fn verify_filleting(j: &Graph, pat: &Pattern) -> Option<FilletingMap> {
    let h = &pat.h;
    let extra = pat.non_path_edges();
    if j.n() < h.n() + extra.len() {
        return None;
    }
    // Each subdivision vertex adds one vertex and one edge.
    if j.edge_count() + h.n() != h.edge_count() + j.n() {
        return None;
    }
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
    let mut image = vec![usize::MAX; h.n()];
    let mut used = vec![false; j.n()];
    let mut st = Search { j, pat, order: &order, extra: &extra, image: &mut image, used: &mut used };
    st.assign(0)
}

struct Search<'a> {
    j: &'a Graph,
    pat: &'a Pattern,
    order: &'a [usize],
    extra: &'a [(usize, usize)],
    image: &'a mut Vec<usize>,
    used: &'a mut Vec<bool>,
}

impl Search<'_> {
    fn assign(&mut self, depth: usize) -> Option<FilletingMap> {
        if depth == self.order.len() {
            return self.trace_chains();
        }
        let u = self.order[depth];
        let want = self.pat.h.degree(u);
        for cand in 0..self.j.n() {
            if self.used[cand] || self.j.degree(cand) != want {
                continue;
            }
            let consistent = self.order[..depth].iter().all(|&w| {
                let adjacent = self.j.has_edge(cand, self.image[w]);
                adjacent == (self.pat.h.has_edge(u, w) && self.pat.is_path_edge(u, w))
            });
            if !consistent {
                continue;
            }
            self.image[u] = cand;
            self.used[cand] = true;
            if let Some(m) = self.assign(depth + 1) {
                return Some(m);
            }
            self.used[cand] = false;
            self.image[u] = usize::MAX;
        }
        None
    }

    fn trace_chains(&self) -> Option<FilletingMap> {
        let j = self.j;
        let mut owner = vec![usize::MAX; j.n()];
        for (u, &x) in self.image.iter().enumerate() {
            owner[x] = u;
        }
        if (0..j.n()).any(|v| owner[v] == usize::MAX && j.degree(v) != 2) {
            return None;
        }
        let mut seen = vec![false; j.n()];
        let mut chains: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (u, &a) in self.image.iter().enumerate() {
            for w in j.neighbours(a).iter() {
                if owner[w] != usize::MAX || seen[w] {
                    continue;
                }
                let (mut prev, mut cur) = (a, w);
                let mut inner = Vec::new();
                while owner[cur] == usize::MAX {
                    seen[cur] = true;
                    inner.push(cur);
                    let next = j.neighbours(cur).iter().find(|&x| x != prev)?;
                    prev = cur;
                    cur = next;
                }
                let v = owner[cur];
                if u == v {
                    return None;
                }
                let key = (u.min(v), u.max(v));
                if u > v {
                    inner.reverse();
                }
                if chains.insert(key, inner).is_some() {
                    return None;
                }
            }
        }
        if seen.iter().zip(&owner).any(|(&s, &o)| o == usize::MAX && !s) {
            return None;
        }
        let keys: Vec<(usize, usize)> = chains.keys().copied().collect();
        if keys != self.extra {
            return None;
        }
        Some(FilletingMap { branch: self.image.clone(), subdivided: chains.into_iter().collect() })
    }
}

/// The induced subgraph of `g` on the spine images and all witness paths,
/// with the host ids of its vertices.
pub fn assemble_filleting(
    g: &Graph,
    spec: &CaterpillarSpec,
    copy: &TCopy,
    w: &FeasibilityWitness,
) -> (Graph, Vec<usize>) {
    let mut members = g.set_of(spec.spine_of.iter().map(|&t| copy.map[t]));
    for p in &w.paths {
        for &v in p {
            members.insert(v);
        }
    }
    g.induced_subgraph(&members).expect("host ids are in range")
}
