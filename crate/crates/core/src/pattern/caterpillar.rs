use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

use super::{Pairing, Pattern};

/// A caterpillar with a head: a tree in which some path starting at the head
/// contains every vertex of degree more than one.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedCaterpillar {
    pub tree: Graph,
    /// A path containing every vertex of degree more than one.
    pub spine: Vec<usize>,
    pub head: usize,
    pub leaves: VertexSet,
}

impl RootedCaterpillar {
    /// Checks the tree, spine and head conditions.
    pub fn new(tree: Graph, spine: Vec<usize>, head: usize) -> Result<Self> {
        let n = tree.n();
        if n == 0 || head >= n {
            return Err(Error::Invalid("a rooted caterpillar needs a head".into()));
        }
        if tree.edge_count() + 1 != n || !tree.is_connected_set(&tree.vertices()) {
            return Err(Error::Invalid("not a tree".into()));
        }
        if !spine.is_empty() && !tree.is_induced_path(&spine) {
            return Err(Error::Invalid("spine is not a path".into()));
        }
        let on_spine = tree.set_of(spine.iter().copied());
        if (0..n).any(|v| tree.degree(v) > 1 && !on_spine.contains(v)) {
            return Err(Error::Invalid("spine misses a vertex of degree more than one".into()));
        }
        let leaves = tree.set_of((0..n).filter(|&v| tree.degree(v) == 1));
        let cat = RootedCaterpillar { tree, spine, head, leaves };
        if !cat.head_path_ok() {
            return Err(Error::Invalid("no path from the head covers the spine".into()));
        }
        Ok(cat)
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    /// The head followed by the vertices of degree more than one, in path
    /// order away from the head.
    pub fn head_path(&self) -> Vec<usize> {
        let mut internal: Vec<usize> = self.spine.iter().copied().filter(|&v| self.tree.degree(v) > 1).collect();
        if let (Some(&first), Some(&last)) = (internal.first(), internal.last()) {
            let h = self.head;
            let at_last = last == h || (first != h && !self.tree.has_edge(h, first) && self.tree.has_edge(h, last));
            if at_last {
                internal.reverse();
            }
        }
        let mut path = Vec::with_capacity(internal.len() + 1);
        if internal.first() != Some(&self.head) {
            path.push(self.head);
        }
        path.extend(internal);
        path
    }

    fn head_path_ok(&self) -> bool {
        let path = self.head_path();
        path.first() == Some(&self.head) && (path.len() <= 1 || self.tree.is_induced_path(&path))
    }

    pub fn leaf_list(&self) -> Vec<usize> {
        self.leaves.to_vec()
    }
}

/// The caterpillar `T` of a Hamiltonian pattern and its target leaf-pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct CaterpillarSpec {
    pub caterpillar: RootedCaterpillar,
    /// Pairs the two leaves of each edge of `H` off the path; spine ends
    /// that are leaves appear as singletons.
    pub target: Pairing,
    /// `spine_of[i]` is the tree vertex for the `i`-th path vertex.
    pub spine_of: Vec<usize>,
    /// For each pair in `target`, the edge of `H` (path indices) it realizes.
    pub pair_edges: Vec<((usize, usize), (usize, usize))>,
}

/// Tree vertices `0..q` are the spine in path order; each edge `v_i v_j`
/// off the path gets leaves pendant at `x_i` and `x_j`. Leaves at one spine
/// vertex are numbered by the other end's path index.
pub fn derive_caterpillar(pat: &Pattern) -> Result<CaterpillarSpec> {
    if !pat.is_hamiltonian() {
        return Err(Error::NotHamiltonian);
    }
    let q = pat.path.len();
    let mut pos = vec![0; q];
    for (i, &v) in pat.path.iter().enumerate() {
        pos[v] = i;
    }
    let mut extra: Vec<(usize, usize)> = pat
        .non_path_edges()
        .into_iter()
        .map(|(u, v)| (pos[u].min(pos[v]), pos[u].max(pos[v])))
        .collect();
    extra.sort_unstable();
    // Per spine index, the other ends of its extra edges, sorted.
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); q];
    for &(i, j) in &extra {
        at[i].push(j);
        at[j].push(i);
    }
    let mut edges: Vec<(usize, usize)> = (1..q).map(|i| (i - 1, i)).collect();
    let mut leaf_of = std::collections::HashMap::new();
    let mut next = q;
    for (i, others) in at.iter_mut().enumerate() {
        others.sort_unstable();
        for &j in others.iter() {
            edges.push((i, next));
            leaf_of.insert((i, j), next);
            next += 1;
        }
    }
    let tree = Graph::from_edges(next, &edges)?;
    let mut blocks = Vec::new();
    let mut pair_edges = Vec::new();
    for &(i, j) in &extra {
        let (a, b) = (leaf_of[&(i, j)], leaf_of[&(j, i)]);
        blocks.push(vec![a, b]);
        pair_edges.push(((a, b), (i, j)));
    }
    for end in [0, q - 1] {
        if tree.degree(end) == 1 && !blocks.iter().any(|b| b == &vec![end]) {
            blocks.push(vec![end]);
        }
    }
    let head = (0..q).find(|&v| tree.degree(v) > 1).unwrap_or(0);
    let spine: Vec<usize> = (0..q).collect();
    let caterpillar = RootedCaterpillar::new(tree, spine, head)?;
    let target = Pairing::new(blocks)?;
    Ok(CaterpillarSpec { caterpillar, target, spine_of: (0..q).collect(), pair_edges })
}

/// One step of the ancestor chain: the subtree on `vertices` with `head`,
/// obtained from the previous one by adding `added` next to its head.
#[derive(Clone, Debug, PartialEq)]
pub struct Ancestor {
    pub vertices: VertexSet,
    pub head: usize,
    pub added: Option<usize>,
}

/// `T_1, …, T_n` as subtrees of `T`, where each `T_{i-1}` is the predecessor
/// of `T_i`: drop a leaf next to the head (lowest id first), or, if the head
/// has no leaf neighbour, drop the head and move it to its neighbour.
pub fn ancestors(t: &RootedCaterpillar) -> Vec<Ancestor> {
    let g = &t.tree;
    let mut cur = g.vertices();
    let mut head = t.head;
    let mut rev = vec![Ancestor { vertices: cur.clone(), head, added: None }];
    while cur.len() > 1 {
        let deg_in = |v: usize, s: &VertexSet| g.neighbours(v).intersection(s).len();
        let leaf = g.neighbours(head).iter().find(|&u| cur.contains(u) && deg_in(u, &cur) == 1);
        match leaf {
            Some(u) => {
                cur.remove(u);
            }
            None => {
                let u = g.neighbours(head).intersection(&cur).first().expect("connected subtree");
                cur.remove(head);
                head = u;
            }
        }
        rev.push(Ancestor { vertices: cur.clone(), head, added: None });
    }
    rev.reverse();
    for i in 1..rev.len() {
        rev[i].added = rev[i].vertices.difference(&rev[i - 1].vertices).first();
    }
    rev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    #[test]
    fn caterpillar_of_c4() {
        let spec = derive_caterpillar(&Pattern::hamiltonian(named::cycle(4)).unwrap()).unwrap();
        let t = &spec.caterpillar;
        assert_eq!(t.n(), 6);
        assert_eq!(t.leaf_list(), vec![4, 5]);
        assert!(t.tree.has_edge(0, 4) && t.tree.has_edge(3, 5));
        assert_eq!(spec.target.blocks(), &[vec![4, 5]]);
        assert_eq!(t.head, 0);
    }

    #[test]
    fn caterpillar_of_bare_path() {
        let spec = derive_caterpillar(&Pattern::hamiltonian(named::path(4)).unwrap()).unwrap();
        assert_eq!(spec.caterpillar.n(), 4);
        assert_eq!(spec.target.blocks(), &[vec![0], vec![3]]);
        assert_eq!(spec.caterpillar.head, 1);
    }

    #[test]
    fn caterpillar_of_triangle_and_leaf_count() {
        let spec = derive_caterpillar(&Pattern::hamiltonian(named::complete(3)).unwrap()).unwrap();
        assert_eq!(spec.caterpillar.n(), 5);
        assert_eq!(spec.target.pairs().count(), 1);
        let k4 = derive_caterpillar(&Pattern::hamiltonian(named::complete(4)).unwrap()).unwrap();
        // Three edges off the path, two leaves each.
        assert_eq!(k4.caterpillar.leaves.len(), 6);
        assert!(derive_caterpillar(&Pattern::new(named::complete(4), vec![0, 1]).unwrap()).is_err());
    }

    #[test]
    fn star_ancestors() {
        let t = RootedCaterpillar::new(named::star(3), vec![0], 0).unwrap();
        let a = ancestors(&t);
        assert_eq!(a.iter().map(|x| x.vertices.len()).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert!(a.iter().all(|x| x.head == 0));
        let k2 = RootedCaterpillar::new(named::path(2), vec![0, 1], 0).unwrap();
        assert_eq!(ancestors(&k2).len(), 2);
        let k1 = RootedCaterpillar::new(Graph::new(1), vec![0], 0).unwrap();
        assert_eq!(ancestors(&k1).len(), 1);
    }

    #[test]
    fn ancestor_chain_grows_at_head() {
        let spec = derive_caterpillar(&Pattern::hamiltonian(named::complete(4)).unwrap()).unwrap();
        let t = &spec.caterpillar;
        let a = ancestors(t);
        assert_eq!(a.len(), t.n());
        for w in a.windows(2) {
            let added = w[1].added.unwrap();
            assert_eq!(w[1].vertices.len(), w[0].vertices.len() + 1);
            assert!(t.tree.has_edge(added, w[0].head));
            assert!(w[1].head == w[0].head || w[1].head == added);
        }
        assert_eq!(a.last().unwrap().head, t.head);
    }
}
