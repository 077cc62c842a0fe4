use crate::coherence::{is_dominant, Violation};
use crate::mass::MassedGraph;
use crate::pattern::{RootedCaterpillar, TCopy};
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::realization::{find_realization, Centred};
use super::{failure, touch, Constants, Mode, Step, Stop};

/// Answers "a vertex of `Z` whose radius-`r` ball inside `G[Z]` carries half
/// of `μ(Z)`". `Err` names a set on which no such vertex exists.
pub trait FocusOracle<S: Scalar> {
    fn centre(&mut self, mg: &MassedGraph<S>, z: &VertexSet, r: usize) -> Result<(usize, VertexSet), VertexSet>;
}

/// Scans the vertices of the queried set in id order.
#[derive(Clone, Debug, Default)]
pub struct LazyFocus {
    pub queries: usize,
}

impl<S: Scalar> FocusOracle<S> for LazyFocus {
    fn centre(&mut self, mg: &MassedGraph<S>, z: &VertexSet, r: usize) -> Result<(usize, VertexSet), VertexSet> {
        self.queries += 1;
        let half = mg.mu(z) / S::from_usize(2);
        for v in z.iter() {
            let ball = mg.graph.ball_within(v, r, Some(z));
            if mg.mu(&ball) >= half {
                return Ok((v, ball));
            }
        }
        Err(z.clone())
    }
}

/// Reports the whole vertex set as the break, on every call.
#[derive(Clone, Copy, Debug, Default)]
pub struct AlwaysBreak;

impl<S: Scalar> FocusOracle<S> for AlwaysBreak {
    fn centre(&mut self, mg: &MassedGraph<S>, _z: &VertexSet, _r: usize) -> Result<(usize, VertexSet), VertexSet> {
        Err(mg.graph.vertices())
    }
}

/// Leaf sets with a common centre radius, enough to link any pairing of
/// the leaves.
#[derive(Clone, Debug, PartialEq)]
pub struct FocusSupport<S: Scalar> {
    /// Host vertices `x_1, …, x_q` of the spine.
    pub spine: Vec<usize>,
    /// Host image `c_v` of each leaf, in tree-leaf order.
    pub leaves: Vec<usize>,
    /// `x^v` for each leaf.
    pub attach: Vec<usize>,
    /// `X_v ∪ {x^v}` for each leaf; `x^v` is a `centre_radius`-centre.
    pub sets: Vec<VertexSet>,
    pub centre_radius: usize,
    pub eps: S,
    /// Dominance levels of the linking rounds.
    pub levels: Vec<S>,
}

const LEMMA: &str = "small-radius";

/// A versatile copy of `t` when every heavy set the run meets has a heavy
/// centred ball; otherwise the set where that failed.
pub fn versatile_via_focus<S: Scalar>(
    mg: &MassedGraph<S>,
    t: &RootedCaterpillar,
    c: &Constants<S>,
    oracle: &mut dyn FocusOracle<S>,
) -> Step<S, (TCopy, FocusSupport<S>)> {
    let eps = &c.eps;
    let rho = c.focus_radius;
    let ys = greedy_sets(mg, c.k, &c.lambda);
    if ys.len() < c.k {
        return Err(failure(LEMMA, "fewer than k disjoint sets of mass λ", &[]));
    }
    let centred = Centred { radius: rho, oracle: &mut *oracle, focus_delta: c.delta.clone() };
    let real = find_realization(mg, t, &ys, &c.kappa0, eps, c.mode, Some(centred))?;
    let head_path = t.head_path();
    let spine = walk_spine(mg, &head_path, &real.sets).ok_or_else(|| failure(LEMMA, "spine walk", &[]))?;
    let spine_set = mg.graph.set_of(spine.iter().copied());
    let leaves = t.leaf_list();
    let attach: Vec<usize> = leaves
        .iter()
        .map(|&v| {
            let p = head_path.iter().position(|&s| t.tree.has_edge(s, v)).expect("leaves hang off the spine");
            spine[p]
        })
        .collect();
    let mut sets: Vec<VertexSet> = leaves
        .iter()
        .zip(&attach)
        .map(|(&v, &x)| {
            let mut s = real.sets[v].clone();
            s.insert(x);
            s
        })
        .collect();
    let ell = leaves.len();
    let (near, far) = (2 * rho + 1, 3 * rho + 2);
    for i in 0..ell {
        let level = c.focus_kappa(i + 1);
        for j in (0..ell).filter(|&j| j != i) {
            let radius = if j < i { far } else { near };
            sets[j] = shrink(mg, &sets[j], attach[j], radius, &level);
        }
        let mut forbidden = spine_set.clone();
        for (j, s) in sets.iter().enumerate() {
            if j != i {
                forbidden.union_with(s);
            }
        }
        let y2 = touch(mg, &sets[i]).difference(&touch(mg, &forbidden));
        if mg.mu(&y2) < c.delta {
            return Err(failure(LEMMA, "free part of a leaf neighbourhood is below δ", &[("Y'", &y2)]));
        }
        let (y, ball) = match oracle.centre(mg, &y2, rho) {
            Ok(found) => found,
            Err(z) if mg.mu(&z) >= c.delta => return Err(Stop::FocusBreak(z)),
            Err(z) => return Err(failure(LEMMA, "focus break below δ", &[("Z", &z)])),
        };
        let mut within = sets[i].clone();
        within.insert(y);
        let path = mg
            .graph
            .shortest_path_within(attach[i], y, &within)
            .ok_or_else(|| failure(LEMMA, "no path from x^v to the centre", &[("X", &sets[i])]))?;
        let mut next = ball;
        for &p in &path {
            next.insert(p);
        }
        sets[i] = next;
        let need = if i + 1 < ell { c.focus_kappa(i + 2) } else { c.join_kappa(0, c.leaf_radius()) };
        if c.mode == Mode::Theorem && !is_dominant(mg, &sets[i], &need) {
            return Err(failure(LEMMA, "new leaf set is not dominant", &[("X", &sets[i])]));
        }
    }
    let mut leaf_images = Vec::with_capacity(ell);
    for (s, &x) in sets.iter().zip(&attach) {
        let nbrs = mg.graph.neighbours(x).intersection(s);
        if nbrs.len() != 1 {
            return Err(failure(LEMMA, "x^v has no unique neighbour in its leaf set", &[("X", s)]));
        }
        leaf_images.push(nbrs.first().expect("one neighbour"));
    }
    let mut map = vec![usize::MAX; t.n()];
    for (p, &s) in head_path.iter().enumerate() {
        map[s] = spine[p];
    }
    for (l, &v) in leaves.iter().enumerate() {
        map[v] = leaf_images[l];
    }
    let copy = TCopy { map };
    if !copy.is_induced_copy(&mg.graph, &t.tree) {
        return Err(failure(LEMMA, "spine and leaf images are not an induced copy", &[]));
    }
    let levels = (0..=t.n()).map(|i| c.join_kappa(i, c.leaf_radius())).collect();
    let support = FocusSupport {
        spine,
        leaves: leaf_images,
        attach,
        sets,
        centre_radius: c.leaf_radius(),
        eps: c.eps.clone(),
        levels,
    };
    Ok((copy, support))
}

/// Disjoint sets of mass at least `lambda`, each grown in id order until it
/// crosses the threshold.
pub(crate) fn greedy_sets<S: Scalar>(mg: &MassedGraph<S>, k: usize, lambda: &S) -> Vec<VertexSet> {
    let mut out = Vec::with_capacity(k);
    let mut cur = mg.graph.empty_set();
    let mut m = S::zero();
    for v in 0..mg.n() {
        if out.len() == k {
            break;
        }
        cur.insert(v);
        m = m + mg.mu_vertex(v);
        if m >= *lambda {
            out.push(std::mem::replace(&mut cur, mg.graph.empty_set()));
            m = S::zero();
        }
    }
    out
}

/// `x_1` is the lowest id of the head set; each later `x_i` is the lowest id
/// in its set adjacent to `x_{i−1}`.
pub(crate) fn walk_spine<S: Scalar>(mg: &MassedGraph<S>, head_path: &[usize], sets: &[VertexSet]) -> Option<Vec<usize>> {
    let mut spine = vec![sets[*head_path.first()?].first()?];
    for &s in &head_path[1..] {
        let prev = *spine.last().expect("nonempty");
        spine.push(sets[s].intersection(mg.graph.neighbours(prev)).first()?);
    }
    Some(spine)
}

/// Deletes a vertex farthest from `centre` (highest id on ties) while the
/// set stays `kappa`-dominant, keeping at least one neighbour of the centre.
/// A set that is not dominant to begin with is returned unchanged.
pub(crate) fn shrink<S: Scalar>(
    mg: &MassedGraph<S>,
    x: &VertexSet,
    centre: usize,
    radius: usize,
    kappa: &S,
) -> VertexSet {
    let mut cur = x.clone();
    debug_assert!(mg.graph.has_r_centre(&cur, centre, radius).unwrap_or(false));
    while cur.len() > 2 {
        let dist = mg.graph.distances_from(&[centre], Some(&cur));
        let w = cur.iter().max_by_key(|&v| (dist[v], v)).expect("nonempty");
        let mut cand = cur.clone();
        cand.remove(w);
        if !is_dominant(mg, &cand, kappa) {
            break;
        }
        cur = cand;
    }
    cur
}

/// Paths for a leaf pairing, in the order of `blocks` (host ids).
pub(crate) fn join_leaves<S: Scalar>(
    mg: &MassedGraph<S>,
    sup: &FocusSupport<S>,
    blocks: &[Vec<usize>],
) -> Step<S, Vec<Vec<usize>>> {
    const JOIN: &str = "join-leaves";
    let idx = |v: usize| sup.leaves.iter().position(|&c| c == v);
    let mut order: Vec<usize> = (0..blocks.len()).filter(|&b| blocks[b].len() == 2).collect();
    order.extend((0..blocks.len()).filter(|&b| blocks[b].len() == 1));
    let mut sets = sup.sets.clone();
    let spine = mg.graph.set_of(sup.spine.iter().copied());
    let mut used = mg.graph.empty_set();
    let mut paths = vec![Vec::new(); blocks.len()];
    for (round, &b) in order.iter().enumerate() {
        let block = &blocks[b];
        let Some(&[u, v]) = block.iter().map(|&x| idx(x)).collect::<Option<Vec<_>>>().as_deref() else {
            if block.len() == 1 && idx(block[0]).is_some() {
                paths[b] = vec![block[0]];
                continue;
            }
            return Err(failure(JOIN, "block is not made of leaves", &[]));
        };
        let level = &sup.levels[(round + 1).min(sup.levels.len() - 1)];
        let later: Vec<usize> = order[round + 1..].iter().flat_map(|&o| blocks[o].iter().filter_map(|&x| idx(x))).collect();
        for &w in &later {
            sets[w] = shrink(mg, &sets[w], sup.attach[w], sup.centre_radius, level);
        }
        let mut forbidden = spine.union(&used);
        for &w in &later {
            forbidden.union_with(&sets[w]);
        }
        let blocked = touch(mg, &forbidden);
        let su = touch(mg, &sets[u]).difference(&blocked);
        let sv = touch(mg, &sets[v]).difference(&blocked);
        let (a, bb) = match su.intersection(&sv).first() {
            Some(a) => (a, a),
            None => match su.iter().find_map(|a| mg.graph.neighbours(a).intersection(&sv).first().map(|b| (a, b))) {
                Some(ab) => ab,
                None => {
                    let viol = Violation::pair(mg, su.clone(), sv.clone());
                    return Err(if viol.holds(mg, &sup.eps) {
                        viol.into()
                    } else {
                        failure(JOIN, "free neighbourhoods of a pair are light", &[("S_u", &su), ("S_v", &sv)])
                    });
                }
            },
        };
        let mut domain = sets[u].union(&sets[v]);
        domain.insert(a);
        domain.insert(bb);
        domain.remove(sup.attach[u]);
        domain.remove(sup.attach[v]);
        let (cu, cv) = (sup.leaves[u], sup.leaves[v]);
        let path = mg
            .graph
            .shortest_path_within(cu, cv, &domain)
            .ok_or_else(|| failure(JOIN, "no path through the leaf sets", &[]))?;
        for &p in &path {
            used.insert(p);
        }
        paths[b] = if path[0] == block[0] { path } else { path.into_iter().rev().collect() };
    }
    Ok(paths)
}
