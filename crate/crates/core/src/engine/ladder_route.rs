use crate::coherence::Violation;
use crate::mass::MassedGraph;
use crate::pattern::{FeasibilityWitness, Pairing, RootedCaterpillar, TCopy};
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::focus::walk_spine;
use super::realization::find_realization;
use super::{build_ladder, failure, link_pairing, Constants, Ladder, Step};

/// The pruned ladder with one port per leaf column, and the escape path of
/// each leaf from its image `c_i` out to the port's neighbour `u_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderSupport<S: Scalar> {
    pub ladder: Ladder,
    /// `b_i`, one per column of the pruned ladder.
    pub ports: Vec<usize>,
    /// `Q_i` from `c_i` to `u_i`, aligned with `ports`.
    pub escapes: Vec<Vec<usize>>,
    pub eps: S,
}

const LEMMA: &str = "big-radius";

/// A versatile copy of `t` built on a half-cleaned ladder; meant for graphs
/// where no ball of radius `r` is heavy.
pub fn versatile_via_ladder<S: Scalar>(
    mg: &MassedGraph<S>,
    t: &RootedCaterpillar,
    c: &Constants<S>,
) -> Step<S, (TCopy, LadderSupport<S>)> {
    let g = &mg.graph;
    let eps = &c.eps_r;
    let k = c.k;
    let ladder = build_ladder(mg, k, &c.kappa, eps, c.mode)?;
    let real = find_realization(mg, t, &ladder.c, &c.realization_delta, eps, c.mode, None)?;
    let head_path = t.head_path();
    let q = head_path.len();
    let spine = walk_spine(mg, &head_path, &real.sets).ok_or_else(|| failure(LEMMA, "spine walk", &[]))?;
    let x1 = spine[0];
    let dist = g.distances_from(&[x1], None);
    let leaves = t.leaf_list();
    // Leaves in increasing column order.
    let mut by_col: Vec<(usize, usize)> = leaves.iter().map(|&v| (real.spread[v], v)).collect();
    by_col.sort_unstable();
    let mut ports = Vec::with_capacity(by_col.len());
    let mut escapes = Vec::with_capacity(by_col.len());
    let mut images = vec![usize::MAX; t.n()];
    for &(col, v) in &by_col {
        let p = head_path.iter().position(|&s| t.tree.has_edge(s, v)).expect("leaves hang off the spine");
        let xv = spine[p];
        let reach = q + 4 * (col + 1);
        let mut within = real.sets[v].clone();
        within.insert(xv);
        let path = escape(mg, xv, &within, &dist, reach).ok_or_else(|| {
            let ball = Violation::heavy_ball(mg, x1, c.r);
            if ball.holds(mg, eps) {
                ball.into()
            } else {
                failure(LEMMA, "leaf set does not reach the required distance", &[("X", &real.sets[v])])
            }
        })?;
        let u = *path.last().expect("escape paths are nonempty");
        let b = g
            .neighbours(u)
            .intersection(&ladder.b[col])
            .first()
            .ok_or_else(|| failure(LEMMA, "u_i has no neighbour in B_i", &[]))?;
        images[v] = path[1];
        ports.push(b);
        escapes.push(path[1..].to_vec());
    }
    let radius = 4 * k + q + 4;
    let zball = g.ball(x1, radius);
    if mg.mu(&zball) >= *eps {
        return Err(Violation::heavy_ball(mg, x1, radius).into());
    }
    let mut used = g.empty_set();
    for (e, &b) in escapes.iter().zip(&ports) {
        used.union_with(&g.set_of(e.iter().copied()));
        used.insert(b);
    }
    let touched = g.open_neighbourhood(&used);
    let mut pruned = Ladder { a: vec![], b: vec![], c: vec![], half_cleaned: false };
    for (&(col, _), &b) in by_col.iter().zip(&ports) {
        pruned.a.push(ladder.a[col].clone());
        let mut bi = ladder.b[col].difference(&touched);
        bi.insert(b);
        pruned.b.push(bi);
        pruned.c.push(ladder.c[col].difference(&zball));
    }
    let mut map = vec![usize::MAX; t.n()];
    for (p, &s) in head_path.iter().enumerate() {
        map[s] = spine[p];
    }
    for &v in &leaves {
        map[v] = images[v];
    }
    let copy = TCopy { map };
    if !copy.is_induced_copy(g, &t.tree) {
        return Err(failure(LEMMA, "spine and leaf images are not an induced copy", &[]));
    }
    Ok((copy, LadderSupport { ladder: pruned, ports, escapes, eps: eps.clone() }))
}

/// A shortest path inside `within` from `start` to the first vertex at
/// distance at least `reach` from `x_1`, expanding only through nearer
/// vertices.
fn escape<S: Scalar>(
    mg: &MassedGraph<S>,
    start: usize,
    within: &VertexSet,
    dist: &[usize],
    reach: usize,
) -> Option<Vec<usize>> {
    let g = &mg.graph;
    // Unreached vertices count as far.
    let far = |v: usize| dist[v] >= reach;
    let mut parent = vec![usize::MAX; mg.n()];
    let mut queue = std::collections::VecDeque::from([start]);
    parent[start] = start;
    while let Some(v) = queue.pop_front() {
        if far(v) {
            let mut path = vec![v];
            let mut cur = v;
            while cur != start {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for w in g.neighbours(v).intersection(within).iter() {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Paths for a pairing of the leaf images, in the order of `pi`'s blocks.
pub(crate) fn splice<S: Scalar>(
    mg: &MassedGraph<S>,
    sup: &LadderSupport<S>,
    pi: &Pairing,
) -> Step<S, FeasibilityWitness> {
    let g = &mg.graph;
    let slot = |c: usize| sup.escapes.iter().position(|e| e[0] == c);
    let port_blocks = pi
        .blocks()
        .iter()
        .map(|b| b.iter().map(|&c| slot(c).map(|i| sup.ports[i])).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| failure(LEMMA, "pairing is not made of leaf images", &[]))?;
    let port_pi = Pairing::new(port_blocks).map_err(|_| failure(LEMMA, "ports repeat", &[]))?;
    let linked = link_pairing(mg, &sup.ladder, &sup.ports, &port_pi, &sup.eps)?;
    let mut paths = Vec::with_capacity(pi.blocks().len());
    for block in pi.blocks() {
        if let [c] = block.as_slice() {
            paths.push(vec![*c]);
            continue;
        }
        let (i, j) = (slot(block[0]).expect("checked"), slot(block[1]).expect("checked"));
        let (bi, bj) = (sup.ports[i], sup.ports[j]);
        let key = if bi < bj { vec![bi, bj] } else { vec![bj, bi] };
        let at = port_pi.blocks().iter().position(|b| *b == key).expect("same blocks");
        let mut domain = g.set_of(sup.escapes[i].iter().chain(&sup.escapes[j]).copied());
        for &v in &linked.paths[at] {
            domain.insert(v);
        }
        let path = g
            .shortest_path_within(block[0], block[1], &domain)
            .ok_or_else(|| failure(LEMMA, "escape and link paths do not connect", &[]))?;
        paths.push(path);
    }
    Ok(FeasibilityWitness { paths })
}
