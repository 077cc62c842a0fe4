use std::collections::BTreeMap;

use serde::Serialize;

use crate::coherence::Violation;
use crate::mass::MassedGraph;
use crate::pattern::{ancestors, Ancestor, RootedCaterpillar};
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::components::find_connected_heavy;
use super::constants::schedule;
use super::focus::FocusOracle;
use super::{failure, Mode, Step, Stop};

/// A set `X_v` for every vertex `v` of the caterpillar, each inside a
/// different member `Y_{spread[v]}` of the given family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub sets: Vec<VertexSet>,
    pub spread: Vec<usize>,
}

/// Centred mode: every non-head set gets a `radius`-centre, found by the
/// focus oracle.
pub struct Centred<'a, S: Scalar> {
    pub radius: usize,
    pub oracle: &'a mut dyn FocusOracle<S>,
    /// A set the oracle fails on is only a genuine break at this mass.
    pub focus_delta: S,
}

/// A nursery component: a copy of the ancestor `T_{level+1}`, realized by
/// `(X_v, index into 𝒴)` per tree vertex.
#[derive(Clone, Debug)]
struct Component {
    level: usize,
    sets: BTreeMap<usize, (VertexSet, usize)>,
}

/// A `𝒴`-spread `δ`-realization of `t`, built by merging nursery
/// components until one of them is all of `t`.
///
/// In theorem mode the merge threshold with `k` components is
/// `m_{k−1} = 2^{k−1}(δ+ε) − ε`; in exploratory mode it is `δ` throughout
/// and every head is rechecked after each merge.
pub fn find_realization<S: Scalar>(
    mg: &MassedGraph<S>,
    t: &RootedCaterpillar,
    ys: &[VertexSet],
    delta: &S,
    eps: &S,
    mode: Mode,
    mut centred: Option<Centred<'_, S>>,
) -> Step<S, Realization> {
    const LEMMA: &str = "realization";
    let anc = ancestors(t);
    let p = ys.len();
    if p == 0 {
        return Err(failure(LEMMA, "empty family", &[]));
    }
    let threshold = |k: usize| match mode {
        Mode::Theorem => schedule(delta, eps, k),
        Mode::Exploratory => delta.clone(),
    };
    for (idx, y) in ys.iter().enumerate() {
        if mg.mu(y) < threshold(p) {
            return Err(failure(LEMMA, &format!("Y_{idx} is below the starting threshold"), &[("Y", y)]));
        }
    }
    let root = anc[0].head;
    let mut comps: Vec<Component> = ys
        .iter()
        .enumerate()
        .map(|(idx, y)| Component { level: 0, sets: BTreeMap::from([(root, (y.clone(), idx))]) })
        .collect();
    let last = anc.len() - 1;
    loop {
        if let Some(done) = comps.iter().find(|c| c.level == last) {
            let mut sets = vec![mg.graph.empty_set(); t.n()];
            let mut spread = vec![0; t.n()];
            for (&v, (x, idx)) in &done.sets {
                sets[v] = x.clone();
                spread[v] = *idx;
            }
            return Ok(Realization { sets, spread });
        }
        let k = comps.len();
        if k < 2 {
            return Err(failure(LEMMA, "a single component remains", &[]));
        }
        comps.sort_by_key(|c| c.level);
        let m = threshold(k - 1);
        let head_of = |c: &Component| anc[c.level].head;
        let changes_head = |c: &Component| {
            let next: &Ancestor = &anc[c.level + 1];
            next.added == Some(next.head)
        };
        let i = (0..k).rev().find(|&i| changes_head(&comps[i])).unwrap_or(0);
        let xi = comps[i].sets[&head_of(&comps[i])].0.clone();
        let (z, order) = match centred.as_mut() {
            None => {
                let z = find_connected_heavy(mg, &xi, eps)?;
                let start = z.first().expect("a heavy set is nonempty");
                let order = distance_order(mg, &z, start);
                (z, order)
            }
            Some(c) => match c.oracle.centre(mg, &xi, c.radius) {
                Ok((centre, ball)) => {
                    let order = distance_order(mg, &ball, centre);
                    (ball, order)
                }
                Err(z) if mg.mu(&z) >= c.focus_delta => return Err(Stop::FocusBreak(z)),
                Err(_) => return Err(failure(LEMMA, "head set below the focus threshold", &[("X", &xi)])),
            },
        };
        // owner[w] = j when w lies in the head set of component j ≠ i.
        let mut owner = vec![usize::MAX; mg.n()];
        for (j, c) in comps.iter().enumerate() {
            if j != i {
                for w in c.sets[&head_of(c)].0.iter() {
                    owner[w] = j;
                }
            }
        }
        let mut covered = vec![S::zero(); k];
        let mut seen = mg.graph.empty_set();
        let mut chosen = None;
        for (pos, &zv) in order.iter().enumerate() {
            for w in mg.graph.neighbours(zv).iter() {
                if owner[w] != usize::MAX && seen.insert(w) {
                    covered[owner[w]] = covered[owner[w]].clone() + mg.mu_vertex(w);
                }
            }
            if let Some(j) = (0..k).rev().find(|&j| j != i && covered[j] >= m) {
                chosen = Some((pos + 1, j));
                break;
            }
        }
        let Some((q, j)) = chosen else {
            let nz = mg.graph.open_neighbourhood(&z);
            for (j, c) in comps.iter().enumerate() {
                if j == i {
                    continue;
                }
                let rest = c.sets[&head_of(c)].0.difference(&nz);
                let v = Violation::pair(mg, z.clone(), rest);
                if v.holds(mg, eps) {
                    return Err(v.into());
                }
            }
            return Err(failure(LEMMA, "no prefix covers another head set", &[("Z", &z)]));
        };
        let prefix = mg.graph.set_of(order[..q].iter().copied());
        let np = mg.graph.open_neighbourhood(&prefix);
        let mut heads: Vec<VertexSet> = Vec::with_capacity(k);
        for (l, c) in comps.iter().enumerate() {
            let x = &c.sets[&head_of(c)].0;
            heads.push(if l == i {
                prefix.clone()
            } else if l == j {
                x.intersection(&np)
            } else {
                x.difference(&np)
            });
        }
        for (l, c) in comps.iter_mut().enumerate() {
            let h = anc[c.level].head;
            c.sets.get_mut(&h).expect("head is realized").0 = heads[l].clone();
        }
        let (grow, gone) = if j < i { (i, j) } else { (j, i) };
        let gone_head = head_of(&comps[gone]);
        let moved = comps[gone].sets[&gone_head].clone();
        let g = &mut comps[grow];
        let added = anc[g.level + 1].added.expect("ancestors above T_1 add a vertex");
        g.sets.insert(added, moved);
        g.level += 1;
        comps.remove(gone);
        // Once a component is all of T no further merge needs the heads.
        if mode == Mode::Exploratory && !comps.iter().any(|c| c.level == last) {
            let m_next = threshold(comps.len());
            for c in &comps {
                let x = &c.sets[&head_of(c)].0;
                if mg.mu(x) < m_next {
                    return Err(failure(LEMMA, "a head set fell below the threshold", &[("X", x)]));
                }
            }
        }
    }
}

/// Vertices of `z` in increasing `G[Z]`-distance from `start`, ties by id.
/// Every prefix is connected.
pub(crate) fn distance_order<S: Scalar>(mg: &MassedGraph<S>, z: &VertexSet, start: usize) -> Vec<usize> {
    let dist = mg.graph.distances_from(&[start], Some(z));
    let mut order: Vec<usize> = z.iter().filter(|&v| dist[v] != crate::graph::UNREACHED).collect();
    order.sort_by_key(|&v| (dist[v], v));
    order
}
