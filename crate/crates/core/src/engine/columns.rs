use serde::Serialize;

use crate::coherence::Violation;
use crate::mass::MassedGraph;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::components::find_connected_heavy;
use super::{failure, heavy_local_among, Mode, Step};

/// `A_1..A_k`, `B_1..B_k` and a common `C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Columns {
    pub a: Vec<VertexSet>,
    pub b: Vec<VertexSet>,
    pub c: VertexSet,
}

/// A `k`-ladder: `A_i` connected covering `B_i`, `B_i` covering `C_i`,
/// `A_i` anticomplete to `C_i` and to every other column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ladder {
    pub a: Vec<VertexSet>,
    pub b: Vec<VertexSet>,
    pub c: Vec<VertexSet>,
    pub half_cleaned: bool,
}

impl Ladder {
    pub fn k(&self) -> usize {
        self.a.len()
    }
}

/// A subset of `b` covering mass at least `bound` of `target`, collected
/// highest id first, skipping vertices that add no mass, and stopping as
/// soon as the bound is met. Without its last vertex the subset falls below
/// the bound, so it overshoots by less than that vertex's neighbourhood.
/// Returns all of `b` when even `b` falls short.
pub(crate) fn minimal_cover<S: Scalar>(mg: &MassedGraph<S>, b: &VertexSet, target: &VertexSet, bound: &S) -> VertexSet {
    let g = &mg.graph;
    let mut covered_set = g.empty_set();
    let mut covered = S::zero();
    let mut cur = g.empty_set();
    let mut members = b.to_vec();
    members.reverse();
    for v in members {
        if covered >= *bound {
            break;
        }
        let new = g.neighbours(v).intersection(target).difference(&covered_set);
        let gain = mg.mu(&new);
        if gain > S::zero() {
            cur.insert(v);
            covered = covered + gain;
            covered_set.union_with(&new);
        }
    }
    if covered >= *bound {
        cur
    } else {
        b.clone()
    }
}

/// Grows `k` columns one at a time: each new `A_k` is a minimal connected
/// set inside the part of `C` no earlier `B_i` covers, with
/// `μ(A_k ∪ B(A_k)) ≥ ε`, and `B_k` its neighbours in `C`.
pub fn build_columns<S: Scalar>(mg: &MassedGraph<S>, k: usize, kappa: &S, eps: &S, mode: Mode) -> Step<S, Columns> {
    const LEMMA: &str = "columns";
    let g = &mg.graph;
    let three = S::from_usize(3);
    let mut a: Vec<VertexSet> = Vec::with_capacity(k);
    let mut b: Vec<VertexSet> = Vec::with_capacity(k);
    let mut c = g.vertices();
    for step in 1..=k {
        let bound = kappa.clone() - three.clone() * S::from_usize(step - 1) * eps.clone();
        for bi in b.iter_mut() {
            *bi = minimal_cover(mg, bi, &c, &bound);
        }
        let mut d = c.clone();
        for bi in &b {
            d.difference_with(&g.covered_part(bi, &c));
        }
        let x0 = find_connected_heavy(mg, &d, eps)?;
        let x = minimal_column(mg, &x0, &c, eps)
            .ok_or_else(|| failure(LEMMA, "no connected set reaches mass ε with its boundary", &[("D", &d)]))?;
        let bx = g.open_neighbourhood(&x).intersection(&c).difference(&x);
        let ab = x.union(&bx);
        if mg.mu(&ab) > three.clone() * eps.clone() {
            let candidates: Vec<usize> = x.iter().filter(|&v| removal_keeps_connected(mg, &x, v)).collect();
            if let Some(v) = heavy_local_among(mg, eps, candidates) {
                return Err(v.into());
            }
            if mode == Mode::Theorem {
                return Err(failure(LEMMA, "new column is heavier than 3ε", &[("A", &x)]));
            }
        }
        c.difference_with(&ab);
        let ck = g.covered_part(&bx, &c);
        let rest = c.difference(&ck);
        let v = Violation::pair(mg, ab.clone(), rest);
        if v.holds(mg, eps) {
            return Err(v.into());
        }
        a.push(x);
        b.push(bx);
        let target = kappa.clone() - three.clone() * S::from_usize(step) * eps.clone();
        for (i, bi) in b.iter().enumerate() {
            if mg.mu(&g.covered_part(bi, &c)) < target {
                let name = format!("B_{} covers too little of C", i + 1);
                return Err(failure(LEMMA, &name, &[("B", bi), ("C", &c)]));
            }
        }
    }
    Ok(Columns { a, b, c })
}

/// A minimal connected subset `X` of `x0` with `μ(X ∪ B(X)) ≥ ε`: the
/// shortest prefix of `x0` grown lowest id first from its lowest vertex,
/// then shrunk by deleting non-cut vertices, highest id first, while the
/// bound holds.
fn minimal_column<S: Scalar>(mg: &MassedGraph<S>, x0: &VertexSet, c: &VertexSet, eps: &S) -> Option<VertexSet> {
    let g = &mg.graph;
    let n = mg.n();
    let start = x0.first()?;
    let mut x = g.empty_set();
    // cnt[w]: neighbours of w inside X; counted[w]: w ∈ X ∪ (N(X) ∩ C).
    let mut cnt = vec![0usize; n];
    let mut counted = vec![false; n];
    let mut weight = S::zero();
    let mut seen = g.empty_set();
    seen.insert(start);
    let mut heap = std::collections::BinaryHeap::from([std::cmp::Reverse(start)]);
    while weight < *eps {
        let std::cmp::Reverse(v) = heap.pop()?;
        x.insert(v);
        if !counted[v] {
            counted[v] = true;
            weight = weight + mg.mu_vertex(v);
        }
        for w in g.neighbours(v).iter() {
            cnt[w] += 1;
            if !counted[w] && c.contains(w) {
                counted[w] = true;
                weight = weight + mg.mu_vertex(w);
            }
            if x0.contains(w) && !seen.contains(w) {
                seen.insert(w);
                heap.push(std::cmp::Reverse(w));
            }
        }
    }
    let loss = |x: &VertexSet, cnt: &[usize], v: usize| {
        let mut l = S::zero();
        if !(c.contains(v) && cnt[v] > 0) {
            l = l + mg.mu_vertex(v);
        }
        for w in g.neighbours(v).iter() {
            if cnt[w] == 1 && !x.contains(w) && c.contains(w) {
                l = l + mg.mu_vertex(w);
            }
        }
        l
    };
    let remove = |x: &mut VertexSet, cnt: &mut [usize], weight: &mut S, v: usize, l: S| {
        x.remove(v);
        for w in g.neighbours(v).iter() {
            cnt[w] -= 1;
        }
        *weight = weight.clone() - l;
    };
    loop {
        if x.len() == 1 {
            return Some(x);
        }
        let cut = g.articulation_points(&x);
        let mut members = x.to_vec();
        members.reverse();
        let next = members.into_iter().filter(|&v| !cut.contains(v)).find_map(|v| {
            let l = loss(&x, &cnt, v);
            (weight.clone() - l.clone() >= *eps).then_some((v, l))
        });
        match next {
            Some((v, l)) => remove(&mut x, &mut cnt, &mut weight, v, l),
            None => return Some(x),
        }
    }
}

fn removal_keeps_connected<S: Scalar>(mg: &MassedGraph<S>, x: &VertexSet, v: usize) -> bool {
    let mut y = x.clone();
    y.remove(v);
    mg.graph.is_connected_set(&y)
}

/// A half-cleaned `k`-ladder with `κ ≤ μ(C_i) ≤ κ + ε`.
///
/// Columns are built at `k(κ+ε) + 3kε`, so each `B_i` still covers mass
/// `k(κ+ε)` of `C`; then `B_1, B_2, …` are cut down in turn to minimal
/// subsets covering mass `κ` of what is left of `C`.
pub fn build_ladder<S: Scalar>(mg: &MassedGraph<S>, k: usize, kappa: &S, eps: &S, mode: Mode) -> Step<S, Ladder> {
    const LEMMA: &str = "ladder";
    let g = &mg.graph;
    let ku = S::from_usize(k);
    let wide = ku.clone() * (kappa.clone() + eps.clone()) + S::from_usize(3) * ku * eps.clone();
    let cols = build_columns(mg, k, &wide, eps, mode)?;
    let mut rest = cols.c.clone();
    let mut b = Vec::with_capacity(k);
    let mut c = Vec::with_capacity(k);
    for bi in &cols.b {
        let small = minimal_cover(mg, bi, &rest, kappa);
        let ci = g.covered_part(&small, &rest);
        let m = mg.mu(&ci);
        if m < *kappa {
            return Err(failure(LEMMA, "a column covers less than κ", &[("B", bi), ("C", &rest)]));
        }
        if m > kappa.clone() + eps.clone() {
            if let Some(v) = heavy_local_among(mg, eps, small.iter()) {
                return Err(v.into());
            }
            if mode == Mode::Theorem {
                return Err(failure(LEMMA, "a minimal column covers more than κ+ε", &[("B", &small)]));
            }
        }
        rest.difference_with(&ci);
        b.push(small);
        c.push(ci);
    }
    Ok(Ladder { a: cols.a, b, c, half_cleaned: true })
}
