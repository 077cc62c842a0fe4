use crate::coherence::Violation;
use crate::mass::MassedGraph;
use crate::pattern::{FeasibilityWitness, Pairing};
use crate::scalar::Scalar;

use super::{failure, Ladder, Step};

/// Paths joining the pairs of `pi`, a pairing of ports `b_i ∈ B_i`, inside
/// the union of the ladder. Each pair is routed through its two `A`-blocks,
/// entering `C` at an edge `xy` at distance at least three from the ports
/// and from the `B`/`C` vertices of earlier paths.
pub fn link_pairing<S: Scalar>(
    mg: &MassedGraph<S>,
    ladder: &Ladder,
    ports: &[usize],
    pi: &Pairing,
    eps: &S,
) -> Step<S, FeasibilityWitness> {
    const LEMMA: &str = "link";
    let g = &mg.graph;
    let col = |v: usize| ladder.b.iter().position(|b| b.contains(v));
    let mut b_all = g.empty_set();
    let mut c_all = g.empty_set();
    for i in 0..ladder.k() {
        b_all.union_with(&ladder.b[i]);
        c_all.union_with(&ladder.c[i]);
    }
    let bc = b_all.union(&c_all);
    let mut used = g.empty_set();
    let mut paths = Vec::with_capacity(pi.blocks().len());
    for block in pi.blocks() {
        let (s, t) = match block.as_slice() {
            [v] => {
                paths.push(vec![*v]);
                continue;
            }
            [s, t] => (*s, *t),
            _ => unreachable!("blocks have one or two members"),
        };
        let (Some(is), Some(it)) = (col(s), col(t)) else {
            return Err(failure(LEMMA, "a pair member is not a port", &[]));
        };
        let mut z = g.set_of(ports.iter().copied());
        z.union_with(&used.intersection(&bc));
        let near = g.ball_of_set(&z, 2);
        let x = ladder.c[is].difference(&near);
        let y = ladder.c[it].difference(&near);
        for side in [&x, &y] {
            if mg.mu(side) < *eps {
                let heaviest = z.iter().max_by(|&p, &q| {
                    mg.mu(&g.ball(p, 2)).partial_cmp(&mg.mu(&g.ball(q, 2))).expect("masses compare")
                });
                if let Some(zv) = heaviest {
                    let v = Violation::heavy_ball(mg, zv, 2);
                    if v.holds(mg, eps) {
                        return Err(v.into());
                    }
                }
                return Err(failure(LEMMA, "C-block far from Z is lighter than ε", &[("Z", &z)]));
            }
        }
        let edge = x.iter().find_map(|xv| g.neighbours(xv).intersection(&y).first().map(|yv| (xv, yv)));
        let Some((xv, yv)) = edge else {
            let v = Violation::pair(mg, x.clone(), y.clone());
            return Err(if v.holds(mg, eps) {
                v.into()
            } else {
                failure(LEMMA, "no edge between the far C-blocks", &[("X", &x), ("Y", &y)])
            });
        };
        let lift = |c: usize, i: usize| g.neighbours(c).intersection(&ladder.b[i]).first();
        let (Some(xl), Some(yl)) = (lift(xv, is), lift(yv, it)) else {
            return Err(failure(LEMMA, "a C-vertex has no neighbour in its B-block", &[]));
        };
        let mut domain = ladder.a[is].union(&ladder.a[it]);
        for v in [s, t, xv, yv, xl, yl] {
            domain.insert(v);
        }
        let path = g
            .shortest_path_within(s, t, &domain)
            .ok_or_else(|| failure(LEMMA, "the A-blocks do not connect the pair", &[]))?;
        let in_c = path.iter().filter(|&&v| c_all.contains(v)).count();
        let in_b = path.iter().filter(|&&v| v != s && v != t && b_all.contains(v)).count();
        if in_c > 2 || in_b > 2 {
            return Err(failure(LEMMA, "path uses too many B or C vertices", &[]));
        }
        for &v in &path {
            used.insert(v);
        }
        paths.push(path);
    }
    Ok(FeasibilityWitness { paths })
}
