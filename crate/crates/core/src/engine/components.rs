use crate::coherence::Violation;
use crate::mass::MassedGraph;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::{failure, Step};

/// A connected `X ⊆ Y` with `μ(X) > μ(Y) − ε`, or two anticomplete unions
/// of components of `G[Y]` that both have mass at least `ε`.
///
/// Needs `μ(Y) ≥ 3ε` for the pair to be guaranteed.
pub fn find_connected_heavy<S: Scalar>(mg: &MassedGraph<S>, y: &VertexSet, eps: &S) -> Step<S, VertexSet> {
    let comps = mg.graph.components(y);
    let total = mg.mu(y);
    let masses: Vec<S> = comps.iter().map(|c| mg.mu(c)).collect();
    let heaviest = (0..comps.len()).fold(None::<usize>, |best, i| match best {
        Some(b) if masses[b] >= masses[i] => Some(b),
        _ => Some(i),
    });
    let Some(h) = heaviest else {
        return Err(failure("components", "Y is empty", &[]));
    };
    if masses[h] > total.clone() - eps.clone() {
        return Ok(comps[h].clone());
    }
    // Either one component is heavy on its own, or components are added
    // in id order until the union reaches ε.
    let a = if masses[h] >= *eps {
        comps[h].clone()
    } else {
        let mut a = mg.graph.empty_set();
        for c in &comps {
            if mg.mu(&a) >= *eps {
                break;
            }
            a.union_with(c);
        }
        a
    };
    let b = y.difference(&a);
    let v = Violation::pair(mg, a, b);
    if v.holds(mg, eps) {
        Err(v.into())
    } else {
        Err(failure("components", "no heavy component and no heavy split", &[("Y", y)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named, Graph};
    use crate::Rational;
    use crate::engine::Stop;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn connected_input_is_returned() {
        let mg = MassedGraph::<Rational>::uniform(named::cycle(5));
        let y = mg.graph.vertices();
        assert_eq!(find_connected_heavy(&mg, &y, &q(1, 10)).unwrap(), y);
    }

    #[test]
    fn triangle_plus_isolated_vertex() {
        let mut g = Graph::new(4);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            g.add_edge(u, v).unwrap();
        }
        let mg = MassedGraph::<Rational>::uniform(g);
        let x = find_connected_heavy(&mg, &mg.graph.vertices(), &q(3, 10)).unwrap();
        assert_eq!(x.to_vec(), vec![0, 1, 2]);
        assert_eq!(mg.mu(&x), q(3, 4));
    }

    #[test]
    fn two_triangles_give_a_pair() {
        let mg = MassedGraph::<Rational>::uniform(named::cliques_union(2, 3));
        match find_connected_heavy(&mg, &mg.graph.vertices(), &q(3, 10)) {
            Err(Stop::Violation(Violation::AnticompletePair { mass_a, mass_b, .. })) => {
                assert_eq!((mass_a, mass_b), (q(1, 2), q(1, 2)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
