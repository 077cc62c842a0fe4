use crate::coherence::{check_coherence, find_heavy_local, CoherenceConfig, Violation};
use crate::mass::MassedGraph;
use crate::pattern::{FeasibilityWitness, Pairing, RootedCaterpillar, TCopy};
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::focus::join_leaves;
use super::ladder_route::splice;
use super::{
    failure, versatile_via_focus, versatile_via_ladder, Constants, FocusOracle, FocusSupport, LadderSupport, LazyFocus,
    Mode, Step, Stop,
};

/// What a certificate keeps so that any leaf pairing can be linked later.
#[derive(Clone, Debug, PartialEq)]
pub enum Support<S: Scalar> {
    /// No leaves: the empty pairing is the only one.
    Bare,
    Ladder(LadderSupport<S>),
    Focus(FocusSupport<S>),
}

/// A copy of `T` together with enough structure to make every leaf pairing
/// feasible.
#[derive(Clone, Debug, PartialEq)]
pub struct VersatileCertificate<S: Scalar> {
    /// Host ids.
    pub copy: TCopy,
    /// When the ladder route ran inside `G[Z]` with mass `μ/μ(Z)`, the set
    /// `Z`; the support then uses the ids of that restriction.
    pub frame: Option<VertexSet>,
    pub support: Support<S>,
}

/// A versatile copy of `t`, or a violation of `ε`-coherence.
pub fn find_versatile<S: Scalar>(
    mg: &MassedGraph<S>,
    t: &RootedCaterpillar,
    c: &Constants<S>,
) -> Step<S, VersatileCertificate<S>> {
    find_versatile_with(mg, t, c, &mut LazyFocus::default())
}

/// As [`find_versatile`], with a chosen focus oracle.
///
/// Runs the focus route first. If it reports a set `Z` with no heavy
/// centred ball, the ladder route runs on `G[Z]` with mass `μ/μ(Z)`, and
/// whatever it finds is carried back to `G`.
pub fn find_versatile_with<S: Scalar>(
    mg: &MassedGraph<S>,
    t: &RootedCaterpillar,
    c: &Constants<S>,
    oracle: &mut dyn FocusOracle<S>,
) -> Step<S, VersatileCertificate<S>> {
    let out = dispatch(mg, t, c, oracle);
    match out {
        Err(Stop::Failure(f)) if c.mode == Mode::Theorem => {
            // Every guarantee rests on coherence, so a genuine violation exists.
            let verdict = check_coherence(mg, &c.eps, None, &CoherenceConfig::default());
            match verdict.ok().and_then(|v| v.violation().cloned()) {
                Some(v) => Err(v.into()),
                None => Err(Stop::Failure(f)),
            }
        }
        other => other,
    }
}

fn dispatch<S: Scalar>(
    mg: &MassedGraph<S>,
    t: &RootedCaterpillar,
    c: &Constants<S>,
    oracle: &mut dyn FocusOracle<S>,
) -> Step<S, VersatileCertificate<S>> {
    if let Some(v) = find_heavy_local(mg, &c.eps, None) {
        return Err(v.into());
    }
    match t.n() {
        1 => {
            let copy = TCopy { map: vec![0] };
            return Ok(VersatileCertificate { copy, frame: None, support: Support::Bare });
        }
        2 => return Err(failure("dispatch", "a two-vertex tree is never versatile", &[])),
        _ => {}
    }
    let z = match versatile_via_focus(mg, t, c, oracle) {
        Ok((copy, sup)) => return Ok(VersatileCertificate { copy, frame: None, support: Support::Focus(sup) }),
        Err(Stop::FocusBreak(z)) => z,
        Err(other) => return Err(other),
    };
    let (inner, back) = mg
        .normalized_restriction(&z)
        .map_err(|_| failure("dispatch", "focus break on a set of zero mass", &[("Z", &z)]))?;
    match versatile_via_ladder(&inner, t, c) {
        Ok((copy, sup)) => {
            let copy = TCopy { map: copy.map.iter().map(|&v| back[v]).collect() };
            Ok(VersatileCertificate { copy, frame: Some(z), support: Support::Ladder(sup) })
        }
        Err(Stop::Violation(v)) => Err(lift_violation(mg, &inner, &back, &z, &v, &c.eps)),
        Err(other) => Err(other),
    }
}

/// Carries a violation of the restriction back to `G`. A heavy ball
/// `N^ρ[v]` of `G[Z]` becomes the pair `(N^ρ[v], Z ∖ N^{ρ+1}[v])`.
fn lift_violation<S: Scalar>(
    mg: &MassedGraph<S>,
    inner: &MassedGraph<S>,
    back: &[usize],
    z: &VertexSet,
    v: &Violation<S>,
    eps: &S,
) -> Stop<S> {
    let lifted = match v {
        Violation::HeavyBall { v: centre, r, .. } => {
            let near = inner.graph.ball(*centre, *r);
            let reach = inner.graph.ball(*centre, r + 1);
            let outer = |x: &VertexSet| mg.graph.set_of(x.iter().map(|u| back[u]));
            let rest = z.difference(&outer(&reach));
            Violation::pair(mg, outer(&near), rest)
        }
        other => other.lift(back, mg),
    };
    if lifted.holds(mg, eps) {
        lifted.into()
    } else {
        failure("dispatch", &format!("inner {} does not lift", v.kind_name()), &[("Z", z)])
    }
}

/// Paths for the leaf pairing `pi` (tree ids), aligned with the blocks of
/// `pi` carried to host ids through the copy.
pub fn extract_paths<S: Scalar>(
    mg: &MassedGraph<S>,
    cert: &VersatileCertificate<S>,
    pi: &Pairing,
) -> Step<S, FeasibilityWitness> {
    let host = pi.map(|v| cert.copy.map[v]);
    match &cert.support {
        Support::Bare => {
            if host.blocks().is_empty() {
                Ok(FeasibilityWitness::default())
            } else {
                Err(failure("extract", "pairing on a tree without leaves", &[]))
            }
        }
        Support::Focus(sup) => Ok(FeasibilityWitness { paths: join_leaves(mg, sup, host.blocks())? }),
        Support::Ladder(sup) => match &cert.frame {
            None => splice(mg, sup, &host),
            Some(z) => {
                let (inner, back) = mg
                    .normalized_restriction(z)
                    .map_err(|_| failure("extract", "frame has zero mass", &[]))?;
                let mut fwd = vec![usize::MAX; mg.n()];
                for (i, &v) in back.iter().enumerate() {
                    fwd[v] = i;
                }
                if host.support().iter().any(|&v| fwd[v] == usize::MAX) {
                    return Err(failure("extract", "leaf outside the frame", &[]));
                }
                let inner_pi = host.map(|v| fwd[v]);
                let w = splice(&inner, sup, &inner_pi)?;
                // Blocks keep their order under the order-preserving id map.
                let paths = w.paths.into_iter().map(|p| p.into_iter().map(|v| back[v]).collect()).collect();
                Ok(FeasibilityWitness { paths })
            }
        },
    }
}
