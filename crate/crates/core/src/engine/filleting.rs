use serde::{Deserialize, Serialize};

use crate::coherence::{check_coherence, CoherenceConfig, Violation};
use crate::error::{Error, Result};
use crate::mass::MassedGraph;
use crate::pattern::{assemble_filleting, derive_caterpillar, hamiltonize, verify_filleting, FilletingMap, Pattern};
use crate::scalar::Scalar;

use super::{extract_paths, failure, find_versatile_with, FocusOracle, LazyFocus, Mode, StepFailure, Stop, Tuning};

/// An induced subgraph of `G` that is a `P`-filleting of `H`, in host ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filleting {
    /// Sorted vertex set of the induced subgraph.
    pub vertices: Vec<usize>,
    /// Branch images and subdivided paths, in host ids.
    pub map: FilletingMap,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FilletingOutcome<S: Scalar> {
    Filleting(Filleting),
    Violation(Violation<S>),
    Failure(StepFailure),
}

impl<S: Scalar> FilletingOutcome<S> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FilletingOutcome::Filleting(_) => "filleting",
            FilletingOutcome::Violation(_) => "violation",
            FilletingOutcome::Failure(_) => "step_failure",
        }
    }
}

/// Searches `G` for an induced `P`-filleting of `H`.
///
/// `(H, P)` is first made Hamiltonian by detours, a versatile copy of its
/// caterpillar is linked along the target pairing, and the detour images
/// are deleted again. The result is re-checked against `(H, P)` before it
/// is returned. Errors are reserved for bad input.
pub fn find_filleting<S: Scalar>(mg: &MassedGraph<S>, pat: &Pattern, tuning: &Tuning<S>) -> Result<FilletingOutcome<S>> {
    find_filleting_with(mg, pat, tuning, &mut LazyFocus::default())
}

/// As [`find_filleting`], with a chosen focus oracle.
pub fn find_filleting_with<S: Scalar>(
    mg: &MassedGraph<S>,
    pat: &Pattern,
    tuning: &Tuning<S>,
    oracle: &mut dyn FocusOracle<S>,
) -> Result<FilletingOutcome<S>> {
    if mg.n() == 0 {
        return Err(Error::Precondition("the host graph is empty".into()));
    }
    let g = &mg.graph;
    if pat.h.n() == 1 {
        return Ok(FilletingOutcome::Filleting(Filleting {
            vertices: vec![0],
            map: FilletingMap { branch: vec![0], subdivided: vec![] },
        }));
    }
    let hz = hamiltonize(pat);
    let spec = derive_caterpillar(&hz.pattern)?;
    let t = &spec.caterpillar;
    let c = tuning.constants(t.n())?;
    if hz.pattern.h.n() == 2 {
        // Any edge of G is a filleting of K_2.
        if let Some((u, v)) = g.edges().into_iter().next() {
            let (a, b) = (pat.path[0], pat.path[1]);
            let mut branch = vec![0; 2];
            branch[a] = u;
            branch[b] = v;
            return Ok(FilletingOutcome::Filleting(Filleting {
                vertices: vec![u, v],
                map: FilletingMap { branch, subdivided: vec![] },
            }));
        }
        let stop = failure("filleting", "the host graph has no edge", &[]);
        return Ok(settle(mg, &c.eps, c.mode, stop));
    }
    let cert = match find_versatile_with(mg, t, &c, oracle) {
        Ok(cert) => cert,
        Err(stop) => return Ok(settle(mg, &c.eps, c.mode, stop)),
    };
    let w = match extract_paths(mg, &cert, &spec.target) {
        Ok(w) => w,
        Err(stop) => return Ok(settle(mg, &c.eps, c.mode, stop)),
    };
    let (_, members) = assemble_filleting(g, &spec, &cert.copy, &w);
    let mut keep = g.set_of(members);
    for &d in &hz.detours {
        let pos = hz.pattern.path.iter().position(|&v| v == d).expect("detours lie on the path");
        keep.remove(cert.copy.map[spec.spine_of[pos]]);
    }
    let (j, back) = g.induced_subgraph(&keep)?;
    let Some(m) = verify_filleting(&j, pat) else {
        let stop = failure("filleting", "assembled graph is not a filleting", &[("J", &keep)]);
        return Ok(settle(mg, &c.eps, c.mode, stop));
    };
    let map = FilletingMap {
        branch: m.branch.iter().map(|&v| back[v]).collect(),
        subdivided: m.subdivided.into_iter().map(|(e, p)| (e, p.into_iter().map(|v| back[v]).collect())).collect(),
    };
    Ok(FilletingOutcome::Filleting(Filleting { vertices: back, map }))
}

/// Turns a stop into an outcome. In theorem mode a failure means the
/// graph is not coherent, so a direct search for the violation is made.
fn settle<S: Scalar>(mg: &MassedGraph<S>, eps: &S, mode: Mode, stop: Stop<S>) -> FilletingOutcome<S> {
    match stop {
        Stop::Violation(v) => FilletingOutcome::Violation(v),
        Stop::FocusBreak(z) => {
            let f = StepFailure {
                lemma: "filleting".into(),
                step: "focus break escaped the dispatcher".into(),
                state: vec![("Z".into(), z.to_vec())],
            };
            settle_failure(mg, eps, mode, f)
        }
        Stop::Failure(f) => settle_failure(mg, eps, mode, f),
    }
}

fn settle_failure<S: Scalar>(mg: &MassedGraph<S>, eps: &S, mode: Mode, f: StepFailure) -> FilletingOutcome<S> {
    if mode == Mode::Theorem {
        if let Ok(verdict) = check_coherence(mg, eps, None, &CoherenceConfig::default()) {
            if let Some(v) = verdict.violation() {
                return FilletingOutcome::Violation(v.clone());
            }
        }
    }
    FilletingOutcome::Failure(f)
}
