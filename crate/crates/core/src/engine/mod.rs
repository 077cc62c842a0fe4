//! The constructive search: each step either produces its promised structure
//! or stops with a concrete reason.

mod columns;
mod components;
mod constants;
mod dispatch;
mod filleting;
mod focus;
mod ladder_route;
mod link;
mod realization;

pub use columns::{build_columns, build_ladder, Columns, Ladder};
pub use components::find_connected_heavy;
pub use constants::{schedule, Constants, Overrides, Tuning, MAX_THEOREM_T};
pub use dispatch::{extract_paths, find_versatile, find_versatile_with, VersatileCertificate, Support};
pub use filleting::{find_filleting, find_filleting_with, Filleting, FilletingOutcome};
pub use focus::{versatile_via_focus, AlwaysBreak, FocusOracle, FocusSupport, LazyFocus};
pub use ladder_route::{versatile_via_ladder, LadderSupport};
pub use link::link_pairing;
pub use realization::{find_realization, Realization};

use serde::{Deserialize, Serialize};

use crate::coherence::Violation;
use crate::mass::MassedGraph;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

/// How thresholds are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Constants from the closed-form bounds; every run ends in a
    /// certificate or a violation.
    Theorem,
    /// User-supplied thresholds; a step whose mass guarantee does not hold
    /// ends the run with a [`StepFailure`].
    Exploratory,
}

/// A step whose guarantee did not hold and for which no violation could be
/// extracted. Only produced in exploratory mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFailure {
    pub lemma: String,
    pub step: String,
    /// Named vertex sets describing the partial structure at the failure.
    pub state: Vec<(String, Vec<usize>)>,
}

/// Why a step stopped early.
#[derive(Clone, Debug, PartialEq)]
pub enum Stop<S: Scalar> {
    Violation(Violation<S>),
    Failure(StepFailure),
    /// A set of mass at least the focus threshold with no heavy centred ball.
    FocusBreak(VertexSet),
}

pub type Step<S, T> = std::result::Result<T, Stop<S>>;

impl<S: Scalar> From<Violation<S>> for Stop<S> {
    fn from(v: Violation<S>) -> Self {
        Stop::Violation(v)
    }
}

/// Builds a failure record.
pub(crate) fn failure<S: Scalar>(lemma: &str, step: &str, state: &[(&str, &VertexSet)]) -> Stop<S> {
    Stop::Failure(StepFailure {
        lemma: lemma.into(),
        step: step.into(),
        state: state.iter().map(|(k, v)| (k.to_string(), v.to_vec())).collect(),
    })
}

/// Lowest-id vertex of `v`'s neighbourhood whose own neighbourhood or
/// vertex mass reaches `eps`, among `candidates`; the usual way a mass
/// bound that relied on light neighbourhoods is turned into a violation.
pub(crate) fn heavy_local_among<S: Scalar>(
    mg: &MassedGraph<S>,
    eps: &S,
    candidates: impl IntoIterator<Item = usize>,
) -> Option<Violation<S>> {
    for x in candidates {
        if mg.mu_vertex(x) >= *eps {
            return Some(Violation::heavy_vertex(mg, x));
        }
        if mg.mu_neighbourhood(x) >= *eps {
            return Some(Violation::heavy_neighbourhood(mg, x));
        }
    }
    None
}

/// Vertices touching `x`: members of `x` and their neighbours.
pub(crate) fn touch<S: Scalar>(mg: &MassedGraph<S>, x: &VertexSet) -> VertexSet {
    mg.graph.closed_neighbourhood(x)
}
