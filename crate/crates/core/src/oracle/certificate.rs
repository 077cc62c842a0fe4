use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coherence::Violation;
use crate::engine::{Columns, Filleting, Ladder, Realization};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{FeasibilityWitness, Pairing, Pattern, RootedCaterpillar, TCopy};
use crate::scalar::Scalar;
use crate::Rational;

/// A self-contained claim about a host graph: a structure plus the
/// thresholds it is claimed to satisfy, all vertex ids in host ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(flatten)]
    pub payload: Payload,
    /// Thresholds (`eps`, `delta`, `kappa`, ...) as exact rationals, plus
    /// anything else worth echoing.
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Filleting {
        pattern: PatternRecord,
        vertices: Vec<usize>,
        branch: Vec<usize>,
        subdivided: Vec<Subdivision>,
    },
    Violation {
        violation: ViolationRecord,
    },
    Realization {
        tree: TreeRecord,
        family: Vec<Vec<usize>>,
        sets: Vec<Vec<usize>>,
        spread: Vec<usize>,
    },
    Columns {
        a: Vec<Vec<usize>>,
        b: Vec<Vec<usize>>,
        c: Vec<usize>,
    },
    Ladder {
        a: Vec<Vec<usize>>,
        b: Vec<Vec<usize>>,
        c: Vec<Vec<usize>>,
        half_cleaned: bool,
    },
    /// A copy of the tree with a witness for every leaf pairing.
    Versatile {
        tree: TreeRecord,
        copy: Vec<usize>,
        witnesses: Vec<PairingWitness>,
    },
    Witness {
        tree: TreeRecord,
        copy: Vec<usize>,
        #[serde(flatten)]
        witness: PairingWitness,
    },
}

impl Payload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Payload::Filleting { .. } => "filleting",
            Payload::Violation { .. } => "violation",
            Payload::Realization { .. } => "realization",
            Payload::Columns { .. } => "columns",
            Payload::Ladder { .. } => "ladder",
            Payload::Versatile { .. } => "versatile",
            Payload::Witness { .. } => "witness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub path: Vec<usize>,
}

impl PatternRecord {
    pub fn of(p: &Pattern) -> Self {
        PatternRecord { n: p.h.n(), edges: p.h.edges(), path: p.path.clone() }
    }

    pub fn pattern(&self) -> Result<Pattern> {
        Pattern::new(Graph::from_edges(self.n, &self.edges)?, self.path.clone())
    }
}

/// Interior of the subdivided path replacing the edge `edge` of `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdivision {
    pub edge: (usize, usize),
    pub inner: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub spine: Vec<usize>,
    pub head: usize,
}

impl TreeRecord {
    pub fn of(t: &RootedCaterpillar) -> Self {
        TreeRecord { n: t.n(), edges: t.tree.edges(), spine: t.spine.clone(), head: t.head }
    }

    pub fn caterpillar(&self) -> Result<RootedCaterpillar> {
        RootedCaterpillar::new(Graph::from_edges(self.n, &self.edges)?, self.spine.clone(), self.head)
    }
}

/// A leaf pairing (host ids) and one path per block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingWitness {
    pub pairing: Vec<Vec<usize>>,
    pub paths: Vec<Vec<usize>>,
}

impl PairingWitness {
    pub fn of(pi: &Pairing, w: &FeasibilityWitness) -> Self {
        PairingWitness { pairing: pi.blocks().to_vec(), paths: w.paths.clone() }
    }
}

/// A violation with masses written as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ViolationRecord {
    HeavyVertex { v: usize, mass: String },
    HeavyNeighbourhood { v: usize, mass: String },
    HeavyBall { v: usize, r: usize, mass: String },
    AnticompletePair { a: Vec<usize>, b: Vec<usize>, mass_a: String, mass_b: String },
}

impl ViolationRecord {
    pub fn of<S: Scalar>(v: &Violation<S>) -> Self {
        match v {
            Violation::HeavyVertex { v, mass } => ViolationRecord::HeavyVertex { v: *v, mass: mass.to_string() },
            Violation::HeavyNeighbourhood { v, mass } => {
                ViolationRecord::HeavyNeighbourhood { v: *v, mass: mass.to_string() }
            }
            Violation::HeavyBall { v, r, mass } => ViolationRecord::HeavyBall { v: *v, r: *r, mass: mass.to_string() },
            Violation::AnticompletePair { a, b, mass_a, mass_b } => ViolationRecord::AnticompletePair {
                a: a.to_vec(),
                b: b.to_vec(),
                mass_a: mass_a.to_string(),
                mass_b: mass_b.to_string(),
            },
        }
    }
}

impl Certificate {
    pub fn new(payload: Payload) -> Self {
        Certificate { payload, params: BTreeMap::new() }
    }

    /// Adds a parameter to the echo.
    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn filleting(pat: &Pattern, f: &Filleting) -> Self {
        Certificate::new(Payload::Filleting {
            pattern: PatternRecord::of(pat),
            vertices: f.vertices.clone(),
            branch: f.map.branch.clone(),
            subdivided: f.map.subdivided.iter().map(|(e, p)| Subdivision { edge: *e, inner: p.clone() }).collect(),
        })
    }

    pub fn violation<S: Scalar>(v: &Violation<S>, eps: &S) -> Self {
        Certificate::new(Payload::Violation { violation: ViolationRecord::of(v) }).with("eps", eps)
    }

    pub fn realization(t: &RootedCaterpillar, family: &[crate::VertexSet], r: &Realization, delta: &Rational) -> Self {
        Certificate::new(Payload::Realization {
            tree: TreeRecord::of(t),
            family: family.iter().map(|y| y.to_vec()).collect(),
            sets: r.sets.iter().map(|x| x.to_vec()).collect(),
            spread: r.spread.clone(),
        })
        .with("delta", delta)
    }

    pub fn columns(c: &Columns) -> Self {
        Certificate::new(Payload::Columns {
            a: c.a.iter().map(|x| x.to_vec()).collect(),
            b: c.b.iter().map(|x| x.to_vec()).collect(),
            c: c.c.to_vec(),
        })
    }

    pub fn ladder(l: &Ladder) -> Self {
        Certificate::new(Payload::Ladder {
            a: l.a.iter().map(|x| x.to_vec()).collect(),
            b: l.b.iter().map(|x| x.to_vec()).collect(),
            c: l.c.iter().map(|x| x.to_vec()).collect(),
            half_cleaned: l.half_cleaned,
        })
    }

    pub fn witness(t: &RootedCaterpillar, copy: &TCopy, pi: &Pairing, w: &FeasibilityWitness) -> Self {
        Certificate::new(Payload::Witness {
            tree: TreeRecord::of(t),
            copy: copy.map.clone(),
            witness: PairingWitness::of(pi, w),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("certificate: {e}")))
    }

    /// A parameter parsed as an exact rational.
    pub fn param(&self, key: &str) -> Option<Rational> {
        self.params.get(key).and_then(|s| Rational::parse_text(s))
    }
}
