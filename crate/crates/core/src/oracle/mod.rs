//! Ground truth: exhaustive searches for small graphs, and the certificate
//! verifier. Nothing here calls into the engine's constructions.

mod brute;
mod certificate;
mod verify;

pub use brute::{
    clique_and_stable_exact, max_anticomplete_pair_exact, search_filleting_bruteforce, BruteOutcome, CliqueStable,
    FoundFilleting,
};
pub use certificate::{Certificate, PairingWitness, Payload, PatternRecord, Subdivision, TreeRecord, ViolationRecord};
pub use verify::{verify_certificate, Check};
