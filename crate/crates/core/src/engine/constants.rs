use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Mode;

/// Every threshold the engine uses.
///
/// The ladder route works in a normalized restriction and so is measured
/// against `eps_r`; the focus route and the outer coherence use `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constants<S: Scalar> {
    pub mode: Mode,
    /// `|T|`.
    pub t: usize,
    /// Number of ladder columns and of focus sets.
    pub k: usize,
    /// Ball radius of the ladder route.
    pub r: usize,
    /// Radius of the focus queries.
    pub focus_radius: usize,
    pub eps: S,
    pub eps_r: S,
    /// Mass at which the focus oracle must find a heavy centred ball.
    pub delta: S,
    /// Column mass of the ladder.
    pub kappa: S,
    /// Realization threshold inside the ladder.
    pub realization_delta: S,
    /// Mass of each focus set.
    pub lambda: S,
    /// Realization threshold of the focus route.
    pub kappa0: S,
    /// Ratio between consecutive dominance levels of the focus route.
    pub decay: S,
}

/// User thresholds for exploratory runs; anything left out is derived
/// from `eps`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides<S: Scalar> {
    pub delta: Option<S>,
    pub eps_r: Option<S>,
    pub radius: Option<usize>,
    pub focus_radius: Option<usize>,
    pub columns: Option<usize>,
    pub kappa: Option<S>,
    pub realization_delta: Option<S>,
    pub focus_kappa: Option<S>,
}

/// How a search picks its constants once `|T|` is known.
#[derive(Clone, Debug, PartialEq)]
pub enum Tuning<S: Scalar> {
    Theorem,
    Exploratory { eps: S, overrides: Overrides<S> },
}

impl<S: Scalar> Tuning<S> {
    pub fn constants(&self, t: usize) -> Result<Constants<S>> {
        match self {
            Tuning::Theorem => Constants::theorem(t),
            Tuning::Exploratory { eps, overrides } => Constants::exploratory(t, eps.clone(), overrides),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Tuning::Theorem => Mode::Theorem,
            Tuning::Exploratory { .. } => Mode::Exploratory,
        }
    }
}

/// Largest `|T|` for which the closed-form constants are built.
pub const MAX_THEOREM_T: usize = 16;

impl<S: Scalar> Constants<S> {
    /// The closed-form constants for a caterpillar with `t` vertices:
    /// `k = 2^t`, `r = 5k`, focus radius `r + 1`,
    /// `ε_r = min(1/((k−1)k(2^k(3k+2)+4)), t^{-t}/(3(r+1)+5))`,
    /// `ε = 2^{-(t+k)} t^{-t} ε_r` and `δ = ε/ε_r`.
    pub fn theorem(t: usize) -> Result<Self> {
        if t == 0 || t > MAX_THEOREM_T {
            return Err(Error::Precondition(format!("theorem constants need 1 ≤ |T| ≤ {MAX_THEOREM_T}")));
        }
        let k = 1usize << t;
        let r = 5 * k;
        let rho = r + 1;
        let one = S::one();
        let ku = S::from_usize(k);
        let tt = S::from_usize(t).powi(t as u32);
        let two_k = S::pow2(k as i32);
        let ladder_bound = one.clone()
            / (S::from_usize(k - 1) * ku.clone() * (two_k.clone() * S::from_usize(3 * k + 2) + S::from_usize(4)));
        let focus_bound = one.clone() / (tt.clone() * S::from_usize(3 * rho + 5));
        let eps_r = S::min_of(&ladder_bound, &focus_bound);
        let eps = S::pow2(-((t + k) as i32)) / tt.clone() * eps_r.clone();
        let delta = eps.clone() / eps_r.clone();
        let kappa = two_k.clone() * S::from_usize(3 * k + 2) * eps_r.clone();
        let realization_delta = S::from_usize(3 * k + 1) * eps_r.clone();
        let lambda = one / ku - eps.clone();
        let kappa0 = lambda.clone() / two_k - eps.clone();
        Ok(Constants {
            mode: Mode::Theorem,
            t,
            k,
            r,
            focus_radius: rho,
            eps,
            eps_r,
            delta,
            kappa,
            realization_delta,
            lambda,
            kappa0,
            decay: S::from_usize(t),
        })
    }

    /// Exploratory constants around a user `eps`.
    pub fn exploratory(t: usize, eps: S, o: &Overrides<S>) -> Result<Self> {
        if eps <= S::zero() {
            return Err(Error::NonPositiveEpsilon);
        }
        let k = o.columns.unwrap_or(1 << t.min(6)).max(1);
        let r = o.radius.unwrap_or(5 * k);
        let delta = o.delta.clone().unwrap_or_else(|| S::from_usize(2) * eps.clone());
        let eps_r = o.eps_r.clone().unwrap_or_else(|| eps.clone() / delta.clone());
        let kappa = o.kappa.clone().unwrap_or_else(|| S::from_usize(3 * k + 2) * eps_r.clone());
        let realization_delta =
            o.realization_delta.clone().unwrap_or_else(|| S::from_usize(3 * k + 1) * eps_r.clone());
        let lambda = S::one() / S::from_usize(k) - eps.clone();
        let kappa0 = o.focus_kappa.clone().unwrap_or_else(|| lambda.clone() / S::from_usize(4));
        Ok(Constants {
            mode: Mode::Exploratory,
            t,
            k,
            r,
            focus_radius: o.focus_radius.unwrap_or(r + 1),
            eps,
            eps_r,
            delta,
            kappa,
            realization_delta,
            lambda,
            kappa0,
            decay: S::from_usize(t.max(2)),
        })
    }

    /// `κ_i = κ_0 / decay^i` of the focus route.
    pub fn focus_kappa(&self, i: usize) -> S {
        self.kappa0.clone() / self.decay.powi(i as u32)
    }

    /// Dominance levels of the leaf linking, `(r'+2) t^{t−i+1} ε`, with
    /// `r'` the centre radius of the stored leaf sets.
    pub fn join_kappa(&self, i: usize, centre_radius: usize) -> S {
        let e = (self.t + 1).saturating_sub(i) as u32;
        S::from_usize(centre_radius + 2) * S::from_usize(self.t).powi(e) * self.eps.clone()
    }

    /// Centre radius of the leaf sets handed to the linking step.
    pub fn leaf_radius(&self) -> usize {
        3 * self.focus_radius + 2
    }
}

/// The realization schedule `m_i = 2^i(δ+ε) − ε`.
pub fn schedule<S: Scalar>(delta: &S, eps: &S, i: usize) -> S {
    S::pow2(i as i32) * (delta.clone() + eps.clone()) - eps.clone()
}
