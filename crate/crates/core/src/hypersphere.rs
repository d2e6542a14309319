//! The hypersphere (ball) model: states `(1; x)` with `|x| <= ε`, effects
//! `½ (1; x')` with `|x'| <= ε'` plus the unit effect.
//!
//! The model is a valid single-system GPT iff `ε ε' <= 1`; at equality the
//! antipodal pairing is exactly zero, which positivity admits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GptError, Result};
use crate::gpt::{pair, Effect, State, Transformation};
use crate::linalg::{best_rational_pair, Matrix};
use crate::scalar::{norm_sq, Scalar};

/// `Σ_{p,r} = { p (1; x) : |x| <= r }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallFamily {
    pub d: usize,
    pub p: Scalar,
    pub r: Scalar,
}

impl BallFamily {
    pub fn new(d: usize, p: Scalar, r: Scalar) -> Result<Self> {
        if !p.is_positive() || !r.is_positive() {
            return Err(GptError::InvalidParameter(format!(
                "ball family needs p > 0 and r > 0 (got p={p}, r={r})"
            )));
        }
        Ok(BallFamily { d, p, r })
    }

    /// Exact membership of the Bloch part `x` (the scale is implied).
    pub fn contains_bloch(&self, x: &[Scalar]) -> bool {
        x.len() == self.d && norm_sq(x) <= self.r.square()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypersphereGpt {
    pub d: usize,
    pub epsilon: Scalar,
    pub epsilon_prime: Scalar,
}

impl HypersphereGpt {
    pub fn new(d: usize, epsilon: Scalar, epsilon_prime: Scalar) -> Result<Self> {
        if d == 0 {
            return Err(GptError::InvalidParameter("dimension must be positive".into()));
        }
        if !epsilon.is_positive() || !epsilon_prime.is_positive() {
            return Err(GptError::InvalidParameter(format!(
                "radii must be positive (got ε={epsilon}, ε'={epsilon_prime})"
            )));
        }
        Ok(HypersphereGpt {
            d,
            epsilon,
            epsilon_prime,
        })
    }

    /// `ε ε' <= 1`.
    pub fn is_valid(&self) -> bool {
        &self.epsilon * &self.epsilon_prime <= Scalar::one()
    }

    pub fn state_family(&self) -> BallFamily {
        BallFamily {
            d: self.d,
            p: Scalar::one(),
            r: self.epsilon.clone(),
        }
    }

    pub fn effect_family(&self) -> BallFamily {
        BallFamily {
            d: self.d,
            p: Scalar::half(),
            r: self.epsilon_prime.clone(),
        }
    }

    pub fn contains_state(&self, w: &State) -> bool {
        self.state_family().contains_bloch(w.bloch())
    }

    pub fn contains_effect(&self, e: &Effect) -> bool {
        e.is_unit() || (*e.scale() == Scalar::half() && self.effect_family().contains_bloch(e.bloch()))
    }
}

/// Result of [`min_pairing_value`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinPairing {
    /// Certified lower bound `(1 - ε ε' σ) / 2` with `σ >= |R|`.
    pub lower_bound: Scalar,
    pub spectral_upper: Scalar,
    pub state: State,
    pub effect: Effect,
    /// Exact pairing of `effect` with `R` applied to `state`.
    pub witness_value: Scalar,
    /// Whether `witness_value <= lower_bound + gap`.
    pub within_gap: bool,
}

/// Bracket the minimum of `e^T T ω` over ball states and ball effects, for
/// `T` the zero-shift transformation with block `R`.
pub fn min_pairing_value(gpt: &HypersphereGpt, r: &Matrix, gap: &Scalar) -> Result<MinPairing> {
    let d = r.ensure_square()?;
    check_dim(gpt.d, d)?;
    let ee = &gpt.epsilon * &gpt.epsilon_prime;
    let sigma_up = r.spectral_sq_upper().sqrt_upper();
    let lower_bound = Scalar::half() * (Scalar::one() - &ee * &sigma_up);

    // witness ≤ bound + gap  ⟺  n'^T R n ≥ σ_up − 2 gap / (ε ε')
    let needed = &sigma_up - &(Scalar::int(2) * gap / &ee);
    let just_below = &needed - &Scalar::pow2_recip(200);
    let rp = best_rational_pair(r, Some(&just_below));

    let state = State::new(rp.n.scaled(&gpt.epsilon));
    let effect = Effect::new(Scalar::half(), rp.n_prime.scaled(&-&gpt.epsilon_prime))?;
    let t = Transformation::linear(r.clone());
    let witness_value = effect.pair_vector(&t.apply(&state)?)?;
    debug_assert!(gpt.contains_state(&state) && gpt.contains_effect(&effect));
    debug_assert!(witness_value >= lower_bound);
    let within_gap = witness_value <= &lower_bound + gap;
    Ok(MinPairing {
        lower_bound,
        spectral_upper: sigma_up,
        state,
        effect,
        witness_value,
        within_gap,
    })
}

/// Largest convenient `ε = ε'` with `ε ε' Λ <= 1`, exactly verified.
pub fn embed_certificate(d: usize, lambda: &Scalar) -> Result<HypersphereGpt> {
    if !lambda.is_positive() {
        return Err(GptError::InvalidParameter(format!("Λ = {lambda} must be positive")));
    }
    let mut eps = lambda.recip().sqrt_lower();
    while eps.square() * lambda > Scalar::one() {
        eps = eps * Scalar::half();
    }
    HypersphereGpt::new(d, eps.clone(), eps)
}

/// As [`embed_certificate`] but from `Λ²`, so that `Λ = √d`-type bounds
/// stay rational: guarantees `(ε ε')² Λ² <= 1`.
pub fn embed_certificate_sq(d: usize, lambda_sq: &Scalar) -> Result<HypersphereGpt> {
    if !lambda_sq.is_positive() {
        return Err(GptError::InvalidParameter(format!("Λ² = {lambda_sq} must be positive")));
    }
    let mut eps = lambda_sq.recip().sqrt_lower().sqrt_lower();
    while eps.square().square() * lambda_sq > Scalar::one() {
        eps = eps * Scalar::half();
    }
    HypersphereGpt::new(d, eps.clone(), eps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Samples {
    pub states: Vec<State>,
    pub effects: Vec<Effect>,
}

/// Deterministic rational points of both families: the signed axis points
/// at full radius first, then seeded random points inside the ball.
pub fn sample_extreme(gpt: &HypersphereGpt, count: usize, seed: u64) -> Result<Samples> {
    if count == 0 {
        return Err(GptError::InvalidParameter("sample count must be at least 1".into()));
    }
    let states = ball_points(gpt.d, &gpt.epsilon, count, seed, 0)
        .into_iter()
        .map(State::new)
        .collect();
    let effects = ball_points(gpt.d, &gpt.epsilon_prime, count, seed, 1)
        .into_iter()
        .map(|x| Effect::new(Scalar::half(), x))
        .collect::<Result<_>>()?;
    Ok(Samples { states, effects })
}

pub(crate) fn ball_points(d: usize, radius: &Scalar, count: usize, seed: u64, stream: u64) -> Vec<Vec<Scalar>> {
    let mut out = Vec::with_capacity(count);
    'axes: for i in 0..d {
        for sign in [1, -1] {
            if out.len() == count {
                break 'axes;
            }
            let mut x = vec![Scalar::zero(); d];
            x[i] = radius * &Scalar::int(sign);
            out.push(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    while out.len() < count {
        let y: Vec<Scalar> = (0..d).map(|_| Scalar::int(rng.gen_range(-8..=8))).collect();
        let n2 = norm_sq(&y);
        if n2.is_zero() {
            continue;
        }
        let factor = radius / &n2.sqrt_upper();
        out.push(y.iter().map(|c| c * &factor).collect());
    }
    out
}

/// Exact check that every listed state/effect pair has a non-negative value.
pub fn all_pairings_nonnegative(states: &[State], effects: &[Effect]) -> Result<bool> {
    for w in states {
        for e in effects {
            if pair(e, w)?.is_negative() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
