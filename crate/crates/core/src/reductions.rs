//! Compilation of matrix and automaton instances into explicit generating
//! sets, and the correspondence between search witnesses and negative
//! outcome probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GptError, Result};
use crate::gpt::{compose, pair, validate_measurement, Effect, Measurement, State, Transformation};
use crate::hypersphere::{sample_extreme, BallFamily, HypersphereGpt};
use crate::linalg::{rank_of_rows, Matrix, RayleighPair};
use crate::scalar::{norm_sq, Scalar};
use crate::teleport::{EntangledEffect, EntangledState};
use crate::verdict::{BoundCheck, Certificate, ConsistencyVerdict, Sign};
use crate::wordsearch::{
    boundedness_certificate, growth_witness_search, product, unboundedness_witness_search, EnumerateOptions, Enumerator,
    MatrixSet, PfaInstance, Word,
};

/// The flip `(1,0;0,-I)` followed by one zero-shift transformation per matrix.
pub fn transformation_generators(ms: &MatrixSet) -> Vec<Transformation> {
    let d = ms.dim();
    let mut out = vec![Transformation::linear(Matrix::identity(d).scaled(&-Scalar::one()))];
    out.extend(ms.matrices().iter().cloned().map(Transformation::linear));
    out
}

/// `T_w = T_{i_L} ··· T_{i_1}` over a list of transformations, 1-based.
pub fn transformation_product(ts: &[Transformation], w: &Word, dim: usize) -> Result<Transformation> {
    w.validate(ts.len())?;
    let mut acc = Transformation::identity(dim);
    for &label in w.labels() {
        acc = compose(&ts[label - 1], &acc)?;
    }
    Ok(acc)
}

/// A concrete negative outcome: `e^T T_w ω < 0` with `ω`, `e` in the balls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallWitness {
    /// Word over the matrix labels; transformation `i + 1` in
    /// [`transformation_generators`] realizes matrix `i`.
    pub word: Word,
    pub state: State,
    pub effect: Effect,
    pub rayleigh: Scalar,
    pub value: Scalar,
}

/// Builds `ω = (1; -ε n)` and `e = p (1; ε' n')`, whose value is
/// `p (1 - ε ε' n'^T M_w n)`, and evaluates it by applying the composed
/// transformations.
pub fn ball_witness(ms: &MatrixSet, gpt: &HypersphereGpt, p: &Scalar, word: &Word, pair_: &RayleighPair) -> Result<BallWitness> {
    check_dim(ms.dim(), gpt.d)?;
    let state = State::new(pair_.n.scaled(&-&gpt.epsilon));
    let effect = Effect::new(p.clone(), pair_.n_prime.scaled(&gpt.epsilon_prime))?;
    let ts = transformation_generators(ms);
    let shifted = Word::new(word.labels().iter().map(|l| l + 1).collect());
    let tw = transformation_product(&ts, &shifted, ms.dim())?;
    let value = effect.pair_vector(&tw.apply(&state)?)?;
    let rayleigh = product(ms, word)?.bilinear(pair_.n_prime.coords(), pair_.n.coords())?;
    Ok(BallWitness {
        word: word.clone(),
        state,
        effect,
        rayleigh,
        value,
    })
}

/// Outcome of the semi-decision procedure for a transformation set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationCheck {
    #[serde(flatten)]
    pub verdict: ConsistencyVerdict,
    /// A negative pairing against the ball model of the given radii.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_witness: Option<BallWitness>,
}

/// Consistency of `transformation_generators(ms)` completed by some states and
/// effects.
///
/// `Consistent` comes from a norm certificate together with a ball model
/// satisfying `(ε ε')² Λ² <= 1`. `Inconsistent` needs a product with spectral
/// radius above one (a growth witness), which makes the products unbounded.
/// Independently, when `probe` is given, a word with `n'^T M_w n > 1/(ε ε')`
/// is searched and turned into an explicit negative pairing for that model.
pub fn check_transformations(ms: &MatrixSet, opts: EnumerateOptions, t_max: usize, probe: Option<&HypersphereGpt>) -> Result<TransformationCheck> {
    let mut verdict = boundedness_certificate(ms, t_max, opts.max_nodes)?;
    if let ConsistencyVerdict::Consistent { certificate } = &mut verdict {
        attach_embedding_checks(certificate);
    } else {
        verdict = growth_witness_search(ms, opts, 4 * ms.dim().max(1) as u32)?;
    }
    let ball_witness = match probe {
        Some(gpt) if !verdict.is_consistent() => probe_ball(ms, gpt, opts)?,
        _ => None,
    };
    Ok(TransformationCheck { verdict, ball_witness })
}

fn attach_embedding_checks(c: &mut Certificate) {
    if let Some(e) = &c.embedding {
        let ee = &e.epsilon * &e.epsilon_prime;
        c.checks.push(BoundCheck::new("(eps*eps')^2 * Lambda^2", ee.square() * &c.lambda_sq));
    }
}

fn probe_ball(ms: &MatrixSet, gpt: &HypersphereGpt, opts: EnumerateOptions) -> Result<Option<BallWitness>> {
    let threshold = (&gpt.epsilon * &gpt.epsilon_prime).recip();
    match unboundedness_witness_search(ms, &threshold, opts)? {
        ConsistencyVerdict::Inconsistent {
            witness: crate::verdict::Witness::Unbounded { word, pair, .. },
        } => Ok(Some(ball_witness(ms, gpt, &Scalar::half(), &word, &pair)?)),
        _ => Ok(None),
    }
}

/// Exact structural checks for a single-system generating set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GptValidation {
    pub states_full_dimensional: bool,
    pub effects_full_dimensional: bool,
    pub unit_present: bool,
    pub pairings_nonnegative: bool,
    /// Every effect other than `u` has its complement `u - e` in the list.
    pub complements_present: bool,
}

impl GptValidation {
    pub fn is_valid(&self) -> bool {
        self.states_full_dimensional
            && self.effects_full_dimensional
            && self.unit_present
            && self.pairings_nonnegative
            && self.complements_present
    }
}

pub fn validate_single(dim: usize, states: &[State], effects: &[Effect]) -> Result<GptValidation> {
    for w in states {
        check_dim(dim, w.dim())?;
    }
    for e in effects {
        check_dim(dim, e.dim())?;
    }
    let state_rows = states.iter().map(|w| w.to_vector().coords().to_vec()).collect();
    let effect_rows = effects.iter().map(|e| e.to_vector().coords().to_vec()).collect();
    let mut pairings_nonnegative = true;
    'outer: for w in states {
        for e in effects {
            if pair(e, w)?.is_negative() {
                pairings_nonnegative = false;
                break 'outer;
            }
        }
    }
    let unit = Effect::unit(dim);
    let complements_present = effects.iter().all(|e| {
        e.is_unit()
            || effects
                .iter()
                .any(|c| validate_measurement(&Measurement::new(vec![e.clone(), c.clone()]).expect("same dimension")))
    });
    Ok(GptValidation {
        states_full_dimensional: rank_of_rows(state_rows) == dim + 1,
        effects_full_dimensional: rank_of_rows(effect_rows) == dim + 1,
        unit_present: effects.contains(&unit),
        pairings_nonnegative,
        complements_present,
    })
}

/// States, effects and transformations of one system type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleSystemGeneratingSet {
    pub dim: usize,
    pub states: Vec<State>,
    pub effects: Vec<Effect>,
    pub transformations: Vec<Transformation>,
    /// The continuous families the sampled points stand for.
    pub ball_families: Vec<BallFamily>,
}

impl SingleSystemGeneratingSet {
    pub fn validate(&self) -> Result<GptValidation> {
        validate_single(self.dim, &self.states, &self.effects)
    }
}

/// Ball points of both families; every sampled effect is followed by its
/// complement unless that is already listed, and `u` comes last.
fn ball_lists(gpt: &HypersphereGpt, samples: usize, seed: u64) -> Result<(Vec<State>, Vec<Effect>)> {
    let s = sample_extreme(gpt, samples, seed)?;
    let mut effects: Vec<Effect> = Vec::new();
    for e in s.effects {
        let m = e.mirrored();
        if !effects.contains(&e) {
            effects.push(e);
        }
        if !effects.contains(&m) {
            effects.push(m);
        }
    }
    effects.push(Effect::unit(gpt.d));
    Ok((s.states, effects))
}

/// The two effects `½ (1; ±F/λ)`, plus sign first.
pub fn cut_point_effects(pfa: &PfaInstance) -> Result<[Effect; 2]> {
    let f: Vec<Scalar> = pfa.f_vector().iter().map(|x| x / pfa.lambda()).collect();
    let neg: Vec<Scalar> = f.iter().map(|x| -x).collect();
    Ok([Effect::new(Scalar::half(), f)?, Effect::new(Scalar::half(), neg)?])
}

fn check_radii(epsilon: &Scalar, epsilon_prime: &Scalar) -> Result<()> {
    if !epsilon.is_positive() || !epsilon_prime.is_positive() {
        return Err(GptError::InvalidParameter("ball radii must be positive".into()));
    }
    if epsilon * epsilon_prime > Scalar::one() {
        return Err(GptError::InvalidParameter(format!(
            "eps * eps' = {} exceeds 1",
            epsilon * epsilon_prime
        )));
    }
    Ok(())
}

/// The ball model plus the state `(1; q)` and the effects `½ (1; ±F/λ)`,
/// with one zero-shift transformation per automaton matrix (no flip).
pub fn pfa_generating_set(pfa: &PfaInstance, epsilon: &Scalar, epsilon_prime: &Scalar, samples: usize, seed: u64) -> Result<SingleSystemGeneratingSet> {
    check_radii(epsilon, epsilon_prime)?;
    let d = pfa.dim();
    let gpt = HypersphereGpt::new(d, epsilon.clone(), epsilon_prime.clone())?;
    let (balls, ball_effects) = ball_lists(&gpt, samples, seed)?;
    let mut states = vec![State::new(pfa.q().to_vec())];
    states.extend(balls);
    let mut effects = cut_point_effects(pfa)?.to_vec();
    effects.extend(ball_effects);
    Ok(SingleSystemGeneratingSet {
        dim: d,
        states,
        effects,
        transformations: pfa.matrices().matrices().iter().cloned().map(Transformation::linear).collect(),
        ball_families: vec![gpt.state_family(), gpt.effect_family()],
    })
}

/// Radii for which the three ε-dependent outcome forms stay nonnegative on
/// every word, with the inequalities checked in squared form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafeEpsilons {
    pub epsilon: Scalar,
    pub epsilon_prime: Scalar,
    pub checks: Vec<BoundCheck>,
}

/// `ε = λ/d` and `ε' = ⌊1/√d⌋` (rational lower bound). Uses
/// `|M_w q| <= √d`, `|M_w^T F| <= √d` and `|M_w| <= √d` for
/// column-stochastic products.
pub fn safe_epsilons(pfa: &PfaInstance) -> Result<SafeEpsilons> {
    pfa.require_stochastic()?;
    let d = Scalar::int(pfa.dim() as i64);
    let epsilon = pfa.lambda() / &d;
    let epsilon_prime = d.recip().sqrt_lower();
    let checks = vec![
        BoundCheck::new("eps'^2 * d", epsilon_prime.square() * &d),
        BoundCheck::new("(eps/lambda)^2 * d^2", (&epsilon / pfa.lambda()).square() * d.square()),
        BoundCheck::new("(eps*eps')^2 * d", (&epsilon * &epsilon_prime).square() * &d),
    ];
    debug_assert!(checks.iter().all(|c| c.holds));
    Ok(SafeEpsilons {
        epsilon,
        epsilon_prime,
        checks,
    })
}

/// `½ (1 ± F^T M_w q / λ)`: the value of `½ (1; ±F/λ)` on `T_w (1; q)`.
pub fn ppp3_value(pfa: &PfaInstance, w: &Word, sign: Sign) -> Result<Scalar> {
    let acc = crate::wordsearch::acceptance(pfa, w)?;
    Ok(Scalar::half() * (Scalar::one() + sign.value() * acc / pfa.lambda()))
}

/// Which outcome form failed first, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub words_checked: usize,
    /// `½ (1 + ε ε' x'^T M_w x)` over the balls.
    pub ppp0: bool,
    /// `½ (1 + ε' x'^T M_w q)`.
    pub ppp1: bool,
    /// `½ (1 ± (ε/λ) F^T M_w x)`.
    pub ppp2: bool,
    pub first_failure: Option<Word>,
    pub complete: bool,
}

/// Checks the three ε-dependent forms at their exact minima over the balls
/// (spectral upper bound for the first) for every enumerated word.
pub fn ppp_positivity(pfa: &PfaInstance, epsilon: &Scalar, epsilon_prime: &Scalar, opts: EnumerateOptions) -> Result<PositivityReport> {
    let f = pfa.f_vector();
    let ee_sq = (epsilon * epsilon_prime).square();
    let ep_sq = epsilon_prime.square();
    let el_sq = (epsilon / pfa.lambda()).square();
    let mut report = PositivityReport {
        words_checked: 0,
        ppp0: true,
        ppp1: true,
        ppp2: true,
        first_failure: None,
        complete: false,
    };
    let mut en = Enumerator::new(pfa.matrices(), opts)?;
    for level in en.by_ref() {
        for node in level {
            report.words_checked += 1;
            let m = &node.matrix;
            let ok0 = &ee_sq * &m.spectral_sq_upper() <= Scalar::one();
            let ok1 = &ep_sq * &norm_sq(&m.mul_vec(pfa.q())?) <= Scalar::one();
            let ok2 = &el_sq * &norm_sq(&m.transpose().mul_vec(&f)?) <= Scalar::one();
            if !(ok0 && ok1 && ok2) && report.first_failure.is_none() {
                report.first_failure = Some(node.word.clone());
            }
            report.ppp0 &= ok0;
            report.ppp1 &= ok1;
            report.ppp2 &= ok2;
        }
    }
    report.complete = en.is_complete();
    Ok(report)
}

/// Which of the two interleaved system types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    State,
    Effect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledBall {
    pub parity: Parity,
    pub role: Role,
    pub family: BallFamily,
}

/// Period-2 chain: single-party lists per parity, entangled states between
/// sites `(2n, 2n-1)` and the effects `e_±` between `(2n+1, 2n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainGeneratingSet {
    pub dim: usize,
    pub even_states: Vec<State>,
    pub even_effects: Vec<Effect>,
    pub odd_states: Vec<State>,
    pub odd_effects: Vec<Effect>,
    pub entangled_states: Vec<EntangledState>,
    /// Always `[e_+, e_-]`.
    pub entangled_effects: Vec<EntangledEffect>,
    #[serde(default)]
    pub ball_families: Vec<LabeledBall>,
}

/// `e_± = ½ (u u ± Σ φ_μ φ_μ)`.
pub fn entangled_effect_pair(d: usize) -> [EntangledEffect; 2] {
    let id = Matrix::identity(d);
    [
        EntangledEffect::new(Scalar::half(), id.clone()).expect("positive scale"),
        EntangledEffect::new(Scalar::half(), id.scaled(&-Scalar::one())).expect("positive scale"),
    ]
}

/// Default number of sampled ball points per list.
pub fn default_samples(d: usize) -> usize {
    2 * d + 4
}

impl ChainGeneratingSet {
    pub fn omegas(&self) -> MatrixSet {
        MatrixSet::new(self.entangled_states.iter().map(|s| s.omega().clone()).collect())
            .expect("square by validation")
    }

    pub fn states(&self, parity: Parity) -> &[State] {
        match parity {
            Parity::Even => &self.even_states,
            Parity::Odd => &self.odd_states,
        }
    }

    pub fn effects(&self, parity: Parity) -> &[Effect] {
        match parity {
            Parity::Even => &self.even_effects,
            Parity::Odd => &self.odd_effects,
        }
    }

    /// Shapes, the fixed `e_±` pair, and single-system validity per parity.
    pub fn validate(&self) -> Result<(GptValidation, GptValidation)> {
        let d = self.dim;
        for s in &self.entangled_states {
            check_dim(d, s.omega().rows())?;
            check_dim(d, s.omega().cols())?;
        }
        if self.entangled_effects != entangled_effect_pair(d) {
            return Err(GptError::InvalidInstance(
                "entangled effects must be exactly [e_+, e_-] = ½(uu ± Σ φφ)".into(),
            ));
        }
        Ok((
            validate_single(d, &self.even_states, &self.even_effects)?,
            validate_single(d, &self.odd_states, &self.odd_effects)?,
        ))
    }

    /// The entangled effects add up to `u ⊗ u`.
    pub fn effects_form_measurement(&self) -> bool {
        let sum = self
            .entangled_effects
            .iter()
            .map(|e| e.to_tensor().coeffs().to_vec())
            .reduce(|a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
        let unit = crate::tensor::tensor_effects(&Effect::unit(self.dim), &Effect::unit(self.dim));
        sum.as_deref() == Some(unit.coeffs())
    }

    /// Largest squared Bloch norm over a list and any ball family it stands for.
    pub fn max_bloch_sq(&self, parity: Parity, role: Role) -> Scalar {
        let listed = match role {
            Role::State => self.states(parity).iter().map(|w| norm_sq(w.bloch())).max(),
            Role::Effect => self.effects(parity).iter().map(|e| norm_sq(e.bloch())).max(),
        };
        let balls = self
            .ball_families
            .iter()
            .filter(|b| b.parity == parity && b.role == role)
            .map(|b| b.family.r.square())
            .max();
        listed.into_iter().chain(balls).max().unwrap_or_else(Scalar::zero)
    }
}

/// Ball model on both parities with one entangled state per matrix.
pub fn chain_generators_with(ms: &MatrixSet, gpt: &HypersphereGpt, samples: usize, seed: u64) -> Result<ChainGeneratingSet> {
    let d = ms.dim();
    check_dim(d, gpt.d)?;
    let (states, effects) = ball_lists(gpt, samples, seed)?;
    let mut ball_families = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        ball_families.push(LabeledBall {
            parity,
            role: Role::State,
            family: gpt.state_family(),
        });
        ball_families.push(LabeledBall {
            parity,
            role: Role::Effect,
            family: gpt.effect_family(),
        });
    }
    Ok(ChainGeneratingSet {
        dim: d,
        even_states: states.clone(),
        even_effects: effects.clone(),
        odd_states: states,
        odd_effects: effects,
        entangled_states: ms
            .matrices()
            .iter()
            .map(|m| EntangledState::new(m.clone()))
            .collect::<Result<_>>()?,
        entangled_effects: entangled_effect_pair(d).to_vec(),
        ball_families,
    })
}

/// [`chain_generators_with`] at `ε = ε' = 1`.
pub fn chain_generators(ms: &MatrixSet) -> Result<ChainGeneratingSet> {
    let d = ms.dim();
    let gpt = HypersphereGpt::new(d, Scalar::one(), Scalar::one())?;
    chain_generators_with(ms, &gpt, default_samples(d), 0)
}

/// Chain version of [`pfa_generating_set`]: even sites gain `(1; q)` and
/// `½ (1; ±F/λ)`, odd sites keep the plain ball model.
pub fn pfa_chain_set(pfa: &PfaInstance, epsilon: &Scalar, epsilon_prime: &Scalar, samples: usize, seed: u64) -> Result<ChainGeneratingSet> {
    check_radii(epsilon, epsilon_prime)?;
    let gpt = HypersphereGpt::new(pfa.dim(), epsilon.clone(), epsilon_prime.clone())?;
    let mut cs = chain_generators_with(pfa.matrices(), &gpt, samples, seed)?;
    cs.even_states.insert(0, State::new(pfa.q().to_vec()));
    let [plus, minus] = cut_point_effects(pfa)?;
    cs.even_effects.insert(0, minus);
    cs.even_effects.insert(0, plus);
    Ok(cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::teleport::teleport_channel;
    use crate::tensor::marginalize;

    fn swap_pfa() -> PfaInstance {
        let ms = MatrixSet::new(vec![Matrix::from_ints(&[&[0, 1], &[1, 0]])]).unwrap();
        PfaInstance::new(ms, vec![q(1, 1), q(0, 1)], vec![0, 1], q(1, 4)).unwrap()
    }

    #[test]
    fn transformations_construction() {
        let d = MatrixSet::new(vec![Matrix::from_fracs(&[&[(2, 1), (0, 1)], &[(0, 1), (1, 2)]])]).unwrap();
        let ts = transformation_generators(&d);
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[1].block(), &d.matrices()[0]);
        let flip2 = compose(&ts[0], &ts[0]).unwrap();
        assert_eq!(flip2, Transformation::identity(2));
        assert_eq!(transformation_generators(&MatrixSet::empty(3)).len(), 1);
    }

    #[test]
    fn diagonal_ball_witness_is_negative() {
        let ms = MatrixSet::new(vec![Matrix::from_fracs(&[&[(2, 1), (0, 1)], &[(0, 1), (1, 2)]])]).unwrap();
        let gpt = HypersphereGpt::new(2, q(1, 2), q(1, 2)).unwrap();
        let check = check_transformations(&ms, EnumerateOptions::new(6, 1000), 3, Some(&gpt)).unwrap();
        assert!(check.verdict.is_inconsistent());
        let bw = check.ball_witness.unwrap();
        assert_eq!(bw.word.len(), 3);
        assert_eq!(bw.rayleigh, 8);
        assert_eq!(bw.value, Scalar::half() * (Scalar::one() - q(1, 4) * Scalar::int(8)));
        assert!(bw.value.is_negative());
    }

    #[test]
    fn stochastic_transformations_are_consistent() {
        let ms = MatrixSet::new(vec![Matrix::from_fracs(&[&[(1, 2), (1, 3)], &[(1, 2), (2, 3)]])]).unwrap();
        let check = check_transformations(&ms, EnumerateOptions::new(6, 1000), 2, None).unwrap();
        let c = check.verdict.certificate().unwrap();
        assert!(c.checks.iter().all(|b| b.holds));
        assert_eq!(c.lambda_sq, 2);
    }

    #[test]
    fn pfa_set_is_valid() {
        let pfa = swap_pfa();
        let se = safe_epsilons(&pfa).unwrap();
        assert_eq!(se.epsilon, q(1, 8));
        assert!(se.checks.iter().all(|c| c.holds));
        let set = pfa_generating_set(&pfa, &se.epsilon, &se.epsilon_prime, 8, 3).unwrap();
        assert!(set.validate().unwrap().is_valid());
        let [plus, minus] = cut_point_effects(&pfa).unwrap();
        assert!(validate_measurement(&Measurement::new(vec![plus.clone(), minus]).unwrap()));
        assert_eq!(pair(&Effect::unit(2), &set.states[0]).unwrap(), 1);
        assert_eq!(pair(&plus, &set.states[0]).unwrap(), q(1, 2));
        assert!(set.transformations.iter().all(|t| t.shift().iter().all(Scalar::is_zero)));
        assert_eq!(set.transformations.len(), 1);
    }

    #[test]
    fn ppp3_examples() {
        let pfa = swap_pfa();
        assert_eq!(ppp3_value(&pfa, &Word::new(vec![1]), Sign::Minus).unwrap(), q(-3, 2));
        assert_eq!(ppp3_value(&pfa, &Word::empty(), Sign::Minus).unwrap(), q(1, 2));
        assert_eq!(ppp3_value(&pfa, &Word::empty(), Sign::Plus).unwrap(), q(1, 2));
        let ms = MatrixSet::new(vec![Matrix::from_fracs(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])]).unwrap();
        let avg = PfaInstance::new(ms, vec![q(1, 1), q(0, 1)], vec![0, 1], q(1, 2)).unwrap();
        assert_eq!(ppp3_value(&avg, &Word::new(vec![1]), Sign::Minus).unwrap(), 0);
    }

    #[test]
    fn safe_epsilons_keep_forms_positive() {
        let ms = MatrixSet::new(vec![
            Matrix::from_fracs(&[&[(1, 2), (1, 3), (0, 1)], &[(1, 4), (1, 3), (1, 1)], &[(1, 4), (1, 3), (0, 1)]]),
            Matrix::from_ints(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]),
        ])
        .unwrap();
        let pfa = PfaInstance::new(ms, vec![q(1, 3), q(1, 3), q(1, 3)], vec![1, 0, 1], q(1, 5)).unwrap();
        let se = safe_epsilons(&pfa).unwrap();
        let r = ppp_positivity(&pfa, &se.epsilon, &se.epsilon_prime, EnumerateOptions::new(6, 10_000)).unwrap();
        assert!(r.ppp0 && r.ppp1 && r.ppp2, "{r:?}");
        assert!(r.complete);
        let r = ppp_positivity(&pfa, &Scalar::int(2), &Scalar::one(), EnumerateOptions::new(2, 100)).unwrap();
        assert!(!r.ppp2);
    }

    #[test]
    fn one_dimensional_pfa() {
        let ms = MatrixSet::new(vec![Matrix::identity(1)]).unwrap();
        let pfa = PfaInstance::new(ms, vec![q(1, 1)], vec![1], q(1, 2)).unwrap();
        let se = safe_epsilons(&pfa).unwrap();
        assert!(se.epsilon.is_positive() && se.epsilon_prime.is_positive());
        assert!(se.checks.iter().all(|c| c.holds));
    }

    #[test]
    fn chain_generators_properties() {
        let ms = MatrixSet::new(vec![Matrix::from_ints(&[&[1, 2], &[3, 4]]), Matrix::identity(2)]).unwrap();
        let cs = chain_generators(&ms).unwrap();
        assert!(cs.effects_form_measurement());
        let (even, odd) = cs.validate().unwrap();
        assert!(even.is_valid() && odd.is_valid());
        for st in &cs.entangled_states {
            let t = st.to_tensor();
            assert_eq!(marginalize(&t, 0).unwrap(), crate::gpt::GptVector::unit(2));
            for (e, s) in cs.entangled_effects.iter().zip([1, -1]) {
                let ch = teleport_channel(st, e).unwrap();
                assert_eq!(ch.block(), &st.omega().scaled(&Scalar::int(s)));
                assert_eq!(ch.scale(), &q(1, 2));
            }
        }
        assert_eq!(cs.entangled_states.len() + cs.entangled_effects.len(), 4);
    }

    #[test]
    fn chain_set_asymmetry() {
        let pfa = swap_pfa();
        let se = safe_epsilons(&pfa).unwrap();
        let cs = pfa_chain_set(&pfa, &se.epsilon, &se.epsilon_prime, 6, 0).unwrap();
        let [plus, minus] = cut_point_effects(&pfa).unwrap();
        assert!(cs.even_effects.contains(&plus) && cs.even_effects.contains(&minus));
        assert!(!cs.odd_effects.contains(&plus) && !cs.odd_effects.contains(&minus));
        assert_eq!(cs.even_states[0], State::new(pfa.q().to_vec()));
        let (even, odd) = cs.validate().unwrap();
        assert!(even.is_valid() && odd.is_valid());
    }
}
