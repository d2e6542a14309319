//! Period-2 translation-invariant chains.
//!
//! Even sites `2n` and odd sites `2n+1` carry systems of the same Bloch
//! dimension. Entangled states sit on `(2n, 2n-1)` with correlation `Ω_l`
//! (rows index the even site) and the effects `e_±` on `(2n+1, 2n)`.
//! Teleporting an even system moves it two sites up with block `±Ω_l / 2`;
//! an odd system moves two sites down with block `±Ω_l^T / 2`.
//!
//! The four outcome families have closed forms in terms of one product
//! `Ω_c` over a word `c` written in increasing site order. [`brute_force_chain`]
//! evaluates explicit finite-window scenarios by tensor contraction and is
//! the oracle for those closed forms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GptError, Result};
use crate::gpt::{Effect, GptVector, State, Transformation};
use crate::linalg::Matrix;
use crate::reductions::{ChainGeneratingSet, Parity, Role};
use crate::scalar::{dot, Scalar};
use crate::tensor::Tensor;
use crate::verdict::{BoundCheck, Certificate, ChainWitness, ConsistencyVerdict, Family, Sign, Witness};
use crate::wordsearch::{boundedness_certificate, product, Dedup, EnumerateOptions, Enumerator, MatrixSet, ProductNode, Word};

/// A validated chain generating set together with its matrix alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    set: ChainGeneratingSet,
    omegas: MatrixSet,
}

impl ChainSpec {
    pub fn new(set: ChainGeneratingSet) -> Result<Self> {
        set.validate()?;
        let omegas = if set.entangled_states.is_empty() {
            MatrixSet::empty(set.dim)
        } else {
            set.omegas()
        };
        Ok(ChainSpec { set, omegas })
    }

    pub fn set(&self) -> &ChainGeneratingSet {
        &self.set
    }

    pub fn omegas(&self) -> &MatrixSet {
        &self.omegas
    }

    pub fn dim(&self) -> usize {
        self.set.dim
    }

    fn state(&self, parity: Parity, index: usize) -> Result<&State> {
        let list = self.set.states(parity);
        list.get(index).ok_or(GptError::BadIndex {
            what: "single-party state",
            index,
            len: list.len(),
        })
    }

    fn effect(&self, parity: Parity, index: usize) -> Result<&Effect> {
        let list = self.set.effects(parity);
        list.get(index).ok_or(GptError::BadIndex {
            what: "single-party effect",
            index,
            len: list.len(),
        })
    }

    fn omega(&self, label: usize) -> Result<&Matrix> {
        self.omegas.get(label)
    }
}

pub fn parity_of(site: i64) -> Parity {
    if site.rem_euclid(2) == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `2n -> 2n + 2L`.
    EvenForward,
    /// `2n+1 -> 2n+1 - 2L`.
    OddBackward,
}

/// A sequence of teleport steps. `word` lists entangled-state labels in the
/// order they are used; `signs` holds the `e_±` outcome of each step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeleportPlan {
    pub direction: Direction,
    pub word: Word,
    pub signs: Vec<Sign>,
}

impl TeleportPlan {
    pub fn new(direction: Direction, word: Word, signs: Vec<Sign>) -> Result<Self> {
        check_dim(word.len(), signs.len())?;
        Ok(TeleportPlan { direction, word, signs })
    }

    /// All steps with outcome `+`.
    pub fn plus(direction: Direction, word: Word) -> Self {
        let signs = vec![Sign::Plus; word.len()];
        TeleportPlan { direction, word, signs }
    }

    pub fn empty(direction: Direction) -> Self {
        TeleportPlan::plus(direction, Word::empty())
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn overall_sign(&self) -> Sign {
        Sign::product(&self.signs)
    }

    /// The labels in increasing site order.
    pub fn site_word(&self) -> Word {
        match self.direction {
            Direction::EvenForward => self.word.clone(),
            Direction::OddBackward => self.word.reversed(),
        }
    }

    fn expect(&self, direction: Direction) -> Result<()> {
        if self.direction == direction {
            Ok(())
        } else {
            Err(GptError::WrongDirection {
                expected: match direction {
                    Direction::EvenForward => "even_forward",
                    Direction::OddBackward => "odd_backward",
                },
            })
        }
    }
}

fn step_scale(steps: usize) -> Scalar {
    Scalar::pow2_recip(steps)
}

/// Weight `2^-L`, block `±Ω_{l_L} ··· Ω_{l_1}`.
pub fn even_channel(plan: &TeleportPlan, cs: &ChainSpec) -> Result<Transformation> {
    plan.expect(Direction::EvenForward)?;
    let block = product(cs.omegas(), &plan.word)?.scaled(&plan.overall_sign().value());
    Transformation::new(step_scale(plan.len()), vec![Scalar::zero(); cs.dim()], block)
}

/// Weight `2^-L`, block `±(Ω_{l_1} ··· Ω_{l_L})^T`.
pub fn odd_channel(plan: &TeleportPlan, cs: &ChainSpec) -> Result<Transformation> {
    plan.expect(Direction::OddBackward)?;
    let block = product(cs.omegas(), &plan.site_word())?
        .transpose()
        .scaled(&plan.overall_sign().value());
    Transformation::new(step_scale(plan.len()), vec![Scalar::zero(); cs.dim()], block)
}

fn correlated(r: Scalar, sign: Sign, a: &[Scalar], m: &Matrix, b: &[Scalar]) -> Result<Scalar> {
    Ok(r * (Scalar::one() + sign.value() * m.bilinear(a, b)?))
}

/// Even state `i` teleported forward, then even effect `j`:
/// `p_j 2^-L (1 ± f_j^T Ω_w v_i)`.
pub fn probability_p1(cs: &ChainSpec, i: usize, j: usize, plan: &TeleportPlan) -> Result<Scalar> {
    plan.expect(Direction::EvenForward)?;
    let v = cs.state(Parity::Even, i)?;
    let e = cs.effect(Parity::Even, j)?;
    let m = product(cs.omegas(), &plan.word)?;
    correlated(e.scale() * &step_scale(plan.len()), plan.overall_sign(), e.bloch(), &m, v.bloch())
}

/// Odd state `i` teleported backward, then odd effect `j`:
/// `p'_j 2^-L (1 ± v'_i^T Ω_c f'_j)` with `c` the site-ordered word.
pub fn probability_p2(cs: &ChainSpec, i: usize, j: usize, plan: &TeleportPlan) -> Result<Scalar> {
    plan.expect(Direction::OddBackward)?;
    let v = cs.state(Parity::Odd, i)?;
    let e = cs.effect(Parity::Odd, j)?;
    let m = product(cs.omegas(), &plan.site_word())?;
    correlated(e.scale() * &step_scale(plan.len()), plan.overall_sign(), v.bloch(), &m, e.bloch())
}

/// Entangled state `l` with its even half sent forward and its odd half
/// backward, then single effects: `p_j p'_j' 2^-(L1+L2) (1 ± f_j^T Ω_c f'_j')`
/// with `c = odd part ++ l ++ even part`.
pub fn probability_p3(cs: &ChainSpec, l: usize, j: usize, j_odd: usize, even: &TeleportPlan, odd: &TeleportPlan) -> Result<Scalar> {
    even.expect(Direction::EvenForward)?;
    odd.expect(Direction::OddBackward)?;
    cs.omega(l)?;
    let f = cs.effect(Parity::Even, j)?;
    let fp = cs.effect(Parity::Odd, j_odd)?;
    let c = odd.site_word().concat(&Word::new(vec![l])).concat(&even.word);
    let m = product(cs.omegas(), &c)?;
    let sign = even.overall_sign().times(odd.overall_sign());
    let r = f.scale() * fp.scale() * step_scale(even.len() + odd.len());
    correlated(r, sign, f.bloch(), &m, fp.bloch())
}

/// Even state `i` sent forward and odd state `i_odd` sent backward onto
/// adjacent sites, then `e_±`: `2^-(L1+L2+1) (1 ± v'^T Ω_c v)` with
/// `c = even part ++ odd part`.
pub fn probability_p4(cs: &ChainSpec, i: usize, i_odd: usize, even: &TeleportPlan, odd: &TeleportPlan, last: Sign) -> Result<Scalar> {
    even.expect(Direction::EvenForward)?;
    odd.expect(Direction::OddBackward)?;
    let v = cs.state(Parity::Even, i)?;
    let vp = cs.state(Parity::Odd, i_odd)?;
    let c = even.word.concat(&odd.site_word());
    let m = product(cs.omegas(), &c)?;
    let sign = even.overall_sign().times(odd.overall_sign()).times(last);
    correlated(step_scale(even.len() + odd.len() + 1), sign, vp.bloch(), &m, v.bloch())
}

/// A resource prepared at the start of a scenario.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Placement {
    /// Single-party state `index` of the site's parity.
    Single { site: i64, index: usize },
    /// Entangled state with 1-based `label` on `(even_site, even_site - 1)`.
    Entangled { even_site: i64, label: usize },
}

/// A measurement outcome. Sites without one are discarded with `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    Single { site: i64, index: usize },
    /// `e_±` on `(odd_site, odd_site - 1)`.
    Entangled { odd_site: i64, sign: Sign },
}

impl Placement {
    fn sites(&self) -> Vec<i64> {
        match *self {
            Placement::Single { site, .. } => vec![site],
            Placement::Entangled { even_site, .. } => vec![even_site, even_site - 1],
        }
    }

    fn shifted(&self, by: i64) -> Placement {
        match *self {
            Placement::Single { site, index } => Placement::Single { site: site + by, index },
            Placement::Entangled { even_site, label } => Placement::Entangled {
                even_site: even_site + by,
                label,
            },
        }
    }
}

impl Measure {
    fn sites(&self) -> Vec<i64> {
        match *self {
            Measure::Single { site, .. } => vec![site],
            Measure::Entangled { odd_site, .. } => vec![odd_site, odd_site - 1],
        }
    }

    fn shifted(&self, by: i64) -> Measure {
        match *self {
            Measure::Single { site, index } => Measure::Single { site: site + by, index },
            Measure::Entangled { odd_site, sign } => Measure::Entangled {
                odd_site: odd_site + by,
                sign,
            },
        }
    }
}

/// Descriptive record of the teleport word a scenario realizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioPlan {
    pub word: Word,
    pub signs: Vec<Sign>,
}

/// A finite window of the chain, the prepared resources, and the outcomes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub window: (i64, i64),
    pub initial: Vec<Placement>,
    pub schedule: Vec<Measure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<ScenarioPlan>,
}

impl Scenario {
    /// Every site carries exactly one prepared system, entangled resources
    /// only join their designated neighbours, and no site is measured twice.
    pub fn validate(&self, cs: &ChainSpec) -> Result<()> {
        let (lo, hi) = self.window;
        if lo > hi {
            return Err(GptError::InvalidScenario(format!("empty window [{lo}, {hi}]")));
        }
        let width = (hi - lo + 1) as usize;
        let inside = |s: i64| -> Result<usize> {
            if s < lo || s > hi {
                Err(GptError::InvalidScenario(format!("site {s} outside window [{lo}, {hi}]")))
            } else {
                Ok((s - lo) as usize)
            }
        };
        let mut prepared = vec![false; width];
        for p in &self.initial {
            match *p {
                Placement::Single { site, index } => {
                    cs.state(parity_of(site), index)?;
                }
                Placement::Entangled { even_site, label } => {
                    if parity_of(even_site) != Parity::Even {
                        return Err(GptError::InvalidScenario(format!(
                            "entangled states join (2n, 2n-1); {even_site} is odd"
                        )));
                    }
                    cs.omega(label)?;
                }
            }
            for s in p.sites() {
                let k = inside(s)?;
                if std::mem::replace(&mut prepared[k], true) {
                    return Err(GptError::InvalidScenario(format!("site {s} prepared twice")));
                }
            }
        }
        if let Some(k) = prepared.iter().position(|x| !x) {
            return Err(GptError::InvalidScenario(format!("site {} has no prepared system", lo + k as i64)));
        }
        let mut measured = vec![false; width];
        for m in &self.schedule {
            match *m {
                Measure::Single { site, index } => {
                    cs.effect(parity_of(site), index)?;
                }
                Measure::Entangled { odd_site, .. } => {
                    if parity_of(odd_site) != Parity::Odd {
                        return Err(GptError::InvalidScenario(format!(
                            "entangled effects join (2n+1, 2n); {odd_site} is even"
                        )));
                    }
                }
            }
            for s in m.sites() {
                let k = inside(s)?;
                if std::mem::replace(&mut measured[k], true) {
                    return Err(GptError::InvalidScenario(format!("site {s} measured twice")));
                }
            }
        }
        Ok(())
    }

    /// The same scenario `periods` periods further along the chain.
    pub fn translated(&self, periods: i64) -> Scenario {
        let by = 2 * periods;
        Scenario {
            window: (self.window.0 + by, self.window.1 + by),
            initial: self.initial.iter().map(|p| p.shifted(by)).collect(),
            schedule: self.schedule.iter().map(|m| m.shifted(by)).collect(),
            plan: self.plan.clone(),
        }
    }

    /// Both scenarios side by side on disjoint windows. A gap site left by
    /// the even shift is filled with state 0 of its parity and discarded.
    pub fn alongside(&self, other: &Scenario) -> Scenario {
        let need = self.window.1 + 1 - other.window.0;
        let by = need + need.rem_euclid(2);
        let moved = Scenario {
            window: (other.window.0 + by, other.window.1 + by),
            initial: other.initial.iter().map(|p| p.shifted(by)).collect(),
            schedule: other.schedule.iter().map(|m| m.shifted(by)).collect(),
            plan: None,
        };
        let mut initial = self.initial.clone();
        for site in self.window.1 + 1..moved.window.0 {
            initial.push(Placement::Single { site, index: 0 });
        }
        initial.extend(moved.initial);
        let mut schedule = self.schedule.clone();
        schedule.extend(moved.schedule);
        Scenario {
            window: (self.window.0, moved.window.1),
            initial,
            schedule,
            plan: None,
        }
    }
}

fn push_even_steps(initial: &mut Vec<Placement>, schedule: &mut Vec<Measure>, start: i64, plan: &TeleportPlan) {
    for (k, (&label, &sign)) in plan.word.labels().iter().zip(&plan.signs).enumerate() {
        let to = start + 2 * (k as i64 + 1);
        initial.push(Placement::Entangled { even_site: to, label });
        schedule.push(Measure::Entangled { odd_site: to - 1, sign });
    }
}

fn push_odd_steps(initial: &mut Vec<Placement>, schedule: &mut Vec<Measure>, start: i64, plan: &TeleportPlan) {
    for (k, (&label, &sign)) in plan.word.labels().iter().zip(&plan.signs).enumerate() {
        let from = start - 2 * k as i64;
        initial.push(Placement::Entangled {
            even_site: from - 1,
            label,
        });
        schedule.push(Measure::Entangled { odd_site: from, sign });
    }
}

fn plan_record(word: Word, plans: &[&TeleportPlan], extra: Option<Sign>) -> ScenarioPlan {
    let mut signs: Vec<Sign> = plans.iter().flat_map(|p| p.signs.iter().copied()).collect();
    signs.extend(extra);
    ScenarioPlan { word, signs }
}

/// Scenario realizing [`probability_p1`]: state at site 0, effect at `2L`.
pub fn scenario_p1(i: usize, j: usize, plan: &TeleportPlan) -> Result<Scenario> {
    plan.expect(Direction::EvenForward)?;
    let top = 2 * plan.len() as i64;
    let mut initial = vec![Placement::Single { site: 0, index: i }];
    let mut schedule = Vec::new();
    push_even_steps(&mut initial, &mut schedule, 0, plan);
    schedule.push(Measure::Single { site: top, index: j });
    Ok(Scenario {
        window: (0, top),
        initial,
        schedule,
        plan: Some(plan_record(plan.site_word(), &[plan], None)),
    })
}

/// Scenario realizing [`probability_p2`]: state at `2L+1`, effect at 1.
pub fn scenario_p2(i: usize, j: usize, plan: &TeleportPlan) -> Result<Scenario> {
    plan.expect(Direction::OddBackward)?;
    let top = 2 * plan.len() as i64 + 1;
    let mut initial = vec![Placement::Single { site: top, index: i }];
    let mut schedule = Vec::new();
    push_odd_steps(&mut initial, &mut schedule, top, plan);
    schedule.push(Measure::Single { site: 1, index: j });
    Ok(Scenario {
        window: (1, top),
        initial,
        schedule,
        plan: Some(plan_record(plan.site_word(), &[plan], None)),
    })
}

/// Scenario realizing [`probability_p3`] with the entangled state on
/// `(2 L2 + 2, 2 L2 + 1)`.
pub fn scenario_p3(l: usize, j: usize, j_odd: usize, even: &TeleportPlan, odd: &TeleportPlan) -> Result<Scenario> {
    even.expect(Direction::EvenForward)?;
    odd.expect(Direction::OddBackward)?;
    let base = 2 * odd.len() as i64 + 2;
    let top = base + 2 * even.len() as i64;
    let mut initial = vec![Placement::Entangled { even_site: base, label: l }];
    let mut schedule = Vec::new();
    push_even_steps(&mut initial, &mut schedule, base, even);
    push_odd_steps(&mut initial, &mut schedule, base - 1, odd);
    schedule.push(Measure::Single { site: top, index: j });
    schedule.push(Measure::Single { site: 1, index: j_odd });
    let word = odd.site_word().concat(&Word::new(vec![l])).concat(&even.word);
    Ok(Scenario {
        window: (1, top),
        initial,
        schedule,
        plan: Some(plan_record(word, &[even, odd], None)),
    })
}

/// Scenario realizing [`probability_p4`]: even state at 0, odd state at
/// `2(L1+L2)+1`, meeting on `(2 L1 + 1, 2 L1)`.
pub fn scenario_p4(i: usize, i_odd: usize, even: &TeleportPlan, odd: &TeleportPlan, last: Sign) -> Result<Scenario> {
    even.expect(Direction::EvenForward)?;
    odd.expect(Direction::OddBackward)?;
    let meet = 2 * even.len() as i64;
    let top = meet + 2 * odd.len() as i64 + 1;
    let mut initial = vec![
        Placement::Single { site: 0, index: i },
        Placement::Single { site: top, index: i_odd },
    ];
    let mut schedule = Vec::new();
    push_even_steps(&mut initial, &mut schedule, 0, even);
    push_odd_steps(&mut initial, &mut schedule, top, odd);
    schedule.push(Measure::Entangled {
        odd_site: meet + 1,
        sign: last,
    });
    let word = even.word.concat(&odd.site_word());
    Ok(Scenario {
        window: (0, top),
        initial,
        schedule,
        plan: Some(plan_record(word, &[even, odd], Some(last))),
    })
}

/// Contraction order used by [`brute_force_chain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// Sweep the window left to right, contracting each effect as soon as
    /// its sites are present. Keeps few open sites.
    #[default]
    Streaming,
    /// Build the full window tensor first, then apply effects in order.
    Full,
}

struct Open {
    tensor: Tensor,
    sites: Vec<i64>,
}

impl Open {
    fn attach(&mut self, t: &Tensor, sites: Vec<i64>) {
        self.tensor = self.tensor.outer(t);
        self.sites.extend(sites);
    }

    fn contract(&mut self, t: &Tensor, sites: &[i64]) -> Result<()> {
        let axes: Vec<usize> = sites
            .iter()
            .map(|s| self.sites.iter().position(|x| x == s).expect("site prepared"))
            .collect();
        self.tensor = self.tensor.contract(&axes, t)?;
        self.sites.retain(|s| !sites.contains(s));
        Ok(())
    }
}

/// Exact joint value of a scenario by tensor contraction.
pub fn brute_force_chain(cs: &ChainSpec, scenario: &Scenario, mode: OracleMode) -> Result<Scalar> {
    scenario.validate(cs)?;
    let d = cs.dim();
    let [plus, minus] = crate::reductions::entangled_effect_pair(d);
    let state_tensor = |p: &Placement| -> Result<Tensor> {
        Ok(match *p {
            Placement::Single { site, index } => Tensor::from_vector(&cs.state(parity_of(site), index)?.to_vector()),
            Placement::Entangled { label, .. } => crate::teleport::EntangledState::new(cs.omega(label)?.clone())?.to_tensor(),
        })
    };
    let effect_tensor = |m: &Measure| -> Result<Tensor> {
        Ok(match *m {
            Measure::Single { site, index } => Tensor::from_vector(&cs.effect(parity_of(site), index)?.to_vector()),
            Measure::Entangled { sign: Sign::Plus, .. } => plus.to_tensor(),
            Measure::Entangled { sign: Sign::Minus, .. } => minus.to_tensor(),
        })
    };

    let (lo, hi) = scenario.window;
    let mut effects: Vec<(Tensor, Vec<i64>)> = scenario
        .schedule
        .iter()
        .map(|m| Ok((effect_tensor(m)?, m.sites())))
        .collect::<Result<_>>()?;
    let measured: Vec<i64> = effects.iter().flat_map(|(_, s)| s.clone()).collect();
    let unit = Tensor::from_vector(&GptVector::unit(d));
    for site in lo..=hi {
        if !measured.contains(&site) {
            effects.push((unit.clone(), vec![site]));
        }
    }

    let mut open = Open {
        tensor: Tensor::scalar(Scalar::one()),
        sites: Vec::new(),
    };
    let mut placements: Vec<&Placement> = scenario.initial.iter().collect();
    placements.sort_by_key(|p| p.sites().into_iter().min());
    match mode {
        OracleMode::Full => {
            for p in placements {
                open.attach(&state_tensor(p)?, p.sites());
            }
            for (t, sites) in &effects {
                open.contract(t, sites)?;
            }
        }
        OracleMode::Streaming => {
            let mut next = placements.into_iter().peekable();
            let mut pending = effects;
            pending.sort_by_key(|(_, s)| s.iter().copied().max());
            let mut pending = pending.into_iter().peekable();
            for site in lo..=hi {
                while let Some(p) = next.next_if(|p| p.sites().into_iter().min() == Some(site)) {
                    open.attach(&state_tensor(p)?, p.sites());
                }
                while let Some((t, sites)) = pending.next_if(|(_, s)| s.iter().copied().max() == Some(site)) {
                    open.contract(&t, &sites)?;
                }
            }
        }
    }
    open.tensor
        .as_scalar()
        .cloned()
        .ok_or_else(|| GptError::InvalidScenario("open systems left after contraction".into()))
}

/// Budgets and switches for [`consistency_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub enumerate: EnumerateOptions,
    /// Largest block length tried by the certificate path; 0 skips it.
    pub t_max: usize,
    /// Keep the positive `2^-L` and `p` prefactors in reported values.
    pub include_scale: bool,
}

impl ScanOptions {
    pub fn new(enumerate: EnumerateOptions, t_max: usize) -> Self {
        ScanOptions {
            enumerate,
            t_max,
            include_scale: true,
        }
    }
}

/// Order in which families are tried for each word.
pub const SCAN_ORDER: [Family; 4] = [Family::P4, Family::P1, Family::P2, Family::P3];

/// Certificate checks: `|a|² |b|² Λ² <= 1` for the two vectors each family
/// pairs through `Ω_c`.
pub fn certificate_checks(cs: &ChainSpec, lambda_sq: &Scalar) -> Vec<BoundCheck> {
    let s = cs.set();
    let pairs = [
        (Family::P1, (Parity::Even, Role::Effect), (Parity::Even, Role::State)),
        (Family::P2, (Parity::Odd, Role::State), (Parity::Odd, Role::Effect)),
        (Family::P3, (Parity::Even, Role::Effect), (Parity::Odd, Role::Effect)),
        (Family::P4, (Parity::Odd, Role::State), (Parity::Even, Role::State)),
    ];
    pairs
        .iter()
        .map(|(fam, a, b)| {
            let lhs = s.max_bloch_sq(a.0, a.1) * s.max_bloch_sq(b.0, b.1) * lambda_sq;
            BoundCheck::new(format!("{fam:?}: |a|^2 |b|^2 Lambda^2"), lhs)
        })
        .collect()
}

/// Three-valued consistency of a chain generating set.
///
/// First tries a norm certificate for `{Ω_l}` and the Bloch-norm checks of
/// [`certificate_checks`]. Otherwise scans words in breadth-first order and,
/// per word, families in [`SCAN_ORDER`], generators by index, sign `-`
/// before `+`; the first negative value is re-verified and returned.
pub fn consistency_scan(cs: &ChainSpec, opts: ScanOptions) -> Result<ConsistencyVerdict> {
    if opts.t_max > 0 && !cs.omegas().is_empty() {
        if let ConsistencyVerdict::Consistent { mut certificate } =
            boundedness_certificate(cs.omegas(), opts.t_max, opts.enumerate.max_nodes)?
        {
            let checks = certificate_checks(cs, &certificate.lambda_sq);
            if checks.iter().all(|c| c.holds) {
                certificate.embedding = None;
                certificate.checks = checks;
                return Ok(ConsistencyVerdict::Consistent { certificate });
            }
        }
    }
    scan_words(cs, opts)
}

fn scan_words(cs: &ChainSpec, opts: ScanOptions) -> Result<ConsistencyVerdict> {
    // Sign freedom changes at lengths 1 and 2, so those classes stay apart.
    let en_opts = EnumerateOptions {
        dedup: match opts.enumerate.dedup {
            Dedup::Exact => Dedup::LengthCapped(2),
            other => other,
        },
        ..opts.enumerate
    };
    let pool = if opts.enumerate.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.enumerate.threads)
                .build()
                .map_err(|e| GptError::InvalidParameter(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let mut en = Enumerator::new(cs.omegas(), en_opts)?;
    for level in en.by_ref() {
        let found = match &pool {
            Some(p) => p.install(|| level.par_iter().map(|n| first_negative(cs, n, opts.include_scale)).collect::<Vec<_>>()),
            None => level.iter().map(|n| first_negative(cs, n, opts.include_scale)).collect(),
        };
        if let Some(w) = found.into_iter().flatten().next() {
            let replayed = replay_closed_form(cs, &w)?;
            if opts.include_scale {
                assert_eq!(replayed, w.value, "chain witness re-verification failed");
            } else {
                assert!(replayed.is_negative(), "chain witness re-verification failed");
            }
            return Ok(ConsistencyVerdict::Inconsistent {
                witness: Witness::Chain(w),
            });
        }
    }
    Ok(ConsistencyVerdict::Unknown { budget: en.report() })
}

/// Negative outcome of `1 ± x`, preferring `-`; `free` allows the `-` sign.
fn negative_sign(x: &Scalar, free: bool) -> Option<Sign> {
    if free && *x > Scalar::one() {
        Some(Sign::Minus)
    } else if *x < -Scalar::one() {
        Some(Sign::Plus)
    } else {
        None
    }
}

fn first_negative(cs: &ChainSpec, node: &ProductNode, include_scale: bool) -> Option<ChainWitness> {
    let s = cs.set();
    let m = &node.matrix;
    let len = node.word.len();
    let apply = |b: &[Scalar]| m.mul_vec(b).expect("dimensions validated");
    let build = |family, generators: Vec<usize>, sign: Sign, x: &Scalar, r: Scalar, even_steps, odd_steps| {
        let r = if include_scale { r } else { Scalar::one() };
        ChainWitness {
            family,
            generators,
            word: node.word.clone(),
            even_steps,
            odd_steps,
            sign,
            value: r * (Scalar::one() + sign.value() * x),
        }
    };
    for family in SCAN_ORDER {
        match family {
            Family::P4 => {
                let mv: Vec<Vec<Scalar>> = s.even_states.iter().map(|v| apply(v.bloch())).collect();
                for (i, mvi) in mv.iter().enumerate() {
                    for (k, vp) in s.odd_states.iter().enumerate() {
                        let x = dot(vp.bloch(), mvi);
                        if let Some(sign) = negative_sign(&x, true) {
                            return Some(build(family, vec![i, k], sign, &x, step_scale(len + 1), len, 0));
                        }
                    }
                }
            }
            Family::P1 => {
                for (i, v) in s.even_states.iter().enumerate() {
                    let mvi = apply(v.bloch());
                    for (j, e) in s.even_effects.iter().enumerate() {
                        let x = dot(e.bloch(), &mvi);
                        if let Some(sign) = negative_sign(&x, len >= 1) {
                            return Some(build(family, vec![i, j], sign, &x, e.scale() * &step_scale(len), len, 0));
                        }
                    }
                }
            }
            Family::P2 => {
                for (j, e) in s.odd_effects.iter().enumerate() {
                    let mf = apply(e.bloch());
                    for (i, v) in s.odd_states.iter().enumerate() {
                        let x = dot(v.bloch(), &mf);
                        if let Some(sign) = negative_sign(&x, len >= 1) {
                            return Some(build(family, vec![i, j], sign, &x, e.scale() * &step_scale(len), 0, len));
                        }
                    }
                }
            }
            Family::P3 => {
                if len == 0 {
                    continue;
                }
                for (k, fp) in s.odd_effects.iter().enumerate() {
                    let mf = apply(fp.bloch());
                    for (j, f) in s.even_effects.iter().enumerate() {
                        let x = dot(f.bloch(), &mf);
                        if let Some(sign) = negative_sign(&x, len >= 2) {
                            let r = f.scale() * fp.scale() * step_scale(len - 1);
                            return Some(build(family, vec![j, k], sign, &x, r, len - 1, 0));
                        }
                    }
                }
            }
        }
    }
    None
}

/// The explicit teleport plans behind a chain witness. The overall sign is
/// put on the first step (or the final `e_±` for P4); other steps are `+`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPlans {
    pub even: TeleportPlan,
    pub odd: TeleportPlan,
    pub last: Sign,
}

pub fn witness_plans(w: &ChainWitness) -> Result<WitnessPlans> {
    let labels = w.word.labels();
    let signed = |n: usize, put_sign: bool| -> Vec<Sign> {
        let mut s = vec![Sign::Plus; n];
        if put_sign && n > 0 {
            s[0] = w.sign;
        }
        s
    };
    let bad = || GptError::InvalidParameter("witness step counts do not match its word".into());
    let plans = match w.family {
        Family::P1 => WitnessPlans {
            even: TeleportPlan::new(Direction::EvenForward, w.word.clone(), signed(labels.len(), true))?,
            odd: TeleportPlan::empty(Direction::OddBackward),
            last: Sign::Plus,
        },
        Family::P2 => WitnessPlans {
            even: TeleportPlan::empty(Direction::EvenForward),
            odd: TeleportPlan::new(Direction::OddBackward, w.word.reversed(), signed(labels.len(), true))?,
            last: Sign::Plus,
        },
        Family::P3 => {
            if w.odd_steps + w.even_steps + 1 != labels.len() {
                return Err(bad());
            }
            let odd_site = Word::new(labels[..w.odd_steps].to_vec());
            let even = Word::new(labels[w.odd_steps + 1..].to_vec());
            let even_signs = signed(even.len(), true);
            let odd_signs = signed(odd_site.len(), even.is_empty());
            WitnessPlans {
                even: TeleportPlan::new(Direction::EvenForward, even, even_signs)?,
                odd: TeleportPlan::new(Direction::OddBackward, odd_site.reversed(), odd_signs)?,
                last: Sign::Plus,
            }
        }
        Family::P4 => {
            if w.odd_steps + w.even_steps != labels.len() {
                return Err(bad());
            }
            WitnessPlans {
                even: TeleportPlan::plus(Direction::EvenForward, Word::new(labels[..w.even_steps].to_vec())),
                odd: TeleportPlan::plus(Direction::OddBackward, Word::new(labels[w.even_steps..].to_vec()).reversed()),
                last: w.sign,
            }
        }
    };
    Ok(plans)
}

/// Closed-form value of a witness, prefactors included.
pub fn replay_closed_form(cs: &ChainSpec, w: &ChainWitness) -> Result<Scalar> {
    let p = witness_plans(w)?;
    let g = &w.generators;
    if g.len() != 2 {
        return Err(GptError::InvalidParameter("chain witnesses carry two generator indices".into()));
    }
    match w.family {
        Family::P1 => probability_p1(cs, g[0], g[1], &p.even),
        Family::P2 => probability_p2(cs, g[0], g[1], &p.odd),
        Family::P3 => probability_p3(cs, w.word.labels()[w.odd_steps], g[0], g[1], &p.even, &p.odd),
        Family::P4 => probability_p4(cs, g[0], g[1], &p.even, &p.odd, p.last),
    }
}

/// The explicit scenario behind a witness.
pub fn witness_scenario(w: &ChainWitness) -> Result<Scenario> {
    let p = witness_plans(w)?;
    let g = &w.generators;
    match w.family {
        Family::P1 => scenario_p1(g[0], g[1], &p.even),
        Family::P2 => scenario_p2(g[0], g[1], &p.odd),
        Family::P3 => scenario_p3(w.word.labels()[w.odd_steps], g[0], g[1], &p.even, &p.odd),
        Family::P4 => scenario_p4(g[0], g[1], &p.even, &p.odd, p.last),
    }
}

/// Certificate path alone, for reporting: `None` when no certificate exists
/// within `t_max`.
pub fn chain_certificate(cs: &ChainSpec, t_max: usize, max_nodes: usize) -> Result<Option<Certificate>> {
    Ok(boundedness_certificate(cs.omegas(), t_max, max_nodes)?
        .certificate()
        .cloned()
        .map(|mut c| {
            c.embedding = None;
            c.checks = certificate_checks(cs, &c.lambda_sq);
            c
        }))
}

/// A closed-form value that disagreed with tensor contraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleMismatch {
    pub family: Family,
    pub word: Word,
    pub closed_form: Scalar,
    pub oracle: Scalar,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub checked: usize,
    pub mismatches: Vec<OracleMismatch>,
}

impl OracleReport {
    fn record(&mut self, family: Family, word: &Word, closed_form: Scalar, oracle: Scalar) {
        self.checked += 1;
        if closed_form != oracle {
            self.mismatches.push(OracleMismatch {
                family,
                word: word.clone(),
                closed_form,
                oracle,
            });
        }
    }
}

fn alternating(n: usize, flip: bool) -> Vec<Sign> {
    (0..n)
        .map(|k| if flip && k % 2 == 0 { Sign::Minus } else { Sign::Plus })
        .collect()
}

/// Evaluates all four families on the first `limit` words of length at most
/// `max_len` (shortest first, then lexicographic), with first generators and
/// two sign patterns, both in closed form and by [`brute_force_chain`].
/// A witness, when given, is replayed as well.
pub fn oracle_cross_check(cs: &ChainSpec, max_len: usize, limit: usize, witness: Option<&ChainWitness>) -> Result<OracleReport> {
    let mut report = OracleReport::default();
    if let Some(w) = witness {
        let oracle = brute_force_chain(cs, &witness_scenario(w)?, OracleMode::Streaming)?;
        report.record(w.family, &w.word, replay_closed_form(cs, w)?, oracle);
    }
    let k = cs.omegas().len();
    let mut words = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        if k == 0 || words.len() >= limit {
            break;
        }
        frontier = frontier.iter().flat_map(|w| (1..=k).map(move |l| w.pushed(l))).collect();
        words.extend(frontier.iter().cloned());
    }
    words.truncate(limit);
    let run = |report: &mut OracleReport, family: Family, c: &Word, value: Scalar, sc: Scenario| -> Result<()> {
        let oracle = brute_force_chain(cs, &sc, OracleMode::Streaming)?;
        report.record(family, c, value, oracle);
        Ok(())
    };
    for c in &words {
        let labels = c.labels();
        for flip in [false, true] {
            let even = TeleportPlan::new(Direction::EvenForward, c.clone(), alternating(c.len(), flip))?;
            run(&mut report, Family::P1, c, probability_p1(cs, 0, 0, &even)?, scenario_p1(0, 0, &even)?)?;
            let odd = TeleportPlan::new(Direction::OddBackward, c.reversed(), alternating(c.len(), flip))?;
            run(&mut report, Family::P2, c, probability_p2(cs, 0, 0, &odd)?, scenario_p2(0, 0, &odd)?)?;
            if !c.is_empty() {
                let m = (c.len() - 1) / 2;
                let odd = Word::new(labels[..m].to_vec()).reversed();
                let odd = TeleportPlan::new(Direction::OddBackward, odd.clone(), alternating(odd.len(), flip))?;
                let even = Word::new(labels[m + 1..].to_vec());
                let even = TeleportPlan::new(Direction::EvenForward, even.clone(), alternating(even.len(), flip))?;
                let l = labels[m];
                run(&mut report, Family::P3, c, probability_p3(cs, l, 0, 0, &even, &odd)?, scenario_p3(l, 0, 0, &even, &odd)?)?;
            }
            let m = c.len() / 2;
            let even = Word::new(labels[..m].to_vec());
            let even = TeleportPlan::new(Direction::EvenForward, even.clone(), alternating(even.len(), flip))?;
            let odd = Word::new(labels[m..].to_vec()).reversed();
            let odd = TeleportPlan::new(Direction::OddBackward, odd.clone(), alternating(odd.len(), flip))?;
            let last = if flip { Sign::Minus } else { Sign::Plus };
            run(&mut report, Family::P4, c, probability_p4(cs, 0, 0, &even, &odd, last)?, scenario_p4(0, 0, &even, &odd, last)?)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersphere::HypersphereGpt;
    use crate::reductions::{chain_generators, chain_generators_with, safe_epsilons, pfa_chain_set};
    use crate::scalar::q;
    use crate::wordsearch::PfaInstance;

    fn spec(ms: Vec<Matrix>) -> ChainSpec {
        ChainSpec::new(chain_generators(&MatrixSet::new(ms).unwrap()).unwrap()).unwrap()
    }

    fn w(labels: &[usize]) -> Word {
        Word::new(labels.to_vec())
    }

    #[test]
    fn oracle_cross_check_is_clean() {
        let cs = spec(vec![
            Matrix::from_fracs(&[&[(1, 2), (-1, 3)], &[(2, 1), (1, 5)]]),
            Matrix::from_fracs(&[&[(0, 1), (1, 1)], &[(-3, 4), (1, 2)]]),
        ]);
        let r = oracle_cross_check(&cs, 3, 15, None).unwrap();
        assert_eq!(r.checked, 15 * 8 - 2);
        assert!(r.mismatches.is_empty());
    }

    #[test]
    fn even_channel_examples() {
        let cs = spec(vec![Matrix::diagonal(&[q(3, 4)]), Matrix::diagonal(&[q(-2, 1)])]);
        let id = even_channel(&TeleportPlan::empty(Direction::EvenForward), &cs).unwrap();
        assert_eq!(id, Transformation::identity(1));
        let one = even_channel(&TeleportPlan::plus(Direction::EvenForward, w(&[1])), &cs).unwrap();
        assert_eq!(one.scale(), &q(1, 2));
        assert_eq!(one.block(), &Matrix::diagonal(&[q(3, 4)]));
        let plan = TeleportPlan::new(Direction::EvenForward, w(&[1, 2]), vec![Sign::Plus, Sign::Minus]).unwrap();
        let two = even_channel(&plan, &cs).unwrap();
        assert_eq!(two.scale(), &q(1, 4));
        assert_eq!(two.block(), &Matrix::diagonal(&[q(3, 2)]));
        assert!(odd_channel(&plan, &cs).is_err());
    }

    #[test]
    fn odd_channel_transposes() {
        let n = Matrix::from_ints(&[&[0, 1], &[0, 0]]);
        let cs = spec(vec![n.clone(), Matrix::from_ints(&[&[1, 2], &[3, 4]])]);
        let ch = odd_channel(&TeleportPlan::plus(Direction::OddBackward, w(&[1])), &cs).unwrap();
        assert_eq!(ch.block(), &n.transpose());
        assert_eq!(ch.scale(), &q(1, 2));
        let odd = odd_channel(&TeleportPlan::plus(Direction::OddBackward, w(&[1, 2, 2])), &cs).unwrap();
        let even = even_channel(&TeleportPlan::plus(Direction::EvenForward, w(&[2, 2, 1])), &cs).unwrap();
        assert_eq!(odd.block(), &even.block().transpose());
    }

    #[test]
    fn p1_without_steps_is_effect_scale() {
        let cs = spec(vec![Matrix::identity(2)]);
        let unit = cs.set().even_effects.iter().position(Effect::is_unit).unwrap();
        let p = probability_p1(&cs, 3, unit, &TeleportPlan::empty(Direction::EvenForward)).unwrap();
        assert_eq!(p, 1);
    }

    #[test]
    fn p4_degenerate_direct_measurement() {
        let cs = spec(vec![Matrix::identity(1)]);
        // State 0 is the +axis point at full radius.
        let empty_e = TeleportPlan::empty(Direction::EvenForward);
        let empty_o = TeleportPlan::empty(Direction::OddBackward);
        let v = probability_p4(&cs, 0, 0, &empty_e, &empty_o, Sign::Minus).unwrap();
        assert_eq!(v, 0);
        let sc = scenario_p4(0, 0, &empty_e, &empty_o, Sign::Minus).unwrap();
        assert_eq!(brute_force_chain(&cs, &sc, OracleMode::Full).unwrap(), 0);
    }

    #[test]
    fn p3_swap_example() {
        let ms = MatrixSet::new(vec![Matrix::from_ints(&[&[0, 1], &[1, 0]])]).unwrap();
        let mut set = chain_generators(&ms).unwrap();
        set.even_effects = vec![Effect::new(q(1, 2), vec![q(1, 1), q(0, 1)]).unwrap(), Effect::unit(2)];
        set.even_effects.push(Effect::new(q(1, 2), vec![q(-1, 1), q(0, 1)]).unwrap());
        set.odd_effects = vec![Effect::new(q(1, 2), vec![q(0, 1), q(1, 1)]).unwrap(), Effect::unit(2)];
        set.odd_effects.push(Effect::new(q(1, 2), vec![q(0, 1), q(-1, 1)]).unwrap());
        let cs = ChainSpec::new(set).unwrap();
        let e = TeleportPlan::empty(Direction::EvenForward);
        let o = TeleportPlan::empty(Direction::OddBackward);
        let p = probability_p3(&cs, 1, 0, 0, &e, &o).unwrap();
        assert_eq!(p, q(1, 4) * Scalar::int(2));
        let sc = scenario_p3(1, 0, 0, &e, &o).unwrap();
        assert_eq!(brute_force_chain(&cs, &sc, OracleMode::Streaming).unwrap(), p);
    }

    #[test]
    fn closed_forms_match_oracle_small() {
        let cs = spec(vec![
            Matrix::from_fracs(&[&[(1, 2), (-1, 3)], &[(2, 1), (1, 5)]]),
            Matrix::from_fracs(&[&[(0, 1), (1, 1)], &[(-3, 4), (1, 2)]]),
        ]);
        let signs = [Sign::Plus, Sign::Minus];
        for (a, b) in [(1, 2), (2, 2), (2, 1)] {
            for s in signs {
                let even = TeleportPlan::new(Direction::EvenForward, w(&[a, b]), vec![s, Sign::Plus]).unwrap();
                let odd = TeleportPlan::new(Direction::OddBackward, w(&[b]), vec![s]).unwrap();
                let p1 = probability_p1(&cs, 2, 5, &even).unwrap();
                let sc = scenario_p1(2, 5, &even).unwrap();
                assert_eq!(brute_force_chain(&cs, &sc, OracleMode::Full).unwrap(), p1);
                assert_eq!(brute_force_chain(&cs, &sc, OracleMode::Streaming).unwrap(), p1);
                let odd2 = TeleportPlan::new(Direction::OddBackward, w(&[a, b]), vec![s, s]).unwrap();
                let p2 = probability_p2(&cs, 1, 4, &odd2).unwrap();
                assert_eq!(brute_force_chain(&cs, &scenario_p2(1, 4, &odd2).unwrap(), OracleMode::Full).unwrap(), p2);
                let p3 = probability_p3(&cs, a, 3, 6, &even, &odd).unwrap();
                assert_eq!(brute_force_chain(&cs, &scenario_p3(a, 3, 6, &even, &odd).unwrap(), OracleMode::Streaming).unwrap(), p3);
                let p4 = probability_p4(&cs, 0, 7, &even, &odd, s).unwrap();
                assert_eq!(brute_force_chain(&cs, &scenario_p4(0, 7, &even, &odd, s).unwrap(), OracleMode::Full).unwrap(), p4);
            }
        }
    }

    #[test]
    fn product_scenario_factorizes() {
        let cs = spec(vec![Matrix::from_fracs(&[&[(1, 2), (1, 3)], &[(1, 1), (-1, 2)]])]);
        let a = TeleportPlan::plus(Direction::EvenForward, w(&[1]));
        let b = TeleportPlan::new(Direction::EvenForward, w(&[1, 1]), vec![Sign::Minus, Sign::Plus]).unwrap();
        let sa = scenario_p1(1, 2, &a).unwrap();
        let sb = scenario_p1(3, 0, &b).unwrap();
        let joint = brute_force_chain(&cs, &sa.alongside(&sb), OracleMode::Streaming).unwrap();
        assert_eq!(joint, probability_p1(&cs, 1, 2, &a).unwrap() * probability_p1(&cs, 3, 0, &b).unwrap());
    }

    #[test]
    fn validator_rejects_bad_layouts() {
        let cs = spec(vec![Matrix::identity(1)]);
        let good = scenario_p1(0, 0, &TeleportPlan::plus(Direction::EvenForward, w(&[1]))).unwrap();
        assert!(good.validate(&cs).is_ok());
        let mut s = good.clone();
        s.window = (0, 1);
        assert!(s.validate(&cs).is_err());
        let mut s = good.clone();
        s.initial[1] = Placement::Entangled { even_site: 1, label: 1 };
        assert!(s.validate(&cs).is_err());
        let mut s = good.clone();
        s.schedule[0] = Measure::Entangled { odd_site: 2, sign: Sign::Plus };
        assert!(s.validate(&cs).is_err());
        let mut s = good;
        s.initial.pop();
        assert!(s.validate(&cs).is_err());
    }

    #[test]
    fn translation_covariance() {
        let cs = spec(vec![Matrix::from_fracs(&[&[(1, 2), (1, 3)], &[(1, 1), (-1, 2)]])]);
        let even = TeleportPlan::plus(Direction::EvenForward, w(&[1]));
        let odd = TeleportPlan::new(Direction::OddBackward, w(&[1]), vec![Sign::Minus]).unwrap();
        let sc = scenario_p4(2, 1, &even, &odd, Sign::Plus).unwrap();
        let v = brute_force_chain(&cs, &sc, OracleMode::Streaming).unwrap();
        for k in [-3, -1, 1, 5] {
            assert_eq!(brute_force_chain(&cs, &sc.translated(k), OracleMode::Streaming).unwrap(), v);
        }
    }

    #[test]
    fn diagonal_growth_scan() {
        let ms = MatrixSet::new(vec![Matrix::from_fracs(&[&[(2, 1), (0, 1)], &[(0, 1), (1, 2)]])]).unwrap();
        let half = HypersphereGpt::new(2, q(1, 2), q(1, 2)).unwrap();
        let cs = ChainSpec::new(chain_generators_with(&ms, &half, 4, 0).unwrap()).unwrap();
        let v = consistency_scan(&cs, ScanOptions::new(EnumerateOptions::new(6, 1000), 3)).unwrap();
        let Some(Witness::Chain(cw)) = v.witness() else { panic!("{v:?}") };
        assert_eq!(cw.family, Family::P4);
        assert_eq!(cw.word.len(), 3);
        assert_eq!(cw.value, step_scale(4) * (Scalar::one() - q(1, 4) * Scalar::int(8)));
        let replay = brute_force_chain(&cs, &witness_scenario(cw).unwrap(), OracleMode::Streaming).unwrap();
        assert_eq!(replay, cw.value);

        let unit = spec(ms.matrices().to_vec());
        let v = consistency_scan(&unit, ScanOptions::new(EnumerateOptions::new(6, 1000), 3)).unwrap();
        let Some(Witness::Chain(cw)) = v.witness() else { panic!("{v:?}") };
        assert_eq!((cw.family, cw.word.len()), (Family::P4, 1));
    }

    #[test]
    fn scale_does_not_change_verdicts() {
        let ms = MatrixSet::new(vec![Matrix::from_fracs(&[&[(3, 2), (1, 1)], &[(0, 1), (-1, 2)]])]).unwrap();
        let cs = spec(ms.matrices().to_vec());
        let mut opts = ScanOptions::new(EnumerateOptions::new(5, 1000), 0);
        let a = consistency_scan(&cs, opts).unwrap();
        opts.include_scale = false;
        let b = consistency_scan(&cs, opts).unwrap();
        let (Some(Witness::Chain(x)), Some(Witness::Chain(y))) = (a.witness(), b.witness()) else { panic!() };
        assert_eq!((x.family, &x.word, &x.generators, x.sign), (y.family, &y.word, &y.generators, y.sign));
    }

    #[test]
    fn stochastic_chain_certifies() {
        let ms = MatrixSet::new(vec![
            Matrix::from_fracs(&[&[(1, 2), (1, 3)], &[(1, 2), (2, 3)]]),
            Matrix::from_ints(&[&[0, 1], &[1, 0]]),
        ])
        .unwrap();
        let cert = crate::wordsearch::boundedness_certificate(&ms, 2, 100).unwrap();
        let gpt = cert.certificate().unwrap().embedding.clone().unwrap();
        let cs = ChainSpec::new(chain_generators_with(&ms, &gpt, 8, 1).unwrap()).unwrap();
        let v = consistency_scan(&cs, ScanOptions::new(EnumerateOptions::new(8, 10_000), 2)).unwrap();
        assert!(v.is_consistent(), "{v:?}");
        let scan = consistency_scan(&cs, ScanOptions::new(EnumerateOptions::new(8, 10_000), 0)).unwrap();
        assert!(scan.is_unknown());
    }

    #[test]
    fn swap_pfa_is_inconsistent_via_p1() {
        let ms = MatrixSet::new(vec![Matrix::from_ints(&[&[0, 1], &[1, 0]])]).unwrap();
        let pfa = PfaInstance::new(ms, vec![q(1, 1), q(0, 1)], vec![0, 1], q(1, 4)).unwrap();
        let se = safe_epsilons(&pfa).unwrap();
        let cs = ChainSpec::new(pfa_chain_set(&pfa, &se.epsilon, &se.epsilon_prime, 6, 0).unwrap()).unwrap();
        let v = consistency_scan(&cs, ScanOptions::new(EnumerateOptions::new(4, 1000), 2)).unwrap();
        let Some(Witness::Chain(cw)) = v.witness() else { panic!("{v:?}") };
        assert_eq!(cw.family, Family::P1);
        assert_eq!(cw.word, w(&[1]));
        assert_eq!(cw.value, q(1, 4) * (Scalar::one() - Scalar::int(4)));
    }
}
