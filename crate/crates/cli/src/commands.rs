use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use gptcheck_core::chainsim::{
    oracle_cross_check, replay_closed_form, witness_scenario, OracleMode, OracleReport,
};
use gptcheck_core::io::{from_json_str, read_json, to_json_string, write_json, Construction};
use gptcheck_core::reductions::{
    check_transformations as run_check, default_samples, ppp3_value, safe_epsilons, pfa_generating_set, pfa_chain_set,
    ChainGeneratingSet, GptValidation, TransformationCheck,
};
use gptcheck_core::verdict::{BoundCheck, ChainWitness};
use gptcheck_core::wordsearch::{boundedness_certificate, cutpoint_witness_search, EnumerateOptions};
use gptcheck_core::{
    brute_force_chain, consistency_scan, teleport_brute, teleport_channel, validate_measurement, ChainSpec,
    ConsistencyVerdict, EntangledEffect, EntangledState, GeneratingSet, GeneratingSetDocument, GptError, GptVector,
    HypersphereGpt, Matrix, MatrixSet, Measurement, PfaInstance, Scalar, ScanOptions, Sign, State, Witness, Word,
};

use crate::render;
use crate::{
    Budget, CertifyArgs, ChainScanArgs, CheckArgs, CompileArgs, Format, Output, TelepArgs, WitnessArgs, EXIT_INPUT,
    EXIT_MISMATCH, EXIT_USAGE,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(GptError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(_) => EXIT_INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<GptError> for CliError {
    fn from(e: GptError) -> Self {
        CliError::Core(e)
    }
}

type Outcome = Result<u8, CliError>;

fn emit<T: Serialize>(output: &Output, report: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
    match output.format {
        Format::Json => print!("{}", to_json_string(report)),
        Format::Text => print!("{}", text()),
    }
    if let Some(path) = &output.out {
        write_json(path, report)?;
    }
    Ok(())
}

fn exit_of(v: &ConsistencyVerdict) -> u8 {
    v.exit_code() as u8
}

fn enumerate_options(b: &Budget) -> EnumerateOptions {
    EnumerateOptions::new(b.max_len, b.budget).threads(b.threads)
}

fn parse_scalar(flag: &str, text: &str) -> Result<Scalar, CliError> {
    text.parse()
        .map_err(|_| CliError::Usage(format!("{flag}: expected a rational like 3/4, got `{text}`")))
}

fn read_value(path: &Path) -> Result<serde_json::Value, CliError> {
    Ok(read_json(path)?)
}

/// A matrix set document, or the matrices of a PFA document.
fn load_matrices(path: &Path) -> Result<MatrixSet, CliError> {
    if read_value(path)?.get("q").is_some() {
        let pfa: PfaInstance = read_json(path)?;
        Ok(pfa.matrices().clone())
    } else {
        Ok(read_json(path)?)
    }
}

fn load_chain(path: &Path) -> Result<ChainGeneratingSet, CliError> {
    let doc: GeneratingSetDocument = read_json(path)?;
    match doc.set {
        GeneratingSet::Chain(c) => Ok(c),
        GeneratingSet::Single(_) => Err(CliError::Core(GptError::InvalidInstance(format!(
            "{}: expected a chain generating set (kind \"chain\")",
            path.display()
        )))),
    }
}

#[derive(Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub dim: usize,
    pub matrices: usize,
    pub max_len: usize,
    pub budget: usize,
    pub t_max: usize,
    pub probe: HypersphereGpt,
    #[serde(flatten)]
    pub result: TransformationCheck,
}

pub fn check_transformations(a: &CheckArgs) -> Outcome {
    let ms = load_matrices(&a.input)?;
    let probe = HypersphereGpt::new(
        ms.dim(),
        parse_scalar("--epsilon", &a.epsilon)?,
        parse_scalar("--epsilon-prime", &a.epsilon_prime)?,
    )?;
    if a.t_max == 0 {
        return Err(CliError::Usage("--t-max must be at least 1".into()));
    }
    let result = run_check(&ms, enumerate_options(&a.budget), a.t_max, Some(&probe))?;
    let report = CheckReport {
        command: "check-transformations",
        dim: ms.dim(),
        matrices: ms.len(),
        max_len: a.budget.max_len,
        budget: a.budget.budget,
        t_max: a.t_max,
        probe,
        result,
    };
    emit(&a.output, &report, || render::check(&report))?;
    Ok(exit_of(&report.result.verdict))
}

#[derive(Serialize)]
pub struct CompileReport {
    pub command: &'static str,
    pub kind: &'static str,
    pub dim: usize,
    pub states: usize,
    pub effects: usize,
    pub construction: Construction,
    /// The two cut-point effects add up to the unit effect.
    pub cut_point_measurement: bool,
    pub validation: Vec<GptValidation>,
}

pub fn compile_pfa(a: &CompileArgs) -> Outcome {
    let pfa: PfaInstance = read_json(&a.input)?;
    let se = safe_epsilons(&pfa)?;
    let d = pfa.dim();
    let samples = a.samples.unwrap_or_else(|| default_samples(d));
    let (set, validation, states, effects) = if a.chain {
        let c = pfa_chain_set(&pfa, &se.epsilon, &se.epsilon_prime, samples, a.seed)?;
        let (even, odd) = c.validate()?;
        let counts = (c.even_states.len() + c.odd_states.len(), c.even_effects.len() + c.odd_effects.len());
        (GeneratingSet::Chain(c), vec![even, odd], counts.0, counts.1)
    } else {
        let s = pfa_generating_set(&pfa, &se.epsilon, &se.epsilon_prime, samples, a.seed)?;
        let v = s.validate()?;
        let counts = (s.states.len(), s.effects.len());
        (GeneratingSet::Single(s), vec![v], counts.0, counts.1)
    };
    let cut = match &set {
        GeneratingSet::Single(s) => &s.effects[..2],
        GeneratingSet::Chain(c) => &c.even_effects[..2],
    };
    let cut_point_measurement = validate_measurement(&Measurement::new(cut.to_vec())?);
    let construction = Construction {
        epsilon: se.epsilon,
        epsilon_prime: se.epsilon_prime,
        lambda: Some(pfa.lambda().clone()),
        checks: se.checks,
    };
    let doc = GeneratingSetDocument {
        set,
        construction: Some(construction.clone()),
    };
    let report = CompileReport {
        command: "compile-pfa",
        kind: if a.chain { "chain" } else { "single" },
        dim: d,
        states,
        effects,
        construction,
        cut_point_measurement,
        validation,
    };
    match &a.output.out {
        Some(path) => {
            write_json(path, &doc)?;
            match a.output.format {
                Format::Json => print!("{}", to_json_string(&report)),
                Format::Text => print!("{}", render::compile(&report, path)),
            }
        }
        None => print!("{}", to_json_string(&doc)),
    }
    Ok(0)
}

/// Self-contained record of a witness, re-verifiable without a search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Replay {
    Pfa {
        instance: PfaInstance,
        word: Word,
        acceptance: Scalar,
        lambda: Scalar,
        /// `½ (1 - acceptance / λ)`.
        gpt_value: Scalar,
        /// The same outcome in the chain set: `2^-|w|` times `gpt_value`.
        chain_value: Scalar,
    },
    Chain {
        generating_set: ChainGeneratingSet,
        witness: ChainWitness,
    },
}

impl Replay {
    fn value(&self) -> &Scalar {
        match self {
            Replay::Pfa { gpt_value, .. } => gpt_value,
            Replay::Chain { witness, .. } => &witness.value,
        }
    }
}

fn pfa_replay(pfa: &PfaInstance, word: &Word) -> Result<Replay, CliError> {
    let acceptance = gptcheck_core::acceptance(pfa, word)?;
    let gpt_value = ppp3_value(pfa, word, Sign::Minus)?;
    let chain_value = &gpt_value * &Scalar::pow2_recip(word.len());
    Ok(Replay::Pfa {
        instance: pfa.clone(),
        word: word.clone(),
        acceptance,
        lambda: pfa.lambda().clone(),
        gpt_value,
        chain_value,
    })
}

fn chain_replay(set: ChainGeneratingSet, witness: &ChainWitness) -> Result<(Replay, Scalar), CliError> {
    let cs = ChainSpec::new(set.clone())?;
    let mut w = witness.clone();
    w.value = replay_closed_form(&cs, witness)?;
    let oracle = brute_force_chain(&cs, &witness_scenario(witness)?, OracleMode::Streaming)?;
    Ok((
        Replay::Chain {
            generating_set: set,
            witness: w,
        },
        oracle,
    ))
}

#[derive(Serialize)]
pub struct WitnessReport {
    pub command: &'static str,
    pub source: &'static str,
    pub max_len: usize,
    pub budget: usize,
    #[serde(flatten)]
    pub verdict: ConsistencyVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<Replay>,
}

#[derive(Serialize)]
pub struct ReplayReport {
    pub command: &'static str,
    pub byte_identical: bool,
    pub value: Scalar,
    pub negative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Scalar>,
    pub verified: bool,
}

pub fn witness(a: &WitnessArgs) -> Outcome {
    if let Some(path) = &a.replay {
        return verify_replay(path, &a.output);
    }
    let input = a.input.as_ref().expect("clap enforces an input");
    let (Some(max_len), Some(budget)) = (a.max_len, a.budget) else {
        return Err(CliError::Usage("witness searches need --max-len and --budget".into()));
    };
    let opts = EnumerateOptions::new(max_len, budget).threads(a.threads);
    let is_generating_set = read_value(input)?.get("kind").is_some();
    let (source, verdict, replay) = if is_generating_set {
        let set = load_chain(input)?;
        let cs = ChainSpec::new(set.clone())?;
        let verdict = consistency_scan(&cs, ScanOptions::new(opts, 0))?;
        let replay = match verdict.witness() {
            Some(Witness::Chain(w)) => Some(chain_replay(set, w)?.0),
            _ => None,
        };
        ("chain", verdict, replay)
    } else {
        let pfa: PfaInstance = read_json(input)?;
        let verdict = cutpoint_witness_search(&pfa, opts)?;
        let replay = match verdict.witness() {
            Some(Witness::CutPoint { word, .. }) => Some(pfa_replay(&pfa, word)?),
            _ => None,
        };
        ("pfa", verdict, replay)
    };
    let report = WitnessReport {
        command: "witness",
        source,
        max_len,
        budget,
        verdict,
        replay,
    };
    match a.output.format {
        Format::Json => print!("{}", to_json_string(&report)),
        Format::Text => print!("{}", render::witness(&report)),
    }
    if let (Some(path), Some(replay)) = (&a.output.out, &report.replay) {
        write_json(path, replay)?;
    }
    Ok(exit_of(&report.verdict))
}

fn verify_replay(path: &Path, output: &Output) -> Outcome {
    let original = std::fs::read_to_string(path).map_err(|e| GptError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let replay: Replay = from_json_str(&original)?;
    let (rebuilt, oracle) = match &replay {
        Replay::Pfa { instance, word, .. } => (pfa_replay(instance, word)?, None),
        Replay::Chain {
            generating_set,
            witness,
        } => {
            let (r, o) = chain_replay(generating_set.clone(), witness)?;
            (r, Some(o))
        }
    };
    let byte_identical = to_json_string(&rebuilt) == original;
    let value = rebuilt.value().clone();
    let negative = value.is_negative();
    let oracle_ok = oracle.as_ref().is_none_or(|o| *o == value);
    let report = ReplayReport {
        command: "witness --replay",
        byte_identical,
        negative,
        verified: byte_identical && negative && oracle_ok,
        value,
        oracle,
    };
    match output.format {
        Format::Json => print!("{}", to_json_string(&report)),
        Format::Text => print!("{}", render::replay(&report)),
    }
    Ok(if report.verified { 1 } else { EXIT_MISMATCH })
}

#[derive(Serialize)]
pub struct ChainScanReport {
    pub command: &'static str,
    pub max_len: usize,
    pub budget: usize,
    pub t_max: usize,
    pub include_scale: bool,
    #[serde(flatten)]
    pub verdict: ConsistencyVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

/// Words cross-checked by `--oracle` besides the witness.
const ORACLE_WORDS: usize = 16;
const ORACLE_MAX_LEN: usize = 3;

pub fn chain_scan(a: &ChainScanArgs) -> Outcome {
    let cs = ChainSpec::new(load_chain(&a.input)?)?;
    let mut opts = ScanOptions::new(enumerate_options(&a.budget), a.t_max);
    opts.include_scale = !a.no_scale;
    let verdict = consistency_scan(&cs, opts)?;
    let oracle = if a.oracle {
        let w = match verdict.witness() {
            Some(Witness::Chain(w)) => Some(w),
            _ => None,
        };
        Some(oracle_cross_check(&cs, a.budget.max_len.min(ORACLE_MAX_LEN), ORACLE_WORDS, w)?)
    } else {
        None
    };
    let report = ChainScanReport {
        command: "chain-scan",
        max_len: a.budget.max_len,
        budget: a.budget.budget,
        t_max: a.t_max,
        include_scale: opts.include_scale,
        verdict,
        oracle,
    };
    emit(&a.output, &report, || render::chain_scan(&report))?;
    if report.oracle.as_ref().is_some_and(|o| !o.mismatches.is_empty()) {
        return Ok(EXIT_MISMATCH);
    }
    Ok(exit_of(&report.verdict))
}

#[derive(Serialize)]
pub struct CertifyReport {
    pub command: &'static str,
    pub dim: usize,
    pub matrices: usize,
    pub max_len: usize,
    pub budget: usize,
    #[serde(flatten)]
    pub verdict: ConsistencyVerdict,
}

pub fn certify(a: &CertifyArgs) -> Outcome {
    let ms = load_matrices(&a.input)?;
    if a.max_len == 0 {
        return Err(CliError::Usage("--max-len must be at least 1".into()));
    }
    let mut verdict = boundedness_certificate(&ms, a.max_len, a.budget)?;
    if let ConsistencyVerdict::Consistent { certificate } = &mut verdict {
        if let Some(e) = &certificate.embedding {
            let ee = &e.epsilon * &e.epsilon_prime;
            let lhs = ee.square() * &certificate.lambda_sq;
            certificate.checks.push(BoundCheck::new("(eps*eps')^2 * Lambda^2", lhs));
        }
    }
    let report = CertifyReport {
        command: "certify",
        dim: ms.dim(),
        matrices: ms.len(),
        max_len: a.max_len,
        budget: a.budget,
        verdict,
    };
    emit(&a.output, &report, || render::certify(&report))?;
    Ok(exit_of(&report.verdict))
}

#[derive(Serialize)]
pub struct TelepInstance {
    pub omega: Matrix,
    pub effect: EntangledEffect,
    pub input: State,
    pub closed_form: GptVector,
    pub contraction: GptVector,
    pub equal: bool,
}

#[derive(Serialize)]
pub struct TelepReport {
    pub command: &'static str,
    pub seed: u64,
    pub instances: Vec<TelepInstance>,
    pub mismatches: usize,
}

fn small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::new(rng.gen_range(-4..=4), rng.gen_range(1..=4))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_rows((0..rows).map(|_| (0..cols).map(|_| small_rational(rng)).collect()).collect())
        .expect("rectangular")
}

pub fn telep_demo(a: &TelepArgs) -> Outcome {
    if a.max_dim == 0 {
        return Err(CliError::Usage("--max-dim must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut instances = Vec::with_capacity(a.count);
    for _ in 0..a.count {
        let (dc, db, da) = (
            rng.gen_range(1..=a.max_dim),
            rng.gen_range(1..=a.max_dim),
            rng.gen_range(1..=a.max_dim),
        );
        let omega = random_matrix(&mut rng, dc, db);
        let p = Scalar::new(rng.gen_range(1..=4), rng.gen_range(1..=8));
        let effect = EntangledEffect::new(p, random_matrix(&mut rng, db, da))?;
        let input = State::new((0..da).map(|_| small_rational(&mut rng)).collect());
        let state = EntangledState::new(omega.clone())?;
        let closed_form = teleport_channel(&state, &effect)?.apply(&input)?;
        let contraction = teleport_brute(&state, &effect, &input)?;
        instances.push(TelepInstance {
            equal: closed_form == contraction,
            omega,
            effect,
            input,
            closed_form,
            contraction,
        });
    }
    let mismatches = instances.iter().filter(|i| !i.equal).count();
    let report = TelepReport {
        command: "telep-demo",
        seed: a.seed,
        instances,
        mismatches,
    };
    emit(&a.output, &report, || render::telep(&report))?;
    Ok(if mismatches == 0 { 0 } else { EXIT_MISMATCH })
}
