//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. All comparisons are exact (tolerance 0);
//! the only pinned tolerances are the wall-clock limits listed per line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gptcheck_core::chainsim::{
    probability_p1, probability_p2, probability_p3, probability_p4, scenario_p1, scenario_p2, scenario_p3, scenario_p4,
    Direction, OracleMode,
};
use gptcheck_core::hypersphere::HypersphereGpt;
use gptcheck_core::reductions::{ball_witness, chain_generators_with, check_transformations, ppp3_value};
use gptcheck_core::verdict::NormKind;
use gptcheck_core::wordsearch::{
    boundedness_certificate, cutpoint_witness_search, enumerate, norms, unboundedness_witness_search, Dedup,
    EnumerateOptions,
};
use gptcheck_core::{
    acceptance, brute_force_chain, compose, consistency_scan, min_pairing_value, pair, product, teleport_brute,
    teleport_channel, validate_measurement, ChainSpec, ConsistencyVerdict, Effect, EntangledEffect, EntangledState,
    GptVector, Matrix, MatrixSet, Measurement, PfaInstance, Scalar, ScanOptions, Sign, State, TeleportPlan,
    Transformation, Witness, Word,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn rational(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::new(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

fn vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Scalar> {
    (0..d).map(|_| rational(rng)).collect()
}

fn matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_rows((0..rows).map(|_| vector(rng, cols)).collect()).unwrap()
}

fn transformation(rng: &mut ChaCha8Rng, d: usize, unit: bool) -> Transformation {
    let scale = if unit {
        Scalar::one()
    } else {
        Scalar::new(rng.gen_range(1..=4), rng.gen_range(1..=4))
    };
    Transformation::new(scale, vector(rng, d), matrix(rng, d, d)).unwrap()
}

fn stochastic(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        let col: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=5)).collect();
        let total: i64 = col.iter().sum::<i64>().max(1);
        let fill = col.iter().all(|&x| x == 0);
        for (i, &x) in col.iter().enumerate() {
            let v = if fill { Scalar::new(1, d as i64) } else { Scalar::new(x, total) };
            m.set(i, j, v);
        }
    }
    m
}

fn words(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        out = out.iter().flat_map(|w| (1..=k).map(move |l| w.pushed(l))).collect();
    }
    out
}

fn sign_patterns(n: usize) -> Vec<Vec<Sign>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> i & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect()
        })
        .collect()
}

fn teleportation_identity() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 0..200 {
        let (dc, db, da) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let st = EntangledState::new(matrix(&mut rng, dc, db)).unwrap();
        let p = Scalar::new(rng.gen_range(1..=4), rng.gen_range(1..=8));
        let ef = EntangledEffect::new(p, matrix(&mut rng, db, da)).unwrap();
        let w = State::new(vector(&mut rng, da));
        let closed = teleport_channel(&st, &ef).unwrap().apply(&w).unwrap();
        let brute = teleport_brute(&st, &ef, &w).unwrap();
        ensure(closed == brute, || format!("instance {n}: {closed:?} != {brute:?}"))?;
    }
    let t = within(Duration::from_secs(10), start)?;
    Ok(format!("200 instances, exact equality, {t:.2?} < 10s"))
}

fn chain_closed_forms() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0usize;
    let instances = 100;
    for n in 0..instances {
        let d = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=2);
        let ms = MatrixSet::new((0..k).map(|_| matrix(&mut rng, d, d)).collect()).unwrap();
        let eps = Scalar::new(rng.gen_range(1..=4), 4);
        let gpt = HypersphereGpt::new(d, eps.clone(), eps).unwrap();
        let cs = ChainSpec::new(chain_generators_with(&ms, &gpt, 4, n).unwrap()).unwrap();
        let s = cs.set();
        let (ne, nee, no, noe) = (s.even_states.len(), s.even_effects.len(), s.odd_states.len(), s.odd_effects.len());
        let mut agree = |closed: Scalar, sc: gptcheck_core::Scenario, what: &str| -> Result<(), String> {
            let steps = sc.schedule.len();
            let mode = if n % 2 == 1 && steps <= 2 { OracleMode::Full } else { OracleMode::Streaming };
            let brute = brute_force_chain(&cs, &sc, mode).unwrap();
            checked += 1;
            ensure(closed == brute, || format!("instance {n} {what}: closed {closed} vs contraction {brute}"))
        };
        for total in 0..=3 {
            for signs in sign_patterns(total) {
                for w in words(k, total) {
                    let (i, j) = (rng.gen_range(0..ne), rng.gen_range(0..nee));
                    let plan = TeleportPlan::new(Direction::EvenForward, w.clone(), signs.clone()).unwrap();
                    agree(probability_p1(&cs, i, j, &plan).unwrap(), scenario_p1(i, j, &plan).unwrap(), "P1")?;
                    let (i, j) = (rng.gen_range(0..no), rng.gen_range(0..noe));
                    let plan = TeleportPlan::new(Direction::OddBackward, w.clone(), signs.clone()).unwrap();
                    agree(probability_p2(&cs, i, j, &plan).unwrap(), scenario_p2(i, j, &plan).unwrap(), "P2")?;
                }
                for l1 in 0..=total {
                    let l2 = total - l1;
                    for we in words(k, l1) {
                        for wo in words(k, l2) {
                            let even = TeleportPlan::new(Direction::EvenForward, we.clone(), signs[..l1].to_vec()).unwrap();
                            let odd = TeleportPlan::new(Direction::OddBackward, wo.clone(), signs[l1..].to_vec()).unwrap();
                            for l in 1..=k {
                                let (j, jo) = (rng.gen_range(0..nee), rng.gen_range(0..noe));
                                let closed = probability_p3(&cs, l, j, jo, &even, &odd).unwrap();
                                agree(closed, scenario_p3(l, j, jo, &even, &odd).unwrap(), "P3")?;
                            }
                            for last in [Sign::Plus, Sign::Minus] {
                                let (i, io) = (rng.gen_range(0..ne), rng.gen_range(0..no));
                                let closed = probability_p4(&cs, i, io, &even, &odd, last).unwrap();
                                agree(closed, scenario_p4(i, io, &even, &odd, last).unwrap(), "P4")?;
                            }
                        }
                    }
                }
            }
        }
    }
    let t = within(Duration::from_secs(60), start)?;
    Ok(format!(
        "{instances} instances, {checked} plans with at most 3 steps, both signs, exact equality, {t:.2?} < 60s"
    ))
}

fn hypersphere_boundary() -> Check {
    for d in 1..=3 {
        let g = HypersphereGpt::new(d, Scalar::one(), Scalar::one()).unwrap();
        let m = min_pairing_value(&g, &Matrix::identity(d), &Scalar::zero()).unwrap();
        ensure(m.witness_value == 0 && m.lower_bound == 0, || format!("d={d}: minimum {} not 0", m.witness_value))?;
        let antipodal = m.effect.bloch().iter().zip(m.state.bloch()).all(|(a, b)| *a == -b);
        ensure(antipodal, || format!("d={d}: witness is not antipodal"))?;
        ensure(pair(&m.effect, &m.state).unwrap() == 0, || "pairing recomputation".into())?;

        let g = HypersphereGpt::new(d, Scalar::new(11, 10), Scalar::one()).unwrap();
        let m = min_pairing_value(&g, &Matrix::identity(d), &Scalar::zero()).unwrap();
        let value = pair(&m.effect, &m.state).unwrap();
        ensure(value == m.witness_value, || "pairing recomputation".into())?;
        ensure(g.contains_state(&m.state) && g.contains_effect(&m.effect), || "witness outside the balls".into())?;
        ensure(value <= Scalar::new(-1, 20), || format!("d={d}: value {value} > -1/20"))?;
    }
    Ok("eps*eps' = 1: minimum exactly 0 at antipodal points; eps*eps' = 11/10: witness value -1/20 < 0 (d = 1..3)".into())
}

fn swap_pfa(lambda: Scalar) -> PfaInstance {
    let ms = MatrixSet::new(vec![Matrix::from_ints(&[&[0, 1], &[1, 0]])]).unwrap();
    PfaInstance::new(ms, vec![Scalar::one(), Scalar::zero()], vec![0, 1], lambda).unwrap()
}

fn reduction_soundness() -> Check {
    let lambda = Scalar::new(1, 4);
    let pfa = swap_pfa(lambda.clone());
    let mut checked = 0;
    for len in 0..=8 {
        for w in words(1, len) {
            let above = acceptance(&pfa, &w).unwrap() > lambda;
            let negative = ppp3_value(&pfa, &w, Sign::Minus).unwrap().is_negative();
            ensure(above == negative, || format!("word {w}: acceptance above cut point {above}, negative {negative}"))?;
            checked += 1;
        }
    }
    let one = Word::new(vec![1]);
    ensure(acceptance(&pfa, &one).unwrap() == 1, || "acceptance of 1".into())?;
    let v = ppp3_value(&pfa, &one, Sign::Minus).unwrap();
    ensure(v == Scalar::new(-3, 2), || format!("value of 1 is {v}"))?;
    let found = cutpoint_witness_search(&pfa, EnumerateOptions::new(8, 100)).unwrap();
    ensure(found.witness().map(Witness::word) == Some(&one), || format!("search returned {found:?}"))?;
    Ok(format!("{checked} words: acceptance > 1/4 iff value < 0; word 1 has acceptance 1 and value -3/2"))
}

/// Sampled extreme points per ball list in the exhaustive chain scan.
const SCAN_SAMPLES: usize = 4;

fn certificate_soundness() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut scanned = 0usize;
    for d in 1..=9usize {
        let ms = MatrixSet::new(vec![stochastic(&mut rng, d), stochastic(&mut rng, d)]).unwrap();
        let dd = Scalar::int(d as i64);
        let v = boundedness_certificate(&ms, 3, 1000).unwrap();
        let c = v.certificate().ok_or_else(|| format!("d={d}: no certificate"))?;
        ensure(c.block_length == 1 && c.norm == NormKind::Induced1 && c.lambda_sq == dd, || {
            format!("d={d}: t={} norm {:?} Lambda^2={}", c.block_length, c.norm, c.lambda_sq)
        })?;
        let gpt = c.embedding.clone().ok_or("no embedding")?;
        let ee = &gpt.epsilon * &gpt.epsilon_prime;
        ensure(ee.square() * &dd <= Scalar::one(), || format!("d={d}: (eps eps')^2 Lambda^2 > 1"))?;

        let opts = EnumerateOptions::new(10, 4096).threads(4);
        let check = check_transformations(&ms, opts, 3, None).unwrap();
        let cc = check.verdict.certificate().ok_or_else(|| format!("d={d}: transformations not certified"))?;
        ensure(!cc.checks.is_empty() && cc.checks.iter().all(|x| x.holds), || format!("d={d}: checks {:?}", cc.checks))?;

        let cs = ChainSpec::new(chain_generators_with(&ms, &gpt, SCAN_SAMPLES, d as u64).unwrap()).unwrap();
        let v = consistency_scan(&cs, ScanOptions::new(opts, 3)).unwrap();
        let cc = v.certificate().ok_or_else(|| format!("d={d}: chain not certified: {}", v.tag()))?;
        ensure(cc.checks.iter().all(|x| x.holds), || format!("d={d}: chain checks {:?}", cc.checks))?;

        let mut forced = ScanOptions::new(opts, 0);
        forced.include_scale = false;
        match consistency_scan(&cs, forced).unwrap() {
            ConsistencyVerdict::Unknown { budget } => {
                ensure(!budget.node_budget_exhausted, || format!("d={d}: scan incomplete: {}", budget.note))?;
                scanned += budget.nodes_explored;
            }
            other => return Err(format!("d={d}: scan found {other:?}")),
        }
    }
    let t = start.elapsed();
    Ok(format!(
        "d = 1..9: t = 1, induced_1, Lambda^2 = d; transformations and chain certified; \
         exhaustive scan to length 10 ({scanned} products, {SCAN_SAMPLES} ball samples per list) has no negative value; {t:.2?}"
    ))
}

fn unboundedness_witness() -> Check {
    let ms = MatrixSet::new(vec![Matrix::diagonal(&[Scalar::int(2), Scalar::new(1, 2)])]).unwrap();
    let v = unboundedness_witness_search(&ms, &Scalar::int(4), EnumerateOptions::new(8, 100)).unwrap();
    let Some(Witness::Unbounded { word, pair: rp, .. }) = v.witness() else {
        return Err(format!("no witness: {v:?}"));
    };
    ensure(word.len() == 3 && rp.value == 8, || format!("word {word}, value {}", rp.value))?;
    ensure(rp.verify(&product(&ms, word).unwrap()).unwrap(), || "Rayleigh value does not re-verify".into())?;

    let half = Scalar::half();
    let gpt = HypersphereGpt::new(2, half.clone(), half.clone()).unwrap();
    let bw = ball_witness(&ms, &gpt, &half, word, rp).unwrap();
    let formula = &half * (Scalar::one() - &gpt.epsilon * &gpt.epsilon_prime * &rp.value);
    ensure(bw.value == formula && bw.value.is_negative(), || format!("pairing {} vs formula {formula}", bw.value))?;
    ensure(gpt.contains_state(&bw.state) && gpt.contains_effect(&bw.effect), || "witness outside the balls".into())?;
    let check = check_transformations(&ms, EnumerateOptions::new(8, 100), 3, Some(&gpt)).unwrap();
    ensure(check.verdict.is_inconsistent(), || "transformations not refuted".into())?;
    ensure(check.ball_witness.as_ref().map(|b| &b.value) == Some(&formula), || "check_transformations witness".into())?;
    Ok(format!("word {word}, Rayleigh value 8 > 4; pairing p(1 - eps eps' 8) = {formula} at eps = eps' = 1/2"))
}

fn determinism_and_performance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut entry = |_| Scalar::new(rng.gen_range(-2..=2), rng.gen_range(1..=3));
    let ms = MatrixSet::new(
        (0..2)
            .map(|_| Matrix::from_rows((0..4).map(|_| (0..4).map(&mut entry).collect()).collect()).unwrap())
            .collect(),
    )
    .unwrap();
    let opts = EnumerateOptions::new(16, 1 << 18).dedup(Dedup::Exact);
    let start = Instant::now();
    let one = enumerate(&ms, opts).unwrap();
    let t1 = within(Duration::from_secs(60), start)?;
    let start = Instant::now();
    let eight = enumerate(&ms, opts.threads(8)).unwrap();
    let t8 = within(Duration::from_secs(60), start)?;
    ensure(one.report.complete_length == Some(16), || format!("incomplete: {}", one.report.note))?;
    ensure(one.nodes == eight.nodes, || "outputs differ between 1 and 8 threads".into())?;
    Ok(format!(
        "k = 2, d = 4, length <= 16: {} products, identical for 1 and 8 threads ({t1:.2?}, {t8:.2?}; limit 60s each)",
        one.nodes.len()
    ))
}

fn algebraic_invariants() -> Check {
    const N: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 0..N {
        let d = rng.gen_range(1..=3);
        let (a, b, c) = (
            transformation(&mut rng, d, false),
            transformation(&mut rng, d, false),
            transformation(&mut rng, d, false),
        );
        let ba = compose(&b, &a).unwrap();
        ensure(ba.to_matrix() == b.to_matrix().mul(&a.to_matrix()).unwrap(), || format!("block law, instance {n}"))?;
        let left = compose(&c, &ba).unwrap();
        let right = compose(&compose(&c, &b).unwrap(), &a).unwrap();
        ensure(left == right, || format!("associativity, instance {n}"))?;

        let (u1, u2) = (transformation(&mut rng, d, true), transformation(&mut rng, d, true));
        let u = GptVector::unit(d);
        let uu = compose(&u2, &u1).unwrap();
        ensure(uu.preserves_unit() && uu.dual_apply(&u).unwrap() == u, || format!("unit closure, instance {n}"))?;

        let w = State::new(vector(&mut rng, d));
        let f = vector(&mut rng, d);
        let e = Effect::new(Scalar::half(), f).unwrap();
        let m = Measurement::new(vec![e.clone(), e.mirrored()]).unwrap();
        let total = m.outcomes(&w).unwrap().into_iter().fold(Scalar::zero(), |x, y| x + y);
        ensure(validate_measurement(&m) && total == 1, || format!("measurement sum, instance {n}"))?;

        let sd = rng.gen_range(1..=4);
        let ss = MatrixSet::new(vec![stochastic(&mut rng, sd), stochastic(&mut rng, sd)]).unwrap();
        let len = rng.gen_range(0..=6);
        let word = Word::new((0..len).map(|_| rng.gen_range(1..=2)).collect());
        let p = product(&ss, &word).unwrap();
        let q = stochastic(&mut rng, sd).column(0);
        let mq = p.mul_vec(&q).unwrap();
        let sum = mq.iter().fold(Scalar::zero(), |x, y| x + y);
        ensure(p.is_column_stochastic() && sum == 1 && mq.iter().all(|x| !x.is_negative()), || {
            format!("stochastic closure, instance {n}")
        })?;

        let (x, y) = (matrix(&mut rng, d, d), matrix(&mut rng, d, d));
        let (nx, ny, nxy) = (norms(&x).unwrap(), norms(&y).unwrap(), norms(&x.mul(&y).unwrap()).unwrap());
        ensure(nxy.frobenius_sq <= &nx.frobenius_sq * &ny.frobenius_sq, || format!("Frobenius, instance {n}"))?;
        ensure(nxy.induced_1 <= &nx.induced_1 * &ny.induced_1, || format!("induced 1-norm, instance {n}"))?;
        ensure(nxy.induced_inf <= &nx.induced_inf * &ny.induced_inf, || format!("induced inf-norm, instance {n}"))?;
    }
    Ok(format!(
        "{N} instances each: block law, associativity, unit closure, measurement sum, stochastic closure, \
         sub-multiplicativity (Frobenius, induced 1, induced inf); 0 failures"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("teleportation identity", teleportation_identity),
        ("chain closed forms", chain_closed_forms),
        ("hypersphere boundary", hypersphere_boundary),
        ("reduction soundness", reduction_soundness),
        ("certificate soundness", certificate_soundness),
        ("unboundedness witness", unboundedness_witness),
        ("determinism and performance", determinism_and_performance),
        ("algebraic invariants", algebraic_invariants),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
