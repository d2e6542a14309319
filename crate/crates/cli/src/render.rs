//! Human-readable reports. Every number printed is the exact rational.

use std::fmt::Write;
use std::path::Path;

use gptcheck_core::verdict::{BoundCheck, Certificate};
use gptcheck_core::{ConsistencyVerdict, Witness};

use crate::commands::{CertifyReport, ChainScanReport, CheckReport, CompileReport, Replay, ReplayReport, TelepReport, WitnessReport};

fn check_line(out: &mut String, c: &BoundCheck) {
    let status = if c.holds { "holds" } else { "fails" };
    let _ = writeln!(out, "  check {} = {} <= 1: {status}", c.name, c.lhs);
}

fn certificate(out: &mut String, c: &Certificate) {
    let norm = serde_json::to_value(c.norm).expect("serializable");
    let _ = writeln!(
        out,
        "certificate: {} norm, block length {}, block max {}, prefix max {}",
        norm.as_str().unwrap_or("?"),
        c.block_length,
        c.block_max,
        c.prefix_max
    );
    match &c.lambda {
        Some(l) => {
            let _ = writeln!(out, "  Lambda^2 = {} (Lambda = {l})", c.lambda_sq);
        }
        None => {
            let _ = writeln!(out, "  Lambda^2 = {}", c.lambda_sq);
        }
    }
    if let Some(e) = &c.embedding {
        let _ = writeln!(out, "  embedding: eps = {}, eps' = {}", e.epsilon, e.epsilon_prime);
    }
    for check in &c.checks {
        check_line(out, check);
    }
}

fn witness_line(out: &mut String, w: &Witness) {
    let _ = match w {
        Witness::CutPoint { word, acceptance, lambda } => {
            writeln!(out, "witness: word {word}, acceptance {acceptance} > lambda {lambda}")
        }
        Witness::Unbounded { word, pair, threshold } => {
            writeln!(out, "witness: word {word}, n'^T M_w n = {} > {threshold}", pair.value)
        }
        Witness::Growth { word, power, trace, dim } => writeln!(
            out,
            "witness: word {word}, |tr(M_w^{power})| = {} > {dim}, so the products of M_w are unbounded",
            trace.abs()
        ),
        Witness::Chain(c) => writeln!(
            out,
            "witness: family {:?}, word {}, generators {:?}, even steps {}, odd steps {}, sign {}, value {}",
            c.family, c.word, c.generators, c.even_steps, c.odd_steps, c.sign, c.value
        ),
    };
}

fn verdict(out: &mut String, v: &ConsistencyVerdict) {
    let _ = writeln!(out, "verdict: {}", v.tag());
    match v {
        ConsistencyVerdict::Inconsistent { witness: w } => witness_line(out, w),
        ConsistencyVerdict::Consistent { certificate: c } => certificate(out, c),
        ConsistencyVerdict::Unknown { budget } => {
            let _ = writeln!(
                out,
                "budget: {} of {} products explored, max length {}: {}",
                budget.nodes_explored, budget.max_nodes, budget.max_len, budget.note
            );
        }
    }
}

pub fn check(r: &CheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "matrix set: {} matrices of dimension {}", r.matrices, r.dim);
    verdict(&mut out, &r.result.verdict);
    if let Some(b) = &r.result.ball_witness {
        let _ = writeln!(
            out,
            "ball witness (eps = {}, eps' = {}): word {}, n'^T M_w n = {}, pairing value {}",
            r.probe.epsilon, r.probe.epsilon_prime, b.word, b.rayleigh, b.value
        );
    }
    out
}

pub fn compile(r: &CompileReport, path: &Path) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} generating set of dimension {} written to {}",
        r.kind,
        r.dim,
        path.display()
    );
    let _ = writeln!(out, "  {} states, {} effects", r.states, r.effects);
    let _ = writeln!(out, "  eps = {}, eps' = {}", r.construction.epsilon, r.construction.epsilon_prime);
    for c in &r.construction.checks {
        check_line(&mut out, c);
    }
    let _ = writeln!(out, "  cut-point effects sum to u: {}", r.cut_point_measurement);
    for (i, v) in r.validation.iter().enumerate() {
        let _ = writeln!(out, "  validation {i}: {}", if v.is_valid() { "valid" } else { "INVALID" });
    }
    out
}

pub fn witness(r: &WitnessReport) -> String {
    let mut out = String::new();
    verdict(&mut out, &r.verdict);
    if let Some(Replay::Pfa {
        gpt_value, chain_value, ..
    }) = &r.replay
    {
        let _ = writeln!(out, "gpt value: {gpt_value}");
        let _ = writeln!(out, "chain value: {chain_value}");
    }
    out
}

pub fn replay(r: &ReplayReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "replay value: {}", r.value);
    if let Some(o) = &r.oracle {
        let _ = writeln!(out, "contraction value: {o}");
    }
    let _ = writeln!(out, "byte-identical: {}", r.byte_identical);
    let _ = writeln!(out, "verified: {}", r.verified);
    out
}

pub fn chain_scan(r: &ChainScanReport) -> String {
    let mut out = String::new();
    verdict(&mut out, &r.verdict);
    if let Some(o) = &r.oracle {
        let _ = writeln!(out, "oracle: {} values cross-checked, {} mismatches", o.checked, o.mismatches.len());
        for m in &o.mismatches {
            let _ = writeln!(out, "  {:?} word {}: closed form {} vs contraction {}", m.family, m.word, m.closed_form, m.oracle);
        }
    }
    out
}

pub fn certify(r: &CertifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "matrix set: {} matrices of dimension {}", r.matrices, r.dim);
    verdict(&mut out, &r.verdict);
    out
}

pub fn telep(r: &TelepReport) -> String {
    let mut out = String::new();
    for (k, i) in r.instances.iter().enumerate() {
        let coords: Vec<String> = i.closed_form.coords().iter().map(ToString::to_string).collect();
        let _ = writeln!(
            out,
            "instance {k}: d_C = {}, d_B = {}, d_A = {}, output ({}), contraction {}",
            i.omega.rows(),
            i.omega.cols(),
            i.input.dim(),
            coords.join(", "),
            if i.equal { "agrees" } else { "DIFFERS" }
        );
    }
    let _ = writeln!(out, "{} instances, {} mismatches", r.instances.len(), r.mismatches);
    out
}
