//! Acceptance criteria 1 to 9. Each test prints one PASS/FAIL line to stderr.

use std::io::Write;
use std::time::{Duration, Instant};

use strata_kit::suites::{self, SuiteReport};

const SEED: u64 = 0;
const PREC: i64 = 64;

const SR_MIN_CASES: usize = 10_000;
const SR_TIME_LIMIT: Duration = Duration::from_secs(60);
const PERTURBATIONS: usize = 1_000;
const PERTURBED_PER_TOWER: usize = 3;
const FUZZED_BETAS: usize = 1_000;
const MUTATED_FACTORIZATIONS: usize = 100;
const VALUATION_TIME_LIMIT: Duration = Duration::from_secs(120);
const MAX_N: i64 = 12;
const FUZZED_STRATA: usize = 200;
const ORACLE_N_CAP: u32 = 4;
const PSI_TRIPLES: usize = 100;
const PSI_SAMPLES: usize = 100;
const MAX_FAILURES: usize = 0;

fn report(n: u32, what: &str, ok: bool, rep: &SuiteReport, elapsed: Duration) {
    let line = format!(
        "criterion {n}: {} | {what} | cases {} | failures {} | {:.2}s",
        if ok { "PASS" } else { "FAIL" },
        rep.cases,
        rep.failures.len(),
        elapsed.as_secs_f64()
    );
    let mut err = std::io::stderr();
    let _ = writeln!(err, "{line}");
    for f in rep.failures.iter().take(5) {
        let _ = writeln!(err, "    {f}");
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

#[test]
fn criterion_1_standard_representatives() {
    let (rep, dt) = timed(|| suites::suite_sr(PREC).unwrap());
    let elements = rep.counts.get("elements").copied().unwrap_or(0);
    let ok = rep.failures.len() == MAX_FAILURES && elements >= SR_MIN_CASES && dt < SR_TIME_LIMIT;
    report(1, &format!("sr existence, uniqueness, embedding orders on {elements} elements"), ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_2_minimality_equivalence() {
    let (rep, dt) = timed(|| suites::suite_minimal(PREC, SEED, PERTURBED_PER_TOWER, PERTURBATIONS).unwrap());
    let ok = rep.failures.len() == MAX_FAILURES && rep.counts.get("perturbations").copied().unwrap_or(0) > 0;
    report(2, "three minimality criteria agree; perturbations stay minimal", ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_3_factorization_soundness() {
    let (rep, dt) = timed(|| suites::suite_factorize(SEED, FUZZED_BETAS, MUTATED_FACTORIZATIONS).unwrap());
    let all_kinds = suites::MUTATIONS
        .iter()
        .all(|(k, _)| rep.counts.get(&format!("mutation.{k}")).copied().unwrap_or(0) > 0);
    let ok = rep.failures.len() == MAX_FAILURES && all_kinds;
    report(3, "fuzzed factorizations certify; ten mutation classes rejected by clause", ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_4_valuation_differential() {
    let (rep, dt) = timed(|| suites::suite_valuation(SEED, FUZZED_BETAS).unwrap());
    let ok = rep.failures.len() == MAX_FAILURES && rep.cases > 0 && dt < VALUATION_TIME_LIMIT;
    report(4, "v_A and k_0 scaling against regular representations, [E:F] <= 4", ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_5_filtration_tables() {
    let (rep, dt) = timed(|| suites::suite_filtration(MAX_N).unwrap());
    let ok = rep.failures.len() == MAX_FAILURES && rep.cases > 0;
    report(5, "four depth modes and centralizer intersections, 0 <= n <= 12", ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_6_presentation_equality() {
    let ((rep, _), dt) = timed(|| suites::suite_presentations(SEED, FUZZED_STRATA, ORACLE_N_CAP).unwrap());
    let ok = rep.failures.len() == MAX_FAILURES && rep.counts.get("oracle_instances").copied().unwrap_or(0) > 0;
    report(6, "H1 = K+, J = K0, Jhat = K symbolically and as Lie lattices", ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_7_round_trip() {
    let (rep, dt) = timed(|| suites::suite_roundtrip(SEED, FUZZED_STRATA).unwrap());
    let ok = rep.failures.len() == MAX_FAILURES && rep.counts.get("depth_zero").copied().unwrap_or(0) > 0;
    report(7, "both round trips; realizers generic and minimal", ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_8_index_identity() {
    let ((_, rep), dt) = timed(|| suites::suite_presentations(SEED, FUZZED_STRATA, ORACLE_N_CAP).unwrap());
    let ok = rep.failures.len() == MAX_FAILURES && rep.cases > 0;
    report(8, "(J1 : H1) from lattices equals the product of jump indices", ok, &rep, dt);
    assert!(ok);
}

#[test]
fn criterion_9_psi_criterion() {
    let (rep, dt) = timed(|| suites::suite_psi(SEED, PSI_TRIPLES, PSI_SAMPLES).unwrap());
    let ok = rep.failures.len() == MAX_FAILURES && rep.cases == 2 * PSI_TRIPLES;
    report(9, "psi_c agrees iff c - c' lies in P^-i", ok, &rep, dt);
    assert!(ok);
}
