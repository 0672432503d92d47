//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line.

use std::time::{Duration, Instant};

use combdim::graph::{cdim, gamma, gamma_full, is_fundamental_in, fcdim_in, CTriple};
use combdim::linalg::DEFAULT_ENUMERATION_BUDGET as B;
use combdim::oracle::OracleConfig;
use combdim::suites::{self, SuiteReport};
use combdim::towers::{self, build, extension_check, parse_terms, truncation_purity, AdmSeq, SearchConfig};
use combdim::trivext::{AModule, Algebra, Ideal};

const SEED: u64 = 20240601;

fn verdict(id: u32, what: &str, ok: bool, started: Instant, limit: Option<Duration>, detail: &str) {
    let elapsed = started.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let limit = limit.map_or(String::new(), |l| format!(" (limit {:?})", l));
    println!(
        "criterion {:>2} {}: {} in {:.3?}{} {}",
        id,
        if ok && in_time { "PASS" } else { "FAIL" },
        what,
        elapsed,
        limit,
        detail
    );
    assert!(ok, "criterion {} failed: {}", id, detail);
    assert!(in_time, "criterion {} exceeded its time limit", id);
}

fn reports_clean(reports: &[SuiteReport]) -> (bool, String) {
    let ok = reports.iter().all(SuiteReport::passed);
    let mut detail: Vec<String> = reports.iter().map(SuiteReport::summary).collect();
    for r in reports {
        for v in r.violations.iter().take(3) {
            detail.push(format!("{} case {}: {} {}", r.name, v.case, v.detail, v.witness));
        }
    }
    (ok, detail.join("; "))
}

/// Rerun a seeded suite with more attempts until `n` cases were not skipped.
fn at_least(n: usize, run: impl Fn(usize) -> SuiteReport) -> SuiteReport {
    let mut attempts = n;
    loop {
        let r = run(attempts);
        if r.cases >= n {
            return r;
        }
        attempts += n - r.cases;
    }
}

#[test]
fn criterion_01_plane_over_f2_is_discrete() {
    let t0 = Instant::now();
    let t = CTriple::all_nonzero(AModule::semisimple(Algebra::new(2, 0).unwrap(), 2), B).unwrap();
    let whole = gamma(&t, &Ideal::Whole).unwrap();
    let zero = gamma(&t, &Ideal::Zero).unwrap();
    let ok = whole.len() == 3 && whole.graph().is_discrete() && zero.len() == 3 && zero.graph().is_discrete();
    let detail = format!("vertices {} / {}, edges {} / {}", whole.len(), zero.len(), whole.graph().edges().len(), zero.graph().edges().len());
    verdict(1, "discrete graph on the nonzero vectors of F_2^2", ok, t0, Some(Duration::from_secs(1)), &detail);
}

#[test]
fn criterion_02_free_modules_over_f2() {
    let t0 = Instant::now();
    let alg = Algebra::new(2, 2).unwrap();
    let j = alg.radical();
    let one = cdim(&AModule::free(alg, 1), &j, B).unwrap();
    let two = cdim(&AModule::free(alg, 2), &j, B).unwrap();
    let ok = one == 1 && two == 3;
    verdict(2, "cdim of A and A^2 for A = F_2 ⋉ F_2^2", ok, t0, Some(Duration::from_secs(1)), &format!("cdim A = {}, cdim A^2 = {}", one, two));
}

#[test]
fn criterion_03_tower_constructions_at_p3() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    for n in [2usize, 3] {
        let alg = Algebra::new(3, n).unwrap();
        let j = alg.radical();
        for i in 1..n {
            let level = build(&AdmSeq::new(3, n, vec![i]).unwrap()).unwrap();
            let m = &level.module;
            if !m.in_decomposition_domain(&j).unwrap() {
                failures.push(format!("n={} M_{} not in the decomposition domain", n, i));
            }
            if m.goldie_dim() != n + i {
                failures.push(format!("n={} Gdim M_{} = {}", n, i, m.goldie_dim()));
            }
            let tilde = towers::sigma_tilde(&level, B).unwrap();
            let g = gamma(&CTriple::new(m.clone(), tilde, vec![]).unwrap(), &j).unwrap();
            if !g.graph().is_complete() {
                failures.push(format!("n={} sums-of-generators graph of M_{} not complete", n, i));
            }
        }
    }
    let n = 3;
    let j = Algebra::new(3, n).unwrap().radical();
    for i in 1..=2 {
        let level = towers::m_n1_i(3, n, i).unwrap();
        let m = &level.module;
        if m.goldie_dim() != 2 * n + i - 1 {
            failures.push(format!("Gdim M_(2,{}) = {}", i, m.goldie_dim()));
        }
        let full = gamma_full(m, &j, B).unwrap();
        let pair = vec![level.sigma[0].clone(), level.sigma[2].clone()];
        let fundamental = is_fundamental_in(&full, m, &j, &pair).unwrap();
        let fc = if fundamental { fcdim_in(&full, m, &j, &pair).ok() } else { None };
        if fc != Some(1) {
            failures.push(format!(
                "M_(2,{}): pair {{a_0, a_(2,{})}} fundamental = {}, fcdim = {:?}, full graph has {} components",
                i,
                i,
                fundamental,
                fc,
                full.component_count()
            ));
        }
    }
    let detail = if failures.is_empty() { "all claims hold".to_string() } else { failures.join("; ") };
    verdict(3, "M_i and M_(n-1,i) at p = 3, n in {2, 3}", failures.is_empty(), t0, Some(Duration::from_secs(30)), &detail);
}

#[test]
fn criterion_04_characteristic_two_extension() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for base in [vec![], vec![3]] {
        let seq = AdmSeq::new(2, 4, base.clone()).unwrap();
        for i in 1..=3 {
            let c = extension_check(&seq, i).unwrap();
            detail.push(format!("{:?}+{}: orthogonal {}, in domain {}", base, i, c.orthogonal, c.in_domain));
            if i == 3 {
                ok &= c.admissible && c.orthogonal && c.in_domain;
            }
        }
    }
    verdict(4, "orthogonality for i > n/2 at p = 2, n = 4", ok, t0, None, &detail.join("; "));
}

#[test]
fn criterion_05_bound_suite() {
    let t0 = Instant::now();
    let cfg = OracleConfig { seed: SEED, ..OracleConfig::default() };
    let report = at_least(200, |k| suites::bound_suite(SEED, k, 8, &cfg).unwrap());
    let (ok, detail) = reports_clean(std::slice::from_ref(&report));
    let ok = ok && report.cases >= 200;
    verdict(5, "KS length <= fcdim <= cdim on random modules", ok, t0, Some(Duration::from_secs(300)), &format!("{}; {}", detail, report.notes.join(", ")));
}

#[test]
fn criterion_06_pure_submodules_and_direct_sums() {
    let t0 = Instant::now();
    let a = suites::pure_submodules(SEED, 100).unwrap();
    let b = at_least(100, |k| suites::direct_sum_components(SEED, k).unwrap());
    let (ok, detail) = reports_clean(&[a, b]);
    verdict(6, "complete subgraphs and component restriction", ok, t0, None, &detail);
}

#[test]
fn criterion_07_fundamental_sets_agree() {
    let t0 = Instant::now();
    let r = suites::fundamental_sets_agree(SEED, 100).unwrap();
    let notes = r.notes.join(", ");
    let (ok, detail) = reports_clean(&[r]);
    verdict(7, "fundamental sets meet the same components", ok, t0, None, &format!("{}; {}", detail, notes));
}

#[test]
fn criterion_08_categorical_operations() {
    let t0 = Instant::now();
    let reports = [
        suites::coproduct_preservation(SEED, 50).unwrap(),
        suites::chain_unions(SEED, 50).unwrap(),
        suites::chain_limits(SEED, 50).unwrap(),
        suites::product_counterexample().unwrap(),
        suites::equalizer_counterexample().unwrap(),
    ];
    let (ok, detail) = reports_clean(&reports);
    verdict(8, "coproducts and chain limits preserved, counterexamples reproduced", ok, t0, None, &detail);
}

#[test]
fn criterion_09_integer_backend() {
    let t0 = Instant::now();
    let reports = [
        suites::directed_unions(SEED, 50).unwrap(),
        suites::ideal_intersections(SEED, 100).unwrap(),
        suites::z_adjacency(SEED, 100).unwrap(),
    ];
    let (ok, detail) = reports_clean(&reports);
    verdict(9, "directed unions, ideal intersections, integer adjacency", ok, t0, None, &detail);
}

#[test]
fn criterion_10_oracle_soundness() {
    let t0 = Instant::now();
    let cfg = OracleConfig { seed: SEED, ..OracleConfig::default() };
    let r = suites::oracle_soundness(SEED, 200, &cfg).unwrap();
    let notes = r.notes.join(", ");
    let (ok, detail) = reports_clean(&[r]);
    verdict(10, "idempotents and decompositions verify", ok, t0, None, &format!("{}; {}", detail, notes));
}

#[test]
fn criterion_11_search_harness() {
    let t0 = Instant::now();
    let cfg = SearchConfig::new(3, 3, 4, 50);
    let first = towers::search(&cfg).unwrap();
    let elapsed = t0.elapsed();
    let csv = first.to_csv();
    let mut bad = Vec::new();
    for row in &first.rows {
        let terms = parse_terms(&row.seq).unwrap();
        let level = build(&AdmSeq::new(3, 3, terms.clone()).unwrap()).unwrap();
        if row.gdim != 3 + terms.iter().sum::<usize>() {
            bad.push(format!("{}: Gdim {}", row.seq, row.gdim));
        }
        if !truncation_purity(&level).unwrap() {
            bad.push(format!("{}: truncation not pure", row.seq));
        }
    }
    let rerun = towers::search(&cfg).unwrap().to_csv();
    let identical = rerun == csv;
    let ok = bad.is_empty() && identical && !first.rows.is_empty() && elapsed < Duration::from_secs(60);
    let detail = format!(
        "{} rows, search took {:.3?}, rerun identical: {}{}",
        first.rows.len(),
        elapsed,
        identical,
        if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
    );
    verdict(11, "beam search p = 3, n = 3, depth 4, beam 50", ok, t0, None, &detail);
}
