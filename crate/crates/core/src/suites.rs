//! Seeded randomized checks of the structural lemmas, shared by the command
//! line and the test suites. Each check returns a [`SuiteReport`]; every
//! violation carries a serialized witness that is enough to replay it.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    coordinates_in, fcdim_in, gamma, gamma_full, gamma_map, graph_coproduct, graph_equalizer, graph_product, is_fundamental_in,
    is_isomorphism, keyed_union, push_forward, sigma_components, triple_chain_limit, triple_coproduct, triple_equalizer,
    triple_product, CTriple, CycGraph, Graph,
};
use crate::linalg::{count_vectors, Field, FpMatrix, Subspace, DEFAULT_ENUMERATION_BUDGET};
use crate::oracle::{
    end_algebra, find_idempotent, ks_decompose, naive_stable_power, stable_power, verify_decomposition,
    verify_idempotent, IdempotentOutcome, OracleConfig,
};
use crate::towers::{build, truncation_embedding, AdmSeq};
use crate::trivext::{AModule, Algebra, Ideal};
use crate::zdomain::{
    gamma_z, directed_union_check_socle, directed_union_check_z, intersection_report, proportional, witness_bound, witness_search,
    PrincIdeal, ZTriple,
};

/// Names accepted by [`run_check`].
pub const CHECKS: [&str; 12] = [
    "2.4",
    "2.8",
    "2.10",
    "3.2",
    "5.3",
    "5.4",
    "5.5",
    "6.3-chain",
    "7.1",
    "7.2",
    "product-counterexample",
    "equalizer-counterexample",
];

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub case: usize,
    pub detail: String,
    /// JSON sufficient to replay the failing instance.
    pub witness: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub skipped: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, case: usize, detail: impl Into<String>, witness: String) {
        self.violations.push(Violation { case, detail: detail.into(), witness });
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} cases, {} skipped, {} violations",
            self.name,
            self.cases,
            self.skipped,
            self.violations.len()
        )
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_vector(rng: &mut impl Rng, p: u32, len: usize) -> Vec<u32> {
    (0..len).map(|_| rng.gen_range(0..p)).collect()
}

pub fn random_nonzero(rng: &mut impl Rng, p: u32, len: usize) -> Vec<u32> {
    loop {
        let v = random_vector(rng, p, len);
        if v.iter().any(|&c| c != 0) {
            return v;
        }
    }
}

pub fn random_matrix(rng: &mut impl Rng, field: Field, rows: usize, cols: usize) -> FpMatrix {
    FpMatrix::new(field.p(), rows, cols, random_vector(rng, field.p(), rows * cols)).expect("reduced entries")
}

/// Random module with `g` generators over a socle of dimension `socle`.
pub fn random_presentation(rng: &mut impl Rng, alg: Algebra, g: usize, socle: usize) -> AModule {
    let maps: Vec<FpMatrix> = (0..g).map(|_| random_matrix(rng, alg.field(), socle, alg.n())).collect();
    AModule::presentation(alg, g, socle, &maps).expect("consistent shapes")
}

/// Random presentation module of dimension at most `max_d` lying in
/// `𝔇(Soc A)`, found by rejection; sometimes a direct sum of two such.
pub fn random_domain_module(rng: &mut impl Rng, p: u32, max_d: usize) -> Option<AModule> {
    if max_d >= 4 && rng.gen_bool(0.3) {
        let split = rng.gen_range(2..=max_d - 2);
        let n = rng.gen_range(1..=2);
        let a = random_domain_module_n(rng, p, n, split)?;
        let b = random_domain_module_n(rng, p, n, max_d - split)?;
        return Some(a.direct_sum(&b).expect("same algebra"));
    }
    let n = rng.gen_range(1..=2);
    random_domain_module_n(rng, p, n, max_d)
}

fn random_domain_module_n(rng: &mut impl Rng, p: u32, n: usize, max_d: usize) -> Option<AModule> {
    let alg = Algebra::new(p, n).expect("prime");
    let j = alg.radical();
    for _ in 0..64 {
        let g = rng.gen_range(1..=((max_d - 1).min(3)));
        let socle = rng.gen_range(1..=(max_d - g));
        let m = random_presentation(rng, alg, g, socle);
        if m.in_decomposition_domain(&j).unwrap_or(false) {
            return Some(m);
        }
    }
    None
}

fn module_witness(m: &AModule) -> String {
    m.to_json()
}

fn json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable witness")
}

/// Candidate fundamental sets: the marked generators and random generating
/// sets of minimal size drawn from `M ∖ IM`.
fn candidate_sets(rng: &mut impl Rng, m: &AModule, im: &Subspace, tries: usize) -> Result<Vec<Vec<Vec<u32>>>> {
    let mut out = Vec::new();
    let gens = m.generators();
    if !gens.is_empty() && m.generated(&gens)?.is_full() && gens.iter().all(|x| !im.contains(x)) {
        out.push(gens);
    }
    let top = m.dim() - im.dim();
    for _ in 0..tries {
        let mut set = Vec::new();
        while set.len() < top {
            let x = random_nonzero(rng, m.p(), m.dim());
            if !im.contains(&x) {
                set.push(x);
            }
        }
        if m.generated(&set)?.is_full() {
            out.push(set);
        }
    }
    Ok(out)
}

/// `KSℓ ≤ cdim`, and `KSℓ ≤ fcdim ≤ cdim` where a fundamental set is found.
pub fn bound_suite(seed: u64, cases: usize, max_d: usize, oracle: &OracleConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("bounds");
    let mut certain = 0;
    let mut with_fundamental = 0;
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let Some(m) = random_domain_module(&mut rng, p, max_d) else {
            report.skipped += 1;
            continue;
        };
        report.cases += 1;
        let j = m.algebra().radical();
        let full = gamma_full(&m, &j, DEFAULT_ENUMERATION_BUDGET)?;
        let cdim = full.component_count();
        let cfg = OracleConfig { seed: seed ^ case as u64, ..*oracle };
        let ks = ks_decompose(&m, &cfg).ks_length();
        if !ks.certain {
            continue;
        }
        certain += 1;
        if ks.length > cdim {
            report.fail(case, format!("KSℓ = {} > cdim = {}", ks.length, cdim), module_witness(&m));
        }
        let im = m.ideal_module(&j)?;
        for sigma in candidate_sets(&mut rng, &m, &im, 4)? {
            if is_fundamental_in(&full, &m, &j, &sigma)? {
                with_fundamental += 1;
                let fc = fcdim_in(&full, &m, &j, &sigma)?;
                if !(ks.length <= fc && fc <= cdim) {
                    report.fail(
                        case,
                        format!("KSℓ = {}, fcdim = {}, cdim = {}", ks.length, fc, cdim),
                        json(&(m.to_doc(), &sigma)),
                    );
                }
                break;
            }
        }
    }
    report.notes.push(format!("{} modules with certain KSℓ", certain));
    report.notes.push(format!("{} modules with a fundamental set", with_fundamental));
    Ok(report)
}

fn embedded_graph(m: &AModule, ideal: &Ideal, sub: &Subspace) -> Result<CycGraph> {
    let (n, e) = m.restrict(sub)?;
    let g = gamma_full(&n, ideal, DEFAULT_ENUMERATION_BUDGET)?;
    Ok(push_forward(&g, &e))
}

/// Whether `small` sits inside `big` as an induced subgraph (keys compared as
/// subspaces of the same ambient module).
fn is_complete_subgraph(small: &CycGraph, big: &CycGraph) -> bool {
    let Some(map): Option<Vec<usize>> = small.vertices().iter().map(|v| big.index_of(&v.space)).collect() else {
        return false;
    };
    (0..small.len()).tuple_combinations().all(|(a, b)| small.graph().adjacent(a, b) == big.graph().adjacent(map[a], map[b]))
}

/// Pure submodules of members of `𝔇(I)` are members and their graphs are
/// complete subgraphs.
pub fn pure_submodules(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("2.4");
    let mut case = 0;
    let mut stream = 0u64;
    while report.cases < cases && stream < 20 * cases as u64 {
        let mut rng = rng_for(seed, stream);
        stream += 1;
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let Some(m) = random_domain_module(&mut rng, p, 7) else { continue };
        let j = m.algebra().radical();
        // A direct summand half the time, otherwise a random submodule that
        // happens to be pure.
        let n = if rng.gen_bool(0.5) && m.generator_marks().len() > 1 {
            let k = m.generator_marks().len();
            let pick = rng.gen_range(0..k);
            let x = m.unit(m.generator_marks()[pick]);
            m.generated(&[x])?
        } else {
            let count = rng.gen_range(1..=2);
            let xs: Vec<Vec<u32>> = (0..count).map(|_| random_nonzero(&mut rng, p, m.dim())).collect();
            m.generated(&xs)?
        };
        if !m.is_pure(&n, &j)? {
            continue;
        }
        report.cases += 1;
        let (sub, _) = m.restrict(&n)?;
        let witness = || json(&(m.to_doc(), n.basis_vectors()));
        if !sub.in_decomposition_domain(&j)? {
            report.fail(case, "pure submodule left the decomposition domain", witness());
        }
        let big = gamma_full(&m, &j, DEFAULT_ENUMERATION_BUDGET)?;
        let small = embedded_graph(&m, &j, &n)?;
        if !is_complete_subgraph(&small, &big) {
            report.fail(case, "graph of the pure submodule is not a complete subgraph", witness());
        }
        case += 1;
    }
    Ok(report)
}

/// For `M = A ⊕ B`, two vertices of `Γ(A)` share a component of `Γ(M)` iff
/// they share one of `Γ(A)`.
pub fn direct_sum_components(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("2.8");
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let n = rng.gen_range(1..=2);
        let (Some(a), Some(b)) = (random_domain_module_n(&mut rng, p, n, 4), random_domain_module_n(&mut rng, p, n, 3))
        else {
            report.skipped += 1;
            continue;
        };
        report.cases += 1;
        let m = a.direct_sum(&b)?;
        let j = m.algebra().radical();
        let f = m.field();
        let units: Vec<Vec<u32>> = (0..a.dim()).map(|k| m.unit(k)).collect();
        let a_space = Subspace::span(f, m.dim(), &units)?;
        let big = gamma_full(&m, &j, DEFAULT_ENUMERATION_BUDGET)?;
        let small = embedded_graph(&m, &j, &a_space)?;
        let big_ids = big.graph().component_ids();
        let small_ids = small.graph().component_ids();
        let map: Vec<usize> = small.vertices().iter().map(|v| big.index_of(&v.space).expect("vertex of Γ(A)")).collect();
        let bad = (0..small.len())
            .tuple_combinations()
            .find(|&(x, y)| (small_ids[x] == small_ids[y]) != (big_ids[map[x]] == big_ids[map[y]]));
        if let Some((x, y)) = bad {
            report.fail(
                case,
                format!("vertices {} and {} of Γ(A) disagree on components", x, y),
                json(&(a.to_doc(), b.to_doc())),
            );
        }
    }
    Ok(report)
}

/// Fundamental sets of one module meet the same components.
pub fn fundamental_sets_agree(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("2.10");
    let mut pairs = 0;
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let Some(m) = random_domain_module(&mut rng, p, 7) else {
            report.skipped += 1;
            continue;
        };
        report.cases += 1;
        let j = m.algebra().radical();
        let full = gamma_full(&m, &j, DEFAULT_ENUMERATION_BUDGET)?;
        let im = m.ideal_module(&j)?;
        let mut found: Vec<(Vec<Vec<u32>>, BTreeSet<usize>)> = Vec::new();
        for sigma in candidate_sets(&mut rng, &m, &im, 6)? {
            if is_fundamental_in(&full, &m, &j, &sigma)? {
                let comps = sigma_components(&full, &m, &sigma).expect("Σ avoids IM");
                found.push((sigma, comps.into_iter().collect()));
            }
        }
        if found.len() >= 2 {
            pairs += 1;
        }
        if let Some((s, t)) = found.iter().tuple_combinations().find(|(s, t)| s.1 != t.1) {
            report.fail(case, "fundamental sets meet different components", json(&(m.to_doc(), &s.0, &t.0)));
        }
    }
    report.notes.push(format!("{} modules with at least two fundamental sets", pairs));
    Ok(report)
}

/// `𝔇(I)` is closed under direct sums and under quotients by submodules `N`
/// with `(I∗M) ∩ N = 0`.
pub fn domain_closure(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("3.2");
    let mut quotients = 0;
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let n = rng.gen_range(1..=2);
        let (Some(a), Some(b)) = (random_domain_module_n(&mut rng, p, n, 5), random_domain_module_n(&mut rng, p, n, 5))
        else {
            report.skipped += 1;
            continue;
        };
        report.cases += 1;
        let j = a.algebra().radical();
        let m = a.direct_sum(&b)?;
        if !m.in_decomposition_domain(&j)? {
            report.fail(case, "direct sum left the decomposition domain", json(&(a.to_doc(), b.to_doc())));
        }
        let soc = m.socle();
        for _ in 0..4 {
            let k = rng.gen_range(1..=soc.dim().min(2));
            let coeffs: Vec<Vec<u32>> = (0..k).map(|_| random_vector(&mut rng, p, soc.dim())).collect();
            let basis = soc.basis_vectors();
            let vs: Vec<Vec<u32>> = coeffs
                .iter()
                .map(|c| {
                    let mut v = vec![0; m.dim()];
                    for (ci, bv) in c.iter().zip(&basis) {
                        m.field().axpy(&mut v, *ci, bv);
                    }
                    v
                })
                .collect();
            let sub = Subspace::span(m.field(), m.dim(), &vs)?;
            if sub.is_zero() || !m.star_meets_trivially(&j, &sub)? {
                continue;
            }
            quotients += 1;
            let q = m.quotient(&sub)?;
            if !q.module.in_decomposition_domain(&j)? {
                report.fail(case, "quotient left the decomposition domain", json(&(m.to_doc(), sub.basis_vectors())));
            }
        }
    }
    report.notes.push(format!("{} quotients checked", quotients));
    Ok(report)
}

/// Small random triple over a random small module.
fn random_triple(rng: &mut impl Rng, alg: Algebra, max_d: usize) -> CTriple {
    let g = rng.gen_range(1..=2);
    let socle = rng.gen_range(0..=(max_d - g));
    let m = random_presentation(rng, alg, g, socle);
    let count = rng.gen_range(1..=4);
    let mut sigma: Vec<Vec<u32>> = Vec::new();
    for _ in 0..count {
        let x = random_nonzero(rng, alg.p(), m.dim());
        if !sigma.contains(&x) {
            sigma.push(x);
        }
    }
    let sigma_prime = sigma.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
    CTriple::new(m, sigma, sigma_prime).expect("valid triple")
}

fn triple_witness(ts: &[&CTriple]) -> String {
    let docs: Vec<_> = ts.iter().map(|t| (t.module.to_doc(), &t.sigma, &t.sigma_prime)).collect();
    json(&docs)
}

fn random_ideal(rng: &mut impl Rng, alg: Algebra) -> Ideal {
    let f = alg.field();
    match rng.gen_range(0..4) {
        0 => Ideal::Zero,
        1 => Ideal::Whole,
        _ => {
            let v = random_nonzero(rng, alg.p(), alg.n());
            Ideal::soc_sub(Subspace::span(f, alg.n(), &[v]).expect("shape"))
        }
    }
}

/// `Γ_I` of a coproduct is the coproduct of the graphs, via the canonical
/// vertex correspondence.
pub fn coproduct_preservation(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("5.5");
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let alg = Algebra::new(p, rng.gen_range(1..=2))?;
        let k = rng.gen_range(1..=3);
        let ts: Vec<CTriple> = (0..k).map(|_| random_triple(&mut rng, alg, 4)).collect();
        let ideal = random_ideal(&mut rng, alg);
        report.cases += 1;
        let parts: Vec<CycGraph> = ts.iter().map(|t| gamma(t, &ideal)).collect::<Result<_>>()?;
        let coproduct = graph_coproduct(&parts.iter().map(|g| g.graph()).collect::<Vec<_>>());
        let whole = gamma(&triple_coproduct(&ts)?, &ideal)?;
        let mut offsets = vec![0];
        let mut vert_offsets = vec![0];
        for (t, g) in ts.iter().zip(&parts) {
            offsets.push(offsets.last().unwrap() + t.module.dim());
            vert_offsets.push(vert_offsets.last().unwrap() + g.len());
        }
        let map: Vec<usize> = whole
            .vertices()
            .iter()
            .map(|v| {
                let block = (0..ts.len()).find(|&b| v.rep[offsets[b]..offsets[b + 1]].iter().any(|&c| c != 0)).expect("nonzero");
                let x = &v.rep[offsets[block]..offsets[block + 1]];
                let space = ts[block].module.cyclic_space(x);
                vert_offsets[block] + parts[block].index_of(&space).expect("vertex of the factor")
            })
            .collect();
        if !is_isomorphism(whole.graph(), &coproduct, &map) {
            let refs: Vec<&CTriple> = ts.iter().collect();
            report.fail(case, format!("coproduct not preserved for {:?}", ideal), triple_witness(&refs));
        }
    }
    Ok(report)
}

fn canonical(g: &CycGraph) -> (Vec<Subspace>, Graph) {
    let keys = g.keys();
    keyed_union(&[(keys.as_slice(), g.graph())])
}

/// A random increasing chain of submodules `M_1 ≤ M_2 ≤ M_3 = M` with
/// increasing `Σ_k ⊆ M_k`, as triples in their own bases, with the chain maps.
fn random_chain(rng: &mut impl Rng, alg: Algebra) -> Result<(AModule, Vec<Subspace>, Vec<CTriple>, Vec<FpMatrix>)> {
    let (g, socle) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let m = random_presentation(rng, alg, g, socle);
    let p = alg.p();
    let f = alg.field();
    let gens: Vec<Vec<u32>> = (0..3).map(|_| random_nonzero(rng, p, m.dim())).collect();
    let mut spaces = Vec::new();
    for k in 1..=3 {
        spaces.push(m.generated(&gens[..k])?);
    }
    let mut sigma: Vec<Vec<u32>> = Vec::new();
    let mut sigma_prime: Vec<Vec<u32>> = Vec::new();
    let mut triples = Vec::new();
    for space in &spaces {
        let elems: Vec<Vec<u32>> = space.enumerate(DEFAULT_ENUMERATION_BUDGET)?.into_iter().filter(|x| x.iter().any(|&c| c != 0)).collect();
        for _ in 0..2 {
            let x = elems.choose(rng).expect("nonzero submodule").clone();
            if !sigma.contains(&x) {
                if rng.gen_bool(0.3) {
                    sigma_prime.push(x.clone());
                }
                sigma.push(x);
            }
        }
        let (sub, _) = m.restrict(space)?;
        let local = |s: &[Vec<u32>]| -> Vec<Vec<u32>> { s.iter().map(|x| coordinates_in(space, x)).collect() };
        triples.push(CTriple::new(sub, local(&sigma), local(&sigma_prime))?);
    }
    let mut maps = Vec::new();
    for k in 0..2 {
        let cols: Vec<Vec<u32>> = spaces[k].basis_vectors().iter().map(|x| coordinates_in(&spaces[k + 1], x)).collect();
        maps.push(FpMatrix::from_columns(f, spaces[k + 1].dim(), &cols));
    }
    Ok((m, spaces, triples, maps))
}

/// `Γ_I(⋃M_k, ⋃Σ_k) = ⋃Γ_I(M_k, Σ_k)` for an increasing chain of submodules.
pub fn chain_unions(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("5.3");
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let alg = Algebra::new(p, rng.gen_range(1..=2))?;
        let ideal = random_ideal(&mut rng, alg);
        let (m, spaces, triples, _) = random_chain(&mut rng, alg)?;
        report.cases += 1;
        let mut pushed = Vec::new();
        for (space, t) in spaces.iter().zip(&triples) {
            let t = CTriple::new(t.module.clone(), t.sigma.clone(), Vec::new())?;
            pushed.push(push_forward(&gamma(&t, &ideal)?, &space.basis_columns()));
        }
        let keys: Vec<Vec<Subspace>> = pushed.iter().map(|g| g.keys()).collect();
        let refs: Vec<(&[Subspace], &Graph)> = keys.iter().zip(&pushed).map(|(k, g)| (k.as_slice(), g.graph())).collect();
        let union = keyed_union(&refs);
        let top_sigma: Vec<Vec<u32>> =
            triples.last().expect("three").sigma.iter().map(|x| spaces[2].basis_columns().mul_vec(x)).collect();
        let whole = canonical(&gamma(&CTriple::new(m.clone(), top_sigma, Vec::new())?, &ideal)?);
        if whole != union {
            let refs: Vec<&CTriple> = triples.iter().collect();
            report.fail(case, format!("union of the chain graphs differs for {:?}", ideal), triple_witness(&refs));
        }
    }
    Ok(report)
}

/// `Γ_I` of the colimit of a chain is the union of the pushed-forward graphs,
/// and every chain map induces a graph morphism.
pub fn chain_limits(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("5.4");
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let alg = Algebra::new(p, rng.gen_range(1..=2))?;
        let ideal = random_ideal(&mut rng, alg);
        let (_, _, triples, maps) = random_chain(&mut rng, alg)?;
        report.cases += 1;
        let refs: Vec<&CTriple> = triples.iter().collect();
        for (k, f) in maps.iter().enumerate() {
            match gamma_map(f, &triples[k], &triples[k + 1], &ideal) {
                Ok(_) => {}
                Err(Error::AdjacencyNotPreserved(..)) | Err(Error::NotCMorphism(_)) => {
                    report.fail(case, format!("chain map {} does not induce a graph morphism", k), triple_witness(&refs));
                }
                Err(e) => return Err(e),
            }
        }
        let (limit, to_limit) = triple_chain_limit(&triples, &maps)?;
        let whole = canonical(&gamma(&limit, &ideal)?);
        let pushed: Vec<CycGraph> =
            triples.iter().zip(&to_limit).map(|(t, phi)| Ok(push_forward(&gamma(t, &ideal)?, phi))).collect::<Result<_>>()?;
        let keys: Vec<Vec<Subspace>> = pushed.iter().map(|g| g.keys()).collect();
        let parts: Vec<(&[Subspace], &Graph)> = keys.iter().zip(&pushed).map(|(k, g)| (k.as_slice(), g.graph())).collect();
        let union = keyed_union(&parts);
        if whole != union {
            report.fail(case, format!("colimit not preserved for {:?}", ideal), triple_witness(&refs));
        }
    }
    Ok(report)
}

/// Finite truncations of towers: the embeddings are pure monomorphisms, each
/// level lies in `𝔇(J)`, the induced maps of the full graphs are morphisms and
/// the colimit of the graphs has no more components than the levels.
pub fn truncation_chains(seed: u64, cases: usize, budget: u128) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("6.3-chain");
    let setups: [(u32, usize); 3] = [(3, 2), (2, 3), (3, 3)];
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let (p, n) = setups[case % setups.len()];
        let mut seq = AdmSeq::empty(p, n)?;
        let depth = rng.gen_range(1..=3);
        for _ in 0..depth {
            let ext = seq.extensions();
            let Some(next) = ext.choose(&mut rng) else { break };
            let top = build(next)?;
            if count_vectors(p, top.module.dim()) > budget {
                break;
            }
            seq = next.clone();
        }
        if seq.is_empty() {
            report.skipped += 1;
            continue;
        }
        report.cases += 1;
        let witness = || json(&(p, n, seq.terms()));
        let levels: Vec<_> = (0..=seq.len()).map(|k| build(&seq.prefix(k))).collect::<Result<_>>()?;
        let j = levels[0].module.algebra().radical();
        let mut triples = Vec::new();
        let mut max_components = 0;
        for lvl in &levels {
            if !lvl.module.in_decomposition_domain(&j)? {
                report.fail(case, format!("level {} not in the decomposition domain", lvl.seq), witness());
            }
            let im = lvl.module.ideal_module(&j)?;
            let sigma: Vec<Vec<u32>> =
                lvl.module.full().enumerate(budget)?.into_iter().filter(|x| !im.contains(x)).collect();
            let t = CTriple::new(lvl.module.clone(), sigma, Vec::new())?;
            max_components = max_components.max(gamma(&t, &j)?.component_count());
            triples.push(t);
        }
        let mut maps = Vec::new();
        for k in 0..seq.len() {
            let e = truncation_embedding(&levels[k + 1], k);
            if !levels[k + 1].module.is_pure(&e.column_space(), &j)? {
                report.fail(case, format!("truncation {} is not pure", k), witness());
            }
            if let Err(err) = gamma_map(&e, &triples[k], &triples[k + 1], &j) {
                report.fail(case, format!("truncation {} is not a morphism: {}", k, err), witness());
            }
            maps.push(e);
        }
        let (limit, to_limit) = triple_chain_limit(&triples, &maps)?;
        let pushed: Vec<CycGraph> =
            triples.iter().zip(&to_limit).map(|(t, phi)| Ok(push_forward(&gamma(t, &j)?, phi))).collect::<Result<_>>()?;
        let keys: Vec<Vec<Subspace>> = pushed.iter().map(|g| g.keys()).collect();
        let parts: Vec<(&[Subspace], &Graph)> = keys.iter().zip(&pushed).map(|(k, g)| (k.as_slice(), g.graph())).collect();
        let (_, union) = keyed_union(&parts);
        let whole = gamma(&limit, &j)?;
        if union.component_count() > max_components || union.component_count() != whole.component_count() {
            report.fail(
                case,
                format!(
                    "colimit has {} components, top graph {}, levels at most {}",
                    union.component_count(),
                    whole.component_count(),
                    max_components
                ),
                witness(),
            );
        }
    }
    Ok(report)
}

fn random_z_triple(rng: &mut impl Rng) -> ZTriple {
    let d = rng.gen_range(2..=3);
    let count = rng.gen_range(1..=5);
    let mut sigma: Vec<Vec<i64>> = Vec::new();
    while sigma.len() < count {
        let v: Vec<i64> = if !sigma.is_empty() && rng.gen_bool(0.4) {
            let base = sigma.choose(rng).expect("nonempty").clone();
            let s = *[-3i64, -2, -1, 2, 3].choose(rng).expect("nonempty");
            base.iter().map(|x| x * s).collect()
        } else {
            (0..d).map(|_| rng.gen_range(-4..=4)).collect()
        };
        if v.iter().any(|&x| x != 0) {
            sigma.push(v);
        }
    }
    let sigma_prime = sigma.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
    ZTriple::new(d, sigma, sigma_prime).expect("valid triple")
}

/// Directed families over both backends.
pub fn directed_unions(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("7.1");
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        report.cases += 1;
        // Over ℤ: a top ideal (b) together with ideals contained in it.
        let t = random_z_triple(&mut rng);
        let b = rng.gen_range(1..=6);
        let mut family = vec![PrincIdeal::new(b)];
        for _ in 0..rng.gen_range(0..=3) {
            family.push(PrincIdeal::new(b * rng.gen_range(0..=5)));
        }
        family.shuffle(&mut rng);
        if !directed_union_check_z(&t, &family)? {
            let ms: Vec<String> = family.iter().map(|i| i.m.to_string()).collect();
            report.fail(case, "ℤ: sum graph differs from the union", json(&(&t, ms)));
        }
        // Over F_p ⋉ F_p^n: a chain or a pair with its sum.
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let n = rng.gen_range(2..=3);
        let alg = Algebra::new(p, n)?;
        let ct = random_triple(&mut rng, alg, 5);
        let f = alg.field();
        let w1 = Subspace::span(f, n, &[random_nonzero(&mut rng, p, n)])?;
        let w2 = Subspace::span(f, n, &[random_nonzero(&mut rng, p, n)])?;
        let fam = if rng.gen_bool(0.5) {
            vec![w1.clone(), w1.sum(&w2)?]
        } else {
            vec![w1.clone(), w2.clone(), w1.sum(&w2)?]
        };
        if !directed_union_check_socle(&ct, &fam)? {
            let ws: Vec<_> = fam.iter().map(|w| w.basis_vectors()).collect();
            report.fail(case, "socle ideals: sum graph differs from the union", json(&(triple_witness(&[&ct]), ws)));
        }
    }
    Ok(report)
}

/// `Γ_{ΠI} = Γ_{∩I} = ∩Γ_I` over `ℤ`.
pub fn ideal_intersections(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("7.2");
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let t = random_z_triple(&mut rng);
        let ideals: Vec<PrincIdeal> = (0..rng.gen_range(1..=3)).map(|_| PrincIdeal::new(rng.gen_range(1..=12))).collect();
        report.cases += 1;
        let r = intersection_report(&t, &ideals)?;
        if !r.holds() {
            let ms: Vec<String> = ideals.iter().map(|i| i.m.to_string()).collect();
            report.fail(case, "product, intersection and graph intersection differ", json(&(&t, ms)));
        }
    }
    Ok(report)
}

/// The proportionality criterion against the bounded witness search.
pub fn z_adjacency(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("z-adjacency");
    let mut adjacent = 0;
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let d = rng.gen_range(2..=3);
        let u: Vec<i64> = loop {
            let u: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            if u.iter().any(|&x| x != 0) {
                break u;
            }
        };
        let a: Vec<i64> = u.iter().map(|x| x * rng.gen_range(1..=3)).collect();
        let b: Vec<i64> = if rng.gen_bool(0.5) {
            u.iter().map(|x| x * *[-3i64, -2, -1, 1, 2, 3].choose(&mut rng).expect("nonempty")).collect()
        } else {
            loop {
                let b: Vec<i64> = (0..d).map(|_| rng.gen_range(-4..=4)).collect();
                if b.iter().any(|&x| x != 0) {
                    break b;
                }
            }
        };
        let ideal = PrincIdeal::new(rng.gen_range(1..=6));
        let t = ZTriple::new(d, vec![a.clone(), b.clone()], Vec::new())?;
        let bound = witness_bound(&t, &ideal);
        report.cases += 1;
        let fast = proportional(&a, &b);
        let slow = witness_search(&a, &b, &ideal.m, &bound).is_some();
        adjacent += fast as usize;
        let graph = gamma_z(&t, &ideal);
        let fast_graph = graph.len() == 1 || graph.graph.adjacent(0, 1);
        if fast != slow || fast != fast_graph {
            report.fail(case, format!("criterion {} vs witness search {}", fast, slow), json(&(&a, &b, ideal.m.to_string())));
        }
    }
    report.notes.push(format!("{} proportional pairs", adjacent));
    Ok(report)
}

/// `Γ_{F_3}(F_3)²` has one vertex while `Γ_{F_3}(F_3², (F_3 ∖ 0)²)` has two.
pub fn product_counterexample() -> Result<SuiteReport> {
    let mut report = SuiteReport::new("product-counterexample");
    report.cases = 1;
    let alg = Algebra::new(3, 0)?;
    let t = CTriple::all_nonzero(AModule::semisimple(alg, 1), DEFAULT_ENUMERATION_BUDGET)?;
    let g = gamma(&t, &Ideal::Whole)?;
    let square = graph_product(&[g.graph(), g.graph()]);
    let whole = gamma(&triple_product(&[t.clone(), t])?, &Ideal::Whole)?;
    let reps: Vec<Vec<u32>> = whole.vertices().iter().map(|v| v.rep.clone()).collect();
    report.notes.push(format!("product of graphs: {} vertex", square.len()));
    report.notes.push(format!("graph of the product: {} vertices, representatives {:?}", whole.len(), reps));
    if square.len() != 1 || whole.len() != 2 {
        report.fail(0, format!("expected 1 and 2 vertices, got {} and {}", square.len(), whole.len()), json(&reps));
    }
    Ok(report)
}

/// The equalizer of `id, -id` on `(F_3, F_3 ∖ 0, ∅)` is zero, while the
/// induced graph maps are equal.
pub fn equalizer_counterexample() -> Result<SuiteReport> {
    let mut report = SuiteReport::new("equalizer-counterexample");
    report.cases = 1;
    let alg = Algebra::new(3, 0)?;
    let f = alg.field();
    let t = CTriple::all_nonzero(AModule::semisimple(alg, 1), DEFAULT_ENUMERATION_BUDGET)?;
    let id = FpMatrix::identity(f, 1);
    let neg = id.scale(f.neg(1));
    let (eq, _) = triple_equalizer(&id, &neg, &t, &t)?;
    let gi = gamma_map(&id, &t, &t, &Ideal::Whole)?;
    let gn = gamma_map(&neg, &t, &t, &Ideal::Whole)?;
    let (graph_eq, _) = graph_equalizer(&gi.src.graph().clone(), &gi.map, &gn.map);
    let eq_graph = gamma(&eq, &Ideal::Whole)?;
    report.notes.push(format!("equalizer triple has dimension {} and {} vertices", eq.module.dim(), eq_graph.len()));
    report.notes.push(format!("equalizer of the graph maps has {} vertices", graph_eq.len()));
    if gi.map != gn.map || eq.module.dim() != 0 || !eq_graph.is_empty() || graph_eq.len() != 1 {
        report.fail(0, "equalizer counterexample did not reproduce", json(&(gi.map, gn.map)));
    }
    Ok(report)
}

/// Every emitted idempotent and decomposition is checked; certain lengths add
/// over direct sums; the stable power agrees with the naive iteration.
pub fn oracle_soundness(seed: u64, cases: usize, oracle: &OracleConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("oracle");
    let mut idempotents = 0;
    let mut additivity = 0;
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let alg = Algebra::new(p, rng.gen_range(1..=2))?;
        let (ga, sa, gb, sb) = (rng.gen_range(1..=2), rng.gen_range(0..=3), rng.gen_range(1..=2), rng.gen_range(0..=2));
        let a = random_presentation(&mut rng, alg, ga, sa);
        let b = random_presentation(&mut rng, alg, gb, sb);
        let m = a.direct_sum(&b)?;
        report.cases += 1;
        let cfg = OracleConfig { seed: seed ^ case as u64, ..*oracle };
        let witness = || module_witness(&m);
        if let IdempotentOutcome::Found(e) = find_idempotent(&m, &cfg) {
            idempotents += 1;
            if let Err(msg) = verify_idempotent(&m, &e) {
                report.fail(case, msg, witness());
            }
        }
        let dec = ks_decompose(&m, &cfg);
        if let Err(msg) = verify_decomposition(&m, &dec) {
            report.fail(case, msg, witness());
        }
        let (ka, kb, km) = (ks_decompose(&a, &cfg).ks_length(), ks_decompose(&b, &cfg).ks_length(), dec.ks_length());
        if ka.certain && kb.certain && km.certain {
            additivity += 1;
            if km.length != ka.length + kb.length {
                report.fail(case, format!("KSℓ {} != {} + {}", km.length, ka.length, kb.length), witness());
            }
        }
        let end = end_algebra(&m);
        let coeffs = random_vector(&mut rng, p, end.dim());
        let phi = end.combine(m.field(), &coeffs);
        let e = stable_power(&phi);
        if e != naive_stable_power(&phi) || !m.is_intertwiner(&e, &m) {
            report.fail(case, "stable power disagrees with the naive iteration", json(&(m.to_doc(), coeffs)));
        }
    }
    report.notes.push(format!("{} idempotents found", idempotents));
    report.notes.push(format!("{} certain additivity instances", additivity));
    Ok(report)
}

/// Default number of cases for each named check.
pub fn default_cases(name: &str) -> usize {
    match name {
        "2.4" | "2.8" | "7.2" => 100,
        "2.10" | "3.2" | "5.3" | "5.4" | "5.5" | "7.1" => 50,
        "6.3-chain" => 12,
        _ => 1,
    }
}

pub fn run_check(name: &str, seed: u64, cases: Option<usize>, budget: u128) -> Result<SuiteReport> {
    let n = cases.unwrap_or_else(|| default_cases(name));
    match name {
        "2.4" => pure_submodules(seed, n),
        "2.8" => direct_sum_components(seed, n),
        "2.10" => fundamental_sets_agree(seed, n),
        "3.2" => domain_closure(seed, n),
        "5.3" => chain_unions(seed, n),
        "5.4" => chain_limits(seed, n),
        "5.5" => coproduct_preservation(seed, n),
        "6.3-chain" => truncation_chains(seed, n, budget),
        "7.1" => directed_unions(seed, n),
        "7.2" => {
            let mut r = ideal_intersections(seed, n)?;
            let w = z_adjacency(seed, n)?;
            r.notes.push(w.summary());
            r.violations.extend(w.violations);
            Ok(r)
        }
        "product-counterexample" => product_counterexample(),
        "equalizer-counterexample" => equalizer_counterexample(),
        other => Err(Error::Parse { path: "check".into(), message: format!("unknown check {:?}", other) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_domain_modules_are_in_the_domain() {
        let mut rng = rng_for(7, 0);
        let mut hits = 0;
        for _ in 0..20 {
            if let Some(m) = random_domain_module(&mut rng, 3, 6) {
                assert!(m.dim() <= 6);
                assert!(m.in_decomposition_domain(&m.algebra().radical()).unwrap());
                hits += 1;
            }
        }
        assert!(hits > 10);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_domain_module(&mut rng_for(3, 5), 2, 6).map(|m| m.to_json());
        let b = random_domain_module(&mut rng_for(3, 5), 2, 6).map(|m| m.to_json());
        assert_eq!(a, b);
    }

    #[test]
    fn counterexamples_reproduce() {
        assert!(product_counterexample().unwrap().passed());
        assert!(equalizer_counterexample().unwrap().passed());
    }

    #[test]
    fn small_sweeps_pass() {
        let cfg = OracleConfig::default();
        for r in [
            bound_suite(1, 10, 6, &cfg).unwrap(),
            pure_submodules(1, 10).unwrap(),
            direct_sum_components(1, 10).unwrap(),
            fundamental_sets_agree(1, 5).unwrap(),
            domain_closure(1, 10).unwrap(),
            coproduct_preservation(1, 10).unwrap(),
            chain_unions(1, 10).unwrap(),
            chain_limits(1, 10).unwrap(),
            truncation_chains(1, 3, 1 << 12).unwrap(),
            directed_unions(1, 10).unwrap(),
            ideal_intersections(1, 10).unwrap(),
            z_adjacency(1, 20).unwrap(),
            oracle_soundness(1, 10, &cfg).unwrap(),
        ] {
            assert!(r.passed(), "{}: {:?}", r.summary(), r.violations);
            assert!(r.cases > 0, "{}", r.summary());
        }
    }

    #[test]
    fn unknown_check_is_rejected() {
        assert!(run_check("9.9", 0, None, 1 << 10).is_err());
    }
}
