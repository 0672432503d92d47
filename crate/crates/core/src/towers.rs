//! Admissible sequences and the recursive module towers `M_s`.
//!
//! `M_s` is built from a presentation: one generator per term plus the
//! generator of `M_∅ = A`, and `N = n + Σ i_j` socle coordinates. Extending
//! by `i` pads every existing socle map with `i` zero coordinates and adds a
//! generator `α` with `vα = (0_{N'-n}, v)`. The quotient construction
//! `(M_s ⊕ A) / W(i)` is kept as an independent cross-check.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{fcdim_in, gamma, gamma_full, is_fundamental_in, sigma_components, CTriple};
use crate::linalg::{check_budget, count_vectors, FpMatrix, Subspace, DEFAULT_ENUMERATION_BUDGET};
use crate::oracle::{find_idempotent, ks_decompose, IdempotentOutcome, OracleConfig};
use crate::trivext::{AModule, Algebra, Ideal};

/// Whether `terms` is admissible for `F_p ⋉ F_p^n`: every term in
/// `1..=n-1`, non-increasing, and above `⌊n/2⌋` in characteristic 2.
pub fn is_admissible(terms: &[usize], p: u32, n: usize) -> bool {
    let in_range = terms.iter().all(|&i| i >= 1 && i < n && (p != 2 || i > n / 2));
    in_range && terms.windows(2).all(|w| w[1] <= w[0])
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmSeq {
    p: u32,
    n: usize,
    terms: Vec<usize>,
}

impl AdmSeq {
    pub fn new(p: u32, n: usize, terms: Vec<usize>) -> Result<Self> {
        Algebra::new(p, n)?;
        if !is_admissible(&terms, p, n) {
            return Err(Error::Inadmissible(terms));
        }
        Ok(AdmSeq { p, n, terms })
    }

    pub fn empty(p: u32, n: usize) -> Result<Self> {
        Self::new(p, n, Vec::new())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn prefix(&self, k: usize) -> AdmSeq {
        AdmSeq { p: self.p, n: self.n, terms: self.terms[..k].to_vec() }
    }

    /// Admissible one-term extensions, in increasing order of the new term.
    pub fn extensions(&self) -> Vec<AdmSeq> {
        (1..self.n)
            .filter_map(|i| {
                let mut t = self.terms.clone();
                t.push(i);
                is_admissible(&t, self.p, self.n).then_some(AdmSeq { p: self.p, n: self.n, terms: t })
            })
            .collect()
    }

    pub fn socle_dim(&self) -> usize {
        self.n + self.terms.iter().sum::<usize>()
    }
}

impl fmt::Display for AdmSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Parse `"[2,2,1]"`, `"2,2,1"` or `"()"`.
pub fn parse_terms(text: &str) -> Result<Vec<usize>> {
    let inner = text.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| {
            t.trim().parse::<usize>().map_err(|e| Error::Parse { path: "seq".into(), message: format!("{:?}: {}", t, e) })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub seq: AdmSeq,
    pub module: AModule,
    /// `Σ_s`: the generator coordinate vectors.
    pub sigma: Vec<Vec<u32>>,
    pub socle_dim: usize,
}

/// Socle maps for the presentation of `M_s`, before admissibility checks.
fn socle_maps(alg: &Algebra, terms: &[usize]) -> (usize, Vec<FpMatrix>) {
    let n = alg.n();
    let f = alg.field();
    let mut big_n = n;
    let mut maps = vec![FpMatrix::identity(f, n)];
    for &i in terms {
        let new_n = big_n + i;
        let mut padded = Vec::with_capacity(maps.len() + 1);
        for l in &maps {
            padded.push(l.vstack(&FpMatrix::zeros(f, i, n)));
        }
        let mut alpha = FpMatrix::zeros(f, new_n, n);
        for k in 0..n {
            alpha.set(new_n - n + k, k, 1);
        }
        padded.push(alpha);
        maps = padded;
        big_n = new_n;
    }
    (big_n, maps)
}

fn level_from_terms(alg: Algebra, seq: AdmSeq) -> TowerLevel {
    let (big_n, maps) = socle_maps(&alg, seq.terms());
    let g = maps.len();
    let module = AModule::presentation(alg, g, big_n, &maps).expect("well-formed presentation");
    let sigma = module.generators();
    TowerLevel { seq, module, sigma, socle_dim: big_n }
}

pub fn build(seq: &AdmSeq) -> Result<TowerLevel> {
    let alg = Algebra::new(seq.p, seq.n)?;
    Ok(level_from_terms(alg, seq.clone()))
}

/// Result of the quotient construction, with the images of the presentation
/// generators and socle coordinates.
#[derive(Clone, Debug)]
pub struct QuotientTower {
    pub module: AModule,
    pub generators: Vec<Vec<u32>>,
    pub frame: Vec<Vec<u32>>,
}

impl QuotientTower {
    fn base(alg: Algebra) -> Self {
        let module = AModule::free(alg, 1);
        let generators = vec![module.unit(0)];
        let frame = (1..=alg.n()).map(|k| module.unit(k)).collect();
        QuotientTower { module, generators, frame }
    }

    /// `(M ⊕ A)` and the subspace `W(i)` identifying the last `n - i` frame
    /// coordinates of `M` with the first `n - i` socle coordinates of the new
    /// copy of `A`.
    pub fn glue(&self, i: usize) -> (AModule, Subspace) {
        let alg = *self.module.algebra();
        let n = alg.n();
        let f = alg.field();
        let d = self.module.dim();
        let sum = self.module.direct_sum(&AModule::free(alg, 1)).expect("same algebra");
        let total = sum.dim();
        let big_n = self.frame.len();
        let vectors: Vec<Vec<u32>> = (0..n.saturating_sub(i))
            .map(|k| {
                let mut v = vec![0; total];
                v[..d].copy_from_slice(&self.frame[big_n - n + i + k]);
                v[d + 1 + k] = f.neg(1);
                v
            })
            .collect();
        let w = Subspace::span(f, total, &vectors).expect("module-length vectors");
        (sum, w)
    }

    /// One quotient step; no admissibility check.
    pub fn extend(&self, i: usize) -> Result<Self> {
        let n = self.module.n();
        if i > n {
            return Err(Error::Inadmissible(vec![i]));
        }
        let d = self.module.dim();
        let (sum, w) = self.glue(i);
        let q = sum.quotient(&w)?;
        let lift = |x: &[u32]| {
            let mut v = vec![0; sum.dim()];
            v[..d].copy_from_slice(x);
            v
        };
        let mut generators: Vec<Vec<u32>> = self.generators.iter().map(|g| q.projection.mul_vec(&lift(g))).collect();
        generators.push(q.projection.mul_vec(&sum.unit(d)));
        let mut frame: Vec<Vec<u32>> = self.frame.iter().map(|s| q.projection.mul_vec(&lift(s))).collect();
        for k in n - i..n {
            frame.push(q.projection.mul_vec(&sum.unit(d + 1 + k)));
        }
        let marks = Vec::new();
        let module = q.module.with_generator_marks(marks)?;
        Ok(QuotientTower { module, generators, frame })
    }

    /// The map from the presentation module sending generator and socle
    /// coordinates to their tracked images.
    pub fn comparison_map(&self) -> FpMatrix {
        let cols: Vec<Vec<u32>> = self.generators.iter().chain(&self.frame).cloned().collect();
        FpMatrix::from_columns(self.module.field(), self.module.dim(), &cols)
    }
}

pub fn quotient_build(seq: &AdmSeq) -> Result<QuotientTower> {
    let alg = Algebra::new(seq.p, seq.n)?;
    let mut t = QuotientTower::base(alg);
    for &i in seq.terms() {
        t = t.extend(i)?;
    }
    Ok(t)
}

/// Whether the comparison map is an isomorphism of modules from the
/// presentation `level` onto the quotient construction.
pub fn constructions_agree(level: &TowerLevel, q: &QuotientTower) -> bool {
    if level.module.dim() != q.module.dim() || level.module.goldie_dim() != q.module.goldie_dim() {
        return false;
    }
    let phi = q.comparison_map();
    phi.inverse().is_some() && level.module.is_intertwiner(&phi, &q.module)
}

/// All `2^g - 1` nonempty subset sums of `Σ_s`, ordered by bitmask.
pub fn sigma_tilde(level: &TowerLevel, budget: u128) -> Result<Vec<Vec<u32>>> {
    subset_sums(&level.module, &level.sigma, budget)
}

pub fn subset_sums(module: &AModule, sigma: &[Vec<u32>], budget: u128) -> Result<Vec<Vec<u32>>> {
    let g = sigma.len();
    check_budget(count_vectors(2, g).saturating_sub(1), budget)?;
    let f = module.field();
    Ok((1u64..(1u64 << g))
        .map(|mask| {
            let mut v = vec![0; module.dim()];
            for (k, s) in sigma.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    v = f.add_vec(&v, s);
                }
            }
            v
        })
        .collect())
}

/// Embedding of `M_{s_k}` (prefix of length `k`) into `M_s`.
pub fn truncation_embedding(level: &TowerLevel, k: usize) -> FpMatrix {
    let prefix = level.seq.prefix(k);
    let gk = k + 1;
    let nk = prefix.socle_dim();
    let gs = level.sigma.len();
    let f = level.module.field();
    let mut e = FpMatrix::zeros(f, level.module.dim(), gk + nk);
    for j in 0..gk {
        e.set(j, j, 1);
    }
    for c in 0..nk {
        e.set(gs + c, gk + c, 1);
    }
    e
}

/// Every proper truncation embeds as an intertwiner whose image is pure with
/// respect to `Soc(A)`.
pub fn truncation_purity(level: &TowerLevel) -> Result<bool> {
    let j = level.module.algebra().radical();
    for k in 0..level.seq.len() {
        let small = build(&level.seq.prefix(k))?;
        let e = truncation_embedding(level, k);
        if !small.module.is_intertwiner(&e, &level.module) {
            return Ok(false);
        }
        if !level.module.is_pure(&e.column_space(), &j)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of gluing `(M ⊕ A)/W(i)` for a given `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionCheck {
    pub i: usize,
    pub admissible: bool,
    /// `(Soc(A)∗(M ⊕ A)) ∩ W(i) = 0`.
    pub orthogonal: bool,
    /// The quotient lies in `𝔇(Soc(A))`.
    pub in_domain: bool,
    pub gdim: usize,
}

pub fn extension_check(seq: &AdmSeq, i: usize) -> Result<ExtensionCheck> {
    let base = quotient_build(seq)?;
    let (sum, w) = base.glue(i);
    let j = sum.algebra().radical();
    let orthogonal = sum.star_meets_trivially(&j, &w)?;
    let q = base.extend(i)?;
    let mut terms = seq.terms().to_vec();
    terms.push(i);
    Ok(ExtensionCheck {
        i,
        admissible: is_admissible(&terms, seq.p(), seq.n()),
        orthogonal,
        in_domain: q.module.in_decomposition_domain(&j)?,
        gdim: q.module.goldie_dim(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankFunction {
    Gdim,
    Length,
}

pub fn rank(m: &AModule, rho: RankFunction) -> usize {
    match rho {
        RankFunction::Gdim => m.goldie_dim(),
        RankFunction::Length => m.dim(),
    }
}

/// `M_i`: the tower level for the one-term sequence `(i)`, without the
/// admissibility check (so characteristic 2 cases can be inspected).
pub fn m_i(p: u32, n: usize, i: usize) -> Result<TowerLevel> {
    let alg = Algebra::new(p, n)?;
    Ok(level_from_terms(alg, AdmSeq { p, n, terms: vec![i] }))
}

/// `M_{n-1,i}`, again without the admissibility check.
pub fn m_n1_i(p: u32, n: usize, i: usize) -> Result<TowerLevel> {
    let alg = Algebra::new(p, n)?;
    if n < 2 {
        return Err(Error::Inadmissible(vec![n.saturating_sub(1), i]));
    }
    Ok(level_from_terms(alg, AdmSeq { p, n, terms: vec![n - 1, i] }))
}

/// `A / (0 ⊕ W)` with `W` spanned by the last `n - m` socle coordinates; a
/// cyclic module of Goldie dimension `m`.
pub fn local_quotient(p: u32, n: usize, m: usize) -> Result<AModule> {
    let alg = Algebra::new(p, n)?;
    let a = AModule::free(alg, 1);
    let w: Vec<Vec<u32>> = (m..n).map(|k| a.unit(1 + k)).collect();
    let w = Subspace::span(alg.field(), a.dim(), &w)?;
    Ok(a.quotient(&w)?.module)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    /// Whether a failure counts against the report.
    pub asserted: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub p: u32,
    pub n: usize,
    pub claims: Vec<Claim>,
    /// Goldie dimensions realised by modules certified indecomposable.
    pub gdims_certified: Vec<usize>,
    pub notes: Vec<String>,
}

impl ConstructionReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed || !c.asserted)
    }

    pub fn failures(&self) -> Vec<&Claim> {
        self.claims.iter().filter(|c| c.asserted && !c.passed).collect()
    }
}

struct ClaimSink(Vec<Claim>);

impl ClaimSink {
    fn push(&mut self, name: String, asserted: bool, passed: bool, detail: String) {
        self.0.push(Claim { name, asserted, passed, detail });
    }
}

/// Check the constructions behind the existence of indecomposable modules of
/// every Goldie dimension `1..=3n-2`.
pub fn verify_constructions(p: u32, n: usize, budget: u128, oracle: &OracleConfig) -> Result<ConstructionReport> {
    let alg = Algebra::new(p, n)?;
    let j = alg.radical();
    let mut claims = ClaimSink(Vec::new());
    let mut certified = BTreeSet::new();
    let mut notes = vec![
        "Graphs on sums of generators substitute for full enumeration where p^d exceeds the budget.".to_string(),
    ];

    for m in 1..=n {
        let q = local_quotient(p, n, m)?;
        let g = q.goldie_dim();
        let indec = find_idempotent(&q, oracle) == IdempotentOutcome::NoneCertain;
        if indec {
            certified.insert(g);
        }
        claims.push(
            format!("local quotient of Gdim {}", m),
            true,
            g == m && indec,
            format!("Gdim = {}, oracle certifies indecomposable: {}", g, indec),
        );
    }

    for i in 1..n {
        let level = m_i(p, n, i)?;
        let m = &level.module;
        let admissible = is_admissible(&[i], p, n);
        let in_domain = m.in_decomposition_domain(&j)?;
        let gd = m.goldie_dim();
        let tilde = subset_sums(m, &level.sigma, budget)?;
        let tg = gamma(&CTriple::new(m.clone(), tilde, vec![])?, &j)?;
        let complete = tg.graph().is_complete();
        claims.push(
            format!("M_{} in D(Soc)", i),
            admissible,
            in_domain,
            format!("admissible: {}", admissible),
        );
        claims.push(format!("Gdim M_{} = n+i", i), true, gd == n + i, format!("Gdim = {}", gd));
        claims.push(
            format!("sums-of-generators graph of M_{} complete", i),
            admissible,
            complete,
            format!("{} vertices, {} components", tg.len(), tg.component_count()),
        );
        if count_vectors(p, m.dim()) <= budget && in_domain {
            let c = gamma_full(m, &j, budget)?.component_count();
            claims.push(format!("cdim M_{} = 1", i), admissible, c == 1, format!("cdim = {} (full enumeration)", c));
            if c == 1 {
                certified.insert(gd);
            }
        } else {
            notes.push(format!("M_{}: full enumeration skipped (p^d = {}^{})", i, p, m.dim()));
        }
    }

    if n >= 2 {
        for i in 1..n {
            let level = m_n1_i(p, n, i)?;
            let m = &level.module;
            let admissible = is_admissible(&[n - 1, i], p, n);
            let gd = m.goldie_dim();
            claims.push(
                format!("Gdim M_({},{}) = 2n+i-1", n - 1, i),
                true,
                gd == 2 * n + i - 1,
                format!("Gdim = {}", gd),
            );
            let in_domain = m.in_decomposition_domain(&j)?;
            claims.push(
                format!("M_({},{}) in D(Soc)", n - 1, i),
                admissible,
                in_domain,
                format!("admissible: {}", admissible),
            );
            if count_vectors(p, m.dim()) > budget {
                notes.push(format!("M_({},{}): full enumeration skipped (p^d = {}^{})", n - 1, i, p, m.dim()));
                continue;
            }
            let full = gamma_full(m, &j, budget)?;
            let pair = vec![level.sigma[0].clone(), level.sigma[2].clone()];
            let pair_fund = is_fundamental_in(&full, m, &j, &pair)?;
            let pair_fc = if pair_fund { fcdim_in(&full, m, &j, &pair).ok() } else { None };
            let generates = m.generated(&pair)?.is_full();
            claims.push(
                format!("pair {{a_0, a_({},{})}} fundamental with fcdim 1", n - 1, i),
                admissible,
                pair_fc == Some(1),
                format!(
                    "generates M: {}; fundamental: {}; fcdim: {}; components of the full graph: {}",
                    generates,
                    pair_fund,
                    pair_fc.map_or("-".to_string(), |c| c.to_string()),
                    full.component_count()
                ),
            );
            let triple = level.sigma.clone();
            let tri_fund = is_fundamental_in(&full, m, &j, &triple)?;
            let tri_fc = if tri_fund { fcdim_in(&full, m, &j, &triple).ok() } else { None };
            claims.push(
                format!("generators {{a_0, a_1, a_({},{})}} fundamental with fcdim 1", n - 1, i),
                false,
                tri_fc == Some(1),
                format!("fundamental: {}; fcdim: {}", tri_fund, tri_fc.map_or("-".to_string(), |c| c.to_string())),
            );
            if in_domain && (tri_fc == Some(1) || pair_fc == Some(1) || full.component_count() == 1) {
                certified.insert(gd);
            } else if find_idempotent(m, oracle) == IdempotentOutcome::NoneCertain {
                notes.push(format!("M_({},{}): indecomposability certified by the oracle only", n - 1, i));
                certified.insert(gd);
            }
        }
    }

    let target: BTreeSet<usize> = (1..=(3 * n).saturating_sub(2)).collect();
    let covered = target.is_subset(&certified);
    claims.push(
        format!("indecomposables certified for every Gdim in 1..={}", (3 * n).saturating_sub(2)),
        p != 2,
        covered,
        format!("certified: {:?}", certified),
    );
    if p == 2 {
        notes.push("characteristic 2: only terms above floor(n/2) are admissible, coverage is recorded, not asserted".into());
    }
    Ok(ConstructionReport { p, n, claims: claims.0, gdims_certified: certified.into_iter().collect(), notes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// Components of the graph on sums of generators.
    Tilde,
    /// Full combinatorial dimension, when within budget.
    Cdim,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tilde" => Ok(Metric::Tilde),
            "cdim" => Ok(Metric::Cdim),
            other => Err(Error::Parse { path: "metric".into(), message: format!("unknown metric {:?}", other) }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub p: u32,
    pub n: usize,
    pub depth: usize,
    pub beam: usize,
    pub metric: Metric,
    pub enumeration_budget: u128,
    /// Cap on fundamental-set candidates tried per level.
    pub max_candidates: usize,
    pub oracle: OracleConfig,
    pub timing: bool,
}

impl SearchConfig {
    pub fn new(p: u32, n: usize, depth: usize, beam: usize) -> Self {
        SearchConfig {
            p,
            n,
            depth,
            beam,
            metric: Metric::Tilde,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            max_candidates: 32,
            oracle: OracleConfig::default(),
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRow {
    pub seq: String,
    pub depth: usize,
    pub d: usize,
    pub gdim: usize,
    pub tilde_components: usize,
    pub full_cdim: Option<usize>,
    pub fundamental_found: bool,
    pub fcdim: Option<usize>,
    pub elapsed_ms: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub p: u32,
    pub n: usize,
    pub rows: Vec<SearchRow>,
    /// Levels where two fundamental sets met different component sets.
    pub fundamental_disagreements: Vec<String>,
    /// Levels with `Gdim ≥ n·cdim` whose decomposition lacks a summand of
    /// Goldie dimension at least `n`.
    pub large_summand_checked: usize,
    pub large_summand_violations: Vec<String>,
}

struct Evaluated {
    row: SearchRow,
    seq: AdmSeq,
    metric: usize,
    fundamental_disagreement: Option<String>,
    large_summand: Option<bool>,
}

/// Generating subsets of `Σ̃` of size `g`, lexicographic in index order,
/// starting with `Σ_s` itself.
fn fundamental_candidates(level: &TowerLevel, tilde: &[Vec<u32>], cap: usize) -> Result<Vec<Vec<Vec<u32>>>> {
    let g = level.sigma.len();
    let mut out = vec![level.sigma.clone()];
    let mut seen: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    seen.insert(level.sigma.clone());
    for combo in itertools::Itertools::combinations(0..tilde.len(), g) {
        if out.len() >= cap {
            break;
        }
        let set: Vec<Vec<u32>> = combo.iter().map(|&k| tilde[k].clone()).collect();
        if seen.contains(&set) {
            continue;
        }
        if level.module.generated(&set)?.is_full() {
            seen.insert(set.clone());
            out.push(set);
        }
    }
    Ok(out)
}

fn evaluate(seq: &AdmSeq, cfg: &SearchConfig) -> Result<Evaluated> {
    let start = Instant::now();
    let level = build(seq)?;
    let m = &level.module;
    let j = m.algebra().radical();
    let tilde = sigma_tilde(&level, cfg.enumeration_budget)?;
    let tg = gamma(&CTriple::new(m.clone(), tilde.clone(), vec![])?, &j)?;
    let tilde_components = tg.component_count();
    let mut full_cdim = None;
    let mut fundamental_found = false;
    let mut fcdim = None;
    let mut fundamental_disagreement = None;
    let mut large_summand = None;
    if count_vectors(m.p(), m.dim()) <= cfg.enumeration_budget && m.in_decomposition_domain(&j)? {
        let full = gamma_full(m, &j, cfg.enumeration_budget)?;
        let c = full.component_count();
        full_cdim = Some(c);
        let mut comp_sets: Vec<BTreeSet<usize>> = Vec::new();
        for cand in fundamental_candidates(&level, &tilde, cfg.max_candidates)? {
            if is_fundamental_in(&full, m, &j, &cand)? {
                let comps: BTreeSet<usize> =
                    sigma_components(&full, m, &cand).expect("fundamental sets are vertices").into_iter().collect();
                if fcdim.is_none() {
                    fcdim = Some(comps.len());
                }
                comp_sets.push(comps);
            }
        }
        fundamental_found = !comp_sets.is_empty();
        if comp_sets.windows(2).any(|w| w[0] != w[1]) {
            fundamental_disagreement = Some(seq.to_string());
        }
        if m.goldie_dim() >= m.n() * c {
            let dec = ks_decompose(m, &cfg.oracle);
            if dec.ks_length().certain {
                large_summand = Some(dec.summands.iter().any(|s| s.module.goldie_dim() >= m.n()));
            }
        }
    }
    let metric = match cfg.metric {
        Metric::Tilde => tilde_components,
        Metric::Cdim => full_cdim.unwrap_or(usize::MAX),
    };
    let row = SearchRow {
        seq: seq.to_string(),
        depth: seq.len(),
        d: m.dim(),
        gdim: m.goldie_dim(),
        tilde_components,
        full_cdim,
        fundamental_found,
        fcdim,
        elapsed_ms: cfg.timing.then(|| start.elapsed().as_millis()),
    };
    Ok(Evaluated { row, seq: seq.clone(), metric, fundamental_disagreement, large_summand })
}

/// Beam search over admissible sequences. Every evaluated sequence yields a
/// row; the best `beam` per depth, ranked by (metric, larger Gdim, sequence),
/// are extended.
pub fn search(cfg: &SearchConfig) -> Result<SearchReport> {
    let root = AdmSeq::empty(cfg.p, cfg.n)?;
    let mut frontier = vec![root];
    let mut all: Vec<Evaluated> = Vec::new();
    for depth in 0..=cfg.depth {
        let mut evaluated: Vec<Evaluated> = frontier.par_iter().map(|s| evaluate(s, cfg)).collect::<Result<_>>()?;
        evaluated.sort_by(|a, b| {
            (a.metric, std::cmp::Reverse(a.row.gdim), a.seq.terms()).cmp(&(b.metric, std::cmp::Reverse(b.row.gdim), b.seq.terms()))
        });
        let kept: Vec<AdmSeq> = evaluated.iter().take(cfg.beam).map(|e| e.seq.clone()).collect();
        all.extend(evaluated);
        if depth == cfg.depth {
            break;
        }
        let mut next: Vec<AdmSeq> = kept.iter().flat_map(|s| s.extensions()).collect();
        next.sort();
        next.dedup();
        frontier = next;
    }
    all.sort_by(|a, b| (a.row.depth, a.seq.terms()).cmp(&(b.row.depth, b.seq.terms())));
    let fundamental_disagreements = all.iter().filter_map(|e| e.fundamental_disagreement.clone()).collect();
    let large_summand_checked = all.iter().filter(|e| e.large_summand.is_some()).count();
    let large_summand_violations = all.iter().filter(|e| e.large_summand == Some(false)).map(|e| e.row.seq.clone()).collect();
    Ok(SearchReport {
        p: cfg.p,
        n: cfg.n,
        rows: all.into_iter().map(|e| e.row).collect(),
        fundamental_disagreements,
        large_summand_checked,
        large_summand_violations,
    })
}

pub const CSV_HEADER: [&str; 9] =
    ["seq", "depth", "d", "gdim", "tilde_components", "full_cdim", "fundamental_found", "fcdim", "elapsed_ms"];

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".to_string(), |v| v.to_string())
}

impl SearchReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.seq.clone(),
                r.depth.to_string(),
                r.d.to_string(),
                r.gdim.to_string(),
                r.tilde_components.to_string(),
                opt(&r.full_cdim),
                r.fundamental_found.to_string(),
                opt(&r.fcdim),
                opt(&r.elapsed_ms),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("ascii output")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Read rows back from CSV text.
pub fn parse_csv(text: &str) -> Result<Vec<SearchRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::Parse { path: "header".into(), message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::Parse { path: "header".into(), message: format!("unexpected columns {:?}", header) });
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let path = format!("row {}", k + 1);
        let rec = rec.map_err(|e| Error::Parse { path: path.clone(), message: e.to_string() })?;
        let bad = |col: &str| Error::Parse { path: format!("{}, column {}", path, col), message: "malformed value".into() };
        let num = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(CSV_HEADER[i]));
        let opt_num = |i: usize| if &rec[i] == "-" { Ok(None) } else { num(i).map(Some) };
        rows.push(SearchRow {
            seq: rec[0].to_string(),
            depth: num(1)?,
            d: num(2)?,
            gdim: num(3)?,
            tilde_components: num(4)?,
            full_cdim: opt_num(5)?,
            fundamental_found: rec[6].parse::<bool>().map_err(|_| bad("fundamental_found"))?,
            fcdim: opt_num(7)?,
            elapsed_ms: if &rec[8] == "-" { None } else { Some(rec[8].parse::<u128>().map_err(|_| bad("elapsed_ms"))?) },
        });
    }
    Ok(rows)
}

/// Whether a sequence extension keeps `Soc(A)` a decomposition ideal and the
/// graph on sums of generators connected; used by tests and the CLI.
pub fn level_summary(level: &TowerLevel) -> Result<(bool, usize)> {
    let j: Ideal = level.module.algebra().radical();
    let tilde = sigma_tilde(level, DEFAULT_ENUMERATION_BUDGET)?;
    let g = gamma(&CTriple::new(level.module.clone(), tilde, vec![])?, &j)?;
    Ok((level.module.in_decomposition_domain(&j)?, g.component_count()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_isomorphic;

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&[], 3, 3));
        assert!(is_admissible(&[2, 2, 1], 3, 3));
        assert!(!is_admissible(&[1], 2, 2));
        assert!(!is_admissible(&[1, 2], 3, 3));
        assert!(!is_admissible(&[3], 3, 3));
        assert!(!is_admissible(&[0], 3, 3));
        assert!(is_admissible(&[3, 3], 2, 4));
        assert!(!is_admissible(&[2], 2, 4));
        assert_eq!(AdmSeq::new(2, 2, vec![1]).unwrap_err(), Error::Inadmissible(vec![1]));
    }

    #[test]
    fn build_reproduces_m_i() {
        let level = build(&AdmSeq::new(3, 2, vec![1]).unwrap()).unwrap();
        assert_eq!(level.module, crate::trivext::tests::m_i(3, 2, 1));
        assert_eq!(level.sigma.len(), 2);
        assert_eq!(level.socle_dim, 3);
    }

    #[test]
    fn build_reproduces_m_n1_i() {
        // v α_{n-1,i} = (0_{n-1+i}, v): last generator's socle image.
        let (p, n, i) = (3, 3, 2);
        let level = build(&AdmSeq::new(p, n, vec![n - 1, i]).unwrap()).unwrap();
        let m = &level.module;
        assert_eq!(level.socle_dim, 2 * n + i - 1);
        assert_eq!(m.goldie_dim(), 2 * n + i - 1);
        for k in 0..n {
            let mut v = vec![0; n];
            v[k] = 1;
            let image = m.act(&v, &level.sigma[2]);
            let mut expected = vec![0; m.dim()];
            expected[3 + (n - 1 + i) + k] = 1;
            assert_eq!(image, expected);
        }
    }

    #[test]
    fn empty_sequence_is_the_algebra() {
        let level = build(&AdmSeq::empty(3, 2).unwrap()).unwrap();
        assert_eq!(level.module, AModule::free(Algebra::new(3, 2).unwrap(), 1));
        assert_eq!(level.module.goldie_dim(), 2);
        let q = quotient_build(&AdmSeq::empty(3, 2).unwrap()).unwrap();
        assert_eq!(q.module.dim(), 3);
    }

    #[test]
    fn quotient_dimension_count() {
        let q = quotient_build(&AdmSeq::new(3, 2, vec![1]).unwrap()).unwrap();
        assert_eq!(q.module.dim(), 5);
    }

    #[test]
    fn constructions_agree_small() {
        for (p, n) in [(3, 2), (3, 3), (2, 3), (2, 4), (5, 2)] {
            let mut stack = vec![AdmSeq::empty(p, n).unwrap()];
            while let Some(s) = stack.pop() {
                let level = build(&s).unwrap();
                if level.module.dim() > 10 {
                    continue;
                }
                let q = quotient_build(&s).unwrap();
                assert!(constructions_agree(&level, &q), "{} over p={} n={}", s, p, n);
                let j = level.module.algebra().radical();
                let a = gamma(&CTriple::new(level.module.clone(), sigma_tilde(&level, 1 << 10).unwrap(), vec![]).unwrap(), &j)
                    .unwrap();
                let qt = subset_sums(&q.module, &q.generators, 1 << 10).unwrap();
                let b = gamma(&CTriple::new(q.module.clone(), qt, vec![]).unwrap(), &j).unwrap();
                if a.len() <= 8 {
                    assert!(is_isomorphic(a.graph(), b.graph()).unwrap());
                }
                stack.extend(s.extensions());
            }
        }
    }

    #[test]
    fn sigma_tilde_sizes() {
        for (terms, size) in [(vec![], 1), (vec![1], 3), (vec![2, 1], 7)] {
            let level = build(&AdmSeq::new(3, 3, terms).unwrap()).unwrap();
            assert_eq!(sigma_tilde(&level, 100).unwrap().len(), size);
        }
        let level = build(&AdmSeq::new(3, 3, vec![1]).unwrap()).unwrap();
        let t = sigma_tilde(&level, 100).unwrap();
        let f = level.module.field();
        assert_eq!(t, vec![level.sigma[0].clone(), level.sigma[1].clone(), f.add_vec(&level.sigma[0], &level.sigma[1])]);
    }

    #[test]
    fn truncations_are_pure() {
        assert!(truncation_purity(&build(&AdmSeq::new(3, 3, vec![1]).unwrap()).unwrap()).unwrap());
        assert!(truncation_purity(&build(&AdmSeq::new(3, 3, vec![2, 1]).unwrap()).unwrap()).unwrap());
        assert!(truncation_purity(&build(&AdmSeq::new(3, 4, vec![3, 2, 2, 1]).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn levels_are_in_the_decomposition_domain() {
        for terms in [vec![], vec![1], vec![2], vec![2, 1], vec![2, 2, 1], vec![1, 1, 1]] {
            let level = build(&AdmSeq::new(3, 3, terms.clone()).unwrap()).unwrap();
            let j = level.module.algebra().radical();
            assert!(level.module.in_decomposition_domain(&j).unwrap(), "{:?}", terms);
            assert_eq!(level.module.goldie_dim(), 3 + terms.iter().sum::<usize>());
        }
    }

    #[test]
    fn rank_functions() {
        let level = m_i(3, 2, 1).unwrap();
        assert_eq!(rank(&level.module, RankFunction::Gdim), 3);
        assert_eq!(rank(&level.module, RankFunction::Length), 5);
        let z = AModule::zero(Algebra::new(3, 2).unwrap());
        assert_eq!(rank(&z, RankFunction::Gdim), 0);
        assert_eq!(rank(&z, RankFunction::Length), 0);
    }

    #[test]
    fn local_quotients() {
        for m in 1..=3 {
            assert_eq!(local_quotient(3, 3, m).unwrap().goldie_dim(), m);
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(parse_terms("[2,2,1]").unwrap(), vec![2, 2, 1]);
        assert_eq!(parse_terms("2, 1").unwrap(), vec![2, 1]);
        assert_eq!(parse_terms("[]").unwrap(), Vec::<usize>::new());
        assert!(parse_terms("[a]").is_err());
        assert_eq!(AdmSeq::new(3, 3, vec![2, 2, 1]).unwrap().to_string(), "[2,2,1]");
    }

    #[test]
    fn search_depth_zero_and_char_two() {
        let report = search(&SearchConfig::new(3, 3, 0, 5)).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].seq, "[]");
        let report = search(&SearchConfig::new(2, 2, 3, 5)).unwrap();
        assert_eq!(report.rows.len(), 1);
    }

    #[test]
    fn csv_round_trip() {
        let report = search(&SearchConfig::new(3, 2, 2, 4)).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("seq,depth,d,gdim,tilde_components,full_cdim,fundamental_found,fcdim,elapsed_ms\n"));
        assert!(!csv.contains('\r'));
        assert_eq!(parse_csv(&csv).unwrap(), report.rows);
    }
}
