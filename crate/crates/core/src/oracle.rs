//! Krull-Schmidt oracle: idempotents of the endomorphism algebra.
//!
//! An endomorphism maps `JM` into `JM`, so it induces a map on the top
//! `M/JM`. The endomorphisms with image inside `JM` form an ideal `K` with
//! `K^2 = 0` (since `J^2 = 0`), and idempotents lift modulo nilpotent ideals.
//! Hence `End(M)` has a nontrivial idempotent iff its image `B` in
//! `End(M/JM)` does, and scanning `B` exhaustively is enough to certify
//! indecomposability. A found idempotent of `B` is lifted by taking the stable
//! power of any preimage.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{check_budget, count_vectors, Field, FpMatrix, Subspace};
use crate::trivext::AModule;

pub const DEFAULT_ORACLE_BUDGET: u128 = 1 << 16;
pub const DEFAULT_TRIALS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest algebra scanned exhaustively (number of elements).
    pub budget: u128,
    /// Random samples tried when the scan is over budget.
    pub trials: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { budget: DEFAULT_ORACLE_BUDGET, trials: DEFAULT_TRIALS, seed: 0 }
    }
}

/// The commutant `{X : X T_i = T_i X}`.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    pub basis: Vec<FpMatrix>,
    pub d: usize,
}

impl EndAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combine(&self, field: Field, coeffs: &[u32]) -> FpMatrix {
        let mut acc = FpMatrix::zeros(field, self.d, self.d);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                acc = acc.add(&b.scale(*c));
            }
        }
        acc
    }

    pub fn contains(&self, x: &FpMatrix) -> bool {
        let field = x.field();
        let span = Subspace::span(field, self.d * self.d, &self.basis.iter().map(|b| b.data().to_vec()).collect::<Vec<_>>())
            .expect("matrices of the same shape");
        span.contains(x.data())
    }
}

pub fn end_algebra(m: &AModule) -> EndAlgebra {
    let d = m.dim();
    let f = m.field();
    let unknowns = d * d;
    let mut system = FpMatrix::zeros(f, m.n() * unknowns, unknowns);
    for (i, t) in m.actions().iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                let row = i * unknowns + r * d + c;
                // (X T)[r][c] - (T X)[r][c]
                for k in 0..d {
                    let a = t.get(k, c);
                    if a != 0 {
                        let col = r * d + k;
                        system.set(row, col, f.add(system.get(row, col), a));
                    }
                    let b = t.get(r, k);
                    if b != 0 {
                        let col = k * d + c;
                        system.set(row, col, f.sub(system.get(row, col), b));
                    }
                }
            }
        }
    }
    let basis = system
        .kernel()
        .basis_vectors()
        .into_iter()
        .map(|v| FpMatrix::new(f.p(), d, d, v).expect("reduced entries"))
        .collect();
    EndAlgebra { basis, d }
}

/// `p^{⌈log_p d⌉} · lcm_{j ≤ d}(p^j - 1)`: every element of the
/// multiplicative semigroup of `d x d` matrices over `F_p` has an idempotent
/// power at this exponent.
pub fn stable_exponent(p: u32, d: usize) -> BigUint {
    let pb = BigUint::from(p);
    let mut e = BigUint::one();
    for j in 1..=d.max(1) {
        let pj = pb.pow(j as u32) - BigUint::one();
        e = e.lcm(&pj);
    }
    let mut q = BigUint::one();
    while q < BigUint::from(d.max(1)) {
        q *= &pb;
    }
    e * q
}

pub fn matrix_pow(m: &FpMatrix, e: &BigUint) -> FpMatrix {
    let mut acc = FpMatrix::identity(m.field(), m.rows());
    for bit in (0..e.bits()).rev() {
        acc = acc.mul(&acc);
        if e.bit(bit) {
            acc = acc.mul(m);
        }
    }
    acc
}

/// Idempotent power of a square matrix. Panics if the result is not
/// idempotent, which would indicate an arithmetic bug.
pub fn stable_power(m: &FpMatrix) -> FpMatrix {
    let e = matrix_pow(m, &stable_exponent(m.p(), m.rows()));
    assert_eq!(e.mul(&e), e, "stable power is not idempotent");
    e
}

/// Idempotent power found by iterating `k = 1, 2, ...` until
/// `φ^{2k} = φ^k`.
pub fn naive_stable_power(m: &FpMatrix) -> FpMatrix {
    let mut pk = m.clone();
    loop {
        let p2k = pk.mul(&pk);
        if p2k == pk {
            return pk;
        }
        pk = pk.mul(m);
    }
}

fn is_trivial(e: &FpMatrix) -> bool {
    e.is_zero() || *e == FpMatrix::identity(e.field(), e.rows())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdempotentOutcome {
    Found(FpMatrix),
    /// Exhaustive: the module is indecomposable.
    NoneCertain,
    /// Sampling found nothing; indecomposability is not certified.
    NoneHeuristic,
}

fn decode(mut idx: u128, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for c in out.iter_mut() {
        *c = (idx % p as u128) as u32;
        idx /= p as u128;
    }
    out
}

/// Image of `End(M)` in `End(M/JM)`, with a preimage for each basis element.
struct TopAlgebra {
    top: Vec<FpMatrix>,
    lifts: Vec<FpMatrix>,
}

fn top_algebra(m: &AModule, end: &EndAlgebra) -> TopAlgebra {
    let jm = m.radical_module();
    let q = m.quotient(&jm).expect("JM is a submodule");
    let comp = jm.complement_coords();
    let f = m.field();
    let section = FpMatrix::from_columns(f, m.dim(), &comp.iter().map(|&c| m.unit(c)).collect::<Vec<_>>());
    let mut top = Vec::new();
    let mut lifts = Vec::new();
    let mut span = Subspace::zero(f, comp.len() * comp.len());
    for b in &end.basis {
        let bar = q.projection.mul(b).mul(&section);
        if !span.contains(bar.data()) {
            span = span.sum(&Subspace::span(f, comp.len() * comp.len(), &[bar.data().to_vec()]).expect("shape")).expect("shape");
            top.push(bar);
            lifts.push(b.clone());
        }
    }
    TopAlgebra { top, lifts }
}

fn lex_min(a: FpMatrix, b: FpMatrix) -> FpMatrix {
    if b.data() < a.data() {
        b
    } else {
        a
    }
}

pub fn find_idempotent(m: &AModule, cfg: &OracleConfig) -> IdempotentOutcome {
    let end = end_algebra(m);
    find_idempotent_in(m, &end, cfg)
}

pub fn find_idempotent_in(m: &AModule, end: &EndAlgebra, cfg: &OracleConfig) -> IdempotentOutcome {
    if end.dim() <= 1 {
        return IdempotentOutcome::NoneCertain;
    }
    let f = m.field();
    let p = m.p();
    let top = top_algebra(m, end);
    let k = top.top.len();
    if k <= 1 {
        return IdempotentOutcome::NoneCertain;
    }
    let size = count_vectors(p, k);
    if size <= cfg.budget {
        let t = top.top[0].rows();
        let best = (0..size)
            .into_par_iter()
            .filter_map(|idx| {
                let c = decode(idx, p, k);
                let mut b = FpMatrix::zeros(f, t, t);
                for (ci, basis) in c.iter().zip(&top.top) {
                    if *ci != 0 {
                        b = b.add(&basis.scale(*ci));
                    }
                }
                (b.mul(&b) == b && !is_trivial(&b)).then_some((b, c))
            })
            .reduce_with(|x, y| if y.0.data() < x.0.data() { y } else { x });
        return match best {
            None => IdempotentOutcome::NoneCertain,
            Some((_, c)) => {
                let mut lift = FpMatrix::zeros(f, m.dim(), m.dim());
                for (ci, l) in c.iter().zip(&top.lifts) {
                    if *ci != 0 {
                        lift = lift.add(&l.scale(*ci));
                    }
                }
                IdempotentOutcome::Found(stable_power(&lift))
            }
        };
    }
    let found = (0..cfg.trials)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial as u64);
            let coeffs: Vec<u32> = (0..end.dim()).map(|_| rng.gen_range(0..p)).collect();
            let e = stable_power(&end.combine(f, &coeffs));
            (!is_trivial(&e)).then_some(e)
        })
        .reduce_with(lex_min);
    match found {
        Some(e) => IdempotentOutcome::Found(e),
        None => IdempotentOutcome::NoneHeuristic,
    }
}

/// Scan every element of `End(M)` for a nontrivial idempotent; the
/// lexicographically smallest is returned.
pub fn exhaustive_end_idempotent(m: &AModule, budget: u128) -> Result<Option<FpMatrix>> {
    let end = end_algebra(m);
    let p = m.p();
    let size = count_vectors(p, end.dim());
    check_budget(size, budget)?;
    let f = m.field();
    Ok((0..size)
        .into_par_iter()
        .filter_map(|idx| {
            let x = end.combine(f, &decode(idx, p, end.dim()));
            (x.mul(&x) == x && !is_trivial(&x)).then_some(x)
        })
        .reduce_with(lex_min))
}

#[derive(Clone, Debug)]
pub struct Summand {
    /// Subspace of the original module.
    pub space: Subspace,
    /// The summand in the basis given by the columns of `change_of_basis`.
    pub module: AModule,
    /// Whether indecomposability of this summand is certified.
    pub certain: bool,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub summands: Vec<Summand>,
    /// Columns are the concatenated summand bases.
    pub change_of_basis: FpMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KsLength {
    pub length: usize,
    pub certain: bool,
}

impl Decomposition {
    pub fn ks_length(&self) -> KsLength {
        KsLength { length: self.summands.len(), certain: self.summands.iter().all(|s| s.certain) }
    }
}

/// Split recursively along idempotents. `embed` is `d_original x d_m`.
fn split(m: &AModule, embed: &FpMatrix, cfg: &OracleConfig, depth: u64, out: &mut Vec<(FpMatrix, AModule, bool)>) {
    if m.dim() == 0 {
        return;
    }
    let local = OracleConfig { seed: cfg.seed.wrapping_add(depth.wrapping_mul(0x9E37_79B9)), ..*cfg };
    match find_idempotent(m, &local) {
        IdempotentOutcome::Found(e) => {
            let f = m.field();
            let id = FpMatrix::identity(f, m.dim());
            for (k, part) in [e.column_space(), id.sub(&e).column_space()].into_iter().enumerate() {
                let (sub, basis) = m.restrict(&part).expect("image of an idempotent is a submodule");
                split(&sub, &embed.mul(&basis), cfg, depth * 2 + 1 + k as u64, out);
            }
        }
        IdempotentOutcome::NoneCertain => out.push((embed.clone(), m.clone(), true)),
        IdempotentOutcome::NoneHeuristic => out.push((embed.clone(), m.clone(), false)),
    }
}

pub fn ks_decompose(m: &AModule, cfg: &OracleConfig) -> Decomposition {
    let f = m.field();
    let mut parts = Vec::new();
    split(m, &FpMatrix::identity(f, m.dim()), cfg, 0, &mut parts);
    let mut change = FpMatrix::zeros(f, m.dim(), 0);
    let mut summands = Vec::new();
    for (basis, module, certain) in parts {
        change = change.hstack(&basis);
        summands.push(Summand { space: basis.column_space(), module, certain });
    }
    Decomposition { summands, change_of_basis: change }
}

pub fn ks_length(m: &AModule, cfg: &OracleConfig) -> KsLength {
    ks_decompose(m, cfg).ks_length()
}

/// Check that a decomposition reassembles `m`: the change of basis is
/// invertible and conjugates each action into the block diagonal of the
/// summand actions.
pub fn verify_decomposition(m: &AModule, dec: &Decomposition) -> std::result::Result<(), String> {
    let p = &dec.change_of_basis;
    let inv = p.inverse().ok_or("change of basis is singular")?;
    let f = m.field();
    for (i, t) in m.actions().iter().enumerate() {
        let mut block = FpMatrix::zeros(f, 0, 0);
        for s in &dec.summands {
            block = block.block_diag(&s.module.actions()[i]);
        }
        if inv.mul(t).mul(p) != block {
            return Err(format!("conjugated T_{} is not block diagonal", i));
        }
    }
    for s in &dec.summands {
        if !m.is_action_closed(&s.space) {
            return Err("summand is not action closed".into());
        }
    }
    Ok(())
}

/// Check the defining properties of an emitted idempotent.
pub fn verify_idempotent(m: &AModule, e: &FpMatrix) -> std::result::Result<(), String> {
    if e.mul(e) != *e {
        return Err("e^2 != e".into());
    }
    if !m.is_intertwiner(e, m) {
        return Err("e does not commute with the action".into());
    }
    let img = e.column_space();
    let ker = e.kernel();
    if !m.is_action_closed(&img) || !m.is_action_closed(&ker) {
        return Err("image or kernel is not action closed".into());
    }
    if img.dim() + ker.dim() != m.dim() || img.meets(&ker).map_err(|x| x.to_string())? {
        return Err("image and kernel are not complementary".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::VectorIter;
    use crate::trivext::tests::{alg, m_i};

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn end_algebra_examples() {
        assert_eq!(end_algebra(&AModule::semisimple(alg(2, 0), 1)).dim(), 1);
        assert_eq!(end_algebra(&AModule::semisimple(alg(2, 2), 2)).dim(), 4);
        let a = AModule::free(alg(2, 2), 1);
        let end = end_algebra(&a);
        assert_eq!(end.dim(), 3);
        // Brute force over all 2^9 matrices.
        let count = VectorIter::new(a.field(), 9)
            .filter(|v| {
                let x = FpMatrix::new(2, 3, 3, v.clone()).unwrap();
                a.is_intertwiner(&x, &a)
            })
            .count();
        assert_eq!(count, 8);
        assert!(end.contains(&FpMatrix::identity(a.field(), 3)));
    }

    #[test]
    fn stable_powers_agree_with_naive_iteration() {
        let f = Field::new(3).unwrap();
        for v in VectorIter::new(f, 4).step_by(7) {
            let m = FpMatrix::new(3, 2, 2, v).unwrap();
            assert_eq!(stable_power(&m), naive_stable_power(&m));
        }
        let m = FpMatrix::from_rows(2, 3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(stable_power(&m), naive_stable_power(&m));
    }

    #[test]
    fn regular_module_is_indecomposable() {
        assert_eq!(find_idempotent(&AModule::free(alg(2, 2), 1), &cfg()), IdempotentOutcome::NoneCertain);
        assert_eq!(exhaustive_end_idempotent(&AModule::free(alg(2, 2), 1), 1 << 10).unwrap(), None);
    }

    #[test]
    fn free_square_has_projection() {
        let m = AModule::free(alg(2, 2), 2);
        match find_idempotent(&m, &cfg()) {
            IdempotentOutcome::Found(e) => verify_idempotent(&m, &e).unwrap(),
            other => panic!("expected an idempotent, got {:?}", other),
        }
    }

    #[test]
    fn m_i_is_indecomposable() {
        let m = m_i(3, 2, 1);
        assert_eq!(find_idempotent(&m, &cfg()), IdempotentOutcome::NoneCertain);
        assert_eq!(exhaustive_end_idempotent(&m, 1 << 20).unwrap(), None);
    }

    #[test]
    fn top_reduction_agrees_with_full_scan() {
        let a = alg(2, 1);
        let cases = [
            AModule::free(a, 2),
            AModule::free(a, 1).direct_sum(&AModule::semisimple(a, 1)).unwrap(),
            m_i(2, 2, 1),
            AModule::semisimple(a, 2),
        ];
        for m in cases {
            let fast = matches!(find_idempotent(&m, &cfg()), IdempotentOutcome::Found(_));
            let slow = exhaustive_end_idempotent(&m, 1 << 20).unwrap().is_some();
            assert_eq!(fast, slow, "{:?}", m);
        }
    }

    #[test]
    fn ks_lengths() {
        let a = alg(2, 2);
        let l = ks_length(&AModule::free(a, 3), &cfg());
        assert_eq!(l, KsLength { length: 3, certain: true });
        let l = ks_length(&AModule::free(a, 2), &cfg());
        assert_eq!(l, KsLength { length: 2, certain: true });
        assert_eq!(ks_length(&m_i(3, 2, 1), &cfg()), KsLength { length: 1, certain: true });
    }

    #[test]
    fn decompositions_reassemble() {
        let a = alg(3, 2);
        let m = m_i(3, 2, 1).direct_sum(&AModule::free(a, 1)).unwrap().direct_sum(&AModule::semisimple(a, 2)).unwrap();
        let dec = ks_decompose(&m, &cfg());
        verify_decomposition(&m, &dec).unwrap();
        assert_eq!(dec.ks_length(), KsLength { length: 4, certain: true });
    }

    #[test]
    fn sampling_path_is_seeded() {
        let m = AModule::free(alg(3, 1), 3);
        let small = OracleConfig { budget: 1, trials: 32, seed: 7 };
        let a = find_idempotent(&m, &small);
        let b = find_idempotent(&m, &small);
        assert_eq!(a, b);
        if let IdempotentOutcome::Found(e) = a {
            verify_idempotent(&m, &e).unwrap();
        }
    }
}
