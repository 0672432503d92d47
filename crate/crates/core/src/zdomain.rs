//! Graphs of cyclic submodules of torsion-free `ℤ`-modules `ℤ^d` with respect
//! to principal ideals, and the directed-family and intersection identities
//! checked against both backends.
//!
//! For `m > 0` and nonzero `a, b` the intersection `(m)a ∩ (m)b` is nonzero
//! iff `a` and `b` are linearly dependent over `ℚ`, which is what
//! [`gamma_z`] uses. [`witness_search`] is the brute-force counterpart.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{gamma, keyed_union, CTriple, CycGraph, Graph, GraphDoc, VertexDoc};
use crate::linalg::Subspace;
use crate::trivext::Ideal;

/// The ideal `(m)`; `m = 0` is the zero ideal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrincIdeal {
    pub m: BigUint,
}

impl PrincIdeal {
    pub fn new(m: i64) -> Self {
        PrincIdeal { m: BigUint::from(m.unsigned_abs()) }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// `(a) ⊆ (b)` iff `b | a`.
    pub fn is_subset_of(&self, other: &PrincIdeal) -> bool {
        if other.m.is_zero() {
            return self.m.is_zero();
        }
        (&self.m % &other.m).is_zero()
    }

    pub fn sum(ideals: &[PrincIdeal]) -> PrincIdeal {
        let m = ideals.iter().fold(BigUint::zero(), |acc, i| acc.gcd(&i.m));
        PrincIdeal { m }
    }

    pub fn product(ideals: &[PrincIdeal]) -> PrincIdeal {
        let m = ideals.iter().fold(BigUint::one(), |acc, i| acc * &i.m);
        PrincIdeal { m }
    }

    pub fn intersection(ideals: &[PrincIdeal]) -> PrincIdeal {
        let m = ideals.iter().fold(BigUint::one(), |acc, i| acc.lcm(&i.m));
        PrincIdeal { m }
    }
}

/// `(ℤ^d, Σ, Σ')`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZTriple {
    pub d: usize,
    pub sigma: Vec<Vec<i64>>,
    pub sigma_prime: Vec<Vec<i64>>,
}

impl ZTriple {
    pub fn new(d: usize, sigma: Vec<Vec<i64>>, sigma_prime: Vec<Vec<i64>>) -> Result<Self> {
        for x in sigma.iter().chain(&sigma_prime) {
            if x.len() != d {
                return Err(Error::Dimension(format!("vector of length {} in ℤ^{}", x.len(), d)));
            }
            if x.iter().all(|&c| c == 0) {
                return Err(Error::ZeroVector);
            }
        }
        if sigma_prime.iter().any(|x| !sigma.contains(x)) {
            return Err(Error::InvalidModule("Σ' is not contained in Σ".into()));
        }
        Ok(ZTriple { d, sigma, sigma_prime })
    }
}

/// Key of `ℤa`: `ℤa = ℤb` iff `b = ±a`, so the sign is fixed by making the
/// first nonzero entry positive.
pub fn cyclic_key(a: &[i64]) -> Vec<i64> {
    match a.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => a.iter().map(|x| -x).collect(),
        _ => a.to_vec(),
    }
}

/// Primitive vector on the line `ℚa`.
pub fn primitive(a: &[i64]) -> Vec<i64> {
    let g = a.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return a.to_vec();
    }
    cyclic_key(&a.iter().map(|x| x / g).collect::<Vec<_>>())
}

/// All `2 x 2` minors of `[a b]` vanish.
pub fn proportional(a: &[i64], b: &[i64]) -> bool {
    (0..a.len()).tuple_combinations().all(|(i, j)| {
        (a[i] as i128) * (b[j] as i128) == (a[j] as i128) * (b[i] as i128)
    })
}

/// Search for nonzero multiples `r, r'` of `m` with `|r|, |r'| ≤ bound` and
/// `r a = r' b`.
pub fn witness_search(a: &[i64], b: &[i64], m: &BigUint, bound: &BigUint) -> Option<(BigInt, BigInt)> {
    if m.is_zero() {
        return None;
    }
    let m = BigInt::from(m.clone());
    let steps = BigInt::from(bound / m.magnitude());
    let a: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
    let b: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
    let mut k = -steps.clone();
    while k <= steps {
        if !k.is_zero() {
            let r = &k * &m;
            let mut k2 = -steps.clone();
            while k2 <= steps {
                if !k2.is_zero() {
                    let r2 = &k2 * &m;
                    if a.iter().zip(&b).all(|(x, y)| &r * x == &r2 * y) {
                        return Some((r, r2));
                    }
                }
                k2 += 1;
            }
        }
        k += 1;
    }
    None
}

/// Graph of cyclic submodules of `ℤ^d`. Vertices are sorted by key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZGraph {
    pub keys: Vec<Vec<i64>>,
    pub graph: Graph,
}

impl ZGraph {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn to_dot(&self) -> String {
        let labels: Vec<String> = self.keys.iter().map(|k| format!("({})", k.iter().join(","))).collect();
        self.graph.to_dot(&labels)
    }

    pub fn to_doc(&self) -> GraphDoc {
        let vertices = self
            .keys
            .iter()
            .map(|k| VertexDoc { basis: vec![k.clone()], rep: k.clone() })
            .collect();
        self.graph.to_doc(vertices)
    }
}

fn z_vertices(t: &ZTriple) -> Vec<Vec<i64>> {
    t.sigma.iter().map(|a| cyclic_key(a)).collect::<BTreeSet<_>>().into_iter().collect()
}

fn z_marked(keys: &[Vec<i64>], t: &ZTriple) -> Vec<usize> {
    t.sigma_prime
        .iter()
        .map(|a| keys.binary_search(&cyclic_key(a)).expect("Σ' ⊆ Σ"))
        .collect()
}

fn z_graph_by(t: &ZTriple, adjacent: impl Fn(&[i64], &[i64]) -> bool) -> ZGraph {
    let keys = z_vertices(t);
    let mut graph = Graph::discrete(keys.len());
    for (i, j) in (0..keys.len()).tuple_combinations() {
        if adjacent(&keys[i], &keys[j]) {
            graph.add_edge(i, j);
        }
    }
    graph.mark_components_of(&z_marked(&keys, t));
    ZGraph { keys, graph }
}

/// `Γ_{(m)}(ℤ^d, Σ, Σ')`.
pub fn gamma_z(t: &ZTriple, ideal: &PrincIdeal) -> ZGraph {
    let nonzero = !ideal.is_zero();
    z_graph_by(t, |a, b| nonzero && proportional(a, b))
}

/// `Γ` with adjacency decided by [`witness_search`].
pub fn gamma_z_by_witness(t: &ZTriple, ideal: &PrincIdeal, bound: &BigUint) -> ZGraph {
    z_graph_by(t, |a, b| witness_search(a, b, &ideal.m, bound).is_some())
}

/// A bound large enough for [`witness_search`] to find a witness for any
/// proportional pair among the vectors of `t`.
pub fn witness_bound(t: &ZTriple, ideal: &PrincIdeal) -> BigUint {
    let max = t.sigma.iter().flatten().map(|x| x.unsigned_abs()).max().unwrap_or(1);
    &ideal.m * BigUint::from(max)
}

fn z_union(parts: &[ZGraph]) -> ZGraph {
    let refs: Vec<(&[Vec<i64>], &Graph)> = parts.iter().map(|g| (g.keys.as_slice(), &g.graph)).collect();
    let (keys, graph) = keyed_union(&refs);
    ZGraph { keys, graph }
}

fn z_intersection(parts: &[ZGraph]) -> ZGraph {
    let refs: Vec<(&[Vec<i64>], &Graph)> = parts.iter().map(|g| (g.keys.as_slice(), &g.graph)).collect();
    let (keys, graph) = crate::graph::keyed_intersection(&refs);
    ZGraph { keys, graph }
}

/// The three graphs compared by [`intersection_check`].
#[derive(Clone, Debug)]
pub struct IntersectionReport {
    pub product: ZGraph,
    pub intersection: ZGraph,
    pub graph_intersection: ZGraph,
}

impl IntersectionReport {
    pub fn holds(&self) -> bool {
        self.product == self.intersection && self.intersection == self.graph_intersection
    }
}

pub fn intersection_report(t: &ZTriple, ideals: &[PrincIdeal]) -> Result<IntersectionReport> {
    if ideals.is_empty() {
        return Err(Error::Dimension("empty ideal family".into()));
    }
    let product = gamma_z(t, &PrincIdeal::product(ideals));
    let intersection = gamma_z(t, &PrincIdeal::intersection(ideals));
    let parts: Vec<ZGraph> = ideals.iter().map(|i| gamma_z(t, i)).collect();
    Ok(IntersectionReport { product, intersection, graph_intersection: z_intersection(&parts) })
}

/// `Γ_{ΠI_k} = Γ_{∩I_k} = ∩Γ_{I_k}`.
pub fn intersection_check(t: &ZTriple, ideals: &[PrincIdeal]) -> Result<bool> {
    Ok(intersection_report(t, ideals)?.holds())
}

/// Every pair of members has a member containing both.
pub fn is_directed<T>(family: &[T], le: impl Fn(&T, &T) -> bool) -> bool {
    family.iter().all(|a| family.iter().all(|b| family.iter().any(|c| le(a, c) && le(b, c))))
}

/// `Γ_{ΣI} = Γ_{∪I} = ∪Γ_{I}` for a divisibility-directed family.
pub fn directed_union_check_z(t: &ZTriple, family: &[PrincIdeal]) -> Result<bool> {
    if family.is_empty() || !is_directed(family, PrincIdeal::is_subset_of) {
        return Err(Error::NotDirected);
    }
    let sum = gamma_z(t, &PrincIdeal::sum(family));
    // `a` and `b` are joined over the set `∪I` iff `ra = r'b` for nonzero
    // `r, r'` taken from any two members.
    let nonzero = family.iter().any(|i| !i.is_zero());
    let over_union = z_graph_by(t, |a, b| nonzero && proportional(a, b));
    let parts: Vec<ZGraph> = family.iter().map(|i| gamma_z(t, i)).collect();
    let union = z_union(&parts);
    Ok(sum == over_union && over_union == union)
}

fn canonical(g: &CycGraph) -> (Vec<Subspace>, Graph) {
    let keys = g.keys();
    keyed_union(&[(keys.as_slice(), g.graph())])
}

/// The same identity over `F_p ⋉ F_p^n` for an inclusion-directed family of
/// socle ideals `0 ⊕ W`.
pub fn directed_union_check_socle(t: &CTriple, family: &[Subspace]) -> Result<bool> {
    if family.is_empty() || !is_directed(family, |a, b| a.is_subspace_of(b)) {
        return Err(Error::NotDirected);
    }
    let mut total = family[0].clone();
    for w in &family[1..] {
        total = total.sum(w)?;
    }
    let ideals: Vec<Ideal> = family.iter().map(|w| Ideal::soc_sub(w.clone())).collect();
    let sum = canonical(&gamma(t, &Ideal::soc_sub(total))?);

    let parts: Vec<CycGraph> = ideals.iter().map(|i| gamma(t, i)).collect::<Result<_>>()?;
    let keys: Vec<Vec<Subspace>> = parts.iter().map(|g| g.keys()).collect();
    let refs: Vec<(&[Subspace], &Graph)> = keys.iter().zip(&parts).map(|(k, g)| (k.as_slice(), g.graph())).collect();
    let union = keyed_union(&refs);

    // Over the set `∪I`: `a ~ b` iff `I_α a ∩ I_β b ≠ 0` for some members.
    let base = &parts[0];
    let mut over_union = Graph::discrete(base.len());
    let images: Vec<Vec<Subspace>> = base
        .vertices()
        .iter()
        .map(|v| ideals.iter().map(|i| t.module.ideal_image_vec(i, &v.rep)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    for (x, y) in (0..base.len()).tuple_combinations() {
        let hit = images[x]
            .iter()
            .cartesian_product(&images[y])
            .any(|(u, v)| u.meets(v).expect("same ambient"));
        if hit {
            over_union.add_edge(x, y);
        }
    }
    let seeds: Vec<usize> = base.graph().marked();
    over_union.mark_components_of(&seeds);
    let over_union = keyed_union(&[(keys[0].as_slice(), &over_union)]);
    Ok(sum == over_union && over_union == union)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trivext::tests::m_i;

    fn z(sigma: &[&[i64]]) -> ZTriple {
        let d = sigma[0].len();
        ZTriple::new(d, sigma.iter().map(|v| v.to_vec()).collect(), Vec::new()).unwrap()
    }

    #[test]
    fn six_example() {
        let t = z(&[&[1, 0], &[2, 0], &[0, 1]]);
        let g = gamma_z(&t, &PrincIdeal::new(6));
        assert_eq!(g.keys, vec![vec![0, 1], vec![1, 0], vec![2, 0]]);
        assert!(g.graph.adjacent(1, 2));
        assert!(!g.graph.adjacent(0, 1));
        assert!(!g.graph.adjacent(0, 2));
        let w = witness_search(&[1, 0], &[2, 0], &BigUint::from(6u32), &BigUint::from(12u32)).unwrap();
        assert_eq!(w.0, w.1 * 2);
    }

    #[test]
    fn zero_ideal_is_discrete() {
        let t = z(&[&[1, 0], &[2, 0], &[3, 0]]);
        assert!(gamma_z(&t, &PrincIdeal::new(0)).graph.is_discrete());
    }

    #[test]
    fn single_vertex() {
        let t = z(&[&[3, -1], &[-3, 1]]);
        let g = gamma_z(&t, &PrincIdeal::new(5));
        assert_eq!(g.len(), 1);
        assert!(g.graph.adjacent(0, 0));
    }

    #[test]
    fn keys_and_primitive() {
        assert_eq!(cyclic_key(&[0, -2, 4]), vec![0, 2, -4]);
        assert_eq!(primitive(&[0, -2, 4]), vec![0, 1, -2]);
        assert!(proportional(&[2, 4, 6], &[-1, -2, -3]));
        assert!(!proportional(&[1, 0], &[1, 1]));
    }

    #[test]
    fn witness_oracle_agrees() {
        let pairs: [(&[i64], &[i64]); 4] = [(&[1, 2], &[3, 6]), (&[1, 2], &[2, 3]), (&[0, -4], &[0, 6]), (&[5, 0, 1], &[5, 0, 2])];
        for m in [1i64, 2, 6] {
            let m = PrincIdeal::new(m);
            for (a, b) in pairs {
                let t = z(&[a, b]);
                let bound = witness_bound(&t, &m);
                assert_eq!(witness_search(a, b, &m.m, &bound).is_some(), proportional(a, b));
            }
        }
    }

    #[test]
    fn independent_of_m() {
        let t = z(&[&[1, 1], &[2, 2], &[1, -1], &[0, 3]]);
        let g1 = gamma_z(&t, &PrincIdeal::new(1));
        for m in [2, 3, 12] {
            assert_eq!(gamma_z(&t, &PrincIdeal::new(m)), g1);
        }
    }

    #[test]
    fn ideal_arithmetic() {
        let fam = [PrincIdeal::new(4), PrincIdeal::new(6)];
        assert_eq!(PrincIdeal::sum(&fam), PrincIdeal::new(2));
        assert_eq!(PrincIdeal::product(&fam), PrincIdeal::new(24));
        assert_eq!(PrincIdeal::intersection(&fam), PrincIdeal::new(12));
        assert!(PrincIdeal::new(4).is_subset_of(&PrincIdeal::new(2)));
        assert!(!PrincIdeal::new(2).is_subset_of(&PrincIdeal::new(4)));
        assert!(PrincIdeal::new(0).is_subset_of(&PrincIdeal::new(7)));
    }

    #[test]
    fn intersection_identity() {
        let mut t = z(&[&[1, 0], &[2, 0], &[0, 1], &[3, 3]]);
        t.sigma_prime = vec![vec![2, 0]];
        assert!(intersection_check(&t, &[PrincIdeal::new(2), PrincIdeal::new(3)]).unwrap());
        assert!(intersection_check(&t, &[PrincIdeal::new(5)]).unwrap());
        let r = intersection_report(&t, &[PrincIdeal::new(2), PrincIdeal::new(3)]).unwrap();
        assert_eq!(r.product.graph.marked(), vec![1, 2]);
    }

    #[test]
    fn directed_family_z() {
        let t = z(&[&[1, 0], &[2, 0], &[0, 1]]);
        assert!(directed_union_check_z(&t, &[PrincIdeal::new(4), PrincIdeal::new(2)]).unwrap());
        assert!(directed_union_check_z(&t, &[PrincIdeal::new(4)]).unwrap());
        assert_eq!(
            directed_union_check_z(&t, &[PrincIdeal::new(4), PrincIdeal::new(6)]),
            Err(Error::NotDirected)
        );
    }

    #[test]
    fn directed_family_socle() {
        let m = m_i(3, 2, 1);
        let f = m.field();
        let w1 = Subspace::span(f, 2, &[vec![1, 0]]).unwrap();
        let w2 = Subspace::full(f, 2);
        let gens = m.generators();
        let sigma = vec![gens[0].clone(), gens[1].clone(), f.add_vec(&gens[0], &gens[1])];
        let t = CTriple::new(m, sigma, Vec::new()).unwrap();
        assert!(directed_union_check_socle(&t, &[w1.clone(), w2.clone()]).unwrap());
        assert!(directed_union_check_socle(&t, &[w2]).unwrap());
        let w3 = Subspace::span(f, 2, &[vec![0, 1]]).unwrap();
        assert_eq!(directed_union_check_socle(&t, &[w1, w3]), Err(Error::NotDirected));
    }

    #[test]
    fn graph_doc_round_trip() {
        let mut t = z(&[&[1, 0], &[2, 0], &[0, 1]]);
        t.sigma_prime = vec![vec![0, 1]];
        let g = gamma_z(&t, &PrincIdeal::new(6));
        let doc = GraphDoc::from_json(&g.to_doc().to_json()).unwrap();
        assert_eq!(doc.to_graph().unwrap(), g.graph);
        assert!(g.to_dot().contains("v0 [label=\"(0,1)\", marked=true, style=filled];"));
    }
}
