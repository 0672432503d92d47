use proptest::prelude::*;

use combdim::graph::{gamma_full, GraphDoc};
use combdim::linalg::{FpMatrix, Subspace, DEFAULT_ENUMERATION_BUDGET as B};
use combdim::suites::{random_domain_module, random_presentation, rng_for};
use combdim::towers::{build, AdmSeq};
use combdim::trivext::{AModule, Algebra};
use combdim::zdomain::{gamma_z, PrincIdeal, ZTriple};

fn matrix(p: u32, rows: usize, cols: usize) -> impl Strategy<Value = FpMatrix> {
    proptest::collection::vec(0..p, rows * cols).prop_map(move |data| FpMatrix::new(p, rows, cols, data).unwrap())
}

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7])
}

proptest! {
    #[test]
    fn rank_nullity(p in prime(), (r, c) in (1usize..6, 1usize..6), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let m = combdim::suites::random_matrix(&mut rng, combdim::linalg::Field::new(p).unwrap(), r, c);
        prop_assert_eq!(m.rank() + m.kernel().dim(), c);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in m.kernel().basis_vectors() {
            prop_assert!(m.mul_vec(&v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn multiplication_is_associative(a in matrix(5, 3, 4), b in matrix(5, 4, 2), c in matrix(5, 2, 3)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn inverse_is_two_sided(a in matrix(3, 4, 4)) {
        let id = FpMatrix::identity(a.field(), 4);
        match a.inverse() {
            Some(inv) => {
                prop_assert_eq!(a.mul(&inv), id.clone());
                prop_assert_eq!(inv.mul(&a), id);
            }
            None => prop_assert!(a.rank() < 4),
        }
    }

    #[test]
    fn subspace_dimension_formula(u in matrix(2, 3, 5), w in matrix(2, 2, 5)) {
        let f = u.field();
        let u = Subspace::span(f, 5, &u.row_vectors().map(<[u32]>::to_vec).collect::<Vec<_>>()).unwrap();
        let w = Subspace::span(f, 5, &w.row_vectors().map(<[u32]>::to_vec).collect::<Vec<_>>()).unwrap();
        let s = u.sum(&w).unwrap();
        let i = u.intersect(&w).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
        prop_assert!(i.is_subspace_of(&u) && i.is_subspace_of(&w));
        prop_assert!(u.is_subspace_of(&s) && w.is_subspace_of(&s));
    }

    #[test]
    fn presentations_satisfy_the_module_axioms(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3]), n in 1usize..4) {
        let mut rng = rng_for(seed, 1);
        let m = random_presentation(&mut rng, Algebra::new(p, n).unwrap(), 2, 3);
        let ts = m.actions();
        for a in ts {
            for b in ts {
                prop_assert!(a.mul(b).is_zero());
            }
        }
        prop_assert!(m.radical_module().is_subspace_of(&m.socle()));
        let back = AModule::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn graph_json_round_trip(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 2);
        if let Some(m) = random_domain_module(&mut rng, 2, 6) {
            let g = gamma_full(&m, &m.algebra().radical(), B).unwrap();
            let doc = g.to_doc();
            let back = GraphDoc::from_json(&doc.to_json()).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_graph().unwrap().component_count(), g.component_count());
        }
    }

    #[test]
    fn principal_ideal_lattice(a in -30i64..30, b in -30i64..30) {
        let (ia, ib) = (PrincIdeal::new(a), PrincIdeal::new(b));
        let meet = PrincIdeal::intersection(&[ia.clone(), ib.clone()]);
        let join = PrincIdeal::sum(&[ia.clone(), ib.clone()]);
        let prod = PrincIdeal::product(&[ia.clone(), ib.clone()]);
        prop_assert!(prod.is_subset_of(&meet));
        prop_assert!(meet.is_subset_of(&ia) && meet.is_subset_of(&ib));
        prop_assert!(ia.is_subset_of(&join) && ib.is_subset_of(&join));
    }

    #[test]
    fn integer_graph_of_zero_ideal_is_discrete(vs in proptest::collection::vec(proptest::collection::vec(-4i64..5, 2), 1..6)) {
        let vs: Vec<Vec<i64>> = vs.into_iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
        prop_assume!(!vs.is_empty());
        let t = ZTriple::new(2, vs, vec![]).unwrap();
        let g = gamma_z(&t, &PrincIdeal::new(0));
        prop_assert!(g.graph.is_discrete());
    }
}

#[test]
fn tower_levels_extend_their_truncations() {
    for p in [2u32, 3] {
        let root = AdmSeq::empty(p, 4).unwrap();
        let mut frontier = vec![root];
        for _ in 0..3 {
            frontier = frontier.iter().flat_map(AdmSeq::extensions).collect();
            for seq in &frontier {
                let level = build(seq).unwrap();
                let want = 4 + seq.terms().iter().sum::<usize>();
                assert_eq!(level.module.goldie_dim(), want, "{}", seq);
                assert!(level.module.in_decomposition_domain(&level.module.algebra().radical()).unwrap(), "{}", seq);
                if p == 2 {
                    assert!(seq.terms().iter().all(|&i| i > 2), "{}", seq);
                }
            }
        }
    }
}

#[test]
fn errors_are_reported_not_panicked() {
    assert!(Algebra::new(4, 2).is_err());
    assert!(FpMatrix::new(3, 2, 2, vec![0, 1, 2, 3]).is_err());
    assert!(AdmSeq::new(3, 3, vec![1, 2]).is_err());
    assert!(AModule::from_json("{\"p\":3}").is_err());
    let a = AModule::free(Algebra::new(2, 3).unwrap(), 2);
    assert!(gamma_full(&a, &a.algebra().radical(), 10).is_err());
}
