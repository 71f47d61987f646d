use dgbv_core::dgbv::{DgbvInstance, InstanceBuilder};
use dgbv_core::error::Error;
use dgbv_core::graded::{int, koszul_sign, q, Element, Scalar};
use dgbv_core::homology::{
    check_conditions, check_integral, cohomology, decomposition, metric_eta, Differential,
};
use dgbv_core::models::{
    acyclic_extension, bv_toy_model, exterior_model, heisenberg, six_dim_example, tensor,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn el(a: &DgbvInstance, l: &str) -> Element {
    Element::basis(a.space().index_of(l).unwrap())
}

fn two_term() -> DgbvInstance {
    InstanceBuilder::new("two-term").basis("u", 0).basis("v", 1).delta("u", "v", int(1)).build().unwrap()
}

#[test]
fn zero_differential_gives_everything() {
    let a = exterior_model(2).unwrap();
    let h = cohomology(&a, Differential::Delta).unwrap();
    assert_eq!(h.dim(), 4);
    assert_eq!(h.unit_index, Some(0));
    assert_eq!(h.labels, vec!["1", "t1", "t2", "t1t2"]);
    let d = decomposition(&a).unwrap();
    assert!(d.m.is_empty() && d.dm.is_empty() && d.q.is_zero());
}

#[test]
fn two_term_complex_is_acyclic() {
    let a = two_term();
    let h = cohomology(&a, Differential::Delta).unwrap();
    assert_eq!(h.dim(), 0);
    let d = decomposition(&a).unwrap();
    assert_eq!(d.m, vec![el(&a, "u")]);
    assert_eq!(d.q.apply(&el(&a, "v")).unwrap(), el(&a, "u"));
    assert!(d.q.apply(&el(&a, "u")).unwrap().is_zero());
}

#[test]
fn heisenberg_betti_numbers() {
    let h = cohomology(&heisenberg().unwrap(), Differential::Delta).unwrap();
    assert_eq!(h.betti_list(), vec![(0, 1), (1, 2), (2, 2), (3, 1)]);
}

#[test]
fn not_square_zero_is_rejected() {
    let a = InstanceBuilder::new("bad")
        .basis("u", 0)
        .basis("v", 1)
        .basis("w", 2)
        .delta("u", "v", int(1))
        .delta("v", "w", int(1))
        .build()
        .unwrap();
    assert!(matches!(cohomology(&a, Differential::Delta), Err(Error::NotSquareZero(_))));
}

#[test]
fn decompositions_satisfy_invariants() {
    let models = [
        exterior_model(3).unwrap(),
        heisenberg().unwrap(),
        six_dim_example().unwrap(),
        acyclic_extension().unwrap(),
        tensor(&six_dim_example().unwrap(), &exterior_model(2).unwrap()).unwrap(),
        bv_toy_model(3).unwrap(),
    ];
    for a in &models {
        let d = decomposition(a).unwrap();
        let h = &d.cohomology;
        for (deg, b) in &h.betti {
            let count = h.degrees.iter().filter(|x| *x == deg).count();
            assert_eq!(count, *b);
        }
        for r in h.representatives.iter() {
            assert!(a.apply_delta(r).is_zero());
        }
        for (i, r) in h.representatives.iter().enumerate() {
            let mut e = vec![Scalar::zero(); h.dim()];
            e[i] = int(1);
            assert_eq!(h.class_of(a, r).unwrap(), e);
            assert_eq!(d.harmonic_coords(r), e);
        }
        // δ injective on M
        let images: Vec<Vec<Scalar>> = d.m.iter().map(|m| a.apply_delta(m).to_dense(a.dim())).collect();
        assert_eq!(dgbv_core::linalg::span_rank(a.dim(), &images), d.m.len());
    }
}

#[test]
fn six_dim_decomposition_is_bv_compatible() {
    let a = six_dim_example().unwrap();
    let d = decomposition(&a).unwrap();
    assert_eq!(d.cohomology.labels, vec!["1", "a"]);
    assert_eq!(d.q.apply(&el(&a, "q")).unwrap(), -&el(&a, "p"));
    for r in d.harmonic() {
        assert!(a.apply_bv(r).is_zero());
    }
}

#[test]
fn integral_identities() {
    let a = exterior_model(2).unwrap();
    let r = check_integral(&a).unwrap();
    assert!(r.passes() && !r.degenerate);

    let zero = a.clone().with_integral(Some(vec![Scalar::zero(); 4]));
    let r = check_integral(&zero).unwrap();
    assert!(r.passes() && r.degenerate);
    let h = cohomology(&zero, Differential::Delta).unwrap();
    assert!(matches!(metric_eta(&zero, &h), Err(Error::NotNice { .. })));

    let mut v = vec![Scalar::zero(); 4];
    v[a.space().index_of("t1t2").unwrap()] = int(1);
    v[a.space().index_of("t1").unwrap()] = q(3, 2);
    let mixed = a.clone().with_integral(Some(v));
    assert!(check_integral(&mixed).unwrap().passes());

    assert!(matches!(check_integral(&a.with_integral(None)), Err(Error::IntegralAbsent)));
}

#[test]
fn torus_metrics() {
    let a = exterior_model(2).unwrap();
    let h = cohomology(&a, Differential::Delta).unwrap();
    let m = metric_eta(&a, &h).unwrap();
    // antidiagonal: η(1, t1t2) = 1, η(t1, t2) = 1, η(t2, t1) = -1
    assert_eq!(m.eta[(0, 3)], int(1));
    assert_eq!(m.eta[(3, 0)], int(1));
    assert_eq!(m.eta[(1, 2)], int(1));
    assert_eq!(m.eta[(2, 1)], int(-1));
    assert_eq!(m.eta[(1, 1)], int(0));

    let a = exterior_model(4).unwrap();
    let h = cohomology(&a, Differential::Delta).unwrap();
    let m = metric_eta(&a, &h).unwrap();
    let pos = |l: &str| h.labels.iter().position(|x| x == l).unwrap();
    // θ1θ3 · θ2θ4 reorders (0,2,1,3): one odd transposition
    let expect = koszul_sign(&[0, 2, 1, 3], &[1, 1, 1, 1]).unwrap();
    assert_eq!(m.eta[(pos("t1t2"), pos("t3t4"))], int(1));
    assert_eq!(m.eta[(pos("t1t3"), pos("t2t4"))], expect);
    assert_eq!(expect, int(-1));
}

#[test]
fn metric_invariant_under_exact_shift() {
    let a = tensor(&six_dim_example().unwrap(), &exterior_model(2).unwrap()).unwrap();
    let d = decomposition(&a).unwrap();
    let h = &d.cohomology;
    let base = metric_eta(&a, h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let mut reps = h.representatives.clone();
        for r in reps.iter_mut() {
            let deg = r.degree_in(a.space()).unwrap();
            let mut shift = Element::zero();
            for m in d.m.iter().filter(|m| m.degree_in(a.space()) == Some(deg - 1)) {
                shift.add_scaled(&a.apply_delta(m), &int(rng.gen_range(-5..=5)));
            }
            r.add_scaled(&shift, &int(1));
        }
        let eta = dgbv_core::homology::pairing_matrix(&a, &reps);
        assert_eq!(eta, base.eta);
    }
}

#[test]
fn conditions() {
    for n in 1..=4 {
        assert!(check_conditions(&exterior_model(n).unwrap()).unwrap().all_hold());
    }
    assert!(check_conditions(&six_dim_example().unwrap()).unwrap().all_hold());
    let toy = check_conditions(&bv_toy_model(3).unwrap()).unwrap();
    assert!(!toy.condition_iii.holds());
    let toy_iii = &toy.condition_iii.kernel_bv;
    assert_eq!(toy_iii.cohomology_dim, 6);
    let heis = check_conditions(&heisenberg().unwrap()).unwrap();
    assert!(heis.nice);
    assert!(!heis.condition_iii.kernel_delta.holds());
    let ext = tensor(&exterior_model(2).unwrap(), &acyclic_extension().unwrap()).unwrap();
    assert!(check_conditions(&ext).unwrap().all_hold());
}
