use std::sync::Arc;
use std::time::Instant;

use dgbv_core::dgbv::{CheckStatus, DgbvInstance, InstanceBuilder};
use dgbv_core::graded::{int, Scalar};
use dgbv_core::homology::{cohomology, Differential};
use dgbv_core::linalg::Matrix;
use dgbv_core::models::{acyclic_extension, exterior_model, six_dim_example};
use dgbv_core::morphism::{
    check_morphism, check_quasi_iso, compare_potentials, relabel, unit_inclusion, DgbvMorphism,
    Direction, ZigZag,
};

fn torus() -> Arc<DgbvInstance> {
    Arc::new(exterior_model(2).unwrap())
}

fn six() -> Arc<DgbvInstance> {
    Arc::new(six_dim_example().unwrap())
}

fn reversed_labels(a: &DgbvInstance) -> Vec<String> {
    let n = a.dim();
    (0..n).map(|i| format!("v{:02}", n - i)).collect()
}

#[test]
fn identity_morphism() {
    for a in [torus(), six()] {
        let m = DgbvMorphism::identity(a.clone());
        assert!(check_morphism(&m).all_pass());
        let q = check_quasi_iso(&m).unwrap();
        assert!(q.is_quasi_iso());
        assert_eq!(q.h_delta, Matrix::identity(q.delta.source_dim));
        let c = compare_potentials(&m, 6).unwrap();
        assert!(c.identified(), "{}", c.residual);
    }
}

#[test]
fn scaling_a_basis_vector_breaks_multiplicativity() {
    let a = torus();
    let entries: Vec<(String, String, Scalar)> = a
        .space()
        .labels()
        .iter()
        .map(|l| (l.clone(), l.clone(), if l == "t1" { int(2) } else { int(1) }))
        .collect();
    let m = DgbvMorphism::from_labels(a.clone(), a.clone(), &entries).unwrap();
    let report = check_morphism(&m);
    let mult = report.get("multiplicative").unwrap();
    assert_eq!(mult.status, CheckStatus::Fail);
    let w = mult.witness.as_ref().unwrap();
    assert!(w.basis.contains(&"t1".to_string()));
    assert_eq!(report.get("integral_compatible").unwrap().status, CheckStatus::Pass);
    // scaling the top class instead breaks the integral
    let entries: Vec<(String, String, Scalar)> = a
        .space()
        .labels()
        .iter()
        .map(|l| (l.clone(), l.clone(), if l == "t1t2" { int(2) } else { int(1) }))
        .collect();
    let m = DgbvMorphism::from_labels(a.clone(), a.clone(), &entries).unwrap();
    assert_eq!(check_morphism(&m).get("integral_compatible").unwrap().status, CheckStatus::Fail);
}

fn betti(a: &DgbvInstance, which: Differential) -> Vec<(i32, usize)> {
    cohomology(a, which).unwrap().betti.into_iter().filter(|x| x.1 > 0).collect()
}

#[test]
fn acyclic_extension_inclusion() {
    let e = acyclic_extension().unwrap();
    for a in [torus(), six()] {
        let (ae, m) = unit_inclusion(&a, &e).unwrap();
        assert!(check_morphism(&m).all_pass());
        assert_eq!(betti(&a, Differential::Delta), betti(&ae, Differential::Delta));
        assert_eq!(betti(&a, Differential::Bv), betti(&ae, Differential::Bv));
        let q = check_quasi_iso(&m).unwrap();
        assert!(q.is_quasi_iso());
        assert_eq!(q.h_delta.rank(), q.delta.source_dim);
    }
}

#[test]
fn acyclic_extension_potentials_agree() {
    let e = acyclic_extension().unwrap();
    for a in [torus(), six()] {
        let t = Instant::now();
        let (_, m) = unit_inclusion(&a, &e).unwrap();
        let c = compare_potentials(&m, 6).unwrap();
        assert!(c.residual.is_zero(), "{}: {}", a.name(), c.residual);
        assert!(c.identified());
        println!("{}: {:?}", a.name(), t.elapsed());
    }
}

#[test]
fn proper_subalgebra_is_not_quasi_iso() {
    let point = Arc::new(
        InstanceBuilder::new("point").basis("1", 0).unit_products("1").build().unwrap(),
    );
    let a = torus();
    let m = DgbvMorphism::from_labels(point, a, &[("1".into(), "1".into(), int(1))]).unwrap();
    let report = check_morphism(&m);
    assert!(report.all_pass());
    assert_eq!(report.get("integral_compatible").unwrap().status, CheckStatus::NotApplicable);
    let q = check_quasi_iso(&m).unwrap();
    assert!(!q.is_quasi_iso());
    assert_eq!((q.delta.source_dim, q.delta.target_dim, q.delta.rank), (1, 4, 1));
}

#[test]
fn permuted_basis_potentials_agree() {
    for a in [torus(), six(), Arc::new(exterior_model(3).unwrap())] {
        let (copy, m) = relabel(&a, &reversed_labels(&a)).unwrap();
        assert_ne!(copy.space().labels(), a.space().labels());
        assert!(check_morphism(&m).all_pass());
        let q = check_quasi_iso(&m).unwrap();
        assert!(q.is_quasi_iso());
        let c = compare_potentials(&m, 6).unwrap();
        assert!(c.identified(), "{}: {}", a.name(), c.residual);
    }
}

#[test]
fn torus_permutation_transport_by_hand() {
    // swapping t1 and t2 sends x[t1] to x[t2] and flips the sign of t1t2
    let a = torus();
    let entries = vec![
        ("1".to_string(), "1".to_string(), int(1)),
        ("t1".into(), "t2".into(), int(1)),
        ("t2".into(), "t1".into(), int(1)),
        ("t1t2".into(), "t1t2".into(), int(-1)),
    ];
    let m = DgbvMorphism::from_labels(a.clone(), a.clone(), &entries).unwrap();
    let report = check_morphism(&m);
    // the integral is not preserved by an orientation reversal
    assert_eq!(report.get("multiplicative").unwrap().status, CheckStatus::Pass);
    assert_eq!(report.get("integral_compatible").unwrap().status, CheckStatus::Fail);
    let q = check_quasi_iso(&m).unwrap();
    assert!(q.is_quasi_iso());
    let mut want = Matrix::zeros(4, 4);
    want[(0, 0)] = int(1);
    want[(2, 1)] = int(1);
    want[(1, 2)] = int(1);
    want[(3, 3)] = int(-1);
    assert_eq!(q.h_delta, want);
    // Φ is not preserved either: the cubic terms change sign
    let c = compare_potentials(&m, 6).unwrap();
    assert!(!c.residual.is_zero());
}

#[test]
fn quasi_iso_invariant_under_isomorphisms() {
    let e = acyclic_extension().unwrap();
    let a = six();
    let (ae, incl) = unit_inclusion(&a, &e).unwrap();
    let (_, iso) = relabel(&ae, &reversed_labels(&ae)).unwrap();
    let composed = incl.compose(&iso).unwrap();
    assert!(check_morphism(&composed).all_pass());
    assert!(check_quasi_iso(&composed).unwrap().is_quasi_iso());
    let (_, pre) = relabel(&a, &reversed_labels(&a)).unwrap();
    let before = DgbvMorphism::new(pre.target.clone(), a.clone(), pre.map.clone());
    assert!(before.is_err());
}

#[test]
fn zigzag_chain() {
    let e = acyclic_extension().unwrap();
    let a = torus();
    let (_, incl) = unit_inclusion(&a, &e).unwrap();
    let (_, perm) = relabel(&a, &reversed_labels(&a)).unwrap();
    let z = ZigZag::new(vec![(incl.clone(), Direction::Backward), (perm.clone(), Direction::Forward)]).unwrap();
    assert_eq!(z.algebras().unwrap().len(), 3);
    for (report, q) in z.verify().unwrap() {
        assert!(report.all_pass());
        assert!(q.is_quasi_iso());
    }
    let c = z.compare_potentials(6).unwrap();
    assert!(c.identified(), "{}", c.residual);
    assert!(ZigZag::new(vec![(incl, Direction::Forward), (perm, Direction::Forward)]).is_err());
}
