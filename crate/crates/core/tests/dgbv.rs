use dgbv_core::dgbv::{CheckStatus, InstanceBuilder};
use dgbv_core::graded::{int, Element, LinearOperator};
use dgbv_core::models::{
    acyclic_extension, bv_toy_model, exterior_model, heisenberg, six_dim_example, tensor,
};

fn idx(a: &dgbv_core::dgbv::DgbvInstance, l: &str) -> Element {
    Element::basis(a.space().index_of(l).unwrap())
}

#[test]
fn torus_products() {
    let a = exterior_model(2).unwrap();
    let (t1, t2, t12) = (idx(&a, "t1"), idx(&a, "t2"), idx(&a, "t1t2"));
    assert_eq!(a.multiply(&t1, &t2).unwrap(), t12);
    assert!(a.multiply(&t1, &t1).unwrap().is_zero());
    assert_eq!(a.multiply(&t2, &t1).unwrap(), -&t12);
}

#[test]
fn bracket_vanishes_when_bv_is_zero() {
    let a = exterior_model(3).unwrap();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            assert!(a.bracket_basis(i, j).is_zero());
        }
    }
}

#[test]
fn toy_model_brackets() {
    let a = bv_toy_model(3).unwrap();
    let (x, xi, one) = (idx(&a, "x"), idx(&a, "xi"), idx(&a, "1"));
    // Δ(x ξ) = 1, Δx = 0, Δξ = 0
    assert_eq!(a.bracket(&x, &xi).unwrap(), one);
    assert!(a.bracket(&xi, &xi).unwrap().is_zero());
}

#[test]
fn torus_axioms_pass() {
    for n in 1..=4 {
        let r = exterior_model(n).unwrap().check_axioms();
        assert!(r.all_pass(), "{r:?}");
    }
}

fn corrupt(n: u32) -> dgbv_core::dgbv::DgbvInstance {
    let a = exterior_model(n).unwrap();
    let s = a.space().clone();
    let t1 = s.index_of("t1").unwrap();
    let one = s.index_of("1").unwrap();
    let bv = LinearOperator::from_entries(s.clone(), s, -1, [(t1, one, int(1))]).unwrap();
    a.with_bv(bv)
}

#[test]
fn corrupted_torus_fails_with_witness() {
    let r = corrupt(3).check_axioms();
    assert!(!r.all_pass());
    let first = r.first_failure().unwrap();
    assert_eq!(first.name, "odd_poisson");
    let w = first.witness.as_ref().unwrap();
    assert_eq!(w.basis, vec!["t1", "t2", "t3"]);
    assert_eq!(r.get("bv_square_zero").unwrap().status, CheckStatus::Pass);
}

#[test]
fn corrupted_two_torus_is_still_bv() {
    // on two generators every odd degree -1 operator killing 1 is of order two
    assert!(corrupt(2).check_axioms().all_pass());
}

#[test]
fn toy_model_is_not_bv() {
    let r = bv_toy_model(3).unwrap().check_axioms();
    assert_eq!(r.first_failure().unwrap().name, "odd_poisson");
    assert_eq!(r.get("bracket_antisymmetry").unwrap().status, CheckStatus::Pass);
    assert_eq!(r.get("bracket_jacobi").unwrap().status, CheckStatus::Fail);
}

#[test]
fn hand_instances_pass() {
    for a in [heisenberg().unwrap(), six_dim_example().unwrap(), acyclic_extension().unwrap()] {
        let r = a.check_axioms();
        assert!(r.all_pass(), "{}: {:?}", a.name(), r.first_failure());
    }
    let t = tensor(&six_dim_example().unwrap(), &exterior_model(2).unwrap()).unwrap();
    assert!(t.check_axioms().all_pass(), "{:?}", t.check_axioms().first_failure());
}

#[test]
fn six_dim_bracket_is_nonzero() {
    let a = six_dim_example().unwrap();
    let al = idx(&a, "a");
    assert_eq!(a.bracket(&al, &al).unwrap(), idx(&a, "q"));
}

#[test]
fn missing_unit_is_not_applicable() {
    let a = InstanceBuilder::new("u").basis("u", 0).basis("v", 1).delta("u", "v", int(1)).build().unwrap();
    let r = a.check_axioms();
    assert_eq!(r.get("unit_law").unwrap().status, CheckStatus::NotApplicable);
    assert!(r.all_pass());
}

#[test]
fn deformed_differential() {
    let a = heisenberg().unwrap();
    let d0 = a.deformed_differential(&Element::zero()).unwrap();
    for i in 0..a.dim() {
        assert_eq!(d0.apply(&Element::basis(i)), a.apply_delta(&Element::basis(i)));
    }
}

