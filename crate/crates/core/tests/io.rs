use std::sync::Arc;

use dgbv_core::error::Error;
use dgbv_core::io::{emit_instance, parse_instance, InstanceFile, MorphismFile};
use dgbv_core::models::{acyclic_extension, bv_toy_model, exterior_model, heisenberg, six_dim_example, tensor};
use dgbv_core::morphism::relabel;

fn samples() -> Vec<dgbv_core::dgbv::DgbvInstance> {
    let e = acyclic_extension().unwrap();
    let t2 = exterior_model(2).unwrap();
    vec![
        t2.clone(),
        exterior_model(3).unwrap(),
        heisenberg().unwrap(),
        six_dim_example().unwrap(),
        bv_toy_model(2).unwrap(),
        e.clone(),
        tensor(&t2, &e).unwrap(),
    ]
}

#[test]
fn round_trip_is_exact_and_byte_stable() {
    for a in samples() {
        let text = emit_instance(&a);
        let b = parse_instance(&text).unwrap();
        assert_eq!(a, b, "{}", a.name());
        assert_eq!(emit_instance(&b), text);
    }
}

#[test]
fn hand_written_torus() {
    let text = r#"{
      "format_version": 1, "field": "Q", "name": "torus-2",
      "basis": [{"label": "t1t2", "degree": 2}, {"label": "1", "degree": 0},
                {"label": "t2", "degree": 1}, {"label": "t1", "degree": 1}],
      "unit": "1",
      "multiplication": [["1","1","1","1"], ["1","t1","t1","1"], ["t1","1","t1","1"],
        ["1","t2","t2","1"], ["t2","1","t2","1"], ["1","t1t2","t1t2","1"], ["t1t2","1","t1t2","1"],
        ["t1","t2","t1t2","1"], ["t2","t1","t1t2","-1"]],
      "integral": [["t1t2", "1"]]
    }"#;
    let a = parse_instance(text).unwrap();
    assert_eq!(a, exterior_model(2).unwrap());
    assert!(a.check_axioms().all_pass());
}

#[test]
fn parse_errors_carry_position() {
    let err = parse_instance("{\n  \"format_version\": 1,\n  \"field\": \"Q\" oops }").unwrap_err();
    match err {
        Error::Parse(m) => assert!(m.contains("line 3 column"), "{m}"),
        e => panic!("{e:?}"),
    }
}

#[test]
fn invalid_content_is_reported() {
    let base = InstanceFile::from_instance(&exterior_model(1).unwrap());
    let mut f = base.clone();
    f.multiplication.push(("t1".into(), "t1".into(), "nope".into(), "1".into()));
    assert!(matches!(f.to_instance(), Err(Error::Parse(_))));
    let mut f = base.clone();
    f.delta.push(("t1".into(), "1".into(), "1/0".into()));
    assert!(matches!(f.to_instance(), Err(Error::Parse(_))));
    let mut f = base.clone();
    f.field = "R".into();
    assert!(f.to_instance().is_err());
    let mut f = base;
    f.format_version = 2;
    assert!(f.to_instance().is_err());
    assert!(parse_instance(r#"{"format_version":1,"field":"Q","basis":[],"extra":1}"#).is_err());
}

#[test]
fn morphism_file_round_trip() {
    let a = Arc::new(six_dim_example().unwrap());
    let labels: Vec<String> = (0..a.dim()).map(|i| format!("w{i}")).collect();
    let (copy, m) = relabel(&a, &labels).unwrap();
    let f = MorphismFile::from_morphism(&m);
    let back = MorphismFile::parse(&f.to_json()).unwrap().to_morphism(a.clone(), copy.clone()).unwrap();
    assert_eq!(back.map, m.map);
    assert!(f.to_morphism(copy, a).is_err());
}
