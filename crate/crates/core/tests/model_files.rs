use approx::assert_relative_eq;
use num_complex::Complex64;
use resolab::linalg::CMat;
use resolab::model::{builtin_model, load_model_str, BUILTIN_NAMES};
use resolab::oracle::Contour;
use resolab::resonances::find_resonances;
use resolab::{with_tolerances, Error, Tolerances};

const SCALAR: &str = r#"{
  "name": "scalar",
  "dim_k": 1,
  "dim_e": 1,
  "h_e": [[[1.0, 0.0]]],
  "coupling": [[{"num": [[0.5, 0.0]], "den": [[0.0, 1.0], [1.0, 0.0]]}]]
}"#;

fn schema_path(err: Error) -> String {
    match err {
        Error::Schema { path, .. } => path,
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn builtins_round_trip() {
    for name in BUILTIN_NAMES.iter().chain(&["conjugate-pair"]) {
        let m = builtin_model(name).unwrap();
        let back = load_model_str(&m.to_json()).unwrap();
        assert_eq!(back, m, "{name}");
        assert_eq!(back.to_json(), m.to_json());
    }
}

#[test]
fn hand_written_document_loads() {
    let m = load_model_str(SCALAR).unwrap();
    assert_eq!((m.dim_k(), m.dim_e()), (1, 1));
    let v = m.coupling().eval(Complex64::new(0.0, 0.0)).unwrap()[(0, 0)];
    assert_relative_eq!(v.re, 0.0, epsilon = 1e-15);
    assert_relative_eq!(v.im, -0.5, epsilon = 1e-15);
}

#[test]
fn real_pole_is_non_integrable() {
    // 1 / (λ − 0.3)
    let doc = SCALAR.replace(r#""den": [[0.0, 1.0], [1.0, 0.0]]"#, r#""den": [[-0.3, 0.0], [1.0, 0.0]]"#);
    match load_model_str(&doc) {
        Err(Error::NonIntegrable(msg)) => assert!(msg.contains("0.3"), "{msg}"),
        other => panic!("expected a non-integrable coupling, got {other:?}"),
    }
}

#[test]
fn non_hermitian_h_e_names_the_invariant() {
    let doc = SCALAR.replace("[[[1.0, 0.0]]]", "[[[1.0, 0.5]]]");
    match load_model_str(&doc) {
        Err(Error::Invariant { name, .. }) => assert_eq!(name, "hermitian"),
        other => panic!("expected a hermiticity failure, got {other:?}"),
    }
}

#[test]
fn hermiticity_slack_tracks_the_perturbation() {
    let m = builtin_model("paper-1d").unwrap();
    let h = CMat::from_element(1, 1, Complex64::new(1.0, 1e-6));
    let report = m.with_h_e(&h).unwrap().validate();
    let check = report.check("hermitian").unwrap();
    assert!(!check.pass);
    assert_relative_eq!(check.slack, 1e-6, max_relative = 1e-9);
    assert!(report.check("real_regular").unwrap().pass);
}

#[test]
fn slow_coupling_fails_decay() {
    // λ / (λ + i)
    let doc = SCALAR.replace(r#""num": [[0.5, 0.0]]"#, r#""num": [[0.0, 0.0], [1.0, 0.0]]"#);
    match load_model_str(&doc) {
        Err(Error::Invariant { name, .. }) => assert_eq!(name, "decay"),
        other => panic!("expected a decay failure, got {other:?}"),
    }
}

#[test]
fn schema_errors_carry_paths() {
    let two = r#"{
      "name": "two",
      "dim_k": 1,
      "dim_e": 2,
      "h_e": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0]]],
      "coupling": [[{"num": [[1.0, 0.0]], "den": [[0.0, 1.0], [1.0, 0.0]]},
                    {"num": [[1.0, 0.0]], "den": [[0.0, 1.0], [1.0, 0.0]]}]]
    }"#;
    assert_eq!(schema_path(load_model_str(two).unwrap_err()), "h_e[1]");

    let zero_den = SCALAR.replace(r#""den": [[0.0, 1.0], [1.0, 0.0]]"#, r#""den": [[0.0, 0.0]]"#);
    assert_eq!(schema_path(load_model_str(&zero_den).unwrap_err()), "coupling[0][0].den");

    let bad_number = SCALAR.replace(r#""num": [[0.5, 0.0]]"#, r#""num": [[0.5, "x"]]"#);
    assert_eq!(schema_path(load_model_str(&bad_number).unwrap_err()), "coupling[0][0].num[0][1]");

    let unknown = SCALAR.replace(r#""name": "scalar","#, r#""name": "scalar", "colour": 3,"#);
    let msg = match load_model_str(&unknown).unwrap_err() {
        Error::Schema { message, .. } => message,
        other => panic!("{other:?}"),
    };
    assert!(msg.contains("colour"), "{msg}");

    let version = SCALAR.replace(r#""name": "scalar","#, r#""schema_version": 7, "name": "scalar","#);
    assert_eq!(schema_path(load_model_str(&version).unwrap_err()), "schema_version");
}

#[test]
fn unknown_builtin_is_rejected() {
    assert!(matches!(builtin_model("threeK"), Err(Error::UnknownModel(_))));
}

#[test]
fn resonances_are_stable_under_tolerance_scaling() {
    let region = Contour::new(-3.0, 3.0, -3.0, -0.05).unwrap();
    for name in BUILTIN_NAMES {
        let m = builtin_model(name).unwrap();
        let base = find_resonances(&m, &region).unwrap();
        assert!(base.audit_ok(), "{name}");
        for factor in [10.0, 0.1] {
            let scaled = with_tolerances(Tolerances::DOUBLE.scaled(factor), || find_resonances(&m, &region)).unwrap();
            assert_eq!(scaled.resonances.len(), base.resonances.len(), "{name} ×{factor}");
            for (a, b) in scaled.resonances.iter().zip(&base.resonances) {
                assert!((a.zeta - b.zeta).norm() <= 1e-6, "{name} ×{factor}: {} vs {}", a.zeta, b.zeta);
                assert_eq!(a.multiplicity, b.multiplicity);
            }
        }
    }
}
