use std::fs;

use rpt_iga_core::case::run_case;
use rpt_iga_core::config::CaseConfig;
use rpt_iga_core::suite::{run_suite, SuiteOptions};
use rpt_iga_core::Error;

const SFSF: &str = r#"
id = "sfsf"
analysis = "static"
material = "material_i"
layup = [0.0, 90.0]
layup_kind = "cross_ply"
a_over_h = 10.0
bc = "SFSF"
shear_model = "arya"
load = "sinusoidal"
mesh = 7
"#;

const MODAL: &str = r#"
id = "modal"
analysis = "modal"
material = "material_ii"
e1_over_e2 = 40.0
layup = [0.0, 90.0, 0.0, 90.0]
layup_kind = "cross_ply"
a_over_h = 5.0
bc = "SCSF"
shear_model = "fisdt"
mesh = 6
modes = 3
"#;

fn cfg(text: &str) -> CaseConfig {
    CaseConfig::from_toml_str(text).unwrap()
}

#[test]
fn static_artifacts_are_deterministic() {
    let c = cfg(SFSF);
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let r1 = run_case(&c, Some(d1.path())).unwrap();
    let r2 = run_case(&c, Some(d2.path())).unwrap();
    assert_eq!(r1.quantities, r2.quantities);
    let names: Vec<_> = r1.artifacts.iter().map(|p| p.file_name().unwrap().to_owned()).collect();
    assert_eq!(names, ["results.csv", "profile_center.csv", "profile_deflection_y_mid.csv"]);
    for (p1, p2) in r1.artifacts.iter().zip(&r2.artifacts) {
        let (b1, b2) = (fs::read(p1).unwrap(), fs::read(p2).unwrap());
        assert_eq!(b1, b2, "{}", p1.display());
        assert!(!b1.contains(&b'\r'));
    }
    let results = fs::read_to_string(&r1.artifacts[0]).unwrap();
    let mut lines = results.lines();
    assert_eq!(lines.next(), Some("case_id,quantity,value"));
    assert_eq!(lines.count(), 5);
    assert!(results.contains("sfsf,w_bar,"));
    let profile = fs::read_to_string(&r1.artifacts[1]).unwrap();
    // 11 samples in each of two plies plus the header
    assert_eq!(profile.lines().count(), 23);
}

#[test]
fn configured_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg(MODAL);
    c.output = Some(dir.path().join("nested"));
    let r = run_case(&c, None).unwrap();
    assert_eq!(r.artifacts.len(), 4);
    for k in 1..=3 {
        assert!(dir.path().join(format!("nested/mode_{k}_y_mid.csv")).exists());
    }
    let w: Vec<f64> = (1..=3).map(|k| r.get(&format!("omega_bar_{k}")).unwrap()).collect();
    assert!(w.windows(2).all(|p| p[0] <= p[1]), "{w:?}");
}

#[test]
fn in_memory_run_writes_nothing() {
    let r = run_case(&cfg(SFSF), None).unwrap();
    assert!(r.artifacts.is_empty());
    assert_eq!(r.quantities.len(), 5);
}

#[test]
fn solver_errors_carry_case_id() {
    // a fully free plate cannot carry a transverse load
    let text = SFSF.replace("\"SFSF\"", "\"FFFF\"");
    match run_case(&cfg(&text), None) {
        Err(Error::Case { id, source }) => {
            assert_eq!(id, "sfsf");
            assert!(matches!(*source, Error::Constraint(_)), "{source}");
        }
        other => panic!("expected a case error, got {other:?}"),
    }
}

#[test]
fn tensile_load_has_no_buckling() {
    let text = r#"
id = "tension"
analysis = "buckling"
material = "material_i"
layup = [0.0, 90.0]
layup_kind = "cross_ply"
a_over_h = 10.0
bc = "SSSS"
shear_model = "reddy"
load = "uniaxial"
load_magnitude = -1.0
mesh = 5
"#;
    let err = run_case(&cfg(text), None).unwrap_err();
    assert!(err.to_string().contains("tension"), "{err}");
}

#[test]
fn deflection_converges_monotonically() {
    let errors: Vec<f64> = [3, 5, 7, 9, 11]
        .into_iter()
        .map(|mesh| {
            let text = SFSF.replace("mesh = 7", &format!("mesh = {mesh}")).replace("\"SFSF\"", "\"SSSS\"");
            let w = run_case(&cfg(&text), None).unwrap().get("w_bar").unwrap();
            // exact value of the same theory for this plate
            (w - 1.213157).abs()
        })
        .collect();
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
    assert!(errors[4] < 5e-5);
}

#[test]
fn suite_report_for_one_model() {
    let dir = tempfile::tempdir().unwrap();
    let opts = SuiteOptions {
        model: Some("karama".parse().unwrap()),
        out: Some(dir.path()),
        parallel: false,
    };
    let report = run_suite("table4", &opts).unwrap();
    assert_eq!(report.rows.len(), 4);
    assert!(report.all_passed());
    let text = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(text.starts_with("case_id,quantity,source,computed,reference,relative_error,tolerance,magnitude_only,pass,error\n"));
    assert_eq!(text.lines().count(), 5);
}
