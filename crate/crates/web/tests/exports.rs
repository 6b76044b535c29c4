use serde_json::Value;
use vortexlab_web::{beta_curve_json, shoot_json, torus_json, MAX_GRID};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn shoot_returns_a_profile() {
    let v = parse(shoot_json(1.0, -1.0, 1.0).unwrap());
    assert_eq!(v["bc_type"], "NonTopologicalI");
    let r = v["r"].as_array().unwrap();
    assert_eq!(r.len(), v["u"].as_array().unwrap().len());
    assert!(r.len() > 100);

    let v = parse(shoot_json(1.0, -1.0, 0.0).unwrap());
    assert!((v["u"][0].as_f64().unwrap() + 1.0).abs() < 1e-6);
}

#[test]
fn beta_curve_skips_zero() {
    let v = parse(beta_curve_json(1.0, -1.0, 1.0, 5).unwrap());
    let s = v["s"].as_array().unwrap();
    assert_eq!(s.len(), 4);
    assert!(v["beta"][0].as_f64().unwrap() > 4.0);
    assert!(v["beta"][3].as_f64().unwrap() < -4.0);
    assert!(beta_curve_json(1.0, 1.0, -1.0, 5).is_err());
}

#[test]
fn torus_solve_conserves_mass() {
    let v = parse(torus_json(1.0, 0.1, 2.0, 64).unwrap());
    assert_eq!(v["converged"], true);
    assert_eq!(v["u"].as_array().unwrap().len(), 64 * 64);
    let m = v["total_mass"].as_f64().unwrap();
    assert!((m - v["mass_target"].as_f64().unwrap()).abs() < 1e-6);
    assert!(v["u_max"].as_f64().unwrap() <= 0.0);
    assert!(torus_json(1.0, 0.1, 2.0, 2 * MAX_GRID).is_err());
    assert!(torus_json(1.0, 0.1, 2.0, 60).is_err());
}
