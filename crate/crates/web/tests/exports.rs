use laser_noise::{DeviceParams, MaterialConstants};
use laser_noise_web::{beta_map_json, curve_json, summary_json};

#[test]
fn summary_of_reference_device() {
    let v = summary_json(&DeviceParams::reference()).unwrap();
    let j_th = v["thresholds"]["j_th"].as_f64().unwrap();
    assert!((j_th / 4.4444e17 - 1.0).abs() < 1e-3);
    assert_eq!(v["regime"]["regime"], "gain-fixed");
    let n_half = v["noise_threshold"]["n_half"].as_f64().unwrap();
    assert!(n_half > 3e3 && n_half < 3e4);
}

#[test]
fn curve_has_light_current_shape() {
    let d = MaterialConstants::SEMICONDUCTOR.device(1e-3).unwrap();
    let v = curve_json(&d, 0.1, 10.0, 41).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 41);
    let n: Vec<f64> = rows.iter().map(|r| r["n_bar"].as_f64().unwrap()).collect();
    assert!(n.windows(2).all(|w| w[1] > w[0]));
    // below transparency there is no linearized noise to report
    assert!(rows[0]["ratio"].is_null());
    let top = rows[40]["ratio"].as_f64().unwrap();
    assert!(top > 0.0 && top < 0.5);
    let half = v["j_half_over_jth"].as_f64().unwrap();
    assert!(half > 1.0 && half < 10.0);
}

#[test]
fn beta_map_columns_line_up() {
    let v = beta_map_json(12).unwrap();
    let len = v["beta"].as_array().unwrap().len();
    for key in ["n_half", "n_half_piecewise", "n_th", "margin", "margin_piecewise"] {
        assert_eq!(v[key].as_array().unwrap().len(), len, "{key}");
    }
    assert!(beta_map_json(1).is_err());
}

#[test]
fn non_lasing_device_is_an_error() {
    let d = DeviceParams::new(1e-3, 100.0, 1.0, 1e-3).unwrap();
    assert!(summary_json(&d).is_err());
    assert!(curve_json(&d, 0.5, 2.0, 5).is_err());
}
