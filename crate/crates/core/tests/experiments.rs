use std::f64::consts::PI;

use nh_diode_core::dynamics::{absorber_experiment, diode_experiment, ExperimentSetup};
use nh_diode_core::{Side, TriangleParams};

const KC: f64 = 2.0 * PI / 3.0;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn diode_in_time_domain() {
    let p = TriangleParams::new(1.0, KC, PI / 3.0).unwrap();
    let r = diode_experiment(&p, 15.0, KC, &ExperimentSetup::default()).unwrap();
    assert!(r.left.fractions.transmitted < 0.02);
    assert!(r.right.fractions.transmitted > 0.90);
    assert!(rel(r.left.fractions.transmitted, r.left.predicted_transmission) < 0.05);
    assert!(rel(r.right.fractions.transmitted, r.right.predicted_transmission) < 0.05);
    for run in [&r.left, &r.right] {
        let f = run.fractions;
        assert!((f.reflected + f.transmitted + f.absorbed + f.center - 1.0).abs() < 1e-6);
    }

    let q = TriangleParams::new(1.0, KC, -PI / 3.0).unwrap();
    let s = diode_experiment(&q, 15.0, KC, &ExperimentSetup::default()).unwrap();
    assert!((s.left.fractions.transmitted - r.right.fractions.transmitted).abs() < 1e-6);
    assert!((s.right.fractions.transmitted - r.left.fractions.transmitted).abs() < 1e-6);
}

#[test]
fn hermitian_control_is_symmetric() {
    let p = TriangleParams::new(1.0, 0.0, 0.0).unwrap();
    let r = diode_experiment(&p, 15.0, KC, &ExperimentSetup::default()).unwrap();
    assert!((r.left.fractions.transmitted - r.right.fractions.transmitted).abs() < 1e-3);
    assert!(r.left.fractions.absorbed.abs() < 1e-8);
}

#[test]
fn reflectionless_absorber() {
    let p = TriangleParams::new(1.0, KC, PI / 3.0).unwrap();
    let r = absorber_experiment(&p, Side::Right, 15.0, KC, &ExperimentSetup::default()).unwrap();
    assert!(r.reflected < 0.03);
    assert!(r.absorbed > 0.97);

    let detuned = absorber_experiment(&p, Side::Right, 15.0, PI / 3.0, &ExperimentSetup::default()).unwrap();
    assert!(rel(detuned.reflected, detuned.predicted_reflection) < 0.05);

    let h = TriangleParams::new(1.0, 0.0, 0.0).unwrap();
    let total = absorber_experiment(&h, Side::Right, 15.0, KC, &ExperimentSetup::default()).unwrap();
    assert!(total.reflected > 0.999);
}

#[test]
fn wider_packets_approach_the_point_value() {
    let p = TriangleParams::new(1.0, KC, PI / 3.0).unwrap();
    let setup = ExperimentSetup {
        sites: 1000,
        ..ExperimentSetup::default()
    };
    let gaps: Vec<f64> = [10.0, 15.0, 25.0]
        .iter()
        .map(|&sigma| {
            let r = diode_experiment(&p, sigma, KC, &setup).unwrap();
            (r.right.fractions.transmitted - r.right.point_transmission).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}
