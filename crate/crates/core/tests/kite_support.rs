//! Support-function reconstruction of a non-convex kite from BIEM far-field
//! data, judged away from its bitangent direction.

use std::f64::consts::PI;

use helmscat_core::biem::{BiemSolver, DEFAULT_QUADRATURE};
use helmscat_core::farfield::FarFieldTable;
use helmscat_core::geometry::Boundary;
use helmscat_core::sfm::{away_from, bitangent_directions, reconstruct_boundary, recover_support_curve_from_table, DEFAULT_BRACKET};

#[test]
fn kite_boundary_recovered_on_convex_portion() {
    let kite = Boundary::sfm_kite();
    let solver = BiemSolver::new(&kite, 1.0, DEFAULT_QUADRATURE).unwrap();
    let table = FarFieldTable::from_source(&solver, 120, 120).unwrap();
    let samples = recover_support_curve_from_table(&table, 40, DEFAULT_BRACKET).unwrap();
    let points = reconstruct_boundary(&samples).unwrap();

    let bitangents = bitangent_directions(&kite, 720, 4096);
    assert!(!bitangents.is_empty());

    let mut checked = 0;
    for (&t, x) in samples.angles.iter().zip(&points) {
        if away_from(t, &bitangents, PI / 8.0) {
            let dist = kite.distance_to(*x);
            assert!(dist < 0.35, "direction {t:.3}: distance {dist:.3}");
            checked += 1;
        }
    }
    assert!(checked >= 30, "only {checked} directions checked");
}
