use std::f64::consts::PI;

use hmimo_core::*;

fn relative_gap(spacing_lambda: f64) -> Vec<f64> {
    let lambda = 1.0;
    let k0 = 2.0 * PI / lambda;
    let tx = build_planar_surface(9, 9, spacing_lambda * lambda).unwrap();
    let rx = build_planar_surface(5, 5, spacing_lambda * lambda).unwrap();
    let d_r = rayleigh_distance(&tx, &rx, lambda);
    (1..=6)
        .map(|j| {
            let link = LinkGeometry::boresight(f64::powi(2.0, j) * d_r).unwrap();
            let pscm = assemble_pscm(&tx, &rx, &link, k0, PscmTerms::T1234).unwrap();
            let fscm = assemble_fscm(&tx, &rx, &link, k0);
            nmse(&fscm, &pscm).unwrap().sqrt()
        })
        .collect()
}

#[test]
fn separable_models_collapse_with_distance() {
    for spacing in [0.1, 0.5] {
        let gaps = relative_gap(spacing);
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "spacing {spacing}: {gaps:?}");
    }
    let gaps = relative_gap(0.5);
    assert!(gaps[5] < 1e-2, "{gaps:?}");
}

#[test]
fn oblique_link_also_collapses() {
    let lambda = 1.0;
    let k0 = 2.0 * PI / lambda;
    let tx = build_planar_surface(9, 9, 0.5).unwrap();
    let rx = build_planar_surface(5, 5, 0.5).unwrap();
    let d_r = rayleigh_distance(&tx, &rx, lambda);
    let gap = |d0: f64| {
        let link = LinkGeometry::new(d0, 0.4, 1.1).unwrap();
        let pscm = assemble_pscm(&tx, &rx, &link, k0, PscmTerms::T1234).unwrap();
        nmse(&assemble_fscm(&tx, &rx, &link, k0), &pscm).unwrap()
    };
    assert!(gap(32.0 * d_r) < gap(4.0 * d_r));
}
