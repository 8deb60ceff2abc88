//! Sweep execution. Every grid point is evaluated by [`evaluate_point`]; the
//! sweep drivers only decide which points exist and in what order they appear.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use hmimo_core::{
    assemble_fscm, assemble_ocm, assemble_pscm, build_planar_surface, capacity_from_gains, nmse,
    rayleigh_distance, select_p, singular_values, BlockChannelMatrix, LinkGeometry, ModelVariant,
    PhysicalConfig, PscmTerms, SurfaceLayout,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::BenchError;
use crate::spec::{Experiment, ResolvedSweep, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantMetrics {
    /// Against OCM; `None` for OCM itself or when NMSE output is off.
    pub nmse: Option<f64>,
    /// Bits/s/Hz with uniform power over the active eigenchannels.
    pub capacity: f64,
    pub p_used: usize,
    /// Leading singular values of the unscaled Green matrix (only when requested).
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResultRow {
    /// d0 in wavelengths for distance sweeps and single points, N for element sweeps.
    pub x_value: f64,
    pub d0_lambda: f64,
    pub d_r_lambda: f64,
    pub tx_grid: (usize, usize),
    pub results: BTreeMap<ModelVariant, VariantMetrics>,
}

/// One grid point of a resolved sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub tx_grid: (usize, usize),
    pub d0_lambda: f64,
}

fn assemble(
    variant: ModelVariant,
    tx: &SurfaceLayout,
    rx: &SurfaceLayout,
    link: &LinkGeometry,
    k0: f64,
) -> hmimo_core::Result<BlockChannelMatrix> {
    match variant {
        ModelVariant::Ocm => assemble_ocm(tx, rx, link, k0),
        ModelVariant::Fscm => Ok(assemble_fscm(tx, rx, link, k0)),
        v => assemble_pscm(tx, rx, link, k0, PscmTerms::from_variant(v).expect("PSCM variant")),
    }
}

/// Evaluates every requested variant at one geometry.
pub fn evaluate_point(sweep: &ResolvedSweep, point: SweepPoint) -> Result<SweepResultRow, BenchError> {
    let lambda = sweep.lambda;
    let k0 = 2.0 * PI / lambda;
    let (tx_h, tx_v) = point.tx_grid;
    let tx = build_planar_surface(tx_h, tx_v, sweep.spacing)?;
    let rx = build_planar_surface(sweep.rx_grid.0, sweep.rx_grid.1, sweep.spacing)?;
    let link = LinkGeometry::new(point.d0_lambda * lambda, sweep.theta, sweep.phi)?;
    let cfg = PhysicalConfig::from_transmit_snr_db(
        sweep.frequency,
        tx.element_area,
        rx.element_area,
        sweep.snr_db,
    )?;
    let area = (tx.element_area * rx.element_area).sqrt();

    let reference = if sweep.variants.contains(&ModelVariant::Ocm) {
        Some(assemble_ocm(&tx, &rx, &link, k0)?)
    } else {
        None
    };

    let mut results = BTreeMap::new();
    for &variant in &sweep.variants {
        let owned;
        let g = match (&reference, variant) {
            (Some(r), ModelVariant::Ocm) => r,
            _ => {
                owned = assemble(variant, &tx, &rx, &link, k0)?;
                &owned
            }
        };
        let nmse = match (&reference, variant) {
            (Some(r), v) if sweep.nmse && v != ModelVariant::Ocm => Some(nmse(g, r)?),
            _ => None,
        };
        let sv = singular_values(g)?;
        let p_used = select_p(&sv, sweep.p_policy)?;
        let gains: Vec<f64> = sv[..p_used].iter().map(|s| area * s).collect();
        let capacity = capacity_from_gains(&gains, p_used, &cfg)?;
        let k = sweep.dump_singular_values.min(sv.len());
        results.insert(
            variant,
            VariantMetrics { nmse, capacity, p_used, singular_values: sv[..k].to_vec() },
        );
    }

    let x_value = match sweep.experiment {
        Experiment::TxElements => (tx_h * tx_v) as f64,
        _ => point.d0_lambda,
    };
    Ok(SweepResultRow {
        x_value,
        d0_lambda: point.d0_lambda,
        d_r_lambda: rayleigh_distance(&tx, &rx, lambda) / lambda,
        tx_grid: point.tx_grid,
        results,
    })
}

/// Grid points in output order: by d0 as listed, then by TX grid.
pub fn sweep_points(sweep: &ResolvedSweep) -> Vec<SweepPoint> {
    sweep
        .d0_lambda
        .iter()
        .flat_map(|&d0_lambda| sweep.tx_sides.iter().map(move |&tx_grid| SweepPoint { tx_grid, d0_lambda }))
        .collect()
}

/// Evaluates all points on a pool of `sweep.workers` threads. Rows come back
/// in grid order whatever the completion order.
pub fn run_resolved(sweep: &ResolvedSweep) -> Result<Vec<SweepResultRow>, BenchError> {
    let points = sweep_points(sweep);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(sweep.workers).build()?;
    pool.install(|| points.par_iter().map(|&p| evaluate_point(sweep, p)).collect())
}

fn resolve_as(spec: &SweepSpec, expected: Experiment) -> Result<ResolvedSweep, BenchError> {
    let mut errs = Vec::new();
    if spec.experiment != expected {
        errs.push(format!("experiment is {}, expected {expected}", spec.experiment));
    }
    match spec.resolve() {
        Ok(r) if errs.is_empty() => Ok(r),
        Ok(_) => Err(BenchError::Config(errs)),
        Err(BenchError::Config(more)) => {
            errs.extend(more);
            Err(BenchError::Config(errs))
        }
        Err(e) => Err(e),
    }
}

pub fn run_distance_sweep(spec: &SweepSpec) -> Result<Vec<SweepResultRow>, BenchError> {
    run_resolved(&resolve_as(spec, Experiment::Distance)?)
}

pub fn run_element_sweep(spec: &SweepSpec) -> Result<Vec<SweepResultRow>, BenchError> {
    run_resolved(&resolve_as(spec, Experiment::TxElements)?)
}

pub fn run_single_point(spec: &SweepSpec) -> Result<SweepResultRow, BenchError> {
    let sweep = resolve_as(spec, Experiment::SinglePoint)?;
    let point = sweep_points(&sweep)[0];
    evaluate_point(&sweep, point)
}

/// Dispatches on `spec.experiment`.
pub fn run(spec: &SweepSpec) -> Result<Vec<SweepResultRow>, BenchError> {
    match spec.experiment {
        Experiment::Distance => run_distance_sweep(spec),
        Experiment::TxElements => run_element_sweep(spec),
        Experiment::SinglePoint => run_single_point(spec).map(|r| vec![r]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::DistanceSpec;

    fn small(experiment: Experiment) -> SweepSpec {
        let mut spec = SweepSpec::default_for(experiment);
        spec.tx_grid = (5, 5);
        spec.rx_grid = (3, 3);
        spec.spacing_lambda = 0.1;
        match experiment {
            Experiment::Distance => {
                spec.d0_range_lambda = DistanceSpec::Range { start: 0.5, stop: 2.0, step: 0.5 }
            }
            Experiment::TxElements => spec.n_list = vec![3, 5],
            Experiment::SinglePoint => spec.d0_range_lambda = DistanceSpec::Single(1.5),
        }
        spec
    }

    #[test]
    fn distance_rows_in_order() {
        let rows = run_distance_sweep(&small(Experiment::Distance)).unwrap();
        let xs: Vec<f64> = rows.iter().map(|r| r.x_value).collect();
        assert_eq!(xs, vec![0.5, 1.0, 1.5, 2.0]);
        for row in &rows {
            assert_eq!(row.results.len(), 5);
            assert!(row.results[&ModelVariant::Ocm].nmse.is_none());
            for (v, m) in &row.results {
                assert!(m.capacity >= 0.0);
                if *v != ModelVariant::Ocm {
                    assert!(m.nmse.unwrap() >= 0.0);
                }
            }
        }
    }

    #[test]
    fn element_rows_grouped_by_distance() {
        let rows = run_element_sweep(&small(Experiment::TxElements)).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.d0_lambda, r.x_value)).collect();
        assert_eq!(keys, vec![(0.75, 9.0), (0.75, 25.0), (2.5, 9.0), (2.5, 25.0)]);
    }

    #[test]
    fn single_point_matches_sweep_row() {
        let point = run_single_point(&small(Experiment::SinglePoint)).unwrap();
        let rows = run_distance_sweep(&small(Experiment::Distance)).unwrap();
        assert_eq!(point, rows[2]);
    }

    #[test]
    fn wrong_subcommand_is_config_error() {
        let err = run_distance_sweep(&small(Experiment::SinglePoint)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn singular_value_dump() {
        let mut spec = small(Experiment::SinglePoint);
        spec.dump_singular_values = 4;
        spec.variants = vec![ModelVariant::Ocm];
        let row = run_single_point(&spec).unwrap();
        let sv = &row.results[&ModelVariant::Ocm].singular_values;
        assert_eq!(sv.len(), 4);
        assert!(sv.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let mut spec = small(Experiment::Distance);
        spec.workers = Some(1);
        let a = run(&spec).unwrap();
        spec.workers = Some(4);
        assert_eq!(a, run(&spec).unwrap());
    }
}
