//! Free-space dyadic Green function and the original coupled channel model.
//!
//! For a displacement `d` with length `d` and wavenumber `k0`:
//!
//! ```text
//! G(d) = -i/(4π d) [ (1 + i/(k0 d) − 1/(k0 d)²) I
//!                  + (3/(k0 d)² − 3i/(k0 d) − 1) d dᵀ/d² ] e^{i k0 d}
//! ```
//!
//! The time-harmonic convention is `e^{+i k0 d}` throughout.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChannelError, Result};
use crate::geometry::{pair_displacement, LinkGeometry, SurfaceLayout};
use crate::matrix::{BlockChannelMatrix, ModelVariant};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// 3×3 block coupling the field components of one TX and one RX element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationDyad(pub Matrix3<Complex64>);

impl PolarizationDyad {
    pub fn entries(&self) -> &Matrix3<Complex64> {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `d dᵀ / d²` for a real displacement.
pub(crate) fn unit_dyad(d: &Vector3<f64>) -> Matrix3<f64> {
    let u = d / d.norm();
    u * u.transpose()
}

/// Exact dyadic Green function at displacement `d`.
pub fn green_dyadic(d: &Vector3<f64>, k0: f64) -> Result<PolarizationDyad> {
    let dist = d.norm();
    if dist == 0.0 {
        return Err(ChannelError::CoincidentPoints { m: 0, n: 0 });
    }
    Ok(PolarizationDyad(green_at(d, dist, k0)))
}

fn green_at(d: &Vector3<f64>, dist: f64, k0: f64) -> Matrix3<Complex64> {
    let kd = k0 * dist;
    let inv = 1.0 / kd;
    let c_identity = Complex64::new(1.0 - inv * inv, inv);
    let c_dyad = Complex64::new(3.0 * inv * inv - 1.0, -3.0 * inv);
    let prefactor = -I / (4.0 * PI * dist) * Complex64::cis(kd);
    let dd = unit_dyad(d);
    Matrix3::from_fn(|i, j| {
        let delta = if i == j { c_identity } else { Complex64::new(0.0, 0.0) };
        prefactor * (delta + c_dyad * dd[(i, j)])
    })
}

/// Sign of the dyadic term in the far-field point form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FarFieldSign {
    /// `I + d dᵀ/d²`, the form printed alongside the exact Green function.
    ///
    /// This is not transverse; it is kept because it is the literal
    /// published expression. Prefer [`FarFieldSign::TransverseProjector`]
    /// for physically consistent comparisons.
    #[default]
    AsPrinted,
    /// `I − d dᵀ/d²`, consistent with the fully separable far-field model.
    TransverseProjector,
}

/// Far-field point form `-i e^{i k0 d}/(4π d) (I ± d dᵀ/d²)`.
pub fn green_dyadic_far(d: &Vector3<f64>, k0: f64, sign: FarFieldSign) -> Result<PolarizationDyad> {
    let dist = d.norm();
    if dist == 0.0 {
        return Err(ChannelError::CoincidentPoints { m: 0, n: 0 });
    }
    let s = match sign {
        FarFieldSign::AsPrinted => 1.0,
        FarFieldSign::TransverseProjector => -1.0,
    };
    let prefactor = -I * Complex64::cis(k0 * dist) / (4.0 * PI * dist);
    let shape = Matrix3::identity() + unit_dyad(d) * s;
    Ok(PolarizationDyad(shape.map(|x| prefactor * x)))
}

/// Original coupled channel model: the exact Green function sampled at every
/// TX/RX element-center pair.
pub fn assemble_ocm(
    tx: &SurfaceLayout,
    rx: &SurfaceLayout,
    link: &LinkGeometry,
    k0: f64,
) -> Result<BlockChannelMatrix> {
    BlockChannelMatrix::from_block_rows(rx.len(), tx.len(), ModelVariant::Ocm, |m| {
        let q = &rx.positions[m];
        tx.positions
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let d = pair_displacement(link, p, q);
                let dist = d.norm();
                if dist == 0.0 {
                    return Err(ChannelError::CoincidentPoints { m, n });
                }
                Ok(green_at(&d, dist, k0))
            })
            .collect()
    })
}
