//! Transmit–receive parameter-separable channel models.
//!
//! Replacing each pair distance `α d0` by its lower bound `γ d0` splits the
//! pair phase into an RX-only and a TX-only factor:
//!
//! ```text
//! G_mn ≈ -i/(4π γ d0) A_mn e^{i k0 d0} e^{i k0 qᵀκ} e^{-i k0 pᵀκ},
//! A_mn = ω₁ I + ω₂ [κκᵀ + (κΔᵀ + Δκᵀ)/d0 + ΔΔᵀ/d0²] / γ²,   Δ = q − p.
//! ```
//!
//! The full matrix is then `(θ_R θ_Tᴴ ⊗ 1₃1₃ᵀ) ⊙ A` times a common scalar,
//! where `θ_T`, `θ_R` are the array responses and `A` stacks `A_mn / γ_mn`.
//! In the far field `A_mn → I − κκᵀ` and the model becomes a pure
//! Kronecker product.

use std::convert::Infallible;
use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChannelError, Result};
use crate::geometry::{gamma_factor, LinkGeometry, SurfaceLayout};
use crate::green::PolarizationDyad;
use crate::matrix::{BlockChannelMatrix, ModelVariant};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Distance-dependent weights of the identity and dyadic parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaPair {
    pub omega1: Complex64,
    pub omega2: Complex64,
}

pub fn omega_pair(k0: f64, gamma: f64, d0: f64) -> Result<OmegaPair> {
    if !(k0 > 0.0 && gamma > 0.0 && d0 > 0.0) {
        return Err(ChannelError::InvalidArgument(format!(
            "omega terms need positive k0, gamma, d0 (got {k0}, {gamma}, {d0})"
        )));
    }
    let inv = 1.0 / (k0 * gamma * d0);
    Ok(OmegaPair {
        omega1: Complex64::new(1.0 - inv * inv, inv),
        omega2: Complex64::new(3.0 * inv * inv - 1.0, -3.0 * inv),
    })
}

/// Which of the four A-blocks enter the pair amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PscmTerms {
    /// `A1 + A2`
    #[serde(rename = "12")]
    T12,
    /// `A1 + A2 + A3`
    #[serde(rename = "123")]
    T123,
    /// All four blocks.
    #[serde(rename = "1234")]
    T1234,
}

impl PscmTerms {
    pub fn variant(self) -> ModelVariant {
        match self {
            PscmTerms::T12 => ModelVariant::Pscm12,
            PscmTerms::T123 => ModelVariant::Pscm123,
            PscmTerms::T1234 => ModelVariant::Pscm,
        }
    }

    pub fn from_variant(variant: ModelVariant) -> Option<Self> {
        match variant {
            ModelVariant::Pscm12 => Some(PscmTerms::T12),
            ModelVariant::Pscm123 => Some(PscmTerms::T123),
            ModelVariant::Pscm => Some(PscmTerms::T1234),
            ModelVariant::Ocm | ModelVariant::Fscm => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABlockSet {
    pub a1: Matrix3<Complex64>,
    pub a2: Matrix3<Complex64>,
    pub a3: Matrix3<Complex64>,
    pub a4: Matrix3<Complex64>,
    pub gamma: f64,
}

impl ABlockSet {
    pub fn sum(&self, terms: PscmTerms) -> Matrix3<Complex64> {
        match terms {
            PscmTerms::T12 => self.a1 + self.a2,
            PscmTerms::T123 => self.a1 + self.a2 + self.a3,
            PscmTerms::T1234 => self.a1 + self.a2 + self.a3 + self.a4,
        }
    }
}

fn real_to_complex(m: &Matrix3<f64>, w: Complex64) -> Matrix3<Complex64> {
    m.map(|x| w * x)
}

/// The four amplitude blocks for one TX/RX element pair.
pub fn a_blocks(
    p_n: &Vector3<f64>,
    q_m: &Vector3<f64>,
    link: &LinkGeometry,
    k0: f64,
) -> Result<ABlockSet> {
    let gamma = gamma_factor(link, p_n, q_m)?;
    let d0 = link.d0;
    let kappa = &link.kappa;
    let delta = link.rx_offset(q_m) - p_n;
    let OmegaPair { omega1, omega2 } = omega_pair(k0, gamma, d0)?;
    let g2 = gamma * gamma;

    let kk = kappa * kappa.transpose();
    let cross = kappa * delta.transpose() + delta * kappa.transpose();
    let dd = delta * delta.transpose();

    Ok(ABlockSet {
        a1: Matrix3::from_diagonal_element(omega1),
        a2: real_to_complex(&kk, omega2 / g2),
        a3: real_to_complex(&cross, omega2 / (g2 * d0)),
        a4: real_to_complex(&dd, omega2 / (g2 * d0 * d0)),
        gamma,
    })
}

/// Pair-level separable model, evaluated directly. This is the reference
/// route for [`assemble_pscm`].
pub fn pscm_pair(
    p_n: &Vector3<f64>,
    q_m: &Vector3<f64>,
    link: &LinkGeometry,
    k0: f64,
    terms: PscmTerms,
) -> Result<PolarizationDyad> {
    let blocks = a_blocks(p_n, q_m, link, k0)?;
    let kappa = &link.kappa;
    let phase = Complex64::cis(k0 * link.d0)
        * Complex64::cis(k0 * link.rx_offset(q_m).dot(kappa))
        * Complex64::cis(-k0 * p_n.dot(kappa));
    let prefactor = -I / (4.0 * PI * blocks.gamma * link.d0) * phase;
    Ok(PolarizationDyad(blocks.sum(terms).map(|z| prefactor * z)))
}

/// Unit-modulus phasors `e^{i k0 posᵀκ}` across a surface.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayResponse {
    pub entries: Vec<Complex64>,
}

impl ArrayResponse {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn array_response(positions: &[Vector3<f64>], kappa: &Vector3<f64>, k0: f64) -> ArrayResponse {
    ArrayResponse { entries: positions.iter().map(|p| Complex64::cis(k0 * p.dot(kappa))).collect() }
}

fn common_scale(link: &LinkGeometry, k0: f64) -> Complex64 {
    -I * Complex64::cis(k0 * link.d0) / (4.0 * PI * link.d0)
}

fn rx_global_offsets(rx: &SurfaceLayout, link: &LinkGeometry) -> Vec<Vector3<f64>> {
    rx.positions.iter().map(|q| link.rx_offset(q)).collect()
}

/// Matrix-level separable model: array-response outer product broadcast
/// over 3×3 blocks, Hadamard-multiplied with the stacked `A_mn / γ_mn`.
pub fn assemble_pscm(
    tx: &SurfaceLayout,
    rx: &SurfaceLayout,
    link: &LinkGeometry,
    k0: f64,
    terms: PscmTerms,
) -> Result<BlockChannelMatrix> {
    let theta_t = array_response(&tx.positions, &link.kappa, k0);
    let theta_r = array_response(&rx_global_offsets(rx, link), &link.kappa, k0);
    let scale = common_scale(link, k0);

    BlockChannelMatrix::from_block_rows(rx.len(), tx.len(), terms.variant(), |m| {
        let q = &rx.positions[m];
        let row_phase = scale * theta_r.entries[m];
        tx.positions
            .iter()
            .zip(&theta_t.entries)
            .enumerate()
            .map(|(n, (p, t))| {
                let blocks = a_blocks(p, q, link, k0).map_err(|e| match e {
                    ChannelError::DegenerateGeometry(msg) => {
                        ChannelError::DegenerateGeometry(format!("pair (m = {m}, n = {n}): {msg}"))
                    }
                    other => other,
                })?;
                let weight = row_phase * t.conj() / blocks.gamma;
                Ok(blocks.sum(terms).map(|z| weight * z))
            })
            .collect()
    })
}

/// Far-field model `c θ_R θ_Tᴴ ⊗ (I − κκᵀ)`.
pub fn assemble_fscm(
    tx: &SurfaceLayout,
    rx: &SurfaceLayout,
    link: &LinkGeometry,
    k0: f64,
) -> BlockChannelMatrix {
    let theta_t = array_response(&tx.positions, &link.kappa, k0);
    let theta_r = array_response(&rx_global_offsets(rx, link), &link.kappa, k0);
    let scale = common_scale(link, k0);
    let projector = Matrix3::identity() - link.kappa * link.kappa.transpose();

    let built = BlockChannelMatrix::from_block_rows(rx.len(), tx.len(), ModelVariant::Fscm, |m| {
        let row_phase = scale * theta_r.entries[m];
        Ok::<_, Infallible>(
            theta_t.entries.iter().map(|t| real_to_complex(&projector, row_phase * t.conj())).collect(),
        )
    });
    match built {
        Ok(g) => g,
        Err(never) => match never {},
    }
}
