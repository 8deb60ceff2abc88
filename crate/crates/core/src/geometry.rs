//! Surface layouts and the pair geometry of the separable decomposition.
//!
//! The TX surface frame is the global frame. The RX surface center sits at
//! `d0 * kappa`; RX local offsets are used directly as global offsets unless
//! the link carries an explicit RX rotation.

use nalgebra::{Matrix3, Vector3};

use crate::error::{ChannelError, Result};

/// Centered uniform planar grid of antenna elements lying in its local x–y plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceLayout {
    pub n_h: usize,
    pub n_v: usize,
    /// Inter-element spacing in meters.
    pub spacing: f64,
    /// Local element positions, row-major in (vertical index, horizontal index).
    pub positions: Vec<Vector3<f64>>,
    /// Element area in m², `spacing²`.
    pub element_area: f64,
    /// Aperture diagonal `sqrt(l_h² + l_v²)` with `l = count * spacing`.
    pub aperture_diag: f64,
}

impl SurfaceLayout {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn horizontal_aperture(&self) -> f64 {
        self.n_h as f64 * self.spacing
    }

    pub fn vertical_aperture(&self) -> f64 {
        self.n_v as f64 * self.spacing
    }
}

/// Builds an `n_h × n_v` grid centered at the origin.
///
/// Element `(i, j)` sits at `((i - (n_h-1)/2) s, (j - (n_v-1)/2) s, 0)` and is
/// stored at index `j * n_h + i`.
pub fn build_planar_surface(n_h: usize, n_v: usize, spacing: f64) -> Result<SurfaceLayout> {
    if n_h == 0 || n_v == 0 {
        return Err(ChannelError::InvalidArgument(format!(
            "element counts must be positive, got {n_h}x{n_v}"
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(ChannelError::InvalidArgument(format!(
            "spacing must be positive and finite, got {spacing}"
        )));
    }
    let h_mid = (n_h as f64 - 1.0) / 2.0;
    let v_mid = (n_v as f64 - 1.0) / 2.0;
    let positions = (0..n_v)
        .flat_map(|j| {
            (0..n_h).map(move |i| {
                Vector3::new((i as f64 - h_mid) * spacing, (j as f64 - v_mid) * spacing, 0.0)
            })
        })
        .collect();
    let l_h = n_h as f64 * spacing;
    let l_v = n_v as f64 * spacing;
    Ok(SurfaceLayout {
        n_h,
        n_v,
        spacing,
        positions,
        element_area: spacing * spacing,
        aperture_diag: l_h.hypot(l_v),
    })
}

/// Unit propagation direction `[sinθ cosφ, sinθ sinφ, cosθ]`.
pub fn wavevector(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Center-to-center link between the TX and RX surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGeometry {
    pub d0: f64,
    pub theta: f64,
    pub phi: f64,
    pub kappa: Vector3<f64>,
    /// Optional orientation of the RX surface, applied to local RX offsets.
    pub rx_rotation: Option<Matrix3<f64>>,
}

impl LinkGeometry {
    pub fn new(d0: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(d0 > 0.0 && d0.is_finite()) {
            return Err(ChannelError::InvalidArgument(format!(
                "center distance must be positive and finite, got {d0}"
            )));
        }
        Ok(Self { d0, theta, phi, kappa: wavevector(theta, phi), rx_rotation: None })
    }

    /// Parallel surfaces with aligned centers: `kappa = [0, 0, 1]`.
    pub fn boresight(d0: f64) -> Result<Self> {
        Self::new(d0, 0.0, 0.0)
    }

    pub fn with_rx_rotation(mut self, rotation: Matrix3<f64>) -> Self {
        self.rx_rotation = Some(rotation);
        self
    }

    /// RX local offset expressed in the global frame.
    pub fn rx_offset(&self, q_local: &Vector3<f64>) -> Vector3<f64> {
        match &self.rx_rotation {
            Some(r) => r * q_local,
            None => *q_local,
        }
    }
}

/// `d_mn = d0 κ − p_n + q_m`, with `q_m` taken through the RX orientation.
pub fn pair_displacement(link: &LinkGeometry, p_n: &Vector3<f64>, q_m: &Vector3<f64>) -> Vector3<f64> {
    link.kappa * link.d0 - p_n + link.rx_offset(q_m)
}

fn relative_offset(link: &LinkGeometry, p_n: &Vector3<f64>, q_m: &Vector3<f64>) -> Vector3<f64> {
    link.rx_offset(q_m) - p_n
}

/// Ratio of the pair distance to `d0`.
pub fn alpha_factor(link: &LinkGeometry, p_n: &Vector3<f64>, q_m: &Vector3<f64>) -> Result<f64> {
    let delta = relative_offset(link, p_n, q_m);
    let radicand =
        1.0 + 2.0 * delta.dot(&link.kappa) / link.d0 + delta.norm_squared() / (link.d0 * link.d0);
    if !(radicand > 0.0) {
        return Err(ChannelError::DegenerateGeometry(format!(
            "pair distance vanishes (radicand {radicand:e})"
        )));
    }
    Ok(radicand.sqrt())
}

/// Cauchy–Schwarz lower bound of [`alpha_factor`]: `1 + (q − p)·κ / d0`.
pub fn gamma_factor(link: &LinkGeometry, p_n: &Vector3<f64>, q_m: &Vector3<f64>) -> Result<f64> {
    let gamma = 1.0 + relative_offset(link, p_n, q_m).dot(&link.kappa) / link.d0;
    if !(gamma > 0.0) {
        return Err(ChannelError::DegenerateGeometry(format!(
            "element pair lies behind the phase reference (gamma = {gamma:e})"
        )));
    }
    Ok(gamma)
}

/// `2 (D_TX + D_RX)² / λ`.
pub fn rayleigh_distance(tx: &SurfaceLayout, rx: &SurfaceLayout, lambda: f64) -> f64 {
    let d = tx.aperture_diag + rx.aperture_diag;
    2.0 * d * d / lambda
}
