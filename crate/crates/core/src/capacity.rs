//! Physical scaling, eigenchannel decomposition and uniform-power capacity.
//!
//! Decomposition works on the unscaled Green matrix `G`. With the SVD
//! `G = U Σ Vᴴ` the transmit and receive patterns are `V/√a_T` and `U/√a_R`,
//! and the eigenchannel gains are `√(a_R a_T) σ_p`. Capacity with `P` active
//! channels sharing the power uniformly is
//!
//! ```text
//! C = Σ_p log2(1 + μ SNR γ_p²),   μ = η²/(4λ²),   SNR = P_t / (P a_R σ_w²)
//! ```

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChannelError, Result};
use crate::matrix::BlockChannelMatrix;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// `μ0 c` in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730313668;

/// Carrier, element areas and link budget. Wavelength and wavenumber are
/// always derived from the frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConfig {
    frequency: f64,
    lambda: f64,
    k0: f64,
    eta: f64,
    a_t: f64,
    a_r: f64,
    noise_var: f64,
    total_power: f64,
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ChannelError::InvalidArgument(format!("{name} must be positive and finite, got {value}")))
    }
}

impl PhysicalConfig {
    pub fn new(frequency: f64, a_t: f64, a_r: f64, noise_var: f64, total_power: f64) -> Result<Self> {
        require_positive("frequency", frequency)?;
        require_positive("a_T", a_t)?;
        require_positive("a_R", a_r)?;
        require_positive("noise variance", noise_var)?;
        require_positive("total power", total_power)?;
        let lambda = SPEED_OF_LIGHT / frequency;
        Ok(Self {
            frequency,
            lambda,
            k0: 2.0 * std::f64::consts::PI / lambda,
            eta: FREE_SPACE_IMPEDANCE,
            a_t,
            a_r,
            noise_var,
            total_power,
        })
    }

    /// Unit noise variance and `P_t = ρ a_R` with `ρ = 10^(snr_db/10)`, so
    /// that `P_t / (a_R σ_w²) = ρ` before the split over `P` channels.
    pub fn from_transmit_snr_db(frequency: f64, a_t: f64, a_r: f64, snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(ChannelError::InvalidArgument(format!("SNR must be finite, got {snr_db}")));
        }
        let rho = 10f64.powf(snr_db / 10.0);
        Self::new(frequency, a_t, a_r, 1.0, rho * a_r)
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn a_t(&self) -> f64 {
        self.a_t
    }

    pub fn a_r(&self) -> f64 {
        self.a_r
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn with_total_power(mut self, total_power: f64) -> Result<Self> {
        require_positive("total power", total_power)?;
        self.total_power = total_power;
        Ok(self)
    }

    pub fn with_noise_var(mut self, noise_var: f64) -> Result<Self> {
        require_positive("noise variance", noise_var)?;
        self.noise_var = noise_var;
        Ok(self)
    }

    /// `(η / 2λ) a_R a_T`, the Green-to-channel factor.
    pub fn channel_scale(&self) -> f64 {
        self.eta / (2.0 * self.lambda) * self.a_r * self.a_t
    }

    /// `η² / (4λ²)`.
    pub fn mu(&self) -> f64 {
        self.eta * self.eta / (4.0 * self.lambda * self.lambda)
    }

    /// Per-channel SNR when the power is split over `p_used` channels.
    pub fn snr(&self, p_used: usize) -> f64 {
        self.total_power / (p_used as f64 * self.a_r * self.noise_var)
    }
}

/// `H = (η/2λ) a_R a_T G`.
pub fn channel_from_green(g: &BlockChannelMatrix, cfg: &PhysicalConfig) -> Result<BlockChannelMatrix> {
    if g.scale_applied() {
        return Err(ChannelError::InvalidState("channel scale already applied".into()));
    }
    Ok(g.scaled(Complex64::new(cfg.channel_scale(), 0.0)).mark_scaled())
}

/// How many eigenchannels carry power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PPolicy {
    /// Count singular values `σ_p ≥ ε σ_1`.
    Threshold(f64),
    /// Use the `P` strongest channels (capped at the rank count).
    Fixed(usize),
}

impl Default for PPolicy {
    fn default() -> Self {
        PPolicy::Threshold(1e-6)
    }
}

impl PPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PPolicy::Threshold(eps) if !(eps > 0.0 && eps <= 1.0) => Err(ChannelError::InvalidArgument(
                format!("threshold must lie in (0, 1], got {eps}"),
            )),
            PPolicy::Fixed(0) => Err(ChannelError::InvalidArgument("fixed P must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

pub fn select_p(singular_values: &[f64], policy: PPolicy) -> Result<usize> {
    policy.validate()?;
    let first = *singular_values
        .first()
        .ok_or_else(|| ChannelError::InvalidArgument("empty singular spectrum".into()))?;
    if !(first > 0.0) {
        return Err(ChannelError::ZeroChannel);
    }
    Ok(match policy {
        PPolicy::Threshold(eps) => singular_values.iter().take_while(|&&s| s >= eps * first).count(),
        PPolicy::Fixed(p) => p.min(singular_values.len()),
    })
}

/// Descending singular values of the dense Green matrix.
pub fn singular_values(g: &BlockChannelMatrix) -> Result<Vec<f64>> {
    if g.nrows() == 0 || g.ncols() == 0 {
        return Err(ChannelError::InvalidArgument("empty channel matrix".into()));
    }
    let mut sv = g
        .dense()
        .singular_values()
        .map_err(|e| ChannelError::InvalidState(format!("SVD did not converge: {e:?}")))?;
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[derive(Debug, Clone)]
pub struct EigenchannelSet {
    /// `√(a_R a_T) σ_p` for every singular value, descending.
    pub gains: Vec<f64>,
    pub p_used: usize,
    /// `V(:, 1:P) / √a_T`, one transmit pattern per column.
    pub tx_patterns: Mat<Complex64>,
    /// `U(:, 1:P) / √a_R`, one receive pattern per column.
    pub rx_patterns: Mat<Complex64>,
}

pub fn eigenchannel_decompose(
    g: &BlockChannelMatrix,
    cfg: &PhysicalConfig,
    policy: PPolicy,
) -> Result<EigenchannelSet> {
    if g.scale_applied() {
        return Err(ChannelError::InvalidState(
            "eigenchannels are defined on the unscaled Green matrix".into(),
        ));
    }
    if g.nrows() == 0 || g.ncols() == 0 {
        return Err(ChannelError::InvalidArgument("empty channel matrix".into()));
    }
    let svd = g
        .dense()
        .thin_svd()
        .map_err(|e| ChannelError::InvalidState(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let sigma: Vec<f64> = order.iter().map(|&k| s[k].re).collect();
    let p_used = select_p(&sigma, policy)?;

    let area = (cfg.a_r() * cfg.a_t()).sqrt();
    let inv_t = 1.0 / cfg.a_t().sqrt();
    let inv_r = 1.0 / cfg.a_r().sqrt();
    let (u, v) = (svd.U(), svd.V());
    Ok(EigenchannelSet {
        gains: sigma.iter().map(|s| area * s).collect(),
        p_used,
        tx_patterns: Mat::from_fn(v.nrows(), p_used, |i, j| v[(i, order[j])] * inv_t),
        rx_patterns: Mat::from_fn(u.nrows(), p_used, |i, j| u[(i, order[j])] * inv_r),
    })
}

/// Uniform-power capacity in bits/s/Hz over the first `p_used` gains.
pub fn capacity_from_gains(gains: &[f64], p_used: usize, cfg: &PhysicalConfig) -> Result<f64> {
    if p_used == 0 || p_used > gains.len() {
        return Err(ChannelError::InvalidArgument(format!(
            "need 1 <= P <= {} active channels, got {p_used}",
            gains.len()
        )));
    }
    let w = cfg.mu() * cfg.snr(p_used);
    Ok(gains[..p_used].iter().map(|g| (w * g * g).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

pub fn capacity(eigs: &EigenchannelSet, cfg: &PhysicalConfig) -> Result<f64> {
    capacity_from_gains(&eigs.gains, eigs.p_used, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_planar_surface, LinkGeometry};
    use crate::green::assemble_ocm;
    use crate::matrix::ModelVariant;
    use crate::separable::assemble_fscm;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const F: f64 = 2.4e9;

    fn cfg(a: f64) -> PhysicalConfig {
        PhysicalConfig::from_transmit_snr_db(F, a, a, 10.0).unwrap()
    }

    #[test]
    fn derived_quantities_consistent() {
        let c = cfg(1e-6);
        assert!((c.lambda() - 0.12491352416666667).abs() < 1e-16);
        assert!((c.k0() * c.lambda() - 2.0 * PI).abs() < 1e-14);
        assert_eq!(c.eta(), FREE_SPACE_IMPEDANCE);
        assert!((c.snr(1) - 10.0).abs() < 1e-12);
        assert!((c.snr(4) - 2.5).abs() < 1e-12);
        assert!(PhysicalConfig::new(-1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalConfig::new(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn channel_scale_spot_check() {
        // (η/2λ) a_R a_T with a = (0.01 λ)², 50-digit oracle value
        let lambda = SPEED_OF_LIGHT / F;
        let a = (0.01 * lambda) * (0.01 * lambda);
        let c = cfg(a);
        assert!((c.channel_scale() - 3.6713767658306761184e-9).abs() < 1e-12 * 3.67e-9);

        let tx = build_planar_surface(2, 2, 0.01 * lambda).unwrap();
        let rx = build_planar_surface(1, 1, 0.01 * lambda).unwrap();
        let link = LinkGeometry::boresight(lambda).unwrap();
        let g = assemble_ocm(&tx, &rx, &link, c.k0()).unwrap();
        let h = channel_from_green(&g, &c).unwrap();
        assert!(h.scale_applied());
        assert_eq!(h.variant(), ModelVariant::Ocm);
        let ratio = h.dense()[(1, 4)] / g.dense()[(1, 4)];
        assert!((ratio - Complex64::new(c.channel_scale(), 0.0)).norm() < 1e-22);
        assert!(matches!(channel_from_green(&h, &c), Err(ChannelError::InvalidState(_))));
    }

    #[test]
    fn zero_matrix_stays_zero() {
        let g = BlockChannelMatrix::zeros(2, 2, ModelVariant::Ocm);
        let h = channel_from_green(&g, &cfg(1.0)).unwrap();
        assert_eq!(h.frobenius_norm(), 0.0);
        assert!(matches!(
            eigenchannel_decompose(&g, &cfg(1.0), PPolicy::default()),
            Err(ChannelError::ZeroChannel)
        ));
    }

    #[test]
    fn select_p_examples() {
        assert_eq!(select_p(&[1.0, 0.5, 1e-9], PPolicy::Threshold(1e-6)).unwrap(), 2);
        assert_eq!(select_p(&[1.0, 1.0, 1.0], PPolicy::Fixed(2)).unwrap(), 2);
        assert_eq!(select_p(&[1.0, 1.0], PPolicy::Fixed(7)).unwrap(), 2);
        assert!(matches!(select_p(&[0.0, 0.0], PPolicy::default()), Err(ChannelError::ZeroChannel)));
        assert!(select_p(&[], PPolicy::default()).is_err());
        assert!(select_p(&[1.0], PPolicy::Fixed(0)).is_err());
        assert!(select_p(&[1.0], PPolicy::Threshold(0.0)).is_err());
    }

    fn fscm_single(d0: f64) -> (BlockChannelMatrix, PhysicalConfig) {
        let c = cfg(1e-6);
        let one = build_planar_surface(1, 1, 1e-3).unwrap();
        let link = LinkGeometry::boresight(d0).unwrap();
        (assemble_fscm(&one, &one, &link, c.k0()), c)
    }

    #[test]
    fn fscm_single_pair_spectrum() {
        let d0 = 0.3;
        let (g, c) = fscm_single(d0);
        let sv = singular_values(&g).unwrap();
        let want = 1.0 / (4.0 * PI * d0);
        assert!((sv[0] - want).abs() < 1e-14 * want);
        assert!((sv[1] - want).abs() < 1e-14 * want);
        assert!(sv[2] < 1e-15);
        let eig = eigenchannel_decompose(&g, &c, PPolicy::default()).unwrap();
        assert_eq!(eig.p_used, 2);
        assert!((eig.gains[0] - 1e-6 * want).abs() < 1e-14 * 1e-6 * want);
    }

    #[test]
    fn fscm_single_pair_closed_form_capacity() {
        let d0 = 0.5;
        let (g, c) = fscm_single(d0);
        let eig = eigenchannel_decompose(&g, &c, PPolicy::default()).unwrap();
        let snr = c.total_power() / (2.0 * c.a_r() * c.noise_var());
        let want = 2.0 * (1.0 + c.mu() * snr * c.a_r() * c.a_t() / (16.0 * PI * PI * d0 * d0)).log2();
        let got = capacity(&eig, &c).unwrap();
        assert!((got - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn unit_capacity() {
        let c = cfg(1.0);
        let g = (1.0 / (c.mu() * c.snr(1))).sqrt();
        assert!((capacity_from_gains(&[g], 1, &c).unwrap() - 1.0).abs() < 1e-14);
        assert!(capacity_from_gains(&[g], 0, &c).is_err());
        assert!(capacity_from_gains(&[g], 2, &c).is_err());
    }

    fn small_ocm() -> (BlockChannelMatrix, PhysicalConfig) {
        let c = cfg(0.01);
        let tx = build_planar_surface(3, 2, 0.05).unwrap();
        let rx = build_planar_surface(2, 2, 0.05).unwrap();
        let link = LinkGeometry::new(0.2, 0.3, 0.1).unwrap();
        (assemble_ocm(&tx, &rx, &link, c.k0()).unwrap(), c)
    }

    #[test]
    fn decomposition_reconstructs_and_patterns_orthonormal() {
        let (g, c) = small_ocm();
        let full = g.nrows().min(g.ncols());
        let eig = eigenchannel_decompose(&g, &c, PPolicy::Fixed(full)).unwrap();
        assert_eq!(eig.p_used, full);
        let d = Mat::from_fn(full, full, |i, j| {
            if i == j { Complex64::new(eig.gains[i], 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let rebuilt = &eig.rx_patterns * &d * eig.tx_patterns.adjoint();
        let err = (&rebuilt - g.dense()).norm_l2() / g.frobenius_norm();
        assert!(err < 1e-10, "{err}");

        for (pat, area) in [(&eig.tx_patterns, c.a_t()), (&eig.rx_patterns, c.a_r())] {
            let scaled = pat * faer::Scale(Complex64::new(area.sqrt(), 0.0));
            let gram = scaled.adjoint() * &scaled;
            let eye = Mat::<Complex64>::identity(full, full);
            assert!((&gram - &eye).norm_l2() < 1e-10);
        }
        assert!(eig.gains.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn decomposition_rejects_scaled_input() {
        let (g, c) = small_ocm();
        let h = channel_from_green(&g, &c).unwrap();
        assert!(matches!(
            eigenchannel_decompose(&h, &c, PPolicy::default()),
            Err(ChannelError::InvalidState(_))
        ));
    }

    #[test]
    fn gains_ignore_global_phase() {
        let (g, c) = small_ocm();
        let base = eigenchannel_decompose(&g, &c, PPolicy::default()).unwrap();
        let rotated = g.scaled(Complex64::cis(1.234));
        let turned = eigenchannel_decompose(&rotated, &c, PPolicy::default()).unwrap();
        assert_eq!(base.p_used, turned.p_used);
        for (a, b) in base.gains.iter().zip(&turned.gains) {
            assert!((a - b).abs() <= 1e-12 * base.gains[0]);
        }
    }

    proptest! {
        #[test]
        fn capacity_monotonicity(
            gains in proptest::collection::vec(1e-4f64..1.0, 1..6),
            bump in 1.01f64..3.0, k in 0usize..6,
        ) {
            let mut gains = gains;
            gains.sort_by(|a, b| b.total_cmp(a));
            let p = gains.len();
            let c = PhysicalConfig::new(F, 0.01, 0.02, 1e5, 1.0).unwrap();
            let base = capacity_from_gains(&gains, p, &c).unwrap();

            let mut bigger = gains.clone();
            bigger[k % p] *= bump;
            prop_assert!(capacity_from_gains(&bigger, p, &c).unwrap() > base);

            let more_power = c.with_total_power(c.total_power() * bump).unwrap();
            prop_assert!(capacity_from_gains(&gains, p, &more_power).unwrap() > base);

            let noisier = c.with_noise_var(c.noise_var() * bump).unwrap();
            prop_assert!(capacity_from_gains(&gains, p, &noisier).unwrap() < base);
        }
    }
}
