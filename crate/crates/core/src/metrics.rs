use serde::{Deserialize, Serialize};

use crate::error::{ChannelError, Result};
use crate::matrix::{BlockChannelMatrix, ModelVariant};

/// Outcome of comparing a candidate model against a reference model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub reference_variant: ModelVariant,
    pub candidate_variant: ModelVariant,
    pub nmse: f64,
    pub frob_ref: f64,
}

impl ModelComparison {
    pub fn new(candidate: &BlockChannelMatrix, reference: &BlockChannelMatrix) -> Result<Self> {
        let (err, ref_sq) = squared_norms(candidate, reference)?;
        Ok(Self {
            reference_variant: reference.variant(),
            candidate_variant: candidate.variant(),
            nmse: err / ref_sq,
            frob_ref: ref_sq.sqrt(),
        })
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn squared_norms(candidate: &BlockChannelMatrix, reference: &BlockChannelMatrix) -> Result<(f64, f64)> {
    if candidate.nrows() != reference.nrows() || candidate.ncols() != reference.ncols() {
        return Err(ChannelError::InvalidArgument(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            candidate.nrows(),
            candidate.ncols(),
            reference.nrows(),
            reference.ncols()
        )));
    }
    if candidate.scale_applied() != reference.scale_applied() {
        return Err(ChannelError::InvalidState(
            "cannot compare a scaled channel with an unscaled Green matrix".into(),
        ));
    }
    let (a, b) = (candidate.dense(), reference.dense());
    let mut err = CompensatedSum::default();
    let mut norm = CompensatedSum::default();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let r = b[(i, j)];
            err.add((a[(i, j)] - r).norm_sqr());
            norm.add(r.norm_sqr());
        }
    }
    let norm = norm.value();
    if norm == 0.0 {
        return Err(ChannelError::DegenerateReference);
    }
    Ok((err.value(), norm))
}

/// `‖candidate − reference‖_F² / ‖reference‖_F²`.
pub fn nmse(candidate: &BlockChannelMatrix, reference: &BlockChannelMatrix) -> Result<f64> {
    let (err, norm) = squared_norms(candidate, reference)?;
    Ok(err / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{channel_from_green, PhysicalConfig};
    use faer::Mat;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn random_like(seed: u64, m: usize, n: usize) -> BlockChannelMatrix {
        // small LCG, enough for deterministic test fill
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let data = Mat::from_fn(3 * m, 3 * n, |_, _| Complex64::new(next(), next()));
        BlockChannelMatrix::from_dense(data, ModelVariant::Ocm, false).unwrap()
    }

    #[test]
    fn identical_matrices() {
        let x = random_like(1, 2, 3);
        assert_eq!(nmse(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn doubled_candidate() {
        let x = random_like(2, 2, 3);
        let y = x.scaled(Complex64::new(2.0, 0.0));
        assert!((nmse(&y, &x).unwrap() - 1.0).abs() < 1e-14);
        let cmp = ModelComparison::new(&y, &x).unwrap();
        assert!((cmp.frob_ref - x.frobenius_norm()).abs() < 1e-12 * cmp.frob_ref);
        assert_eq!(cmp.reference_variant, ModelVariant::Ocm);
    }

    #[test]
    fn error_paths() {
        let x = random_like(3, 2, 3);
        let y = random_like(3, 3, 3);
        assert!(matches!(nmse(&x, &y), Err(ChannelError::InvalidArgument(_))));
        let zero = BlockChannelMatrix::zeros(2, 3, ModelVariant::Ocm);
        assert_eq!(nmse(&x, &zero), Err(ChannelError::DegenerateReference));
        let cfg = PhysicalConfig::from_transmit_snr_db(2.4e9, 1e-4, 1e-4, 0.0).unwrap();
        let scaled = channel_from_green(&x, &cfg).unwrap();
        assert!(matches!(nmse(&scaled, &x), Err(ChannelError::InvalidState(_))));
    }

    #[test]
    fn invariant_under_channel_scaling() {
        let a = random_like(4, 3, 2);
        let b = random_like(5, 3, 2);
        let cfg = PhysicalConfig::from_transmit_snr_db(2.4e9, 2e-4, 3e-4, 0.0).unwrap();
        let before = nmse(&a, &b).unwrap();
        let after = nmse(&channel_from_green(&a, &cfg).unwrap(), &channel_from_green(&b, &cfg).unwrap()).unwrap();
        assert!((before - after).abs() <= 1e-12 * before);
    }

    proptest! {
        #[test]
        fn scale_and_phase_invariance(seed in 0u64..1000, re in -3.0f64..3.0, im in -3.0f64..3.0, phi in -3.2f64..3.2) {
            prop_assume!(re.hypot(im) > 1e-3);
            let a = random_like(seed, 2, 2);
            let b = random_like(seed + 7, 2, 2);
            let base = nmse(&a, &b).unwrap();
            let c = Complex64::new(re, im);
            prop_assert!((nmse(&a.scaled(c), &b.scaled(c)).unwrap() - base).abs() <= 1e-12 * base);
            let e = Complex64::cis(phi);
            prop_assert!((nmse(&a.scaled(e), &b.scaled(e)).unwrap() - base).abs() <= 1e-12 * base);
            prop_assert!(base >= 0.0);
        }
    }
}
