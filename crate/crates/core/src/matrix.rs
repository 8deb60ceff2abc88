use std::fmt;
use std::str::FromStr;

use faer::Mat;
use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ChannelError, Result};

/// Which model produced a channel matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelVariant {
    #[serde(rename = "FSCM")]
    Fscm,
    #[serde(rename = "OCM")]
    Ocm,
    #[serde(rename = "PSCM")]
    Pscm,
    #[serde(rename = "PSCM12")]
    Pscm12,
    #[serde(rename = "PSCM123")]
    Pscm123,
}

impl ModelVariant {
    /// All variants, in the (alphabetical) order used for output columns.
    pub const ALL: [ModelVariant; 5] = [
        ModelVariant::Fscm,
        ModelVariant::Ocm,
        ModelVariant::Pscm,
        ModelVariant::Pscm12,
        ModelVariant::Pscm123,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ModelVariant::Fscm => "FSCM",
            ModelVariant::Ocm => "OCM",
            ModelVariant::Pscm => "PSCM",
            ModelVariant::Pscm12 => "PSCM12",
            ModelVariant::Pscm123 => "PSCM123",
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelVariant {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self> {
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ChannelError::InvalidArgument(format!("unknown model variant '{s}'")))
    }
}

/// Dense 3M×3N complex matrix made of M×N polarization blocks.
///
/// Block `(m, n)` occupies rows `3m..3m+3` and columns `3n..3n+3`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockChannelMatrix {
    data: Mat<Complex64>,
    m_count: usize,
    n_count: usize,
    variant: ModelVariant,
    scale_applied: bool,
}

impl BlockChannelMatrix {
    pub fn zeros(m_count: usize, n_count: usize, variant: ModelVariant) -> Self {
        Self {
            data: Mat::zeros(3 * m_count, 3 * n_count),
            m_count,
            n_count,
            variant,
            scale_applied: false,
        }
    }

    /// Assembles the matrix one RX element (block row) at a time. Rows are
    /// evaluated in parallel; placement is fixed by index. On failure the
    /// error of the lowest failing row is returned.
    pub fn from_block_rows<F, E>(
        m_count: usize,
        n_count: usize,
        variant: ModelVariant,
        row: F,
    ) -> std::result::Result<Self, E>
    where
        F: Fn(usize) -> std::result::Result<Vec<Matrix3<Complex64>>, E> + Sync,
        E: Send,
    {
        let rows: Vec<_> = (0..m_count).into_par_iter().map(&row).collect();
        let mut out = Self::zeros(m_count, n_count, variant);
        for (m, blocks) in rows.into_iter().enumerate() {
            let blocks = blocks?;
            debug_assert_eq!(blocks.len(), n_count);
            for (n, b) in blocks.iter().enumerate() {
                out.set_block(m, n, b);
            }
        }
        Ok(out)
    }

    pub fn from_dense(
        data: Mat<Complex64>,
        variant: ModelVariant,
        scale_applied: bool,
    ) -> Result<Self> {
        if !data.nrows().is_multiple_of(3) || !data.ncols().is_multiple_of(3) {
            return Err(ChannelError::InvalidArgument(format!(
                "dense matrix {}x{} is not made of 3x3 blocks",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { m_count: data.nrows() / 3, n_count: data.ncols() / 3, data, variant, scale_applied })
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn n_count(&self) -> usize {
        self.n_count
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn scale_applied(&self) -> bool {
        self.scale_applied
    }

    pub fn dense(&self) -> &Mat<Complex64> {
        &self.data
    }

    pub fn block(&self, m: usize, n: usize) -> Matrix3<Complex64> {
        Matrix3::from_fn(|i, j| self.data[(3 * m + i, 3 * n + j)])
    }

    pub fn set_block(&mut self, m: usize, n: usize, block: &Matrix3<Complex64>) {
        for i in 0..3 {
            for j in 0..3 {
                self.data[(3 * m + i, 3 * n + j)] = block[(i, j)];
            }
        }
    }

    /// Multiplies every entry by `factor`, keeping tags.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.data = Mat::from_fn(self.nrows(), self.ncols(), |i, j| self.data[(i, j)] * factor);
        out
    }

    pub(crate) fn mark_scaled(mut self) -> Self {
        self.scale_applied = true;
        self
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm_l2()
    }
}
