//! Line-of-sight channel models for holographic MIMO surfaces.
//!
//! The crate builds the 3M×3N polarization-resolved Green matrix between a
//! transmitting and a receiving planar surface in three ways:
//!
//! * [`green::assemble_ocm`] evaluates the exact dyadic Green function for
//!   every element pair (the reference model, OCM);
//! * [`separable::assemble_pscm`] factors the pair phase into TX-only and
//!   RX-only array responses by replacing each pair distance with a lower
//!   bound (PSCM and its truncations PSCM123 / PSCM12);
//! * [`separable::assemble_fscm`] is the far-field limit, a Kronecker product
//!   of the array-response outer product with a rank-2 transverse projector.
//!
//! [`metrics::nmse`] compares models and [`capacity`] turns a Green matrix
//! into eigenchannel gains and a uniform-power capacity.

#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod capacity;
pub mod error;
pub mod geometry;
pub mod green;
pub mod matrix;
pub mod metrics;
pub mod separable;

pub use capacity::{
    capacity, capacity_from_gains, channel_from_green, eigenchannel_decompose, select_p,
    singular_values, EigenchannelSet, PPolicy, PhysicalConfig, FREE_SPACE_IMPEDANCE, SPEED_OF_LIGHT,
};
pub use error::{ChannelError, Result};
pub use geometry::{
    alpha_factor, build_planar_surface, gamma_factor, pair_displacement, rayleigh_distance,
    wavevector, LinkGeometry, SurfaceLayout,
};
pub use green::{assemble_ocm, green_dyadic, green_dyadic_far, FarFieldSign, PolarizationDyad};
pub use matrix::{BlockChannelMatrix, ModelVariant};
pub use metrics::{nmse, ModelComparison};
pub use separable::{
    a_blocks, array_response, assemble_fscm, assemble_pscm, omega_pair, pscm_pair, ABlockSet,
    ArrayResponse, OmegaPair, PscmTerms,
};

pub use nalgebra::{Matrix3, Vector3};
pub use num_complex::Complex64;
