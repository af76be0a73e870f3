//! Hybrid Lagrangian-Eulerian edge-strength fields for multifield
//! time-dependent datasets, with an FTLE baseline, 2D ridge extraction,
//! and ridge-comparison metrics.
//!
//! The pipeline: integrate a pathline from every grid node, lift it into
//! attribute space by sampling the scalar fields along it, summarize each
//! lifted trajectory by statistical moments, and measure spatial
//! discontinuity of the resulting feature field as the spectral norm of a
//! locally fitted linear map.

pub mod cli;
pub mod edge;
pub mod error;
pub mod flows;
pub mod ftle;
pub mod ridge;
pub mod grid;
pub mod integrate;
pub mod io;
pub mod lift;

#[cfg(test)]
pub(crate) mod testutil;

pub use edge::{edge_strength_field, fit_local_linear, spectral_norm, EdgeField, LocalLinearFit, ScalarField};
pub use error::{Error, Result};
pub use flows::{attach_scalar, rasterize_flow, AnalyticFlow, ScalarGenSpec};
pub use ftle::{ftle_field, ftle_from_flow_map, Direction, FtleField};
pub use grid::{GridSpec, MultifieldDataset, Point, TimeAxis};
pub use integrate::{flow_map, integrate_pathline, BoundaryPolicy, FlowMap, IntegrationConfig, Trajectory};
pub use ridge::{extract_ridges, point_polyline_distance, ridge_dissimilarity, ridge_set_distance, DirectedDistance, RidgeLine, RidgeParams, RidgeSetDistance};
pub use lift::{compute_moments, feature_field, lift_trajectory, DataTrajectory, FeatureField, MomentSpec};
