//! Heat-kernel entropy and area growth of closed surfaces in curved
//! ambients, discrete mean curvature flow, and checks of the monotonicity
//! and entropy/area-growth equivalence statements along such flows.
//!
//! Ambients are Euclidean space, flat tori and the unit round 3-sphere.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod cli;
pub mod error;
pub mod flow;
pub mod functionals;
pub mod heat_kernel;
pub mod linalg;
pub mod numerics;
pub mod surface;
pub mod verify;

pub use ambient::{Ambient, AmbientMetadata, Isometry, Point};
pub use error::{Error, MeshError, Result};
pub use flow::{first_variation_check, flow_step, run_flow, FlowConfig, FlowSeries, FlowState};
pub use functionals::{
    area_growth, entropy, equivalence_check, f_functional, li_yau_check, AreaGrowthReport, BoundCheckReport, EntropyReport,
    SearchConfig,
};
pub use surface::{mean_curvature, CurvatureField, Shape, SurfaceMesh};
pub use heat_kernel::{backward_kernel, heat_kernel, KernelConfig, KernelValue, SeriesForm};
