//! Formal and numerical analysis of self-dual SU(2) connections with a Nahm
//! pole on geodesic collars over homogeneous 3-manifolds.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod collar_geometry;
pub mod dynamics;
pub mod frame_algebra;
pub mod log_series;
pub mod nahm_expansion;
pub mod presets;
pub mod random;
pub mod su2;

pub use error::{NahmError, Result};
