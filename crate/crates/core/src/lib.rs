//! Jones β numbers, multiresolution ball families and the traveling
//! salesman square sum, with constructions and oracles to compare them.

pub mod beta;
pub mod construction;
pub mod curve;
pub mod datasets;
mod enclosing;
pub mod error;
pub mod filtration;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod jones;
pub mod mst;
pub mod nets;
pub mod pipeline;

pub use beta::{beta_oracle_2d, beta_points, beta_polyline, BetaMethod, BetaValue};
pub use construction::{construct, farthest_insertion_order, Construction, ConstructionParams};
pub use curve::{clip_length, curve_length, PolylineCurve};
pub use datasets::{embed_isometric, generate, DatasetKind, DatasetSpec};
pub use error::{Error, Result};
pub use filtration::{beta_tilde, dyadic_filtration, square_sum, Arc, DyadicFiltration};
pub use geometry::{diameter, distance, point_line_distance, Ball, Line, Point, PointSet};
pub use graph::{total_length, GeometricGraph};
pub use jones::{integral_estimate, jones_function, jones_sum, JonesReport, Target};
pub use mst::{euler_parametrization, mst, EulerTour};
pub use nets::{build_family, build_nested_nets, MultiresolutionFamily, NestedNets};
pub use pipeline::{compare, ComparisonReport};
