//! Conformally flat test metrics on a periodic grid: curvature, the
//! geometric primitives of the operator families, quadrature and discrete
//! adjoints.

mod grid;
pub mod io;
mod linop;
mod metric;
pub mod presets;

pub use grid::{Field, StencilOrder, TorusChart};
pub use linop::LinearOp;
pub use metric::{curvature, oracle_curvature, ConformalMetric, CurvatureBundle, GridGeometry, Primitive};
