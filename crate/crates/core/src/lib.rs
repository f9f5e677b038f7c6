//! Bell inequalities built from polyhedral measurement sets: geometry,
//! exact local bounds, quantum values and noise robustness.

pub mod error;
pub mod functional;
pub mod localbound;
pub mod matrix;
pub mod polyhedra;
pub mod quantum;
pub mod report;
pub mod robustness;

pub use error::{Error, Result};
pub use functional::{BellFunctional, SignedPermutation};
pub use localbound::{LocalBoundOptions, LocalBoundResult, StrategyAssignment};
pub use matrix::Matrix;
pub use polyhedra::{Orientation, Solid, UnitVec3, VertexSet};
pub use quantum::{CorrelationPoint, SeeSawConfig, SeeSawResult};
pub use robustness::{GilbertConfig, GilbertResult, RobustnessConfig, RobustnessTrace};
pub use report::{Check, Report, ReportRow, Table1Row};
