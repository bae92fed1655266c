pub mod error;
pub mod expr;
pub mod grid;
pub mod lab;
pub mod operators;
pub mod orlicz;
pub mod oscillation;
pub mod quad;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{CellCube, Domain, DyadicCube, DyadicGrid, FunctionId, Pyramid, SampledFunction};
pub use operators::{CommutatorSpec, HaarShift, LevelWindow, Operator};
pub use orlicz::{Flavor, YoungFunction};
pub use oscillation::{DecompositionTree, TreeMode};
pub use weights::{CubeConstant, CubeFamily, WeightPair};
