//! Lie symmetry analysis, symmetry reduction and conservation laws for
//! polynomial evolution-type PDEs in two independent variables.

pub mod coeff;
pub mod expr;
pub mod jet;
pub mod vfield;
pub mod linalg;
pub mod detsolve;
pub mod liealg;
pub mod flows;
pub mod reduce;
pub mod nonclassical;
pub mod conslaw;
pub mod dsl;
pub mod report;
