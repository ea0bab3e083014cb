//! Dependence analysis for bivariate copulas.

pub mod archimedean;
pub mod copula;
pub mod error;
pub mod evc;
pub mod families;
pub mod normal;
pub mod properties;
pub mod registry;
pub mod sampler;
pub mod verdict;

pub use copula::{Copula, GridConfig, Label, Rectangle, Spacing};
pub use error::{Error, Result};
pub use properties::Property;
pub use verdict::{Status, Tolerances, Verdict, Witness};
