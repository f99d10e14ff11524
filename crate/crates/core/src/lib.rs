pub mod atoms;
pub mod carleson;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod maximal;
pub mod means;
pub mod mixed_norm;
pub mod paraproducts;
pub mod quad;
pub mod seq;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
pub use grid::Resolution;
pub use series::PowerSeries;
