pub mod bj;
pub mod bounds;
pub mod conway;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod families;
pub mod pretzel;
pub mod rational;
pub mod search;
pub mod section3;

pub use error::{Error, Result};
