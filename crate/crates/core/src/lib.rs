pub mod canonical;
pub mod diagnostics;
pub mod error;
pub mod glauber;
pub mod graph;
pub mod mountain;
pub mod partition;
pub mod seed;
pub mod tiling;
pub mod torpid;

pub use error::{Error, Result};
