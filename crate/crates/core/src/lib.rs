//! Rank-metric codes in circulant matrix models over finite-field towers.

pub mod aut;
pub mod circulant;
pub mod cli;
pub mod codes;
pub mod error;
pub mod field;
pub mod forms;
pub mod fq;
pub mod io;
pub mod linalg;

pub use error::{Error, Result};
pub use field::{make_field, CoordMap, FEl, Field, FieldRef};
pub use fq::{FqMat, SmallField};
pub use linalg::Mat;
