//! Exact symbolic calculus for metric connections on local pre-Leibniz
//! algebroids.

#![allow(clippy::needless_range_loop)]

pub mod algebroid;
pub mod calculus;
pub mod checks;
pub mod document;
pub mod catalog;
pub mod array;
pub mod connection;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod frame;
pub mod levicivita;
pub mod report;

pub use algebroid::{Algebroid, Classification, Section};
pub use array::SparseArray;
pub use error::{GeomError, Result};
pub use forms::EForm;
pub use report::{CheckReport, Residual};
