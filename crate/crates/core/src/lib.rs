pub mod calibration;
pub mod cli;
pub mod controller;
pub mod csvio;
pub mod error;
pub mod estimator;
pub mod family;
pub mod harness;
pub mod krylov;
pub mod linalg;
pub mod qfi;
pub mod seeding;
pub mod shadow;
pub mod stopping;

pub use error::{Error, Result};
