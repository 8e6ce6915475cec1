pub mod cli;
pub mod covariance;
pub mod error;
pub mod factors;
pub mod linalg;
pub mod pipeline;
pub mod portfolio;
pub mod synthetic;
pub mod tensor;
