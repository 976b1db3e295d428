pub mod error;
pub mod harness;
pub mod linalg;
pub mod objective;
pub mod operators;
pub mod optimizer;
pub mod metrics;
