pub mod baselines;
pub mod cli;
pub mod curve;
pub mod distributions;
pub mod estimators;
pub mod harness;
pub mod moments;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod roots;
