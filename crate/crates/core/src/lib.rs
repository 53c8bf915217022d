pub mod channel;
pub mod cli;
pub mod config;
pub mod geodesy;
pub mod gp;
pub mod harness;
pub mod rng;
pub mod sampling;
pub mod strategies;
pub mod vehicle;
