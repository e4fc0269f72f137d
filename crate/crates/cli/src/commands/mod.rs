pub mod anchor;
pub mod entropy;
pub mod metrics;
pub mod order;
pub mod selftest;
pub mod synth;
