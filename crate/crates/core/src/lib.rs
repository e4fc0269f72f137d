//! Physics-guided sequencing toolkit for autoregressive radio-map construction.
//!
//! The crate covers everything around the neural model itself:
//!
//! * [`envmap`]: height maps, radio fields, the RGF1 grid format and transmitter masks.
//! * [`propagation`]: free-space pathloss, link-budget threshold, ray-sampled
//!   blockage ratio and the pathloss anchor map.
//! * [`ordering`]: the wavefront generation order (blockage-weighted Dijkstra on
//!   the patch graph), geometric scan orders, pathloss-ranked orders and the
//!   predecessor-containment verifier.
//! * [`entropy`]: predictive entropy from logit traces, exact chain-rule oracles
//!   and limited-context experiments on small joints.
//! * [`rope`]: 1D and 3D rotary position kernels.
//! * [`metrics`]: NMSE, RMSE, PSNR, SSIM, the multi-scale gradient regularizer
//!   and histogram statistics.
//! * [`synth`]: procedural cities and pseudo ground-truth fields.

pub mod entropy;
pub mod envmap;
pub mod error;
pub mod metrics;
pub mod ordering;
pub mod propagation;
pub mod rope;
pub mod synth;

pub use error::{Error, Result};

/// Deterministic RNG used for every seeded operation in the toolkit.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
