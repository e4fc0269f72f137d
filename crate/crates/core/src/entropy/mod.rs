//! Predictive-entropy analysis: per-step softmax entropy of logit traces,
//! entropy profiles and per-patch entropy differences, plus exact oracles on
//! small enumerable joints (chain-rule totals and limited-context conditionals).
//!
//! All entropies are in nats unless converted with [`EntropyUnit`].

mod joint;
mod shadow;
mod step;
mod trace;

pub use joint::{exact_conditional_entropies, limited_context_entropy, JointDist, MAX_VARS};
pub use shadow::{build_shadow_joint, shadow_joint_from_costs, DEFAULT_FLIP_PROB};
pub use step::{step_entropy, EntropyUnit};
pub use trace::{
    decode_trace, delta_h_map, delta_h_map_mean, encode_trace, entropy_profile, load_trace, save_trace,
    write_profile_csv, DeltaHMap, EntropyProfile, LogitTrace, RawTrace, TRACE_MAGIC,
};
