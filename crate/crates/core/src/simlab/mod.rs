//! Seeded Monte-Carlo validation: moment estimates, the sampled
//! super-Nyquist channel, and random-codebook nearest-neighbor decoding.
//!
//! All randomness comes from [`rng::Stream`]; work is split across stream
//! ids so results do not depend on the number of threads.

pub mod channel;
pub mod decode;
pub mod moments;
pub mod rng;

pub use channel::{simulate_supernyq_channel, window_statistics, SupernyqChannel, SupernyqObservations, WindowStats};
pub use decode::{run_nn_decoding, wilson_interval, DecodeMode, SimChannel, SimConfig, SimResult};
pub use moments::{estimate_moments, MomentEstimate};
