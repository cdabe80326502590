//! Rate computations.

pub mod closed_form;
pub mod coding;
pub mod envelope;
pub mod kkt;
pub mod reconstruct;
pub mod region;
pub mod theorem;

pub use closed_form::{
    korner_marton_sum_rate, lossless_group_rate, lossy_group_rate, lossy_xor_closed_form, shannon_rd, XorCase,
};
pub use coding::{channel_code_rate, source_code_rate};
pub use envelope::{lower_convex_envelope, Envelope};
pub use kkt::max_coset_conditional_entropy;
pub use reconstruct::{expected_distortion, optimal_reconstruction, Distortion};
pub use region::{berger_tung_region, theorem1_region, ChannelGrid, Channels, FixedEmbedding, GroupChoice, RegionCurve, Retention, SweepConfig};
pub use theorem::{theorem1_rate_point, theorem1_rates, OptionPolicy, Provenance, RatePoint, StageOption};
