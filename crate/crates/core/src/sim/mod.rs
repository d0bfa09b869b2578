//! BPSK/AWGN Monte-Carlo harness.

mod channel;
mod experiment;
mod output;

pub use channel::{channel_transmit, noise_variance, ChannelConfig, Frame};
pub use experiment::{
    run_experiment, run_point, sweep, DecoderKind, DecoderSpec, OmegaMode, SimResult, StopRule, BATCH,
};
pub use output::{emit_results, read_json, write_csv, write_json, Format, Provenance, Report, CSV_COLUMNS, VERSION};
