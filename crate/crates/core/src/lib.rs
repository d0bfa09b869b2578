//! Polar codes with successive-cancellation decoding and its bit-flipping
//! variants.
//!
//! * [`construction`]: 5G-sequence code construction, encoding, CRC.
//! * [`sc`]: min-sum SC over the full tree, plus the genie-aided oracle.
//! * [`flip`]: SC-Flip and thresholded SC-Flip at leaf granularity.
//! * [`fast`]: special-node tree, fast SC and the fast flip decoders.
//! * [`analysis`]: Gaussian approximation and theoretical FER.
//! * [`sim`]: BPSK/AWGN Monte-Carlo harness.

pub mod analysis;
pub mod construction;
pub mod error;
pub mod fast;
pub mod flip;
pub mod sc;
pub mod sim;

/// One bit, stored as 0 or 1.
pub type Bit = u8;

pub use construction::{polar_transform, CodeDescriptor, Crc, PolarCode, ReliabilitySequence, CRC16_CCITT};
pub use error::{Error, Result};
pub use fast::{DecodeTree, FastDecoder, FastOutcome, FlipMode, NodeKind, StepCounter, TopFlipCandidate};
pub use flip::{build_critical_set, omega_star, CriticalSet, FlipDecoder, FlipOutcome, FlipPlan, Threshold};
pub use sc::{sc_decode, sc_oracle_decode, LlrFrame, ScDecoder, StageBuffers};
