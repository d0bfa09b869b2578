//! Shared fixtures for the decoder benchmarks.

use polarflip_core::sim::{ChannelConfig, Frame};
use polarflip_core::{PolarCode, CRC16_CCITT};

/// `PC(2^n, k)` with the 16-bit CCITT CRC.
pub fn code(n: usize, k: usize) -> PolarCode {
    PolarCode::build(n, k, 16, CRC16_CCITT).expect("valid benchmark code")
}

/// Channel LLRs of `count` noisy frames.
pub fn noisy_frames(code: &PolarCode, ebn0_db: f64, count: u64, seed: u64) -> Vec<Vec<f64>> {
    let cfg = ChannelConfig::for_code(code, ebn0_db, seed);
    (0..count).map(|i| Frame::generate(code, &cfg, i).llr).collect()
}

/// Frames on which plain SC fails, so flip decoders run their retries.
pub fn failing_frames(code: &PolarCode, ebn0_db: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let cfg = ChannelConfig::for_code(code, ebn0_db, seed);
    let mut sc = polarflip_core::ScDecoder::new(code);
    (0..)
        .map(|i| Frame::generate(code, &cfg, i))
        .filter(|f| {
            let u = &sc.decode(&f.llr).expect("frame length").hard_out;
            !code.payload_matches(u, &f.u)
        })
        .take(count)
        .map(|f| f.llr)
        .collect()
}
