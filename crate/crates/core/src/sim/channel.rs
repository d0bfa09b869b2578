//! BPSK over AWGN, and the per-frame random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::construction::{polar_transform, PolarCode};
use crate::Bit;

/// Noise variance for BPSK at the given Eb/N0 (dB) and code rate.
pub fn noise_variance(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    /// Rate used to scale the noise, CRC bits included.
    pub rate: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn for_code(code: &PolarCode, ebn0_db: f64, seed: u64) -> Self {
        Self {
            ebn0_db,
            rate: code.rate(),
            seed,
        }
    }

    pub fn sigma2(&self) -> f64 {
        noise_variance(self.ebn0_db, self.rate)
    }

    /// Generator for frame `index` at this operating point. Streams depend
    /// only on (seed, Eb/N0, index), so any schedule reproduces them.
    pub fn frame_rng(&self, index: u64) -> ChaCha8Rng {
        let key = splitmix64(self.seed ^ splitmix64(self.ebn0_db.to_bits()));
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.set_stream(index);
        rng
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// BPSK-modulates `codeword` (`0 → +1`), adds noise of variance `sigma2`
/// and returns the channel LLRs `2y/σ²`.
pub fn channel_transmit<R: Rng + ?Sized>(codeword: &[Bit], sigma2: f64, rng: &mut R) -> Vec<f64> {
    let sigma = sigma2.sqrt();
    codeword
        .iter()
        .map(|&x| {
            let n: f64 = rng.sample(StandardNormal);
            let y = (1.0 - 2.0 * x as f64) + sigma * n;
            2.0 * y / sigma2
        })
        .collect()
}

/// One transmitted frame: leaf vector `u` and the received LLRs.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub u: Vec<Bit>,
    pub llr: Vec<f64>,
}

impl Frame {
    /// Random payload, CRC, encoding and channel, all drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(code: &PolarCode, sigma2: f64, rng: &mut R) -> Self {
        let payload: Vec<Bit> = (0..code.info_len()).map(|_| rng.random_range(0..2)).collect();
        let u = code.place(&payload).expect("payload length matches code");
        let mut x = u.clone();
        polar_transform(&mut x);
        let llr = channel_transmit(&x, sigma2, rng);
        Self { u, llr }
    }

    pub fn generate(code: &PolarCode, cfg: &ChannelConfig, index: u64) -> Self {
        Self::random(code, cfg.sigma2(), &mut cfg.frame_rng(index))
    }
}
