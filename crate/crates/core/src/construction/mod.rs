//! Polar code construction from the 5G reliability sequence, encoding and
//! CRC attachment.

pub mod crc;
pub mod sequence;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Bit;
pub use crc::{Crc, CRC16_CCITT};
pub use sequence::{ReliabilitySequence, MAX_LOG2_LEN, SEQUENCE_5G};

/// A polar code with an optional outer CRC.
///
/// `k` counts the CRC bits: the non-frozen positions carry `info_len()`
/// payload bits followed by `crc_len()` CRC bits, in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCode {
    log2_len: usize,
    frozen: Vec<bool>,
    info_positions: Vec<usize>,
    crc: Option<Crc>,
}

impl PolarCode {
    /// Freezes the `2^n - k` least reliable indices of the 5G sequence.
    pub fn build(log2_len: usize, k: usize, crc_len: usize, crc_poly: u64) -> Result<Self> {
        if !(1..=MAX_LOG2_LEN).contains(&log2_len) {
            return Err(Error::InvalidCode(format!("n = {log2_len} outside 1..={MAX_LOG2_LEN}")));
        }
        let len = 1usize << log2_len;
        if k == 0 || k > len {
            return Err(Error::InvalidCode(format!("K = {k} outside 1..={len}")));
        }
        let seq = ReliabilitySequence::for_length(log2_len)?;
        let mut frozen = vec![false; len];
        for &q in &seq.order()[..len - k] {
            frozen[q] = true;
        }
        Self::from_frozen_mask(frozen, crc_len, crc_poly)
    }

    /// A code with an explicit frozen pattern (`true` = frozen).
    pub fn from_frozen_mask(frozen: Vec<bool>, crc_len: usize, crc_poly: u64) -> Result<Self> {
        let len = frozen.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_LOG2_LEN {
            return Err(Error::InvalidCode(format!(
                "block length {len} is not a power of two in 2..=1024"
            )));
        }
        let info_positions: Vec<usize> = (0..len).filter(|&i| !frozen[i]).collect();
        let k = info_positions.len();
        if crc_len >= k {
            return Err(Error::InvalidCode(format!(
                "CRC length {crc_len} must be smaller than K = {k}"
            )));
        }
        if crc_len >= 64 {
            return Err(Error::InvalidCode(format!("CRC length {crc_len} > 63")));
        }
        Ok(Self {
            log2_len: len.trailing_zeros() as usize,
            frozen,
            info_positions,
            crc: (crc_len > 0).then(|| Crc::new(crc_poly, crc_len)),
        })
    }

    /// `n`, with `N = 2^n`.
    pub fn log2_len(&self) -> usize {
        self.log2_len
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    /// Number of non-frozen positions, CRC included.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn crc_len(&self) -> usize {
        self.crc.map_or(0, |c| c.len())
    }

    pub fn crc(&self) -> Option<&Crc> {
        self.crc.as_ref()
    }

    pub fn info_len(&self) -> usize {
        self.k() - self.crc_len()
    }

    /// `K / N`.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Non-frozen indices, ascending.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn frozen_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.frozen[i]).collect()
    }

    /// Builds the leaf vector `u`: payload, then its CRC, on the non-frozen
    /// positions; zeros elsewhere.
    pub fn place(&self, payload: &[Bit]) -> Result<Vec<Bit>> {
        if payload.len() != self.info_len() {
            return Err(Error::LengthMismatch {
                expected: self.info_len(),
                actual: payload.len(),
            });
        }
        let mut u = vec![0; self.len()];
        let crc_bits = self.crc.map(|c| c.compute(payload)).unwrap_or_default();
        for (&pos, &bit) in self.info_positions.iter().zip(payload.iter().chain(crc_bits.iter())) {
            u[pos] = bit;
        }
        Ok(u)
    }

    /// Codeword `x = u · G^{⊗n}`.
    pub fn encode(&self, payload: &[Bit]) -> Result<Vec<Bit>> {
        let mut x = self.place(payload)?;
        polar_transform(&mut x);
        Ok(x)
    }

    /// The `K` bits on the non-frozen positions of `u`.
    pub fn extract_block(&self, u: &[Bit]) -> Vec<Bit> {
        self.info_positions.iter().map(|&i| u[i]).collect()
    }

    /// The payload bits of `u`, CRC stripped.
    pub fn extract_payload(&self, u: &[Bit]) -> Vec<Bit> {
        self.info_positions[..self.info_len()].iter().map(|&i| u[i]).collect()
    }

    /// True if `u` passes the CRC, or if the code has none.
    pub fn crc_passes(&self, u: &[Bit]) -> bool {
        match &self.crc {
            Some(crc) => crc.check(&self.extract_block(u)),
            None => true,
        }
    }

    /// True if the payload carried by `a` equals the one carried by `b`.
    pub fn payload_matches(&self, a: &[Bit], b: &[Bit]) -> bool {
        self.info_positions[..self.info_len()].iter().all(|&i| a[i] == b[i])
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        CodeDescriptor {
            n: self.log2_len,
            k: self.k(),
            crc_len: self.crc_len(),
            crc_poly_hex: format!("0x{:X}", self.crc.map_or(CRC16_CCITT, |c| c.poly())),
            frozen_mask_hex: mask_to_hex(&self.frozen),
        }
    }

    pub fn from_descriptor(desc: &CodeDescriptor) -> Result<Self> {
        let len = 1usize
            .checked_shl(desc.n as u32)
            .ok_or_else(|| Error::Descriptor(format!("n = {}", desc.n)))?;
        let frozen = mask_from_hex(&desc.frozen_mask_hex, len)?;
        let poly = parse_hex(&desc.crc_poly_hex)?;
        let code = Self::from_frozen_mask(frozen, desc.crc_len, poly)?;
        if code.k() != desc.k {
            return Err(Error::Descriptor(format!(
                "K = {} but the mask has {} non-frozen positions",
                desc.k,
                code.k()
            )));
        }
        Ok(code)
    }
}

/// JSON-serializable description of a [`PolarCode`].
///
/// `frozen_mask_hex` packs the mask MSB-first: index 0 is the top bit of the
/// first hex digit, zero-padded to a whole digit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub crc_len: usize,
    pub crc_poly_hex: String,
    pub frozen_mask_hex: String,
}

fn mask_to_hex(mask: &[bool]) -> String {
    mask.chunks(4)
        .map(|nib| {
            let v = nib
                .iter()
                .enumerate()
                .fold(0u32, |acc, (j, &b)| acc | ((b as u32) << (3 - j)));
            char::from_digit(v, 16).unwrap().to_ascii_uppercase()
        })
        .collect()
}

/// Inverse of the descriptor mask packing for a code of length `len`.
pub fn mask_from_hex(hex: &str, len: usize) -> Result<Vec<bool>> {
    let digits: Vec<u32> = hex
        .trim_start_matches("0x")
        .chars()
        .map(|c| c.to_digit(16))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Descriptor(format!("bad hex mask {hex:?}")))?;
    if digits.len() != len.div_ceil(4) {
        return Err(Error::Descriptor(format!(
            "mask has {} hex digits, expected {}",
            digits.len(),
            len.div_ceil(4)
        )));
    }
    Ok((0..len).map(|i| (digits[i / 4] >> (3 - i % 4)) & 1 == 1).collect())
}

/// Hex integer with optional `0x` prefix.
pub fn parse_hex(s: &str) -> Result<u64> {
    let t = s.trim();
    let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(t, 16).map_err(|_| Error::Descriptor(format!("bad hex value {s:?}")))
}

/// In-place `x ← x · G^{⊗n}` over GF(2) by XOR butterflies. Self-inverse.
pub fn polar_transform(bits: &mut [Bit]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (left, right) = block.split_at_mut(half);
            for (l, r) in left.iter_mut().zip(right.iter()) {
                *l ^= *r;
            }
        }
        half *= 2;
    }
}
