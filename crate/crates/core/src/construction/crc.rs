//! Bit-serial CRC over unpacked bits.
//!
//! Register starts at zero, no reflection, no final XOR, MSB first. The
//! generator is given without its leading `x^len` term, e.g. `0x1021` for
//! CRC-16-CCITT.

use crate::Bit;

/// CRC-16-CCITT generator, `x^16 + x^12 + x^5 + 1`.
pub const CRC16_CCITT: u64 = 0x1021;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc {
    poly: u64,
    len: usize,
}

impl Crc {
    /// `len` must be in `1..=63`.
    pub fn new(poly: u64, len: usize) -> Self {
        assert!((1..64).contains(&len), "CRC length must be in 1..=63");
        Self {
            poly: poly & mask(len),
            len,
        }
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Remainder of `bits · x^len` modulo the generator, as an integer.
    pub fn remainder(&self, bits: &[Bit]) -> u64 {
        let top = 1u64 << (self.len - 1);
        let mut reg = 0u64;
        for &b in bits {
            let feedback = ((reg & top) != 0) ^ (b != 0);
            reg = (reg << 1) & mask(self.len);
            if feedback {
                reg ^= self.poly;
            }
        }
        reg
    }

    /// CRC bits, MSB first.
    pub fn compute(&self, bits: &[Bit]) -> Vec<Bit> {
        let rem = self.remainder(bits);
        (0..self.len).rev().map(|k| ((rem >> k) & 1) as Bit).collect()
    }

    /// True if the trailing `len` bits of `block` are the CRC of the rest.
    pub fn check(&self, block: &[Bit]) -> bool {
        if block.len() < self.len {
            return false;
        }
        // Dividing the whole block leaves zero iff the appended CRC matches.
        self.remainder(block) == 0
    }
}

fn mask(len: usize) -> u64 {
    (1u64 << len) - 1
}
