//! Successive-cancellation decoding over the full binary tree, min-sum form.
//!
//! The traversal is left-first and depth-first; every leaf is visited exactly
//! once per pass, in ascending index order. Leaf decisions go through a
//! [`LeafRule`], which is how plain SC, forced flips and the genie-aided
//! oracle share one traversal.

use crate::construction::PolarCode;
use crate::error::{Error, Result};
use crate::Bit;

/// Left-child LLR update: `sign(a)·sign(b)·min(|a|, |b|)`.
#[inline(always)]
pub fn f_kernel(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Right-child LLR update: `b + (1 - 2β)·a`.
#[inline(always)]
pub fn g_kernel(a: f64, b: f64, beta: Bit) -> f64 {
    if beta == 0 {
        b + a
    } else {
        b - a
    }
}

/// Hard decision on an LLR; ties decode to 0.
#[inline(always)]
pub fn hard_decision(llr: f64) -> Bit {
    (llr < 0.0) as Bit
}

/// Partial-sum combination: `[β^l ⊕ β^r, β^r]`.
pub fn combine(left: &[Bit], right: &[Bit]) -> Result<Vec<Bit>> {
    if left.len() != right.len() {
        return Err(Error::LengthMismatch {
            expected: left.len(),
            actual: right.len(),
        });
    }
    let mut out: Vec<Bit> = left.iter().zip(right).map(|(l, r)| l ^ r).collect();
    out.extend_from_slice(right);
    Ok(out)
}

/// Result of one SC pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub channel_llr: Vec<f64>,
    /// Decision LLR seen at each leaf.
    pub leaf_llr: Vec<f64>,
    /// Estimated `û`.
    pub hard_out: Vec<Bit>,
    /// Partial sums at the root, i.e. the re-encoded codeword estimate.
    pub codeword: Vec<Bit>,
}

impl LlrFrame {
    fn with_len(len: usize) -> Self {
        Self {
            channel_llr: vec![0.0; len],
            leaf_llr: vec![0.0; len],
            hard_out: vec![0; len],
            codeword: vec![0; len],
        }
    }

    pub fn leaf_llr_of(&self, i: usize) -> Result<f64> {
        self.leaf_llr.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.leaf_llr.len(),
        })
    }
}

/// Per-stage LLR and partial-sum storage.
///
/// Stage `S` owns `alpha[2^S .. 2^(S+1)]`; the root stage holds the channel
/// LLRs. Partial sums are kept in one length-`N` array indexed by leaf span,
/// so a node's `β` lives at `beta[lo .. lo + 2^S]`.
#[derive(Debug, Clone)]
pub struct StageBuffers {
    alpha: Vec<f64>,
    beta: Vec<Bit>,
}

impl StageBuffers {
    pub fn new(log2_len: usize) -> Self {
        let len = 1usize << log2_len;
        Self {
            alpha: vec![0.0; 2 * len],
            beta: vec![0; len],
        }
    }

    /// LLRs of the node currently held at `stage`.
    pub fn stage(&self, stage: usize) -> &[f64] {
        &self.alpha[1 << stage..2 << stage]
    }

    pub(crate) fn stage_mut(&mut self, stage: usize) -> &mut [f64] {
        &mut self.alpha[1 << stage..2 << stage]
    }

    pub fn beta(&self) -> &[Bit] {
        &self.beta
    }

    pub(crate) fn beta_mut(&mut self) -> &mut [Bit] {
        &mut self.beta
    }

    /// LLRs at `stage` and the partial sums of the node spanning from `lo`.
    pub(crate) fn node_view(&mut self, stage: usize, lo: usize) -> (&[f64], &mut [Bit]) {
        (
            &self.alpha[1 << stage..2 << stage],
            &mut self.beta[lo..lo + (1 << stage)],
        )
    }

    /// Parent LLRs at `stage` → left child at `stage - 1`.
    #[inline]
    pub(crate) fn f_step(&mut self, stage: usize) {
        let h = 1 << (stage - 1);
        let (lower, upper) = self.alpha.split_at_mut(1 << stage);
        let child = &mut lower[h..];
        let (pa, pb) = upper[..2 * h].split_at(h);
        for ((c, &a), &b) in child.iter_mut().zip(pa).zip(pb) {
            *c = f_kernel(a, b);
        }
    }

    /// Parent LLRs at `stage` plus left partial sums at `lo` → right child.
    #[inline]
    pub(crate) fn g_step(&mut self, stage: usize, lo: usize) {
        let h = 1 << (stage - 1);
        let (lower, upper) = self.alpha.split_at_mut(1 << stage);
        let child = &mut lower[h..];
        let (pa, pb) = upper[..2 * h].split_at(h);
        let betas = &self.beta[lo..lo + h];
        for (((c, &a), &b), &s) in child.iter_mut().zip(pa).zip(pb).zip(betas) {
            *c = g_kernel(a, b, s);
        }
    }

    /// Merge the two child partial sums of the node at `stage` spanning from `lo`.
    #[inline]
    pub(crate) fn combine_step(&mut self, stage: usize, lo: usize) {
        let h = 1 << (stage - 1);
        let (left, right) = self.beta[lo..lo + 2 * h].split_at_mut(h);
        for (l, &r) in left.iter_mut().zip(right.iter()) {
            *l ^= r;
        }
    }
}

/// Decides the bit at a leaf.
pub trait LeafRule {
    fn decide(&mut self, index: usize, llr: f64, frozen: bool) -> Bit;
}

/// Plain SC: frozen leaves are 0, others take the hard decision.
pub struct Standard;

impl LeafRule for Standard {
    #[inline(always)]
    fn decide(&mut self, _index: usize, llr: f64, frozen: bool) -> Bit {
        if frozen {
            0
        } else {
            hard_decision(llr)
        }
    }
}

/// SC with the decisions at the given leaves complemented.
pub struct Flipped<'a>(pub &'a [usize]);

impl LeafRule for Flipped<'_> {
    #[inline(always)]
    fn decide(&mut self, index: usize, llr: f64, frozen: bool) -> Bit {
        if frozen {
            0
        } else if self.0.contains(&index) {
            1 - hard_decision(llr)
        } else {
            hard_decision(llr)
        }
    }
}

/// Genie: corrects the first wrong non-frozen decision, once.
pub struct Oracle<'a> {
    pub truth: &'a [Bit],
    pub corrected: Option<usize>,
}

impl LeafRule for Oracle<'_> {
    #[inline(always)]
    fn decide(&mut self, index: usize, llr: f64, frozen: bool) -> Bit {
        if frozen {
            return 0;
        }
        let bit = hard_decision(llr);
        if self.corrected.is_none() && bit != self.truth[index] {
            self.corrected = Some(index);
            return self.truth[index];
        }
        bit
    }
}

/// Reusable SC decoder; owns its stage buffers and the last decoded frame.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    log2_len: usize,
    frozen: Vec<bool>,
    buffers: StageBuffers,
    frame: LlrFrame,
}

impl ScDecoder {
    pub fn new(code: &PolarCode) -> Self {
        Self::from_frozen_mask(code.frozen_mask())
    }

    pub fn from_frozen_mask(frozen: &[bool]) -> Self {
        assert!(frozen.len().is_power_of_two());
        let log2_len = frozen.len().trailing_zeros() as usize;
        Self {
            log2_len,
            frozen: frozen.to_vec(),
            buffers: StageBuffers::new(log2_len),
            frame: LlrFrame::with_len(frozen.len()),
        }
    }

    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    /// The frame produced by the most recent pass.
    pub fn frame(&self) -> &LlrFrame {
        &self.frame
    }

    pub fn decode(&mut self, channel_llr: &[f64]) -> Result<&LlrFrame> {
        self.run(channel_llr, &mut Standard)?;
        Ok(&self.frame)
    }

    /// SC pass with the decisions at `flips` complemented.
    pub fn decode_flipped(&mut self, channel_llr: &[f64], flips: &[usize]) -> Result<&LlrFrame> {
        for &i in flips {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                });
            }
            if self.frozen[i] {
                return Err(Error::FrozenFlip(i));
            }
        }
        self.run(channel_llr, &mut Flipped(flips))?;
        Ok(&self.frame)
    }

    /// Oracle-assisted pass. Returns the leaf that was corrected, if any.
    pub fn decode_oracle(&mut self, channel_llr: &[f64], truth: &[Bit]) -> Result<Option<usize>> {
        if truth.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: truth.len(),
            });
        }
        let mut rule = Oracle { truth, corrected: None };
        self.run(channel_llr, &mut rule)?;
        Ok(rule.corrected)
    }

    /// Runs one full traversal with a custom leaf rule.
    pub fn run<R: LeafRule>(&mut self, channel_llr: &[f64], rule: &mut R) -> Result<()> {
        if channel_llr.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: channel_llr.len(),
            });
        }
        self.frame.channel_llr.copy_from_slice(channel_llr);
        self.buffers.stage_mut(self.log2_len).copy_from_slice(channel_llr);
        self.descend(self.log2_len, 0, rule);
        self.frame.codeword.copy_from_slice(self.buffers.beta());
        Ok(())
    }

    fn descend<R: LeafRule>(&mut self, stage: usize, lo: usize, rule: &mut R) {
        if stage == 0 {
            let llr = self.buffers.stage(0)[0];
            let bit = rule.decide(lo, llr, self.frozen[lo]);
            self.frame.leaf_llr[lo] = llr;
            self.frame.hard_out[lo] = bit;
            self.buffers.beta_mut()[lo] = bit;
            return;
        }
        let h = 1 << (stage - 1);
        self.buffers.f_step(stage);
        self.descend(stage - 1, lo, rule);
        self.buffers.g_step(stage, lo);
        self.descend(stage - 1, lo + h, rule);
        self.buffers.combine_step(stage, lo);
    }
}

/// One SC pass over `channel_llr`.
pub fn sc_decode(code: &PolarCode, channel_llr: &[f64]) -> Result<LlrFrame> {
    let mut dec = ScDecoder::new(code);
    dec.decode(channel_llr)?;
    Ok(dec.frame)
}

/// Genie-aided SC: returns the frame and whether it equals `true_u`.
pub fn sc_oracle_decode(code: &PolarCode, channel_llr: &[f64], true_u: &[Bit]) -> Result<(LlrFrame, bool)> {
    let mut dec = ScDecoder::new(code);
    dec.decode_oracle(channel_llr, true_u)?;
    let ok = dec.frame.hard_out == true_u;
    Ok((dec.frame, ok))
}

/// `leaf_llr[i]` of a decoded frame.
pub fn leaf_llr_of(frame: &LlrFrame, i: usize) -> Result<f64> {
    frame.leaf_llr_of(i)
}
