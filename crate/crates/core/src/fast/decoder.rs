use serde::{Deserialize, Serialize};

use crate::construction::{polar_transform, PolarCode};
use crate::error::{Error, Result};
use crate::flip::Threshold;
use crate::sc::StageBuffers;
use crate::Bit;

use super::nodes::{decode_node_into, node_candidates, TopFlipCandidate};
use super::tree::{DecodeTree, NodeId, NodeKind};

/// Candidate selection and ordering of the fast flip decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlipMode {
    /// No threshold; candidates tried by ascending metric.
    Scf,
    /// Threshold filter; candidates tried in tree order.
    Tscf,
}

/// Decoding-step accounting across frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepCounter {
    pub steps_per_iteration: usize,
    pub total_steps: u64,
    pub total_iterations: u64,
}

impl StepCounter {
    pub fn new(steps_per_iteration: usize) -> Self {
        Self {
            steps_per_iteration,
            ..Self::default()
        }
    }

    pub fn record(&mut self, iterations: usize) {
        self.total_iterations += iterations as u64;
        self.total_steps += (iterations * self.steps_per_iteration) as u64;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FastOutcome {
    pub hard_out: Vec<Bit>,
    pub iterations: usize,
    pub steps: usize,
    pub crc_pass: bool,
}

/// Pruned-tree SC decoder with top-node flipping.
#[derive(Debug, Clone)]
pub struct FastDecoder {
    code: PolarCode,
    tree: DecodeTree,
    steps: usize,
    buffers: StageBuffers,
    hard_out: Vec<Bit>,
    candidates: Vec<TopFlipCandidate>,
}

/// What the traversal does at special nodes besides decoding.
#[derive(Clone, Copy)]
enum Pass<'a> {
    Plain,
    Collect(f64),
    Flip(&'a TopFlipCandidate),
}

impl FastDecoder {
    pub fn new(code: &PolarCode) -> Self {
        Self::with_tree(code, DecodeTree::classify(code))
    }

    /// Uses a caller-supplied tree, e.g. [`DecodeTree::unpruned`].
    pub fn with_tree(code: &PolarCode, tree: DecodeTree) -> Self {
        assert_eq!(tree.frozen_mask(), code.frozen_mask(), "tree built for another code");
        Self {
            steps: tree.steps_per_iteration(),
            buffers: StageBuffers::new(code.log2_len()),
            hard_out: vec![0; code.len()],
            candidates: Vec::new(),
            code: code.clone(),
            tree,
        }
    }

    pub fn code(&self) -> &PolarCode {
        &self.code
    }

    pub fn tree(&self) -> &DecodeTree {
        &self.tree
    }

    pub fn steps_per_iteration(&self) -> usize {
        self.steps
    }

    /// Flip candidates of the last flip decoding, in trial order. Empty if
    /// the initial pass succeeded.
    pub fn candidates(&self) -> &[TopFlipCandidate] {
        &self.candidates
    }

    /// One pruned-tree pass. Returns `û` and the steps spent.
    pub fn decode(&mut self, channel_llr: &[f64]) -> Result<(&[Bit], usize)> {
        self.check_len(channel_llr)?;
        self.run(channel_llr, Pass::Plain);
        Ok((&self.hard_out, self.steps))
    }

    /// Codeword estimate of the last pass.
    pub fn codeword(&self) -> &[Bit] {
        self.buffers.beta()
    }

    pub fn flip_decode(
        &mut self,
        channel_llr: &[f64],
        t_max: usize,
        mode: FlipMode,
        omega: Threshold,
    ) -> Result<FastOutcome> {
        if self.code.crc().is_none() {
            return Err(Error::MissingCrc);
        }
        self.check_len(channel_llr)?;
        self.candidates.clear();
        let pass = if t_max == 0 {
            Pass::Plain
        } else {
            Pass::Collect(match mode {
                FlipMode::Scf => f64::INFINITY,
                FlipMode::Tscf => omega.value(),
            })
        };
        self.run(channel_llr, pass);
        if self.code.crc_passes(&self.hard_out) {
            self.candidates.clear();
            return Ok(self.outcome(1, true));
        }
        if mode == FlipMode::Scf {
            self.candidates.sort_by(|a, b| a.metric.total_cmp(&b.metric));
        }
        self.candidates.truncate(t_max);
        if self.candidates.is_empty() {
            return Ok(self.outcome(1, false));
        }

        let initial = self.hard_out.clone();
        let candidates = std::mem::take(&mut self.candidates);
        let mut iterations = 1;
        for cand in &candidates {
            iterations += 1;
            self.run(channel_llr, Pass::Flip(cand));
            if self.code.crc_passes(&self.hard_out) {
                self.candidates = candidates;
                return Ok(self.outcome(iterations, true));
            }
        }
        self.candidates = candidates;
        Ok(FastOutcome {
            hard_out: initial,
            iterations,
            steps: iterations * self.steps,
            crc_pass: false,
        })
    }

    fn check_len(&self, channel_llr: &[f64]) -> Result<()> {
        if channel_llr.len() != self.code.len() {
            return Err(Error::LengthMismatch {
                expected: self.code.len(),
                actual: channel_llr.len(),
            });
        }
        Ok(())
    }

    fn outcome(&self, iterations: usize, crc_pass: bool) -> FastOutcome {
        FastOutcome {
            hard_out: self.hard_out.clone(),
            iterations,
            steps: iterations * self.steps,
            crc_pass,
        }
    }

    fn run(&mut self, channel_llr: &[f64], pass: Pass<'_>) {
        let n = self.code.log2_len();
        self.buffers.stage_mut(n).copy_from_slice(channel_llr);
        self.visit(DecodeTree::ROOT, pass);
        self.hard_out.copy_from_slice(self.buffers.beta());
        polar_transform(&mut self.hard_out);
    }

    fn visit(&mut self, id: NodeId, pass: Pass<'_>) {
        let node = self.tree.node(id);
        let (stage, lo, kind) = (node.stage, node.lo, node.kind);
        if let Some((left, right)) = node.children {
            self.buffers.f_step(stage);
            self.visit(left, pass);
            self.buffers.g_step(stage, lo);
            self.visit(right, pass);
            self.buffers.combine_step(stage, lo);
            return;
        }
        debug_assert_ne!(kind, NodeKind::Branch);
        let (alpha, beta) = self.buffers.node_view(stage, lo);
        let eta = match pass {
            Pass::Flip(c) if c.node == id => Some(c.eta.as_slice()),
            _ => None,
        };
        decode_node_into(kind, alpha, beta, eta);
        if let Pass::Collect(omega) = pass {
            self.candidates.extend(
                node_candidates(kind, alpha, omega)
                    .into_iter()
                    .map(|f| TopFlipCandidate::new(id, f)),
            );
        }
    }
}

/// Single pruned-tree SC pass.
pub fn fast_sc_decode(code: &PolarCode, tree: &DecodeTree, channel_llr: &[f64]) -> Result<(Vec<Bit>, usize)> {
    let mut dec = FastDecoder::with_tree(code, tree.clone());
    let (u, steps) = dec.decode(channel_llr)?;
    Ok((u.to_vec(), steps))
}

pub fn fast_flip_decode(
    code: &PolarCode,
    tree: &DecodeTree,
    channel_llr: &[f64],
    t_max: usize,
    mode: FlipMode,
    omega: Threshold,
) -> Result<FastOutcome> {
    FastDecoder::with_tree(code, tree.clone()).flip_decode(channel_llr, t_max, mode, omega)
}
