//! Special-node decoders and their top-node flip candidates.
//!
//! All rules work in the codeword domain of the node: `alpha` are the node's
//! input LLRs, `beta` its partial sums. Ties resolve to bit 0 and to the lowest
//! index, matching the min-sum SC conventions.

use crate::sc::hard_decision;
use crate::Bit;

use super::tree::{NodeId, NodeKind};

/// Node-local flip: positions to invert and the LLR-magnitude sum that
/// qualified them.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFlip {
    pub eta: Vec<usize>,
    pub metric: f64,
}

/// A node flip tied to its node in the decoding tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TopFlipCandidate {
    pub node: NodeId,
    pub eta: Vec<usize>,
    pub metric: f64,
}

impl TopFlipCandidate {
    pub fn new(node: NodeId, flip: NodeFlip) -> Self {
        Self {
            node,
            eta: flip.eta,
            metric: flip.metric,
        }
    }
}

pub fn decode_rate1_into(alpha: &[f64], beta: &mut [Bit]) {
    for (b, &a) in beta.iter_mut().zip(alpha) {
        *b = hard_decision(a);
    }
}

pub fn decode_rep_into(alpha: &[f64], beta: &mut [Bit]) {
    let bit = hard_decision(alpha.iter().sum());
    beta.fill(bit);
}

pub fn decode_spc_into(alpha: &[f64], beta: &mut [Bit]) {
    decode_rate1_into(alpha, beta);
    if parity(beta) == 1 {
        beta[argmin_abs(alpha)] ^= 1;
    }
}

pub fn decode_rate1(alpha: &[f64]) -> Vec<Bit> {
    let mut beta = vec![0; alpha.len()];
    decode_rate1_into(alpha, &mut beta);
    beta
}

pub fn decode_rep(alpha: &[f64]) -> Vec<Bit> {
    let mut beta = vec![0; alpha.len()];
    decode_rep_into(alpha, &mut beta);
    beta
}

pub fn decode_spc(alpha: &[f64]) -> Vec<Bit> {
    let mut beta = vec![0; alpha.len()];
    decode_spc_into(alpha, &mut beta);
    beta
}

/// Decodes a special node, applying `eta` if given.
///
/// A flipped Rate-1 or SPC node outputs its sign decisions with `eta`
/// inverted; a flipped Rep node outputs the complement of its decision.
pub fn decode_node_into(kind: NodeKind, alpha: &[f64], beta: &mut [Bit], eta: Option<&[usize]>) {
    match (kind, eta) {
        (NodeKind::Rate0, _) => beta.fill(0),
        (NodeKind::Rate1, None) => decode_rate1_into(alpha, beta),
        (NodeKind::Rep, None) => decode_rep_into(alpha, beta),
        (NodeKind::Spc, None) => decode_spc_into(alpha, beta),
        (NodeKind::Rep, Some(_)) => {
            decode_rep_into(alpha, beta);
            beta.iter_mut().for_each(|b| *b ^= 1);
        }
        (NodeKind::Rate1 | NodeKind::Spc, Some(eta)) => {
            decode_rate1_into(alpha, beta);
            for &i in eta {
                beta[i] ^= 1;
            }
        }
        (NodeKind::Branch, _) => unreachable!("branch nodes are not decoded directly"),
    }
}

pub fn flip_candidates_rate1(alpha: &[f64], omega: f64) -> Option<NodeFlip> {
    let i = argmin_abs(alpha);
    let m = alpha[i].abs();
    (m <= omega).then(|| NodeFlip {
        eta: vec![i],
        metric: m,
    })
}

pub fn flip_candidates_rep(alpha: &[f64], omega: f64) -> Option<NodeFlip> {
    let m = alpha.iter().sum::<f64>().abs();
    (m <= omega).then(|| NodeFlip {
        eta: (0..alpha.len()).collect(),
        metric: m,
    })
}

/// Up to two candidates, the `i_min,2` rule before the `i_min,3` rule.
/// Nodes with fewer than four leaves yield none.
pub fn flip_candidates_spc(alpha: &[f64], omega: f64) -> Vec<NodeFlip> {
    if alpha.len() < 4 {
        return Vec::new();
    }
    let p = alpha.iter().fold(0, |acc, &a| acc ^ hard_decision(a));
    let [i1, i2, i3] = three_smallest(alpha);
    let mag = |i: usize| alpha[i].abs();
    [i2, i3]
        .into_iter()
        .filter_map(|j| {
            let (eta, metric) = if p == 1 {
                (vec![j], mag(j))
            } else {
                (vec![i1, j], mag(i1) + mag(j))
            };
            (metric <= omega).then_some(NodeFlip { eta, metric })
        })
        .collect()
}

/// Candidates of any special node, in application order.
pub fn node_candidates(kind: NodeKind, alpha: &[f64], omega: f64) -> Vec<NodeFlip> {
    match kind {
        NodeKind::Rate1 => flip_candidates_rate1(alpha, omega).into_iter().collect(),
        NodeKind::Rep => flip_candidates_rep(alpha, omega).into_iter().collect(),
        NodeKind::Spc => flip_candidates_spc(alpha, omega),
        NodeKind::Rate0 | NodeKind::Branch => Vec::new(),
    }
}

fn parity(bits: &[Bit]) -> Bit {
    bits.iter().fold(0, |acc, &b| acc ^ b)
}

fn argmin_abs(alpha: &[f64]) -> usize {
    let mut best = 0;
    for (i, a) in alpha.iter().enumerate().skip(1) {
        if a.abs() < alpha[best].abs() {
            best = i;
        }
    }
    best
}

/// Indices of the three smallest magnitudes, ascending; ties by index.
fn three_smallest(alpha: &[f64]) -> [usize; 3] {
    let mut best = [usize::MAX; 3];
    let key = |i: usize| alpha[i].abs();
    for i in 0..alpha.len() {
        let m = key(i);
        if best[2] == usize::MAX || m < key(best[2]) {
            best[2] = i;
            if best[1] == usize::MAX || m < key(best[1]) {
                best.swap(1, 2);
                if best[0] == usize::MAX || m < key(best[0]) {
                    best.swap(0, 1);
                }
            }
        }
    }
    best
}
