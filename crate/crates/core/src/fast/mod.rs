//! Fast SC decoding over a tree pruned at special nodes, with top-node flips.

mod decoder;
mod nodes;
mod tree;

pub use decoder::{fast_flip_decode, fast_sc_decode, FastDecoder, FastOutcome, FlipMode, StepCounter};
pub use nodes::{
    decode_node_into, decode_rate1, decode_rep, decode_spc, flip_candidates_rate1, flip_candidates_rep,
    flip_candidates_spc, node_candidates, NodeFlip, TopFlipCandidate,
};
pub use tree::{classify_tree, steps_per_iteration, DecodeTree, Node, NodeId, NodeKind};
