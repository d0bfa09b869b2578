use serde::{Deserialize, Serialize};

use crate::construction::PolarCode;
use crate::error::Result;

/// Frozen-pattern class of a subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    /// All leaves frozen.
    Rate0,
    /// No leaf frozen.
    Rate1,
    /// Only the rightmost leaf non-frozen.
    Rep,
    /// Only the leftmost leaf frozen.
    Spc,
    /// No special pattern; decoded through its two children.
    Branch,
}

impl NodeKind {
    /// Special pattern of a frozen-mask span, if any. Two-leaf `[frozen, free]`
    /// spans match both Rep and SPC and are reported as Rep.
    pub fn of_span(frozen: &[bool]) -> Option<NodeKind> {
        let free = frozen.iter().filter(|&&f| !f).count();
        let len = frozen.len();
        if free == 0 {
            Some(NodeKind::Rate0)
        } else if free == len {
            Some(NodeKind::Rate1)
        } else if free == 1 && !frozen[len - 1] {
            Some(NodeKind::Rep)
        } else if free == len - 1 && frozen[0] {
            Some(NodeKind::Spc)
        } else {
            None
        }
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub stage: usize,
    /// First leaf of the span `[lo, lo + 2^stage)`.
    pub lo: usize,
    pub kind: NodeKind,
    #[serde(skip)]
    pub children: Option<(NodeId, NodeId)>,
}

impl Node {
    pub fn len(&self) -> usize {
        1 << self.stage
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn span(&self) -> (usize, usize) {
        (self.lo, self.lo + self.len())
    }

    /// Latency in decoding steps: 2 per Branch (f-phase and g-phase), 1 per
    /// special node, 0 for a lone leaf (its decision is part of the parent's
    /// step). The unpruned tree thus costs `2N − 2`.
    pub fn steps(&self) -> usize {
        match self.kind {
            NodeKind::Branch => 2,
            _ if self.stage == 0 => 0,
            _ => 1,
        }
    }
}

/// Binary decoding tree pruned at maximal special nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTree {
    log2_len: usize,
    frozen: Vec<bool>,
    nodes: Vec<Node>,
}

impl DecodeTree {
    /// Pruned tree with Rate-0, Rate-1, Rep and SPC leaves.
    pub fn classify(code: &PolarCode) -> Self {
        Self::classify_mask(code.frozen_mask())
    }

    pub fn classify_mask(frozen: &[bool]) -> Self {
        Self::build(frozen, usize::MAX)
    }

    /// Pruned tree whose special nodes span at most `2^max_stage` leaves;
    /// larger special subtrees are split into Branch nodes.
    pub fn classify_capped(frozen: &[bool], max_stage: usize) -> Self {
        Self::build(frozen, max_stage)
    }

    /// Full tree: every internal node is a Branch and every leaf one bit.
    pub fn unpruned(frozen: &[bool]) -> Self {
        Self::build(frozen, 0)
    }

    fn build(frozen: &[bool], max_stage: usize) -> Self {
        assert!(frozen.len().is_power_of_two());
        let log2_len = frozen.len().trailing_zeros() as usize;
        let mut tree = Self {
            log2_len,
            frozen: frozen.to_vec(),
            nodes: Vec::new(),
        };
        tree.grow(log2_len, 0, max_stage);
        tree
    }

    fn grow(&mut self, stage: usize, lo: usize, max_stage: usize) -> NodeId {
        let span = &self.frozen[lo..lo + (1 << stage)];
        let special = if stage <= max_stage {
            NodeKind::of_span(span)
        } else {
            None
        };
        let id = self.nodes.len();
        self.nodes.push(Node {
            stage,
            lo,
            kind: special.unwrap_or(NodeKind::Branch),
            children: None,
        });
        if special.is_none() {
            let left = self.grow(stage - 1, lo, max_stage);
            let right = self.grow(stage - 1, lo + (1 << (stage - 1)), max_stage);
            self.nodes[id].children = Some((left, right));
        }
        id
    }

    pub fn log2_len(&self) -> usize {
        self.log2_len
    }

    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub const ROOT: NodeId = 0;

    /// All nodes in pre-order (left-first).
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    /// Leaves of the pruned tree, left to right.
    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind != NodeKind::Branch)
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn steps_per_iteration(&self) -> usize {
        self.nodes.iter().map(Node::steps).sum()
    }

    /// JSON list of `{stage, span, kind}` in pre-order.
    pub fn dump_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Entry {
            stage: usize,
            span: [usize; 2],
            kind: NodeKind,
        }
        let entries: Vec<Entry> = self
            .nodes
            .iter()
            .map(|n| Entry {
                stage: n.stage,
                span: [n.span().0, n.span().1],
                kind: n.kind,
            })
            .collect();
        Ok(serde_json::to_string_pretty(&entries)?)
    }
}

pub fn classify_tree(code: &PolarCode) -> DecodeTree {
    DecodeTree::classify(code)
}

pub fn steps_per_iteration(tree: &DecodeTree) -> usize {
    tree.steps_per_iteration()
}
