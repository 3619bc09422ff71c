//! Adaptive interval-mass sigma points.
//!
//! The coverage interval `[-σmax, σmax]` is bisected recursively. Node
//! `(p, n)` covers the `n`-th of `2^p` equal sub-intervals, sits at its
//! centre and carries the standard normal mass of that interval, so the two
//! children of a node always carry exactly the parent's mass between them.

use crate::error::{Error, Result};
use crate::linalg::{std_normal_cdf, std_normal_two_sided_tail};

use super::{Axis, WeightedSample, WeightedSampleSet};

/// Deepest order a tree may be built to.
pub const MAX_ORDER: u32 = 16;

/// Heap index of a node: `(p, n)` lives at `2^p - 1 + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn new(order: u32, index: u32) -> Self {
        NodeId((1u32 << order) - 1 + index)
    }

    fn children(self) -> [NodeId; 2] {
        [NodeId(2 * self.0 + 1), NodeId(2 * self.0 + 2)]
    }

    fn slot(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaNode1D {
    pub order: u32,
    pub index: u32,
    /// `σmax ((2n + 1) / 2^p - 1)`.
    pub z: f64,
    /// Normal mass of `[lo, hi]`.
    pub weight: f64,
    pub lo: f64,
    pub hi: f64,
    /// Splitting was stopped here because a child would fall below `w_min`.
    pub halted: bool,
}

/// Precomputed binary tree of 1D sigma points.
#[derive(Debug, Clone)]
pub struct SigmaTree1D {
    sigma_max: f64,
    w_min: f64,
    p_max: u32,
    nodes: Vec<Option<SigmaNode1D>>,
    tail_mass: f64,
}

/// Left edge of `2^order` intervals at position `k`, i.e. `σ (2k / 2^p - 1)`.
/// Adjacent nodes compute their shared edge from the same reduced fraction, so
/// the value is bitwise identical on both sides.
fn edge(sigma_max: f64, k: u64, order: u32) -> f64 {
    sigma_max * ((2 * k) as f64 / (1u64 << order) as f64 - 1.0)
}

fn make_node(sigma_max: f64, order: u32, index: u32) -> SigmaNode1D {
    let n = u64::from(index);
    let lo = edge(sigma_max, n, order);
    let hi = edge(sigma_max, n + 1, order);
    let z = sigma_max * ((2 * n + 1) as f64 / (1u64 << order) as f64 - 1.0);
    SigmaNode1D {
        order,
        index,
        z,
        weight: std_normal_cdf(hi) - std_normal_cdf(lo),
        lo,
        hi,
        halted: false,
    }
}

impl SigmaTree1D {
    pub fn build(sigma_max: f64, w_min: f64, p_max: u32) -> Result<Self> {
        if !(sigma_max > 0.0 && sigma_max.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "sigma_max must be positive, got {sigma_max}"
            )));
        }
        if !(0.0..1.0).contains(&w_min) {
            return Err(Error::InvalidParams(format!(
                "w_min must lie in [0, 1), got {w_min}"
            )));
        }
        if p_max > MAX_ORDER {
            return Err(Error::InvalidParams(format!(
                "p_max must be at most {MAX_ORDER}, got {p_max}"
            )));
        }
        let mut nodes = vec![None; (1usize << (p_max + 1)) - 1];
        nodes[0] = Some(make_node(sigma_max, 0, 0));
        for order in 0..p_max {
            for index in 0..(1u32 << order) {
                let id = NodeId::new(order, index);
                let Some(parent) = nodes[id.slot()].as_mut() else {
                    continue;
                };
                let kids = [
                    make_node(sigma_max, order + 1, 2 * index),
                    make_node(sigma_max, order + 1, 2 * index + 1),
                ];
                if kids.iter().any(|k| k.weight < w_min) {
                    parent.halted = true;
                    continue;
                }
                for (cid, kid) in id.children().into_iter().zip(kids) {
                    nodes[cid.slot()] = Some(kid);
                }
            }
        }
        Ok(Self {
            sigma_max,
            w_min,
            p_max,
            nodes,
            tail_mass: std_normal_two_sided_tail(sigma_max),
        })
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    pub fn w_min(&self) -> f64 {
        self.w_min
    }

    pub fn p_max(&self) -> u32 {
        self.p_max
    }

    /// Normal mass outside `[-σmax, σmax]`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Normal mass inside `[-σmax, σmax]`.
    pub fn covered_mass(&self) -> f64 {
        self.node(NodeId::ROOT).weight
    }

    /// Panics if `id` is not part of the tree.
    #[inline]
    pub fn node(&self, id: NodeId) -> &SigmaNode1D {
        self.nodes[id.slot()]
            .as_ref()
            .expect("node id does not belong to this tree")
    }

    pub fn get(&self, id: NodeId) -> Option<&SigmaNode1D> {
        self.nodes.get(id.slot()).and_then(Option::as_ref)
    }

    /// Children of `id`, if it was split.
    #[inline]
    pub fn children(&self, id: NodeId) -> Option<[NodeId; 2]> {
        let node = self.node(id);
        (!node.halted && node.order < self.p_max).then(|| id.children())
    }

    /// All nodes present in the tree, parents before children.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &SigmaNode1D)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|n| (NodeId(i as u32), n)))
    }

    /// The depth-`order` cut, left to right: every node at depth `order`,
    /// plus every halted node above it.
    pub fn cut(&self, order: u32) -> Vec<NodeId> {
        let order = order.min(self.p_max);
        let mut out = Vec::with_capacity(1 << order);
        self.collect_cut(NodeId::ROOT, order, &mut out);
        out
    }

    fn collect_cut(&self, id: NodeId, order: u32, out: &mut Vec<NodeId>) {
        match self.children(id) {
            Some(kids) if self.node(id).order < order => {
                for k in kids {
                    self.collect_cut(k, order, out);
                }
            }
            _ => out.push(id),
        }
    }
}

/// The two precomputed trees used for the x and y position axes.
#[derive(Debug, Clone)]
pub struct AdaptiveSigmaPoints {
    pub tree_x: SigmaTree1D,
    pub tree_y: SigmaTree1D,
}

impl AdaptiveSigmaPoints {
    pub fn build(sigma_max: f64, w_min: f64, p_max: u32) -> Result<Self> {
        let tree = SigmaTree1D::build(sigma_max, w_min, p_max)?;
        Ok(Self {
            tree_x: tree.clone(),
            tree_y: tree,
        })
    }

    pub fn p_max(&self) -> u32 {
        self.tree_x.p_max.min(self.tree_y.p_max)
    }

    pub fn cut(&self, p_x: u32, p_y: u32) -> WeightedSampleSet {
        cut_at_orders(&self.tree_x, &self.tree_y, p_x, p_y)
    }

    pub fn split(
        &self,
        set: &WeightedSampleSet,
        axis: Axis,
        survivors: &[usize],
    ) -> Result<WeightedSampleSet> {
        split_axis(set, &self.tree_x, &self.tree_y, axis, survivors)
    }

    /// Joint mass outside the covered square `[-σmax, σmax]^2`.
    pub fn tail_mass(&self) -> f64 {
        let (tx, ty) = (self.tree_x.tail_mass, self.tree_y.tail_mass);
        tx + ty - tx * ty
    }

    /// Upper bound on `|z|` for any sample either tree can produce.
    pub fn z_bound(&self) -> f64 {
        self.tree_x.sigma_max.hypot(self.tree_y.sigma_max)
    }
}

fn sample_for(tree_x: &SigmaTree1D, tree_y: &SigmaTree1D, ix: NodeId, iy: NodeId) -> WeightedSample {
    let (nx, ny) = (tree_x.node(ix), tree_y.node(iy));
    WeightedSample {
        weight: nx.weight * ny.weight,
        z: [nx.z, ny.z, 0.0],
        nodes: Some([ix, iy]),
    }
}

/// Cartesian product of the depth-`p_x` cut of `tree_x` and the depth-`p_y`
/// cut of `tree_y`. The attitude component of every sample is zero.
pub fn cut_at_orders(
    tree_x: &SigmaTree1D,
    tree_y: &SigmaTree1D,
    p_x: u32,
    p_y: u32,
) -> WeightedSampleSet {
    let (p_x, p_y) = (p_x.min(tree_x.p_max), p_y.min(tree_y.p_max));
    let (cx, cy) = (tree_x.cut(p_x), tree_y.cut(p_y));
    let entries = cx
        .iter()
        .flat_map(|&ix| cy.iter().map(move |&iy| (ix, iy)))
        .map(|(ix, iy)| sample_for(tree_x, tree_y, ix, iy))
        .collect();
    WeightedSampleSet::new_adaptive(entries, (p_x, p_y))
}

/// Refines the surviving entries of an adaptive set by one order along
/// `axis`. Entries not listed in `survivors` are dropped; halted nodes pass
/// through unchanged.
pub fn split_axis(
    set: &WeightedSampleSet,
    tree_x: &SigmaTree1D,
    tree_y: &SigmaTree1D,
    axis: Axis,
    survivors: &[usize],
) -> Result<WeightedSampleSet> {
    let Some((p_x, p_y)) = set.orders() else {
        return Err(Error::InvalidParams(
            "only adaptive sample sets can be split".into(),
        ));
    };
    let (tree, order) = match axis {
        Axis::X => (tree_x, p_x),
        Axis::Y => (tree_y, p_y),
    };
    if order >= tree.p_max {
        return Err(Error::InvalidParams(format!(
            "axis {axis:?} is already at the maximum order {}",
            tree.p_max
        )));
    }
    let mut entries = Vec::with_capacity(survivors.len() * 2);
    for &i in survivors {
        let e = &set.entries()[i];
        let [ix, iy] = e.nodes.expect("adaptive entries carry node ids");
        let own = match axis {
            Axis::X => ix,
            Axis::Y => iy,
        };
        // Only nodes at the current order split; shallower ones are halted.
        match tree.children(own).filter(|_| tree.node(own).order == order) {
            Some(kids) => {
                for k in kids {
                    let (jx, jy) = match axis {
                        Axis::X => (k, iy),
                        Axis::Y => (ix, k),
                    };
                    entries.push(sample_for(tree_x, tree_y, jx, jy));
                }
            }
            None => entries.push(*e),
        }
    }
    let orders = match axis {
        Axis::X => (p_x + 1, p_y),
        Axis::Y => (p_x, p_y + 1),
    };
    Ok(WeightedSampleSet::new_adaptive(entries, orders))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingRule {
    /// `2 σmax sqrt(Σaa) / 2^p > d_max`, a spacing in metres.
    #[default]
    Physical,
    /// `Σaa / 2^p > d_max`, comparing a variance against `d_max` directly.
    Literal,
}

/// Whether the mean spacing between sigma points along `axis` exceeds
/// `d_max` at the given order.
pub fn needs_upsample(
    cov: &crate::linalg::SymMat3,
    axis: Axis,
    current_order: u32,
    d_max: f64,
    sigma_max: f64,
    p_max: u32,
    rule: SpacingRule,
) -> bool {
    if current_order >= p_max {
        return false;
    }
    let var = match axis {
        Axis::X => cov.get(0, 0),
        Axis::Y => cov.get(1, 1),
    }
    .max(0.0);
    let span = match rule {
        SpacingRule::Physical => 2.0 * sigma_max * var.sqrt(),
        SpacingRule::Literal => var,
    };
    span / f64::from(1u32 << current_order) > d_max
}
