//! Weighted standardized-sample sets.
//!
//! The adaptive tree in [`tree`] is the scheme the checker is built around;
//! [`baselines`] holds Monte Carlo, Unscented and Gauss-Hermite sets for
//! comparison and as a ground-truth oracle.

pub mod baselines;
pub mod tree;

pub use baselines::{gauss_hermite_1d, gauss_hermite_set, monte_carlo_set, unscented_set};
pub use tree::{
    cut_at_orders, needs_upsample, split_axis, AdaptiveSigmaPoints, NodeId, SigmaNode1D,
    SigmaTree1D, SpacingRule,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    Adaptive,
    MonteCarlo,
    Unscented,
    GaussHermite,
}

impl SchemeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeTag::Adaptive => "adaptive",
            SchemeTag::MonteCarlo => "monte_carlo",
            SchemeTag::Unscented => "unscented",
            SchemeTag::GaussHermite => "gauss_hermite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSample {
    pub weight: f64,
    /// Standardized pose vector `(x, y, theta)`.
    pub z: [f64; 3],
    /// Tree nodes on the x and y axes, for adaptive samples.
    pub nodes: Option<[NodeId; 2]>,
}

impl WeightedSample {
    pub fn new(weight: f64, z: [f64; 3]) -> Self {
        Self {
            weight,
            z,
            nodes: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeightedSampleSet {
    entries: Vec<WeightedSample>,
    scheme: SchemeTag,
    orders: Option<(u32, u32)>,
}

/// Zeroth, first and second moments of a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub total: f64,
    pub mean: [f64; 3],
    pub second: [[f64; 3]; 3],
}

impl WeightedSampleSet {
    pub fn new(entries: Vec<WeightedSample>, scheme: SchemeTag) -> Self {
        Self {
            entries,
            scheme,
            orders: None,
        }
    }

    pub(crate) fn new_adaptive(entries: Vec<WeightedSample>, orders: (u32, u32)) -> Self {
        Self {
            entries,
            scheme: SchemeTag::Adaptive,
            orders: Some(orders),
        }
    }

    pub fn entries(&self) -> &[WeightedSample] {
        &self.entries
    }

    pub fn scheme(&self) -> SchemeTag {
        self.scheme
    }

    /// `(p_x, p_y)` for adaptive sets.
    pub fn orders(&self) -> Option<(u32, u32)> {
        self.orders
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Largest `|z|` over the set.
    pub fn max_radius(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.z.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn moments(&self) -> Moments {
        let mut m = Moments {
            total: 0.0,
            mean: [0.0; 3],
            second: [[0.0; 3]; 3],
        };
        for e in &self.entries {
            m.total += e.weight;
            for i in 0..3 {
                m.mean[i] += e.weight * e.z[i];
                for j in 0..3 {
                    m.second[i][j] += e.weight * e.z[i] * e.z[j];
                }
            }
        }
        m
    }

    /// Keeps only the entries at `indices`, in the given order.
    pub fn retain_indices(&self, indices: &[usize]) -> Self {
        Self {
            entries: indices.iter().map(|&i| self.entries[i]).collect(),
            scheme: self.scheme,
            orders: self.orders,
        }
    }

    pub(crate) fn entries_mut(&mut self) -> &mut Vec<WeightedSample> {
        &mut self.entries
    }
}
