//! Quantitative grounding metrics for GradCAM-style activation maps.
//!
//! Given a normalized activation map and one or more ground-truth boxes on the
//! same pixel grid, the crate computes
//!
//! - soft and binary IoU and Dice against the box mask,
//! - the weighted distance penalty (WDP) for spurious activation outside the box,
//! - the inside/outside activation ratio,
//! - Pointing Game accuracy, and the Pointing Game uncertainty flag that marks
//!   maps whose equal top maxima fall on both sides of the box edge.
//!
//! Datasets are read from line-delimited JSON manifests with `.npy` maps
//! ([`ingest`]), evaluated in parallel ([`batch`], [`evaluate`]), and
//! summarized into tables and histograms ([`report`]). [`fixtures`] generates
//! synthetic scenarios and brute-force reference implementations.
//!
//! ```
//! use groundcam::{evaluate_map, ActivationMap, BoundingBox, GroundTruth, MetricConfig};
//!
//! let gt = GroundTruth::new(vec![BoundingBox::new(1, 1, 3, 3)], 4, 4).unwrap();
//! let mut values = vec![0.0; 16];
//! values[5] = 1.0; // (1, 1): inside
//! values[15] = 0.5; // (3, 3): outside
//! let map = ActivationMap::new(4, 4, values).unwrap();
//! let m = evaluate_map(&map, &gt, &MetricConfig::default()).unwrap();
//! assert_eq!(m.pg_hit, 1);
//! assert!((m.io_ratio - 1.0 / 1.5).abs() < 1e-12);
//! ```

pub mod batch;
pub mod cli;
pub mod error;
pub mod evaluate;
pub mod fixtures;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pointing;
pub mod report;

pub use error::{Error, Result};
pub use evaluate::evaluate_map;
pub use model::{
    make_ground_truth, validate_map, ActivationMap, BoundingBox, GroundTruth, InstanceMetrics, MetricConfig, Warning,
};
pub use pointing::{Peak, UncertaintyReport};
