//! Single-pass evaluation of the complete metric suite for one map.
//!
//! The per-metric functions in [`crate::metrics`] each walk the grid on their
//! own. Here all sums needed by the soft and binary variants are accumulated in
//! one row-major sweep, with the distance term evaluated only for pixels
//! outside the mask.

use crate::error::Result;
use crate::metrics::{dice_from_sums, io_from_sums, iou_from_sums, wdp_from_sums};
use crate::model::{ActivationMap, GroundTruth, InstanceMetrics, MetricConfig, Warning};
use crate::pointing::{classify_ties, global_argmax, local_maxima, nms};

#[derive(Debug, Default, Clone, Copy)]
struct Sums {
    activation: f64,
    inside: f64,
    penalty: f64,
    binary_activation: f64,
    binary_inside: f64,
    binary_penalty: f64,
}

/// Per-box column terms `max(x0 - j, j - x1)`, built once per map.
struct BoxTerms {
    y0: i64,
    y1: i64,
    cols: Vec<f64>,
}

fn accumulate(map: &ActivationMap, gt: &GroundTruth, threshold: f64) -> Sums {
    let (h, w) = map.shape();
    let terms: Vec<BoxTerms> = gt
        .boxes()
        .iter()
        .map(|b| BoxTerms {
            y0: b.y0 as i64,
            y1: b.y1 as i64,
            cols: (0..w as i64)
                .map(|j| (b.x0 as i64 - j).max(j - b.x1 as i64) as f64)
                .collect(),
        })
        .collect();
    let mut row_terms = vec![0.0; terms.len()];

    let mut s = Sums::default();
    let mask = gt.mask();
    let values = map.values();
    for i in 0..h {
        for (rt, t) in row_terms.iter_mut().zip(&terms) {
            let i = i as i64;
            *rt = (t.y0 - i).max(i - t.y1) as f64;
        }
        let row = &values[i * w..(i + 1) * w];
        let mrow = &mask[i * w..(i + 1) * w];
        for j in 0..w {
            let a = row[j];
            let b = if a > threshold { 1.0 } else { 0.0 };
            s.activation += a;
            s.binary_activation += b;
            if mrow[j] != 0 {
                s.inside += a;
                s.binary_inside += b;
            } else if a > 0.0 {
                let mut d = f64::INFINITY;
                for (rt, t) in row_terms.iter().zip(&terms) {
                    d = d.min(rt.max(t.cols[j]));
                }
                s.penalty += a * d;
                s.binary_penalty += b * d;
            }
        }
    }
    s
}

/// Computes every [`InstanceMetrics`] field for `map` against `gt`.
pub fn evaluate_map(map: &ActivationMap, gt: &GroundTruth, cfg: &MetricConfig) -> Result<InstanceMetrics> {
    gt.check_shape(map)?;
    let s = accumulate(map, gt, cfg.binarize_threshold);
    let mask = gt.inside_count() as f64;

    let argmax = global_argmax(map);
    let peaks = local_maxima(map, cfg.maxima_threshold);
    let report = classify_ties(nms(&peaks, cfg.nms_radius).peaks, gt, cfg.tie_tolerance);

    let mut warnings = Vec::new();
    if s.activation <= 0.0 {
        warnings.push(Warning::DegenerateMap);
    }

    Ok(InstanceMetrics {
        iou_soft: iou_from_sums(s.inside, s.activation, mask),
        iou_binary: iou_from_sums(s.binary_inside, s.binary_activation, mask),
        dice_soft: dice_from_sums(s.inside, s.activation, mask),
        dice_binary: dice_from_sums(s.binary_inside, s.binary_activation, mask),
        wdp_soft: wdp_from_sums(s.penalty, s.activation, cfg.epsilon),
        wdp_binary: wdp_from_sums(s.binary_penalty, s.binary_activation, cfg.epsilon),
        io_ratio: io_from_sums(s.inside, s.activation),
        pg_hit: u8::from(gt.is_inside(argmax.0, argmax.1)),
        pg_uncertain: report.uncertain,
        argmax_coord: argmax,
        nms_maxima: report.kept,
        warnings,
    })
}
