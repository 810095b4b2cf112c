//! Pointing Game accuracy and its tie-driven uncertainty.
//!
//! Uncertainty analysis: collect local maxima above `tau`, sort them, greedily
//! suppress any maximum within `delta` of a stronger kept one, then check
//! whether the maxima tied at the top value disagree on inside/outside.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ActivationMap, GroundTruth, MetricConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub value: f64,
    pub row: usize,
    pub col: usize,
}

impl Peak {
    pub const fn new(value: f64, row: usize, col: usize) -> Self {
        Peak { value, row, col }
    }

    /// Canonical order: value descending, then row, then column ascending.
    pub fn rank_cmp(&self, other: &Peak) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then(self.row.cmp(&other.row))
            .then(self.col.cmp(&other.col))
    }

    fn squared_distance(&self, other: &Peak) -> f64 {
        let dy = self.row as f64 - other.row as f64;
        let dx = self.col as f64 - other.col as f64;
        dy * dy + dx * dx
    }
}

pub fn sort_peaks(peaks: &mut [Peak]) {
    peaks.sort_unstable_by(Peak::rank_cmp);
}

/// Position of the global maximum; ties go to the first pixel in row-major order.
pub fn global_argmax(map: &ActivationMap) -> (usize, usize) {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (k, &v) in map.values().iter().enumerate() {
        if v > best_value {
            best_value = v;
            best = k;
        }
    }
    (best / map.width(), best % map.width())
}

/// 1 if the global maximum falls inside the ground-truth mask.
pub fn pg_hit(map: &ActivationMap, gt: &GroundTruth) -> Result<u8> {
    gt.check_shape(map)?;
    let (r, c) = global_argmax(map);
    Ok(u8::from(gt.is_inside(r, c)))
}

/// Pixels strictly above `tau` that are `>=` each existing 8-neighbour,
/// in canonical order.
pub fn local_maxima(map: &ActivationMap, tau: f64) -> Vec<Peak> {
    let (h, w) = map.shape();
    let values = map.values();
    let mut peaks = Vec::new();
    for i in 0..h {
        let rows = i.saturating_sub(1)..(i + 2).min(h);
        for j in 0..w {
            let v = values[i * w + j];
            if v <= tau {
                continue;
            }
            let cols = j.saturating_sub(1)..(j + 2).min(w);
            let dominated = rows
                .clone()
                .any(|r| values[r * w + cols.start..r * w + cols.end].iter().any(|&n| n > v));
            if !dominated {
                peaks.push(Peak::new(v, i, j));
            }
        }
    }
    sort_peaks(&mut peaks);
    peaks
}

/// Peaks kept by suppression, in canonical order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NmsResult {
    pub peaks: Vec<Peak>,
}

/// Greedy suppression: a peak survives iff every stronger survivor lies
/// farther than `delta` from it.
///
/// Kept peaks are bucketed on a `delta`-sized grid so each candidate only
/// inspects the 3x3 neighbouring cells.
pub fn nms(peaks: &[Peak], delta: f64) -> NmsResult {
    let mut order = peaks.to_vec();
    sort_peaks(&mut order);
    if order.len() <= 1 {
        return NmsResult { peaks: order };
    }

    let cell = delta.max(1.0);
    let max_row = order.iter().map(|p| p.row).max().unwrap_or(0);
    let max_col = order.iter().map(|p| p.col).max().unwrap_or(0);
    let cell_rows = (max_row as f64 / cell) as usize + 1;
    let cell_cols = (max_col as f64 / cell) as usize + 1;
    let mut grid: Vec<Vec<Peak>> = vec![Vec::new(); cell_rows * cell_cols];
    let radius_sq = delta * delta;

    let mut kept = Vec::new();
    for p in order {
        let cr = (p.row as f64 / cell) as usize;
        let cc = (p.col as f64 / cell) as usize;
        let mut suppressed = false;
        'scan: for r in cr.saturating_sub(1)..(cr + 2).min(cell_rows) {
            for c in cc.saturating_sub(1)..(cc + 2).min(cell_cols) {
                if grid[r * cell_cols + c]
                    .iter()
                    .any(|q| q.squared_distance(&p) <= radius_sq)
                {
                    suppressed = true;
                    break 'scan;
                }
            }
        }
        if !suppressed {
            grid[cr * cell_cols + cc].push(p);
            kept.push(p);
        }
    }
    NmsResult { peaks: kept }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Inside,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub uncertain: bool,
    /// Largest surviving value, `None` when nothing exceeds `tau`.
    pub top_value: Option<f64>,
    pub tied_peaks: Vec<Peak>,
    pub sides: Vec<Side>,
    /// Every peak that survived suppression.
    pub kept: Vec<Peak>,
}

/// Classifies the top-valued survivors of `kept` (already in canonical order).
pub fn classify_ties(kept: Vec<Peak>, gt: &GroundTruth, tie_tolerance: f64) -> UncertaintyReport {
    let Some(top) = kept.first().map(|p| p.value) else {
        return UncertaintyReport {
            uncertain: false,
            top_value: None,
            tied_peaks: Vec::new(),
            sides: Vec::new(),
            kept,
        };
    };
    let tied_peaks: Vec<Peak> = kept
        .iter()
        .copied()
        .filter(|p| (p.value - top).abs() <= tie_tolerance)
        .collect();
    let sides: Vec<Side> = tied_peaks
        .iter()
        .map(|p| {
            if gt.is_inside(p.row, p.col) {
                Side::Inside
            } else {
                Side::Outside
            }
        })
        .collect();
    let uncertain = sides.contains(&Side::Inside) && sides.contains(&Side::Outside);
    UncertaintyReport {
        uncertain,
        top_value: Some(top),
        tied_peaks,
        sides,
        kept,
    }
}

pub fn pg_uncertainty(map: &ActivationMap, gt: &GroundTruth, cfg: &MetricConfig) -> Result<UncertaintyReport> {
    gt.check_shape(map)?;
    let peaks = local_maxima(map, cfg.maxima_threshold);
    let kept = nms(&peaks, cfg.nms_radius).peaks;
    Ok(classify_ties(kept, gt, cfg.tie_tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_ground_truth, BoundingBox};

    fn map_with(h: usize, w: usize, points: &[(usize, usize, f64)]) -> ActivationMap {
        let mut v = vec![0.0; h * w];
        for &(r, c, a) in points {
            v[r * w + c] = a;
        }
        ActivationMap::new(h, w, v).unwrap()
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(global_argmax(&ActivationMap::from_rows(&[[0.0, 0.0], [0.0, 1.0]]).unwrap()), (1, 1));
        assert_eq!(global_argmax(&ActivationMap::from_rows(&[[1.0, 1.0], [0.0, 0.0]]).unwrap()), (0, 0));
        assert_eq!(global_argmax(&ActivationMap::zeros(2, 2).unwrap()), (0, 0));
    }

    #[test]
    fn pg_hit_examples() {
        let gt = make_ground_truth(&[BoundingBox::new(1, 1, 2, 2)], 3, 3).unwrap();
        assert_eq!(pg_hit(&map_with(3, 3, &[(1, 1, 1.0)]), &gt).unwrap(), 1);
        assert_eq!(pg_hit(&map_with(3, 3, &[(0, 0, 1.0)]), &gt).unwrap(), 0);
        // First row below the box is excluded by the half-open rule.
        assert_eq!(pg_hit(&map_with(3, 3, &[(2, 1, 1.0)]), &gt).unwrap(), 0);
    }

    #[test]
    fn local_maxima_examples() {
        let mut v = vec![0.0; 21 * 21];
        for i in 0..21 {
            for j in 0..21 {
                let d2 = ((i as f64 - 10.0).powi(2) + (j as f64 - 10.0).powi(2)) / (2.0 * 9.0);
                v[i * 21 + j] = (-d2).exp();
            }
        }
        let blob = ActivationMap::new(21, 21, v).unwrap();
        assert_eq!(local_maxima(&blob, 0.7), vec![Peak::new(1.0, 10, 10)]);

        let two = map_with(10, 10, &[(2, 2, 1.0), (8, 8, 1.0)]);
        assert_eq!(
            local_maxima(&two, 0.7),
            vec![Peak::new(1.0, 2, 2), Peak::new(1.0, 8, 8)]
        );

        let flat = ActivationMap::new(4, 5, vec![0.9; 20]).unwrap();
        assert_eq!(local_maxima(&flat, 0.7).len(), 20);

        // Strictly above tau.
        let at_tau = map_with(3, 3, &[(1, 1, 0.7)]);
        assert!(local_maxima(&at_tau, 0.7).is_empty());
    }

    #[test]
    fn nms_examples() {
        let peaks = [
            Peak::new(1.0, 10, 10),
            Peak::new(1.0, 15, 15),
            Peak::new(0.9, 100, 100),
        ];
        assert_eq!(
            nms(&peaks, 50.0).peaks,
            vec![Peak::new(1.0, 10, 10), Peak::new(0.9, 100, 100)]
        );
        // Input order does not matter; the canonical order puts (10,10) first.
        let shuffled = [peaks[1], peaks[2], peaks[0]];
        assert_eq!(nms(&shuffled, 50.0), nms(&peaks, 50.0));

        assert_eq!(nms(&peaks[..1], 50.0).peaks, peaks[..1].to_vec());

        let exact = [Peak::new(1.0, 0, 0), Peak::new(0.8, 30, 40)];
        assert_eq!(nms(&exact, 50.0).peaks, vec![exact[0]]);
        let just_beyond = [Peak::new(1.0, 0, 0), Peak::new(0.8, 30, 41)];
        assert_eq!(nms(&just_beyond, 50.0).peaks.len(), 2);

        assert!(nms(&[], 50.0).peaks.is_empty());
    }

    #[test]
    fn nms_tiny_radius_keeps_separated_plateau_pixels() {
        let flat: Vec<Peak> = (0..4).flat_map(|r| (0..4).map(move |c| Peak::new(0.9, r, c))).collect();
        let kept = nms(&flat, 1.0).peaks;
        let expected: Vec<(usize, usize)> = vec![(0, 0), (0, 2), (1, 1), (1, 3), (2, 0), (2, 2), (3, 1), (3, 3)];
        assert_eq!(kept.iter().map(|p| (p.row, p.col)).collect::<Vec<_>>(), expected);
    }

    #[test]
    fn uncertainty_examples() {
        let cfg = MetricConfig::default();
        let gt = make_ground_truth(&[BoundingBox::new(80, 80, 140, 140)], 224, 224).unwrap();

        let mixed = map_with(224, 224, &[(110, 110, 1.0), (10, 10, 1.0)]);
        let r = pg_uncertainty(&mixed, &gt, &cfg).unwrap();
        assert!(r.uncertain);
        assert_eq!(r.sides, vec![Side::Outside, Side::Inside]);

        let unequal = map_with(224, 224, &[(110, 110, 1.0), (10, 10, 0.9)]);
        let r = pg_uncertainty(&unequal, &gt, &cfg).unwrap();
        assert!(!r.uncertain);
        assert_eq!(r.tied_peaks.len(), 1);

        let big = make_ground_truth(&[BoundingBox::new(0, 0, 224, 150)], 224, 224).unwrap();
        let both_inside = map_with(224, 224, &[(20, 20, 1.0), (200, 120, 1.0)]);
        let r = pg_uncertainty(&both_inside, &big, &cfg).unwrap();
        assert!(!r.uncertain);
        assert_eq!(r.tied_peaks.len(), 2);

        let r = pg_uncertainty(&ActivationMap::zeros(224, 224).unwrap(), &gt, &cfg).unwrap();
        assert!(!r.uncertain);
        assert!(r.tied_peaks.is_empty());
        assert_eq!(r.top_value, None);
    }

    #[test]
    fn near_ties_respect_tolerance() {
        let gt = make_ground_truth(&[BoundingBox::new(80, 80, 140, 140)], 224, 224).unwrap();
        let m = map_with(224, 224, &[(110, 110, 1.0), (10, 10, 1.0 - 5e-7)]);
        assert!(pg_uncertainty(&m, &gt, &MetricConfig::default()).unwrap().uncertain);
        let strict = MetricConfig {
            tie_tolerance: 0.0,
            ..MetricConfig::default()
        };
        assert!(!pg_uncertainty(&m, &gt, &strict).unwrap().uncertain);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn peaks() -> impl Strategy<Value = Vec<Peak>> {
            prop::collection::vec(
                (prop::sample::select(vec![0.75, 0.8, 0.9, 1.0]), 0usize..300, 0usize..300)
                    .prop_map(|(v, r, c)| Peak::new(v, r, c)),
                0..120,
            )
        }

        proptest! {
            #[test]
            fn kept_subset_and_separated(ps in peaks(), delta in 1.0f64..80.0) {
                let kept = nms(&ps, delta).peaks;
                for k in &kept {
                    prop_assert!(ps.contains(k));
                }
                for (a, k) in kept.iter().enumerate() {
                    for q in &kept[a + 1..] {
                        prop_assert!(k.squared_distance(q).sqrt() > delta);
                    }
                }
            }
        }
    }
}
