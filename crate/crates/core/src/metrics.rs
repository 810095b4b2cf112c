//! Overlap and penalty metrics between an activation map and a box mask.
//!
//! Soft variants consume the raw map. Binary variants consume the output of
//! [`binarize`]; the same functions serve both.
//!
//! `wdp` and `io_ratio` use the closed form `x / (x + y)`, which is equal to
//! `sigmoid(log(x / y))` wherever the latter is defined and stays finite when
//! `x` or `y` is zero.

use crate::error::Result;
use crate::model::{ActivationMap, BoundingBox, GroundTruth, MetricConfig};

/// Pixel-wise `1` where `value > threshold`, else `0`.
pub fn binarize(map: &ActivationMap, threshold: f64) -> ActivationMap {
    let values = map
        .values()
        .iter()
        .map(|&v| if v > threshold { 1.0 } else { 0.0 })
        .collect();
    ActivationMap::from_trusted(map.height(), map.width(), values)
}

struct Overlap {
    intersection: f64,
    activation: f64,
    mask: f64,
}

fn overlap(map: &ActivationMap, gt: &GroundTruth) -> Result<Overlap> {
    gt.check_shape(map)?;
    let mut intersection = 0.0;
    let mut activation = 0.0;
    for (&a, &m) in map.values().iter().zip(gt.mask()) {
        activation += a;
        intersection += a * f64::from(m);
    }
    Ok(Overlap {
        intersection,
        activation,
        mask: gt.inside_count() as f64,
    })
}

/// `sum(A*M) / (sum(A) + sum(M) - sum(A*M))`, or 0 for an empty union.
pub fn iou(map: &ActivationMap, gt: &GroundTruth) -> Result<f64> {
    let o = overlap(map, gt)?;
    Ok(iou_from_sums(o.intersection, o.activation, o.mask))
}

/// `2 * sum(A*M) / (sum(A) + sum(M))`, or 0 when both sums vanish.
pub fn dice(map: &ActivationMap, gt: &GroundTruth) -> Result<f64> {
    let o = overlap(map, gt)?;
    Ok(dice_from_sums(o.intersection, o.activation, o.mask))
}

#[inline]
pub(crate) fn iou_from_sums(intersection: f64, activation: f64, mask: f64) -> f64 {
    let union = activation + mask - intersection;
    if union > 0.0 {
        (intersection / union).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn dice_from_sums(intersection: f64, activation: f64, mask: f64) -> f64 {
    let denom = activation + mask;
    if denom > 0.0 {
        (2.0 * intersection / denom).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn wdp_from_sums(penalty: f64, activation: f64, epsilon: f64) -> f64 {
    if penalty > 0.0 {
        penalty / (penalty + activation + epsilon)
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn io_from_sums(inside: f64, total: f64) -> f64 {
    if total > 0.0 {
        (inside / total).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Per-pixel box distance `max(y0 - i, i - y1, x0 - j, j - x1)`.
///
/// Negative strictly inside the box, zero on its first and last rows/columns
/// as well as on the first ring outside the exclusive edges.
#[inline]
pub fn box_distance(b: &BoundingBox, row: usize, col: usize) -> f64 {
    let (i, j) = (row as i64, col as i64);
    let dy = (b.y0 as i64 - i).max(i - b.y1 as i64);
    let dx = (b.x0 as i64 - j).max(j - b.x1 as i64);
    dy.max(dx) as f64
}

/// Distance of every pixel to the nearest ground-truth box.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl DistanceMap {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Builds `D` over the ground truth's grid; with several boxes each pixel
/// takes the minimum of the per-box values.
pub fn distance_map(gt: &GroundTruth) -> DistanceMap {
    let (height, width) = gt.shape();
    let mut values = Vec::with_capacity(height * width);
    for i in 0..height {
        for j in 0..width {
            let d = gt
                .boxes()
                .iter()
                .map(|b| box_distance(b, i, j))
                .fold(f64::INFINITY, f64::min);
            values.push(d);
        }
    }
    DistanceMap {
        height,
        width,
        values,
    }
}

/// `P = A * (1 - M) * D`, row-major.
pub fn penalty_map(map: &ActivationMap, gt: &GroundTruth, dmap: &DistanceMap) -> Result<Vec<f64>> {
    gt.check_shape(map)?;
    if (dmap.height, dmap.width) != gt.shape() {
        return Err(crate::Error::ShapeMismatch {
            map_height: dmap.height,
            map_width: dmap.width,
            gt_height: gt.height(),
            gt_width: gt.width(),
        });
    }
    Ok(map
        .values()
        .iter()
        .zip(gt.mask())
        .zip(dmap.values())
        .map(|((&a, &m), &d)| if m == 0 { a * d } else { 0.0 })
        .collect())
}

/// Weighted distance penalty of `map`; lower is better.
pub fn wdp(map: &ActivationMap, gt: &GroundTruth, cfg: &MetricConfig) -> Result<f64> {
    let dmap = distance_map(gt);
    let penalty: f64 = penalty_map(map, gt, &dmap)?.iter().sum();
    Ok(wdp_from_sums(penalty, map.sum(), cfg.epsilon))
}

/// WDP of the binarized map, used for both the penalty and the activation total.
pub fn wdp_binary(map: &ActivationMap, gt: &GroundTruth, cfg: &MetricConfig) -> Result<f64> {
    wdp(&binarize(map, cfg.binarize_threshold), gt, cfg)
}

/// Fraction of activation mass inside the mask; 0 for an all-zero map.
pub fn io_ratio(map: &ActivationMap, gt: &GroundTruth) -> Result<f64> {
    let o = overlap(map, gt)?;
    Ok(io_from_sums(o.intersection, o.activation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_ground_truth;

    fn gt(boxes: &[[usize; 4]], h: usize, w: usize) -> GroundTruth {
        let boxes: Vec<BoundingBox> = boxes.iter().map(|&b| b.into()).collect();
        make_ground_truth(&boxes, h, w).unwrap()
    }

    fn map(rows: &[&[f64]]) -> ActivationMap {
        ActivationMap::from_rows(rows).unwrap()
    }

    fn sigmoid_log(num: f64, den: f64) -> f64 {
        1.0 / (1.0 + (-(num / den).ln()).exp())
    }

    #[test]
    fn binarize_examples() {
        let m = map(&[&[0.9, 0.4], &[0.6, 0.1]]);
        assert_eq!(binarize(&m, 0.5).values(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(binarize(&map(&[&[0.5]]), 0.5).values(), &[0.0]);
        let z = ActivationMap::zeros(3, 3).unwrap();
        assert_eq!(binarize(&z, 0.5), z);
    }

    #[test]
    fn iou_examples() {
        let g = gt(&[[0, 0, 1, 2]], 2, 2);
        let same = map(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(iou(&same, &g).unwrap(), 1.0);
        let bin = map(&[&[1.0, 0.0], &[1.0, 0.0]]);
        assert!((iou(&bin, &g).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(iou(&ActivationMap::zeros(2, 2).unwrap(), &g).unwrap(), 0.0);
    }

    #[test]
    fn dice_examples() {
        let g = gt(&[[0, 0, 1, 2]], 2, 2);
        let same = map(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(dice(&same, &g).unwrap(), 1.0);
        let soft = map(&[&[0.9, 0.4], &[0.6, 0.1]]);
        assert!((dice(&soft, &g).unwrap() - 0.65).abs() < 1e-12);
        assert_eq!(dice(&ActivationMap::zeros(2, 2).unwrap(), &g).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let g = gt(&[[0, 0, 1, 1]], 2, 2);
        let m = ActivationMap::zeros(3, 2).unwrap();
        assert!(matches!(iou(&m, &g), Err(crate::Error::ShapeMismatch { .. })));
        assert!(matches!(wdp(&m, &g, &MetricConfig::default()), Err(crate::Error::ShapeMismatch { .. })));
    }

    #[test]
    fn distance_map_examples() {
        let g = gt(&[[1, 1, 2, 2]], 3, 3);
        let d = distance_map(&g);
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.get(2, 2), 0.0);
        assert_eq!(d.get(1, 1), 0.0);

        // Pixel-loop oracle over the literal formula.
        let d = distance_map(&gt(&[[2, 3, 5, 7]], 8, 9));
        for i in 0..8i64 {
            for j in 0..9i64 {
                let want = *[2 - i, i - 5, 3 - j, j - 7].iter().max().unwrap() as f64;
                assert_eq!(d.get(i as usize, j as usize), want);
            }
        }
    }

    #[test]
    fn distance_map_takes_nearest_box() {
        let g = gt(&[[0, 0, 1, 1], [5, 5, 6, 6]], 6, 6);
        let d = distance_map(&g);
        assert_eq!(d.get(3, 3), 2.0);
        assert_eq!(d.get(5, 0), 4.0);
    }

    #[test]
    fn penalty_map_examples() {
        let g = gt(&[[1, 1, 2, 2]], 3, 3);
        let d = distance_map(&g);
        let mut mask_map = vec![0.0; 9];
        mask_map[4] = 1.0;
        let p = penalty_map(&ActivationMap::new(3, 3, mask_map).unwrap(), &g, &d).unwrap();
        assert!(p.iter().all(|&v| v == 0.0));

        let mut corner = vec![0.0; 9];
        corner[0] = 1.0;
        let p = penalty_map(&ActivationMap::new(3, 3, corner).unwrap(), &g, &d).unwrap();
        assert_eq!(p[0], 1.0);
        assert!(p[1..].iter().all(|&v| v == 0.0));

        let mut diag = vec![0.0; 9];
        diag[8] = 1.0;
        let p = penalty_map(&ActivationMap::new(3, 3, diag).unwrap(), &g, &d).unwrap();
        assert!(p.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wdp_examples() {
        let cfg = MetricConfig::default();
        let g = gt(&[[1, 1, 2, 2]], 3, 3);

        let mut inside = vec![0.0; 9];
        inside[4] = 0.8;
        assert_eq!(wdp(&ActivationMap::new(3, 3, inside).unwrap(), &g, &cfg).unwrap(), 0.0);

        let mut two = vec![0.0; 9];
        two[4] = 1.0;
        two[0] = 1.0;
        let w = wdp(&ActivationMap::new(3, 3, two).unwrap(), &g, &cfg).unwrap();
        assert!((w - 1.0 / (3.0 + 1e-8)).abs() < 1e-15);
        assert!((w - sigmoid_log(1.0, 2.0 + 1e-8)).abs() < 1e-12);

        assert_eq!(wdp(&ActivationMap::zeros(3, 3).unwrap(), &g, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn wdp_binary_thresholds_both_sums() {
        let cfg = MetricConfig::default();
        let g = gt(&[[1, 1, 2, 2]], 3, 3);
        let mut v = vec![0.0; 9];
        v[4] = 0.9;
        v[0] = 0.6;
        v[2] = 0.3;
        let m = ActivationMap::new(3, 3, v).unwrap();
        // Binarized: 1 at (1,1) and (0,0); the 0.3 pixel drops out of both sums.
        let w = wdp_binary(&m, &g, &cfg).unwrap();
        assert!((w - 1.0 / (1.0 + 2.0 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn io_ratio_examples() {
        let g = gt(&[[0, 0, 1, 2]], 2, 2);
        let ones = map(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(io_ratio(&ones, &g).unwrap(), 0.5);

        let g3 = gt(&[[0, 0, 1, 2], [1, 0, 2, 1]], 2, 2);
        assert_eq!(io_ratio(&ones, &g3).unwrap(), 0.75);

        let inside_only = map(&[&[0.3, 0.2], &[0.0, 0.0]]);
        assert_eq!(io_ratio(&inside_only, &g).unwrap(), 1.0);

        assert_eq!(io_ratio(&ActivationMap::zeros(2, 2).unwrap(), &g).unwrap(), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn instance() -> impl Strategy<Value = (ActivationMap, GroundTruth)> {
            (2usize..12, 2usize..12).prop_flat_map(|(h, w)| {
                (
                    prop::collection::vec(0.0f64..=1.0, h * w),
                    (0..h, 0..w),
                    (1..=h, 1..=w),
                )
                    .prop_map(move |(vals, (y0, x0), (dy, dx))| {
                        let y1 = (y0 + dy).min(h);
                        let x1 = (x0 + dx).min(w);
                        let g = make_ground_truth(&[BoundingBox::new(y0, x0, y1, x1)], h, w).unwrap();
                        (ActivationMap::new(h, w, vals).unwrap(), g)
                    })
            })
        }

        proptest! {
            #[test]
            fn ranges_and_dice_iou_relation((m, g) in instance()) {
                let cfg = MetricConfig::default();
                let b = binarize(&m, cfg.binarize_threshold);
                for src in [&m, &b] {
                    let i = iou(src, &g).unwrap();
                    let d = dice(src, &g).unwrap();
                    prop_assert!((0.0..=1.0).contains(&i));
                    prop_assert!((0.0..=1.0).contains(&d));
                    prop_assert!((d - 2.0 * i / (1.0 + i)).abs() <= 1e-12);
                    let w = wdp(src, &g, &cfg).unwrap();
                    prop_assert!((0.0..=1.0).contains(&w));
                    let r = io_ratio(src, &g).unwrap();
                    prop_assert!((0.0..=1.0).contains(&r));
                }
            }

            #[test]
            fn closed_forms_match_sigmoid_log((m, g) in instance()) {
                let inside: f64 = m.values().iter().zip(g.mask()).filter(|(_, &k)| k == 1).map(|(a, _)| a).sum();
                let outside: f64 = m.values().iter().zip(g.mask()).filter(|(_, &k)| k == 0).map(|(a, _)| a).sum();
                if inside > 0.0 && outside > 0.0 {
                    let closed = inside / (inside + outside);
                    prop_assert!((sigmoid_log(inside, outside) - closed).abs() <= 1e-12);
                }
                let cfg = MetricConfig::default();
                let p: f64 = penalty_map(&m, &g, &distance_map(&g)).unwrap().iter().sum();
                if p > 0.0 {
                    let via_sigmoid = sigmoid_log(p, m.sum() + cfg.epsilon);
                    prop_assert!((via_sigmoid - wdp(&m, &g, &cfg).unwrap()).abs() <= 1e-12);
                }
            }

            #[test]
            fn penalties_are_non_negative((m, g) in instance()) {
                let p = penalty_map(&m, &g, &distance_map(&g)).unwrap();
                prop_assert!(p.iter().all(|&v| v >= 0.0));
            }

            #[test]
            fn binarize_is_idempotent((m, _g) in instance(), t in 0.01f64..0.99) {
                let once = binarize(&m, t);
                prop_assert_eq!(binarize(&once, t), once);
            }
        }
    }
}
