//! Synthetic activation maps and brute-force reference implementations.
//!
//! The oracles here share no code with [`crate::metrics`], [`crate::evaluate`]
//! or [`crate::pointing`]: they loop over pixels directly, evaluate
//! `sigmoid(log(x / y))` literally and run suppression by exhaustive pairwise
//! scans. Randomness comes from ChaCha8 keyed by `(seed, stream)`, so every
//! fixture is a pure function of its parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ActivationMap, BoundingBox, GroundTruth, InstanceMetrics, MetricConfig, Warning};
use crate::pointing::{NmsResult, Peak};

/// An isotropic Gaussian bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobSpec {
    pub center: (usize, usize),
    pub sigma: f64,
    pub amplitude: f64,
}

impl BlobSpec {
    pub fn new(center: (usize, usize), sigma: f64, amplitude: f64) -> Self {
        BlobSpec {
            center,
            sigma,
            amplitude,
        }
    }

    fn validate(&self, h: usize, w: usize) -> Result<()> {
        if self.center.0 >= h || self.center.1 >= w {
            return Err(Error::InvalidBlob(format!(
                "center {:?} outside {h}x{w}",
                self.center
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidBlob(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 1.0) {
            return Err(Error::InvalidBlob(format!(
                "amplitude must be in (0, 1], got {}",
                self.amplitude
            )));
        }
        Ok(())
    }
}

/// Adds `blob` into `values` using the separable form of the kernel.
fn add_blob(values: &mut [f64], h: usize, w: usize, blob: &BlobSpec) {
    let inv = 1.0 / (2.0 * blob.sigma * blob.sigma);
    let gauss = |d: f64| (-d * d * inv).exp();
    let rows: Vec<f64> = (0..h).map(|i| gauss(i as f64 - blob.center.0 as f64)).collect();
    let cols: Vec<f64> = (0..w).map(|j| gauss(j as f64 - blob.center.1 as f64)).collect();
    for (i, &gy) in rows.iter().enumerate() {
        let a = blob.amplitude * gy;
        if a < 1e-300 {
            continue;
        }
        for (v, &gx) in values[i * w..(i + 1) * w].iter_mut().zip(&cols) {
            *v += a * gx;
        }
    }
}

fn min_max_normalize(values: &mut [f64]) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi > lo {
        let scale = 1.0 / (hi - lo);
        for v in values.iter_mut() {
            *v = ((*v - lo) * scale).clamp(0.0, 1.0);
        }
    } else {
        values.fill(0.0);
    }
}

/// Sum of Gaussian blobs plus uniform noise in `[0, noise]`, clamped at zero
/// and min-max normalized to `[0, 1]`. Constant results normalize to zeros.
pub fn gaussian_map(h: usize, w: usize, blobs: &[BlobSpec], noise: f64, seed: u64) -> Result<ActivationMap> {
    if h == 0 || w == 0 {
        return Err(Error::EmptyMap);
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise must be >= 0, got {noise}")));
    }
    for b in blobs {
        b.validate(h, w)?;
    }
    let mut values = vec![0.0; h * w];
    for b in blobs {
        add_blob(&mut values, h, w, b);
    }
    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in values.iter_mut() {
            *v += rng.gen::<f64>() * noise;
        }
    }
    for v in values.iter_mut() {
        *v = v.max(0.0);
    }
    min_max_normalize(&mut values);
    ActivationMap::new(h, w, values)
}

fn box_center(b: &BoundingBox) -> (usize, usize) {
    ((b.y0 + b.y1 - 1) / 2, (b.x0 + b.x1 - 1) / 2)
}

fn dist(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dy = a.0 as f64 - b.0 as f64;
    let dx = a.1 as f64 - b.1 as f64;
    (dy * dy + dx * dx).sqrt()
}

/// Places narrow unit-height bumps so each listed pixel holds its exact amplitude.
fn spike_map(h: usize, w: usize, spikes: &[((usize, usize), f64)]) -> ActivationMap {
    let mut values = vec![0.0; h * w];
    for &(center, amplitude) in spikes {
        add_blob(&mut values, h, w, &BlobSpec::new(center, SPIKE_SIGMA, amplitude));
    }
    for v in values.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    for &((r, c), a) in spikes {
        values[r * w + c] = values[r * w + c].max(a).min(1.0);
    }
    ActivationMap::from_trusted(h, w, values)
}

const SPIKE_SIGMA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario1Kind {
    /// Equal top peaks inside and outside the box; the uncertain case.
    Mixed,
    /// Equal top peaks, all inside the box.
    SameSide,
    /// Inside peak at 1.0, outside peak at 0.9.
    Unequal,
}

/// Equal-valued maxima on both sides of the box edge, farther than `delta`
/// apart. A third maximum is placed on the box border when one fits.
pub fn scenario1_fixture(h: usize, w: usize, bbox: BoundingBox, delta: f64) -> Result<ActivationMap> {
    scenario1_variant(h, w, bbox, delta, Scenario1Kind::Mixed)
}

pub fn scenario1_variant(
    h: usize,
    w: usize,
    bbox: BoundingBox,
    delta: f64,
    kind: Scenario1Kind,
) -> Result<ActivationMap> {
    bbox.validate(h, w)?;
    let inside = box_center(&bbox);

    // The outside pixel farthest from the inside peak.
    let mut outside: Option<((usize, usize), f64)> = None;
    for i in 0..h {
        for j in 0..w {
            if bbox.contains(i, j) {
                continue;
            }
            let d = dist((i, j), inside);
            if outside.is_none_or(|(_, best)| d > best) {
                outside = Some(((i, j), d));
            }
        }
    }
    let outside = match outside {
        Some((p, d)) if d > delta => p,
        _ => return Err(Error::BoxTooLarge { delta }),
    };

    let spikes = match kind {
        Scenario1Kind::Mixed => {
            let mut spikes = vec![(inside, 1.0), (outside, 1.0)];
            let border = border_pixels(&bbox)
                .filter(|&p| dist(p, inside) > delta && dist(p, outside) > delta)
                .max_by(|&a, &b| {
                    let score = |p| dist(p, inside).min(dist(p, outside));
                    score(a).total_cmp(&score(b))
                });
            if let Some(p) = border {
                spikes.push((p, 1.0));
            }
            spikes
        }
        Scenario1Kind::SameSide => {
            let far = (bbox.y1 - 1, bbox.x1 - 1);
            let near = (bbox.y0, bbox.x0);
            if dist(far, near) > delta {
                vec![(near, 1.0), (far, 1.0)]
            } else {
                vec![(inside, 1.0)]
            }
        }
        Scenario1Kind::Unequal => vec![(inside, 1.0), (outside, 0.9)],
    };
    Ok(spike_map(h, w, &spikes))
}

fn border_pixels(b: &BoundingBox) -> impl Iterator<Item = (usize, usize)> + '_ {
    (b.y0..b.y1)
        .flat_map(move |i| (b.x0..b.x1).map(move |j| (i, j)))
        .filter(move |&(i, j)| i == b.y0 || i == b.y1 - 1 || j == b.x0 || j == b.x1 - 1)
}

/// Maps sharing one inside peak of value 1.0, with a spurious outside bump
/// whose total mass equals each entry of `outside_masses`.
///
/// Masses must be finite, non-negative and strictly ascending.
pub fn scenario2_fixtures(h: usize, w: usize, bbox: BoundingBox, outside_masses: &[f64]) -> Result<Vec<ActivationMap>> {
    bbox.validate(h, w)?;
    if outside_masses.is_empty() {
        return Err(Error::InvalidMasses("need at least one mass".into()));
    }
    if outside_masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(Error::InvalidMasses("masses must be finite and non-negative".into()));
    }
    if outside_masses.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidMasses("masses must be strictly ascending".into()));
    }

    let center = box_center(&bbox);
    let box_h = (bbox.y1 - bbox.y0) as f64;
    let box_w = (bbox.x1 - bbox.x0) as f64;
    let mut inside = vec![0.0; h * w];
    add_blob(&mut inside, h, w, &BlobSpec::new(center, (box_h.min(box_w) / 16.0).max(1.0), 1.0));
    for i in 0..h {
        for j in 0..w {
            if !bbox.contains(i, j) {
                inside[i * w + j] = 0.0;
            }
        }
    }

    let far = (0..h)
        .flat_map(|i| (0..w).map(move |j| (i, j)))
        .filter(|&(i, j)| !bbox.contains(i, j))
        .max_by(|&a, &b| dist(a, center).total_cmp(&dist(b, center)));
    let mut weights = vec![0.0; h * w];
    if let Some(far) = far {
        add_blob(&mut weights, h, w, &BlobSpec::new(far, ((h.min(w)) as f64 / 16.0).max(2.0), 1.0));
        for i in 0..h {
            for j in 0..w {
                if bbox.contains(i, j) {
                    weights[i * w + j] = 0.0;
                }
            }
        }
    }
    let total_weight: f64 = weights.iter().sum();
    let peak_weight = weights.iter().copied().fold(0.0, f64::max);

    outside_masses
        .iter()
        .map(|&m| {
            if m > 0.0 && total_weight <= 0.0 {
                return Err(Error::InvalidMasses("box leaves no outside pixels".into()));
            }
            let scale = if m > 0.0 { m / total_weight } else { 0.0 };
            if scale * peak_weight >= 1.0 {
                return Err(Error::InvalidMasses(format!(
                    "mass {m} would need outside values >= 1 on a {h}x{w} grid"
                )));
            }
            let values = inside
                .iter()
                .zip(&weights)
                .map(|(&a, &wt)| a + scale * wt)
                .collect();
            ActivationMap::new(h, w, values)
        })
        .collect()
}

/// Deterministic random instance number `index` of the stream keyed by `seed`.
///
/// The mix covers smooth multi-blob maps, noisy maps, quantized maps with
/// exact ties, perfect and empty maps, and deliberate equal-height peaks on
/// both sides of a box.
pub fn random_instance(seed: u64, index: u64, h: usize, w: usize) -> (ActivationMap, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);

    let n_boxes = rng.gen_range(1..=3);
    let boxes: Vec<BoundingBox> = (0..n_boxes)
        .map(|_| {
            let bh = rng.gen_range(1..=(h / 2).max(1));
            let bw = rng.gen_range(1..=(w / 2).max(1));
            let y0 = rng.gen_range(0..=h - bh);
            let x0 = rng.gen_range(0..=w - bw);
            BoundingBox::new(y0, x0, y0 + bh, x0 + bw)
        })
        .collect();
    let gt = GroundTruth::new(boxes, h, w).expect("generated boxes are in bounds");

    let kind = rng.gen_range(0..100);
    let values = if kind < 4 {
        vec![0.0; h * w]
    } else if kind < 8 {
        gt.mask().iter().map(|&m| f64::from(m)).collect()
    } else {
        let n_blobs = rng.gen_range(1..=4);
        let mut values = vec![0.0; h * w];
        for _ in 0..n_blobs {
            let blob = BlobSpec::new(
                (rng.gen_range(0..h), rng.gen_range(0..w)),
                rng.gen_range(0.8..(h.min(w) as f64 / 3.0).max(1.0)),
                rng.gen_range(0.2..=1.0),
            );
            add_blob(&mut values, h, w, &blob);
        }
        let noise: f64 = if rng.gen_bool(0.5) { rng.gen_range(0.0..0.3) } else { 0.0 };
        for v in values.iter_mut() {
            *v += rng.gen::<f64>() * noise;
        }
        min_max_normalize(&mut values);
        if kind < 25 {
            for v in values.iter_mut() {
                *v = (*v * 10.0).round() / 10.0;
            }
        }
        if kind >= 85 {
            // Equal spikes inside and outside the first box.
            let b = gt.boxes()[0];
            let spikes = [
                (rng.gen_range(b.y0..b.y1), rng.gen_range(b.x0..b.x1)),
                (rng.gen_range(0..h), rng.gen_range(0..w)),
            ];
            for (r, c) in spikes {
                values[r * w + c] = 1.0;
            }
        }
        values
    };
    (ActivationMap::from_trusted(h, w, values), gt)
}

/// Literal `sigmoid(log(num / den))`, with `0 / 0` taken as 0.
pub fn sigmoid_log(num: f64, den: f64) -> f64 {
    let ratio = num / den;
    if ratio.is_nan() {
        return 0.0;
    }
    1.0 / (1.0 + (-ratio.ln()).exp())
}

fn oracle_inside(boxes: &[BoundingBox], i: usize, j: usize) -> bool {
    boxes.iter().any(|b| b.y0 <= i && i < b.y1 && b.x0 <= j && j < b.x1)
}

fn oracle_distance(boxes: &[BoundingBox], i: usize, j: usize) -> f64 {
    let (i, j) = (i as f64, j as f64);
    boxes
        .iter()
        .map(|b| {
            let (y0, x0, y1, x1) = (b.y0 as f64, b.x0 as f64, b.y1 as f64, b.x1 as f64);
            f64::max(f64::max(y0 - i, i - y1), f64::max(x0 - j, j - x1))
        })
        .fold(f64::INFINITY, f64::min)
}

struct OracleScores {
    iou: f64,
    dice: f64,
    wdp: f64,
}

fn oracle_scores(values: &[Vec<f64>], boxes: &[BoundingBox], epsilon: f64) -> OracleScores {
    let (mut inter, mut act, mut mask, mut penalty) = (0.0, 0.0, 0.0, 0.0);
    for (i, row) in values.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            let m = if oracle_inside(boxes, i, j) { 1.0 } else { 0.0 };
            inter += a * m;
            act += a;
            mask += m;
            penalty += a * (1.0 - m) * oracle_distance(boxes, i, j);
        }
    }
    let union = act + mask - inter;
    OracleScores {
        iou: if union == 0.0 { 0.0 } else { inter / union },
        dice: if act + mask == 0.0 { 0.0 } else { 2.0 * inter / (act + mask) },
        wdp: sigmoid_log(penalty, act + epsilon),
    }
}

/// Every [`InstanceMetrics`] field by direct loops and literal formulas.
pub fn oracle_metrics(map: &ActivationMap, boxes: &[BoundingBox], cfg: &MetricConfig) -> Result<InstanceMetrics> {
    if boxes.is_empty() {
        return Err(Error::EmptyBoxList);
    }
    for b in boxes {
        b.validate(map.height(), map.width())?;
    }
    let (h, w) = map.shape();
    let soft: Vec<Vec<f64>> = (0..h).map(|i| (0..w).map(|j| map.get(i, j)).collect()).collect();
    let binary: Vec<Vec<f64>> = soft
        .iter()
        .map(|r| r.iter().map(|&a| if a > cfg.binarize_threshold { 1.0 } else { 0.0 }).collect())
        .collect();

    let s = oracle_scores(&soft, boxes, cfg.epsilon);
    let b = oracle_scores(&binary, boxes, cfg.epsilon);

    let (mut s_in, mut s_out) = (0.0, 0.0);
    for (i, row) in soft.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            if oracle_inside(boxes, i, j) {
                s_in += a;
            } else {
                s_out += a;
            }
        }
    }

    // Row-major first strict maximum.
    let mut argmax = (0, 0);
    for (i, row) in soft.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            if a > soft[argmax.0][argmax.1] {
                argmax = (i, j);
            }
        }
    }

    let kept = oracle_nms(&oracle_local_maxima(&soft, cfg.maxima_threshold), cfg.nms_radius).peaks;
    let pg_uncertain = match kept.first() {
        None => false,
        Some(top) => {
            let tied: Vec<&Peak> = kept
                .iter()
                .filter(|p| (p.value - top.value).abs() <= cfg.tie_tolerance)
                .collect();
            let ins = tied.iter().filter(|p| oracle_inside(boxes, p.row, p.col)).count();
            tied.len() >= 2 && ins > 0 && ins < tied.len()
        }
    };

    let mut warnings = Vec::new();
    if s_in + s_out == 0.0 {
        warnings.push(Warning::DegenerateMap);
    }

    Ok(InstanceMetrics {
        iou_soft: s.iou,
        iou_binary: b.iou,
        dice_soft: s.dice,
        dice_binary: b.dice,
        wdp_soft: s.wdp,
        wdp_binary: b.wdp,
        io_ratio: sigmoid_log(s_in, s_out),
        pg_hit: u8::from(oracle_inside(boxes, argmax.0, argmax.1)),
        pg_uncertain,
        argmax_coord: argmax,
        nms_maxima: kept,
        warnings,
    })
}

/// Local maxima by explicit 8-neighbour offsets.
pub fn oracle_local_maxima(values: &[Vec<f64>], tau: f64) -> Vec<Peak> {
    const OFFSETS: [(i64, i64); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];
    let h = values.len() as i64;
    let mut out = Vec::new();
    for (i, row) in values.iter().enumerate() {
        let w = row.len() as i64;
        for (j, &v) in row.iter().enumerate() {
            if v <= tau {
                continue;
            }
            let is_max = OFFSETS.iter().all(|&(di, dj)| {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                ni < 0 || nj < 0 || ni >= h || nj >= w || values[ni as usize][nj as usize] <= v
            });
            if is_max {
                out.push(Peak::new(v, i, j));
            }
        }
    }
    out
}

/// Exhaustive greedy suppression over all earlier survivors.
pub fn oracle_nms(peaks: &[Peak], delta: f64) -> NmsResult {
    let mut sorted = peaks.to_vec();
    sorted.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .expect("finite peak values")
            .then(a.row.cmp(&b.row))
            .then(a.col.cmp(&b.col))
    });
    let mut keep = vec![false; sorted.len()];
    for k in 0..sorted.len() {
        keep[k] = (0..k).all(|e| {
            !keep[e] || {
                let dy = sorted[k].row as f64 - sorted[e].row as f64;
                let dx = sorted[k].col as f64 - sorted[e].col as f64;
                dy.hypot(dx) > delta
            }
        });
    }
    NmsResult {
        peaks: sorted
            .into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect(),
    }
}

/// Random peak list for suppression checks: coarse values so ties are common.
pub fn random_peaks(seed: u64, index: u64, max_len: usize, extent: usize) -> Vec<Peak> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.gen_range(0..=max_len);
    (0..n)
        .map(|_| {
            let value = 0.7 + 0.05 * rng.gen_range(1..=6) as f64;
            Peak::new(value.min(1.0), rng.gen_range(0..extent), rng.gen_range(0..extent))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointing::pg_uncertainty;

    #[test]
    fn gaussian_map_examples() {
        let m = gaussian_map(32, 40, &[BlobSpec::new((10, 17), 3.0, 1.0)], 0.0, 1).unwrap();
        assert_eq!(m.get(10, 17), 1.0);
        assert!(m.values().iter().all(|&v| v <= 1.0));

        let z = gaussian_map(8, 8, &[], 0.0, 1).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));

        let blobs = [BlobSpec::new((3, 3), 2.0, 0.8), BlobSpec::new((6, 1), 1.0, 0.5)];
        let a = gaussian_map(9, 9, &blobs, 0.2, 42).unwrap();
        let b = gaussian_map(9, 9, &blobs, 0.2, 42).unwrap();
        assert_eq!(
            a.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        let c = gaussian_map(9, 9, &blobs, 0.2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_map_rejects_bad_blobs() {
        for b in [
            BlobSpec::new((9, 0), 1.0, 1.0),
            BlobSpec::new((0, 0), 0.0, 1.0),
            BlobSpec::new((0, 0), 1.0, 0.0),
            BlobSpec::new((0, 0), 1.0, 1.5),
        ] {
            assert!(matches!(gaussian_map(9, 9, &[b], 0.0, 0), Err(Error::InvalidBlob(_))));
        }
    }

    #[test]
    fn scenario1_default_is_uncertain() {
        let cfg = MetricConfig::default();
        let bbox = BoundingBox::new(80, 80, 140, 140);
        let gt = GroundTruth::new(vec![bbox], 224, 224).unwrap();
        let map = scenario1_fixture(224, 224, bbox, cfg.nms_radius).unwrap();
        assert!(pg_uncertainty(&map, &gt, &cfg).unwrap().uncertain);
        for kind in [Scenario1Kind::SameSide, Scenario1Kind::Unequal] {
            let map = scenario1_variant(224, 224, bbox, cfg.nms_radius, kind).unwrap();
            assert!(!pg_uncertainty(&map, &gt, &cfg).unwrap().uncertain, "{kind:?}");
        }
    }

    #[test]
    fn scenario1_places_border_peak_when_room() {
        let cfg = MetricConfig::default();
        let bbox = BoundingBox::new(20, 20, 180, 180);
        let map = scenario1_fixture(400, 400, bbox, cfg.nms_radius).unwrap();
        let gt = GroundTruth::new(vec![bbox], 400, 400).unwrap();
        let r = pg_uncertainty(&map, &gt, &cfg).unwrap();
        assert!(r.uncertain);
        assert_eq!(r.tied_peaks.len(), 3);
    }

    #[test]
    fn scenario1_rejects_full_box() {
        assert!(matches!(
            scenario1_fixture(64, 64, BoundingBox::new(0, 0, 64, 64), 50.0),
            Err(Error::BoxTooLarge { .. })
        ));
    }

    #[test]
    fn scenario2_examples() {
        let bbox = BoundingBox::new(80, 80, 140, 140);
        let maps = scenario2_fixtures(224, 224, bbox, &[0.0]).unwrap();
        let gt = GroundTruth::new(vec![bbox], 224, 224).unwrap();
        assert_eq!(crate::metrics::io_ratio(&maps[0], &gt).unwrap(), 1.0);
        assert!(matches!(
            scenario2_fixtures(224, 224, bbox, &[1.0, 0.5]),
            Err(Error::InvalidMasses(_))
        ));
        assert!(matches!(
            scenario2_fixtures(224, 224, bbox, &[-1.0]),
            Err(Error::InvalidMasses(_))
        ));
    }

    #[test]
    fn oracle_nms_examples() {
        assert!(oracle_nms(&[], 50.0).peaks.is_empty());
        let peaks = [
            Peak::new(1.0, 10, 10),
            Peak::new(1.0, 15, 15),
            Peak::new(0.9, 100, 100),
        ];
        assert_eq!(
            oracle_nms(&peaks, 50.0).peaks,
            vec![Peak::new(1.0, 10, 10), Peak::new(0.9, 100, 100)]
        );
    }

    #[test]
    fn sigmoid_log_limits() {
        assert_eq!(sigmoid_log(0.0, 1.0), 0.0);
        assert_eq!(sigmoid_log(1.0, 0.0), 1.0);
        assert_eq!(sigmoid_log(0.0, 0.0), 0.0);
        assert!((sigmoid_log(3.0, 1.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn random_instances_are_reproducible() {
        let (a, ga) = random_instance(7, 3, 32, 32);
        let (b, gb) = random_instance(7, 3, 32, 32);
        assert_eq!(a, b);
        assert_eq!(ga, gb);
        crate::model::validate_map(&a).unwrap();
        let (c, _) = random_instance(7, 4, 32, 32);
        assert_ne!(a, c);
    }
}
