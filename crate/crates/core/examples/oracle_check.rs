//! Cross-checks the fused evaluator against the brute-force oracle.

use groundcam::fixtures::{oracle_metrics, oracle_nms, random_instance, random_peaks};
use groundcam::pointing::nms;
use groundcam::{evaluate_map, MetricConfig};

fn main() -> groundcam::Result<()> {
    let cfg = MetricConfig::default();
    let n = 200;
    let mut worst = 0.0f64;
    let mut label_mismatches = 0;
    for k in 0..n {
        let (map, gt) = random_instance(0, k, 40, 40);
        let fast = evaluate_map(&map, &gt, &cfg)?;
        let slow = oracle_metrics(&map, gt.boxes(), &cfg)?;
        for (a, b) in fast.scalars().iter().zip(slow.scalars()) {
            worst = worst.max((a - b).abs());
        }
        if fast.pg_hit != slow.pg_hit || fast.pg_uncertain != slow.pg_uncertain {
            label_mismatches += 1;
        }
    }
    println!("{n} instances: max scalar difference {worst:.2e}, {label_mismatches} label mismatches");

    let nms_mismatches = (0..n)
        .filter(|&k| {
            let peaks = random_peaks(0, k, 200, 224);
            nms(&peaks, cfg.nms_radius) != oracle_nms(&peaks, cfg.nms_radius)
        })
        .count();
    println!("{n} peak lists: {nms_mismatches} nms mismatches");
    Ok(())
}
